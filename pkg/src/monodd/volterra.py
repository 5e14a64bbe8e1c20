"""Memory-term quadrature, stabilizing coefficients, and the monotone
right-hand side.

The Volterra term g(t,x,u) = int_0^t g0(t,x,s,u(t,x),u(s,x)) ds is
approximated with the composite trapezoidal rule on the stored time levels.
Trapezoid weights are nonnegative, which is what lets the discrete g inherit
the monotone-in-history bound g(u) - g(v) >= -b_under (u - v).

The stabilizer c_total >= max(c_under + b_under, 0) is added to both sides
of the equation so that

    F1(t, x, u) = c_total u + f(t, x, u) + g(t, x, u)

is nondecreasing in u over the bracket.  c_under and b_under are sampled
suprema of -df/du and -dg0/deta1; an additive margin compensates for the
sampling underestimate.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discretization import Field, Grid1D


class StabilizerError(RuntimeError):
    pass


@dataclass(frozen=True)
class StabilizerField:
    c_total: Field  # clamped c = max(c_under + b_under + margin, 0)
    b_under: Field  # memory-term component, kept for diagnostics


def quadrature_weights(k, dt):
    """Trapezoid weights dt*(1/2, 1, ..., 1, 1/2) over s_0..s_k (k >= 1)."""
    w = np.full(k + 1, dt)
    w[0] = w[-1] = 0.5 * dt
    return w


def eval_g_row(kernel, u, k, grid):
    """Memory integral at time level k for every node, from the history of u."""
    nx = grid.nx
    if k == 0 or kernel.trivial:
        return np.zeros(nx + 1)
    w = quadrature_weights(k, grid.dt)
    vals = np.asarray(
        kernel.g0(
            grid.ts[k],
            grid.xs[None, :],
            grid.ts[: k + 1, None],
            u[k][None, :],
            u[: k + 1],
        ),
        dtype=float,
    )
    vals = np.broadcast_to(vals, (k + 1, nx + 1))
    return w @ vals


def eval_g(kernel, u, k, i, grid):
    """Memory integral at node (k, i); bitwise equal to eval_g_row(...)[i]."""
    return float(eval_g_row(kernel, u, k, grid)[i])


def compute_stabilizers(spec, grid, u_hat_field, u_tilde_field, n_samples=8, margin=1e-6):
    """Sampled suprema c_under, b_under over the bracket, combined and clamped.

    c_under(t,x) ~ max over eta in [u_hat, u_tilde] of -f_u(t,x,eta);
    b_under(t,x) = trapezoid over s of max over eta1, eta2 of -dg0/deta1.
    Derivatives use analytic callables when supplied, centered differences
    otherwise.  The additive margin guards against sampled-sup underestimate;
    the result is clamped at zero so every assembled system is an M-matrix.
    """
    if n_samples < 2:
        raise ValueError(f"n_samples must be >= 2, got {n_samples}")
    lo = np.asarray(u_hat_field, dtype=float)
    hi = np.asarray(u_tilde_field, dtype=float)
    if np.any(lo > hi):
        raise ValueError("u_hat_field must be <= u_tilde_field everywhere")
    width = hi - lo
    shape = lo.shape
    reaction, kernel = spec.reaction, spec.kernel
    theta = np.linspace(0.0, 1.0, n_samples)
    tg = grid.ts[None, :, None]
    xg = grid.xs[None, None, :]

    degenerate = float(np.max(width)) == 0.0

    if reaction.c_bar_bound is not None:
        c_under = np.full(shape, float(reaction.c_bar_bound))
    else:
        if reaction.f_u is None and degenerate:
            raise StabilizerError(
                "bracket has zero width and no analytic f_u or c_bar_bound was supplied"
            )
        eta = lo[None] + theta[:, None, None] * width[None]  # (p, nt+1, nx+1)
        if reaction.f_u is not None:
            d = np.asarray(reaction.f_u(tg, xg, eta), dtype=float)
        else:
            eps = 1e-6 * float(np.max(width))
            d = (
                np.asarray(reaction.f(tg, xg, eta + eps), dtype=float)
                - np.asarray(reaction.f(tg, xg, eta - eps), dtype=float)
            ) / (2 * eps)
        c_under = np.max(-np.broadcast_to(d, eta.shape), axis=0)

    b_under = np.zeros(shape)
    if not kernel.trivial:
        if kernel.dg0_deta1 is None and degenerate:
            raise StabilizerError(
                "bracket has zero width and no analytic dg0_deta1 was supplied"
            )
        eps = 1e-6 * float(np.max(width)) if not degenerate else 0.0
        for k in range(1, grid.nt + 1):
            # axes: (history level m, eta1 sample, eta2 sample, node)
            e1 = (lo[k] + theta[:, None] * width[k])[None, :, None, :]
            e2 = (lo[: k + 1, None, :] + theta[None, :, None] * width[: k + 1, None, :])[
                :, None, :, :
            ]
            t = grid.ts[k]
            s = grid.ts[: k + 1, None, None, None]
            x = grid.xs[None, None, None, :]
            if kernel.dg0_deta1 is not None:
                d = np.asarray(kernel.dg0_deta1(t, x, s, e1, e2), dtype=float)
            else:
                d = (
                    np.asarray(kernel.g0(t, x, s, e1 + eps, e2), dtype=float)
                    - np.asarray(kernel.g0(t, x, s, e1 - eps, e2), dtype=float)
                ) / (2 * eps)
            d = np.broadcast_to(d, (k + 1, n_samples, n_samples, grid.nx + 1))
            b0 = np.max(-d, axis=(1, 2))  # (k+1, nx+1)
            b_under[k] = quadrature_weights(k, grid.dt) @ b0

    c_total = np.maximum(c_under + b_under + margin, 0.0)
    return StabilizerField(c_total=c_total, b_under=b_under)


def eval_F1(spec, stab, u, k, grid):
    """Monotone right-hand side c_total u + f + g at time level k, all nodes."""
    x = grid.xs
    t = grid.ts[k]
    fval = np.broadcast_to(
        np.asarray(spec.reaction.f(t, x, u[k]), dtype=float), (grid.nx + 1,)
    )
    return stab.c_total[k] * u[k] + fval + eval_g_row(spec.kernel, u, k, grid)


def eval_F1_field(spec, stab, u, grid):
    """eval_F1 stacked over every time level (row 0 included for completeness)."""
    out = np.empty((grid.nt + 1, grid.nx + 1))
    for k in range(grid.nt + 1):
        out[k] = eval_F1(spec, stab, u, k, grid)
    return out

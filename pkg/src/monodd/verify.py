"""Discrete verification utilities: bracket residuals, monotone-chain
checking, M-matrix validation, and convergence-order studies.

Bracket residuals deliberately reuse the solver's stencils and quadrature:
a candidate certified here starts a monotone discrete iteration to roundoff,
which certification against exact calculus would not guarantee.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .discretization import sample_field
from .volterra import eval_g_row


@dataclass(frozen=True)
class ResidualReport:
    worst_interior: tuple  # (value, k, i)
    worst_boundary: tuple  # (value, k, end)
    worst_initial: tuple  # (value, i)
    passed: bool
    slack: float


def _eval_rows(fn, t, x):
    return np.broadcast_to(np.asarray(fn(t, x), dtype=float), np.shape(x))


def check_bracket(spec, grid, candidate, kind, slack=1e-9):
    """Discrete sub/supersolution residuals of a candidate field.

    kind="super" requires all residuals >= -slack; kind="sub" checks the
    reversed inequalities (implemented by flipping the residual sign).
    """
    if kind not in ("super", "sub"):
        raise ValueError(f"kind must be 'super' or 'sub', got {kind!r}")
    sign = 1.0 if kind == "super" else -1.0
    U = candidate if isinstance(candidate, np.ndarray) else sample_field(candidate, grid)
    nx, nt, dx, dt = grid.nx, grid.nt, grid.dx, grid.dt
    xs, ts = grid.xs, grid.ts

    worst_int = (math.inf, -1, -1)
    for k in range(1, nt + 1):
        t = ts[k]
        a = _eval_rows(spec.coeffs.a, t, xs[1:-1])
        b = _eval_rows(spec.coeffs.b, t, xs[1:-1])
        ut = (U[k, 1:-1] - U[k - 1, 1:-1]) / dt
        uxx = (U[k, 2:] - 2.0 * U[k, 1:-1] + U[k, :-2]) / (dx * dx)
        fwd = (U[k, 2:] - U[k, 1:-1]) / dx
        bwd = (U[k, 1:-1] - U[k, :-2]) / dx
        ux = np.where(b > 0, fwd, bwd)
        fval = np.broadcast_to(
            np.asarray(spec.reaction.f(t, xs[1:-1], U[k, 1:-1]), dtype=float), (nx - 1,)
        )
        g = eval_g_row(spec.kernel, U, k, grid)[1:-1]
        res = sign * (ut - a * uxx - b * ux - fval - g)
        i = int(np.argmin(res))
        if res[i] < worst_int[0]:
            worst_int = (float(res[i]), k, i + 1)

    worst_bnd = (math.inf, -1, "")
    for k in range(1, nt + 1):
        t = ts[k]
        for end, bc, val, ngh in (
            ("left", spec.bc_left, U[k, 0], U[k, 1]),
            ("right", spec.bc_right, U[k, nx], U[k, nx - 1]),
        ):
            r = sign * (
                float(bc.alpha0(t)) * (val - ngh) / dx + float(bc.beta0(t)) * val - float(bc.h(t))
            )
            if r < worst_bnd[0]:
                worst_bnd = (float(r), k, end)

    res0 = sign * (U[0] - np.broadcast_to(np.asarray(spec.u0(xs), dtype=float), (nx + 1,)))
    i0 = int(np.argmin(res0))
    worst_ini = (float(res0[i0]), i0)

    passed = min(worst_int[0], worst_bnd[0], worst_ini[0]) >= -slack
    return ResidualReport(
        worst_interior=worst_int,
        worst_boundary=worst_bnd,
        worst_initial=worst_ini,
        passed=passed,
        slack=slack,
    )


# The seven ordering links between consecutive sweeps:
# u_hat <= u11(n) <= u21(n) <= u11(n+1) <= u12(n+1) <= u22(n) <= u12(n) <= u_tilde
def _chain_links(prev, nxt, u_hat_field, u_tilde_field):
    return (
        ("u_hat <= u11(n)", u_hat_field, prev.u11),
        ("u11(n) <= u21(n)", prev.u11, prev.u21),
        ("u21(n) <= u11(n+1)", prev.u21, nxt.u11),
        ("u11(n+1) <= u12(n+1)", nxt.u11, nxt.u12),
        ("u12(n+1) <= u22(n)", nxt.u12, prev.u22),
        ("u22(n) <= u12(n)", prev.u22, prev.u12),
        ("u12(n) <= u_tilde", prev.u12, u_tilde_field),
    )


def check_monotone_chain(prev, nxt, u_hat_field, u_tilde_field, slack=1e-10):
    """Check all seven chain links at every node; returns a violation list.

    Each violation is (link_name, k, i, margin) with margin < -slack.
    Empty list means the chain holds.
    """
    shape = np.shape(prev.u11)
    for name, left, right in _chain_links(prev, nxt, u_hat_field, u_tilde_field):
        if np.shape(left) != shape or np.shape(right) != shape:
            raise ValueError(f"grid mismatch in chain link {name!r}")
    violations = []
    for name, left, right in _chain_links(prev, nxt, u_hat_field, u_tilde_field):
        margin = right - left
        bad = margin < -slack
        if np.any(bad):
            for k, i in zip(*np.nonzero(bad)):
                violations.append((name, int(k), int(i), float(margin[k, i])))
    return violations


def chain_min_margin(prev, nxt, u_hat_field, u_tilde_field):
    """Most negative (or smallest) margin over all links and nodes."""
    return min(
        float(np.min(right - left))
        for _, left, right in _chain_links(prev, nxt, u_hat_field, u_tilde_field)
    )


def m_matrix_check(system):
    """M-matrix pattern check: positive diagonal, nonpositive off-diagonals,
    weak diagonal dominance in every row and strict dominance in at least one.

    Returns (flag, worst-row diagnostic string).
    """
    sub, diag, sup = system.sub, system.diag, system.sup
    if np.any(diag <= 0):
        i = int(np.argmin(diag))
        return False, f"row {i}: diagonal {diag[i]:.6g} not positive"
    if np.any(sub > 0) or np.any(sup > 0):
        off = np.maximum(sub, sup)
        i = int(np.argmax(off))
        return False, f"row {i}: positive off-diagonal {off[i]:.6g}"
    excess = diag - (np.abs(sub) + np.abs(sup))
    if np.any(excess < 0):
        i = int(np.argmin(excess))
        return False, f"row {i}: diagonal dominance fails by {-excess[i]:.6g}"
    if not np.any(excess > 0):
        return False, "no row is strictly diagonally dominant"
    return True, f"ok (min dominance excess {np.min(excess):.6g})"


def default_decomposition(nx):
    """Centered overlap covering the middle quarter of the grid."""
    from .iteration import Decomposition

    return Decomposition(i1_hi=(5 * nx) // 8, i2_lo=(3 * nx) // 8)


@dataclass(frozen=True)
class OrderStudyResult:
    grids: tuple  # ((nx, nt), ...)
    errors: tuple  # L-inf error vs exact per grid
    orders: tuple  # log2(e_coarse / e_fine) per refinement step


def order_study(spec, grids, tol, max_sweeps=500, decomposition_for=None, **run_kwargs):
    """Run the domain-decomposition solver per grid and report observed orders.

    Requires spec.exact.  Raises RuntimeError on a non-converged run.
    """
    from .iteration import run_dd

    if spec.exact is None:
        raise ValueError("order_study requires a spec with an exact solution attached")
    from .discretization import build_grid

    if decomposition_for is None:
        decomposition_for = default_decomposition
    errors = []
    for nx, nt in grids:
        grid = build_grid(spec.domain, nx, nt)
        sol, _ = run_dd(spec, grid, decomposition_for(nx), tol, max_sweeps, **run_kwargs)
        if not sol.converged:
            raise RuntimeError(f"run on grid (nx={nx}, nt={nt}) did not converge")
        exact = sample_field(spec.exact, grid)
        errors.append(float(np.max(np.abs(sol.u - exact))))
    orders = [
        math.log2(errors[i] / errors[i + 1]) for i in range(len(errors) - 1)
    ]
    return OrderStudyResult(grids=tuple(grids), errors=tuple(errors), orders=tuple(orders))

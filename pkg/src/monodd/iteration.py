"""Monotone domain-decomposition iteration over two overlapping subdomains.

Four bracketing fields are advanced per sweep: a lower and an upper branch
(started from the subsolution and supersolution), each carried by a
subdomain-1 composite and a subdomain-2 composite.  Within a branch the
subdomain-2 solve sees subdomain 1's freshly updated interface trace
(multiplicative/alternating order).  Artificial interfaces carry Dirichlet
trace copies; physical endpoints always carry the real boundary data.

The undecomposed single-domain monotone iteration is provided as a
correctness oracle for the decomposed limit.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .discretization import (
    Field,
    Subrange,
    physical_closure,
    pinned_closure,
    sample_field,
    solve_linear_parabolic,
)
from .verify import chain_min_margin
from .volterra import compute_stabilizers, eval_F1_field


class MonotoneChainError(RuntimeError):
    def __init__(self, sweep, margin):
        super().__init__(
            f"monotone chain violated at sweep {sweep} (worst margin {margin:.3e})"
        )
        self.sweep = sweep
        self.margin = margin


@dataclass(frozen=True)
class Decomposition:
    """Two overlapping index windows: [0, i1_hi] and [i2_lo, nx]."""

    i1_hi: int
    i2_lo: int

    def __post_init__(self):
        if self.i2_lo <= 0:
            raise ValueError(f"i2_lo must be positive, got {self.i2_lo}")
        if self.i1_hi - self.i2_lo < 2:
            raise ValueError(
                f"overlap too small: need i1_hi - i2_lo >= 2, got {self.i1_hi - self.i2_lo}"
            )

    def check(self, nx):
        if self.i1_hi >= nx:
            raise ValueError(f"i1_hi={self.i1_hi} must be < nx={nx}")


@dataclass
class IterationState:
    """The four bracketing fields; subscript 1j / 2j = subdomain-1 / 2
    composite, j = 1 lower branch, j = 2 upper branch."""

    u11: Field
    u12: Field
    u21: Field
    u22: Field
    sweep_index: int = 0


@dataclass
class ConvergenceHistory:
    gap_lower_upper: List[float] = field(default_factory=list)
    max_update: List[float] = field(default_factory=list)
    chain_violation: List[float] = field(default_factory=list)
    wall_ms: List[float] = field(default_factory=list)
    states: Optional[list] = None  # per-sweep states when requested


@dataclass
class Solution:
    u: Field  # midpoint of the converged bracket
    u_lower: Field
    u_upper: Field
    converged: bool
    sweeps_used: int


def init_state(spec, grid):
    """Sample the bracket on the grid as the sweep-0 state."""
    lo = sample_field(spec.bracket.u_hat, grid)
    hi = sample_field(spec.bracket.u_tilde, grid)
    if np.any(lo > hi):
        k, i = np.unravel_index(np.argmax(lo - hi), lo.shape)
        raise ValueError(
            f"bracket ordering violated at node (k={k}, i={i}): "
            f"u_hat={lo[k, i]:.6g} > u_tilde={hi[k, i]:.6g}"
        )
    return IterationState(u11=lo.copy(), u12=hi.copy(), u21=lo.copy(), u22=hi.copy())


def _u0_row(spec, grid):
    return np.broadcast_to(
        np.asarray(spec.u0(grid.xs), dtype=float), (grid.nx + 1,)
    ).copy()


def _advance_branch(u1, u2, spec, grid, decomp, stab, u0_row):
    """One sweep of one branch: subdomain-1 solve, then subdomain-2 solve
    against the fresh interface trace; returns the two new composites."""
    i1_hi, i2_lo = decomp.i1_hi, decomp.i2_lo

    q1 = eval_F1_field(spec, stab, u1, grid)
    w1 = Subrange(0, i1_hi)
    sol1 = solve_linear_parabolic(
        grid,
        w1,
        spec.coeffs,
        stab.c_total,
        q1,
        physical_closure(spec.bc_left, grid),
        pinned_closure(u2[:, i1_hi]),
        u0_row[: i1_hi + 1],
    )
    new1 = u2.copy()
    new1[:, : i1_hi + 1] = sol1
    new1[0] = u0_row

    q2 = eval_F1_field(spec, stab, u2, grid)
    w2 = Subrange(i2_lo, grid.nx)
    sol2 = solve_linear_parabolic(
        grid,
        w2,
        spec.coeffs,
        stab.c_total,
        q2,
        pinned_closure(new1[:, i2_lo]),
        physical_closure(spec.bc_right, grid),
        u0_row[i2_lo:],
    )
    new2 = new1.copy()
    new2[:, i2_lo:] = sol2
    new2[0] = u0_row
    return new1, new2


def dd_sweep(state, spec, grid, decomp, stab, parallel=False):
    """Advance both branches by one alternating-Schwarz sweep."""
    decomp.check(grid.nx)
    u0_row = _u0_row(spec, grid)

    def lower():
        return _advance_branch(state.u11, state.u21, spec, grid, decomp, stab, u0_row)

    def upper():
        return _advance_branch(state.u12, state.u22, spec, grid, decomp, stab, u0_row)

    if parallel:
        with ThreadPoolExecutor(max_workers=2) as pool:
            f_lo = pool.submit(lower)
            f_hi = pool.submit(upper)
            new11, new21 = f_lo.result()
            new12, new22 = f_hi.result()
    else:
        new11, new21 = lower()
        new12, new22 = upper()
    return IterationState(
        u11=new11, u12=new12, u21=new21, u22=new22, sweep_index=state.sweep_index + 1
    )


def _metrics(prev, nxt, lo, hi):
    gap = max(
        float(np.max(nxt.u22 - nxt.u21)), float(np.max(nxt.u12 - nxt.u11))
    )
    upd = max(
        float(np.max(np.abs(getattr(nxt, name) - getattr(prev, name))))
        for name in ("u11", "u12", "u21", "u22")
    )
    viol = chain_min_margin(prev, nxt, lo, hi)
    return gap, upd, viol


def _iterate(step, state, lo, hi, tol, max_sweeps, abort_on_chain_violation, chain_slack, keep_states):
    history = ConvergenceHistory(states=[state] if keep_states else None)
    converged = False
    for _ in range(max_sweeps):
        t0 = time.perf_counter()
        nxt = step(state)
        gap, upd, viol = _metrics(state, nxt, lo, hi)
        history.gap_lower_upper.append(gap)
        history.max_update.append(upd)
        history.chain_violation.append(viol)
        history.wall_ms.append(1e3 * (time.perf_counter() - t0))
        if keep_states:
            history.states.append(nxt)
        state = nxt
        if abort_on_chain_violation and viol < -chain_slack:
            raise MonotoneChainError(state.sweep_index, viol)
        if gap <= tol and upd <= tol:
            converged = True
            break
    solution = Solution(
        u=0.5 * (state.u21 + state.u22),
        u_lower=state.u21,
        u_upper=state.u22,
        converged=converged,
        sweeps_used=state.sweep_index,
    )
    return solution, history, state


def run_dd(
    spec,
    grid,
    decomp,
    tol,
    max_sweeps,
    n_samples=8,
    c_margin=1e-6,
    parallel=False,
    abort_on_chain_violation=False,
    chain_slack=1e-10,
    keep_states=False,
):
    """Sweep the two-subdomain scheme until the bracket gap and the update
    size both drop below tol, or max_sweeps is hit.

    The stabilizer c is computed once from the initial bracket and frozen:
    the sup defining it ranges over the order interval, which never grows.
    """
    decomp.check(grid.nx)
    state = init_state(spec, grid)
    lo, hi = state.u11.copy(), state.u12.copy()
    stab = compute_stabilizers(spec, grid, lo, hi, n_samples=n_samples, margin=c_margin)

    def step(s):
        return dd_sweep(s, spec, grid, decomp, stab, parallel=parallel)

    solution, history, _ = _iterate(
        step, state, lo, hi, tol, max_sweeps, abort_on_chain_violation, chain_slack, keep_states
    )
    return solution, history


def run_single_domain(
    spec,
    grid,
    tol,
    max_sweeps,
    n_samples=8,
    c_margin=1e-6,
    abort_on_chain_violation=False,
    chain_slack=1e-10,
    keep_states=False,
):
    """Undecomposed two-sequence monotone iteration (the DD oracle):
    the same loop with a single window covering the whole grid."""
    state = init_state(spec, grid)
    lo, hi = state.u11.copy(), state.u12.copy()
    stab = compute_stabilizers(spec, grid, lo, hi, n_samples=n_samples, margin=c_margin)
    u0_row = _u0_row(spec, grid)
    window = Subrange(0, grid.nx)

    def advance(u):
        q = eval_F1_field(spec, stab, u, grid)
        sol = solve_linear_parabolic(
            grid,
            window,
            spec.coeffs,
            stab.c_total,
            q,
            physical_closure(spec.bc_left, grid),
            physical_closure(spec.bc_right, grid),
            u0_row,
        )
        sol[0] = u0_row
        return sol

    def step(s):
        new_lo = advance(s.u11)
        new_hi = advance(s.u12)
        return IterationState(
            u11=new_lo,
            u12=new_hi,
            u21=new_lo.copy(),
            u22=new_hi.copy(),
            sweep_index=s.sweep_index + 1,
        )

    solution, history, _ = _iterate(
        step, state, lo, hi, tol, max_sweeps, abort_on_chain_violation, chain_slack, keep_states
    )
    return solution, history

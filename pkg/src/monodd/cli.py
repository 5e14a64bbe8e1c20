"""Batch front end: JSON config in, CSV artifacts and exit codes out.

Exit codes: 0 success/converged, 2 not converged, 3 invalid config,
4 bracket verification failed, 5 monotone-chain violation (run aborted).
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .discretization import build_grid, sample_field, set_mmatrix_audit
from .iteration import Decomposition, MonotoneChainError, run_dd, run_single_domain
from .model import Bracket, CatalogError, catalog_lookup, validate_problem
from .verify import check_bracket, default_decomposition, order_study

EXIT_OK = 0
EXIT_NOT_CONVERGED = 2
EXIT_BAD_CONFIG = 3
EXIT_VERIFY_FAILED = 4
EXIT_CHAIN_VIOLATION = 5


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    problem_name: str
    problem_params: dict
    u_hat_const: Optional[float]
    u_tilde_const: Optional[float]
    nx: int
    nt: int
    grids: Optional[list]  # for the order command
    single_domain: bool
    decomposition: Optional[Decomposition]
    tol: float
    max_sweeps: int
    c_margin: float
    n_samples: int
    parallel_branches: bool
    solution_csv: Optional[str]
    history_csv: Optional[str]


def _need(mapping, key, where):
    if key not in mapping:
        raise ConfigError(f"missing field {where}.{key}")
    return mapping[key]


def load_config(path):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None

    prob = _need(raw, "problem", "config")
    name = _need(prob, "name", "problem")
    params = dict(prob.get("params", {}))
    u_hat_const = prob.get("u_hat_const")
    u_tilde_const = prob.get("u_tilde_const")

    grids = None
    nx = nt = 0
    if "grids" in raw:
        grids = []
        for entry in raw["grids"]:
            grids.append((int(_need(entry, "nx", "grids[]")), int(_need(entry, "nt", "grids[]"))))
        if not grids:
            raise ConfigError("grids must not be empty")
        nx, nt = grids[0]
    else:
        g = _need(raw, "grid", "config")
        nx = int(_need(g, "nx", "grid"))
        nt = int(_need(g, "nt", "grid"))
    if nx < 4:
        raise ConfigError(f"grid.nx must be >= 4, got {nx}")
    if nt < 1:
        raise ConfigError(f"grid.nt must be >= 1, got {nt}")

    dec_raw = raw.get("decomposition", "single_domain")
    single = dec_raw == "single_domain"
    decomp = None
    if not single:
        i1_hi = int(_need(dec_raw, "i1_hi", "decomposition"))
        i2_lo = int(_need(dec_raw, "i2_lo", "decomposition"))
        if i2_lo >= i1_hi:
            raise ConfigError(f"decomposition.i2_lo={i2_lo} must be < i1_hi={i1_hi}")
        try:
            decomp = Decomposition(i1_hi=i1_hi, i2_lo=i2_lo)
        except ValueError as exc:
            raise ConfigError(f"decomposition: {exc}") from None
        if i1_hi >= nx:
            raise ConfigError(f"decomposition.i1_hi={i1_hi} must be < grid.nx={nx}")

    solver = raw.get("solver", {})
    tol = float(_need(solver, "tol", "solver"))
    if tol <= 0:
        raise ConfigError(f"solver.tol must be positive, got {tol}")
    max_sweeps = int(_need(solver, "max_sweeps", "solver"))
    if max_sweeps < 1:
        raise ConfigError(f"solver.max_sweeps must be >= 1, got {max_sweeps}")

    out = raw.get("output", {})
    return RunConfig(
        problem_name=name,
        problem_params=params,
        u_hat_const=u_hat_const,
        u_tilde_const=u_tilde_const,
        nx=nx,
        nt=nt,
        grids=grids,
        single_domain=single,
        decomposition=decomp,
        tol=tol,
        max_sweeps=max_sweeps,
        c_margin=float(solver.get("c_margin", 1e-6)),
        n_samples=int(solver.get("n_samples", 8)),
        parallel_branches=bool(solver.get("parallel_branches", False)),
        solution_csv=out.get("solution_csv"),
        history_csv=out.get("history_csv"),
    )


def _build_spec(cfg):
    spec = catalog_lookup(cfg.problem_name, cfg.problem_params)
    if cfg.u_hat_const is not None or cfg.u_tilde_const is not None:
        old = spec.bracket
        u_hat = old.u_hat if cfg.u_hat_const is None else (
            lambda t, x, v=float(cfg.u_hat_const): v + 0.0 * x
        )
        u_tilde = old.u_tilde if cfg.u_tilde_const is None else (
            lambda t, x, v=float(cfg.u_tilde_const): v + 0.0 * x
        )
        spec = type(spec)(
            domain=spec.domain,
            coeffs=spec.coeffs,
            reaction=spec.reaction,
            kernel=spec.kernel,
            bc_left=spec.bc_left,
            bc_right=spec.bc_right,
            u0=spec.u0,
            bracket=Bracket(u_hat=u_hat, u_tilde=u_tilde),
            exact=spec.exact,
        )
    return spec


def _fmt(v):
    return format(float(v), ".17g")


def _write_solution_csv(path, grid, solution):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "x", "u", "u_lower", "u_upper"])
        for k in range(grid.nt + 1):
            for i in range(grid.nx + 1):
                writer.writerow(
                    [
                        _fmt(grid.ts[k]),
                        _fmt(grid.xs[i]),
                        _fmt(solution.u[k, i]),
                        _fmt(solution.u_lower[k, i]),
                        _fmt(solution.u_upper[k, i]),
                    ]
                )


def _write_history_csv(path, history):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sweep", "gap_lower_upper", "max_update", "chain_violation", "wall_ms"])
        for n in range(len(history.gap_lower_upper)):
            writer.writerow(
                [
                    n + 1,
                    _fmt(history.gap_lower_upper[n]),
                    _fmt(history.max_update[n]),
                    _fmt(history.chain_violation[n]),
                    _fmt(history.wall_ms[n]),
                ]
            )


def cmd_run(config_path):
    try:
        cfg = load_config(config_path)
        spec = _build_spec(cfg)
    except (ConfigError, CatalogError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    grid = build_grid(spec.domain, cfg.nx, cfg.nt)
    try:
        if cfg.single_domain:
            solution, history = run_single_domain(
                spec,
                grid,
                cfg.tol,
                cfg.max_sweeps,
                n_samples=cfg.n_samples,
                c_margin=cfg.c_margin,
                abort_on_chain_violation=True,
            )
        else:
            solution, history = run_dd(
                spec,
                grid,
                cfg.decomposition,
                cfg.tol,
                cfg.max_sweeps,
                n_samples=cfg.n_samples,
                c_margin=cfg.c_margin,
                parallel=cfg.parallel_branches,
                abort_on_chain_violation=True,
            )
    except MonotoneChainError as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_CHAIN_VIOLATION
    if cfg.solution_csv:
        _write_solution_csv(cfg.solution_csv, grid, solution)
    if cfg.history_csv:
        _write_history_csv(cfg.history_csv, history)
    gap = history.gap_lower_upper[-1] if history.gap_lower_upper else float("nan")
    print(
        f"{cfg.problem_name}: {'converged' if solution.converged else 'NOT converged'} "
        f"after {solution.sweeps_used} sweeps, final gap {gap:.3e}"
    )
    return EXIT_OK if solution.converged else EXIT_NOT_CONVERGED


def cmd_verify(config_path):
    try:
        cfg = load_config(config_path)
        spec = _build_spec(cfg)
    except (ConfigError, CatalogError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    grid = build_grid(spec.domain, cfg.nx, cfg.nt)
    report = validate_problem(spec, sampling=16)
    for item in report:
        print(f"hypothesis violation: {item}")
    ok = not report
    for kind, fn in (("sub", spec.bracket.u_hat), ("super", spec.bracket.u_tilde)):
        rr = check_bracket(spec, grid, fn, kind)
        print(
            f"{kind}solution candidate: passed={rr.passed} "
            f"worst_interior={rr.worst_interior[0]:.3e} "
            f"worst_boundary={rr.worst_boundary[0]:.3e} "
            f"worst_initial={rr.worst_initial[0]:.3e}"
        )
        ok = ok and rr.passed
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def cmd_order(config_path):
    try:
        cfg = load_config(config_path)
        spec = _build_spec(cfg)
        if cfg.grids is None:
            raise ConfigError("order command requires a 'grids' list")
    except (ConfigError, CatalogError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    try:
        result = order_study(
            spec,
            cfg.grids,
            cfg.tol,
            max_sweeps=cfg.max_sweeps,
            n_samples=cfg.n_samples,
            c_margin=cfg.c_margin,
        )
    except RuntimeError as exc:
        print(f"order study failed: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    print("nx,nt,linf_error")
    for (nx, nt), err in zip(result.grids, result.errors):
        print(f"{nx},{nt},{_fmt(err)}")
    print("step,observed_order")
    for n, order in enumerate(result.orders):
        print(f"{n + 1},{_fmt(order)}")
    return EXIT_OK


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="monodd",
        description="Monotone domain-decomposition solver for integro-parabolic problems",
    )
    parser.add_argument(
        "--audit-mmatrix",
        action="store_true",
        help="assert the M-matrix pattern on every assembled system",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("run", "solve a configured problem and write CSV artifacts"),
        ("verify", "validate problem hypotheses and the bracket"),
        ("order", "convergence-order study over a grid list"),
    ):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("config", help="path to a JSON config file")
    args = parser.parse_args(argv)
    if args.audit_mmatrix:
        set_mmatrix_audit(True)
    dispatch = {"run": cmd_run, "verify": cmd_verify, "order": cmd_order}
    return dispatch[args.command](args.config)


def console_main():
    sys.exit(main())


if __name__ == "__main__":
    console_main()

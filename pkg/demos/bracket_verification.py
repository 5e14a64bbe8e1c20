"""Certify sub- and supersolutions before trusting a solve.

The iteration needs an ordered pair of fields that bracket the true
solution: a subsolution (everything it should undershoot) and a
supersolution (everything it should overshoot).  check_bracket tests a
candidate against the same discrete operators the solver uses, so a
passing certificate is meaningful for the actual computation.
"""
from monodd import build_grid, catalog_lookup, check_bracket


def show(label, report):
    verdict = "certified" if report.passed else "REJECTED"
    print(f"{label:40s} {verdict}")
    if not report.passed:
        for part in ("interior", "boundary", "initial"):
            worst = getattr(report, f"worst_{part}")
            if worst is not None and worst[0] < -report.slack:
                print(f"    worst {part} residual: {worst[0]:.3e}")


def main():
    spec = catalog_lookup("logistic_memory", {"lam": 1.0, "kappa": 0.5, "sigma": 0.5})
    grid = build_grid(spec.domain, 32, 32)

    show("zero field as subsolution",
         check_bracket(spec, grid, lambda t, x: 0.0 * x, "sub"))

    # 1 + kappa/lam dominates both the logistic growth and the memory term
    show("constant 1.5 as supersolution",
         check_bracket(spec, grid, lambda t, x: 1.5 + 0.0 * x, "super"))

    # too small: it dips below the initial hump, so the certificate fails
    show("constant 0.1 as supersolution",
         check_bracket(spec, grid, lambda t, x: 0.1 + 0.0 * x, "super"))


if __name__ == "__main__":
    main()

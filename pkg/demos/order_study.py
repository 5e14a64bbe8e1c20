"""Measure convergence orders against known exact solutions.

Two studies: the manufactured problem (nonlinear reaction plus an
exponential memory kernel, refined in space and time together) and the
pure heat problem (time step held fine so the spatial second-order
stencil shows through).
"""
import numpy as np

from monodd import catalog_lookup, order_study


def report(title, result):
    print(title)
    print("  nx    nt    L-inf error")
    for (nx, nt), err in zip(result.grids, result.errors):
        print(f"  {nx:4d}  {nt:4d}  {err:.4e}")
    for k, order in enumerate(result.orders):
        print(f"  refinement {k + 1}: observed order {order:.3f}")
    print()


def main():
    mms = order_study(
        catalog_lookup("manufactured_1"), [(16, 16), (32, 32), (64, 64)], 1e-8
    )
    report("manufactured problem, joint space-time refinement:", mms)

    heat = order_study(
        catalog_lookup("linear_heat"), [(16, 2048), (32, 2048), (64, 2048)], 1e-10
    )
    report("heat problem, spatial refinement at fixed fine time step:", heat)


if __name__ == "__main__":
    main()

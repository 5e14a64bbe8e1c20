import numpy as np
import pytest

from monodd import (
    Bracket,
    BoundaryCondition,
    EllipticCoefficients,
    ProblemSpec,
    Reaction,
    SpaceTimeDomain,
    VolterraKernel,
    set_mmatrix_audit,
)


@pytest.fixture(autouse=True, scope="session")
def audit_all_assemblies():
    # Every system assembled anywhere in the suite must pass the M-matrix
    # check; a violation raises inside assemble_step.
    set_mmatrix_audit(True)
    yield
    set_mmatrix_audit(False)


def make_zero_problem():
    """All-zero data: a=1, b=0, f=0, no memory, homogeneous Dirichlet."""
    bc = BoundaryCondition(alpha0=lambda t: 0.0, beta0=lambda t: 1.0, h=lambda t: 0.0)
    return ProblemSpec(
        domain=SpaceTimeDomain(0.0, 1.0, 1.0),
        coeffs=EllipticCoefficients(a=lambda t, x: 1.0 + 0.0 * x, b=lambda t, x: 0.0 * x),
        reaction=Reaction(f=lambda t, x, u: 0.0 * u, f_u=lambda t, x, u: 0.0 * u),
        kernel=VolterraKernel.zero(),
        bc_left=bc,
        bc_right=bc,
        u0=lambda x: 0.0 * x,
        bracket=Bracket(u_hat=lambda t, x: 0.0 * x, u_tilde=lambda t, x: 0.0 * x),
    )


def desk_logistic():
    from monodd import catalog_lookup

    return catalog_lookup("logistic_memory", {"lam": 1.0, "kappa": 0.5, "sigma": 0.5})

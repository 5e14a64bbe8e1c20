import numpy as np
import pytest

from monodd import (
    Decomposition,
    IterationState,
    TridiagonalSystem,
    build_grid,
    catalog_lookup,
    check_bracket,
    check_monotone_chain,
    m_matrix_check,
    order_study,
)

from conftest import desk_logistic


class TestCheckBracket:
    def test_logistic_subsolution_zero(self):
        spec = desk_logistic()
        grid = build_grid(spec.domain, 16, 16)
        report = check_bracket(spec, grid, lambda t, x: 0.0 * x, "sub")
        assert report.passed

    def test_logistic_supersolution_level(self):
        # rho = 1 + kappa/lam makes 0 >= lam rho(1-rho) + kappa rho hold
        spec = desk_logistic()
        grid = build_grid(spec.domain, 16, 16)
        report = check_bracket(spec, grid, lambda t, x: 1.5 + 0.0 * x, "super")
        assert report.passed

    def test_supersolution_below_initial_peak(self):
        spec = desk_logistic()  # u0 peak sigma = 0.5
        grid = build_grid(spec.domain, 16, 16)
        report = check_bracket(spec, grid, lambda t, x: 0.1 + 0.0 * x, "super")
        assert not report.passed
        value, i = report.worst_initial
        assert value == pytest.approx(0.1 - 0.5, abs=1e-12)
        assert grid.xs[i] == pytest.approx(0.5)

    def test_broken_subsolution_above_initial(self):
        spec = catalog_lookup("linear_heat")
        grid = build_grid(spec.domain, 16, 8)
        report = check_bracket(spec, grid, lambda t, x: 0.5 + 0.0 * x, "sub")
        assert not report.passed

    def test_broken_supersolution_interior(self):
        # level 1 is far below the manufactured forcing peak
        spec = catalog_lookup("manufactured_1")
        grid = build_grid(spec.domain, 16, 16)
        report = check_bracket(spec, grid, lambda t, x: 1.0 + 0.0 * x, "super")
        assert not report.passed
        assert report.worst_interior[0] < 0

    def test_bad_kind(self):
        spec = desk_logistic()
        grid = build_grid(spec.domain, 8, 4)
        with pytest.raises(ValueError, match="kind"):
            check_bracket(spec, grid, lambda t, x: 0.0 * x, "upper")


def state_of(*fields):
    return IterationState(
        u11=fields[0], u12=fields[1], u21=fields[2], u22=fields[3]
    )


class TestCheckMonotoneChain:
    def test_all_zero_states(self):
        z = np.zeros((3, 5))
        s = state_of(z, z, z, z)
        assert check_monotone_chain(s, s, z, z) == []

    def test_handmade_violation(self):
        z = np.zeros((3, 5))
        ones = np.ones((3, 5))
        bad12 = ones.copy()
        bad12[1, 2] = -2.0  # u11 > u12 there
        prev = state_of(z, ones, z, ones)
        nxt = state_of(z, bad12, z, ones)
        violations = check_monotone_chain(prev, nxt, z, ones)
        assert len(violations) == 1
        name, k, i, margin = violations[0]
        assert name == "u11(n+1) <= u12(n+1)" and (k, i) == (1, 2) and margin == -2.0

    def test_grid_mismatch(self):
        z = np.zeros((3, 5))
        s = state_of(z, z, z, z)
        with pytest.raises(ValueError, match="grid mismatch"):
            check_monotone_chain(s, s, np.zeros((3, 6)), np.zeros((3, 6)))


class TestMMatrixCheck:
    def row(self, sub, diag, sup):
        return TridiagonalSystem(
            sub=np.array([float(sub)]),
            diag=np.array([float(diag)]),
            sup=np.array([float(sup)]),
            rhs=np.zeros(1),
        )

    def test_dominant_row(self):
        ok, _ = m_matrix_check(self.row(-4, 9, -4))
        assert ok

    def test_dominance_fails(self):
        ok, diag = m_matrix_check(self.row(-4, 7, -4))
        assert not ok and "dominance" in diag

    def test_sign_fails(self):
        ok, diag = m_matrix_check(self.row(1, 9, -4))
        assert not ok and "off-diagonal" in diag

    def test_nonpositive_diagonal(self):
        ok, diag = m_matrix_check(self.row(-1, 0, -1))
        assert not ok and "diagonal" in diag


class TestOrderStudy:
    def test_single_grid_no_orders(self):
        spec = catalog_lookup("linear_heat")
        result = order_study(spec, [(16, 64)], 1e-9)
        assert result.orders == ()
        assert len(result.errors) == 1

    def test_requires_exact_solution(self):
        spec = desk_logistic()
        with pytest.raises(ValueError, match="exact"):
            order_study(spec, [(16, 16)], 1e-8)

    def test_nonconverged_raises(self):
        spec = catalog_lookup("manufactured_1")
        with pytest.raises(RuntimeError, match="did not converge"):
            order_study(spec, [(16, 16)], 1e-12, max_sweeps=1)

    def test_small_refinement(self):
        spec = catalog_lookup("manufactured_1")
        result = order_study(spec, [(16, 16), (32, 32)], 1e-8)
        assert len(result.orders) == 1
        assert result.orders[0] > 0.8

import numpy as np
import pytest

from monodd import (
    SpaceTimeDomain,
    VolterraKernel,
    build_grid,
    catalog_lookup,
    compute_stabilizers,
    eval_F1,
    eval_g,
    eval_g_row,
    sample_field,
)
from monodd.volterra import StabilizerError, quadrature_weights

from conftest import desk_logistic

EXP_KERNEL = VolterraKernel(g0=lambda t, x, s, e1, e2: np.exp(-(t - s)) * e2)


def unit_grid(nx, nt, T=1.0):
    return build_grid(SpaceTimeDomain(0.0, 1.0, T), nx, nt)


class TestEvalG:
    def test_empty_integral_at_t0(self):
        grid = unit_grid(8, 8)
        u = np.ones((9, 9))
        assert eval_g(EXP_KERNEL, u, 0, 3, grid) == 0.0

    def test_exact_on_constants(self):
        kernel = VolterraKernel(g0=lambda t, x, s, e1, e2: e2)
        for nt in (7, 16):
            grid = unit_grid(8, nt)
            u = np.ones((nt + 1, 9))
            assert eval_g(kernel, u, nt, 4, grid) == pytest.approx(1.0, abs=1e-14)

    def exp_error(self, nt):
        grid = unit_grid(4, nt)
        u = np.ones((nt + 1, 5))
        return abs(eval_g(EXP_KERNEL, u, nt, 2, grid) - (1.0 - np.exp(-1.0)))

    def test_exponential_closed_form(self):
        assert self.exp_error(64) < 1.3e-4
        assert 3.5 < self.exp_error(64) / self.exp_error(128) < 4.5

    def test_weights_nonnegative(self):
        for k in (1, 2, 9):
            assert np.all(quadrature_weights(k, 0.1) >= 0)


class TestEvalGRow:
    def test_zero_history(self):
        grid = unit_grid(8, 8)
        u = np.zeros((9, 9))
        np.testing.assert_array_equal(eval_g_row(EXP_KERNEL, u, 5, grid), 0.0)

    def test_matches_per_node_bitwise(self):
        grid = unit_grid(8, 12)
        rng = np.random.default_rng(5)
        u = rng.random((13, 9))
        for k in (0, 1, 7, 12):
            row = eval_g_row(EXP_KERNEL, u, k, grid)
            for i in range(9):
                assert row[i] == eval_g(EXP_KERNEL, u, k, i, grid)

    def test_logistic_history_consistency(self):
        spec = desk_logistic()
        grid = build_grid(spec.domain, 8, 8)
        rng = np.random.default_rng(9)
        u = 1.5 * rng.random((9, 9))
        row = eval_g_row(spec.kernel, u, 6, grid)
        for i in range(9):
            assert row[i] == eval_g(spec.kernel, u, 6, i, grid)


class TestComputeStabilizers:
    def test_logistic_supremum(self):
        # -f_u = 2u - 1 on [0, 1.5] has supremum 2 at the right endpoint.
        spec = desk_logistic()
        grid = build_grid(spec.domain, 8, 8)
        lo = np.zeros((9, 9))
        hi = np.full((9, 9), 1.5)
        stab = compute_stabilizers(spec, grid, lo, hi, n_samples=8, margin=1e-6)
        np.testing.assert_allclose(stab.c_total, 2.0 + 1e-6, atol=1e-12)
        np.testing.assert_array_equal(stab.b_under, 0.0)

    def test_kernel_independent_of_eta1(self):
        spec = catalog_lookup("manufactured_1")
        grid = build_grid(spec.domain, 6, 6)
        lo = np.zeros((7, 7))
        hi = np.full((7, 7), 4.0)
        stab = compute_stabilizers(spec, grid, lo, hi)
        np.testing.assert_array_equal(stab.b_under, 0.0)

    def test_clamp_at_zero(self):
        from conftest import make_zero_problem
        from monodd import Reaction

        base = make_zero_problem()
        spec = type(base)(
            domain=base.domain,
            coeffs=base.coeffs,
            reaction=Reaction(f=lambda t, x, u: u, f_u=lambda t, x, u: 1.0 + 0.0 * u),
            kernel=base.kernel,
            bc_left=base.bc_left,
            bc_right=base.bc_right,
            u0=base.u0,
            bracket=base.bracket,
        )
        grid = build_grid(spec.domain, 6, 4)
        lo = np.zeros((5, 7))
        hi = np.ones((5, 7))
        stab = compute_stabilizers(spec, grid, lo, hi, margin=1e-6)
        # c_under = -1, clamp lands at 0
        np.testing.assert_array_equal(stab.c_total, 0.0)

    def test_zero_width_without_derivatives(self):
        from monodd import Bracket, Reaction

        base = desk_logistic()
        spec = type(base)(
            domain=base.domain,
            coeffs=base.coeffs,
            reaction=Reaction(f=lambda t, x, u: u * u),
            kernel=base.kernel,
            bc_left=base.bc_left,
            bc_right=base.bc_right,
            u0=base.u0,
            bracket=base.bracket,
        )
        grid = build_grid(spec.domain, 6, 4)
        z = np.zeros((5, 7))
        with pytest.raises(StabilizerError):
            compute_stabilizers(spec, grid, z, z)

    def test_enlarging_bracket_never_decreases(self):
        spec = desk_logistic()
        grid = build_grid(spec.domain, 6, 6)
        lo = np.zeros((7, 7))
        small = compute_stabilizers(spec, grid, lo, np.full((7, 7), 1.0))
        big = compute_stabilizers(spec, grid, lo, np.full((7, 7), 1.5))
        assert np.all(big.c_total >= small.c_total)

    def test_finite_difference_fallback(self):
        from monodd import Reaction

        base = desk_logistic()
        spec = type(base)(
            domain=base.domain,
            coeffs=base.coeffs,
            reaction=Reaction(f=lambda t, x, u: 1.0 * u * (1.0 - u)),  # no f_u
            kernel=base.kernel,
            bc_left=base.bc_left,
            bc_right=base.bc_right,
            u0=base.u0,
            bracket=base.bracket,
        )
        grid = build_grid(spec.domain, 6, 4)
        lo = np.zeros((5, 7))
        hi = np.full((5, 7), 1.5)
        stab = compute_stabilizers(spec, grid, lo, hi, margin=0.0)
        np.testing.assert_allclose(stab.c_total, 2.0, atol=1e-5)


class TestEvalF1:
    def test_zero_data_zero_row(self):
        from conftest import make_zero_problem

        spec = make_zero_problem()
        grid = build_grid(spec.domain, 8, 4)
        u = np.zeros((5, 9))
        stab = compute_stabilizers(spec, grid, u, u)
        np.testing.assert_array_equal(eval_F1(spec, stab, u, 3, grid), 0.0)

    def test_linear_heat_rhs_vanishes(self):
        spec = catalog_lookup("linear_heat")
        grid = build_grid(spec.domain, 8, 4)
        lo = sample_field(spec.bracket.u_hat, grid)
        hi = sample_field(spec.bracket.u_tilde, grid)
        stab = compute_stabilizers(spec, grid, lo, hi, margin=0.0)
        u = sample_field(spec.exact, grid)
        np.testing.assert_array_equal(eval_F1(spec, stab, u, 2, grid), 0.0)

    def test_monotone_under_uniform_shift(self):
        spec = desk_logistic()
        grid = build_grid(spec.domain, 8, 8)
        rng = np.random.default_rng(13)
        u = 1.3 * rng.random((9, 9))
        lo = np.zeros((9, 9))
        hi = np.full((9, 9), 1.5)
        stab = compute_stabilizers(spec, grid, lo, hi)
        for k in (2, 5, 8):
            base = eval_F1(spec, stab, u, k, grid)
            shifted = eval_F1(spec, stab, np.minimum(u + 0.1, 1.5), k, grid)
            assert np.all(shifted >= base - 1e-12)

    @pytest.mark.parametrize("name,params", [
        ("linear_heat", {}),
        ("logistic_memory", {"lam": 1.0, "kappa": 0.5, "sigma": 0.5}),
        ("manufactured_1", {}),
    ])
    def test_monotone_on_random_ordered_pairs(self, name, params):
        spec = catalog_lookup(name, params)
        grid = build_grid(spec.domain, 8, 8)
        lo = sample_field(spec.bracket.u_hat, grid)
        hi = sample_field(spec.bracket.u_tilde, grid)
        stab = compute_stabilizers(spec, grid, lo, hi)
        rng = np.random.default_rng(29)
        for _ in range(20):
            v = lo + rng.random(lo.shape) * (hi - lo)
            u = v + rng.random(lo.shape) * (hi - v)
            k = int(rng.integers(0, grid.nt + 1))
            diff = eval_F1(spec, stab, u, k, grid) - eval_F1(spec, stab, v, k, grid)
            assert np.min(diff) >= -1e-12

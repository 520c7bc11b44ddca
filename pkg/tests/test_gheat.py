import math

import numpy as np
import pytest

from gexlab import gheat
from gexlab.ambiguity import MomentEnvelope
from gexlab.errors import (
    ConfigurationError,
    DivergenceError,
    DomainError,
    ValidationError,
)
from gexlab.gheat import (
    GParams,
    PdeGrid,
    g_function,
    g_normal_expectation,
    g_normal_solution,
    gaussian_quadrature_oracle,
    params_from_envelope,
    solve_g_heat,
)
from gexlab.phis import make_phi

BAND = GParams(0.5, 1.0)


class TestGParams:
    @pytest.mark.parametrize("lo,hi", [(-0.1, 1.0), (1.0, 0.5), (0.0, 0.0), (0.0, np.nan)])
    def test_rejects(self, lo, hi):
        with pytest.raises(ValidationError):
            GParams(lo, hi)

    def test_degenerate_band_ok(self):
        p = GParams(1.0, 1.0)
        assert p.sigma_lo == p.sigma_hi == 1.0

    def test_from_envelope(self):
        env = MomentEnvelope(0.0, 0.0, 0.25, 1.0)
        p = params_from_envelope(env)
        assert p.sigma_lo == 0.5
        assert p.sigma_hi == 1.0


class TestGFunction:
    def test_hand_values(self):
        assert g_function(BAND, 2.0) == 1.0
        assert g_function(BAND, -2.0) == -0.25
        assert g_function(BAND, 0.0) == 0.0

    def test_array_input(self):
        out = g_function(BAND, np.array([-2.0, 0.0, 2.0]))
        np.testing.assert_array_equal(out, [-0.25, 0.0, 1.0])

    def test_positive_homogeneity(self):
        for a in (-3.0, -1.0, 2.0, 5.0):
            assert g_function(BAND, 2.0 * a) == pytest.approx(2.0 * g_function(BAND, a))


class TestPdeGrid:
    def test_rejects_non_integer_cell_count(self):
        with pytest.raises(ValidationError, match="integer"):
            PdeGrid(0.0, 1.0, 0.3, 1e-3)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(x_min=1.0, x_max=0.0, dx=0.1, dt=1e-3),
            dict(x_min=0.0, x_max=1.0, dx=-0.1, dt=1e-3),
            dict(x_min=0.0, x_max=1.0, dx=0.1, dt=0.0),
            dict(x_min=0.0, x_max=1.0, dx=0.1, dt=1e-3, horizon=0.0),
        ],
    )
    def test_rejects_bad_fields(self, kwargs):
        with pytest.raises(ValidationError):
            PdeGrid(**kwargs)

    def test_xs(self):
        grid = PdeGrid(-1.0, 1.0, 0.5, 1e-2)
        assert grid.n_cells == 4
        np.testing.assert_allclose(grid.xs, [-1.0, -0.5, 0.0, 0.5, 1.0])


class TestSolver:
    def test_cfl_guard(self):
        grid = PdeGrid(-1.0, 1.0, 0.1, 0.0051)  # sigma^2 dt/dx^2 = 0.51
        with pytest.raises(ConfigurationError, match="dx"):
            solve_g_heat(GParams(1.0, 1.0), np.square, grid)

    def test_snapshot_validation(self):
        grid = PdeGrid(-1.0, 1.0, 0.1, 0.001)
        with pytest.raises(ValidationError):
            solve_g_heat(GParams(1.0, 1.0), np.square, grid, snapshot_times=(2.0,))

    def test_snapshots_recorded(self):
        grid = PdeGrid(-6.0, 6.0, 0.05, 0.001)
        sol = solve_g_heat(GParams(1.0, 1.0), np.square, grid, snapshot_times=(0.0, 0.5, 1.0))
        assert [t for t, _ in sol.snapshots] == [0.0, 0.5, 1.0]
        t0, u0 = sol.snapshots[0]
        np.testing.assert_array_equal(u0, grid.xs**2)
        t2, u2 = sol.snapshots[2]
        np.testing.assert_array_equal(u2, sol.u)
        # u(t, 0) = t for the pure heat equation with square data
        mid = grid.n_cells // 2
        assert sol.snapshots[1][1][mid] == pytest.approx(0.5, abs=1e-6)

    def test_divergence_reported(self, monkeypatch):
        calls = {}

        def exploding(u, cu, cd, n_steps):
            calls["n"] = n_steps
            return 3, u

        monkeypatch.setattr(gheat._kernels, "gheat_march", exploding)
        grid = PdeGrid(-1.0, 1.0, 0.1, 0.001)
        with pytest.raises(DivergenceError, match="step 3"):
            solve_g_heat(GParams(1.0, 1.0), np.square, grid)
        assert calls["n"] > 0

    def test_boundaries_frozen(self):
        grid = PdeGrid(-2.0, 2.0, 0.1, 0.001)
        sol = solve_g_heat(GParams(1.0, 1.0), np.square, grid)
        assert sol.u[0] == 4.0
        assert sol.u[-1] == 4.0

    def test_value_at_checks_nodes(self):
        grid = PdeGrid(-1.0, 1.0, 0.5, 0.01)
        sol = solve_g_heat(GParams(1.0, 1.0), np.abs, grid)
        assert sol.value_at(-1.0) == 1.0
        with pytest.raises(DomainError):
            sol.value_at(0.3)


class TestGNormal:
    def test_pad_guard(self):
        with pytest.raises(ConfigurationError):
            g_normal_solution(BAND, make_phi("square"), pad_factor=3.9)

    def test_margin_widens_domain(self):
        sol = g_normal_solution(BAND, make_phi("ramp", 3.0), dx=0.1)
        assert sol.grid.x_max >= 6.0 + 3.0 - 1e-9

    def test_degenerate_square_exact(self):
        # classical heat equation: E[(sigma Z)^2] = sigma^2
        v = g_normal_expectation(GParams(1.0, 1.0), make_phi("square"), dx=0.05)
        assert abs(v - 1.0) < 1e-6

    def test_degenerate_matches_quadrature(self):
        params = GParams(1.0, 1.0)
        for name in ("abs", "quartic"):
            phi = make_phi(name)
            v = g_normal_expectation(params, phi, dx=0.02)
            q = gaussian_quadrature_oracle(1.0, phi)
            assert v == pytest.approx(q, abs=1e-2)

    def test_band_moment_identities(self):
        # convex data sees the upper volatility, concave the lower
        assert g_normal_expectation(BAND, make_phi("square")) == pytest.approx(1.0, abs=2e-2)
        assert g_normal_expectation(BAND, make_phi("negsquare")) == pytest.approx(-0.25, abs=2e-2)

    def test_band_convex_equals_upper_gaussian(self):
        for name in ("abs", "quartic"):
            phi = make_phi(name)
            v = g_normal_expectation(BAND, phi)
            q = gaussian_quadrature_oracle(1.0, phi)
            assert v == pytest.approx(q, abs=1e-2)

    def test_band_concave_equals_lower_gaussian(self):
        v = g_normal_expectation(BAND, make_phi("negabs"))
        q = gaussian_quadrature_oracle(0.5, make_phi("negabs"))
        assert v == pytest.approx(q, abs=1e-2)

    def test_band_ramp_matches_upper_gaussian(self):
        # convex shifted shape; margin keeps the kink away from the boundary
        phi = make_phi("ramp", 1.0)
        v = g_normal_expectation(BAND, phi, dx=0.02)
        q = gaussian_quadrature_oracle(1.0, phi)
        assert v == pytest.approx(q, abs=1e-2)

    def test_odd_data_degenerate_band_is_centered(self):
        # equal volatilities make the solution antisymmetric
        v = g_normal_expectation(GParams(1.0, 1.0), make_phi("cube"), dx=0.05)
        assert abs(v) <= 1e-9

    def test_odd_data_strict_band_is_skewed(self):
        # with genuine uncertainty the cube expectation is strictly positive
        v = g_normal_expectation(BAND, make_phi("cube"), dx=0.05)
        assert v > 0.1


class TestQuadratureOracle:
    def test_validation(self):
        with pytest.raises(ValidationError):
            gaussian_quadrature_oracle(-1.0, np.abs)

    def test_sigma_zero(self):
        assert gaussian_quadrature_oracle(0.0, lambda x: x + 3.0) == 3.0

    def test_classical_moments(self):
        assert gaussian_quadrature_oracle(1.0, np.abs) == pytest.approx(
            math.sqrt(2.0 / math.pi), abs=1e-9
        )
        assert gaussian_quadrature_oracle(1.0, np.square) == pytest.approx(1.0, abs=1e-9)
        assert gaussian_quadrature_oracle(1.0, make_phi("quartic")) == pytest.approx(3.0, abs=1e-9)
        assert gaussian_quadrature_oracle(2.0, np.abs) == pytest.approx(
            2.0 * math.sqrt(2.0 / math.pi), abs=1e-9
        )

    def test_fractional_moment_gamma_formula(self):
        # E|Z|^r = 2^(r/2) Gamma((r+1)/2) / sqrt(pi)
        r = 2.5
        exact = 2.0 ** (r / 2.0) * math.gamma((r + 1.0) / 2.0) / math.sqrt(math.pi)
        got = gaussian_quadrature_oracle(1.0, make_phi("abspow", r))
        assert got == pytest.approx(exact, abs=1e-9)

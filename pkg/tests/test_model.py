"""Parameter objects, evolution rates, harvest maps and their envelopes."""

import math

import numpy as np
import pytest

from evodom import (
    EnvelopeUndefinedError,
    EvolutionRate,
    ModelParams,
    PulseDomainError,
    PulseFunction,
    build_envelopes,
    eval_pulse,
    pulse_derivative_at_zero,
)

# direct evaluation of u e^{r - b u} at u = 1/b, r=0.05, b=1.2, checked
# against 50-digit arithmetic
RICKER_PEAK_12 = 0.3222841862120843


class TestModelParams:
    def test_rejects_nonpositive(self):
        for bad in ({"d": 0.0}, {"alpha": -1.0}, {"gamma": 0.0},
                    {"l0": 0.0}, {"T": -2.0}):
            kw = dict(d=1.0, alpha=1.1, gamma=0.05, l0=math.pi, T=2.0)
            kw.update(bad)
            with pytest.raises(ValueError):
                ModelParams(**kw)

    def test_degenerate_allows_zero_coefficients(self):
        p = ModelParams.degenerate(0.0, 0.0, 0.0, 1.0, 1.0)
        assert p.d == 0.0 and p.alpha == 0.0 and p.gamma == 0.0
        with pytest.raises(ValueError):
            ModelParams.degenerate(1.0, 1.0, 1.0, 0.0, 1.0)


class TestEvolutionRate:
    def test_starts_at_one(self):
        for rate in (EvolutionRate.constant(2.0),
                     EvolutionRate.exp_cosine(-0.1, 2.0),
                     EvolutionRate.exp_cosine(0.37, 1.3)):
            assert rate.value(0.0) == 1.0

    def test_periodic_and_positive(self):
        rate = EvolutionRate.exp_cosine(0.25, 1.7)
        t = np.linspace(0.0, 3 * 1.7, 601)
        vals = rate.value(t)
        assert np.all(vals > 0)
        shifted = rate.value(t + 1.7)
        assert np.max(np.abs(shifted - vals) / vals) < 1e-12

    def test_log_derivative_matches_finite_difference(self):
        rate = EvolutionRate.exp_cosine(0.1, 2.0)
        h = 1e-6
        for t in np.linspace(0.05, 1.95, 20):
            fd = (math.log(rate.value(t + h)) - math.log(rate.value(t - h))) / (2 * h)
            assert rate.log_derivative(t) == pytest.approx(fd, abs=1e-8)
        const = EvolutionRate.constant(2.0)
        assert const.log_derivative(0.77) == 0.0

    def test_analytic_log_derivative_form(self):
        c, T = 0.1, 2.0
        rate = EvolutionRate.exp_cosine(c, T)
        for t in (0.2, 0.9, 1.4):
            expected = c * (2 * math.pi / T) * math.sin(2 * math.pi * t / T)
            assert rate.log_derivative(t) == pytest.approx(expected, rel=1e-14)
        assert rate.max_abs_log_derivative() == pytest.approx(c * 2 * math.pi / T)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            EvolutionRate("linear", 2.0)


class TestPulseEvaluation:
    def test_beverton_holt_direct(self):
        g = PulseFunction.beverton_holt(10.0, 8.0)
        assert eval_pulse(g, 10.0) == pytest.approx(4.0, rel=1e-15)

    def test_identity_direct(self):
        g = PulseFunction.identity()
        assert eval_pulse(g, 0.37) == 0.37

    def test_ricker_at_peak(self):
        g = PulseFunction.ricker(0.05, 1.2)
        assert eval_pulse(g, 1.0 / 1.2) == pytest.approx(RICKER_PEAK_12, rel=1e-14)

    def test_zero_maps_to_zero_exactly(self):
        for g in (PulseFunction.identity(),
                  PulseFunction.beverton_holt(10.0, 8.0),
                  PulseFunction.ricker(0.05, 1.2)):
            assert eval_pulse(g, 0.0) == 0.0

    def test_negative_density_rejected(self):
        g = PulseFunction.beverton_holt(10.0, 8.0)
        with pytest.raises(PulseDomainError):
            eval_pulse(g, -0.1)
        with pytest.raises(PulseDomainError):
            g(np.array([0.5, -1e-9]))

    def test_vectorized_matches_scalar(self):
        g = PulseFunction.ricker(0.05, 1.2)
        u = np.linspace(0.0, 5.0, 11)
        out = g(u)
        assert out.shape == u.shape
        for ui, oi in zip(u, out):
            assert g(float(ui)) == pytest.approx(oi, rel=1e-15)


class TestDerivativeAtZero:
    def test_beverton_holt(self):
        g = PulseFunction.beverton_holt(10.0, 8.0)
        assert pulse_derivative_at_zero(g) == pytest.approx(0.8, rel=1e-15)

    def test_ricker(self):
        g = PulseFunction.ricker(0.05, 1.2)
        assert pulse_derivative_at_zero(g) == pytest.approx(math.exp(0.05), rel=1e-15)

    def test_identity(self):
        assert pulse_derivative_at_zero(PulseFunction.identity()) == 1.0


class TestPulseStructure:
    def test_monotone_threshold(self):
        assert PulseFunction.identity().monotone_threshold == math.inf
        assert PulseFunction.beverton_holt(10, 8).monotone_threshold == math.inf
        assert PulseFunction.ricker(0.05, 1.2).monotone_threshold == pytest.approx(1 / 1.2)

    def test_harvest_ratio_nonincreasing(self):
        u = np.logspace(-6, 1, 200)
        g = PulseFunction.beverton_holt(10.0, 8.0)
        ratio = g(u) / u
        assert np.all(np.diff(ratio) <= 1e-15)
        assert np.all((0 < ratio) & (ratio < 1))
        # the overcompensating map shares the nonincreasing-ratio shape
        gr = PulseFunction.ricker(0.05, 1.2)
        ratio_r = gr(u) / u
        assert np.all(np.diff(ratio_r) <= 1e-15)

    def test_bounded_by_tangent_at_zero(self):
        u = np.logspace(-6, 1, 200)
        for g in (PulseFunction.beverton_holt(10.0, 8.0),
                  PulseFunction.ricker(0.05, 1.2)):
            assert np.all(g(u) <= g.derivative_at_zero() * u + 1e-15)

    def test_beverton_holt_quadratic_lower_bound(self):
        a, m = 10.0, 8.0
        g = PulseFunction.beverton_holt(a, m)
        big_d, nu = g.quadratic_lower_bound()
        assert big_d == pytest.approx(m / a**2)
        assert nu == 2.0
        u = np.linspace(0.0, a, 500)
        assert np.all(g(u) >= g.derivative_at_zero() * u - big_d * u**2 - 1e-12)

    def test_ricker_quadratic_lower_bound(self):
        r, b = 0.05, 1.2
        g = PulseFunction.ricker(r, b)
        big_d, nu = g.quadratic_lower_bound()
        assert big_d == pytest.approx(b * math.exp(r))
        assert nu == 2.0
        u = np.linspace(0.0, 0.5 / b, 500)
        assert np.all(g(u) >= g.derivative_at_zero() * u - big_d * u**2 - 1e-12)

    def test_no_harvest_near_zero_warns(self):
        with pytest.warns(UserWarning, match="does not harvest"):
            PulseFunction.beverton_holt(5.0, 8.0)

    def test_bad_parameters_rejected(self):
        with pytest.raises(ValueError):
            PulseFunction.beverton_holt(0.0, 8.0)
        with pytest.raises(ValueError):
            PulseFunction.ricker(0.05, -1.0)
        with pytest.raises(ValueError):
            PulseFunction("unknown-kind")


def brute_force_envelopes(g, u_max, beta, n=1_000_000):
    """Independent running-extremum construction on a dense grid."""
    u = np.linspace(0.0, u_max, n + 1)
    vals = g(u)
    g_plus = np.maximum.accumulate(vals)
    mask = u <= beta
    g_minus = np.minimum.accumulate(vals[mask][::-1])[::-1]
    return u, g_plus, u[mask], g_minus


class TestEnvelopes:
    def test_monotone_pulse_collapses(self, params, rho_grow, bh):
        env = build_envelopes(bh, params, rho_grow)
        u = np.linspace(0.0, env.beta_plus, 2000)
        assert np.allclose(env.g_plus(u), bh(u), rtol=0, atol=0)
        assert np.allclose(env.g_minus(u), bh(u), rtol=0, atol=0)

    def test_identity_collapses(self, params, rho_grow, identity):
        env = build_envelopes(identity, params, rho_grow)
        u = np.linspace(0.0, env.beta_plus, 100)
        assert np.array_equal(env.g_plus(u), u)
        assert np.array_equal(env.g_minus(u), np.minimum(u, env.beta_plus))

    def test_capped_value_matches_brute_force(self, params, rho_grow, ricker12):
        env = build_envelopes(ricker12, params, rho_grow)
        u, gp, _, _ = brute_force_envelopes(ricker12, 2.0, env.beta_plus)
        assert env.g_plus(2.0) == pytest.approx(gp[-1], rel=1e-12)
        assert env.g_plus(2.0) == pytest.approx(RICKER_PEAK_12, rel=1e-12)
        # spot-check the whole range against the brute-force construction
        sub = slice(0, len(u), 997)
        assert np.max(np.abs(env.g_plus(u[sub]) - gp[sub])) < 1e-9

    def test_floor_matches_brute_force(self, params, rho_grow, ricker5):
        env = build_envelopes(ricker5, params, rho_grow)
        _, _, ub, gm = brute_force_envelopes(ricker5, 1.0, env.beta_plus)
        sub = slice(0, len(ub), 97)
        assert np.max(np.abs(env.g_minus(ub[sub]) - gm[sub])) < 1e-9

    def test_sandwich_and_monotonicity(self, params, rho_grow, ricker12, ricker5):
        for g in (ricker12, ricker5):
            env = build_envelopes(g, params, rho_grow)
            u = np.linspace(0.0, env.beta_plus, 10_000)
            gp, gm, gv = env.g_plus(u), env.g_minus(u), g(u)
            assert np.all(gm <= gv + 1e-15)
            assert np.all(gv <= gp + 1e-15)
            assert np.all(np.diff(gp) >= -1e-15)
            assert np.all(np.diff(gm) >= -1e-15)

    def test_equality_near_zero(self, params, rho_grow, ricker12):
        env = build_envelopes(ricker12, params, rho_grow)
        u0 = 0.5 * min(1 / 1.2, env.beta_plus)
        u = np.linspace(0.0, u0, 500)
        assert np.array_equal(env.g_plus(u), ricker12(u))
        assert np.array_equal(env.g_minus(u), ricker12(u))

    def test_derivative_match_at_zero(self, params, rho_grow, ricker12, ricker5, bh):
        h = 1e-8
        for g in (ricker12, ricker5, bh):
            env = build_envelopes(g, params, rho_grow)
            gp0 = g.derivative_at_zero()
            assert env.g_plus(h) / h == pytest.approx(gp0, rel=1e-6)
            assert env.g_minus(h) / h == pytest.approx(gp0, rel=1e-6)

    def test_subcritical_raises(self, params, rho_shrink, ricker12):
        with pytest.raises(EnvelopeUndefinedError):
            build_envelopes(ricker12, params, rho_shrink)

    def test_beta_plus_is_orbit_minimum(self, params, rho_grow, ricker5):
        env = build_envelopes(ricker5, params, rho_grow)
        assert env.beta_plus == pytest.approx(float(env.ode_values.min()))
        assert np.all(env.ode_values > 0)
        # periodic orbit: the pulse maps the end value back to the start
        assert env.g_plus(float(env.ode_values[-1])) == pytest.approx(
            float(env.ode_values[0]), rel=1e-9)

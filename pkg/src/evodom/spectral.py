"""Reproduction index and the scalar periodic problems behind it.

The pulsed linear problem separates into a Dirichlet eigenfunction
sin(pi y / l0) and a scalar periodic factor f(t); requiring f to close up
over one period gives the closed-form reproduction index

    R0 = alpha / ( d lambda1 / T * Q  -  ln g'(0) / T ),
    Q  = integral over one period of rho^{-2}(t),
    lambda1 = (pi / l0)^2.

The sign of R0 - 1 agrees with the sign of the principal growth exponent

    lambda_star = ln g'(0) / T + alpha - d lambda1 Q / T,

which is what the threshold dynamics hinge on.  When g'(0) > 1 the
denominator of R0 can lose positivity; the shifted index r0_star (same
sign relation, always positive) is reported as the authoritative
quantity in that regime.

The module also solves the spatially homogeneous pulsed logistic ODE
whose positive periodic orbit W(t) seeds upper solutions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import NoPositivePeriodicSolutionError, QuadratureError
from .model import EvolutionRate, ModelParams, PulseFunction


def principal_eigenvalue(l0: float) -> float:
    """Smallest Dirichlet eigenvalue of -u'' on (0, l0): (pi/l0)^2."""
    if l0 <= 0:
        raise ValueError("l0 must be strictly positive")
    return (math.pi / l0) ** 2


def _quad_strict(f, a, b, what):
    out = quad(f, a, b, epsabs=1e-12, epsrel=1e-12, limit=500, full_output=1)
    if len(out) > 3:
        raise QuadratureError(
            f"quadrature of {what} did not converge (estimated error {out[1]:.3e})",
            achieved=out[1],
        )
    return out[0]


def quad_rho_inv_sq(rho: EvolutionRate) -> float:
    """Q = integral of rho^{-2} over one period (abs tol 1e-12)."""
    if rho.kind == "constant-one":
        return rho.period
    return _quad_strict(lambda t: rho.value(t) ** -2, 0.0, rho.period, "rho^-2")


@dataclass(frozen=True)
class IndexReport:
    """Reproduction index and all of its ingredients.

    r0 is None when the index denominator is nonpositive (possible for
    g'(0) > 1); the shifted index r0_star is then authoritative.  Use
    ``index`` for the always-defined threshold quantity.
    """

    lambda1: float          # 1/length^2
    quad_rho: float         # time
    ln_gprime0: float       # dimensionless
    r0: float | None        # dimensionless
    r_noimpulse: float      # dimensionless
    lambda_star: float      # 1/time
    m_shift: float          # 1/time
    r0_star: float          # dimensionless

    @property
    def index(self) -> float:
        """The authoritative threshold index (r0, or r0_star if r0 is undefined)."""
        return self.r0 if self.r0 is not None else self.r0_star

    def as_dict(self):
        return {
            "lambda1": self.lambda1,
            "quad_rho": self.quad_rho,
            "ln_gprime0": self.ln_gprime0,
            "r0": self.r0,
            "r_noimpulse": self.r_noimpulse,
            "lambda_star": self.lambda_star,
            "m_shift": self.m_shift,
            "r0_star": self.r0_star,
        }


def compute_index(params: ModelParams, rho: EvolutionRate, g: PulseFunction) -> IndexReport:
    """Evaluate the reproduction index and companions for one problem."""
    gp0 = g.derivative_at_zero()
    if gp0 <= 0:
        raise ValueError("pulse must have g'(0) > 0")
    lam1 = principal_eigenvalue(params.l0)
    big_q = quad_rho_inv_sq(rho)
    lng = math.log(gp0)
    T = params.T
    denom = params.d * lam1 * big_q / T - lng / T
    r0 = params.alpha / denom if denom > 0 else None
    lambda_star = lng / T + params.alpha - params.d * lam1 * big_q / T
    m_shift = abs(lng) / T
    r0_star = (params.alpha + m_shift) / (denom + m_shift)
    return IndexReport(
        lambda1=lam1,
        quad_rho=big_q,
        ln_gprime0=lng,
        r0=r0,
        r_noimpulse=params.alpha * T / (params.d * lam1 * big_q),
        lambda_star=lambda_star,
        m_shift=m_shift,
        r0_star=r0_star,
    )


def compute_r_noimpulse(params: ModelParams, rho: EvolutionRate) -> float:
    """Threshold index of the harvest-free problem: alpha T / (d lambda1 Q)."""
    lam1 = principal_eigenvalue(params.l0)
    return params.alpha * params.T / (params.d * lam1 * quad_rho_inv_sq(rho))


def _rk4(rhs, y0, times):
    """Classical fixed-step RK4 over the given uniform time grid."""
    y = np.empty_like(times)
    y[0] = y0
    h = times[1] - times[0]
    for k in range(len(times) - 1):
        t = times[k]
        v = y[k]
        k1 = rhs(t, v)
        k2 = rhs(t + 0.5 * h, v + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, v + 0.5 * h * k2)
        k4 = rhs(t + h, v + h * k3)
        y[k + 1] = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


def _derivative_4th(values, h):
    """Fourth-order central first derivative of uniform samples (interior)."""
    return (values[:-4] - 8.0 * values[1:-3] + 8.0 * values[3:-1] - values[4:]) / (12.0 * h)


@dataclass(frozen=True)
class TemporalFactor:
    """Time part f(t) of the separated eigenfunction f(t) sin(pi y / l0).

    ``values[0]`` is the right limit f(0+); between impulses f is
    continuous and T-periodic with jump ratio g'(0) at period
    boundaries.  Samples are normalized to sup-norm 1.
    """

    times: np.ndarray
    values: np.ndarray
    jump_ratio: float
    periodicity_error: float   # |f(T) - f(0)| / f(0), before normalization
    max_ode_residual: float    # sup of the defining ODE residual at interior samples

    @property
    def start_value(self) -> float:
        """f(0) = f(T), the pre-jump boundary value."""
        return float(self.values[-1])


def temporal_factor(params: ModelParams, rho: EvolutionRate, g: PulseFunction,
                    r0: float, n_steps: int = 8192) -> TemporalFactor:
    """Integrate f' = (-rho'/rho + alpha/r0 - d lambda1/rho^2) f over one period.

    Starts from f(0+) = g'(0) f(0); the computed r0 is exactly the value
    making f close up periodically, which ``periodicity_error`` verifies.
    """
    if not (math.isfinite(r0) and r0 > 0):
        raise ValueError("temporal factor requires a finite positive index")
    lam1 = principal_eigenvalue(params.l0)
    gp0 = g.derivative_at_zero()

    def coeff(t):
        return -rho.log_derivative(t) + params.alpha / r0 \
            - params.d * lam1 / rho.value(t) ** 2

    times = np.linspace(0.0, params.T, n_steps + 1)
    values = _rk4(lambda t, f: coeff(t) * f, gp0, times)  # f(0) = 1 pre-jump
    periodicity_error = abs(values[-1] - 1.0)

    h = times[1] - times[0]
    dfdt = _derivative_4th(values, h)
    resid = dfdt - coeff(times[2:-2]) * values[2:-2]
    scale = float(np.max(np.abs(values)))
    values = values / scale
    return TemporalFactor(
        times=times,
        values=values,
        jump_ratio=gp0,
        periodicity_error=periodicity_error,
        max_ode_residual=float(np.max(np.abs(resid)) / scale),
    )


@dataclass(frozen=True)
class PeriodicOdeSolution:
    """Positive periodic orbit W(t) of the pulsed logistic ODE.

    W' = (alpha - rho'/rho) W - gamma W^2 between impulses, with the
    linear impulse W((nT)+) = g'(0) W(nT).  ``values[0]`` is W(0+);
    ``anchor`` is the pre-impulse value W(0) = W(T), known in closed form:

        W(0) = (e^{alpha T} g'(0) - 1) / (g'(0) * J),
        J    = integral over one period of gamma e^{alpha t} / rho(t).
    """

    times: np.ndarray
    values: np.ndarray
    anchor: float
    periodicity_error: float  # |W(T) - W(0)| / W(0)
    route_mismatch: float     # max relative gap between ODE and closed-form routes

    @property
    def post_anchor(self) -> float:
        return float(self.values[0])


def periodic_ode_solution(params: ModelParams, rho: EvolutionRate,
                          g: PulseFunction, n_steps: int = 8192) -> PeriodicOdeSolution:
    """Solve for W(t) two ways and cross-check.

    Route one integrates the nonlinear ODE with RK4 from the closed-form
    anchor.  Route two uses the substitution u = 1/W, which turns the
    ODE into a linear one with integrating factor e^{alpha t}/rho(t) and
    yields

        W(t) = e^{alpha t} W(0+) / ( rho(t) [ 1 + W(0+) I(t) ] ),
        I(t) = integral from 0 to t of gamma e^{alpha s} / rho(s) ds,

    using rho(0) = 1.  The two orbits must agree to high accuracy; their
    maximum relative gap is recorded in ``route_mismatch``.
    """
    gp0 = g.derivative_at_zero()
    growth = math.exp(params.alpha * params.T) * gp0
    if growth <= 1.0:
        raise NoPositivePeriodicSolutionError(
            f"exp(alpha T) g'(0) = {growth:.6g} <= 1: no positive periodic orbit"
        )

    def weight(t):
        return params.gamma * math.exp(params.alpha * t) / rho.value(t)

    big_j = _quad_strict(weight, 0.0, params.T, "gamma e^{alpha t}/rho")
    anchor = (growth - 1.0) / (gp0 * big_j)
    w_post = gp0 * anchor

    times = np.linspace(0.0, params.T, n_steps + 1)

    def ode_rhs(t, w):
        return (params.alpha - rho.log_derivative(t)) * w - params.gamma * w * w

    values = _rk4(ode_rhs, w_post, times)
    periodicity_error = abs(values[-1] - anchor) / anchor

    # closed-form route: cumulative I(t) by per-step Simpson
    h = times[1] - times[0]
    mids = times[:-1] + 0.5 * h
    f_nodes = np.array([weight(t) for t in times])
    f_mids = np.array([weight(t) for t in mids])
    increments = (h / 6.0) * (f_nodes[:-1] + 4.0 * f_mids + f_nodes[1:])
    big_i = np.concatenate(([0.0], np.cumsum(increments)))
    rho_t = np.array([rho.value(t) for t in times])
    closed = np.exp(params.alpha * times) * w_post / (rho_t * (1.0 + w_post * big_i))
    route_mismatch = float(np.max(np.abs(values - closed) / closed))

    return PeriodicOdeSolution(
        times=times,
        values=values,
        anchor=anchor,
        periodicity_error=periodicity_error,
        route_mismatch=route_mismatch,
    )

"""Periodic states: analytic bounds, monotone bracketing, period maps.

For a supercritical problem (index > 1) the pulsed logistic problem has a
unique positive periodic state v*(t, y).  This module constructs it three
independent ways and cross-checks them:

  * analytic upper solution  M W(t) (M > 1), with W the positive periodic
    orbit of the spatially homogeneous pulsed ODE;
  * analytic lower solution, a small multiple of the separated
    eigenfunction, rescaled between impulses so it closes up periodically;
  * the monotone bracketing iteration, which squeezes the two towards
    each other through linear solves with a shifted frozen source;
  * direct Picard iteration of the period map (simulate one full period,
    including the impulse, until the state repeats).

Nonmonotone harvest maps are handled by bracketing between the systems
driven by the monotone envelopes g_minus <= g <= g_plus.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .engine import (
    Grid,
    StateField,
    _step_reaction_diffusion,
    _step_shifted_linear,
)
from .errors import (
    EvodomError,
    InvalidLowerSolutionSpecError,
    IterationOrderBrokenError,
    NoPositivePeriodicSolutionError,
    PeriodMapConvergenceError,
)
from .model import EvolutionRate, ModelParams, build_envelopes
from .spectral import (
    _derivative_4th,
    _rk4,
    compute_index,
    periodic_ode_solution,
    principal_eigenvalue,
    temporal_factor,
)


@dataclass(frozen=True)
class PeriodOrbit:
    """One-period space-time field on the solver grid.

    Row k holds the state at t_k = k T / S; row 0 is the post-impulse
    state at 0+, row S the pre-impulse state at T.  ``pre_start`` is the
    pre-impulse state at t = 0, so the (nT, (nT)+) pair is
    (pre_start, values[0]).
    """

    times: np.ndarray       # (S+1,)
    values: np.ndarray      # (S+1, ny)
    pre_start: np.ndarray   # (ny,)

    def sup_distance(self, other: "PeriodOrbit") -> float:
        return max(
            float(np.max(np.abs(self.values - other.values))),
            float(np.max(np.abs(self.pre_start - other.pre_start))),
        )


def minimal_periodic_ode_orbit(params: ModelParams, rho: EvolutionRate, pulse,
                               n_steps: int = 4096, tol: float = 1e-12,
                               max_iter: int = 10000):
    """Minimal positive periodic orbit of the pulsed logistic ODE.

    w' = (alpha - rho'/rho) w - gamma w^2 between impulses with
    w((nT)+) = pulse(w(nT)).  The period map is nondecreasing for a
    monotone pulse, so iterating it from a tiny positive seed climbs to
    the minimal positive fixed point.  Returns (times, values) over one
    period with values[0] the post-impulse state.
    """
    if math.exp(params.alpha * params.T) * pulse.derivative_at_zero() <= 1.0:
        raise NoPositivePeriodicSolutionError(
            "subcritical pulsed ODE has no positive periodic orbit"
        )
    times = np.linspace(0.0, params.T, n_steps + 1)

    def rhs(t, w):
        return (params.alpha - rho.log_derivative(t)) * w - params.gamma * w * w

    def period_map(w):
        return _rk4(rhs, pulse(w), times)[-1]

    scale = params.alpha / params.gamma if params.gamma > 0 else 1.0
    w = 1e-8 * scale
    for _ in range(max_iter):
        w_next = period_map(w)
        if abs(w_next - w) <= tol * max(abs(w_next), 1.0):
            w = w_next
            break
        w = w_next
    else:
        raise PeriodMapConvergenceError(
            "scalar period map did not converge", residual=abs(w_next - w)
        )
    return times, _rk4(rhs, pulse(w), times)


@dataclass(frozen=True)
class UpperSolution:
    """Spatially uniform upper bound M W(t) with verification diagnostics.

    ``min_interval_residual`` is the smallest value over sampled step
    midpoints of (time derivative minus reaction terms); it must be
    nonnegative up to discretization noise for a genuine upper solution.
    ``impulse_margin`` is min over the grid of M W(0+) - g(M W(0)).
    """

    orbit: PeriodOrbit
    multiplier: float
    min_interval_residual: float
    impulse_margin: float


def build_upper_solution(params: ModelParams, rho: EvolutionRate, g,
                         grid: Grid, multiplier: float = 1.5) -> UpperSolution:
    """Scale the positive periodic ODE orbit into an upper solution."""
    if multiplier <= 1.0:
        raise ValueError("multiplier must exceed 1")
    sol = periodic_ode_solution(params, rho, g)  # validates existence
    S = grid.steps_per_period
    fine = np.linspace(0.0, params.T, 2 * S + 1)

    def rhs(t, w):
        return (params.alpha - rho.log_derivative(t)) * w - params.gamma * w * w

    w_fine = _rk4(rhs, sol.post_anchor, fine)
    w_nodes = w_fine[::2]
    M = multiplier

    # interval inequality at step midpoints, time derivative by 4th-order FD
    h = fine[1] - fine[0]
    dw = _derivative_4th(M * w_fine, h)
    t_in = fine[2:-2]
    w_in = M * w_fine[2:-2]
    resid = dw - ((params.alpha - rho.log_derivative(t_in)) * w_in
                  - params.gamma * w_in * w_in)
    mids = np.arange(2, len(fine) - 2) % 2 == 1
    min_resid = float(np.min(resid[mids]))

    impulse_margin = float(np.min(M * w_fine[0] - g(np.atleast_1d(M * w_fine[-1]))))

    values = np.repeat((M * w_nodes)[:, None], grid.ny, axis=1)
    orbit = PeriodOrbit(
        times=np.linspace(0.0, params.T, S + 1),
        values=values,
        pre_start=np.full(grid.ny, M * w_fine[-1]),
    )
    return UpperSolution(orbit, M, min_resid, impulse_margin)


@dataclass(frozen=True)
class LowerSolutionSpec:
    """Constants of the analytic lower solution.

    delta    = (alpha/2)(1 - 1/index)
    kappa    = exp(-delta T) g'(0)      (the impulse-to-impulse decay knob)
    epsilon1 = delta / gamma            (keeps the interval inequality)
    epsilon2 = ((g'(0) - kappa)/D)^(1/(nu-1))  (keeps the impulse inequality,
               via the quadratic lower bound g(u) >= g'(0) u - D u^nu)
    epsilon  must lie in (0, min(epsilon1, epsilon2)).
    """

    epsilon: float
    delta: float
    kappa: float
    epsilon1: float
    epsilon2: float
    D: float
    nu: float

    def __post_init__(self):
        bound = min(self.epsilon1, self.epsilon2)
        if not (0.0 < self.epsilon < bound):
            raise InvalidLowerSolutionSpecError(
                f"epsilon {self.epsilon:.6g} outside (0, {bound:.6g})"
            )

    @classmethod
    def for_problem(cls, params: ModelParams, g, index: float,
                    epsilon: float | None = None) -> "LowerSolutionSpec":
        if index <= 1.0:
            raise InvalidLowerSolutionSpecError(
                "lower solution requires a supercritical index"
            )
        gp0 = g.derivative_at_zero()
        delta = 0.5 * params.alpha * (1.0 - 1.0 / index)
        kappa = math.exp(-delta * params.T) * gp0
        eps1 = delta / params.gamma if params.gamma > 0 else math.inf
        big_d, nu = g.quadratic_lower_bound()
        eps2 = ((gp0 - kappa) / big_d) ** (1.0 / (nu - 1.0)) if big_d > 0 else math.inf
        if epsilon is None:
            epsilon = 0.5 * min(eps1, eps2)
        return cls(epsilon, delta, kappa, eps1, eps2, big_d, nu)


@dataclass(frozen=True)
class LowerSolution:
    """Analytic lower bound with verification diagnostics.

    ``max_interval_residual`` must be nonpositive up to noise (the lower
    differential inequality), ``impulse_margin`` = min over the grid of
    g(v(nT)) - v((nT)+), nonnegative for a genuine lower solution.
    """

    orbit: PeriodOrbit
    spec: LowerSolutionSpec
    max_interval_residual: float
    impulse_margin: float


def build_lower_solution(params: ModelParams, rho: EvolutionRate, g,
                         grid: Grid, index: float | None = None,
                         spec: LowerSolutionSpec | None = None) -> LowerSolution:
    """Construct the small separated-profile lower solution.

    The field is epsilon kappa/g'(0) e^{delta (t - nT)} f(t) sin(pi y/l0)
    between impulses, dropping to the pre-impulse trace epsilon f(T) psi
    at t = nT; kappa is chosen so the field closes up over one period.
    """
    if index is None:
        index = compute_index(params, rho, g).index
    if spec is None:
        spec = LowerSolutionSpec.for_problem(params, g, index)
    gp0 = g.derivative_at_zero()
    S = grid.steps_per_period

    # temporal factor sampled so grid nodes and midpoints are exact samples
    per_step = 2 * max(1, 4096 // S)
    f = temporal_factor(params, rho, g, index, n_steps=per_step * S)
    f_fine = f.values
    fine_times = f.times
    f_nodes = f_fine[::per_step]

    rate = params.alpha * (1.0 - 1.0 / index) - spec.delta  # equals delta
    psi = np.sin(math.pi * grid.y / params.l0)
    amp = spec.epsilon * spec.kappa / gp0
    c_nodes = amp * np.exp(rate * fine_times[::per_step]) * f_nodes
    values = c_nodes[:, None] * psi[None, :]
    pre_start = spec.epsilon * float(f_nodes[-1]) * psi

    orbit = PeriodOrbit(
        times=np.linspace(0.0, params.T, S + 1),
        values=values,
        pre_start=pre_start,
    )

    # interval inequality: with the exact sine profile, v_yy = -lambda1 v,
    # so the residual splits into psi * A(t) + psi^2 * B(t)
    lam1 = principal_eigenvalue(params.l0)
    c_fine = amp * np.exp(rate * fine_times) * f_fine
    h = fine_times[1] - fine_times[0]
    dc = _derivative_4th(c_fine, h)
    t_in = fine_times[2:-2]
    c_in = c_fine[2:-2]
    rho_in = np.array([rho.value(t) for t in t_in])
    logd_in = np.array([rho.log_derivative(t) for t in t_in])
    a_term = dc + (params.d * lam1 / rho_in**2 - params.alpha + logd_in) * c_in
    b_term = params.gamma * c_in**2
    resid = a_term[:, None] * psi[None, :] + b_term[:, None] * (psi**2)[None, :]
    max_resid = float(np.max(resid))

    impulse_margin = float(np.min(g(pre_start) - values[0]))

    return LowerSolution(orbit, spec, max_resid, impulse_margin)


@dataclass
class BracketPair:
    """State of the monotone bracketing iteration."""

    upper: PeriodOrbit
    lower: PeriodOrbit
    iterations: int
    gap: float
    gap_history: list[float] = field(default_factory=list)


def _orbit_leq(a: PeriodOrbit, b: PeriodOrbit, tol: float) -> float:
    """Largest violation of a <= b (nonpositive when ordered within tol)."""
    viol = max(
        float(np.max(a.values - b.values)),
        float(np.max(a.pre_start - b.pre_start)),
    )
    return viol


def _iterate_orbit(w: PeriodOrbit, params, rho, g, grid, kstar, coeffs) -> PeriodOrbit:
    """One sweep of the bracketing iteration applied to orbit w.

    Solves the linear problem z_t = d/rho^2 z_yy - K* z + s(t) over one
    period with frozen source s = K* w + (alpha - rho'/rho) w - gamma w^2,
    initial trace w(T) and post-impulse start g(w(T)).
    """
    S = grid.steps_per_period
    T = params.T
    drift_mid = coeffs
    vals = w.values
    # time-midpoint source from the interpolated frozen field: a convex
    # combination of node values, so the sweep stays monotone in w
    w_half = 0.5 * (vals[:-1] + vals[1:])
    src_mid = (kstar + drift_mid[:, None]) * w_half - params.gamma * w_half**2

    w_terminal = vals[-1]
    new = np.empty_like(vals)
    z = np.asarray(g(w_terminal), dtype=float)
    new[0] = z
    for k in range(S):
        z = _step_shifted_linear(z, T * k / S, grid.dt, grid.dy, params.d,
                                 kstar, src_mid[k], rho)
        new[k + 1] = z
    return PeriodOrbit(times=w.times, values=new, pre_start=w_terminal.copy())


def monotone_iteration(params: ModelParams, rho: EvolutionRate, g, grid: Grid,
                       upper: PeriodOrbit | UpperSolution,
                       lower: PeriodOrbit | LowerSolution,
                       tol: float = 1e-6, max_iterations: int = 5000,
                       order_tol: float = 1e-8) -> BracketPair:
    """Squeeze an ordered (upper, lower) pair towards the periodic state.

    Each sweep advances both sequences one step of the shifted linear
    iteration with K* = alpha/gamma + sup |rho'/rho|, which makes the
    frozen source nondecreasing in the previous iterate.  The sequences
    are provably monotone; an ordering violation beyond ``order_tol``
    indicates a scheme bug and raises.
    """
    if not getattr(g, "is_monotone", True):
        raise ValueError(
            "the bracketing iteration needs a nondecreasing pulse; "
            "bracket nonmonotone pulses between their envelopes instead"
        )
    if isinstance(upper, (UpperSolution, LowerSolution)):
        upper = upper.orbit
    if isinstance(lower, (UpperSolution, LowerSolution)):
        lower = lower.orbit
    if _orbit_leq(lower, upper, order_tol) > order_tol:
        raise IterationOrderBrokenError("initial pair is not ordered")
    kstar = params.alpha / params.gamma + rho.max_abs_log_derivative()
    if kstar * grid.dt >= 2.0:
        raise ValueError(
            f"shift K* = {kstar:.3g} needs dt < {2.0 / kstar:.3g}; "
            "use more steps per period"
        )
    S = grid.steps_per_period
    t_nodes = params.T * np.arange(S + 1) / S
    drift_mid = params.alpha - np.array(
        [rho.log_derivative(t + 0.5 * grid.dt) for t in t_nodes[:-1]]
    )
    coeffs = drift_mid

    gap = upper.sup_distance(lower)
    history = [gap]
    m = 0
    while gap >= tol and m < max_iterations:
        new_upper = _iterate_orbit(upper, params, rho, g, grid, kstar, coeffs)
        new_lower = _iterate_orbit(lower, params, rho, g, grid, kstar, coeffs)
        for a, b, what in (
            (lower, new_lower, "lower nondecreasing"),
            (new_upper, upper, "upper nonincreasing"),
            (new_lower, new_upper, "lower below upper"),
        ):
            viol = _orbit_leq(a, b, order_tol)
            if viol > order_tol:
                raise IterationOrderBrokenError(
                    f"{what} violated by {viol:.3e} at sweep {m + 1}"
                )
        upper, lower = new_upper, new_lower
        gap = upper.sup_distance(lower)
        history.append(gap)
        m += 1
    return BracketPair(upper=upper, lower=lower, iterations=m, gap=gap,
                       gap_history=history)


@dataclass(frozen=True)
class PeriodicSolution:
    """Converged positive periodic state with its fixed-point residual."""

    orbit: PeriodOrbit
    residual: float
    periods: int


@dataclass(frozen=True)
class ExtinctionCertificate:
    """Period-map iteration collapsed to the zero state."""

    periods: int
    residual: float
    final_sup: float


def _advance_period(v, params, rho, g, grid, record=False):
    """Apply the impulse, then integrate one period; optionally keep rows."""
    S = grid.steps_per_period
    T = params.T
    rows = np.empty((S + 1, v.size)) if record else None
    z = np.asarray(g(v), dtype=float)
    if record:
        rows[0] = z
    for k in range(S):
        z = _step_reaction_diffusion(z, T * k / S, grid.dt, grid.dy,
                                     params.d, params.alpha, params.gamma, rho)
        if z.min() < 0.0:
            np.maximum(z, 0.0, out=z)
        if record:
            rows[k + 1] = z
    return z, rows


def period_map_fixed_point(params: ModelParams, rho: EvolutionRate, g,
                           grid: Grid, seed, tol: float = 1e-8,
                           max_periods: int = 500,
                           extinction_floor: float = 1e-10):
    """Picard-iterate the full-period map until the state repeats.

    Returns a PeriodicSolution when the limit is positive, or an
    ExtinctionCertificate when the iteration collapses to zero (the
    subcritical regime).  The stopping rule requires both the one-period
    residual and the geometric estimate of the remaining distance to the
    fixed point to drop below ``tol``.
    """
    v = np.array(seed.values if isinstance(seed, StateField) else seed, dtype=float)
    residual = math.inf
    prev_residual = None
    for m in range(max_periods):
        v_next, _ = _advance_period(v, params, rho, g, grid)
        residual = float(np.max(np.abs(v_next - v)))
        ratio = residual / prev_residual if prev_residual else 0.5
        prev_residual = residual if residual > 0 else None
        v = v_next
        q = min(max(ratio, 0.0), 0.95)
        if residual < tol and residual * q / (1.0 - q) < tol:
            break
    else:
        raise PeriodMapConvergenceError(
            f"period map not converged after {max_periods} periods "
            f"(residual {residual:.3e})",
            residual=residual, periods=max_periods,
        )
    periods = m + 1
    if float(v.max()) < 1e-6:
        # collapsing state: drive it down to the extinction floor (no
        # positive periodic state lives at this amplitude)
        while extinction_floor <= v.max() and periods < max_periods:
            v_next, _ = _advance_period(v, params, rho, g, grid)
            periods += 1
            if v_next.max() >= v.max():
                break
            v = v_next
    if float(v.max()) < extinction_floor:
        return ExtinctionCertificate(periods=periods, residual=residual,
                                     final_sup=float(v.max()))
    v_end, rows = _advance_period(v, params, rho, g, grid, record=True)
    orbit = PeriodOrbit(
        times=np.linspace(0.0, params.T, grid.steps_per_period + 1),
        values=rows,
        pre_start=v.copy(),
    )
    return PeriodicSolution(
        orbit=orbit,
        residual=float(np.max(np.abs(v_end - v))),
        periods=periods,
    )


@dataclass
class NonmonotoneBracket:
    """Result of bracketing a nonmonotone harvest between its envelopes."""

    envelopes: object            # EnvelopePair
    beta_plus: float
    lower_attractor: PeriodicSolution   # minimal periodic state of the g_minus system
    true_orbit: PeriodOrbit             # converged orbit of the true system
    periods: int
    v0_clamped: bool
    min_bracket_margin: float    # min over snapshots of min(v - v_minus, v_plus - v)
    min_ode_bound_margin: float  # min over snapshots of uniform ODE bound minus v_plus


def nonmonotone_bracket(params: ModelParams, rho: EvolutionRate, g, grid: Grid,
                        v0: StateField, tol: float = 1e-8,
                        max_periods: int = 500,
                        order_tol: float = 1e-9) -> NonmonotoneBracket:
    """Bracket the nonmonotone system between its envelope systems.

    Builds g_minus <= g <= g_plus, clamps the initial field to the
    density bound beta_plus when necessary (with a warning), advances
    the three systems side by side checking the pointwise ordering
    v_minus <= v <= v_plus at every step of every period, and returns
    the minimal periodic state of the g_minus system together with the
    converged orbit of the true system.
    """
    env = build_envelopes(g, params, rho)
    v_init = np.array(v0.values, dtype=float)
    clamped = bool(np.any(v_init > env.beta_plus))
    if clamped:
        warnings.warn(
            f"initial field exceeds the density bound {env.beta_plus:.6g}; "
            "clamping (the bracketing requires v0 <= beta_plus)",
            stacklevel=2,
        )
        v_init = np.minimum(v_init, env.beta_plus)

    # minimal periodic state of the g_minus system, grown from a tiny seed
    seed = 1e-6 * np.sin(math.pi * grid.y / params.l0)
    lower_attr = period_map_fixed_point(params, rho, env.g_minus, grid, seed,
                                        tol=tol, max_periods=max_periods)
    if isinstance(lower_attr, ExtinctionCertificate):
        raise EvodomError(
            "envelope system collapsed despite a supercritical index"
        )

    # uniform dominating ODE orbit of the g_plus system, at grid times
    ode_at_nodes = np.interp(
        np.linspace(0.0, params.T, grid.steps_per_period + 1),
        env.ode_times, env.ode_values,
    )

    v_min = v_init.copy()
    v_mid = v_init.copy()
    v_max = v_init.copy()
    bracket_margin = math.inf
    ode_margin = math.inf
    prev_residual = None
    periods = 0
    for m in range(max_periods):
        v_min, rows_min = _advance_period(v_min, params, rho, env.g_minus, grid,
                                          record=True)
        new_mid, rows = _advance_period(v_mid, params, rho, g, grid, record=True)
        v_max, rows_max = _advance_period(v_max, params, rho, env.g_plus, grid,
                                          record=True)
        # full-resolution ordering checks on this period's rows
        lower_gap = float(np.min(rows - rows_min))
        upper_gap = float(np.min(rows_max - rows))
        bracket_margin = min(bracket_margin, lower_gap, upper_gap)
        if min(lower_gap, upper_gap) < -order_tol:
            raise IterationOrderBrokenError(
                f"envelope ordering violated by {-min(lower_gap, upper_gap):.3e} "
                f"in period {m + 1}"
            )
        ode_margin = min(ode_margin,
                         float(np.min(ode_at_nodes[:, None] - rows_max)))
        residual = float(np.max(np.abs(new_mid - v_mid)))
        v_mid = new_mid
        ratio = residual / prev_residual if prev_residual else 0.5
        prev_residual = residual if residual > 0 else None
        q = min(max(ratio, 0.0), 0.95)
        periods = m + 1
        if residual < tol and residual * q / (1.0 - q) < tol:
            break
    else:
        raise PeriodMapConvergenceError(
            "true system did not settle within the period cap",
            residual=residual, periods=max_periods,
        )

    _, rows = _advance_period(v_mid, params, rho, g, grid, record=True)
    true_orbit = PeriodOrbit(
        times=np.linspace(0.0, params.T, grid.steps_per_period + 1),
        values=rows,
        pre_start=v_mid.copy(),
    )
    return NonmonotoneBracket(
        envelopes=env,
        beta_plus=env.beta_plus,
        lower_attractor=lower_attr,
        true_orbit=true_orbit,
        periods=periods,
        v0_clamped=clamped,
        min_bracket_margin=bracket_margin,
        min_ode_bound_margin=ode_margin,
    )

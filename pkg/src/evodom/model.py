"""Model building blocks: parameters, domain evolution rates, harvest maps.

The population lives on an interval whose length is rescaled in time by a
periodic evolution rate rho(t) with rho(0) = 1.  After mapping to the fixed
reference interval (0, l0) the density v(t, y) obeys

    v_t = d/rho^2(t) v_yy + (alpha - rho'(t)/rho(t)) v - gamma v^2

between impulse instants, with Dirichlet boundaries, and an instantaneous
pointwise harvest v((nT)+, y) = g(v(nT, y)) at every period boundary t = nT.

This module defines the immutable parameter objects for that problem, the
shipped families of evolution rates and harvest maps g, and the monotone
envelopes g_plus / g_minus used to bracket dynamics when g is not monotone.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import EnvelopeUndefinedError, PulseDomainError


@dataclass(frozen=True)
class ModelParams:
    """Coefficients of the logistic problem on the reference interval.

    d      diffusion coefficient          (length^2 / time)
    alpha  intrinsic growth rate          (1 / time)
    gamma  competition coefficient        (1 / (density * time))
    l0     reference interval length      (length)
    T      impulse / evolution period     (time)
    """

    d: float
    alpha: float
    gamma: float
    l0: float
    T: float
    _allow_degenerate: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        if self.l0 <= 0 or self.T <= 0:
            raise ValueError("l0 and T must be strictly positive")
        if self._allow_degenerate:
            if self.d < 0 or self.alpha < 0 or self.gamma < 0:
                raise ValueError("coefficients must be nonnegative")
        elif self.d <= 0 or self.alpha <= 0 or self.gamma <= 0:
            raise ValueError("d, alpha and gamma must be strictly positive")

    @classmethod
    def degenerate(cls, d, alpha, gamma, l0, T):
        """Parameter set allowing d, alpha or gamma to vanish.

        Exists for reduced problems with an exact closed-form solution
        (pure diffusion, pure reaction, pure drift); the production
        constructor rejects vanishing coefficients.
        """
        return cls(d, alpha, gamma, l0, T, _allow_degenerate=True)


@dataclass(frozen=True)
class EvolutionRate:
    """T-periodic domain evolution rate rho(t) with rho(0) = 1.

    Shipped families:
      constant-one   rho(t) = 1                       (static domain)
      exp-cosine     rho(t) = exp(c (1 - cos 2 pi t / T))

    The contract consumed by the rest of the library is: ``value`` (rho
    itself), ``log_derivative`` (rho'/rho, analytic), strict positivity
    and exact T-periodicity.  New families only need to honour that.
    """

    kind: str
    period: float
    amplitude: float = 0.0

    _KINDS = ("constant-one", "exp-cosine")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown evolution-rate kind {self.kind!r}")
        if self.period <= 0:
            raise ValueError("period must be strictly positive")

    @classmethod
    def constant(cls, period):
        return cls("constant-one", period)

    @classmethod
    def exp_cosine(cls, amplitude, period):
        return cls("exp-cosine", period, amplitude)

    def value(self, t):
        """rho(t); accepts scalars or arrays."""
        if self.kind == "constant-one":
            return np.ones_like(np.asarray(t, dtype=float)) if np.ndim(t) else 1.0
        w = 2.0 * np.pi / self.period
        return np.exp(self.amplitude * (1.0 - np.cos(w * np.asarray(t, dtype=float)))) \
            if np.ndim(t) else math.exp(self.amplitude * (1.0 - math.cos(w * t)))

    def log_derivative(self, t):
        """rho'(t)/rho(t), analytic per family."""
        if self.kind == "constant-one":
            return np.zeros_like(np.asarray(t, dtype=float)) if np.ndim(t) else 0.0
        w = 2.0 * np.pi / self.period
        return self.amplitude * w * np.sin(w * np.asarray(t, dtype=float)) \
            if np.ndim(t) else self.amplitude * w * math.sin(w * t)

    def max_abs_log_derivative(self):
        """sup over one period of |rho'/rho| (exact per family)."""
        if self.kind == "constant-one":
            return 0.0
        return abs(self.amplitude) * 2.0 * np.pi / self.period


@dataclass(frozen=True)
class PulseFunction:
    """Pointwise harvest map g applied at every period boundary.

    Families:
      identity        g(u) = u                 (no harvesting)
      beverton-holt   g(u) = m u / (a + u)     (monotone saturation)
      ricker          g(u) = u exp(r - b u)    (overcompensating, unimodal)

    ``monotone_threshold`` is the largest u up to which g is
    nondecreasing: +inf for identity and beverton-holt, 1/b for ricker.
    It is stored analytically; detecting it numerically would be noisy.
    """

    kind: str
    a: float = 0.0
    m: float = 0.0
    r: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        if self.kind == "identity":
            pass
        elif self.kind == "beverton-holt":
            if self.a <= 0 or self.m <= 0:
                raise ValueError("beverton-holt requires a > 0 and m > 0")
            if self.m >= self.a:
                # g(u)/u = m/(a+u) reaches 1 near u = m - a; harvesting no
                # longer removes mass there.  The index formula still
                # evaluates, so construction is allowed but flagged.
                warnings.warn(
                    "beverton-holt with m >= a does not harvest near zero "
                    "(g(u)/u >= 1 for small u)",
                    stacklevel=3,
                )
        elif self.kind == "ricker":
            if self.r <= 0 or self.b <= 0:
                raise ValueError("ricker requires r > 0 and b > 0")
        else:
            raise ValueError(f"unknown pulse kind {self.kind!r}")

    @classmethod
    def identity(cls):
        return cls("identity")

    @classmethod
    def beverton_holt(cls, a, m):
        return cls("beverton-holt", a=a, m=m)

    @classmethod
    def ricker(cls, r, b):
        return cls("ricker", r=r, b=b)

    def __call__(self, u):
        """g(u) for scalar or array u >= 0."""
        arr = np.asarray(u, dtype=float)
        if np.any(arr < 0.0):
            raise PulseDomainError("pulse evaluated at negative density")
        if self.kind == "identity":
            out = arr.copy()
        elif self.kind == "beverton-holt":
            out = self.m * arr / (self.a + arr)
        else:
            out = arr * np.exp(self.r - self.b * arr)
        return out if np.ndim(u) else float(out)

    def derivative_at_zero(self):
        """g'(0), exact per family: m/a, exp(r) or 1."""
        if self.kind == "identity":
            return 1.0
        if self.kind == "beverton-holt":
            return self.m / self.a
        return math.exp(self.r)

    @property
    def monotone_threshold(self):
        if self.kind == "ricker":
            return 1.0 / self.b
        return math.inf

    @property
    def is_monotone(self):
        return math.isinf(self.monotone_threshold)

    def quadratic_lower_bound(self):
        """Constants (D, nu) with g(u) >= g'(0) u - D u^nu near zero.

        beverton-holt:  m u/(a+u) >= (m/a) u - (m/a^2) u^2 for all u >= 0
                        (equivalent to a^2 >= a^2 - u^2), so D = m/a^2.
        ricker:         u e^{r-bu} >= e^r u (1 - b u) for all u >= 0
                        (e^{-x} >= 1 - x), so D = b e^r.
        identity:       exact with D = 0.
        Always nu = 2.
        """
        if self.kind == "identity":
            return 0.0, 2.0
        if self.kind == "beverton-holt":
            return self.m / self.a**2, 2.0
        return self.b * math.exp(self.r), 2.0


def eval_pulse(g: PulseFunction, u):
    """Evaluate the harvest map; rejects negative densities."""
    return g(u)


def pulse_derivative_at_zero(g: PulseFunction):
    """Closed-form g'(0) of the harvest map."""
    return g.derivative_at_zero()


@dataclass(frozen=True)
class _CappedPulse:
    """Nondecreasing upper envelope: g_plus(u) = max_{0<=w<=u} g(w).

    For the shipped families g is either nondecreasing (g_plus = g) or
    unimodal with peak at the monotone threshold, in which case the
    running maximum is g frozen at its peak value.
    """

    base: PulseFunction

    def __call__(self, u):
        cap = self.base.monotone_threshold
        if math.isinf(cap):
            return self.base(u)
        arr = np.asarray(u, dtype=float)
        if np.any(arr < 0.0):
            raise PulseDomainError("pulse evaluated at negative density")
        out = self.base(np.minimum(arr, cap))
        return out if np.ndim(u) else float(out)

    def derivative_at_zero(self):
        return self.base.derivative_at_zero()

    @property
    def is_monotone(self):
        return True


@dataclass(frozen=True)
class _FlooredPulse:
    """Nondecreasing lower envelope g_minus(u) = min_{u<=w<=beta} g(w).

    On [0, beta] this equals min(g(u), g(beta)) because g is unimodal:
    the minimum over [u, beta] is attained at one of the endpoints.
    Above beta, where the envelope is not defined by the construction,
    it is extended by the constant g_minus(beta) - the only
    nondecreasing extension that keeps g_minus <= g while densities stay
    below the level where g drops back under g(beta).
    """

    base: PulseFunction
    beta: float
    g_at_beta: float

    def __call__(self, u):
        arr = np.asarray(u, dtype=float)
        if np.any(arr < 0.0):
            raise PulseDomainError("pulse evaluated at negative density")
        out = np.minimum(self.base(np.minimum(arr, self.beta)), self.g_at_beta)
        return out if np.ndim(u) else float(out)

    def derivative_at_zero(self):
        return self.base.derivative_at_zero()

    @property
    def is_monotone(self):
        return True


@dataclass(frozen=True)
class EnvelopePair:
    """Monotone envelopes of a (possibly nonmonotone) harvest map.

    g_plus    nondecreasing, g_plus >= g on [0, inf)
    g_minus   nondecreasing, g_minus <= g on [0, beta_plus]
    beta_plus density bound: minimum over one period of the minimal
              positive periodic orbit of the spatially homogeneous
              pulsed logistic ODE driven by g_plus
    ode_times / ode_values: that minimal orbit, sampled over one period
              (kept because the nonmonotone bracketing reuses it as a
              spatially uniform dominating solution).
    """

    g_plus: _CappedPulse
    g_minus: _FlooredPulse
    beta_plus: float
    ode_times: np.ndarray
    ode_values: np.ndarray


def build_envelopes(g: PulseFunction, params: ModelParams, rho: EvolutionRate) -> EnvelopePair:
    """Construct monotone envelopes of g and the density bound beta_plus.

    Requires the reproduction index of the g_plus-pulsed problem to
    exceed 1 (the envelopes share g'(0) with g, so this equals the index
    of the original problem); otherwise the minimal positive periodic
    orbit defining beta_plus does not exist.
    """
    from .spectral import compute_index
    from .periodic import minimal_periodic_ode_orbit

    report = compute_index(params, rho, g)
    if report.index <= 1.0:
        raise EnvelopeUndefinedError(
            f"envelopes need a supercritical problem (index {report.index:.6g} <= 1)"
        )
    g_plus = _CappedPulse(g)
    times, values = minimal_periodic_ode_orbit(params, rho, g_plus)
    beta_plus = float(values.min())
    g_minus = _FlooredPulse(g, beta_plus, g(beta_plus))
    return EnvelopePair(g_plus, g_minus, beta_plus, times, values)

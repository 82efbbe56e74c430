"""Reservoir correlation function and the coin decoherence function kappa(t).

The coin couples to a Lorentzian reservoir on resonance with its transition,
which gives the exponential correlation function

    f(t) = g0 * eta * exp(-eta |t|) / 2

and a decoherence function obeying

    dkappa/dt = -int_0^t f(t - t') kappa(t') dt',   kappa(0) = 1.

One walk step is one unit of kernel time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import InvariantError

#: |kappa| below this makes kappa'/kappa meaningless; such samples are flagged.
SINGULAR_THRESHOLD = 1e-8


@dataclass(frozen=True)
class KernelParams:
    """Coupling strength ``g0`` and spectral width ``eta`` (both inverse time)."""

    g0: float
    eta: float

    def __post_init__(self):
        if not (self.g0 > 0 and np.isfinite(self.g0)):
            raise ValueError(f"g0 must be positive and finite, got {self.g0}")
        if not (self.eta > 0 and np.isfinite(self.eta)):
            raise ValueError(f"eta must be positive and finite, got {self.eta}")

    @property
    def regime(self) -> str:
        # g0 == eta/2 is the critically damped edge and counts as weak.
        return "weak" if self.g0 <= self.eta / 2 else "strong"

    @property
    def d(self) -> complex:
        """sqrt(eta^2 - 2 g0 eta); purely imaginary in the strong regime."""
        return complex(np.sqrt(complex(self.eta**2 - 2 * self.g0 * self.eta)))

    @property
    def d_prime(self) -> float:
        """Oscillation frequency sqrt(2 g0 eta - eta^2) (zero in the weak regime)."""
        return float(abs(self.d.imag))


def correlation_function(params: KernelParams, t):
    """Two-point reservoir correlation ``g0*eta*exp(-eta|t|)/2``."""
    t = np.abs(np.asarray(t, dtype=float))
    out = 0.5 * params.g0 * params.eta * np.exp(-params.eta * t)
    return float(out) if out.ndim == 0 else out


def kappa_closed_form(params: KernelParams, t):
    """Analytic solution of the memory equation for the exponential kernel.

    Accepts a scalar or an array of non-negative times and returns complex
    values with zero imaginary part.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("kappa_closed_form requires t >= 0")
    eta = params.eta
    disc = eta**2 - 2 * params.g0 * eta
    envelope = np.exp(-eta * t_arr / 2)
    if abs(disc) <= 1e-14 * eta**2:
        val = envelope * (1 + eta * t_arr / 2)
    elif disc > 0:
        d = np.sqrt(disc)
        # Combine the growing exponentials with the envelope to avoid overflow.
        val = 0.5 * (1 + eta / d) * np.exp((d - eta) * t_arr / 2) + 0.5 * (1 - eta / d) * np.exp(
            -(d + eta) * t_arr / 2
        )
    else:
        dp = np.sqrt(-disc)
        val = envelope * (np.cos(dp * t_arr / 2) + (eta / dp) * np.sin(dp * t_arr / 2))
    val = np.asarray(val, dtype=complex)
    return complex(val) if val.ndim == 0 else val


@dataclass(frozen=True)
class DecoherenceFunction:
    """kappa(t) sampled on the uniform grid ``0, dt, 2 dt, ...``."""

    params: KernelParams
    dt: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("values must be a non-empty 1-d array")
        if values[0] != 1:
            raise InvariantError("kappa(0) must equal 1")
        if np.max(np.abs(values)) > 1 + 1e-9:
            raise InvariantError(f"|kappa| exceeds 1: max {np.max(np.abs(values)):.12f}")

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.values.size)

    @property
    def t_max(self) -> float:
        return self.dt * (self.values.size - 1)

    @property
    def samples(self) -> list[tuple[float, complex]]:
        return list(zip(self.times.tolist(), self.values.tolist()))

    def index(self, t: float) -> int:
        """Grid index of time ``t``; ``t`` must lie on the grid."""
        n = int(round(t / self.dt))
        if n < 0 or n >= self.values.size:
            raise ValueError(f"t={t} outside sampled range [0, {self.t_max}]")
        if abs(n * self.dt - t) > 1e-9 * max(1.0, abs(t)):
            raise ValueError(f"t={t} is not on the sample grid (dt={self.dt})")
        return n

    def at(self, t: float) -> complex:
        return complex(self.values[self.index(t)])


def sample_closed_form(params: KernelParams, dt: float, t_max: float) -> DecoherenceFunction:
    """Closed-form kappa tabulated on the same grid the Volterra solver uses."""
    n = _grid_size(dt, t_max)
    values = kappa_closed_form(params, dt * np.arange(n))
    values[0] = 1.0
    return DecoherenceFunction(params, dt, values)


def _grid_size(dt: float, t_max: float) -> int:
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_max < dt:
        raise ValueError("t_max must be at least dt")
    return int(round(t_max / dt)) + 1


def kappa_volterra(
    params: KernelParams,
    dt: float,
    t_max: float,
    kernel: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> DecoherenceFunction:
    """Solve the memory equation on ``{0, dt, ..., t_max}``.

    Uses a Heun predictor-corrector step with the memory integral evaluated by
    the trapezoidal rule, second order overall. With ``kernel=None`` the
    exponential correlation function of ``params`` is used and the memory
    integral is carried recursively in O(1) per step; any other ``kernel``
    (a vectorised callable of the time lag) falls back to the O(n^2) sum.
    """
    n = _grid_size(dt, t_max)
    if kernel is None:
        y = _volterra_exponential(params, dt, n)
    else:
        y = _volterra_generic(kernel, dt, n)
    return DecoherenceFunction(params, dt, y)


def _volterra_exponential(params: KernelParams, dt: float, n: int) -> np.ndarray:
    # I(t) = c * J(t) with J(t) = int_0^t exp(-eta (t - t')) y(t') dt'.
    c = 0.5 * params.g0 * params.eta
    decay = np.exp(-params.eta * dt)
    half = 0.5 * dt
    y = np.empty(n, dtype=complex)
    y[0] = 1.0
    j_prev = 0.0 + 0.0j
    for i in range(n - 1):
        yi = y[i]
        i_prev = c * j_prev
        carried = decay * j_prev + half * decay * yi
        y_pred = yi - dt * i_prev
        i_pred = c * (carried + half * y_pred)
        y_next = yi - half * (i_prev + i_pred)
        y[i + 1] = y_next
        j_prev = carried + half * y_next
    return y


def _volterra_generic(kernel, dt: float, n: int) -> np.ndarray:
    f = np.asarray(kernel(dt * np.arange(n)), dtype=complex)
    if f.shape != (n,):
        raise ValueError("kernel must return one value per lag")
    half = 0.5 * dt
    y = np.empty(n, dtype=complex)
    y[0] = 1.0
    i_prev = 0.0 + 0.0j
    for i in range(n - 1):
        m = i + 1
        # Trapezoid over t' in [0, t_m] excluding the unknown endpoint y[m].
        known = half * f[m] * y[0]
        if m > 1:
            known += dt * np.dot(f[m - 1 : 0 : -1], y[1:m])
        y_pred = y[i] - dt * i_prev
        i_pred = known + half * f[0] * y_pred
        y[m] = y[i] - half * (i_prev + i_pred)
        i_prev = known + half * f[0] * y[m]
    return y


@dataclass(frozen=True)
class RateSample:
    t: float
    gamma: float
    epsilon: float
    singular: bool


def _derivative(values: np.ndarray, dt: float) -> np.ndarray:
    # Second order throughout: central inside, one-sided three-point at the ends.
    if values.size < 3:
        raise ValueError("need at least three samples to differentiate")
    return np.gradient(values, dt, edge_order=2)


def rate_series(df: DecoherenceFunction):
    """Decay rate gamma(t), energy shift epsilon(t) and singular flags on the whole grid."""
    deriv = _derivative(df.values, df.dt)
    singular = np.abs(df.values) < SINGULAR_THRESHOLD
    ratio = np.zeros_like(df.values)
    ok = ~singular
    ratio[ok] = deriv[ok] / df.values[ok]
    gamma = np.where(ok, -ratio.real, np.nan)
    epsilon = np.where(ok, -ratio.imag, np.nan)
    return gamma, epsilon, singular


def rates(df: DecoherenceFunction, t: float) -> RateSample:
    """gamma = -Re(kappa'/kappa), epsilon = -Im(kappa'/kappa) at grid time ``t``.

    Near a zero of kappa the ratio is numerically meaningless, so the sample is
    returned with ``singular=True`` and NaN rates instead.
    """
    n = df.index(t)
    lo = max(0, n - 2)
    hi = min(df.values.size, n + 3)
    window = df.values[lo:hi]
    deriv = _derivative(window, df.dt)[n - lo]
    kap = df.values[n]
    if abs(kap) < SINGULAR_THRESHOLD:
        return RateSample(n * df.dt, float("nan"), float("nan"), True)
    ratio = deriv / kap
    return RateSample(n * df.dt, float(-ratio.real), float(-ratio.imag), False)

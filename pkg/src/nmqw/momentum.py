"""Momentum-space moments of the dephased Hadamard walk.

In the walker momentum basis the coin at fixed k evolves under the
superoperator L_k (dephase, Hadamard, then the phases diag(e^{-ik}, e^{ik})).
On the Pauli coefficients (r1, r2, r3, r4) of O = r1 1 + r2 X + r3 Y + r4 Z it
is block diagonal: r1 is conserved and (r2, r3, r4) evolves under the real
3x3 matrix M_k. The position moments follow from k-averages of matrix
powers of M_k:

    <x>   =  (1/2pi) int dk  e3 . sum_{j=1}^t M_k^j r
    <x^2> =  t + (2/2pi) int dk  e3 . sum_{n=1}^{t-1} (t - n) M_k^n e3

where r is the Bloch vector of the initial coin and e3 = (0, 0, 1). The
k-integrals use the trapezoid rule on a uniform periodic grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Left and right multiplication by sigma_z on the (1, X, Y, Z) coefficient vector.
Z_LEFT = np.array(
    [[0, 0, 0, 1], [0, 0, -1j, 0], [0, 1j, 0, 0], [1, 0, 0, 0]], dtype=complex
)
Z_RIGHT = np.array(
    [[0, 0, 0, 1], [0, 0, 1j, 0], [0, -1j, 0, 0], [1, 0, 0, 0]], dtype=complex
)

DEFAULT_QUAD = 1024

_E3 = np.array([0.0, 0.0, 1.0])


class IdealWalkResolventError(ValueError):
    """(1 - M_k) is singular at |kappa| = 1, so the geometric-sum formulas do not apply."""


@dataclass(frozen=True)
class BlochVector:
    """Pauli coefficients of the initial coin, rho = (r1 1 + r2 X + r3 Y + r4 Z) / 2."""

    r2: float
    r3: float
    r4: float
    r1: float = 1.0

    def __post_init__(self):
        if self.r2**2 + self.r3**2 + self.r4**2 > 1 + 1e-12:
            raise ValueError("Bloch vector longer than 1")

    @classmethod
    def from_density(cls, rho) -> "BlochVector":
        rho = np.asarray(rho, dtype=complex)
        return cls(
            float(2 * rho[1, 0].real),
            float(2 * rho[1, 0].imag),
            float((rho[0, 0] - rho[1, 1]).real),
            float(np.trace(rho).real),
        )

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.r2, self.r3, self.r4])


#: Bloch vector of (|+1> + i|-1>)/sqrt(2).
DEFAULT_BLOCH = BlochVector(0.0, 1.0, 0.0)


@dataclass(frozen=True)
class MomentumMatrix:
    k: float
    kappa: complex
    M: np.ndarray

    def spectral_radius(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvals(self.M))))


def _check_kappa(kappa, strict: bool) -> complex:
    kappa = complex(kappa)
    if abs(kappa) > 1 + 1e-12:
        raise ValueError(f"|kappa| = {abs(kappa)} > 1")
    if strict and abs(kappa) >= 1:
        raise IdealWalkResolventError(
            "ideal-walk resolvent singular: |kappa| = 1 makes (1 - M_k) non-invertible"
        )
    return kappa


def mk_stack(ks, kappa) -> np.ndarray:
    """M_k for every k in ``ks``, shape ``(len(ks), 3, 3)``."""
    ks = np.asarray(ks, dtype=float)
    kappa = complex(kappa)
    s, c = np.sin(2 * ks), np.cos(2 * ks)
    re, im = kappa.real, kappa.imag
    out = np.empty(ks.shape + (3, 3))
    out[..., 0, 0] = s * im
    out[..., 0, 1] = s * re
    out[..., 0, 2] = c
    out[..., 1, 0] = -c * im
    out[..., 1, 1] = -c * re
    out[..., 1, 2] = s
    out[..., 2, 0] = re
    out[..., 2, 1] = -im
    out[..., 2, 2] = 0.0
    return out


def build_mk(k: float, kappa) -> MomentumMatrix:
    kappa = _check_kappa(kappa, strict=False)
    return MomentumMatrix(float(k), kappa, mk_stack(np.array(k), kappa))


def build_lk(k: float, kappa) -> np.ndarray:
    """Full 4x4 action of L_k on (r1, r2, r3, r4); the r1 row is (1, 0, 0, 0)."""
    out = np.zeros((4, 4))
    out[0, 0] = 1.0
    out[1:, 1:] = build_mk(k, kappa).M
    return out


def k_grid(n: int = DEFAULT_QUAD) -> np.ndarray:
    """Uniform periodic grid on [-pi, pi); trapezoid weights are all 1/n."""
    if n < 2:
        raise ValueError("quadrature needs at least 2 points")
    return -np.pi + 2 * np.pi * np.arange(n) / n


def _resolvent_parts(kappa, n_quad):
    m = mk_stack(k_grid(n_quad), kappa)
    g = np.linalg.inv(np.eye(3) - m)
    return m, g


def first_moment_exact(t: int, kappa, r: BlochVector = DEFAULT_BLOCH, n_quad: int = DEFAULT_QUAD) -> float:
    """<x> after ``t`` steps at constant kappa via (1-M)^{-1}(M - M^{t+1})."""
    kappa = _check_kappa(kappa, strict=True)
    if t < 1:
        raise ValueError("t must be >= 1")
    m, g = _resolvent_parts(kappa, n_quad)
    m_pow = np.linalg.matrix_power(m, t + 1)
    total = g @ (m - m_pow)
    return float(np.mean(total[:, 2, :] @ r.vector))


def _pair_sum(t: int, m: np.ndarray, g: np.ndarray) -> np.ndarray:
    """sum_{n=1}^{t-1} (t - n) M^n = G M [(t - 1) - G M + G M^t]."""
    gm = g @ m
    m_pow = np.linalg.matrix_power(m, t)
    return gm @ ((t - 1) * np.eye(3) - gm + g @ m_pow)


def second_moment_exact(t: int, kappa, r: BlochVector = DEFAULT_BLOCH, n_quad: int = DEFAULT_QUAD) -> float:
    """<x^2> after ``t`` steps at constant kappa; independent of the initial coin."""
    kappa = _check_kappa(kappa, strict=True)
    if t < 1:
        raise ValueError("t must be >= 1")
    m, g = _resolvent_parts(kappa, n_quad)
    pairs = _pair_sum(t, m, g)
    return float(t + 2 * np.mean(pairs[:, 2, 2]))


def variance_exact(t: int, kappa, r: BlochVector = DEFAULT_BLOCH, n_quad: int = DEFAULT_QUAD) -> float:
    mean = first_moment_exact(t, kappa, r, n_quad)
    return second_moment_exact(t, kappa, r, n_quad) - mean * mean


def schedule_moments(factors, r: BlochVector = DEFAULT_BLOCH, n_quad: int = DEFAULT_QUAD):
    """<x>, <x^2> for t = 1..T under step-dependent factors kappa_1..kappa_T.

    Propagates time-ordered products M_k(kappa_j) ... M_k(kappa_1) on the k
    grid, so it covers absolute and incremental schedules and |kappa| = 1.
    Returns two arrays of length T.
    """
    factors = np.asarray(factors, dtype=complex)
    ks = k_grid(n_quad)
    v = np.broadcast_to(r.vector, (ks.size, 3)).copy()
    w = np.zeros((ks.size, 3))
    first = np.empty(factors.size)
    second = np.empty(factors.size)
    mean_acc = 0.0
    pair_acc = 0.0
    for j, kap in enumerate(factors):
        m = mk_stack(ks, _check_kappa(kap, strict=False))
        v = np.einsum("kab,kb->ka", m, v)
        # w_j = sum_{j' < j} M_j ... M_{j'+1} e3
        w = np.einsum("kab,kb->ka", m, w + _E3) if j > 0 else w
        mean_acc += v[:, 2].mean()
        pair_acc += w[:, 2].mean()
        first[j] = mean_acc
        second[j] = (j + 1) + 2 * pair_acc
    return first, second


def _magnitude_sq(kappa) -> float:
    a = abs(complex(kappa)) ** 2
    if a >= 1:
        raise IdealWalkResolventError("long-time formulas need |kappa| < 1")
    return a


def longtime_first_moment(kappa, r: BlochVector = DEFAULT_BLOCH) -> float:
    """Limit of <x> as t -> infinity at constant kappa."""
    kappa = complex(kappa)
    a = _magnitude_sq(kappa)
    return (r.r2 * kappa.real - r.r3 * kappa.imag + r.r4 * a) / (1 - a)


def longtime_second_moment(t, kappa) -> float:
    """Large-t form of <x^2>: t (1+|k|^2)/(1-|k|^2) - 7|k|^2/(1-|k|^2)^2."""
    a = _magnitude_sq(kappa)
    return t * (1 + a) / (1 - a) - 7 * a / (1 - a) ** 2


def longtime_variance(t, kappa, r: BlochVector = DEFAULT_BLOCH) -> float:
    mean = longtime_first_moment(kappa, r)
    return longtime_second_moment(t, kappa) - mean * mean

"""Coin dephasing map, its Kraus representation, and per-step kappa schedules."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import check_density
from .kernel import SINGULAR_THRESHOLD, DecoherenceFunction

_KAPPA_TOL = 1e-12


def _check_kappa(kappa) -> complex:
    kappa = complex(kappa)
    if not np.isfinite(kappa):
        raise ValueError("kappa must be finite")
    if abs(kappa) > 1 + _KAPPA_TOL:
        raise ValueError(f"|kappa| = {abs(kappa)} > 1 would break positivity")
    return kappa


def dephase(rho, kappa) -> np.ndarray:
    """Apply the dephasing map: rho01 -> kappa* rho01, rho10 -> kappa rho10.

    Populations are left untouched. The two coherences are written from the
    same product so the result is Hermitian to the last bit.
    """
    kappa = _check_kappa(kappa)
    rho = np.asarray(rho, dtype=complex)
    check_density(rho, tol=1e-12)
    out = rho.copy()
    c10 = kappa * rho[1, 0]
    out[1, 0] = c10
    out[0, 1] = np.conj(c10)
    out[0, 0] = rho[0, 0].real
    out[1, 1] = rho[1, 1].real
    return out


@dataclass(frozen=True)
class KrausPair:
    A1: np.ndarray
    A2: np.ndarray

    def apply(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        return self.A1 @ rho @ self.A1.conj().T + self.A2 @ rho @ self.A2.conj().T

    def completeness_residual(self) -> float:
        total = self.A1.conj().T @ self.A1 + self.A2.conj().T @ self.A2
        return float(np.max(np.abs(total - np.eye(2))))


def kraus_pair(kappa) -> KrausPair:
    """Phase-damping Kraus operators realising :func:`dephase` at ``kappa``.

    With theta = arg(kappa):

        A1 = sqrt((1+|kappa|)/2) diag(e^{-i theta/2},  e^{i theta/2})
        A2 = sqrt((1-|kappa|)/2) diag(e^{-i theta/2}, -e^{i theta/2})

    At kappa = 0 the phase is irrelevant and both operators are the weighted
    projective-dephasing pair.
    """
    kappa = _check_kappa(kappa)
    mag = min(abs(kappa), 1.0)
    theta = np.angle(kappa) if mag > 0 else 0.0
    ph = np.exp(-0.5j * theta)
    a1 = np.sqrt((1 + mag) / 2) * np.diag([ph, np.conj(ph)])
    a2 = np.sqrt((1 - mag) / 2) * np.diag([ph, -np.conj(ph)])
    return KrausPair(a1, a2)


MODES = ("absolute", "incremental", "frozen")


@dataclass(frozen=True)
class StepSchedule:
    """Per-step coherence factors kappa_1 ... kappa_T for a walk.

    ``flagged`` lists the (1-based) steps where the incremental ratio was
    undefined and full dephasing was substituted.
    """

    mode: str
    factors: np.ndarray
    frozen_value: Optional[complex] = None
    flagged: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown schedule mode {self.mode!r}")
        f = np.asarray(self.factors, dtype=complex)
        f.setflags(write=False)
        object.__setattr__(self, "factors", f)
        if np.any(np.abs(f) > 1 + _KAPPA_TOL):
            raise ValueError("schedule factors must satisfy |kappa_j| <= 1")

    @property
    def steps(self) -> int:
        return self.factors.size

    def __len__(self):
        return self.factors.size

    def __getitem__(self, j):
        return self.factors[j]


def frozen(kappa, steps: int) -> StepSchedule:
    """Constant factor ``kappa`` at every step (``kappa=1`` is the ideal walk)."""
    kappa = _check_kappa(kappa)
    if steps < 0:
        raise ValueError("steps must be non-negative")
    return StepSchedule("frozen", np.full(steps, kappa, dtype=complex), frozen_value=kappa)


def schedule(df: Optional[DecoherenceFunction], steps: int, mode: str = "absolute", kappa=None) -> StepSchedule:
    """Build the per-step factors for ``steps`` walk steps.

    absolute:    kappa_j = kappa(j)
    incremental: kappa_j = kappa(j) / kappa(j-1), so the factors multiply up to
                 kappa(t); magnitudes are clamped to 1, and a step following a
                 zero of kappa gets full dephasing and is flagged.
    frozen:      kappa_j = ``kappa`` for every step (``df`` is ignored).
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if mode == "frozen":
        if kappa is None:
            raise ValueError("frozen mode needs a kappa value")
        return frozen(kappa, steps)
    if mode not in MODES:
        raise ValueError(f"unknown schedule mode {mode!r}")
    if df is None:
        raise ValueError(f"{mode} mode needs a decoherence function")
    if df.t_max < steps - 1e-9:
        raise ValueError(f"decoherence function covers t <= {df.t_max}, need {steps}")
    at_steps = np.array([df.at(float(j)) for j in range(steps + 1)], dtype=complex)
    if mode == "absolute":
        return StepSchedule("absolute", at_steps[1:])

    factors = np.empty(steps, dtype=complex)
    flagged = []
    for j in range(1, steps + 1):
        prev = at_steps[j - 1]
        if abs(prev) < SINGULAR_THRESHOLD:
            factors[j - 1] = 0.0
            flagged.append(j)
            continue
        ratio = at_steps[j] / prev
        if abs(ratio) > 1:
            ratio = ratio / abs(ratio)
        factors[j - 1] = ratio
    return StepSchedule("incremental", factors, flagged=tuple(flagged))

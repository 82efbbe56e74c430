"""Density-matrix evolution of the walker+coin system on a line.

Each step applies coin dephasing, the coin flip and the conditional shift

    F = S (x) |+1><+1| + S^dagger (x) |-1><-1|

to rho. Basis ordering is position-major, coin minor, with coin index 0 the
``+1`` (right-moving) state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from .channel import StepSchedule, frozen
from .core import (
    COIN_SHIFTS,
    DEFAULT_COIN,
    HADAMARD,
    InvariantError,
    LatticeOverflowError,
    check_unitary,
    coin_density,
)

TRACE_TOL = 1e-10
HERMITIAN_TOL = 1e-10
EIG_TOL = 1e-8


@dataclass(frozen=True)
class JointState:
    """Snapshot of rho(t) on the lattice ``-half_width .. half_width``.

    Only the light-cone block (positions ``-t .. t``) is stored; everything
    outside it is exactly zero. ``block`` has shape ``((2t+1)*2, (2t+1)*2)``.
    """

    t: int
    half_width: int
    block: np.ndarray

    def __post_init__(self):
        blk = np.asarray(self.block, dtype=complex)
        n = 2 * (2 * self.t + 1)
        if blk.shape != (n, n):
            raise ValueError(f"block must be {n}x{n} at t={self.t}, got {blk.shape}")
        if self.t > self.half_width:
            raise LatticeOverflowError("support exceeds the lattice")
        blk.setflags(write=False)
        object.__setattr__(self, "block", blk)

    @classmethod
    def initial(cls, coin=DEFAULT_COIN, half_width: int = 0) -> "JointState":
        """Walker at the origin holding ``coin`` (vector or 2x2 density)."""
        return cls(0, half_width, coin_density(coin))

    @property
    def positions(self) -> np.ndarray:
        return np.arange(-self.t, self.t + 1)

    @property
    def tensor(self) -> np.ndarray:
        """Block as ``rho[x, c, x', c']`` with x running over ``positions``."""
        m = 2 * self.t + 1
        return self.block.reshape(m, 2, m, 2)

    def matrix(self) -> np.ndarray:
        """Dense matrix on the full lattice, dimension ``(2 L + 1) * 2``."""
        big = 2 * (2 * self.half_width + 1)
        out = np.zeros((big, big), dtype=complex)
        lo = 2 * (self.half_width - self.t)
        hi = lo + self.block.shape[0]
        out[lo:hi, lo:hi] = self.block
        return out

    def active(self) -> tuple[np.ndarray, np.ndarray]:
        """Positions with x + t even and the matching sub-tensor of rho.

        All other entries vanish identically, so spectra and entropies can be
        computed on this smaller block.
        """
        idx = np.arange(0, 2 * self.t + 1, 2)
        sub = self.tensor[idx][:, :, idx]
        return self.positions[idx], sub

    def active_matrix(self) -> np.ndarray:
        _, sub = self.active()
        m = sub.shape[0]
        return sub.reshape(2 * m, 2 * m)

    def walker_reduced(self) -> np.ndarray:
        """rho_w on the active positions."""
        _, sub = self.active()
        return np.einsum("xcyc->xy", sub)

    def coin_reduced(self) -> np.ndarray:
        return np.einsum("xcxd->cd", self.tensor)

    def trace(self) -> complex:
        return complex(np.trace(self.block))

    def hermiticity_residual(self) -> float:
        return float(np.max(np.abs(self.block - self.block.conj().T)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.active_matrix()).min())

    def purity(self) -> float:
        a = self.active_matrix()
        return float(np.real(np.vdot(a, a)))

    def validate(self, check_positivity: bool = True) -> None:
        """Raise :class:`InvariantError` on a broken trace, hermiticity or positivity."""
        drift = abs(self.trace() - 1.0)
        if drift > TRACE_TOL:
            raise InvariantError(f"t={self.t}: trace drift {drift:.3e}")
        herm = self.hermiticity_residual()
        if herm > HERMITIAN_TOL:
            raise InvariantError(f"t={self.t}: hermiticity residual {herm:.3e}")
        if check_positivity:
            low = self.min_eigenvalue()
            if low < -EIG_TOL:
                raise InvariantError(f"t={self.t}: negative eigenvalue {low:.3e}")


def _dst_src(s: int):
    return (slice(1, None), slice(None, -1)) if s > 0 else (slice(None, -1), slice(1, None))


def step(state: JointState, kappa_j, coin_op=HADAMARD) -> JointState:
    """One walk step: dephase the coin by ``kappa_j``, flip it, shift the walker."""
    kappa_j = complex(kappa_j)
    if abs(kappa_j) > 1 + 1e-12:
        raise ValueError(f"|kappa_j| = {abs(kappa_j)} > 1")
    if state.t + 1 > state.half_width:
        raise LatticeOverflowError(
            f"step {state.t + 1} would leave the lattice of half-width {state.half_width}"
        )
    m = 2 * state.t + 3
    rho = np.zeros((m, 2, m, 2), dtype=complex)
    rho[1:-1, :, 1:-1, :] = state.tensor

    rho[:, 0, :, 1] *= np.conj(kappa_j)
    rho[:, 1, :, 0] *= kappa_j

    # Coin flip C rho C^dagger written out per 2x2 entry, then the shift as a
    # pure index move: coin c sends x -> x + COIN_SHIFTS[c].
    cbar = np.conj(coin_op)
    out = np.zeros_like(rho)
    for a, s in enumerate(COIN_SHIFTS):
        left = coin_op[a, 0] * rho[:, 0] + coin_op[a, 1] * rho[:, 1]
        dst_r, src_r = _dst_src(s)
        for c, sp in enumerate(COIN_SHIFTS):
            dst_c, src_c = _dst_src(sp)
            both = left[:, :, 0] * cbar[c, 0] + left[:, :, 1] * cbar[c, 1]
            out[dst_r, a, dst_c, c] = both[src_r, src_c]
    return JointState(state.t + 1, state.half_width, out.reshape(2 * m, 2 * m))


@dataclass(frozen=True)
class WalkConfig:
    steps: int
    initial_coin: np.ndarray = field(default_factory=lambda: DEFAULT_COIN.copy())
    coin_op: np.ndarray = field(default_factory=lambda: HADAMARD.copy())
    schedule: Optional[StepSchedule] = None

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError("steps must be non-negative")
        object.__setattr__(self, "initial_coin", coin_density(self.initial_coin))
        object.__setattr__(self, "coin_op", check_unitary(self.coin_op))
        if self.schedule is None:
            object.__setattr__(self, "schedule", frozen(1.0, self.steps))
        elif self.schedule.steps < self.steps:
            raise ValueError(f"schedule has {self.schedule.steps} factors, need {self.steps}")


def iter_evolve(config: WalkConfig, validate: bool = True, eig_every: int = 10) -> Iterator[JointState]:
    """Yield rho(0), rho(1), ..., rho(T).

    With ``validate`` the trace and hermiticity are checked every step and the
    spectrum every ``eig_every`` steps (``eig_every=0`` disables it).
    """
    state = JointState.initial(config.initial_coin, half_width=config.steps)
    yield state
    for j in range(config.steps):
        state = step(state, config.schedule[j], config.coin_op)
        if validate:
            state.validate(check_positivity=bool(eig_every) and state.t % eig_every == 0)
        yield state


def evolve(config: WalkConfig, validate: bool = True, eig_every: int = 10) -> list[JointState]:
    return list(iter_evolve(config, validate=validate, eig_every=eig_every))


@dataclass(frozen=True)
class PositionDistribution:
    """P(x; t) for x = -t .. t."""

    t: int
    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.shape != (2 * self.t + 1,):
            raise ValueError(f"expected {2 * self.t + 1} probabilities, got {p.shape}")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def x(self) -> np.ndarray:
        return np.arange(-self.t, self.t + 1)

    def moment(self, m: int) -> float:
        return moments(self, m)

    @property
    def mean(self) -> float:
        return moments(self, 1)

    @property
    def variance(self) -> float:
        return variance(self)

    @property
    def dispersion(self) -> float:
        return dispersion(self)

    def check(self) -> None:
        if abs(self.p.sum() - 1) > 1e-10:
            raise InvariantError(f"probabilities sum to {self.p.sum()!r}")
        if self.p.min() < -1e-12:
            raise InvariantError("negative probability")
        odd = (self.x + self.t) % 2 == 1
        if np.any(self.p[odd] != 0):
            raise InvariantError("probability on the wrong parity sublattice")


def position_distribution(state: JointState) -> PositionDistribution:
    """Trace out the coin and read the walker populations."""
    diag = np.real(np.diagonal(state.block))
    return PositionDistribution(state.t, diag[0::2] + diag[1::2])


def moments(dist: PositionDistribution, m: int) -> float:
    if m not in (1, 2):
        raise ValueError("only the first and second moments are supported")
    x = dist.x.astype(float)
    return float(np.dot(x**m, dist.p))


def variance(dist: PositionDistribution) -> float:
    mean = moments(dist, 1)
    return moments(dist, 2) - mean * mean


def dispersion(dist: PositionDistribution) -> float:
    return math.sqrt(max(variance(dist), 0.0))


def classical_rw_distribution(t: int) -> PositionDistribution:
    """Unbiased +-1 random walk after ``t`` steps: binomial on -t, -t+2, ..., t."""
    if t < 0:
        raise ValueError("t must be non-negative")
    p = np.zeros(2 * t + 1)
    for k in range(t + 1):
        p[2 * k] = math.comb(t, k) / 2.0**t
    return PositionDistribution(t, p)


def summary_rows(states) -> list[tuple[int, float, float]]:
    """``(t, mean, var)`` per state, for the summary CSV."""
    rows = []
    for s in states:
        d = position_distribution(s)
        rows.append((s.t, d.mean, d.variance))
    return rows


def distribution_rows(states) -> list[tuple[int, int, float]]:
    """``(t, x, p)`` rows for every position of every state."""
    rows = []
    for s in states:
        d = position_distribution(s)
        rows.extend((d.t, int(x), float(p)) for x, p in zip(d.x, d.p))
    return rows

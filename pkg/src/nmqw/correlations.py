"""Walker-coin correlations: mutual information, MID and quantum discord.

All entropies are in bits. Measurements act on the coin only: a basis is a
pair of orthogonal rank-1 projectors given by the Bloch angles of its first
vector. For a coin measurement the post-measurement mutual information has
the closed form

    I[Pi rho] = S(rho_w) - sum_k p_k S(rho_{w|k}),

so each basis costs two eigendecompositions of walker-sized matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
from scipy.optimize import minimize

from .walk import JointState

DEGENERACY_GAP = 1e-10


def _entropy_from_eigs(vals: np.ndarray) -> float:
    vals = vals[vals > 0]
    return float(-np.sum(vals * np.log2(vals)))


def von_neumann_entropy(rho) -> float:
    """-Tr rho log2 rho, clipping small negative eigenvalues to zero."""
    rho = np.asarray(rho, dtype=complex)
    tr = np.trace(rho).real
    if abs(tr - 1) > 1e-6:
        raise ValueError(f"density matrix trace {tr} deviates from 1")
    vals = np.linalg.eigvalsh(rho)
    if vals.min() < -1e-8:
        raise ValueError(f"density matrix has eigenvalue {vals.min():.3e} < -1e-8")
    return _entropy_from_eigs(np.clip(vals, 0, None))


def _unnormalised_entropy(sigma: np.ndarray) -> float:
    """p * S(sigma / p) for a positive matrix sigma of trace p."""
    vals = np.clip(np.linalg.eigvalsh(sigma), 0, None)
    p = vals.sum()
    if p <= 0:
        return 0.0
    return _entropy_from_eigs(vals) + p * math.log2(p)


@dataclass(frozen=True)
class MeasurementBasis:
    """Coin projectors onto (cos(theta/2), e^{i phi} sin(theta/2)) and its complement."""

    theta: float
    phi: float

    @classmethod
    def from_bloch(cls, n) -> "MeasurementBasis":
        n = np.asarray(n, dtype=float)
        norm = np.linalg.norm(n)
        if norm == 0:
            return cls(0.0, 0.0)
        n = n / norm
        theta = float(np.arccos(np.clip(n[2], -1, 1)))
        phi = float(np.arctan2(n[1], n[0]) % (2 * np.pi))
        return cls(theta, phi)

    @property
    def vectors(self) -> tuple[np.ndarray, np.ndarray]:
        c, s = math.cos(self.theta / 2), math.sin(self.theta / 2)
        e = complex(math.cos(self.phi), math.sin(self.phi))
        v0 = np.array([c, e * s])
        v1 = np.array([-np.conj(e) * s, c])
        return v0, v1

    @property
    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        v0, v1 = self.vectors
        return np.outer(v0, v0.conj()), np.outer(v1, v1.conj())

    def canonical(self) -> "MeasurementBasis":
        """Same angles folded into theta in [0, pi], phi in [0, 2 pi)."""
        st = math.sin(self.theta)
        return MeasurementBasis.from_bloch(
            [st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)]
        )


def walker_entropy(state: JointState) -> float:
    return von_neumann_entropy(state.walker_reduced())


def coin_entropy(state: JointState) -> float:
    return von_neumann_entropy(state.coin_reduced())


def joint_entropy(state: JointState) -> float:
    return von_neumann_entropy(state.active_matrix())


def mutual_information(state: JointState) -> float:
    """S(rho_w) + S(rho_c) - S(rho)."""
    return walker_entropy(state) + coin_entropy(state) - joint_entropy(state)


def measured_state(state: JointState, basis: MeasurementBasis) -> JointState:
    """sum_k (1 (x) Pi_k) rho (1 (x) Pi_k)."""
    rho = state.tensor
    out = np.zeros_like(rho)
    for proj in basis.projectors:
        out += np.einsum("ab,xbyd,dc->xayc", proj, rho, proj)
    m = rho.shape[0]
    return JointState(state.t, state.half_width, out.reshape(2 * m, 2 * m))


class _CoinMeasurement:
    """I[Pi rho] as a function of the coin basis angles, for one fixed state."""

    def __init__(self, state: JointState):
        _, sub = state.active()
        self.a = sub[:, 0, :, 0]
        self.b = sub[:, 0, :, 1]
        self.d = sub[:, 1, :, 1]
        self.rho_w = self.a + self.d
        self.s_w = _entropy_from_eigs(np.clip(np.linalg.eigvalsh(self.rho_w), 0, None))
        self.evaluations = 0

    def __call__(self, theta: float, phi: float) -> float:
        self.evaluations += 1
        c2 = math.cos(theta / 2) ** 2
        cs = 0.5 * math.sin(theta)
        off = cs * complex(math.cos(phi), math.sin(phi)) * self.b
        sigma0 = c2 * self.a + (1 - c2) * self.d + off + off.conj().T
        sigma1 = self.rho_w - sigma0
        return self.s_w - _unnormalised_entropy(sigma0) - _unnormalised_entropy(sigma1)


def classical_information(state: JointState, basis: MeasurementBasis) -> float:
    """Mutual information left after measuring the coin in ``basis``."""
    return _CoinMeasurement(state)(basis.theta, basis.phi)


def coin_eigenbasis(state: JointState) -> tuple[MeasurementBasis, bool]:
    """Eigenbasis of rho_c and whether its spectrum is degenerate."""
    rho_c = state.coin_reduced()
    n = np.array(
        [2 * rho_c[1, 0].real, 2 * rho_c[1, 0].imag, (rho_c[0, 0] - rho_c[1, 1]).real]
    )
    gap = float(np.linalg.norm(n))
    return MeasurementBasis.from_bloch(n), gap < DEGENERACY_GAP


@dataclass(frozen=True)
class DiscordOptions:
    n_theta: int = 32
    n_phi: int = 64
    xatol: float = 1e-4
    fatol: float = 1e-12
    max_iter: int = 400


@dataclass(frozen=True)
class DiscordResult:
    value: float
    theta: float
    phi: float
    classical: float
    converged: bool

    def __iter__(self):
        # Allows ``value, (theta, phi) = discord(...)``.
        return iter((self.value, (self.theta, self.phi)))


def _maximise_classical(
    objective: _CoinMeasurement,
    opts: DiscordOptions,
    seeds: Iterable[MeasurementBasis] = (),
) -> tuple[float, MeasurementBasis, bool]:
    # n and -n are the same measurement, so the upper hemisphere covers every basis.
    thetas = np.linspace(0.0, np.pi / 2, opts.n_theta) if opts.n_theta > 1 else np.array([0.0])
    phis = 2 * np.pi * np.arange(opts.n_phi) / max(opts.n_phi, 1)
    best_val = -np.inf
    best = MeasurementBasis(0.0, 0.0)
    candidates = [MeasurementBasis(th, ph) for th in thetas for ph in (phis if th > 0 else phis[:1])]
    candidates.extend(seeds)
    for cand in candidates:
        val = objective(cand.theta, cand.phi)
        if val > best_val:
            best_val, best = val, cand

    res = minimize(
        lambda v: -objective(v[0], v[1]),
        np.array([best.theta, best.phi]),
        method="Nelder-Mead",
        options={
            "xatol": opts.xatol,
            "fatol": opts.fatol,
            "maxiter": opts.max_iter,
            "initial_simplex": _initial_simplex(best, opts),
        },
    )
    refined = -float(res.fun)
    if refined >= best_val:
        best_val, best = refined, MeasurementBasis(float(res.x[0]), float(res.x[1]))
    return best_val, best.canonical(), bool(res.success)


def _initial_simplex(start: MeasurementBasis, opts: DiscordOptions) -> np.ndarray:
    h_theta = np.pi / 2 / max(opts.n_theta - 1, 1) / 2
    h_phi = np.pi / max(opts.n_phi, 1)
    x0 = np.array([start.theta, start.phi])
    return np.array([x0, x0 + [h_theta, 0.0], x0 + [0.0, h_phi]])


def discord(
    state: JointState,
    opts: Optional[DiscordOptions] = None,
    seed: Optional[MeasurementBasis] = None,
) -> DiscordResult:
    """I[rho] - sup over coin bases of I[Pi rho].

    The supremum comes from a (theta, phi) grid, the coin eigenbasis and the
    optional ``seed``, polished by Nelder-Mead. Only evaluated points are
    reported, so the returned classical value is attained and the discord is
    never under-estimated by the optimiser itself. ``converged`` is False
    when the simplex run did not meet its tolerance; the best point seen is
    still returned.
    """
    opts = opts or DiscordOptions()
    objective = _CoinMeasurement(state)
    eig_basis, _ = coin_eigenbasis(state)
    seeds = [eig_basis] + ([seed] if seed is not None else [])
    classical, basis, converged = _maximise_classical(objective, opts, seeds)
    total = mutual_information(state)
    return DiscordResult(total - classical, basis.theta, basis.phi, classical, converged)


def _two_sided_classical(state: JointState, coin_basis: MeasurementBasis) -> float:
    """Classical mutual information after measuring both walker and coin in their eigenbases."""
    _, w_vecs = np.linalg.eigh(state.walker_reduced())
    _, sub = state.active()
    c_vecs = np.stack(coin_basis.vectors, axis=1)
    # p(i, k) = <w_i, pi_k| rho |w_i, pi_k>
    joint = np.zeros((w_vecs.shape[1], 2))
    for k in range(2):
        pk = c_vecs[:, k]
        sigma = np.einsum("c,xcyd,d->xy", pk.conj(), sub, pk)
        joint[:, k] = np.real(np.einsum("xi,xy,yi->i", w_vecs.conj(), sigma, w_vecs))
    joint = np.clip(joint, 0, None)
    pw, pc = joint.sum(1), joint.sum(0)

    def h(p):
        p = p[p > 0]
        return float(-np.sum(p * np.log2(p)))

    return h(pw) + h(pc) - h(joint.ravel())


@dataclass(frozen=True)
class MIDResult:
    value: float
    basis: MeasurementBasis
    degenerate: bool


def mid_details(
    state: JointState,
    two_sided: bool = False,
    opts: Optional[DiscordOptions] = None,
) -> MIDResult:
    """MID with the measurement basis used and the degeneracy flag.

    The coin is measured in the eigenbasis of rho_c. When that spectrum is
    degenerate every basis is an eigenbasis; the loss of mutual information
    is then minimised over all of them with the discord optimiser, and the
    result is flagged.
    """
    total = mutual_information(state)
    basis, degenerate = coin_eigenbasis(state)
    if degenerate:
        objective = _CoinMeasurement(state)
        classical, basis, _ = _maximise_classical(objective, opts or DiscordOptions())
        if two_sided:
            classical = _two_sided_classical(state, basis)
    elif two_sided:
        classical = _two_sided_classical(state, basis)
    else:
        classical = classical_information(state, basis)
    return MIDResult(float(total - classical), basis, degenerate)


def mid(state: JointState, two_sided: bool = False, opts: Optional[DiscordOptions] = None) -> float:
    """Measurement-induced disturbance I[rho] - I[Pi rho] in bits."""
    return mid_details(state, two_sided=two_sided, opts=opts).value


@dataclass(frozen=True)
class CorrelationRecord:
    t: int
    mutual_info: float
    mid: float
    qd: float
    qd_theta: float
    qd_phi: float
    degenerate: bool = False
    converged: bool = True


def correlation_record(
    state: JointState,
    opts: Optional[DiscordOptions] = None,
    seed: Optional[MeasurementBasis] = None,
    two_sided: bool = False,
) -> CorrelationRecord:
    opts = opts or DiscordOptions()
    total = mutual_information(state)
    d = discord(state, opts, seed=seed)
    _, degenerate = coin_eigenbasis(state)
    if degenerate and not two_sided:
        # Any basis is an eigenbasis: the MID minimisation is the discord search.
        mid_value = d.value
    else:
        mid_value = mid_details(state, two_sided=two_sided, opts=opts).value
    return CorrelationRecord(state.t, total, mid_value, d.value, d.theta, d.phi, degenerate, d.converged)


def correlation_trajectory(
    states: Iterable[JointState],
    opts: Optional[DiscordOptions] = None,
    chain_seeds: bool = True,
    two_sided: bool = False,
) -> list[CorrelationRecord]:
    """One record per state; each discord search is seeded with the previous argmax."""
    records = []
    seed = None
    for state in states:
        rec = correlation_record(state, opts, seed=seed, two_sided=two_sided)
        records.append(rec)
        if chain_seeds:
            seed = MeasurementBasis(rec.qd_theta, rec.qd_phi)
    return records


def record_rows(records: Iterable[CorrelationRecord]) -> list[tuple]:
    """Rows ``t, mutual_info, mid, qd, qd_theta, qd_phi, degenerate_flag``."""
    return [
        (r.t, r.mutual_info, r.mid, r.qd, r.qd_theta, r.qd_phi, int(r.degenerate))
        for r in records
    ]

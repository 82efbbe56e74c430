"""Shared constants, coin-state helpers and error types."""

from __future__ import annotations

import numpy as np

#: Coin basis ordering used everywhere: index 0 is the ``+1`` coin state
#: (walker steps right), index 1 is the ``-1`` coin state (walker steps left).
COIN_SHIFTS = (1, -1)

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)

#: (|+1> + i|-1>)/sqrt(2), the symmetric starting coin.
DEFAULT_COIN = np.array([1.0, 1.0j]) / np.sqrt(2.0)


class InvariantError(ArithmeticError):
    """A numerical invariant (trace, hermiticity, positivity, ...) was violated."""


class LatticeOverflowError(ValueError):
    """A step would push support past the edge of the position lattice."""


def coin_density(coin) -> np.ndarray:
    """Return a validated 2x2 coin density matrix.

    ``coin`` may be a length-2 state vector (normalised here) or a 2x2
    density matrix.
    """
    arr = np.asarray(coin, dtype=complex)
    if arr.shape == (2,):
        norm = np.linalg.norm(arr)
        if norm == 0:
            raise ValueError("coin vector must be non-zero")
        arr = arr / norm
        return np.outer(arr, arr.conj())
    if arr.shape != (2, 2):
        raise ValueError(f"coin must be a 2-vector or 2x2 matrix, got shape {arr.shape}")
    check_density(arr, tol=1e-12)
    return arr.copy()


def check_density(rho: np.ndarray, tol: float = 1e-12, eig_tol: float = 1e-10) -> None:
    """Raise ``ValueError`` unless ``rho`` is a unit-trace positive Hermitian matrix."""
    if abs(np.trace(rho) - 1.0) > tol:
        raise ValueError(f"trace deviates from 1 by {abs(np.trace(rho) - 1.0):.3e}")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValueError("matrix is not Hermitian")
    if np.linalg.eigvalsh(rho).min() < -eig_tol:
        raise ValueError("matrix has negative eigenvalues")


def bloch_components(rho: np.ndarray) -> tuple[float, float, float]:
    """Pauli components ``(Tr rho X, Tr rho Y, Tr rho Z)`` of a coin density matrix."""
    return (
        float(np.real(np.trace(rho @ PAULI_X))),
        float(np.real(np.trace(rho @ PAULI_Y))),
        float(np.real(np.trace(rho @ PAULI_Z))),
    )


def check_unitary(u: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ValueError("coin operator must be 2x2")
    if np.max(np.abs(u.conj().T @ u - IDENTITY2)) > tol:
        raise ValueError("coin operator is not unitary")
    return u

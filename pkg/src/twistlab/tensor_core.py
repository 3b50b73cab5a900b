"""Dense complex linear algebra, tensor-leg plumbing and spectral calculus.

Flattening convention: tensor indices are flattened lexicographically with the
leftmost factor most significant, which is what ``numpy.kron`` and
``reshape((d,) * n)`` both produce. Leg 1 is axis 0.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError

SA_TOL = 1e-10
KERNEL_REL = 1e-9


def as_matrix(A, name: str = "matrix") -> np.ndarray:
    """Return ``A`` as a finite complex 2-d array, rejecting NaN/Inf."""
    M = np.array(A, dtype=complex)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2:
        raise ValidationError(f"{name} must be 2-d, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValidationError(f"{name} has non-finite entries")
    return M


def as_vector(v, name: str = "vector") -> np.ndarray:
    x = np.array(v, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(x)):
        raise ValidationError(f"{name} has non-finite entries")
    return x


def opnorm(A) -> float:
    """Operator 2-norm (largest singular value)."""
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def kron(*mats) -> np.ndarray:
    """Kronecker product of any number of matrices, left factor most significant."""
    out = np.ones((1, 1), dtype=complex)
    for M in mats:
        out = np.kron(out, M)
    return out


def kron_power(A, n: int) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim == 1:
        out = np.ones(1, dtype=complex)
    else:
        out = np.ones((1, 1), dtype=complex)
    for _ in range(n):
        out = np.kron(out, A)
    return out


def flip(d: int) -> np.ndarray:
    """The tensor flip F(u ⊗ v) = v ⊗ u on C^d ⊗ C^d."""
    F = np.zeros((d * d, d * d), dtype=complex)
    for a in range(d):
        for b in range(d):
            F[b * d + a, a * d + b] = 1.0
    return F


def leg_embed(T, k: int, n: int, d: int) -> np.ndarray:
    """Embed a two-leg operator as ``1^{k-1} ⊗ T ⊗ 1^{n-k-1}`` (legs 1-based)."""
    T = np.asarray(T, dtype=complex)
    if T.shape != (d * d, d * d):
        raise ValidationError(f"T must be {d * d}x{d * d}, got {T.shape}")
    if not 1 <= k <= n - 1:
        raise ValidationError(f"leg index k={k} out of range for n={n}")
    return kron(np.eye(d ** (k - 1)), T, np.eye(d ** (n - k - 1)))


def reverse_legs(n: int, d: int) -> np.ndarray:
    """Permutation matrix Y(v1 ⊗ ... ⊗ vn) = vn ⊗ ... ⊗ v1."""
    dim = d ** n
    idx = np.arange(dim).reshape((d,) * n)
    perm = np.transpose(idx, tuple(range(n - 1, -1, -1))).reshape(-1)
    Y = np.zeros((dim, dim), dtype=complex)
    Y[np.arange(dim), perm] = 1.0
    return Y


def selfadjoint_residual(A) -> float:
    A = np.asarray(A)
    return opnorm(A - A.conj().T)


def check_selfadjoint(A, tol: float = SA_TOL, name: str = "matrix") -> np.ndarray:
    A = as_matrix(A, name)
    if A.shape[0] != A.shape[1]:
        raise ValidationError(f"{name} is not square")
    r = selfadjoint_residual(A)
    if r > tol * (1.0 + opnorm(A)):
        raise ValidationError(f"{name} is not self-adjoint (residual {r:.3e})")
    return A


@dataclass(frozen=True)
class Spectrum:
    """Eigen-decomposition of a self-adjoint matrix, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenbasis: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def matrix(self) -> np.ndarray:
        U = self.eigenbasis
        return (U * self.eigenvalues) @ U.conj().T

    def kernel_threshold(self, rel: float = KERNEL_REL) -> float:
        scale = max(float(np.max(np.abs(self.eigenvalues), initial=0.0)), 1.0)
        return rel * scale

    def kernel_mask(self, rel: float = KERNEL_REL) -> np.ndarray:
        return self.eigenvalues <= self.kernel_threshold(rel)


@dataclass(frozen=True)
class PositiveSpectral(Spectrum):
    """Spectral data of a strictly positive matrix (modular operators)."""

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        if ev.ndim != 1 or np.any(ev <= 0) or not np.all(np.isfinite(ev)):
            raise ValidationError("PositiveSpectral needs strictly positive eigenvalues")
        U = np.asarray(self.eigenbasis, dtype=complex)
        if U.shape != (len(ev), len(ev)):
            raise ValidationError("eigenbasis shape does not match eigenvalues")
        if opnorm(U.conj().T @ U - np.eye(len(ev))) > 1e-10:
            raise ValidationError("eigenbasis is not unitary")
        order = np.argsort(ev, kind="stable")
        object.__setattr__(self, "eigenvalues", ev[order])
        object.__setattr__(self, "eigenbasis", U[:, order])

    def power(self, z: complex) -> np.ndarray:
        return spectral_power(self, z)

    def inverse(self) -> "PositiveSpectral":
        return PositiveSpectral(1.0 / self.eigenvalues, self.eigenbasis)


def positive_spectral(eigenvalues, basis=None) -> PositiveSpectral:
    ev = np.asarray(eigenvalues, dtype=float)
    U = np.eye(len(ev), dtype=complex) if basis is None else as_matrix(basis, "delta_basis")
    return PositiveSpectral(ev, U)


def spectral_power(D: PositiveSpectral, z: complex) -> np.ndarray:
    """Return D^z = Σ λ_k^z P_k, entire in z."""
    if np.any(np.asarray(D.eigenvalues) <= 0):
        raise ValidationError("spectral_power needs positive eigenvalues")
    w = np.exp(complex(z) * np.log(D.eigenvalues))
    U = D.eigenbasis
    return (U * w) @ U.conj().T


def herm_eig(A, tol: float = SA_TOL) -> Spectrum:
    """Eigen-decomposition of a self-adjoint matrix; rejects non-self-adjoint input."""
    A = check_selfadjoint(A, tol)
    H = 0.5 * (A + A.conj().T)
    ev, U = np.linalg.eigh(H)
    return Spectrum(ev, U)


def trace_norm(A) -> float:
    A = np.asarray(A, dtype=complex)
    if A.size == 0:
        return 0.0
    return float(np.sum(np.linalg.svd(A, compute_uv=False)))


def matrix_to_json(A) -> dict:
    A = as_matrix(A)
    return {
        "rows": int(A.shape[0]),
        "cols": int(A.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in A.reshape(-1)],
    }


def matrix_from_json(obj) -> np.ndarray:
    try:
        r, c = int(obj["rows"]), int(obj["cols"])
        data = np.asarray(obj["data"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed matrix object: {exc}") from exc
    if data.shape != (r * c, 2):
        raise ValidationError(f"matrix data has shape {data.shape}, expected {(r * c, 2)}")
    return as_matrix((data[:, 0] + 1j * data[:, 1]).reshape(r, c))


def load_matrix(path) -> np.ndarray:
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read matrix file {path}: {exc}") from exc
    return matrix_from_json(obj)


def save_matrix(path, A) -> None:
    Path(path).write_text(json.dumps(matrix_to_json(A)))

"""Finite-dimensional standard subspaces built from modular data (Δ, J).

An antilinear map is stored as a matrix ``U`` acting by ``v -> U @ conj(v)``.
Composition rules (all centralised here):

* antilinear(U) ∘ linear(M)      = antilinear(U @ conj(M))
* linear(M) ∘ antilinear(U)      = antilinear(M @ U)
* antilinear(U) ∘ antilinear(W)  = linear(U @ conj(W))
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .tensor_core import (
    PositiveSpectral,
    as_matrix,
    as_vector,
    kron,
    kron_power,
    load_matrix,
    matrix_from_json,
    opnorm,
    positive_spectral,
    spectral_power,
)

TOL = 1e-10


@dataclass(frozen=True)
class AntilinearMap:
    """v -> unitary_part @ conj(v)."""

    unitary_part: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "unitary_part", as_matrix(self.unitary_part, "antilinear matrix"))

    @property
    def dim(self) -> int:
        return self.unitary_part.shape[0]

    def __call__(self, v) -> np.ndarray:
        return self.unitary_part @ np.conj(v)

    def after_linear(self, M) -> "AntilinearMap":
        """self ∘ M."""
        return AntilinearMap(self.unitary_part @ np.conj(M))

    def before_linear(self, M) -> "AntilinearMap":
        """M ∘ self."""
        return AntilinearMap(np.asarray(M) @ self.unitary_part)

    def after_antilinear(self, other: "AntilinearMap") -> np.ndarray:
        """self ∘ other, a linear matrix."""
        return self.unitary_part @ np.conj(other.unitary_part)

    def conjugate_linear(self, M) -> np.ndarray:
        """self ∘ M ∘ self^{-1} as a linear matrix."""
        return self.unitary_part @ np.conj(M) @ np.conj(self.inverse().unitary_part)

    def inverse(self) -> "AntilinearMap":
        return AntilinearMap(np.conj(np.linalg.inv(self.unitary_part)))

    def adjoint(self) -> "AntilinearMap":
        """The antilinear adjoint: ⟨A*x, y⟩ = conj⟨x, Ay⟩."""
        return AntilinearMap(self.unitary_part.T)

    def kron(self, other: "AntilinearMap") -> "AntilinearMap":
        return AntilinearMap(kron(self.unitary_part, other.unitary_part))

    def power(self, n: int) -> "AntilinearMap":
        return AntilinearMap(kron_power(self.unitary_part, n))

    def involution_residual(self) -> float:
        return opnorm(self.after_antilinear(self) - np.eye(self.dim))


def conjugation(d: int) -> AntilinearMap:
    return AntilinearMap(np.eye(d, dtype=complex))


def swap_conjugation(d: int) -> AntilinearMap:
    """Conjugation composed with the basis reversal e_k -> e_{d+1-k}."""
    return AntilinearMap(np.eye(d, dtype=complex)[::-1])


@dataclass(frozen=True)
class StandardSubspace:
    """Standard subspace H ⊂ C^d with modular data Δ_H and J_H."""

    delta: PositiveSpectral
    j: AntilinearMap
    tomita: AntilinearMap = field(repr=False)
    real_basis: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.delta.dim

    def delta_power(self, z: complex) -> np.ndarray:
        return spectral_power(self.delta, z)

    @property
    def delta_matrix(self) -> np.ndarray:
        return self.delta.matrix()

    def basis_vectors(self) -> list[np.ndarray]:
        return [self.real_basis[:, k] for k in range(self.real_basis.shape[1])]


def _real_form(U: np.ndarray) -> np.ndarray:
    """Real 2d x 2d matrix of v -> U conj(v) in coordinates (Re v, Im v)."""
    A, B = U.real, U.imag
    return np.block([[A, B], [B, -A]])


def fixed_space(S: AntilinearMap) -> np.ndarray:
    """Columns spanning {v : Sv = v} over R, orthonormal for Re⟨·,·⟩."""
    d = S.dim
    R = _real_form(S.unitary_part)
    _, s, Vh = np.linalg.svd(R - np.eye(2 * d))
    scale = max(1.0, float(s[0]))
    null = Vh[s <= 1e-9 * scale].T
    return null[:d] + 1j * null[d:]


def modular_relation_residual(delta: PositiveSpectral, j: AntilinearMap) -> float:
    """‖J Δ J - Δ^{-1}‖."""
    D = delta.matrix()
    JDJ = j.conjugate_linear(D)
    return opnorm(JDJ - delta.inverse().matrix())


def make_standard(delta: PositiveSpectral, j: AntilinearMap, tol: float = TOL) -> StandardSubspace:
    """Construct H from (Δ, J), validating the involution and modular relation."""
    if j.dim != delta.dim:
        raise ValidationError("dimension mismatch between delta and j")
    r_inv = j.involution_residual()
    if r_inv > tol * (1 + opnorm(j.unitary_part)):
        raise ValidationError(f"J is not an involution (residual {r_inv:.3e})")
    scale = 1 + opnorm(delta.matrix()) + opnorm(delta.inverse().matrix())
    r_mod = modular_relation_residual(delta, j)
    if r_mod > tol * scale:
        raise ValidationError(f"modular relation JΔJ = Δ^-1 violated (residual {r_mod:.3e})")
    tomita = j.after_linear(spectral_power(delta, 0.5))
    basis = fixed_space(tomita)
    if basis.shape[1] != delta.dim:
        raise ValidationError(f"fix(S) has real dimension {basis.shape[1]}, expected {delta.dim}")
    return StandardSubspace(delta, j, tomita, basis)


def symplectic_complement(H: StandardSubspace) -> StandardSubspace:
    """H' with Δ_{H'} = Δ_H^{-1} and the same J."""
    return make_standard(H.delta.inverse(), H.j)


def symplectic_residual(H: StandardSubspace, K: StandardSubspace) -> float:
    """max |Im⟨h, k⟩| over real bases of H and K."""
    G = H.real_basis.conj().T @ K.real_basis
    return float(np.max(np.abs(G.imag), initial=0.0))


def tensor_power(H: StandardSubspace, n: int):
    """Return (S_H^{⊗n}, Δ_H^{⊗n}, J_H^{⊗n})."""
    if n < 1:
        raise ValidationError("tensor_power needs n >= 1")
    ev = kron_power(H.delta.eigenvalues.astype(complex), n).real
    basis = kron_power(H.delta.eigenbasis, n)
    return H.tomita.power(n), PositiveSpectral(ev, basis), H.j.power(n)


def in_subspace(H: StandardSubspace, v) -> float:
    """‖S_H v - v‖; zero exactly on H."""
    v = as_vector(v)
    if v.shape[0] != H.dim:
        raise ValidationError("dimension mismatch")
    return float(np.linalg.norm(H.tomita(v) - v))


def rotate(H: StandardSubspace, V) -> StandardSubspace:
    """The image V·H for unitary V: Δ -> VΔV*, J -> VJV*."""
    V = as_matrix(V)
    delta = PositiveSpectral(H.delta.eigenvalues, V @ H.delta.eigenbasis)
    j = AntilinearMap(V @ H.j.unitary_part @ V.T)
    return make_standard(delta, j)


def diagonal_subspace(eigenvalues, j: AntilinearMap | None = None) -> StandardSubspace:
    ev = np.asarray(eigenvalues, dtype=float)
    if j is None:
        j = swap_conjugation(len(ev))
    return make_standard(positive_spectral(ev), j)


def generic_subspace(lam: float, V=None) -> StandardSubspace:
    """d=2 subspace with Δ = V diag(λ, 1/λ) V* and J = V (swap∘conj) V*."""
    H = diagonal_subspace([lam, 1.0 / lam])
    return H if V is None else rotate(H, V)


def subspace_from_spec(obj: dict, base_dir=None) -> StandardSubspace:
    """Parse {"dim", "delta_eigenvalues", "delta_basis", "j": {"kind", "matrix"}}."""
    try:
        d = int(obj["dim"])
        ev = np.asarray(obj["delta_eigenvalues"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"bad subspace spec: {exc}") from exc
    if ev.shape != (d,):
        raise ValidationError("delta_eigenvalues length must equal dim")
    basis = _matrix_field(obj.get("delta_basis", "identity"), d, base_dir)
    jspec = obj.get("j", {"kind": "conjugation"})
    kind = jspec.get("kind", "conjugation") if isinstance(jspec, dict) else jspec
    if kind == "conjugation":
        j = conjugation(d)
    elif kind == "swap_conjugation":
        j = swap_conjugation(d)
    elif kind == "matrix":
        j = AntilinearMap(_matrix_field(jspec.get("matrix"), d, base_dir))
    else:
        raise ValidationError(f"unknown j kind {kind!r}")
    return make_standard(positive_spectral(ev, basis), j)


def _matrix_field(value, d: int, base_dir) -> np.ndarray:
    if value is None:
        raise ValidationError("missing matrix")
    if isinstance(value, str):
        if value == "identity":
            return np.eye(d, dtype=complex)
        p = Path(value)
        if base_dir is not None and not p.is_absolute():
            p = Path(base_dir) / p
        M = load_matrix(p)
    elif isinstance(value, dict):
        M = matrix_from_json(value)
    else:
        M = as_matrix(value)
    if M.shape != (d, d):
        raise ValidationError(f"matrix has shape {M.shape}, expected {(d, d)}")
    return M

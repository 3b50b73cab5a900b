"""Twists: validation, positivity classification, and relations with a standard subspace."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import GuardError, PreconditionError, ValidationError
from .standard_subspace import AntilinearMap, StandardSubspace
from .tensor_core import (
    KERNEL_REL,
    SA_TOL,
    as_matrix,
    as_vector,
    check_selfadjoint,
    flip,
    herm_eig,
    kron,
    leg_embed,
    opnorm,
)

AMBIENT_GUARD = 20_000
DEFAULT_T_GRID = tuple(np.concatenate([np.linspace(-2.0, 2.0, 16), [0.0]]))
NORM_TOL = 1e-10


@dataclass(frozen=True)
class Twist:
    """A self-adjoint d²×d² matrix with ‖T‖ ≤ 1, validated at construction."""

    d: int
    matrix: np.ndarray = field(repr=False)
    label: str = "matrix"

    def __post_init__(self):
        M = as_matrix(self.matrix, "twist")
        if M.shape != (self.d ** 2, self.d ** 2):
            raise ValidationError(f"twist must be {self.d ** 2}x{self.d ** 2}, got {M.shape}")
        M = check_selfadjoint(M, SA_TOL, "twist")
        if opnorm(M) > 1 + NORM_TOL:
            raise ValidationError(f"twist norm {opnorm(M):.6g} exceeds 1")
        object.__setattr__(self, "matrix", M)

    @cached_property
    def norm(self) -> float:
        return opnorm(self.matrix)

    @cached_property
    def selfadjoint_residual(self) -> float:
        return opnorm(self.matrix - self.matrix.conj().T)

    @cached_property
    def ybe_residual(self) -> float:
        return ybe_residual(self)

    @property
    def braided(self) -> bool:
        return self.ybe_residual <= 1e-10

    def leg(self, k: int, n: int) -> np.ndarray:
        return leg_embed(self.matrix, k, n, self.d)


# --- recursion for R_n, R~_n, P_n ------------------------------------------

def r_operator(T: Twist, n: int) -> np.ndarray:
    """R_n = 1 + T_1 + T_1T_2 + ... + T_1⋯T_{n-1} on n legs."""
    dim = T.d ** n
    out = np.eye(dim, dtype=complex)
    prod = np.eye(dim, dtype=complex)
    for k in range(1, n):
        prod = prod @ T.leg(k, n)
        out = out + prod
    return out


def r_tilde_operator(T: Twist, n: int) -> np.ndarray:
    """R~_n = 1 + T_{n-1} + T_{n-1}T_{n-2} + ... + T_{n-1}⋯T_1 on n legs."""
    dim = T.d ** n
    out = np.eye(dim, dtype=complex)
    prod = np.eye(dim, dtype=complex)
    for k in range(n - 1, 0, -1):
        prod = prod @ T.leg(k, n)
        out = out + prod
    return out


def p_operators(T: Twist, n_max: int) -> list[np.ndarray]:
    """[P_0, ..., P_{n_max}] via P_1 = 1, P_{n+1} = (1 ⊗ P_n) R_{n+1}."""
    guard_ambient(T.d, n_max)
    Ps = [np.ones((1, 1), dtype=complex), np.eye(T.d, dtype=complex)]
    for n in range(1, n_max):
        Ps.append(kron(np.eye(T.d), Ps[n]) @ r_operator(T, n + 1))
    return Ps[: n_max + 1]


def guard_ambient(d: int, n: int, limit: int = AMBIENT_GUARD) -> None:
    if d ** n > limit:
        raise GuardError(f"ambient dimension {d}^{n} = {d ** n} exceeds guard {limit}")


# --- classification ----------------------------------------------------------

@dataclass(frozen=True)
class LevelInfo:
    n: int
    min_eigenvalue: float
    kernel_dim: int


@dataclass(frozen=True)
class PositivityReport:
    levels: tuple[LevelInfo, ...]
    verdict: str  # strict | nonstrict | not_twist_up_to_cutoff
    tags: tuple[str, ...]
    n_max: int

    def as_dict(self) -> dict:
        return {
            "n_max": self.n_max,
            "verdict": self.verdict,
            "qualifier": "up to cutoff",
            "tags": list(self.tags),
            "levels": [
                {"n": L.n, "min_eigenvalue": L.min_eigenvalue, "kernel_dim": L.kernel_dim}
                for L in self.levels
            ],
        }


def classify(T: Twist, n_max: int = 5) -> PositivityReport:
    """Positivity of P_n for n ≤ n_max plus tags for the known sufficient conditions."""
    if n_max < 2:
        raise ValidationError("classify needs n_max >= 2")
    guard_ambient(T.d, n_max)
    Ps = p_operators(T, n_max)
    levels = []
    negative = False
    kernel = False
    for n in range(1, n_max + 1):
        spec = herm_eig(Ps[n])
        thr = spec.kernel_threshold(KERNEL_REL)
        kdim = int(np.sum(np.abs(spec.eigenvalues) <= thr))
        if spec.eigenvalues[0] < -thr:
            negative = True
        if kdim:
            kernel = True
        levels.append(LevelInfo(n, float(spec.eigenvalues[0]), kdim))
    verdict = "not_twist_up_to_cutoff" if negative else ("nonstrict" if kernel else "strict")
    return PositivityReport(tuple(levels), verdict, class_tags(T), n_max)


def class_tags(T: Twist) -> tuple[str, ...]:
    tags = []
    if T.norm <= 0.5 + NORM_TOL:
        tags.append("small_norm")
    if np.linalg.eigvalsh(0.5 * (T.matrix + T.matrix.conj().T))[0] >= -1e-10:
        tags.append("positive")
    if T.braided:
        tags.append("braided")
        if T.norm < 1 - NORM_TOL:
            tags.append("strict_braided")
        if opnorm(T.matrix @ T.matrix - np.eye(T.d ** 2)) <= 1e-10:
            tags.append("symmetric")
    return tuple(tags)


# --- residuals ---------------------------------------------------------------

def ybe_residual(T: Twist, order: str = "121") -> float:
    """‖T1T2T1 - T2T1T2‖ (order="212" evaluates the mirrored difference)."""
    T1, T2 = T.leg(1, 3), T.leg(2, 3)
    a, b = T1 @ T2 @ T1, T2 @ T1 @ T2
    return opnorm(a - b) if order == "121" else opnorm(b - a)


def _check_dims(T: Twist, H: StandardSubspace) -> None:
    if T.d != H.dim:
        raise ValidationError(f"twist dimension {T.d} does not match subspace dimension {H.dim}")


def compatibility_residual(T: Twist, H: StandardSubspace) -> float:
    """‖[Δ⊗Δ, T]‖."""
    _check_dims(T, H)
    DD = kron(H.delta_matrix, H.delta_matrix)
    return opnorm(DD @ T.matrix - T.matrix @ DD)


def crossing_matrices(T: Twist, H: StandardSubspace, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Boundary matrices (LHS(t), RHS(t)) of the crossing identity, indexed [(a,b),(c,e)]."""
    d = T.d
    I = np.eye(d)
    Dit, Dmit = H.delta_power(1j * t), H.delta_power(-1j * t)
    lhs = kron(Dit @ H.delta_power(-0.5), I) @ T.matrix @ kron(I, H.delta_power(0.5) @ Dmit)
    M = kron(I, Dit) @ T.matrix @ kron(Dmit, I)
    U = H.j.unitary_part
    # RHS[(a,b),(c,e)] = ⟨e_b ⊗ J e_e, M (J e_a ⊗ e_c)⟩ with J e_k = U[:, k]
    M4 = M.reshape(d, d, d, d)  # [p, q, r, s] = ⟨e_p⊗e_q, M e_r⊗e_s⟩
    rhs = np.einsum("qe,bqrc,ra->abce", U.conj(), M4, U).reshape(d * d, d * d)
    return lhs, rhs


def crossing_residual(T: Twist, H: StandardSubspace, t_samples=DEFAULT_T_GRID) -> float:
    _check_dims(T, H)
    res = 0.0
    for t in t_samples:
        lhs, rhs = crossing_matrices(T, H, float(t))
        res = max(res, float(np.max(np.abs(lhs - rhs))))
    return res


def j_flip_residual(T: Twist, H: StandardSubspace) -> float:
    """‖FTF - (J⊗J)T(J⊗J)‖."""
    _check_dims(T, H)
    F = flip(T.d)
    JJ = H.j.kron(H.j)
    return opnorm(F @ T.matrix @ F - JJ.conjugate_linear(T.matrix))


def left_right_obstruction(T: Twist) -> float:
    """‖(1+T)(1-F)‖."""
    I = np.eye(T.d ** 2)
    return opnorm((I + T.matrix) @ (I - flip(T.d)))


def twist_at(T: Twist, H: StandardSubspace, z: complex) -> np.ndarray:
    """T(z) = (Δ^{iz} ⊗ 1) T (1 ⊗ Δ^{-iz})."""
    I = np.eye(T.d)
    return kron(H.delta_power(1j * z), I) @ T.matrix @ kron(I, H.delta_power(-1j * z))


def _legs(M: np.ndarray, k: int, n: int, d: int) -> np.ndarray:
    return leg_embed(M, k, n, d)


def n_crossing_deviation(T: Twist, H: StandardSubspace, xi, Psi, Phi, xi2, t: float, n: int | None = None) -> float:
    """|f(t+i/2) - ⟨Ψ⊗Jξ', T(t)_n*⋯T(t)_1*(Jξ⊗Φ)⟩| for one configuration."""
    d = T.d
    xi, xi2 = as_vector(xi), as_vector(xi2)
    Psi, Phi = as_vector(Psi), as_vector(Phi)
    if n is None:
        n = int(round(np.log(len(Psi)) / np.log(d))) if d > 1 else 1
    if d ** n != len(Psi):
        raise ValidationError("Psi dimension is not a power of d")
    Tc = twist_at(T, H, t + 0.5j)
    Tt = twist_at(T, H, t)
    prod_c = np.eye(d ** (n + 1), dtype=complex)
    for k in range(1, n + 1):
        prod_c = prod_c @ _legs(Tc, k, n + 1, d)
    lhs = np.vdot(np.kron(xi, Psi), prod_c @ np.kron(Phi, xi2))
    prod_s = np.eye(d ** (n + 1), dtype=complex)
    for k in range(n, 0, -1):
        prod_s = prod_s @ _legs(Tt.conj().T, k, n + 1, d)
    rhs = np.vdot(np.kron(Psi, H.j(xi2)), prod_s @ np.kron(H.j(xi), Phi))
    return float(abs(lhs - rhs))


def n_crossing_residual(
    T: Twist,
    H: StandardSubspace,
    n: int,
    samples: int = 8,
    t_samples=DEFAULT_T_GRID,
    rng: np.random.Generator | None = None,
    check_pre: bool = True,
) -> float:
    """Max deviation of the n-leg crossing continuation over random vectors and t."""
    _check_dims(T, H)
    guard_ambient(T.d, n + 1)
    if check_pre:
        scale = 1 + opnorm(H.delta_matrix) ** 2
        if compatibility_residual(T, H) > 1e-10 * scale:
            raise PreconditionError("n_crossing_residual requires a compatible twist")
    rng = np.random.default_rng(0) if rng is None else rng
    d = T.d
    res = 0.0
    for _ in range(samples):
        vecs = [_cnormal(rng, m) for m in (d, d ** n, d ** n, d)]
        for t in t_samples:
            res = max(res, n_crossing_deviation(T, H, *vecs, float(t), n=n))
    return res


def _cnormal(rng: np.random.Generator, m: int) -> np.ndarray:
    return rng.standard_normal(m) + 1j * rng.standard_normal(m)


def gamma_y_residual(T: Twist, Z) -> float:
    """‖[F(Z⊗Z), T]‖ with Z linear (matrix) or antilinear."""
    F = flip(T.d)
    if isinstance(Z, AntilinearMap):
        W = F @ kron(Z.unitary_part, Z.unitary_part)
        return opnorm(W @ np.conj(T.matrix) - T.matrix @ W)
    Z = as_matrix(Z)
    W = F @ kron(Z, Z)
    return opnorm(W @ T.matrix - T.matrix @ W)


def gamma_residual(T: Twist, V) -> float:
    """‖[V⊗V, T]‖ with V linear (matrix) or antilinear."""
    if isinstance(V, AntilinearMap):
        W = kron(V.unitary_part, V.unitary_part)
        return opnorm(W @ np.conj(T.matrix) - T.matrix @ W)
    V = as_matrix(V)
    W = kron(V, V)
    return opnorm(W @ T.matrix - T.matrix @ W)


# --- gallery -----------------------------------------------------------------

GALLERY_NAMES = (
    "zero", "flip", "neg_flip", "q_flip", "identity", "neg_identity",
    "elem_tensor", "flip_sandwich", "proj_pair",
)


def gallery(name: str, d: int = 2, **params) -> Twist:
    """Named twists: scalar multiples of 1 and F, A⊗B, F(A⊗A), qE⊗E~."""
    if name not in GALLERY_NAMES:
        raise ValidationError(f"unknown gallery twist {name!r}")

    def mat(key, default=None):
        if key not in params:
            if default is None:
                raise ValidationError(f"{name} needs parameter {key!r}")
            return default
        M = as_matrix(params[key], key)
        if M.shape == (1, d) or M.shape == (d, 1):
            M = np.diag(M.reshape(-1))
        if M.shape != (d, d):
            raise ValidationError(f"parameter {key} must be {d}x{d}")
        return M

    I = np.eye(d * d, dtype=complex)
    F = flip(d)
    q = float(params.get("q", 1.0))
    if name == "zero":
        M = 0 * I
    elif name == "flip":
        M = F
    elif name == "neg_flip":
        M = -F
    elif name == "q_flip":
        M = q * F
    elif name == "identity":
        M = I
    elif name == "neg_identity":
        M = -I
    elif name == "elem_tensor":
        M = kron(mat("A"), mat("B"))
    elif name == "flip_sandwich":
        A = mat("A", np.eye(d))
        M = F @ kron(A, A)
    else:
        E = mat("E")
        Et = mat("Et", E) if "Et" in params else mat("E_tilde", E)
        M = q * kron(E, Et)
    label = name if not params else name + "(" + ",".join(sorted(params)) + ")"
    return Twist(d, M, label)

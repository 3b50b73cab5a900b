"""Truncated twisted Fock space and its operators.

Vectors are kept in ambient coordinates (C^d)^{⊗n}; two vectors are equal in the
Fock space when ``‖P_n^{1/2}(v - w)‖`` vanishes. Operators are block matrices
indexed by (target level, source level). An operator's ``reach`` is the highest
intermediate level it climbs above its input, so identities are exact on input
levels ``n <= N - reach`` (the safe window).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError, TruncationError, ValidationError
from .standard_subspace import AntilinearMap, StandardSubspace
from .tensor_core import (
    KERNEL_REL,
    Spectrum,
    as_matrix,
    as_vector,
    herm_eig,
    kron,
    kron_power,
    opnorm,
    reverse_legs,
)
from .twist import (
    Twist,
    gamma_residual,
    gamma_y_residual,
    guard_ambient,
    p_operators,
    r_operator,
    r_tilde_operator,
)

PRE_TOL = 1e-10
STABILITY_TOL = 1e-9


@dataclass(frozen=True)
class FockSpace:
    twist: Twist
    N: int
    P: tuple = field(repr=False)
    R: tuple = field(repr=False)
    spectra: tuple = field(repr=False)
    K: tuple = field(repr=False)
    Q: tuple = field(repr=False)
    sqrtP: tuple = field(repr=False)
    sqrtP_pinv: tuple = field(repr=False)
    P_pinv: tuple = field(repr=False)
    kernel_dims: tuple
    stability_residual: float

    @property
    def d(self) -> int:
        return self.twist.d

    @property
    def kernel_stable(self) -> bool:
        return self.stability_residual <= STABILITY_TOL

    @property
    def strict(self) -> bool:
        return not any(self.kernel_dims)

    def dim(self, n: int) -> int:
        return self.d ** n


def build(T: Twist, N: int, d: int | None = None) -> FockSpace:
    """Per-level P_n, R_n, spectra, kernel and range projections up to level N."""
    if d is not None and d != T.d:
        raise ValidationError(f"d={d} does not match twist dimension {T.d}")
    if N < 1:
        raise ValidationError("truncation level N must be >= 1")
    guard_ambient(T.d, N)
    Ps = p_operators(T, N) if N >= 1 else [np.ones((1, 1))]
    Rs = [np.ones((1, 1), dtype=complex)] + [r_operator(T, n) for n in range(1, N + 1)]
    spectra, Ks, Qs, sq, sqi, pinv, kdims = [], [], [], [], [], [], []
    for n, P in enumerate(Ps):
        spec: Spectrum = herm_eig(P)
        thr = spec.kernel_threshold(KERNEL_REL)
        if spec.eigenvalues[0] < -thr:
            raise ValidationError(
                f"P_{n} has eigenvalue {spec.eigenvalues[0]:.3e} < 0: not a twist up to level {N}"
            )
        ker = spec.eigenvalues <= thr
        U = spec.eigenbasis
        lam = np.where(ker, 0.0, spec.eigenvalues)
        inv = np.where(ker, 0.0, 1.0 / np.where(ker, 1.0, lam))
        Ks.append(U[:, ker] @ U[:, ker].conj().T)
        Qs.append(np.eye(P.shape[0]) - Ks[-1])
        sq.append((U * np.sqrt(lam)) @ U.conj().T)
        sqi.append((U * np.sqrt(inv)) @ U.conj().T)
        pinv.append((U * inv) @ U.conj().T)
        spectra.append(spec)
        kdims.append(int(np.sum(ker)))
    stab = 0.0
    for n in range(1, N):
        if kdims[n] == 0:
            continue
        spec = spectra[n]
        kb = spec.eigenbasis[:, spec.eigenvalues <= spec.kernel_threshold()]
        for j in range(T.d):
            e = np.zeros(T.d)
            e[j] = 1.0
            stab = max(stab, opnorm(Ps[n + 1] @ np.kron(kb, e[:, None])))
            stab = max(stab, opnorm(Ps[n + 1] @ np.kron(e[:, None], kb)))
    return FockSpace(
        T, N, tuple(Ps), tuple(Rs), tuple(spectra), tuple(Ks), tuple(Qs),
        tuple(sq), tuple(sqi), tuple(pinv), tuple(kdims), float(stab),
    )


def r_tilde(FS: FockSpace, n: int) -> np.ndarray:
    if n < 1:
        raise ValidationError("r_tilde needs n >= 1")
    return r_tilde_operator(FS.twist, n)


def factorization_residual(FS: FockSpace, n: int) -> float:
    """‖P_{n+1} - (P_n ⊗ 1) R~_{n+1}‖."""
    if n + 1 > FS.N:
        raise TruncationError(f"factorization at n={n} needs N >= {n + 1}")
    lhs = FS.P[n + 1]
    rhs = kron(FS.P[n], np.eye(FS.d)) @ r_tilde(FS, n + 1)
    return opnorm(lhs - rhs)


# --- vectors -----------------------------------------------------------------

@dataclass(frozen=True)
class FockVector:
    blocks: dict

    def level(self, n: int, d: int) -> np.ndarray:
        v = self.blocks.get(n)
        return np.zeros(d ** n, dtype=complex) if v is None else v

    def __add__(self, other: "FockVector") -> "FockVector":
        out = dict(self.blocks)
        for n, v in other.blocks.items():
            out[n] = out[n] + v if n in out else v
        return FockVector(out)

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + (-1.0) * other

    def __rmul__(self, c) -> "FockVector":
        return FockVector({n: c * v for n, v in self.blocks.items()})

    @property
    def max_level(self) -> int:
        return max(self.blocks, default=0)


def vacuum() -> FockVector:
    return FockVector({0: np.ones(1, dtype=complex)})


def level_vector(n: int, v) -> FockVector:
    return FockVector({n: as_vector(v)})


def random_vector(FS: FockSpace, rng: np.random.Generator, levels) -> FockVector:
    blocks = {}
    for n in levels:
        m = FS.dim(n)
        blocks[n] = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    return FockVector(blocks)


def twisted_inner(FS: FockSpace, Psi: FockVector, Phi: FockVector) -> complex:
    """⟨Ψ, Φ⟩_T = Σ_n ⟨Ψ_n, P_n Φ_n⟩."""
    total = 0j
    for n in sorted(set(Psi.blocks) & set(Phi.blocks)):
        if n > FS.N:
            raise TruncationError(f"level {n} above truncation {FS.N}")
        total += np.vdot(Psi.blocks[n], FS.P[n] @ Phi.blocks[n])
    return complex(total)


def t_norm(FS: FockSpace, Psi: FockVector) -> float:
    return float(np.sqrt(max(twisted_inner(FS, Psi, Psi).real, 0.0)))


# --- operators ---------------------------------------------------------------

@dataclass(frozen=True)
class FockOperator:
    """Block operator; if ``antilinear`` each block acts as v -> B @ conj(v)."""

    blocks: dict
    N: int
    antilinear: bool = False
    reach: int = 0

    @property
    def creation_degree(self) -> int:
        return max((m - n for (m, n) in self.blocks), default=0)

    def safe_levels(self) -> range:
        return range(0, self.N - self.reach + 1)

    def __call__(self, Psi: FockVector) -> FockVector:
        out: dict = {}
        for (m, n), B in sorted(self.blocks.items()):
            v = Psi.blocks.get(n)
            if v is None:
                continue
            w = B @ (np.conj(v) if self.antilinear else v)
            out[m] = out[m] + w if m in out else w
        return FockVector(out)

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        blocks: dict = {}
        for (m, k), A in sorted(self.blocks.items()):
            for (k2, n), B in sorted(other.blocks.items()):
                if k2 != k:
                    continue
                C = A @ (np.conj(B) if self.antilinear else B)
                blocks[(m, n)] = blocks[(m, n)] + C if (m, n) in blocks else C
        climb = max(0, other.creation_degree)
        reach = max(other.reach, climb + self.reach)
        return FockOperator(blocks, self.N, self.antilinear != other.antilinear, reach)

    def __add__(self, other: "FockOperator") -> "FockOperator":
        if self.antilinear != other.antilinear:
            raise ValidationError("cannot add linear and antilinear operators")
        blocks = dict(self.blocks)
        for key, B in other.blocks.items():
            blocks[key] = blocks[key] + B if key in blocks else B
        return FockOperator(blocks, self.N, self.antilinear, max(self.reach, other.reach))

    def __rmul__(self, c) -> "FockOperator":
        return FockOperator({k: c * B for k, B in self.blocks.items()}, self.N, self.antilinear, self.reach)

    def __sub__(self, other: "FockOperator") -> "FockOperator":
        return self + (-1.0) * other

    def restrict(self, levels) -> "FockOperator":
        keep = set(levels)
        return FockOperator(
            {k: B for k, B in self.blocks.items() if k[1] in keep}, self.N, self.antilinear, self.reach
        )


def commutator(A: FockOperator, B: FockOperator) -> FockOperator:
    return A @ B - B @ A


def identity_operator(FS: FockSpace) -> FockOperator:
    return FockOperator({(n, n): np.eye(FS.dim(n), dtype=complex) for n in range(FS.N + 1)}, FS.N)


def twisted_adjoint(FS: FockSpace, X: FockOperator) -> FockOperator:
    """X^⋆ = P^+ X* P blockwise (linear operators only)."""
    if X.antilinear:
        raise ValidationError("twisted_adjoint is implemented for linear operators")
    blocks = {(n, m): FS.P_pinv[n] @ B.conj().T @ FS.P[m] for (m, n), B in X.blocks.items()}
    return FockOperator(blocks, X.N, False, X.reach)


def op_t_norm(FS: FockSpace, X: FockOperator, levels=None) -> float:
    """T-norm of X restricted to the given source levels (taken modulo kernels)."""
    levels = X.safe_levels() if levels is None else levels
    levels = [n for n in levels if 0 <= n <= FS.N]
    targets = sorted({m for (m, n) in X.blocks if n in levels})
    if not targets:
        return 0.0
    rows = []
    for m in targets:
        row = []
        for n in levels:
            B = X.blocks.get((m, n))
            if B is None:
                row.append(np.zeros((FS.dim(m), FS.dim(n)), dtype=complex))
            else:
                src = np.conj(FS.sqrtP_pinv[n]) if X.antilinear else FS.sqrtP_pinv[n]
                row.append(FS.sqrtP[m] @ B @ src)
        rows.append(row)
    return opnorm(np.block(rows))


def vec_t_difference(FS: FockSpace, Psi: FockVector, Phi: FockVector) -> float:
    return t_norm(FS, Psi - Phi)


def _leg_contract_first(xi: np.ndarray, n: int, d: int) -> np.ndarray:
    return kron(xi.conj()[None, :], np.eye(d ** (n - 1)))


def _leg_contract_last(xi: np.ndarray, n: int, d: int) -> np.ndarray:
    return kron(np.eye(d ** (n - 1)), xi.conj()[None, :])


def _check_vec(FS: FockSpace, xi) -> np.ndarray:
    xi = as_vector(xi)
    if xi.shape != (FS.d,):
        raise ValidationError(f"one-particle vector must have dimension {FS.d}")
    return xi


def create_left(FS: FockSpace, xi) -> FockOperator:
    """Ψ_n -> Q_{n+1}(ξ ⊗ Ψ_n)."""
    xi = _check_vec(FS, xi)
    blocks = {
        (n + 1, n): FS.Q[n + 1] @ kron(xi[:, None], np.eye(FS.dim(n))) for n in range(FS.N)
    }
    return FockOperator(blocks, FS.N, False, 1)


def annihilate_left(FS: FockSpace, xi) -> FockOperator:
    """Ψ_n -> Q_{n-1} a_L(ξ) R_n Ψ_n."""
    xi = _check_vec(FS, xi)
    blocks = {
        (n - 1, n): FS.Q[n - 1] @ _leg_contract_first(xi, n, FS.d) @ FS.R[n]
        for n in range(1, FS.N + 1)
    }
    return FockOperator(blocks, FS.N, False, 0)


def _require_right(FS: FockSpace) -> None:
    if not FS.kernel_stable:
        raise PreconditionError(
            f"right operators need kernel stability (residual {FS.stability_residual:.3e})"
        )


def create_right(FS: FockSpace, xi) -> FockOperator:
    """Ψ_n -> Q_{n+1}(Ψ_n ⊗ ξ)."""
    _require_right(FS)
    xi = _check_vec(FS, xi)
    blocks = {
        (n + 1, n): FS.Q[n + 1] @ kron(np.eye(FS.dim(n)), xi[:, None]) for n in range(FS.N)
    }
    return FockOperator(blocks, FS.N, False, 1)


def annihilate_right(FS: FockSpace, xi) -> FockOperator:
    """Ψ_n -> Q_{n-1} a_R(ξ) R~_n Ψ_n for braided T; the twisted adjoint of
    create_right otherwise (the R~ form is that adjoint only in the braided case)."""
    _require_right(FS)
    xi = _check_vec(FS, xi)
    if FS.twist.braided:
        blocks = {
            (n - 1, n): FS.Q[n - 1] @ _leg_contract_last(xi, n, FS.d) @ r_tilde(FS, n)
            for n in range(1, FS.N + 1)
        }
        return FockOperator(blocks, FS.N, False, 0)
    adj = twisted_adjoint(FS, create_right(FS, xi))
    return FockOperator(adj.blocks, FS.N, False, 0)


def field(FS: FockSpace, xi, side: str = "L", H: StandardSubspace | None = None) -> FockOperator:
    """φ(ξ) = a*(ξ) + a(ξ), or a*(ξ) + a(S_H ξ) when H is given."""
    xi = _check_vec(FS, xi)
    eta = xi if H is None else H.tomita(xi)
    if side == "L":
        return create_left(FS, xi) + annihilate_left(FS, eta)
    if side == "R":
        return create_right(FS, xi) + annihilate_right(FS, eta)
    raise ValidationError(f"side must be 'L' or 'R', got {side!r}")


def creation_bound(T: Twist, n: int) -> float:
    """c_{T,n} = Σ_{k=0}^n ‖T‖^k."""
    t = T.norm
    return float(sum(t ** k for k in range(n + 1)))


def level_norms(FS: FockSpace, X: FockOperator) -> dict:
    """Per-source-level T-norms of X."""
    return {n: op_t_norm(FS, X, [n]) for n in X.safe_levels()}


def second_quantize(FS: FockSpace, V, check: bool = True) -> FockOperator:
    """Γ_T(V): V^{⊗n} on each level (antiunitary if V is antilinear)."""
    anti = isinstance(V, AntilinearMap)
    M = V.unitary_part if anti else as_matrix(V)
    if check:
        r = gamma_residual(FS.twist, V)
        if r > PRE_TOL * (1 + opnorm(M) ** 2):
            raise PreconditionError(f"[V⊗V, T] = {r:.3e} is not zero")
    blocks = {(n, n): kron_power(M, n) for n in range(FS.N + 1)}
    return FockOperator(blocks, FS.N, anti, 0)


def second_quantize_reversed(FS: FockSpace, Z, check: bool = True) -> FockOperator:
    """Γ_T^Y(Z): Y_n Z^{⊗n} on each level, Y reversing the tensor legs."""
    anti = isinstance(Z, AntilinearMap)
    M = Z.unitary_part if anti else as_matrix(Z)
    if check:
        r = gamma_y_residual(FS.twist, Z)
        if r > PRE_TOL * (1 + opnorm(M) ** 2):
            raise PreconditionError(f"[F(Z⊗Z), T] = {r:.3e} is not zero")
    blocks = {(n, n): reverse_legs(n, FS.d) @ kron_power(M, n) for n in range(FS.N + 1)}
    return FockOperator(blocks, FS.N, anti, 0)


def _t_chain(T: Twist, n: int, order: str) -> np.ndarray:
    """T_1⋯T_n (order "up") or T_n⋯T_1 (order "down") on n+1 legs."""
    out = np.eye(T.d ** (n + 1), dtype=complex)
    ks = range(1, n + 1) if order == "up" else range(n, 0, -1)
    for k in ks:
        out = out @ T.leg(k, n + 1)
    return out


def mixed_commutators(FS: FockSpace, xi, eta, levels=None) -> dict:
    """Residuals of the four left/right commutation relations plus the vacuum identity."""
    T = FS.twist
    if not (T.braided or FS.strict):
        raise PreconditionError("mixed_commutators needs a braided or strict twist")
    xi, eta = _check_vec(FS, xi), _check_vec(FS, eta)
    safe = FS.N - 2
    if safe < 0:
        raise TruncationError("mixed_commutators needs N >= 2")
    levels = list(range(safe + 1)) if levels is None else list(levels)
    if any(n > safe for n in levels):
        raise TruncationError(f"requested level above safe window {safe}")
    d = FS.d
    aLs, aL = create_left(FS, xi), annihilate_left(FS, xi)
    aRs_eta, aR_xi = create_right(FS, eta), annihilate_right(FS, xi)
    aRs_xi, aR_eta = create_right(FS, xi), annihilate_right(FS, eta)
    aLs_eta = create_left(FS, eta)
    out = {}
    out["creators"] = op_t_norm(FS, commutator(aLs, aRs_eta), levels)
    out["annihilators"] = op_t_norm(FS, commutator(aL, aR_eta), levels)
    c3 = commutator(aL, aRs_eta)
    c4 = commutator(aR_xi, aLs_eta)
    pred3, pred4 = {}, {}
    for n in levels:
        pred3[(n, n)] = FS.Q[n] @ _leg_contract_first(xi, n + 1, d) @ _t_chain(T, n, "up") @ kron(
            np.eye(FS.dim(n)), eta[:, None]
        )
        pred4[(n, n)] = FS.Q[n] @ _leg_contract_last(xi, n + 1, d) @ _t_chain(T, n, "down") @ kron(
            eta[:, None], np.eye(FS.dim(n))
        )
    out["left_annihilator_right_creator"] = op_t_norm(FS, c3 - FockOperator(pred3, FS.N), levels)
    out["right_annihilator_left_creator"] = op_t_norm(FS, c4 - FockOperator(pred4, FS.N), levels)
    phiL, phiR = field(FS, xi, "L"), field(FS, eta, "R")
    got = commutator(phiL, phiR)(vacuum())
    want = (2j * np.vdot(xi, eta).imag) * vacuum()
    out["vacuum"] = t_norm(FS, got - want)
    return out

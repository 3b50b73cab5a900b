"""Vacuum cyclicity, Tomita-operator form, locality and duality checks on the truncated Fock space."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import product

import numpy as np

from .errors import TruncationError
from .fock import (
    FockOperator,
    FockSpace,
    FockVector,
    _leg_contract_first,
    _leg_contract_last,
    _t_chain,
    build,
    commutator,
    field,
    op_t_norm,
    second_quantize,
    second_quantize_reversed,
    t_norm,
    vacuum,
)
from .npoint import kms_shift_check
from .standard_subspace import StandardSubspace, symplectic_complement
from .tensor_core import kron, opnorm
from .twist import DEFAULT_T_GRID, Twist, crossing_residual, ybe_residual

RANK_REL = 1e-9


@dataclass(frozen=True)
class MonomialBasis:
    words: tuple
    vectors: tuple = dc_field(repr=False)
    max_degree: int = 0


def _stack(FS: FockSpace, Psi: FockVector, levels) -> np.ndarray:
    """Concatenate P_n^{1/2} Ψ_n so that Euclidean geometry equals T-geometry."""
    return np.concatenate([FS.sqrtP[n] @ Psi.level(n, FS.d) for n in levels])


def monomial_basis(FS: FockSpace, H: StandardSubspace, max_degree: int) -> MonomialBasis:
    """φ_L(h_{i1})⋯φ_L(h_{ik})Ω for all words of length ≤ max_degree."""
    if max_degree > FS.N:
        raise TruncationError(f"max_degree {max_degree} exceeds truncation N={FS.N}")
    basis = H.basis_vectors()
    fields = [field(FS, h, "L") for h in basis]
    words, vecs = [], []
    for k in range(max_degree + 1):
        for w in product(range(len(basis)), repeat=k):
            psi = vacuum()
            for i in reversed(w):
                psi = fields[i](psi)
            words.append(w)
            vecs.append(psi)
    return MonomialBasis(tuple(words), tuple(vecs), max_degree)


def _rank(M: np.ndarray) -> int:
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > RANK_REL * max(1.0, s[0])))


def cyclicity_rank(FS: FockSpace, H: StandardSubspace, max_degree: int) -> dict:
    """Per level: rank of monomial projections vs rank Q_n."""
    mb = monomial_basis(FS, H, max_degree)
    out = {}
    for n in range(max_degree + 1):
        cols = np.stack([FS.sqrtP[n] @ v.level(n, FS.d) for v in mb.vectors], axis=1)
        out[n] = {"rank": _rank(cols), "expected": FS.dim(n) - FS.kernel_dims[n]}
    return out


def tomita_consistency(FS: FockSpace, H: StandardSubspace, max_degree: int) -> dict:
    """Well-definedness of AΩ -> A^⋆Ω on the monomial span, and its match with Γ^Y(S_H)."""
    mb = monomial_basis(FS, H, max_degree)
    levels = range(max_degree + 1)
    index = {w: i for i, w in enumerate(mb.words)}
    V = np.stack([_stack(FS, v, levels) for v in mb.vectors], axis=1)
    W = np.stack([_stack(FS, mb.vectors[index[tuple(reversed(w))]], levels) for w in mb.words], axis=1)
    # c with Σ c_A AΩ = 0 must give Σ conj(c_A) A^⋆Ω = 0
    _, s, Vh = np.linalg.svd(V)
    tol = RANK_REL * max(1.0, s[0] if s.size else 1.0)
    rank = int(np.sum(s > tol))
    null = Vh[rank:].conj().T
    welldef = opnorm(W @ np.conj(null)) if null.size else 0.0
    S = second_quantize_reversed(FS, H.tomita, check=False)
    match = 0.0
    per_degree: dict = {}
    for w, v in zip(mb.words, mb.vectors):
        star = mb.vectors[index[tuple(reversed(w))]]
        r = t_norm(FS, star - S(v))
        match = max(match, r)
        per_degree[len(w)] = max(per_degree.get(len(w), 0.0), r)
    return {"welldefined_residual": welldef, "match_residual": match, "match_by_degree": per_degree}


def n_crossing_identity_residual(T: Twist, H: StandardSubspace, n: int) -> float:
    """max over h ∈ H, h' ∈ H' of ‖(h*⊗1)T_1⋯T_n(1⊗h') - (1⊗h'*)T_n⋯T_1(h⊗1)‖ on n legs."""
    Hp = symplectic_complement(H)
    res = 0.0
    up, down = _t_chain(T, n, "up"), _t_chain(T, n, "down")
    for h in H.basis_vectors():
        for hp in Hp.basis_vectors():
            M1 = _leg_contract_first(h, n + 1, T.d) @ up @ kron(np.eye(T.d ** n), hp[:, None])
            M2 = _leg_contract_last(hp, n + 1, T.d) @ down @ kron(h[:, None], np.eye(T.d ** n))
            res = max(res, opnorm(M1 - M2))
    return res


def locality_residual(FS: FockSpace, H: StandardSubspace, safe_levels=None, n_max: int | None = None) -> dict:
    """Commutators [φ_L(h), φ_R(h')] and the n-crossing identity."""
    safe = FS.N - 2
    if safe < 0:
        raise TruncationError("locality needs N >= 2")
    levels = list(range(safe + 1)) if safe_levels is None else list(safe_levels)
    Hp = symplectic_complement(H)
    comm = 0.0
    for h in H.basis_vectors():
        phiL = field(FS, h, "L")
        for hp in Hp.basis_vectors():
            comm = max(comm, op_t_norm(FS, commutator(phiL, field(FS, hp, "R")), levels))
    n_max = FS.N - 1 if n_max is None else n_max
    by_n = {n: n_crossing_identity_residual(FS.twist, H, n) for n in range(0, n_max + 1)}
    return {"commutator": comm, "ncrossing": max(by_n.values()), "ncrossing_by_n": by_n}


def modular_flow_covariance(FS: FockSpace, H: StandardSubspace, t_samples=(0.3,)) -> dict:
    """Ad Γ(Δ^{it}) on φ_L(h), invariance of Ω, and the level-1 block."""
    cov, vac, lvl1 = 0.0, 0.0, 0.0
    for t in t_samples:
        U = H.delta_power(1j * t)
        G, Gi = second_quantize(FS, U), second_quantize(FS, H.delta_power(-1j * t))
        vac = max(vac, t_norm(FS, G(vacuum()) - vacuum()))
        lvl1 = max(lvl1, opnorm(G.blocks[(1, 1)] - U))
        for h in H.basis_vectors():
            X = G @ field(FS, h, "L") @ Gi - field(FS, U @ h, "L")
            cov = max(cov, op_t_norm(FS, X, range(FS.N)))
    return {"covariance": cov, "vacuum": vac, "level_one": lvl1}


def j_exchange(FS: FockSpace, H: StandardSubspace) -> float:
    """‖Γ^Y(J) φ_L(h) Γ^Y(J) - φ_R(J h)‖ over the real basis of H."""
    J = second_quantize_reversed(FS, H.j)
    res = 0.0
    for h in H.basis_vectors():
        X = J @ field(FS, h, "L") @ J - field(FS, H.j(h), "R")
        res = max(res, op_t_norm(FS, X, range(FS.N)))
    return res


def _monomials(fields: list[FockOperator], max_degree: int) -> list[FockOperator]:
    out = []
    for k in range(1, max_degree + 1):
        for w in product(range(len(fields)), repeat=k):
            A = fields[w[0]]
            for i in w[1:]:
                A = A @ fields[i]
            out.append(A)
    return out


def duality_proxy(FS: FockSpace, H: StandardSubspace, max_degree: int = 2) -> dict:
    """J-exchange plus commutation of left monomials over H with right monomials over H'."""
    if FS.N < 2 * max_degree:
        raise TruncationError(f"duality proxy at degree {max_degree} needs N >= {2 * max_degree}")
    Hp = symplectic_complement(H)
    left = _monomials([field(FS, h, "L") for h in H.basis_vectors()], max_degree)
    right = _monomials([field(FS, h, "R") for h in Hp.basis_vectors()], max_degree)
    comm = 0.0
    for A in left:
        for B in right:
            C = commutator(A, B)
            comm = max(comm, op_t_norm(FS, C, C.safe_levels()))
    return {"j_exchange": j_exchange(FS, H), "commutation": comm}


def left_right_coincidence(FS: FockSpace, vectors) -> float:
    """max ‖(φ_L(ξ) - φ_R(ξ))‖ on the range of P (modulo kernels)."""
    res = 0.0
    for xi in vectors:
        X = field(FS, xi, "L") - field(FS, xi, "R")
        res = max(res, op_t_norm(FS, X, range(FS.N)))
    return res


@dataclass(frozen=True)
class EquivalenceResult:
    name: str
    residuals: dict
    verdicts: dict
    detection_degree: int | None

    @property
    def agree(self) -> bool:
        return len(set(self.verdicts.values())) == 1


def equivalence_verdicts(
    name: str,
    T: Twist,
    H: StandardSubspace,
    kms_vectors,
    tol: float = 1e-8,
    max_degree: int = 3,
    t_samples=DEFAULT_T_GRID,
) -> EquivalenceResult:
    """The three standardness verdicts: (i) Tomita/KMS, (ii) YBE+crossing, (iii) locality."""
    FS = build(T, max_degree + 1)
    tc = tomita_consistency(FS, H, max_degree)
    kms = kms_shift_check(FS, H, kms_vectors, t_samples)
    loc = locality_residual(FS, H)
    r = {
        "tomita_match": tc["match_residual"],
        "tomita_welldefined": tc["welldefined_residual"],
        "kms": kms,
        "ybe": ybe_residual(T),
        "crossing": crossing_residual(T, H, t_samples),
        "commutator": loc["commutator"],
        "ncrossing": loc["ncrossing"],
    }
    verdicts = {
        "tomita_kms": max(r["tomita_match"], r["kms"]) <= tol,
        "ybe_crossing": max(r["ybe"], r["crossing"]) <= tol,
        "locality": max(r["commutator"], r["ncrossing"]) <= tol,
    }
    detect = next((k for k, v in sorted(tc["match_by_degree"].items()) if v > tol), None)
    return EquivalenceResult(name, r, verdicts, detect)

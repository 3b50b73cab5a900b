"""Twisted n-point functions and the pair-diagram calculus.

Notation in the closed-form table: ``b(k) = S_H ξ_k`` and ``v(k) = ξ_k`` with the
last vector replaced by Δ^{iz} ξ_{2n}. A diagram is a set of chords (s, t), s < t,
where position s carries an annihilator a(S_H ξ_s) and position t a creator.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import GuardError, PreconditionError, TruncationError, ValidationError
from .fock import FockSpace, field, twisted_inner, vacuum
from .standard_subspace import StandardSubspace
from .tensor_core import as_vector, kron
from .twist import DEFAULT_T_GRID, Twist, compatibility_residual

DIAGRAM_GUARD = 5


@dataclass(frozen=True)
class PairDiagram:
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple(sorted((int(s), int(t)) for s, t in self.pairs))
        pts = sorted(p for c in pairs for p in c)
        if pts != list(range(1, 2 * len(pairs) + 1)):
            raise ValidationError(f"{pairs} is not a perfect matching of 1..{2 * len(pairs)}")
        if any(s >= t for s, t in pairs):
            raise ValidationError("every chord must satisfy s < t")
        object.__setattr__(self, "pairs", pairs)

    @property
    def n(self) -> int:
        return len(self.pairs)

    @property
    def crossing_count(self) -> int:
        return sum(1 for (s, t), (u, v) in combinations(self.pairs, 2) if s < u < t < v or u < s < v < t)

    def key(self) -> str:
        return ",".join(f"{s}{t}" if self.n < 5 else f"{s}-{t}" for s, t in self.pairs)


@dataclass(frozen=True)
class WightmanRequest:
    vectors: tuple
    z: complex = 0.0


def _matchings(points: list[int]):
    if not points:
        yield []
        return
    a = points[0]
    for i in range(1, len(points)):
        rest = points[1:i] + points[i + 1:]
        for m in _matchings(rest):
            yield [(a, points[i])] + m


def enumerate_diagrams(n: int) -> list[PairDiagram]:
    """All (2n-1)!! diagrams, ordered by crossing count then chord list."""
    if n > DIAGRAM_GUARD:
        raise GuardError(f"enumerate_diagrams: n={n} exceeds guard {DIAGRAM_GUARD}")
    ds = [PairDiagram(tuple(m)) for m in _matchings(list(range(1, 2 * n + 1)))]
    return sorted(ds, key=lambda D: (D.crossing_count, D.pairs))


def rotate_diagram(D: PairDiagram) -> PairDiagram:
    """Relabel k -> k+1; the chord ending at 2n becomes (1, s+1)."""
    m = 2 * D.n
    out = []
    for s, t in D.pairs:
        out.append((1, s + 1) if t == m else (s + 1, t + 1))
    return PairDiagram(tuple(out))


# --- Wightman functions ------------------------------------------------------

def _prepare(H: StandardSubspace, vectors, z) -> list[np.ndarray]:
    vs = [as_vector(v) for v in vectors]
    if any(v.shape != (H.dim,) for v in vs):
        raise ValidationError(f"vectors must have dimension {H.dim}")
    if vs:
        vs[-1] = H.delta_power(1j * complex(z)) @ vs[-1]
    return vs


def wightman(FS: FockSpace, H: StandardSubspace, vectors, z: complex = 0.0) -> complex:
    """⟨Ω, φ^H(ξ_1)⋯φ^H(Δ^{iz}ξ_{2n})Ω⟩_T computed from operator blocks.

    A product of m fields returns to the vacuum only through levels ≤ m/2, so
    truncation at N ≥ m/2 is exact."""
    vs = _prepare(H, vectors, z)
    m = len(vs)
    if FS.N < (m + 1) // 2:
        raise TruncationError(f"{m}-point function needs N >= {(m + 1) // 2}")
    psi = vacuum()
    for k, v in enumerate(reversed(vs)):
        psi = field(FS, v, "L", H)(psi)
        # drop levels that can no longer return to the vacuum
        remaining = m - k - 1
        psi = type(psi)({n: x for n, x in psi.blocks.items() if n <= remaining})
    return twisted_inner(FS, vacuum(), psi)


# --- diagram evaluation ------------------------------------------------------

def _apply_leg_chain(T: Twist, psi: np.ndarray, j: int, n: int) -> np.ndarray:
    """T_1 T_2 ⋯ T_{j-1} applied to an n-leg vector."""
    d = T.d
    out = psi
    for k in range(j - 1, 0, -1):
        t = out.reshape(d ** (k - 1), d * d, d ** (n - k - 1))
        out = np.einsum("ab,ibj->iaj", T.matrix, t).reshape(-1)
    return out


def evaluate_network(D: PairDiagram, T: Twist, H: StandardSubspace, vectors, z=0.0) -> complex:
    """Chord-by-chord contraction, scanning positions 2n..1.

    A creator position prepends ξ_t as leg 1. An annihilator at s moves its
    partner from leg j to leg 1 with T_1⋯T_{j-1} (one T per crossed chord) and
    contracts leg 1 with S_H ξ_s."""
    vs = _prepare(H, vectors, z)
    m = 2 * D.n
    if len(vs) != m:
        raise ValidationError(f"diagram on {m} points needs {m} vectors")
    partner_of = {s: t for s, t in D.pairs}
    creators = {t for _, t in D.pairs}
    d = T.d
    psi = np.ones(1, dtype=complex)
    legs: list[int] = []
    for pos in range(m, 0, -1):
        if pos in creators:
            psi = np.kron(vs[pos - 1], psi)
            legs = [pos] + legs
            continue
        j = legs.index(partner_of[pos]) + 1
        n = len(legs)
        psi = _apply_leg_chain(T, psi, j, n)
        legs = [legs[j - 1]] + legs[: j - 1] + legs[j:]
        bar = H.tomita(vs[pos - 1])
        psi = (bar.conj() @ psi.reshape(d, -1)).reshape(-1)
        legs = legs[1:]
    return complex(psi[0])


def _closed_forms():
    """Explicit values for n ≤ 3 keyed by chord list; each entry maps (b, v, T, d) to a value."""
    ip = np.vdot

    def t2(x1, x2, y1, y2, T):
        return np.vdot(np.kron(x1, x2), T @ np.kron(y1, y2))

    def aL(xi, w, d):
        return xi.conj() @ w.reshape(d, -1)

    forms = {
        ((1, 2),): lambda b, v, T, d: ip(b(1), v(2)),
        ((1, 2), (3, 4)): lambda b, v, T, d: ip(b(1), v(2)) * ip(b(3), v(4)),
        ((1, 4), (2, 3)): lambda b, v, T, d: ip(b(2), v(3)) * ip(b(1), v(4)),
        ((1, 3), (2, 4)): lambda b, v, T, d: t2(b(2), b(1), v(3), v(4), T),
        # no crossing
        ((1, 2), (3, 4), (5, 6)): lambda b, v, T, d: ip(b(1), v(2)) * ip(b(3), v(4)) * ip(b(5), v(6)),
        ((1, 6), (2, 3), (4, 5)): lambda b, v, T, d: ip(b(2), v(3)) * ip(b(4), v(5)) * ip(b(1), v(6)),
        ((1, 2), (3, 6), (4, 5)): lambda b, v, T, d: ip(b(1), v(2)) * ip(b(4), v(5)) * ip(b(3), v(6)),
        ((1, 4), (2, 3), (5, 6)): lambda b, v, T, d: ip(b(1), v(4)) * ip(b(2), v(3)) * ip(b(5), v(6)),
        ((1, 6), (2, 5), (3, 4)): lambda b, v, T, d: ip(b(2), v(5)) * ip(b(3), v(4)) * ip(b(1), v(6)),
        # one crossing
        ((1, 2), (3, 5), (4, 6)): lambda b, v, T, d: ip(b(1), v(2)) * t2(b(4), b(3), v(5), v(6), T),
        ((1, 5), (2, 3), (4, 6)): lambda b, v, T, d: ip(b(2), v(3)) * t2(b(4), b(1), v(5), v(6), T),
        ((1, 5), (2, 6), (3, 4)): lambda b, v, T, d: ip(b(3), v(4)) * t2(b(2), b(1), v(5), v(6), T),
        ((1, 3), (2, 6), (4, 5)): lambda b, v, T, d: ip(b(4), v(5)) * t2(b(2), b(1), v(3), v(6), T),
        ((1, 3), (2, 4), (5, 6)): lambda b, v, T, d: t2(b(2), b(1), v(3), v(4), T) * ip(b(5), v(6)),
        ((1, 6), (2, 4), (3, 5)): lambda b, v, T, d: t2(b(3), b(2), v(4), v(5), T) * ip(b(1), v(6)),
        # two crossings
        ((1, 3), (2, 5), (4, 6)): lambda b, v, T, d: np.vdot(
            np.kron(b(4), aL(v(3), T @ np.kron(b(2), b(1)), d)), T @ np.kron(v(5), v(6))
        ),
        ((1, 5), (2, 4), (3, 6)): lambda b, v, T, d: np.vdot(
            np.kron(aL(v(4), T @ np.kron(b(3), b(2)), d), b(1)), T @ np.kron(v(5), v(6))
        ),
        ((1, 4), (2, 6), (3, 5)): lambda b, v, T, d: np.vdot(
            np.kron(b(2), b(1)), T @ np.kron(aL(b(3), T @ np.kron(v(4), v(5)), d), v(6))
        ),
        # three crossings: T_2 T_1 T_2
        ((1, 4), (2, 5), (3, 6)): lambda b, v, T, d: np.vdot(
            np.kron(np.kron(b(3), b(2)), b(1)),
            _t212(T, d) @ np.kron(np.kron(v(4), v(5)), v(6)),
        ),
    }
    return forms


def _t212(T: np.ndarray, d: int) -> np.ndarray:
    I = np.eye(d)
    T1, T2 = kron(T, I), kron(I, T)
    return T2 @ T1 @ T2


CLOSED_FORMS = _closed_forms()
THREE_CROSSING = ((1, 4), (2, 5), (3, 6))


def three_crossing_orderings(T: Twist, H: StandardSubspace, vectors, z=0.0) -> tuple[complex, complex]:
    """Values of the three-crossing diagram with T_2T_1T_2 and with T_1T_2T_1; equal for braided T."""
    vs = _prepare(H, vectors, z)
    if len(vs) != 6:
        raise ValidationError("the three-crossing diagram needs 6 vectors")
    bars = np.kron(np.kron(H.tomita(vs[2]), H.tomita(vs[1])), H.tomita(vs[0]))
    ket = np.kron(np.kron(vs[3], vs[4]), vs[5])
    I = np.eye(T.d)
    T1, T2 = kron(T.matrix, I), kron(I, T.matrix)
    return complex(np.vdot(bars, T2 @ T1 @ T2 @ ket)), complex(np.vdot(bars, T1 @ T2 @ T1 @ ket))


def evaluate_explicit(D: PairDiagram, T: Twist, H: StandardSubspace, vectors, z=0.0) -> complex:
    """Closed-form value for n ≤ 3 (any twist)."""
    if D.n > 3:
        raise ValidationError("explicit table covers n ≤ 3 only")
    vs = _prepare(H, vectors, z)
    if len(vs) != 2 * D.n:
        raise ValidationError(f"diagram on {2 * D.n} points needs {2 * D.n} vectors")
    bars = [H.tomita(x) for x in vs]
    form = CLOSED_FORMS.get(D.pairs)
    if form is None:
        raise ValidationError(f"unknown diagram {D.pairs}")
    return complex(form(lambda k: bars[k - 1], lambda k: vs[k - 1], T.matrix, T.d))


def evaluate_diagram(D: PairDiagram, T: Twist, H: StandardSubspace, vectors, z=0.0, method: str = "auto") -> complex:
    """⟨D⟩: explicit table for n ≤ 3, tensor network for braided T otherwise."""
    if method == "explicit" or (method == "auto" and D.n <= 3):
        return evaluate_explicit(D, T, H, vectors, z)
    if D.n >= 4 and not T.braided:
        raise PreconditionError("diagram evaluation for n >= 4 needs a braided twist")
    return evaluate_network(D, T, H, vectors, z)


def grouped_sums(T: Twist, H: StandardSubspace, vectors, z=0.0, method: str = "auto") -> dict:
    """Σ⟨D⟩ grouped by crossing count."""
    n = len(vectors) // 2
    out: dict = {}
    for D in enumerate_diagrams(n):
        out[D.crossing_count] = out.get(D.crossing_count, 0j) + evaluate_diagram(D, T, H, vectors, z, method)
    return out


def diagram_sum_check(FS: FockSpace, H: StandardSubspace, vectors, z=0.0) -> float:
    """|Σ_D ⟨D⟩ - W|."""
    if len(vectors) % 2:
        raise ValidationError("diagram sums need an even number of vectors")
    total = sum(grouped_sums(FS.twist, H, vectors, z).values())
    return float(abs(total - wightman(FS, H, vectors, z)))


def kms_shift_check(FS: FockSpace, H: StandardSubspace, vectors, t_samples=DEFAULT_T_GRID, check_pre: bool = True) -> float:
    """max_t |W(ξ_1..ξ_2n; t - i) - W(Δ^{it}ξ_2n, ξ_1, ..., ξ_{2n-1}; 0)|."""
    if check_pre and compatibility_residual(FS.twist, H) > 1e-10 * (1 + np.linalg.norm(H.delta_matrix, 2) ** 2):
        raise PreconditionError("kms_shift_check requires a compatible twist")
    vs = [as_vector(v) for v in vectors]
    res = 0.0
    for t in t_samples:
        lhs = wightman(FS, H, vs, complex(t) - 1j)
        rot = [H.delta_power(1j * t) @ vs[-1]] + vs[:-1]
        rhs = wightman(FS, H, rot, 0.0)
        res = max(res, float(abs(lhs - rhs)))
    return res


def rotation_check(T: Twist, H: StandardSubspace, vectors, t_samples=DEFAULT_T_GRID) -> float:
    """max over diagrams and t of |⟨D⟩(t - i) - ⟨rotate(D)⟩(rotated vectors, t)|."""
    vs = [as_vector(v) for v in vectors]
    n = len(vs) // 2
    res = 0.0
    for t in t_samples:
        rot = [H.delta_power(1j * t) @ vs[-1]] + vs[:-1]
        for D in enumerate_diagrams(n):
            lhs = evaluate_diagram(D, T, H, vs, complex(t) - 1j)
            rhs = evaluate_diagram(rotate_diagram(D), T, H, rot, 0.0)
            res = max(res, float(abs(lhs - rhs)))
    return res


def grading_shift_check(T: Twist, H: StandardSubspace, vectors, t_samples=DEFAULT_T_GRID) -> float:
    """Crossing-graded version of the KMS shift: w_k(t - i) vs the rotated w_k(t)."""
    vs = [as_vector(v) for v in vectors]
    n = len(vs) // 2
    res = 0.0
    for t in t_samples:
        rot = [H.delta_power(1j * t) @ vs[-1]] + vs[:-1]
        shifted: dict = {}
        for D in enumerate_diagrams(n):
            R = rotate_diagram(D)
            val = evaluate_diagram(D, T, H, vs, complex(t) - 1j)
            shifted[R.crossing_count] = shifted.get(R.crossing_count, 0j) + val
        direct = grouped_sums(T, H, rot, 0.0)
        for k, val in shifted.items():
            res = max(res, float(abs(val - direct.get(k, 0j))))
    return res

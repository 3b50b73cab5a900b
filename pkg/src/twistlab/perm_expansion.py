"""Symmetric-group combinatorics and the permutation-sum form of P_n.

Permutations are tuples of 1-based images. Products compose right to left,
``(πσ)(i) = π(σ(i))``, and the Coxeter generator σ_k swaps k and k+1.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import GuardError, ValidationError
from .twist import Twist, guard_ambient

COMBINATORIAL_GUARD = 8
MATRIX_GUARD = 5


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        imgs = tuple(int(i) for i in self.images)
        if sorted(imgs) != list(range(1, len(imgs) + 1)):
            raise ValidationError(f"{imgs} is not a permutation of 1..{len(imgs)}")
        object.__setattr__(self, "images", imgs)

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return Permutation(tuple(self(other(i)) for i in range(1, self.n + 1)))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, p in enumerate(self.images, start=1):
            inv[p - 1] = i
        return Permutation(tuple(inv))

    def inversions(self) -> int:
        p = self.images
        return sum(1 for i in range(self.n) for j in range(i + 1, self.n) if p[i] > p[j])

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(tuple(range(1, n + 1)))

    @staticmethod
    def generator(k: int, n: int) -> "Permutation":
        img = list(range(1, n + 1))
        img[k - 1], img[k] = img[k], img[k - 1]
        return Permutation(tuple(img))


@dataclass(frozen=True)
class ReducedWord:
    letters: tuple[int, ...]
    n: int

    def evaluate(self) -> Permutation:
        out = Permutation.identity(self.n)
        for k in self.letters:
            out = out * Permutation.generator(k, self.n)
        return out

    def __len__(self) -> int:
        return len(self.letters)


def inversion_count(p: Permutation) -> int:
    return p.inversions()


def enumerate_perms(n: int) -> list[Permutation]:
    """All of S_n in lexicographic order of image tuples."""
    if n > COMBINATORIAL_GUARD:
        raise GuardError(f"enumerate: n={n} exceeds guard {COMBINATORIAL_GUARD}")
    return [Permutation(p) for p in itertools.permutations(range(1, n + 1))]


def canonical_word(p: Permutation) -> ReducedWord:
    """Peel π = ρ·γ_k with k = π^{-1}(n), γ_k = σ_{n-1}⋯σ_k, ρ fixing n."""
    n = p.n
    letters: list[int] = []
    cur = p
    for m in range(n, 1, -1):
        k = cur.inverse()(m)
        gamma = list(range(m - 1, k - 1, -1))
        g = Permutation.identity(n)
        for j in gamma:
            g = g * Permutation.generator(j, n)
        cur = cur * g.inverse()
        letters = gamma + letters
    w = ReducedWord(tuple(letters), n)
    assert len(w) == p.inversions(), "canonical word is not reduced"
    return w


def mirrored_canonical_word(p: Permutation) -> ReducedWord:
    """Peel π = ρ'·δ_k with k = π^{-1}(1), δ_k = σ_1⋯σ_{k-1}, ρ' fixing 1."""
    n = p.n
    letters: list[int] = []
    cur = p
    for m in range(1, n):
        k = cur.inverse()(m)
        delta = list(range(m, k))
        g = Permutation.identity(n)
        for j in delta:
            g = g * Permutation.generator(j, n)
        cur = cur * g.inverse()
        letters = delta + letters
    w = ReducedWord(tuple(letters), n)
    assert len(w) == p.inversions(), "mirrored canonical word is not reduced"
    return w


def all_reduced_words(p: Permutation) -> list[ReducedWord]:
    """Every reduced word of π (small n only)."""
    n = p.n
    out = []

    def rec(cur: Permutation, suffix: list[int]):
        if cur.inversions() == 0:
            out.append(ReducedWord(tuple(suffix), n))
            return
        for k in range(1, n):
            # right descent: cur(k) > cur(k+1)
            if cur(k) > cur(k + 1):
                rec(cur * Permutation.generator(k, n), [k] + suffix)

    rec(p, [])
    return out


def quasi_mult_eval(T: Twist, w: ReducedWord, n: int) -> np.ndarray:
    """t(σ_{i1}⋯σ_{il}) = T_{i1}⋯T_{il} on n legs."""
    if any(not 1 <= k <= n - 1 for k in w.letters):
        raise ValidationError(f"word {w.letters} out of range for n={n}")
    guard_ambient(T.d, n)
    out = np.eye(T.d ** n, dtype=complex)
    for k in w.letters:
        out = out @ T.leg(k, n)
    return out


def p_sum(T: Twist, n: int, mirrored: bool = False) -> np.ndarray:
    """Σ_{π∈S_n} t(π), summed sequentially in enumeration order.

    Mirrored words reproduce the recursion P_{n+1} = (1⊗P_n)R_{n+1} for every T.
    Canonical words reproduce the tilde recursion (P_n⊗1)R~_{n+1}; the two agree
    exactly when T is braided."""
    if n > MATRIX_GUARD and T.d > 1:
        raise GuardError(f"p_sum: n={n} exceeds guard {MATRIX_GUARD}")
    word = mirrored_canonical_word if mirrored else canonical_word
    out = np.zeros((T.d ** n, T.d ** n), dtype=complex)
    for p in enumerate_perms(n):
        out = out + quasi_mult_eval(T, word(p), n)
    return out


def q_factorial(q: float, n: int) -> float:
    """[n]_q! by direct inversion-count summation."""
    return float(sum(q ** p.inversions() for p in enumerate_perms(n)))

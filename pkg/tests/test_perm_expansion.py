import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistlab.errors import GuardError, ValidationError
from twistlab.perm_expansion import (
    Permutation,
    ReducedWord,
    all_reduced_words,
    canonical_word,
    enumerate_perms,
    mirrored_canonical_word,
    p_sum,
    q_factorial,
    quasi_mult_eval,
)
from twistlab.tensor_core import opnorm
from twistlab.twist import Twist, gallery, p_operators, r_tilde_operator

BRAIDED = [
    ("zero", {}), ("flip", {}), ("neg_flip", {}), ("identity", {}),
    ("q_flip", {"q": 0.5}), ("q_flip", {"q": -0.5}),
    ("proj_pair", {"q": 0.5, "E": np.diag([1.0, 0.0])}),
    ("flip_sandwich", {"A": np.diag([0.8, 0.5])}),
]


def test_counts():
    for n in range(1, 8):
        assert len(enumerate_perms(n)) == math.factorial(n)
    with pytest.raises(GuardError):
        enumerate_perms(9)


def test_invalid_permutation():
    with pytest.raises(ValidationError):
        Permutation((1, 1, 2))


def test_q_factorial(oracles):
    assert q_factorial(0.5, 3) == pytest.approx(oracles["q_factorial_3_half"], abs=1e-14)
    assert q_factorial(0.5, 3) == pytest.approx(oracles["q_factorial_3_half_product"], abs=1e-14)


def test_d1_p_sum_is_q_factorial(oracles):
    T = Twist(1, np.array([[0.5]]), "q")
    assert p_sum(T, 3)[0, 0].real == pytest.approx(oracles["q_factorial_3_half"], abs=1e-14)


def test_reduced_words_of_longest_element():
    w0 = Permutation((3, 2, 1))
    words = {w.letters for w in all_reduced_words(w0)}
    assert words == {(1, 2, 1), (2, 1, 2)}


@pytest.mark.parametrize("name,params", BRAIDED, ids=[b[0] + str(i) for i, b in enumerate(BRAIDED)])
def test_p_sum_matches_recursion_braided(name, params):
    T = gallery(name, **params)
    Ps = p_operators(T, 5)
    for n in range(1, 6):
        assert opnorm(p_sum(T, n) - Ps[n]) <= 1e-10 * max(1, opnorm(Ps[n]))
        assert opnorm(p_sum(T, n, mirrored=True) - Ps[n]) <= 1e-10 * max(1, opnorm(Ps[n]))


def test_mirrored_sum_is_recursion_for_nonbraided(elem_tensor):
    Ps = p_operators(elem_tensor, 4)
    for n in range(1, 5):
        assert opnorm(p_sum(elem_tensor, n, mirrored=True) - Ps[n]) < 1e-12
    assert opnorm(p_sum(elem_tensor, 3) - Ps[3]) > 1e-3


def test_canonical_sum_is_tilde_recursion(elem_tensor):
    M = np.eye(2)
    for n in range(1, 5):
        assert opnorm(p_sum(elem_tensor, n) - M) < 1e-12
        M = np.kron(M, np.eye(2)) @ r_tilde_operator(elem_tensor, n + 1)


def test_word_independence_braided(qflip, elem_tensor):
    for p in enumerate_perms(4):
        words = all_reduced_words(p)
        vals = [quasi_mult_eval(qflip, w, 4) for w in words]
        assert max(opnorm(v - vals[0]) for v in vals) < 1e-12
    w1 = quasi_mult_eval(elem_tensor, ReducedWord((1, 2, 1), 3), 3)
    w2 = quasi_mult_eval(elem_tensor, ReducedWord((2, 1, 2), 3), 3)
    assert opnorm(w1 - w2) > 1e-3


def test_p_sum_guard():
    with pytest.raises(GuardError):
        p_sum(gallery("zero"), 6)


perms = st.integers(1, 6).flatmap(lambda n: st.permutations(list(range(1, n + 1))))


@settings(max_examples=60, deadline=None)
@given(perms)
def test_canonical_words_reduced(imgs):
    p = Permutation(tuple(imgs))
    for w in (canonical_word(p), mirrored_canonical_word(p)):
        assert w.evaluate() == p
        assert len(w) == p.inversions()


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: st.tuples(st.permutations(list(range(1, n + 1))),
                                                     st.permutations(list(range(1, n + 1))))))
def test_group_laws(pair):
    p, r = (Permutation(tuple(x)) for x in pair)
    e = Permutation.identity(p.n)
    assert p * p.inverse() == e
    assert (p * r).inverse() == r.inverse() * p.inverse()
    assert p.inverse().inversions() == p.inversions()


@settings(max_examples=30, deadline=None)
@given(st.floats(-1, 1), st.integers(1, 6))
def test_q_factorial_product_formula(q, n):
    prod = 1.0
    for m in range(1, n + 1):
        prod *= sum(q ** k for k in range(m))
    assert q_factorial(q, n) == pytest.approx(prod, rel=1e-13, abs=1e-13)

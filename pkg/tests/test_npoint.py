from collections import Counter
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistlab.errors import GuardError, PreconditionError, TruncationError, ValidationError
from twistlab.fock import build
from twistlab.npoint import (
    CLOSED_FORMS,
    PairDiagram,
    diagram_sum_check,
    enumerate_diagrams,
    evaluate_diagram,
    evaluate_explicit,
    evaluate_network,
    grading_shift_check,
    grouped_sums,
    kms_shift_check,
    rotate_diagram,
    rotation_check,
    three_crossing_orderings,
    wightman,
)
from twistlab.standard_subspace import generic_subspace
from twistlab.twist import Twist, gallery

from conftest import cvec, decode, haar_unitary


def q_wick(q, H, vs):
    """Σ_D q^{cr(D)} Π⟨S_H ξ_s, ξ_t⟩ grouped by crossings: the q-Gaussian Wick rule."""
    out = Counter()
    for D in enumerate_diagrams(len(vs) // 2):
        val = np.prod([np.vdot(H.tomita(vs[s - 1]), vs[t - 1]) for s, t in D.pairs])
        out[D.crossing_count] += q ** D.crossing_count * val
    return out


def test_enumeration_counts():
    assert [len(enumerate_diagrams(n)) for n in (1, 2, 3, 4)] == [1, 3, 15, 105]
    cr = Counter(D.crossing_count for D in enumerate_diagrams(3))
    assert cr == {0: 5, 1: 6, 2: 3, 3: 1}
    with pytest.raises(GuardError):
        enumerate_diagrams(6)


def test_closed_form_table_complete():
    assert set(CLOSED_FORMS) == {D.pairs for n in (1, 2, 3) for D in enumerate_diagrams(n)}


def test_pair_diagram_validation():
    with pytest.raises(ValidationError):
        PairDiagram(((1, 2), (2, 3)))


def test_rotation_is_bijection():
    for n in (2, 3, 4):
        ds = enumerate_diagrams(n)
        rot = {rotate_diagram(D) for D in ds}
        assert rot == set(ds)
        D = ds[-1]
        for _ in range(2 * n):
            D = rotate_diagram(D)
        assert D == ds[-1]


def test_two_point_function(qflip, H_generic, rng):
    FS = build(qflip, 1)
    x, y = cvec(rng, 2), cvec(rng, 2)
    assert wightman(FS, H_generic, [x, y]) == pytest.approx(np.vdot(H_generic.tomita(x), y), abs=1e-13)


def test_odd_moments_vanish(qflip, H_generic, rng):
    FS = build(qflip, 2)
    assert abs(wightman(FS, H_generic, [cvec(rng, 2) for _ in range(3)])) < 1e-14


def test_truncation_precondition(qflip, H_generic, rng):
    FS = build(qflip, 1)
    with pytest.raises(TruncationError):
        wightman(FS, H_generic, [cvec(rng, 2) for _ in range(4)])


@pytest.mark.parametrize("q", [0.5, -0.5, 0.0, 1.0])
def test_q_wick_oracle(q, H_generic, rng):
    T = gallery("q_flip", q=q)
    for n in (1, 2, 3):
        vs = [cvec(rng, 2) for _ in range(2 * n)]
        got = grouped_sums(T, H_generic, vs)
        want = q_wick(q, H_generic, vs)
        for k in want:
            assert abs(got.get(k, 0) - want[k]) < 1e-10 * (1 + abs(want[k]))


def test_explicit_matches_network_nonbraided(H_generic, rng):
    M = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    T = Twist(2, 0.2 * (M + M.conj().T) / np.linalg.norm(M + M.conj().T, 2), "random")
    assert not T.braided
    for n in (1, 2, 3):
        vs = [cvec(rng, 2) for _ in range(2 * n)]
        for D in enumerate_diagrams(n):
            assert abs(evaluate_explicit(D, T, H_generic, vs) - evaluate_network(D, T, H_generic, vs)) < 1e-12


def test_diagram_sum_equals_wightman_nonbraided(H_generic, elem_tensor, rng):
    FS = build(elem_tensor, 3)
    for n in (1, 2, 3):
        vs = [cvec(rng, 2) for _ in range(2 * n)]
        assert diagram_sum_check(FS, H_generic, vs) < 1e-10


def test_diagram_sum_order_eight(qflip, H_generic, rng):
    FS = build(qflip, 4)
    vs = [cvec(rng, 2) for _ in range(8)]
    assert diagram_sum_check(FS, H_generic, vs) < 1e-8


def test_network_needs_braided_for_large_n(elem_tensor, H_generic, rng):
    D = enumerate_diagrams(4)[0]
    with pytest.raises(PreconditionError):
        evaluate_diagram(D, elem_tensor, H_generic, [cvec(rng, 2) for _ in range(8)])


def test_basis_independence(qflip, rng):
    V = haar_unitary(rng, 2)
    H = generic_subspace(3.0)
    HV = generic_subspace(3.0, V)
    VV = np.kron(V, V)
    TV = Twist(2, VV @ qflip.matrix @ VV.conj().T, "rotated")
    vs = [cvec(rng, 2) for _ in range(6)]
    for D in enumerate_diagrams(3):
        a = evaluate_network(D, qflip, H, vs)
        b = evaluate_network(D, TV, HV, [V @ v for v in vs])
        assert abs(a - b) < 1e-12


def test_three_crossing_orderings(qflip, elem_tensor, H_generic, rng):
    vs = [cvec(rng, 2) for _ in range(6)]
    a, b = three_crossing_orderings(qflip, H_generic, vs)
    assert abs(a - b) < 1e-12
    D = PairDiagram(((1, 4), (2, 5), (3, 6)))
    a, b = three_crossing_orderings(elem_tensor, H_generic, vs)
    assert evaluate_explicit(D, elem_tensor, H_generic, vs) == pytest.approx(a, abs=1e-14)
    assert abs(a - b) > 1e-6


def test_kms_and_rotation_qflip(qflip, H_generic, rng):
    FS = build(qflip, 3)
    grid = np.linspace(-2, 2, 8)
    for n in (1, 2, 3):
        vs = [cvec(rng, 2) for _ in range(2 * n)]
        assert kms_shift_check(FS, H_generic, vs, grid) < 1e-8
    vs = [cvec(rng, 2) for _ in range(6)]
    assert rotation_check(qflip, H_generic, vs, grid[:3]) < 1e-8
    assert grading_shift_check(qflip, H_generic, vs, grid[:3]) < 1e-8


def test_kms_witness_noncrossing(proj_pair, H_diag, witnesses):
    w = witnesses["kms_4pt"]
    FS = build(proj_pair, 4)
    r = kms_shift_check(FS, H_diag, [decode(v) for v in w["vectors"]], w["t_grid"])
    assert r == pytest.approx(w["residual"], rel=1e-9)
    assert r >= 1e-3


def test_kms_requires_compatibility(H_generic, elem_tensor, rng):
    FS = build(elem_tensor, 1)
    with pytest.raises(PreconditionError):
        kms_shift_check(FS, H_generic, [cvec(rng, 2) for _ in range(2)])


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.permutations(list(range(1, 2 * n + 1)))))
def test_crossing_count_matches_definition(perm):
    pairs = tuple(tuple(sorted(perm[i:i + 2])) for i in range(0, len(perm), 2))
    D = PairDiagram(pairs)
    brute = sum(1 for (a, b), (c, e) in combinations(pairs, 2)
                if len({a, b, c, e}) == 4 and (a < c < b < e or c < a < e < b))
    assert D.crossing_count == brute
    assert rotate_diagram(D).crossing_count == D.crossing_count


@settings(max_examples=10, deadline=None)
@given(st.floats(-0.9, 0.9), st.integers(0, 2**31 - 1))
def test_kms_property(q, seed):
    rng = np.random.default_rng(seed)
    H = generic_subspace(2.5, haar_unitary(rng, 2))
    FS = build(gallery("q_flip", q=q), 2)
    vs = [cvec(rng, 2) for _ in range(4)]
    assert kms_shift_check(FS, H, vs, (0.7,)) < 1e-9

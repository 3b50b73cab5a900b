"""Acceptance criteria 1-12 at their stated tolerances; one PASS/FAIL line per criterion.

    pytest tests/test_acceptance.py -v
"""
import json
import math
import shutil
import subprocess
import sys
import time
from collections import Counter

import numpy as np
import pytest

from twistlab.cli import gallery_members
from twistlab.config import parse_config
from twistlab.errors import PreconditionError
from twistlab.fock import (
    annihilate_left,
    annihilate_right,
    build,
    create_left,
    create_right,
    creation_bound,
    factorization_residual,
    mixed_commutators,
    op_t_norm,
    twisted_adjoint,
)
from twistlab.modular_verify import (
    duality_proxy,
    equivalence_verdicts,
    j_exchange,
    left_right_coincidence,
    locality_residual,
    modular_flow_covariance,
    tomita_consistency,
)
from twistlab.npoint import (
    diagram_sum_check,
    enumerate_diagrams,
    grouped_sums,
    kms_shift_check,
    rotation_check,
)
from twistlab.nuclearity import fock_l2_check, l2_index
from twistlab.perm_expansion import p_sum
from twistlab.standard_subspace import diagonal_subspace, generic_subspace, rotate
from twistlab.tensor_core import opnorm
from twistlab.twist import (
    DEFAULT_T_GRID,
    Twist,
    crossing_residual,
    gallery,
    n_crossing_deviation,
    p_operators,
    ybe_residual,
)

from conftest import cvec, decode, haar_unitary, load_fixture

GRID8 = np.linspace(-2.0, 2.0, 8)
A_B = dict(A=np.diag([1.0, 0.3]), B=np.diag([0.5, 0.2]))
BRAIDED_D2 = {
    "zero": gallery("zero"),
    "flip": gallery("flip"),
    "neg_flip": gallery("neg_flip"),
    "q_flip+": gallery("q_flip", q=0.5),
    "q_flip-": gallery("q_flip", q=-0.5),
    "identity": gallery("identity"),
    "neg_identity": gallery("neg_identity"),
    "proj_pair": gallery("proj_pair", q=0.5, E=np.diag([1.0, 0.0])),
    "flip_sandwich": gallery("flip_sandwich", A=np.diag([0.8, 0.5])),
}
NONBRAIDED = gallery("elem_tensor", **A_B)


@pytest.fixture(scope="module")
def H_gen():
    return generic_subspace(4.0, haar_unitary(np.random.default_rng(3), 2))


@pytest.fixture(scope="module")
def H_diag():
    return diagonal_subspace([4.0, 0.25])


@pytest.fixture(scope="module")
def wit():
    return load_fixture("witnesses.json")


@pytest.fixture
def verdict(capsys):
    """Print one PASS/FAIL line past the capture, then assert."""

    def emit(number, title, checks, elapsed, budget):
        failed = [name for name, ok in checks.items() if not ok]
        if elapsed > budget:
            failed.append(f"runtime {elapsed:.1f}s > {budget}s")
        status = "PASS" if not failed else "FAIL"
        line = f"[criterion {number:2d}] {status} {title} ({elapsed:.2f}s)"
        if failed:
            line += " failed: " + "; ".join(failed)
        with capsys.disabled():
            print("\n" + line)
        assert not failed, line

    return emit


def test_criterion_01_classification(verdict):
    t0 = time.perf_counter()
    tol = 1e-10
    ok = {}
    P0 = p_operators(gallery("zero"), 5)
    ok["zero strict, min eig 1"] = all(abs(np.linalg.eigvalsh(P0[n])[0] - 1) <= tol for n in range(1, 6))
    P1 = p_operators(gallery("identity"), 5)
    ok["identity n!"] = all(opnorm(P1[n] - math.factorial(n) * np.eye(2 ** n)) <= tol * math.factorial(n)
                            for n in range(1, 6))
    Pm = p_operators(gallery("neg_identity"), 5)
    ok["-identity zero for n>=2"] = all(opnorm(Pm[n]) <= tol for n in range(2, 6))
    for q in (0.5, -0.5):
        Pq = p_operators(gallery("q_flip", q=q), 5)
        mins = [np.linalg.eigvalsh(Pq[n])[0] for n in range(1, 6)]
        ok[f"qF q={q} strict"] = min(mins) > tol
        ok[f"qF q={q} min eig P2 = 0.5"] = abs(mins[1] - 0.5) <= tol
    verdict(1, "twist classification table", ok, time.perf_counter() - t0, 5)


def test_criterion_02_yang_baxter(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    A = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    A = A + A.conj().T
    A /= np.linalg.norm(A, 2)
    ok = {
        "F": ybe_residual(gallery("flip")) <= 1e-12,
        "qF": ybe_residual(gallery("q_flip", q=0.5)) <= 1e-12,
        "F(A⊗A)": ybe_residual(gallery("flip_sandwich", A=A)) <= 1e-12,
        "A⊗B >= 1e-3": ybe_residual(NONBRAIDED) >= 1e-3,
    }
    verdict(2, "Yang-Baxter residuals", ok, time.perf_counter() - t0, 1)


def test_criterion_03_permutation_sum(verdict):
    t0 = time.perf_counter()
    ok = {}
    for name, T in BRAIDED_D2.items():
        Ps = p_operators(T, 5)
        ok[name] = all(opnorm(p_sum(T, n) - Ps[n]) <= 1e-10 for n in range(1, 6))
    T1 = Twist(1, np.array([[0.5]]), "q")
    ok["[3]_0.5! = 2.625"] = abs(p_sum(T1, 3)[0, 0] - 2.625) <= 1e-14
    verdict(3, "permutation-sum oracle", ok, time.perf_counter() - t0, 10)


def test_criterion_04_tilde_factorization(verdict):
    t0 = time.perf_counter()
    ok = {}
    for name, T in BRAIDED_D2.items():
        FS = build(T, 5)
        ok[name] = max(factorization_residual(FS, n) for n in range(1, 5)) <= 1e-10
    FE = build(NONBRAIDED, 5)
    ok["A⊗B reported nonzero"] = max(factorization_residual(FE, n) for n in range(1, 5)) > 1e-3
    verdict(4, "tilde-R factorization", ok, time.perf_counter() - t0, 5)


def test_criterion_05_creation_annihilation(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    ok = {}
    members = dict(BRAIDED_D2, elem_tensor=NONBRAIDED)
    N = 4
    for name, T in members.items():
        FS = build(T, N)
        adj = 0.0
        bound1, bound2 = 0.0, 0.0
        for k in range(100):
            xi = cvec(rng, 2)
            C = create_left(FS, xi)
            if k < 5:
                adj = max(adj, op_t_norm(FS, twisted_adjoint(FS, C) - annihilate_left(FS, xi), range(N)))
                if FS.kernel_stable:
                    R = create_right(FS, xi)
                    adj = max(adj, op_t_norm(FS, twisted_adjoint(FS, R) - annihilate_right(FS, xi), range(N)))
            nx = np.linalg.norm(xi)
            for n in range(N):
                val = op_t_norm(FS, C, [n])
                bound1 = max(bound1, val - np.sqrt(creation_bound(T, n)) * nx)
                if T.norm < 1:
                    bound2 = max(bound2, val - nx / np.sqrt(1 - T.norm))
        ok[f"{name} adjoint"] = adj <= 1e-10
        ok[f"{name} partial-sum bound"] = bound1 <= 1e-10
        ok[f"{name} geometric bound"] = bound2 <= 1e-10
    verdict(5, "creation/annihilation contracts", ok, time.perf_counter() - t0, 10)


def test_criterion_06_mixed_commutators(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    ok = {}
    for name in ("q_flip+", "zero"):
        FS = build(BRAIDED_D2[name], 5)
        for k in range(3):
            res = mixed_commutators(FS, cvec(rng, 2), cvec(rng, 2), levels=range(4))
            vac = res.pop("vacuum")
            ok[f"{name} identities #{k}"] = max(res.values()) <= 1e-10
            ok[f"{name} vacuum #{k}"] = vac <= 1e-12
    verdict(6, "mixed commutator identities", ok, time.perf_counter() - t0, 5)


def test_criterion_07_diagram_calculus(verdict, H_gen):
    t0 = time.perf_counter()
    ok = {
        "counts 1/3/15": [len(enumerate_diagrams(n)) for n in (1, 2, 3)] == [1, 3, 15],
        "crossing multiset": Counter(D.crossing_count for D in enumerate_diagrams(3)) == {0: 5, 1: 6, 2: 3, 3: 1},
    }
    q = 0.5
    T = gallery("q_flip", q=q)
    FS = build(T, 3)
    rng = np.random.default_rng(7)
    worst_sum, worst_group = 0.0, 0.0
    for _ in range(20):
        draw = [cvec(rng, 2) for _ in range(6)]
        for n in (1, 2, 3):
            vs = draw[: 2 * n]
            worst_sum = max(worst_sum, diagram_sum_check(FS, H_gen, vs))
            explicit = grouped_sums(T, H_gen, vs, method="explicit")
            network = grouped_sums(T, H_gen, vs, method="network")
            wick = Counter()
            for D in enumerate_diagrams(n):
                wick[D.crossing_count] += q ** D.crossing_count * np.prod(
                    [np.vdot(H_gen.tomita(vs[s - 1]), vs[t - 1]) for s, t in D.pairs])
            for k in wick:
                worst_group = max(worst_group, abs(explicit[k] - wick[k]), abs(network[k] - wick[k]))
    ok["diagram sum = Wightman <= 1e-8"] = worst_sum <= 1e-8
    ok["w_k termwise <= 1e-10"] = worst_group <= 1e-10
    verdict(7, "diagram calculus", ok, time.perf_counter() - t0, 60)


def test_criterion_08_kms_rotation(verdict, H_gen, H_diag, wit):
    t0 = time.perf_counter()
    T = gallery("q_flip", q=0.5)
    FS = build(T, 3)
    rng = np.random.default_rng(8)
    kms, rot = 0.0, 0.0
    for _ in range(5):
        draw = [cvec(rng, 2) for _ in range(6)]
        for n in (1, 2, 3):
            kms = max(kms, kms_shift_check(FS, H_gen, draw[: 2 * n], GRID8))
            rot = max(rot, rotation_check(T, H_gen, draw[: 2 * n], GRID8))
    w = wit["kms_4pt"]
    PP = build(gallery("proj_pair", q=0.5, E=np.diag([1.0, 0.0])), 2)
    neg = kms_shift_check(PP, H_diag, [decode(v) for v in w["vectors"]], w["t_grid"])
    ok = {
        "qF KMS <= 1e-8": kms <= 1e-8,
        "qF rotation <= 1e-8": rot <= 1e-8,
        "qE⊗E witness >= 1e-3": neg >= 1e-3 and abs(neg - w["residual"]) <= 1e-9 * w["residual"],
    }
    verdict(8, "KMS and rotation", ok, time.perf_counter() - t0, 60)


def test_criterion_09_equivalence(verdict, H_diag, wit):
    t0 = time.perf_counter()
    rng = np.random.default_rng(9)
    ok = {}
    cfg = parse_config({"member": [{k: v for k, v in m.items() if k != "comment"} for m in gallery_members()]})
    for m in cfg.members:
        if m.subspace is None:
            continue
        DD = np.kron(m.subspace.delta_matrix, m.subspace.delta_matrix)
        if opnorm(DD @ m.twist.matrix - m.twist.matrix @ DD) > 1e-10 * (1 + opnorm(DD)):
            continue
        vs = [cvec(rng, m.twist.d) for _ in range(4)]
        res = equivalence_verdicts(m.name, m.twist, m.subspace, vs)
        ok[f"{m.name} verdicts agree"] = res.agree
        if m.expect == "standard":
            ok[f"{m.name} passes <= 1e-8"] = all(res.verdicts.values())
    ok["positive members present"] = {"q_flip_plus", "flip_sandwich"} <= {m.name for m in cfg.members}

    # negative member: each verdict failed by a frozen witness
    T = gallery("proj_pair", q=0.5, E=np.diag([1.0, 0.0]))
    FS = build(T, 4)
    kw = wit["kms_4pt"]
    kms = kms_shift_check(FS, H_diag, [decode(v) for v in kw["vectors"]], kw["t_grid"])
    tc = tomita_consistency(FS, H_diag, 3)
    cw = wit["n_crossing_continuation"]
    cvs = [decode(v) for v in cw["vectors"]]
    cont = max(n_crossing_deviation(T, H_diag, *cvs, t, n=cw["n"]) for t in DEFAULT_T_GRID)
    loc = locality_residual(FS, H_diag)
    ok["qE⊗E Tomita/KMS fails"] = min(kms, tc["match_residual"]) >= 1e-3
    ok["qE⊗E crossing fails"] = min(cont, crossing_residual(T, H_diag)) >= 1e-3
    ok["qE⊗E locality fails"] = min(loc["commutator"], loc["ncrossing"]) >= 1e-3
    verdict(9, "standardness equivalence", ok, time.perf_counter() - t0, 120)


def test_criterion_10_modular_data(verdict, H_gen):
    t0 = time.perf_counter()
    FS = build(gallery("q_flip", q=0.5), 4)
    tc = tomita_consistency(FS, H_gen, 3)
    cov = modular_flow_covariance(FS, H_gen, (0.3, -1.1, 2.0))
    dp = duality_proxy(FS, H_gen, 2)
    FF = build(gallery("flip"), 4)
    ok = {
        "Tomita match <= 1e-8": tc["match_residual"] <= 1e-8,
        "covariance <= 1e-10": max(cov.values()) <= 1e-10,
        "J-exchange <= 1e-10": j_exchange(FS, H_gen) <= 1e-10,
        "duality commutation <= 1e-9": dp["commutation"] <= 1e-9,
        "F left/right coincidence <= 1e-10": left_right_coincidence(FF, H_gen.basis_vectors()) <= 1e-10,
    }
    verdict(10, "modular data", ok, time.perf_counter() - t0, 120)


def test_criterion_11_nuclearity(verdict, H_diag):
    t0 = time.perf_counter()
    K = diagonal_subspace([16.0, 1 / 16.0])
    ok = {"l2 index": abs(l2_index(H_diag, K) - (2 ** -0.5 + 2 ** 0.5)) <= 1e-12}
    for q in (0.5, -0.5):
        rep = fock_l2_check(gallery("q_flip", q=q), H_diag, K, 4)
        ok[f"qF q={q} deviation <= 1e-9"] = rep.deviation <= 1e-9
    K_rot = rotate(K, haar_unitary(np.random.default_rng(11), 2))
    try:
        fock_l2_check(NONBRAIDED, H_diag, K_rot, 4)
        ok["gate fires"] = False
    except PreconditionError:
        ok["gate fires"] = True
    verdict(11, "nuclearity arithmetic", ok, time.perf_counter() - t0, 10)


def test_criterion_12_determinism(verdict, tmp_path):
    t0 = time.perf_counter()
    exe = shutil.which("twistlab")
    cmd = [exe] if exe else [sys.executable, "-m", "twistlab"]
    subprocess.run(cmd + ["demo", "--out", str(tmp_path)], check=True, capture_output=True)
    payloads, codes = [], []
    for k in (1, 2):
        out = tmp_path / f"report{k}.json"
        proc = subprocess.run(cmd + ["run", "--config", str(tmp_path / "gallery_all.toml"), "--seed", "7",
                                     "--out", str(out)], capture_output=True, text=True)
        codes.append(proc.returncode)
        report = json.loads(out.read_text())
        payloads.append(json.dumps(report["payload"], sort_keys=True, indent=2, ensure_ascii=False).encode())
    ok = {"exit 0": codes == [0, 0], "byte-identical payloads": payloads[0] == payloads[1]}
    verdict(12, "determinism of gallery runs", ok, time.perf_counter() - t0, 600)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))

"""Independent oracles for the derived reference values frozen into the test suite.

Uses sympy and plain numpy loops only; nothing from twistlab is imported, so the
numbers below cross-check the library rather than restate it.

    python scripts/oracles.py [--out tests/fixtures/oracles.json]
"""
import argparse
import itertools
import json
from pathlib import Path

import numpy as np
import sympy as sp


def flip_matrix(d):
    F = sp.zeros(d * d, d * d)
    for a in range(d):
        for b in range(d):
            F[b * d + a, a * d + b] = 1
    return F


def kron(A, B):
    return sp.kronecker_product(A, B)


def crossing_qflip_symbolic():
    """Crossing boundary identity for qF with Δ = diag(λ, 1/λ), J = swap∘conj, symbolically."""
    q, lam, t = sp.symbols("q lambda t", positive=True)
    d = 2
    F = q * flip_matrix(d)
    evs = [lam, 1 / lam]
    Dz = lambda z: sp.diag(*[e ** z for e in evs])
    I = sp.eye(d)
    lhs = kron(Dz(sp.I * t) * Dz(-sp.Rational(1, 2)), I) * F * kron(I, Dz(sp.Rational(1, 2)) * Dz(-sp.I * t))
    M = kron(I, Dz(sp.I * t)) * F * kron(Dz(-sp.I * t), I)
    U = sp.Matrix([[0, 1], [1, 0]])
    worst = 0
    for a, b, c, e in itertools.product(range(d), repeat=4):
        Jea, Jee = U[:, a], U[:, e]
        eb, ec = sp.eye(d)[:, b], sp.eye(d)[:, c]
        bra = kron(eb, Jee)
        ket = kron(Jea, ec)
        rhs = (bra.H * M * ket)[0, 0]
        diff = sp.simplify(sp.expand(lhs[a * d + b, c * d + e] - rhs, complex=False))
        worst = worst if diff == 0 else 1
    return worst == 0


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    q = sp.Rational(1, 2)
    out = {}

    # eigenvalues of 1 + qF at d = 2
    M = sp.eye(4) + q * flip_matrix(2)
    out["eig_1_plus_half_flip"] = sorted(float(v) for v, k in M.eigenvals().items() for _ in range(k))

    # ‖(1 + qF)(1 - F)‖: singular values of an exact matrix
    L = (sp.eye(4) + q * flip_matrix(2)) * (sp.eye(4) - flip_matrix(2))
    out["lr_obstruction_half_flip"] = float(sp.sqrt(max((L.H * L).eigenvals())))
    L0 = sp.eye(4) - flip_matrix(2)
    out["lr_obstruction_zero"] = float(sp.sqrt(max((L0.H * L0).eigenvals())))

    # [3]_q! by inversion counting
    inv = lambda p: sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])
    out["q_factorial_3_half"] = float(sum(q ** inv(p) for p in itertools.permutations(range(3))))
    out["q_factorial_3_half_product"] = float((1) * (1 + q) * (1 + q + q ** 2))

    # YBE residual of A⊗B, exact matrices then the 2-norm
    A = sp.diag(1, sp.Rational(3, 10))
    B = sp.diag(sp.Rational(1, 2), sp.Rational(1, 5))
    T = kron(A, B)
    I2 = sp.eye(2)
    T1, T2 = kron(T, I2), kron(I2, T)
    D = T1 * T2 * T1 - T2 * T1 * T2
    out["ybe_elem_tensor"] = float(sp.sqrt(max((D.H * D).eigenvals())))

    # L2 index for Δ_H = diag(4, 1/4), Δ_K = diag(16, 1/16)
    x = sp.Matrix(sp.diag(sp.Integer(4) ** sp.Rational(1, 4) * sp.Integer(16) ** sp.Rational(-1, 4),
                          sp.Integer(4) ** sp.Rational(-1, 4) * sp.Integer(16) ** sp.Rational(1, 4)))
    out["l2_index_diag"] = float(sum(abs(v) for v in x.diagonal()))
    out["l2_index_closed_form"] = float(sp.sqrt(2) / 2 + sp.sqrt(2))

    # crossing for qF, symbolic
    out["qflip_crossing_symbolic_zero"] = crossing_qflip_symbolic()

    # P_n for T = ±1 and T = 0 with d = 1: recursion by hand
    def p_scalar(c, n):
        P = 1
        for m in range(2, n + 1):
            P = P * sum(c ** k for k in range(m))
        return P
    out["p_identity"] = [int(p_scalar(1, n)) for n in range(1, 6)]
    out["p_neg_identity"] = [int(p_scalar(-1, n)) for n in range(1, 6)]

    # flip eigenvalues, plain numpy
    F = np.array(flip_matrix(2), dtype=float)
    out["eig_flip"] = sorted(np.linalg.eigvalsh(F).round(12).tolist())

    text = json.dumps(out, indent=2, sort_keys=True)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n")


if __name__ == "__main__":
    main()

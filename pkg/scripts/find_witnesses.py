"""Seeded search for failure witnesses of the non-crossing twist qE⊗E, frozen as test fixtures.

    python scripts/find_witnesses.py [--seed 2024] [--out tests/fixtures/witnesses.json]
"""
import argparse
import json
from pathlib import Path

import numpy as np

from twistlab.fock import build
from twistlab.modular_verify import locality_residual, tomita_consistency
from twistlab.npoint import kms_shift_check
from twistlab.standard_subspace import diagonal_subspace
from twistlab.twist import DEFAULT_T_GRID, gallery, n_crossing_deviation

GRID = tuple(np.linspace(-2.0, 2.0, 8))


def cvec(rng, m):
    return rng.standard_normal(m) + 1j * rng.standard_normal(m)


def enc(v):
    return [[float(z.real), float(z.imag)] for z in np.asarray(v).reshape(-1)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--draws", type=int, default=50)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    T = gallery("proj_pair", q=0.5, E=np.diag([1.0, 0.0]))
    H = diagonal_subspace([4.0, 0.25])
    FS = build(T, 4)

    best = (0.0, None)
    for _ in range(args.draws):
        vs = [cvec(rng, 2) for _ in range(4)]
        r = kms_shift_check(FS, H, vs, GRID)
        if r > best[0]:
            best = (r, vs)
    kms = {"residual": best[0], "vectors": [enc(v) for v in best[1]], "t_grid": list(GRID)}

    bestc = (0.0, None)
    for _ in range(args.draws):
        vecs = [cvec(rng, 2), cvec(rng, 4), cvec(rng, 4), cvec(rng, 2)]
        r = max(n_crossing_deviation(T, H, *vecs, t, n=2) for t in DEFAULT_T_GRID)
        if r > bestc[0]:
            bestc = (r, vecs)
    ncross = {"residual": bestc[0], "n": 2, "vectors": [enc(v) for v in bestc[1]]}

    tc = tomita_consistency(FS, H, 3)
    loc = locality_residual(FS, H)
    out = {
        "twist": {"name": "proj_pair", "q": 0.5, "E": "diag(1,0)"},
        "subspace": {"delta_eigenvalues": [4.0, 0.25], "j": "swap_conjugation"},
        "kms_4pt": kms,
        "n_crossing_continuation": ncross,
        "tomita_match_by_degree": {str(k): v for k, v in tc["match_by_degree"].items()},
        "locality": {"commutator": loc["commutator"],
                     "ncrossing_by_n": {str(k): v for k, v in loc["ncrossing_by_n"].items()}},
    }
    text = json.dumps(out, indent=2, sort_keys=True)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n")


if __name__ == "__main__":
    main()

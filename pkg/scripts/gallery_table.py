"""Equivalence table for the shipped gallery: the three standardness verdicts and the
degree at which the Tomita match first fails.

    python scripts/gallery_table.py [--seed 0] [--json out.json]
"""
import argparse
import json

import numpy as np

from twistlab.cli import gallery_members
from twistlab.config import parse_config
from twistlab.errors import PreconditionError
from twistlab.modular_verify import equivalence_verdicts
from twistlab.twist import classify, compatibility_residual


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", default=None)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    cfg = parse_config({"member": [{k: v for k, v in m.items() if k != "comment"} for m in gallery_members()]})
    rows = []
    head = f"{'member':16s} {'expect':12s} {'class':10s} {'tomita/kms':>10s} {'ybe+cross':>10s} {'locality':>10s} {'degree':>6s}"
    print(head)
    print("-" * len(head))
    for m in cfg.members:
        H = m.subspace
        if H is None:
            continue
        verdict = classify(m.twist, 4).verdict
        if compatibility_residual(m.twist, H) > 1e-10 * (1 + np.linalg.norm(H.delta_matrix, 2) ** 2):
            rows.append({"member": m.name, "class": verdict, "compatible": False})
            print(f"{m.name:16s} {str(m.expect):12s} {verdict:10s} {'incompatible':>10s}")
            continue
        vs = [rng.standard_normal(m.twist.d) + 1j * rng.standard_normal(m.twist.d) for _ in range(4)]
        try:
            res = equivalence_verdicts(m.name, m.twist, H, vs)
        except PreconditionError as exc:
            print(f"{m.name:16s} skipped: {exc}")
            continue
        v = res.verdicts
        mark = {True: "yes", False: "no"}
        print(f"{m.name:16s} {str(m.expect):12s} {verdict:10s} {mark[v['tomita_kms']]:>10s} "
              f"{mark[v['ybe_crossing']]:>10s} {mark[v['locality']]:>10s} {str(res.detection_degree or '-'):>6s}")
        rows.append({"member": m.name, "class": verdict, "compatible": True, "verdicts": v,
                     "agree": res.agree, "detection_degree": res.detection_degree,
                     "residuals": {k: float(x) for k, x in res.residuals.items()}})
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2, sort_keys=True)


if __name__ == "__main__":
    main()

"""Command-line front end: ``twistlab run | demo | classify | npoint``.

Exit codes: 0 all blocking checks pass, 1 a check failed, 2 configuration
error, 3 resource guard exceeded.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import platform
import sys
import time
from pathlib import Path

import numpy as np
import tomli_w

from . import __version__
from .config import SUITES, load_config, load_document, parse_inline_twist, twist_from_spec
from .errors import GuardError, PreconditionError, TruncationError, ValidationError
from .fock import build
from .npoint import enumerate_diagrams, evaluate_diagram, wightman
from .standard_subspace import diagonal_subspace, generic_subspace, rotate
from .suites import run_member
from .tensor_core import matrix_to_json
from .twist import classify

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_GUARD = 0, 1, 2, 3


def payload_bytes(payload: dict) -> bytes:
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False).encode()


def run(cfg, suites=None, seed=None, out=None, stream=None) -> tuple[dict, int]:
    """Execute the configured suites; returns the report and the exit code.

    Per-check lines and a summary go to `stream` when one is given."""
    seed = cfg.seed if seed is None else seed
    suites = tuple(suites) if suites else cfg.suites
    children = np.random.SeedSequence(seed).spawn(len(cfg.members))
    members, timing = [], {}
    failed = False
    t_all = time.perf_counter()
    for m, ss in zip(cfg.members, children):
        t0 = time.perf_counter()
        checks = run_member(m, cfg, np.random.default_rng(ss), suites)
        timing[m.name] = round(time.perf_counter() - t0, 3)
        members.append({
            "name": m.name,
            "twist": m.twist.label,
            "expect": m.expect,
            "checks": [c.as_dict() for c in checks],
        })
        for c in checks:
            failed |= c.blocking
            if stream is not None:
                res = "-" if c.residual is None else f"{c.residual:.3e}"
                thr = "-" if c.threshold is None else f"{c.threshold:.0e}"
                print(f"{c.status.upper():5s} {m.name}/{c.name} residual={res} threshold={thr} [{c.mode}]", file=stream)
    payload = {
        "schema": SCHEMA,
        "seed": seed,
        "suites": list(suites),
        "cutoffs": {"n_max": cfg.cutoffs.n_max, "N": cfg.cutoffs.N, "max_degree": cfg.cutoffs.max_degree},
        "samples": cfg.samples,
        "config": _echo(cfg.source),
        "members": members,
        "ok": not failed,
    }
    report = {
        "payload": payload,
        "metadata": {
            "payload_sha256": hashlib.sha256(payload_bytes(payload)).hexdigest(),
            "elapsed_seconds": round(time.perf_counter() - t_all, 3),
            "member_seconds": timing,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
            "python": platform.python_version(),
            "numpy": np.__version__,
            "twistlab": __version__,
        },
    }
    out = out or cfg.out
    if out:
        Path(out).write_text(json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False))
    if stream is not None:
        n_checks = sum(len(m["checks"]) for m in members)
        print(f"{'OK' if not failed else 'FAILED'}: {len(members)} members, {n_checks} checks", file=stream)
    return report, EXIT_FAIL if failed else EXIT_OK


def _echo(obj):
    """Config echo with values made JSON-serialisable."""
    if isinstance(obj, dict):
        return {str(k): _echo(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_echo(v) for v in obj]
    if hasattr(obj, "isoformat"):
        return obj.isoformat()
    return obj


# --- demo gallery --------------------------------------------------------------

def _subspace_spec(H) -> dict:
    return {
        "dim": H.dim,
        "delta_eigenvalues": [float(x) for x in H.delta.eigenvalues],
        "delta_basis": matrix_to_json(H.delta.eigenbasis),
        "j": {"kind": "matrix", "matrix": matrix_to_json(H.j.unitary_part)},
    }


def _generic_unitary() -> np.ndarray:
    c, s = np.cos(0.7), np.sin(0.7)
    return np.array([[c, -s * np.exp(0.4j)], [s, c * np.exp(0.4j)]])


def gallery_members() -> list[dict]:
    """The shipped gallery with its expectation matrix."""
    Hg = _subspace_spec(generic_subspace(4.0, _generic_unitary()))
    Hd = {"dim": 2, "delta_eigenvalues": [4.0, 0.25], "delta_basis": "identity", "j": {"kind": "swap_conjugation"}}
    Kd = {"dim": 2, "delta_eigenvalues": [16.0, 0.0625], "delta_basis": "identity", "j": {"kind": "swap_conjugation"}}
    K_rot = _subspace_spec(rotate(diagonal_subspace([16.0, 1 / 16.0]), _generic_unitary()))
    H3 = {"dim": 3, "delta_eigenvalues": [2.0, 1.0, 0.5], "delta_basis": "identity", "j": {"kind": "swap_conjugation"}}
    e1 = [[1.0, 0.0], [0.0, 0.0]]

    def g(name, d=2, **params):
        return {"kind": "gallery", "name": name, "d": d, "params": params}

    return [
        {"name": "zero", "comment": "Full Fock space: P_n = 1",
         "twist": g("zero"), "subspace": Hg, "expect": "standard", "expect_braided": True},
        {"name": "q_flip_plus", "comment": "q-deformed flip, q = 0.5",
         "twist": g("q_flip", q=0.5), "subspace": Hg, "expect": "standard", "expect_braided": True},
        {"name": "q_flip_minus", "comment": "q-deformed flip, q = -0.5",
         "twist": g("q_flip", q=-0.5), "subspace": Hg, "expect": "standard", "expect_braided": True},
        {"name": "flip", "comment": "Bosonic flip, non-strict",
         "twist": g("flip"), "subspace": Hg, "expect": "standard", "expect_braided": True},
        {"name": "neg_flip", "comment": "Fermionic flip, non-strict",
         "twist": g("neg_flip"), "subspace": Hg, "expect": "standard", "expect_braided": True},
        {"name": "flip_sandwich", "comment": "F(A⊗A) with A commuting with Δ and J, d = 3",
         "twist": g("flip_sandwich", d=3, A=[[0.8, 0, 0], [0, 0.5, 0], [0, 0, 0.8]]),
         "subspace": H3, "expect": "standard", "expect_braided": True},
        {"name": "identity", "comment": "T = 1: P_n = n!, braided but not crossing symmetric",
         "twist": g("identity"), "subspace": Hd, "expect": "nonstandard", "expect_braided": True},
        {"name": "neg_identity", "comment": "T = -1: P_n = 0 for n >= 2",
         "twist": g("neg_identity"), "subspace": Hd, "expect": "nonstandard", "expect_braided": True},
        {"name": "elem_tensor", "comment": "A⊗B with diagonal A, B: strict, not braided",
         "twist": g("elem_tensor", A=[[1.0, 0], [0, 0.3]], B=[[0.5, 0], [0, 0.2]]),
         "subspace": Hd, "expect": "nonstandard", "expect_braided": False},
        {"name": "proj_pair", "comment": "qE⊗E, braided and compatible, not crossing symmetric",
         "twist": g("proj_pair", q=0.5, E=e1), "subspace": Hd, "expect": "nonstandard", "expect_braided": True},
        {"name": "q_flip_nuclear", "comment": "Trace-norm identity for a diagonal pair (H, K)",
         "twist": g("q_flip", q=0.5), "subspace": Hd, "subspace_k": Kd, "expect": "standard",
         "expect_braided": True},
        {"name": "nuclear_gate", "comment": "Diagonal twist with K rotated out of the eigenbasis",
         "twist": g("elem_tensor", A=[[1.0, 0], [0, 0.3]], B=[[0.5, 0], [0, 0.2]]),
         "subspace": Hd, "subspace_k": K_rot, "expect_gate": True, "expect_braided": False},
    ]


def demo(out_dir) -> list[Path]:
    """Write one spec per gallery member plus gallery_all.toml."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    members = gallery_members()
    base = {"seed": 7, "suites": ["all"], "samples": 20, "cutoffs": {"n_max": 5, "N": 4, "max_degree": 3}}
    for mem in members:
        body = {k: v for k, v in mem.items() if k != "comment"}
        doc = {**base, "member": [body]}
        p = out / f"{mem['name']}.toml"
        p.write_text(f"# {mem['comment']}\n" + tomli_w.dumps(doc))
        written.append(p)
    doc = {**base, "member": [{k: v for k, v in m.items() if k != "comment"} for m in members]}
    p = out / "gallery_all.toml"
    p.write_text("# Every gallery member with its expectation\n" + tomli_w.dumps(doc))
    written.append(p)
    return written


# --- argument handling ----------------------------------------------------------

def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.suite:
        if args.suite != "all" and args.suite not in SUITES:
            raise ValidationError(f"unknown suite {args.suite!r}")
    suites = None if not args.suite or args.suite == "all" else (args.suite,)
    _, code = run(cfg, suites=suites, seed=args.seed, out=args.out, stream=sys.stdout)
    return code


def _cmd_demo(args) -> int:
    try:
        for p in demo(args.out):
            print(p)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def _cmd_classify(args) -> int:
    p = Path(args.twist)
    if p.exists():
        doc = load_document(p)
        T = twist_from_spec(doc.get("twist", doc), p.parent)
    else:
        T = parse_inline_twist(args.twist)
    rep = classify(T, args.nmax)
    print(json.dumps({"twist": T.label, "ybe_residual": T.ybe_residual, **rep.as_dict()}, indent=2))
    return EXIT_OK


def _cmd_npoint(args) -> int:
    cfg = load_config(args.config)
    m = cfg.members[0]
    if m.subspace is None:
        raise ValidationError("npoint needs a subspace in the first member")
    if args.order % 2 or args.order < 2:
        raise ValidationError("order must be a positive even number")
    n = args.order // 2
    rng = np.random.default_rng(cfg.seed if args.seed is None else args.seed)
    d = m.twist.d
    vs = [rng.standard_normal(d) + 1j * rng.standard_normal(d) for _ in range(args.order)]
    FS = build(m.twist, max(n, 1))
    diagrams = []
    total = 0j
    for D in enumerate_diagrams(n):
        val = evaluate_diagram(D, m.twist, m.subspace, vs)
        total += val
        diagrams.append({"pairs": [list(p) for p in D.pairs], "crossings": D.crossing_count,
                         "value": [val.real, val.imag]})
    W = wightman(FS, m.subspace, vs)
    print(json.dumps({
        "member": m.name, "order": args.order,
        "vectors": [[[z.real, z.imag] for z in v] for v in vs],
        "diagrams": diagrams,
        "diagram_sum": [total.real, total.imag],
        "wightman": [W.real, W.imag],
        "residual": abs(total - W),
    }, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="twistlab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run verification suites from a config")
    r.add_argument("--config", required=True)
    r.add_argument("--suite", default=None, help="one of " + ", ".join(SUITES + ("all",)))
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--out", default=None)
    r.set_defaults(func=_cmd_run)
    d = sub.add_parser("demo", help="write the gallery spec files")
    d.add_argument("--out", required=True)
    d.set_defaults(func=_cmd_demo)
    c = sub.add_parser("classify", help="positivity classification of a twist")
    c.add_argument("--twist", required=True, help="spec file or 'name:key=value,...'")
    c.add_argument("--nmax", type=int, default=5)
    c.set_defaults(func=_cmd_classify)
    n = sub.add_parser("npoint", help="per-diagram n-point values as JSON")
    n.add_argument("--config", required=True)
    n.add_argument("--order", type=int, required=True)
    n.add_argument("--seed", type=int, default=None)
    n.set_defaults(func=_cmd_npoint)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GuardError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ValidationError, TruncationError, PreconditionError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

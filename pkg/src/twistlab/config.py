"""Run configuration: dataclasses and TOML/JSON parsing of twist and subspace specs."""
from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .standard_subspace import StandardSubspace, subspace_from_spec
from .tensor_core import as_matrix, load_matrix, matrix_from_json
from .twist import GALLERY_NAMES, Twist, gallery

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

SUITES = ("classify", "fock", "npoint", "modular", "nuclearity")
EXPECTATIONS = ("standard", "nonstandard")


@dataclass(frozen=True)
class Cutoffs:
    n_max: int = 5
    N: int = 4
    max_degree: int = 3


@dataclass(frozen=True)
class Member:
    name: str
    twist: Twist
    subspace: StandardSubspace | None = None
    subspace_k: StandardSubspace | None = None
    expect: str | None = None
    expect_braided: bool | None = None
    expect_gate: bool = False
    spec: dict = field(default_factory=dict, repr=False, compare=False)


@dataclass(frozen=True)
class RunConfig:
    members: tuple
    suites: tuple = SUITES
    cutoffs: Cutoffs = Cutoffs()
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    samples: int = 20
    out: str | None = None
    source: dict = field(default_factory=dict, repr=False, compare=False)


def load_document(path) -> dict:
    """Read a TOML (or JSON, by extension) document."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from exc
    try:
        if p.suffix.lower() == ".json":
            return json.loads(text)
        return tomllib.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ValidationError(f"cannot parse {path}: {exc}") from exc


def _param(value, base_dir):
    if isinstance(value, dict) and {"rows", "cols", "data"} <= set(value):
        return matrix_from_json(value)
    if isinstance(value, str) and value.endswith(".json"):
        p = Path(value)
        return load_matrix(p if p.is_absolute() or base_dir is None else Path(base_dir) / p)
    if isinstance(value, list):
        return np.asarray(value, dtype=complex)
    return value


def twist_from_spec(obj: dict, base_dir=None) -> Twist:
    """{"kind": "gallery"|"matrix", "name", "params", "d", "matrix_file"}."""
    if not isinstance(obj, dict):
        raise ValidationError("twist spec must be a table")
    kind = obj.get("kind", "gallery")
    if kind == "gallery":
        name = obj.get("name")
        if name not in GALLERY_NAMES:
            raise ValidationError(f"unknown gallery twist {name!r}")
        params = {k: _param(v, base_dir) for k, v in obj.get("params", {}).items()}
        return gallery(name, int(obj.get("d", 2)), **params)
    if kind == "matrix":
        if "matrix_file" in obj:
            p = Path(obj["matrix_file"])
            M = load_matrix(p if p.is_absolute() or base_dir is None else Path(base_dir) / p)
        elif "matrix" in obj:
            M = matrix_from_json(obj["matrix"])
        else:
            raise ValidationError("matrix twist needs matrix_file or matrix")
        M = as_matrix(M)
        d = int(round(np.sqrt(M.shape[0])))
        return Twist(int(obj.get("d", d)), M, obj.get("label", "matrix"))
    raise ValidationError(f"unknown twist kind {kind!r}")


def parse_inline_twist(text: str) -> Twist:
    """'q_flip:q=0.5,d=2' style shorthand for gallery twists with scalar parameters."""
    name, _, rest = text.partition(":")
    params: dict = {}
    d = 2
    for item in filter(None, rest.split(",")):
        key, _, val = item.partition("=")
        if key == "d":
            d = int(val)
        else:
            try:
                params[key] = float(val)
            except ValueError as exc:
                raise ValidationError(f"bad parameter {item!r}") from exc
    return twist_from_spec({"kind": "gallery", "name": name, "d": d, "params": params})


def _member(obj: dict, index: int, base_dir) -> Member:
    if "twist" not in obj:
        raise ValidationError(f"member {index} has no twist")
    T = twist_from_spec(obj["twist"], base_dir)
    H = subspace_from_spec(obj["subspace"], base_dir) if "subspace" in obj else None
    K = subspace_from_spec(obj["subspace_k"], base_dir) if "subspace_k" in obj else None
    if H is not None and H.dim != T.d:
        raise ValidationError(f"member {index}: subspace dimension {H.dim} != twist dimension {T.d}")
    expect = obj.get("expect")
    if expect is not None and expect not in EXPECTATIONS:
        raise ValidationError(f"member {index}: expect must be one of {EXPECTATIONS}")
    eb = obj.get("expect_braided")
    return Member(
        name=str(obj.get("name", f"member{index}")),
        twist=T,
        subspace=H,
        subspace_k=K,
        expect=expect,
        expect_braided=None if eb is None else bool(eb),
        expect_gate=bool(obj.get("expect_gate", False)),
        spec=obj,
    )


def parse_config(doc: dict, base_dir=None) -> RunConfig:
    if not isinstance(doc, dict):
        raise ValidationError("config must be a table")
    raw = doc.get("member")
    if raw is None:
        raw = [doc] if "twist" in doc else []
    if isinstance(raw, dict):
        raw = [raw]
    if not raw:
        raise ValidationError("config defines no members")
    members = tuple(_member(m, i, base_dir) for i, m in enumerate(raw))
    names = [m.name for m in members]
    if len(set(names)) != len(names):
        raise ValidationError("member names must be unique")
    suites = doc.get("suites", ["all"])
    if isinstance(suites, str):
        suites = [suites]
    suites = SUITES if "all" in suites else tuple(suites)
    bad = [s for s in suites if s not in SUITES]
    if bad:
        raise ValidationError(f"unknown suites {bad}")
    c = doc.get("cutoffs", {})
    try:
        cut = Cutoffs(int(c.get("n_max", 5)), int(c.get("N", 4)), int(c.get("max_degree", 3)))
        tol = {str(k): float(v) for k, v in doc.get("tolerances", {}).items()}
        seed = int(doc.get("seed", 0))
        samples = int(doc.get("samples", 20))
    except (TypeError, ValueError, AttributeError) as exc:
        raise ValidationError(f"bad config value: {exc}") from exc
    return RunConfig(members, tuple(suites), cut, tol, seed, samples, doc.get("out"), doc)


def load_config(path) -> RunConfig:
    return parse_config(load_document(path), Path(path).parent)

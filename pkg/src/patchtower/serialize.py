"""Canonical JSON forms for every file format the package reads or writes.

Serialization is bit-stable: exponent vectors are sorted
lexicographically, dictionary keys are sorted, and numbers are plain
ints, so identical objects always produce identical bytes.
"""

from __future__ import annotations

import json

import numpy as np

from .complexes import FreeComplex
from .errors import InvalidInput
from .linalg import Matrix
from .patcher import (
    FiniteModuleData,
    FreenessCertificate,
    PatchingTower,
    TowerBase,
    TowerLevel,
)
from .rings import KINDS, RingSpec, RingTowerElement, coefficient_ring, graded_ring, make_patch_ring


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


# -- ring specs and elements -------------------------------------------------


def spec_to_obj(spec: RingSpec) -> dict:
    return {"p": spec.p, "m": spec.m, "n": spec.n, "q": spec.q, "kind": spec.kind}


def spec_from_obj(obj) -> RingSpec:
    try:
        p, m, n, q, kind = obj["p"], obj["m"], obj["n"], obj["q"], obj["kind"]
    except (KeyError, TypeError) as exc:
        raise InvalidInput(f"malformed ring descriptor: {exc}") from exc
    if kind not in KINDS:
        raise InvalidInput(f"unknown ring kind {kind!r}")
    if kind == "coefficient":
        return coefficient_ring(p, m)
    if kind == "graded":
        return graded_ring(p, q)
    spec = make_patch_ring(p, m, n, q)
    if spec.kind != "patch":
        raise InvalidInput("patch descriptor with no variables")
    return spec


def element_to_obj(x: RingTowerElement) -> list:
    return [[list(e), c] for e, c in sorted(x.coeffs.items())]


def element_from_obj(spec: RingSpec, obj) -> RingTowerElement:
    try:
        coeffs = {tuple(int(v) for v in e): int(c) for e, c in obj}
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed element: {exc}") from exc
    return RingTowerElement(spec, coeffs)


def matrix_to_obj(a: Matrix) -> list:
    return [[element_to_obj(x) for x in row] for row in a.entries]


def matrix_from_obj(spec: RingSpec, obj, rows: int | None = None, cols: int | None = None) -> Matrix:
    if not isinstance(obj, list):
        raise InvalidInput("matrix must be a list of rows")
    entries = [[element_from_obj(spec, cell) for cell in row] for row in obj]
    m = Matrix(spec, entries) if entries else Matrix.zero(spec, rows or 0, cols or 0)
    if rows is not None and m.rows != rows:
        raise InvalidInput(f"matrix has {m.rows} rows, expected {rows}")
    if m.rows and cols is not None and m.cols != cols:
        raise InvalidInput(f"matrix has {m.cols} cols, expected {cols}")
    return m


# -- complexes ---------------------------------------------------------------


def complex_to_obj(c: FreeComplex) -> dict:
    return {
        "ring": spec_to_obj(c.spec),
        "lo": c.lo,
        "ranks": list(c.ranks),
        "differentials": [matrix_to_obj(d) for d in c.diffs],
    }


def complex_from_obj(obj) -> FreeComplex:
    try:
        spec = spec_from_obj(obj["ring"])
        lo = int(obj["lo"])
        ranks = [int(r) for r in obj["ranks"]]
        raw = obj["differentials"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed complex: {exc}") from exc
    if len(raw) != max(len(ranks) - 1, 0):
        raise InvalidInput("wrong number of differentials for the rank vector")
    diffs = [
        matrix_from_obj(spec, raw[i], rows=ranks[i + 1], cols=ranks[i])
        for i in range(len(raw))
    ]
    return FreeComplex(spec, lo, ranks, diffs)


# -- graded module files -----------------------------------------------------


def graded_module_to_obj(m) -> dict:
    return {
        "ring": spec_to_obj(m.ring),
        "gens": m.gens,
        "relations": matrix_to_obj(m.relations),
    }


def graded_module_from_obj(obj):
    from .graded import GradedModule

    try:
        spec = spec_from_obj(obj["ring"])
        gens = int(obj["gens"])
        rel = obj["relations"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed module file: {exc}") from exc
    relations = matrix_from_obj(spec, rel, rows=gens)
    if relations.rows == 0 and gens:
        relations = Matrix.zero(spec, gens, 0)
    return GradedModule(spec, gens, relations)


# -- truncated power-series elements ----------------------------------------


def rinf_to_obj(x: dict) -> list:
    return [[list(e), int(c)] for e, c in sorted(x.items())]


def rinf_from_obj(obj) -> dict:
    try:
        return {tuple(int(v) for v in e): int(c) for e, c in obj}
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed power-series element: {exc}") from exc


def int_matrix_to_obj(a: np.ndarray) -> list:
    return [[int(x) for x in row] for row in np.asarray(a)]


def int_matrix_from_obj(obj, rows: int | None = None) -> np.ndarray:
    if not isinstance(obj, list):
        raise InvalidInput("integer matrix must be a list of rows")
    if not obj:
        return np.zeros((rows or 0, 0), dtype=np.int64)
    out = np.array([[int(x) for x in row] for row in obj], dtype=np.int64)
    return out


# -- towers ------------------------------------------------------------------


def tower_to_obj(t: PatchingTower) -> dict:
    return {
        "params": {
            "p": t.p,
            "q": t.q,
            "r": t.r,
            "d": t.d,
            "precisions": [lev.precision for lev in t.levels],
            "rinf_degree": t.rinf_degree,
            "base_precision": t.base_precision,
        },
        "base": {
            "ring_ideal": [rinf_to_obj(x) for x in t.base.ideal],
            "module": {
                "gens": t.base.module.gens,
                "relations": int_matrix_to_obj(t.base.module.relations),
                "x_actions": [int_matrix_to_obj(a) for a in t.base.module.actions],
            },
        },
        "levels": [
            {
                "level": lev.level,
                "precision": lev.precision,
                "complex": complex_to_obj(lev.complex),
                "i_images": [rinf_to_obj(x) for x in lev.i_images],
                "phi_images": [rinf_to_obj(x) for x in lev.phi_images],
                "x_actions": {
                    str(k): [int_matrix_to_obj(a) for a in mats]
                    for k, mats in sorted(lev.x_actions.items())
                },
                "base_iso": int_matrix_to_obj(lev.base_iso),
            }
            for lev in t.levels
        ],
    }


def tower_from_obj(obj) -> PatchingTower:
    try:
        prm = obj["params"]
        p, q, r, d = int(prm["p"]), int(prm["q"]), int(prm["r"]), int(prm["d"])
        rinf_degree = int(prm["rinf_degree"])
        base_precision = int(prm["base_precision"])
        base_obj = obj["base"]
        raw_levels = obj["levels"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed tower file: {exc}") from exc
    g = q - r
    mod_obj = base_obj["module"]
    gens = int(mod_obj["gens"])
    module = FiniteModuleData(
        p,
        base_precision,
        gens,
        int_matrix_from_obj(mod_obj["relations"], rows=gens),
        tuple(int_matrix_from_obj(a) for a in mod_obj["x_actions"]),
    )
    if len(module.actions) != g:
        raise InvalidInput(f"base module needs {g} action matrices")
    base = TowerBase(
        ideal=[rinf_from_obj(x) for x in base_obj["ring_ideal"]],
        module=module,
    )
    levels = []
    for raw in raw_levels:
        i_images = [rinf_from_obj(x) for x in raw["i_images"]]
        phi_images = [rinf_from_obj(x) for x in raw["phi_images"]]
        if len(i_images) != q:
            raise InvalidInput(f"level {raw.get('level')} needs {q} structure images")
        if len(phi_images) != g:
            raise InvalidInput(f"level {raw.get('level')} needs {g} quotient images")
        levels.append(
            TowerLevel(
                level=int(raw["level"]),
                precision=int(raw["precision"]),
                complex=complex_from_obj(raw["complex"]),
                i_images=i_images,
                phi_images=phi_images,
                x_actions={
                    int(k): [int_matrix_from_obj(a) for a in mats]
                    for k, mats in raw["x_actions"].items()
                },
                base_iso=int_matrix_from_obj(raw["base_iso"], rows=gens),
            )
        )
    levels.sort(key=lambda lev: lev.level)
    return PatchingTower(
        p=p, q=q, r=r, d=d,
        rinf_degree=rinf_degree,
        base_precision=base_precision,
        base=base,
        levels=levels,
    )


# -- certificates ------------------------------------------------------------


def certificate_to_obj(cert: FreenessCertificate) -> dict:
    return {
        "precision": cert.precision,
        "rank": cert.rank,
        "checks": dict(sorted(cert.checks.items())),
        "tau": {str(k): v for k, v in sorted(cert.tau.items())},
        "chain": list(cert.chain),
        "limit_differentials": complex_to_obj(cert.limit.complex),
        "reductions": {
            str(k): complex_to_obj(c) for k, c in sorted(cert.reductions.items())
        },
        "i_images": [rinf_to_obj(x) for x in cert.limit.i_images],
        "phi_images": [rinf_to_obj(x) for x in cert.limit.phi_images],
        "used_basis_change": cert.limit.used_basis_change,
        "height_amplitude": cert.ha_obj,
        "valid": cert.valid,
    }

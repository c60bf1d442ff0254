"""JSON payloads: rationals as ``{"num", "den"}``, labels as stable text, indices 0-based."""
from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Any

import numpy as np

from .certify import CheckReport, RicciCertificate
from .classical import RootDatum
from .degeneration import ScalingFamily
from .lie_core import LieAlgebra, StructureTensor, parse_label
from .poly_reps import MonomialBasis, Representation, SubspaceSplit
from .rational import Q, qzeros

__all__ = [
    "rat_to_json",
    "rat_from_json",
    "matrix_to_json",
    "matrix_from_json",
    "algebra_to_json",
    "algebra_from_json",
    "representation_to_json",
    "representation_from_json",
    "split_to_json",
    "split_from_json",
    "family_to_json",
    "family_from_json",
    "certificate_to_json",
    "certificate_from_json",
    "report_to_json",
    "dumps",
    "sha256_file",
]


def rat_to_json(x) -> dict:
    x = Q(x)
    return {"num": x.numerator, "den": x.denominator}


def rat_from_json(obj) -> Fraction:
    if isinstance(obj, dict) and set(obj) == {"num", "den"}:
        if not isinstance(obj["num"], int) or not isinstance(obj["den"], int) or obj["den"] == 0:
            raise ValueError(f"bad rational {obj!r}")
        return Fraction(obj["num"], obj["den"])
    if isinstance(obj, int) and not isinstance(obj, bool):
        return Fraction(obj)
    raise ValueError(f"bad rational {obj!r}")


def _scalar_to_json(x):
    if isinstance(x, (Fraction, int, np.integer)) and not isinstance(x, bool):
        return rat_to_json(x)
    return float(x)


def _scalar_from_json(obj):
    if isinstance(obj, float):
        return obj
    return rat_from_json(obj)


def matrix_to_json(a) -> list:
    a = np.asarray(a)
    if a.ndim == 1:
        return [_scalar_to_json(v) for v in a]
    return [matrix_to_json(row) for row in a]


def matrix_from_json(obj) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise ValueError("matrix must be a nonempty list")
    rows = obj if isinstance(obj[0], list) else None
    if rows is None:
        vals = [_scalar_from_json(v) for v in obj]
        exact = all(isinstance(v, Fraction) for v in vals)
        return np.array(vals, dtype=object if exact else float)
    n = len(rows[0])
    if any(not isinstance(r, list) or len(r) != n for r in rows):
        raise ValueError("ragged matrix")
    vals = [[_scalar_from_json(v) for v in r] for r in rows]
    exact = all(isinstance(v, Fraction) for r in vals for v in r)
    if exact:
        out = qzeros((len(rows), n))
        for i, r in enumerate(vals):
            for j, v in enumerate(r):
                out[i, j] = v
        return out
    return np.array([[float(v) for v in r] for r in vals])


def _datum_to_json(d) -> dict | None:
    if d is None:
        return None
    out = d.to_json()
    out["note"] = d.note
    return out


def _datum_from_json(obj) -> RootDatum | None:
    if obj is None:
        return None
    return RootDatum(
        obj["family"],
        int(obj["rank"]),
        tuple(tuple(int(v) for v in r) for r in obj["positive_roots"]),
        tuple(int(v) for v in obj["simple_roots"]),
        obj.get("note", ""),
    )


def algebra_to_json(L: LieAlgebra) -> dict:
    return {
        "type": "lie_algebra",
        "dim": L.dim,
        "labels": [l.text for l in L.labels],
        "brackets": [
            {"i": i, "j": j, "k": k, "c": rat_to_json(c)} for (i, j, k), c in L.bracket.entries.items()
        ],
        "root_datum": _datum_to_json(L.root_meta),
    }


def algebra_from_json(obj, check: bool = True) -> LieAlgebra:
    if obj.get("type") != "lie_algebra":
        raise ValueError("not a lie_algebra payload")
    labels = tuple(parse_label(t) for t in obj["labels"])
    if len(labels) != obj["dim"]:
        raise ValueError("label count differs from dim")
    entries = {(b["i"], b["j"], b["k"]): rat_from_json(b["c"]) for b in obj["brackets"]}
    return LieAlgebra.from_brackets(labels, StructureTensor(len(labels), entries).entries, _datum_from_json(obj.get("root_datum")), check=check)


def _sparse_to_json(op) -> list:
    rows, cols = np.nonzero(np.asarray(op) != 0)
    return [[int(r), int(c), rat_to_json(op[r, c])] for r, c in zip(rows, cols)]


def representation_to_json(rep: Representation, split: SubspaceSplit | None = None) -> dict:
    basis = rep.basis_meta
    return {
        "type": "representation",
        "source": algebra_to_json(rep.source),
        "dim_V": rep.dim_V,
        "basis": {"nvars": basis.nvars, "degree": basis.degree} if isinstance(basis, MonomialBasis) else None,
        "operators": [_sparse_to_json(op) for op in rep.operators],
        "split": split_to_json(split) if split is not None else None,
    }


def representation_from_json(obj) -> tuple[Representation, SubspaceSplit | None]:
    if obj.get("type") != "representation":
        raise ValueError("not a representation payload")
    src = algebra_from_json(obj["source"])
    d = int(obj["dim_V"])
    ops = []
    for entries in obj["operators"]:
        op = qzeros((d, d))
        for r, c, v in entries:
            op[r, c] = rat_from_json(v)
        ops.append(op)
    b = obj.get("basis")
    basis = MonomialBasis(b["nvars"], b["degree"]) if b else None
    split = split_from_json(obj["split"]) if obj.get("split") else None
    return Representation(src, ops, basis), split


def split_to_json(s: SubspaceSplit) -> dict:
    return {"V1": list(s.V1), "V2": list(s.V2)}


def split_from_json(obj) -> SubspaceSplit:
    return SubspaceSplit(tuple(obj["V1"]), tuple(obj["V2"]))


def family_to_json(F: ScalingFamily) -> dict:
    return {"type": "scaling_family", "exponents": list(F.exponents), "constants": [rat_to_json(c) for c in F.constants]}


def family_from_json(obj) -> ScalingFamily:
    if obj.get("type") != "scaling_family":
        raise ValueError("not a scaling_family payload")
    return ScalingFamily(tuple(int(e) for e in obj["exponents"]), tuple(rat_from_json(c) for c in obj["constants"]))


def _jsonable(x):
    if isinstance(x, Fraction):
        return rat_to_json(x)
    if isinstance(x, np.ndarray):
        return matrix_to_json(x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict) or hasattr(x, "items"):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, LieAlgebra):
        return algebra_to_json(x)
    return x


def certificate_to_json(cert: RicciCertificate) -> dict:
    out = {
        "type": "ricci_certificate",
        "gram": matrix_to_json(cert.gram),
        "eigenvalues": [float(v) for v in cert.eigenvalues],
        "lambda_max": float(cert.lambda_max),
        "rho": rat_to_json(cert.rho) if cert.rho is not None else None,
        "perturbation": _jsonable(dict(cert.perturbation)),
        "pipeline": list(cert.pipeline),
        "algebra": algebra_to_json(cert.algebra),
        "lifted": None,
    }
    if cert.lifted is not None:
        lf = dict(cert.lifted)
        out["lifted"] = {
            "t": _jsonable(lf["t"]),
            "gram": matrix_to_json(lf["gram"]),
            "eigenvalues": [float(v) for v in lf["eigenvalues"]],
            "lambda_max": float(lf["lambda_max"]),
            "algebra": algebra_to_json(lf["algebra"]),
        }
    return out


def certificate_from_json(obj) -> RicciCertificate:
    if obj.get("type") != "ricci_certificate":
        raise ValueError("not a ricci_certificate payload")
    lifted = None
    if obj.get("lifted"):
        lf = obj["lifted"]
        lifted = {
            "t": _scalar_from_json(lf["t"]) if isinstance(lf["t"], (dict, float)) else lf["t"],
            "gram": matrix_from_json(lf["gram"]),
            "eigenvalues": tuple(float(v) for v in lf["eigenvalues"]),
            "lambda_max": float(lf["lambda_max"]),
            "algebra": algebra_from_json(lf["algebra"]),
        }
    pert = {}
    for k, v in obj.get("perturbation", {}).items():
        pert[k] = rat_from_json(v) if isinstance(v, dict) else v
    return RicciCertificate(
        algebra=algebra_from_json(obj["algebra"]),
        gram=matrix_from_json(obj["gram"]),
        eigenvalues=tuple(float(v) for v in obj["eigenvalues"]),
        lambda_max=float(obj["lambda_max"]),
        rho=rat_from_json(obj["rho"]) if obj.get("rho") is not None else None,
        perturbation=pert,
        pipeline=tuple(obj.get("pipeline", ())),
        lifted=lifted,
    )


def report_to_json(rep: CheckReport) -> dict:
    return {
        "type": "check_report",
        "theorem": rep.theorem,
        "passed": rep.passed,
        "conditions": [
            {"name": c.name, "passed": c.passed, "witness": _jsonable(c.witness), "note": c.note} for c in rep.conditions
        ],
    }


def dumps(obj: Any) -> str:
    """Deterministic JSON text (sorted keys, floats by shortest round-trip repr)."""
    return json.dumps(_jsonable(obj), sort_keys=True, indent=1) + "\n"


def sha256_file(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()

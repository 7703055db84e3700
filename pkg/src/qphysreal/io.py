"""JSON system/plant documents and realization reports."""
import json

import numpy as np

from .errors import DimensionMismatch, InputError
from .model import Plant, QuantumRealization, StateSpace

SYSTEM_KEYS = {"n", "n_u", "n_y", "A", "Bu", "C", "Bv1", "Bv2"}
PLANT_KEYS = {"n", "n_u", "n_y", "A", "Bu", "C", "Bw1", "Du", "Dw1", "Sw1"}
_REQUIRED = ("n", "n_u", "n_y", "A", "Bu", "C")


def _matrix(doc, key, rows, cols=None):
    try:
        m = np.array(doc[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{key} is not a numeric 2D array") from exc
    if m.size == 0:
        m = m.reshape(rows, 0 if cols is None else cols)
    if m.ndim != 2 or m.shape[0] != rows or (cols is not None and m.shape[1] != cols):
        want = f"{rows}x{cols}" if cols is not None else f"{rows} rows"
        raise DimensionMismatch(f"{key} must be {want}, got shape {m.shape}")
    return m


def _check_keys(doc, allowed, required):
    if not isinstance(doc, dict):
        raise InputError("document must be a JSON object")
    unknown = set(doc) - allowed
    if unknown:
        raise InputError(f"unknown keys: {sorted(unknown)}")
    missing = [k for k in required if k not in doc]
    if missing:
        raise InputError(f"missing keys: {missing}")
    for k in ("n", "n_u", "n_y"):
        if not isinstance(doc[k], int) or isinstance(doc[k], bool):
            raise InputError(f"{k} must be an integer")


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc


def parse_system(doc):
    """Return ``(StateSpace, bv1 or None, bv2 or None)`` from a system document."""
    _check_keys(doc, SYSTEM_KEYS, _REQUIRED)
    n, n_u, n_y = doc["n"], doc["n_u"], doc["n_y"]
    ss = StateSpace(_matrix(doc, "A", n, n), _matrix(doc, "Bu", n, n_u),
                    _matrix(doc, "C", n_y, n))
    bv1 = _matrix(doc, "Bv1", n, n_y) if "Bv1" in doc else None
    bv2 = _matrix(doc, "Bv2", n) if "Bv2" in doc else None
    return ss, bv1, bv2


def parse_plant(doc):
    _check_keys(doc, PLANT_KEYS, _REQUIRED + ("Bw1", "Du", "Dw1"))
    n, n_u, n_y = doc["n"], doc["n_u"], doc["n_y"]
    bw1 = _matrix(doc, "Bw1", n)
    n_w = bw1.shape[1]
    return Plant(
        a=_matrix(doc, "A", n, n), bu=_matrix(doc, "Bu", n, n_u), bw1=bw1,
        c=_matrix(doc, "C", n_y, n), du=_matrix(doc, "Du", n_y, n_u),
        dw1=_matrix(doc, "Dw1", n_y, n_w),
        s_w1=_matrix(doc, "Sw1", n_w, n_w) if "Sw1" in doc else None,
    )


def complex_pairs(m):
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def system_doc(ss):
    return {"n": ss.n, "n_u": ss.n_u, "n_y": ss.n_y,
            "A": ss.a.tolist(), "Bu": ss.bu.tolist(), "C": ss.c.tolist()}


def realization_doc(qr, report, witness=None, echo=None):
    doc = {"input": echo} if echo is not None else {}
    doc.update(system_doc(qr.ss))
    doc.update({
        "Bv1": qr.bv1.tolist(),
        "Bv2": qr.bv2.tolist(),
        "n_v1": qr.n_v1,
        "n_v2": qr.n_v2,
        "realizable": report.realizable,
        "residual_dynamics": report.residual_dynamics,
        "residual_feedthrough": report.residual_feedthrough,
    })
    if witness is not None:
        doc["R"] = np.asarray(witness.r).tolist()
        doc["Lambda"] = complex_pairs(witness.coupling)
    return doc


def write_json(doc, path=None):
    text = json.dumps(doc, indent=2)
    if path is None:
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")

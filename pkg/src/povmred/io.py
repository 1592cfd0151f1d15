"""JSON (de)serialization.

Complex numbers are written as ``[re, im]`` pairs.  Matrices are nested
row-major lists of such pairs.  Parsing errors raise :class:`SchemaError`
with the path of the offending field.
"""

import json
import math
from pathlib import Path

import numpy as np

from povmred.errors import ValidationError
from povmred.fuzzy_order import MarkovMatrix, OrderVerdict
from povmred.instruments import ConservationVerdict, KrausInstrument
from povmred.povm import DiscretePovm, StateEnsemble, validate_density, validate_povm
from povmred.reduction import ReductionReport


class SchemaError(ValidationError):
    pass


def load_json(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False)


def _real(x: float) -> float:
    return float(x) + 0.0  # normalizes -0.0


def complex_to_json(z) -> list:
    return [_real(z.real), _real(z.imag)]


def matrix_to_json(m) -> list:
    m = np.asarray(m, dtype=np.complex128)
    return [[complex_to_json(z) for z in row] for row in m]


def _parse_complex(value, where: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        return complex(value[0], value[1])
    raise SchemaError(f"{where}: expected [re, im], got {value!r}")


def matrix_from_json(value, where: str, dim: "int | None" = None) -> np.ndarray:
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise SchemaError(f"{where}: expected a non-empty list of rows")
    n = len(value)
    if dim is not None and n != dim:
        raise SchemaError(f"{where}: {n} rows, expected dim {dim}")
    out = np.empty((n, n), dtype=np.complex128)
    for i, row in enumerate(value):
        if len(row) != n:
            raise SchemaError(f"{where}[{i}]: {len(row)} entries, expected {n}")
        for j, z in enumerate(row):
            out[i, j] = _parse_complex(z, f"{where}[{i}][{j}]")
    return out


def _require(d, key: str, where: str, kind=None):
    if not isinstance(d, dict):
        raise SchemaError(f"{where}: expected an object")
    if key not in d:
        raise SchemaError(f"{where}: missing field {key!r}")
    value = d[key]
    if kind is not None and not isinstance(value, kind):
        raise SchemaError(f"{where}.{key}: expected {getattr(kind, '__name__', kind)}")
    return value


def _dim(d, where: str) -> int:
    dim = _require(d, "dim", where, int)
    if isinstance(dim, bool) or dim < 1:
        raise SchemaError(f"{where}.dim: must be a positive integer")
    return dim


# POVMs


def povm_to_json(povm: DiscretePovm) -> dict:
    return {
        "dim": povm.dim,
        "outcomes": [
            {"label": label, "matrix": matrix_to_json(effect)} for label, effect in povm.items()
        ],
    }


def povm_from_json(d, tol=None, where: str = "povm") -> DiscretePovm:
    dim = _dim(d, where)
    outcomes = _require(d, "outcomes", where, list)
    labels, mats = [], []
    for i, o in enumerate(outcomes):
        at = f"{where}.outcomes[{i}]"
        labels.append(_require(o, "label", at, str))
        mats.append(matrix_from_json(_require(o, "matrix", at), f"{at}.matrix", dim))
    return validate_povm(mats, labels, tol)


def state_to_json(rho) -> dict:
    rho = np.asarray(rho)
    return {"dim": rho.shape[0], "matrix": matrix_to_json(rho)}


def state_from_json(d, tol=None, where: str = "state") -> np.ndarray:
    dim = _dim(d, where)
    return validate_density(matrix_from_json(_require(d, "matrix", where), f"{where}.matrix", dim), tol)


def instrument_to_json(inst: KrausInstrument) -> dict:
    return {
        "dim": inst.dim,
        "outcomes": [
            {"label": label, "kraus": [matrix_to_json(k) for k in fam]}
            for label, fam in zip(inst.labels, inst.kraus)
        ],
    }


def instrument_from_json(d, tol=None, where: str = "instrument") -> KrausInstrument:
    dim = _dim(d, where)
    outcomes = _require(d, "outcomes", where, list)
    labels, fams = [], []
    for i, o in enumerate(outcomes):
        at = f"{where}.outcomes[{i}]"
        labels.append(_require(o, "label", at, str))
        kraus = _require(o, "kraus", at, list)
        fams.append([matrix_from_json(k, f"{at}.kraus[{j}]", dim) for j, k in enumerate(kraus)])
    return KrausInstrument.from_kraus(fams, labels, tol)


def markov_to_json(k: MarkovMatrix) -> dict:
    return {
        "rows": list(k.rows),
        "cols": list(k.cols),
        "matrix": [[_real(v) for v in row] for row in k.matrix],
    }


def markov_from_json(d, where: str = "markov") -> MarkovMatrix:
    rows = _require(d, "rows", where, list)
    cols = _require(d, "cols", where, list)
    m = _require(d, "matrix", where, list)
    try:
        arr = np.array(m, dtype=float)
    except (TypeError, ValueError):
        raise SchemaError(f"{where}.matrix: expected a numeric 2-D array") from None
    if arr.shape != (len(rows), len(cols)):
        raise SchemaError(f"{where}.matrix: shape {arr.shape} does not match labels")
    return MarkovMatrix(arr, tuple(rows), tuple(cols)).check()


def ensemble_to_json(ens: StateEnsemble) -> dict:
    return {
        "dim": ens.dim,
        "informationally_complete": ens.informationally_complete,
        "weights": [_real(w) for w in ens.weights],
        "states": [matrix_to_json(s) for s in ens.states],
        "pivotal": matrix_to_json(ens.pivotal),
    }


# Reports


def report_to_json(report: ReductionReport) -> dict:
    return {
        "groups": dict(report.groups),
        "dropped": list(report.dropped),
        "reduced": povm_to_json(report.reduced),
        "h": {k: _real(v) for k, v in report.h.items()},
    }


def report_from_json(d, tol=None) -> ReductionReport:
    groups = _require(d, "groups", "report", dict)
    dropped = _require(d, "dropped", "report", list)
    h = _require(d, "h", "report", dict)
    reduced = povm_from_json(_require(d, "reduced", "report"), tol, "report.reduced")
    return ReductionReport(dict(groups), reduced, tuple(dropped), {k: float(v) for k, v in h.items()})


def order_to_json(v: OrderVerdict) -> dict:
    return {
        "holds": v.holds,
        "residual": _real(v.residual),
        "borderline": v.borderline,
        "witness": markov_to_json(v.witness) if v.witness is not None else None,
    }


def conservation_to_json(v: ConservationVerdict) -> dict:
    c1 = v.condition1
    out = {
        "condition1": {
            "holds_for_projection": v.condition1_projection,
            "exhaustive_search": (
                "not attempted" if v.condition1_exhaustive is None else v.condition1_exhaustive
            ),
            "verdict": "unknown" if c1 is None else c1,
        },
        "condition2": v.condition2,
        "borderline": v.borderline,
        "bijection": v.evidence.get("bijection"),
    }
    if "statistic" in v.evidence:
        out["condition1"]["statistic"] = v.evidence["statistic"]
    if "disagreement" in v.evidence:
        out["disagreement"] = v.evidence["disagreement"]
    return out


def extended_real(x: float):
    """JSON-safe extended real: infinities become the strings ``"inf"``/``"-inf"``."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return _real(x)

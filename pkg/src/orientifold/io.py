"""Problem files (TOML), built-in presets and deterministic JSON output.

A problem file has up to four tables::

    [group]     preset = "z2"             or  table = [[...]], eps = [...], labels = [...]
    [cover]     n_points = 2, action = [[0, 1], [1, 0]], sets = [[0], [1]]
    [cocycle]   n = 2, by_element = { "-1" = [[-1, 0], [0, -1]] }
                or [[cocycle.values]] entries with gammas / indices / point / matrix
    [options]   coefficients = "Z", degree = 2, denom = 8, budget = 1048576

Unknown keys anywhere are schema errors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

try:  # Python 3.11+
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

from .cech import Cochain, EquivariantCover, cells
from .errors import CoverMismatch, DomainMismatch, OrientifoldError
from .groups import CircleRational, FiniteGroup, IntegersTwisted, ZTwo, make_orientifold_group, preset_group
from .numbers import Exact, format_scalar, parse_scalar
from .spin import SOGroup
from .spinc_structures import DEFAULT_DENOM, SpinkProblem

__all__ = [
    "SchemaError",
    "ProblemFile",
    "load_problem",
    "parse_problem",
    "PRESETS",
    "preset_problem",
    "to_json",
    "jsonable",
]


class SchemaError(OrientifoldError):
    """The problem file does not match the schema."""


_ALLOWED = {
    "group": {"preset", "table", "eps", "labels"},
    "cover": {"n_points", "action", "sets"},
    "cocycle": {"n", "by_element", "values"},
    "options": {"coefficients", "degree", "denom", "budget"},
}
_VALUE_KEYS = {"gammas", "indices", "point", "matrix"}
_COEFFICIENTS = ("Z", "Z-untwisted", "Z2", "QZ", "QZ-untwisted")


@dataclass
class ProblemFile:
    group: FiniteGroup
    cover: EquivariantCover
    problem: SpinkProblem | None
    coefficients: str = "Z"
    degree: int = 2
    denom: int = DEFAULT_DENOM
    budget: int | None = None
    name: str = ""

    def coefficient_group(self):
        G = self.group
        return {
            "Z": lambda: IntegersTwisted(G),
            "Z-untwisted": lambda: IntegersTwisted(G, twisted=False),
            "Z2": lambda: ZTwo(G),
            "QZ": lambda: CircleRational(G, max(self.denom, 16)),
            "QZ-untwisted": lambda: CircleRational(G, max(self.denom, 16), twisted=False),
        }[self.coefficients]()


def load_problem(path: str | Path) -> ProblemFile:
    text = Path(path).read_text()
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise SchemaError(f"malformed TOML: {exc}") from exc
    return parse_problem(data, name=str(path))


def _check_keys(where: str, got: dict, allowed: set):
    extra = set(got) - allowed
    if extra:
        raise SchemaError(f"unknown key(s) in [{where}]: {', '.join(sorted(extra))}")


def _scalar(v):
    if isinstance(v, bool):
        raise SchemaError("booleans are not matrix entries")
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        try:
            return parse_scalar(v)
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"bad scalar {v!r}: {exc}") from exc
    if isinstance(v, float):
        return v
    raise SchemaError(f"bad scalar {v!r}")


def _matrix(rows, n: int) -> np.ndarray:
    if not isinstance(rows, list) or len(rows) != n or any(not isinstance(r, list) or len(r) != n for r in rows):
        raise SchemaError(f"matrix must be {n} x {n}")
    vals = [[_scalar(v) for v in r] for r in rows]
    exact = all(isinstance(v, (int, Fraction, Exact)) for r in vals for v in r)
    out = np.empty((n, n), dtype=object if exact else float)
    for i in range(n):
        for j in range(n):
            out[i, j] = vals[i][j]
    return out


def _label_index(G: FiniteGroup, label) -> int:
    if isinstance(label, int):
        if not 0 <= label < G.order:
            raise SchemaError(f"group element {label} out of range")
        return label
    try:
        return G.index(str(label))
    except (KeyError, ValueError) as exc:
        raise SchemaError(f"unknown group element {label!r}") from exc


def parse_problem(data: dict, name: str = "") -> ProblemFile:
    if not isinstance(data, dict):
        raise SchemaError("top level must be a table")
    _check_keys("top level", data, set(_ALLOWED))
    for sect, allowed in _ALLOWED.items():
        if sect in data:
            if not isinstance(data[sect], dict):
                raise SchemaError(f"[{sect}] must be a table")
            _check_keys(sect, data[sect], allowed)
    G = _parse_group(data.get("group", {"preset": "z2"}))
    cover = _parse_cover(G, data.get("cover", {}))
    opts = data.get("options", {})
    coeffs = opts.get("coefficients", "Z")
    if coeffs not in _COEFFICIENTS:
        raise SchemaError(f"coefficients must be one of {', '.join(_COEFFICIENTS)}")
    degree = opts.get("degree", 2)
    denom = opts.get("denom", DEFAULT_DENOM)
    budget = opts.get("budget")
    for key, v in (("degree", degree), ("denom", denom)):
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise SchemaError(f"{key} must be a non-negative integer")
    if budget is not None and (not isinstance(budget, int) or budget < 1):
        raise SchemaError("budget must be a positive integer")
    problem = _parse_cocycle(G, cover, data["cocycle"]) if "cocycle" in data else None
    return ProblemFile(G, cover, problem, coeffs, degree, denom, budget, name)


def _parse_group(sec: dict) -> FiniteGroup:
    if "preset" in sec:
        if set(sec) != {"preset"}:
            raise SchemaError("[group] preset excludes table/eps/labels")
        try:
            return preset_group(sec["preset"])
        except (KeyError, ValueError) as exc:
            raise SchemaError(f"unknown group preset {sec['preset']!r}") from exc
    if "table" not in sec or "eps" not in sec:
        raise SchemaError("[group] needs preset, or table and eps")
    try:
        return make_orientifold_group(sec["table"], sec["eps"], sec.get("labels"))
    except OrientifoldError as exc:
        raise SchemaError(f"invalid group: {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"invalid group: {exc}") from exc


def _parse_cover(G: FiniteGroup, sec: dict) -> EquivariantCover:
    n = sec.get("n_points", 1)
    if not isinstance(n, int) or n < 1:
        raise SchemaError("n_points must be a positive integer")
    action = sec.get("action", [list(range(n)) for _ in G.elements])
    sets = sec.get("sets", [list(range(n))])
    try:
        return EquivariantCover(G, n, tuple(tuple(r) for r in action), tuple(frozenset(s) for s in sets))
    except (CoverMismatch, TypeError, ValueError) as exc:
        raise SchemaError(f"invalid cover: {exc}") from exc


def _parse_cocycle(G: FiniteGroup, cover: EquivariantCover, sec: dict) -> SpinkProblem:
    n = sec.get("n")
    if not isinstance(n, int) or n < 1:
        raise SchemaError("[cocycle] needs a positive integer n")
    identity = SOGroup(G, n).identity()
    vals = {}
    if "by_element" in sec:
        if len(cover.sets) != 1:
            raise SchemaError("by_element needs a one-set cover; use [[cocycle.values]]")
        table = {_label_index(G, k): _matrix(v, n) for k, v in sec["by_element"].items()}
        for cell in cells(cover, 1):
            g = cell[0][0]
            vals[cell] = table.get(g, identity if g == G.identity else None)
            if vals[cell] is None:
                raise SchemaError(f"by_element is missing element {G.labels[g]!r}")
    if "values" in sec:
        for entry in sec["values"]:
            if not isinstance(entry, dict):
                raise SchemaError("cocycle values are tables")
            _check_keys("cocycle.values", entry, _VALUE_KEYS)
            try:
                gammas = tuple(_label_index(G, g) for g in entry["gammas"])
                cell = (gammas, tuple(entry["indices"]), entry["point"])
                vals[cell] = _matrix(entry["matrix"], n)
            except KeyError as exc:
                raise SchemaError(f"cocycle value missing {exc}") from exc
    for cell in cells(cover, 1):
        if cell not in vals and cell[0][0] == G.identity and cell[1][0] == cell[1][1]:
            vals[cell] = identity
    try:
        phi = Cochain(cover, 1, SOGroup(G, n), vals)
        return SpinkProblem(cover, phi, n)
    except DomainMismatch as exc:
        raise SchemaError(f"invalid cocycle: {exc}") from exc


# -- presets -------------------------------------------------------------------------------

PRESETS = {
    "real-point": {
        "description": "a point with the Real involution (Gamma = Z2, eps = id), no cocycle",
        "data": {"group": {"preset": "z2"}},
    },
    "real-point-identity": {
        "description": "trivial rank-2 bundle over the Real point",
        "data": {"group": {"preset": "z2"}, "cocycle": {"n": 2, "by_element": {"-1": [[1, 0], [0, 1]]}}},
    },
    "real-point-rotation": {
        "description": "rank-2 bundle over the Real point with -1 acting by rotation through pi (obstructed)",
        "data": {"group": {"preset": "z2"}, "cocycle": {"n": 2, "by_element": {"-1": [[-1, 0], [0, -1]]}}},
    },
    "quaternionic-point": {
        "description": "Gamma = Z/4 with eps(i) = -1, i acting by rotation through pi",
        "data": {
            "group": {"preset": "h4-q"},
            "cocycle": {"n": 2, "by_element": {"i": [[-1, 0], [0, -1]], "-1": [[1, 0], [0, 1]], "-i": [[-1, 0], [0, -1]]}},
        },
    },
    "free-real-pair": {
        "description": "two points swapped by the Real involution, one chart per point, trivial frames",
        "data": {
            "group": {"preset": "z2"},
            "cover": {"n_points": 2, "action": [[0, 1], [1, 0]], "sets": [[0], [1]]},
            "cocycle": {
                "n": 2,
                "values": [
                    {"gammas": ["-1"], "indices": [0, 1], "point": 0, "matrix": [[1, 0], [0, 1]]},
                    {"gammas": ["-1"], "indices": [1, 0], "point": 1, "matrix": [[1, 0], [0, 1]]},
                ],
            },
        },
    },
}


def preset_problem(name: str) -> ProblemFile:
    if name not in PRESETS:
        raise SchemaError(f"unknown preset {name!r}; try one of {', '.join(sorted(PRESETS))}")
    return parse_problem(PRESETS[name]["data"], name=name)


# -- JSON ------------------------------------------------------------------------------------


def jsonable(obj):
    """Recursively convert exact scalars, numpy values and tuples for json.dumps."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, str)) or obj is None:
        return obj
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (Fraction, Exact)):
        return format_scalar(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return str(obj)


def to_json(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2)

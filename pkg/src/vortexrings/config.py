"""Run and ladder configuration: JSON files with a versioned key tree.

Top-level keys: ``schema_version``, ``epsilon`` (simulate only), ``rings``,
``field``, ``numerics``, ``diagnostics``, ``output`` and, for ladders,
``ladder``. ``normalize`` fills defaults and validates; normalising an
already normalised document returns it unchanged.
"""

import copy
import json
import math
from dataclasses import dataclass

from .errors import ConfigurationError
from .vorticity_field import PROFILES, RingSpec, check_separation

SCHEMA_VERSION = 1

RING_DEFAULTS = {"intensity": 1.0, "profile": "uniform-disk", "resolution": 16,
                 "density_bound": 1.0, "core_radius": None}
SECTION_DEFAULTS = {
    "field": {"type": "zero", "c": 0.0},
    "numerics": {"delta_ratio": 0.5, "horizon": 1.0, "dt": None, "dt_factor": 0.2,
                 "deterministic": False, "threads": None, "guard": "warn",
                 "separation_D": None, "separation_policy": "error"},
    "diagnostics": {"cadence": 10, "tail_levels": [0.5, 1.0, 2.0], "energy": True,
                    "concentration_radius": None},
    "output": {"dir": "vortexrings-out", "snapshot": True},
}
LADDER_DEFAULTS = {"epsilons": [0.05, 0.01, 0.002], "slack": 0.25, "k": 0.2, "workers": 1,
                   "negative_control": False}
FIELD_TYPES = ("zero", "constant-axial")
GUARD_MODES = ("warn", "abort", "off")


def _merge(defaults, given, where):
    if given is None:
        given = {}
    if not isinstance(given, dict):
        raise ConfigurationError(f"section {where!r} must be an object")
    unknown = set(given) - set(defaults)
    if unknown:
        raise ConfigurationError(f"unknown keys in {where!r}: {sorted(unknown)}")
    out = copy.deepcopy(defaults)
    out.update(copy.deepcopy(given))
    return out


def _num(v, name, positive=False, allow_none=False):
    if v is None and allow_none:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigurationError(f"{name} must be a finite number, got {v!r}")
    if positive and not v > 0:
        raise ConfigurationError(f"{name} must be positive, got {v!r}")
    return float(v)


def _normalize_rings(rings):
    if not isinstance(rings, list) or not rings:
        raise ConfigurationError("'rings' must be a non-empty list")
    out = []
    for i, ring in enumerate(rings):
        r = _merge(dict(RING_DEFAULTS, center=None), ring, f"rings[{i}]")
        c = r["center"]
        if not (isinstance(c, (list, tuple)) and len(c) == 2):
            raise ConfigurationError(f"rings[{i}].center must be [z, r]")
        r["center"] = [_num(c[0], f"rings[{i}].center.z"), _num(c[1], f"rings[{i}].center.r")]
        r["intensity"] = _num(r["intensity"], f"rings[{i}].intensity")
        if r["profile"] not in PROFILES:
            raise ConfigurationError(f"rings[{i}].profile must be one of {PROFILES}")
        if isinstance(r["resolution"], bool) or not isinstance(r["resolution"], int):
            raise ConfigurationError(f"rings[{i}].resolution must be an integer")
        r["density_bound"] = _num(r["density_bound"], f"rings[{i}].density_bound", positive=True)
        r["core_radius"] = _num(r["core_radius"], f"rings[{i}].core_radius", positive=True, allow_none=True)
        out.append(r)
    return out


def _normalize_sections(doc):
    out = {"schema_version": SCHEMA_VERSION}
    out["rings"] = _normalize_rings(doc.get("rings"))
    for name, defaults in SECTION_DEFAULTS.items():
        out[name] = _merge(defaults, doc.get(name), name)
    f = out["field"]
    if f["type"] not in FIELD_TYPES:
        raise ConfigurationError(f"field.type must be one of {FIELD_TYPES}")
    f["c"] = _num(f["c"], "field.c")
    n = out["numerics"]
    n["delta_ratio"] = _num(n["delta_ratio"], "numerics.delta_ratio", positive=True)
    if n["delta_ratio"] > 1.0:
        raise ConfigurationError(f"delta = {n['delta_ratio']} eps exceeds the core radius eps")
    n["horizon"] = _num(n["horizon"], "numerics.horizon")
    if n["horizon"] < 0:
        raise ConfigurationError("numerics.horizon must be non-negative")
    n["dt"] = _num(n["dt"], "numerics.dt", positive=True, allow_none=True)
    n["dt_factor"] = _num(n["dt_factor"], "numerics.dt_factor", positive=True)
    if not isinstance(n["deterministic"], bool):
        raise ConfigurationError("numerics.deterministic must be true or false")
    if n["threads"] is not None and (isinstance(n["threads"], bool) or not isinstance(n["threads"], int)
                                     or n["threads"] < 1):
        raise ConfigurationError("numerics.threads must be a positive integer or null")
    if n["guard"] not in GUARD_MODES:
        raise ConfigurationError(f"numerics.guard must be one of {GUARD_MODES}")
    n["separation_D"] = _num(n["separation_D"], "numerics.separation_D", positive=True, allow_none=True)
    if n["separation_policy"] not in ("error", "warn", "off"):
        raise ConfigurationError("numerics.separation_policy must be error, warn or off")
    d = out["diagnostics"]
    if isinstance(d["cadence"], bool) or not isinstance(d["cadence"], int) or d["cadence"] < 1:
        raise ConfigurationError("diagnostics.cadence must be a positive integer")
    if not isinstance(d["tail_levels"], list):
        raise ConfigurationError("diagnostics.tail_levels must be a list")
    d["tail_levels"] = [_num(h, "diagnostics.tail_levels[]") for h in d["tail_levels"]]
    if any(h < 0 for h in d["tail_levels"]):
        raise ConfigurationError("tail levels must be non-negative")
    if not isinstance(d["energy"], bool):
        raise ConfigurationError("diagnostics.energy must be true or false")
    d["concentration_radius"] = _num(d["concentration_radius"], "diagnostics.concentration_radius",
                                     positive=True, allow_none=True)
    o = out["output"]
    if not isinstance(o["dir"], str) or not o["dir"]:
        raise ConfigurationError("output.dir must be a non-empty string")
    if not isinstance(o["snapshot"], bool):
        raise ConfigurationError("output.snapshot must be true or false")
    return out


def _check_version(doc):
    if not isinstance(doc, dict):
        raise ConfigurationError("configuration must be a JSON object")
    v = doc.get("schema_version")
    if v != SCHEMA_VERSION:
        raise ConfigurationError(f"unsupported schema_version {v!r}; expected {SCHEMA_VERSION}")


def normalize_run(doc):
    _check_version(doc)
    unknown = set(doc) - {"schema_version", "epsilon", "rings", *SECTION_DEFAULTS}
    if unknown:
        raise ConfigurationError(f"unknown top-level keys: {sorted(unknown)}")
    out = _normalize_sections(doc)
    eps = _num(doc.get("epsilon"), "epsilon", positive=True)
    if not eps < 1.0:
        raise ConfigurationError("epsilon must lie in (0, 1)")
    out["epsilon"] = eps
    ring_specs(out, eps)
    return out


def normalize_ladder(doc):
    _check_version(doc)
    unknown = set(doc) - {"schema_version", "ladder", "rings", *SECTION_DEFAULTS}
    if unknown:
        raise ConfigurationError(f"unknown top-level keys: {sorted(unknown)}")
    out = _normalize_sections(doc)
    lad = _merge(LADDER_DEFAULTS, doc.get("ladder"), "ladder")
    eps = [_num(e, "ladder.epsilons[]", positive=True) for e in lad["epsilons"]]
    if not eps or any(not e < 1.0 for e in eps):
        raise ConfigurationError("ladder.epsilons must be a non-empty list in (0, 1)")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ConfigurationError("ladder.epsilons must be strictly decreasing")
    lad["epsilons"] = eps
    lad["slack"] = _num(lad["slack"], "ladder.slack", positive=True)
    lad["k"] = _num(lad["k"], "ladder.k", positive=True)
    if not lad["k"] < 0.25:
        raise ConfigurationError("ladder.k must lie in (0, 1/4)")
    if isinstance(lad["workers"], bool) or not isinstance(lad["workers"], int) or lad["workers"] < 1:
        raise ConfigurationError("ladder.workers must be a positive integer")
    if not isinstance(lad["negative_control"], bool):
        raise ConfigurationError("ladder.negative_control must be true or false")
    out["ladder"] = lad
    for e in eps:
        ring_specs(out, e)
    return out


def ring_specs(doc, epsilon):
    """RingSpecs for one epsilon; checks overlap and the radius separation."""
    specs = []
    for i, r in enumerate(doc["rings"]):
        core = r["core_radius"] if r["core_radius"] is not None else epsilon
        if core > epsilon:
            raise ConfigurationError(f"rings[{i}].core_radius exceeds epsilon")
        try:
            specs.append(RingSpec(tuple(r["center"]), core, r["intensity"], r["profile"],
                                  r["resolution"], r["density_bound"]))
        except ConfigurationError as exc:
            raise ConfigurationError(f"rings[{i}]: {exc}") from None
    for i in range(len(specs)):
        for j in range(i + 1, len(specs)):
            if math.dist(specs[i].center, specs[j].center) < specs[i].epsilon + specs[j].epsilon:
                raise ConfigurationError(f"rings {i} and {j} have overlapping cores")
    n = doc["numerics"]
    check_separation(specs, n["separation_D"], n["separation_policy"])
    return specs


def load(path, kind="run"):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ConfigurationError(f"configuration file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON ({exc})") from None
    return normalize_run(doc) if kind == "run" else normalize_ladder(doc)


def dumps(doc):
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


@dataclass(frozen=True)
class Scenario:
    """Everything but epsilon: the per-epsilon run recipe shared by a ladder."""

    doc: dict

    def rings(self, epsilon):
        return ring_specs(self.doc, epsilon)

    @property
    def numerics(self):
        return self.doc["numerics"]

    @property
    def diagnostics(self):
        return self.doc["diagnostics"]

    @property
    def field(self):
        return self.doc["field"]

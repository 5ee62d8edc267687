"""Run configuration: a JSON object of flat keys, plus ``key=value`` overrides.

Grammar and key list are documented in ``docs/config.md``.  Nested objects
are accepted and flattened one level (``{"model": {"nu2": 1e-6}}`` is the
same as ``{"nu2": 1e-6}``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ConfigError
from .sensing import REFERENCE_EIGHTHS

SCENARIOS = ("free", "observe", "sweep-lambda", "sweep-S", "cps-verify", "sensors-validate")

DEFAULTS = {
    "variant": "flame",
    "nu2": 1e-6,
    "nu1": 1e-2,
    "nu0": None,            # 1e-2 for flame, 1 for fluid
    "N": 200,
    "dt": 1e-3,
    "t_end": 20.0,
    "grid_M": 2048,
    "S": 9,
    "reference": list(REFERENCE_EIGHTHS),
    "lambda": 1e-7,
    "lambda_list": None,
    "S_list": None,
    "output_dir": "out",
    "seed": 0,
    "fit_window": None,
    "exact_projection": False,
    "initial_nominal": "standard",
    "initial_estimate": "standard",
}

_INT_KEYS = {"N", "grid_M", "S", "seed"}
_FLOAT_KEYS = {"nu2", "nu1", "nu0", "dt", "t_end", "lambda"}
_DERIVED_KEYS = {"S_sigma"}


@dataclass
class RunSpec:
    scenario: str
    variant: str = "flame"
    nu2: float = 1e-6
    nu1: float = 1e-2
    nu0: float = 1e-2
    N: int = 200
    dt: float = 1e-3
    t_end: float = 20.0
    grid_M: int = 2048
    S: int = 9
    reference: list = field(default_factory=lambda: list(REFERENCE_EIGHTHS))
    lambda_gain: float = 1e-7
    lambda_list: list | None = None
    S_list: list | None = None
    output_dir: str = "out"
    seed: int = 0
    fit_window: tuple | None = None
    exact_projection: bool = False
    initial_nominal: object = "standard"
    initial_estimate: object = "standard"

    @property
    def S_sigma(self):
        return 4 * self.S


def _coerce(key, value):
    if key in _INT_KEYS:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
            raise ConfigError(key, f"expected an integer, got {value!r}")
        return int(value)
    if key in _FLOAT_KEYS:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(key, f"expected a number, got {value!r}")
        return float(value)
    if key in ("lambda_list", "reference"):
        if not isinstance(value, list) or not value or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
        ):
            raise ConfigError(key, f"expected a nonempty list of numbers, got {value!r}")
        return [float(v) for v in value]
    if key == "S_list":
        if not isinstance(value, list) or not value or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in value
        ):
            raise ConfigError(key, f"expected a nonempty list of integers, got {value!r}")
        return list(value)
    if key == "fit_window":
        if value is None:
            return None
        if not isinstance(value, list) or len(value) != 2:
            raise ConfigError(key, f"expected [t_start, t_end], got {value!r}")
        return (float(value[0]), float(value[1]))
    if key == "exact_projection":
        if not isinstance(value, bool):
            raise ConfigError(key, f"expected true/false, got {value!r}")
        return value
    if key in ("scenario", "variant", "output_dir"):
        if not isinstance(value, str):
            raise ConfigError(key, f"expected a string, got {value!r}")
        return value
    if key in ("initial_nominal", "initial_estimate"):
        if value == "standard":
            return value
        if isinstance(value, list) and value and all(isinstance(v, (int, float)) for v in value):
            return [float(v) for v in value]
        raise ConfigError(key, f"expected \"standard\" or a coefficient list, got {value!r}")
    raise ConfigError(key, "unknown key")


def _parse_override(item):
    if "=" not in item:
        raise ConfigError(item, "override must look like key=value")
    key, raw = item.split("=", 1)
    key = key.strip()
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw.strip()
    return key, value


def _flatten(doc):
    flat = {}
    for k, v in doc.items():
        if isinstance(v, dict):
            for k2, v2 in v.items():
                flat[k2] = v2
        else:
            flat[k] = v
    return flat


def parse_config(text, overrides=()):
    """Validate a config document (JSON object text) into a :class:`RunSpec`.

    ``overrides`` are ``"key=value"`` strings applied after the document; the
    value is read as JSON when possible, otherwise as a bare string.
    """
    text = text.strip() if text else ""
    if text:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("<document>", f"not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("<document>", "top level must be an object")
    else:
        doc = {}
    raw = _flatten(doc)
    for item in overrides:
        k, v = _parse_override(item)
        raw[k] = v

    for k in raw:
        if k in _DERIVED_KEYS:
            raise ConfigError(k, "derived from S (S_sigma = 4 S); not settable")
        if k != "scenario" and k not in DEFAULTS:
            raise ConfigError(k, "unknown key")

    if "scenario" not in raw:
        raise ConfigError("scenario", "scenario required")
    values = {k: _coerce(k, v) for k, v in raw.items() if v is not None or k == "fit_window"}
    scenario = values["scenario"]
    if scenario not in SCENARIOS:
        raise ConfigError("scenario", f"must be one of {SCENARIOS}, got {scenario!r}")

    merged = {k: v for k, v in DEFAULTS.items()}
    merged.update(values)
    if merged["variant"] not in ("flame", "fluid"):
        raise ConfigError("variant", f"must be 'flame' or 'fluid', got {merged['variant']!r}")
    if merged["nu0"] is None:
        merged["nu0"] = 1e-2 if merged["variant"] == "flame" else 1.0

    for k in ("nu2", "nu1", "nu0", "dt"):
        if not merged[k] > 0:
            raise ConfigError(k, f"must be positive, got {merged[k]}")
    for k in ("N", "grid_M", "S"):
        if merged[k] < 1:
            raise ConfigError(k, f"must be >= 1, got {merged[k]}")
    if 4 * merged["N"] > merged["grid_M"]:
        raise ConfigError("grid_M", f"must be >= 4 N = {4 * merged['N']}, got {merged['grid_M']}")
    if merged["t_end"] < merged["dt"]:
        raise ConfigError("t_end", f"must be >= dt, got {merged['t_end']}")
    if merged["lambda"] < 0:
        raise ConfigError("lambda", f"must be nonnegative, got {merged['lambda']}")
    ref = merged["reference"]
    if len(ref) != 4 or len(set(ref)) != 4 or any(not 0 <= x < 1 for x in ref):
        raise ConfigError("reference", f"need 4 distinct points in [0, 1), got {ref}")
    if merged["N"] < 4 * merged["S"] and scenario in ("free", "observe", "sweep-lambda"):
        raise ConfigError("N", f"must be >= S_sigma = {4 * merged['S']}")

    if scenario == "sweep-lambda":
        if not merged["lambda_list"]:
            raise ConfigError("lambda_list", "required (nonempty) for sweep-lambda")
        if any(v < 0 for v in merged["lambda_list"]):
            raise ConfigError("lambda_list", "gains must be nonnegative")
    if scenario == "sweep-S":
        if not merged["S_list"]:
            raise ConfigError("S_list", "required (nonempty) for sweep-S")
        if any(v < 1 for v in merged["S_list"]) or 4 * max(merged["S_list"]) > merged["N"]:
            raise ConfigError("S_list", f"entries must satisfy 1 <= S <= N / 4, got {merged['S_list']}")
    if scenario == "cps-verify" and merged["S_list"] is None:
        merged["S_list"] = [1, 2, 3]
    if scenario == "free":
        merged["lambda"] = 0.0

    for k in ("initial_nominal", "initial_estimate"):
        v = merged[k]
        if isinstance(v, list) and len(v) > merged["N"]:
            raise ConfigError(k, f"has {len(v)} coefficients, more than N={merged['N']}")

    return RunSpec(
        scenario=scenario,
        variant=merged["variant"],
        nu2=merged["nu2"],
        nu1=merged["nu1"],
        nu0=merged["nu0"],
        N=merged["N"],
        dt=merged["dt"],
        t_end=merged["t_end"],
        grid_M=merged["grid_M"],
        S=merged["S"],
        reference=merged["reference"],
        lambda_gain=merged["lambda"],
        lambda_list=merged["lambda_list"],
        S_list=merged["S_list"],
        output_dir=merged["output_dir"],
        seed=merged["seed"],
        fit_window=merged["fit_window"],
        exact_projection=merged["exact_projection"],
        initial_nominal=merged["initial_nominal"],
        initial_estimate=merged["initial_estimate"],
    )

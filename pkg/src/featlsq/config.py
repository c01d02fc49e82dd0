"""Flat key = value configuration files for runs and suites.

Grammar, line by line:

    # comment                  full-line comments start with '#'
    key = value                one assignment per line
    include other.cfg          splice another file, path relative to this one

Later assignments override earlier ones, so a file can `include` a base
config and then override a few keys. List values are comma separated.
Unknown keys are rejected by name.

Experiment keys mirror ExperimentConfig fields. A suite file additionally
sets `suite = <kind>` and may override the per-kind parameter lists
(k_list, s_list, delta_list, omega0_list, scale_count_list, wavelength_list,
sigma_list, activation_list, depth_list, solvers, include_slow).
"""

from __future__ import annotations

import os

from .errors import ConfigurationError
from .runner import ExperimentConfig, SuiteSpec, validate_config

_INT_KEYS = frozenset({
    "scale_count", "count_per_dim", "features", "depth", "max_iters",
    "eval_stride", "cond_seeds", "size_cap", "lanczos_iters",
    "points_per_wavelength", "interior_per_dim",
})
_FLOAT_KEYS = frozenset({
    "omega0", "wavelength", "wave_speed", "overlap", "sigma", "constraint_weight",
})
_STR_KEYS = frozenset({"problem", "activation", "solver", "label"})
_EXPERIMENT_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS | {"seeds"}

_SUITE_LIST_KEYS = {
    "solvers": str,
    "k_list": int,
    "s_list": int,
    "delta_list": float,
    "omega0_list": float,
    "scale_count_list": int,
    "wavelength_list": float,
    "sigma_list": float,
    "activation_list": str,
    "depth_list": int,
}
_SUITE_KEYS = frozenset(_SUITE_LIST_KEYS) | {"suite", "include_slow"}

# spelled-out aliases for the greek letters in suite names
_KIND_ALIASES = {
    "ablation-σ": "ablation-sigma",
    "strong-Sδ": "strong-Sdelta",
}


def parse_config(path: str) -> dict[str, str]:
    """Read a config file into a raw key -> string mapping."""
    return _parse_file(os.path.abspath(path), seen=set())


def _parse_file(path: str, seen: set[str]) -> dict[str, str]:
    if path in seen:
        raise ConfigurationError(f"include cycle through {path}")
    seen.add(path)
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as err:
        raise ConfigurationError(f"cannot read config {path}: {err}") from err

    values: dict[str, str] = {}
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line == "include" or line.startswith(("include ", "include\t")):
            target = line[len("include"):].strip()
            if not target:
                raise ConfigurationError(f"{path}:{number}: empty include path")
            included = os.path.normpath(
                os.path.join(os.path.dirname(path), target))
            values.update(_parse_file(included, seen))
            continue
        if "=" not in line:
            raise ConfigurationError(
                f"{path}:{number}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigurationError(f"{path}:{number}: empty key")
        values[key] = value
    seen.discard(path)
    return values


def _parse_scalar(key: str, raw: str):
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
    except ValueError as err:
        raise ConfigurationError(f"key {key!r}: bad number {raw!r}") from err
    return raw


def _parse_list(key: str, raw: str, kind):
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    try:
        return tuple(kind(p) for p in parts)
    except ValueError as err:
        raise ConfigurationError(f"key {key!r}: bad list {raw!r}") from err


def _parse_bool(key: str, raw: str) -> bool:
    lowered = raw.lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ConfigurationError(f"key {key!r}: expected a boolean, got {raw!r}")


def experiment_from_dict(values: dict[str, str],
                         allow_extra: frozenset = frozenset()) -> ExperimentConfig:
    """Typed experiment config from raw strings; unknown keys are an error."""
    kwargs = {}
    for key, raw in values.items():
        if key in allow_extra:
            continue
        if key == "seeds":
            kwargs["seeds"] = _parse_list(key, raw, int)
        elif key in _EXPERIMENT_KEYS:
            kwargs[key] = _parse_scalar(key, raw)
        else:
            raise ConfigurationError(f"unknown config key {key!r}")
    cfg = ExperimentConfig(**kwargs)
    validate_config(cfg)
    return cfg


def suite_from_dict(values: dict[str, str]) -> SuiteSpec:
    """Typed suite spec: 'suite' names the kind, other keys form the base
    config or override the suite's parameter lists."""
    if "suite" not in values:
        raise ConfigurationError("suite config must set 'suite = <kind>'")
    kind = values["suite"]
    kind = _KIND_ALIASES.get(kind, kind)
    suite_kwargs = {"kind": kind}
    for key, caster in _SUITE_LIST_KEYS.items():
        if key in values:
            suite_kwargs[key] = _parse_list(key, values[key], caster)
    if "include_slow" in values:
        suite_kwargs["include_slow"] = _parse_bool("include_slow",
                                                   values["include_slow"])
    base = experiment_from_dict(values, allow_extra=_SUITE_KEYS)
    return SuiteSpec(base=base, **suite_kwargs)


def load_experiment(path: str) -> ExperimentConfig:
    return experiment_from_dict(parse_config(path))


def load_suite(path: str) -> SuiteSpec:
    return suite_from_dict(parse_config(path))

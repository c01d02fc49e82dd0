"""Figure specs: what to draw, from which CSVs, to which file.

A spec file is JSON:

    {
      "kind": "convergence",
      "inputs": ["cells/rrqr-lsqr/convergence-seed0.csv",
                 "cells/lsqr/convergence-seed0.csv"],
      "output": "figures/convergence",
      "labels": ["filtered + preconditioned", "plain lsqr"],
      "title": "oscillator baseline"
    }

Relative input/output paths are resolved against the spec file's directory,
so a spec can live next to the artifacts it draws. `output` is a base path;
rendering writes both <output>.svg and <output>.png.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .errors import SpecError

KINDS = ("convergence", "scaling", "spectra", "kappa-sweep", "solution-compare")

# optional `value` picks what a kind draws when the CSV offers a choice
_VALUE_CHOICES = {
    "convergence": ("both", "residual", "e_L1"),
    "kappa-sweep": ("κ(M̂S⁻¹)", "κ(M)"),
}

_KEYS = ("kind", "inputs", "output", "labels", "title", "value")


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple[str, ...]
    output: str
    labels: tuple[str, ...] = field(default=())
    title: str = ""
    value: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"unknown figure kind {self.kind!r}, "
                            f"expected one of {', '.join(KINDS)}")
        if not self.inputs:
            raise SpecError("inputs is empty; need at least one CSV path")
        if not self.output:
            raise SpecError("output path is empty")
        if self.labels and len(self.labels) != len(self.inputs):
            raise SpecError(f"{len(self.labels)} labels for "
                            f"{len(self.inputs)} inputs")
        choices = _VALUE_CHOICES.get(self.kind)
        if self.value and (choices is None or self.value not in choices):
            allowed = ", ".join(choices) if choices else "nothing"
            raise SpecError(f"kind {self.kind!r} does not accept value = "
                            f"{self.value!r} (accepts: {allowed})")


def load_spec(path: str) -> FigureSpec:
    """Parse and validate a JSON spec file; see the module docstring."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as err:
        raise SpecError(f"cannot read spec {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise SpecError(f"{path}: not valid JSON: {err}") from err
    if not isinstance(raw, dict):
        raise SpecError(f"{path}: spec must be a JSON object")
    unknown = sorted(set(raw) - set(_KEYS))
    if unknown:
        raise SpecError(f"{path}: unknown keys: {', '.join(unknown)}")
    for name in ("kind", "output"):
        if name not in raw:
            raise SpecError(f"{path}: missing key {name!r}")
        if not isinstance(raw[name], str):
            raise SpecError(f"{path}: {name} must be a string")
    inputs = raw.get("inputs")
    if not isinstance(inputs, list) or \
            not all(isinstance(p, str) for p in inputs):
        raise SpecError(f"{path}: inputs must be a list of CSV paths")
    labels = raw.get("labels", [])
    if not isinstance(labels, list) or \
            not all(isinstance(s, str) for s in labels):
        raise SpecError(f"{path}: labels must be a list of strings")
    for name in ("title", "value"):
        if name in raw and not isinstance(raw[name], str):
            raise SpecError(f"{path}: {name} must be a string")

    base = os.path.dirname(os.path.abspath(path))
    resolve = lambda p: p if os.path.isabs(p) else os.path.join(base, p)
    return FigureSpec(
        kind=raw["kind"],
        inputs=tuple(resolve(p) for p in inputs),
        output=resolve(raw["output"]),
        labels=tuple(labels),
        title=raw.get("title", ""),
        value=raw.get("value", ""),
    )

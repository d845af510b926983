"""Experiment configuration: YAML files with flat dotted keys.

Nested mappings are flattened, so ``quad: {rings: 40}`` and ``quad.rings: 40``
mean the same thing.  A top-level ``experiments`` list defines a batch; each
entry is merged over the shared top-level keys.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .errors import ConfigError
from .quadrature import QuadratureSpec

CRITERIA_KINDS = ("order_bounded", "bounded", "carleson")

# key -> (type tag, default)
SCHEMA: dict[str, tuple[str, Any]] = {
    "name": ("str", "experiment"),
    "weight": ("str", "standard:alpha=0"),
    "target_weight": ("str?", None),
    "p": ("pos", 2.0),
    "q": ("pos", 2.0),
    "symbol.phi": ("map", "identity"),
    "symbol.u": ("map", "constant:1"),
    "symbol.n": ("nonneg_int", 0),
    "delta": ("pos?", None),
    "quad.rings": ("int", 48),
    "quad.relerr": ("pos", 1e-6),
    "quad.angular_nodes": ("int", 60),
    "quad.max_cells": ("int", 4000),
    "quad.subdivision": ("int", 1),
    "grid.doubling": ("radii?", None),
    "grid.a_radii": ("radii", [0.0, 0.5, 0.75, 0.9, 0.95, 0.99, 0.995, 0.999]),
    "grid.a_angles": ("int", 8),
    "grid.z_radii": ("radii", [0.0, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99]),
    "grid.z_angles": ("int", 4),
    "grid.tail_levels": ("int", 14),
    "grid.tail_angles": ("int", 16),
    "grid.m_sweep": ("ints", list(range(5, 41))),
    "grid.truncation_r": ("radii", [0.3, 0.5]),
    "criteria": ("kinds", list(CRITERIA_KINDS)),
    "carleson.r": ("unit", 0.5),
    "oracle.pairs": ("int", 10),
    "oracle.seed": ("nonneg_int", 0),
    "oracle.degree": ("int", 40),
    "oracle.polynomials": ("int", 10),
    "workers": ("int", 1),
}


@dataclass(frozen=True)
class ExperimentConfig:
    values: dict
    base_dir: Path

    def __getitem__(self, key: str):
        return self.values[key]

    @property
    def name(self) -> str:
        return self.values["name"]

    @property
    def target_weight(self) -> str:
        return self.values["target_weight"] or self.values["weight"]

    def quad_spec(self) -> QuadratureSpec:
        v = self.values
        return QuadratureSpec(
            radial_rings=v["quad.rings"], angular_nodes_per_ring=v["quad.angular_nodes"],
            rel_error_target=v["quad.relerr"], max_cells=v["quad.max_cells"],
            ring_subdivision=v["quad.subdivision"],
        )

    def resolved(self) -> dict:
        """Nested, fully-resolved view for embedding in outputs."""
        out: dict = {}
        for key in sorted(self.values):
            node = out
            parts = key.split(".")
            for p in parts[:-1]:
                node = node.setdefault(p, {})
            node[parts[-1]] = self.values[key]
        out["target_weight"] = self.target_weight
        return out


def flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(flatten(v, key + "."))
        else:
            out[key] = v
    return out


def _key_lines(node, prefix: str = "", out: dict | None = None) -> dict:
    """Line numbers of every flattened key in a composed YAML mapping."""
    out = {} if out is None else out
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            key = f"{prefix}{k.value}"
            out[key] = k.start_mark.line + 1
            if isinstance(v, yaml.MappingNode):
                _key_lines(v, key + ".", out)
    return out


def _check(key: str, tag: str, value, where: str):
    def bad(msg):
        raise ConfigError(f"{where}: field '{key}' {msg} (got {value!r})")

    if tag.endswith("?"):
        if value is None:
            return None
        tag = tag[:-1]
    if tag == "str":
        if not isinstance(value, str):
            bad("must be a string")
        return value
    if tag == "map":
        if not isinstance(value, (str, list, int, float)):
            bad("must be a map spec string or a coefficient list")
        return value
    if tag in ("int", "nonneg_int"):
        if isinstance(value, bool) or not isinstance(value, int):
            bad("must be an integer")
        if tag == "int" and value < 1:
            bad("must be >= 1")
        if value < 0:
            bad("must be >= 0")
        return int(value)
    if tag in ("pos", "unit"):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            bad("must be a number")
        value = float(value)
        if not value > 0 or (tag == "unit" and not value < 1):
            bad("must lie in (0, 1)" if tag == "unit" else "must be positive")
        return value
    if tag in ("radii", "ints", "kinds"):
        if not isinstance(value, list):
            bad("must be a list")
        if not value:
            bad("must not be empty")
        if tag == "radii":
            try:
                arr = [float(x) for x in value]
            except (TypeError, ValueError):
                bad("must contain numbers")
            if any(not 0 <= x < 1 for x in arr):
                bad("radii must lie in [0, 1)")
            if np.any(np.diff(arr) <= 0):
                bad("radii must increase")
            return arr
        if tag == "ints":
            if any(isinstance(x, bool) or not isinstance(x, int) or x < 1 for x in value):
                bad("must contain positive integers")
            return [int(x) for x in value]
        unknown = [x for x in value if x not in CRITERIA_KINDS]
        if unknown:
            bad(f"has unknown criteria {unknown}; known: {list(CRITERIA_KINDS)}")
        return list(value)
    raise AssertionError(tag)


def resolve(raw: dict, base_dir: Path, lines: dict | None = None,
            overrides: dict | None = None, source: str = "<config>") -> ExperimentConfig:
    flat = flatten(raw)
    if overrides:
        flat.update({k: v for k, v in overrides.items() if v is not None})
    lines = lines or {}
    vals = {}
    for key in flat:
        if key not in SCHEMA:
            where = f"{source}:{lines[key]}" if key in lines else source
            raise ConfigError(f"{where}: unknown field '{key}'")
    for key, (tag, default) in SCHEMA.items():
        where = f"{source}:{lines[key]}" if key in lines else source
        vals[key] = _check(key, tag, flat.get(key, copy.deepcopy(default)), where)
    return ExperimentConfig(vals, base_dir)


def load_configs(path: str | Path | None, overrides: dict | None = None) -> list[ExperimentConfig]:
    """Parse a config file into one or more experiments (defaults when ``path`` is None)."""
    if path is None:
        return [resolve({}, Path.cwd(), overrides=overrides, source="<defaults>")]
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        node = yaml.compose(text)
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: YAML syntax error: {exc}") from exc
    raw = raw or {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    lines = _key_lines(node) if node is not None else {}
    base = path.resolve().parent
    exps = raw.pop("experiments", None)
    if exps is None:
        return [resolve(raw, base, lines, overrides, str(path))]
    if not isinstance(exps, list) or not exps:
        raise ConfigError(f"{path}: 'experiments' must be a non-empty list")
    out = []
    names = set()
    for i, e in enumerate(exps):
        if not isinstance(e, dict):
            raise ConfigError(f"{path}: experiments[{i}] must be a mapping")
        merged = flatten(raw)
        merged.update(flatten(e))
        merged.setdefault("name", f"experiment{i}")
        cfg = resolve(merged, base, {}, overrides, f"{path} experiments[{i}]")
        if cfg.name in names:
            raise ConfigError(f"{path}: duplicate experiment name {cfg.name!r}")
        names.add(cfg.name)
        out.append(cfg)
    return out

"""Run configuration for the model verifier.

A config is a JSON document; every field has a default, and the
``OBTT_CAP`` environment variable overrides every resource cap at once.
Validation failures raise ConfigError, which the driver maps to a
usage-error exit.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .model.fincat import BUNDLED_BASES, FinCat, load_category
from .model.host import Caps

MODES = ("strict", "weak")


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class Config:
    levels: int = 3  # ambient kernel level ceiling for check/normalize
    bounds: tuple[int, ...] = (2, 3)
    depth: int = 2
    mode: str = "strict"
    base: str = "terminal"  # bundled base name or path to a category JSON
    uni_code_depth: int = 0
    genericity_family_bound: int = 2
    seed: int = 0
    caps: Caps = field(default_factory=Caps)

    def validate(self) -> "Config":
        if self.levels < 1:
            raise ConfigError("levels must be at least 1")
        if not self.bounds:
            raise ConfigError("bounds must be non-empty")
        if any(b < 0 for b in self.bounds):
            raise ConfigError("bounds must be non-negative")
        if any(a >= b for a, b in zip(self.bounds, self.bounds[1:])):
            raise ConfigError(
                f"bounds must be strictly increasing, got {list(self.bounds)}"
            )
        if self.depth < 0:
            raise ConfigError("depth must be non-negative")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.uni_code_depth < 0:
            raise ConfigError("uni_code_depth must be non-negative")
        if self.genericity_family_bound < 0:
            raise ConfigError("genericity_family_bound must be non-negative")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        for name in ("stage_elements", "codes_per_stage", "section_fiber",
                     "genericity_families"):
            if getattr(self.caps, name) <= 0:
                raise ConfigError(f"cap {name} must be positive")
        return self

    def load_base(self) -> FinCat:
        if self.base in BUNDLED_BASES:
            return BUNDLED_BASES[self.base]()
        try:
            return load_category(self.base)
        except OSError as exc:
            raise ConfigError(f"cannot read base category: {exc}") from exc

    def echo(self) -> dict:
        """The config as report content; fully determines the run."""
        return {
            "levels": self.levels,
            "bounds": list(self.bounds),
            "depth": self.depth,
            "mode": self.mode,
            "base": self.base,
            "uni_code_depth": self.uni_code_depth,
            "genericity_family_bound": self.genericity_family_bound,
            "seed": self.seed,
            "caps": {
                "stage_elements": self.caps.stage_elements,
                "codes_per_stage": self.caps.codes_per_stage,
                "section_fiber": self.caps.section_fiber,
                "genericity_families": self.caps.genericity_families,
            },
        }


def _apply_cap_env(caps: Caps) -> Caps:
    raw = os.environ.get("OBTT_CAP")
    if raw is None:
        return caps
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ConfigError(f"OBTT_CAP must be an integer, got {raw!r}") from exc
    return Caps(
        stage_elements=cap,
        codes_per_stage=cap,
        section_fiber=cap,
        genericity_families=cap,
    )


def config_from_dict(data: dict) -> Config:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    known = {
        "levels", "bounds", "depth", "mode", "base", "uni_code_depth",
        "genericity_family_bound", "seed", "caps",
    }
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    caps_data = data.get("caps", {})
    if not isinstance(caps_data, dict):
        raise ConfigError("caps must be an object")
    cap_fields = {f: caps_data[f] for f in caps_data}
    bad = set(cap_fields) - {
        "stage_elements", "codes_per_stage", "section_fiber", "genericity_families"
    }
    if bad:
        raise ConfigError(f"unknown cap fields: {sorted(bad)}")
    caps = _apply_cap_env(Caps(**cap_fields))
    cfg = Config(
        levels=data.get("levels", 3),
        bounds=tuple(data.get("bounds", (2, 3))),
        depth=data.get("depth", 2),
        mode=data.get("mode", "strict"),
        base=data.get("base", "terminal"),
        uni_code_depth=data.get("uni_code_depth", 0),
        genericity_family_bound=data.get("genericity_family_bound", 2),
        seed=data.get("seed", 0),
        caps=caps,
    )
    return cfg.validate()


def load_config(path: str | None) -> Config:
    if path is None:
        return config_from_dict({})
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return config_from_dict(data)

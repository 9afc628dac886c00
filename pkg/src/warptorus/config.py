"""Run configuration: one JSON document, validated with pydantic."""

from __future__ import annotations

import json
import os
import re
from pathlib import Path
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .generate import KINDS, SequenceSpec

CHECK_GROUPS = {
    "doubly": ("curvature", "minA", "diameter", "log_gradient", "uniform_bounds", "distances"),
    "singly": ("curvature", "minA", "average", "dirichlet", "stampacchia", "barrier", "slices",
               "c0_lower", "distances"),
}
SWEEP_PARAMS = ("resolution", "base_amplitude", "A0", "D0", "V0")


class ConfigError(ValueError):
    """Config could not be read; the message carries line or field diagnostics."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SpecModel(_Strict):
    kind: Literal[KINDS]  # type: ignore[valid-type]
    j_schedule: list[float] = Field(default_factory=lambda: [10, 100, 1000])
    base_amplitude: float = 1.0
    modes: Optional[list[tuple[Union[int, tuple[int, int]], float, float]]] = None
    seed: int = 0
    amplitude_mode: Literal["bisect", "fixed"] = "bisect"
    n_random_modes: int = Field(3, ge=0)
    max_frequency: int = Field(2, ge=1)
    well_depth: float = 0.9
    well_radius: float = 0.1

    def build(self) -> SequenceSpec:
        data = self.model_dump()
        data["j_schedule"] = tuple(data["j_schedule"])
        if data["modes"] is not None:
            data["modes"] = tuple(tuple(m) for m in data["modes"])
        return SequenceSpec(**data)

    @model_validator(mode="after")
    def _valid_spec(self):
        self.build()  # SequenceSpec raises ValueError on bad schedules or modes
        return self


class HypothesesModel(_Strict):
    A0: float = Field(gt=0)
    D0: Optional[float] = Field(None, gt=0)
    V0: Optional[float] = Field(None, gt=0)


def _power_of_two(n: int) -> bool:
    return n >= 16 and n & (n - 1) == 0


class ResolutionModel(_Strict):
    n1d: int = 128
    n2d: int = 64
    lattice: int = 32  # nodes per axis of the distance lattice
    source_stride: Optional[int] = Field(None, ge=1)

    @field_validator("n1d", "n2d")
    @classmethod
    def _pow2(cls, v: int) -> int:
        if not _power_of_two(v):
            raise ValueError("must be a power of two >= 16")
        return v

    @field_validator("lattice")
    @classmethod
    def _lattice(cls, v: int) -> int:
        if v < 16 or v % 4:
            raise ValueError("must be a multiple of 4 and >= 16 (the refinement estimate halves it)")
        return v


class RunConfig(_Strict):
    case: Literal["doubly", "singly"]
    spec: SpecModel
    hypotheses: HypothesesModel
    resolution: ResolutionModel = Field(default_factory=ResolutionModel)
    output_dir: str = "warptorus-out"
    checks: list[str] = Field(default_factory=lambda: ["all"])
    workers: Optional[int] = Field(None, ge=1)
    slabs: Optional[list[tuple[float, float]]] = None

    @model_validator(mode="after")
    def _consistent(self):
        singly = self.spec.kind.startswith("singly")
        if singly != (self.case == "singly"):
            raise ValueError(f"spec.kind {self.spec.kind!r} does not belong to case {self.case!r}")
        if self.case == "doubly" and self.hypotheses.D0 is None:
            raise ValueError("hypotheses.D0 is required for the doubly case")
        allowed = set(CHECK_GROUPS[self.case]) | {"all"}
        bad = [c for c in self.checks if c not in allowed]
        if bad:
            raise ValueError(f"unknown checks {bad}; allowed: {sorted(allowed)}")
        return self

    def enabled(self, group: str) -> bool:
        return "all" in self.checks or group in self.checks

    @property
    def worker_count(self) -> int:
        return self.workers or os.cpu_count() or 1


def _line_of(text: str, loc: tuple) -> Optional[int]:
    """Best-effort line number of the last string key in loc."""
    keys = [k for k in loc if isinstance(k, str)]
    if not keys:
        return None
    m = re.search(r'"%s"\s*:' % re.escape(keys[-1]), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{source}:{e.lineno}:{e.colno}: invalid JSON: {e.msg}") from None
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        lines = []
        for err in e.errors():
            loc = tuple(err["loc"])
            where = ".".join(str(p) for p in loc) or "<root>"
            line = _line_of(text, loc)
            prefix = f"{source}:{line}" if line else source
            lines.append(f"{prefix}: field {where}: {err['msg']}")
        raise ConfigError("\n".join(lines)) from None


def load_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"{path}: cannot read config: {e.strerror}") from None
    return parse_config(text, str(path))


def with_override(cfg: RunConfig, param: str, value: float) -> RunConfig:
    """Copy of cfg with one sweep parameter replaced."""
    if param not in SWEEP_PARAMS:
        raise ConfigError(f"cannot vary {param!r}; choose one of {SWEEP_PARAMS}")
    data = cfg.model_dump()
    if param == "resolution":
        data["resolution"]["lattice"] = int(value)
    elif param == "base_amplitude":
        data["spec"]["base_amplitude"] = float(value)
    else:
        data["hypotheses"][param] = float(value)
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        msgs = "; ".join(f"{'.'.join(map(str, err['loc']))}: {err['msg']}" for err in e.errors())
        raise ConfigError(f"{param}={value}: {msgs}") from None

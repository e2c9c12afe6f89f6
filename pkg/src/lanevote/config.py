"""Pipeline settings with flag > file > default precedence."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .dedup import DedupConfig
from .errors import ConfigError
from .pipeline import GROUPERS
from .sampling import SamplerConfig


@dataclass(frozen=True)
class PipelineConfig:
    k: int = 5
    gamma: float = 1.0
    cmin: float = 0.1
    attn_threshold: float = 0.5
    grouper: str = "oracle"
    thickness: float = 5.0
    seed: int = 0
    class_threshold: float = 0.5
    flip_noise: float = 0.0
    noise: float = 0.0
    iou_threshold: float = 0.5
    stroke_width: float = 30.0
    dist_px: float = 20.0
    match_ratio: float = 0.85

    def __post_init__(self):
        if self.grouper not in GROUPERS:
            raise ConfigError(f"grouper must be one of {GROUPERS}, got {self.grouper!r}")
        try:
            self.sampler
            self.dedup
        except ValueError as e:
            raise ConfigError(str(e)) from None
        if self.thickness < 1:
            raise ConfigError("thickness must be >= 1")

    @property
    def sampler(self) -> SamplerConfig:
        return SamplerConfig(k=self.k, gamma=self.gamma, c_min=self.cmin)

    @property
    def dedup(self) -> DedupConfig:
        return DedupConfig(self.attn_threshold)

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_mapping(cls, data: dict, base: PipelineConfig | None = None) -> PipelineConfig:
        known = {f.name: f.type for f in fields(cls)}
        clean = {}
        for key, value in data.items():
            name = key.replace("-", "_")
            if name not in known:
                raise ConfigError(f"unknown config key {key!r}")
            clean[name] = value
        base = base or cls()
        try:
            merged = {**base.as_dict(), **clean}
            for f in fields(cls):
                caster = {"int": int, "float": float, "str": str}[f.type]
                merged[f.name] = caster(merged[f.name])
        except (TypeError, ValueError) as e:
            raise ConfigError(f"bad config value: {e}") from None
        return replace(base, **merged)

    @classmethod
    def load(cls, path) -> PipelineConfig:
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}:{e.lineno}: invalid JSON: {e.msg}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        return cls.from_mapping(data)

"""Analysis configuration with the tuned default constants in one place."""
from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass

from .audio import StftConfig


@dataclass
class AnalysisConfig:
    """All knobs for a harmony analysis.

    Defaults: saliency threshold scales 0.1 (audio) and 1.0 (visual), a
    0.25 s human reaction-delay tolerance, and balance exponent 2 favoring
    the visual stream; the analysis parameters are mainstream onset-detection
    settings.
    """

    lambda1: float = 0.1
    lambda2: float = 1.0
    t_delay: float = 0.25
    beta: float = 2.0
    window_size: int = 2048
    hop_size: int = 512
    mel_bands: int = 128
    fmin: float = 30.0
    fmax: float | None = None
    transition_beats: int = 1
    smooth_j: int = 0
    sd_window: int = 5

    def validate(self) -> None:
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("saliency scales lambda1/lambda2 must be >= 0")
        if self.t_delay <= 0:
            raise ValueError("t_delay must be > 0")
        if self.beta <= 0:
            raise ValueError("beta must be > 0")
        if not 0 < self.hop_size <= self.window_size:
            raise ValueError("need 0 < hop_size <= window_size")
        if self.mel_bands < 1:
            raise ValueError("mel_bands must be >= 1")
        if self.fmax is not None and self.fmax <= self.fmin:
            raise ValueError("fmax must exceed fmin")
        if self.transition_beats < 0:
            raise ValueError("transition_beats must be >= 0")
        if self.smooth_j < 0:
            raise ValueError("smooth_j must be >= 0")
        if self.sd_window < 2:
            raise ValueError("sd_window must be >= 2")

    def stft(self) -> StftConfig:
        return StftConfig(self.window_size, self.hop_size, self.mel_bands,
                          self.fmin, self.fmax)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def load(cls, config_path: str | os.PathLike | None = None,
             overrides: dict | None = None) -> "AnalysisConfig":
        """Build a config from defaults, then a JSON file, then overrides.

        Later sources win.  Unknown keys in either source are rejected so
        typos fail loudly.
        """
        values: dict = {}
        if config_path is not None:
            with open(config_path) as handle:
                loaded = json.load(handle)
            if not isinstance(loaded, dict):
                raise ValueError(f"config file must hold a JSON object: {config_path}")
            values.update(loaded)
        if overrides:
            values.update({k: v for k, v in overrides.items() if v is not None})
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**values)
        cfg.validate()
        return cfg

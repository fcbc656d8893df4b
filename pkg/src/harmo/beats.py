"""Shared beat-sequence container used by both the audio and the motion analyzers."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BeatSequence:
    """Ordered beat times (seconds) with one saliency value per beat.

    ``times`` must be strictly increasing.  Saliency carries whatever
    amplitude measure the producing detector uses (onset strength for audio
    beats, joint-velocity sum or its difference form for visual beats);
    pipeline-produced saliencies are non-negative but the container does not
    enforce a sign so detectors can run on negated profiles.
    """

    times: np.ndarray
    saliency: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        saliency = np.asarray(self.saliency, dtype=float)
        if times.ndim != 1 or saliency.ndim != 1:
            raise ValueError("times and saliency must be 1-D")
        if len(times) != len(saliency):
            raise ValueError(
                f"times ({len(times)}) and saliency ({len(saliency)}) lengths differ"
            )
        if len(times) > 1 and not np.all(np.diff(times) > 0):
            raise ValueError("beat times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "saliency", saliency)

    def __len__(self) -> int:
        return len(self.times)

    def clipped(self, t_start: float, t_end: float) -> "BeatSequence":
        """Return the sub-sequence whose times fall inside [t_start, t_end]."""
        keep = (self.times >= t_start) & (self.times <= t_end)
        return BeatSequence(self.times[keep], self.saliency[keep])

    def to_dict(self) -> dict:
        return {"times": self.times.tolist(), "saliency": self.saliency.tolist()}

    @classmethod
    def from_dict(cls, doc: dict) -> "BeatSequence":
        return cls(np.asarray(doc["times"], dtype=float),
                   np.asarray(doc["saliency"], dtype=float))


def empty_beats() -> BeatSequence:
    return BeatSequence(np.empty(0), np.empty(0))

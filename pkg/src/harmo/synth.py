"""Synthetic audio/motion pairs with controllable synchronization.

Ground-truth test material for the harmony pipeline: a click track with
clicks on a fixed beat grid, and a skeleton whose joint-velocity extrema land
on that same grid shifted by a configurable offset and jitter.  Clicks can be
omitted and spurious movement extrema inserted to model sloppy capture.
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

import numpy as np

from .audio import AudioClip
from .motion import PoseSequence

CLICK_LENGTH = 0.010   # s of decaying noise per click
CLICK_DECAY = 0.003    # s exponential time constant
CLICK_PEAK = 0.9

# Knot jitter is clipped here (fraction of the beat period) so jittered
# extremum times always stay strictly ordered.
MAX_JITTER_FRACTION = 0.4

# Velocity oscillates between these multiples of motion_amplitude; the floor
# stays positive so the lead joint never reverses and every designed extremum
# is a genuine direction change of the velocity profile.
SPEED_HI = 1.5
SPEED_LO = 0.5


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for one synthetic pair; identical specs give bit-identical output."""

    beat_period: float
    duration: float
    visual_offset: float = 0.0
    jitter_sd: float = 0.0
    omit_fraction: float = 0.0
    extra_fraction: float = 0.0
    fps: float = 15.0
    joint_count: int = 4
    rng_seed: int = 0
    sample_rate: int = 22050
    motion_amplitude: float = 1.0

    def __post_init__(self):
        if self.beat_period <= 0:
            raise ValueError("beat_period must be > 0")
        if self.duration < self.beat_period:
            raise ValueError("duration must cover at least one beat period")
        for name in ("omit_fraction", "extra_fraction"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.jitter_sd < 0:
            raise ValueError("jitter_sd must be >= 0")
        if self.fps <= 0:
            raise ValueError("fps must be > 0")
        if self.joint_count < 1:
            raise ValueError("joint_count must be >= 1")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be > 0")
        if self.motion_amplitude < 0:
            raise ValueError("motion_amplitude must be >= 0")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "SynthSpec":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown synth spec keys: {sorted(unknown)}")
        try:
            return cls(**doc)
        except TypeError as exc:  # missing required keys
            raise ValueError(str(exc)) from exc

    @classmethod
    def from_json(cls, path) -> "SynthSpec":
        with open(path) as handle:
            return cls.from_dict(json.load(handle))

    def beat_count(self) -> int:
        """Number of grid beats k with k * beat_period < duration."""
        return int(np.ceil(self.duration / self.beat_period - 1e-9))


def click_burst(rng: np.random.Generator, sample_rate: int) -> np.ndarray:
    """One exponentially decaying white-noise click, peak-normalized."""
    length = max(1, round(CLICK_LENGTH * sample_rate))
    t = np.arange(length) / sample_rate
    burst = rng.standard_normal(length) * np.exp(-t / CLICK_DECAY)
    return burst * (CLICK_PEAK / np.abs(burst).max())


def click_track(times: np.ndarray, duration: float, sample_rate: int,
                gains: np.ndarray | None = None, rng_seed: int = 0) -> AudioClip:
    """Place one shared click burst at each requested time.

    Reusing a single burst keeps every click's spectrum identical, so
    detected onset saliencies differ only through window alignment.
    """
    rng = np.random.default_rng((rng_seed, 0))
    burst = click_burst(rng, sample_rate)
    samples = np.zeros(round(duration * sample_rate))
    if gains is None:
        gains = np.ones(len(times))
    for time, gain in zip(np.asarray(times, dtype=float), gains):
        start = round(time * sample_rate)
        stop = min(start + len(burst), len(samples))
        if 0 <= start < len(samples):
            samples[start:stop] += gain * burst[:stop - start]
    np.clip(samples, -1.0, 1.0, out=samples)
    return AudioClip(samples, sample_rate)


def gen_click_track(spec: SynthSpec) -> AudioClip:
    """Click track with clicks at k * beat_period, k = 0, 1, ...

    ``omit_fraction`` removes exactly ``round(fraction * n)`` clicks, chosen
    by the seeded generator.
    """
    n = spec.beat_count()
    times = np.arange(n) * spec.beat_period
    n_omit = round(spec.omit_fraction * n)
    if n_omit:
        rng = np.random.default_rng((spec.rng_seed, 1))
        omitted = rng.choice(n, size=n_omit, replace=False)
        times = np.delete(times, omitted)
    return click_track(times, spec.duration, spec.sample_rate, rng_seed=spec.rng_seed)


def _extremum_knots(spec: SynthSpec) -> tuple[np.ndarray, np.ndarray]:
    """Designed (time, velocity-value) knots for the motion track.

    Knots alternate high/low velocity on the offset beat grid, optionally
    jittered; selected inter-beat gaps gain an extra low/high wiggle each,
    which adds two spurious extrema.
    """
    rng = np.random.default_rng((spec.rng_seed, 2))
    grid = np.arange(spec.beat_count() + 1) * spec.beat_period + spec.visual_offset
    grid = grid[grid <= spec.duration + 1e-9]
    if spec.jitter_sd > 0:
        clip_at = MAX_JITTER_FRACTION * spec.beat_period
        grid = grid + np.clip(rng.normal(0.0, spec.jitter_sd, len(grid)),
                              -clip_at, clip_at)
    hi = SPEED_HI * spec.motion_amplitude
    lo = SPEED_LO * spec.motion_amplitude
    values = np.where(np.arange(len(grid)) % 2 == 0, hi, lo)

    n_extra = round(spec.extra_fraction * max(len(grid) - 1, 0))
    if n_extra:
        gaps = rng.choice(len(grid) - 1, size=n_extra, replace=False)
        times = list(grid)
        vals = list(values)
        for gap in sorted(gaps, reverse=True):
            t0, t1 = grid[gap], grid[gap + 1]
            v0, v1 = values[gap], values[gap + 1]
            times[gap + 1:gap + 1] = [t0 + (t1 - t0) / 3, t0 + 2 * (t1 - t0) / 3]
            vals[gap + 1:gap + 1] = [v1, v0]
        grid = np.asarray(times)
        values = np.asarray(vals)
    return grid, values


def _piecewise_cosine(sample_times: np.ndarray, knot_times: np.ndarray,
                      knot_values: np.ndarray, period: float,
                      virtual_value: float) -> np.ndarray:
    """Evaluate a curve that passes through the knots with zero slope at each.

    Between knots the curve eases along a half cosine, so it is strictly
    monotone there and every knot is a genuine extremum.  Beyond the first
    and last knots it continues toward virtual knots one beat period away,
    keeping boundary knots detectable as direction changes.
    """
    ext_times = np.concatenate([[knot_times[0] - period], knot_times,
                                [knot_times[-1] + period]])
    ext_values = np.concatenate([[knot_values[1] if len(knot_values) > 1
                                  else virtual_value],
                                 knot_values,
                                 [knot_values[-2] if len(knot_values) > 1
                                  else virtual_value]])
    seg = np.clip(np.searchsorted(ext_times, sample_times, side="right") - 1,
                  0, len(ext_times) - 2)
    t0 = ext_times[seg]
    t1 = ext_times[seg + 1]
    v0 = ext_values[seg]
    v1 = ext_values[seg + 1]
    phase = (sample_times - t0) / np.maximum(t1 - t0, 1e-12)
    return v0 + (v1 - v0) * (1.0 - np.cos(np.pi * np.clip(phase, 0.0, 1.0))) / 2.0


def gen_motion_track(spec: SynthSpec) -> PoseSequence:
    """Skeleton whose joint-velocity-sum extrema land on the offset beat grid.

    Joint 0 advances along +x with a speed that oscillates through the
    designed knots; the remaining joints hold a fixed standing layout.  With
    zero amplitude every frame is identical and the track has no visual
    rhythm.
    """
    frame_count = round(spec.duration * spec.fps) + 1
    rest = np.zeros((spec.joint_count, 3))
    rest[:, 1] = np.arange(spec.joint_count) * 0.5  # simple vertical chain
    frames = np.broadcast_to(rest, (frame_count,) + rest.shape).copy()

    knot_times, knot_values = _extremum_knots(spec)
    if spec.motion_amplitude > 0 and len(knot_times):
        step_times = np.arange(1, frame_count) / spec.fps
        # Complement within the speed band, for the one-knot corner case.
        virtual = (SPEED_HI + SPEED_LO) * spec.motion_amplitude - knot_values[0]
        speed = _piecewise_cosine(step_times, knot_times, knot_values,
                                  spec.beat_period, virtual)
        frames[1:, 0, 0] = np.cumsum(speed)
    return PoseSequence(frames, spec.fps)

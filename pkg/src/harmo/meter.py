"""Musical-meter labeling and segmentation of salient audio beats.

Beats are labeled strong/weak by comparing each saliency with its
predecessor, matched against the canonical strong/weak cycles of four common
meters, and tiled into fixed-length meter units.  Each unit spans one full
meter plus a few trailing beats of the previous meter, and carries per-frame
binary temporal indices marking that transition region so pose features can
be seeded from it.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .beats import BeatSequence
from .motion import PoseSequence

# Agreement below this on the whole clip suggests a mix of meters; the clip
# is then re-classified over contiguous two-meter windows.
MIXED_METER_AGREEMENT = 0.6

_TIME_EPS = 1e-9


class MeterType(enum.Enum):
    """Common meters as canonical strong(1)/weak(0) cycles."""

    DUPLE = (1, 0)
    TRIPLE = (1, 0, 0)
    QUADRUPLE = (1, 0, 1, 0)
    COMPOUND = (1, 0, 0, 1, 0, 0)

    @property
    def pattern(self) -> tuple[int, ...]:
        return self.value

    @property
    def beats_per_meter(self) -> int:
        return len(self.value)


def label_beats(salient_audio: BeatSequence) -> np.ndarray:
    """Binary strong/weak labels, one per beat.

    A beat is strong (1) when its saliency strictly exceeds the preceding
    beat's; the first beat has no predecessor and is labeled strong by
    convention, since meters open on a strong beat.
    """
    if len(salient_audio) == 0:
        raise ValueError("cannot label an empty beat sequence")
    saliency = salient_audio.saliency
    labels = np.empty(len(saliency), dtype=np.int8)
    labels[0] = 1
    labels[1:] = saliency[1:] > saliency[:-1]
    return labels


def meter_agreement(labels: np.ndarray, meter: MeterType) -> float:
    """Fraction of label positions matching the meter's tiled pattern."""
    labels = np.asarray(labels)
    if len(labels) == 0:
        raise ValueError("empty label sequence")
    pattern = np.asarray(meter.pattern, dtype=labels.dtype)
    tiled = np.tile(pattern, -(-len(labels) // len(pattern)))[:len(labels)]
    return float(np.mean(tiled == labels))


def classify_meter(labels: np.ndarray) -> MeterType:
    """Pick the meter whose tiled pattern best agrees with the labels.

    Ties resolve toward the shorter period.
    """
    labels = np.asarray(labels)
    if len(labels) < 2:
        raise ValueError("need at least 2 labels to classify a meter")
    return min(MeterType, key=lambda m: (-meter_agreement(labels, m), m.beats_per_meter))


def classify_meter_windows(labels: np.ndarray) -> list[dict]:
    """Classify contiguous two-meter windows of the label sequence.

    Used when whole-clip agreement is weak (a mix of meters): the window
    length is twice the dominant meter's period, and each window is
    classified independently.  The trailing partial window, if any, is folded
    into the last full one.
    """
    labels = np.asarray(labels)
    dominant = classify_meter(labels)
    span = 2 * dominant.beats_per_meter
    windows = []
    start = 0
    while start < len(labels):
        end = start + span
        if len(labels) - end < span:
            end = len(labels)
        chunk = labels[start:end]
        meter = classify_meter(chunk) if len(chunk) >= 2 else dominant
        windows.append({"start_beat": int(start), "end_beat": int(end),
                        "meter": meter.name.lower()})
        start = end
    return windows


@dataclass(frozen=True)
class MeterUnit:
    """One tiled audio segment: a full meter plus trailing transition beats.

    ``t_end - t_start`` equals the clip's unified unit length after padding.
    ``temporal_indices[k]`` flags frame ``frame_start + k`` (at the pose/video
    frame rate) with 1 exactly when it belongs to the preceding-meter
    transition region.
    """

    t_start: float
    t_end: float
    meter: MeterType
    beat_indices: tuple[int, ...]
    transition_beat_count: int
    frame_start: int
    temporal_indices: np.ndarray

    def to_dict(self) -> dict:
        return {
            "t_start": self.t_start,
            "t_end": self.t_end,
            "transition_beats": self.transition_beat_count,
        }


def segment_meter_units(salient_audio: BeatSequence, labels: np.ndarray,
                        meter: MeterType, fps: float,
                        transition_beats: int = 1) -> list[MeterUnit]:
    """Tile the beat sequence into meter units of one unified duration.

    Units advance in steps of the meter's beat count; trailing beats that do
    not fill a meter are dropped.  Each unit's natural span runs from its
    earliest transition beat to the next unit's first beat (the last unit
    ends on its final beat), and every unit is padded at the end to the
    maximum natural duration in the clip.
    """
    if len(labels) != len(salient_audio):
        raise ValueError("labels and beats lengths differ")
    if fps <= 0:
        raise ValueError("fps must be positive")
    if transition_beats < 0:
        raise ValueError("transition_beats must be >= 0")
    k = meter.beats_per_meter
    n_units = len(salient_audio) // k
    if n_units == 0:
        raise ValueError(
            f"{len(salient_audio)} beats cannot fill a {meter.name.lower()} "
            f"meter of {k} beats"
        )
    times = salient_audio.times

    spans = []
    for u in range(n_units):
        first_own = u * k
        trans = min(transition_beats, first_own)
        t_start = times[first_own - trans]
        own_start = times[first_own]
        if u < n_units - 1:
            natural_end = times[(u + 1) * k]
        else:
            natural_end = times[n_units * k - 1]
        spans.append((t_start, own_start, natural_end, first_own, trans))
    unified = max(end - start for start, _, end, _, _ in spans)

    units = []
    for t_start, own_start, _, first_own, trans in spans:
        t_end = t_start + unified
        frame_start = int(np.ceil(t_start * fps - _TIME_EPS))
        frame_end = int(np.floor(t_end * fps + _TIME_EPS))
        frame_times = np.arange(frame_start, frame_end + 1) / fps
        indices = (frame_times < own_start - _TIME_EPS).astype(np.int8)
        units.append(MeterUnit(
            t_start=float(t_start),
            t_end=float(t_end),
            meter=meter,
            beat_indices=tuple(range(first_own, first_own + k)),
            transition_beat_count=trans,
            frame_start=frame_start,
            temporal_indices=indices,
        ))
    return units


def initial_pose_features(poses: PoseSequence, unit: MeterUnit) -> PoseSequence:
    """Seed a unit's pose features from its transition region.

    Frames flagged by the unit's temporal indices are copied verbatim; every
    other frame is replaced by the mean pose over the flagged frames.  A unit
    with no transition frames falls back to its first frame as the
    replacement.  Output covers the unit's span at the source frame rate.
    """
    flags = unit.temporal_indices.astype(bool)
    n = len(flags)
    transition_frames = unit.frame_start + np.flatnonzero(flags)
    needed = transition_frames if len(transition_frames) else np.asarray([unit.frame_start])
    if needed.min() < 0 or needed.max() >= poses.frame_count:
        raise ValueError(
            f"pose frames [0, {poses.frame_count}) do not cover the unit's "
            f"transition frames {needed.min()}..{needed.max()}"
        )
    if len(transition_frames):
        replacement = poses.frames[transition_frames].mean(axis=0)
    else:
        replacement = poses.frames[unit.frame_start]
    out = np.broadcast_to(replacement, (n,) + replacement.shape).copy()
    out[flags] = poses.frames[transition_frames]
    return PoseSequence(out, poses.fps)


def meter_report(salient_audio: BeatSequence, fps: float,
                 transition_beats: int = 1) -> dict:
    """Label, classify, and segment a salient beat sequence into one report."""
    labels = label_beats(salient_audio)
    if len(labels) < 2:
        raise ValueError("need at least 2 beats for a meter report")
    meter = classify_meter(labels)
    agreement = meter_agreement(labels, meter)
    units = segment_meter_units(salient_audio, labels, meter, fps, transition_beats)
    report = {
        "meter": meter.name.lower(),
        "beats_per_meter": meter.beats_per_meter,
        "agreement": agreement,
        "labels": labels.tolist(),
        "units": [unit.to_dict() for unit in units],
    }
    if agreement < MIXED_METER_AGREEMENT:
        report["windows"] = classify_meter_windows(labels)
    return report

"""Motion-side rhythm analysis over body-keypoint sequences.

Visual rhythm is read from the joint-velocity sum: frame-to-frame summed
displacement magnitude over all joints.  Visual beats sit at the local maxima
and minima of that profile, marking the boundaries of movement units.  A
windowed standard-deviation detector is included as the coarser baseline it
replaces.
"""
from __future__ import annotations

import csv
import json
import os
import re
from dataclasses import dataclass

import numpy as np
import scipy.ndimage
from numpy.lib.stride_tricks import sliding_window_view

from .audio import _strict_run_maxima
from .beats import BeatSequence


@dataclass(frozen=True)
class PoseSequence:
    """Frame-indexed joint positions with a frame rate.

    ``frames`` has shape (T, P, D) with D in {2, 3}; units are whatever
    length unit the capture uses, as long as it is consistent.
    """

    frames: np.ndarray
    fps: float

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=float)
        if frames.ndim != 3:
            raise ValueError(
                "frames must be a (frames, joints, dims) array; got shape "
                f"{frames.shape}"
            )
        if frames.shape[2] not in (2, 3):
            raise ValueError(f"joint dimensionality must be 2 or 3, got {frames.shape[2]}")
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        object.__setattr__(self, "frames", frames)

    @property
    def frame_count(self) -> int:
        return self.frames.shape[0]

    @property
    def joint_count(self) -> int:
        return self.frames.shape[1]

    @property
    def dims(self) -> int:
        return self.frames.shape[2]

    @property
    def duration(self) -> float:
        """Time of the last frame."""
        return (self.frame_count - 1) / self.fps

    def to_dict(self) -> dict:
        return {
            "fps": self.fps,
            "joints": self.joint_count,
            "dims": self.dims,
            "frames": self.frames.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "PoseSequence":
        frames = np.asarray(doc["frames"], dtype=float)
        seq = cls(frames, float(doc["fps"]))
        if "joints" in doc and int(doc["joints"]) != seq.joint_count:
            raise ValueError(
                f"header says {doc['joints']} joints but frames have {seq.joint_count}"
            )
        if "dims" in doc and int(doc["dims"]) != seq.dims:
            raise ValueError(
                f"header says {doc['dims']} dims but frames have {seq.dims}"
            )
        return seq


def load_poses_json(path: str | os.PathLike) -> PoseSequence:
    with open(path) as handle:
        return PoseSequence.from_dict(json.load(handle))


_CSV_COLUMN = re.compile(r"j(\d+)_([xyz])$")


def load_poses_csv(path: str | os.PathLike, fps: float) -> PoseSequence:
    """Read one pose frame per row with columns j0_x,j0_y[,j0_z],j1_x,...

    CSV carries no frame rate, so ``fps`` must be supplied.
    """
    with open(path, newline="") as handle:
        rows = list(csv.reader(handle))
    if not rows:
        raise ValueError(f"empty pose CSV: {path}")
    header = [name.strip() for name in rows[0]]
    parsed = [_CSV_COLUMN.match(name) for name in header]
    if any(m is None for m in parsed):
        bad = [name for name, m in zip(header, parsed) if m is None]
        raise ValueError(f"unrecognized pose CSV columns: {bad}")
    joints = max(int(m.group(1)) for m in parsed) + 1
    dims = 3 if any(m.group(2) == "z" for m in parsed) else 2
    if len(header) != joints * dims:
        raise ValueError(
            f"expected {joints * dims} columns for {joints} joints x {dims} dims, "
            f"got {len(header)}"
        )
    order = {f"j{j}_{ax}": j * dims + k
             for j in range(joints)
             for k, ax in enumerate("xyz"[:dims])}
    perm = [order[name] for name in header]
    data = np.asarray([[float(cell) for cell in row] for row in rows[1:]], dtype=float)
    if data.size == 0:
        raise ValueError(f"pose CSV has a header but no frames: {path}")
    flat = np.empty_like(data)
    flat[:, perm] = data
    return PoseSequence(flat.reshape(len(data), joints, dims), fps)


@dataclass(frozen=True)
class VelocityProfile:
    """Joint-velocity sum per frame transition.

    ``values[i]`` is the summed joint displacement magnitude from frame ``i``
    to frame ``i+1`` of the source sequence (length T-1), timestamped at the
    arriving frame: ``frame_times[i] == (i + 1) / fps``.
    """

    values: np.ndarray
    frame_times: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        frame_times = np.asarray(self.frame_times, dtype=float)
        if len(values) != len(frame_times):
            raise ValueError("values and frame_times lengths differ")
        if len(frame_times) > 1 and not np.all(np.diff(frame_times) > 0):
            raise ValueError("frame_times must be strictly increasing")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "frame_times", frame_times)

    def __len__(self) -> int:
        return len(self.values)


def joint_velocity_sum(poses: PoseSequence) -> VelocityProfile:
    """Sum over joints of the Euclidean displacement between consecutive frames."""
    if poses.frame_count < 2:
        raise ValueError("need at least 2 pose frames")
    step = np.diff(poses.frames, axis=0)
    values = np.linalg.norm(step, axis=2).sum(axis=1)
    frame_times = np.arange(1, poses.frame_count) / poses.fps
    return VelocityProfile(values, frame_times)


def smooth_profile(profile: VelocityProfile, width: int) -> VelocityProfile:
    """Centered moving average of the profile; width <= 1 is a no-op.

    Noisy capture produces spurious velocity extrema; smoothing before beat
    detection is optional and off by default.
    """
    if width <= 1:
        return profile
    smoothed = scipy.ndimage.uniform_filter1d(profile.values, size=width, mode="nearest")
    return VelocityProfile(smoothed, profile.frame_times)


def detect_visual_beats(profile: VelocityProfile) -> BeatSequence:
    """Visual beats at local maxima and minima of the velocity profile.

    A beat marks every interior sign change of the profile's first
    difference; runs of equal values are sign-preserving, and an extremum
    plateau yields one beat at its first index.  Saliency is the profile
    value at the beat.  Monotone profiles yield an empty sequence.
    """
    if len(profile) < 3:
        raise ValueError("need at least 3 profile values to detect beats")
    deltas = np.diff(profile.values)
    moving = np.flatnonzero(deltas != 0)
    if len(moving) < 2:
        return BeatSequence(np.empty(0), np.empty(0))
    signs = np.sign(deltas[moving])
    flips = np.flatnonzero(signs[1:] != signs[:-1])
    idx = moving[flips] + 1
    return BeatSequence(profile.frame_times[idx], profile.values[idx])


def detect_visual_beats_sd(poses: PoseSequence, window: int = 5) -> BeatSequence:
    """Baseline detector: beats at local maxima of windowed positional spread.

    Per sliding window of ``window`` frames, each joint contributes the
    standard deviation of its position (square root of summed per-coordinate
    variance); the curve is the sum over joints, timestamped at the window
    center.  Compared with the velocity-sum detector this reads motion at a
    coarser granularity and misses direction-change beats.
    """
    if window < 2:
        raise ValueError("window must span at least 2 frames")
    if poses.frame_count < window:
        raise ValueError(
            f"sequence has {poses.frame_count} frames, shorter than window {window}"
        )
    segments = sliding_window_view(poses.frames, window, axis=0)  # (n, P, D, w)
    spread = np.sqrt(segments.var(axis=3).sum(axis=2))  # (n, P)
    values = spread.sum(axis=1)
    centers = (np.arange(len(values)) + (window - 1) / 2.0) / poses.fps
    idx = _strict_run_maxima(values)
    return BeatSequence(centers[idx], values[idx])

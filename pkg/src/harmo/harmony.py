"""Beat alignment under a reaction-delay tolerance and the harmony score.

Each salient audio beat is anchored to its nearest salient visual beat; the
pair counts as synchronized when the interval is strictly below the delay
tolerance.  The saliency-weighted count of synchronized pairs is normalized
by both beat counts and combined F-score style into a single harmony value.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import AudioClip, detect_audio_beats, onset_envelope
from .beats import BeatSequence
from .config import AnalysisConfig
from .motion import PoseSequence, detect_visual_beats, joint_velocity_sum, smooth_profile
from .saliency import (apply_mask, audio_saliency_mask, visual_saliency_mask,
                       visual_saliency_transform)

# Input durations may legitimately differ by a frame or a hop; warn past this.
DURATION_MISMATCH_TOLERANCE = 0.05


@dataclass(frozen=True)
class AlignmentResult:
    """Per-audio-beat synchronization flags and nearest-visual-beat bookkeeping.

    ``matched_index`` is -1 and ``matched_interval`` infinite where no visual
    beat exists.
    """

    hp: np.ndarray
    matched_index: np.ndarray
    matched_interval: np.ndarray

    def __len__(self) -> int:
        return len(self.hp)


def align_beats(audio: BeatSequence, visual: BeatSequence,
                t_delay: float = 0.25) -> AlignmentResult:
    """Anchor each audio beat to the nearest visual beat.

    A beat pair is synchronized (hp=1) iff its interval is strictly less than
    ``t_delay``.  An equidistant tie between two visual neighbors resolves to
    the earlier one; several audio beats may share one visual beat.
    """
    if len(audio) == 0:
        raise ValueError("audio beat sequence is empty")
    if t_delay <= 0:
        raise ValueError("t_delay must be > 0")
    n = len(audio)
    if len(visual) == 0:
        return AlignmentResult(np.zeros(n, dtype=np.int8),
                               np.full(n, -1, dtype=int),
                               np.full(n, np.inf))
    pos = np.searchsorted(visual.times, audio.times)
    left = np.clip(pos - 1, 0, len(visual) - 1)
    right = np.clip(pos, 0, len(visual) - 1)
    d_left = np.where(pos > 0, np.abs(audio.times - visual.times[left]), np.inf)
    d_right = np.where(pos < len(visual), np.abs(audio.times - visual.times[right]), np.inf)
    take_left = d_left <= d_right
    matched_index = np.where(take_left, left, right)
    matched_interval = np.where(take_left, d_left, d_right)
    hp = (matched_interval < t_delay).astype(np.int8)
    return AlignmentResult(hp, matched_index, matched_interval)


def weighted_hit_sum(result: AlignmentResult, audio_saliency: np.ndarray) -> float:
    """Saliency-weighted count of synchronized beat pairs."""
    audio_saliency = np.asarray(audio_saliency, dtype=float)
    if len(audio_saliency) != len(result):
        raise ValueError(
            f"saliency length {len(audio_saliency)} != alignment length {len(result)}"
        )
    return float(np.sum(result.hp * audio_saliency))


def harmony(h_s: float, n_audio: int, n_visual: int, beta: float = 2.0) -> float:
    """Combine the weighted hit sum with both beat counts into one score.

    Equals the beta-weighted harmonic mean of the per-stream harmonies
    ``h_s/n_audio`` and ``h_s/n_visual``; either count being zero yields 0
    (no beats, nothing to harmonize).
    """
    if beta <= 0:
        raise ValueError("beta must be > 0")
    if n_audio <= 0 or n_visual <= 0:
        return 0.0
    return (1.0 + beta * beta) * h_s / (n_audio * beta * beta + n_visual)


def hit_rate(result: AlignmentResult) -> float:
    """Unweighted fraction of audio beats with a synchronized visual partner."""
    if len(result) == 0:
        raise ValueError("alignment covers no audio beats")
    return float(np.sum(result.hp)) / len(result)


def harmony_loss(h_s: float, n_audio: int, n_visual: int) -> float:
    """Training-style objective: negated hit sum plus the beat-count imbalance.

    The count term penalizes over-frequent beats on either stream that would
    disrupt alignment.
    """
    if n_audio < 0 or n_visual < 0:
        raise ValueError("beat counts must be >= 0")
    return -h_s + abs(n_visual - n_audio)


@dataclass(frozen=True)
class HarmonyReport:
    """Full outcome of one audio/motion harmony analysis."""

    h: float
    h_a: float
    h_v: float
    h_s: float
    hit_rate: float
    loss: float
    n_audio: int
    n_visual: int
    n_audio_raw: int
    n_visual_raw: int
    degenerate: bool
    warning: str | None
    config: dict
    inputs: dict
    audio_times: np.ndarray
    audio_saliency: np.ndarray
    audio_hp: np.ndarray
    visual_times: np.ndarray
    visual_saliency: np.ndarray

    def to_dict(self) -> dict:
        return {
            "h": self.h,
            "h_a": self.h_a,
            "h_v": self.h_v,
            "h_s": self.h_s,
            "hit_rate": self.hit_rate,
            "loss": self.loss,
            "n_audio": self.n_audio,
            "n_visual": self.n_visual,
            "n_audio_raw": self.n_audio_raw,
            "n_visual_raw": self.n_visual_raw,
            "degenerate": self.degenerate,
            "warning": self.warning,
            "config": self.config,
            "inputs": self.inputs,
            "audio_beats": {
                "times": self.audio_times.tolist(),
                "saliency": self.audio_saliency.tolist(),
                "hp": self.audio_hp.tolist(),
            },
            "visual_beats": {
                "times": self.visual_times.tolist(),
                "saliency": self.visual_saliency.tolist(),
            },
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "HarmonyReport":
        return cls(
            h=doc["h"], h_a=doc["h_a"], h_v=doc["h_v"], h_s=doc["h_s"],
            hit_rate=doc["hit_rate"], loss=doc["loss"],
            n_audio=doc["n_audio"], n_visual=doc["n_visual"],
            n_audio_raw=doc["n_audio_raw"], n_visual_raw=doc["n_visual_raw"],
            degenerate=doc["degenerate"], warning=doc.get("warning"),
            config=doc.get("config", {}), inputs=doc.get("inputs", {}),
            audio_times=np.asarray(doc["audio_beats"]["times"], dtype=float),
            audio_saliency=np.asarray(doc["audio_beats"]["saliency"], dtype=float),
            audio_hp=np.asarray(doc["audio_beats"]["hp"], dtype=int),
            visual_times=np.asarray(doc["visual_beats"]["times"], dtype=float),
            visual_saliency=np.asarray(doc["visual_beats"]["saliency"], dtype=float),
        )

    CSV_FIELDS = ("h", "h_a", "h_v", "h_s", "hit_rate", "loss",
                  "n_audio", "n_visual", "n_audio_raw", "n_visual_raw",
                  "degenerate", "warning")

    def to_csv_row(self) -> list:
        return [getattr(self, name) for name in self.CSV_FIELDS]


def _degenerate_report(config: AnalysisConfig, inputs: dict, warning: str | None,
                       n_audio_raw: int, n_visual_raw: int,
                       audio: BeatSequence, visual: BeatSequence,
                       audio_hp: np.ndarray | None = None) -> HarmonyReport:
    n_audio, n_visual = len(audio), len(visual)
    hp = audio_hp if audio_hp is not None else np.zeros(n_audio, dtype=np.int8)
    return HarmonyReport(
        h=0.0, h_a=0.0, h_v=0.0, h_s=0.0, hit_rate=0.0,
        loss=harmony_loss(0.0, n_audio, n_visual),
        n_audio=n_audio, n_visual=n_visual,
        n_audio_raw=n_audio_raw, n_visual_raw=n_visual_raw,
        degenerate=True, warning=warning,
        config=config.to_dict(), inputs=inputs,
        audio_times=audio.times, audio_saliency=audio.saliency, audio_hp=hp,
        visual_times=visual.times, visual_saliency=visual.saliency,
    )


def evaluate_pair(clip: AudioClip, poses: PoseSequence,
                  config: AnalysisConfig | None = None) -> HarmonyReport:
    """Run the full harmony pipeline on an audio clip and a pose sequence.

    Both streams are reduced to salient beats, aligned under the delay
    tolerance, and scored.  Before weighting, salient audio saliencies are
    normalized by their maximum so scores are comparable across clips.
    Differing durations are analyzed over the overlap with a warning; zero
    salient beats on either side yields a degenerate report with h == 0.
    """
    config = config or AnalysisConfig()
    config.validate()

    env = onset_envelope(clip, config.stft())
    audio_raw = detect_audio_beats(env)

    profile = joint_velocity_sum(poses)
    if config.smooth_j > 1:
        profile = smooth_profile(profile, config.smooth_j)
    visual_raw = detect_visual_beats(profile)

    overlap = min(clip.duration, poses.duration)
    warning = None
    if abs(clip.duration - poses.duration) > DURATION_MISMATCH_TOLERANCE:
        warning = (f"durations differ (audio {clip.duration:.3f} s, poses "
                   f"{poses.duration:.3f} s); analyzing first {overlap:.3f} s")
    audio_raw = audio_raw.clipped(0.0, overlap)
    visual_raw = visual_raw.clipped(0.0, overlap)

    inputs = {
        "sample_rate": clip.sample_rate,
        "audio_duration": clip.duration,
        "fps": poses.fps,
        "pose_duration": poses.duration,
        "overlap": overlap,
    }

    if len(audio_raw) == 0 or len(visual_raw) == 0:
        return _degenerate_report(config, inputs, warning,
                                  len(audio_raw), len(visual_raw),
                                  audio_raw, visual_raw)

    salient_audio = apply_mask(audio_raw, audio_saliency_mask(audio_raw, config.lambda1))
    starred = visual_saliency_transform(visual_raw, j_initial=profile.values[0])
    salient_visual = apply_mask(starred, visual_saliency_mask(starred, config.lambda2))

    if len(salient_audio) == 0 or len(salient_visual) == 0:
        return _degenerate_report(config, inputs, warning,
                                  len(audio_raw), len(visual_raw),
                                  salient_audio, salient_visual)

    norm_saliency = salient_audio.saliency / salient_audio.saliency.max()
    result = align_beats(salient_audio, salient_visual, config.t_delay)
    h_s = weighted_hit_sum(result, norm_saliency)
    n_audio, n_visual = len(salient_audio), len(salient_visual)

    return HarmonyReport(
        h=harmony(h_s, n_audio, n_visual, config.beta),
        h_a=h_s / n_audio,
        h_v=h_s / n_visual,
        h_s=h_s,
        hit_rate=hit_rate(result),
        loss=harmony_loss(h_s, n_audio, n_visual),
        n_audio=n_audio, n_visual=n_visual,
        n_audio_raw=len(audio_raw), n_visual_raw=len(visual_raw),
        degenerate=False, warning=warning,
        config=config.to_dict(), inputs=inputs,
        audio_times=salient_audio.times,
        audio_saliency=norm_saliency,
        audio_hp=result.hp,
        visual_times=salient_visual.times,
        visual_saliency=salient_visual.saliency,
    )

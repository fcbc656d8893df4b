"""Attention-style saliency masking of beat sequences.

Perceptually weak beats go unnoticed; both streams are filtered by comparing
each beat's saliency against a scaled population standard deviation of the
whole sequence's saliencies.  Visual beats alternate between velocity maxima
and minima, so their saliencies are first rewritten as successive absolute
differences to keep minima from being penalized.
"""
from __future__ import annotations

import numpy as np

from .beats import BeatSequence


def _threshold_mask(saliency: np.ndarray, scale: float) -> np.ndarray:
    # Population (divide-by-n) SD; a constant sequence has sigma == 0 and any
    # strictly positive saliency passes.
    sigma = float(np.std(saliency))
    return (saliency - scale * sigma > 0).astype(np.int8)


def audio_saliency_mask(beats: BeatSequence, lambda1: float = 0.1) -> np.ndarray:
    """Binary keep-flags for audio beats: saliency must exceed lambda1 * sigma."""
    if len(beats) == 0:
        raise ValueError("cannot mask an empty beat sequence")
    if lambda1 < 0:
        raise ValueError("lambda1 must be >= 0")
    return _threshold_mask(beats.saliency, lambda1)


def visual_saliency_transform(beats: BeatSequence, j_initial: float) -> BeatSequence:
    """Rewrite visual saliencies as absolute successive differences.

    The first beat is differenced against ``j_initial``, the starting value
    of the velocity profile the beats came from; times are unchanged.
    """
    if len(beats) == 0:
        raise ValueError("cannot transform an empty beat sequence")
    previous = np.concatenate([[j_initial], beats.saliency[:-1]])
    return BeatSequence(beats.times, np.abs(beats.saliency - previous))


def visual_saliency_mask(starred: BeatSequence, lambda2: float = 1.0) -> np.ndarray:
    """Binary keep-flags for difference-transformed visual beats."""
    if len(starred) == 0:
        raise ValueError("cannot mask an empty beat sequence")
    if lambda2 < 0:
        raise ValueError("lambda2 must be >= 0")
    return _threshold_mask(starred.saliency, lambda2)


def apply_mask(beats: BeatSequence, mask: np.ndarray) -> BeatSequence:
    """Keep the (time, saliency) pairs whose flag is 1, preserving order.

    For the visual stream, pass the difference-transformed sequence so the
    retained saliencies are the transformed values.
    """
    mask = np.asarray(mask)
    if len(mask) != len(beats):
        raise ValueError(f"mask length {len(mask)} != beat count {len(beats)}")
    keep = mask.astype(bool)
    return BeatSequence(beats.times[keep], beats.saliency[keep])

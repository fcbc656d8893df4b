"""Audio-side rhythm analysis.

load_audio():         read a PCM WAV file into a mono float clip.
onset_envelope():     per-frame onset strength from a log-compressed mel
                      spectrogram (positive spectral flux).
detect_audio_beats(): audio beats at strict local maxima of onset strength.

The envelope uses centered analysis frames: frame ``i`` is the windowed
segment centered on sample ``i * hop_size``, so ``frame_times[i] ==
i * hop_size / sample_rate``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
import scipy.io.wavfile
import scipy.signal
from numpy.lib.stride_tricks import sliding_window_view

from .beats import BeatSequence

_PCM_SCALE = {
    np.dtype(np.int16): 1.0 / 32768.0,
    np.dtype(np.int32): 1.0 / 2147483648.0,
    np.dtype(np.float32): 1.0,
    np.dtype(np.float64): 1.0,
}


@dataclass(frozen=True)
class AudioClip:
    """Mono audio samples (roughly [-1, 1]) at a fixed sample rate in Hz."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1:
            raise ValueError("AudioClip expects a mono 1-D sample array")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        object.__setattr__(self, "samples", samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class StftConfig:
    """Mel-spectrogram analysis parameters.

    ``fmax=None`` resolves to the Nyquist frequency of the analyzed clip.
    """

    window_size: int = 2048
    hop_size: int = 512
    mel_bands: int = 128
    fmin: float = 30.0
    fmax: float | None = None

    def validate(self, sample_rate: int) -> None:
        if not 0 < self.hop_size <= self.window_size:
            raise ValueError("need 0 < hop_size <= window_size")
        if self.mel_bands < 1:
            raise ValueError("mel_bands must be >= 1")
        fmax = self.resolved_fmax(sample_rate)
        if not 0 <= self.fmin < fmax <= sample_rate / 2:
            raise ValueError(
                f"need 0 <= fmin < fmax <= Nyquist, got fmin={self.fmin}, "
                f"fmax={fmax}, Nyquist={sample_rate / 2}"
            )

    def resolved_fmax(self, sample_rate: int) -> float:
        return sample_rate / 2 if self.fmax is None else self.fmax


@dataclass(frozen=True)
class OnsetEnvelope:
    """Non-negative onset strength per analysis frame, with frame times in seconds."""

    values: np.ndarray
    frame_times: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        frame_times = np.asarray(self.frame_times, dtype=float)
        if len(values) != len(frame_times):
            raise ValueError("values and frame_times lengths differ")
        if len(frame_times) > 1 and not np.all(np.diff(frame_times) > 0):
            raise ValueError("frame_times must be strictly increasing")
        if np.any(values < 0):
            raise ValueError("onset strengths must be non-negative")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "frame_times", frame_times)

    def __len__(self) -> int:
        return len(self.values)


def load_audio(path: str | os.PathLike) -> AudioClip:
    """Read a PCM WAV file (16-bit int or 32-bit float, mono or stereo).

    Stereo is downmixed to mono by channel averaging; the header sample rate
    is preserved and integer samples are rescaled to [-1, 1].
    """
    sample_rate, data = scipy.io.wavfile.read(os.fspath(path))
    scale = _PCM_SCALE.get(data.dtype)
    if scale is None:
        raise ValueError(f"unsupported WAV sample encoding: {data.dtype}")
    if data.size == 0:
        raise ValueError(f"zero-length audio: {path}")
    samples = data.astype(float) * scale
    if samples.ndim == 2:
        samples = samples.mean(axis=1)
    elif samples.ndim != 1:
        raise ValueError(f"unsupported channel layout with shape {data.shape}")
    return AudioClip(samples, int(sample_rate))


def hz_to_mel(freq):
    return 2595.0 * np.log10(1.0 + np.asarray(freq, dtype=float) / 700.0)


def mel_to_hz(mel):
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=float) / 2595.0) - 1.0)


def mel_filterbank(sample_rate: int, n_fft: int, n_mels: int,
                   fmin: float, fmax: float) -> np.ndarray:
    """Triangular mel filterbank with unit-peak filters, shape (n_mels, n_fft//2+1)."""
    freqs = np.linspace(0.0, sample_rate / 2.0, n_fft // 2 + 1)
    edges = mel_to_hz(np.linspace(hz_to_mel(fmin), hz_to_mel(fmax), n_mels + 2))
    lower = edges[:-2, None]
    center = edges[1:-1, None]
    upper = edges[2:, None]
    rising = (freqs[None, :] - lower) / np.maximum(center - lower, 1e-12)
    falling = (upper - freqs[None, :]) / np.maximum(upper - center, 1e-12)
    return np.clip(np.minimum(rising, falling), 0.0, None)


def onset_envelope(clip: AudioClip, cfg: StftConfig | None = None) -> OnsetEnvelope:
    """Compute the onset-strength envelope of a clip.

    Per frame, the mel spectrogram magnitude is log-compressed with
    ``log(1 + mel)`` and the strength is the summed positive frame-to-frame
    difference across mel bands.  The first frame has no predecessor and is
    assigned strength 0.

    Raises ValueError if the clip is shorter than one analysis window.
    """
    cfg = cfg or StftConfig()
    cfg.validate(clip.sample_rate)
    n = len(clip.samples)
    if n < cfg.window_size:
        raise ValueError(
            f"clip has {n} samples, need at least one window ({cfg.window_size})"
        )

    pad = cfg.window_size // 2
    padded = np.pad(clip.samples, pad)
    frames = sliding_window_view(padded, cfg.window_size)[::cfg.hop_size]
    window = scipy.signal.get_window("hann", cfg.window_size, fftbins=True)
    spectrum = np.abs(np.fft.rfft(frames * window, axis=1))

    bank = mel_filterbank(clip.sample_rate, cfg.window_size, cfg.mel_bands,
                          cfg.fmin, cfg.resolved_fmax(clip.sample_rate))
    log_mel = np.log1p(spectrum @ bank.T)

    flux = np.maximum(np.diff(log_mel, axis=0), 0.0).sum(axis=1)
    values = np.concatenate([[0.0], flux])
    frame_times = np.arange(len(values)) * (cfg.hop_size / clip.sample_rate)
    return OnsetEnvelope(values, frame_times)


def _strict_run_maxima(values: np.ndarray) -> np.ndarray:
    """Indices of strict local maxima, treating a run of equal values as one
    candidate anchored at its first element.  Runs touching either end of the
    array are never maxima."""
    values = np.asarray(values, dtype=float)
    n = len(values)
    change = np.flatnonzero(np.diff(values) != 0)
    starts = np.concatenate([[0], change + 1])
    ends = np.concatenate([change, [n - 1]])
    interior = (starts > 0) & (ends < n - 1)
    starts = starts[interior]
    ends = ends[interior]
    peak = (values[starts - 1] < values[starts]) & (values[ends + 1] < values[starts])
    return starts[peak]


def detect_audio_beats(env: OnsetEnvelope) -> BeatSequence:
    """Extract audio beats at strict local maxima of the onset envelope.

    Beat saliency is the envelope value at the maximum.  Endpoint frames are
    never beats, and a flat plateau of equal values yields a single beat at
    the plateau's first frame.  A flat envelope yields an empty sequence.
    """
    if len(env) < 3:
        raise ValueError("need at least 3 envelope frames to detect beats")
    idx = _strict_run_maxima(env.values)
    return BeatSequence(env.frame_times[idx], env.values[idx])

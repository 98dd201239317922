"""Short-time spectral analysis and synthesis.

Frames start at ``t * hop``, are weighted by a periodic Hann window of
``win`` samples and zero-padded to ``fft_size``.  Synthesis is weighted
overlap-add normalised by the summed squared window, which is the
least-squares inverse of the analysis and makes Griffin-Lim a proper
alternating projection.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.signal import get_window

from .audio_io import Waveform
from .errors import ConfigMismatch, DimMismatch, SignalTooShort

_WOLA_EPS = 1e-10


@dataclass(frozen=True)
class StftConfig:
    fft_size: int = 1024
    window_ms: float = 64.0
    hop_ms: float = 16.0
    window: str = "hann"

    def __post_init__(self):
        n = int(self.fft_size)
        if n <= 0 or n & (n - 1):
            raise ValueError(f"fft_size must be a positive power of two, got {self.fft_size}")
        if not (self.hop_ms > 0 and self.window_ms > 0):
            raise ValueError("window_ms and hop_ms must be positive")
        if self.hop_ms > self.window_ms:
            raise ValueError(f"hop_ms {self.hop_ms} exceeds window_ms {self.window_ms}")
        if self.window != "hann":
            raise ValueError(f"only the Hann window is supported, got {self.window!r}")

    @classmethod
    def from_samples(cls, fft_size: int, win_length: int, hop_length: int, sample_rate_hz: int):
        return cls(fft_size, 1000.0 * win_length / sample_rate_hz, 1000.0 * hop_length / sample_rate_hz)

    @property
    def n_bins(self) -> int:
        return self.fft_size // 2 + 1

    def win_length(self, sample_rate_hz: int) -> int:
        win = int(round(self.window_ms * sample_rate_hz / 1000.0))
        if win > self.fft_size:
            raise ConfigMismatch(f"window of {win} samples exceeds fft_size {self.fft_size}")
        return max(win, 1)

    def hop_length(self, sample_rate_hz: int) -> int:
        return max(int(round(self.hop_ms * sample_rate_hz / 1000.0)), 1)


# Analysis presets.  "mel80": 1024-point window, 256 hop at 16 kHz.
# "mel512-grif": 50 ms window, 12.5 ms hop.
MEL80 = StftConfig(1024, 64.0, 16.0)
MEL512_GRIF = StftConfig(1024, 50.0, 12.5)


@dataclass(frozen=True)
class Spectrogram:
    """Magnitude spectrogram, T x (fft_size/2 + 1)."""

    frames: np.ndarray
    config: StftConfig
    sample_rate_hz: int

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float64)
        if frames.ndim != 2 or frames.shape[1] != self.config.n_bins:
            raise DimMismatch(f"expected T x {self.config.n_bins} magnitudes, got {frames.shape}")
        if np.any(frames < 0):
            raise ValueError("magnitudes must be non-negative")
        object.__setattr__(self, "frames", frames)


@dataclass(frozen=True)
class MelFilterbank:
    center_freqs: np.ndarray
    weights: np.ndarray
    sample_rate_hz: int

    @property
    def n_mels(self) -> int:
        return len(self.center_freqs)


@lru_cache(maxsize=32)
def hann(win_length: int) -> np.ndarray:
    w = get_window("hann", win_length, fftbins=True)
    w.setflags(write=False)
    return w


def num_frames(n_samples: int, win: int, hop: int) -> int:
    return 1 + (n_samples - win) // hop


def frame_signal(x: np.ndarray, win: int, hop: int) -> np.ndarray:
    T = num_frames(len(x), win, hop)
    return np.lib.stride_tricks.sliding_window_view(x, win)[::hop][:T]


def stft(w: Waveform, cfg: StftConfig) -> np.ndarray:
    """Complex STFT, shape T x (fft_size/2 + 1)."""
    fs = w.sample_rate_hz
    win, hop = cfg.win_length(fs), cfg.hop_length(fs)
    if len(w.samples) < win:
        raise SignalTooShort(f"{len(w.samples)} samples is shorter than one {win}-sample window")
    frames = frame_signal(w.samples, win, hop) * hann(win)
    return np.fft.rfft(frames, n=cfg.fft_size, axis=1)


def istft(spec: np.ndarray, cfg: StftConfig, sample_rate_hz: int, length: int | None = None) -> Waveform:
    """Weighted overlap-add inverse of :func:`stft`."""
    spec = np.asarray(spec)
    if spec.ndim != 2 or spec.shape[1] != cfg.n_bins:
        raise DimMismatch(f"expected T x {cfg.n_bins} spectrogram, got {spec.shape}")
    win, hop = cfg.win_length(sample_rate_hz), cfg.hop_length(sample_rate_hz)
    T = spec.shape[0]
    n = (T - 1) * hop + win if T else 0
    window = hann(win)
    frames = np.fft.irfft(spec, n=cfg.fft_size, axis=1)[:, :win] * window
    y = np.zeros(n)
    norm = np.zeros(n)
    wsq = window**2
    for t in range(T):
        y[t * hop : t * hop + win] += frames[t]
        norm[t * hop : t * hop + win] += wsq
    nz = norm > _WOLA_EPS
    y[nz] /= norm[nz]
    y[~nz] = 0.0
    if length is not None:
        y = np.pad(y, (0, max(0, length - n)))[:length]
    return Waveform(y, sample_rate_hz)


def magnitude_spectrogram(w: Waveform, cfg: StftConfig) -> Spectrogram:
    return Spectrogram(np.abs(stft(w, cfg)), cfg, w.sample_rate_hz)


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(n_mels: int, cfg: StftConfig, sample_rate_hz: int) -> MelFilterbank:
    """Triangular filters with centres equally spaced in mel over (0, fs/2).

    Each filter is normalised to unit sum, so a filter output is a weighted
    average of bin magnitudes.  A filter narrower than one FFT bin falls back
    to its nearest bin.
    """
    if n_mels < 2:
        raise ValueError(f"need at least 2 mel bands, got {n_mels}")
    edges = mel_to_hz(np.linspace(0.0, hz_to_mel(sample_rate_hz / 2.0), n_mels + 2))
    freqs = np.arange(cfg.n_bins) * sample_rate_hz / cfg.fft_size
    lo, mid, hi = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    weights = np.maximum(0.0, np.minimum((freqs - lo) / (mid - lo), (hi - freqs) / (hi - mid)))
    for j in np.flatnonzero(weights.sum(axis=1) <= 0):
        weights[j, np.argmin(np.abs(freqs - edges[j + 1]))] = 1.0
    weights /= weights.sum(axis=1, keepdims=True)
    return MelFilterbank(edges[1:-1].copy(), weights, sample_rate_hz)


def spectral_convergence(mag: np.ndarray, estimate: np.ndarray) -> float:
    """Relative Frobenius error between two one-sided magnitude spectrograms.

    Interior bins are counted twice so the measure equals the full
    two-sided spectral distance.
    """
    n_bins = mag.shape[1]
    weight = np.full(n_bins, 2.0)
    weight[0] = 1.0
    if n_bins > 1:
        weight[-1] = 1.0
    den = np.sqrt(np.sum(weight * mag**2))
    if den == 0.0:
        return 0.0
    return float(np.sqrt(np.sum(weight * (mag - estimate) ** 2)) / den)


def griffin_lim(
    mag: Spectrogram,
    iters: int = 60,
    init_phase="zero",
    seed: int | None = None,
    return_errors: bool = False,
):
    """Estimate a waveform whose STFT magnitude matches ``mag``.

    Alternates overlap-add synthesis and re-analysis, keeping the phase and
    restoring the target magnitude at each step.  ``init_phase`` is
    ``"zero"``, ``"random"`` (needs ``seed``) or an array of phases in
    radians shaped like ``mag.frames``.  With ``return_errors`` the
    spectral convergence after every iteration is returned alongside.
    """
    if iters < 1:
        raise ValueError(f"iters must be >= 1, got {iters}")
    cfg, fs = mag.config, mag.sample_rate_hz
    target = mag.frames
    if isinstance(init_phase, np.ndarray):
        if init_phase.shape != target.shape:
            raise DimMismatch(f"initial phase {init_phase.shape} does not match magnitudes {target.shape}")
        phase = np.exp(1j * init_phase)
    elif init_phase == "zero":
        phase = np.ones_like(target, dtype=np.complex128)
    elif init_phase == "random":
        if seed is None:
            raise ValueError("random initial phase requires a seed")
        rng = np.random.default_rng(seed)
        phase = np.exp(2j * np.pi * rng.random(target.shape))
    else:
        raise ValueError(f"init_phase must be 'zero' or 'random', got {init_phase!r}")

    win, hop = cfg.win_length(fs), cfg.hop_length(fs)
    length = (target.shape[0] - 1) * hop + win
    errors = []
    spec = target * phase
    for _ in range(iters):
        y = istft(spec, cfg, fs, length)
        rebuilt = stft(y, cfg)
        errors.append(spectral_convergence(target, np.abs(rebuilt)))
        spec = target * np.exp(1j * np.angle(rebuilt))
    out = istft(spec, cfg, fs, length)
    if return_errors:
        return out, errors
    return out

"""Mel cepstra and autocorrelation F0 contours."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import dct, idct

from . import dsp
from .audio_io import FeatureFile, Waveform
from .dsp import StftConfig
from .errors import DimMismatch

LOG_FLOOR = 1e-10
VOICING_THRESHOLD = 0.3
RMS_FLOOR = 1e-4


@dataclass(frozen=True)
class MelCepstra:
    """T x M cepstra (row t holds c_0 .. c_{M-1}) and the analysis behind them."""

    coeffs: np.ndarray
    config: StftConfig
    n_mels: int
    mel_center_freqs: np.ndarray
    sample_rate_hz: int

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.float64)
        if c.ndim != 2 or c.shape[1] < 2:
            raise DimMismatch(f"cepstra must be T x M with M >= 2, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("cepstra contain non-finite values")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "mel_center_freqs", np.asarray(self.mel_center_freqs, dtype=np.float64))

    @property
    def n_coeffs(self) -> int:
        return self.coeffs.shape[1]

    @property
    def n_frames(self) -> int:
        return self.coeffs.shape[0]

    def to_feature_file(self) -> FeatureFile:
        return FeatureFile(self.coeffs, self.config.hop_ms, self.sample_rate_hz)

    @classmethod
    def from_feature_file(cls, ff: FeatureFile, config: StftConfig, n_mels: int | None = None):
        """Rebuild cepstra from a VCF1 file.

        The file stores only hop and rate, so the caller supplies the rest of
        the analysis configuration.
        """
        m = ff.dim
        n_mels = n_mels or max(80, m)
        fb = dsp.mel_filterbank(n_mels, config, ff.sample_rate_hz)
        return cls(ff.data.astype(np.float64), config, n_mels, fb.center_freqs, ff.sample_rate_hz)


@dataclass(frozen=True)
class F0Contour:
    f0_hz: np.ndarray
    voiced: np.ndarray
    frame_shift_ms: float

    def __post_init__(self):
        f0 = np.asarray(self.f0_hz, dtype=np.float64)
        voiced = np.asarray(self.voiced, dtype=bool)
        if f0.shape != voiced.shape or f0.ndim != 1:
            raise DimMismatch(f"f0 {f0.shape} and voicing {voiced.shape} disagree")
        if np.any(voiced != (f0 > 0)):
            raise ValueError("voiced flags must equal f0 > 0")
        object.__setattr__(self, "f0_hz", f0)
        object.__setattr__(self, "voiced", voiced)

    def __len__(self):
        return len(self.f0_hz)

    def to_feature_file(self, sample_rate_hz: int) -> FeatureFile:
        data = np.stack([self.f0_hz, self.voiced.astype(np.float64)], axis=1)
        return FeatureFile(data, self.frame_shift_ms, sample_rate_hz)

    @classmethod
    def from_feature_file(cls, ff: FeatureFile):
        if ff.dim != 2:
            raise DimMismatch(f"F0 files have dim 2, got {ff.dim}")
        f0 = ff.data[:, 0].astype(np.float64)
        return cls(np.where(ff.data[:, 1] > 0.5, f0, 0.0), ff.data[:, 1] > 0.5, ff.frame_shift_ms)


def log_mel_spectrogram(w: Waveform, cfg: StftConfig, n_mels: int):
    fb = dsp.mel_filterbank(n_mels, cfg, w.sample_rate_hz)
    mag = np.abs(dsp.stft(w, cfg))
    return np.log(np.maximum(mag @ fb.weights.T, LOG_FLOOR)), fb


def extract_mel_cepstra(w: Waveform, n_coeffs: int = 36, cfg: StftConfig = dsp.MEL80, n_mels: int | None = None) -> MelCepstra:
    """Orthonormal DCT-II of the floored log mel spectrum, first ``n_coeffs`` terms.

    ``n_mels`` defaults to ``max(80, n_coeffs)``.
    """
    n_mels = n_mels or max(80, n_coeffs)
    if not 2 <= n_coeffs <= n_mels:
        raise ValueError(f"need 2 <= n_coeffs <= n_mels, got {n_coeffs} and {n_mels}")
    log_mel, fb = log_mel_spectrogram(w, cfg, n_mels)
    coeffs = dct(log_mel, type=2, norm="ortho", axis=1)[:, :n_coeffs]
    return MelCepstra(coeffs, cfg, n_mels, fb.center_freqs, w.sample_rate_hz)


def cepstra_to_log_mel(coeffs: np.ndarray, n_mels: int) -> np.ndarray:
    """Zero-pad truncated cepstra and invert the orthonormal DCT."""
    coeffs = np.atleast_2d(coeffs)
    padded = np.zeros((coeffs.shape[0], n_mels))
    padded[:, : coeffs.shape[1]] = coeffs
    return idct(padded, type=2, norm="ortho", axis=1)


def _normalized_acf(frame: np.ndarray, max_lag: int) -> np.ndarray:
    """Autocorrelation normalised by the energy of the overlapping segments."""
    n = len(frame)
    spec = np.fft.rfft(frame, n=2 * n)
    r = np.fft.irfft(spec * np.conj(spec))[: max_lag + 2]
    sq = np.concatenate([[0.0], np.cumsum(frame**2)])
    lags = np.arange(len(r))
    # energy of frame[:n-lag] and frame[lag:]
    e_head = sq[n - lags]
    e_tail = sq[n] - sq[lags]
    den = np.sqrt(e_head * e_tail)
    out = np.zeros_like(r)
    ok = den > 0
    out[ok] = r[ok] / den[ok]
    return out


def estimate_f0(
    w: Waveform,
    f0_min: float = 60.0,
    f0_max: float = 500.0,
    cfg: StftConfig = dsp.MEL80,
) -> F0Contour:
    """Frame-wise autocorrelation pitch tracker.

    A frame is voiced when its normalised autocorrelation peak over lags
    ``[fs/f0_max, fs/f0_min]`` reaches 0.3 and its RMS is at least 1e-4.
    The peak lag is refined with a parabola through its neighbours.
    """
    fs = w.sample_rate_hz
    if not 0 < f0_min < f0_max < fs / 2:
        raise ValueError(f"need 0 < f0_min < f0_max < fs/2, got {f0_min}, {f0_max}")
    win, hop = cfg.win_length(fs), cfg.hop_length(fs)
    lag_lo = max(int(np.floor(fs / f0_max)), 2)
    lag_hi = int(np.ceil(fs / f0_min))
    if len(w.samples) < win:
        return F0Contour(np.zeros(0), np.zeros(0, bool), cfg.hop_ms)
    frames = dsp.frame_signal(w.samples, win, hop)
    f0 = np.zeros(len(frames))
    for t, frame in enumerate(frames):
        frame = frame - frame.mean()
        if np.sqrt(np.mean(frame**2)) < RMS_FLOOR:
            continue
        hi = min(lag_hi, win - 2)
        if hi <= lag_lo:
            continue
        acf = _normalized_acf(frame, hi + 1)
        lags = np.arange(lag_lo, hi + 1)
        # local maxima only, so a lag-range edge on a falling slope never wins
        is_peak = (acf[lags] >= acf[lags - 1]) & (acf[lags] >= acf[lags + 1])
        cand = lags[is_peak]
        if len(cand) == 0:
            continue
        peak = acf[cand].max()
        if peak < VOICING_THRESHOLD:
            continue
        # shortest lag whose peak is nearly as strong: avoids sub-octave picks
        # at multiples of the true period
        lag = cand[acf[cand] >= 0.9 * peak][0]
        a, b, c = acf[lag - 1], acf[lag], acf[lag + 1]
        denom = a - 2 * b + c
        shift = 0.5 * (a - c) / denom if denom < 0 else 0.0
        est = fs / (lag + float(np.clip(shift, -0.5, 0.5)))
        f0[t] = np.clip(est, f0_min, f0_max)
    return F0Contour(f0, f0 > 0, cfg.hop_ms)

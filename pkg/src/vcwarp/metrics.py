"""Mel-cepstral distortion and normalised F0 RMSE."""
from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .align import AlignmentPath, dtw_align
from .audio_io import Waveform, resample_linear
from .errors import DimMismatch, EmptySequence
from .features import F0Contour, MelCepstra, estimate_f0, extract_mel_cepstra
from .profiles import Profile, get_profile

MCD_CONST = 10.0 / math.log(10.0) * math.sqrt(2.0)
# contours flatter than this (Hz) are divided by it instead of their own
# spread, so tracker jitter on a steady pitch is not blown up to unit variance
_STD_FLOOR_HZ = 1.0

CSV_FIELDS = (
    "conv_path",
    "ref_path",
    "mcd_db",
    "f0_rmse_norm",
    "n_aligned_frames",
    "n_covoiced_frames",
    "dtw_cost",
    "degenerate_f0",
)


class DegenerateF0Warning(RuntimeWarning):
    """No aligned frame pair is voiced in both contours."""


def mcd_frame(c, c_ref) -> float:
    """Frame MCD in dB, ``(10 / ln 10) sqrt(2 sum_{m>=1} (c_m - c_ref_m)^2)``."""
    c, c_ref = np.asarray(c, dtype=np.float64), np.asarray(c_ref, dtype=np.float64)
    if c.shape != c_ref.shape or c.ndim != 1 or len(c) < 2:
        raise DimMismatch(f"frame shapes {c.shape} and {c_ref.shape} are not comparable")
    return MCD_CONST * float(np.sqrt(np.sum((c[1:] - c_ref[1:]) ** 2)))


def _coeffs(x) -> np.ndarray:
    return np.asarray(getattr(x, "coeffs", x), dtype=np.float64)


def mcd_along(conv, ref, path: AlignmentPath) -> float:
    c, c_ref = _coeffs(conv), _coeffs(ref)
    diff = c[path.a_index, 1:] - c_ref[path.b_index, 1:]
    return MCD_CONST * float(np.mean(np.sqrt(np.sum(diff**2, axis=1))))


def mcd(conv, ref, path: AlignmentPath | None = None) -> float:
    """Mean frame MCD along the DTW path (computed here unless given)."""
    c, c_ref = _coeffs(conv), _coeffs(ref)
    if len(c) == 0 or len(c_ref) == 0:
        raise EmptySequence("MCD of an empty utterance")
    if c.shape[1] != c_ref.shape[1]:
        raise DimMismatch(f"cepstral orders differ: {c.shape[1]} vs {c_ref.shape[1]}")
    if path is None:
        path = dtw_align(c, c_ref)
    return mcd_along(c, c_ref, path)


def _znorm(f0: np.ndarray, voiced: np.ndarray) -> np.ndarray:
    out = np.zeros_like(f0)
    if not voiced.any():
        return out
    v = f0[voiced]
    out[voiced] = (v - v.mean()) / max(v.std(), _STD_FLOOR_HZ)
    return out


def f0_rmse_details(conv_f0: F0Contour, ref_f0: F0Contour, path: AlignmentPath):
    """Return ``(rmse, n_covoiced)`` for z-normalised contours on the path.

    Path indices beyond a contour's length are clamped to its last frame.
    """
    if len(conv_f0) == 0 or len(ref_f0) == 0:
        return 0.0, 0
    i = np.minimum(path.a_index, len(conv_f0) - 1)
    j = np.minimum(path.b_index, len(ref_f0) - 1)
    za = _znorm(conv_f0.f0_hz, conv_f0.voiced)
    zb = _znorm(ref_f0.f0_hz, ref_f0.voiced)
    both = conv_f0.voiced[i] & ref_f0.voiced[j]
    n = int(both.sum())
    if n == 0:
        return 0.0, 0
    return float(np.sqrt(np.mean((za[i[both]] - zb[j[both]]) ** 2))), n


def f0_rmse_normalized(conv_f0: F0Contour, ref_f0: F0Contour, path: AlignmentPath) -> float:
    """RMSE between per-utterance z-normalised F0 over co-voiced aligned pairs.

    Each contour is normalised by the mean and standard deviation of its own
    voiced frames (standard deviation floored at 1 Hz).  With no co-voiced pair the result is 0 and a
    :class:`DegenerateF0Warning` is issued.
    """
    value, n = f0_rmse_details(conv_f0, ref_f0, path)
    if n == 0:
        warnings.warn("no co-voiced frames; F0 RMSE reported as 0", DegenerateF0Warning, stacklevel=2)
    return value


@dataclass
class EvalReport:
    mcd_db: float
    f0_rmse_norm: float
    n_aligned_frames: int
    n_covoiced_frames: int
    dtw_cost: float
    degenerate_f0: bool
    settings: dict = field(default_factory=dict)
    conv_path: str = ""
    ref_path: str = ""

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def csv_row(self) -> list:
        return [getattr(self, name) for name in CSV_FIELDS]

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if header:
            writer.writerow(CSV_FIELDS)
        writer.writerow(self.csv_row())
        return buf.getvalue()


def analyse(w: Waveform, profile: Profile):
    """Cepstra and a frame-matched F0 contour for one utterance."""
    cfg = profile.stft_config
    cep = extract_mel_cepstra(w, profile.n_coeffs, cfg, profile.n_mels)
    f0_cfg = profile.f0_config
    fs = w.sample_rate_hz
    # centre each pitch frame on the matching cepstral frame
    extra = f0_cfg.win_length(fs) - cfg.win_length(fs)
    left = max(extra // 2, 0)
    padded = Waveform(np.pad(w.samples, (left, max(extra - left, 0))), fs)
    f0 = estimate_f0(padded, profile.f0_min, profile.f0_max, f0_cfg)
    n = cep.n_frames
    hz = np.zeros(n)
    hz[: min(n, len(f0))] = f0.f0_hz[:n]
    return cep, F0Contour(hz, hz > 0, cfg.hop_ms)


def evaluate_features(conv_cep: MelCepstra, conv_f0: F0Contour, ref_cep: MelCepstra, ref_f0: F0Contour, settings=None) -> EvalReport:
    path = dtw_align(conv_cep, ref_cep)
    rmse, n_cov = f0_rmse_details(conv_f0, ref_f0, path)
    return EvalReport(
        mcd_db=mcd_along(conv_cep, ref_cep, path),
        f0_rmse_norm=rmse,
        n_aligned_frames=len(path),
        n_covoiced_frames=n_cov,
        dtw_cost=path.cost,
        degenerate_f0=n_cov == 0,
        settings=dict(settings or {}),
    )


def evaluate_pair(conv_audio: Waveform, ref_audio: Waveform, profile: Profile | str = "mcd36") -> EvalReport:
    """Full objective evaluation of converted speech against its reference.

    The converted audio is resampled to the reference rate if they differ.
    """
    profile = get_profile(profile)
    if conv_audio.sample_rate_hz != ref_audio.sample_rate_hz:
        conv_audio = resample_linear(conv_audio, ref_audio.sample_rate_hz)
    conv_cep, conv_f0 = analyse(conv_audio, profile)
    ref_cep, ref_f0 = analyse(ref_audio, profile)
    settings = profile.to_dict()
    settings["sample_rate_hz"] = ref_audio.sample_rate_hz
    return evaluate_features(conv_cep, conv_f0, ref_cep, ref_f0, settings)

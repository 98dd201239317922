"""Synthetic voices with an analytically known warp between them.

A voice is an impulse train at ``f0`` through a cascade of DC-normalised
two-pole resonators, plus seeded white noise 40 dB below the signal RMS.
A warped pair shares f0, noise and bandwidths; only the formant centres of
the target move, through the inverse all-pass map of the planted factor.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace

import numpy as np
from scipy.signal import lfilter

from .audio_io import Waveform
from .errors import WarpOutOfRange
from .warp import phase_warp

NOISE_DB = -40.0
PEAK = 0.5
MAX_PLANTED_ALPHA = 0.3


@dataclass(frozen=True)
class SynthSpec:
    f0_hz: float = 120.0
    formants: tuple = ((700.0, 80.0), (1200.0, 90.0), (2600.0, 120.0), (3500.0, 150.0))
    duration_s: float = 1.0
    sample_rate_hz: int = 16000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "formants", tuple((float(f), float(b)) for f, b in self.formants))
        if not 60.0 <= self.f0_hz <= 500.0:
            raise ValueError(f"f0 must lie in [60, 500] Hz, got {self.f0_hz}")
        if self.duration_s < 0.3:
            raise ValueError(f"duration must be at least 0.3 s, got {self.duration_s}")
        for f, bw in self.formants:
            if not 0 < f < self.sample_rate_hz / 2 or bw <= 0:
                raise ValueError(f"bad formant ({f}, {bw}) at {self.sample_rate_hz} Hz")

    @classmethod
    def from_dict(cls, d: dict) -> "SynthSpec":
        d = dict(d)
        if "formants" in d:
            d["formants"] = tuple(tuple(f) for f in d["formants"])
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "SynthSpec":
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["formants"] = [list(f) for f in self.formants]
        return d


def resonator(freq_hz: float, bw_hz: float, fs: int):
    """Two-pole resonator coefficients with unity gain at DC."""
    r = math.exp(-math.pi * bw_hz / fs)
    c = 2.0 * r * math.cos(2.0 * math.pi * freq_hz / fs)
    a = [1.0, -c, r * r]
    return [1.0 - c + r * r], a


def gen_voice(spec: SynthSpec) -> Waveform:
    fs = spec.sample_rate_hz
    n = int(round(spec.duration_s * fs))
    period = fs / spec.f0_hz
    x = np.zeros(n)
    x[np.round(np.arange(0.0, n, period)).astype(int).clip(max=n - 1)] = 1.0
    for freq, bw in spec.formants:
        b, a = resonator(freq, bw, fs)
        x = lfilter(b, a, x)
    x *= PEAK / np.max(np.abs(x))
    rms = np.sqrt(np.mean(x**2))
    noise = np.random.default_rng(spec.seed).standard_normal(n)
    x = x + rms * 10.0 ** (NOISE_DB / 20.0) * noise
    return Waveform(x, fs)


def warp_frequency(f_hz, alpha: float, fs: float):
    """Map frequencies through the all-pass phase map with factor ``alpha``."""
    return fs / (2.0 * np.pi) * phase_warp(2.0 * np.pi * np.asarray(f_hz, dtype=np.float64) / fs, alpha)


def warped_spec(spec: SynthSpec, alpha_star: float) -> SynthSpec:
    if abs(alpha_star) > MAX_PLANTED_ALPHA:
        raise WarpOutOfRange(f"|alpha*| must be <= {MAX_PLANTED_ALPHA}, got {alpha_star}")
    if alpha_star == 0:
        return spec
    fs = spec.sample_rate_hz
    formants = []
    for f, bw in spec.formants:
        g = float(warp_frequency(f, -alpha_star, fs))
        if not 0 < g < fs / 2:
            raise WarpOutOfRange(f"formant {f} Hz maps to {g} Hz, outside (0, {fs / 2})")
        formants.append((g, bw))
    return replace(spec, formants=tuple(formants))


def gen_warped_pair(spec: SynthSpec, alpha_star: float):
    """Return ``(source, target, alpha_star)``.

    The target's spectrum at phase ``w`` equals the source's at
    ``phase_warp(w, alpha_star)``, so a warp learned from source towards
    target should come out at ``alpha_star``.
    """
    target_spec = warped_spec(spec, alpha_star)
    source = gen_voice(spec)
    target = source if target_spec is spec else gen_voice(target_spec)
    return source, target, alpha_star

"""Named analysis profiles.

``mcd36`` is the evaluation setting (36 cepstra, 5 ms hop) and ``warp80``
the warp-learning setting (80 cepstra over 80 mel bands).  The short
``warp80`` window smears harmonics so the cepstra describe the envelope;
its hop is a quarter window so Griffin-Lim resynthesis stays COLA.
``mel80`` and ``mel512-grif`` mirror two common spectrogram front ends.
"""
from __future__ import annotations

import os
from dataclasses import asdict, dataclass, replace

from .dsp import StftConfig

PROFILE_ENV = "VCWARP_PROFILE"


@dataclass(frozen=True)
class Profile:
    name: str
    fft_size: int
    window_ms: float
    hop_ms: float
    n_mels: int
    n_coeffs: int
    f0_min: float = 60.0
    f0_max: float = 500.0
    f0_window_ms: float = 64.0
    gl_iters: int = 60

    def __post_init__(self):
        if not 2 <= self.n_coeffs <= self.n_mels:
            raise ValueError(f"profile {self.name}: need 2 <= n_coeffs <= n_mels")
        if not 0 < self.f0_min < self.f0_max:
            raise ValueError(f"profile {self.name}: need 0 < f0_min < f0_max")
        self.stft_config  # validates the window settings

    @property
    def stft_config(self) -> StftConfig:
        return StftConfig(self.fft_size, self.window_ms, self.hop_ms)

    @property
    def f0_config(self) -> StftConfig:
        return StftConfig(self.fft_size, max(self.f0_window_ms, self.window_ms), self.hop_ms)

    def to_dict(self) -> dict:
        return asdict(self)

    def with_overrides(self, **kw) -> "Profile":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw) if kw else self


PROFILES = {
    p.name: p
    for p in (
        Profile("mcd36", 1024, 25.0, 5.0, 80, 36),
        Profile("warp80", 1024, 20.0, 5.0, 80, 80),
        Profile("mel80", 1024, 64.0, 16.0, 80, 80),
        Profile("mel512-grif", 1024, 50.0, 12.5, 512, 80),
    )
}


def get_profile(profile) -> Profile:
    if isinstance(profile, Profile):
        return profile
    try:
        return PROFILES[profile]
    except KeyError:
        raise ValueError(f"unknown profile {profile!r}; choose from {sorted(PROFILES)}") from None


def default_profile(fallback: str = "mcd36") -> Profile:
    return get_profile(os.environ.get(PROFILE_ENV) or fallback)

"""Learn a warp from a converted/reference pair, apply it, score both."""
from __future__ import annotations

from dataclasses import dataclass

from .audio_io import Waveform, resample_linear
from .features import extract_mel_cepstra
from .metrics import EvalReport, evaluate_pair
from .profiles import Profile, get_profile
from .warp import WarpModel, apply_warp, learn_warp


def features_for_warp(w: Waveform, profile: Profile):
    return extract_mel_cepstra(w, profile.n_coeffs, profile.stft_config, profile.n_mels)


def learn_from_audio(conv: Waveform, ref: Waveform, profile="warp80", mode: str = "scalar") -> WarpModel:
    profile = get_profile(profile)
    if conv.sample_rate_hz != ref.sample_rate_hz:
        conv = resample_linear(conv, ref.sample_rate_hz)
    return learn_warp(features_for_warp(conv, profile), features_for_warp(ref, profile), mode)


@dataclass
class PipelineResult:
    warped: Waveform
    model: WarpModel
    before: EvalReport
    after: EvalReport

    def summary(self) -> dict:
        alpha = self.model.alpha if self.model.mode == "scalar" else self.model.alpha.tolist()
        return {
            "alpha": alpha,
            "mode": self.model.mode,
            "mcd_before": self.before.mcd_db,
            "mcd_after": self.after.mcd_db,
            "f0_rmse_before": self.before.f0_rmse_norm,
            "f0_rmse_after": self.after.f0_rmse_norm,
            "before": self.before.to_dict(),
            "after": self.after.to_dict(),
        }


def run_pipeline(
    conv: Waveform,
    ref: Waveform,
    eval_profile="mcd36",
    warp_profile="warp80",
    mode: str = "scalar",
    excitation: str = "envelope",
    gl_iters: int | None = None,
) -> PipelineResult:
    """Score ``conv`` against ``ref``, warp it towards ``ref``, score again."""
    warp_profile = get_profile(warp_profile)
    if conv.sample_rate_hz != ref.sample_rate_hz:
        conv = resample_linear(conv, ref.sample_rate_hz)
    before = evaluate_pair(conv, ref, eval_profile)
    model = learn_from_audio(conv, ref, warp_profile, mode)
    warped = apply_warp(model, conv, gl_iters or warp_profile.gl_iters, excitation)
    after = evaluate_pair(warped, ref, eval_profile)
    return PipelineResult(warped, model, before, after)

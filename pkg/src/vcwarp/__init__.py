"""Learned all-pass frequency warping and objective scoring for voice conversion output."""

__version__ = "0.1.0"

from .audio_io import FeatureFile, Waveform, read_features, read_wav, write_features, write_wav
from .features import F0Contour, MelCepstra, estimate_f0, extract_mel_cepstra
from .metrics import EvalReport, evaluate_pair, mcd
from .warp import WarpModel, apply_warp, learn_warp

__all__ = [
    "EvalReport",
    "F0Contour",
    "FeatureFile",
    "MelCepstra",
    "WarpModel",
    "Waveform",
    "apply_warp",
    "estimate_f0",
    "evaluate_pair",
    "extract_mel_cepstra",
    "learn_warp",
    "mcd",
    "read_features",
    "read_wav",
    "write_features",
    "write_wav",
]

"""Bilinear (all-pass) frequency warping of mel cepstra.

A cepstrum ``c`` is turned into a spectrum by a cosine matrix,
``S_k = sum_m D[k, m] c_m``.  The reference matrix evaluates the cosines on
an unwarped phase grid, ``D*[k, m] = cos(m * theta[k, m])``; the warp matrix
first passes the phase through the first-order all-pass map,
``D[k, m] = cos(m * phase_warp(theta[k, m], alpha))``.  Learning picks the
warp factor that brings the warped converted spectra closest, in mean
squared error over DTW-aligned frames, to the reference spectra of the
target speech.

Two phase grids are available:

``"mel"`` (default)
    Bin ``k`` has linear phase ``theta_k = 2 pi k / N``.  The all-pass map
    warps that phase, and the cosine is read at the mel-axis position of the
    warped frequency, ``D[k, m] = cos(m mu(phase_warp(theta_k, alpha)))``
    with ``mu`` the phase of the DCT basis of the cepstra.  So ``D* c`` is the
    log mel envelope sampled at the FFT bins and ``D c`` the same envelope
    read at all-pass warped frequencies, which is how a vocal tract length
    change moves formants.
``"literal"``
    ``theta[k, m] = 2 pi f_m k / f_s`` with one mel centre frequency per
    cepstral order, folded into [0, pi] and warped directly.  Kept for
    completeness; its high-order columns oscillate so quickly in ``alpha``
    that the cost is minimised at ``alpha = 0`` for all practical inputs.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import dsp
from .align import AlignmentPath, dtw_align
from .audio_io import Waveform
from .dsp import Spectrogram, StftConfig
from .errors import (
    ConfigMismatch,
    DegenerateDenominator,
    DimMismatch,
    EmptySequence,
    NonFiniteCost,
)
from .features import MelCepstra, extract_mel_cepstra

ALPHA_BOX = (-0.95, 0.95)
GRID_STEP = 0.01
GOLDEN_TOL = 1e-5
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _check_freqs(f_src, f_tgt, fs):
    if not (0 < f_src < fs / 2 and 0 < f_tgt < fs / 2):
        raise ValueError(f"frequencies must lie in (0, fs/2), got {f_src}, {f_tgt} at fs={fs}")


def alpha_from_freqs(f_src: float, f_tgt: float, fs: float) -> float:
    """``sin(pi (f_src - f_tgt) / fs) / cos(pi (f_src + f_tgt) / fs)``.

    A quick warp-factor estimate from one source/target formant pair.  It is
    zero for equal frequencies and has the opposite sign to
    :func:`allpass_alpha`, but it does not in general carry ``f_src`` exactly
    onto ``f_tgt`` under :func:`phase_warp`; use :func:`allpass_alpha` for that.
    """
    _check_freqs(f_src, f_tgt, fs)
    den = math.cos(math.pi * (f_src + f_tgt) / fs)
    if abs(den) < 1e-9:
        raise DegenerateDenominator(f"cos(pi*({f_src}+{f_tgt})/{fs}) vanishes")
    return math.sin(math.pi * (f_src - f_tgt) / fs) / den


def allpass_alpha(f_src: float, f_tgt: float, fs: float) -> float:
    """The factor with ``phase_warp(2 pi f_src / fs, alpha) == 2 pi f_tgt / fs``."""
    _check_freqs(f_src, f_tgt, fs)
    return math.sin(math.pi * (f_tgt - f_src) / fs) / math.sin(math.pi * (f_tgt + f_src) / fs)


def phase_warp(theta, alpha):
    """All-pass warped phase, unwrapped.

    ``theta + 2 atan(alpha sin(theta) / (1 - alpha cos(theta)))`` is the
    continuous branch of ``atan(((1 - a^2) sin t) / ((1 + a^2) cos t - 2a))``:
    it fixes 0 and pi and increases strictly on [0, pi] for ``|alpha| < 1``.
    """
    theta = np.asarray(theta, dtype=np.float64)
    alpha = np.asarray(alpha, dtype=np.float64)
    if np.any(np.abs(alpha) >= 1.0):
        raise ValueError("|alpha| must be < 1")
    return theta + 2.0 * np.arctan2(alpha * np.sin(theta), 1.0 - alpha * np.cos(theta))


def phase_warp_dalpha(theta, alpha):
    """Partial derivative of :func:`phase_warp` with respect to ``alpha``."""
    theta = np.asarray(theta, dtype=np.float64)
    return 2.0 * np.sin(theta) / (1.0 - 2.0 * alpha * np.cos(theta) + alpha * alpha)


def reflect_phase(theta):
    """Fold any phase into [0, pi] (mod 2 pi, then mirror about pi)."""
    t = np.mod(np.asarray(theta, dtype=np.float64), 2.0 * np.pi)
    return np.where(t > np.pi, 2.0 * np.pi - t, t)


def literal_phase_grid(n_fft: int, f_m, fs: float) -> np.ndarray:
    """``2 pi f_m k / fs`` for k = 0..n_fft/2, one column per entry of ``f_m``."""
    f_m = np.asarray(f_m, dtype=np.float64)
    if np.any(f_m <= 0) or np.any(f_m > fs / 2):
        raise ValueError("mel frequencies must lie in (0, fs/2]")
    k = np.arange(n_fft // 2 + 1, dtype=np.float64)[:, None]
    return 2.0 * np.pi * f_m[None, :] * k / fs


def mel_angle(f_hz, mel_center_freqs):
    """Phase of frequency ``f_hz`` on the mel axis of the cepstral DCT.

    Band ``j`` of ``J`` equally mel-spaced bands sits at ``pi (j + 1/2) / J``;
    frequencies between centres interpolate linearly in mel.
    """
    mels = dsp.hz_to_mel(np.asarray(mel_center_freqs, dtype=np.float64))
    n_mels = len(mels)
    spacing = (mels[-1] - mels[0]) / (n_mels - 1)
    return np.pi * ((dsp.hz_to_mel(f_hz) - mels[0]) / spacing + 0.5) / n_mels


def mel_angle_slope(f_hz, mel_center_freqs):
    """Derivative of :func:`mel_angle` with respect to frequency in Hz."""
    mels = dsp.hz_to_mel(np.asarray(mel_center_freqs, dtype=np.float64))
    n_mels = len(mels)
    spacing = (mels[-1] - mels[0]) / (n_mels - 1)
    dmel_df = 2595.0 / (math.log(10.0) * (700.0 + np.asarray(f_hz, dtype=np.float64)))
    return np.pi * dmel_df / (spacing * n_mels)


def mel_phase_grid(n_fft: int, mel_center_freqs, fs: float) -> np.ndarray:
    """Mel-axis phase of every FFT bin."""
    return mel_angle(np.arange(n_fft // 2 + 1) * fs / n_fft, mel_center_freqs)


def _orders(n_coeffs: int) -> np.ndarray:
    return np.arange(n_coeffs, dtype=np.float64)[None, :]


def _grid(theta, n_coeffs: int) -> np.ndarray:
    theta = reflect_phase(theta)
    if theta.ndim == 1:
        theta = theta[:, None]
    if theta.shape[1] not in (1, n_coeffs):
        raise DimMismatch(f"phase grid has {theta.shape[1]} columns, expected 1 or {n_coeffs}")
    return theta


def _check_alpha(alpha, n_coeffs: int) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.ndim == 1 and alpha.shape != (n_coeffs,):
        raise DimMismatch(f"got {alpha.shape[0]} per-band alphas for {n_coeffs} coefficients")
    return alpha


def reference_matrix(theta, n_coeffs: int) -> np.ndarray:
    """``cos(m theta)`` on a bin-only (1-D) or per-order (2-D) phase grid."""
    return np.cos(_orders(n_coeffs) * _grid(theta, n_coeffs))


def warp_matrix(theta, alpha, n_coeffs: int) -> np.ndarray:
    """``cos(m phase_warp(theta, alpha))``; ``alpha`` is a scalar or one value per order."""
    alpha = _check_alpha(alpha, n_coeffs)
    return np.cos(_orders(n_coeffs) * phase_warp(_grid(theta, n_coeffs), alpha))


def build_reference_matrix(n_fft: int, n_coeffs: int, f_m, fs: float) -> np.ndarray:
    """Reference matrix on the literal grid, ``cos(m 2 pi f_m k / fs)``."""
    f_m = np.asarray(f_m, dtype=np.float64)
    if f_m.shape != (n_coeffs,):
        raise DimMismatch(f"need {n_coeffs} mel frequencies, got {f_m.shape}")
    return reference_matrix(literal_phase_grid(n_fft, f_m, fs), n_coeffs)


def build_warp_matrix(alpha, n_fft: int, n_coeffs: int, f_m, fs: float) -> np.ndarray:
    """Warp matrix on the literal grid."""
    f_m = np.asarray(f_m, dtype=np.float64)
    if f_m.shape != (n_coeffs,):
        raise DimMismatch(f"need {n_coeffs} mel frequencies, got {f_m.shape}")
    return warp_matrix(literal_phase_grid(n_fft, f_m, fs), alpha, n_coeffs)


class PhaseGrid:
    """The phase each matrix entry takes the cosine of, as a function of alpha."""

    def __init__(self, kind: str, n_fft: int, n_coeffs: int, freqs, fs: float):
        if kind not in ("mel", "literal"):
            raise ValueError(f"phase_grid must be 'mel' or 'literal', got {kind!r}")
        self.kind, self.n_coeffs, self.fs = kind, n_coeffs, fs
        self.freqs = np.asarray(freqs, dtype=np.float64)
        if kind == "mel":
            self.theta = (2.0 * np.pi * np.arange(n_fft // 2 + 1) / n_fft)[:, None]
        else:
            if self.freqs.shape != (n_coeffs,):
                raise DimMismatch(f"need {n_coeffs} mel frequencies, got {self.freqs.shape}")
            self.theta = _grid(literal_phase_grid(n_fft, self.freqs, fs), n_coeffs)

    def _to_hz(self, phase):
        return phase * self.fs / (2.0 * np.pi)

    def phase(self, alpha) -> np.ndarray:
        warped = phase_warp(self.theta, _check_alpha(alpha, self.n_coeffs))
        if self.kind == "mel":
            return mel_angle(self._to_hz(warped), self.freqs)
        return warped

    def dphase(self, alpha) -> np.ndarray:
        alpha = _check_alpha(alpha, self.n_coeffs)
        d = phase_warp_dalpha(self.theta, alpha)
        if self.kind == "mel":
            warped = phase_warp(self.theta, alpha)
            d = d * mel_angle_slope(self._to_hz(warped), self.freqs) * self.fs / (2.0 * np.pi)
        return d

    def matrix(self, alpha) -> np.ndarray:
        return np.cos(_orders(self.n_coeffs) * self.phase(alpha))

    def reference(self) -> np.ndarray:
        return self.matrix(0.0)


@dataclass(frozen=True)
class WarpModel:
    """Learned warp factor(s) plus everything needed to rebuild D and D*.

    ``mel_center_freqs`` holds the analysis filterbank centres for the mel
    grid, or one frequency per cepstral order for the literal grid.
    """

    alpha: float | np.ndarray
    fft_size: int
    n_coeffs: int
    sample_rate_hz: int
    mel_center_freqs: np.ndarray
    mode: str = "scalar"
    phase_grid: str = "mel"
    window_ms: float = dsp.MEL80.window_ms
    hop_ms: float = dsp.MEL80.hop_ms
    train_cost: float | None = field(default=None, compare=False)
    identity_cost: float | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.mode not in ("scalar", "perband"):
            raise ValueError(f"mode must be 'scalar' or 'perband', got {self.mode!r}")
        if self.phase_grid not in ("mel", "literal"):
            raise ValueError(f"phase_grid must be 'mel' or 'literal', got {self.phase_grid!r}")
        if self.mode == "scalar":
            object.__setattr__(self, "alpha", float(self.alpha))
        else:
            alpha = np.asarray(self.alpha, dtype=np.float64)
            if alpha.shape != (self.n_coeffs,):
                raise DimMismatch(f"per-band mode needs {self.n_coeffs} alphas, got {alpha.shape}")
            object.__setattr__(self, "alpha", alpha)
        if np.any(np.abs(self.alpha) >= 1.0):
            raise ValueError("warp factors must satisfy |alpha| < 1")
        object.__setattr__(self, "mel_center_freqs", np.asarray(self.mel_center_freqs, dtype=np.float64))

    @property
    def config(self) -> StftConfig:
        return StftConfig(self.fft_size, self.window_ms, self.hop_ms)

    @property
    def n_mels(self) -> int:
        return len(self.mel_center_freqs) if self.phase_grid == "mel" else max(80, self.n_coeffs)

    @cached_property
    def grid(self) -> PhaseGrid:
        return PhaseGrid(self.phase_grid, self.fft_size, self.n_coeffs, self.mel_center_freqs, self.sample_rate_hz)

    @cached_property
    def D(self) -> np.ndarray:
        return self.grid.matrix(self.alpha)

    @cached_property
    def D_star(self) -> np.ndarray:
        return self.grid.reference()

    def to_dict(self) -> dict:
        out = {"mode": self.mode}
        if self.mode == "scalar":
            out["alpha"] = self.alpha
        else:
            out["alphas"] = self.alpha.tolist()
        out.update(
            fft_size=self.fft_size,
            n_coeffs=self.n_coeffs,
            sample_rate_hz=self.sample_rate_hz,
            mel_center_freqs=self.mel_center_freqs.tolist(),
            phase_grid=self.phase_grid,
            window_ms=self.window_ms,
            hop_ms=self.hop_ms,
        )
        if self.train_cost is not None:
            out["train_cost"] = self.train_cost
            out["identity_cost"] = self.identity_cost
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "WarpModel":
        mode = d["mode"]
        alpha = d["alpha"] if mode == "scalar" else d["alphas"]
        return cls(
            alpha=alpha,
            fft_size=int(d["fft_size"]),
            n_coeffs=int(d["n_coeffs"]),
            sample_rate_hz=int(d["sample_rate_hz"]),
            mel_center_freqs=d["mel_center_freqs"],
            mode=mode,
            phase_grid=d.get("phase_grid", "mel"),
            window_ms=float(d.get("window_ms", dsp.MEL80.window_ms)),
            hop_ms=float(d.get("hop_ms", dsp.MEL80.hop_ms)),
            train_cost=d.get("train_cost"),
            identity_cost=d.get("identity_cost"),
        )

    @classmethod
    def from_json(cls, text: str) -> "WarpModel":
        return cls.from_dict(json.loads(text))


def _coeffs(x) -> np.ndarray:
    return np.asarray(getattr(x, "coeffs", x), dtype=np.float64)


def warp_cost(D, D_star, conv, ref, path: AlignmentPath) -> float:
    """Mean over aligned frame pairs of ``sum_k (D c - D* c_ref)_k^2``."""
    c, c_ref = _coeffs(conv), _coeffs(ref)
    D, D_star = np.asarray(D), np.asarray(D_star)
    if not (D.shape == D_star.shape and D.shape[1] == c.shape[1] == c_ref.shape[1]):
        raise DimMismatch(
            f"D {D.shape}, D* {D_star.shape}, cepstra dims {c.shape[1]} and {c_ref.shape[1]} disagree"
        )
    resid = c[path.a_index] @ D.T - c_ref[path.b_index] @ D_star.T
    return float(np.mean(np.sum(resid**2, axis=1)))


class WarpObjective:
    """The warp cost as a function of alpha, with the aligned data folded in.

    Expanding the square, the cost depends on the cepstra only through
    ``S = C^T C / P``, ``Q = C^T Y / P`` and ``|Y|^2 / P`` where ``C`` stacks the
    aligned converted frames and ``Y`` the reference spectra, so each
    evaluation costs O(K M^2) regardless of utterance length.
    """

    def __init__(self, grid: PhaseGrid, conv, ref, path: AlignmentPath):
        c, c_ref = _coeffs(conv), _coeffs(ref)
        self.grid = grid
        self.n_coeffs = c.shape[1]
        if grid.n_coeffs != self.n_coeffs:
            raise DimMismatch(f"phase grid is for M={grid.n_coeffs}, cepstra have M={self.n_coeffs}")
        self.D_star = grid.reference()
        C = c[path.a_index]
        Y = c_ref[path.b_index] @ self.D_star.T
        P = len(path)
        self.S = C.T @ C / P
        self.Q = C.T @ Y / P
        self.yy = float(np.sum(Y**2)) / P

    def __call__(self, alpha) -> float:
        D = self.grid.matrix(alpha)
        val = np.sum((D @ self.S - 2.0 * self.Q.T) * D) + self.yy
        return float(max(val, 0.0))

    def gradient(self, alphas) -> np.ndarray:
        """Cost gradient with respect to per-order warp factors."""
        alphas = np.asarray(alphas, dtype=np.float64)
        orders = _orders(self.n_coeffs)
        phase = self.grid.phase(alphas)
        D = np.cos(orders * phase)
        dD = -orders * np.sin(orders * phase) * self.grid.dphase(alphas)
        dE_dD = 2.0 * (D @ self.S - self.Q.T)
        return np.sum(dE_dD * dD, axis=0)


def golden_section(f, lo: float, hi: float, tol: float = GOLDEN_TOL):
    """Minimise a unimodal ``f`` on [lo, hi] until the bracket is shorter than ``tol``."""
    x1 = hi - INV_PHI * (hi - lo)
    x2 = lo + INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - INV_PHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + INV_PHI * (hi - lo)
            f2 = f(x2)
    x = 0.5 * (lo + hi)
    return x, f(x)


def _check_pair(conv: MelCepstra, ref: MelCepstra):
    if conv.n_frames == 0 or ref.n_frames == 0:
        raise EmptySequence("cannot learn a warp from an empty utterance")
    if conv.n_coeffs != ref.n_coeffs:
        raise DimMismatch(
            f"converted features have M={conv.n_coeffs}, reference features have M={ref.n_coeffs}"
        )
    if conv.sample_rate_hz != ref.sample_rate_hz or conv.config.fft_size != ref.config.fft_size:
        raise ConfigMismatch("converted and reference features use different analysis settings")


def _finite(value: float) -> float:
    if not math.isfinite(value):
        raise NonFiniteCost(f"warp cost evaluated to {value}")
    return value


def learn_warp(
    conv: MelCepstra,
    ref: MelCepstra,
    mode: str = "scalar",
    *,
    phase_grid: str = "mel",
    path: AlignmentPath | None = None,
    grid_step: float = GRID_STEP,
    tol: float = GOLDEN_TOL,
    max_iter: int = 200,
) -> WarpModel:
    """Fit the warp factor(s) that map converted cepstra onto reference cepstra.

    The alignment is computed once on the unwarped features and held fixed.
    Scalar mode scans the box (-0.95, 0.95) with ``grid_step`` and polishes
    the best grid point by golden-section search; the result never costs
    more than the identity warp.  Per-band mode starts from the scalar
    solution and runs projected gradient descent with backtracking on one
    warp factor per cepstral order.
    """
    _check_pair(conv, ref)
    if path is None:
        path = dtw_align(conv, ref)
    fs, n_fft, M = conv.sample_rate_hz, conv.config.fft_size, conv.n_coeffs
    if phase_grid == "literal":
        centers = dsp.mel_filterbank(M, conv.config, fs).center_freqs
    else:
        centers = conv.mel_center_freqs
    objective = WarpObjective(PhaseGrid(phase_grid, n_fft, M, centers, fs), conv, ref, path)
    lo_box, hi_box = ALPHA_BOX
    n_steps = int(round((hi_box - lo_box) / grid_step))
    grid = np.round(np.linspace(lo_box, hi_box, n_steps + 1), 12)
    costs = np.array([_finite(objective(a)) for a in grid])
    identity_cost = _finite(objective(0.0))

    i = int(np.argmin(costs))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    alpha, cost = golden_section(objective, lo, hi, tol)
    if not cost <= costs[i]:
        alpha, cost = float(grid[i]), float(costs[i])
    if not cost <= identity_cost:
        alpha, cost = 0.0, identity_cost
    _finite(cost)

    if mode == "perband":
        alpha, cost = _descend_per_band(objective, np.full(M, alpha), cost, max_iter)
    elif mode != "scalar":
        raise ValueError(f"mode must be 'scalar' or 'perband', got {mode!r}")

    return WarpModel(
        alpha=alpha,
        fft_size=n_fft,
        n_coeffs=M,
        sample_rate_hz=fs,
        mel_center_freqs=centers,
        mode=mode,
        phase_grid=phase_grid,
        window_ms=conv.config.window_ms,
        hop_ms=conv.config.hop_ms,
        train_cost=float(cost),
        identity_cost=identity_cost,
    )


def _descend_per_band(objective: WarpObjective, alphas: np.ndarray, cost: float, max_iter: int):
    lo, hi = ALPHA_BOX
    step = 0.05
    for _ in range(max_iter):
        g = objective.gradient(alphas)
        scale = np.max(np.abs(g))
        if scale == 0.0:
            break
        direction = -g / scale
        while step > 1e-8:
            trial = np.clip(alphas + step * direction, lo, hi)
            trial_cost = _finite(objective(trial))
            if trial_cost < cost:
                break
            step *= 0.5
        else:
            break
        improvement = cost - trial_cost
        alphas, cost = trial, trial_cost
        step = min(step * 2.0, 0.2)
        if improvement <= 1e-10 * max(cost, 1.0):
            break
    return alphas, cost


def apply_warp_to_cepstra(model: WarpModel, conv) -> np.ndarray:
    """Warped spectra, one row ``D c_t`` per frame."""
    c = _coeffs(conv)
    if c.ndim != 2 or c.shape[1] != model.n_coeffs:
        raise DimMismatch(f"model expects M={model.n_coeffs}, cepstra have shape {c.shape}")
    return c @ model.D.T


def dct_weights(n_coeffs: int, n_mels: int) -> np.ndarray:
    """Orthonormal DCT-II basis scales, so ``D* (w * c)`` is a log mel value."""
    w = np.full(n_coeffs, math.sqrt(2.0 / n_mels))
    w[0] = math.sqrt(1.0 / n_mels)
    return w


def warped_log_magnitude(model: WarpModel, conv: MelCepstra) -> np.ndarray:
    """Per-frame warped log-magnitude envelope on the FFT bins."""
    return apply_warp_to_cepstra(model, conv.coeffs * dct_weights(model.n_coeffs, conv.n_mels))


def apply_warp(
    model: WarpModel,
    conv_audio: Waveform,
    gl_iters: int = 60,
    excitation: str = "envelope",
    init_phase: str = "zero",
    seed: int | None = None,
) -> Waveform:
    """Resynthesise ``conv_audio`` with its spectral envelope warped.

    ``excitation="envelope"`` rebuilds each frame from the warped cepstral
    envelope alone.  ``"keep"`` instead adds the warped-minus-unwarped
    envelope to the frame's own log magnitude, preserving harmonic fine
    structure, and seeds Griffin-Lim with the original phase; ``init_phase``
    and ``seed`` then have no effect.
    """
    if conv_audio.sample_rate_hz != model.sample_rate_hz:
        raise ConfigMismatch(
            f"model trained at {model.sample_rate_hz} Hz, audio is {conv_audio.sample_rate_hz} Hz"
        )
    cfg = model.config
    fs = conv_audio.sample_rate_hz
    n = len(conv_audio.samples)
    win = cfg.win_length(fs)
    x = conv_audio.samples
    if n < win:
        x = np.pad(x, (0, win - n))
    w = Waveform(x, fs)
    cep = extract_mel_cepstra(w, model.n_coeffs, cfg, model.n_mels)
    log_env = warped_log_magnitude(model, cep)
    if excitation == "envelope":
        mag = np.exp(log_env)
        out = dsp.griffin_lim(Spectrogram(mag, cfg, fs), gl_iters, init_phase, seed)
    elif excitation == "keep":
        spec = dsp.stft(w, cfg)
        flat = (cep.coeffs * dct_weights(model.n_coeffs, cep.n_mels)) @ model.D_star.T
        mag = np.abs(spec) * np.exp(log_env - flat)
        out = dsp.griffin_lim(Spectrogram(mag, cfg, fs), gl_iters, init_phase=np.angle(spec))
    else:
        raise ValueError(f"excitation must be 'envelope' or 'keep', got {excitation!r}")
    y = out.samples
    y = np.pad(y, (0, max(0, n - len(y))))[:n]
    return Waveform(y, fs)


"""WAV and VCF1 feature-file input/output.

WAV support is deliberately narrow: mono RIFF/WAVE holding either 16-bit
integer PCM or 32-bit IEEE float.  16-bit samples ``s`` map to ``s / 32768``;
the writer clips to [-1, 1] and rounds half away from zero.

VCF1 layout (all little-endian)::

    bytes 0-7    b"VCFEAT01"
    u32          frame_count
    u32          dim
    f32          frame_shift_ms
    u32          sample_rate_hz
    f32[...]     frame_count * dim values, row-major
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import BadMagic, DimMismatch, MalformedWav, TruncatedFile, UnsupportedEncoding

FEATURE_MAGIC = b"VCFEAT01"
_FEATURE_HEADER = struct.Struct("<8sIIfI")

_FORMAT_PCM = 0x0001
_FORMAT_FLOAT = 0x0003
_FORMAT_EXTENSIBLE = 0xFFFE


@dataclass(frozen=True)
class Waveform:
    """Mono audio with its sample rate."""

    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise DimMismatch(f"waveform must be 1-D, got shape {samples.shape}")
        if int(self.sample_rate_hz) <= 0:
            raise ValueError(f"sample rate must be positive, got {self.sample_rate_hz}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate_hz", int(self.sample_rate_hz))

    def __len__(self):
        return len(self.samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz


@dataclass(frozen=True)
class FeatureFile:
    """A frame_count x dim float32 matrix plus analysis metadata."""

    data: np.ndarray
    frame_shift_ms: float
    sample_rate_hz: int
    magic: bytes = field(default=FEATURE_MAGIC)

    def __post_init__(self):
        data = np.asarray(self.data, dtype="<f4")
        if data.ndim != 2 or data.shape[1] < 1:
            raise DimMismatch(f"feature data must be 2-D with dim >= 1, got shape {data.shape}")
        data = np.ascontiguousarray(data)
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def frame_count(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]


def _iter_chunks(buf: bytes):
    pos = 12
    while pos + 8 <= len(buf):
        cid, size = struct.unpack_from("<4sI", buf, pos)
        body = buf[pos + 8 : pos + 8 + size]
        if len(body) < size:
            raise MalformedWav(f"chunk {cid!r} truncated: declared {size} bytes, found {len(body)}")
        yield cid, body
        pos += 8 + size + (size & 1)


def read_wav(path) -> Waveform:
    """Read a mono 16-bit PCM or 32-bit float WAV file into a Waveform."""
    buf = Path(path).read_bytes()
    if len(buf) < 12 or buf[:4] != b"RIFF" or buf[8:12] != b"WAVE":
        raise MalformedWav(f"{path}: not a RIFF/WAVE file")

    fmt = data = None
    for cid, body in _iter_chunks(buf):
        if cid == b"fmt ":
            fmt = body
        elif cid == b"data" and data is None:
            data = body
    if fmt is None or len(fmt) < 16:
        raise MalformedWav(f"{path}: missing or short fmt chunk")
    if data is None:
        raise MalformedWav(f"{path}: missing data chunk")

    tag, channels, rate, _, block_align, bits = struct.unpack_from("<HHIIHH", fmt)
    if tag == _FORMAT_EXTENSIBLE:
        if len(fmt) < 26:
            raise MalformedWav(f"{path}: short WAVE_FORMAT_EXTENSIBLE header")
        # first two bytes of the subformat GUID carry the plain format tag
        (tag,) = struct.unpack_from("<H", fmt, 24)
    if channels != 1:
        raise UnsupportedEncoding(f"{path}: {channels} channels, only mono is supported")
    if rate <= 0:
        raise MalformedWav(f"{path}: sample rate {rate}")

    if tag == _FORMAT_PCM and bits == 16:
        n = len(data) // 2
        samples = np.frombuffer(data[: 2 * n], dtype="<i2").astype(np.float64) / 32768.0
    elif tag == _FORMAT_FLOAT and bits == 32:
        n = len(data) // 4
        samples = np.frombuffer(data[: 4 * n], dtype="<f4").astype(np.float64)
    else:
        raise UnsupportedEncoding(f"{path}: format tag {tag:#06x} with {bits} bits is not supported")
    return Waveform(samples, rate)


def quantize_pcm16(samples) -> np.ndarray:
    """Clip to [-1, 1] and round half away from zero to int16."""
    x = np.clip(np.asarray(samples, dtype=np.float64), -1.0, 1.0) * 32768.0
    q = np.sign(x) * np.floor(np.abs(x) + 0.5)
    return np.clip(q, -32768, 32767).astype("<i2")


def write_wav(w: Waveform, path) -> None:
    """Write a Waveform as 16-bit PCM mono."""
    pcm = quantize_pcm16(w.samples).tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(pcm), b"WAVE",
        b"fmt ", 16, _FORMAT_PCM, 1, w.sample_rate_hz, 2 * w.sample_rate_hz, 2, 16,
        b"data", len(pcm),
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(pcm)


def resample_linear(w: Waveform, target_hz: int) -> Waveform:
    """Linear-interpolation resampling with endpoints pinned.

    Output length is ``round(len * target / source)``.  Quality is limited
    (no anti-alias filter); meant for rate normalisation only.
    """
    target_hz = int(target_hz)
    if target_hz <= 0:
        raise ValueError(f"target rate must be positive, got {target_hz}")
    if target_hz == w.sample_rate_hz:
        return w
    n_in = len(w.samples)
    n_out = int(np.floor(n_in * target_hz / w.sample_rate_hz + 0.5))
    if n_in == 0 or n_out == 0:
        return Waveform(np.zeros(n_out), target_hz)
    if n_in == 1 or n_out == 1:
        return Waveform(np.full(n_out, w.samples[0]), target_hz)
    pos = np.linspace(0.0, n_in - 1, n_out)
    return Waveform(np.interp(pos, np.arange(n_in), w.samples), target_hz)


def write_features(ff: FeatureFile, path) -> None:
    header = _FEATURE_HEADER.pack(
        FEATURE_MAGIC, ff.frame_count, ff.dim, ff.frame_shift_ms, ff.sample_rate_hz
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(ff.data.tobytes())


def read_features(path, expected_dim: int | None = None) -> FeatureFile:
    buf = Path(path).read_bytes()
    if len(buf) < len(FEATURE_MAGIC) or buf[: len(FEATURE_MAGIC)] != FEATURE_MAGIC:
        raise BadMagic(f"{path}: expected magic {FEATURE_MAGIC!r}")
    if len(buf) < _FEATURE_HEADER.size:
        raise TruncatedFile(f"{path}: header truncated")
    _, frames, dim, shift_ms, rate = _FEATURE_HEADER.unpack_from(buf)
    if dim == 0:
        raise DimMismatch(f"{path}: dim is zero")
    if expected_dim is not None and dim != expected_dim:
        raise DimMismatch(f"{path}: dim {dim}, expected {expected_dim}")
    need = frames * dim * 4
    body = buf[_FEATURE_HEADER.size :]
    if len(body) < need:
        raise TruncatedFile(f"{path}: header declares {frames} frames x {dim}, body holds {len(body) // 4} values")
    if len(body) > need:
        raise DimMismatch(f"{path}: {len(body) - need} trailing bytes after {frames}x{dim} body")
    data = np.frombuffer(body, dtype="<f4", count=frames * dim).reshape(frames, dim)
    return FeatureFile(data, shift_ms, rate)

import struct

import numpy as np
import pytest

from vcwarp.audio_io import (
    FEATURE_MAGIC,
    FeatureFile,
    Waveform,
    quantize_pcm16,
    read_features,
    read_wav,
    resample_linear,
    write_features,
    write_wav,
)
from vcwarp.errors import BadMagic, DimMismatch, MalformedWav, TruncatedFile, UnsupportedEncoding


def wav_bytes(payload: bytes, fs=16000, channels=1, bits=16, fmt=1):
    block = channels * bits // 8
    fmt_chunk = struct.pack("<HHIIHH", fmt, channels, fs, fs * block, block, bits)
    body = b"WAVE" + b"fmt " + struct.pack("<I", len(fmt_chunk)) + fmt_chunk
    body += b"data" + struct.pack("<I", len(payload)) + payload
    return b"RIFF" + struct.pack("<I", len(body)) + body


def test_silence_second(tmp_path):
    p = tmp_path / "s.wav"
    p.write_bytes(wav_bytes(bytes(32000)))
    w = read_wav(p)
    assert w.sample_rate_hz == 16000
    assert len(w) == 16000
    assert not w.samples.any()


def test_full_scale_sample(tmp_path):
    p = tmp_path / "fs.wav"
    p.write_bytes(wav_bytes(struct.pack("<h", 32767)))
    assert read_wav(p).samples[0] == 32767 / 32768


def test_negative_full_scale(tmp_path):
    p = tmp_path / "neg.wav"
    p.write_bytes(wav_bytes(struct.pack("<h", -32768)))
    assert read_wav(p).samples[0] == -1.0


def test_float32_wav(tmp_path):
    vals = np.array([0.25, -0.5, 1.0], dtype="<f4")
    p = tmp_path / "f.wav"
    p.write_bytes(wav_bytes(vals.tobytes(), bits=32, fmt=3))
    np.testing.assert_array_equal(read_wav(p).samples, vals.astype(np.float64))


def test_stereo_rejected(tmp_path):
    p = tmp_path / "st.wav"
    p.write_bytes(wav_bytes(bytes(8), channels=2))
    with pytest.raises(UnsupportedEncoding):
        read_wav(p)


def test_unsupported_codec(tmp_path):
    p = tmp_path / "alaw.wav"
    p.write_bytes(wav_bytes(bytes(8), bits=8, fmt=6))
    with pytest.raises(UnsupportedEncoding):
        read_wav(p)


@pytest.mark.parametrize("blob", [b"", b"RIFX" + bytes(40), b"RIFF\x10\x00\x00\x00WAVEjunk"])
def test_malformed(tmp_path, blob):
    p = tmp_path / "bad.wav"
    p.write_bytes(blob)
    with pytest.raises(MalformedWav):
        read_wav(p)


def test_write_zeros_gives_zero_data(tmp_path):
    p = tmp_path / "z.wav"
    write_wav(Waveform(np.zeros(100), 16000), p)
    raw = p.read_bytes()
    assert raw[36:40] == b"data"
    assert raw[44:] == bytes(200)


def test_clipping():
    np.testing.assert_array_equal(quantize_pcm16([1.5, -1.5, 1.0, -1.0]), [32767, -32768, 32767, -32768])


def test_clipped_sample_reads_back_as_full_scale(tmp_path):
    p = tmp_path / "c.wav"
    write_wav(Waveform([1.5], 8000), p)
    assert read_wav(p).samples[0] == 32767 / 32768


def test_round_trip_within_one_lsb(tmp_path, rng):
    x = rng.uniform(-1, 1, 5000)
    p = tmp_path / "r.wav"
    write_wav(Waveform(x, 22050), p)
    w = read_wav(p)
    assert w.sample_rate_hz == 22050
    assert np.max(np.abs(w.samples - x)) <= 1 / 32768


def test_resample_identity(rng):
    w = Waveform(rng.standard_normal(777), 16000)
    np.testing.assert_array_equal(resample_linear(w, 16000).samples, w.samples)


@pytest.mark.parametrize("src,dst", [(8000, 16000), (16000, 8000), (44100, 16000), (16000, 22050)])
def test_resample_constant(src, dst):
    out = resample_linear(Waveform(np.full(1000, 0.3), src), dst)
    assert len(out) == int(1000 * dst / src + 0.5)
    np.testing.assert_allclose(out.samples, 0.3, atol=1e-15)


def test_resample_ramp():
    n = 8000
    out = resample_linear(Waveform(np.linspace(0, 1, n), 8000), 16000)
    assert len(out) == 2 * n
    np.testing.assert_allclose(out.samples, np.linspace(0, 1, 2 * n), atol=1e-6)


def test_features_round_trip_bit_identical(tmp_path, rng):
    data = rng.standard_normal((3, 36)).astype("<f4")
    p = tmp_path / "f.vcf"
    write_features(FeatureFile(data, 5.0, 16000), p)
    back = read_features(p)
    assert back.data.tobytes() == data.tobytes()
    assert (back.frame_count, back.dim, back.frame_shift_ms, back.sample_rate_hz) == (3, 36, 5.0, 16000)
    q = tmp_path / "g.vcf"
    write_features(back, q)
    assert q.read_bytes() == p.read_bytes()


def test_features_header_layout(tmp_path):
    p = tmp_path / "h.vcf"
    write_features(FeatureFile(np.ones((2, 4)), 12.5, 22050), p)
    raw = p.read_bytes()
    assert raw[:8] == FEATURE_MAGIC
    assert struct.unpack_from("<IIfI", raw, 8) == (2, 4, 12.5, 22050)
    assert len(raw) == 24 + 2 * 4 * 4


def test_bad_magic(tmp_path):
    p = tmp_path / "m.vcf"
    write_features(FeatureFile(np.ones((1, 2)), 5.0, 16000), p)
    p.write_bytes(b"NOTVCF01" + p.read_bytes()[8:])
    with pytest.raises(BadMagic):
        read_features(p)


def test_truncated_body(tmp_path):
    p = tmp_path / "t.vcf"
    write_features(FeatureFile(np.ones((10, 3)), 5.0, 16000), p)
    p.write_bytes(p.read_bytes()[: -3 * 4])
    with pytest.raises(TruncatedFile):
        read_features(p)


def test_expected_dim(tmp_path):
    p = tmp_path / "d.vcf"
    write_features(FeatureFile(np.ones((2, 3)), 5.0, 16000), p)
    with pytest.raises(DimMismatch):
        read_features(p, expected_dim=4)

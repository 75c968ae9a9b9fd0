"""PCM audio clips and a bit-exact WAV codec.

A clip is an immutable block of integer PCM samples plus its format and
optional text metadata. Clips flow unchanged through capture, conversion,
and the speech providers, so everything downstream can rely on the exact
byte layout produced here.

WAV files are written in this canonical layout (all integers little-endian)::

    offset  size  content
    0       4     "RIFF"
    4       4     riff_size = file_size - 8
    8       4     "WAVE"
    12      4     "fmt "
    16      4     16
    20      2     format tag (1 = integer PCM)
    22      2     channels
    24      4     sample rate (Hz)
    28      4     byte rate = rate * channels * bytes_per_sample
    32      2     block align = channels * bytes_per_sample
    34      2     bits per sample (16 or 24)
    36      4     "data"
    40      4     data_size = frames * block_align
    44      ...   interleaved samples, 24-bit packed in 3 bytes
    [pad byte when data_size is odd]
    ["txmd" chunk: UTF-8 "key=value" lines, one per metadata entry]
    [pad byte when the txmd payload size is odd]

The ``txmd`` chunk is this library's reserved metadata container; standard
WAV readers skip it as an unknown chunk. Keys and values escape backslash,
newline, carriage return, and ``=`` with a leading backslash, so arbitrary
text round-trips. A clip with no metadata produces no ``txmd`` chunk.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

RIFF_MAGIC = b"RIFF"
WAVE_MAGIC = b"WAVE"
FMT_CHUNK_ID = b"fmt "
DATA_CHUNK_ID = b"data"
METADATA_CHUNK_ID = b"txmd"

PCM_FORMAT_TAG = 1

# The only rates the resampler converts between; parse_wav accepts any rate.
RESAMPLE_RATES = (44100, 48000)


class MalformedFile(ValueError):
    """The byte sequence is not a readable WAV file."""


class UnsupportedFormat(ValueError):
    """The file is WAV, but uses a codec or layout this library rejects."""


@dataclass(frozen=True)
class AudioFormat:
    """Sample rate, bit depth, and channel count of a PCM stream."""

    sample_rate_hz: int
    bit_depth: int
    channels: int

    def __post_init__(self):
        if self.sample_rate_hz <= 0:
            raise ValueError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")
        if self.bit_depth not in (16, 24):
            raise ValueError(f"bit_depth must be 16 or 24, got {self.bit_depth}")
        if self.channels not in (1, 2):
            raise ValueError(f"channels must be 1 or 2, got {self.channels}")

    @property
    def bytes_per_sample(self) -> int:
        return self.bit_depth // 8

    @property
    def block_align(self) -> int:
        return self.channels * self.bytes_per_sample

    @property
    def byte_rate(self) -> int:
        return self.sample_rate_hz * self.block_align

    @property
    def full_scale(self) -> int:
        """Largest positive sample value, 2^(bit_depth-1) - 1."""
        return (1 << (self.bit_depth - 1)) - 1

    @property
    def min_sample(self) -> int:
        return -(1 << (self.bit_depth - 1))


# Device output format and the typical authoring format it is fed from.
DRIVER_FORMAT = AudioFormat(48000, 24, 2)
SOURCE_FORMAT = AudioFormat(44100, 16, 1)


class AudioClip:
    """Immutable PCM samples with format and optional text metadata.

    ``frames`` is an int32 array of shape (frame_count, channels); every
    sample must fit the signed range of ``format.bit_depth``. The array is
    frozen after construction, so clips are safe to share across threads.
    """

    __slots__ = ("format", "frames", "metadata")

    def __init__(self, format: AudioFormat, frames, metadata: dict[str, str] | None = None):
        arr = np.asarray(frames, dtype=np.int64)
        if arr.ndim == 1:
            if arr.size % format.channels != 0:
                raise ValueError(
                    f"sample count {arr.size} is not a multiple of {format.channels} channels"
                )
            arr = arr.reshape(-1, format.channels)
        elif arr.ndim == 2:
            if arr.shape[1] != format.channels:
                raise ValueError(
                    f"frames have {arr.shape[1]} channels, format says {format.channels}"
                )
        else:
            raise ValueError("frames must be a 1-D or 2-D array")
        if arr.size and (arr.max() > format.full_scale or arr.min() < format.min_sample):
            raise ValueError(
                f"samples outside signed {format.bit_depth}-bit range "
                f"[{format.min_sample}, {format.full_scale}]"
            )
        arr = arr.astype(np.int32)
        arr.flags.writeable = False
        meta = dict(metadata) if metadata else {}
        for k, v in meta.items():
            if not isinstance(k, str) or not isinstance(v, str):
                raise ValueError("metadata keys and values must be strings")
        object.__setattr__(self, "format", format)
        object.__setattr__(self, "frames", arr)
        object.__setattr__(self, "metadata", meta)

    def __setattr__(self, name, value):
        raise AttributeError("AudioClip is immutable")

    @property
    def frame_count(self) -> int:
        return self.frames.shape[0]

    @property
    def duration_seconds(self) -> float:
        return self.frame_count / self.format.sample_rate_hz

    def with_metadata(self, extra: dict[str, str]) -> "AudioClip":
        merged = dict(self.metadata)
        merged.update(extra)
        return AudioClip(self.format, self.frames, merged)

    def __eq__(self, other):
        if not isinstance(other, AudioClip):
            return NotImplemented
        return (
            self.format == other.format
            and np.array_equal(self.frames, other.frames)
            and self.metadata == other.metadata
        )

    def __repr__(self):
        return (
            f"AudioClip({self.format.sample_rate_hz} Hz, {self.format.bit_depth}-bit, "
            f"{self.format.channels} ch, {self.frame_count} frames, "
            f"{len(self.metadata)} metadata keys)"
        )


def round_half_away(x: np.ndarray) -> np.ndarray:
    """Round to the nearest integer, halves away from zero."""
    return np.trunc(x + np.copysign(0.5, x))


def _escape(text: str) -> str:
    return (
        text.replace("\\", "\\\\")
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("=", "\\=")
    )


def _unescape(text: str) -> str:
    out = []
    i = 0
    while i < len(text):
        c = text[i]
        if c == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            out.append({"n": "\n", "r": "\r"}.get(nxt, nxt))
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def _serialize_metadata(metadata: dict[str, str]) -> bytes:
    lines = [f"{_escape(k)}={_escape(v)}" for k, v in metadata.items()]
    return "\n".join(lines).encode("utf-8")


def _split_unescaped(line: str, sep: str) -> tuple[str, str]:
    i = 0
    while i < len(line):
        if line[i] == "\\":
            i += 2
            continue
        if line[i] == sep:
            return line[:i], line[i + 1 :]
        i += 1
    raise MalformedFile(f"metadata line without separator: {line!r}")


def _parse_metadata(payload: bytes) -> dict[str, str]:
    try:
        text = payload.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedFile(f"metadata chunk is not UTF-8: {exc}") from exc
    meta: dict[str, str] = {}
    if not text:
        return meta
    for line in text.split("\n"):
        raw_key, raw_value = _split_unescaped(line, "=")
        meta[_unescape(raw_key)] = _unescape(raw_value)
    return meta


def _pack_samples(frames: np.ndarray, bit_depth: int) -> bytes:
    flat = frames.reshape(-1)
    if bit_depth == 16:
        return flat.astype("<i2").tobytes()
    # 24-bit: little-endian int32 with the sign-extension byte dropped
    quads = flat.astype("<i4").tobytes()
    arr = np.frombuffer(quads, dtype=np.uint8).reshape(-1, 4)
    return arr[:, :3].tobytes()


def _unpack_samples(raw: bytes, fmt: AudioFormat) -> np.ndarray:
    if fmt.bit_depth == 16:
        flat = np.frombuffer(raw, dtype="<i2").astype(np.int32)
    else:
        trips = np.frombuffer(raw, dtype=np.uint8).reshape(-1, 3).astype(np.int32)
        flat = trips[:, 0] | (trips[:, 1] << 8) | (trips[:, 2] << 16)
        flat = np.where(flat & 0x800000, flat - (1 << 24), flat)
    return flat.reshape(-1, fmt.channels)


def write_wav(clip: AudioClip) -> bytes:
    """Encode a clip into canonical RIFF/WAVE bytes (layout in module docs)."""
    fmt = clip.format
    data = _pack_samples(clip.frames, fmt.bit_depth)
    chunks = [
        FMT_CHUNK_ID,
        struct.pack("<I", 16),
        struct.pack(
            "<HHIIHH",
            PCM_FORMAT_TAG,
            fmt.channels,
            fmt.sample_rate_hz,
            fmt.byte_rate,
            fmt.block_align,
            fmt.bit_depth,
        ),
        DATA_CHUNK_ID,
        struct.pack("<I", len(data)),
        data,
    ]
    if len(data) % 2:
        chunks.append(b"\x00")
    if clip.metadata:
        payload = _serialize_metadata(clip.metadata)
        chunks.extend([METADATA_CHUNK_ID, struct.pack("<I", len(payload)), payload])
        if len(payload) % 2:
            chunks.append(b"\x00")
    body = b"".join(chunks)
    return RIFF_MAGIC + struct.pack("<I", 4 + len(body)) + WAVE_MAGIC + body


def parse_wav(data: bytes) -> AudioClip:
    """Decode WAV bytes into a clip.

    Recognizes the ``fmt ``, ``data``, and ``txmd`` chunks; any other chunk
    is skipped. Raises MalformedFile for structural damage and
    UnsupportedFormat for non-PCM codecs or layouts outside 16/24-bit,
    mono/stereo.
    """
    data = bytes(data)
    if len(data) < 12:
        raise MalformedFile(f"file too short for a RIFF header ({len(data)} bytes)")
    if data[0:4] != RIFF_MAGIC:
        raise MalformedFile("bad magic: not a RIFF file")
    if data[8:12] != WAVE_MAGIC:
        raise MalformedFile("RIFF file is not WAVE")
    declared = struct.unpack_from("<I", data, 4)[0]
    end = 8 + declared
    if end > len(data):
        raise MalformedFile(
            f"header declares {declared} bytes but only {len(data) - 8} are present"
        )

    fmt_fields = None
    raw_data = None
    metadata: dict[str, str] = {}
    seen_meta = False
    pos = 12
    while pos < end:
        if end - pos < 8:
            raise MalformedFile("truncated chunk header")
        chunk_id = data[pos : pos + 4]
        size = struct.unpack_from("<I", data, pos + 4)[0]
        body_start = pos + 8
        if body_start + size > end:
            raise MalformedFile(f"chunk {chunk_id!r} overruns the file")
        body = data[body_start : body_start + size]
        if chunk_id == FMT_CHUNK_ID:
            if fmt_fields is not None:
                raise MalformedFile("duplicate fmt chunk")
            if size < 16:
                raise MalformedFile(f"fmt chunk too small ({size} bytes)")
            fmt_fields = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == DATA_CHUNK_ID:
            if raw_data is not None:
                raise MalformedFile("duplicate data chunk")
            raw_data = body
        elif chunk_id == METADATA_CHUNK_ID:
            if seen_meta:
                raise MalformedFile("duplicate metadata chunk")
            metadata = _parse_metadata(body)
            seen_meta = True
        pos = body_start + size + (size & 1)

    if fmt_fields is None:
        raise MalformedFile("missing fmt chunk")
    if raw_data is None:
        raise MalformedFile("missing data chunk")

    tag, channels, rate, _byte_rate, _block_align, bits = fmt_fields
    if tag != PCM_FORMAT_TAG:
        raise UnsupportedFormat(f"compressed or non-PCM codec (format tag {tag})")
    if bits not in (16, 24):
        raise UnsupportedFormat(f"unsupported bit depth {bits}")
    if channels not in (1, 2):
        raise UnsupportedFormat(f"unsupported channel count {channels}")
    if rate <= 0:
        raise MalformedFile("sample rate must be positive")
    fmt = AudioFormat(rate, bits, channels)
    if len(raw_data) % fmt.block_align:
        raise MalformedFile(
            f"data size {len(raw_data)} is not a multiple of block align {fmt.block_align}"
        )
    return AudioClip(fmt, _unpack_samples(raw_data, fmt), metadata)


def _resample_column(col: np.ndarray, src_rate: int, dst_rate: int, n_out: int) -> np.ndarray:
    # Exact integer index math: output frame i sits at source position i*src/dst.
    i = np.arange(n_out, dtype=np.int64)
    num = i * src_rate
    idx = num // dst_rate
    frac = (num - idx * dst_rate) / dst_rate
    n_in = col.shape[0]
    idx0 = np.minimum(idx, n_in - 1)
    idx1 = np.minimum(idx + 1, n_in - 1)
    x0 = col[idx0].astype(np.float64)
    x1 = col[idx1].astype(np.float64)
    return x0 + (x1 - x0) * frac


def convert(clip: AudioClip, target: AudioFormat) -> AudioClip:
    """Convert a clip to another format; metadata is carried through.

    Three documented stages run in order, each rounding half away from zero:

    1. rate: linear interpolation between neighboring frames; the output
       frame count is round(n * target_rate / source_rate). Only 44.1 and
       48 kHz are accepted when the rates differ.
    2. bit depth: 16 to 24 multiplies by 256 exactly; 24 to 16 divides by
       256 and rounds.
    3. channels: mono to stereo duplicates; stereo to mono averages.
    """
    src = clip.format
    if src == target:
        return clip

    frames = clip.frames
    if src.sample_rate_hz != target.sample_rate_hz:
        if src.sample_rate_hz not in RESAMPLE_RATES or target.sample_rate_hz not in RESAMPLE_RATES:
            raise ValueError(
                f"resampling supports {RESAMPLE_RATES} only, "
                f"got {src.sample_rate_hz} -> {target.sample_rate_hz}"
            )
        n_in = frames.shape[0]
        # round(n * dst / src) with exact integers, halves away from zero
        n_out = (2 * n_in * target.sample_rate_hz + src.sample_rate_hz) // (
            2 * src.sample_rate_hz
        )
        if n_in == 0:
            frames = np.zeros((0, src.channels), dtype=np.int32)
        else:
            cols = [
                round_half_away(
                    _resample_column(frames[:, c], src.sample_rate_hz, target.sample_rate_hz, n_out)
                )
                for c in range(src.channels)
            ]
            frames = np.stack(cols, axis=1).astype(np.int32)

    if src.bit_depth != target.bit_depth:
        if target.bit_depth == 24:
            frames = frames.astype(np.int32) << 8
        else:
            frames = round_half_away(frames / 256.0).astype(np.int32)

    if src.channels != target.channels:
        if target.channels == 2:
            frames = np.repeat(frames.reshape(-1, 1), 2, axis=1)
        else:
            frames = round_half_away(frames.mean(axis=1, keepdims=True)).astype(np.int32)

    return AudioClip(target, frames, clip.metadata)


def rms_level(clip: AudioClip) -> float:
    """Root-mean-square of all samples, as a fraction of full scale in [0, 1].

    Full scale is the largest positive sample (2^(bit_depth-1) - 1); levels
    are clamped at 1.0 so the most negative sample cannot push past it.
    A zero-frame clip has level 0.
    """
    if clip.frame_count == 0:
        return 0.0
    samples = clip.frames.astype(np.float64)
    rms = math.sqrt(float(np.mean(samples * samples)))
    return min(1.0, rms / clip.format.full_scale)


def silence_clip(format: AudioFormat, seconds: float | None = None, frames: int | None = None,
                 metadata: dict[str, str] | None = None) -> AudioClip:
    """All-zero clip of the given duration (seconds) or exact frame count."""
    if frames is None:
        if seconds is None:
            raise ValueError("give either seconds or frames")
        frames = int(round(seconds * format.sample_rate_hz))
    return AudioClip(format, np.zeros((frames, format.channels), dtype=np.int32), metadata)


def sine_clip(format: AudioFormat, seconds: float, freq_hz: float, amplitude: float = 0.5,
              metadata: dict[str, str] | None = None) -> AudioClip:
    """Sine tone at ``amplitude`` (fraction of full scale), same on all channels."""
    n = int(round(seconds * format.sample_rate_hz))
    t = np.arange(n, dtype=np.float64) / format.sample_rate_hz
    wave = amplitude * format.full_scale * np.sin(2 * math.pi * freq_hz * t)
    mono = round_half_away(wave).astype(np.int32)
    frames = np.repeat(mono.reshape(-1, 1), format.channels, axis=1)
    return AudioClip(format, frames, metadata)


def concat_clips(clips: list[AudioClip]) -> AudioClip:
    """Concatenate same-format clips; metadata merges with first-wins keys."""
    if not clips:
        raise ValueError("cannot concatenate zero clips")
    fmt = clips[0].format
    for c in clips[1:]:
        if c.format != fmt:
            raise ValueError("clips must share one format")
    merged: dict[str, str] = {}
    for c in clips:
        for k, v in c.metadata.items():
            merged.setdefault(k, v)
    frames = np.concatenate([c.frames for c in clips], axis=0)
    return AudioClip(fmt, frames, merged)

"""Chunked answer recording, silence detection, noise gating, playback.

The record loop pulls fixed-duration chunks from a source until the speaker
stops: a silent first chunk means no answer was given, a silent chunk after
voiced ones ends the answer. Sources are plain objects with a
``next_chunk()`` yielding clips forever; sinks accept frame blocks through
``write()`` and report how many frames they took. A file-backed source is
included so recorded sessions can be replayed from WAV files in tests and
on the command line.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from voicecare.audio import (
    DRIVER_FORMAT,
    AudioClip,
    AudioFormat,
    concat_clips,
    parse_wav,
    rms_level,
    round_half_away,
    silence_clip,
)

GATE_WINDOW_SECONDS = 0.05
GATE_METADATA_KEY = "noise_gate"


class SourceFailure(RuntimeError):
    """The chunk source broke mid-answer; voiced audio so far is attached."""

    def __init__(self, message: str, partial: AudioClip | None, chunks_consumed: int):
        super().__init__(message)
        self.partial = partial
        self.chunks_consumed = chunks_consumed


class SinkFailure(RuntimeError):
    """The playback sink stopped accepting frames."""

    def __init__(self, frames_delivered: int):
        super().__init__(f"sink failed after {frames_delivered} frames")
        self.frames_delivered = frames_delivered


@dataclass(frozen=True)
class NoiseGateConfig:
    """High-pass plus RMS gate applied to completed recordings.

    The filter is a second-order Butterworth high-pass run forward and
    backward (zero phase, fourth-order magnitude), then 50 ms windows whose
    RMS falls below ``gate_threshold`` are zeroed.
    """

    highpass_cutoff_hz: float = 100.0
    gate_threshold: float = 0.005
    enabled: bool = True

    def __post_init__(self):
        if not 0 < self.highpass_cutoff_hz < DRIVER_FORMAT.sample_rate_hz / 2:
            raise ValueError("cutoff must sit below the driver Nyquist frequency")
        if not 0 <= self.gate_threshold <= 1:
            raise ValueError("gate_threshold must be in [0, 1]")

    def fingerprint(self) -> str:
        return f"hp={self.highpass_cutoff_hz:g},gate={self.gate_threshold:g}"


@dataclass(frozen=True)
class RecordPolicy:
    chunk_seconds: float = 4.0
    silence_rms_threshold: float = 0.01
    max_chunks: int = 15
    noise_gate: NoiseGateConfig = field(default_factory=NoiseGateConfig)

    def __post_init__(self):
        if self.chunk_seconds <= 0:
            raise ValueError("chunk_seconds must be positive")
        if not 0 < self.silence_rms_threshold < 1:
            raise ValueError("silence_rms_threshold must be strictly between 0 and 1")
        if self.max_chunks < 1:
            raise ValueError("max_chunks must be at least 1")

    def chunk_frames(self, format: AudioFormat) -> int:
        return int(round(self.chunk_seconds * format.sample_rate_hz))


@dataclass(frozen=True)
class Answered:
    clip: AudioClip
    truncated: bool = False


@dataclass(frozen=True)
class NoAnswer:
    pass


RecordingOutcome = Answered | NoAnswer


class FileChunkSource:
    """Slices one clip into policy-sized chunks, padding the tail with
    silence and yielding pure silence once the clip is exhausted.

    Every chunk carries the source clip's metadata, so text embedded by the
    offline speech mocks survives the record loop.
    """

    def __init__(self, clip: AudioClip, chunk_seconds: float):
        self._clip = clip
        self._chunk_frames = int(round(chunk_seconds * clip.format.sample_rate_hz))
        if self._chunk_frames <= 0:
            raise ValueError("chunk duration too short for one frame")
        self._offset = 0

    @classmethod
    def from_path(cls, path, chunk_seconds: float) -> "FileChunkSource":
        with open(path, "rb") as fh:
            return cls(parse_wav(fh.read()), chunk_seconds)

    def next_chunk(self) -> AudioClip:
        fmt = self._clip.format
        start, end = self._offset, self._offset + self._chunk_frames
        if start >= self._clip.frame_count:
            return silence_clip(fmt, frames=self._chunk_frames, metadata=self._clip.metadata)
        self._offset = end
        block = self._clip.frames[start : min(end, self._clip.frame_count)]
        if block.shape[0] < self._chunk_frames:
            pad = np.zeros((self._chunk_frames - block.shape[0], fmt.channels), dtype=np.int32)
            block = np.concatenate([block, pad], axis=0)
        return AudioClip(fmt, block, self._clip.metadata)


class SilentChunkSource:
    """Yields silence forever; stands in for a user who never speaks."""

    def __init__(self, format: AudioFormat, chunk_seconds: float):
        self._format = format
        self._frames = int(round(chunk_seconds * format.sample_rate_hz))

    def next_chunk(self) -> AudioClip:
        return silence_clip(self._format, frames=self._frames)


class CollectingSink:
    """Accumulates everything written; the in-memory speaker for tests."""

    def __init__(self):
        self.blocks: list[np.ndarray] = []

    def write(self, frames: np.ndarray) -> int:
        self.blocks.append(np.array(frames))
        return frames.shape[0]

    @property
    def frames_written(self) -> int:
        return sum(b.shape[0] for b in self.blocks)


def detect_silence(chunk: AudioClip, threshold: float) -> bool:
    """True when the chunk's RMS level is strictly below the threshold."""
    return rms_level(chunk) < threshold


def record_answer(source, policy: RecordPolicy) -> RecordingOutcome:
    """Assemble one spoken answer from successive chunks.

    A silent first chunk returns NoAnswer. Otherwise voiced chunks
    accumulate until the first silent chunk (discarded) or until
    ``policy.max_chunks`` voiced chunks force a truncated stop. The
    returned clip is the voiced concatenation run through the noise gate.
    At most max_chunks + 1 chunks are ever pulled.
    """
    voiced: list[AudioClip] = []
    consumed = 0

    def pull() -> AudioClip:
        nonlocal consumed
        try:
            chunk = source.next_chunk()
        except Exception as exc:
            partial = concat_clips(voiced) if voiced else None
            raise SourceFailure(
                f"chunk source failed after {consumed} chunks: {exc}", partial, consumed
            ) from exc
        consumed += 1
        return chunk

    first = pull()
    if detect_silence(first, policy.silence_rms_threshold):
        return NoAnswer()
    voiced.append(first)
    while len(voiced) < policy.max_chunks:
        chunk = pull()
        if detect_silence(chunk, policy.silence_rms_threshold):
            return Answered(noise_gate(concat_clips(voiced), policy.noise_gate))
        voiced.append(chunk)
    return Answered(noise_gate(concat_clips(voiced), policy.noise_gate), truncated=True)


def noise_gate(clip: AudioClip, config: NoiseGateConfig) -> AudioClip:
    """High-pass the clip, then zero windows quieter than the gate threshold.

    Gated clips are tagged in metadata with the config fingerprint and
    returned unchanged when gated again with the same config, so the
    operation is idempotent. Disabled configs pass the clip through.
    """
    if not config.enabled:
        return clip
    if clip.metadata.get(GATE_METADATA_KEY) == config.fingerprint():
        return clip
    fmt = clip.format
    n = clip.frame_count
    if n == 0:
        return clip.with_metadata({GATE_METADATA_KEY: config.fingerprint()})

    filtered = clip.frames.astype(np.float64)
    if n > 3:
        sos = signal.butter(2, config.highpass_cutoff_hz, "highpass",
                            fs=fmt.sample_rate_hz, output="sos")
        # zero-state forward then backward pass: with no edge padding or
        # seeded filter state, each pass is contractive, so the output RMS
        # can never exceed the input RMS
        def one_channel(x):
            y = signal.sosfilt(sos, x)
            return signal.sosfilt(sos, y[::-1])[::-1]

        filtered = np.stack([one_channel(filtered[:, c]) for c in range(fmt.channels)], axis=1)

    window = max(1, int(round(GATE_WINDOW_SECONDS * fmt.sample_rate_hz)))
    full_scale = float(fmt.full_scale)
    for start in range(0, n, window):
        block = filtered[start : start + window]
        rms = float(np.sqrt(np.mean(block * block))) / full_scale
        if rms < config.gate_threshold:
            block[:] = 0.0

    out = np.clip(round_half_away(filtered), fmt.min_sample, fmt.full_scale).astype(np.int32)
    return AudioClip(fmt, out, {**clip.metadata, GATE_METADATA_KEY: config.fingerprint()})


def playback(clip: AudioClip, sink, block_frames: int = 4800) -> int:
    """Deliver every frame to the sink in order; returns the frame count.

    Raises SinkFailure carrying the delivered count when the sink raises or
    accepts fewer frames than offered.
    """
    delivered = 0
    for start in range(0, clip.frame_count, block_frames):
        block = clip.frames[start : start + block_frames]
        try:
            accepted = sink.write(block)
        except Exception as exc:
            raise SinkFailure(delivered) from exc
        delivered += accepted
        if accepted < block.shape[0]:
            raise SinkFailure(delivered)
    return delivered

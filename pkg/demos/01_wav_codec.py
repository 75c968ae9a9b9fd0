"""WAV codec walkthrough: clips, metadata, and format conversion.

Builds a one-second test tone in the 16-bit/44.1 kHz mono authoring format,
round-trips it through the byte-exact codec, and converts it to the
24-bit/48 kHz stereo device format.

Run:  python3 demos/01_wav_codec.py
"""

import numpy as np

from voicecare.audio import (
    DRIVER_FORMAT,
    SOURCE_FORMAT,
    convert,
    parse_wav,
    rms_level,
    sine_clip,
    write_wav,
)

# A 440 Hz tone at half scale, with text riding in the metadata chunk.
clip = sine_clip(SOURCE_FORMAT, 1.0, 440.0, amplitude=0.5,
                 metadata={"note": "A4", "origin": "demo"})
print(f"source clip: {clip}")
print(f"  duration  {clip.duration_seconds:.3f} s")
print(f"  rms level {rms_level(clip):.5f} (analytic 0.5/sqrt(2) = {0.5 / np.sqrt(2):.5f})")

# Encode, decode, compare: the codec is bit-exact including metadata.
raw = write_wav(clip)
again = parse_wav(raw)
print(f"\nencoded {len(raw)} bytes, header {raw[:4]!r}...{raw[36:40]!r}")
print(f"round trip equal: {again == clip}")
print(f"metadata survived: {again.metadata}")

# Convert to the device playback format: resample, widen, duplicate.
driver = convert(clip, DRIVER_FORMAT)
print(f"\ndriver clip: {driver}")
print(f"  frames    {driver.frame_count} (expected 48000)")
print(f"  channels identical: {np.array_equal(driver.frames[:, 0], driver.frames[:, 1])}")
print(f"  rms drift {abs(rms_level(driver) - rms_level(clip)) / rms_level(clip):.4%}")

# 16 -> 24 -> 16 bit is lossless.
back = convert(convert(clip, DRIVER_FORMAT), SOURCE_FORMAT)
print(f"\nafter source->driver->source, duration {back.duration_seconds:.4f} s")

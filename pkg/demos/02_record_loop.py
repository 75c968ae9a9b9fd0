"""Record loop walkthrough: chunked capture, silence endpoints, noise gate.

Feeds scripted chunk sequences into the recorder to show the three
outcomes (answered, no answer, truncated) and what the noise gate does to
a low-frequency hum.

Run:  python3 demos/02_record_loop.py
"""

import numpy as np

from voicecare.audio import DRIVER_FORMAT, rms_level, silence_clip, sine_clip
from voicecare.capture import (
    Answered,
    FileChunkSource,
    NoiseGateConfig,
    RecordPolicy,
    record_answer,
)

policy = RecordPolicy(chunk_seconds=0.5, max_chunks=4)
print(f"policy: {policy.chunk_seconds}s chunks, stop below rms "
      f"{policy.silence_rms_threshold}, cap {policy.max_chunks} chunks")

# 1. A short spoken answer: the file source pads the tail with silence, so
#    the chunk after the voice ends the recording.
answer = sine_clip(DRIVER_FORMAT, 1.2, 520.0, amplitude=0.3, metadata={"text": "yes"})
outcome = record_answer(FileChunkSource(answer, policy.chunk_seconds), policy)
assert isinstance(outcome, Answered)
print(f"\nvoiced 1.2s reply -> Answered, {outcome.clip.duration_seconds:.1f} s kept, "
      f"truncated={outcome.truncated}, metadata={outcome.clip.metadata.get('text')!r}")

# 2. Nothing but silence: the very first chunk decides no answer was given.
silent = silence_clip(DRIVER_FORMAT, seconds=3.0)
print(f"silent reply      -> {record_answer(FileChunkSource(silent, policy.chunk_seconds), policy)}")

# 3. A talker who never stops hits the chunk cap and is truncated.
endless = sine_clip(DRIVER_FORMAT, 10.0, 520.0, amplitude=0.3)
outcome = record_answer(FileChunkSource(endless, policy.chunk_seconds), policy)
print(f"10 s monologue    -> Answered, {outcome.clip.duration_seconds:.1f} s kept, "
      f"truncated={outcome.truncated}")

# 4. The gate: a 50 Hz hum sits an octave under the 100 Hz cutoff and loses
#    well over 20 dB; a 1 kHz voice band tone passes nearly untouched.
from voicecare.capture import noise_gate

hum = sine_clip(DRIVER_FORMAT, 1.0, 50.0, amplitude=0.5)
voice = sine_clip(DRIVER_FORMAT, 1.0, 1000.0, amplitude=0.5)
config = NoiseGateConfig()
for name, tone in (("50 Hz hum", hum), ("1 kHz tone", voice)):
    gated = noise_gate(tone, config)
    p_in = float(np.mean(tone.frames.astype(np.float64) ** 2))
    p_out = float(np.mean(gated.frames.astype(np.float64) ** 2))
    db = 10 * np.log10(p_out / p_in) if p_out else float("-inf")
    print(f"gate on {name}: {db:6.1f} dB power change "
          f"(rms {rms_level(tone):.3f} -> {rms_level(gated):.3f})")

"""Offline provider walkthrough: the speech pipeline with no network.

The mock synthesizer hides its input text inside the WAV metadata chunk,
which makes speech-to-text and language detection exactly invertible; the
translator and emotion scorer run from packaged lexicon and fixture files.

Run:  python3 demos/03_offline_providers.py
"""

from voicecare.providers import select_language
from voicecare.providers.mock import MockProviders
from voicecare.session import AnswerRecord, aggregate, final_emotion

providers = MockProviders()

# Text to speech and back again.
clip = providers.synthesize("je suis si heureux de vivre ici", "fr")
print(f"synthesized {clip.duration_seconds:.2f} s of 'speech' ({clip.format.sample_rate_hz} Hz)")

guesses = providers.detect_language(clip)
print("language guesses:", [(g.code, round(g.confidence, 2)) for g in guesses])
language = select_language(guesses)
transcript = providers.transcribe(clip, language)
print(f"transcribed [{language}] -> {transcript.text!r} (confidence {transcript.confidence})")

english = providers.translate(transcript.text, language, "en")
print(f"translated  [en] -> {english!r}")

scores = providers.analyze_emotion(english)
print(f"scored      -> joy={scores.joy:.2f} sadness={scores.sadness:.2f} "
      f"sentiment={scores.sentiment:+.2f}")

# The packaged fixtures pin three reference answers to fixed vectors, so
# the whole table below is reproducible to the last digit.
texts = [
    "I'm so happy to live here",
    "I hate this world",
    "I can't tolerate this. I don't understand why people do that.",
]
print(f"\n{'answer text':<45} {'joy':>5} {'anger':>6} {'sad':>5} {'fear':>5} "
      f"{'disg':>5}  label")
answers = []
for text in texts:
    s = providers.analyze_emotion(text)
    answers.append(AnswerRecord("q", emotion=s))
    print(f"{text[:43]:<45} {s.joy:>5.2f} {s.anger:>6.2f} {s.sadness:>5.2f} "
          f"{s.fear:>5.2f} {s.disgust:>5.2f}  {final_emotion(s)}")

mean, label = aggregate(answers)
print(f"{'session mean':<45} {mean.joy:>5.3f} {mean.anger:>6.3f} {mean.sadness:>5.3f} "
      f"{mean.fear:>5.3f} {mean.disgust:>5.3f}  {label}")

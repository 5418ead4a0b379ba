#!/usr/bin/env python3
# Decode/encode WAV audio, strip silence, and cut 4-second segments.

import numpy as np

from vocalscreen import (
    AudioClip,
    SilenceParams,
    decode_wav,
    encode_wav,
    remove_silence,
    resample,
    segment,
    to_mono,
)

rate = 16000
t = np.arange(rate) / rate

# One second of silence, one of speech-band tone, one more of silence,
# then nine seconds of tone: a toy "utterance with pauses".
tone = 0.5 * np.sin(2 * np.pi * 220 * t)
samples = np.concatenate([np.zeros(rate), tone, np.zeros(rate), np.tile(tone, 9)])
clip = AudioClip(samples=samples, sample_rate=rate)
print(f"raw clip: {clip.duration_seconds:.1f} s")

# Round-trip through the 16-bit WAV encoder: lossless for PCM16 content.
wav_bytes = encode_wav(clip)
decoded = resample(to_mono(decode_wav(wav_bytes)), rate)
print(f"wav round trip: {len(wav_bytes)} bytes, {decoded.duration_seconds:.1f} s")

# Frame-RMS silence removal: 50 ms frames, 25 ms hop, keep frames whose
# RMS reaches 10% of the loudest frame.
voiced = remove_silence(decoded, SilenceParams())
print(f"voiced audio: {voiced.duration_seconds:.3f} s "
      f"(removed {decoded.duration_seconds - voiced.duration_seconds:.3f} s)")

# Fixed 4 s windows; the trailing remainder is dropped.
segments = segment(voiced, 4.0)
print(f"segments: {len(segments)} x 4.0 s "
      f"({voiced.duration_seconds - 4.0 * len(segments):.3f} s discarded)")

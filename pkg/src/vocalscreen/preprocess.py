"""Silence removal and fixed-length cropping.

A recording is reduced to its voiced samples by frame-RMS thresholding,
then cut into consecutive non-overlapping segments of a fixed duration
(4 s in the screening pipeline); the trailing remainder is discarded so
every segment frames identically downstream.
"""

from dataclasses import dataclass

import numpy as np

from .audio_io import AudioClip
from .rng import round_half_up


@dataclass(frozen=True)
class SilenceParams:
    """Frame-energy silence detector parameters.

    A frame is voiced when its RMS reaches ``threshold_ratio`` times the
    loudest frame's RMS. Defaults: 50 ms frames, 25 ms hop, ratio 0.1.
    """

    frame_seconds: float = 0.05
    hop_seconds: float = 0.025
    threshold_ratio: float = 0.1

    def __post_init__(self):
        if not 0 < self.hop_seconds <= self.frame_seconds:
            raise ValueError("need 0 < hop_seconds <= frame_seconds")
        if not 0 < self.threshold_ratio < 1:
            raise ValueError("threshold_ratio must be in (0, 1)")


@dataclass(frozen=True)
class SegmentSet:
    """Ordered fixed-length segments cut from one recording."""

    segments: tuple
    segment_seconds: float
    source_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        rates = {seg.sample_rate for seg in self.segments}
        if len(rates) > 1:
            raise ValueError("segments must share one sample rate")
        for seg in self.segments:
            want = round_half_up(self.segment_seconds * seg.sample_rate)
            if len(seg) != want:
                raise ValueError(f"segment length {len(seg)} != {want}")

    def __len__(self) -> int:
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)


def _frame_rms(samples: np.ndarray, frame_len: int, hop_len: int) -> np.ndarray:
    """RMS of every complete frame (partial trailing frame excluded)."""
    n = len(samples)
    if n < frame_len:
        return np.zeros(0)
    n_frames = 1 + (n - frame_len) // hop_len
    # cumulative sum of squares gives each frame's energy in O(n)
    csq = np.concatenate(([0.0], np.cumsum(samples * samples)))
    starts = np.arange(n_frames) * hop_len
    energies = csq[starts + frame_len] - csq[starts]
    return np.sqrt(np.maximum(energies, 0.0) / frame_len)


def remove_silence(clip: AudioClip, params: SilenceParams = SilenceParams()) -> AudioClip:
    """Drop silent stretches, keeping voiced samples in their original order.

    Every complete frame is scored by RMS; a sample survives if it lies in
    at least one frame whose RMS >= threshold_ratio * max frame RMS. An
    all-silent clip (max RMS 0) comes back empty, as does any clip shorter
    than one frame.
    """
    if len(clip) == 0:
        raise ValueError("remove_silence needs a non-empty clip")
    if clip.samples.ndim != 1:
        raise ValueError("remove_silence expects a mono clip")

    frame_len = round_half_up(params.frame_seconds * clip.sample_rate)
    hop_len = round_half_up(params.hop_seconds * clip.sample_rate)
    rms = _frame_rms(clip.samples, frame_len, hop_len)
    if len(rms) == 0:
        return AudioClip(samples=np.zeros(0), sample_rate=clip.sample_rate)

    peak = rms.max()
    if peak == 0.0:
        return AudioClip(samples=np.zeros(0), sample_rate=clip.sample_rate)

    keep = np.zeros(len(clip), dtype=bool)
    for idx in np.nonzero(rms >= params.threshold_ratio * peak)[0]:
        start = idx * hop_len
        keep[start : start + frame_len] = True
    return AudioClip(samples=clip.samples[keep], sample_rate=clip.sample_rate)


def segment(clip: AudioClip, segment_seconds: float = 4.0, source_id: str = "") -> SegmentSet:
    """Cut a clip into consecutive non-overlapping windows of fixed length.

    The trailing remainder shorter than one window is discarded. A clip
    shorter than one window yields an empty SegmentSet.
    """
    if segment_seconds <= 0:
        raise ValueError("segment_seconds must be positive")
    if clip.samples.ndim != 1:
        raise ValueError("segment expects a mono clip")

    seg_len = round_half_up(segment_seconds * clip.sample_rate)
    count = len(clip) // seg_len
    segments = tuple(
        AudioClip(samples=clip.samples[i * seg_len : (i + 1) * seg_len], sample_rate=clip.sample_rate)
        for i in range(count)
    )
    return SegmentSet(segments=segments, segment_seconds=segment_seconds, source_id=source_id)

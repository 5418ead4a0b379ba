"""Acoustic features for screening: 13 MFCCs, spectral centroid, spectral
complexity, and zero-crossing rate — 16 numbers per 4-second segment.

Per frame (Hann window, unnormalized DFT):

* mel energies  = filterbank @ |X[k]|^2, triangles equally spaced on the
  mel scale mel(f) = 2595 * log10(1 + f/700), each area-normalized by
  2/(f_upper - f_lower)
* log compress  = 10 * log10(max(e, log_floor))   (decibels, floored)
* MFCC          = orthonormal DCT-II across bands, coefficients 0..12
* centroid      = sum(fhat_k * P_k) / sum(P_k) with fhat_k = k/n_fft,
  so the value is a fraction of the sample rate in [0, 0.5]
* complexity    = count of strict local dB maxima within
  peak_threshold_db of the loudest bin

MFCC, centroid, and complexity are averaged across frames; the
zero-crossing rate is computed over the whole segment with sign(0) = +1.
"""

import csv
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .audio_io import AudioClip
from .errors import VocalScreenError

N_FEATURES = 16

FEATURE_COLUMNS = [f"mfcc{i}" for i in range(13)] + ["centroid", "complexity", "zcr"]

CSV_HEADER = ["segment_id", "label"] + FEATURE_COLUMNS


class SegmentTooShort(VocalScreenError):
    """Segment has too few samples for the requested analysis."""


@dataclass(frozen=True)
class FeatureConfig:
    """Extraction constants. Defaults assume 16 kHz input."""

    n_fft: int = 2048
    hop: int = 512
    n_mels: int = 128
    n_mfcc: int = 13
    fmin: float = 0.0
    fmax: float = 8000.0
    log_floor: float = 1e-10
    peak_threshold_db: float = 30.0

    def __post_init__(self):
        if not 0 < self.hop <= self.n_fft:
            raise ValueError("need 0 < hop <= n_fft")
        if self.n_fft & (self.n_fft - 1):
            raise ValueError("n_fft must be a power of two")
        if not 0 <= self.fmin < self.fmax:
            raise ValueError("need 0 <= fmin < fmax")
        if self.n_mfcc > self.n_mels:
            raise ValueError("n_mfcc cannot exceed n_mels")
        if self.log_floor <= 0:
            raise ValueError("log_floor must be positive")

    def as_dict(self) -> dict:
        return {
            "n_fft": self.n_fft,
            "hop": self.hop,
            "n_mels": self.n_mels,
            "n_mfcc": self.n_mfcc,
            "fmin": self.fmin,
            "fmax": self.fmax,
            "log_floor": self.log_floor,
            "peak_threshold_db": self.peak_threshold_db,
        }


@dataclass(frozen=True)
class FeatureVector:
    """Ordered 16-dimensional descriptor of one segment.

    Indices 0..12 are MFCC 0..12, 13 the mean spectral centroid
    (fraction of sample rate), 14 the mean spectral complexity,
    15 the zero-crossing rate.
    """

    values: np.ndarray
    segment_id: str = ""

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", vals)
        if vals.shape != (N_FEATURES,):
            raise ValueError(f"expected {N_FEATURES} values, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("feature values must be finite")
        if not 0.0 <= vals[13] <= 0.5:
            raise ValueError("centroid must lie in [0, 0.5]")
        if vals[14] < 0.0:
            raise ValueError("complexity must be non-negative")
        if not 0.0 <= vals[15] <= 1.0:
            raise ValueError("zero-crossing rate must lie in [0, 1]")


@lru_cache(maxsize=8)
def _window(n_fft: int, kind: str) -> np.ndarray:
    if kind == "hann":
        # periodic form, standard for analysis frames
        return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n_fft) / n_fft)
    if kind == "rectangular":
        return np.ones(n_fft)
    raise ValueError(f"unknown window {kind!r}")


def complex_spectrum(frame: np.ndarray, window: str = "hann") -> np.ndarray:
    """One-sided DFT of a windowed frame (no normalization)."""
    frame = np.asarray(frame, dtype=np.float64)
    if frame.ndim != 1:
        raise ValueError("frame must be one-dimensional")
    return np.fft.rfft(frame * _window(len(frame), window))


def power_spectrum(frame: np.ndarray, window: str = "hann") -> np.ndarray:
    """One-sided power spectrum |X[k]|^2, k = 0..n_fft/2.

    The rectangular window exists as a test hook for exact DFT identities;
    production framing always uses Hann.
    """
    spectrum = complex_spectrum(frame, window=window)
    return np.abs(spectrum) ** 2


def power_spectra(segment: AudioClip, config: FeatureConfig = FeatureConfig(),
                  window: str = "hann") -> np.ndarray:
    """Power spectra of all complete frames of a segment, shape (frames, bins).

    Frames are left-aligned, length n_fft, advancing by hop; the trailing
    partial frame is dropped. Raises SegmentTooShort when not even one
    frame fits.
    """
    samples = segment.samples
    if samples.ndim != 1:
        raise ValueError("power_spectra expects a mono clip")
    if len(samples) < config.n_fft:
        raise SegmentTooShort(f"{len(samples)} samples < n_fft {config.n_fft}")
    frames = np.lib.stride_tricks.sliding_window_view(samples, config.n_fft)[:: config.hop]
    spectra = np.fft.rfft(frames * _window(config.n_fft, window), axis=1)
    return np.abs(spectra) ** 2


def mel(freq_hz):
    """Hz -> mel."""
    return 2595.0 * np.log10(1.0 + np.asarray(freq_hz, dtype=np.float64) / 700.0)


def mel_inverse(mels):
    """mel -> Hz."""
    return 700.0 * (10.0 ** (np.asarray(mels, dtype=np.float64) / 2595.0) - 1.0)


def mel_breakpoints(n_mels: int, fmin: float, fmax: float) -> np.ndarray:
    """The n_mels + 2 filter edge/center frequencies in Hz.

    Points are equally spaced on the mel scale between fmin and fmax;
    filter j spans (points[j], points[j+2]) and peaks at points[j+1].
    """
    return mel_inverse(np.linspace(mel(fmin), mel(fmax), n_mels + 2))


@lru_cache(maxsize=8)
def _cached_filterbank(sample_rate: int, config: FeatureConfig) -> np.ndarray:
    if config.fmax > sample_rate / 2:
        raise ValueError(f"fmax {config.fmax} exceeds Nyquist {sample_rate / 2}")
    points = mel_breakpoints(config.n_mels, config.fmin, config.fmax)
    bin_freqs = np.arange(config.n_fft // 2 + 1) * (sample_rate / config.n_fft)
    bank = np.zeros((config.n_mels, config.n_fft // 2 + 1))
    for j in range(config.n_mels):
        lower, center, upper = points[j], points[j + 1], points[j + 2]
        rising = (bin_freqs - lower) / (center - lower)
        falling = (upper - bin_freqs) / (upper - center)
        tri = np.maximum(0.0, np.minimum(rising, falling))
        bank[j] = tri * (2.0 / (upper - lower))
    bank.setflags(write=False)
    return bank


def mel_filterbank(sample_rate: int, config: FeatureConfig = FeatureConfig()) -> np.ndarray:
    """Triangular mel filterbank, shape (n_mels, n_fft/2 + 1), area-normalized."""
    return _cached_filterbank(int(sample_rate), config)


@lru_cache(maxsize=8)
def dct_basis(n: int) -> np.ndarray:
    """Full orthonormal DCT-II matrix; row k dotted with a band vector
    gives coefficient k."""
    k = np.arange(n)[:, None]
    m = np.arange(n)[None, :]
    basis = np.sqrt(2.0 / n) * np.cos(np.pi * k * (2 * m + 1) / (2 * n))
    basis[0] = np.sqrt(1.0 / n)
    basis.setflags(write=False)
    return basis


def mfcc(segment: AudioClip, config: FeatureConfig = FeatureConfig()) -> np.ndarray:
    """Per-segment MFCCs 0..12: per-frame cepstra averaged across frames."""
    spectra = power_spectra(segment, config)
    bank = mel_filterbank(segment.sample_rate, config)
    energies = spectra @ bank.T
    log_mel = 10.0 * np.log10(np.maximum(energies, config.log_floor))
    coeffs = log_mel @ dct_basis(config.n_mels)[: config.n_mfcc].T
    return coeffs.mean(axis=0)


def spectral_centroid(spectrum: np.ndarray) -> float:
    """Balance point of a one-sided power spectrum on the normalized
    frequency axis k/n_fft; an all-zero spectrum maps to 0."""
    spectrum = np.asarray(spectrum, dtype=np.float64)
    total = spectrum.sum()
    if total == 0.0:
        return 0.0
    n_fft = 2 * (len(spectrum) - 1)
    fhat = np.arange(len(spectrum)) / n_fft
    return float((fhat * spectrum).sum() / total)


def spectral_complexity(spectrum: np.ndarray, peak_threshold_db: float = 30.0,
                        log_floor: float = 1e-10) -> int:
    """Count of prominent spectral peaks in one frame.

    A peak is a strict local maximum on the dB spectrum that lies within
    peak_threshold_db of the loudest bin. Power is floored before the log
    so empty bins compare equal rather than -inf.
    """
    spectrum = np.asarray(spectrum, dtype=np.float64)
    if len(spectrum) < 3 or spectrum.max() == 0.0:
        return 0
    db = 10.0 * np.log10(np.maximum(spectrum, log_floor))
    inner = db[1:-1]
    peaks = (inner > db[:-2]) & (inner > db[2:]) & (inner > db.max() - peak_threshold_db)
    return int(np.count_nonzero(peaks))


def zero_crossing_rate(segment: AudioClip) -> float:
    """Fraction of adjacent sample pairs with differing sign, sign(0) = +1."""
    samples = segment.samples
    if len(samples) < 2:
        raise SegmentTooShort("zero-crossing rate needs at least 2 samples")
    signs = np.where(samples >= 0.0, 1, -1)
    return float(np.count_nonzero(signs[:-1] != signs[1:]) / (len(samples) - 1))


def extract_features(segment: AudioClip, config: FeatureConfig = FeatureConfig(),
                     segment_id: str = "") -> FeatureVector:
    """All 16 features of one segment, in the fixed column order.

    Defined as the composition of the public sub-operations: MFCCs 0..12,
    then the across-frame means of spectral centroid and complexity, then
    the zero-crossing rate.
    """
    cepstra = mfcc(segment, config)
    spectra = power_spectra(segment, config)
    centroid = float(np.mean([spectral_centroid(row) for row in spectra]))
    complexity = float(
        np.mean(
            [
                spectral_complexity(row, config.peak_threshold_db, config.log_floor)
                for row in spectra
            ]
        )
    )
    zcr = zero_crossing_rate(segment)
    values = np.concatenate([cepstra, [centroid, complexity, zcr]])
    return FeatureVector(values=values, segment_id=segment_id)


def write_features_csv(path, rows) -> None:
    """Write (FeatureVector, label) pairs as CSV.

    Floats use shortest round-trip formatting, so read_features_csv
    reproduces them exactly.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for vector, label in rows:
            writer.writerow([vector.segment_id, label] + [repr(float(v)) for v in vector.values])


def read_features_csv(path):
    """Read a features CSV -> (segment_ids, labels, matrix of shape (N, 16))."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise ValueError(f"unexpected features header: {header}")
        ids, labels, values = [], [], []
        for row in reader:
            if len(row) != len(CSV_HEADER):
                raise ValueError(f"bad features row: {row}")
            ids.append(row[0])
            labels.append(row[1])
            values.append([float(v) for v in row[2:]])
    matrix = np.asarray(values, dtype=np.float64).reshape(len(ids), N_FEATURES)
    return ids, labels, matrix

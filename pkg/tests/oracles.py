"""Independent brute-force reference implementations used by the tests.

Everything here is written from the mathematical definitions and shares
no code with the package under test: the DFT is evaluated as explicit
cosine/sine sums (O(N^2) per frame), mel triangles are built bin by bin
with branching, the DCT is a literal double sum, and the KNN scan is
plain Python. Slow on purpose; correctness anchor only.
"""

import math

import numpy as np


def hann_reference(n: int) -> np.ndarray:
    return np.array([0.5 - 0.5 * math.cos(2.0 * math.pi * i / n) for i in range(n)])


def dft_power_onesided(frame: np.ndarray, window: np.ndarray) -> np.ndarray:
    """|X[k]|^2 for k = 0..N/2 by direct evaluation of the DFT sum.

    Angles are reduced (k*n mod N) in exact integer arithmetic before the
    trig call, which keeps the O(N^2) evaluation accurate for large N.
    """
    x = np.asarray(frame, dtype=np.float64) * window
    n_fft = len(x)
    k = np.arange(n_fft // 2 + 1)
    n = np.arange(n_fft)
    angles = 2.0 * np.pi * ((np.outer(k, n) % n_fft) / n_fft)
    real = np.cos(angles) @ x
    imag = -np.sin(angles) @ x
    return real * real + imag * imag


def frame_starts(n_samples: int, n_fft: int, hop: int) -> list:
    starts = []
    pos = 0
    while pos + n_fft <= n_samples:
        starts.append(pos)
        pos += hop
    return starts


def triangle_filterbank(sample_rate: int, n_fft: int, n_mels: int,
                        fmin: float, fmax: float) -> np.ndarray:
    """Mel triangles built point by point with explicit branches."""

    def to_mel(f):
        return 2595.0 * math.log10(1.0 + f / 700.0)

    def from_mel(m):
        return 700.0 * (10.0 ** (m / 2595.0) - 1.0)

    lo, hi = to_mel(fmin), to_mel(fmax)
    points = [from_mel(lo + i * (hi - lo) / (n_mels + 1)) for i in range(n_mels + 2)]
    n_bins = n_fft // 2 + 1
    bank = np.zeros((n_mels, n_bins))
    for j in range(n_mels):
        lower, center, upper = points[j], points[j + 1], points[j + 2]
        scale = 2.0 / (upper - lower)
        for b in range(n_bins):
            f = b * sample_rate / n_fft
            if lower <= f <= center and center > lower:
                weight = (f - lower) / (center - lower)
            elif center < f <= upper:
                weight = (upper - f) / (upper - center)
            else:
                weight = 0.0
            bank[j, b] = weight * scale
    return bank


def literal_dct2_ortho(values: np.ndarray, n_keep: int) -> np.ndarray:
    """Orthonormal DCT-II coefficients 0..n_keep-1 as explicit sums."""
    n = len(values)
    out = np.zeros(n_keep)
    for k in range(n_keep):
        scale = math.sqrt(1.0 / n) if k == 0 else math.sqrt(2.0 / n)
        acc = 0.0
        for m in range(n):
            acc += values[m] * math.cos(math.pi * k * (2 * m + 1) / (2 * n))
        out[k] = scale * acc
    return out


def brute_force_mfcc(samples: np.ndarray, sample_rate: int, n_fft: int = 2048,
                     hop: int = 512, n_mels: int = 128, n_mfcc: int = 13,
                     fmin: float = 0.0, fmax: float = 8000.0,
                     log_floor: float = 1e-10) -> np.ndarray:
    """Per-segment MFCC means from first principles.

    The DFT basis (cosine/sine tables of the definition) is built once and
    applied per frame; each frame still costs O(N^2).
    """
    window = hann_reference(n_fft)
    bank = triangle_filterbank(sample_rate, n_fft, n_mels, fmin, fmax)
    k = np.arange(n_fft // 2 + 1)
    n = np.arange(n_fft)
    angles = 2.0 * np.pi * ((np.outer(k, n) % n_fft) / n_fft)
    cos_table, sin_table = np.cos(angles), np.sin(angles)
    per_frame = []
    for start in frame_starts(len(samples), n_fft, hop):
        x = samples[start : start + n_fft] * window
        real, imag = cos_table @ x, -(sin_table @ x)
        power = real * real + imag * imag
        mel_energies = np.array([float(np.dot(bank[j], power)) for j in range(n_mels)])
        log_mel = np.array([10.0 * math.log10(max(e, log_floor)) for e in mel_energies])
        per_frame.append(literal_dct2_ortho(log_mel, n_mfcc))
    if not per_frame:
        raise ValueError("no complete frame fits")
    return np.mean(per_frame, axis=0)


def knn_scan(train_matrix, train_labels, query, k: int, p: float) -> tuple:
    """Exhaustive nearest-neighbor scan in plain Python.

    Same contract as the production classifier: vectors are assumed
    already standardized, equal distances break toward the lower row
    index, uniform votes, score is the winning fraction.
    """
    distances = []
    for idx, row in enumerate(train_matrix):
        total = 0.0
        for a, b in zip(row, query):
            total += abs(float(a) - float(b)) ** p
        distances.append((total ** (1.0 / p), idx))
    distances.sort()
    votes = {}
    for _dist, idx in distances[:k]:
        label = train_labels[idx]
        votes[label] = votes.get(label, 0) + 1
    winner = max(sorted(votes), key=lambda label: votes[label])
    return winner, votes[winner] / k


def pooled_t_reference(a, b) -> tuple:
    """Closed-form pooled-variance t statistic in plain Python."""
    a, b = list(map(float, a)), list(map(float, b))
    na, nb = len(a), len(b)
    mean_a, mean_b = sum(a) / na, sum(b) / nb
    var_a = sum((x - mean_a) ** 2 for x in a) / (na - 1)
    var_b = sum((x - mean_b) ** 2 for x in b) / (nb - 1)
    df = na + nb - 2
    pooled = ((na - 1) * var_a + (nb - 1) * var_b) / df
    denom = math.sqrt(pooled * (1.0 / na + 1.0 / nb))
    if denom == 0.0:
        return 0.0 if mean_a == mean_b else math.copysign(math.inf, mean_a - mean_b), df
    return (mean_a - mean_b) / denom, df

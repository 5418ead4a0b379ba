"""Standardization and K-nearest-neighbor classification.

The classifier is deliberately brute force: with a few thousand 16-d rows
an exhaustive distance scan is fast, and it doubles as the semantic
definition any accelerated search would have to match exactly. Neighbor
ties at equal distance go to the lower training-row index, and k is kept
odd so binary votes cannot tie.

Models persist as one versioned JSON document with a SHA-256 digest over
the canonical serialization of every other field, so corruption and
schema drift are detected on load.
"""

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .errors import VocalScreenError
from .features import FeatureConfig, FeatureVector

MODEL_SCHEMA_VERSION = 1


class EmptyTrainingSet(VocalScreenError):
    pass


class TooFewSamples(VocalScreenError):
    pass


class EvenK(VocalScreenError):
    pass


class SchemaVersionMismatch(VocalScreenError):
    pass


class CorruptModelFile(VocalScreenError):
    pass


def as_matrix(features) -> np.ndarray:
    """Coerce FeatureVector lists or array-likes to a 2-D float matrix."""
    if isinstance(features, np.ndarray) and features.ndim == 2:
        return features.astype(np.float64, copy=False)
    rows = [f.values if isinstance(f, FeatureVector) else np.asarray(f, dtype=np.float64)
            for f in features]
    return np.atleast_2d(np.asarray(rows, dtype=np.float64))


@dataclass(frozen=True)
class ScalerParams:
    """Per-dimension means and population standard deviations.

    Zero-variance dimensions store std 1 so they transform to 0 instead
    of dividing by zero.
    """

    means: np.ndarray
    stds: np.ndarray

    def __post_init__(self):
        means = np.asarray(self.means, dtype=np.float64)
        stds = np.asarray(self.stds, dtype=np.float64)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "stds", stds)
        if means.shape != stds.shape or means.ndim != 1:
            raise ValueError("means and stds must be 1-D and the same length")
        if np.any(stds <= 0):
            raise ValueError("stds must be positive")


def identity_scaler(dim: int) -> ScalerParams:
    """Scaler that leaves vectors unchanged (the scaler-off pipeline arm)."""
    return ScalerParams(means=np.zeros(dim), stds=np.ones(dim))


def fit_scaler(features) -> ScalerParams:
    matrix = as_matrix(features)
    if matrix.shape[0] == 0:
        raise EmptyTrainingSet("cannot fit a scaler on zero rows")
    means = matrix.mean(axis=0)
    stds = matrix.std(axis=0)  # population std (divide by N)
    stds = np.where(stds == 0.0, 1.0, stds)
    return ScalerParams(means=means, stds=stds)


def transform(scaler: ScalerParams, v) -> np.ndarray:
    vals = v.values if isinstance(v, FeatureVector) else np.asarray(v, dtype=np.float64)
    return (vals - scaler.means) / scaler.stds


def transform_matrix(scaler: ScalerParams, features) -> np.ndarray:
    return (as_matrix(features) - scaler.means) / scaler.stds


def inverse_transform(scaler: ScalerParams, v) -> np.ndarray:
    return np.asarray(v, dtype=np.float64) * scaler.stds + scaler.means


def minkowski_distance(a, b, p: float = 2.0) -> float:
    """(sum |a_i - b_i|^p)^(1/p); a metric for p >= 1."""
    if p < 1:
        raise ValueError("p must be >= 1")
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.sum(np.abs(a - b) ** p) ** (1.0 / p))


def _config_digest(config_dict: dict) -> str:
    canonical = json.dumps(config_dict, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


@dataclass(frozen=True)
class KnnModel:
    """Standardized training matrix plus the hyperparameters that query it."""

    train_matrix: np.ndarray
    train_labels: tuple
    k: int
    p: float
    scaler: ScalerParams
    feature_config: dict

    def __post_init__(self):
        matrix = np.asarray(self.train_matrix, dtype=np.float64)
        object.__setattr__(self, "train_matrix", matrix)
        object.__setattr__(self, "train_labels", tuple(self.train_labels))
        if matrix.ndim != 2 or matrix.shape[0] != len(self.train_labels):
            raise ValueError("train matrix rows must match label count")
        if self.k % 2 == 0:
            raise EvenK(f"k must be odd, got {self.k}")
        if matrix.shape[0] < self.k:
            raise TooFewSamples(f"{matrix.shape[0]} rows < k={self.k}")
        if self.p < 1:
            raise ValueError("p must be >= 1")

    @property
    def feature_config_digest(self) -> str:
        return _config_digest(self.feature_config)


def knn_fit(features, labels, k: int = 3, p: float = 2.0,
            scaler: ScalerParams | None = None,
            feature_config: FeatureConfig | dict | None = None) -> KnnModel:
    """Store the standardized training set; KNN has no other learning step.

    ``scaler`` defaults to the identity (no standardization). Labels must
    be binary and k odd so prediction votes cannot tie.
    """
    matrix = as_matrix(features)
    labels = tuple(str(label) for label in labels)
    if matrix.shape[0] != len(labels):
        raise ValueError("features and labels must have the same length")
    if len(set(labels)) > 2:
        raise ValueError(f"labels must be binary, got {sorted(set(labels))}")
    if scaler is None:
        scaler = identity_scaler(matrix.shape[1])
    if isinstance(feature_config, FeatureConfig):
        config_dict = feature_config.as_dict()
    else:
        config_dict = dict(feature_config) if feature_config else FeatureConfig().as_dict()
    standardized = transform_matrix(scaler, matrix)
    return KnnModel(train_matrix=standardized, train_labels=labels, k=k, p=p,
                    scaler=scaler, feature_config=config_dict)


def knn_predict(model: KnnModel, v) -> tuple:
    """Classify one vector -> (label, vote fraction for that label).

    The k nearest standardized training rows vote uniformly; equal
    distances are broken by lower row index.
    """
    q = transform(model.scaler, v)
    diffs = np.abs(model.train_matrix - q)
    if model.p == 2.0:
        distances = np.sqrt(np.sum(diffs * diffs, axis=1))
    elif model.p == 1.0:
        distances = np.sum(diffs, axis=1)
    else:
        distances = np.sum(diffs ** model.p, axis=1) ** (1.0 / model.p)
    # stable sort implements the lowest-index tie rule
    nearest = np.argsort(distances, kind="stable")[: model.k]
    votes = {}
    for idx in nearest:
        label = model.train_labels[idx]
        votes[label] = votes.get(label, 0) + 1
    # deterministic even in the impossible even-vote case: lexicographic label
    winner = max(sorted(votes), key=lambda label: votes[label])
    return winner, votes[winner] / model.k


def predict_many(model: KnnModel, features) -> list:
    return [knn_predict(model, row) for row in as_matrix(features)]


def _model_payload(model: KnnModel) -> dict:
    return {
        "version": MODEL_SCHEMA_VERSION,
        "k": model.k,
        "p": model.p,
        "scaler": {
            "means": [float(x) for x in model.scaler.means],
            "stds": [float(x) for x in model.scaler.stds],
        },
        "feature_config": model.feature_config,
        "train": {
            "matrix": [[float(x) for x in row] for row in model.train_matrix],
            "labels": list(model.train_labels),
        },
    }


def _payload_digest(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def save_model(model: KnnModel, path) -> None:
    payload = _model_payload(model)
    payload["digest"] = _payload_digest(payload)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_model(path) -> KnnModel:
    """Load a model file, verifying schema version and integrity digest."""
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CorruptModelFile(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(payload, dict) or "version" not in payload:
        raise CorruptModelFile(f"{path}: missing version field")
    if payload["version"] != MODEL_SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"{path}: version {payload['version']}, expected {MODEL_SCHEMA_VERSION}"
        )
    stored_digest = payload.pop("digest", None)
    if stored_digest != _payload_digest(payload):
        raise CorruptModelFile(f"{path}: digest mismatch")
    scaler = ScalerParams(
        means=np.array(payload["scaler"]["means"], dtype=np.float64),
        stds=np.array(payload["scaler"]["stds"], dtype=np.float64),
    )
    return KnnModel(
        train_matrix=np.array(payload["train"]["matrix"], dtype=np.float64),
        train_labels=tuple(payload["train"]["labels"]),
        k=payload["k"],
        p=payload["p"],
        scaler=scaler,
        feature_config=payload["feature_config"],
    )

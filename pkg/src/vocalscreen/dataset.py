"""Labeled corpus manifests and deterministic train/test splits.

A manifest row is (path, label, participant). The same CSV shape holds
recording on disk (one row per WAV) and extracted segments (one row per
segment id), so splitting works at either granularity.

Splits are reproducible bit-for-bit: a SplitMix64 stream seeds a
Fisher-Yates shuffle, and the train side takes the first
round-half-up(N * train_fraction) entries of the shuffled order.
Segment-level splitting mirrors the screening protocol; speaker-disjoint
splitting keeps every participant wholly on one side, which is the honest
alternative when segments of one speaker would otherwise leak across the
boundary.
"""

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import VocalScreenError
from .rng import SplitMix64, fisher_yates, round_half_up

LABELS = ("control", "depression")

SEGMENT_LEVEL = "segment-level"
SPEAKER_DISJOINT = "speaker-disjoint"
SPLIT_MODES = (SEGMENT_LEVEL, SPEAKER_DISJOINT)

MANIFEST_HEADER = ["path", "label", "participant"]


class ManifestParseError(VocalScreenError):
    """Manifest CSV violates the (path, label, participant) contract."""


class DuplicatePath(VocalScreenError):
    """Two manifest rows share one path."""


class UnknownLabel(VocalScreenError):
    """Label outside the closed {control, depression} set."""


class DegenerateSplit(VocalScreenError):
    """Requested split would leave a side empty or single-class."""


@dataclass(frozen=True)
class ManifestRow:
    path: str
    label: str
    participant: str


@dataclass(frozen=True)
class DatasetManifest:
    rows: tuple

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        seen = set()
        for row in self.rows:
            if row.label not in LABELS:
                raise UnknownLabel(f"label {row.label!r} not in {LABELS}")
            if row.path in seen:
                raise DuplicatePath(f"path {row.path!r} appears twice")
            seen.add(row.path)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def label_counts(self) -> dict:
        counts = {label: 0 for label in LABELS}
        for row in self.rows:
            counts[row.label] += 1
        return counts

    def participants(self) -> list:
        """Participant ids in first-appearance order."""
        seen = []
        for row in self.rows:
            if row.participant not in seen:
                seen.append(row.participant)
        return seen


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8
    seed: int = 0
    mode: str = SEGMENT_LEVEL

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise ValueError("train_fraction must lie in (0, 1)")
        if self.mode not in SPLIT_MODES:
            raise ValueError(f"mode must be one of {SPLIT_MODES}")


def load_manifest(path) -> DatasetManifest:
    """Parse a manifest CSV, validating header, labels, and uniqueness."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != MANIFEST_HEADER:
            raise ManifestParseError(f"bad header {header}, want {MANIFEST_HEADER}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 3:
                raise ManifestParseError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            rows.append(ManifestRow(path=row[0], label=row[1], participant=row[2]))
    return DatasetManifest(rows=rows)


def save_manifest(path, manifest: DatasetManifest) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MANIFEST_HEADER)
        for row in manifest:
            writer.writerow([row.path, row.label, row.participant])


def split(manifest: DatasetManifest, spec: SplitSpec):
    """Deterministically partition a manifest into (train, test).

    Segment-level mode shuffles rows and cuts after
    round(N * train_fraction). Speaker-disjoint mode shuffles participant
    ids (first-appearance order) and assigns whole participants the same
    way; rows are then emitted grouped by the shuffled participant order.
    """
    if spec.mode == SEGMENT_LEVEL:
        order = fisher_yates(list(manifest.rows), SplitMix64(spec.seed))
        n_train = round_half_up(len(order) * spec.train_fraction)
        train_rows, test_rows = order[:n_train], order[n_train:]
        if not train_rows or not test_rows:
            raise DegenerateSplit(f"{len(order)} rows cannot split at {spec.train_fraction}")
    else:
        participants = fisher_yates(manifest.participants(), SplitMix64(spec.seed))
        n_train = round_half_up(len(participants) * spec.train_fraction)
        train_ids = set(participants[:n_train])
        by_participant = {}
        for row in manifest:
            by_participant.setdefault(row.participant, []).append(row)
        train_rows = [r for pid in participants[:n_train] for r in by_participant[pid]]
        test_rows = [r for pid in participants[n_train:] for r in by_participant[pid]]
        if not train_rows or not test_rows:
            raise DegenerateSplit(f"{len(participants)} participants cannot split at {spec.train_fraction}")
        for side_name, side in (("train", train_rows), ("test", test_rows)):
            if len({r.label for r in side}) < 2:
                raise DegenerateSplit(f"speaker-disjoint {side_name} side has a single class")
        assert train_ids.isdisjoint(r.participant for r in test_rows)
    return DatasetManifest(rows=train_rows), DatasetManifest(rows=test_rows)


def write_split(out_dir, train: DatasetManifest, test: DatasetManifest, spec: SplitSpec) -> dict:
    """Write train.csv, test.csv, and the split.json sidecar; return the sidecar."""
    out_dir = Path(out_dir)
    save_manifest(out_dir / "train.csv", train)
    save_manifest(out_dir / "test.csv", test)
    sidecar = {
        "seed": spec.seed,
        "mode": spec.mode,
        "train_fraction": spec.train_fraction,
        "counts": {
            "train": {**train.label_counts(), "total": len(train)},
            "test": {**test.label_counts(), "total": len(test)},
        },
    }
    with open(out_dir / "split.json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return sidecar

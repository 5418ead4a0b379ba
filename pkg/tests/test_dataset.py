import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vocalscreen.dataset import (
    SEGMENT_LEVEL,
    SPEAKER_DISJOINT,
    DatasetManifest,
    DegenerateSplit,
    DuplicatePath,
    ManifestParseError,
    ManifestRow,
    SplitSpec,
    UnknownLabel,
    load_manifest,
    save_manifest,
    split,
    write_split,
)


def rows_for(n, participants=None, labels=None):
    out = []
    for i in range(n):
        label = labels[i] if labels else ("depression" if i % 2 else "control")
        pid = participants[i] if participants else f"p{i % 4}"
        out.append(ManifestRow(path=f"seg{i:03d}", label=label, participant=pid))
    return out


def test_load_manifest_ok(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("path,label,participant\na.wav,depression,p1\nb.wav,control,p2\nc.wav,control,p1\n")
    manifest = load_manifest(path)
    assert len(manifest) == 3
    assert manifest.label_counts() == {"control": 2, "depression": 1}
    assert manifest.participants() == ["p1", "p2"]


def test_load_manifest_errors(tmp_path):
    bad_header = tmp_path / "h.csv"
    bad_header.write_text("file,label\n")
    with pytest.raises(ManifestParseError):
        load_manifest(bad_header)

    short_row = tmp_path / "r.csv"
    short_row.write_text("path,label,participant\na.wav,depression\n")
    with pytest.raises(ManifestParseError):
        load_manifest(short_row)

    unknown = tmp_path / "u.csv"
    unknown.write_text("path,label,participant\na.wav,anxious,p1\n")
    with pytest.raises(UnknownLabel):
        load_manifest(unknown)

    dup = tmp_path / "d.csv"
    dup.write_text("path,label,participant\na.wav,control,p1\na.wav,control,p2\n")
    with pytest.raises(DuplicatePath):
        load_manifest(dup)


def test_manifest_roundtrip(tmp_path):
    manifest = DatasetManifest(rows=rows_for(7))
    save_manifest(tmp_path / "m.csv", manifest)
    assert load_manifest(tmp_path / "m.csv") == manifest


def test_segment_split_sizes_and_partition():
    manifest = DatasetManifest(rows=rows_for(10))
    train, test = split(manifest, SplitSpec(train_fraction=0.8, seed=1))
    assert (len(train), len(test)) == (8, 2)
    assert set(train.rows) | set(test.rows) == set(manifest.rows)
    assert set(train.rows) & set(test.rows) == set()


def test_split_round_half_up():
    manifest = DatasetManifest(rows=rows_for(10))
    train, test = split(manifest, SplitSpec(train_fraction=0.85, seed=1))
    assert (len(train), len(test)) == (9, 1)  # round(8.5) goes up


def test_split_deterministic_and_seed_sensitive():
    manifest = DatasetManifest(rows=rows_for(40))
    a1, b1 = split(manifest, SplitSpec(seed=5))
    a2, b2 = split(manifest, SplitSpec(seed=5))
    assert a1 == a2 and b1 == b2
    a3, _ = split(manifest, SplitSpec(seed=6))
    assert (len(a3), ) == (len(a1), )
    assert set(a3.rows) != set(a1.rows)


def test_speaker_disjoint_no_leakage():
    manifest = DatasetManifest(rows=rows_for(
        24,
        participants=[f"p{i // 3}" for i in range(24)],
        labels=["depression" if i // 3 % 2 else "control" for i in range(24)],
    ))
    train, test = split(manifest, SplitSpec(seed=1, mode=SPEAKER_DISJOINT))
    assert set(train.participants()).isdisjoint(test.participants())
    # every participant's rows are wholly on one side
    for pid in manifest.participants():
        on_train = any(r.participant == pid for r in train)
        on_test = any(r.participant == pid for r in test)
        assert on_train != on_test


def test_degenerate_splits():
    with pytest.raises(DegenerateSplit):
        split(DatasetManifest(rows=rows_for(1)), SplitSpec(train_fraction=0.8, seed=1))
    # two single-class participants force a one-class side
    rows = rows_for(4, participants=["a", "a", "b", "b"],
                    labels=["control", "control", "depression", "depression"])
    with pytest.raises(DegenerateSplit):
        split(DatasetManifest(rows=rows), SplitSpec(train_fraction=0.5, seed=1,
                                                    mode=SPEAKER_DISJOINT))


def test_split_spec_validation():
    with pytest.raises(ValueError):
        SplitSpec(train_fraction=0.0)
    with pytest.raises(ValueError):
        SplitSpec(mode="bogus")


@settings(max_examples=30, deadline=None)
@given(
    n=st.integers(min_value=4, max_value=120),
    seed=st.integers(min_value=0, max_value=2**64 - 1),
    fraction=st.floats(min_value=0.2, max_value=0.8),
)
def test_segment_split_partition_property(n, seed, fraction):
    manifest = DatasetManifest(rows=rows_for(n))
    spec = SplitSpec(train_fraction=fraction, seed=seed)
    try:
        train, test = split(manifest, spec)
    except DegenerateSplit:
        return
    assert len(train) + len(test) == n
    assert set(train.rows) | set(test.rows) == set(manifest.rows)
    assert set(train.rows).isdisjoint(test.rows)
    # same seed reproduces membership exactly
    train2, test2 = split(manifest, spec)
    assert train2 == train and test2 == test


def test_write_split_sidecar(tmp_path):
    manifest = DatasetManifest(rows=rows_for(10))
    spec = SplitSpec(train_fraction=0.8, seed=9)
    train, test = split(manifest, spec)
    sidecar = write_split(tmp_path, train, test, spec)
    assert (tmp_path / "train.csv").exists()
    assert (tmp_path / "test.csv").exists()
    on_disk = json.loads((tmp_path / "split.json").read_text())
    assert on_disk == sidecar
    assert on_disk["mode"] == SEGMENT_LEVEL
    assert on_disk["counts"]["train"]["total"] == 8
    assert load_manifest(tmp_path / "train.csv") == train

"""Command-line surface for the screening pipeline.

Subcommands mirror the workflow end to end::

    vocalscreen synth    --out cohort/
    vocalscreen extract  --manifest cohort/cohort.csv --out work/
    vocalscreen split    --manifest work/segments.csv --out work/
    vocalscreen train    --features work/features.csv --manifest work/train.csv --out work/
    vocalscreen evaluate --features work/features.csv --manifest work/test.csv \
                         --model work/model.json --split-sidecar work/split.json --out work/
    vocalscreen predict  --model work/model.json --features work/features.csv
    vocalscreen select   --features work/features.csv --manifest work/train.csv --out work/
    vocalscreen stats    --features work/features.csv --out work/

Flag precedence: explicit flag > --config file (key=value lines) >
VOCALSCREEN_SEED (seed only) > built-in default. Every run writes its
full effective configuration to run_config.json in the output directory;
primary outputs never embed timestamps, so reruns with the same inputs
and seed are byte-identical.
"""

import argparse
import json
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import audio_io, dataset, evaluation, model, preprocess, synth
from .errors import VocalScreenError
from .features import FeatureConfig, extract_features, read_features_csv, write_features_csv

BUILTIN_SEED = 0


def _default_seed() -> int:
    env = os.environ.get("VOCALSCREEN_SEED")
    return int(env) if env else BUILTIN_SEED


def _coerce(text: str):
    text = text.strip()
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    for caster in (int, float):
        try:
            return caster(text)
        except ValueError:
            continue
    return text.strip("\"'")


def load_config(path) -> dict:
    """Parse a key=value config file; blank lines and # comments ignored."""
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise VocalScreenError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, raw = line.partition("=")
            values[key.strip().replace("-", "_")] = _coerce(raw)
    return values


def _resolve(ns, key: str, fallback):
    explicit = getattr(ns, key, None)
    if explicit is not None:
        return explicit
    if key in ns.config_values:
        return ns.config_values[key]
    return fallback


def _write_run_config(out_dir: Path, command: str, effective: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "run_config.json", "w") as fh:
        json.dump({"command": command, **effective}, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _segment_id(manifest_path: str, index: int) -> str:
    base = re.sub(r"\.wav$", "", manifest_path, flags=re.IGNORECASE)
    base = base.replace("\\", "__").replace("/", "__")
    return f"{base}.seg{index:03d}"


def _join_features(features_path, manifest: dataset.DatasetManifest):
    """Select feature rows by manifest order; fail loudly on missing ids."""
    ids, _labels, matrix = read_features_csv(features_path)
    index = {sid: i for i, sid in enumerate(ids)}
    rows, labels = [], []
    for row in manifest:
        if row.path not in index:
            raise VocalScreenError(f"segment {row.path!r} missing from {features_path}")
        rows.append(matrix[index[row.path]])
        labels.append(row.label)
    return np.asarray(rows), labels


def _feature_config_from(ns) -> FeatureConfig:
    path = _resolve(ns, "feature_config", None)
    if path is None:
        return FeatureConfig()
    with open(path) as fh:
        payload = json.load(fh)
    if "feature_config" in payload:  # accept an extract run_config.json directly
        payload = payload["feature_config"]
    return FeatureConfig(**payload)


# --- subcommand handlers -------------------------------------------------


def cmd_synth(ns) -> int:
    out_dir = Path(ns.out)
    seed = _resolve(ns, "seed", _default_seed())
    spec = synth.CohortSpec(
        speakers_per_class=_resolve(ns, "speakers_per_class", 12),
        seconds_per_speaker=_resolve(ns, "seconds_per_speaker", 120.0),
        seed=seed,
    )
    manifest = synth.generate_cohort(spec, out_dir)
    _write_run_config(out_dir, "synth", {
        "seed": seed,
        "speakers_per_class": spec.speakers_per_class,
        "seconds_per_speaker": spec.seconds_per_speaker,
    })
    print(f"synth: wrote {len(manifest)} recordings + cohort.csv to {out_dir}")
    print(f"note: {synth.NON_CLINICAL_NOTE}")
    return 0


def cmd_extract(ns) -> int:
    manifest_path = Path(ns.manifest)
    out_dir = Path(ns.out)
    manifest = dataset.load_manifest(manifest_path)
    if len(manifest) == 0:
        raise VocalScreenError(f"empty manifest: {manifest_path}")

    silence = preprocess.SilenceParams(
        frame_seconds=_resolve(ns, "frame_seconds", 0.05),
        hop_seconds=_resolve(ns, "hop_seconds", 0.025),
        threshold_ratio=_resolve(ns, "threshold_ratio", 0.1),
    )
    segment_seconds = _resolve(ns, "segment_seconds", 4.0)
    config = FeatureConfig(
        n_fft=_resolve(ns, "n_fft", 2048),
        hop=_resolve(ns, "fft_hop", 512),
        n_mels=_resolve(ns, "n_mels", 128),
    )
    jobs = _resolve(ns, "jobs", 1)

    def process(row: dataset.ManifestRow):
        wav_path = Path(row.path)
        if not wav_path.is_absolute():
            wav_path = manifest_path.parent / wav_path
        try:
            clip = audio_io.load_wav(wav_path)
            mono = audio_io.to_mono(clip)
            mono = audio_io.resample(mono, audio_io.DEFAULT_SAMPLE_RATE)
            voiced = preprocess.remove_silence(mono, silence)
            segments = preprocess.segment(voiced, segment_seconds, source_id=row.path)
        except (VocalScreenError, OSError, ValueError) as exc:
            raise VocalScreenError(f"{row.path}: {exc}") from exc
        return [
            (extract_features(seg, config, segment_id=_segment_id(row.path, i)), row)
            for i, seg in enumerate(segments)
        ]

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            per_file = list(pool.map(process, manifest.rows))
    else:
        per_file = [process(row) for row in manifest.rows]

    out_dir.mkdir(parents=True, exist_ok=True)
    feature_rows = [(vec, row.label) for file_rows in per_file for vec, row in file_rows]
    write_features_csv(out_dir / "features.csv", feature_rows)
    segment_manifest = dataset.DatasetManifest(rows=[
        dataset.ManifestRow(path=vec.segment_id, label=row.label, participant=row.participant)
        for file_rows in per_file
        for vec, row in file_rows
    ])
    dataset.save_manifest(out_dir / "segments.csv", segment_manifest)
    _write_run_config(out_dir, "extract", {
        "manifest": str(manifest_path),
        "segment_seconds": segment_seconds,
        "silence": {
            "frame_seconds": silence.frame_seconds,
            "hop_seconds": silence.hop_seconds,
            "threshold_ratio": silence.threshold_ratio,
        },
        "feature_config": config.as_dict(),
        "jobs": jobs,
    })
    counts = segment_manifest.label_counts()
    summary = ", ".join(f"{label}={counts[label]}" for label in sorted(counts))
    print(f"extract: {len(segment_manifest)} segments ({summary}) -> {out_dir}")
    return 0


def cmd_split(ns) -> int:
    out_dir = Path(ns.out)
    seed = _resolve(ns, "seed", _default_seed())
    spec = dataset.SplitSpec(
        train_fraction=_resolve(ns, "train_fraction", 0.8),
        seed=seed,
        mode=_resolve(ns, "mode", dataset.SEGMENT_LEVEL),
    )
    manifest = dataset.load_manifest(ns.manifest)
    train, test = dataset.split(manifest, spec)
    out_dir.mkdir(parents=True, exist_ok=True)
    sidecar = dataset.write_split(out_dir, train, test, spec)
    _write_run_config(out_dir, "split", {
        "manifest": str(ns.manifest),
        "seed": seed,
        "train_fraction": spec.train_fraction,
        "mode": spec.mode,
    })
    print(f"split[{spec.mode}]: train={sidecar['counts']['train']['total']}"
          f" test={sidecar['counts']['test']['total']} -> {out_dir}")
    return 0


def cmd_train(ns) -> int:
    out_dir = Path(ns.out)
    manifest = dataset.load_manifest(ns.manifest)
    features, labels = _join_features(ns.features, manifest)
    k = _resolve(ns, "k", 3)
    p = _resolve(ns, "p", 2.0)
    use_scaler = _resolve(ns, "scaler", True)
    scaler = model.fit_scaler(features) if use_scaler else model.identity_scaler(features.shape[1])
    fitted = model.knn_fit(features, labels, k=k, p=p, scaler=scaler,
                           feature_config=_feature_config_from(ns))
    out_dir.mkdir(parents=True, exist_ok=True)
    model.save_model(fitted, out_dir / "model.json")
    _write_run_config(out_dir, "train", {
        "features": str(ns.features),
        "manifest": str(ns.manifest),
        "k": k,
        "p": p,
        "scaler": use_scaler,
    })
    print(f"train: knn(k={k}, p={p:g}, scaler={'on' if use_scaler else 'off'})"
          f" on {len(labels)} segments -> {out_dir / 'model.json'}")
    return 0


def cmd_evaluate(ns) -> int:
    out_dir = Path(ns.out)
    manifest = dataset.load_manifest(ns.manifest)
    features, truth = _join_features(ns.features, manifest)
    fitted = model.load_model(ns.model)
    predictions = [model.knn_predict(fitted, row)[0] for row in features]
    split_mode = "unknown"
    if ns.split_sidecar:
        with open(ns.split_sidecar) as fh:
            split_mode = json.load(fh).get("mode", "unknown")
    report = evaluation.evaluate_predictions(predictions, truth, split_mode=split_mode,
                                             extra={"model_k": fitted.k, "model_p": fitted.p})
    out_dir.mkdir(parents=True, exist_ok=True)
    evaluation.write_json(out_dir / "eval_report.json", report.to_json_dict())
    text = evaluation.render_eval_text(report)
    (out_dir / "eval_report.txt").write_text(text)
    _write_run_config(out_dir, "evaluate", {
        "features": str(ns.features),
        "manifest": str(ns.manifest),
        "model": str(ns.model),
        "split_sidecar": str(ns.split_sidecar) if ns.split_sidecar else None,
    })
    print(text, end="")
    return 0


def cmd_predict(ns) -> int:
    fitted = model.load_model(ns.model)
    ids, _labels, matrix = read_features_csv(ns.features)
    lines = ["segment_id,label,score"]
    for sid, row in zip(ids, matrix):
        label, score = model.knn_predict(fitted, row)
        lines.append(f"{sid},{label},{score!r}")
    text = "\n".join(lines) + "\n"
    print(text, end="")
    if ns.out:
        out_dir = Path(ns.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "predictions.csv").write_text(text)
        _write_run_config(out_dir, "predict", {
            "features": str(ns.features),
            "model": str(ns.model),
        })
    return 0


def cmd_select(ns) -> int:
    out_dir = Path(ns.out)
    seed = _resolve(ns, "seed", _default_seed())
    folds = _resolve(ns, "folds", 5)
    jobs = _resolve(ns, "jobs", 1)
    manifest = dataset.load_manifest(ns.manifest)
    features, labels = _join_features(ns.features, manifest)
    report = evaluation.grid_select(evaluation.default_grid(), features, labels,
                                    folds=folds, seed=seed, jobs=jobs)
    out_dir.mkdir(parents=True, exist_ok=True)
    evaluation.write_json(out_dir / "selection_report.json", report.to_json_dict())
    _write_run_config(out_dir, "select", {
        "features": str(ns.features),
        "manifest": str(ns.manifest),
        "folds": folds,
        "seed": seed,
        "jobs": jobs,
    })
    print(evaluation.render_selection_text(report), end="")
    return 0


def cmd_stats(ns) -> int:
    out_dir = Path(ns.out)
    _ids, labels, matrix = read_features_csv(ns.features)
    by_group = {}
    for label, row in zip(labels, matrix):
        by_group.setdefault(label, []).append(row)
    by_group = {label: np.asarray(rows) for label, rows in by_group.items()}
    stats = evaluation.descriptive_stats(by_group)
    t_tests = evaluation.group_t_tests(by_group) if len(by_group) == 2 else None
    out_dir.mkdir(parents=True, exist_ok=True)
    evaluation.write_json(out_dir / "stats.json",
                          {"descriptives": stats, "t_tests": t_tests})
    text = evaluation.render_stats_text(stats, t_tests)
    (out_dir / "stats.txt").write_text(text)
    _write_run_config(out_dir, "stats", {"features": str(ns.features)})
    print(text, end="")
    return 0


# --- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="deterministic seed (default: $VOCALSCREEN_SEED or 0)")
    common.add_argument("--config", default=None,
                        help="key=value file supplying flag defaults")
    common.add_argument("--jobs", type=int, default=None,
                        help="parallel workers for extraction/selection (default 1)")

    parser = argparse.ArgumentParser(
        prog="vocalscreen",
        description="Audio-only depression-risk screening pipeline (synthetic data only).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic labeled cohort")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--speakers-per-class", type=int, default=None)
    p.add_argument("--seconds-per-speaker", type=float, default=None)
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("extract", parents=[common],
                       help="decode, de-silence, segment, and extract features")
    p.add_argument("--manifest", required=True, help="recording manifest CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--segment-seconds", type=float, default=None)
    p.add_argument("--frame-seconds", type=float, default=None, help="silence-detector frame")
    p.add_argument("--hop-seconds", type=float, default=None, help="silence-detector hop")
    p.add_argument("--threshold-ratio", type=float, default=None, help="silence RMS ratio")
    p.add_argument("--n-fft", type=int, default=None)
    p.add_argument("--fft-hop", type=int, default=None)
    p.add_argument("--n-mels", type=int, default=None)
    p.set_defaults(handler=cmd_extract)

    p = sub.add_parser("split", parents=[common], help="deterministic train/test split")
    p.add_argument("--manifest", required=True, help="segment manifest CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--train-fraction", type=float, default=None)
    p.add_argument("--mode", choices=dataset.SPLIT_MODES, default=None)
    p.set_defaults(handler=cmd_split)

    p = sub.add_parser("train", parents=[common], help="fit scaler + KNN and persist the model")
    p.add_argument("--features", required=True)
    p.add_argument("--manifest", required=True, help="training-side segment manifest")
    p.add_argument("--out", required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--scaler", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--feature-config", default=None,
                   help="JSON with the extraction constants to bind into the model")
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("evaluate", parents=[common], help="score a model on held-out segments")
    p.add_argument("--features", required=True)
    p.add_argument("--manifest", required=True, help="test-side segment manifest")
    p.add_argument("--model", required=True)
    p.add_argument("--split-sidecar", default=None, help="split.json recording the split mode")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("predict", parents=[common], help="print segment_id,label,score per row")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out", default=None, help="also write predictions.csv here")
    p.set_defaults(handler=cmd_predict)

    p = sub.add_parser("select", parents=[common],
                       help="exhaustive cross-validated grid over KNN pipelines")
    p.add_argument("--features", required=True)
    p.add_argument("--manifest", required=True, help="training-side segment manifest")
    p.add_argument("--out", required=True)
    p.add_argument("--folds", type=int, default=None)
    p.set_defaults(handler=cmd_select)

    p = sub.add_parser("stats", parents=[common], help="per-group descriptive stats and t-tests")
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_stats)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        ns.config_values = load_config(ns.config) if ns.config else {}
        return ns.handler(ns)
    except (VocalScreenError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

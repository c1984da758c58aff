"""End-to-end workflow glue: config handling and the annotate->train->evaluate run.

A run configuration is one JSON document; every key is optional and falls
back to the defaults below, but unknown keys are rejected outright so typos
cannot silently disable a setting. All randomness in a run flows from the
single top-level seed.
"""

from __future__ import annotations

import copy
import hashlib
import json
from pathlib import Path

from . import __version__
from .align import train_lexical_model
from .annotate import annotate_corpus
from .corpus import PairRecord, Quality, load_corpus, save_corpus, split
from .encode import FeatureConfig, InputFormat, feature_fingerprint, featurize_corpus
from .evaluate import evaluate, heatmap_export, save_report
from .model import (
    A4_LABELS,
    GOOD_LABEL,
    NON_LITERAL_TECHNIQUES,
    TECHNIQUE_LABELS,
    TRIAGE_LABELS,
    TaskData,
    TrainConfig,
    labels_to_indices,
    make_spec,
    predict_arch3,
    save_checkpoint,
    train,
)
from .resources import load_resources
from .synthesize import SynthesisConfig, build_pe_dataset

DEFAULT_CONFIG = {
    "seed": 13,
    "architecture": "a1",
    "paths": {
        "corpus": None,
        "resources": None,
        "out_dir": "run",
        "embeddings": None,
    },
    "align": {"method": "em", "iterations": 10, "threshold": 0.5},
    "annotate": {"theta_sim": 0.55, "theta_low": 0.25},
    "synthesize": {"bad_fraction": 0.74, "require_full_gloss": True, "em_iterations": 5},
    "split": {"ratios": [0.81, 0.09, 0.10]},
    "features": {"hash_dim": 2 ** 14, "use_embeddings": False, "embedding_dim": 0},
    "train": {
        "learning_rate": 1e-3,
        "batch_size": 64,
        "max_epochs": 30,
        "patience": 5,
        "l2": 1e-4,
        "hidden": 64,
        "alpha": 0.8,
        "beta": 0.2,
    },
}

ARCHITECTURES = ("a1", "a2", "a3", "a4")


class ConfigError(ValueError):
    pass


def merge_config(overrides: "dict | None") -> dict:
    """Defaults overlaid with ``overrides``; unknown keys fail fast."""
    config = copy.deepcopy(DEFAULT_CONFIG)
    if overrides is None:
        return config

    def merge(base: dict, extra: dict, path: str) -> None:
        for key, value in extra.items():
            if key not in base:
                raise ConfigError(f"unknown configuration key {path + key!r}")
            if isinstance(base[key], dict) and not isinstance(value, dict):
                raise ConfigError(f"configuration key {path + key!r} must be a section")
            if isinstance(base[key], dict):
                merge(base[key], value, path + key + ".")
            else:
                base[key] = value

    if not isinstance(overrides, dict):
        raise ConfigError("configuration document must be a JSON object")
    merge(config, overrides, "")
    if config["architecture"] not in ARCHITECTURES:
        raise ConfigError(f"unknown architecture {config['architecture']!r}")
    return config


def load_config(path) -> dict:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return merge_config(obj)


def config_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def train_config_from(config: dict) -> TrainConfig:
    t = config["train"]
    return TrainConfig(
        learning_rate=t["learning_rate"],
        batch_size=t["batch_size"],
        max_epochs=t["max_epochs"],
        patience=t["patience"],
        l2=t["l2"],
        hidden=t["hidden"],
        seed=config["seed"],
    )


def feature_config_from(config: dict) -> FeatureConfig:
    f = config["features"]
    return FeatureConfig(
        hash_dim=f["hash_dim"],
        use_embeddings=f["use_embeddings"],
        embedding_dim=f["embedding_dim"],
    )


# ---------------------------------------------------------------------------
# dataset assembly


def quality_gold(rec: PairRecord) -> str:
    return rec.quality.value


def composed_gold(rec: PairRecord) -> str:
    """Gold label for the two-stage pipeline output space."""
    if rec.quality is Quality.BAD:
        return rec.technique.value
    return rec.quality.value


def a4_gold(rec: PairRecord) -> str:
    if rec.quality is Quality.BAD:
        return rec.technique.value
    return GOOD_LABEL


def technique_gold(rec: PairRecord) -> str:
    return rec.technique.value


def build_task_data(arch: str, records, resources, fcfg: FeatureConfig, embeddings=None):
    """Feature matrices plus integer labels for one architecture's head(s)."""
    if arch in ("a1", "a2"):
        golds = [technique_gold(r) for r in records]
        y = labels_to_indices(golds, TECHNIQUE_LABELS)
        x1 = featurize_corpus(records, InputFormat.INPUT1, resources, fcfg, embeddings)
        if arch == "a1":
            return TaskData(x=x1, y=y), golds
        x2 = featurize_corpus(records, InputFormat.INPUT2, resources, fcfg, embeddings)
        return TaskData(x=x1, y=y, x_aux=x2), golds
    x2 = featurize_corpus(records, InputFormat.INPUT2, resources, fcfg, embeddings)
    if arch == "a3_stage1":
        golds = [quality_gold(r) for r in records]
        return TaskData(x=x2, y=labels_to_indices(golds, TRIAGE_LABELS)), golds
    if arch == "a3_stage2":
        golds = [technique_gold(r) for r in records]
        return TaskData(x=x2, y=labels_to_indices(golds, NON_LITERAL_TECHNIQUES)), golds
    if arch == "a4":
        golds = [a4_gold(r) for r in records]
        return TaskData(x=x2, y=labels_to_indices(golds, A4_LABELS)), golds
    raise ValueError(f"unknown architecture {arch!r}")


# ---------------------------------------------------------------------------
# the full run


def run_pipeline(config: dict, workdir=".") -> dict:
    """annotate -> (synthesize) -> split -> train -> evaluate, per config.

    Returns a manifest dict (also written to out_dir/manifest.json). Output
    bytes are deterministic for a fixed config.
    """
    workdir = Path(workdir)
    paths = config["paths"]
    if not paths["corpus"] or not paths["resources"]:
        raise ConfigError("paths.corpus and paths.resources are required")
    corpus_path = workdir / paths["corpus"]
    resources_path = workdir / paths["resources"]
    out_dir = workdir / paths["out_dir"]
    out_dir.mkdir(parents=True, exist_ok=True)

    records, issues = load_corpus(corpus_path)
    if not records:
        raise ConfigError(f"no usable records in {corpus_path}")
    resources = load_resources(resources_path)
    arch = config["architecture"]
    seed = config["seed"]
    fcfg = feature_config_from(config)
    tcfg = train_config_from(config)

    labeled, annotate_report = annotate_corpus(
        records, resources,
        theta_sim=config["annotate"]["theta_sim"],
        theta_low=config["annotate"]["theta_low"],
    )
    save_corpus(labeled, out_dir / "annotated.jsonl")
    (out_dir / "annotate_report.json").write_text(
        json.dumps(
            {
                "total": annotate_report.total,
                "labeled": annotate_report.labeled,
                "label_counts": dict(sorted(annotate_report.label_counts.items())),
                "unlabelable": annotate_report.errors,
            },
            ensure_ascii=False,
            indent=2,
        ) + "\n",
        encoding="utf-8",
    )

    outputs = ["annotated.jsonl", "annotate_report.json"]
    synthesis_counts = None
    if arch in ("a3", "a4"):
        s = config["synthesize"]
        table = train_lexical_model(
            [(r.source_sentence, r.target_sentence) for r in labeled],
            iterations=s["em_iterations"],
        )
        dataset, synth_report = build_pe_dataset(
            labeled,
            resources.lexicon,
            SynthesisConfig(
                bad_fraction=s["bad_fraction"],
                seed=seed,
                require_full_gloss=s["require_full_gloss"],
            ),
            table=table,
        )
        save_corpus(dataset, out_dir / "pe_dataset.jsonl")
        outputs.append("pe_dataset.jsonl")
        synthesis_counts = dict(sorted(synth_report.quality_counts.items()))
    else:
        dataset = labeled

    ratios = tuple(config["split"]["ratios"])
    train_recs, dev_recs, test_recs = split(dataset, ratios, seed)
    split_sizes = [len(train_recs), len(dev_recs), len(test_recs)]

    embeddings = None
    if fcfg.use_embeddings:
        from .align import load_embeddings

        if not paths["embeddings"]:
            raise ConfigError("features.use_embeddings requires paths.embeddings")
        embeddings = load_embeddings(workdir / paths["embeddings"])

    fingerprint = feature_fingerprint(fcfg)
    manifest = {
        "config_hash": config_hash(config),
        "package_version": __version__,
        "architecture": arch,
        "seed": seed,
        "corpus_issues": len(issues),
        "unlabelable_records": len(annotate_report.errors),
        "synthesis_counts": synthesis_counts,
        "split_sizes": split_sizes,
        "outputs": outputs,
    }

    if arch == "a3":
        stage_models = []
        for stage, stage_name in ((1, "a3_stage1"), (2, "a3_stage2")):
            def stage_records(recs):
                if stage == 1:
                    return recs
                return [r for r in recs if r.quality is Quality.BAD]

            tr, trg = build_task_data(stage_name, stage_records(train_recs), resources, fcfg, embeddings)
            dv, _ = build_task_data(stage_name, stage_records(dev_recs), resources, fcfg, embeddings)
            spec = make_spec(stage_name)
            model = train(spec, tr, dv, tcfg, feature_fingerprint=fingerprint)
            ckpt = f"checkpoint_stage{stage}.json"
            save_checkpoint(model, out_dir / ckpt)
            outputs.append(ckpt)
            stage_models.append(model)
        stage1, stage2 = stage_models

        x2_test = featurize_corpus(test_recs, InputFormat.INPUT2, resources, fcfg, embeddings)
        stage1_golds = [quality_gold(r) for r in test_recs]
        stage1_preds = stage1.predict(x2_test)
        stage1_report = evaluate(stage1_golds, stage1_preds, TRIAGE_LABELS)
        save_report(stage1_report, out_dir / "metrics_stage1.json")
        heatmap_export(stage1_report.confusion, out_dir / "heatmap_stage1.csv", normalize="row")

        composed_labels = ("GOOD_LIT", "GOOD_NONLIT") + NON_LITERAL_TECHNIQUES
        composed_golds = [composed_gold(r) for r in test_recs]
        composed_preds = predict_arch3(stage1, stage2, x2_test)
        report = evaluate(composed_golds, composed_preds, composed_labels)
        manifest["stage1_test_accuracy"] = stage1_report.accuracy
        manifest["stage1_best_dev_accuracy"] = max(
            s.dev_accuracy for s in stage1.training_log
        )
        manifest["best_epochs"] = [stage1.best_epoch, stage2.best_epoch]
        outputs.extend(["metrics_stage1.json", "heatmap_stage1.csv"])
    else:
        tr, _ = build_task_data(arch, train_recs, resources, fcfg, embeddings)
        dv, _ = build_task_data(arch, dev_recs, resources, fcfg, embeddings)
        alpha, beta = config["train"]["alpha"], config["train"]["beta"]
        spec = make_spec(arch, alpha, beta)
        model = train(spec, tr, dv, tcfg, feature_fingerprint=fingerprint)
        save_checkpoint(model, out_dir / "checkpoint.json")
        outputs.append("checkpoint.json")

        te, test_golds = build_task_data(arch, test_recs, resources, fcfg, embeddings)
        preds = model.predict(te.x)
        report = evaluate(test_golds, preds, spec.label_maps[0])
        manifest["best_epochs"] = [model.best_epoch]

    save_report(report, out_dir / "metrics.json")
    heatmap_export(report.confusion, out_dir / "heatmap.csv", normalize="row")
    outputs.extend(["metrics.json", "heatmap.csv"])
    manifest["test_accuracy"] = report.accuracy
    manifest["outputs"] = outputs
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )
    return manifest


__all__ = [
    "DEFAULT_CONFIG",
    "ARCHITECTURES",
    "ConfigError",
    "merge_config",
    "load_config",
    "config_hash",
    "train_config_from",
    "feature_config_from",
    "build_task_data",
    "composed_gold",
    "a4_gold",
    "run_pipeline",
]

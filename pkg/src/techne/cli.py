"""Command-line entry point wiring the modules into the two workflows.

Subcommands: align, annotate, synthesize, split, train, evaluate, report,
pipeline. Exit codes: 0 success, 1 partial (the command finished but some
input lines were rejected), 2 usage or fatal error. Every subcommand accepts
--config (JSON run configuration) and --workdir; explicit flags override
config values.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .align import (
    embed_align,
    intersect_alignments,
    lexical_align,
    load_embeddings,
    train_lexical_model,
)
from .annotate import annotate_corpus
from .corpus import Quality, Sentence, load_corpus, make_sentence, save_corpus, split
from .encode import InputFormat, feature_fingerprint, featurize_corpus
from .evaluate import compare_architectures, evaluate, heatmap_export, load_report, save_report
from .model import load_checkpoint, make_spec, save_checkpoint, train
from .pipeline import (
    ConfigError,
    build_task_data,
    feature_config_from,
    load_config,
    merge_config,
    run_pipeline,
    train_config_from,
)
from .resources import load_resources
from .synthesize import SynthesisConfig, build_pe_dataset

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_FATAL = 2


class CliError(Exception):
    """Fatal subcommand failure; message goes to stderr, exit code 2."""


def _read_bitext(path: Path):
    """TSV bitext: space-separated source tokens, tab, target tokens."""
    if not path.exists():
        raise CliError(f"bitext file not found: {path}")
    pairs = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            cols = line.rstrip("\n").split("\t")
            if len(cols) != 2:
                raise CliError(f"{path}:{lineno}: expected two tab-separated columns")
            src = make_sentence([(w, "OTHER") for w in cols[0].split()], "en")
            tgt = make_sentence([(w, "OTHER") for w in cols[1].split()], "zh")
            pairs.append((src, tgt))
    if not pairs:
        raise CliError(f"{path}: no sentence pairs")
    return pairs


def _load_corpus_or_die(path: Path):
    if not path.exists():
        raise CliError(f"corpus file not found: {path}")
    records, issues = load_corpus(path)
    if not records and issues:
        raise CliError(f"{path}: no usable records ({len(issues)} malformed lines)")
    return records, issues


def _load_resources_or_die(path: Path):
    try:
        return load_resources(path)
    except (OSError, ValueError) as exc:
        raise CliError(str(exc)) from None


def _config_for(args) -> dict:
    if getattr(args, "config", None):
        return load_config(Path(args.workdir) / args.config)
    return merge_config(None)


def cmd_align(args) -> int:
    config = _config_for(args)
    workdir = Path(args.workdir)
    method = args.method or config["align"]["method"]
    threshold = args.threshold if args.threshold is not None else config["align"]["threshold"]
    iterations = args.iterations if args.iterations is not None else config["align"]["iterations"]
    pairs = _read_bitext(workdir / args.bitext)

    table = None
    emb = None
    if method in ("em", "intersect"):
        table = train_lexical_model(pairs, iterations=iterations)
    if method in ("embed", "intersect"):
        emb_path = args.embeddings or config["paths"]["embeddings"]
        if not emb_path:
            raise CliError("method embed requires --embeddings")
        emb_file = workdir / emb_path
        if not emb_file.exists():
            raise CliError(f"embedding file not found: {emb_file}")
        emb = load_embeddings(emb_file)

    def align_one(src: Sentence, tgt: Sentence):
        if method == "em":
            return lexical_align(src, tgt, table, threshold)
        if method == "embed":
            return embed_align(src, tgt, emb, threshold)
        a = lexical_align(src, tgt, table, threshold)
        b = embed_align(src, tgt, emb, threshold)
        return intersect_alignments(a, b, len(src), len(tgt))

    out_path = workdir / args.out
    with out_path.open("w", encoding="utf-8") as fh:
        for i, (src, tgt) in enumerate(pairs):
            alignment = align_one(src, tgt)
            fh.write(json.dumps({
                "pair": i,
                "links": [list(l) for l in alignment.links],
                "unaligned_source": list(alignment.unaligned_source),
                "unaligned_target": list(alignment.unaligned_target),
            }, ensure_ascii=False) + "\n")
    print(f"aligned {len(pairs)} pairs ({method}) -> {out_path}")
    return EXIT_OK


def cmd_annotate(args) -> int:
    config = _config_for(args)
    workdir = Path(args.workdir)
    records, issues = _load_corpus_or_die(workdir / args.corpus)
    resources = _load_resources_or_die(workdir / args.resources)
    theta_sim = args.theta_sim if args.theta_sim is not None else config["annotate"]["theta_sim"]
    theta_low = args.theta_low if args.theta_low is not None else config["annotate"]["theta_low"]
    labeled, report = annotate_corpus(records, resources, theta_sim, theta_low)
    save_corpus(labeled, workdir / args.out)
    report_path = workdir / (args.report or args.out + ".report.json")
    report_path.write_text(json.dumps({
        "total": report.total,
        "labeled": report.labeled,
        "label_counts": dict(sorted(report.label_counts.items())),
        "unlabelable": report.errors,
        "malformed_lines": [[i.line, i.message] for i in issues],
    }, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    print(
        f"annotated {report.labeled}/{report.total} records "
        f"({len(report.errors)} unlabelable) -> {workdir / args.out}"
    )
    return EXIT_PARTIAL if issues else EXIT_OK


def cmd_synthesize(args) -> int:
    config = _config_for(args)
    workdir = Path(args.workdir)
    records, issues = _load_corpus_or_die(workdir / args.corpus)
    resources = _load_resources_or_die(workdir / args.resources)
    s = config["synthesize"]
    bad_fraction = args.bad_fraction if args.bad_fraction is not None else s["bad_fraction"]
    seed = args.seed if args.seed is not None else config["seed"]
    require = False if args.allow_partial_gloss else s["require_full_gloss"]
    table = train_lexical_model(
        [(r.source_sentence, r.target_sentence) for r in records],
        iterations=s["em_iterations"],
    )
    dataset, report = build_pe_dataset(
        records, resources.lexicon,
        SynthesisConfig(bad_fraction=bad_fraction, seed=seed, require_full_gloss=require),
        table=table,
    )
    save_corpus(dataset, workdir / args.out)
    report_path = workdir / (args.report or args.out + ".report.json")
    report_path.write_text(json.dumps({
        "quality_counts": dict(sorted(report.quality_counts.items())),
        "sampled": report.sampled,
        "skips": report.skips,
    }, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    print(
        f"built PE dataset: {len(dataset)} records "
        f"({report.quality_counts.get('BAD', 0)} BAD, {len(report.skips)} skipped) "
        f"-> {workdir / args.out}"
    )
    return EXIT_PARTIAL if issues else EXIT_OK


def _parse_ratios(text: str):
    parts = text.split(",")
    if len(parts) != 3:
        raise CliError("--ratios must be three comma-separated fractions")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise CliError(f"bad ratio value in {text!r}") from None


def cmd_split(args) -> int:
    config = _config_for(args)
    workdir = Path(args.workdir)
    records, issues = _load_corpus_or_die(workdir / args.corpus)
    ratios = _parse_ratios(args.ratios) if args.ratios else tuple(config["split"]["ratios"])
    seed = args.seed if args.seed is not None else config["seed"]
    try:
        parts = split(records, ratios, seed)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    prefix = workdir / args.out_prefix
    for name, part in zip(("train", "dev", "test"), parts):
        save_corpus(part, Path(f"{prefix}.{name}.jsonl"))
    print(
        f"split {len(records)} records into "
        f"{len(parts[0])}/{len(parts[1])}/{len(parts[2])} -> {prefix}.*.jsonl"
    )
    return EXIT_PARTIAL if issues else EXIT_OK


def cmd_train(args) -> int:
    config = _config_for(args)
    workdir = Path(args.workdir)
    arch = args.arch or config["architecture"]
    if args.alpha is not None:
        config["train"]["alpha"] = args.alpha
    if args.beta is not None:
        config["train"]["beta"] = args.beta
    if args.seed is not None:
        config["seed"] = args.seed
    if args.hash_dim is not None:
        config["features"]["hash_dim"] = args.hash_dim
    for key in ("learning_rate", "batch_size", "max_epochs", "patience", "l2", "hidden"):
        value = getattr(args, key)
        if value is not None:
            config["train"][key] = value

    records, issues = _load_corpus_or_die(workdir / args.corpus)
    resources = _load_resources_or_die(workdir / args.resources)
    fcfg = feature_config_from(config)
    tcfg = train_config_from(config)
    ratios = _parse_ratios(args.ratios) if args.ratios else tuple(config["split"]["ratios"])
    train_recs, dev_recs, _ = split(records, ratios, config["seed"])
    out_dir = workdir / args.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    fingerprint = feature_fingerprint(fcfg)

    def run_one(stage_arch: str, suffix: str) -> None:
        def pick(recs):
            if stage_arch == "a3_stage2":
                return [r for r in recs if r.quality is Quality.BAD]
            return recs

        tr, _ = build_task_data(stage_arch, pick(train_recs), resources, fcfg)
        dv, _ = build_task_data(stage_arch, pick(dev_recs), resources, fcfg)
        spec = make_spec(stage_arch, config["train"]["alpha"], config["train"]["beta"])
        model = train(spec, tr, dv, tcfg, feature_fingerprint=fingerprint)
        ckpt = out_dir / f"checkpoint{suffix}.json"
        save_checkpoint(model, ckpt)
        log_path = out_dir / f"training_log{suffix}.json"
        log_path.write_text(json.dumps({
            "best_epoch": model.best_epoch,
            "epochs": [
                {"epoch": s.epoch, "train_loss": s.train_loss, "dev_accuracy": s.dev_accuracy}
                for s in model.training_log
            ],
        }, indent=2) + "\n", encoding="utf-8")
        best = max(s.dev_accuracy for s in model.training_log)
        print(f"{stage_arch}: best dev accuracy {best:.4f} at epoch {model.best_epoch} -> {ckpt}")

    if arch == "a3":
        run_one("a3_stage1", "_stage1")
        run_one("a3_stage2", "_stage2")
    else:
        run_one(arch, "")
    return EXIT_PARTIAL if issues else EXIT_OK


def cmd_evaluate(args) -> int:
    config = _config_for(args)
    workdir = Path(args.workdir)
    out_json = workdir / args.out_json
    heatmap = workdir / args.out_heatmap if args.out_heatmap else None

    if args.gold and args.pred:
        golds = (workdir / args.gold).read_text(encoding="utf-8").split()
        preds = (workdir / args.pred).read_text(encoding="utf-8").split()
        if len(golds) != len(preds):
            raise CliError(
                f"gold/pred length mismatch: {len(golds)} vs {len(preds)}"
            )
        labels = args.labels.split(",") if args.labels else sorted(set(golds) | set(preds))
        try:
            report = evaluate(golds, preds, labels)
        except ValueError as exc:
            raise CliError(str(exc)) from None
    elif args.checkpoint and args.corpus:
        model = load_checkpoint(workdir / args.checkpoint)
        records, _ = _load_corpus_or_die(workdir / args.corpus)
        if not args.resources:
            raise CliError("--resources is required with --checkpoint")
        resources = _load_resources_or_die(workdir / args.resources)
        fcfg = feature_config_from(config)
        task, golds = build_task_data(model.spec.kind, records, resources, fcfg)
        preds = model.predict(task.x)
        report = evaluate(golds, preds, model.spec.label_maps[0])
    else:
        raise CliError("provide either --gold/--pred or --checkpoint/--corpus")

    save_report(report, out_json)
    if heatmap is not None:
        heatmap_export(report.confusion, heatmap, normalize=args.normalize)
    print(f"accuracy {report.accuracy:.4f}, macro-F1 {report.macro_f1:.4f} -> {out_json}")
    return EXIT_OK


def cmd_report(args) -> int:
    workdir = Path(args.workdir)
    named = []
    for item in args.reports:
        name, _, path = item.partition("=")
        if not path:
            raise CliError(f"--reports items must be name=path, got {item!r}")
        named.append((name, load_report(workdir / path)))
    compare_architectures(named, workdir / args.out)
    print(f"wrote comparison tables for {len(named)} run(s) -> {workdir / args.out}")
    return EXIT_OK


def cmd_pipeline(args) -> int:
    if not args.config:
        raise CliError("pipeline requires --config")
    config = load_config(Path(args.workdir) / args.config)
    manifest = run_pipeline(config, args.workdir)
    print(
        f"pipeline {manifest['architecture']} finished: "
        f"test accuracy {manifest['test_accuracy']:.4f}, "
        f"splits {manifest['split_sizes']}"
    )
    return EXIT_PARTIAL if manifest["corpus_issues"] else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="techne",
        description="translation technique annotation and prediction toolkit",
    )
    parser.add_argument("--workdir", default=".", help="base directory for all paths")
    # accepted before or after the subcommand; SUPPRESS keeps the root default
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--workdir", default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=argparse.ArgumentParser)

    def add_parser(name, **kwargs):
        return sub.add_parser(name, parents=[common], **kwargs)

    p = add_parser("align", help="align a bitext with the EM or embedding aligner")
    p.add_argument("--bitext", required=True)
    p.add_argument("--method", choices=("em", "embed", "intersect"))
    p.add_argument("--out", required=True)
    p.add_argument("--iterations", type=int)
    p.add_argument("--threshold", type=float)
    p.add_argument("--embeddings")
    p.add_argument("--config")
    p.set_defaults(func=cmd_align)

    p = add_parser("annotate", help="label a corpus with the rule cascade")
    p.add_argument("--corpus", required=True)
    p.add_argument("--resources", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report")
    p.add_argument("--theta-sim", type=float, dest="theta_sim")
    p.add_argument("--theta-low", type=float, dest="theta_low")
    p.add_argument("--config")
    p.set_defaults(func=cmd_annotate)

    p = add_parser("synthesize", help="build the PE dataset with bad literal twins")
    p.add_argument("--corpus", required=True)
    p.add_argument("--resources", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report")
    p.add_argument("--bad-fraction", type=float, dest="bad_fraction")
    p.add_argument("--seed", type=int)
    p.add_argument(
        "--allow-partial-gloss", action="store_true",
        help="synthesize even when some unit tokens lack a lexicon gloss",
    )
    p.add_argument("--config")
    p.set_defaults(func=cmd_synthesize)

    p = add_parser("split", help="stratified train/dev/test split")
    p.add_argument("--corpus", required=True)
    p.add_argument("--ratios", help="e.g. 0.81,0.09,0.10")
    p.add_argument("--seed", type=int)
    p.add_argument("--out-prefix", required=True, dest="out_prefix")
    p.add_argument("--config")
    p.set_defaults(func=cmd_split)

    p = add_parser("train", help="train one architecture on a labeled corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--resources", required=True)
    p.add_argument("--arch", choices=("a1", "a2", "a3", "a4"))
    p.add_argument("--out-dir", required=True, dest="out_dir")
    p.add_argument("--ratios")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--hash-dim", type=int, dest="hash_dim")
    p.add_argument("--learning-rate", type=float, dest="learning_rate")
    p.add_argument("--batch-size", type=int, dest="batch_size")
    p.add_argument("--max-epochs", type=int, dest="max_epochs")
    p.add_argument("--patience", type=int)
    p.add_argument("--l2", type=float)
    p.add_argument("--hidden", type=int)
    p.add_argument("--config")
    p.set_defaults(func=cmd_train)

    p = add_parser("evaluate", help="score predictions or a checkpoint")
    p.add_argument("--gold")
    p.add_argument("--pred")
    p.add_argument("--labels")
    p.add_argument("--checkpoint")
    p.add_argument("--corpus")
    p.add_argument("--resources")
    p.add_argument("--out-json", required=True, dest="out_json")
    p.add_argument("--out-heatmap", dest="out_heatmap")
    p.add_argument("--normalize", choices=("none", "row"), default="row")
    p.add_argument("--config")
    p.set_defaults(func=cmd_evaluate)

    p = add_parser("report", help="tabulate several metrics reports")
    p.add_argument("--reports", nargs="+", required=True, metavar="NAME=PATH")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    p = add_parser("pipeline", help="run annotate/synthesize/split/train/evaluate")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_FATAL if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (CliError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()

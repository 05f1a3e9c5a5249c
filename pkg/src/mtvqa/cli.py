"""Command-line entry point orchestrating the pipeline.

Subcommands: ingest | synth | reformat | stats | train | eval | experiment
| report.  Every subcommand is deterministic given its inputs and seeds
(outputs are byte-identical on reruns except the manifest timestamp).  Data
errors exit 1 with a one-line message; usage errors exit 2.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from . import corpus, datasets, harness, models, reports, textenc
from .errors import ConfigError, MtvqaError

_TRAIN_FIELDS = {f.name: f.type for f in dataclasses.fields(harness.TrainConfig)}
_MODEL_INT_FIELDS = ("embed_dim", "max_len", "filters_per_width", "hidden_dim",
                     "img_compress_dim", "lstm_dim", "lstm_depth", "common_dim")


def _env_seed():
    return int(os.environ.get("MTVQA_SEED", "0"))


def _coerce(text, kind):
    if kind in ("int",):
        return int(text)
    if kind in ("float",):
        return float(text)
    if kind in ("bool",):
        return text.lower() in ("1", "true", "yes")
    return text


def _train_config(args):
    overrides = {}
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=val, got {item!r}")
        key, val = item.split("=", 1)
        if key not in _TRAIN_FIELDS:
            raise ConfigError(f"unknown training option {key!r}")
        declared = str(_TRAIN_FIELDS[key])
        kind = "int" if declared == "int" else "float" if declared == "float" else "str"
        try:
            overrides[key] = _coerce(val, kind)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {val!r}") from exc
    overrides.setdefault("seed", args.seed)
    cfg = dataclasses.replace(harness.TrainConfig(), **overrides)
    cfg.validate()
    return cfg


def _model_overrides(args):
    out = {}
    for item in args.model_set or []:
        if "=" not in item:
            raise ConfigError(f"--model-set expects key=val, got {item!r}")
        key, val = item.split("=", 1)
        if key in _MODEL_INT_FIELDS:
            out[key] = int(val)
        elif key in ("filter_widths", "classifier_dims"):
            out[key] = tuple(int(v) for v in val.split(",") if v)
        elif key == "shared_question_encoder":
            out[key] = _coerce(val, "bool")
        else:
            raise ConfigError(f"unknown model option {key!r}")
    return out


def _keyword_config(args):
    if getattr(args, "keywords", None):
        return corpus.load_keyword_config(args.keywords)
    return corpus.default_keyword_config()


# ---------------------------------------------------------------------------
# subcommands

def _cmd_ingest(args):
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    if args.format == "daquar":
        raw = corpus.parse_daquar(args.input)
        labeled, rejected = corpus.label_corpus(raw, _keyword_config(args))
    else:
        labeled = corpus.parse_cocoqa(args.input)
        rejected = []
    corpus.io.write_labeled(outdir / "labeled.tsv", labeled)
    corpus.io.write_rejections(outdir / "rejected.log", rejected)
    sample = corpus.audit_sample(labeled, seed=args.seed)
    corpus.io.write_audit(outdir / "audit.tsv", sample)
    print(f"labeled: {len(labeled)}")
    print(f"rejected: {len(rejected)}")
    print(f"audit sample: {len(sample)}")
    return 0


def _cmd_synth(args):
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    cfg = corpus.SyntheticSceneConfig(num_images=args.images, noise_std=args.noise_std,
                                      grid_size=args.grid_size, max_count=args.max_count,
                                      seed=args.seed)
    questions, feats = corpus.gen_synthetic_corpus(cfg)
    corpus.io.write_labeled(outdir / "labeled.tsv", questions)
    corpus.save_features(outdir / "features.feat", feats, binary=args.binary_features)
    print(f"questions: {len(questions)}")
    print(f"images: {len(feats)}")
    print(f"feature_dim: {feats.feature_dim}")
    return 0


def _parse_tasks(text):
    return tuple(corpus.parse_qtype(t) for t in text.split(",") if t.strip())


def _cmd_reformat(args):
    labeled = corpus.io.read_labeled(args.labeled)
    if args.tasks:
        tasks = _parse_tasks(args.tasks)
    else:
        present = {q.qtype for q in labeled}
        tasks = tuple(t for t in corpus.ALL_TYPES if t in present)
    groups = corpus.group_by_image(labeled)
    combined = corpus.reformat_multitask(groups, tasks)
    singles = corpus.flatten_single_task(combined)
    isolated = corpus.isolate_slots(combined)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    corpus.io.write_multitask(outdir / "multitask.tsv", combined, tasks)
    corpus.io.write_single(outdir / "single.tsv", singles)
    corpus.io.write_multitask(outdir / "isolated.tsv", isolated, tasks)
    for line in corpus.corpus_stats(combined).lines():
        print(line)
    return 0


def _cmd_stats(args):
    examples, _ = corpus.io.read_multitask(args.data)
    for line in corpus.corpus_stats(examples).lines():
        print(line)
    return 0


def _bundle_from_files(train_path, test_path, features_path):
    train_combined, tasks = corpus.io.read_multitask(train_path)
    test_combined, tasks_test = corpus.io.read_multitask(test_path)
    if tasks_test != tasks:
        raise ConfigError("train and test files declare different task sets")
    features = corpus.load_features(features_path)
    return harness.bundle_from_examples(train_combined, test_combined, features, tasks)


def _cmd_train(args):
    examples, tasks = corpus.io.read_multitask(args.data)
    features = corpus.load_features(args.features)
    bundle = harness.bundle_from_examples(examples, [], features, tasks)
    model_cfg = harness.model_config_for_bundle(bundle, **_model_overrides(args))
    if args.embeddings:
        emb = textenc.load_embeddings(args.embeddings, bundle.vocab,
                                      model_cfg.embed_dim, seed=args.seed)
    else:
        emb = textenc.random_embeddings(bundle.vocab, model_cfg.embed_dim, seed=args.seed)
    model = models.build_model(args.variant, model_cfg, emb, seed=args.seed)
    if model.n_heads == 1:
        enc = bundle.encode_singles(corpus.flatten_single_task(examples))
    else:
        enc = bundle.encode_combined(examples)
    train_cfg = _train_config(args)
    model, history = harness.train(model, enc, train_cfg)
    extras = {"tokens": bundle.vocab.id_to_token,
              "answers": bundle.answer_vocab.id_to_answer,
              "train_config": dataclasses.asdict(train_cfg)}
    models.save_model(args.out, model, binary=not args.text_checkpoint, extras=extras)
    if args.history:
        Path(args.history).write_text(json.dumps(history.to_dict(), indent=2) + "\n",
                                      encoding="utf-8")
    report = harness.evaluate(model, enc)
    print(f"checkpoint: {args.out}")
    print(f"best_epoch: {history.best_epoch}")
    print(f"train_accuracy: {reports.round_half_up(report.total_accuracy or 0.0):.1f}")
    return 0


def _cmd_eval(args):
    model, extras = models.load_model_with_extras(args.model)
    if not extras or "tokens" not in extras:
        raise ConfigError(f"{args.model}: checkpoint lacks vocabulary extras; "
                          "train it through this toolkit")
    vocab = textenc.Vocabulary({t: i for i, t in enumerate(extras["tokens"])},
                               list(extras["tokens"]))
    avocab = datasets.AnswerVocab({a: i for i, a in enumerate(extras["answers"])},
                                  list(extras["answers"]))
    features = corpus.load_features(args.features)
    with open(args.data, "r", encoding="utf-8") as fh:
        head = fh.readline()
    if head.startswith("mtvqa-multitask"):
        if model.n_heads == 1:
            raise ConfigError("single-head model cannot evaluate combined data; "
                              "pass a single.tsv file")
        examples, _ = corpus.io.read_multitask(args.data)
        enc = datasets.encode_multitask(examples, model.config.tasks, vocab, avocab,
                                        model.config.max_len, features)
    elif head.startswith("mtvqa-single"):
        if model.n_heads != 1:
            raise ConfigError("multi-head model expects combined data; "
                              "pass a multitask.tsv file")
        singles = corpus.io.read_single(args.data)
        enc = datasets.encode_single(singles, model.config.tasks, vocab, avocab,
                                     model.config.max_len, features)
    else:
        raise ConfigError(f"{args.data}: not a reformatted dataset file")
    report = harness.evaluate(model, enc)
    for t in enc.tasks:
        acc = report.accuracy(t)
        shown = "-" if acc is None else f"{reports.round_half_up(acc):.1f}"
        print(f"{t.value}: {shown} ({report.counts[t]} slots)")
    total = report.total_accuracy
    print(f"total: {'-' if total is None else f'{reports.round_half_up(total):.1f}'}")
    if args.out:
        rows = ["type,accuracy,count"]
        for t in enc.tasks:
            acc = report.accuracy(t)
            rows.append(f"{t.value},{'' if acc is None else repr(acc)},{report.counts[t]}")
        rows.append(f"total,{'' if total is None else repr(total)},{sum(report.counts.values())}")
        Path(args.out).write_text("\n".join(rows) + "\n", encoding="utf-8")
    return 0


def _cmd_experiment(args):
    seeds = tuple(int(s) for s in args.seeds.split(",")) if "," in args.seeds \
        else tuple(range(args.seed, args.seed + int(args.seeds)))
    if args.train_data and args.test_data and args.features:
        bundle = _bundle_from_files(args.train_data, args.test_data, args.features)
        source = {"train_data": args.train_data, "test_data": args.test_data}
    else:
        bundle = harness.synthetic_bundle(args.synth_images, args.synth_test,
                                          noise_std=args.noise_std, seed=args.seed)
        source = {"synthetic": {"train_images": args.synth_images,
                                "test_images": args.synth_test,
                                "noise_std": args.noise_std, "seed": args.seed}}
    overrides = _model_overrides(args)
    model_cfg = harness.model_config_for_bundle(bundle, **overrides)
    train_cfg = _train_config(args)
    report = harness.run_experiment(args.kind, bundle, model_cfg, train_cfg, seeds)
    manifest_extra = {"source": source,
                      "train_config": dataclasses.asdict(train_cfg),
                      "model_config": model_cfg.to_dict()}
    path = reports.write_experiment_reports(args.out, report, manifest_extra)
    print(f"report: {path}")
    for label, per_type, total in report.rows:
        shown = "-" if total is None else f"{reports.round_half_up(total):.1f}"
        print(f"{label}: total {shown}")
    return 0


def _cmd_report(args):
    payload = json.loads(Path(args.history).read_text(encoding="utf-8"))
    history = harness.TrainHistory.from_dict(payload)
    if not history.records:
        raise ConfigError(f"{args.history}: empty training history")
    series = {"train loss": [r.train_loss for r in history.records],
              "validation loss": [r.val_loss for r in history.records]}
    reports.svg_line_plot(series, args.out, title="loss per epoch")
    print(f"plot: {args.out}")
    accs = [r.val_accuracy for r in history.records]
    if any(a is not None for a in accs):
        acc_path = Path(args.out).with_name(Path(args.out).stem + "_accuracy.svg")
        reports.svg_line_plot({"validation accuracy":
                               [a for a in accs if a is not None]},
                              acc_path, title="validation accuracy per epoch")
        print(f"plot: {acc_path}")
    return 0


# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="mtvqa",
        description="Reformat question corpora into a combined multi-question "
                    "format and train/evaluate the comparison networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_seed(p):
        p.add_argument("--seed", type=int, default=_env_seed(),
                       help="seed (default: MTVQA_SEED env var or 0)")

    p = sub.add_parser("ingest", help="parse a raw corpus and label question types")
    p.add_argument("--format", choices=("daquar", "cocoqa"), required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--keywords", help="keyword config file (priority order)")
    add_seed(p)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("synth", help="generate a seeded synthetic corpus")
    p.add_argument("--images", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--noise-std", type=float, default=0.0)
    p.add_argument("--grid-size", type=int, default=2)
    p.add_argument("--max-count", type=int, default=3)
    p.add_argument("--binary-features", action="store_true")
    add_seed(p)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("reformat", help="emit combined, single and isolated datasets")
    p.add_argument("--labeled", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--tasks", help="comma-separated task subset (default: present types)")
    p.set_defaults(func=_cmd_reformat)

    p = sub.add_parser("stats", help="print statistics of a combined dataset")
    p.add_argument("--data", required=True)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("train", help="train one model variant")
    p.add_argument("--data", required=True, help="multitask.tsv")
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True, help="checkpoint path")
    p.add_argument("--variant", choices=models.VARIANTS, default="mtl_simple")
    p.add_argument("--embeddings", help="pretrained embedding text file")
    p.add_argument("--history", help="write training history JSON here")
    p.add_argument("--text-checkpoint", action="store_true")
    p.add_argument("--set", action="append", metavar="KEY=VAL",
                   help="TrainConfig override")
    p.add_argument("--model-set", action="append", metavar="KEY=VAL",
                   help="ModelConfig override")
    add_seed(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on a dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out", help="write a CSV report here")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("experiment", help="run one of the comparison protocols")
    p.add_argument("--kind", choices=harness.EXPERIMENT_KINDS, required=True)
    p.add_argument("--out", required=True, help="report directory")
    p.add_argument("--seeds", default="3",
                   help="count (N consecutive from --seed) or explicit list 0,1,2")
    p.add_argument("--synth-images", type=int, default=1000)
    p.add_argument("--synth-test", type=int, default=300)
    p.add_argument("--noise-std", type=float, default=0.25)
    p.add_argument("--train-data", help="combined train file (real-data route)")
    p.add_argument("--test-data", help="combined test file (real-data route)")
    p.add_argument("--features", help="feature file (real-data route)")
    p.add_argument("--set", action="append", metavar="KEY=VAL")
    p.add_argument("--model-set", action="append", metavar="KEY=VAL")
    add_seed(p)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("report", help="render loss curves from a history file")
    p.add_argument("--history", required=True)
    p.add_argument("--out", required=True, help="output SVG path")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MtvqaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

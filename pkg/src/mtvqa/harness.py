"""Two-phase training, masked evaluation, the four experiments, and
seeded random hyperparameter search."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad
from .autodiff.optim import Nadam, SgdMomentum
from .corpus.reformat import (
    flatten_single_task,
    group_by_image,
    isolate_slots,
    reformat_multitask,
)
from .corpus.synthetic import SyntheticSceneConfig, gen_synthetic_corpus
from .datasets import (
    answers_of_multitask,
    build_answer_vocab,
    encode_multitask,
    encode_single,
)
from .errors import ConfigError, TrainingError
from .models import ModelConfig, build_model
from .textenc import build_vocab, random_embeddings

EXPERIMENT_KINDS = ("mtl_vs_stl", "architecture_control", "shared_info_control",
                    "vqateam_compare")


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 64
    max_epochs_nadam: int = 200
    max_epochs_sgd: int = 50
    patience: int = 10
    min_delta: float = 1e-4
    nadam_lr: float = 1e-3
    nadam_beta1: float = 0.9
    nadam_beta2: float = 0.999
    nadam_eps: float = 1e-8
    sgd_lr: float = 1e-4
    sgd_momentum: float = 0.9
    val_fraction: float = 0.1
    seed: int = 0
    keep: str = "best"  # "best": best-validation parameters; "last": final state
    select_metric: str = "loss"  # which validation metric picks the kept checkpoint

    def validate(self):
        if self.patience < 1:
            raise ConfigError("patience must be >= 1")
        if not (0.0 < self.val_fraction < 1.0):
            raise ConfigError("val_fraction must be in (0, 1)")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        if self.max_epochs_nadam < 0 or self.max_epochs_sgd < 0:
            raise ConfigError("epoch caps must be >= 0")
        if self.keep not in ("best", "last"):
            raise ConfigError("keep must be 'best' or 'last'")
        if self.select_metric not in ("loss", "accuracy"):
            raise ConfigError("select_metric must be 'loss' or 'accuracy'")


@dataclass
class EpochRecord:
    epoch: int
    phase: str
    train_loss: float
    val_loss: float
    val_accuracy: float | None = None


@dataclass
class TrainHistory:
    records: list = field(default_factory=list)
    convergence_epoch: dict = field(default_factory=dict)
    best_epoch: int | None = None
    best_val_loss: float | None = None
    phase_transition_epoch: int | None = None

    def to_dict(self):
        return {
            "records": [dataclasses.asdict(r) for r in self.records],
            "convergence_epoch": self.convergence_epoch,
            "best_epoch": self.best_epoch,
            "best_val_loss": self.best_val_loss,
            "phase_transition_epoch": self.phase_transition_epoch,
        }

    @staticmethod
    def from_dict(d):
        hist = TrainHistory()
        hist.records = [EpochRecord(**r) for r in d["records"]]
        hist.convergence_epoch = dict(d["convergence_epoch"])
        hist.best_epoch = d["best_epoch"]
        hist.best_val_loss = d["best_val_loss"]
        hist.phase_transition_epoch = d["phase_transition_epoch"]
        return hist


def _image_level_split(image_ids, val_fraction, rng):
    """Validation rows chosen by image so one image never straddles the split."""
    uniq = sorted(set(image_ids))
    if len(uniq) < 2:
        return np.arange(len(image_ids)), np.arange(0)
    perm = rng.permutation(len(uniq))
    n_val = min(max(1, int(round(val_fraction * len(uniq)))), len(uniq) - 1)
    val_images = {uniq[int(i)] for i in perm[:n_val]}
    flags = np.array([im in val_images for im in image_ids])
    return np.nonzero(~flags)[0], np.nonzero(flags)[0]


def _snapshot(model):
    return {n: p.data.copy() for n, p in model.params.items()}


def _restore(model, snap):
    for n, p in model.params.items():
        p.data[...] = snap[n]


def _mean_loss(model, data, indices, batch_size):
    total = 0.0
    for lo in range(0, len(indices), batch_size):
        sel = indices[lo:lo + batch_size]
        loss, _ = model.loss(data.images[sel], data.ids[sel],
                             data.targets[sel], data.mask[sel])
        total += float(loss.data)
    return total / len(indices)


def _subset_accuracy(model, data, indices, batch_size):
    correct = 0
    count = 0
    for lo in range(0, len(indices), batch_size):
        sel = indices[lo:lo + batch_size]
        preds = model.predict(data.images[sel], data.ids[sel])
        m = data.mask[sel]
        correct += int(((preds == data.targets[sel]) & m).sum())
        count += int(m.sum())
    return None if count == 0 else 100.0 * correct / count


def train(model, data, cfg):
    """Nadam until the patience criterion fires, then SGD with momentum.

    Returns (model, history).  With keep="best" (default) the model ends up
    holding the parameters of the best validation epoch seen in either
    phase, where "best" follows cfg.select_metric; with keep="last" it
    holds the final state of the run.
    """
    cfg.validate()
    if len(data) == 0:
        raise ConfigError("training data is empty")
    history = TrainHistory()
    if cfg.max_epochs_nadam == 0 and cfg.max_epochs_sgd == 0:
        return model, history

    rng = np.random.default_rng(cfg.seed)
    train_idx, val_idx = _image_level_split(data.image_ids, cfg.val_fraction, rng)
    if len(train_idx) == 0:
        train_idx = val_idx
    params = model.trainable_params()
    best = _snapshot(model)
    best_val = np.inf
    best_acc = -np.inf
    best_epoch = None
    epoch = 0

    def run_phase(phase, optimizer, max_epochs):
        nonlocal epoch, best, best_val, best_acc, best_epoch
        if max_epochs == 0:
            return
        phase_best = np.inf
        phase_best_epoch = None
        bad = 0
        for _ in range(max_epochs):
            epoch += 1
            order = train_idx[rng.permutation(len(train_idx))]
            total = 0.0
            for bi, lo in enumerate(range(0, len(order), cfg.batch_size)):
                sel = order[lo:lo + cfg.batch_size]
                ad.zero_grads(params)
                loss, _ = model.loss(data.images[sel], data.ids[sel],
                                     data.targets[sel], data.mask[sel])
                if not np.isfinite(loss.data):
                    raise TrainingError(f"non-finite loss at epoch {epoch}, batch {bi}")
                ad.scale(loss, 1.0 / len(sel)).backward()
                optimizer.step()
                total += float(loss.data)
            train_loss = total / len(order)
            have_val = len(val_idx) > 0
            val_loss = (_mean_loss(model, data, val_idx, cfg.batch_size)
                        if have_val else train_loss)
            val_acc = (_subset_accuracy(model, data, val_idx, cfg.batch_size)
                       if have_val else None)
            if not np.isfinite(val_loss):
                raise TrainingError(f"non-finite validation loss at epoch {epoch}")
            history.records.append(EpochRecord(epoch=epoch, phase=phase,
                                               train_loss=train_loss, val_loss=val_loss,
                                               val_accuracy=val_acc))
            if cfg.select_metric == "accuracy" and val_acc is not None:
                improved = val_acc > best_acc
            else:
                improved = val_loss < best_val
            if improved:
                best_epoch = epoch
                best = _snapshot(model)
            best_val = min(best_val, val_loss)
            if val_acc is not None:
                best_acc = max(best_acc, val_acc)
            if val_loss < phase_best - cfg.min_delta:
                phase_best = val_loss
                phase_best_epoch = epoch
                bad = 0
            else:
                bad += 1
                if bad >= cfg.patience:
                    break
        history.convergence_epoch[phase] = phase_best_epoch

    run_phase("nadam", Nadam(params, lr=cfg.nadam_lr, beta1=cfg.nadam_beta1,
                             beta2=cfg.nadam_beta2, eps=cfg.nadam_eps),
              cfg.max_epochs_nadam)
    if cfg.keep == "best":
        _restore(model, best)
    if cfg.max_epochs_sgd > 0:
        history.phase_transition_epoch = epoch + 1
        run_phase("sgd", SgdMomentum(params, lr=cfg.sgd_lr, momentum=cfg.sgd_momentum),
                  cfg.max_epochs_sgd)
        if cfg.keep == "best":
            _restore(model, best)
    history.best_epoch = best_epoch
    history.best_val_loss = None if best_epoch is None else float(best_val)
    return model, history


# ---------------------------------------------------------------------------
# evaluation

@dataclass
class EvalReport:
    """Per-type and total accuracy over unmasked slots only."""
    tasks: tuple
    correct: dict
    counts: dict

    def accuracy(self, qtype):
        n = self.counts.get(qtype, 0)
        if n == 0:
            return None
        return 100.0 * self.correct[qtype] / n

    @property
    def total_accuracy(self):
        n = sum(self.counts.values())
        if n == 0:
            return None
        return 100.0 * sum(self.correct.values()) / n

    def per_type(self):
        return {t.value: self.accuracy(t) for t in self.tasks}

    def as_dict(self):
        d = self.per_type()
        d["total"] = self.total_accuracy
        return d


def predictions(model, data, batch_size=256):
    """(n, heads) argmax answer ids."""
    outs = []
    for lo in range(0, len(data), batch_size):
        sel = np.arange(lo, min(lo + batch_size, len(data)))
        outs.append(model.predict(data.images[sel], data.ids[sel]))
    return np.concatenate(outs, axis=0) if outs else np.zeros((0, model.n_heads), dtype=np.int64)


def prediction_logits(model, data, batch_size=256):
    """(n, heads, answers) raw logits, for exact-invariance checks."""
    outs = []
    for lo in range(0, len(data), batch_size):
        sel = np.arange(lo, min(lo + batch_size, len(data)))
        outs.append(model.logits_array(data.images[sel], data.ids[sel]))
    return np.concatenate(outs, axis=0)


def evaluate(model, data, batch_size=256):
    """Masked slots are excluded from numerator and denominator alike."""
    correct = {t: 0 for t in data.tasks}
    counts = {t: 0 for t in data.tasks}
    preds = predictions(model, data, batch_size)
    ok = preds == data.targets
    for k, t in enumerate(data.tasks):
        cells = (data.qtypes == k) & data.mask
        counts[t] += int(cells.sum())
        correct[t] += int((ok & cells).sum())
    return EvalReport(tasks=data.tasks, correct=correct, counts=counts)


# ---------------------------------------------------------------------------
# corpus bundles (everything an experiment needs, already reformatted)

@dataclass
class CorpusBundle:
    tasks: tuple
    train_combined: list
    test_combined: list
    features: "FeatureStore"
    vocab: "Vocabulary"
    answer_vocab: "AnswerVocab"
    max_len: int

    def encode_combined(self, examples):
        return encode_multitask(examples, self.tasks, self.vocab, self.answer_vocab,
                                self.max_len, self.features)

    def encode_singles(self, singles):
        return encode_single(singles, self.tasks, self.vocab, self.answer_vocab,
                             self.max_len, self.features)


def bundle_from_examples(train_combined, test_combined, features, tasks, max_len=None):
    """Build vocabularies from the training half only."""
    train_tokens = [tokens for ex in train_combined for _, (tokens, _) in ex.slots]
    vocab = build_vocab(train_tokens)
    answer_vocab = build_answer_vocab(answers_of_multitask(train_combined))
    if max_len is None:
        lengths = [len(t) for ex in train_combined + test_combined
                   for _, (t, _) in ex.slots]
        max_len = min(25, max(lengths)) if lengths else 25
    return CorpusBundle(tasks=tuple(tasks), train_combined=train_combined,
                        test_combined=test_combined, features=features,
                        vocab=vocab, answer_vocab=answer_vocab, max_len=max_len)


def synthetic_bundle(train_images, test_images, noise_std=0.0, seed=0, tasks=None,
                     scene=None):
    """Generate one seeded corpus and split it by image into train and test."""
    cfg = scene or SyntheticSceneConfig(num_images=train_images + test_images,
                                        noise_std=noise_std, seed=seed)
    questions, features = gen_synthetic_corpus(cfg)
    split_at = f"img{train_images:05d}"
    train_qs = [q for q in questions if q.image_id < split_at]
    test_qs = [q for q in questions if q.image_id >= split_at]
    if tasks is None:
        tasks = tuple(sorted({q.qtype for q in questions}, key=lambda t: t.value))
    train_combined = reformat_multitask(group_by_image(train_qs), tasks)
    test_combined = reformat_multitask(group_by_image(test_qs), tasks)
    return bundle_from_examples(train_combined, test_combined, features, tasks)


def model_config_for_bundle(bundle, **overrides):
    base = dict(tasks=bundle.tasks, n_answers=len(bundle.answer_vocab),
                vocab_size=len(bundle.vocab), feature_dim=bundle.features.feature_dim,
                max_len=bundle.max_len)
    base.update(overrides)
    cfg = ModelConfig(**base)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# experiments

@dataclass
class ExperimentReport:
    kind: str
    tasks: tuple  # type value strings
    rows: list    # (label, {type value: mean accuracy or None}, total or None)
    per_seed: dict
    convergence: dict
    seeds: tuple


def _mean(values):
    vals = [v for v in values if v is not None]
    if len(vals) != len(values) or not vals:
        return None
    return float(np.mean(vals))


def _mean_report_rows(label, reports, tasks):
    per_type = {}
    for t in tasks:
        per_type[t.value] = _mean([r.accuracy(t) for r in reports])
    total = _mean([r.total_accuracy for r in reports])
    return (label, per_type, total)


def _difference_row(label, row_a, row_b):
    per_type = {}
    for k in row_a[1]:
        a, b = row_a[1][k], row_b[1][k]
        per_type[k] = None if a is None or b is None else a - b
    total = (None if row_a[2] is None or row_b[2] is None else row_a[2] - row_b[2])
    return (label, per_type, total)


def _train_eval(variant, bundle, model_cfg, train_cfg, seed, enc_train, enc_evals):
    emb = random_embeddings(bundle.vocab, model_cfg.embed_dim, seed=seed)
    model = build_model(variant, model_cfg, emb, seed=seed)
    cfg = dataclasses.replace(train_cfg, seed=seed)
    model, history = train(model, enc_train, cfg)
    return [evaluate(model, enc) for enc in enc_evals], history


def run_experiment(kind, bundle, model_cfg, train_cfg, seeds=(0, 1, 2)):
    """Run one of the four experiment protocols over several seeds.

    The bundle's combined train/test sets are reformatted further as the
    kind requires (flattened singles, isolated slots, or split testing).
    """
    if kind not in EXPERIMENT_KINDS:
        raise ConfigError(f"unknown experiment kind {kind!r}")
    seeds = tuple(int(s) for s in seeds)
    tasks = bundle.tasks
    per_seed = {}
    convergence = {}

    def record(label, report, history=None):
        per_seed.setdefault(label, []).append(report.as_dict())
        if history is not None:
            epoch = history.convergence_epoch.get("nadam")
            convergence.setdefault(label, []).append(epoch)

    if kind in ("mtl_vs_stl", "vqateam_compare"):
        mtl_variant = "mtl_simple" if kind == "mtl_vs_stl" else "vqateam_mtl"
        stl_variant = "stl_simple" if kind == "mtl_vs_stl" else "vqateam_stl"
        enc_train_mtl = bundle.encode_combined(bundle.train_combined)
        enc_test_mtl = bundle.encode_combined(bundle.test_combined)
        enc_train_stl = bundle.encode_singles(flatten_single_task(bundle.train_combined))
        enc_test_stl = bundle.encode_singles(flatten_single_task(bundle.test_combined))
        mtl_reports, stl_reports = [], []
        for seed in seeds:
            (rep,), hist = _train_eval(mtl_variant, bundle, model_cfg, train_cfg,
                                       seed, enc_train_mtl, [enc_test_mtl])
            mtl_reports.append(rep)
            record("MTL", rep, hist)
            (rep,), hist = _train_eval(stl_variant, bundle, model_cfg, train_cfg,
                                       seed, enc_train_stl, [enc_test_stl])
            stl_reports.append(rep)
            record("STL", rep, hist)
        row_m = _mean_report_rows("MTL", mtl_reports, tasks)
        row_s = _mean_report_rows("STL", stl_reports, tasks)
        rows = [row_m, row_s, _difference_row("Difference", row_m, row_s)]

    elif kind == "architecture_control":
        enc_train_iso = bundle.encode_combined(isolate_slots(bundle.train_combined))
        enc_test_iso = bundle.encode_combined(isolate_slots(bundle.test_combined))
        enc_train_stl = bundle.encode_singles(flatten_single_task(bundle.train_combined))
        enc_test_stl = bundle.encode_singles(flatten_single_task(bundle.test_combined))
        mtl_reports, stl_reports = [], []
        for seed in seeds:
            (rep,), hist = _train_eval("mtl_simple", bundle, model_cfg, train_cfg,
                                       seed, enc_train_iso, [enc_test_iso])
            mtl_reports.append(rep)
            record("STL-data MTL", rep, hist)
            (rep,), hist = _train_eval("stl_simple", bundle, model_cfg, train_cfg,
                                       seed, enc_train_stl, [enc_test_stl])
            stl_reports.append(rep)
            record("STL-data STL", rep, hist)
        row_m = _mean_report_rows("STL-data MTL", mtl_reports, tasks)
        row_s = _mean_report_rows("STL-data STL", stl_reports, tasks)
        rows = [row_m, row_s, _difference_row("Difference", row_m, row_s)]

    elif kind == "shared_info_control":
        enc_train_mtl = bundle.encode_combined(bundle.train_combined)
        enc_test_comb = bundle.encode_combined(bundle.test_combined)
        enc_test_split = bundle.encode_combined(isolate_slots(bundle.test_combined))
        comb_reports, split_reports = [], []
        for seed in seeds:
            (rep_c, rep_s), hist = _train_eval("mtl_simple", bundle, model_cfg, train_cfg,
                                               seed, enc_train_mtl,
                                               [enc_test_comb, enc_test_split])
            comb_reports.append(rep_c)
            split_reports.append(rep_s)
            record("Combined test", rep_c, hist)
            record("Split test", rep_s)
        row_c = _mean_report_rows("Combined test", comb_reports, tasks)
        row_s = _mean_report_rows("Split test", split_reports, tasks)
        rows = [row_c, row_s, _difference_row("Delta", row_c, row_s)]

    return ExperimentReport(kind=kind, tasks=tuple(t.value for t in tasks), rows=rows,
                            per_seed=per_seed, convergence=convergence, seeds=seeds)


# ---------------------------------------------------------------------------
# hyperparameter search

_SAMPLERS = {
    "log": lambda rng, lo, hi: float(np.exp(rng.uniform(np.log(lo), np.log(hi)))),
    "uniform": lambda rng, lo, hi: float(rng.uniform(lo, hi)),
    "int": lambda rng, lo, hi: int(rng.integers(lo, hi + 1)),
}


def sample_config(space, base_cfg, rng):
    """One TrainConfig drawn from `space` (field -> sampling rule)."""
    overrides = {}
    for name in sorted(space):
        rule = space[name]
        if rule[0] == "choice":
            overrides[name] = rule[1][int(rng.integers(0, len(rule[1])))]
        elif rule[0] in _SAMPLERS:
            overrides[name] = _SAMPLERS[rule[0]](rng, rule[1], rule[2])
        else:
            raise ConfigError(f"unknown sampling rule {rule[0]!r} for {name}")
    return dataclasses.replace(base_cfg, **overrides)


def search_hyperparams(space, budget, seed, bundle, model_cfg, base_train_cfg,
                       variant="mtl_simple", holdout_fraction=0.2):
    """Seeded random search ranked by held-out accuracy.

    The holdout is split from the bundle's training images, so the test set
    never influences the choice.  Returns (best TrainConfig, trials log).
    """
    if budget < 1:
        raise ConfigError("budget must be >= 1")
    rng = np.random.default_rng(seed)
    split_rng = np.random.default_rng(seed + 1)
    images = sorted({ex.image_id for ex in bundle.train_combined})
    perm = split_rng.permutation(len(images))
    n_hold = min(max(1, int(round(holdout_fraction * len(images)))), len(images) - 1)
    holdout_images = {images[int(i)] for i in perm[:n_hold]}
    sub_train = [ex for ex in bundle.train_combined if ex.image_id not in holdout_images]
    holdout = [ex for ex in bundle.train_combined if ex.image_id in holdout_images]
    enc_train = bundle.encode_combined(sub_train)
    enc_hold = bundle.encode_combined(holdout)

    trials = []
    best = None
    for trial in range(budget):
        cfg = sample_config(space, base_train_cfg, rng)
        emb = random_embeddings(bundle.vocab, model_cfg.embed_dim, seed=seed)
        model = build_model(variant, model_cfg, emb, seed=seed)
        model, _ = train(model, enc_train, cfg)
        acc = evaluate(model, enc_hold).total_accuracy
        acc = -1.0 if acc is None else acc
        trials.append({"trial": trial, "config": dataclasses.asdict(cfg),
                       "val_accuracy": acc})
        if best is None or acc > best[0]:
            best = (acc, cfg)
    return best[1], trials

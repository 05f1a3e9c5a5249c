"""The four network variants over the differentiation engine.

* mtl_simple: per-type question inputs through a convolutional sentence
  encoder, a linearly compressed image vector, one shared tanh hidden
  layer, and one softmax head per type over the shared answer vocabulary.
* stl_simple: the same network with a single question input and head; the
  hidden width is unchanged, so only the input/output connections differ.
* vqateam_stl: deep LSTM question encoding and image features each pass a
  tanh projection to a common width, are multiplied elementwise, and feed
  a deep tanh classifier.
* vqateam_mtl: one shared LSTM applied per question type; each product
  vector is concatenated before the shared classifier trunk and per-type
  heads.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .autodiff.checkpoint import load_checkpoint, save_checkpoint
from .corpus.qtypes import QuestionType, parse_qtype
from .errors import ConfigError, FormatError, ShapeError
from .textenc import EmbeddingTable

VARIANTS = ("mtl_simple", "stl_simple", "vqateam_stl", "vqateam_mtl")


@dataclass(frozen=True)
class ModelConfig:
    tasks: tuple
    n_answers: int
    vocab_size: int
    feature_dim: int
    embed_dim: int = 50
    max_len: int = 25
    filter_widths: tuple = (1, 2, 3)
    filters_per_width: int = 32
    hidden_dim: int = 128
    img_compress_dim: int = 64
    lstm_dim: int = 64
    lstm_depth: int = 2
    common_dim: int = 64
    classifier_dims: tuple = (128,)
    shared_question_encoder: bool = True

    def validate(self):
        if not self.tasks:
            raise ConfigError("tasks must be non-empty")
        if self.n_answers < 1:
            raise ConfigError("answer vocabulary must be non-empty")
        if not self.filter_widths:
            raise ConfigError("filter_widths must be non-empty")
        positive = ("vocab_size", "feature_dim", "embed_dim", "max_len",
                    "filters_per_width", "hidden_dim", "img_compress_dim",
                    "lstm_dim", "lstm_depth", "common_dim")
        for fname in positive:
            if getattr(self, fname) < 1:
                raise ConfigError(f"{fname} must be positive")
        if any(w < 1 for w in self.filter_widths):
            raise ConfigError("filter widths must be positive")
        if max(self.filter_widths) > self.max_len:
            raise ConfigError("filter width exceeds max question length")

    @property
    def question_feat_dim(self):
        return len(self.filter_widths) * self.filters_per_width

    def to_dict(self):
        d = dataclasses.asdict(self)
        d["tasks"] = [t.value for t in self.tasks]
        d["filter_widths"] = list(self.filter_widths)
        d["classifier_dims"] = list(self.classifier_dims)
        return d

    @staticmethod
    def from_dict(d):
        d = dict(d)
        d["tasks"] = tuple(parse_qtype(t) for t in d["tasks"])
        d["filter_widths"] = tuple(d["filter_widths"])
        d["classifier_dims"] = tuple(d["classifier_dims"])
        return ModelConfig(**d)


def _xavier(rng, shape, fan_in, fan_out):
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=shape)


class Model:
    """Named parameters plus a forward-graph builder for one variant."""

    def __init__(self, variant, config, params, embed_trainable):
        self.variant = variant
        self.config = config
        self.params = params
        self.embed_trainable = embed_trainable

    @property
    def n_heads(self):
        return len(self.config.tasks) if self.variant in ("mtl_simple", "vqateam_mtl") else 1

    @property
    def head_names(self):
        if self.n_heads == 1:
            return ("single",)
        return tuple(t.value for t in self.config.tasks)

    def trainable_params(self):
        out = []
        for p in self.params.values():
            if p.name == "embedding" and not self.embed_trainable:
                continue
            out.append(p)
        return out

    def forward(self, images, ids):
        """images: (batch, feature_dim); ids: (batch, n_heads, max_len).

        Returns one logits tensor of shape (batch, n_answers) per head.
        """
        images = np.asarray(images, dtype=np.float64)
        ids = np.asarray(ids, dtype=np.int64)
        if images.ndim != 2 or images.shape[1] != self.config.feature_dim:
            raise ShapeError(
                f"forward: image features must be (batch, {self.config.feature_dim})")
        if ids.ndim != 3 or ids.shape[1] != self.n_heads or ids.shape[2] != self.config.max_len:
            raise ShapeError(
                f"forward: ids must be (batch, {self.n_heads}, {self.config.max_len})")
        if self.variant in ("mtl_simple", "stl_simple"):
            return self._forward_simple(images, ids)
        return self._forward_vqateam(images, ids)

    def encode_question_conv(self, ids2d, slot_tag):
        cfg = self.config
        seq = ad.embedding(self.params["embedding"], ids2d)
        pooled = []
        for w in cfg.filter_widths:
            key = slot_tag if not cfg.shared_question_encoder else "shared"
            conv = ad.conv1d(seq, self.params[f"conv.{key}.w{w}.W"],
                             self.params[f"conv.{key}.w{w}.b"])
            pooled.append(ad.max_over_time(ad.tanh(conv)))
        return ad.concat(pooled)

    def _forward_simple(self, images, ids):
        img = ad.affine(ad.constant(images), self.params["img.W"], self.params["img.b"])
        feats = [img]
        for h, name in enumerate(self.head_names):
            feats.append(self.encode_question_conv(ids[:, h, :], name))
        hidden = ad.tanh(ad.affine(ad.concat(feats), self.params["hidden.W"],
                                   self.params["hidden.b"]))
        return [ad.affine(hidden, self.params[f"head.{name}.W"], self.params[f"head.{name}.b"])
                for name in self.head_names]

    def _question_lstm(self, ids2d):
        cfg = self.config
        seq = ad.embedding(self.params["embedding"], ids2d)
        layers = [(self.params[f"lstm.l{li}.Wx"], self.params[f"lstm.l{li}.Wh"],
                   self.params[f"lstm.l{li}.b"]) for li in range(cfg.lstm_depth)]
        h_top = ad.lstm_sequence(seq, layers)
        return ad.tanh(ad.affine(h_top, self.params["qproj.W"], self.params["qproj.b"]))

    def _forward_vqateam(self, images, ids):
        v = ad.tanh(ad.affine(ad.constant(images), self.params["iproj.W"], self.params["iproj.b"]))
        products = [ad.mul(self._question_lstm(ids[:, h, :]), v) for h in range(self.n_heads)]
        x = products[0] if len(products) == 1 else ad.concat(products)
        for i in range(len(self.config.classifier_dims)):
            x = ad.tanh(ad.affine(x, self.params[f"clf.{i}.W"], self.params[f"clf.{i}.b"]))
        return [ad.affine(x, self.params[f"head.{name}.W"], self.params[f"head.{name}.b"])
                for name in self.head_names]

    def loss(self, images, ids, targets, mask):
        """Summed masked cross entropy over all heads (no batch averaging)."""
        logits = self.forward(images, ids)
        return multitask_loss(logits, targets, mask), logits

    def predict(self, images, ids):
        """Argmax answer id per head: (batch, n_heads) ints."""
        logits = self.forward(images, ids)
        return np.stack([np.argmax(lg.data, axis=1) for lg in logits], axis=1)

    def logits_array(self, images, ids):
        logits = self.forward(images, ids)
        return np.stack([lg.data for lg in logits], axis=1)


def multitask_loss(logits, targets, mask):
    """Sum of masked softmax cross entropy across all answer heads.

    targets/mask: (batch, n_heads) arrays; column h belongs to head h.
    """
    targets = np.asarray(targets)
    mask = np.asarray(mask, dtype=bool)
    n_heads = len(logits)
    if targets.shape[1] != n_heads or mask.shape[1] != n_heads:
        raise ShapeError("multitask_loss: targets/mask columns must match head count")
    return ad.softmax_cross_entropy_masked(
        logits, [targets[:, h] for h in range(n_heads)], [mask[:, h] for h in range(n_heads)])


def build_model(variant, config, embedding, seed=0):
    """Construct a freshly initialized model.

    `embedding` is an EmbeddingTable whose row count matches
    config.vocab_size; its vectors are copied into the model parameters.
    """
    if variant not in VARIANTS:
        raise ConfigError(f"unknown model variant {variant!r}")
    config.validate()
    if variant in ("mtl_simple", "vqateam_mtl") and len(config.tasks) < 2:
        raise ConfigError(f"{variant} needs at least two tasks")
    if embedding.vectors.shape != (config.vocab_size, config.embed_dim):
        raise ShapeError(
            f"embedding table shape {embedding.vectors.shape} does not match config "
            f"({config.vocab_size}, {config.embed_dim})")

    rng = np.random.default_rng(seed)
    params = {}

    def add_param(name, data):
        params[name] = ad.parameter(data, name)

    emb = ad.parameter(embedding.vectors.copy(), "embedding")
    emb.data[0] = 0.0  # padding row pinned to zero
    mask = np.ones_like(emb.data, dtype=bool)
    mask[0] = False
    emb.grad_mask = mask
    params["embedding"] = emb

    cfg = config
    n_heads = len(cfg.tasks) if variant in ("mtl_simple", "vqateam_mtl") else 1
    head_names = tuple(t.value for t in cfg.tasks) if n_heads > 1 else ("single",)

    if variant in ("mtl_simple", "stl_simple"):
        add_param("img.W", _xavier(rng, (cfg.feature_dim, cfg.img_compress_dim),
                                   cfg.feature_dim, cfg.img_compress_dim))
        add_param("img.b", np.zeros(cfg.img_compress_dim))
        slot_tags = ("shared",) if cfg.shared_question_encoder else head_names
        for tag in slot_tags:
            for w in cfg.filter_widths:
                fan_in = w * cfg.embed_dim
                add_param(f"conv.{tag}.w{w}.W",
                          _xavier(rng, (w, cfg.embed_dim, cfg.filters_per_width),
                                  fan_in, cfg.filters_per_width))
                add_param(f"conv.{tag}.w{w}.b", np.zeros(cfg.filters_per_width))
        concat_dim = cfg.img_compress_dim + n_heads * cfg.question_feat_dim
        add_param("hidden.W", _xavier(rng, (concat_dim, cfg.hidden_dim),
                                      concat_dim, cfg.hidden_dim))
        add_param("hidden.b", np.zeros(cfg.hidden_dim))
        trunk_dim = cfg.hidden_dim
    else:
        for li in range(cfg.lstm_depth):
            in_dim = cfg.embed_dim if li == 0 else cfg.lstm_dim
            add_param(f"lstm.l{li}.Wx", _xavier(rng, (in_dim, 4 * cfg.lstm_dim),
                                                in_dim, cfg.lstm_dim))
            add_param(f"lstm.l{li}.Wh", _xavier(rng, (cfg.lstm_dim, 4 * cfg.lstm_dim),
                                                cfg.lstm_dim, cfg.lstm_dim))
            bias = np.zeros(4 * cfg.lstm_dim)
            bias[cfg.lstm_dim:2 * cfg.lstm_dim] = 1.0  # forget gate starts open
            add_param(f"lstm.l{li}.b", bias)
        add_param("qproj.W", _xavier(rng, (cfg.lstm_dim, cfg.common_dim),
                                     cfg.lstm_dim, cfg.common_dim))
        add_param("qproj.b", np.zeros(cfg.common_dim))
        add_param("iproj.W", _xavier(rng, (cfg.feature_dim, cfg.common_dim),
                                     cfg.feature_dim, cfg.common_dim))
        add_param("iproj.b", np.zeros(cfg.common_dim))
        trunk_dim = n_heads * cfg.common_dim
        for i, width in enumerate(cfg.classifier_dims):
            add_param(f"clf.{i}.W", _xavier(rng, (trunk_dim, width), trunk_dim, width))
            add_param(f"clf.{i}.b", np.zeros(width))
            trunk_dim = width

    for name in head_names:
        add_param(f"head.{name}.W", _xavier(rng, (trunk_dim, cfg.n_answers),
                                            trunk_dim, cfg.n_answers))
        add_param(f"head.{name}.b", np.zeros(cfg.n_answers))

    return Model(variant=variant, config=config, params=params,
                 embed_trainable=embedding.trainable)


def save_model(path, model, binary=True, extras=None):
    meta = {"variant": model.variant, "config": model.config.to_dict(),
            "embed_trainable": model.embed_trainable, "extras": extras}
    save_checkpoint(path, {n: p.data for n, p in model.params.items()},
                    config=meta, binary=binary)


def load_model(path):
    model, _ = load_model_with_extras(path)
    return model


def load_model_with_extras(path):
    raw, meta = load_checkpoint(path)
    if not meta or "variant" not in meta:
        raise FormatError(f"{path}: checkpoint lacks a model config echo")
    config = ModelConfig.from_dict(meta["config"])
    emb = EmbeddingTable(vectors=np.asarray(raw["embedding"], dtype=np.float64),
                         trainable=meta.get("embed_trainable", True))
    model = build_model(meta["variant"], config, emb, seed=0)
    for name, p in model.params.items():
        if name not in raw:
            raise FormatError(f"{path}: checkpoint is missing parameter {name}")
        arr = np.asarray(raw[name], dtype=np.float64)
        if arr.shape != p.data.shape:
            raise FormatError(
                f"{path}: parameter {name} has shape {arr.shape}, expected {p.data.shape}")
        p.data[...] = arr
    return model, meta.get("extras")

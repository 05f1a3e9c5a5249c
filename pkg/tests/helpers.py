"""Shared builders for gradient-check instances over operators and models."""

import numpy as np

from mtvqa import autodiff as ad
from mtvqa.corpus import QuestionType
from mtvqa.models import ModelConfig, build_model
from mtvqa.textenc import EmbeddingTable


def _proj(rng, tensor):
    """Project a tensor to a scalar with a fixed random weighting."""
    return ad.weighted_sum(tensor, rng.normal(size=tensor.data.shape))


def _p(rng, shape, name):
    return ad.parameter(rng.normal(size=shape), name)


def op_case_add(rng):
    a, b = _p(rng, (2, 3), "a"), _p(rng, (2, 3), "b")
    w = rng.normal(size=(2, 3))
    return lambda: ad.weighted_sum(ad.add(a, b), w), [a, b]


def op_case_mul(rng):
    a, b = _p(rng, (2, 3), "a"), _p(rng, (2, 3), "b")
    w = rng.normal(size=(2, 3))
    return lambda: ad.weighted_sum(ad.mul(a, b), w), [a, b]


def op_case_scale(rng):
    a = _p(rng, (2, 3), "a")
    c = float(rng.normal())
    w = rng.normal(size=(2, 3))
    return lambda: ad.weighted_sum(ad.scale(a, c), w), [a]


def op_case_tanh(rng):
    a = _p(rng, (2, 4), "a")
    w = rng.normal(size=(2, 4))
    return lambda: ad.weighted_sum(ad.tanh(a), w), [a]


def op_case_sigmoid(rng):
    a = _p(rng, (2, 4), "a")
    w = rng.normal(size=(2, 4))
    return lambda: ad.weighted_sum(ad.sigmoid(a), w), [a]


def op_case_matmul(rng):
    x, m = _p(rng, (2, 3), "x"), _p(rng, (3, 4), "m")
    w = rng.normal(size=(2, 4))
    return lambda: ad.weighted_sum(ad.matmul(x, m), w), [x, m]


def op_case_affine(rng):
    x, m, b = _p(rng, (2, 3), "x"), _p(rng, (3, 4), "m"), _p(rng, (4,), "b")
    w = rng.normal(size=(2, 4))
    return lambda: ad.weighted_sum(ad.affine(x, m, b), w), [x, m, b]


def op_case_conv1d(rng):
    width = int(rng.integers(1, 4))
    x, k, b = _p(rng, (2, 5, 3), "x"), _p(rng, (width, 3, 4), "k"), _p(rng, (4,), "b")
    w = rng.normal(size=(2, 5 - width + 1, 4))
    return lambda: ad.weighted_sum(ad.conv1d(x, k, b), w), [x, k, b]


def op_case_max_over_time(rng):
    x = _p(rng, (2, 4, 3), "x")
    w = rng.normal(size=(2, 3))
    return lambda: ad.weighted_sum(ad.max_over_time(x), w), [x]


def op_case_concat(rng):
    a, b, c = _p(rng, (2, 2), "a"), _p(rng, (2, 3), "b"), _p(rng, (2, 1), "c")
    w = rng.normal(size=(2, 6))
    return lambda: ad.weighted_sum(ad.concat([a, b, c]), w), [a, b, c]


def op_case_split_cols(rng):
    x = _p(rng, (2, 6), "x")
    w1, w2 = rng.normal(size=(2, 2)), rng.normal(size=(2, 4))

    def fn():
        lo, hi = ad.split_cols(x, [2, 4])
        return ad.add(ad.weighted_sum(lo, w1), ad.weighted_sum(hi, w2))

    return fn, [x]


def op_case_select_time(rng):
    x = _p(rng, (2, 4, 3), "x")
    t = int(rng.integers(0, 4))
    w = rng.normal(size=(2, 3))
    return lambda: ad.weighted_sum(ad.select_time(x, t), w), [x]


def op_case_embedding(rng):
    table = _p(rng, (5, 3), "table")
    ids = rng.integers(0, 5, size=(2, 4))
    w = rng.normal(size=(2, 4, 3))
    return lambda: ad.weighted_sum(ad.embedding(table, ids), w), [table]


def op_case_softmax_ce(rng):
    x, m, b = _p(rng, (3, 4), "x"), _p(rng, (4, 5), "m"), _p(rng, (5,), "b")
    targets = rng.integers(0, 5, size=3)
    mask = np.array([True, bool(rng.integers(0, 2)), True])

    def fn():
        logits = ad.affine(x, m, b)
        return ad.softmax_cross_entropy_masked([logits], [targets], [mask])

    return fn, [x, m, b]


def op_case_lstm_step(rng):
    hidden = 3
    x = _p(rng, (2, 2), "x")
    h0, c0 = _p(rng, (2, hidden), "h0"), _p(rng, (2, hidden), "c0")
    w_in = _p(rng, (2, 4 * hidden), "w_in")
    w_rec = _p(rng, (hidden, 4 * hidden), "w_rec")
    bias = _p(rng, (4 * hidden,), "bias")
    wh, wc = rng.normal(size=(2, hidden)), rng.normal(size=(2, hidden))

    def fn():
        h, c = ad.lstm_step(x, h0, c0, w_in, w_rec, bias)
        return ad.add(ad.weighted_sum(h, wh), ad.weighted_sum(c, wc))

    return fn, [x, h0, c0, w_in, w_rec, bias]


def op_case_lstm_sequence(rng):
    hidden = 3
    x = _p(rng, (2, 3, 2), "x")
    layers = [( _p(rng, (2, 4 * hidden), "l0.Wx"),
                _p(rng, (hidden, 4 * hidden), "l0.Wh"),
                _p(rng, (4 * hidden,), "l0.b")),
              ( _p(rng, (hidden, 4 * hidden), "l1.Wx"),
                _p(rng, (hidden, 4 * hidden), "l1.Wh"),
                _p(rng, (4 * hidden,), "l1.b"))]
    w = rng.normal(size=(2, hidden))
    params = [x] + [t for layer in layers for t in layer]
    return lambda: ad.weighted_sum(ad.lstm_sequence(x, layers), w), params


OP_CASES = {
    "add": op_case_add,
    "mul": op_case_mul,
    "scale": op_case_scale,
    "tanh": op_case_tanh,
    "sigmoid": op_case_sigmoid,
    "matmul": op_case_matmul,
    "affine": op_case_affine,
    "conv1d": op_case_conv1d,
    "max_over_time": op_case_max_over_time,
    "concat": op_case_concat,
    "split_cols": op_case_split_cols,
    "select_time": op_case_select_time,
    "embedding": op_case_embedding,
    "softmax_cross_entropy_masked": op_case_softmax_ce,
    "lstm_step": op_case_lstm_step,
    "lstm_sequence": op_case_lstm_sequence,
}


TINY_TASKS = (QuestionType.COLOUR, QuestionType.COUNT,
              QuestionType.POSITION, QuestionType.SIZE)


def tiny_model_config(**overrides):
    base = dict(tasks=TINY_TASKS, n_answers=3, vocab_size=7, feature_dim=5,
                embed_dim=3, max_len=4, filter_widths=(1, 2), filters_per_width=2,
                hidden_dim=5, img_compress_dim=3, lstm_dim=3, lstm_depth=2,
                common_dim=3, classifier_dims=(4,))
    base.update(overrides)
    return ModelConfig(**base)


def tiny_model(variant, seed=0, emb_scale=0.1, **overrides):
    cfg = tiny_model_config(**overrides)
    rng = np.random.default_rng(seed + 1)
    table = rng.uniform(-emb_scale, emb_scale, size=(cfg.vocab_size, cfg.embed_dim))
    table[0] = 0.0
    emb = EmbeddingTable(vectors=table, trainable=True)
    return build_model(variant, cfg, emb, seed=seed)


def model_loss_case(variant, rng, batch=2):
    """A (fn, params) pair computing the training loss of a tiny model.

    Instances are kept well conditioned for finite differences: questions
    use real token ids (padding behaviour has its own exact tests) and the
    embedding scale is large enough that max-over-time pooling does not sit
    near a tie.
    """
    overrides = dict(max_len=3, lstm_dim=2, classifier_dims=(3,))
    if variant in ("vqateam_mtl", "vqateam_stl"):
        overrides["filter_widths"] = (1, 2)
    model = tiny_model(variant, seed=int(rng.integers(0, 2 ** 31)),
                       emb_scale=1.0, **overrides)
    cfg = model.config
    heads = model.n_heads
    images = rng.normal(size=(batch, cfg.feature_dim))
    ids = rng.integers(1, cfg.vocab_size, size=(batch, heads, cfg.max_len))
    targets = rng.integers(0, cfg.n_answers, size=(batch, heads))
    mask = rng.integers(0, 2, size=(batch, heads)).astype(bool)
    mask[0, 0] = True  # keep at least one unmasked slot

    def fn():
        loss, _ = model.loss(images, ids, targets, mask)
        return loss

    return fn, list(model.params.values())

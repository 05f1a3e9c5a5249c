"""LSTM cell and stacked-sequence runner built from the tensor operators."""

from __future__ import annotations

import numpy as np

from ..errors import ShapeError
from .tensor import Tensor, add, affine, constant, matmul, mul, select_time, sigmoid, split_cols, tanh


def lstm_step(x, h_prev, c_prev, w_in, w_rec, bias):
    """One LSTM step.

    x: (batch, in_dim), h_prev/c_prev: (batch, hidden).  The fused weights
    hold the four gates side by side in the order input, forget, candidate,
    output: w_in (in_dim, 4*hidden), w_rec (hidden, 4*hidden), bias (4*hidden,).
    Returns (h, c).
    """
    hidden = h_prev.data.shape[-1]
    if w_in.data.shape[-1] != 4 * hidden or w_rec.data.shape != (hidden, 4 * hidden):
        raise ShapeError(
            f"lstm_step: gate weights {w_in.data.shape}/{w_rec.data.shape} "
            f"inconsistent with hidden size {hidden}")
    z = add(affine(x, w_in, bias), matmul(h_prev, w_rec))
    zi, zf, zg, zo = split_cols(z, [hidden] * 4)
    gate_in = sigmoid(zi)
    gate_forget = sigmoid(zf)
    cand = tanh(zg)
    gate_out = sigmoid(zo)
    c = add(mul(gate_forget, c_prev), mul(gate_in, cand))
    h = mul(gate_out, tanh(c))
    return h, c


def lstm_sequence(x_seq, layers):
    """Run a stack of LSTM layers over a (batch, time, channels) sequence.

    `layers` is a list of (w_in, w_rec, bias) triples, one per layer, the
    first consuming the input channels and the rest the hidden size below.
    Returns the top layer's hidden state after the last step.
    """
    bsz, steps, _ = x_seq.data.shape
    states = []
    for (_, w_rec, _) in layers:
        hidden = w_rec.data.shape[0]
        zeros = np.zeros((bsz, hidden))
        states.append((constant(zeros), constant(zeros)))
    h_top = states[-1][0]
    for t in range(steps):
        inp = select_time(x_seq, t)
        for li, (w_in, w_rec, bias) in enumerate(layers):
            h, c = lstm_step(inp, states[li][0], states[li][1], w_in, w_rec, bias)
            states[li] = (h, c)
            inp = h
        h_top = inp
    return h_top

"""Nadam and SGD-with-momentum over lists of parameter tensors.

Both optimizers mutate parameter `.data` in place and keep their state
arrays aligned with the parameter list.  A parameter with no gradient
(never touched by the last backward pass) is treated as having a zero
gradient.
"""

from __future__ import annotations

import numpy as np

from ..errors import TrainingError


def _grad_of(p):
    g = p.grad if p.grad is not None else np.zeros_like(p.data)
    if not np.all(np.isfinite(g)):
        raise TrainingError(f"non-finite gradient for parameter {p.name or '<unnamed>'}")
    return g


class Nadam:
    """Adam with Nesterov momentum folded into the first-moment estimate.

    Update with bias correction, per step t (1-based):

        m <- b1*m + (1-b1)*g          v <- b2*v + (1-b2)*g^2
        m_hat = m / (1 - b1^t)        v_hat = v / (1 - b2^t)
        m_bar = b1*m_hat + (1-b1)*g / (1 - b1^t)
        p <- p - lr * m_bar / (sqrt(v_hat) + eps)
    """

    def __init__(self, params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = [np.zeros_like(p.data) for p in self.params]
        self.v = [np.zeros_like(p.data) for p in self.params]
        self.t = 0

    def step(self):
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        bc1 = 1.0 - b1 ** self.t
        bc2 = 1.0 - b2 ** self.t
        for p, m, v in zip(self.params, self.m, self.v):
            g = _grad_of(p)
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            m_bar = b1 * (m / bc1) + (1.0 - b1) * g / bc1
            p.data -= self.lr * m_bar / (np.sqrt(v / bc2) + self.eps)


class SgdMomentum:
    """Classical momentum: velocity <- mu*velocity - lr*g; p <- p + velocity."""

    def __init__(self, params, lr=1e-4, momentum=0.9):
        self.params = list(params)
        self.lr = lr
        self.momentum = momentum
        self.vel = [np.zeros_like(p.data) for p in self.params]
        self.t = 0

    def step(self):
        self.t += 1
        for p, v in zip(self.params, self.vel):
            g = _grad_of(p)
            v *= self.momentum
            v -= self.lr * g
            p.data += v

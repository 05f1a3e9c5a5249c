"""Finite-difference verification of the backward pass."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tensor import zero_grads


@dataclass
class GradCheckReport:
    max_rel_err: float
    tolerance: float
    worst_param: str | None = None
    per_param: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.max_rel_err < self.tolerance


def check_gradients(fn, params, tolerance=1e-4, step=1e-5, max_coords_per_param=None, seed=0):
    """Compare the backward pass of `fn()` against central finite differences.

    `fn` must rebuild and return a scalar output tensor from the current
    values of `params` each time it is called.  Every coordinate of every
    parameter is perturbed by ±step unless `max_coords_per_param` caps the
    number of (seeded, reproducible) sampled coordinates.  Coordinates under
    a frozen `grad_mask` are skipped, since their analytic gradient is zero
    by definition.  The error measure per coordinate is
    |analytic - numeric| / max(1, |analytic|, |numeric|).
    """
    zero_grads(params)
    out = fn()
    out.backward()
    analytic = [np.array(p.grad) if p.grad is not None else np.zeros_like(p.data)
                for p in params]
    rng = np.random.default_rng(seed)
    max_rel = 0.0
    worst = None
    per_param = {}
    for pi, (p, ga) in enumerate(zip(params, analytic)):
        flat = p.data.reshape(-1)
        gflat = ga.reshape(-1)
        coords = np.arange(flat.size)
        if p.grad_mask is not None:
            coords = coords[p.grad_mask.reshape(-1)[coords]]
        if max_coords_per_param is not None and coords.size > max_coords_per_param:
            coords = rng.choice(coords, size=max_coords_per_param, replace=False)
            coords.sort()
        prm_max = 0.0
        for i in coords:
            orig = flat[i]
            flat[i] = orig + step
            f_plus = float(fn().data)
            flat[i] = orig - step
            f_minus = float(fn().data)
            flat[i] = orig
            numeric = (f_plus - f_minus) / (2.0 * step)
            a = gflat[i]
            rel = abs(a - numeric) / max(1.0, abs(a), abs(numeric))
            if rel > prm_max:
                prm_max = rel
            if rel > max_rel:
                max_rel = rel
                worst = p.name or f"param{pi}"
        per_param[p.name or f"param{pi}"] = prm_max
    return GradCheckReport(max_rel_err=max_rel, tolerance=tolerance,
                           worst_param=worst, per_param=per_param)

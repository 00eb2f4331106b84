"""Preconditioned gradient ascent on the unit sphere of a metric u.M.u = 1."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as spla

from .errors import OverflowGuardError


@dataclass(frozen=True)
class AscentOptions:
    max_iter: int = 4000
    tol: float = 1e-10          # relative change of the objective over `window` steps
    window: int = 20
    max_halvings: int = 60
    initial_step: float = 1.0


@dataclass
class AscentResult:
    u: np.ndarray
    value: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list)


def metric_factor(metric):
    return spla.splu(metric.tocsc())


def ascend(objective, metric, u0, opts: AscentOptions = AscentOptions(), *, lu=None):
    """Maximize ``objective`` over {u : u.M.u = 1}.

    ``objective(u)`` returns (value, euclidean gradient) and may raise
    OverflowGuardError for inadmissible iterates; those count as rejected
    trial steps.  Search directions are M^{-1} gradients projected to the
    tangent space, steps follow Barzilai-Borwein in the M inner product with
    monotone backtracking, and the retraction is plain renormalization.
    """
    lu = lu or metric_factor(metric)

    def mnorm(v):
        return math.sqrt(float(v @ (metric @ v)))

    def direction(u, grad):
        g = lu.solve(grad)
        return g - float(u @ grad) * u  # M-orthogonal to u since u.M.u = 1

    u = np.asarray(u0, dtype=float)
    u = u / mnorm(u)
    f, grad = objective(u)
    d = direction(u, grad)
    tau = opts.initial_step
    history = [f]
    converged = False
    it = 0
    for it in range(1, opts.max_iter + 1):
        accepted = False
        for _ in range(opts.max_halvings):
            trial = u + tau * d
            trial = trial / mnorm(trial)
            try:
                f_new, g_new = objective(trial)
            except OverflowGuardError:
                tau *= 0.5
                continue
            if f_new >= f - 1e-15 * abs(f):
                accepted = True
                break
            tau *= 0.5
        if not accepted:
            # no ascent along d at any resolvable step: stationary to rounding
            converged = True
            break
        d_new = direction(trial, g_new)
        s = trial - u
        y = d_new - d
        sMy = float(s @ (metric @ y))
        sMs = float(s @ (metric @ s))
        if sMy != 0.0 and sMs > 0.0:
            tau = sMs / abs(sMy)
        u, f, grad, d = trial, f_new, g_new, d_new
        history.append(f)
        if it >= opts.window:
            ref = history[-1 - opts.window]
            if abs(f - ref) <= opts.tol * max(abs(f), 1e-300):
                converged = True
                break
    return AscentResult(u, f, it, converged, history)

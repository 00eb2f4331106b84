"""Ground states of the Gagliardo-Nirenberg quotient on R^4 and R^2.

The quotient J(u) = ||u||_4^4 / (||D u||_2^2 ||u||_2^2), with D = Delta on R^4
and D = grad on R^2, is maximized by preconditioned ascent.  A maximizer u
satisfies the Euler-Lagrange relation and, after Q = mu u(lambda x), solves

    Delta^2 Q + Q = Q^3   (R^4),        -Delta U + U = U^3   (R^2).

For such Q one has J(Q) = 2 / ||Q||_2^2, which is used as a cross-check.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ._ascent import AscentOptions, ascend, metric_factor
from .errors import ConvergenceError, GridError
from .radial import RadialField, RadialGrid, build_grid


@dataclass(frozen=True)
class GroundState:
    profile: RadialField          # maximizer, normalized to u(0) > 0 and u.M.u = 1
    quotient: float
    el_residual: float
    rescale_mu: float
    rescale_lambda: float
    iterations: int = 0
    converged: bool = True
    history: tuple = field(default=(), repr=False)
    polished: RadialField | None = field(default=None, repr=False)
    newton_steps: int = 0

    @property
    def dimension(self) -> int:
        return self.profile.grid.dimension

    def rescaled(self) -> RadialField:
        """Q(x) = mu u(lambda x) at the nodes r_i / lambda (Newton-polished if available)."""
        if self.polished is not None:
            return self.polished
        grid = self.profile.grid.scaled(1.0 / self.rescale_lambda)
        return RadialField(grid, self.rescale_mu * self.profile.values)

    def weinstein_estimate(self) -> float:
        """2 / ||Q||_2^2 for the rescaled profile."""
        q = self.rescaled()
        return 2.0 / q.grid.integrate(q.values**2)

    def summary(self) -> dict:
        return {"dimension": self.dimension, "quotient": self.quotient,
                "residual": self.el_residual, "iterations": self.iterations,
                "converged": self.converged, "mu": self.rescale_mu,
                "lambda": self.rescale_lambda, "nodes": len(self.profile.grid),
                "r_max": self.profile.grid.r_max, "newton_steps": self.newton_steps,
                "weinstein_estimate": self.weinstein_estimate()}

    def to_json(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.summary(), indent=2, sort_keys=True) + "\n")
        return path


def _parts(grid: RadialGrid, u):
    w = grid.weights
    return float(w @ (u * u)), grid.seminorm_energy(u), float(w @ u**4)


def _quotient_objective(grid: RadialGrid):
    w = grid.weights

    def objective(u):
        n2, d, n4 = _parts(grid, u)
        if n2 <= 0 or d <= 0:
            raise GridError("degenerate iterate")
        j = n4 / (d * n2)
        grad_log = 4 * w * u**3 / n4 - grid.seminorm_gradient(u) / d - 2 * w * u / n2
        return j, j * grad_log

    return objective


def rescaling(grid: RadialGrid, u) -> tuple[float, float]:
    """(mu, lambda) mapping the maximizer u onto the unit-coefficient equation."""
    n2, d, n4 = _parts(grid, u)
    power = 4 if grid.dimension == 4 else 2
    lam = (n2 / d) ** (1.0 / power)
    mu = math.sqrt(2.0 * n2 / n4)
    return mu, lam


def gaussian_init(grid: RadialGrid, width: float = 1.0) -> np.ndarray:
    """Unit-mass Gaussian exp(-r^2 / (2 width^2))."""
    u = np.exp(-grid.nodes**2 / (2.0 * width**2))
    return u / math.sqrt(grid.integrate(u * u))


def maximize_quotient(dimension: int, grid: RadialGrid | None = None,
                      init=None, opts: AscentOptions | None = None, *,
                      require_convergence: bool = True,
                      polish: bool = True) -> GroundState:
    """Maximize the GN quotient by M-preconditioned ascent.

    M is the assembled seminorm form plus W, i.e. a discrete (Delta^2 + 1) or
    (-Delta + 1).  ``init`` is an array, a RadialField or a callable of r; the
    default is a unit-mass Gaussian.  With ``polish`` the rescaled maximizer
    is refined by Newton on the strong-form equation; the energy-form
    maximizer carries a few-node layer at the origin that this removes.
    """
    if grid is None:
        grid = default_grid(dimension)
    if grid.dimension != dimension:
        raise GridError("grid dimension does not match")
    opts = opts or AscentOptions()
    if init is None:
        u0 = gaussian_init(grid)
    elif isinstance(init, RadialField):
        u0 = init.values
    elif callable(init):
        u0 = np.asarray(init(grid.nodes), dtype=float)
    else:
        u0 = np.asarray(init, dtype=float)
    if u0.shape != grid.nodes.shape or not np.any(u0):
        raise ValueError("init must be a nonzero field on the grid")
    metric = (grid.seminorm_matrix + grid.weight_matrix).tocsc()
    res = ascend(_quotient_objective(grid), metric, u0, opts, lu=metric_factor(metric))
    if require_convergence and not res.converged:
        raise ConvergenceError(
            f"quotient ascent did not settle in {opts.max_iter} iterations "
            f"(last value {res.value:.12e})")
    u = res.u
    # the quotient is even in u; fix the sign so that the peak is positive
    if u[np.argmax(np.abs(u))] < 0:
        u = -u
    mu, lam = rescaling(grid, u)
    state = GroundState(RadialField(grid, u), float(res.value), 0.0, mu, lam,
                        res.iterations, res.converged, tuple(res.history))
    polished, steps = None, 0
    if polish:
        polished, steps = newton_polish(state.rescaled())
    state = GroundState(state.profile, state.quotient, 0.0, mu, lam, res.iterations,
                        res.converged, state.history, polished, steps)
    return GroundState(state.profile, state.quotient, el_residual(state, dimension),
                       mu, lam, res.iterations, res.converged, state.history,
                       polished, steps)


def default_grid(dimension: int, node_count: int = 1024, r_max: float = 30.0) -> RadialGrid:
    return build_grid(dimension, r_max, node_count, "algebraic-stretched")


def _strong_operator(grid: RadialGrid):
    lap = grid.laplacian_matrix
    return (lap @ lap).tocsr() if grid.dimension == 4 else (-lap).tocsr()


def newton_polish(q: RadialField, *, max_steps: int = 12,
                  tol: float = 1e-12) -> tuple[RadialField, int]:
    """Newton iterations for the unit-coefficient equation on q's grid.

    The outermost one (R^2) or two (R^4) rows are replaced by Q = 0.
    """
    grid = q.grid
    v = q.values.copy()
    n = v.size
    a = _strong_operator(grid)
    eye = sp.identity(n, format="csr")
    n_bc = 2 if grid.dimension == 4 else 1
    keep = np.ones(n)
    keep[n - n_bc:] = 0.0
    bc = sp.diags(1.0 - keep)
    steps = 0
    for steps in range(1, max_steps + 1):
        f = keep * (a @ v + v - v**3) + (1.0 - keep) * v
        jac = sp.diags(keep) @ (a + eye - sp.diags(3 * v * v)) + bc
        dv = spla.spsolve(jac.tocsc(), -f)
        v += dv
        if np.max(np.abs(dv)) <= tol * np.max(np.abs(v)):
            break
    if not np.all(np.isfinite(v)):
        raise ConvergenceError("Newton polish diverged")
    return RadialField(grid, v), steps


def multi_start(dimension: int, grid: RadialGrid | None = None,
                widths=(0.5, 1.0, 2.0), opts: AscentOptions | None = None):
    """Run :func:`maximize_quotient` from several Gaussian widths.

    Returns (best state, list of (width, quotient)).
    """
    if grid is None:
        grid = default_grid(dimension)
    states = [(w, maximize_quotient(dimension, grid, gaussian_init(grid, w), opts))
              for w in widths]
    best = max(states, key=lambda p: p[1].quotient)[1]
    return best, [(w, s.quotient) for w, s in states]


def el_residual(state: GroundState, dimension: int | None = None, *,
                interior: float = 0.6) -> float:
    """sup |Delta^2 Q + Q - Q^3| (R^4) or |-Delta U + U - U^3| (R^2).

    Evaluated on the rescaled (polished) profile at nodes r <= interior * r_max,
    away from the outer one-sided stencils.
    """
    dimension = dimension or state.dimension
    q = state.rescaled()
    if not np.any(q.values):
        return 0.0
    v = q.values
    res = _strong_operator(q.grid) @ v + v - v**3
    mask = q.grid.nodes <= interior * q.grid.r_max
    return float(np.max(np.abs(res[mask])))

"""Maximization of the exponential functionals and the diagnostics around it.

On the unit sphere of H = H^2(R^4) (or H^1(R^2)) we study

    S(alpha) = sup_{||u||_H = 1} int exp(beta u^2) - 1 - alpha u^2 dx,

with beta at or below the critical exponent (32 pi^2, resp. 4 pi).  The
module provides the sphere maximizer with its attained / vanishing
classification, the scaling curves g_v(t), the vanishing witness, the
concentration test function phi_eps, the series bound F(t) used to rule out
maximizers for large critical - alpha, and the alpha sweep that brackets the
threshold between the two regimes.
"""
from __future__ import annotations

import csv
import functools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._ascent import AscentOptions, ascend, metric_factor
from .bubble_green import (C_LOG, K_BUBBLE, FundamentalSolution, fundamental_solution,
                           gamma_values, lap_phi_values, whole_space_concentration_bound)
from .errors import GridError, OverflowGuardError
from .ground_state import default_grid
from .radial import (FunctionalSpec, RadialField, RadialGrid, build_grid, critical_exponent,
                     exp_functional, exp_integrand, gn_quotient, seminorm_sq, sobolev_norm)
from .sharp_constants import log_bk_formula_upper

PI = math.pi
CLASSIFICATIONS = ("attained", "vanishing-dominated", "inconclusive")


# -- sphere maximization -----------------------------------------------------

@dataclass(frozen=True)
class MaximizerOptions:
    ascent: AscentOptions = AscentOptions(max_iter=3000, tol=1e-10)
    widths: tuple = (0.7, 3.0, 10.0)        # Gaussian starting widths
    ladder: tuple = (0.9, 0.95, 0.98, 0.99)  # beta_k / critical, used when beta is critical
    refine: bool = True                      # re-solve on a finer, wider grid before "attained"
    vanishing_tol: float = 0.02
    attained_margin: float = 0.05
    mass_cut: float = 0.1                    # interior L^4 fraction separating the regimes
    refine_tol: float = 1e-2


@dataclass(frozen=True)
class MaximizerReport:
    spec: FunctionalSpec
    maximizer: RadialField
    value: float
    classification: str
    diagnostics: dict = field(default_factory=dict)

    @property
    def level(self) -> float:
        """beta - alpha, the vanishing level (critical - alpha at beta = critical)."""
        return self.spec.beta - self.spec.alpha

    def summary(self) -> dict:
        return {"alpha": self.spec.alpha, "beta": self.spec.beta,
                "dimension": self.spec.dimension, "value": self.value,
                "classification": self.classification, "diagnostics": self.diagnostics}


def _sphere_objective(grid: RadialGrid, spec: FunctionalSpec):
    w = grid.weights

    def objective(u):
        ig = exp_integrand(u, spec)      # raises the overflow guard
        grad = 2.0 * w * u * (spec.beta * np.exp(spec.beta * u * u) - spec.alpha)
        return float(w @ ig), grad

    return objective


def _interior_fraction(u: RadialField, radius: float = 1.0) -> float:
    q = u.values**4
    total = u.grid.integrate(q)
    if total == 0.0:
        return 0.0
    inside = u.grid.nodes <= radius
    return float(u.grid.weights[inside] @ q[inside]) / total


def _metric(grid: RadialGrid):
    m = (grid.seminorm_matrix + grid.weight_matrix).tocsc()
    return m, metric_factor(m)


def _solve(grid, spec, u0, ascent_opts, metric=None):
    metric, lu = metric or _metric(grid)
    try:
        return ascend(_sphere_objective(grid, spec), metric, u0, ascent_opts, lu=lu)
    except OverflowGuardError:
        return None


def _start_values(grid: RadialGrid, init):
    if init is None:
        return None
    if isinstance(init, RadialField):
        if init.grid is grid:
            u0 = init.values
        else:
            u0 = np.interp(grid.nodes, init.grid.nodes, init.values, right=0.0)
    elif callable(init):
        u0 = np.asarray(init(grid.nodes), dtype=float)
    else:
        u0 = np.asarray(init, dtype=float)
    if u0.shape != grid.nodes.shape or not np.any(u0):
        raise ValueError("init must be a nonzero field on the grid")
    return u0


def _candidate(value, level, frac, peak_r, r_max, opts) -> str:
    if value > (1.0 + opts.attained_margin) * level and frac >= opts.mass_cut \
            and peak_r <= 0.5 * r_max:
        return "attained"
    if level > 0 and abs(value - level) < opts.vanishing_tol * level and frac < opts.mass_cut:
        return "vanishing-dominated"
    return "inconclusive"


def _on_sphere(grid, u, spec):
    """Field rescaled to unit sobolev_norm and its functional value.

    The ascent constrains the assembled form u.M.u, which differs from the
    operator-form norm by ~1e-7; every reported value uses the latter.
    """
    f = RadialField(grid, u)
    f = f * (1.0 / sobolev_norm(f))
    return f, float(exp_functional(f, spec).value)


def _best_field(grid, spec, starts, opts, metric):
    trials, best = [], None
    for label, u0 in starts:
        res = _solve(grid, spec, u0, opts.ascent, metric)
        if res is None:
            trials.append({"start": label, "value": None, "converged": False})
            continue
        try:
            _, value = _on_sphere(grid, res.u, spec)
        except OverflowGuardError:
            trials.append({"start": label, "value": None, "converged": False})
            continue
        trials.append({"start": label, "value": value,
                       "converged": bool(res.converged), "iterations": res.iterations})
        if best is None or value > best[2]:
            best = (label, res, value)
    return best, trials


def maximize_on_sphere(spec: FunctionalSpec, grid: RadialGrid | None = None, init=None,
                       opts: MaximizerOptions | None = None) -> MaximizerReport:
    """Projected ascent for S on {||u||_H = 1}.

    Starts: ``init`` (if given) and Gaussians of ``opts.widths``.  At the
    critical exponent a ladder beta_k = f * critical is solved first with warm
    starts; its last field is one more start, and a linear extrapolation of the
    ladder values to beta = critical is recorded.  The best converged field is
    classified: "attained" needs value > (1 + margin)(beta - alpha), an
    interior peak carrying L^4 mass, and agreement after refinement;
    "vanishing-dominated" needs value within ``vanishing_tol`` of beta - alpha
    with dispersed L^4 mass.  Anything else, including an exhausted iteration
    budget, is "inconclusive".
    """
    opts = opts or MaximizerOptions()
    crit = critical_exponent(spec.dimension)
    if spec.beta > crit * (1.0 + 1e-14):
        raise ValueError("beta exceeds the critical exponent")
    grid = grid or default_grid(spec.dimension)
    if grid.dimension != spec.dimension:
        raise GridError("grid dimension does not match the functional")
    metric = _metric(grid)
    starts = []
    u_init = _start_values(grid, init)
    if u_init is not None:
        starts.append(("init", u_init))
    for wd in opts.widths:
        starts.append((f"gaussian:{wd:g}", np.exp(-grid.nodes**2 / (2.0 * wd * wd))))

    ladder = []
    if spec.beta >= crit and opts.ladder:
        u_prev = starts[0][1]
        for frac in opts.ladder:
            sub = FunctionalSpec(frac * crit, spec.alpha, spec.dimension)
            res = _solve(grid, sub, u_prev, opts.ascent, metric)
            if res is None:
                break
            ladder.append((sub.beta, float(res.value)))
            u_prev = res.u
        if ladder:
            starts.append(("ladder", u_prev))

    best, trials = _best_field(grid, spec, starts, opts, metric)
    if best is None:
        raise OverflowGuardError(
            "every start trips the overflow guard; refine the grid or lower beta")
    label, res, _ = best
    u = res.u
    if u[np.argmax(np.abs(u))] < 0:
        u = -u
    field_, value = _on_sphere(grid, u, spec)

    level = spec.beta - spec.alpha
    frac = _interior_fraction(field_)
    peak_i = int(np.argmax(np.abs(field_.values)))
    diag = {"interior_fraction": frac, "peak": float(abs(field_.values[peak_i])),
            "peak_radius": float(grid.nodes[peak_i]), "iterations": res.iterations,
            "converged": bool(res.converged), "best_start": label, "trials": trials,
            "level": level, "nodes": len(grid), "r_max": grid.r_max}
    if ladder:
        (b1, s1), (b2, s2) = (ladder[-2], ladder[-1]) if len(ladder) > 1 else (ladder[-1],) * 2
        slope = (s2 - s1) / (b2 - b1) if b2 != b1 else 0.0
        diag["ladder"] = [[b, s] for b, s in ladder]
        diag["ladder_extrapolated"] = s2 + slope * (crit - b2)

    cls = "inconclusive"
    if res.converged:
        cls = _candidate(value, level, frac, diag["peak_radius"], grid.r_max, opts)
        if cls == "attained" and opts.refine:
            fine = build_grid(grid.dimension, 1.5 * grid.r_max, 2 * len(grid), grid.mapping)
            ref = _solve(fine, spec, _start_values(fine, field_), opts.ascent)
            if ref is None or not ref.converged:
                cls = "inconclusive"
            else:
                rf, rv = _on_sphere(fine, ref.u, spec)
                ri = int(np.argmax(np.abs(rf.values)))
                diag["refined_value"] = rv
                same = _candidate(rv, level, _interior_fraction(rf), float(fine.nodes[ri]),
                                  fine.r_max, opts) == "attained"
                if not same or abs(rv - value) > opts.refine_tol * abs(value):
                    cls = "inconclusive"
    return MaximizerReport(spec, field_, value, cls, diag)


# -- scaling curves ----------------------------------------------------------

@dataclass(frozen=True)
class VanishingCurve:
    base: RadialField
    alpha: float
    t: np.ndarray
    g: np.ndarray

    def to_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "g"])
            for t, g in zip(self.t, self.g):
                w.writerow([repr(float(t)), repr(float(g))])
        return path


def _gv_parts(v: RadialField, alpha: float, dimension: int | None):
    dimension = dimension or v.dimension
    if dimension != v.dimension:
        raise ValueError("field and dimension disagree")
    crit = critical_exponent(dimension)
    if not alpha < crit:
        raise ValueError("alpha must be below the critical exponent")
    n2 = v.grid.integrate(v.values**2)
    if n2 == 0.0:
        raise ValueError("v must be nonzero")
    d = seminorm_sq(v)
    n4 = v.grid.integrate(v.values**4)
    return n2, d, n4, crit * crit / (2.0 * (crit - alpha))


def gv_curve(v: RadialField, alpha: float, dimension: int | None = None,
             t_grid=None) -> VanishingCurve:
    """g_v(t) = n2/(t d + n2) + kappa t n4/(t d + n2)^2, kappa = crit^2/(2(crit - alpha))."""
    n2, d, n4, kappa = _gv_parts(v, alpha, dimension)
    t = np.asarray(np.linspace(0.0, 1.0, 101) if t_grid is None else t_grid, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    den = t * d + n2
    g = n2 / den + kappa * t * n4 / den**2
    return VanishingCurve(v, float(alpha), t, g)


def gv_prime_at_zero(v: RadialField, alpha: float, dimension: int | None = None) -> float:
    n2, d, n4, kappa = _gv_parts(v, alpha, dimension)
    return (d / n2) * (-1.0 + kappa * n4 / (d * n2))


# -- vanishing witness -------------------------------------------------------

def bump(dimension: int, node_count: int = 1024) -> RadialField:
    """eta = c b(lambda x), b = (1 - r^2)_+^4, with ||eta||_2 = ||D eta||_2 = 1.

    Both the Laplacian energy on R^4 and the Dirichlet energy on R^2 are
    dilation invariant, so c fixes the seminorm and lambda the L^2 norm.
    """
    g = build_grid(dimension, 1.25, node_count, "uniform")
    b = np.clip(1.0 - g.nodes**2, 0.0, None) ** 4
    raw = RadialField(g, b)
    n2 = g.integrate(b * b)
    d = seminorm_sq(raw)
    c = 1.0 / math.sqrt(d)
    lam = (n2 / d) ** (1.0 / dimension) if dimension == 4 else math.sqrt(n2 / d)
    return RadialField(g.scaled(1.0 / lam), c * b)


def witness_field(rho: float, eta: RadialField | None = None, dimension: int = 4) -> RadialField:
    """omega = a eta(rho x) with a chosen so that ||omega||_H = 1."""
    if not (rho > 0 and math.isfinite(rho)):
        raise ValueError("rho must be positive")
    eta = eta or bump(dimension)
    n = eta.dimension
    if n * math.log10(1.0 / rho) > 250:
        raise GridError("rho too small: the rescaled support leaves floating-point range")
    a = math.sqrt(rho**n / (1.0 + rho**n)) if n == 4 else math.sqrt(rho**2 / (1.0 + rho**2))
    return RadialField(eta.grid.scaled(1.0 / rho), a * eta.values)


def vanishing_witness(rho: float, eta: RadialField | None, spec: FunctionalSpec) -> float:
    w = witness_field(rho, eta or bump(spec.dimension), spec.dimension)
    return float(exp_functional(w, spec).value)


# -- concentration test function ----------------------------------------------

@dataclass(frozen=True)
class TestFunctionParams:
    __test__ = False

    epsilon: float
    L: float
    C: float
    a: float
    b: float
    A: float
    inner_grid: RadialGrid = field(repr=False)
    outer_grid: RadialGrid = field(repr=False)
    expansion: float = 0.0        # 2 ln(pi/(sqrt6 eps^2)) - 5/3 + 32 pi^2 A
    derivative_jump: float = 0.0  # one-sided finite differences at r = L eps
    derivative_jump_exact: float = 0.0

    @property
    def grid(self) -> tuple:
        return self.inner_grid, self.outer_grid

    @property
    def c_discrepancy(self) -> float:
        """32 pi^2 C^2 minus the two-term expansion."""
        return 32 * PI**2 * self.C**2 - self.expansion

    def summary(self) -> dict:
        return {"epsilon": self.epsilon, "L": self.L, "C": self.C, "C2": self.C**2,
                "a": self.a, "b": self.b, "A": self.A, "expansion": self.expansion,
                "c_discrepancy": self.c_discrepancy,
                "discrepancy_bound": 5.0 / math.log(self.epsilon) ** 2,
                "derivative_jump": self.derivative_jump,
                "derivative_jump_exact": self.derivative_jump_exact,
                "inner_nodes": len(self.inner_grid), "outer_nodes": len(self.outer_grid),
                "r_out": self.outer_grid.r_max}


@dataclass(frozen=True)
class PiecewiseProfile:
    """phi_eps on the ball r <= L eps and the annulus L eps <= r <= r_out.

    The Laplacian is carried analytically on each piece, since it jumps at the
    interface.
    """

    inner: RadialField
    outer: RadialField
    lap_inner: np.ndarray = field(repr=False)
    lap_outer: np.ndarray = field(repr=False)

    def sobolev_norm(self) -> float:
        s = sum(p.grid.integrate(p.values**2 + lap**2)
                for p, lap in ((self.inner, self.lap_inner), (self.outer, self.lap_outer)))
        return math.sqrt(s)

    def functional(self, spec: FunctionalSpec) -> float:
        return float(exp_functional(self.inner, spec).value
                     + exp_functional(self.outer, spec).value)

    def radii(self) -> np.ndarray:
        return np.concatenate([self.inner.grid.nodes, self.outer.grid.nodes[1:]])

    def values(self) -> np.ndarray:
        return np.concatenate([self.inner.values, self.outer.values[1:]])

    def to_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["r", "value"])
            for r, v in zip(self.radii(), self.values()):
                w.writerow([repr(float(r)), repr(float(v))])
        return path


def build_test_function(epsilon: float, A: float | None = None,
                        fs: FundamentalSolution | None = None, *,
                        inner_nodes: int = 1024, outer_nodes: int = 1024,
                        r_out: float = 40.0) -> tuple[TestFunctionParams, PiecewiseProfile]:
    """phi_eps = Phi / C with C = ||Phi||_{H^2}.

    Inside r <= L eps (L = ln 1/eps):
        Phi = a0 - ln(1 + k r^2/eps^2)/(16 pi^2) + A + phi(r) + b r^2,
    where a0 = -ln(L eps)/(8 pi^2) + ln(1 + k L^2)/(16 pi^2) - b L^2 eps^2 and
    k = pi/sqrt6, so that Phi matches Gamma at L eps.  Outside Phi = Gamma.
    """
    if not 0 < epsilon <= 0.1:
        raise ValueError("epsilon must lie in (0, 0.1]")
    fs = fs or fundamental_solution()
    A = fs.regular_part_A if A is None else float(A)
    L = math.log(1.0 / epsilon)
    k = K_BUBBLE
    R = L * epsilon
    if R >= 0.5:
        raise ValueError("inner radius L*eps too large for the matched construction")
    s = k / epsilon**2
    b = -1.0 / (16 * PI**2 * L**2 * epsilon**2 * (1 + k * L**2))
    a0 = -C_LOG * math.log(R) + math.log1p(k * L**2) / (16 * PI**2) - b * L**2 * epsilon**2

    gi = build_grid(4, R, inner_nodes, "algebraic-stretched")
    go = build_grid(4, r_out, outer_nodes, "geometric", r_min=R)
    r = gi.nodes
    # phi is evaluated in the normalization of gamma_values, i.e. with the table's A
    shift = A - fs.regular_part_A
    phi_in = fs.phi_at(r) + fs.regular_part_A
    inner = a0 - np.log1p(s * r**2) / (16 * PI**2) + phi_in + shift + b * r**2
    lap_in = (-4 * s * (2 + s * r**2) / (1 + s * r**2) ** 2 / (16 * PI**2)
              + fs.lap_phi_at(r) + 8 * b)
    ro = go.nodes
    outer = gamma_values(ro, fs.opts)[0] + shift
    lap_out = -1.0 / (4 * PI**2 * ro**2) + lap_phi_values(ro, fs.opts)

    c2 = gi.integrate(inner**2 + lap_in**2) + go.integrate(outer**2 + lap_out**2)
    C = math.sqrt(c2)
    a = a0 - c2
    expansion = 2 * math.log(PI / (math.sqrt(6.0) * epsilon**2)) - 5.0 / 3.0 + 32 * PI**2 * A
    jump = float((gi.radial_derivative @ inner)[-1] - (go.radial_derivative @ outer)[0])
    jump_exact = (-(2 * s * R / (1 + s * R * R)) / (16 * PI**2) + 2 * b * R + C_LOG / R)
    params = TestFunctionParams(epsilon, L, C, a, b, A, gi, go, expansion, jump, jump_exact)
    prof = PiecewiseProfile(RadialField(gi, inner / C), RadialField(go, outer / C),
                            lap_in / C, lap_out / C)
    return params, prof


def surpass_check(epsilon: float, alpha: float, A: float | None = None, *,
                  fs: FundamentalSolution | None = None,
                  profile: PiecewiseProfile | None = None) -> tuple[float, float, float]:
    """(functional of phi_eps, concentration bound, margin) at beta = 32 pi^2."""
    fs = fs or fundamental_solution()
    A = fs.regular_part_A if A is None else float(A)
    if profile is None:
        _, profile = build_test_function(epsilon, A, fs)
    spec = FunctionalSpec(32 * PI**2, float(alpha), 4)
    value = profile.functional(spec)
    bound = whole_space_concentration_bound(A)
    return value, bound, value - bound


# -- nonexistence series -------------------------------------------------------

SERIES_TOL = 1e-10
T_LIMIT = 1.0 / math.e


@functools.lru_cache(maxsize=None)
def _log_coeff(k: int, reading: str) -> float:
    """log of (32 pi^2)^k B_k / k!, B_k the explicit upper bound."""
    return k * math.log(32 * PI**2) - math.lgamma(k + 1) + log_bk_formula_upper(k, reading)


def series_sum(t: float, *, tol: float = SERIES_TOL, reading: str = "proof",
               k_max: int = 200_000) -> tuple[float, float, int]:
    """sum_{k>=2} c_k t^{k-1} with a geometric tail bound.

    The coefficient ratios c_{k+1}/c_k increase towards e, so once the terms
    are summed through K the remainder is at most T_K q/(1 - q) with q = e t.
    Returns (sum, tail bound, K).
    """
    if not 0.0 <= t < T_LIMIT:
        raise ValueError(f"t = {t} outside [0, 1/e): the series diverges")
    if t == 0.0:
        return 0.0, 0.0, 1
    q = math.e * t
    lt = math.log(t)
    total = 0.0
    for k in range(2, k_max):
        term = math.exp(_log_coeff(k, reading) + (k - 1) * lt)
        total += term
        tail = term * q / (1.0 - q)
        if tail <= tol:
            return total, tail, k
    raise ValueError("series did not reach the truncation tolerance")


def F_value(alpha: float, t: float, *, reading: str = "proof") -> tuple[float, float]:
    """F(t) = (crit - alpha)(1 - t) + (1 - t) sum_k c_k t^{k-1}, with truncation bound."""
    s, tail, _ = series_sum(t, reading=reading)
    return (32 * PI**2 - alpha) * (1.0 - t) + (1.0 - t) * s, (1.0 - t) * tail


@dataclass(frozen=True)
class NonexistenceBound:
    alpha: float
    t: np.ndarray
    F: np.ndarray
    truncation: np.ndarray
    t0: float
    M: float
    alpha_star_star: float      # M / t0, a level for 32 pi^2 - alpha
    reading: str = "proof"

    @property
    def certified(self) -> bool:
        """True when 32 pi^2 - alpha > M / t0, which excludes a maximizer."""
        return 32 * PI**2 - self.alpha > self.alpha_star_star

    def summary(self) -> dict:
        return {"alpha": self.alpha, "level": 32 * PI**2 - self.alpha, "t0": self.t0,
                "M": self.M, "alpha_star_star": self.alpha_star_star,
                "certified": self.certified, "max_truncation": float(np.max(self.truncation)),
                "reading": self.reading}

    def to_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "F", "truncation"])
            for row in zip(self.t, self.F, self.truncation):
                w.writerow([repr(float(x)) for x in row])
        return path


DEFAULT_T_GRID = np.linspace(0.0, 0.36, 181)


def critical_sup_estimate(grid: RadialGrid | None = None,
                          opts: MaximizerOptions | None = None) -> float:
    """M: sup of int exp(32 pi^2 u^2) - 1 - 32 pi^2 u^2 on the unit sphere.

    The larger of the direct solve and the ladder extrapolation.
    """
    opts = opts or MaximizerOptions(refine=False)
    rep = maximize_on_sphere(FunctionalSpec(32 * PI**2, 32 * PI**2, 4), grid, None, opts)
    return max(rep.value, rep.diagnostics.get("ladder_extrapolated", rep.value))


def nonexistence_bound(alpha: float, t_grid=None, M: float | None = None, *,
                       reading: str = "proof") -> NonexistenceBound:
    """Evaluate F on ``t_grid`` (which must stay below 1/e).

    t0 is the last grid point up to which F is nonincreasing; the estimate
    M / t0 is infinite when F already increases at the first step.
    """
    t = np.asarray(DEFAULT_T_GRID if t_grid is None else t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("t_grid must be a nonempty 1-D sequence")
    if np.any(t < 0) or np.any(t >= T_LIMIT):
        raise ValueError("t_grid must lie in [0, 1/e)")
    if np.any(np.diff(t) <= 0):
        raise ValueError("t_grid must be increasing")
    if M is None:
        M = critical_sup_estimate()
    if M < 0:
        raise ValueError("M must be nonnegative")
    vals = np.empty_like(t)
    trunc = np.empty_like(t)
    for i, ti in enumerate(t):
        vals[i], trunc[i] = F_value(alpha, float(ti), reading=reading)
    i0 = 0
    while i0 + 1 < t.size and vals[i0 + 1] <= vals[i0]:
        i0 += 1
    t0 = float(t[i0])
    ass = M / t0 if t0 > 0 else math.inf
    return NonexistenceBound(float(alpha), t, vals, trunc, t0, float(M), ass, reading)


def certified_level(M: float, t_grid=None, *, lo: float = 100.0, hi: float = 1e5,
                    rtol: float = 1e-4, reading: str = "proof") -> float:
    """Smallest level d = 32 pi^2 - alpha with d > M / t0(d), by bisection.

    t0 grows with d, so the certification is monotone in d.
    """
    crit = 32 * PI**2

    def ok(d):
        return nonexistence_bound(crit - d, t_grid, M, reading=reading).certified

    if not ok(hi):
        return math.inf
    while ok(lo) and lo > 1e-6:
        lo *= 0.5
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if ok(mid) else (mid, hi)
    return hi


# -- threshold sweep -------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    alpha: float
    report: MaximizerReport
    d_nv: float
    d_nc: float | None

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "value": self.report.value,
                "classification": self.report.classification, "d_nv": self.d_nv,
                "d_nc": self.d_nc, "diagnostics": self.report.diagnostics}


@dataclass(frozen=True)
class SweepResult:
    dimension: int
    rows: tuple
    bracket: tuple            # (largest attained level, smallest vanishing level)
    transfer_violations: tuple = ()
    monotonicity_violations: tuple = ()

    @property
    def consistent(self) -> bool:
        return not self.transfer_violations and not self.monotonicity_violations

    def summary(self) -> dict:
        return {"dimension": self.dimension, "rows": [r.as_dict() for r in self.rows],
                "bracket": list(self.bracket),
                "transfer_violations": list(self.transfer_violations),
                "monotonicity_violations": list(self.monotonicity_violations)}

    def to_json(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.summary(), indent=2, sort_keys=True) + "\n")
        return path


def sweep_alphas(dimension: int, gn_constant: float,
                 fractions=(8.0, 5.0, 3.0, 2.0, 1.5, 1.25, 1.1, 1.0, 0.9, 0.75, 0.5, 0.25)):
    """Ascending alphas with crit - alpha = f * crit^2 B / 2 for each fraction f."""
    crit = critical_exponent(dimension)
    t = crit * crit * gn_constant / 2.0
    return sorted(crit - f * t for f in fractions)


def threshold_sweep(alpha_list, dimension: int = 4, opts: MaximizerOptions | None = None, *,
                    grid: RadialGrid | None = None,
                    d_nc: float | None = None) -> SweepResult:
    """Maximize at beta = critical for each alpha and bracket the threshold.

    ``d_nc`` defaults to the whole-space concentration level on R^4 and is
    left empty on R^2.
    """
    alphas = [float(a) for a in alpha_list]
    if not alphas:
        raise ValueError("alpha_list is empty")
    if any(b < a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("alpha_list must be sorted ascending")
    crit = critical_exponent(dimension)
    if any(not a < crit for a in alphas):
        raise ValueError("every alpha must be below the critical exponent")
    if d_nc is None and dimension == 4:
        d_nc = whole_space_concentration_bound(fundamental_solution().regular_part_A)
    grid = grid or default_grid(dimension)
    rows = []
    for a in alphas:
        rep = maximize_on_sphere(FunctionalSpec(crit, a, dimension), grid, None, opts)
        rows.append(SweepRow(a, rep, crit - a, d_nc))
    transfer, mono = [], []
    seen_attained = None
    for r in rows:
        if r.report.classification == "attained":
            seen_attained = seen_attained if seen_attained is not None else r.alpha
        elif seen_attained is not None:
            transfer.append(r.alpha)
    for r1, r2 in zip(rows, rows[1:]):
        if r2.alpha > r1.alpha and r2.report.value > r1.report.value + 1e-8:
            mono.append(r2.alpha)
    att = [r.d_nv for r in rows if r.report.classification == "attained"]
    van = [r.d_nv for r in rows if r.report.classification == "vanishing-dominated"]
    bracket = (max(att) if att else None, min(van) if van else None)
    return SweepResult(dimension, tuple(rows), bracket, tuple(transfer), tuple(mono))

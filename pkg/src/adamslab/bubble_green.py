"""Bubble, Green functions and concentration levels on R^4.

* psi(r) = (1/16 pi^2) log(1 / (1 + k r^2)), k = pi/sqrt(6), solves
  Delta^2 psi = exp(64 pi^2 psi) with unit total mass.
* The ball Green function of Delta^2 with pole at 0 and clamped boundary.
* The fundamental solution Gamma of Delta^2 + 1, obtained by radial Fourier
  inversion of (16 pi^4 |xi|^4 + 1)^{-1}:

      Gamma(r) = (1/4 pi^2) int_0^inf x^2 J_1(x) / (x^4 + r^4) dx,

  and its regular part Gamma(r) + (1/8 pi^2) ln r -> A as r -> 0.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import mpmath
import numpy as np
from scipy.special import j1, jn_zeros

from .errors import ConvergenceError
from .radial import RadialField, RadialGrid, bilaplacian, build_grid

PI = math.pi
K_BUBBLE = PI / math.sqrt(6.0)
C_LOG = 1.0 / (8 * PI**2)        # coefficient of -ln r in Gamma


# -- bubble -------------------------------------------------------------------

@dataclass(frozen=True)
class BubbleProfile:
    k: float = K_BUBBLE

    def __call__(self, r):
        return -np.log1p(self.k * np.asarray(r, dtype=float) ** 2) / (16 * PI**2)

    def density(self, r):
        """exp(64 pi^2 psi) = (1 + k r^2)^{-4}."""
        return (1.0 + self.k * np.asarray(r, dtype=float) ** 2) ** -4

    def tail_mass(self, radius: float) -> float:
        """int_{|x| > radius} (1 + k r^2)^{-4} dx in closed form."""
        x = self.k * radius**2
        return PI**2 / self.k**2 * (0.5 / (1 + x) ** 2 - 1.0 / (3 * (1 + x) ** 3))


def bubble(r):
    return BubbleProfile()(r)


def bubble_mass(grid: RadialGrid | None = None) -> float:
    """int_{R^4} exp(64 pi^2 psi) dx: quadrature on the grid plus the exact tail."""
    grid = grid or build_grid(4, 20.0, 2048, "algebraic-stretched")
    b = BubbleProfile()
    return grid.integrate(b.density(grid.nodes)) + b.tail_mass(grid.r_max)


def bubble_residual(r_lo: float = 0.1, r_hi: float = 10.0,
                    grid: RadialGrid | None = None) -> float:
    """sup over r_lo <= r <= r_hi of |Delta^2 psi - exp(64 pi^2 psi)| (finite differences)."""
    grid = grid or build_grid(4, 16.0, 1024, "uniform")
    b = BubbleProfile()
    psi = grid.sample(b)
    res = bilaplacian(psi).values - b.density(grid.nodes)
    mask = (grid.nodes >= r_lo) & (grid.nodes <= r_hi)
    return float(np.max(np.abs(res[mask])))


# -- ball Green function ---------------------------------------------------------

@dataclass(frozen=True)
class GreenBall:
    """G(r) = (1/8 pi^2) ln(R/r) + (r^2/R^2 - 1)/(16 pi^2) on the ball of radius R."""

    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        R = self.radius
        return C_LOG * np.log(R / r) + ((r / R) ** 2 - 1.0) / (16 * PI**2)

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        return ((r / self.radius) ** 2 - 1.0) / (8 * PI**2 * r)

    @property
    def regular_part_at_0(self) -> float:
        """A_0(R) = (1/8 pi^2) ln R - 1/(16 pi^2)."""
        return C_LOG * math.log(self.radius) - 1.0 / (16 * PI**2)


def green_ball(R: float) -> GreenBall:
    return GreenBall(float(R))


def ball_concentration_bound(R: float) -> float:
    """(1/3) |B_R| exp(-1/3) with |B_R| = pi^2 R^4 / 2."""
    if not R > 0:
        raise ValueError("R must be positive")
    return (PI**2 * R**4 / 2.0) * math.exp(-1.0 / 3.0) / 3.0


def radial_bilaplacian_hp(func, r, dps: int = 40) -> float:
    """Delta^2 of a radial function on R^4 at r, by high-precision differentiation.

    Uses Delta^2 u = u^(4) + 6 u^(3)/r + 3 u^(2)/r^2 - 3 u^(1)/r^3.  ``func``
    must accept mpmath numbers.  Double-precision stencils lose ~eps/h^4
    here, far above the 1e-6 level for logarithmic profiles.
    """
    with mpmath.workdps(dps):
        x = mpmath.mpf(r)
        d1, d2, d3, d4 = (mpmath.diff(func, x, n) for n in (1, 2, 3, 4))
        return float(d4 + 6 * d3 / x + 3 * d2 / x**2 - 3 * d1 / x**3)


def green_ball_residual(R: float = 1.0, samples: int = 41) -> float:
    """sup of |Delta^2 G| over R/10 <= r <= 0.9 R."""
    Rm = mpmath.mpf(R)

    def f(r):
        return (mpmath.log(Rm / r) / (8 * mpmath.pi**2)
                + ((r / Rm) ** 2 - 1) / (16 * mpmath.pi**2))

    rs = np.linspace(R / 10, 0.9 * R, samples)
    return max(abs(radial_bilaplacian_hp(f, x)) for x in rs)


def whole_space_concentration_bound(A: float) -> float:
    """d_nc = (pi^2/6) exp(5/3 + 32 pi^2 A)."""
    return PI**2 / 6.0 * math.exp(5.0 / 3.0 + 32 * PI**2 * A)


# -- fundamental solution of Delta^2 + 1 -----------------------------------------

@dataclass(frozen=True)
class QuadOptions:
    panels: int = 40          # zero-to-zero panels of J_1 beyond the first zero
    order: int = 24           # Gauss-Legendre points per panel
    head_panels: int = 40     # geometric panels on [0, j_{1,1}]
    average: int = 16         # partial sums entering the repeated averaging


_ZEROS = np.concatenate([[0.0], jn_zeros(1, 2000)])


def _repeated_average(s: np.ndarray) -> np.ndarray:
    """Iterated mean of neighbouring partial sums (last axis); damps the alternating tail."""
    while s.shape[-1] > 1:
        s = 0.5 * (s[..., 1:] + s[..., :-1])
    return s[..., 0]


def _oscillatory_integral(r: float, p: int, opts: QuadOptions) -> tuple[float, float]:
    """int_0^inf x^p J_1(x) / (x^4 + r^4) dx and an error estimate."""
    r4 = r**4
    gx, gw = np.polynomial.legendre.leggauss(opts.order)

    def f(x):
        return x**p * j1(x) / (x**4 + r4)

    def panel_sums(a, b):
        xs = 0.5 * (a + b)[:, None] + 0.5 * (b - a)[:, None] * gx[None, :]
        return (f(xs) * gw[None, :]).sum(axis=1) * 0.5 * (b - a)

    z1 = _ZEROS[1]
    lo = min(r, z1) * 1e-3
    head_edges = np.concatenate([[0.0], np.geomspace(lo, z1, opts.head_panels)])

    def head(n):
        edges = np.concatenate([[0.0], np.geomspace(lo, z1, n)])
        return panel_sums(edges[:-1], edges[1:]).sum()

    h1 = panel_sums(head_edges[:-1], head_edges[1:]).sum()
    h2 = head(2 * opts.head_panels)
    # the algebraic peak sits near x ~ r, so large r needs more zero panels
    n_pan = opts.panels + int(math.ceil(2.0 * r / PI))
    if n_pan + 2 > _ZEROS.size:
        raise ConvergenceError(f"radius {r} too large for the tabulated J_1 zeros")
    a = _ZEROS[1:n_pan + 1]
    b = _ZEROS[2:n_pan + 2]
    partial = h2 + np.cumsum(panel_sums(a, b))
    m = opts.average
    est = _repeated_average(partial[-m:])
    est_prev = _repeated_average(partial[-m - 1:-1])
    return float(est), float(abs(est - est_prev) + abs(h2 - h1))


def gamma_values(r, opts: QuadOptions = QuadOptions()):
    """Gamma(r) and per-radius error estimates."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r <= 0):
        raise ValueError("Gamma is evaluated at r > 0 only")
    out = np.empty_like(r)
    err = np.empty_like(r)
    for i, ri in enumerate(r):
        v, e = _oscillatory_integral(ri, 2, opts)
        out[i], err[i] = v / (4 * PI**2), e / (4 * PI**2)
    return out, err


def lap_phi_values(r, opts: QuadOptions = QuadOptions()):
    """Delta(Gamma + (1/8 pi^2) ln r) = (r^2 / 4 pi^2) int J_1(x)/(x^4 + r^4) dx."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    out = np.empty_like(r)
    for i, ri in enumerate(r):
        out[i] = ri**2 * _oscillatory_integral(ri, 0, opts)[0] / (4 * PI**2)
    return out


DEFAULT_LADDER = np.geomspace(1e-3, 20.0, 61)


@dataclass(frozen=True)
class FundamentalSolution:
    radii: np.ndarray
    gamma: np.ndarray
    error: np.ndarray
    regular_part_A: float
    opts: QuadOptions = field(default=QuadOptions())
    small_r_coeff: float = 0.0   # phi(r) ~ small_r_coeff * r^2 near 0

    def phi_table(self) -> np.ndarray:
        return self.gamma + C_LOG * np.log(self.radii) - self.regular_part_A

    # direct evaluation at arbitrary radii (no interpolation)
    def gamma_at(self, r):
        return gamma_values(r, self.opts)[0]

    def phi_at(self, r, r_floor: float = 1e-4):
        """phi(r) = Gamma + (1/8 pi^2) ln r - A, with phi ~ c r^2 below r_floor."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = self.small_r_coeff * r**2
        big = r >= r_floor
        if np.any(big):
            out[big] = self.gamma_at(r[big]) + C_LOG * np.log(r[big]) - self.regular_part_A
        return out

    def lap_phi_at(self, r, r_floor: float = 1e-4):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.full_like(r, 8.0 * self.small_r_coeff)
        big = r >= r_floor
        if np.any(big):
            out[big] = lap_phi_values(r[big], self.opts)
        return out

    def to_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["r", "Gamma", "phi"])
            for r, g, p in zip(self.radii, self.gamma, self.phi_table()):
                w.writerow([repr(float(r)), repr(float(g)), repr(float(p))])
        return path


def _extract_A(opts: QuadOptions, r_small: float = 1e-2, levels: int = 4,
               tol: float = 1e-8):
    """Richardson on a(r) = Gamma(r) + (1/8 pi^2) ln r = A + c r^2 + O(r^4 ln r)."""
    rs = r_small * 2.0 ** -np.arange(levels)
    a = gamma_values(rs, opts)[0] + C_LOG * np.log(rs)
    rich = (4.0 * a[1:] - a[:-1]) / 3.0
    if abs(rich[-1] - rich[-2]) > tol:
        raise ConvergenceError(
            f"regular part extrapolation not settling: {rich[-2]:.3e} vs {rich[-1]:.3e}")
    A = float(rich[-1])
    c = float((a[-1] - A) / rs[-1] ** 2)
    return A, c, rich


def fundamental_solution(ladder=None, quad_opts: QuadOptions | None = None) -> FundamentalSolution:
    """Tabulate Gamma on ``ladder`` and extract the regular-part constant."""
    opts = quad_opts or QuadOptions()
    radii = np.asarray(DEFAULT_LADDER if ladder is None else ladder, dtype=float)
    if radii.min() > 1e-3 or radii.max() < 20.0:
        raise ValueError("ladder must span at least [1e-3, 20]")
    g, err = gamma_values(radii, opts)
    A, c, _ = _extract_A(opts)
    return FundamentalSolution(radii, g, err, A, opts, c)


def regular_part_A(fs: FundamentalSolution) -> float:
    return fs.regular_part_A


def gamma_residual(fs: FundamentalSolution, r_lo: float = 0.5, r_hi: float = 5.0,
                   node_count: int = 400) -> float:
    """sup |(Delta^2 + 1) Gamma| on [r_lo, r_hi] via grid finite differences."""
    grid = build_grid(4, r_hi * 1.2, node_count, "uniform", r_min=r_lo * 0.6)
    vals = RadialField(grid, fs.gamma_at(grid.nodes))
    res = bilaplacian(vals).values + vals.values
    mask = (grid.nodes >= r_lo) & (grid.nodes <= r_hi)
    return float(np.max(np.abs(res[mask])))

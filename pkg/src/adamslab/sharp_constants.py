"""Bounds for the Gagliardo-Nirenberg constants and the critical exponents.

Conventions on R^4:  B_k is the best constant in

    ||u||_{2k}^{2k} <= B_k ||Delta u||_2^{2(k-1)} ||u||_2^2,

and C_j is the constant of the interpolation step that feeds B_j through
``bj_from_cj``.  Everything here is closed form or a one-dimensional
quadrature, so results are reproducible to the last bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .radial import sphere_area

PI = math.pi
CRIT4 = 32.0 * PI**2
CRIT2 = 4.0 * PI

METHODS = ("chain", "formula", "trial-family", "ground-state", "interval")


@dataclass(frozen=True)
class ConstantBound:
    """A numeric bracket for B_k (or C_j) together with where it came from."""

    k_or_j: int
    lower: float | None = None
    upper: float | None = None
    method: str = "chain"
    notes: str = ""

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        for v in (self.lower, self.upper):
            if v is not None and not (v > 0 and math.isfinite(v)):
                raise ValueError("bounds must be finite and positive")
        if self.lower is not None and self.upper is not None and self.lower > self.upper:
            raise ValueError("lower bound exceeds upper bound")

    def as_row(self) -> dict:
        return {"index": self.k_or_j, "lower": self.lower, "upper": self.upper,
                "method": self.method}


@dataclass(frozen=True)
class YoungConstant:
    t: float
    value: float


def _conjugate(t: float) -> float:
    return t / (t - 1.0)


def young_constant(t: float) -> float:
    """A_t = (t^{1/t} / t'^{1/t'})^{1/2} with 1/t + 1/t' = 1."""
    if not t > 1:
        raise ValueError("young_constant needs t > 1")
    tp = _conjugate(t)
    return math.sqrt(t ** (1.0 / t) / tp ** (1.0 / tp))


def kernel_integral(j: float, *, method: str = "closed-form") -> float:
    """int_{R^4} (16 pi^4 |xi|^4 + 1)^{-j'} d xi with j' = j/(j-1).

    With u = 16 pi^4 rho^4 the integral becomes int_0^inf (1+u)^{-j'} du / (32 pi^2),
    which equals (j-1)/(32 pi^2).  ``method="quadrature"`` evaluates the reduced
    one-dimensional integral numerically instead.
    """
    if not j > 1:
        raise ValueError("kernel_integral needs j > 1")
    jp = _conjugate(j)
    if method == "closed-form":
        return (j - 1.0) / CRIT4
    if method == "quadrature":
        # split at u = 1 and map the tail by u = 1/x to a finite interval
        head, _ = integrate.quad(lambda u: (1.0 + u) ** (-jp), 0.0, 1.0,
                                 epsabs=0, epsrel=1e-13)
        tail, _ = integrate.quad(lambda x: x ** (jp - 2.0) * (1.0 + x) ** (-jp),
                                 0.0, 1.0, epsabs=0, epsrel=1e-13, limit=200)
        return (head + tail) / CRIT4
    raise ValueError(f"unknown method {method!r}")


def chain_a_factor(j: int) -> float:
    """(A_{2j/(2j-1)} A_j / A_{2j})^4."""
    return (young_constant(2 * j / (2 * j - 1)) * young_constant(j)
            / young_constant(2 * j)) ** 4


def cj_chain_upper(j: int) -> float:
    """Young / Hausdorff-Young chain bound for C_j."""
    if int(j) != j or j < 2:
        raise ValueError("cj_chain_upper needs an integer j >= 2")
    jp = _conjugate(j)
    middle = math.sqrt(jp ** (1.0 / jp) * j ** (-1.0 / j))
    return chain_a_factor(j) * middle * kernel_integral(j) ** (1.0 / jp)


def bj_from_cj(j: int, c_j: float) -> float:
    """B_j = C_j^j j^j / (j-1)^{j-1}."""
    if j < 2:
        raise ValueError("bj_from_cj needs j >= 2")
    if not c_j > 0:
        raise ValueError("c_j must be positive")
    return c_j**j * j**j / (j - 1) ** (j - 1)


READINGS = ("proof", "display")


def _first_factor_log(k: int, reading: str) -> float:
    # the two readings differ only in the base of the leading 2k-th power
    if reading == "proof":
        return 2 * k * math.log(2 * k / (2 * k - 1))
    if reading == "display":
        return 2 * k * math.log1p(2 * k / (2 * k - 1))
    raise ValueError(f"reading must be one of {READINGS}")


def log_bk_formula_upper(k: int, reading: str = "proof") -> float:
    """Natural log of :func:`bk_formula_upper`; safe for every k >= 2."""
    if int(k) != k or k < 2:
        raise ValueError("bk_formula_upper needs an integer k >= 2")
    k = int(k)
    return (-math.log(4.0)
            + _first_factor_log(k, reading)
            + (2 * k - 2) * math.log(2 * (k - 1) / (2 * k - 1))
            + 0.5 * (k - 1) * math.log(k / (k - 1))
            - 0.5 * math.log(k)
            + k * math.log(k / CRIT4)
            + math.log(CRIT4))


def bk_formula_upper(k: int, reading: str = "proof") -> float:
    """Explicit upper bound for B_k, evaluated in log space above k = 20.

    The leading factor is (2k/(2k-1))^{2k} under ``reading="proof"`` and
    (1 + 2k/(2k-1))^{2k} under ``reading="display"``.  Only the first one
    reproduces the chain value at k = 2 and the large-k asymptotic
    (8 pi^2 sqrt(e)/sqrt(k)) (k/32 pi^2)^k; the second is larger by ~4^k.
    """
    if int(k) != k or k < 2:
        raise ValueError("bk_formula_upper needs an integer k >= 2")
    if reading not in READINGS:
        raise ValueError(f"reading must be one of {READINGS}")
    if k > 20:
        return math.exp(log_bk_formula_upper(k, reading))
    base = 2 * k / (2 * k - 1) if reading == "proof" else 1 + 2 * k / (2 * k - 1)
    return (0.25 * base ** (2 * k)
            * (2 * (k - 1) / (2 * k - 1)) ** (2 * k - 2)
            * math.sqrt((k / (k - 1)) ** (k - 1)) / math.sqrt(k)
            * (k / CRIT4) ** k * CRIT4)


def bk_asymptotic(k: int) -> float:
    """(8 pi^2 sqrt(e) / sqrt(k)) (k / 32 pi^2)^k, in log space."""
    return math.exp(math.log(8 * PI**2) + 0.5 - 0.5 * math.log(k)
                    + k * math.log(k / CRIT4))


# -- trial functions ----------------------------------------------------------

def _trial_moments(gamma: float):
    """Exact ||u||_4^4, ||u||_2^2, ||Delta u||_2^2 for u = (1+r)^{-gamma} on R^4."""
    om = sphere_area(4)
    g = gamma
    beta = special.beta
    n4 = om * beta(4, 4 * g - 4)
    n2 = om * beta(4, 2 * g - 4)
    # Delta u = g(g+1)(1+r)^{-g-2} - 3g r^{-1} (1+r)^{-g-1}
    lap = om * (g * g * (g + 1) ** 2 * beta(4, 2 * g)
                - 6 * g * g * (g + 1) * beta(3, 2 * g)
                + 9 * g * g * beta(2, 2 * g))
    return n4, n2, lap


def trial_quotient(gamma: float, *, method: str = "closed-form") -> float:
    """GN quotient of (1+r)^{-gamma} on R^4.

    ``closed-form`` uses Beta-function moments.  ``quadrature`` integrates the
    analytic radial integrands adaptively; the profile has a kink at the
    origin, so grid finite differences are not used here.
    """
    if not gamma > 2:
        raise ValueError("trial_quotient needs gamma > 2")
    if method == "closed-form":
        n4, n2, lap = _trial_moments(gamma)
        return n4 / (lap * n2)
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    g = gamma
    om = sphere_area(4)

    def moment(f):
        # natural scale of the profile is 1/g; split there and at 1
        pts = sorted({1.0 / g, 10.0 / g, 1.0})
        total, edges = 0.0, [0.0] + pts + [np.inf]
        for lo, hi in zip(edges[:-1], edges[1:]):
            total += integrate.quad(f, lo, hi, epsabs=0, epsrel=1e-12, limit=400)[0]
        return om * total

    n4 = moment(lambda x: x**3 * (1 + x) ** (-4 * g))
    n2 = moment(lambda x: x**3 * (1 + x) ** (-2 * g))
    lap = moment(lambda x: x * (g * (g + 1) * x * (1 + x) ** (-g - 2)
                                - 3 * g * (1 + x) ** (-g - 1)) ** 2)
    return n4 / (lap * n2)


def trial_family_limit() -> float:
    """gamma -> infinity limit of the (1+r)^{-gamma} quotient.

    (1 + r/gamma)^{-gamma} -> e^{-r}, and the quotient is dilation invariant,
    so the limit is the quotient of e^{-r}: (6/256) / (2 pi^2 * 9/8 * 6/16).
    """
    return (6 / 256) / (2 * PI**2 * (9 / 8) * (6 / 16))


def gaussian_quotient() -> float:
    """Exact GN quotient of e^{-r^2/2} on R^4."""
    return 1.0 / (24 * PI**2)


def trial_family_lower_bound(gamma_list=(5, 10, 20, 50, 100, 200), *,
                             include_gaussian: bool = True) -> ConstantBound:
    """Best lower bound for B_2 over a gamma ladder, optionally with the Gaussian."""
    gammas = list(gamma_list)
    if not gammas:
        raise ValueError("gamma_list is empty")
    values = [trial_quotient(g) for g in gammas]
    best_i = int(np.argmax(values))
    best = values[best_i]
    notes = (f"family best {best:.10e} at gamma={gammas[best_i]}; "
             f"gamma->inf limit {trial_family_limit():.10e}")
    if include_gaussian:
        gq = gaussian_quotient()
        notes += f"; gaussian {gq:.10e}"
        best = max(best, gq)
    upper = bj_from_cj(2, cj_chain_upper(2))
    return ConstantBound(2, lower=best, upper=upper, method="trial-family", notes=notes)


def b2_interval() -> ConstantBound:
    """[Gaussian quotient, chain bound] for B_2."""
    return ConstantBound(2, lower=gaussian_quotient(),
                         upper=bj_from_cj(2, cj_chain_upper(2)), method="interval",
                         notes="gaussian trial / Young chain")


def lem3_infimum(a: float, b: float, M: float, N: float) -> tuple[float, float]:
    """Minimizer and minimum of h(s) = s^a M + s^{-b} N over s > 0."""
    if min(a, b, M, N) <= 0:
        raise ValueError("lem3_infimum needs a, b, M, N > 0")
    s_star = (b * N / (a * M)) ** (1.0 / (a + b))
    value = ((a + b) / a * (b / a) ** (-b / (a + b))
             * M ** (b / (a + b)) * N ** (a / (a + b)))
    return s_star, value


def critical_constants(n: int, m: int) -> float:
    """Adams exponent beta(n, m); for m = 1 the Moser exponent n omega_{n-1}^{1/(n-1)}."""
    if int(n) != n or int(m) != m or not 1 <= m < n:
        raise ValueError("need integers 1 <= m < n")
    omega = 2 * PI ** (n / 2) / special.gamma(n / 2)
    if m == 1:
        return n * omega ** (1.0 / (n - 1))
    g = special.gamma
    if m % 2 == 0:
        inner = PI ** (n / 2) * 2**m * g(m / 2) / g((n - m) / 2)
    else:
        inner = PI ** (n / 2) * 2**m * g((m + 1) / 2) / g((n - m + 1) / 2)
    return n / omega * inner ** (n / (n - m))


def constants_table(k_max: int = 6) -> list[ConstantBound]:
    """Rows for the constants export: chain bounds then formula bounds."""
    rows = [b2_interval()]
    for j in range(3, k_max + 1):
        rows.append(ConstantBound(j, upper=bj_from_cj(j, cj_chain_upper(j)),
                                  method="chain"))
    for k in range(2, k_max + 1):
        rows.append(ConstantBound(k, upper=bk_formula_upper(k), method="formula",
                                  notes="proof reading"))
    return rows

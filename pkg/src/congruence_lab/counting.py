"""Weighted counts of small solutions to diagonal quadratic congruences.

A weighted count T sums a product of one-dimensional weights over lattice
points satisfying Q(x) = 0 mod p^m under a coprimality side condition.
Two independent evaluations are provided: direct enumeration over a
truncated box (with the congruence resolved by modular square roots in the
solved coordinate), and the spectral route through the dual kernel F, whose
zero frequency is the main term T0.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from typing import NamedTuple

import numpy as np

from .charsums import kloosterman_closed, salie_closed
from .densities import (
    DiagonalForm,
    count_B_m,
    cyclic_convolution_exact,
    square_value_histogram,
)
from .errors import (
    TruncationInsufficient,
    ValidationError,
    charge,
    resolve_budget,
)
from .modmath import PrimePowerModulus, epsilon_c, invmod, jacobi_symbol

GAUSSIAN = "gaussian"
BUMP_PAIR = "bump_pair"
SHARP_CUTOFF = "sharp_cutoff"

UNIT_COORDS = "unit-coords"
NOT_ALL_ZERO = "not-all-zero"

WEIGHT_NEGLIGIBLE = 1e-12
FOURIER_NEGLIGIBLE = 1e-14


@dataclass(frozen=True)
class WeightSpec:
    """A nonnegative Schwartz-type weight with an evaluable Fourier transform.

    kind "gaussian": exp(-pi x^2 / sigma^2), self-dual up to scaling.
    kind "bump_pair": the square of the Fourier transform of the standard
    compactly supported bump scaled to [-radius, radius]; its own Fourier
    transform is the bump self-convolution, supported on [-2 radius, 2 radius].
    kind "sharp_cutoff": the indicator of [-radius, radius] (direct counts
    only; it is not Schwartz and fails the spectral tail checks).
    """

    kind: str
    sigma: float = 1.0
    radius: float = 1.0
    quad_tol: float = 1e-10

    def __post_init__(self) -> None:
        if self.kind not in (GAUSSIAN, BUMP_PAIR, SHARP_CUTOFF):
            raise ValidationError(f"unknown weight kind {self.kind!r}")
        if self.sigma <= 0 or self.radius <= 0:
            raise ValidationError("weight shape parameters must be positive")

    @property
    def cached_fourier_at_zero(self) -> float:
        return fourier_at_zero(self)


def gaussian_weight(sigma: float = 1.0) -> WeightSpec:
    return WeightSpec(GAUSSIAN, sigma=sigma)


def bump_pair_weight(radius: float = 1.0) -> WeightSpec:
    return WeightSpec(BUMP_PAIR, radius=radius)


def sharp_cutoff_weight(radius: float = 1.0) -> WeightSpec:
    return WeightSpec(SHARP_CUTOFF, radius=radius)


def _seed_bump(x: float) -> float:
    """The standard bump exp(-1/(1-x^2)) on (-1, 1)."""
    if abs(x) >= 1.0:
        return 0.0
    return math.exp(-1.0 / (1.0 - x * x))


_BUMP_GRID_T = 30.0
_BUMP_GRID_STEP = 0.02
_CONV_GRID_STEP = 0.005


@lru_cache(maxsize=4)
def _bump_tables(quad_tol: float):
    """Cached cubic-spline tables for the seed bump transform and self-convolution.

    Returns (fhat spline on [0, T], fhat(0), (f*f) spline on [0, 2],
    support cutoff t* beyond which (fhat/fhat(0))^2 < 1e-12).
    """
    from scipy.integrate import quad
    from scipy.interpolate import CubicSpline

    ts = np.arange(0.0, _BUMP_GRID_T + _BUMP_GRID_STEP / 2, _BUMP_GRID_STEP)
    fhat = np.empty_like(ts)
    fhat[0] = quad(_seed_bump, -1.0, 1.0, epsabs=quad_tol, limit=200)[0]
    for i, t in enumerate(ts[1:], start=1):
        fhat[i] = quad(
            _seed_bump, -1.0, 1.0, weight="cos", wvar=2.0 * math.pi * t,
            epsabs=quad_tol, limit=200,
        )[0]
    zs = np.arange(0.0, 2.0 + _CONV_GRID_STEP / 2, _CONV_GRID_STEP)
    conv = np.empty_like(zs)
    for i, z in enumerate(zs):
        lo, hi = max(-1.0, z - 1.0), min(1.0, z + 1.0)
        conv[i] = quad(
            lambda u, z=z: _seed_bump(u) * _seed_bump(z - u), lo, hi,
            epsabs=quad_tol, limit=200,
        )[0]
    conv[-1] = 0.0  # support endpoint is exact
    threshold = 1e-6 * fhat[0]
    above = np.nonzero(np.abs(fhat) >= threshold)[0]
    t_star = ts[above[-1]] + _BUMP_GRID_STEP if len(above) else _BUMP_GRID_T
    return CubicSpline(ts, fhat), float(fhat[0]), CubicSpline(zs, conv), float(t_star)


def weight_eval(w: WeightSpec, x: float) -> float:
    """The weight value at x, normalized so the Gaussian has value 1 at 0."""
    if w.kind == GAUSSIAN:
        return math.exp(-math.pi * x * x / (w.sigma * w.sigma))
    if w.kind == SHARP_CUTOFF:
        return 1.0 if abs(x) <= w.radius else 0.0
    spline, fhat0, _, t_star = _bump_tables(w.quad_tol)
    t = w.radius * abs(x)
    if t >= _BUMP_GRID_T:
        return 0.0
    ratio = float(spline(t)) / fhat0
    return ratio * ratio


def weight_fourier(w: WeightSpec, y: float) -> float:
    """The Fourier transform at y (real: all weights here are real and even)."""
    if w.kind == GAUSSIAN:
        return w.sigma * math.exp(-math.pi * (w.sigma * y) ** 2)
    if w.kind == SHARP_CUTOFF:
        if y == 0.0:
            return 2.0 * w.radius
        return math.sin(2.0 * math.pi * w.radius * y) / (math.pi * y)
    z = abs(y) / w.radius
    if z >= 2.0:
        return 0.0
    _, fhat0, conv_spline, _ = _bump_tables(w.quad_tol)
    return float(conv_spline(z)) / (w.radius * fhat0 * fhat0)


def _weight_eval_vec(w: WeightSpec, xs: np.ndarray) -> np.ndarray:
    if w.kind == GAUSSIAN:
        return np.exp(-math.pi * xs * xs / (w.sigma * w.sigma))
    if w.kind == SHARP_CUTOFF:
        return (np.abs(xs) <= w.radius).astype(float)
    spline, fhat0, _, _ = _bump_tables(w.quad_tol)
    ts = w.radius * np.abs(xs)
    vals = np.where(ts < _BUMP_GRID_T, spline(np.minimum(ts, _BUMP_GRID_T)), 0.0)
    return (vals / fhat0) ** 2


def _weight_fourier_vec(w: WeightSpec, ys: np.ndarray) -> np.ndarray:
    if w.kind == GAUSSIAN:
        return w.sigma * np.exp(-math.pi * (w.sigma * ys) ** 2)
    if w.kind == SHARP_CUTOFF:
        out = np.full_like(ys, 2.0 * w.radius, dtype=float)
        nz = ys != 0
        out[nz] = np.sin(2.0 * math.pi * w.radius * ys[nz]) / (math.pi * ys[nz])
        return out
    _, fhat0, conv_spline, _ = _bump_tables(w.quad_tol)
    zs = np.abs(ys) / w.radius
    vals = np.where(zs < 2.0, conv_spline(np.minimum(zs, 2.0)), 0.0)
    return vals / (w.radius * fhat0 * fhat0)


@lru_cache(maxsize=64)
def fourier_at_zero(w: WeightSpec) -> float:
    return weight_fourier(w, 0.0)


def weight_support_cutoff(w: WeightSpec) -> float:
    """x beyond which the weight drops below the negligibility threshold."""
    if w.kind == GAUSSIAN:
        return 6.0 * w.sigma
    if w.kind == SHARP_CUTOFF:
        return w.radius
    _, _, _, t_star = _bump_tables(w.quad_tol)
    return t_star / w.radius


def fourier_tail_cutoff(w: WeightSpec) -> float:
    """y beyond which |Fourier transform| < 1e-14 * its value at 0."""
    if w.kind == GAUSSIAN:
        return math.sqrt(-math.log(FOURIER_NEGLIGIBLE) / math.pi) / w.sigma
    if w.kind == BUMP_PAIR:
        return 2.0 * w.radius  # exactly supported
    return math.inf  # sharp cutoff: sinc tails never become negligible


def _weight_decay_envelope(w: WeightSpec, x: float) -> float:
    """Monotone majorant of the weight beyond |x| (safe for oscillating tails)."""
    if w.kind in (GAUSSIAN, SHARP_CUTOFF):
        return weight_eval(w, x)
    spline, fhat0, _, t_star = _bump_tables(w.quad_tol)
    t = w.radius * abs(x)
    if t >= t_star:
        return WEIGHT_NEGLIGIBLE
    # suffix maximum of |fhat| over the cached grid
    ts = np.arange(t, t_star + _BUMP_GRID_STEP, _BUMP_GRID_STEP)
    peak = float(np.max(np.abs(spline(np.minimum(ts, _BUMP_GRID_T)))))
    return (peak / fhat0) ** 2


def _fourier_decay_envelope(w: WeightSpec, y: float) -> float:
    """Monotone majorant of |Fourier transform| beyond |y|."""
    if w.kind == GAUSSIAN:
        return weight_fourier(w, y)
    if w.kind == BUMP_PAIR:
        return 0.0 if abs(y) >= 2.0 * w.radius else fourier_at_zero(w)
    if y == 0.0:
        return 2.0 * w.radius
    return min(2.0 * w.radius, 1.0 / (math.pi * abs(y)))


class PoissonCheck(NamedTuple):
    lhs: float
    rhs: float
    gap: float


def poisson_identity_check(
    w: WeightSpec, q: int, a: int, N: float, truncation: int
) -> PoissonCheck:
    """Numerically compare both sides of Poisson summation over a residue class.

    lhs sums the weight over m = a mod q with |m| <= truncation * q; rhs sums
    (N/q) * Fourier(n N / q) * e(n a / q) over |n| <= truncation.  Raises
    TruncationInsufficient when the weight's decay envelope says either tail
    could exceed 1e-10.
    """
    if q < 1 or N <= 0 or truncation < 1:
        raise ValidationError("need q >= 1, N > 0, truncation >= 1")
    M = truncation * q
    lhs_tail = _weight_decay_envelope(w, M / N) * (N / q + 2.0)
    rhs_tail = _fourier_decay_envelope(w, truncation * N / q) * (q / N + 2.0)
    if lhs_tail > 1e-10 or rhs_tail > 1e-10:
        raise TruncationInsufficient(
            f"tail envelopes {lhs_tail:.2g}/{rhs_tail:.2g} exceed 1e-10"
        )
    a_red = a % q
    j_lo = math.ceil((-M - a_red) / q)
    j_hi = math.floor((M - a_red) / q)
    lhs = sum(weight_eval(w, (a_red + j * q) / N) for j in range(j_lo, j_hi + 1))
    rhs_c = 0.0 + 0.0j
    for n in range(-truncation, truncation + 1):
        rhs_c += weight_fourier(w, n * N / q) * np.exp(2j * math.pi * n * a_red / q)
    rhs_c *= N / q
    return PoissonCheck(lhs, rhs_c.real, abs(lhs - rhs_c))


@dataclass(frozen=True)
class CountReport:
    """Outcome of one weighted count: T, the main term T0, and their ratio."""

    T: float
    T0: float
    ratio: float
    p: int
    m: int
    N: float
    lambdas: tuple[int, ...]
    inhomogeneous_term: int
    weight: WeightSpec
    mode: str
    strategy: str
    cost: dict
    truncation_bound: float


def local_density(form: DiagonalForm, p: int, mode: str) -> Fraction:
    """Solution density of Q = lam_{n+1} mod p under the mode's side condition,
    normalized by p^(n-1)."""
    target = form.inhomogeneous_term % p
    if mode == UNIT_COORDS:
        count = _exact_count(form.lambdas, target, p, p, units_only=True)
    elif mode == NOT_ALL_ZERO:
        count = _exact_count(form.lambdas, target, p, p, units_only=False)
        if target == 0:
            count -= 1
    else:
        raise ValidationError(f"unknown mode {mode!r}")
    return Fraction(count, p ** (form.n - 1))


def _exact_count(coeffs, target, q, p, units_only):
    acc = None
    for coeff in coeffs:
        hist = square_value_histogram(coeff, q, p, units_only)
        acc = hist if acc is None else cyclic_convolution_exact(acc, hist)
    return acc[target % q]


def _fold_convolve(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
    full = np.convolve(a, b)
    out = np.zeros(q, dtype=full.dtype)
    np.add.at(out, np.arange(len(full)) % q, full)
    return out


def _axis_data(
    form: DiagonalForm, q: int, p: int, N: float, w: WeightSpec, X: int, restrict: str
):
    """Per-coordinate admissible lattice values, weights, and residues.

    restrict is "none", "units" (x coprime to p) or "pdiv" (p | x).
    """
    xs = np.arange(-X, X + 1, dtype=np.int64)
    if restrict == "units":
        xs = xs[xs % p != 0]
    elif restrict == "pdiv":
        xs = xs[xs % p == 0]
    wts = _weight_eval_vec(w, xs / N)
    residues = [((lam % q) * ((xs * xs) % q)) % q for lam in form.lambdas]
    return xs, wts, residues


def _count_histogram(form, q, p, N, w, X, restrict, target):
    xs, wts, residues = _axis_data(form, q, p, N, w, X, restrict)
    if len(xs) == 0:
        return 0.0, {"axis_points": 0, "convolutions": 0}
    hists = []
    for res in residues:
        h = np.zeros(q)
        np.add.at(h, res, wts)
        hists.append(h)
    acc = reduce(lambda a, b: _fold_convolve(a, b, q), hists)
    cost = {"axis_points": int(len(xs) * form.n), "convolutions": form.n - 1}
    return float(acc[target % q]), cost


def _count_enumerate(form, modulus, q, p, N, w, X, restrict, budget):
    """Literal outer-box enumeration with the solved-coordinate square-root trick."""
    from .modmath import sqrt_classes_mod_prime_power

    n = form.n
    # solve for the largest coefficient; tie-break on the highest index
    solve_idx = max(range(n), key=lambda j: (abs(form.lambdas[j]), j))
    lam_solve = form.lambdas[solve_idx] % q
    inv_solve = invmod(lam_solve, q)
    xs, wts, _ = _axis_data(form, q, p, N, w, X, restrict)
    outer_idx = [j for j in range(n) if j != solve_idx]
    outer_size = len(xs) ** len(outer_idx)
    charge(outer_size, budget, "box enumeration")
    sq = [((form.lambdas[j] % q) * ((xs * xs) % q)) % q for j in range(n)]
    root_cache: dict[int, tuple] = {}
    solves = 0
    unit_roots_only = restrict == "units"
    pdiv_roots = restrict == "pdiv"
    total = 0.0
    target = form.inhomogeneous_term % q
    pairs = [list(zip(sq[j].tolist(), wts.tolist())) for j in outer_idx]
    for combo in itertools.product(*pairs):
        s = 0
        wt = 1.0
        for res, wv in combo:
            s += res
            wt *= wv
        rhs = (inv_solve * (target - s)) % q
        if unit_roots_only and rhs % p == 0:
            continue
        cached = root_cache.get(rhs)
        if cached is None:
            cached = sqrt_classes_mod_prime_power(rhs, modulus).progressions
            root_cache[rhs] = cached
            solves += 1
        inner = 0.0
        for offset, step in cached:
            first = -X + (offset + X) % step
            for x in range(first, X + 1, step):
                if pdiv_roots and x % p != 0:
                    continue
                inner += weight_eval(w, x / N)
        total += wt * inner
    cost = {"outer_points": outer_size, "root_solves": solves}
    return total, cost


def count_weighted_direct(
    form: DiagonalForm,
    modulus: PrimePowerModulus,
    N: float,
    w: WeightSpec,
    mode: str = UNIT_COORDS,
    strategy: str = "auto",
    budget: int | None = None,
) -> CountReport:
    """Weighted count of lattice solutions of Q(x) = 0 mod p^m in a box.

    The box truncates each coordinate where the weight falls below 1e-12.
    Strategy "enumerate" walks the outer coordinates and solves the last one
    through modular square-root classes; "histogram" groups the identical sum
    by residues (per-coordinate weighted histograms, cyclically convolved),
    which handles the wide boxes enumeration cannot.  "auto" picks by size.
    """
    if mode not in (UNIT_COORDS, NOT_ALL_ZERO):
        raise ValidationError(f"unknown mode {mode!r}")
    if N <= 0:
        raise ValidationError("N must be positive")
    q, p = modulus.q, modulus.p
    form.require_unit_coefficients(p)
    budget_val = resolve_budget(budget)
    X = math.ceil(weight_support_cutoff(w) * N)
    n = form.n
    if strategy == "auto":
        outer = (2 * X + 1) ** (n - 1)
        strategy = "enumerate" if outer <= min(budget_val, 200_000) else "histogram"
    if strategy not in ("enumerate", "histogram"):
        raise ValidationError(f"unknown strategy {strategy!r}")

    target = form.inhomogeneous_term % q
    if strategy == "histogram":
        charge(n * (2 * X + 1) + n * q * q, budget_val, "histogram count")
        if mode == UNIT_COORDS:
            T, cost = _count_histogram(form, q, p, N, w, X, "units", target)
        else:
            t_full, c1 = _count_histogram(form, q, p, N, w, X, "none", target)
            t_pdiv, c2 = _count_histogram(form, q, p, N, w, X, "pdiv", target)
            T = t_full - t_pdiv
            cost = {k: c1[k] + c2[k] for k in c1}
    else:
        if mode == UNIT_COORDS:
            T, cost = _count_enumerate(form, modulus, q, p, N, w, X, "units", budget_val)
        else:
            t_full, c1 = _count_enumerate(form, modulus, q, p, N, w, X, "none", budget_val)
            t_pdiv, c2 = _count_enumerate(form, modulus, q, p, N, w, X, "pdiv", budget_val)
            T = t_full - t_pdiv
            cost = {k: c1[k] + c2[k] for k in c1}

    density = local_density(form, p, mode)
    T0 = float(density) * fourier_at_zero(w) ** n * float(N) ** n / q
    ratio = T / T0 if T0 > 0 else math.nan
    trunc = 2 * n * (2 * X + 1) ** (n - 1) * WEIGHT_NEGLIGIBLE
    return CountReport(
        T=T, T0=T0, ratio=ratio, p=p, m=modulus.m, N=N,
        lambdas=form.lambdas, inhomogeneous_term=form.inhomogeneous_term,
        weight=w, mode=mode, strategy=strategy, cost=cost, truncation_bound=trunc,
    )


def count_weighted_spectral(
    form: DiagonalForm,
    modulus: PrimePowerModulus,
    N: float,
    w: WeightSpec,
    k_cutoff: int | None = None,
    budget: int | None = None,
) -> CountReport:
    """The same count through the dual side: T = N^n q^{-(n+1)} sum of Psi(k) F(k).

    The zero frequency is the exact main term (an exact rational solution
    count); nonzero frequencies contribute only at vectors p^r * l with all
    l_j coprime to p and 0 <= r <= m - 2, where the closed kernel applies.
    Frequencies are grouped by the value of the dual quadratic form mod
    p^(m-r), so the kernel is evaluated once per residue class.
    """
    q, p, m = modulus.q, modulus.p, modulus.m
    n = form.n
    if N <= 0:
        raise ValidationError("N must be positive")
    form.require_unit_coefficients(p, include_inhomogeneous=True)
    budget_val = resolve_budget(budget)

    fa0 = fourier_at_zero(w)
    bm = count_B_m(form, modulus, budget=budget_val)
    density = Fraction(bm, p ** (m * (n - 1)))
    T0 = float(density) * fa0**n * float(N) ** n / q

    ycut = fourier_tail_cutoff(w)
    if not math.isfinite(ycut):
        raise TruncationInsufficient("weight's Fourier tail never becomes negligible")
    if k_cutoff is None:
        k_cutoff = math.ceil(ycut * q / N)
    if k_cutoff < 0:
        raise ValidationError("k_cutoff must be non-negative")

    lam_next = form.inhomogeneous_term
    total = 0.0 + 0.0j
    kernel_evals = 0
    axis_points = 0

    # Frequencies k = p^(m-1) * t (every coordinate of valuation >= m - 1):
    # the kernel collapses to the level-one kernel at t mod p, scaled by
    # p^(n(m-1)).  Significant whenever the Fourier weight at N/p is not.
    t_max = k_cutoff // p ** (m - 1)
    if t_max > 0:
        charge(n * p * p * (p + t_max), budget_val, "spectral low-frequency block")
        phase_p = np.exp(2j * np.pi * np.arange(p) / p)
        u_col = np.arange(p)[:, None]
        t_row = np.arange(p)[None, :]
        low_full = np.ones(p, dtype=np.complex128)
        low_zero = np.ones(p, dtype=np.complex128)
        for lam in form.lambdas:
            sig = np.zeros((p, p), dtype=np.complex128)
            lam_p = lam % p
            for y in range(1, p):
                sig += phase_p[(u_col * ((lam_p * y * y) % p) + t_row * y) % p]
            axis_col = fa0 * sig[:, 0].copy()
            full_col = axis_col.copy()
            for t in range(1, t_max + 1):
                wt = weight_fourier(w, t * N / p)
                full_col += wt * (sig[:, t % p] + sig[:, (-t) % p])
            low_full *= full_col
            low_zero *= axis_col
        carrier = phase_p[(-np.arange(p) * (lam_next % p)) % p]
        low_extra = float(p) ** (n * (m - 1)) * complex((carrier * (low_full - low_zero)).sum())
        total += low_extra
        axis_points += n * (2 * t_max + 1)
    for r in range(0, m - 1):
        c = p ** (m - r)
        sub = PrimePowerModulus(p, m - r)
        L = k_cutoff // p**r
        vs = np.array([v for v in range(1, L + 1) if v % p != 0], dtype=np.int64)
        if len(vs) == 0:
            continue
        charge(n * (len(vs) + c * c), budget_val, "spectral frequency sum")
        axis_points += n * len(vs)
        fw = 2.0 * _weight_fourier_vec(w, (p**r) * vs * N / q)  # +-v folded
        dists = []
        for lam in form.lambdas:
            inv_lam = invmod(lam % c, c)
            res = (inv_lam * ((vs * vs) % c)) % c
            g = np.zeros(c)
            np.add.at(g, res, fw)
            dists.append(g)
        wdist = reduce(lambda a, b: _fold_convolve(a, b, c), dists)
        inv4 = invmod(4, c)
        if n % 2 == 0:
            kvals = [kloosterman_closed(-a_val, -lam_next, sub).to_complex() for a_val in range(c)]
        else:
            kvals = [salie_closed(-a_val, -lam_next, sub).to_complex() for a_val in range(c)]
        kernel_evals += c
        karr = np.asarray(kvals)[(inv4 * np.arange(c)) % c]
        prod_lam = 1
        for lam in form.lambdas:
            prod_lam = (prod_lam * lam) % c
        front = epsilon_c(c) ** n * float(p) ** (n * (m + r) / 2.0) * jacobi_symbol(prod_lam, c)
        total += front * complex((wdist * karr).sum())

    U = total * float(N) ** n / float(q) ** (n + 1)
    T = T0 + U.real
    ratio = T / T0 if T0 > 0 else math.nan
    cost = {
        "kernel_evals": kernel_evals,
        "axis_points": axis_points,
        "imag_residual": abs(U.imag),
        "k_cutoff": k_cutoff,
    }
    return CountReport(
        T=T, T0=T0, ratio=ratio, p=p, m=m, N=N,
        lambdas=form.lambdas, inhomogeneous_term=form.inhomogeneous_term,
        weight=w, mode=UNIT_COORDS, strategy="spectral", cost=cost,
        truncation_bound=FOURIER_NEGLIGIBLE * n * max(1.0, abs(T0)),
    )

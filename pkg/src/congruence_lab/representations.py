"""Representation numbers for the dual form and their local/archimedean factors.

Weighted counts tau_n(k) of lattice representations by the positive
definite dual form, the singular series coefficients a_q(k) with the
unit-coordinate side condition, the truncated singular series, the
thin-shell singular integral, and the bounded quadruple count for
congruences in four squares.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .counting import WeightSpec, _weight_fourier_vec, weight_fourier
from .densities import DiagonalForm
from .errors import (
    CoprimalityViolated,
    HypothesisViolated,
    IndefiniteForm,
    ValidationError,
    charge,
    resolve_budget,
)
from .modmath import PrimePowerModulus, invmod


@dataclass(frozen=True)
class DualForm:
    """Coefficients Delta_j of the dual diagonal form, with the unit Lambda
    inverting Delta_{n+1} mod p^m when built from a source form."""

    deltas: tuple[int, ...]
    Lambda: int | None = None

    def __post_init__(self) -> None:
        if len(self.deltas) < 1:
            raise ValidationError("dual form needs at least one coefficient")
        object.__setattr__(self, "deltas", tuple(int(v) for v in self.deltas))

    @property
    def n(self) -> int:
        return len(self.deltas)

    def require_positive_definite(self) -> None:
        if any(d <= 0 for d in self.deltas):
            raise IndefiniteForm(f"dual coefficients {self.deltas} are not all positive")

    @classmethod
    def from_form(cls, form: DiagonalForm, modulus: PrimePowerModulus) -> "DualForm":
        """Delta_j = Delta / lambda_j with Delta the product of all coefficients;
        Lambda inverts Delta_{n+1} mod p^m."""
        if form.inhomogeneous_term == 0:
            raise ValidationError("dual construction needs an inhomogeneous form")
        form.require_unit_coefficients(modulus.p, include_inhomogeneous=True)
        delta = form.inhomogeneous_term
        for lam in form.lambdas:
            delta *= lam
        deltas = tuple(delta // lam for lam in form.lambdas)
        delta_next = delta // form.inhomogeneous_term
        return cls(deltas, invmod(delta_next % modulus.q, modulus.q))


def tau_n(
    k: int,
    dual: DualForm,
    r: int,
    w: WeightSpec,
    modulus: PrimePowerModulus,
    N: float,
    budget: int | None = None,
) -> float:
    """Weighted number of unit-coordinate representations of k by the dual form.

    Sums the product of Fourier weights at p^r * l_i * N / p^m over integer
    vectors with all coordinates coprime to p and sum of Delta_j l_j^2 = k.
    Cone descent over coordinates sorted by decreasing coefficient; signs
    are folded in as a factor 2 per coordinate.
    """
    dual.require_positive_definite()
    if k < 0:
        raise ValidationError("k must be non-negative")
    if r < 0:
        raise ValidationError("r must be non-negative")
    budget_val = resolve_budget(budget)
    q = modulus.q
    p = modulus.p
    order = sorted(range(dual.n), key=lambda j: -dual.deltas[j])
    deltas = [dual.deltas[j] for j in order]
    n = dual.n
    min_tail = [0] * (n + 1)
    for j in range(n - 1, -1, -1):
        min_tail[j] = min_tail[j + 1] + deltas[j]
    scale = (p**r) * N / q
    nodes = 0

    def axis_weight(v: int) -> float:
        return weight_fourier(w, scale * v)

    def descend(j: int, remaining: int, weight_acc: float) -> float:
        nonlocal nodes
        nodes += 1
        if nodes > budget_val:
            charge(nodes, budget_val, "tau cone descent")
        d = deltas[j]
        if j == n - 1:
            if remaining % d != 0:
                return 0.0
            quot = remaining // d
            v = math.isqrt(quot)
            if v * v != quot or v == 0 or v % p == 0:
                return 0.0
            return weight_acc * 2.0 * axis_weight(v)
        total = 0.0
        v = 1
        while d * v * v + min_tail[j + 1] <= remaining:
            if v % p != 0:
                total += descend(j + 1, remaining - d * v * v, weight_acc * 2.0 * axis_weight(v))
            v += 1
        return total

    if k < min_tail[0]:
        return 0.0
    return descend(0, k, 1.0)


@lru_cache(maxsize=512)
def _coefficient_phase_table(q: int, p: int, deltas: tuple[int, ...]) -> np.ndarray:
    """Products over coordinates of the unit-restricted quadratic sums
    sum_{x mod pq, (x,p)=1} e_q(a Delta_j x^2), for every unit a mod q."""
    pq = p * q
    xs = np.arange(pq, dtype=np.int64)
    xs = xs[xs % p != 0]
    sq = (xs * xs) % q
    phases = np.exp(2j * np.pi * np.arange(q) / q)
    units = [a for a in range(1, q + 1) if math.gcd(a, q) == 1] if q > 1 else [1]
    table = np.zeros(q + 1, dtype=np.complex128)
    per_coeff: dict[int, np.ndarray] = {}
    for a in units:
        prod = 1.0 + 0.0j
        for d in deltas:
            key = (a * (d % q)) % q
            col = per_coeff.get(key)
            if col is None:
                col = complex(phases[(key * sq) % q].sum())
                per_coeff[key] = col
            prod *= col
        table[a] = prod
    return table


def singular_coefficient(
    q: int, k: int, dual: DualForm, p: int, budget: int | None = None
) -> float:
    """The modulus-q coefficient a_q(k) of the singular series.

    a_q(k) = (pq)^(-n) sum over units a mod q of e_q(-a k) times the
    unit-coordinate character sum over x mod pq, the latter factorized into
    a product of one-variable quadratic sums and cached per modulus.
    """
    if q < 1:
        raise ValidationError("q must be positive")
    _check_odd_prime(p)
    n = dual.n
    if any(d % p == 0 for d in dual.deltas):
        raise CoprimalityViolated("dual coefficients must be units mod p")
    charge(q * n * p * q, resolve_budget(budget), "singular coefficient")
    table = _coefficient_phase_table(q, p, dual.deltas)
    total = 0.0 + 0.0j
    for a in range(1, q + 1):
        if math.gcd(a, q) != 1:
            continue
        total += table[a] * np.exp(-2j * np.pi * ((a * k) % q) / q)
    return float(total.real / (p * q) ** n)


def singular_coefficient_naive(q: int, k: int, dual: DualForm, p: int) -> float:
    """Literal double sum over a mod q and x mod pq; oracle for tiny pq."""
    pq = p * q
    if pq > 30:
        raise ValidationError("naive double sum is only for tiny moduli")
    n = dual.n
    total = 0.0 + 0.0j
    coords = [x for x in range(pq) if x % p != 0]
    import itertools

    for a in range(1, q + 1):
        if math.gcd(a, q) != 1:
            continue
        for xs in itertools.product(coords, repeat=n):
            val = sum(d * x * x for d, x in zip(dual.deltas, xs)) - k
            total += np.exp(2j * np.pi * ((a * val) % q) / q)
    return float(total.real / (p * q) ** n)


@dataclass(frozen=True)
class SingularData:
    """Truncated singular series: per-q coefficients, partial sum, tail model."""

    q_max: int
    coefficients: dict[int, float] = field(compare=False)
    partial_sum: float = 0.0
    tail_bound: float = 0.0
    decay_constant: float = 0.0


def singular_series(
    k: int, dual: DualForm, p: int, q_max: int, budget: int | None = None
) -> SingularData:
    """Partial sum of a_q(k) for q <= q_max with an empirical tail estimate.

    The recorded decay constant is max |a_q(k)| q^(n/2-1); the tail bound is
    that constant times q_max^(2-n/2) (the integral-comparison envelope,
    degenerating to the constant itself at n = 4).
    """
    n = dual.n
    if n < 4:
        raise ValidationError("singular series needs n >= 4")
    if q_max < 1:
        raise ValidationError("q_max must be positive")
    coeffs: dict[int, float] = {}
    decay = 0.0
    partial = 0.0
    for q in range(1, q_max + 1):
        aq = singular_coefficient(q, k, dual, p, budget=budget)
        coeffs[q] = aq
        partial += aq
        decay = max(decay, abs(aq) * q ** (n / 2.0 - 1.0))
    tail = decay * q_max ** (2.0 - n / 2.0)
    return SingularData(q_max, coeffs, partial, tail, decay)


def singular_integral(
    k: float,
    P: float,
    dual: DualForm,
    w: WeightSpec,
    rel_tol: float = 1e-3,
    seed: int = 0,
) -> float:
    """Thin-shell density of the dual form at level t = k / P^2.

    Computed in co-area form: (1/2) t^(n/2-1) * prod(Delta_j^(-1/2)) times
    the mean over the unit sphere of the product of Fourier weights at the
    ellipsoid point sqrt(t) * theta_j / sqrt(Delta_j), scaled by the sphere
    area.  n = 2 uses deterministic angular quadrature; higher n uses Monte
    Carlo with a fixed seed, sized for the requested relative accuracy.
    """
    dual.require_positive_definite()
    if k <= 0 or P < 1:
        raise ValidationError("need k > 0 and P >= 1")
    n = dual.n
    t = k / (P * P)
    inv_sqrt = np.array([1.0 / math.sqrt(d) for d in dual.deltas])
    # the shell misses the weight's support entirely once t is too large
    support = _fourier_support_radius(w)
    if math.isfinite(support) and t > sum(d * support * support for d in dual.deltas):
        return 0.0
    front = 0.5 * t ** (n / 2.0 - 1.0) * float(np.prod(inv_sqrt))
    if n == 1:
        pts = np.array([[1.0], [-1.0]])
        vals = _shell_values(w, pts, t, inv_sqrt)
        return front * float(vals.sum())
    if n == 2:
        thetas = np.linspace(0.0, 2.0 * math.pi, 8192, endpoint=False)
        pts = np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
        vals = _shell_values(w, pts, t, inv_sqrt)
        return front * 2.0 * math.pi * float(vals.mean())
    rng = np.random.default_rng(seed)
    area = 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)
    batch = 40_000
    total = 0.0
    total_sq = 0.0
    count = 0
    for _ in range(50):
        g = rng.standard_normal((batch, n))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        vals = _shell_values(w, g, t, inv_sqrt)
        total += vals.sum()
        total_sq += (vals * vals).sum()
        count += batch
        mean = total / count
        if mean == 0.0:
            return 0.0
        var = max(total_sq / count - mean * mean, 0.0)
        stderr = math.sqrt(var / count)
        if stderr <= rel_tol * abs(mean) / 2.0:
            break
    return front * area * (total / count)


def _shell_values(w: WeightSpec, pts: np.ndarray, t: float, inv_sqrt: np.ndarray) -> np.ndarray:
    coords = math.sqrt(t) * pts * inv_sqrt
    vals = np.ones(len(pts))
    for j in range(pts.shape[1]):
        vals *= _weight_fourier_vec(w, coords[:, j])
    return vals


def _fourier_support_radius(w: WeightSpec) -> float:
    from .counting import BUMP_PAIR

    if w.kind == BUMP_PAIR:
        return 2.0 * w.radius
    return math.inf


def quadruple_count(
    alphas: tuple[int, int, int, int],
    b: int,
    c: int,
    M: int,
    p: int | None = None,
    budget: int | None = None,
) -> int:
    """Exact count of |l_i| <= M with alpha_1 l_1^2 + ... + alpha_4 l_4^2 = b mod c.

    Meet in the middle: the two pair-sum histograms mod c are built in
    O(M^2) and correlated in O(c).  Requires the hypothesis 8 M^2 < c.
    """
    if len(alphas) != 4:
        raise ValidationError("exactly four coefficients are required")
    if M < 1 or c < 1:
        raise ValidationError("need M >= 1 and c >= 1")
    if 8 * M * M >= c:
        raise HypothesisViolated(f"8*M^2 = {8 * M * M} must be below c = {c}")
    if p is not None and any(a % p == 0 for a in alphas):
        raise CoprimalityViolated("coefficients must be units mod p")
    charge(4 * (2 * M + 1) ** 2 + 2 * c, resolve_budget(budget), "quadruple count")
    ls = np.arange(-M, M + 1, dtype=np.int64)
    sq = [(a % c) * ((ls * ls) % c) % c for a in alphas]
    h1 = np.bincount(((sq[0][:, None] + sq[1][None, :]) % c).ravel(), minlength=c)
    h2 = np.bincount(((sq[2][:, None] + sq[3][None, :]) % c).ravel(), minlength=c)
    idx = (b - np.arange(c)) % c
    return int((h1 * h2[idx]).sum())


def _check_odd_prime(p: int) -> None:
    from .modmath import is_prime

    if p < 3 or p % 2 == 0 or not is_prime(p):
        raise ValidationError(f"p={p} must be an odd prime")

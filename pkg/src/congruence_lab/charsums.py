"""Quadratic Gauss, Kloosterman and Salie sums modulo odd prime powers.

Each sum has a brute-force evaluator (the oracle: the literal finite sum)
and a closed form.  The closed forms factor out gcds, detect the vanishing
patterns, and express the remainder as sign * eps * sqrt(c) * root of unity,
so the two routes can be compared exactly in tests.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .densities import DiagonalForm
from .errors import UnsupportedCase, ValidationError, charge, resolve_budget
from .modmath import (
    PrimePowerModulus,
    Residue,
    additive_character,
    epsilon_c,
    invmod,
    jacobi_symbol,
    sqrt_classes_mod_prime_power,
    valuation,
)


class ExactCharSum(NamedTuple):
    """Symbolic value rational_factor * sign * eps * sqrt(sqrt_arg) * e(phase).

    ``rational_factor`` is the integer pulled out by the gcd reduction
    (the factor (a, c), or p^r for Gauss-sum differences).  A zero sum is
    flagged and every other field is ignored.
    """

    is_zero: bool
    rational_factor: int = 0
    sign: int = 1
    eps: complex = 1.0 + 0.0j
    sqrt_arg: int = 1
    phase_num: int = 0
    phase_den: int = 1

    def to_complex(self) -> complex:
        if self.is_zero:
            return 0.0 + 0.0j
        value = self.rational_factor * self.sign * self.eps * math.sqrt(self.sqrt_arg)
        return value * additive_character(self.phase_num, self.phase_den)


ZERO_CHAR_SUM = ExactCharSum(is_zero=True)


class KloostermanClosedForm(NamedTuple):
    """Closed Kloosterman/Salie value p^(s/2) * sum of unit-coefficient terms.

    Each term is (coefficient, phase numerator), the coefficient a complex
    unit (+-1, +-i, possibly carrying a Jacobi sign and eps factor) and the
    phase evaluated as e(phase / p^s).  At most two terms occur.
    """

    is_zero: bool
    p: int = 3
    s: int = 1
    terms: tuple[tuple[complex, int], ...] = ()

    def to_complex(self) -> complex:
        if self.is_zero:
            return 0.0 + 0.0j
        c = self.p**self.s
        scale = math.sqrt(c)
        return scale * sum(
            coeff * additive_character(phase, c) for coeff, phase in self.terms
        )


ZERO_KLOOSTERMAN = KloostermanClosedForm(is_zero=True)


def _phase_array(c: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(c) / c)


def gauss_sum_bruteforce(a: int, b: int, c: int) -> complex:
    """G(a, b, c) = sum over n mod c of e_c(a*n^2 + b*n), term by term."""
    if c < 1:
        raise ValidationError("modulus must be positive")
    a %= c
    b %= c
    n = np.arange(c, dtype=np.int64)
    phases = (a * ((n * n) % c) + b * n) % c
    return complex(_phase_array(c)[phases].sum())


def gauss_sum_closed(a: int, b: int, modulus: PrimePowerModulus) -> ExactCharSum:
    """Closed form of G(a, b, p^m) for odd prime powers.

    The gcd d = (a, c) is factored out first; the sum vanishes unless d | b,
    degenerates to a linear sum when c | a, and otherwise equals
    d * (a'/c') * eps_{c'} * sqrt(c') * e(-(4a')^{-1} b'^2 / c').
    """
    c = modulus.q
    a %= c
    b %= c
    if a == 0:
        # pure linear sum: c if c | b else 0
        if b == 0:
            return ExactCharSum(False, rational_factor=c)
        return ZERO_CHAR_SUM
    d = math.gcd(a, c)
    if b % d != 0:
        return ZERO_CHAR_SUM
    a1, b1, c1 = a // d, b // d, c // d
    phase = (-invmod(4 * a1, c1) * b1 * b1) % c1
    return ExactCharSum(
        False,
        rational_factor=d,
        sign=jacobi_symbol(a1, c1),
        eps=epsilon_c(c1),
        sqrt_arg=c1,
        phase_num=phase,
        phase_den=c1,
    )


def kloosterman_bruteforce(a: int, b: int, c: int) -> complex:
    """K0(a, b, c): sum over units n mod c of e_c(a*nbar + b*n)."""
    if c < 1 or c % 2 == 0:
        raise ValidationError("modulus must be odd and positive")
    a %= c
    b %= c
    total = 0.0 + 0.0j
    phases = _phase_array(c)
    for n in range(c):
        if math.gcd(n, c) != 1:
            continue
        total += phases[(a * pow(n, -1, c) + b * n) % c]
    return total


def salie_bruteforce(a: int, b: int, c: int) -> complex:
    """K1(a, b, c): the Kloosterman sum twisted by the Jacobi symbol (n/c)."""
    if c < 1 or c % 2 == 0:
        raise ValidationError("modulus must be odd and positive")
    a %= c
    b %= c
    total = 0.0 + 0.0j
    phases = _phase_array(c)
    for n in range(c):
        sign = jacobi_symbol(n, c)
        if sign == 0:
            continue
        total += sign * phases[(a * pow(n, -1, c) + b * n) % c]
    return total


def _closed_root_terms(ab: int, b_for_salie: int | None, modulus: PrimePowerModulus) -> KloostermanClosedForm:
    """Shared two-root expansion behind the closed Kloosterman/Salie forms."""
    p, s, c = modulus.p, modulus.m, modulus.q
    if jacobi_symbol(ab, p) != 1:
        return ZERO_KLOOSTERMAN
    roots = sqrt_classes_mod_prime_power(ab, modulus).members()
    v = roots[0]
    eps = epsilon_c(c)
    if b_for_salie is None:
        # K0: 2 (v/c) sqrt(c) Re(eps_c e_c(2v)) = (v/c)(eps e(2v) + conj(eps) e(-2v))
        jac = jacobi_symbol(v, c)
        terms = ((jac * eps, (2 * v) % c), (jac * eps.conjugate(), (-2 * v) % c))
    else:
        # K1: eps_c (b/c) sqrt(c) * sum over both roots of e_c(2v)
        coeff = jacobi_symbol(b_for_salie, c) * eps
        terms = tuple((coeff, (2 * u) % c) for u in roots)
    return KloostermanClosedForm(False, p=p, s=s, terms=terms)


def kloosterman_closed(a: int, b: int, modulus: PrimePowerModulus) -> KloostermanClosedForm:
    """Closed K0(a, b, p^m) for m >= 2 and the gcd patterns with p | ab excluded
    on at most one side.

    Vanishes when ab is a non-residue mod p, and whenever exactly one of a, b
    is divisible by p.  Raises UnsupportedCase when p divides both.
    """
    p, c = modulus.p, modulus.q
    if modulus.m < 2:
        raise UnsupportedCase("closed Kloosterman form needs exponent m >= 2")
    a %= c
    b %= c
    pa, pb = a % p == 0, b % p == 0
    if pa and pb:
        raise UnsupportedCase("p divides both arguments; use the brute-force sum")
    if pa or pb:
        return ZERO_KLOOSTERMAN
    return _closed_root_terms((a * b) % c, None, modulus)


def salie_closed(a: int, b: int, modulus: PrimePowerModulus) -> KloostermanClosedForm:
    """Closed K1(a, b, p^m) for m >= 2, mirroring ``kloosterman_closed``."""
    p, c = modulus.p, modulus.q
    if modulus.m < 2:
        raise UnsupportedCase("closed Salie form needs exponent m >= 2")
    a %= c
    b %= c
    pa, pb = a % p == 0, b % p == 0
    if pa and pb:
        raise UnsupportedCase("p divides both arguments; use the brute-force sum")
    if pa or pb:
        return ZERO_KLOOSTERMAN
    return _closed_root_terms((a * b) % c, b, modulus)


def restricted_sum_bruteforce(a: int, b: int, alpha: int, modulus: PrimePowerModulus) -> complex:
    """Sum of e_{p^n}(a/x + b*x) over x mod p^n restricted to x = alpha mod p."""
    p, c = modulus.p, modulus.q
    total = 0.0 + 0.0j
    phases = _phase_array(c)
    for x in range(alpha % p, c, p):
        if x % p == 0:
            continue
        total += phases[(a * pow(x, -1, c) + b * x) % c]
    return total


def cochrane_vanishes(a: int, b: int, alpha: Residue, modulus: PrimePowerModulus) -> bool:
    """True when the vanishing criterion for sums of e(f(x)/p^n), x = alpha mod p,
    applies to f(x) = a/x + b*x.

    Checks r = ord_p(f') <= n - 2 and that f'(alpha)/p^r is a unit mod p; a
    True return guarantees the restricted sum is exactly zero.  False means
    the criterion is inconclusive, not that the sum is nonzero.
    """
    p, n = modulus.p, modulus.m
    if alpha.modulus != p:
        raise ValidationError("alpha must be a residue mod p")
    if alpha.value % p == 0:
        raise ValidationError("alpha must be a unit mod p")
    if a == 0 and b == 0:
        return False
    # f'(x) = (b x^2 - a) / x^2, so ord_p(f') = min(v_p(a), v_p(b))
    vals = [valuation(x, p) for x in (a, b) if x != 0]
    r = min(vals)
    if r > n - 2:
        return False
    deriv_num = b * alpha.value * alpha.value - a
    if deriv_num == 0 or valuation(deriv_num, p) != r:
        return False
    return True


def gauss_difference(h: int, lambda_j: int, k_j: int, modulus: PrimePowerModulus) -> ExactCharSum:
    """Closed form of G(h*lam, k, p^m) - G(h*lam*p, k, p^(m-1)) for unit lam.

    Zero unless ord_p(h) = ord_p(k) = r <= m - 2; in that case the value is
    p^r * (h'lam / p^(m-r)) * eps * sqrt(p^(m-r)) * e(-(4h'lam)^{-1} l^2 / p^(m-r))
    with h = p^r h', k = p^r l.  Only the regime ord_p(k) <= m - 2 (the one
    the case analysis covers) is evaluated; higher valuations report zero.
    """
    p, m, q = modulus.p, modulus.m, modulus.q
    if m < 2:
        raise ValidationError("difference form needs m >= 2")
    if lambda_j % p == 0:
        raise ValidationError("lambda_j must be a unit mod p")
    h %= q
    k_j %= q
    s = m if h == 0 else valuation(h, p)
    r = m if k_j == 0 else valuation(k_j, p)
    if r > m - 2 or s != r:
        return ZERO_CHAR_SUM
    c = p ** (m - r)
    h1 = (h // p**r) % c
    l1 = (k_j // p**r) % c
    al = (h1 * lambda_j) % c
    phase = (-invmod(4 * al, c) * l1 * l1) % c
    return ExactCharSum(
        False,
        rational_factor=p**r,
        sign=jacobi_symbol(al, c),
        eps=epsilon_c(c),
        sqrt_arg=c,
        phase_num=phase,
        phase_den=c,
    )


def F_bruteforce(
    k: tuple[int, ...],
    form: DiagonalForm,
    modulus: PrimePowerModulus,
    budget: int | None = None,
) -> complex:
    """Direct triple sum for the Poisson-dual kernel F(k).

    F(k) = sum over h mod q of e_q(-h * lam_{n+1}) times the product over j
    of the unit-restricted sums of e_q(h lam_j y^2 + k_j y).  Cost is
    O(q^2 * n); intended as an oracle for small moduli.
    """
    q, p = modulus.q, modulus.p
    n = form.n
    if len(k) != n:
        raise ValidationError("frequency vector length must match the form")
    form.require_unit_coefficients(p)
    charge(q * q * n, resolve_budget(budget), "F brute force")
    phases = _phase_array(q)
    ys = np.array([y for y in range(q) if y % p != 0], dtype=np.int64)
    y2 = (ys * ys) % q
    hs = np.arange(q, dtype=np.int64)
    inner = np.empty((n, q), dtype=np.complex128)
    for j in range(n):
        lam = form.lambdas[j] % q
        kj = k[j] % q
        acc = np.zeros(q, dtype=np.complex128)
        for sq, y in zip(y2, ys):
            acc += phases[(hs * ((lam * sq) % q) + kj * y) % q]
        inner[j] = acc
    outer = phases[(-hs * (form.inhomogeneous_term % q)) % q]
    return complex((outer * inner.prod(axis=0)).sum())


def F_closed(
    r: int,
    l: tuple[int, ...],
    form: DiagonalForm,
    modulus: PrimePowerModulus,
) -> complex:
    """Closed form of F(p^r * l) for unit-coordinate l and 0 <= r <= m - 2.

    Evaluates eps^n * p^(n(m+r)/2) * (lam_1...lam_n / p^(m-r)) times the
    twisted unit sum over h of (h/p^(m-r))^n e(-A/h - lam_{n+1} h), the last
    factor routed through the closed Kloosterman (n even) or Salie (n odd)
    form, with A = (1/4) * sum of l_j^2 / lam_j.
    """
    p, m = modulus.p, modulus.m
    n = form.n
    if len(l) != n:
        raise ValidationError("frequency vector length must match the form")
    if not 0 <= r <= m - 2:
        raise ValidationError(f"r={r} must lie in 0..m-2")
    form.require_unit_coefficients(p, include_inhomogeneous=True)
    if any(lj % p == 0 for lj in l):
        raise ValidationError("all l_j must be units mod p")
    c = p ** (m - r)
    sub = PrimePowerModulus(p, m - r)
    acc = 0
    for lj, lam in zip(l, form.lambdas):
        acc += invmod(lam % c, c) * (lj % c) * (lj % c)
    big_a = (invmod(4, c) * acc) % c
    lam_next = form.inhomogeneous_term % c
    if n % 2 == 0:
        kval = kloosterman_closed(-big_a, -lam_next, sub).to_complex()
    else:
        kval = salie_closed(-big_a, -lam_next, sub).to_complex()
    prod_lam = 1
    for lam in form.lambdas:
        prod_lam = (prod_lam * lam) % c
    front = epsilon_c(c) ** n * float(p) ** (n * (m + r) / 2.0) * jacobi_symbol(prod_lam, c)
    return front * kval

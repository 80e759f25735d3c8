"""Solution densities of diagonal quadratic congruences.

Counts solutions of lam_1 x_1^2 + ... + lam_n x_n^2 = lam_{n+1} mod p^m
under unit-coordinate or not-all-zero side conditions, exactly, via
per-coordinate square-value histograms and exact cyclic convolution.
Densities are exact rationals end to end.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import (
    CoprimalityViolated,
    NotHomogeneous,
    ValidationError,
    charge,
    resolve_budget,
)
from .modmath import PrimePowerModulus, jacobi_symbol


@dataclass(frozen=True)
class DiagonalForm:
    """Coefficients of lam_1 x_1^2 + ... + lam_n x_n^2 - lam_{n+1}.

    ``inhomogeneous_term`` is lam_{n+1}; zero makes the form homogeneous.
    """

    lambdas: tuple[int, ...]
    inhomogeneous_term: int = 0

    def __post_init__(self) -> None:
        if len(self.lambdas) < 1:
            raise ValidationError("a form needs at least one coefficient")
        object.__setattr__(self, "lambdas", tuple(int(v) for v in self.lambdas))

    @property
    def n(self) -> int:
        return len(self.lambdas)

    @property
    def is_homogeneous(self) -> bool:
        return self.inhomogeneous_term == 0

    def require_unit_coefficients(self, p: int, include_inhomogeneous: bool = False) -> None:
        if any(lam % p == 0 for lam in self.lambdas):
            raise CoprimalityViolated(f"coefficients {self.lambdas} not coprime to {p}")
        if include_inhomogeneous and self.inhomogeneous_term % p == 0:
            raise CoprimalityViolated(f"inhomogeneous term {self.inhomogeneous_term} divisible by {p}")


class DensityValue(NamedTuple):
    """A raw solution count over the normalizing power p^(n-1)."""

    numerator: int
    denominator: int

    @property
    def as_rational(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)


def cyclic_convolution_exact(a: list[int], b: list[int]) -> list[int]:
    """Exact cyclic convolution of equal-length integer vectors.

    Kronecker substitution: coefficients are packed into fixed-width bit
    slots of one big integer each, multiplied, and unpacked; slot width is
    chosen from sum(a) * sum(b) so no carry can cross slots.
    """
    length = len(a)
    if len(b) != length:
        raise ValidationError("convolution operands must have equal length")
    sa, sb = sum(a), sum(b)
    if sa == 0 or sb == 0:
        return [0] * length
    width = (sa * sb).bit_length() // 8 + 1  # slot width in bytes, no carries
    enc_a = b"".join(v.to_bytes(width, "little") for v in a)
    enc_b = b"".join(v.to_bytes(width, "little") for v in b)
    product = int.from_bytes(enc_a, "little") * int.from_bytes(enc_b, "little")
    raw = product.to_bytes(2 * length * width, "little")
    out = [0] * length
    for i in range(2 * length - 1):
        coeff = int.from_bytes(raw[i * width : (i + 1) * width], "little")
        out[i % length] += coeff
    return out


def square_value_histogram(coeff: int, q: int, p: int, units_only: bool) -> list[int]:
    """Histogram over residues t mod q of coeff * x^2 = t, x mod q."""
    hist = [0] * q
    coeff %= q
    for x in range(q):
        if units_only and x % p == 0:
            continue
        hist[(coeff * x * x) % q] += 1
    return hist


def _convolved_count(
    coeffs: tuple[int, ...], target: int, q: int, p: int, units_only: bool
) -> int:
    acc: list[int] | None = None
    for coeff in coeffs:
        hist = square_value_histogram(coeff, q, p, units_only)
        acc = hist if acc is None else cyclic_convolution_exact(acc, hist)
    assert acc is not None
    return acc[target % q]


def density_B(form: DiagonalForm, p: int) -> DensityValue:
    """Unit-coordinate solution count of Q = 0 mod p over p^(n-1).

    All of lam_1..lam_{n+1} must be coprime to p.
    """
    _check_prime(p)
    form.require_unit_coefficients(p, include_inhomogeneous=True)
    count = _convolved_count(form.lambdas, form.inhomogeneous_term, p, p, True)
    return DensityValue(count, p ** (form.n - 1))


def density_A(form: DiagonalForm, p: int) -> DensityValue:
    """Nonzero-vector solution count of the homogeneous Q = 0 mod p over p^(n-1)."""
    _check_prime(p)
    if not form.is_homogeneous:
        raise NotHomogeneous("density_A needs a homogeneous form")
    form.require_unit_coefficients(p)
    count = _convolved_count(form.lambdas, 0, p, p, False) - 1
    return DensityValue(count, p ** (form.n - 1))


def ternary_C_p(l1: int, l2: int, l3: int, p: int) -> Fraction:
    """(p - s_p)(p - 1)/p^2 with s_p = 2 + sum of (-li*lj / p) over pairs."""
    _check_prime(p)
    if (l1 * l2 * l3) % p == 0:
        raise CoprimalityViolated("ternary coefficients must be units mod p")
    s_p = (
        2
        + jacobi_symbol(-l1 * l2, p)
        + jacobi_symbol(-l1 * l3, p)
        + jacobi_symbol(-l2 * l3, p)
    )
    return Fraction((p - s_p) * (p - 1), p * p)


def count_B_m(form: DiagonalForm, modulus: PrimePowerModulus, budget: int | None = None) -> int:
    """Exact number of unit-coordinate solutions of Q = 0 mod p^m.

    Histogram convolution mod p^m; cost roughly n * q^(1+o(1)) rather than q^n.
    """
    q, p = modulus.q, modulus.p
    form.require_unit_coefficients(p)
    charge(form.n * q, resolve_budget(budget), "count_B_m histograms")
    return _convolved_count(form.lambdas, form.inhomogeneous_term, q, p, True)


def hensel_stability_report(
    form: DiagonalForm, p: int, m_max: int, budget: int | None = None
) -> list[Fraction]:
    """The sequence of counts of Q = 0 mod p^m over p^(m(n-1)), m = 1..m_max.

    Nonsingularity mod p makes every entry equal; any drift flags a bug.
    """
    _check_prime(p)
    if m_max < 1:
        raise ValidationError("m_max must be at least 1")
    out = []
    for m in range(1, m_max + 1):
        count = count_B_m(form, PrimePowerModulus(p, m), budget=budget)
        out.append(Fraction(count, p ** (m * (form.n - 1))))
    return out


def _check_prime(p: int) -> None:
    from .modmath import is_prime

    if p < 3 or p % 2 == 0 or not is_prime(p):
        raise ValidationError(f"p={p} must be an odd prime")

"""Exact modular arithmetic for odd prime powers.

Primitives for residues (powers, inverses, Jacobi symbols, additive
characters) together with square roots modulo p and their lifts to p^m.
Modular logic is exact integer arithmetic throughout; complex numbers
appear only at the character-evaluation boundary.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .errors import (
    EvenModulus,
    LiftMismatch,
    NotCoprimeRoot,
    NotInvertible,
    ValidationError,
)

MAX_PRIME = 1 << 20
MAX_EXPONENT = 60
MAX_MODULUS = 1 << 128

TWO_PI = 2.0 * math.pi


def is_prime(n: int) -> bool:
    """Deterministic primality test by trial division (n < 2^40 or so)."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    if n % 3 == 0:
        return n == 3
    f = 5
    while f * f <= n:
        if n % f == 0 or n % (f + 2) == 0:
            return False
        f += 6
    return True


def valuation(x: int, p: int) -> int:
    """Largest e with p^e | x, for x != 0."""
    if x == 0:
        raise ValidationError("valuation of 0 is undefined")
    e = 0
    while x % p == 0:
        x //= p
        e += 1
    return e


def invmod(a: int, m: int) -> int:
    """Inverse of a modulo m; raises NotInvertible when gcd(a, m) > 1."""
    try:
        return pow(a, -1, m)
    except ValueError as exc:
        raise NotInvertible(f"{a} is not invertible mod {m}") from exc


@dataclass(frozen=True)
class PrimePowerModulus:
    """An odd prime power q = p^m with the base data validated once."""

    p: int
    m: int
    q: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not (3 <= self.p < MAX_PRIME) or self.p % 2 == 0 or not is_prime(self.p):
            raise ValidationError(f"p={self.p} must be an odd prime below 2^20")
        if not (1 <= self.m <= MAX_EXPONENT):
            raise ValidationError(f"m={self.m} out of range 1..{MAX_EXPONENT}")
        q = self.p**self.m
        if q >= MAX_MODULUS:
            raise ValidationError(f"p^m = {q} does not fit 128 bits")
        object.__setattr__(self, "q", q)


@dataclass(frozen=True)
class Residue:
    """An integer reduced into [0, modulus)."""

    value: int
    modulus: int

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise ValidationError("modulus must be positive")
        object.__setattr__(self, "value", self.value % self.modulus)


def mod_pow(base: Residue, exp: int) -> Residue:
    """base^exp in the residue ring, without intermediate overflow."""
    if exp < 0:
        raise ValidationError("exponent must be non-negative")
    return Residue(pow(base.value, exp, base.modulus), base.modulus)


def mod_inverse(a: Residue) -> Residue:
    """Multiplicative inverse; raises NotInvertible when gcd > 1."""
    return Residue(invmod(a.value, a.modulus), a.modulus)


def jacobi_symbol(a: int, c: int) -> int:
    """Jacobi symbol (a/c) for odd c >= 1, by the binary reciprocity loop."""
    if c < 1 or c % 2 == 0:
        raise EvenModulus(f"Jacobi symbol needs an odd positive modulus, got {c}")
    a %= c
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if c % 8 in (3, 5):
                result = -result
        a, c = c, a
        if a % 4 == 3 and c % 4 == 3:
            result = -result
        a %= c
    return result if c == 1 else 0


def epsilon_c(c: int) -> complex:
    """1 for c = 1 mod 4, i for c = 3 mod 4 (c odd)."""
    if c % 2 == 0:
        raise EvenModulus(f"epsilon_c needs an odd modulus, got {c}")
    return 1.0 + 0.0j if c % 4 == 1 else 1.0j


def additive_character(a: int, q: int) -> complex:
    """exp(2*pi*i*a/q), with a reduced mod q exactly before evaluation."""
    if q < 1:
        raise ValidationError("q must be positive")
    t = a % q
    return cmath.exp(complex(0.0, TWO_PI * t / q))


def _sqrt_mod_prime_int(a: int, p: int) -> int | None:
    """Canonical square root of a mod p in [0, p/2], or None for non-residues.

    Tonelli-Shanks, with the p = 3 mod 4 shortcut.  p must be an odd prime.
    """
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        w = pow(a, (p + 1) // 4, p)
        return min(w, p - w)
    # write p - 1 = d * 2^e with d odd
    d, e = p - 1, 0
    while d % 2 == 0:
        d //= 2
        e += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    cc = pow(z, d, p)
    w = pow(a, (d + 1) // 2, p)
    t = pow(a, d, p)
    mm = e
    while t != 1:
        t2i = t
        i = 0
        for i in range(1, mm):
            t2i = t2i * t2i % p
            if t2i == 1:
                break
        bb = pow(cc, 1 << (mm - i - 1), p)
        w = w * bb % p
        cc = bb * bb % p
        t = t * cc % p
        mm = i
    return min(w, p - w)


def sqrt_mod_prime(a: Residue) -> Residue | None:
    """Square root of a mod p (odd prime), canonical root in [0, p/2]."""
    w = _sqrt_mod_prime_int(a.value, a.modulus)
    if w is None:
        return None
    return Residue(w, a.modulus)


def _lift_sqrt(w: int, r: int, p: int, t: int, s: int) -> int:
    """Lift w with w^2 = r mod p^t to the root mod p^s in w's mod-p class.

    Exponent-doubling: each step corrects by h*p^t with
    h = (2w)^{-1} * (r - w^2)/p^t taken mod p^{t'-t}, doubling t to t'.
    """
    q_s = p**s
    r %= q_s
    cur = w % (p**t)
    while t < s:
        t2 = min(2 * t, s)
        step = p**t
        gap = p ** (t2 - t)
        delta = (r - cur * cur) // step
        h = (delta * invmod((2 * cur) % gap, gap)) % gap
        cur = (cur + h * step) % (p**t2)
        t = t2
    return cur


def hensel_lift_sqrt(w: Residue, r: int, target: PrimePowerModulus) -> Residue:
    """Unique u mod p^s with u^2 = r and u = w mod p, given w^2 = r mod p^t.

    Raises NotCoprimeRoot when p | w and LiftMismatch when w does not solve
    the congruence at its own level.
    """
    p, s = target.p, target.m
    t = 0
    mm = w.modulus
    while mm % p == 0:
        mm //= p
        t += 1
    if mm != 1 or t < 1:
        raise ValidationError(f"root modulus {w.modulus} is not a power of p={p}")
    if t > s:
        raise ValidationError(f"root level p^{t} already exceeds target p^{s}")
    if w.value % p == 0:
        raise NotCoprimeRoot(f"root {w.value} shares a factor with p={p}")
    if (w.value * w.value - r) % w.modulus != 0:
        raise LiftMismatch(f"{w.value}^2 != {r} mod {w.modulus}")
    return Residue(_lift_sqrt(w.value, r, p, t, s), target.q)


@dataclass(frozen=True)
class RootClassSet:
    """Solutions of u^2 = r mod p^m as disjoint arithmetic progressions.

    Each progression (offset, step) with step | modulus stands for every
    u in [0, modulus) with u = offset mod step.
    """

    progressions: tuple[tuple[int, int], ...]
    modulus: int

    def __post_init__(self) -> None:
        for offset, step in self.progressions:
            if step < 1 or self.modulus % step != 0:
                raise ValidationError(f"step {step} does not divide {self.modulus}")
            if not 0 <= offset < step:
                raise ValidationError("offsets must be reduced mod step")

    def count(self) -> int:
        return sum(self.modulus // step for _, step in self.progressions)

    def members(self) -> list[int]:
        out: list[int] = []
        for offset, step in self.progressions:
            out.extend(range(offset, self.modulus, step))
        return sorted(out)

    def __contains__(self, u: int) -> bool:
        return any((u - offset) % step == 0 for offset, step in self.progressions)

    def integers_in(self, lo: int, hi: int) -> list[int]:
        """All integers x in [lo, hi] whose residue mod modulus is a root."""
        out: list[int] = []
        for offset, step in self.progressions:
            first = lo + (offset - lo) % step
            out.extend(range(first, hi + 1, step))
        return sorted(out)


def sqrt_classes_mod_prime_power(r: int, modulus: PrimePowerModulus) -> RootClassSet:
    """The complete solution set of u^2 = r mod p^m.

    For r = p^(2t) * r' with (r', p) = 1 and 2t < m the set is
    p^t * (+-v + p^(m-2t) Z); an odd power of p leaves no solutions, and
    r = 0 mod p^m gives the multiples of p^ceil(m/2).
    """
    p, m, q = modulus.p, modulus.m, modulus.q
    r0 = r % q
    if r0 == 0:
        step = p ** ((m + 1) // 2)
        return RootClassSet(((0, step),), q)
    e = valuation(r0, p)
    if e % 2 == 1:
        return RootClassSet((), q)
    t = e // 2
    r1 = r0 // p**e
    s1 = m - e
    w0 = _sqrt_mod_prime_int(r1, p)
    if w0 is None:
        return RootClassSet((), q)
    w = _lift_sqrt(w0, r1, p, 1, s1) if s1 > 1 else w0
    step = p ** (m - t)
    scale = p**t
    offsets = sorted({(scale * w) % step, (scale * (p**s1 - w)) % step})
    return RootClassSet(tuple((off, step) for off in offsets), q)

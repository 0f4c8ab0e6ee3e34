"""Truncated p-adic integers: residues mod p^W with their valuations.

Rationals with p-coprime denominators are handled as ``fractions.Fraction``
values; :func:`as_prational` validates them and :func:`lift_rational` maps
them into Z/p^W.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DenominatorNotUnit, NonUnitDivisor, PrecisionExceeded


def vp_int(n: int, p: int) -> int | None:
    """Exact p-adic valuation of a nonzero integer, None for zero."""
    if n == 0:
        return None
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_rational(x, p: int) -> int | None:
    """Valuation of a rational number (numerator minus denominator part)."""
    x = Fraction(x)
    if x == 0:
        return None
    return vp_int(x.numerator, p) - vp_int(x.denominator, p)


def parse_rational(text) -> Fraction:
    """Parse ``"num/den"``, an int, or a Fraction into a Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    return Fraction(str(text).strip())


def as_prational(x, p: int) -> Fraction:
    """Return x as a Fraction, checking that it lies in Z_p."""
    x = parse_rational(x)
    if x.denominator % p == 0:
        raise DenominatorNotUnit(f"{x} has a denominator divisible by {p}")
    return x


def lift_int(x, p: int, W: int) -> int:
    """Residue r in [0, p^W) with r * den = num (mod p^W)."""
    x = as_prational(x, p)
    mod = p**W
    return x.numerator * pow(x.denominator, -1, mod) % mod


@dataclass(frozen=True)
class PadicScalar:
    """An element of Z/p^W, stored as the canonical residue in [0, p^W)."""

    p: int
    W: int
    r: int

    def __post_init__(self):
        if self.p < 2 or self.W < 1:
            raise ValueError("need p >= 2 and W >= 1")
        object.__setattr__(self, "r", self.r % self.p**self.W)

    @property
    def modulus(self) -> int:
        return self.p**self.W

    @property
    def valuation(self):
        """Exact valuation of the residue, or the string '>=W' for zero."""
        return valuation(self)

    def _check(self, other):
        if isinstance(other, int):
            return PadicScalar(self.p, self.W, other)
        if (other.p, other.W) != (self.p, self.W):
            raise ValueError(
                f"mixed contexts: ({self.p},{self.W}) vs ({other.p},{other.W})")
        return other

    def __add__(self, other):
        other = self._check(other)
        return PadicScalar(self.p, self.W, self.r + other.r)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        return PadicScalar(self.p, self.W, self.r - other.r)

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        return PadicScalar(self.p, self.W, self.r * other.r)

    __rmul__ = __mul__

    def __neg__(self):
        return PadicScalar(self.p, self.W, -self.r)

    def __int__(self):
        return self.r

    def digits(self, count=None) -> list[int]:
        return digits(self, self.W if count is None else count)

    def __str__(self):
        return f"{self.r} (mod {self.p}^{self.W})"


def lift_rational(x, p: int, W: int) -> PadicScalar:
    """Map a rational in Z_p to its residue mod p^W."""
    return PadicScalar(p, W, lift_int(x, p, W))


def digits(x: PadicScalar, count: int) -> list[int]:
    """Base-p digits of x, least significant first."""
    if count > x.W:
        raise PrecisionExceeded(f"asked for {count} digits of a residue mod {x.p}^{x.W}")
    out = []
    r = x.r
    for _ in range(count):
        r, d = divmod(r, x.p)
        out.append(d)
    return out


def recompose(ds, p: int, W: int | None = None) -> PadicScalar:
    """Inverse of :func:`digits`."""
    W = len(ds) if W is None else W
    return PadicScalar(p, W, sum(d * p**k for k, d in enumerate(ds)))


def valuation(x: PadicScalar):
    if x.r == 0:
        return f">={x.W}"
    return vp_int(x.r, x.p)


def add(x: PadicScalar, y: PadicScalar) -> PadicScalar:
    return x + y


def subtract(x: PadicScalar, y: PadicScalar) -> PadicScalar:
    return x - y


def multiply(x: PadicScalar, y: PadicScalar) -> PadicScalar:
    return x * y


def negate(x: PadicScalar) -> PadicScalar:
    return -x


def invert_unit(x: PadicScalar) -> PadicScalar:
    if x.r % x.p == 0:
        raise NonUnitDivisor(f"{x.r} is not a unit mod {x.p}")
    return PadicScalar(x.p, x.W, pow(x.r, -1, x.modulus))

"""Exact arithmetic in Z[q]/(Phi_{p^s}(q)) and the root-of-unity identities.

Polynomials are coefficient lists (lowest degree first) over the integers.
Phi_{p^s}(q) = sum_{k<p} q^(k p^(s-1)) is monic, so reduction never leaves Z.
"""

from __future__ import annotations

from dataclasses import dataclass


def cyclotomic_prime_power(p: int, s: int) -> list[int]:
    """Coefficients of Phi_{p^s}(q)."""
    if s < 1:
        raise ValueError("need s >= 1")
    step = p ** (s - 1)
    out = [0] * (step * (p - 1) + 1)
    for k in range(p):
        out[k * step] = 1
    return out


def poly_mul(f: list[int], g: list[int]) -> list[int]:
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return out


def poly_add(f: list[int], g: list[int]) -> list[int]:
    n = max(len(f), len(g))
    return [(f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0) for i in range(n)]


def _trim(f: list[int]) -> list[int]:
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


def phi_p(p: int, power: int = 1) -> list[int]:
    """phi_p(q^power) = 1 + q^power + ... + q^(power (p-1))."""
    out = [0] * (power * (p - 1) + 1)
    for k in range(p):
        out[k * power] = 1
    return out


@dataclass(frozen=True)
class CycloPoly:
    """An element of Z[q]/(Phi_{p^s}) as its canonical remainder."""

    p: int
    s: int
    coeffs: tuple

    @property
    def degree_bound(self) -> int:
        return self.p ** (self.s - 1) * (self.p - 1)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __add__(self, other: "CycloPoly") -> "CycloPoly":
        return cyclo_reduce(poly_add(list(self.coeffs), list(other.coeffs)), self.p, self.s)

    def __neg__(self) -> "CycloPoly":
        return CycloPoly(self.p, self.s, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "CycloPoly") -> "CycloPoly":
        return self + (-other)

    def __mul__(self, other: "CycloPoly") -> "CycloPoly":
        return cyclo_reduce(poly_mul(list(self.coeffs), list(other.coeffs)), self.p, self.s)


def cyclo_reduce(poly, p: int, s: int) -> CycloPoly:
    """Remainder of an integer polynomial in q modulo Phi_{p^s}(q)."""
    phi = cyclotomic_prime_power(p, s)
    d = len(phi) - 1
    r = list(poly)
    for k in range(len(r) - 1, d - 1, -1):
        c = r[k]
        if c:
            for i, x in enumerate(phi):
                r[k - d + i] -= c * x
    r = r[:d] + [0] * max(0, d - len(r))
    return CycloPoly(p, s, tuple(r))


def q_monomial(p: int, s: int, k: int) -> CycloPoly:
    """q^k, using q^(p^s) = 1 first so negative k is allowed."""
    k %= p**s
    return cyclo_reduce([0] * k + [1], p, s)


def _z_poly_mul(f, g, p, s):
    zero = cyclo_reduce([0], p, s)
    out = [zero] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] = out[i + j] + a * b
    return out


def pochhammer_in_z(p: int, s: int, step: int, count: int, zpow: int) -> list[CycloPoly]:
    """prod_{m<count} (1 - z^zpow q^(step m)) as a z-polynomial over Z[q]/Phi_{p^s}."""
    one = cyclo_reduce([1], p, s)
    zero = cyclo_reduce([0], p, s)
    out = [one]
    for m in range(count):
        factor = [one] + [zero] * (zpow - 1) + [-q_monomial(p, s, step * m)]
        out = _z_poly_mul(out, factor, p, s)
    return out


def pochhammer_at_root(p: int, s: int) -> bool:
    """(z, q)_{p^s} = (z^p, q^p)_{p^(s-1)} = 1 - z^(p^s) over Z[q]/Phi_{p^s}."""
    N = p**s
    left = pochhammer_in_z(p, s, 1, N, 1)
    mid = pochhammer_in_z(p, s, p, N // p, p)
    one = cyclo_reduce([1], p, s)
    zero = cyclo_reduce([0], p, s)
    right = [one] + [zero] * (N - 1) + [-one]
    return left == mid == right


def qnumber_factorization(p: int, s: int) -> bool:
    """[p^s]_q = phi_p(q) phi_p(q^p) ... phi_p(q^(p^(s-1))) as integer polynomials."""
    if s < 1:
        raise ValueError("need s >= 1")
    lhs = [1] * p**s
    rhs = [1]
    for k in range(s):
        rhs = poly_mul(rhs, phi_p(p, p**k))
    return _trim(lhs) == _trim(rhs)


def cyclotomic_identity(p: int, s: int) -> bool:
    """Phi_{p^s}(q) (q^(p^(s-1)) - 1) = q^(p^s) - 1."""
    step = p ** (s - 1)
    lhs = poly_mul(cyclotomic_prime_power(p, s), [-1] + [0] * (step - 1) + [1])
    rhs = [-1] + [0] * (p**s - 1) + [1]
    return _trim(lhs) == _trim(rhs)


def _bracket_at_root(p: int, s: int, i: int, step: int, count: int) -> CycloPoly:
    """prod_{m=1}^{count-1} (1 - q^(i + step m)) over Z[q]/Phi_{p^s}."""
    r = cyclo_reduce([1], p, s)
    one = r
    for m in range(1, count):
        r = r * (one - q_monomial(p, s, i + step * m))
    return r


def bracket_ratio_at_root(p: int, s: int, i: int) -> dict:
    """[q^i,q]_{p^s} / [1,q]_{p^s} at a primitive p^s-th root of unity.

    The ratio is 0 or 1; it is decided exactly by comparing the numerator
    with 0 and with the (nonzero) denominator.  When p | i the ratio is
    also compared with [q^i,q^p]_{p^(s-1)} / [1,q^p]_{p^(s-1)}.
    """
    N = p**s
    num = _bracket_at_root(p, s, i, 1, N)
    den = _bracket_at_root(p, s, 0, 1, N)
    if num.is_zero():
        value = 0
    elif num == den:
        value = 1
    else:
        value = None
    out = {"i": i, "value": value}
    if i % p == 0 and s >= 1:
        num2 = _bracket_at_root(p, s, i, p, N // p)
        den2 = _bracket_at_root(p, s, 0, p, N // p)
        if num2.is_zero():
            v2 = 0
        elif num2 == den2:
            v2 = 1
        else:
            v2 = None
        out["reduced_value"] = v2
    return out

"""q-combinatorics and p-adic gamma functions.

Everything here is exact modular arithmetic.  Gamma values at points of Z_p
are obtained from the defining integer products at integer
representatives of growing precision, accepted once two consecutive
representatives agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DenominatorNotUnit, NoStabilization, PrecisionExhausted
from .padic import PadicScalar, as_prational, lift_int, parse_rational, vp_int, vp_rational


@dataclass(frozen=True)
class QContext:
    """Prime p, deformation t with v_p(t) >= 1, q = 1 + t, working exponent W."""

    p: int
    t: Fraction
    W: int

    def __post_init__(self):
        t = as_prational(self.t, self.p)
        object.__setattr__(self, "t", t)
        if t == 0:
            raise ValueError("t must be nonzero")
        if vp_rational(t, self.p) < 1:
            raise ValueError(f"need v_p(t) >= 1, got t = {t}")

    @property
    def vt(self) -> int:
        return vp_rational(self.t, self.p)

    @property
    def modulus(self) -> int:
        return self.p**self.W

    def q_mod(self, k: int | None = None) -> int:
        """q as a residue mod p^k (default k = W)."""
        k = self.W if k is None else k
        return (1 + lift_int(self.t, self.p, k)) % self.p**k

    @property
    def q(self) -> int:
        return self.q_mod()

    def scalar(self, r) -> PadicScalar:
        return PadicScalar(self.p, self.W, r)

    def power_context(self) -> "QContext":
        """The context with q replaced by q^p (t replaced by (1+t)^p - 1)."""
        return QContext(self.p, (1 + self.t) ** self.p - 1, self.W)


def q_number(ctx: QContext, n: int) -> PadicScalar:
    """[n]_q = 1 + q + ... + q^(n-1)."""
    mod, q = ctx.modulus, ctx.q
    s, qi = 0, 1
    for _ in range(n):
        s += qi
        qi = qi * q % mod
    return ctx.scalar(s)


def q_factorial(ctx: QContext, n: int) -> PadicScalar:
    mod, q = ctx.modulus, ctx.q
    r, num, qi = 1, 0, 1
    for _ in range(n):
        num = (num + qi) % mod
        qi = qi * q % mod
        r = r * num % mod
    return ctx.scalar(r)


def q_binomial(ctx: QContext, n: int, k: int) -> PadicScalar:
    """Gaussian binomial by the Pascal recurrence C(n,k) = C(n-1,k-1) + q^k C(n-1,k)."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    mod, q = ctx.modulus, ctx.q
    qk = [pow(q, j, mod) for j in range(k + 1)]
    row = [1] + [0] * k
    for m in range(1, n + 1):
        for j in range(min(m, k), 0, -1):
            row[j] = (row[j - 1] + qk[j] * row[j]) % mod
    return ctx.scalar(row[k])


def q_pochhammer(ctx: QContext, u, d: int) -> PadicScalar:
    """(u, q)_d = prod_{m<d} (1 - u q^m)."""
    mod, q = ctx.modulus, ctx.q
    u = int(u) % mod
    r = 1
    for _ in range(d):
        r = r * (1 - u) % mod
        u = u * q % mod
    return ctx.scalar(r)


def q_power(ctx: QContext, a) -> PadicScalar:
    """q^a for a in Z_p, via the residue of a mod p^W."""
    return ctx.scalar(pow(ctx.q, lift_int(a, ctx.p, ctx.W), ctx.modulus))


def q_power_mod(ctx: QContext, a, k: int) -> int:
    """q^a mod p^k for arbitrary k (independent of ctx.W)."""
    return pow(ctx.q_mod(k), lift_int(a, ctx.p, k), ctx.p**k)


def bracket(ctx: QContext, x, d: int) -> PadicScalar:
    """[q^x, q]_d = (1 - q^(x+1)) ... (1 - q^(x+d-1)); 1 for d <= 1."""
    mod = ctx.modulus
    if d <= 1:
        return ctx.scalar(1)
    u = q_power(ctx, parse_rational(x) + 1).r
    q = ctx.q
    r = 1
    for _ in range(d - 1):
        r = r * (1 - u) % mod
        u = u * q % mod
    return ctx.scalar(r)


def one_minus_q_power(ctx: QContext, x, k: int) -> tuple[int, int]:
    """Split 1 - q^x = p^v * u and return (v, u mod p^k).

    v = v_p(t) + v_p(x), computed at enough extra precision that the unit
    part is exact mod p^k.  For p = 2 this formula needs v_2(t) >= 2.
    """
    x = as_prational(x, ctx.p)
    if x == 0:
        raise ZeroDivisionError("1 - q^0 vanishes")
    if ctx.p == 2 and ctx.vt < 2:
        raise ValueError("p = 2 needs v_2(t) >= 2 for exact valuations of 1 - q^x")
    v = ctx.vt + vp_rational(x, ctx.p)
    K = k + v + 2
    y = (1 - q_power_mod(ctx, x, K)) % ctx.p**K
    if y % ctx.p**v or (y // ctx.p**v) % ctx.p == 0:
        raise PrecisionExhausted("unexpected valuation of 1 - q^x")
    return v, (y // ctx.p**v) % ctx.p**k


def gamma_pq_int(ctx: QContext, n: int, mod: int | None = None) -> int:
    """Koblitz: Gamma_{p,q}(n) = (-1)^n prod_{0<i<n, p does not divide i} [i]_q."""
    mod = ctx.modulus if mod is None else mod
    q = ctx.q_mod(vp_int(mod, ctx.p) or 1)
    p = ctx.p
    r, num, qi = 1, 0, 1
    for i in range(1, n):
        num = (num + qi) % mod
        qi = qi * q % mod
        if i % p:
            r = r * num % mod
    return (-1) ** n * r % mod


def gamma_p_int(p: int, n: int, mod: int) -> int:
    """Morita: Gamma_p(n) = (-1)^n prod_{0<i<n, p does not divide i} i."""
    r = 1
    for i in range(1, n):
        if i % p:
            r = r * i % mod
    return (-1) ** n * r % mod


def _stabilized(evaluate, x, p, s, cap):
    prev = None
    for k in range(s, s + cap + 1):
        val = evaluate(lift_int(x, p, k))
        if val == prev:
            return val, k
        prev = val
    raise NoStabilization(f"no agreement mod {p}^{s} up to representative precision {s + cap}")


def gamma_pq(ctx: QContext, x, s: int, cap: int = 4) -> PadicScalar:
    """Gamma_{p,q}(x) mod p^s for x in Z_p."""
    mod = ctx.p**s
    val, _ = _stabilized(lambda n: gamma_pq_int(ctx, n, mod), x, ctx.p, s, cap)
    return PadicScalar(ctx.p, s, val)


def gamma_p(p: int, x, s: int, cap: int = 4) -> PadicScalar:
    """Morita Gamma_p(x) mod p^s for x in Z_p."""
    mod = p**s
    val, _ = _stabilized(lambda n: gamma_p_int(p, n, mod), x, p, s, cap)
    return PadicScalar(p, s, val)


def gamma_pq_continuity(ctx: QContext, n: int, s_max: int) -> int:
    """Largest s <= s_max with Gamma_{p,q}(n) = Gamma_{p,q}(n + p^j) mod p^j for all j <= s.

    Used to measure, not assume, the continuity modulus.
    """
    mod = ctx.p ** s_max
    base = gamma_pq_int(ctx, n, mod)
    best = 0
    for j in range(1, s_max + 1):
        other = gamma_pq_int(ctx, n + ctx.p**j, mod)
        if (base - other) % ctx.p**j:
            break
        best = j
    return best


def _gamma_p_multiples(p: int, step: int, count: int, mod: int) -> list[int]:
    """Gamma_p(m * step) mod `mod` for m = 0..count, one running product."""
    out = [1]
    r = 1
    for i in range(1, count * step + 1):
        # r holds prod_{0<j<i, p does not divide j} j
        if i % step == 0:
            out.append((-1) ** i * r % mod)
        if i % p:
            r = r * i % mod
    return out


def gamma_p_taylor(p: int, order: int, s: int, cap: int = 8) -> list[PadicScalar]:
    """Taylor coefficients of Gamma_p at 0, mod p^s, up to x^order.

    Newton divided differences on the nodes 0, p^j, ..., order*p^j
    converge to the Taylor coefficients as j grows; j is raised until two
    consecutive node spacings agree mod p^s.
    """
    if order < 1:
        raise ValueError("order must be at least 1")
    prev = None
    for j in range(1, s + cap + 1):
        h = p**j
        extra = j * order + sum(vp_int(m, p) or 0 for m in range(2, order + 1)) + s + 2
        mod = p**extra
        vals = _gamma_p_multiples(p, h, order, mod)
        # forward differences divided by m! h^m give Newton coefficients on the grid;
        # convert them to monomial coefficients in x.
        table = [Fraction(v) for v in vals]
        newton = [table[0]]
        for m in range(1, order + 1):
            table = [table[i + 1] - table[i] for i in range(len(table) - 1)]
            fact = 1
            for i in range(2, m + 1):
                fact *= i
            newton.append(table[0] / (fact * h**m))
        # Newton basis prod_{i<m} (x - i h) expanded into monomials
        coeffs = [Fraction(0)] * (order + 1)
        basis = [Fraction(1)]
        for m in range(order + 1):
            for k, b in enumerate(basis):
                coeffs[k] += newton[m] * b
            nxt = [Fraction(0)] * (len(basis) + 1)
            for k, b in enumerate(basis):
                nxt[k + 1] += b
                nxt[k] -= m * h * b
            basis = nxt
        try:
            res = tuple(lift_int(c, p, s) for c in coeffs)
        except DenominatorNotUnit:  # grid still too coarse
            prev = None
            continue
        if res == prev:
            return [PadicScalar(p, s, r) for r in res]
        prev = res
    raise NoStabilization(f"Gamma_{p} Taylor coefficients did not stabilize mod {p}^{s}")

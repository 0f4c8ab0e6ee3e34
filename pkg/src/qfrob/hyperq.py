"""The q-hypergeometric system: series, fundamental matrices, operator, congruences.

Conventions: u_j = q^{a_j}, hbar = q^h, D f(z) = f(qz).  Series whose
coefficients have negative valuation are returned as a pair
``(stored, shift)`` meaning ``stored / p**shift``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DegenerateDenominator
from .padic import as_prational, lift_int, parse_rational, vp_int, vp_rational
from .qseries import (SeriesMatrix, TruncSeries, matrix_mul, series_invert,
                      series_mul, series_substitute_power, series_substitute_scale)
from .qspecial import QContext, one_minus_q_power, q_power_mod


@dataclass(frozen=True)
class QHParams:
    """Rank n, equivariant parameters a_1..a_n and h, and the q-context."""

    a: tuple
    h: Fraction
    ctx: QContext = field(compare=True)

    def __post_init__(self):
        p = self.ctx.p
        a = tuple(as_prational(x, p) for x in self.a)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "h", as_prational(self.h, p))
        lifts = [lift_int(x, p, self.ctx.W) for x in a]
        if len(set(lifts)) != len(lifts):
            raise ValueError("parameters a_i must be pairwise distinct mod p^W")

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def p(self) -> int:
        return self.ctx.p

    def u(self, j: int, k: int | None = None) -> int:
        k = self.ctx.W if k is None else k
        return q_power_mod(self.ctx, self.a[j], k)

    def hbar(self, k: int | None = None) -> int:
        k = self.ctx.W if k is None else k
        return q_power_mod(self.ctx, self.h, k)

    def frobenius_target(self) -> "QHParams":
        """Parameters (p a, p h) over the same q."""
        p = self.p
        return QHParams(tuple(p * x for x in self.a), p * self.h, self.ctx)

    def frobenius_source(self) -> "QHParams":
        """Parameters (a, h) over q^p."""
        return QHParams(self.a, self.h, self.ctx.power_context())


def _hyper_factors(params: QHParams, i: int, d: int):
    """Numerator and denominator exponents of the ratio c_d / c_{d-1}."""
    nums, dens = [], []
    ai = params.a[i]
    for aj in params.a:
        nums.append(ai - aj + params.h + d - 1)
        dens.append(ai - aj + d)
    return nums, dens


def hyper_series(params: QHParams, i: int, M: int) -> tuple[TruncSeries, int]:
    """F_i = sum_d prod_j (u_i hbar/u_j; q)_d / (u_i q/u_j; q)_d z^d.

    Returns (stored, shift) with F_i = stored / p^shift, values exact mod
    p^W.  p-parts of numerator and denominator factors are cancelled
    before any division.
    """
    ctx, p, W = params.ctx, params.p, params.ctx.W
    vals = [0]
    cut = M + 1
    for d in range(1, M + 1):
        nums, dens = _hyper_factors(params, i, d)
        if any(e == 0 for e in dens):
            raise DegenerateDenominator(f"1 - q^0 in the denominator at degree {d}")
        if any(e == 0 for e in nums):
            cut = d
            break
        v = vals[-1]
        for e in nums:
            v += ctx.vt + vp_rational(e, p)
        for e in dens:
            v -= ctx.vt + vp_rational(e, p)
        vals.append(v)
    shift = max(0, -min(vals))
    K = W + shift
    mod = p**K
    coeffs = [p**shift % mod]
    unit = 1
    for d in range(1, cut):
        nums, dens = _hyper_factors(params, i, d)
        for e in nums:
            unit = unit * one_minus_q_power(ctx, e, K)[1] % mod
        for e in dens:
            unit = unit * pow(one_minus_q_power(ctx, e, K)[1], -1, mod) % mod
        coeffs.append(p ** (vals[d] + shift) * unit % mod)
    coeffs += [0] * (M + 1 - len(coeffs))
    return TruncSeries(p, K, coeffs), shift


def analytic_fundamental(params: QHParams, M: int) -> SeriesMatrix:
    """Psi'_{ij}(z) = u_j^(i-1) F_j(z q^(i-1)); Psi'(0) is the Vandermonde (u_j^(i-1))."""
    n, p = params.n, params.p
    cols = [hyper_series(params, j, M) for j in range(n)]
    shift = max(s for _, s in cols)
    K = params.ctx.W + shift
    mod = p**K
    q = params.ctx.q_mod(K)
    rows = [[None] * n for _ in range(n)]
    for j, (f, s) in enumerate(cols):
        f = TruncSeries(p, K, [c * p ** (shift - s) for c in f.c])
        uj = params.u(j, K)
        for i in range(n):
            g = series_substitute_scale(f, pow(q, i, mod))
            rows[i][j] = g * pow(uj, i, mod)
    return SeriesMatrix(rows, shift)


def source_fundamental(params: QHParams, M: int) -> SeriesMatrix:
    """Psi'(a, h, q^p, z^p): the frame of the Frobenius source system."""
    frame = analytic_fundamental(params.frobenius_source(), M)
    return frame.map(lambda e: series_substitute_power(e, params.p))


def alpha_bar(params: QHParams, k: int | None = None) -> list[int]:
    """Coefficients of x^0..x^n in prod_i (1 - x u_i)."""
    k = params.ctx.W if k is None else k
    mod = params.p**k
    poly = [1]
    for j in range(params.n):
        uj = params.u(j, k)
        new = poly + [0]
        for m in range(len(poly)):
            new[m + 1] = (new[m + 1] - uj * poly[m]) % mod
        poly = new
    return poly


def companion_apply(params: QHParams, M: int) -> SeriesMatrix:
    """M_L(z) as a matrix of truncated series.

    Rows 1..n-1 are the shift pattern; the last row has entries
    abar_{n-m} (z hbar^m - 1) / (1 - hbar^n z) in column m.
    """
    ctx, p, n, W = params.ctx, params.p, params.n, params.ctx.W
    mod = p**W
    hb = params.hbar(W)
    ab = alpha_bar(params, W)
    denom_inv = series_invert(TruncSeries(p, W, [1, -pow(hb, n, mod)] + [0] * (M - 1)))
    rows = []
    for i in range(n - 1):
        rows.append([TruncSeries(p, W, [int(j == i + 1)] + [0] * M) for j in range(n)])
    last = []
    for m in range(n):
        num = TruncSeries(p, W, [-ab[n - m], ab[n - m] * pow(hb, m, mod)] + [0] * (M - 1))
        last.append(series_mul(num, denom_inv))
    rows.append(last)
    return SeriesMatrix(rows)


def operator_coefficients(params: QHParams, k: int | None = None) -> list[int]:
    """alpha_m: coefficients of x^m in prod_i (1 - x/u_i)."""
    k = params.ctx.W if k is None else k
    mod = params.p**k
    poly = [1]
    for j in range(params.n):
        inv = pow(params.u(j, k), -1, mod)
        new = poly + [0]
        for m in range(len(poly)):
            new[m + 1] = (new[m + 1] - inv * poly[m]) % mod
        poly = new
    return poly


def apply_difference_operator(params: QHParams, f: TruncSeries, x) -> TruncSeries:
    """Analytic part of P(a, hbar, z) applied to z^x f(z).

    P = sum_m alpha_m (1 - z hbar^m) D^m with D g(z) = g(qz), so D^m acts on
    z^x f as q^(m x) f(q^m z).
    """
    p, W = params.p, f.W
    mod = p**W
    ctx = params.ctx
    al = operator_coefficients(params, W)
    hb = params.hbar(W)
    qx = q_power_mod(ctx, x, W)
    q = ctx.q_mod(W)
    out = TruncSeries.zero(p, W, f.M)
    for m, am in enumerate(al):
        g = series_substitute_scale(f, pow(q, m, mod)) * (am * pow(qx, m, mod) % mod)
        zg = TruncSeries(p, W, [0] + g.c[:-1])
        out = out + g - zg * pow(hb, m, mod)
    return out


def check_first_order_system(params: QHParams, M: int) -> bool:
    """Psi'(zq) diag(u) = M_L(z) Psi'(z) to order M - 1, at working precision."""
    frame = analytic_fundamental(params, M)
    p, n = params.p, params.n
    W = frame.W
    q = params.ctx.q_mod(W)
    mod = p**W
    lhs = frame.map(lambda e: series_substitute_scale(e, q))
    lhs = SeriesMatrix([[lhs.entries[i][j] * params.u(j, W) for j in range(n)]
                        for i in range(n)], frame.shift)
    comp = companion_apply(QHParams(params.a, params.h, _ctx_at(params.ctx, W)), M)
    rhs = matrix_mul(comp, frame)
    for i in range(n):
        for j in range(n):
            a, b = lhs.entries[i][j], rhs.entries[i][j]
            if any((x - y) % mod for x, y in zip(a.c[:M], b.c[:M])):
                return False
    return True


def _ctx_at(ctx: QContext, W: int) -> QContext:
    return QContext(ctx.p, ctx.t, W)


# ---- finite brackets and the congruences --------------------------------

def _bracket_mod(ctx: QContext, base_power: int, y, d: int, k: int) -> int:
    """prod_{m=1}^{d-1} (1 - Q^m q^y) mod p^k with Q = q^base_power."""
    mod = ctx.p**k
    y = parse_rational(y)
    r = 1
    for m in range(1, d):
        e = y + base_power * m
        if e == 0:
            return 0
        r = r * (1 - q_power_mod(ctx, e, k)) % mod
    return r


def _bracket_valuation(ctx: QContext, base_power: int, y, d: int):
    """Exact valuation of the bracket (None when a factor vanishes)."""
    y = parse_rational(y)
    v = 0
    for m in range(1, d):
        e = y + base_power * m
        if e == 0:
            return None
        v += ctx.vt + vp_rational(e, ctx.p)
    return v


def check_pochhammer_congruence(ctx: QContext, i: int, s: int) -> bool:
    """Bracket-ratio congruence for integer i, compared without division.

    p | i:  [q^i,q]_{p^s}/[1,q]_{p^s} = [q^i,q^p]_{p^{s-1}}/[1,q^p]_{p^{s-1}} mod p^s
    p not dividing i: the left ratio is 0 mod p^s.
    """
    p = ctx.p
    N, N1 = p**s, p ** (s - 1)
    vB = _bracket_valuation(ctx, 1, 0, N)
    if i % p:
        vA = _bracket_valuation(ctx, 1, i, N)
        return vA is None or vA >= s + vB
    vD = _bracket_valuation(ctx, p, 0, N1)
    k = s + vB + vD + 2
    A = _bracket_mod(ctx, 1, i, N, k)
    B = _bracket_mod(ctx, 1, 0, N, k)
    C = _bracket_mod(ctx, p, i, N1, k)
    D = _bracket_mod(ctx, p, 0, N1, k)
    return (A * D - C * B) % p ** (s + vB + vD) == 0


def check_polynomial_congruence(ctx: QContext, s: int) -> bool:
    """(z, q)_{p^s} = (z^p, q^p)_{p^{s-1}} mod p^s as polynomials in z."""
    p = ctx.p
    mod = p**s
    q = ctx.q_mod(s)

    def poch(step, count, zpow):
        poly = [1]
        u = 1
        for _ in range(count):
            new = poly + [0] * zpow
            for k, c in enumerate(poly):
                new[k + zpow] = (new[k + zpow] - u * c) % mod
            poly = new
            u = u * pow(q, step, mod) % mod
        return poly

    left = poch(1, p**s, 1)
    right = poch(p, p ** (s - 1), p)
    return left == right


def vertex_at_prime_power(params: QHParams, x, s: int, M: int,
                          base_power: int = 1) -> list[tuple[int, int, int]]:
    """Coefficients of sum_d prod_i [Q^(x+d-a_i), Q]_{p^s} / [1, Q]_{p^s} z^d.

    Q = q^base_power and exponents are measured in powers of Q.  Each
    coefficient is returned as (numerator residue, denominator residue,
    denominator valuation) mod p^K with K large enough to compare ratios
    mod p^s; use :func:`vertex_ratio_mod` to reduce.
    """
    ctx, p = params.ctx, params.p
    N = p**s
    x = parse_rational(x)
    vB = _bracket_valuation(ctx, base_power, 0, N)
    K = s + params.n * vB + 2
    B = _bracket_mod(ctx, base_power, 0, N, K)
    out = []
    for d in range(M + 1):
        num = 1
        for ai in params.a:
            num = num * _bracket_mod(ctx, base_power, base_power * (x + d - ai), N, K) % p**K
        out.append((num, pow(B, params.n, p**K), params.n * vB))
    return out


def vertex_ratio_mod(entry, p: int, s: int) -> int:
    """Reduce a (num, den, v_den) triple to the ratio mod p^s (needs v(num) >= v_den)."""
    num, den, vd = entry
    if num % p**vd:
        raise ValueError("ratio is not p-integral")
    k = vp_int(den, p) or 0
    unit = den // p**k
    mod = p**s
    return (num // p**vd) * pow(unit % mod, -1, mod) % mod if s > 0 else 0


def check_vertex_congruence(params: QHParams, x, s: int, M: int) -> dict:
    """V(pa, px, p^s, q, z) = V(a, x, p^{s-1}, q^p, z^p) mod p^s up to z^M.

    Returns a verdict dict with the first failing degree (or None).
    """
    p = params.p
    target = QHParams(tuple(p * a for a in params.a), params.h, params.ctx)
    left = vertex_at_prime_power(target, p * parse_rational(x), s, M)
    right = vertex_at_prime_power(params, x, s - 1, M // p, base_power=p)
    first_fail = None
    for d in range(M + 1):
        lv = vertex_ratio_mod(left[d], p, s)
        rv = vertex_ratio_mod(right[d // p], p, s) if d % p == 0 else 0
        if lv != rv:
            first_fail = d
            break
    return {"holds": first_fail is None, "first_failure": first_fail}

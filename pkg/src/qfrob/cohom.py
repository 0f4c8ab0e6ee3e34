"""The q -> 1 limit: hypergeometric and Bessel differential systems over Z_p.

Series coefficients are computed exactly as Fractions (they are cheap at
desk-scale orders) and only then moved to Z/p^W, where the frobq frame and
search machinery takes over.  D = z d/dz throughout; the z^{a_j} prefactor
of a solution is stripped, so D acts on the analytic part as a_j + D.

The non-equivariant Bessel case works in Z[x]/(x^n): a solution is a
polynomial in x with series coefficients and the logarithmic factor z^x is
never formed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DegenerateDenominator
from .frobq import (LinearFamily, SearchConfig, SearchResult, diagonal_family, frame_pair,
                    search_family, with_absolute_precision)
from .padic import PadicScalar, as_prational, digits as padic_digits
from .qseries import SeriesMatrix, matrix_invert_series, matrix_mul
from .qspecial import gamma_p, gamma_p_taylor


@dataclass(frozen=True)
class ODEParams:
    """Prime p, parameters a_1..a_n and h (None for the projective operator)."""

    p: int
    a: tuple
    h: Fraction | None = None

    def __post_init__(self):
        a = tuple(as_prational(x, self.p) for x in self.a)
        object.__setattr__(self, "a", a)
        if self.h is not None:
            object.__setattr__(self, "h", as_prational(self.h, self.p))
        if len(set(a)) != len(a):
            raise ValueError("parameters a_i must be pairwise distinct")

    @property
    def n(self) -> int:
        return len(self.a)

    def frobenius_target(self) -> "ODEParams":
        p = self.p
        h = None if self.h is None else p * self.h
        return ODEParams(p, tuple(p * x for x in self.a), h)


# ---- exact series ---------------------------------------------------------

def classical_hyper_coefficients(a, h, i: int, M: int) -> list[Fraction]:
    """Coefficients of sum_d prod_j (a_i+h-a_j)_d / (a_i+1-a_j)_d z^d up to z^M."""
    out = [Fraction(1)]
    c = Fraction(1)
    for d in range(1, M + 1):
        for aj in a:
            num = a[i] + h - aj + d - 1
            den = a[i] - aj + d
            if den == 0:
                raise DegenerateDenominator(f"rising factorial vanishes at degree {d}")
            c = c * num / den
        out.append(c)
    return out


def projective_coefficients(a, i: int, M: int, kappa=1) -> list[Fraction]:
    """Coefficients of sum_d (kappa z)^d / prod_j (a_i-a_j+1)_d up to z^M."""
    out = [Fraction(1)]
    c = Fraction(1)
    for d in range(1, M + 1):
        c = c * kappa
        for aj in a:
            den = a[i] - aj + d
            if den == 0:
                raise DegenerateDenominator(f"rising factorial vanishes at degree {d}")
            c = c / den
        out.append(c)
    return out


def _spread(coeffs, e: int, M: int) -> list[Fraction]:
    """f(z) -> f(z^e) truncated at z^M."""
    out = [Fraction(0)] * (M + 1)
    for k, c in enumerate(coeffs):
        if k * e > M:
            break
        out[k * e] = c
    return out


def _frame_rows(series, exps, M: int, zpow: int = 1) -> list:
    """Rows k = 0..n-1, column j: (a_j + D)^k F_j, then z -> z^zpow."""
    n = len(series)
    rows = [[None] * n for _ in range(n)]
    for j, f in enumerate(series):
        for k in range(n):
            rows[k][j] = _spread(f, zpow, M)
            f = [(exps[j] + d) * c for d, c in enumerate(f)]
    return rows


def classical_hyper_series(params: ODEParams, i: int, M: int, W: int) -> tuple:
    """The i-th hypergeometric series over Z/p^W as (stored, shift)."""
    coeffs = classical_hyper_coefficients(params.a, params.h, i, M)
    m = SeriesMatrix.from_fractions([[coeffs]], params.p, W)
    return m.entries[0][0], m.shift


def classical_analytic_fundamental(params: ODEParams, M: int, W: int, zpow: int = 1) -> SeriesMatrix:
    """Rows ((a_j + D)^k F_j)(z^zpow); the value at z = 0 is the Vandermonde (a_j^k)."""
    series = [classical_hyper_coefficients(params.a, params.h, j, M) for j in range(params.n)]
    return SeriesMatrix.from_fractions(_frame_rows(series, params.a, M, zpow), params.p, W)


def projective_fundamental(params: ODEParams, M: int, W: int, kappa=1, zpow: int = 1) -> SeriesMatrix:
    series = [projective_coefficients(params.a, j, M, kappa) for j in range(params.n)]
    return SeriesMatrix.from_fractions(_frame_rows(series, params.a, M, zpow), params.p, W)


# ---- operator checks (exact) ------------------------------------------------

def _poly_in_D(roots, f, shift: Fraction) -> list:
    """prod_r (D + shift + r) applied to the series f (exact)."""
    out = list(f)
    for r in roots:
        out = [(shift + r + d) * c for d, c in enumerate(out)]
    return out


def hypergeometric_residual(params: ODEParams, i: int, M: int) -> list[Fraction]:
    """z prod(D+h-a_j) - prod(D-a_j) applied to z^{a_i} F_i, analytic part, to order M."""
    f = classical_hyper_coefficients(params.a, params.h, i, M)
    left = _poly_in_D([params.h - aj for aj in params.a], f, params.a[i])
    right = _poly_in_D([-aj for aj in params.a], f, params.a[i])
    return [(left[d - 1] if d else 0) - right[d] for d in range(M + 1)]


def projective_residual(params: ODEParams, i: int, M: int) -> list[Fraction]:
    """z - prod(D - a_j) applied to z^{a_i} F_i (kappa = 1)."""
    f = projective_coefficients(params.a, i, M)
    right = _poly_in_D([-aj for aj in params.a], f, params.a[i])
    return [(f[d - 1] if d else 0) - right[d] for d in range(M + 1)]


# ---- closed forms -------------------------------------------------------------

def _ratios(values, p: int, prec: int) -> list[PadicScalar]:
    mod = p**prec
    inv_last = pow(values[-1], -1, mod)
    return [PadicScalar(p, prec, v * inv_last) for v in values]


def dwork_closed_form(params: ODEParams, prec: int, cap: int = 4) -> list[PadicScalar]:
    """U(0)_ii / U(0)_nn with U(0)_ii = prod_j G(p(a_i-a_j+h)) / (G(p(a_i-a_j)) G(ph))."""
    p, a, h = params.p, params.a, params.h
    mod = p**prec

    def G(x):
        return gamma_p(p, x, prec, cap).r

    vals = []
    for ai in a:
        num, den = 1, 1
        for aj in a:
            num = num * G(p * (ai - aj + h)) % mod
            den = den * G(p * (ai - aj)) * G(p * h) % mod
        vals.append(num * pow(den, -1, mod) % mod)
    return _ratios(vals, p, prec)


def projective_closed_form(params: ODEParams, prec: int, reciprocal: bool = False,
                           cap: int = 4) -> list[PadicScalar]:
    """Ratios of prod_j Gamma_p(p(a_i - a_j)) (or of their reciprocals)."""
    p = params.p
    mod = p**prec
    vals = []
    for ai in params.a:
        v = 1
        for aj in params.a:
            v = v * gamma_p(p, p * (ai - aj), prec, cap).r % mod
        vals.append(pow(v, -1, mod) if reciprocal else v)
    return _ratios(vals, p, prec)


# ---- searches -----------------------------------------------------------------

def _normalized_family(target: SeriesMatrix, source: SeriesMatrix) -> LinearFamily:
    phi_t, phi_s_inv, loss = frame_pair(target, source, normalized=True)
    return diagonal_family(phi_t, phi_s_inv, loss)


def dwork_family(params: ODEParams, config: SearchConfig) -> LinearFamily:
    tgt = params.frobenius_target()

    def build(W):
        target = classical_analytic_fundamental(tgt, config.M, W)
        source = classical_analytic_fundamental(params, config.M, W, zpow=params.p)
        return _normalized_family(target, source)

    return with_absolute_precision(build, config.working_exponent())


def projective_scale(p: int, n: int) -> int:
    """kappa = (-p)^(n/(p-1)), the rescaling z = kappa y making the system p-adically
    convergent on the closed unit disc; needs (p - 1) | n."""
    if n % (p - 1):
        raise ValueError(f"need (p-1) | n for a rational scale, got p={p}, n={n}")
    return (-p) ** (n // (p - 1))


def projective_family(params: ODEParams, config: SearchConfig) -> LinearFamily:
    tgt = params.frobenius_target()
    kappa = projective_scale(params.p, params.n)

    def build(W):
        target = projective_fundamental(tgt, config.M, W, kappa)
        source = projective_fundamental(params, config.M, W, kappa, zpow=params.p)
        return _normalized_family(target, source)

    return with_absolute_precision(build, config.working_exponent())


def _compare(res: SearchResult, closed: list[PadicScalar]) -> bool:
    k = res.certified
    cf = [padic_digits(PadicScalar(x.p, k, x.r), k) for x in closed[:-1]]
    res.closed_form = cf
    res.match = [ds[:k] for ds in res.digits] == cf
    return res.match


def _recheck(res: SearchResult, family_fn, params, config: SearchConfig):
    if config.recheck:
        again = search_family(family_fn(params, config.bumped()), params.n - 1, config.bumped())
        res.stable = again.digits == res.digits


def dwork_search(params: ODEParams, config: SearchConfig, log=None) -> SearchResult:
    """Digit search for the hypergeometric Frobenius structure, compared with Gamma_p ratios."""
    if params.h is None:
        raise ValueError("dwork_search needs h")
    res = search_family(dwork_family(params, config), params.n - 1, config, log)
    _compare(res, dwork_closed_form(params, res.certified, config.gamma_cap))
    _recheck(res, dwork_family, params, config)
    return res


def projective_search(params: ODEParams, config: SearchConfig, log=None) -> SearchResult:
    """Digit search for z - prod(D - a_i), compared with prod_j Gamma_p(p(a_i - a_j)) ratios.

    The reciprocal products are compared as well and reported under
    ``extra["reciprocal_match"]``.
    """
    res = search_family(projective_family(params, config), params.n - 1, config, log)
    _compare(res, projective_closed_form(params, res.certified, cap=config.gamma_cap))
    recip = projective_closed_form(params, res.certified, True, config.gamma_cap)
    k = res.certified
    recip_digits = [padic_digits(PadicScalar(x.p, k, x.r), k) for x in recip[:-1]]
    res.extra = {"reciprocal_closed_form": recip_digits,
                 "reciprocal_match": [ds[:k] for ds in res.digits] == recip_digits}
    _recheck(res, projective_family, params, config)
    return res


# ---- Bessel ------------------------------------------------------------------

def _trunc_mul(f, g, n):
    out = [Fraction(0)] * n
    for i, a in enumerate(f):
        if a:
            for j in range(n - i):
                out[i + j] += a * g[j]
    return out


@dataclass
class NilpotentFrame:
    """g(x, z) = sum_d z^d / ((x+1)_d)^n in Q[x]/(x^n) and the frame rows (x + D)^k g.

    ``g[d]`` lists the coefficients of x^0..x^{n-1} in the z^d coefficient;
    ``rows[k][l]`` is the series (list of Fractions) multiplying x^l in (x+D)^k g.
    """

    n: int
    M: int
    g: list
    rows: list

    def matrix(self, p: int, W: int, kappa=1, zpow: int = 1) -> SeriesMatrix:
        """Theta(kappa z^zpow) over Z/p^W."""
        scaled = [[_spread([c * Fraction(kappa) ** d for d, c in enumerate(e)], zpow, self.M)
                   for e in row] for row in self.rows]
        return SeriesMatrix.from_fractions(scaled, p, W)


def bessel_frame(n: int, M: int) -> NilpotentFrame:
    g = [[Fraction(1)] + [Fraction(0)] * (n - 1)]
    for d in range(1, M + 1):
        # 1/(x + d) = (1/d) sum_k (-x/d)^k
        inv = [Fraction((-1) ** k, d ** (k + 1)) for k in range(n)]
        step = [Fraction(1)] + [Fraction(0)] * (n - 1)
        for _ in range(n):
            step = _trunc_mul(step, inv, n)
        g.append(_trunc_mul(g[-1], step, n))
    rows = []
    cur = g
    for _ in range(n):
        rows.append([[cur[d][l] for d in range(M + 1)] for l in range(n)])
        # (x + D): multiply each z^d coefficient by (x + d)
        cur = [_trunc_mul(cur[d], [Fraction(d), Fraction(1)] + [Fraction(0)] * (n - 2), n)
               if n > 1 else [cur[d][0] * d] for d in range(M + 1)]
    return NilpotentFrame(n, M, g, rows)


def bessel_residual(n: int, M: int) -> list:
    """(z - D^n) applied to z^x g(x, z) in Q[x]/(x^n): list of x-polynomials per degree."""
    fr = bessel_frame(n, M)
    out = []
    for d in range(M + 1):
        lin = [Fraction(d), Fraction(1)] + [Fraction(0)] * (n - 2) if n > 1 else [Fraction(d)]
        pw = [Fraction(1)] + [Fraction(0)] * (n - 1)
        for _ in range(n):
            pw = _trunc_mul(pw, lin, n)
        right = _trunc_mul(pw, fr.g[d], n)
        left = fr.g[d - 1] if d else [Fraction(0)] * n
        out.append([x - y for x, y in zip(left, right)])
    return out


def bessel_family(p: int, n: int, config: SearchConfig) -> LinearFamily:
    """U(gamma) = Theta(kappa y) [[1, gamma], [0, p]] Theta(kappa y^p)^{-1}, linear in gamma."""
    if n != 2:
        raise ValueError("the Bessel search is implemented for n = 2")
    kappa = projective_scale(p, n)
    frame = bessel_frame(n, config.M)

    def build(W):
        T = frame.matrix(p, W, kappa)
        S = frame.matrix(p, W, kappa, zpow=p)
        S_inv, loss = matrix_invert_series(S)
        diag = SeriesMatrix.constant([[1, 0], [0, p]], p, T.W, config.M)
        e12 = SeriesMatrix.constant([[0, 1], [0, 0]], p, T.W, config.M)
        A0 = matrix_mul(matrix_mul(T, diag), S_inv).normalized()
        A1 = matrix_mul(matrix_mul(T, e12), S_inv).normalized()
        return LinearFamily(A0, [A1], loss)

    return with_absolute_precision(build, config.working_exponent())


def bessel_constant_matrix(p: int, n: int, prec: int, cap: int = 8) -> list[list[int]]:
    """Gamma_p(x)^n . p^deg in the basis 1, x, ..., x^{n-1}, mod p^prec.

    Operators act on row vectors from the right, so multiplication by
    sum_k b_k x^k is the upper Toeplitz matrix (b_{j-i}).
    """
    mod = p**prec
    if n == 1:
        return [[1]]
    taylor = [t.r for t in gamma_p_taylor(p, n - 1, prec + n, cap)]
    b = [1] + [0] * (n - 1)
    for _ in range(n):
        b = [sum(b[i] * taylor[k - i] for i in range(k + 1)) % mod for k in range(n)]
    return [[(b[j - i] * p**j) % mod if j >= i else 0 for j in range(n)] for i in range(n)]


@dataclass
class BesselResult:
    p: int
    n: int
    search: SearchResult
    gamma: PadicScalar
    reference: PadicScalar
    match: bool
    scaled_reference: PadicScalar
    scaled_match: bool

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n, "gamma": self.gamma.r,
                "certified_exponent": self.search.certified,
                "digits": self.search.digits[0],
                "p_gamma_prime": self.reference.r, "match": self.match,
                "minus_n_p_gamma_prime": self.scaled_reference.r,
                "minus_n_match": self.scaled_match,
                "stages": self.search.stages, "stable": self.search.stable}


def bessel_gamma_search(p: int, config: SearchConfig, n: int = 2, log=None) -> BesselResult:
    """Search the off-diagonal entry gamma of Lambda = [[1, gamma], [0, p]].

    The result is compared with p Gamma_p'(0) and, for information, with
    -n p Gamma_p'(0).
    """
    fam = bessel_family(p, n, config)
    res = search_family(fam, 1, config, log)
    s = res.certified
    g = PadicScalar(p, s, res.residues[0])
    d1 = gamma_p_taylor(p, 1, s + 1)[1].r
    ref = PadicScalar(p, s, p * d1)
    scaled = PadicScalar(p, s, -n * p * d1)
    if config.recheck:
        again = search_family(bessel_family(p, n, config.bumped()), 1, config.bumped())
        res.stable = again.digits == res.digits
    res.closed_form = [padic_digits(ref, s)]
    res.match = g == ref
    return BesselResult(p, n, res, g, ref, g == ref, scaled, g == scaled)

"""Truncated power series over Z/p^W and square matrices of them.

A :class:`TruncSeries` holds residues c_0..c_M mod p^W.  A
:class:`SeriesMatrix` adds one integer ``shift`` shared by all entries: the
matrix it represents is ``entries / p**shift``.  That is how coefficients
of negative valuation (hypergeometric series, inverses of frames) are
carried through products without leaving integer arithmetic.  Precision
losses are explicit: dividing out p^k lowers W by k.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations

from .errors import NonUnitConstantTerm, PrecisionExhausted, SingularConstantTerm
from .padic import PadicScalar, lift_int, vp_int, vp_rational


class TruncSeries:
    """c_0 + c_1 z + ... + c_M z^M + O(z^{M+1}) with residues mod p^W."""

    __slots__ = ("p", "W", "c")

    def __init__(self, p: int, W: int, coeffs):
        if W < 0:
            raise PrecisionExhausted("negative working exponent")
        self.p = p
        self.W = W
        mod = p**W
        self.c = [int(x) % mod for x in coeffs]
        if not self.c:
            raise ValueError("a series needs at least the constant coefficient")

    @classmethod
    def zero(cls, p, W, M):
        return cls(p, W, [0] * (M + 1))

    @classmethod
    def one(cls, p, W, M):
        return cls(p, W, [1] + [0] * M)

    @classmethod
    def monomial(cls, p, W, M, k, coeff=1):
        c = [0] * (M + 1)
        if k <= M:
            c[k] = coeff
        return cls(p, W, c)

    @property
    def M(self) -> int:
        return len(self.c) - 1

    @property
    def modulus(self) -> int:
        return self.p**self.W

    def coefficient(self, k: int) -> PadicScalar:
        return PadicScalar(self.p, max(self.W, 1), self.c[k])

    def valuation(self):
        """Smallest valuation among coefficients nonzero mod p^W (None if all vanish)."""
        vals = [vp_int(x, self.p) for x in self.c if x]
        return min(vals) if vals else None

    def is_zero(self) -> bool:
        return not any(self.c)

    def reduced(self, W: int) -> "TruncSeries":
        if W > self.W:
            raise PrecisionExhausted(f"cannot raise precision from {self.W} to {W}")
        return TruncSeries(self.p, W, self.c)

    def truncated(self, M: int) -> "TruncSeries":
        return TruncSeries(self.p, self.W, self.c[: M + 1])

    def divided_by_p(self, k: int) -> "TruncSeries":
        """Exact division by p^k; the result is known mod p^(W-k)."""
        if k == 0:
            return self
        pk = self.p**k
        if any(x % pk for x in self.c):
            raise ValueError(f"series is not divisible by {self.p}^{k}")
        return TruncSeries(self.p, self.W - k, [x // pk for x in self.c])

    def times_p(self, k: int) -> "TruncSeries":
        """Multiply by p^k; the product is known mod p^(W+k)."""
        return TruncSeries(self.p, self.W + k, [x * self.p**k for x in self.c])

    def _align(self, other):
        if self.p != other.p:
            raise ValueError("series over different primes")
        return min(self.W, other.W), min(self.M, other.M)

    def __add__(self, other):
        if isinstance(other, int):
            return TruncSeries(self.p, self.W, [self.c[0] + other] + self.c[1:])
        W, M = self._align(other)
        return TruncSeries(self.p, W, [a + b for a, b in zip(self.c[: M + 1], other.c)])

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries(self.p, self.W, [-x for x in self.c])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return TruncSeries(self.p, self.W, [x * other for x in self.c])
        if isinstance(other, PadicScalar):
            return self * other.r
        return series_mul(self, other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (self.p, self.W, self.c) == (other.p, other.W, other.c)

    def __repr__(self):
        return f"TruncSeries(p={self.p}, W={self.W}, {self.c})"

    def __str__(self):
        terms = []
        for k, x in enumerate(self.c):
            if x == 0:
                continue
            if k == 0:
                terms.append(str(x))
            elif k == 1:
                terms.append(f"{x}*z")
            else:
                terms.append(f"{x}*z^{k}")
        terms.append(f"O(z^{self.M + 1})")
        return " + ".join(terms)

    def to_json(self):
        return {"p": self.p, "W": self.W, "coefficients": list(self.c)}


def series_from_fractions(values, p: int, W: int) -> TruncSeries:
    """Lift a list of p-integral rationals coefficientwise."""
    return TruncSeries(p, W, [lift_int(v, p, W) for v in values])


def series_mul(f: TruncSeries, g: TruncSeries) -> TruncSeries:
    W, M = f._align(g)
    mod = f.p**W
    a, b = f.c, g.c
    out = [0] * (M + 1)
    for i in range(M + 1):
        ai = a[i]
        if ai:
            for j in range(M + 1 - i):
                out[i + j] += ai * b[j]
    return TruncSeries(f.p, W, [x % mod for x in out])


def series_invert(f: TruncSeries) -> TruncSeries:
    """1/f for f with a unit constant term, exact mod p^W."""
    if f.c[0] % f.p == 0:
        raise NonUnitConstantTerm("constant term is divisible by p")
    mod = f.modulus
    u = pow(f.c[0], -1, mod)
    g = [u]
    for k in range(1, f.M + 1):
        s = sum(f.c[j] * g[k - j] for j in range(1, k + 1))
        g.append(-s * u % mod)
    return TruncSeries(f.p, f.W, g)


def series_substitute_scale(f: TruncSeries, c) -> TruncSeries:
    """f(z) -> f(c z)."""
    c = int(c)
    mod = f.modulus
    out, ck = [], 1
    for x in f.c:
        out.append(x * ck % mod)
        ck = ck * c % mod
    return TruncSeries(f.p, f.W, out)


def series_substitute_power(f: TruncSeries, e: int) -> TruncSeries:
    """f(z) -> f(z^e), keeping the order M."""
    if e < 1:
        raise ValueError("exponent must be positive")
    out = [0] * (f.M + 1)
    for k in range(f.M // e + 1):
        out[k * e] = f.c[k]
    return TruncSeries(f.p, f.W, out)


def cancel_pole(f: TruncSeries, m: int) -> TruncSeries:
    """(1 - z)^m f, truncated at the same order."""
    c = list(f.c)
    for _ in range(m):
        c = [c[0]] + [c[k] - c[k - 1] for k in range(1, len(c))]
    return TruncSeries(f.p, f.W, c)


def derivative_theta(f: TruncSeries, x=0) -> TruncSeries:
    """(x + z d/dz) f for an integer (or lifted) exponent x."""
    return TruncSeries(f.p, f.W, [(x + k) * c for k, c in enumerate(f.c)])


class SeriesMatrix:
    """Square matrix of truncated series representing ``entries / p**shift``."""

    __slots__ = ("entries", "shift")

    def __init__(self, entries, shift: int = 0):
        self.entries = [list(row) for row in entries]
        self.shift = shift
        n = len(self.entries)
        if any(len(row) != n for row in self.entries):
            raise ValueError("matrix must be square")

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def p(self) -> int:
        return self.entries[0][0].p

    @property
    def M(self) -> int:
        return min(e.M for row in self.entries for e in row)

    @property
    def W(self) -> int:
        return min(e.W for row in self.entries for e in row)

    @property
    def absolute_precision(self) -> int:
        """Exponent k such that the represented values are known mod p^k."""
        return self.W - self.shift

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @classmethod
    def identity(cls, n, p, W, M):
        return cls.constant([[int(i == j) for j in range(n)] for i in range(n)], p, W, M)

    @classmethod
    def constant(cls, rows, p, W, M):
        return cls([[TruncSeries(p, W, [x] + [0] * M) for x in row] for row in rows])

    @classmethod
    def from_fractions(cls, rows, p: int, W: int) -> "SeriesMatrix":
        """Build from a matrix of coefficient lists of rationals.

        The shift is chosen as the most negative valuation present, so the
        stored residues are integral and the values keep W - shift digits.
        """
        vmin = 0
        for row in rows:
            for coeffs in row:
                for v in coeffs:
                    if v:
                        vmin = min(vmin, vp_rational(v, p))
        shift = -vmin
        scale = Fraction(p) ** shift
        W_stored = W + shift
        ents = [[series_from_fractions([Fraction(v) * scale for v in coeffs], p, W_stored)
                 for coeffs in row] for row in rows]
        return cls(ents, shift)

    def map(self, fn) -> "SeriesMatrix":
        return SeriesMatrix([[fn(e) for e in row] for row in self.entries], self.shift)

    def valuation(self):
        """Smallest valuation of the represented values (None if all vanish)."""
        vals = [e.valuation() for row in self.entries for e in row]
        vals = [v for v in vals if v is not None]
        return min(vals) - self.shift if vals else None

    def normalized(self) -> "SeriesMatrix":
        """Divide out the largest common power of p from the stored entries."""
        v = self.valuation()
        if v is None:
            return self
        k = v + self.shift
        if k <= 0:
            return self
        return SeriesMatrix([[e.divided_by_p(k) for e in row] for row in self.entries],
                            self.shift - k)

    def with_shift(self, shift: int) -> "SeriesMatrix":
        """Re-express with a larger shift (multiplying stored entries by p^d)."""
        d = shift - self.shift
        if d < 0:
            return SeriesMatrix([[e.divided_by_p(-d) for e in row] for row in self.entries], shift)
        return SeriesMatrix([[e.times_p(d) for e in row] for row in self.entries], shift)

    def reduced(self, W: int) -> "SeriesMatrix":
        return self.map(lambda e: e.reduced(W))

    def truncated(self, M: int) -> "SeriesMatrix":
        return self.map(lambda e: e.truncated(M))

    def values_mod(self, s: int):
        """Value coefficients mod p^s as nested int lists.

        Raises PrecisionExhausted if the stored precision does not reach
        p^s, and ValueError if some value is not p-integral.
        """
        if self.absolute_precision < s:
            raise PrecisionExhausted(
                f"values known mod p^{self.absolute_precision}, need p^{s}")
        p, sh = self.p, self.shift
        out = []
        for row in self.entries:
            orow = []
            for e in row:
                if sh >= 0:
                    ps = p**sh
                    if any(x % ps for x in e.c):
                        raise ValueError("matrix is not p-integral")
                    orow.append([(x // ps) % p**s for x in e.c])
                else:
                    orow.append([(x * p**(-sh)) % p**s for x in e.c])
            out.append(orow)
        return out

    def constant_term(self):
        """Rational constant-term matrix (exact as far as stored)."""
        return [[Fraction(e.c[0], self.p**self.shift) for e in row] for row in self.entries]

    def __add__(self, other):
        return matrix_add(self, other)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.map(lambda e: e * other)
        return matrix_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self.map(lambda e: e * other)
        return NotImplemented

    def __repr__(self):
        return f"SeriesMatrix(n={self.n}, M={self.M}, W={self.W}, shift={self.shift})"


def matrix_mul(A: SeriesMatrix, B: SeriesMatrix) -> SeriesMatrix:
    n = A.n
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = None
            for k in range(n):
                term = series_mul(A.entries[i][k], B.entries[k][j])
                acc = term if acc is None else acc + term
            row.append(acc)
        rows.append(row)
    return SeriesMatrix(rows, A.shift + B.shift)


def matrix_add(A: SeriesMatrix, B: SeriesMatrix) -> SeriesMatrix:
    s = max(A.shift, B.shift)
    A2, B2 = A.with_shift(s), B.with_shift(s)
    return SeriesMatrix([[a + b for a, b in zip(ra, rb)]
                         for ra, rb in zip(A2.entries, B2.entries)], s)


def _det(entries):
    n = len(entries)
    if n == 1:
        return entries[0][0]
    total = None
    for perm in permutations(range(n)):
        sign = 1
        seen = list(perm)
        for i in range(n):
            for j in range(i + 1, n):
                if seen[i] > seen[j]:
                    sign = -sign
        term = entries[0][perm[0]]
        for i in range(1, n):
            term = series_mul(term, entries[i][perm[i]])
        term = term if sign > 0 else -term
        total = term if total is None else total + term
    return total


def determinant(A: SeriesMatrix) -> tuple[TruncSeries, int]:
    """Stored determinant and its shift: det(A) = D / p^shift."""
    return _det(A.entries), A.n * A.shift


def _adjugate(entries):
    n = len(entries)
    if n == 1:
        return [[TruncSeries.one(entries[0][0].p, entries[0][0].W, entries[0][0].M)]]
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[entries[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
            d = _det(minor)
            adj[j][i] = d if (i + j) % 2 == 0 else -d
    return adj


def matrix_invert_series(A: SeriesMatrix) -> tuple[SeriesMatrix, int]:
    """Inverse of a series matrix and the number of p-adic digits lost.

    The determinant must be p^v times a series with unit constant term;
    v is the reported loss.  The adjugate keeps the computation
    division-free apart from that single series inversion.
    """
    D, _ = determinant(A)
    v0 = vp_int(D.c[0], A.p)
    if v0 is None:
        raise SingularConstantTerm("det A(0) vanishes mod p^W")
    vmin = D.valuation()
    if vmin < v0:
        raise PrecisionExhausted(
            f"determinant has a coefficient of valuation {vmin} below its constant term ({v0})")
    if v0 >= D.W:
        raise PrecisionExhausted("determinant valuation consumes the working precision")
    Dinv = series_invert(D.divided_by_p(v0))
    adj = _adjugate(A.entries)
    rows = [[series_mul(e, Dinv) for e in row] for row in adj]
    return SeriesMatrix(rows, v0 - A.shift), v0

"""Frobenius intertwiners for the q-hypergeometric system and the digit search.

The intertwiner from the system (a, h, q^p, z^p) to (pa, ph, q, z) is

    U(z) = Phi_t(z) . Lambda . Phi_s(z)^{-1},

where Phi = Psi'(0)^{-1} Psi' is the fundamental matrix normalized to the
identity at z = 0 and Lambda = diag(c_1, ..., c_{n-1}, 1).  Since U is
linear in the unknowns, U = P_n + sum_i c_i P_i with P_i = Phi_t E_ii
Phi_s^{-1}; the P_i are computed once and every candidate digit string
costs only a linear combination plus the pole probe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

from .errors import MultipleSurvivors, NoSurvivor, PrecisionExhausted, SingularConstantTerm
from .hyperq import QHParams, analytic_fundamental, source_fundamental
from .padic import PadicScalar, digits as padic_digits, vp_int
from .qseries import SeriesMatrix, TruncSeries, matrix_invert_series, matrix_mul
from .qspecial import gamma_pq


@dataclass
class SearchConfig:
    """Knobs of the digit search.

    M is the series order, W the working exponent (default s_max + guard),
    the pole probe multiplies by (1 - z)^m for m <= m_max and demands zero
    coefficients in degrees (ceil(window * M), M].
    """

    M: int = 40
    W: int | None = None
    s_max: int = 9
    m_max: int | None = None
    window: float = 0.5
    guard: int = 6
    recheck: bool = True
    max_survivors: int = 5000
    extra_stages: int = 3
    gamma_cap: int = 4

    def working_exponent(self) -> int:
        return self.W if self.W is not None else self.s_max + self.guard

    def pole_cap(self, n: int, p: int = 2) -> int:
        """Largest pole order tried; observed orders grow like (p - 1)(s - 1)."""
        return self.m_max if self.m_max is not None else max(n, p - 1) * self.s_max

    def window_start(self) -> int:
        return math.ceil(self.window * self.M)

    def bumped(self, dM: int = 20, dW: int = 2) -> "SearchConfig":
        return SearchConfig(self.M + dM, self.working_exponent() + dW, self.s_max, self.m_max,
                            self.window, self.guard, False, self.max_survivors,
                            self.extra_stages, self.gamma_cap)

    def to_json(self) -> dict:
        return {"M": self.M, "W": self.working_exponent(), "s_max": self.s_max,
                "m_max": self.m_max, "window": self.window, "guard": self.guard}


@dataclass
class SearchResult:
    """Outcome of a digit search (digit strings are least significant first)."""

    p: int
    digits: list
    certified: int
    stages: list = field(default_factory=list)
    closed_form: list | None = None
    match: bool | None = None
    loss: int = 0
    stable: bool | None = None
    extra: dict = field(default_factory=dict)

    @property
    def residues(self) -> list[int]:
        return [sum(d * self.p**k for k, d in enumerate(ds)) for ds in self.digits]

    def to_json(self) -> dict:
        out = {"p": self.p, "digits": self.digits, "residues": self.residues,
               "certified_exponent": self.certified, "stages": self.stages,
               "valuation_loss": self.loss}
        if self.closed_form is not None:
            out["closed_form"] = self.closed_form
            out["match"] = self.match
        if self.stable is not None:
            out["stable"] = self.stable
        out.update(self.extra)
        return out


# ---- rationality probe ----------------------------------------------------

@dataclass
class RationalityVerdict:
    passed: bool
    m: int | None
    modulus_exponent: int
    integral: bool = True
    first_tail: tuple | None = None


def _pole_probe(values, s: int, p: int, start: int, m_max: int):
    """Smallest m with (1-z)^m f = 0 mod p^s in degrees (start, M] for all entries."""
    mod = p**s
    cur = [[list(e) for e in row] for row in values]
    tail = None
    for m in range(m_max + 1):
        ok = True
        for i, row in enumerate(cur):
            for j, e in enumerate(row):
                for k in range(start + 1, len(e)):
                    if e[k] % mod:
                        ok = False
                        if m == 0 and tail is None:
                            tail = (i, j, k)
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            return m, None
        for row in cur:
            for e in row:
                for k in range(len(e) - 1, 0, -1):
                    e[k] = (e[k] - e[k - 1]) % mod
    return None, tail


def _check_stored(stored, shift: int, tau: int, p: int, start: int, m_max: int) -> RationalityVerdict:
    """Test values stored/p^shift, known mod p^tau, for integrality and rationality."""
    if shift > 0:
        guard = p ** max(0, min(shift, tau + shift))
        for row in stored:
            for e in row:
                if any(x % guard for x in e):
                    return RationalityVerdict(False, None, tau, integral=False)
    if tau <= 0:
        return RationalityVerdict(True, 0, tau)
    mod = p**tau
    if shift >= 0:
        ps = p**shift
        values = [[[(x // ps) % mod for x in e] for e in row] for row in stored]
    else:
        ps = p ** (-shift)
        values = [[[(x * ps) % mod for x in e] for e in row] for row in stored]
    m, tail = _pole_probe(values, tau, p, start, m_max)
    return RationalityVerdict(m is not None, m, tau, first_tail=tail)


def rationality_test(U: SeriesMatrix, s: int, config: SearchConfig) -> RationalityVerdict:
    """Is U p-integral and (1-z)^m U mod p^s polynomial below the window for some m?"""
    tau = min(s, U.absolute_precision)
    stored = [[e.c for e in row] for row in U.entries]
    return _check_stored(stored, U.shift, tau, U.p, config.window_start(), config.pole_cap(U.n, U.p))


# ---- linear families and the search --------------------------------------

class LinearFamily:
    """U(c) = base + sum_i c_i basis[i], all brought to a common shift."""

    def __init__(self, base: SeriesMatrix, basis: list, loss: int = 0):
        shift = max([base.shift] + [b.shift for b in basis])
        self.base = base.with_shift(shift)
        self.basis = [b.with_shift(shift) for b in basis]
        self.shift = shift
        self.W = min([self.base.W] + [b.W for b in self.basis])
        self.p = base.p
        self.n = base.n
        self.M = min([base.M] + [b.M for b in basis])
        vals = [b.valuation() for b in basis]
        vals = [v for v in vals if v is not None]
        self.basis_valuation = min(vals) if vals else 0
        self.loss = loss
        self._base = [[e.c for e in row] for row in self.base.entries]
        self._basis = [[[e.c for e in row] for row in b.entries] for b in self.basis]

    def trusted(self, k: int) -> int:
        """Absolute precision of U(c) when the unknowns are known mod p^k."""
        return min(k + self.basis_valuation, self.W - self.shift)

    def stored(self, cs) -> list:
        mod = self.p**self.W
        n, M = self.n, self.M
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = list(self._base[i][j][: M + 1])
                for c, b in zip(cs, self._basis):
                    if c:
                        bij = b[i][j]
                        for k in range(M + 1):
                            acc[k] += c * bij[k]
                row.append([x % mod for x in acc])
            out.append(row)
        return out

    def matrix(self, cs) -> SeriesMatrix:
        st = self.stored(cs)
        return SeriesMatrix([[TruncSeries(self.p, self.W, e) for e in row] for row in st], self.shift)

    def check(self, cs, k: int, config: SearchConfig) -> RationalityVerdict:
        tau = self.trusted(k)
        return _check_stored(self.stored(cs), self.shift, tau, self.p,
                             config.window_start(), config.pole_cap(self.n, self.p))


def _common_prefix(survivors, p: int, k: int) -> int:
    for j in range(k, -1, -1):
        mod = p**j
        first = tuple(c % mod for c in survivors[0])
        if all(tuple(c % mod for c in s) == first for s in survivors):
            return j
    return 0


def search_family(family: LinearFamily, unknowns: int, config: SearchConfig,
                  log=None) -> SearchResult:
    """Digit-by-digit search over p-adic unknowns of a linear family.

    At stage k every survivor (known mod p^(k-1)) is extended by all digit
    combinations and kept if U passes the integrality and pole probes at
    the precision the stage supports.  The certified exponent is the length
    of the prefix shared by all survivors; the search stops once it reaches
    s_max.
    """
    p = family.p
    survivors = [tuple([0] * unknowns)]
    stages = []
    k_max = config.s_max + max(0, -family.basis_valuation) + config.extra_stages
    last_tau = None
    certified = 0
    for k in range(1, k_max + 1):
        step = p ** (k - 1)
        passed, witnesses = [], []
        for c in survivors:
            for ds in product(range(p), repeat=unknowns):
                cand = tuple(ci + di * step for ci, di in zip(c, ds))
                verdict = family.check(cand, k, config)
                if verdict.passed:
                    passed.append(cand)
                    witnesses.append(verdict.m)
        tau = family.trusted(k)
        record = {"stage": k, "tested_exponent": tau,
                  "candidates": len(survivors) * p**unknowns,
                  "survivors": len(passed),
                  "witness_m": min(witnesses) if witnesses else None}
        stages.append(record)
        if log:
            log(record, passed)
        if not passed:
            raise NoSurvivor(f"no candidate survives stage {k}; raise M, W or m_max")
        if len(passed) > config.max_survivors:
            raise MultipleSurvivors(f"{len(passed)} survivors at stage {k}", passed[:20])
        survivors = sorted(passed)
        certified = _common_prefix(survivors, p, k)
        if certified >= config.s_max:
            break
        if last_tau is not None and tau == last_tau and tau == family.W - family.shift:
            raise PrecisionExhausted(
                f"stage {k}: precision capped at p^{tau}; certified only {certified} digits")
        last_tau = tau
    if certified < config.s_max:
        raise MultipleSurvivors(
            f"only {certified} digits shared by {len(survivors)} survivors", survivors[:20])
    digits = [padic_digits(PadicScalar(p, config.s_max, c), config.s_max) for c in survivors[0]]
    return SearchResult(p=p, digits=digits, certified=certified, stages=stages, loss=family.loss)


# ---- q-case ---------------------------------------------------------------

def _constant_term(frame: SeriesMatrix) -> SeriesMatrix:
    p, M = frame.p, frame.M
    rows = [[TruncSeries(p, e.W, [e.c[0]] + [0] * M) for e in row] for row in frame.entries]
    return SeriesMatrix(rows, frame.shift)


def frame_pair(target: SeriesMatrix, source: SeriesMatrix, normalized: bool = True):
    """Return (Phi_t, Phi_s^{-1}, loss) for the two frames."""
    loss = 0
    if normalized:
        ct_inv, l1 = matrix_invert_series(_constant_term(target))
        target = matrix_mul(ct_inv, target).normalized()
        loss += l1
    src_inv, l2 = matrix_invert_series(source)
    loss += l2
    if normalized:
        src_inv = matrix_mul(src_inv, _constant_term(source)).normalized()
    return target, src_inv, loss


def diagonal_family(phi_t: SeriesMatrix, phi_s_inv: SeriesMatrix, loss: int = 0) -> LinearFamily:
    """Family U = sum_i c_i Phi_t E_ii Phi_s^{-1} with c_n = 1."""
    n = phi_t.n
    shift = phi_t.shift + phi_s_inv.shift
    pieces = []
    for i in range(n):
        rows = [[phi_t.entries[r][i] * phi_s_inv.entries[i][c] for c in range(n)]
                for r in range(n)]
        pieces.append(SeriesMatrix(rows, shift).normalized())
    return LinearFamily(pieces[-1], pieces[:-1], loss)


def _params_at(params: QHParams, W: int) -> QHParams:
    from .qspecial import QContext
    return QHParams(params.a, params.h, QContext(params.p, params.ctx.t, W))


def _family_at(params: QHParams, M: int, W: int, normalized: bool) -> LinearFamily:
    P = _params_at(params, W)
    target = analytic_fundamental(P.frobenius_target(), M)
    source = source_fundamental(P, M)
    phi_t, phi_s_inv, loss = frame_pair(target, source, normalized)
    return diagonal_family(phi_t, phi_s_inv, loss)


def with_absolute_precision(build, W: int, rounds: int = 4) -> LinearFamily:
    """Call build(W_internal) until the family's values are known mod p^W.

    Denominators of the series and the inversion of the source frame eat
    digits; the deficit is measured on a first build and added back.  A
    build whose determinant vanishes at the current precision is retried
    with twice the headroom.
    """
    W_int = W
    for _ in range(rounds):
        try:
            fam = build(W_int)
        except (SingularConstantTerm, PrecisionExhausted):
            W_int += W
            continue
        deficit = W - (fam.W - fam.shift)
        if deficit <= 0:
            return fam
        W_int += deficit
    raise PrecisionExhausted(f"could not reach absolute precision p^{W}")


def build_family(params: QHParams, config: SearchConfig, normalized: bool = True) -> LinearFamily:
    """Linear family of intertwiners whose values are known mod p^W."""
    return with_absolute_precision(
        lambda W: _family_at(params, config.M, W, normalized), config.working_exponent())


def intertwiner_series(params: QHParams, lam_diag, M: int, W: int,
                       normalized: bool = True) -> tuple[SeriesMatrix, int]:
    """U(z) for a given diagonal Lambda = diag(c_1, ..., c_{n-1}, 1).

    ``lam_diag`` lists c_1..c_{n-1} (a trailing 1 is accepted and ignored).
    With ``normalized`` (default) both frames are normalized to the
    identity at z = 0; otherwise U = Psi'_t Lambda Psi'_s^{-1}.
    """
    n = params.n
    cs = [int(c) for c in lam_diag][: n - 1]
    fam = build_family(params, SearchConfig(M=M, W=W), normalized)
    return fam.matrix(cs), fam.loss


def digit_search(params: QHParams, config: SearchConfig, log=None) -> SearchResult:
    """Determine c_1..c_{n-1} digit by digit from the rationality of U(z)."""
    fam = build_family(params, config)
    return search_family(fam, params.n - 1, config, log)


def closed_form_constant(params: QHParams, prec: int, cap: int = 4) -> list[PadicScalar]:
    """U(0)_{ii} / U(0)_{nn} from the Koblitz gamma product.

    U(0)_{ii} = prod_j Gamma_{p,q}(p(a_i - a_j + h)) / (Gamma_{p,q}(p(a_i - a_j)) Gamma_{p,q}(ph)).
    """
    p, n = params.p, params.n
    a, h = params.a, params.h
    mod = p**prec
    ctx = params.ctx
    cache = {}

    def G(x):
        if x not in cache:
            cache[x] = gamma_pq(ctx, x, prec, cap).r
        return cache[x]

    def eig(i):
        num, den = 1, 1
        for j in range(n):
            num = num * G(p * (a[i] - a[j] + h)) % mod
            den = den * G(p * (a[i] - a[j])) * G(p * h) % mod
        return num * pow(den, -1, mod) % mod

    last = eig(n - 1)
    inv_last = pow(last, -1, mod)
    return [PadicScalar(p, prec, eig(i) * inv_last) for i in range(n)]


def verify_main_theorem(params: QHParams, config: SearchConfig, log=None) -> dict:
    """Search, closed form and (optionally) a stability re-run at M+20, W+2."""
    res = digit_search(params, config, log)
    cf = closed_form_constant(params, res.certified, config.gamma_cap)
    cf_digits = [padic_digits(x, res.certified) for x in cf[:-1]]
    res.closed_form = cf_digits
    res.match = [ds[: res.certified] for ds in res.digits] == cf_digits
    if config.recheck:
        again = digit_search(params, config.bumped())
        res.stable = again.digits == res.digits
    report = {"search": res.to_json(), "match": res.match, "stable": res.stable}
    if config.recheck:
        report["recheck_config"] = config.bumped().to_json()
    return report


def step_snapshot(params: QHParams, c: int, s: int, m: int = 0, degree: int = 20,
                  config: SearchConfig | None = None) -> list:
    """Coefficients of (1 - z)^m U(z) mod p^s up to z^(degree-1), for Lambda = diag(c, 1)."""
    config = config or SearchConfig()
    fam = build_family(params, config)
    U = fam.matrix([c]).truncated(degree - 1)
    vals = U.values_mod(s)
    mod = params.p**s
    out = []
    for row in vals:
        orow = []
        for e in row:
            for _ in range(m):
                e = [e[0]] + [(e[k] - e[k - 1]) % mod for k in range(1, len(e))]
            orow.append(e)
        out.append(orow)
    return out

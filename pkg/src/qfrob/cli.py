"""Command-line driver: reproducible experiments with JSON reports.

Exit codes: 0 verified, 2 mismatch, 3 ambiguous digit search, 1 usage or
precision error.  Reports are deterministic; wall time is only included
with --timing.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from .cohom import ODEParams, bessel_constant_matrix, bessel_gamma_search, dwork_search, projective_search
from .cyclo import bracket_ratio_at_root, cyclotomic_identity, pochhammer_at_root, qnumber_factorization
from .errors import MultipleSurvivors, QFrobError
from .frobq import SearchConfig, verify_main_theorem
from .hyperq import QHParams, check_pochhammer_congruence, check_polynomial_congruence, check_vertex_congruence
from .padic import parse_rational
from .qspecial import QContext, gamma_p, gamma_pq

DEFAULTS = {
    "t": None, "h": "1/2", "a": "1/5,0", "smax": 9, "order": 40, "guard": 6,
    "W": None, "mmax": None, "window": 0.5, "x": "1/7", "prec": 5, "s": 2,
    "n": 2, "recheck": True, "timing": False, "verbose": False, "out": None,
}
# per-command overrides of the defaults above
COMMAND_DEFAULTS = {
    "dwork": {"smax": 4},
    "projective": {"smax": 4, "h": None},
    "bessel": {"smax": 4, "order": 81},
    "verify": {"order": 12, "a": "1/2,0"},
}


SEARCH_KEYS = ("smax", "order", "W", "guard", "mmax", "window", "recheck")
RELEVANT = {
    "search": ("p", "t", "a", "h") + SEARCH_KEYS,
    "dwork": ("p", "a", "h") + SEARCH_KEYS,
    "projective": ("p", "a") + SEARCH_KEYS,
    "bessel": ("p", "n") + SEARCH_KEYS,
    "gamma-pq": ("p", "t", "x", "prec"),
    "verify": ("p", "t", "s", "a", "h", "x", "order"),
    "cyclo": ("p", "s"),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _rationals(text) -> list[Fraction]:
    if isinstance(text, (list, tuple)):
        return [parse_rational(x) for x in text]
    return [parse_rational(x) for x in str(text).split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qfrob", description="Frobenius intertwiners for p-adic q-hypergeometric equations")
    sub = parser.add_subparsers(dest="command")

    def common(sp):
        sp.add_argument("--config", help="JSON file with option values; flags override it")
        sp.add_argument("--out", help="write the JSON report here instead of stdout")
        sp.add_argument("--verbose", action="store_true", default=None,
                        help="stream per-stage survivor tables to stderr")
        sp.add_argument("--timing", action="store_true", default=None, help="include wall time")
        sp.add_argument("--p", type=int)

    def search_opts(sp):
        sp.add_argument("--smax", type=int)
        sp.add_argument("--order", type=int, help="series order M")
        sp.add_argument("--W", type=int, help="absolute working precision (default smax + guard)")
        sp.add_argument("--guard", type=int)
        sp.add_argument("--mmax", type=int, help="largest pole order tried")
        sp.add_argument("--window", type=float)
        sp.add_argument("--no-recheck", dest="recheck", action="store_false", default=None)

    sp = sub.add_parser("search", help="q-case digit search and closed-form comparison")
    common(sp), search_opts(sp)
    sp.add_argument("--t"), sp.add_argument("--a"), sp.add_argument("--h")

    sp = sub.add_parser("dwork", help="hypergeometric differential equation (q -> 1)")
    common(sp), search_opts(sp)
    sp.add_argument("--a"), sp.add_argument("--h")

    sp = sub.add_parser("projective", help="operator z - prod(D - a_i)")
    common(sp), search_opts(sp)
    sp.add_argument("--a")

    sp = sub.add_parser("bessel", help="Bessel automorphism off-diagonal entry")
    common(sp), search_opts(sp)
    sp.add_argument("--n", type=int)
    sp.add_argument("--prec", type=int, help="alias for --smax")

    sp = sub.add_parser("gamma-pq", help="Koblitz q-gamma value")
    common(sp)
    sp.add_argument("--t"), sp.add_argument("--x"), sp.add_argument("--prec", type=int)

    sp = sub.add_parser("verify", help="congruence suite")
    common(sp)
    sp.add_argument("--t"), sp.add_argument("--s", type=int), sp.add_argument("--a")
    sp.add_argument("--h"), sp.add_argument("--x"), sp.add_argument("--order", type=int)

    sp = sub.add_parser("cyclo", help="root-of-unity identities")
    common(sp)
    sp.add_argument("--s", type=int)
    return parser


def _options(args) -> dict:
    opts = dict(DEFAULTS)
    opts.update(COMMAND_DEFAULTS.get(args.command, {}))
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a JSON object")
        opts.update(cfg)
    for key, value in vars(args).items():
        if value is not None and key not in ("config", "command"):
            opts[key] = value
    if args.command == "bessel" and getattr(args, "prec", None) is not None:
        opts["smax"] = args.prec
    if opts.get("p") is None:
        raise UsageError("--p is required")
    if opts.get("t") is None:
        opts["t"] = str(opts["p"])
    return opts


def _search_config(o) -> SearchConfig:
    return SearchConfig(M=int(o["order"]), W=o["W"], s_max=int(o["smax"]), m_max=o["mmax"],
                        window=float(o["window"]), guard=int(o["guard"]), recheck=bool(o["recheck"]))


def _stage_logger(verbose: bool):
    if not verbose:
        return None

    def log(record, survivors):
        shown = ", ".join(str(list(c)) for c in survivors[:8])
        more = " ..." if len(survivors) > 8 else ""
        print(f"stage {record['stage']}: tested mod p^{record['tested_exponent']}, "
              f"{record['survivors']}/{record['candidates']} survive: {shown}{more}", file=sys.stderr)

    return log


def _cmd_search(o):
    ctx = QContext(o["p"], parse_rational(o["t"]), 1)
    params = QHParams(tuple(_rationals(o["a"])), parse_rational(o["h"]), ctx)
    config = _search_config(o)
    report = verify_main_theorem(params, config, _stage_logger(o["verbose"]))
    ok = report["match"] and report["stable"] is not False
    return {"config": config.to_json(), "result": report}, ok


def _cmd_dwork(o):
    params = ODEParams(o["p"], tuple(_rationals(o["a"])), parse_rational(o["h"]))
    config = _search_config(o)
    res = dwork_search(params, config, _stage_logger(o["verbose"]))
    return {"config": config.to_json(), "result": res.to_json()}, res.match and res.stable is not False


def _cmd_projective(o):
    params = ODEParams(o["p"], tuple(_rationals(o["a"])))
    config = _search_config(o)
    res = projective_search(params, config, _stage_logger(o["verbose"]))
    return {"config": config.to_json(), "result": res.to_json()}, res.match and res.stable is not False


def _cmd_bessel(o):
    config = _search_config(o)
    res = bessel_gamma_search(o["p"], config, int(o["n"]), _stage_logger(o["verbose"]))
    out = res.to_json()
    out["constant_matrix"] = bessel_constant_matrix(o["p"], int(o["n"]), res.search.certified)
    return {"config": config.to_json(), "result": out}, res.match and res.search.stable is not False


def _cmd_gamma(o):
    p, prec = o["p"], int(o["prec"])
    ctx = QContext(p, parse_rational(o["t"]), prec)
    x = parse_rational(o["x"])
    g = gamma_pq(ctx, x, prec)
    return {"result": {"x": str(x), "prec": prec, "residue": g.r, "digits": g.digits(), "modulus": p**prec,
                       "gamma_p": gamma_p(p, x, prec).r}}, True


def _cmd_verify(o):
    p, s, M = o["p"], int(o["s"]), int(o["order"])
    ctx = QContext(p, parse_rational(o["t"]), s + 4)
    h = parse_rational(o["h"]) if o.get("h") is not None else Fraction(1, 2)
    params = QHParams(tuple(_rationals(o["a"])), h, ctx)
    poly = check_polynomial_congruence(ctx, s)
    poch = {str(i): check_pochhammer_congruence(ctx, i, s) for i in range(-12, 13)}
    vertex = check_vertex_congruence(params, parse_rational(o["x"]), s, M)
    ok = poly and all(poch.values()) and vertex["holds"]
    return {"result": {"s": s, "M": M, "polynomial_congruence": poly,
                       "bracket_ratio_congruence": poch, "vertex_congruence": vertex}}, ok


def _cmd_cyclo(o):
    p, s = o["p"], int(o["s"])
    res = {"pochhammer_at_root": pochhammer_at_root(p, s),
           "qnumber_factorization": qnumber_factorization(p, s),
           "cyclotomic_identity": cyclotomic_identity(p, s),
           "bracket_ratios": [bracket_ratio_at_root(p, s, i) for i in range(-p**s, p**s + 1)]}
    ok = res["pochhammer_at_root"] and res["qnumber_factorization"] and res["cyclotomic_identity"]
    return {"result": res}, ok


COMMANDS = {"search": _cmd_search, "dwork": _cmd_dwork, "projective": _cmd_projective,
            "bessel": _cmd_bessel, "gamma-pq": _cmd_gamma, "verify": _cmd_verify, "cyclo": _cmd_cyclo}


def _inputs(command: str, o) -> dict:
    keep = {k: o.get(k) for k in RELEVANT[command]}
    return json.loads(json.dumps(keep, default=str))


def run(argv=None) -> tuple[int, dict | None]:
    """Run one subcommand; return (exit code, report)."""
    try:
        args = build_parser().parse_args(argv)
        if not args.command:
            raise UsageError("a subcommand is required: " + ", ".join(COMMANDS))
        o = _options(args)
    except (UsageError, OSError, json.JSONDecodeError) as exc:
        print(f"qfrob: {exc}", file=sys.stderr)
        return 1, None
    start = time.perf_counter()
    try:
        body, ok = COMMANDS[args.command](o)
        code = 0 if ok else 2
    except MultipleSurvivors as exc:
        body = {"error": "ambiguous", "message": str(exc),
                "survivors": [list(c) for c in exc.survivors]}
        code = 3
    except (QFrobError, ValueError, ZeroDivisionError) as exc:
        print(f"qfrob: {type(exc).__name__}: {exc}", file=sys.stderr)
        body = {"error": type(exc).__name__, "message": str(exc)}
        code = 1
    report = {"command": args.command, "inputs": _inputs(args.command, o), "verified": code == 0, **body}
    if o.get("timing"):
        report["wall_time_s"] = round(time.perf_counter() - start, 3)
    text = json.dumps(report, sort_keys=True, indent=2)
    if o.get("out"):
        with open(o["out"], "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code, report


def main(argv=None) -> int:
    return run(argv)[0]


if __name__ == "__main__":
    sys.exit(main())

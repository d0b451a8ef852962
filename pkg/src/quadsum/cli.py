"""Command-line surface: every library operation behind a subcommand, with
bit-stable CSV/JSON output.

Exit codes: 0 success, 1 validation/usage error, 2 resource cap exceeded,
3 a mathematical verification failed (some residual or cross-check above its
tolerance).  The distinction lets CI gate on genuine math regressions.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from math import gcd
from typing import Any, Optional

from . import density, equidist, lattice, theta
from .arith import factorize, is_prime
from .errors import EmptyMeasureError, QuadsumError, ResourceLimitError, ValidationError
from .limits import DEFAULT_EPS, DEFAULT_PRIME_CUTOFF

TABLE1_TOL = 1e-8
WEAK_MOD_TOL = 1e-6
ACOEFF_TOL = 1e-8


# ---------------------------------------------------------------------------
# numeric formatting: 17 significant digits, exponent without '+' or padding,
# complex as one re+imi token.  Round-trips doubles exactly.
# ---------------------------------------------------------------------------


def fmt_real(x: float) -> str:
    x = float(x)
    if x == 0.0:
        x = 0.0  # normalize -0.0
    mantissa, exp = f"{x:.16e}".split("e")
    return f"{mantissa}e{int(exp)}"


def fmt_complex(z: complex) -> str:
    z = complex(z)
    sign = "-" if z.imag < 0 else "+"
    return f"{fmt_real(z.real)}{sign}{fmt_real(abs(z.imag))}i"


def _csv_escape(field: str) -> str:
    if any(ch in field for ch in (',', '"', '\n', '\r')):
        return '"' + field.replace('"', '""') + '"'
    return field


def _render_csv(schema: list[tuple[str, str]], rows: list[dict]) -> str:
    lines = [",".join(name for name, _ in schema)]
    for row in rows:
        fields = []
        for name, kind in schema:
            v = row.get(name)
            if v is None:
                fields.append("")
            elif kind == "int":
                fields.append(str(int(v)))
            elif kind == "real":
                fields.append(fmt_real(v))
            elif kind == "complex":
                fields.append('"' + fmt_complex(v) + '"')
            elif kind == "bool":
                fields.append("true" if v else "false")
            else:
                fields.append(_csv_escape(str(v)))
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


def _render_json(schema: list[tuple[str, str]], rows: list[dict]) -> str:
    out = []
    for row in rows:
        obj: dict[str, Any] = {}
        for name, kind in schema:
            v = row.get(name)
            if v is None:
                obj[name] = None
            elif kind == "int":
                obj[name] = int(v)
            elif kind == "real":
                obj[name] = float(v)
            elif kind == "complex":
                obj[name] = fmt_complex(v)
            elif kind == "bool":
                obj[name] = bool(v)
            else:
                obj[name] = str(v)
        out.append(json.dumps(obj, sort_keys=False))
    return "\n".join(out) + ("\n" if out else "")


def emit(schema: list[tuple[str, str]], rows: list[dict], fmt: str, path: str) -> None:
    """Write rows in the registered schema; identical inputs give identical bytes."""
    text = _render_csv(schema, rows) if fmt == "csv" else _render_json(schema, rows)
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ValidationError(f"cannot write {path}: {exc}") from exc


_TAU_RE = re.compile(
    r"^\s*([+-]?\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)\s*([+-]\s*\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)i\s*$"
)


def parse_tau(text: str) -> complex:
    """Parse 're+imi' (e.g. '0+1i', '0.33-0.5i' is rejected: Im must be > 0)."""
    m = _TAU_RE.match(text)
    if not m:
        raise ValidationError(f"tau must look like 're+imi', got {text!r}")
    tau = complex(float(m.group(1)), float(m.group(2).replace(" ", "")))
    if tau.imag <= 0:
        raise ValidationError(f"tau must lie in the upper half plane, got {tau}")
    return tau


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; the contract here is exit 1
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(message)


def _function_from_kind(kind: str, p: int, d: int, seed: int) -> theta.TestFunction:
    if kind == "ones":
        return theta.constant_function(p, d)
    if kind == "origin":
        return theta.origin_indicator(p, d)
    if kind == "random-even":
        return theta.random_even_function(p, d, seed)
    if kind == "random-cusp":
        return theta.random_cusp_function(p, d, seed)
    raise ValidationError(f"unknown test-function kind {kind!r}")


def _require_odd_prime(p: int) -> None:
    if p == 2 or not is_prime(p):
        raise ValidationError(f"an odd prime is required, got {p}")


# ---------------------------------------------------------------------------
# subcommand handlers; each returns (schema, rows, verification_failed)
# ---------------------------------------------------------------------------


def _cmd_repnum(args) -> tuple[list, list, bool]:
    d, nmax = args.d, args.nmax
    enum = lattice.enumerated_counts(d, nmax)
    conv = lattice.count_range(d, nmax)
    schema = [("n", "int"), ("r_enum", "int"), ("r_conv", "int"), ("r_jacobi", "int"), ("match", "bool")]
    rows = []
    failed = False
    for n in range(nmax + 1):
        jac = lattice.r4_jacobi(n) if (d == 4 and n >= 1) else None
        ok = int(enum[n]) == int(conv[n]) and (jac is None or jac == int(enum[n]))
        failed |= not ok
        rows.append({"n": n, "r_enum": int(enum[n]), "r_conv": int(conv[n]), "r_jacobi": jac, "match": ok})
    return schema, rows, failed


def _cmd_quadric(args) -> tuple[list, list, bool]:
    p, d = args.p, args.d
    mod = lattice.quadric_modulus(p)
    levels = range(mod) if args.a is None else [args.a]
    schema = [("p", "int"), ("d", "int"), ("a", "int"), ("count", "int"), ("points", "str")]
    rows = []
    for a in levels:
        pts = lattice.quadric_points(p, d, a)
        rows.append({
            "p": p, "d": d, "a": a, "count": len(pts),
            "points": " ".join("(" + ",".join(map(str, t)) + ")" for t in pts),
        })
    return schema, rows, False


def _cmd_gauss(args) -> tuple[list, list, bool]:
    q = args.q
    if args.a is not None:
        avals = [args.a]
    else:
        avals = list(range(1, min(q, args.amax or 32) + 1))
    fac = factorize(q) if q > 1 else {}
    prime_power = len(fac) == 1
    p0, h0 = (next(iter(fac.items())) if prime_power else (None, None))
    schema = [("q", "int"), ("a", "int"), ("direct", "complex"), ("closed", "complex"),
              ("abs_diff", "real"), ("match", "bool")]
    rows = []
    failed = False
    for a in avals:
        direct = density.gauss_sum(q, a)
        closed = None
        diff = None
        ok = True
        if prime_power and p0 != 2 and gcd(a, q) == 1:
            closed = density.gauss_sum_prime_power(p0, h0, a)
            diff = abs(direct - closed)
            ok = diff <= 1e-9 * max(1.0, abs(closed))
            failed |= not ok
        rows.append({"q": q, "a": a, "direct": direct, "closed": closed, "abs_diff": diff, "match": ok})
    return schema, rows, failed


def _cmd_acoeff(args) -> tuple[list, list, bool]:
    d, p = args.d, args.p
    _require_odd_prime(p)
    schema = [("d", "int"), ("p", "int"), ("h", "int"), ("n", "int"),
              ("a_closed", "complex"), ("a_direct", "complex"), ("abs_diff", "real"), ("match", "bool")]
    rows = []
    failed = False
    for h in range(1, args.hmax + 1):
        for n in range(1, args.nmax + 1):
            closed = density.a_coeff_closed(d, p, h, n)
            direct = density.a_coeff_direct(d, p**h, n)
            diff = abs(closed - direct)
            ok = diff <= ACOEFF_TOL
            failed |= not ok
            rows.append({"d": d, "p": p, "h": h, "n": n, "a_closed": closed,
                         "a_direct": direct, "abs_diff": diff, "match": ok})
    return schema, rows, failed


def _cmd_density(args) -> tuple[list, list, bool]:
    rep = density.local_density(args.p, args.d, args.n)
    schema = [("p", "int"), ("d", "int"), ("n", "int"), ("h", "int"),
              ("term", "complex"), ("delta", "real"), ("method", "str")]
    rows = [
        {"p": rep.p, "d": rep.d, "n": rep.n, "h": h, "term": t, "delta": rep.delta, "method": rep.method}
        for h, t in enumerate(rep.terms)
    ]
    return schema, rows, False


def _cmd_singular(args) -> tuple[list, list, bool]:
    val = density.singular_series(args.d, args.n, args.prime_cutoff)
    schema = [("d", "int"), ("n", "int"), ("prime_cutoff", "int"), ("value", "real")]
    return schema, [{"d": val.d, "n": val.n, "prime_cutoff": val.prime_cutoff, "value": val.value}], False


def _cmd_mainterm(args) -> tuple[list, list, bool]:
    series = density.singular_series(args.d, args.n, args.prime_cutoff)
    mt = density.main_term(args.d, args.n, args.prime_cutoff)
    schema = [("d", "int"), ("n", "int"), ("prime_cutoff", "int"),
              ("singular", "real"), ("main_term", "real")]
    return schema, [{"d": args.d, "n": args.n, "prime_cutoff": args.prime_cutoff,
                     "singular": series.value, "main_term": mt}], False


def _cmd_diffcheck(args) -> tuple[list, list, bool]:
    chk = density.difference_check(args.d, args.p, args.n, coeff=args.coeff)
    schema = [("d", "int"), ("p", "int"), ("n", "int"), ("lhs", "int"), ("bound", "real"), ("pass", "bool")]
    return schema, [{"d": chk.d, "p": chk.p, "n": chk.n, "lhs": chk.lhs,
                     "bound": chk.bound, "pass": chk.passed}], not chk.passed


def _cmd_theta_coeffs(args) -> tuple[list, list, bool]:
    f = _function_from_kind(args.kind, args.p, args.d, args.seed)
    series = theta.theta_coeffs(f, args.nmax)
    schema = [("n", "int"), ("c", "complex")]
    rows = [{"n": n, "c": complex(series.c[n])} for n in range(args.nmax + 1)]
    return schema, rows, False


def _cmd_theta_verify(args) -> tuple[list, list, bool]:
    p, d = args.p, args.d
    _require_odd_prime(p)
    f = theta.random_even_function(p, d, args.seed)
    rows = []
    failed = False
    checks: list[tuple[str, theta.TransformResidual, float]] = []
    checks.append(("poisson", theta.verify_poisson(f, args.tau, args.eps), TABLE1_TOL))
    for res in theta.verify_generator_actions(f, args.tau, args.eps):
        checks.append(("generator", res, TABLE1_TOL))
    for g in (((1, 1), (0, 1)), ((1, 0), (4 * p * p, 1))):
        res = theta.verify_weak_modularity(f, g, args.tau, args.eps)
        checks.append(("weak-modularity", res, WEAK_MOD_TOL))
    schema = [("check", "str"), ("label", "str"), ("lhs", "complex"), ("rhs", "complex"),
              ("residual", "real"), ("tol", "real"), ("pass", "bool")]
    for kind, res, tol in checks:
        ok = res.residual < tol
        failed |= not ok
        rows.append({"check": kind, "label": res.label, "lhs": res.lhs, "rhs": res.rhs,
                     "residual": res.residual, "tol": tol, "pass": ok})
    return schema, rows, failed


def _cmd_cusp_check(args) -> tuple[list, list, bool]:
    f = _function_from_kind(args.kind, args.p, args.d, args.seed)
    chk = theta.cusp_check(f)
    schema = [("p", "int"), ("d", "int"), ("kind", "str"), ("seed", "int"),
              ("is_cusp", "bool"), ("failing_condition", "str")]
    return schema, [{"p": args.p, "d": args.d, "kind": args.kind, "seed": args.seed,
                     "is_cusp": chk.is_cusp, "failing_condition": chk.failing_condition}], False


def _cmd_srw(args) -> tuple[list, list, bool]:
    f = _function_from_kind(args.kind, args.p, args.d, args.seed)
    schema = [("r", "int"), ("w", "int"), ("abs_value", "real"), ("normalized", "real")]
    rows = []
    for r in range(args.rmax + 1):
        profile = theta.srw_profile(f, r)
        scale = float(args.p ** ((max(r, 1) - 1) * args.d))
        for w in range(len(profile)):
            rows.append({"r": r, "w": w, "abs_value": abs(profile[w]),
                         "normalized": abs(profile[w]) / scale})
    return schema, rows, False


def _cmd_equidist(args) -> tuple[list, list, bool]:
    windows = equidist.dyadic_windows(args.kmin, args.kmax)
    parity = None if args.parity == "all" else args.parity
    summaries = equidist.decay_study(args.d, args.p, args.a, windows, parity=parity)
    schema = [("lo", "int"), ("hi", "int"), ("samples", "int"), ("under_sampled", "bool"),
              ("median_tv", "real"), ("max_tv", "real")]
    rows = [
        {"lo": s.lo, "hi": s.hi, "samples": s.samples, "under_sampled": s.under_sampled,
         "median_tv": s.median_tv, "max_tv": s.max_tv}
        for s in summaries
    ]
    return schema, rows, False


def _cmd_growth(args) -> tuple[list, list, bool]:
    f = theta.random_cusp_function(args.p, args.d, args.seed)
    rows_raw = equidist.coeff_growth_scan(f, args.d, args.nmax)
    schema = [("n", "int"), ("abs_c", "real"), ("abs_c_over_n_d4", "real"), ("abs_c_over_n_34", "real")]
    rows = [
        {"n": r.n, "abs_c": r.abs_c, "abs_c_over_n_d4": r.hecke_ratio, "abs_c_over_n_34": r.kloosterman_ratio}
        for r in rows_raw
    ]
    return schema, rows, False


_HANDLERS = {
    "repnum": _cmd_repnum,
    "quadric": _cmd_quadric,
    "gauss": _cmd_gauss,
    "acoeff": _cmd_acoeff,
    "density": _cmd_density,
    "singular": _cmd_singular,
    "mainterm": _cmd_mainterm,
    "diffcheck": _cmd_diffcheck,
    "theta-coeffs": _cmd_theta_coeffs,
    "theta-verify": _cmd_theta_verify,
    "cusp-check": _cmd_cusp_check,
    "srw": _cmd_srw,
    "equidist": _cmd_equidist,
    "growth": _cmd_growth,
}


def _build_parser() -> _Parser:
    parser = _Parser(prog="quadsum", description=__doc__)
    sub = parser.add_subparsers(dest="command")

    def add(name, **kw):
        sp = sub.add_parser(name, **kw)
        sp.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
        sp.add_argument("--out", default="-", help="output path, '-' for stdout")
        return sp

    sp = add("repnum", help="representation counts: enumeration vs convolution vs exact formula")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--nmax", type=int, required=True)

    sp = add("quadric", help="finite quadric point sets and cardinalities")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--a", type=int, default=None)

    sp = add("gauss", help="quadratic Gauss sums, direct vs closed form")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--a", type=int, default=None)
    sp.add_argument("--amax", type=int, default=None,
                    help="scan a = 1..amax (default min(q, 32))")

    sp = add("acoeff", help="series coefficients A_d(p^h, n): closed form vs direct sum")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--hmax", type=int, default=4)
    sp.add_argument("--nmax", type=int, default=20)

    sp = add("density", help="p-adic local density with its term expansion")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)

    sp = add("singular", help="truncated singular series")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--prime-cutoff", dest="prime_cutoff", type=int, default=DEFAULT_PRIME_CUTOFF)

    sp = add("mainterm", help="archimedean factor times singular series")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--prime-cutoff", dest="prime_cutoff", type=int, default=DEFAULT_PRIME_CUTOFF)

    sp = add("diffcheck", help="growth of r_d(p^2 n) - r_d(n)")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--coeff", type=float, default=None, help="bound coefficient for d >= 5")

    sp = add("theta-coeffs", help="weighted theta coefficients")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--nmax", type=int, required=True)
    sp.add_argument("--kind", default="random-even",
                    choices=("ones", "origin", "random-even", "random-cusp"))
    sp.add_argument("--seed", type=int, default=0)

    sp = add("theta-verify", help="transformation identities: summation formula, generator table, weak modularity")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--tau", type=str, required=True)
    sp.add_argument("--eps", type=float, default=DEFAULT_EPS)
    sp.add_argument("--seed", type=int, default=0)

    sp = add("cusp-check", help="cusp vanishing conditions for a test function")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--kind", default="random-cusp",
                    choices=("ones", "origin", "random-even", "random-cusp"))
    sp.add_argument("--seed", type=int, default=0)

    sp = add("srw", help="|S(r, w)| over the full (r, w) grid")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--rmax", type=int, default=3)
    sp.add_argument("--kind", default="random-cusp",
                    choices=("ones", "origin", "random-even", "random-cusp"))
    sp.add_argument("--seed", type=int, default=0)

    sp = add("equidist", help="windowed TV-decay study of sphere points mod p")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--kmin", type=int, default=6)
    sp.add_argument("--kmax", type=int, default=10)
    sp.add_argument("--parity", choices=("odd", "even", "all"), default="all")

    sp = add("growth", help="cusp coefficient growth table")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--nmax", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    threads = os.environ.get("QS_THREADS")
    if threads is not None:
        # upper bound on worker parallelism; all current computation is
        # sequential, so any positive bound is honored as-is
        try:
            if int(threads) < 1:
                raise ValueError
        except ValueError:
            sys.stderr.write(f"quadsum: QS_THREADS must be a positive integer, got {threads!r}\n")
            return 1
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 1
        if getattr(args, "tau", None) is not None and isinstance(args.tau, str):
            args.tau = parse_tau(args.tau)
        schema, rows, failed = _HANDLERS[args.command](args)
        emit(schema, rows, args.fmt, args.out)
        return 3 if failed else 0
    except (ValidationError, EmptyMeasureError) as exc:
        sys.stderr.write(f"quadsum: {exc}\n")
        return 1
    except ResourceLimitError as exc:
        sys.stderr.write(f"quadsum: resource cap: {exc}\n")
        return 2
    except QuadsumError as exc:  # anything else from the library
        sys.stderr.write(f"quadsum: {exc}\n")
        return 1


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())

"""Batch front door: ``stabletrace <experiment> [options] [--out FILE] [--config FILE]``.

Every experiment prints one summary line and optionally writes its records
as JSON or CSV (chosen by the file suffix).  Exit status: 0 pass,
1 falsification, 2 usage.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

import mpmath

from . import acceptance, adelic, ffl, orbital, rootdata, steinberg
from .errors import FalsificationError, LabError
from .exactalg import render
from .orbital import render_number

EXIT_OK, EXIT_FALSIFIED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -------------------------------------------------------------- arg types


def _s_value(text: str):
    """Integral s stays an int (exact path); anything else becomes a Fraction."""
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    return int(v) if v.denominator == 1 else v


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _s_list(text: str) -> list:
    return [_s_value(t) for t in text.split(",") if t.strip()]


def _levels(text: str) -> dict[int, int]:
    """'2:1,3:-1' -> {2: 1, 3: -1}."""
    out = {}
    for item in filter(None, (t.strip() for t in text.split(","))):
        try:
            p, k = item.split(":")
            out[int(p)] = int(k)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected prime:level pairs, got {item!r}")
    return out


def _poly(text: str) -> tuple[int, ...]:
    """Coefficients from the constant term up, e.g. '1,0,1' for t^2 + 1."""
    return tuple(_int_list(text))


# ------------------------------------------------------------ infrastructure


def _pool_map(fn, items, workers: int):
    """Ordered map; the result order never depends on the worker count."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (Fraction, mpmath.mpf)):
        return render_number(v)
    return v


def write_output(path: str | None, records: list[dict]) -> None:
    if not path:
        return
    out = Path(path)
    records = [_jsonable(r) for r in records]
    if out.suffix.lower() == ".csv":
        fields: list[str] = []
        for r in records:
            fields.extend(k for k in r if k not in fields)
        with out.open("w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
            w.writeheader()
            for r in records:
                w.writerow({k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in r.items()})
    else:
        out.write_text(json.dumps(records, indent=2, sort_keys=True) + "\n")


def read_config(path: str) -> dict[str, str]:
    """key = value lines; '#' starts a comment.  Keys use the long option names."""
    cfg = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key = value")
        k, v = (t.strip() for t in line.split("=", 1))
        cfg[k.replace("-", "_")] = v
    return cfg


# ------------------------------------------------------------- experiments


def cmd_hc1_check(a):
    rs = rootdata.build(a.type)
    r = steinberg.verify_hc1(rs)
    disc = steinberg.base_discriminant(rs)
    rec = {"type": a.type, "ok": r.ok, "sign": r.sign, "jacobian": render(r.jacobian),
           "delta": render(r.delta), "residual": render(r.residual) if not r.ok else "0",
           "base_discriminant": str(disc)}
    line = "OK residual=0" if r.ok else f"FAIL residual={render(r.residual)}"
    return r.ok, line, [rec]


def cmd_theta(a):
    th = orbital.theta_at(a.p, a.N, a.b, a.s)
    return True, str(render_number(th.value)), [th.record()]


def cmd_theta_hat_zero(a):
    recs = []
    for p in a.primes:
        for s in a.s:
            if a.N is None:
                v = orbital.theta_hat_exact(p, s)
                recs.append({"p": p, "N": None, "s": render_number(s), "value": render_number(v),
                             "lower": render_number(v), "upper": render_number(v), "residual_mass": "0"})
            else:
                recs.append(orbital.theta_hat_zero(p, a.N, s).record())
    ok = True
    for r in recs:
        if r["s"] == "1" and r["lower"] == r["upper"]:
            p = r["p"]
            ok &= Fraction(r["value"]) == 1 - Fraction(1, p * p)
    worst = max(recs, key=lambda r: r["p"])
    return ok, f"{'OK' if ok else 'FAIL'} {len(recs)} values, p={worst['p']} s={worst['s']}: {worst['value']}", recs


def _transversal(args):
    p, N = args
    rep = orbital.verify_transversal_lemma(p, N)
    return {"p": p, "N": N, "passed": rep.passed, "classes": rep.counts(), "failures": rep.failures}


def cmd_transversal_lemma(a):
    recs = _pool_map(_transversal, [(p, a.N) for p in a.primes], a.workers)
    ok = all(r["passed"] for r in recs)
    bad = [r["p"] for r in recs if not r["passed"]]
    return ok, ("OK" if ok else f"FAIL at p={bad}") + f" primes={a.primes} N={a.N}", recs


def _breakdown(args):
    p, N = args
    return orbital.torus_breakdown(p, N)


def cmd_torus_breakdown(a):
    rows = _pool_map(_breakdown, [(p, a.N) for p in a.primes], a.workers)
    recs = [r.record() for r in rows]
    ok = all(r.C_split + r.C_unram + r.C_ram == 1 - Fraction(1, r.p ** 2) for r in rows)
    return ok, f"{'OK' if ok else 'FAIL'} {len(rows)} primes, class masses sum to 1 - p^-2", recs


def cmd_breakdown_fit(a):
    primes = orbital.odd_primes(a.pmax)
    rows = _pool_map(_breakdown, [(p, None) for p in primes], a.workers)
    fit = orbital.fit_breakdown_coefficients(rows, a.min_per_class)
    rec = fit.record()
    ok = fit.identities["a1 + b1 = 1"] and fit.identities["a2 + b2 + c2 = 0"]
    c = fit.coefficients
    line = (f"{'OK' if ok else 'FAIL'} a1+b1={c['a1'] + c['b1']} a2+b2+c2={c['a2'] + c['b2'] + c['c2']} "
            f"a3+b3={c['a3'] + c['b3']} k_sum_bound={float(fit.k_sum_bound):.6f}")
    return ok, line, [rec]


def cmd_dominant_product(a):
    recs = [orbital.dominant_product(pm, s).record() for pm in a.pmax for s in a.s]
    ok = all(r["gap"] == "0" for r in recs if r["s"] == "1")
    last = recs[-1]
    return ok, f"{'OK' if ok else 'FAIL'} pmax={last['pmax']} s={last['s']} gap={last['gap']}", recs


def cmd_poisson(a):
    Sp = adelic.TruncationSet(frozenset(a.primes))
    recs = []
    for t in a.t:
        f = adelic.TestFunction(float(t), a.levels, 1.0)
        recs.append(adelic.poisson_truncated(f, Sp, a.rel_tail).record())
    worst = max(r["gap"] / max(abs(r["lhs"]), abs(r["rhs"])) for r in recs)
    ok = worst < a.tol
    return ok, f"{'OK' if ok else 'FAIL'} S'={Sp} worst relative gap={worst:.3e}", recs


def cmd_getz_decompose(a):
    S = adelic.getz_bound({adelic.INFINITY, *a.S}, a.A, a.n)
    rng = random.Random(a.seed)
    recs, fails = [], 0
    for i in range(a.samples):
        x = adelic.random_adele(rng)
        d = adelic.getz_decompose(x, S)
        ok = d.verify(x)
        fails += not ok
        recs.append({"sample": i, "support": x.support, "rational": render_number(d.rational), "verified": ok})
    return fails == 0, f"{'OK' if not fails else 'FAIL'} S'={S} samples={a.samples} failures={fails}", recs


def _serie(args):
    q, dmax, md = args
    return ffl.serie_rows(q, dmax, md)


def cmd_ffl_serie(a):
    blocks = _pool_map(_serie, [(q, a.dmax, a.max_modulus_degree) for q in a.q], a.workers)
    recs = [r for b in blocks for r in b]
    worst = max(r["residual"] for r in recs)
    ok = worst <= a.tol
    return ok, f"{'OK' if ok else 'FAIL'} rows={len(recs)} max residual={worst:.3e}", recs


def cmd_ffl_sympow(a):
    recs, fails = [], 0
    for q in a.q:
        mods = [ffl.FqPolynomial(q, a.modulus)] if a.modulus else ffl.moduli(q, a.max_modulus_degree)
        for f in mods:
            for chi in ffl.characters(f):
                if chi.is_trivial():
                    continue
                try:
                    rep = ffl.symmetric_power_check(chi, a.dmax, a.tol)
                    passed, worst, m = True, rep.max_residual, rep.m
                except FalsificationError:
                    fails += 1
                    passed, worst, m = False, float("nan"), None
                L = ffl.l_polynomial(chi)
                recs.append({"q": q, "modulus": str(f), "character": chi.index, "m": m,
                             "even": chi.is_even(), "value_at_infinity": chi.value_at_infinity,
                             "primitive": chi.is_primitive(), "abs_roots": [abs(r) for r in L.roots],
                             "max_residual": worst, "passed": passed})
    return fails == 0, f"{'OK' if not fails else 'FAIL'} characters={len(recs)} failures={fails}", recs


def cmd_verify_all(a):
    results = acceptance.run_all()
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    npass = sum(r.passed for r in results)
    return ok, f"{'OK' if ok else 'FAIL'} {npass}/{len(results)} acceptance criteria", [r.record() for r in results]


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stabletrace", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--out", help="write records to FILE (.json or .csv)")
        p.add_argument("--config", help="key = value file of default options")
        p.add_argument("--workers", type=int, default=1)
        p.set_defaults(func=fn)
        return p

    p = add("hc1-check", cmd_hc1_check, "exact Jacobian identity in the log frame")
    p.add_argument("--type", choices=rootdata.SUPPORTED, default="A1")

    p = add("theta", cmd_theta, "theta(b; s) for SL(2) by fiber counting")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--N", type=int, default=4)
    p.add_argument("--s", type=_s_value, default=1)

    p = add("theta-hat-zero", cmd_theta_hat_zero, "integral of theta over the base")
    p.add_argument("--primes", type=_int_list, default="3,5,7")
    p.add_argument("--N", type=int, default=None, help="count at precision N; closed form if omitted")
    p.add_argument("--s", type=_s_list, default="1")

    p = add("transversal-lemma", cmd_transversal_lemma, "theta(b;1) against |G(F_p)|/|T(F_p)|")
    p.add_argument("--primes", type=_int_list, default="3,5,7,11,13")
    p.add_argument("--N", type=int, default=4)

    p = add("torus-breakdown", cmd_torus_breakdown, "per-class masses and derivative coefficients")
    p.add_argument("--primes", type=_int_list, default="3,5,7,11,13")
    p.add_argument("--N", type=int, default=3)

    p = add("breakdown-fit", cmd_breakdown_fit, "exact interpolation of the per-class data in 1/p")
    p.add_argument("--pmax", type=int, default=97)
    p.add_argument("--min-per-class", type=int, default=6)

    p = add("dominant-product", cmd_dominant_product, "partial products of theta-hat(0; s)")
    p.add_argument("--pmax", type=_int_list, default="100,500")
    p.add_argument("--s", type=_s_list, default="1,3/2,2")

    p = add("poisson", cmd_poisson, "truncated Poisson pair over F_{S'}")
    p.add_argument("--primes", type=_int_list, default="2", help="finite primes of S'")
    p.add_argument("--levels", type=_levels, default="", help="prime:k pairs for 1[p^k Z_p]")
    p.add_argument("--t", type=_s_list, default="1", help="Gaussian parameters")
    p.add_argument("--rel-tail", type=float, default=1e-12)
    p.add_argument("--tol", type=float, default=1e-8)

    p = add("getz-decompose", cmd_getz_decompose, "a = a' + b on random adeles")
    p.add_argument("--S", type=_int_list, default="", help="finite primes of S")
    p.add_argument("--A", type=float, default=2.0)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)

    p = add("ffl-serie", cmd_ffl_serie, "divisor sums against the Euler product")
    p.add_argument("--q", type=_int_list, default="3,5")
    p.add_argument("--dmax", type=int, default=6)
    p.add_argument("--max-modulus-degree", type=int, default=2)
    p.add_argument("--tol", type=float, default=1e-9)

    p = add("ffl-sympow", cmd_ffl_sympow, "divisor sums against e_d of the L-roots")
    p.add_argument("--q", type=_int_list, default="3,5")
    p.add_argument("--modulus", type=_poly, default=None, help="coefficients from the constant term up")
    p.add_argument("--dmax", type=int, default=6)
    p.add_argument("--max-modulus-degree", type=int, default=2)
    p.add_argument("--tol", type=float, default=1e-9)

    add("verify-all", cmd_verify_all, "run the acceptance suite")
    return parser


def _parse(parser: argparse.ArgumentParser, argv):
    args = parser.parse_args(argv)
    if args.config:
        cfg = read_config(args.config)
        chosen = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in chosen._actions}
        unknown = sorted(set(cfg) - known)
        if unknown:
            raise UsageError(f"unknown config keys for {args.command}: {', '.join(unknown)}")
        chosen.set_defaults(**cfg)
        args = parser.parse_args(argv)  # command-line flags override the file
    return args


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _parse(parser, argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        ok, line, records = args.func(args)
    except FalsificationError as e:
        print(f"FALSIFIED {e}", file=sys.stderr)
        write_output(args.out, [{"falsification": str(e), "report": repr(e.report)}])
        return EXIT_FALSIFIED
    except (LabError, ValueError, ArithmeticError, NotImplementedError) as e:
        print(f"usage error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE
    write_output(args.out, records)
    print(line)
    return EXIT_OK if ok else EXIT_FALSIFIED


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point.

Subcommands: tau-gen, sieve, lambda-min, theorem2, sign-eq, density,
abs-density, lemma10, wirsing, example3, d-sweep.

Exit codes: 0 all assertions passed, 2 assertion failure, 1 usage or
domain error.  JSON reports are deterministic (sorted keys, stable float
repr, no timestamps) and written atomically; every report embeds the
generating command line so frozen values stay reproducible.
"""

from __future__ import annotations

import argparse
import math
import shlex
import sys
from fractions import Fraction
from typing import Optional

import numpy as np

from . import __version__
from . import characters as characters_mod
from . import constructions as constructions_mod
from . import experiments as exp_mod
from . import halasz as halasz_mod
from . import hecke as hecke_mod
from . import multiplicative as mult_mod
from . import primes as primes_mod
from .util import to_jsonable, write_csv_atomic, write_json_atomic

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ASSERTION = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract here reserves 2 for
    # assertion failures and 1 for usage/domain problems
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _parse_checkpoints(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if part:
            out.append(int(float(part)))
    if not out:
        raise ValueError("empty checkpoint list")
    return sorted(out)


# builtin multiplicative specs addressable from the command line
def _builtin_spec(name: str, modulus: int = 4) -> mult_mod.MultSpec:
    if name == "one":
        return mult_mod.MultSpec(
            prime_rule=lambda p: 1,
            completion=mult_mod.COMPLETELY_MULTIPLICATIVE,
            exact=True,
            spec_id="one",
        )
    if name == "mobius":
        return mult_mod.MultSpec(
            prime_rule=lambda p: -1,
            completion=mult_mod.ZERO_BEYOND_FIRST,
            exact=True,
            spec_id="mobius",
        )
    if name == "divisor":
        return mult_mod.MultSpec(
            prime_rule=lambda p: 2,
            completion=mult_mod.HECKE,
            weight="normalized",
            exact=True,
            spec_id="divisor",
        )
    if name == "cm-indicator":
        chi = [c for c in characters_mod.enumerate_characters(modulus) if c.is_quadratic]
        if not chi:
            raise ValueError(f"no quadratic character mod {modulus}")
        cv = chi[0].real_values_mod()
        return mult_mod.MultSpec(
            prime_rule=lambda p: 1 if cv[p % modulus] == 1 else 0,
            completion=mult_mod.COMPLETELY_MULTIPLICATIVE,
            exact=True,
            spec_id=f"cm_indicator_mod{modulus}",
        )
    if name == "half":
        return mult_mod.MultSpec(
            prime_rule=lambda p: 0.5,
            completion=mult_mod.ZERO_BEYOND_FIRST,
            exact=False,
            spec_id="half",
        )
    raise ValueError(f"unknown builtin spec {name!r}")


BUILTIN_SPECS = ("one", "mobius", "divisor", "cm-indicator", "half")


def _load_prime_values_csv(path: str) -> dict:
    out = {}
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "p,value":
            raise ValueError(f"{path}: expected header 'p,value'")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                p_s, v_s = line.split(",")
                p = int(p_s)
                v = float(Fraction(v_s)) if "/" in v_s else float(v_s)
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: cannot parse {line!r}") from None
            out[p] = v
    return out


def _emit(args, payload: dict, assertions: dict) -> int:
    passed = all(assertions.values()) if assertions else True
    report = {
        "command": shlex.join(args.argv),
        "package_version": __version__,
        "seed": getattr(args, "seed", None),
        "report": to_jsonable(payload),
        "assertions": assertions,
        "passed": passed,
    }
    if args.out:
        write_json_atomic(args.out, report)
    else:
        import json

        print(json.dumps(to_jsonable(report), sort_keys=True, indent=2))
    for name, ok in assertions.items():
        print(f"{'PASS' if ok else 'FAIL'}  {name}", file=sys.stderr)
    return EXIT_OK if passed else EXIT_ASSERTION


def _coeff_table(args) -> hecke_mod.CoeffTable:
    if getattr(args, "coeff_file", None):
        kind: object = args.declared_weight
        if kind != "normalized":
            kind = int(kind)
        return hecke_mod.load_coeff_table(args.coeff_file, kind)
    return hecke_mod.eta24_expand(args.limit)


def cmd_tau_gen(args) -> int:
    t = hecke_mod.eta24_expand(args.limit)
    check_limit = min(args.limit, 10**4)
    s11 = hecke_mod.sigma_power_mod(check_limit, 11, 691)
    cong = all(t.a[n] % 691 == int(s11[n]) for n in range(1, check_limit + 1))
    zeros = sum(1 for n in range(1, args.limit + 1) if t.a[n] == 0)
    payload = {
        "limit": args.limit,
        "weight": 12,
        "zero_count": zeros,
        "congruence_check_limit": check_limit,
        "sample": {str(n): str(t.a[n]) for n in (1, 2, 3, 4, 5, min(args.limit, 10**4))},
    }
    if args.coeff_out:
        hecke_mod.save_coeff_table(t, args.coeff_out)
        import hashlib

        with open(args.coeff_out, "rb") as fh:
            payload["coeff_file_sha256"] = hashlib.sha256(fh.read()).hexdigest()
        payload["coeff_file"] = args.coeff_out
    assertions = {"congruence_mod_691": cong, "no_vanishing": zeros == 0}
    return _emit(args, payload, assertions)


def cmd_sieve(args) -> int:
    spec = _builtin_spec(args.spec, args.modulus)
    table = mult_mod.sieve_values(spec, args.limit)
    if args.table_out:
        mult_mod.save_table_csv(table, args.table_out)
    x = float(args.limit)
    payload = {
        "spec": args.spec,
        "limit": args.limit,
        "mean_sum": mult_mod.mean_sum(table, x),
        "log_weighted_sum": mult_mod.log_weighted_sum(table, x),
    }
    assertions = {}
    vals = table.as_float_array()
    if np.all(vals[1:] >= 0):
        res19 = mult_mod.mean_bound_evaluate(table, x)
        payload["mean_bound"] = to_jsonable(res19)
        payload["harmonic_vs_product_ratio"] = mult_mod.harmonic_product_ratio(table, x)
        payload["lower_bound_ratio"] = to_jsonable(mult_mod.mean_lower_ratio(table, x))
        assertions["mean_bound_holds"] = res19.holds
    residual = mult_mod.partial_summation_residual(table, x) if x >= 2 else 0.0
    payload["partial_summation_residual"] = residual
    assertions["partial_summation_identity"] = abs(residual) < 1e-9
    return _emit(args, payload, assertions)


def _g_primes_for(args):
    if args.g_csv:
        return _load_prime_values_csv(args.g_csv)
    spec = _builtin_spec(args.spec, args.modulus)
    return lambda p: spec.value_at_prime(p)


def cmd_lambda_min(args) -> int:
    g = _g_primes_for(args)
    rep = halasz_mod.minimize_lambda(
        g, args.Y, args.x, args.T, grid_step=args.grid_step, refine=args.refine,
        profile=args.csv is not None,
    )
    if args.csv:
        write_csv_atomic(args.csv, "t,rho", (f"{t!r},{v!r}" for t, v in rep.rho_profile))
        rep.rho_profile = None
    assertions = {"lambda_nonnegative": rep.lam >= 0.0}
    return _emit(args, {"lambda_report": rep}, assertions)


def cmd_theorem2(args) -> int:
    if args.g_csv:
        gmap = _load_prime_values_csv(args.g_csv)
        completion = {
            "zero": mult_mod.ZERO_BEYOND_FIRST,
            "complete": mult_mod.COMPLETELY_MULTIPLICATIVE,
            "exponential": mult_mod.EXPONENTIAL,
        }[args.completion]
        spec = mult_mod.MultSpec(
            prime_rule=lambda p: gmap.get(p, 0.0), completion=completion, spec_id="g_csv"
        )
        g = gmap
    elif args.random_unimodular:
        rng = np.random.default_rng(args.seed)
        ps = primes_mod.get_prime_set(int(args.x))
        phases = rng.uniform(0.0, 2 * math.pi, size=len(ps.primes_upto(args.x)))
        gmap = {
            int(p): complex(math.cos(th), math.sin(th))
            for p, th in zip(ps.primes_upto(args.x), phases)
        }
        spec = mult_mod.MultSpec(
            prime_rule=lambda p: gmap.get(p, 0.0),
            completion=mult_mod.COMPLETELY_MULTIPLICATIVE,
            spec_id=f"unimodular_seed{args.seed}",
        )
        g = gmap
    else:
        spec = _builtin_spec(args.spec, args.modulus)
        g = lambda p: spec.value_at_prime(p)
    table = mult_mod.sieve_values(spec, int(args.x))
    rep = halasz_mod.halasz_bound_evaluate(
        table, g, args.Y, args.x, args.T, args.c, args.beta,
        grid_step=args.grid_step, refine=args.refine,
    )
    assertions = {
        "rhs_positive": rep.rhs > 0,
        "ratio_finite": math.isfinite(rep.ratio),
        "prime_product_at_least_one": rep.p_x >= 1.0,
    }
    return _emit(args, {"bound_report": rep}, assertions)


def cmd_sign_eq(args) -> int:
    t = _coeff_table(args)
    rep = exp_mod.run_sign_equidistribution(t, args.checkpoints)
    assertions = {"deviation_trend": rep.trend_ok}
    if rep.zero_count:
        print(
            f"WARNING: {rep.zero_count} vanishing coefficients, first at {rep.first_zeros[:3]}",
            file=sys.stderr,
        )
    return _emit(args, {"sign_report": rep}, assertions)


def cmd_density(args) -> int:
    if args.spec == "tau-indicator":
        t = _coeff_table(args)
        g = hecke_mod.nonvanish_indicator(t)
    else:
        spec = _builtin_spec(args.spec, args.modulus)
        g = mult_mod.sieve_values(spec, max(args.checkpoints))
    rep = exp_mod.run_progression_density(
        g, args.modulus, args.checkpoints,
        detect_threshold=args.detect_threshold, detect_windows=args.detect_windows,
    )
    scaling = exp_mod.run_scaling_check(g, args.checkpoints)
    assertions = {"partition_identity": rep.partition_ok}
    return _emit(args, {"density_report": rep, "scaling": scaling}, assertions)


def cmd_abs_density(args) -> int:
    t = _coeff_table(args)
    nc = hecke_mod.normalize(t)
    rep = exp_mod.run_abs_mean_progressions(nc, args.modulus, args.checkpoints)
    assertions = {"partition_identity": rep.partition_ok}
    return _emit(args, {"abs_density_report": rep}, assertions)


def cmd_lemma10(args) -> int:
    t = _coeff_table(args)
    nc = hecke_mod.normalize(t)
    points = exp_mod.run_moment_chain(nc, args.checkpoints)
    moments = {}
    x_max = args.checkpoints[-1]
    for power, target in ((2, float(x_max)), (4, 2.0 * x_max)):
        val = hecke_mod.moment_sum(nc, x_max, power, "logp")
        moments[f"moment{power}_logp_over_target"] = val / target
    assertions = {"second_moment_tracks_L": all(p.hypothesis_ok for p in points)}
    return _emit(args, {"chain": points, "moments": moments}, assertions)


def cmd_wirsing(args) -> int:
    spec = _builtin_spec(args.spec, args.modulus)
    if args.twisted:
        chars = characters_mod.enumerate_characters(args.modulus)
        if args.char_index is not None:
            if not (0 <= args.char_index < len(chars)):
                raise ValueError(
                    f"char index {args.char_index} out of range for modulus {args.modulus}"
                )
            chi = chars[args.char_index]
        else:
            quads = [c for c in chars if c.is_quadratic]
            if not quads:
                raise ValueError(f"no quadratic character mod {args.modulus}")
            chi = quads[0]
        rep = exp_mod.run_wirsing_twisted(spec, chi, args.tau_w, args.checkpoints)
    else:
        rep = exp_mod.run_wirsing_check(spec, args.tau_w, args.checkpoints)
    assertions = {"ratios_finite_positive": all(math.isfinite(r) and r > 0 for r in rep.ratios)}
    return _emit(args, {"wirsing_report": rep}, assertions)


def cmd_example3(args) -> int:
    f = constructions_mod.build_interval_signs(args.c, args.x_max)
    if args.g_csv_out:
        f.export_prime_csv(args.g_csv_out)
    diag = constructions_mod.lambda_growth_diagnostic(
        f, args.x_max, T=args.T, grid_step=args.grid_step
    )
    seq = constructions_mod.generate_bn_past(args.x_max)
    brackets = []
    for n in range(1, seq.count):
        if float(seq.b[n]) < constructions_mod.BETA_DOMAIN_MIN:
            continue
        brackets.append(constructions_mod.verify_bracketing(seq, n))
    first_hold = constructions_mod.first_holding_index(seq)
    payload = {
        "c": args.c,
        "x_max": args.x_max,
        "intervals": len(f.intervals),
        "truncation_events": f.truncation_events,
        "first_bracket_holding_index": first_hold,
        "bracket_failures": [b.n for b in brackets if not b.holds],
        "growth": diag,
    }
    assertions = {
        "chebyshev_ratio_in_band": 0.5 * args.c <= diag.chebyshev_ratio <= 1.5 * args.c,
    }
    return _emit(args, payload, assertions)


def cmd_d_sweep(args) -> int:
    t = _coeff_table(args)
    g = hecke_mod.nonvanish_indicator(t)
    D_list = list(range(args.d_min, args.d_max + 1))
    rows = exp_mod.run_d_sweep(g, D_list, args.x, workers=args.workers)
    if args.csv:
        write_csv_atomic(
            args.csv,
            "D,max_gamma_error,envelope,min_class_population,small_sample",
            (
                f"{r.D},{r.max_gamma_error!r},{r.envelope!r},{r.min_class_population},{int(r.small_sample)}"
                for r in rows
            ),
        )
    assertions = {"all_errors_finite": all(math.isfinite(r.max_gamma_error) for r in rows)}
    return _emit(args, {"rows": rows}, assertions)


def build_parser() -> _Parser:
    p = _Parser(prog="meanmult", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, checkpoints=False, coeffs=False, spec=False):
        sp.add_argument("--out", help="JSON report path (stdout if omitted)")
        sp.add_argument("--csv", help="auxiliary CSV output path")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--workers", type=int, default=1)
        if checkpoints:
            sp.add_argument(
                "--checkpoints",
                type=_parse_checkpoints,
                default=list(exp_mod.DEFAULT_CHECKPOINTS),
                help="comma-separated x checkpoints (default 1e4,1e5,1e6)",
            )
        if coeffs:
            sp.add_argument("--coeff-file", help="coefficient CSV (n,a_n); generated if omitted")
            sp.add_argument(
                "--declared-weight",
                default="12",
                help="weight of --coeff-file data: even integer or 'normalized'",
            )
            sp.add_argument("--limit", type=lambda s: int(float(s)), default=10**6)
        if spec:
            sp.add_argument("--spec", choices=BUILTIN_SPECS, default="one")
            sp.add_argument("--modulus", type=int, default=4)

    sp = sub.add_parser("tau-gen", help="exact eigenvalue table from the eta product")
    sp.add_argument("--limit", type=lambda s: int(float(s)), default=10**4)
    sp.add_argument("--coeff-out", help="write coefficient CSV here")
    common(sp)
    sp.set_defaults(func=cmd_tau_gen)

    sp = sub.add_parser("sieve", help="sieve a builtin spec and run the mean-value checks")
    sp.add_argument("--limit", type=lambda s: int(float(s)), default=10**4)
    sp.add_argument("--table-out", help="write the table CSV here")
    common(sp, spec=True)
    sp.set_defaults(func=cmd_sieve)

    def lambda_flags(sp):
        sp.add_argument("--Y", type=float, default=1.5)
        sp.add_argument("--x", type=float, default=10**4)
        sp.add_argument("--T", type=float, default=10.0)
        sp.add_argument("--grid-step", type=float, default=None)
        sp.add_argument("--refine", type=int, default=40)
        sp.add_argument("--g-csv", help="prime values CSV (p,value)")

    sp = sub.add_parser("lambda-min", help="minimize the distance functional over a t-window")
    lambda_flags(sp)
    common(sp, spec=True)
    sp.set_defaults(func=cmd_lambda_min)

    sp = sub.add_parser("theorem2", help="evaluate the mean-value bound and its ratio")
    lambda_flags(sp)
    sp.add_argument("--c", type=float, default=1.0)
    sp.add_argument("--beta", type=float, default=1.0)
    sp.add_argument("--completion", choices=("zero", "complete", "exponential"), default="zero")
    sp.add_argument("--random-unimodular", action="store_true")
    common(sp, spec=True)
    sp.set_defaults(func=cmd_theorem2)

    sp = sub.add_parser("sign-eq", help="sign equidistribution of coefficients")
    common(sp, checkpoints=True, coeffs=True)
    sp.set_defaults(func=cmd_sign_eq)

    sp = sub.add_parser("density", help="progression densities of an indicator")
    sp.add_argument("--detect-threshold", type=float, default=0.05)
    sp.add_argument("--detect-windows", type=int, default=3)
    sp.add_argument("--spec", choices=BUILTIN_SPECS + ("tau-indicator",), default="tau-indicator")
    sp.add_argument("--modulus", type=int, default=4)
    common(sp, checkpoints=True, coeffs=True)
    sp.set_defaults(func=cmd_density)

    sp = sub.add_parser("abs-density", help="progression means weighted by |a_n|")
    common(sp, checkpoints=True, coeffs=True)
    sp.add_argument("--modulus", type=int, default=7)
    sp.set_defaults(func=cmd_abs_density)

    sp = sub.add_parser("lemma10", help="truncated-moment chain and moment targets")
    common(sp, checkpoints=True, coeffs=True)
    sp.set_defaults(func=cmd_lemma10)

    sp = sub.add_parser("wirsing", help="asymptotic mean-value ratio for nonnegative specs")
    sp.add_argument("--tau-w", type=float, default=1.0)
    sp.add_argument("--twisted", action="store_true")
    sp.add_argument(
        "--char-index",
        type=int,
        default=None,
        help="character position in the canonical enumeration mod --modulus "
        "(lexicographic over generator exponents); default: first quadratic",
    )
    common(sp, checkpoints=True, spec=True)
    sp.set_defaults(func=cmd_wirsing)

    sp = sub.add_parser("example3", help="interval-sign construction diagnostics")
    sp.add_argument("--c", type=float, default=0.5)
    sp.add_argument("--x-max", type=float, default=10**6)
    sp.add_argument("--T", type=float, default=10.0)
    sp.add_argument("--grid-step", type=float, default=None)
    sp.add_argument("--g-csv-out", help="export the prime assignment CSV here")
    common(sp)
    sp.set_defaults(func=cmd_example3)

    sp = sub.add_parser("d-sweep", help="uniformity-in-D error sweep")
    sp.add_argument("--d-min", type=int, default=2)
    sp.add_argument("--d-max", type=int, default=50)
    sp.add_argument("--x", type=lambda s: int(float(s)), default=10**6)
    common(sp, coeffs=True)
    sp.set_defaults(func=cmd_d_sweep)

    return p


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.argv = argv
        return args.func(args)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Measure every checkpoint quantity whose value gets frozen into the
regression tests.  Run after any change to the core arithmetic and compare
against the constants in tests/test_experiments.py and
tests/test_acceptance.py.

Usage: python scripts/calibrate.py [--limit 1e6]
"""

import argparse
import math
import time

from meanmult import characters as ch
from meanmult import constructions as cons
from meanmult import experiments as exp
from meanmult import hecke
from meanmult import multiplicative as mc


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--limit", type=lambda s: int(float(s)), default=10**6)
    args = ap.parse_args()
    L = args.limit
    checkpoints = [c for c in (10**4, 10**5, 10**6, 10**7) if c <= L]

    t0 = time.time()
    tau = hecke.eta24_expand(L)
    print(f"# eta24({L:.0e}) in {time.time() - t0:.1f} s")
    nc = hecke.normalize(tau)
    ind = hecke.nonvanish_indicator(tau)

    print("\n== sign equidistribution ==")
    rep = exp.run_sign_equidistribution(tau, checkpoints)
    for x, f, d in zip(rep.x_checkpoints, rep.frac_neg, rep.deviation):
        print(f"x={x:.0e}  frac_neg={f:.6f}  deviation={d:.6f}")
    print(f"zeros={rep.zero_count} trend_ok={rep.trend_ok}")

    print("\n== moment targets ==")
    for power, target in ((2, float(L)), (4, 2.0 * L)):
        v = hecke.moment_sum(nc, L, power, "logp")
        print(f"power={power}: sum/target = {v / target:.6f}")
    for x in checkpoints:
        v = hecke.moment_sum(nc, x, 2, "1/p")
        print(f"x={x:.0e}: sum ahat^2/p - loglog x = {v - math.log(math.log(x)):.6f}")

    print("\n== moment chain ==")
    for pt in exp.run_moment_chain(nc, checkpoints):
        print(
            f"x={pt.x:.0e}  diff_sq={pt.diff_sq:.4f}  diff_abs={pt.diff_abs:.4f}  "
            f"diff_neg={pt.diff_neg:.4f}  neg_recip={pt.neg_recip_sum:.4f}  ok={pt.hypothesis_ok}"
        )

    print("\n== indicator densities ==")
    for D in (3, 5, 7, 8):
        rep = exp.run_progression_density(ind, D, checkpoints)
        gh = rep.gamma_hat[-1]
        worst = max(abs(v - 1 / len(gh)) for v in gh.values())
        print(f"D={D}: worst |gamma - 1/phi| = {worst:.6f}  exceptional={rep.exceptional is not None}")

    print("\n== CM model (D=4) ==")
    cm_spec = mc.MultSpec(
        prime_rule=lambda p: 1 if p % 4 == 1 else 0,
        completion=mc.COMPLETELY_MULTIPLICATIVE,
        exact=True,
        spec_id="cm4",
    )
    cm = mc.sieve_values(cm_spec, L)
    rep = exp.run_progression_density(cm, 4, checkpoints)
    print(f"gamma_hat at {checkpoints[-1]:.0e}: {rep.gamma_hat[-1]}")
    print(f"exceptional flagged: {rep.exceptional is not None}")
    print(f"scaling: {[round(s, 6) for s in rep.scaling]}")
    sc = exp.run_scaling_check(cm, checkpoints)
    print(f"scaled ratios: {[round(r, 6) for r in sc['consecutive_ratios']]}")

    print("\n== abs-density (D=7) ==")
    rep = exp.run_abs_mean_progressions(nc, 7, checkpoints)
    gh = rep.gamma_hat[-1]
    worst = max(abs(v - 1 / 6) for v in gh.values())
    print(f"worst |share - 1/6| at {checkpoints[-1]:.0e}: {worst:.6f}")

    print("\n== wirsing ratios ==")
    one = mc.MultSpec(
        prime_rule=lambda p: 1, completion=mc.COMPLETELY_MULTIPLICATIVE, exact=True, spec_id="one"
    )
    rep = exp.run_wirsing_check(one, 1.0, checkpoints)
    print(f"ones tau_w=1: ratios {[round(r, 6) for r in rep.ratios]}")
    div = mc.MultSpec(
        prime_rule=lambda p: 2, completion=mc.HECKE, weight="normalized", exact=True, spec_id="divisor"
    )
    rep = exp.run_wirsing_check(div, 2.0, checkpoints)
    print(f"divisor tau_w=2: ratios {[round(r, 6) for r in rep.ratios]}")
    rep = exp.run_wirsing_check(cm_spec, 0.5, checkpoints)
    print(f"cm tau_w=1/2: ratios {[round(r, 6) for r in rep.ratios]}")
    chi4 = [c for c in ch.enumerate_characters(4) if c.is_quadratic][0]
    rep = exp.run_wirsing_twisted(cm_spec, chi4, 0.5, checkpoints)
    print(f"cm twisted ratios: {[round(r, 6) for r in rep.twisted_ratio]}")
    print(f"cm twisted product: {rep.twisted_product:.6f}")

    print("\n== interval-sign construction ==")
    f = cons.build_interval_signs(0.5, float(L))
    d = cons.lambda_growth_diagnostic(f, float(L), T=10.0)
    print(f"one_sided={d.one_sided_sum:.4f} ratio_2beta={d.ratio_vs_2beta:.4f}")
    print(f"ratio_telescoped={d.ratio_vs_telescoped:.4f} chebyshev={d.chebyshev_ratio:.4f}")
    seq = cons.generate_bn_past(10**8)
    print(f"first bracket holding index: {cons.first_holding_index(seq)}")


if __name__ == "__main__":
    main()

"""Experiment runners and their report records.

Each runner consumes prepared tables from the core modules, splits sums
over residue classes, and assembles a report; no mathematics lives here
beyond report assembly.  Reductions are numpy bincounts and ordered sums,
so re-running with identical inputs reproduces every number bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import primes as primes_mod
from .characters import (
    DirichletCharacter,
    ExceptionalEvidence,
    detect_exceptional_quadratic,
    euler_phi,
)
from .hecke import CoeffTable, NormalizedCoeffs
from .multiplicative import MultSpec, SieveTable, sieve_values
from .util import fsum

EULER_CONSTANT = 0.5772156649015329

DEFAULT_CHECKPOINTS = (10**4, 10**5, 10**6)
EXTENDED_CHECKPOINTS = (10**4, 10**5, 10**6, 10**7, 10**8)

# partition identities must reassemble exactly up to float roundoff
PARTITION_TOL = 1e-12


def _coprime_residues(D: int) -> list[int]:
    if D == 1:
        return [0]
    return [a for a in range(D) if math.gcd(a, D) == 1]


def _residue_sums(values: np.ndarray, x: int, D: int) -> np.ndarray:
    """Sums of values[n] over n <= x by residue class mod D."""
    idx = np.arange(1, x + 1, dtype=np.int64)
    return np.bincount(idx % D, weights=values[1 : x + 1], minlength=D)


@dataclass
class DensityReport:
    D: int
    x_checkpoints: list
    S_D: list                       # sum over n <= x coprime to D
    gamma_hat: list                 # per checkpoint: {residue: share}
    scaling: list                   # S_D(x) (log x)^{1/2} / x
    partition_ok: bool
    exceptional: Optional[ExceptionalEvidence] = None
    psi_product: Optional[float] = None
    predicted_gamma: Optional[dict] = None
    small_classes: list = field(default_factory=list)


def run_progression_density(
    g: SieveTable,
    D: int,
    checkpoints: Sequence[int] = DEFAULT_CHECKPOINTS,
    detect_exceptional: bool = True,
    psi_cutoff: int = 10**4,
    detect_threshold: float = 0.05,
    detect_windows: int = 3,
) -> DensityReport:
    """Distribution of a nonnegative multiplicative indicator over the
    coprime residue classes mod D, with the exceptional-quadratic scan and,
    when a character is flagged, the truncated psi-product prediction."""
    if D < 1:
        raise ValueError(f"D must be >= 1, got {D}")
    checkpoints = sorted(int(c) for c in checkpoints)
    if checkpoints[-1] > g.limit:
        raise ValueError(f"checkpoint {checkpoints[-1]} exceeds table limit {g.limit}")
    vals = g.as_float_array()
    residues = _coprime_residues(D)
    S_list, gamma_list, scaling_list, ok = [], [], [], True
    small = []
    for x in checkpoints:
        sums = _residue_sums(vals, x, D)
        S = float(fsum(sums[a] for a in residues))
        gh = {a: (float(sums[a]) / S if S else float("nan")) for a in residues}
        S_list.append(S)
        gamma_list.append(gh)
        scaling_list.append(S * math.sqrt(math.log(x)) / x)
        if S and abs(sum(gh.values()) - 1.0) > PARTITION_TOL:
            ok = False
        pops = np.bincount(np.arange(1, x + 1, dtype=np.int64) % D, minlength=D)
        for a in residues:
            if pops[a] < 100:
                small.append({"x": x, "residue": a, "population": int(pops[a])})

    report = DensityReport(
        D=D,
        x_checkpoints=list(checkpoints),
        S_D=S_list,
        gamma_hat=gamma_list,
        scaling=scaling_list,
        partition_ok=ok,
        small_classes=small,
    )
    if detect_exceptional and D > 2:
        x_max = checkpoints[-1]
        ps = primes_mod.get_prime_set(g.limit)
        prs = ps.primes_upto(x_max)
        gmap = {int(p): float(vals[p]) for p in prs}
        found = detect_exceptional_quadratic(
            gmap, D, x_max, window_count=detect_windows, threshold=detect_threshold
        )
        if found is not None:
            chi, evidence = found
            report.exceptional = evidence
            psi = _psi_product(g, chi, min(psi_cutoff, g.limit))
            report.psi_product = psi
            phi = euler_phi(D)
            report.predicted_gamma = {
                "chi_plus": (1.0 + psi) / phi,
                "chi_minus": (1.0 - psi) / phi,
            }
    return report


def _psi_product(g: SieveTable, chi: DirichletCharacter, cutoff: int) -> float:
    """prod over p <= cutoff with chi(p) = -1 of
    (1 + sum_k g(p^k) chi(p)^k p^-k) / (1 + sum_k g(p^k) p^-k),
    prime-power sums truncated at the table limit."""
    ps = primes_mod.get_prime_set(g.limit)
    cvals = chi.real_values_mod()
    vals = g.as_float_array()
    out = 1.0
    for p in ps.primes_upto(cutoff):
        p = int(p)
        if cvals[p % chi.modulus] != -1:
            continue
        num = 1.0
        den = 1.0
        q = p
        sign = -1.0
        while q <= g.limit:
            gq = float(vals[q])
            num += gq * sign / q
            den += gq / q
            q *= p
            sign = -sign
        out *= num / den
    return out


def run_scaling_check(g: SieveTable, checkpoints: Sequence[int] = DEFAULT_CHECKPOINTS) -> dict:
    """S(x) (log x)^{1/2} / x at each checkpoint plus consecutive ratios;
    distinguishes the sqrt-log-thinned shape (stable scaled value) from a
    positive-density one (scaled value growing like sqrt(log x))."""
    checkpoints = sorted(int(c) for c in checkpoints)
    if checkpoints[-1] > g.limit:
        raise ValueError(f"checkpoint {checkpoints[-1]} exceeds table limit {g.limit}")
    vals = g.as_float_array()
    scaled = []
    S_list = []
    for x in checkpoints:
        S = fsum(vals[1 : x + 1])
        S_list.append(S)
        scaled.append(S * math.sqrt(math.log(x)) / x)
    ratios = [scaled[i + 1] / scaled[i] if scaled[i] else float("nan") for i in range(len(scaled) - 1)]
    degenerate = fsum(vals[2 : checkpoints[-1] + 1]) == 0.0
    return {
        "x_checkpoints": checkpoints,
        "S": S_list,
        "scaled": scaled,
        "consecutive_ratios": ratios,
        "degenerate": degenerate,
    }


@dataclass
class SignReport:
    x_checkpoints: list
    S: list                  # nonvanishing counts
    frac_neg: list
    frac_pos: list
    deviation: list          # |frac_neg - 1/2|
    trend_ok: bool           # deviations nonincreasing within slack
    trend_slack: float
    zero_count: int
    first_zeros: list
    degenerate_sign_pattern: bool
    gamma_const: float = 1.0 / 24000.0  # context only; far below desk resolution


def run_sign_equidistribution(
    coeffs: CoeffTable,
    checkpoints: Sequence[int] = DEFAULT_CHECKPOINTS,
    trend_slack: float = 0.01,
) -> SignReport:
    """Shares of negative and positive coefficients among the nonvanishing
    ones.  The decay rate of the deviation is far too slow to measure, so
    only the trend (nonincreasing within ``trend_slack``) is asserted."""
    checkpoints = sorted(int(c) for c in checkpoints)
    if checkpoints[-1] > coeffs.limit:
        raise ValueError(f"checkpoint {checkpoints[-1]} exceeds table limit {coeffs.limit}")
    sgn = np.zeros(coeffs.limit + 1, dtype=np.int8)
    for n in range(1, coeffs.limit + 1):
        v = coeffs.a[n]
        sgn[n] = 1 if v > 0 else (-1 if v < 0 else 0)
    zeros = np.flatnonzero(sgn[1:] == 0) + 1
    S_list, fneg, fpos, dev = [], [], [], []
    neg_cum = np.cumsum(sgn == -1)
    pos_cum = np.cumsum(sgn == 1)
    for x in checkpoints:
        neg = int(neg_cum[x])
        pos = int(pos_cum[x])
        S = neg + pos
        S_list.append(S)
        fneg.append(neg / S if S else float("nan"))
        fpos.append(pos / S if S else float("nan"))
        dev.append(abs(fneg[-1] - 0.5))
    trend = all(dev[i + 1] <= dev[i] + trend_slack for i in range(len(dev) - 1))
    return SignReport(
        x_checkpoints=checkpoints,
        S=S_list,
        frac_neg=fneg,
        frac_pos=fpos,
        deviation=dev,
        trend_ok=trend,
        trend_slack=trend_slack,
        zero_count=int(len(zeros)),
        first_zeros=[int(z) for z in zeros[:10]],
        degenerate_sign_pattern=(min(fneg) == 0.0 or min(fpos) == 0.0),
    )


def run_abs_mean_progressions(
    nc: NormalizedCoeffs, D: int, checkpoints: Sequence[int] = DEFAULT_CHECKPOINTS
) -> DensityReport:
    """Progression densities weighted by |ahat_n| instead of an indicator."""
    weights = np.abs(nc.ahat)
    table = SieveTable(limit=nc.limit, values=weights, spec_id=f"abs({nc.source})", exact=False)
    return run_progression_density(table, D, checkpoints, detect_exceptional=False)


@dataclass
class MomentChainPoint:
    x: int
    L: float                 # log log x
    sq_sum: float            # sum ahat_p^2/p over |ahat_p| <= sqrt(6)
    abs_sum: float           # sum |ahat_p|/p over the same primes
    neg_recip_sum: float     # sum 1/p over ahat_p < 0
    diff_sq: float           # sq_sum - (2/3) L
    diff_abs: float          # abs_sum - (2/3) L / sqrt(6)
    diff_neg: float          # neg_recip_sum - L/216
    hypothesis_ok: bool      # second moment keeps pace with L


def run_moment_chain(
    nc: NormalizedCoeffs, checkpoints: Sequence[int] = DEFAULT_CHECKPOINTS
) -> list[MomentChainPoint]:
    """The truncated-moment chain that manufactures negative coefficients:
    restricting to |ahat_p| <= sqrt(6) keeps (1 - 2/6) of the second-moment
    mass, pushes the first moment above (2/3)/sqrt(6) L, and forces
    sum_{ahat_p < 0} 1/p >= L/6^3 up to bounded drift.  Differences against
    the three targets are reported for band monitoring."""
    checkpoints = sorted(int(c) for c in checkpoints)
    if checkpoints[-1] > nc.limit:
        raise ValueError(f"checkpoint {checkpoints[-1]} exceeds coefficient limit {nc.limit}")
    ps = primes_mod.get_prime_set(nc.limit)
    out = []
    root6 = math.sqrt(6.0)
    for x in checkpoints:
        prs = ps.primes_upto(x)
        ap = nc.ahat[prs]
        pf = prs.astype(np.float64)
        L = math.log(math.log(x))
        mask = np.abs(ap) <= root6
        sq = fsum(ap[mask] ** 2 / pf[mask])
        ab = fsum(np.abs(ap[mask]) / pf[mask])
        neg = fsum(1.0 / pf[ap < 0])
        full_sq = fsum(ap**2 / pf)
        out.append(
            MomentChainPoint(
                x=x,
                L=L,
                sq_sum=sq,
                abs_sum=ab,
                neg_recip_sum=neg,
                diff_sq=sq - (1.0 - 2.0 / 6.0) * L,
                diff_abs=ab - (2.0 / 3.0) / root6 * L,
                diff_neg=neg - L / 216.0,
                hypothesis_ok=full_sq >= 0.3 * L,
            )
        )
    return out


@dataclass
class WirsingReport:
    tau_w: float
    x_checkpoints: list
    ratios: list             # lhs / asymptotic main term
    tau_w_empirical: list    # sum lambda(p) log p / p divided by log x
    twisted_ratio: Optional[list] = None
    twisted_product: Optional[float] = None


def run_wirsing_check(
    spec: MultSpec,
    tau_w: float,
    checkpoints: Sequence[int] = DEFAULT_CHECKPOINTS,
    table: Optional[SieveTable] = None,
) -> WirsingReport:
    """Mean value of a nonnegative multiplicative lambda against the
    asymptotic main term

        e^{-kappa tau_w} / Gamma(tau_w) * x/log x * prod_{p<=x} (1 + lambda(p)/p + ...),

    kappa Euler's constant.  tau_w is the declared logarithmic density of
    lambda on primes; the empirical value is measured and reported."""
    checkpoints = sorted(int(c) for c in checkpoints)
    x_max = checkpoints[-1]
    if table is None:
        table = sieve_values(spec, x_max)
    if table.limit < x_max:
        raise ValueError(f"table limit {table.limit} below checkpoint {x_max}")
    vals = table.as_float_array()
    if np.any(vals[1:] < 0):
        raise ValueError("lambda must be nonnegative")
    ps = primes_mod.get_prime_set(x_max)
    ratios = []
    emp = []
    for x in checkpoints:
        prs = ps.primes_upto(x)
        pf = prs.astype(np.float64)
        lam_p = vals[prs]
        tw_emp = fsum(lam_p * np.log(pf) / pf) / math.log(x)
        emp.append(tw_emp)
        if tw_emp <= 0:
            raise ValueError(f"empirical prime log-density is {tw_emp} <= 0 at x={x}")
        lhs = fsum(vals[1 : x + 1])
        prod = 1.0
        for p in prs:
            p = int(p)
            s = 1.0
            q = p
            while q <= table.limit:
                s += float(vals[q]) / q
                q *= p
            prod *= s
        main = math.exp(-EULER_CONSTANT * tau_w) / math.gamma(tau_w) * x / math.log(x) * prod
        ratios.append(lhs / main)
    return WirsingReport(tau_w=tau_w, x_checkpoints=checkpoints, ratios=ratios, tau_w_empirical=emp)


def run_wirsing_twisted(
    spec: MultSpec,
    chi: DirichletCharacter,
    tau_w: float,
    checkpoints: Sequence[int] = DEFAULT_CHECKPOINTS,
) -> WirsingReport:
    """Ratio test: sum g(n) / sum lambda(n) for g = chi-twisted lambda
    against the truncated Euler-product ratio (converges properly or
    improperly to zero)."""
    from .characters import twist

    rep = run_wirsing_check(spec, tau_w, checkpoints)
    x_max = rep.x_checkpoints[-1]
    table = sieve_values(spec, x_max)
    twisted = twist(table, chi)
    tv = twisted.as_float_array()
    lv = table.as_float_array()
    ratios = []
    for x in rep.x_checkpoints:
        num = fsum(np.real(tv[1 : x + 1]))
        den = fsum(lv[1 : x + 1])
        ratios.append(num / den if den else float("nan"))
    rep.twisted_ratio = ratios
    rep.twisted_product = _psi_product(table, chi, min(10**4, x_max))
    return rep


@dataclass
class DSweepRow:
    D: int
    max_gamma_error: float      # max_a |gamma_hat(a) phi(D) - 1|
    envelope: float             # (log D / log x)^{1/49}
    min_class_population: int
    small_sample: bool


def run_d_sweep(
    g: SieveTable,
    D_list: Sequence[int],
    x: int,
    workers: int = 1,
) -> list[DSweepRow]:
    """Uniformity-in-D sweep of progression densities at a single x; the
    error is compared against the asymptotic envelope shape (monitoring
    only, the exponent is far beyond desk resolution)."""
    if x > g.limit:
        raise ValueError(f"x={x} exceeds table limit {g.limit}")
    vals = g.as_float_array()
    lx = math.log(x)

    def one(D: int) -> DSweepRow:
        residues = _coprime_residues(D)
        sums = _residue_sums(vals, x, D)
        S = float(fsum(sums[a] for a in residues))
        phi = euler_phi(D)
        if S == 0:
            err = float("nan")
        else:
            err = max(abs(float(sums[a]) / S * phi - 1.0) for a in residues)
        pops = np.bincount(np.arange(1, x + 1, dtype=np.int64) % D, minlength=D)
        min_pop = int(min(pops[a] for a in residues))
        env = (math.log(D) / lx) ** (1.0 / 49.0) if D > 1 else 0.0
        return DSweepRow(
            D=D,
            max_gamma_error=err if D > 1 else 0.0,
            envelope=env,
            min_class_population=min_pop,
            small_sample=min_pop < 100,
        )

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(one, D_list))
    return [one(D) for D in D_list]

"""Adversarial multiplicative function with slowly growing distance.

A sequence b_1 = 3/2, b_{n+1} = b_n (1 + 1/log b_n) cuts the primes into
short intervals.  Inside each interval (b_n, b_{n+1}] the first
y_n = floor(b_n (beta(b_{n+1}) - beta(b_n))) primes get the value -1, the
next ones +1 up to a fraction c of the interval's primes, the rest 0, where
beta(y) = (log log log y)^{1/2}.  The -1 block is tuned so that
sum (|g|-g)/p grows like 2 beta(x) while sum |g(p)| log p keeps pace with
c x: the distance functional grows, but only triple-log slowly.

At desk scale beta(x) < 1.3 for every feasible x, so the diagnostics here
are trend and shape checks, not limit verifications.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import primes as primes_mod
from .halasz import LambdaReport, minimize_lambda
from .multiplicative import MultSpec, ZERO_BEYOND_FIRST
from .util import fsum

log = logging.getLogger(__name__)

# beta needs log log log y > 0
BETA_DOMAIN_MIN = math.exp(math.e**2)


@dataclass
class BnSequence:
    """b[1..count], strictly increasing, b[1] = 3/2 (index 0 unused)."""

    b: np.ndarray
    count: int

    def value(self, n: int) -> float:
        return float(self.b[n])


def generate_bn(count: int) -> BnSequence:
    """The recurrence b_{n+1} = b_n (1 + 1/log b_n) in double precision."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    b = np.zeros(count + 1, dtype=np.float64)
    b[1] = 1.5
    for n in range(1, count):
        b[n + 1] = b[n] * (1.0 + 1.0 / math.log(b[n]))
    return BnSequence(b=b, count=count)


def generate_bn_past(bound: float) -> BnSequence:
    """Extend the sequence until it exceeds ``bound``."""
    vals = [0.0, 1.5]
    while vals[-1] <= bound:
        x = vals[-1]
        vals.append(x * (1.0 + 1.0 / math.log(x)))
    return BnSequence(b=np.array(vals), count=len(vals) - 1)


def beta_fn(y: float) -> float:
    """(log log log y)^{1/2}, defined for y >= exp(e^2)."""
    if y < BETA_DOMAIN_MIN:
        raise ValueError(f"beta is undefined below exp(e^2) ~ {BETA_DOMAIN_MIN:.2f}, got {y}")
    return math.sqrt(math.log(math.log(math.log(y))))


@dataclass
class IntervalAssignment:
    n: int              # interval index: primes in (b_n, b_{n+1}]
    b_lo: float
    b_hi: float
    y: int              # size of the -1 block before truncation
    cap: int            # floor(c * interval prime count)
    prime_count: int
    neg_count: int
    pos_count: int
    truncated: bool


@dataclass
class IntervalSignFunction:
    """The constructed prime assignment: -1 / +1 on interval primes, 0 off
    the assigned blocks and below the beta domain."""

    c: float
    x_max: float
    intervals: list
    primes: np.ndarray        # all assigned primes (value != 0), ascending
    values: np.ndarray        # int8, parallel to primes
    first_active_b: float     # b_n of the first assigned interval
    truncation_events: list = field(default_factory=list)

    def prime_values(self) -> dict:
        return {int(p): int(v) for p, v in zip(self.primes, self.values)}

    def value_at_prime(self, p: int) -> int:
        i = int(np.searchsorted(self.primes, p))
        if i < len(self.primes) and self.primes[i] == p:
            return int(self.values[i])
        return 0

    def to_mult_spec(self) -> MultSpec:
        pv = self.prime_values()
        return MultSpec(
            prime_rule=lambda p: pv.get(p, 0),  # zero off the assigned blocks
            completion=ZERO_BEYOND_FIRST,
            exact=True,
            spec_id=f"interval_signs(c={self.c})",
        )

    def export_prime_csv(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write("p,value\n")
            for p, v in zip(self.primes, self.values):
                fh.write(f"{int(p)},{int(v)}\n")


def build_interval_signs(c: float, x_max: float) -> IntervalSignFunction:
    """Assign -1/+1/0 on the primes of every interval (b_n, b_{n+1}]
    contained in [exp(e^2), x_max].

    Intervals below the beta domain are left at 0 (the construction is a
    tail statement; the head merely has to be defined).  If y_n exceeds the
    cap floor(c * interval prime count), the -1 block is truncated at the
    cap and the event is recorded.
    """
    if not (0.0 < c < 1.0):
        raise ValueError(f"c must be in (0,1), got {c}")
    seq = generate_bn_past(x_max)
    first_active = None
    for n in range(1, seq.count):
        if seq.b[n] >= BETA_DOMAIN_MIN and seq.b[n + 1] <= x_max:
            first_active = n
            break
    if first_active is None:
        raise ValueError(f"x_max={x_max} is below the first usable interval")
    ps = primes_mod.get_prime_set(int(math.floor(x_max)))
    all_primes = ps.primes

    intervals = []
    prime_chunks = []
    value_chunks = []
    truncations = []
    for n in range(first_active, seq.count):
        b_lo, b_hi = float(seq.b[n]), float(seq.b[n + 1])
        if b_hi > x_max:
            break
        lo = int(np.searchsorted(all_primes, math.floor(b_lo), side="right"))
        hi = int(np.searchsorted(all_primes, math.floor(b_hi), side="right"))
        qs = all_primes[lo:hi]
        m = len(qs)
        y = int(math.floor(b_lo * (beta_fn(b_hi) - beta_fn(b_lo))))
        cap = int(math.floor(c * m))
        neg = min(y, cap)
        truncated = y > cap
        if truncated:
            truncations.append(n)
            log.debug("interval %d: y=%d exceeds cap=%d, -1 block truncated", n, y, cap)
        pos = cap - neg
        vals = np.zeros(m, dtype=np.int8)
        vals[:neg] = -1
        vals[neg : neg + pos] = 1
        intervals.append(
            IntervalAssignment(
                n=n,
                b_lo=b_lo,
                b_hi=b_hi,
                y=y,
                cap=cap,
                prime_count=m,
                neg_count=neg,
                pos_count=pos,
                truncated=truncated,
            )
        )
        keep = vals != 0
        prime_chunks.append(qs[keep])
        value_chunks.append(vals[keep])

    primes = np.concatenate(prime_chunks) if prime_chunks else np.empty(0, np.int64)
    values = np.concatenate(value_chunks) if value_chunks else np.empty(0, np.int8)
    return IntervalSignFunction(
        c=c,
        x_max=x_max,
        intervals=intervals,
        primes=primes,
        values=values,
        first_active_b=float(seq.b[first_active]),
        truncation_events=truncations,
    )


@dataclass
class BracketResult:
    n: int
    y: int
    lower: float
    upper: float
    holds: bool


def verify_bracketing(seq: BnSequence, n: int) -> BracketResult:
    """Check b_n (2 log b_n)^{-4} <= y_n <= b_n (log b_n)^{-2}.

    Asserted only for sufficiently large n; callers report the first index
    from which it holds rather than assuming it everywhere.
    """
    if not (1 <= n < seq.count):
        raise ValueError(f"need 1 <= n < {seq.count} (b_(n+1) must exist), got {n}")
    b_lo = float(seq.b[n])
    if b_lo < BETA_DOMAIN_MIN:
        raise ValueError(f"b_{n}={b_lo} is below the beta domain")
    b_hi = float(seq.b[n + 1])
    y = int(math.floor(b_lo * (beta_fn(b_hi) - beta_fn(b_lo))))
    lb = b_lo * (2.0 * math.log(b_lo)) ** (-4)
    ub = b_lo * math.log(b_lo) ** (-2)
    return BracketResult(n=n, y=y, lower=lb, upper=ub, holds=lb <= y <= ub)


def first_holding_index(seq: BnSequence) -> Optional[int]:
    """First active index from which the bracketing holds through the whole
    generated range (None if it never stabilizes)."""
    first = None
    for n in range(1, seq.count):
        if float(seq.b[n]) < BETA_DOMAIN_MIN:
            continue
        if verify_bracketing(seq, n).holds:
            if first is None:
                first = n
        else:
            first = None
    return first


@dataclass
class GrowthDiagnostic:
    x: float
    c: float
    beta_x: float
    one_sided_sum: float        # sum (|g|-g)/p over p <= x
    ratio_vs_2beta: float
    telescoped_target: float    # 2 (beta(x) - beta(first active b))
    ratio_vs_telescoped: float
    lambda_report: LambdaReport
    lambda_ratio_vs_2beta: float
    chebyshev_ratio: float      # sum |g(p)| log p / x

    @property
    def summary(self) -> dict:
        return {
            "x": self.x,
            "ratio_vs_2beta": self.ratio_vs_2beta,
            "ratio_vs_telescoped": self.ratio_vs_telescoped,
            "lambda_ratio_vs_2beta": self.lambda_ratio_vs_2beta,
            "chebyshev_ratio": self.chebyshev_ratio,
        }


def lambda_growth_diagnostic(
    f: IntervalSignFunction, x: float, T: float = 10.0, grid_step: Optional[float] = None
) -> GrowthDiagnostic:
    """Measure the slow growth of the distance functional for the
    constructed g: the one-sided sum against 2 beta(x), the minimized lambda
    against 2 beta(x), and the Chebyshev slope against c.

    The triple log barely moves at feasible x, so the 2 beta(x) comparison
    carries a large head correction; the telescoped target
    2 (beta(x) - beta(b_first)) is reported alongside as the desk-scale
    shape check.
    """
    if x > f.x_max:
        raise ValueError(f"x={x} exceeds construction range {f.x_max}")
    mask = f.primes <= math.floor(x)
    prs = f.primes[mask].astype(np.float64)
    vals = f.values[mask].astype(np.float64)
    one_sided = fsum((np.abs(vals) - vals) / prs) if len(prs) else 0.0
    beta_x = beta_fn(x)
    telescoped = 2.0 * (beta_x - beta_fn(f.first_active_b))
    gmap = f.prime_values()
    rep = minimize_lambda(gmap, 1.5, x, T, grid_step=grid_step)
    cheb = fsum(np.abs(vals) * np.log(prs)) / x if len(prs) else 0.0
    return GrowthDiagnostic(
        x=x,
        c=f.c,
        beta_x=beta_x,
        one_sided_sum=one_sided,
        ratio_vs_2beta=one_sided / (2.0 * beta_x),
        telescoped_target=telescoped,
        ratio_vs_telescoped=one_sided / telescoped if telescoped > 0 else float("inf"),
        lambda_report=rep,
        lambda_ratio_vs_2beta=rep.lam / (2.0 * beta_x),
        chebyshev_ratio=cheb,
    )

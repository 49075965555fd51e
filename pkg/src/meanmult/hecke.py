"""Exact Hecke-eigenvalue tables.

The cusp-form discriminant coefficients come from the eta product
x * prod (1-x^j)^24, expanded in exact big-integer arithmetic.  General
tables extend prime values through the three-term recurrence

    a(p^(j+1)) = a(p) a(p^j) - m a(p^(j-1)),

m = p^(k-1) for integral weight k, m = 1 for normalized coefficients, and
multiplicatively to composites.  External coefficient files are ingested
with their declared normalization verified, never guessed.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

import numpy as np

from . import primes as primes_mod
from .multiplicative import SieveTable, _decomposition
from .powerseries import eta_power_24
from .util import fsum

Weight = Union[int, str]


@dataclass
class CoeffTable:
    """Exact coefficients a_1..a_limit of a Hecke eigenform, a_1 = 1.

    Values are Python ints (or Fractions for ingested data); index 0 is
    unused.  ``weight`` is the integral weight k or "normalized".
    """

    limit: int
    a: list
    weight: Weight
    source: str
    source_path: str | None = None
    source_sha256: str | None = None

    def value(self, n: int):
        return self.a[n]


@dataclass
class NormalizedCoeffs:
    """a_n / n^((k-1)/2) in double precision (identity for normalized input)."""

    limit: int
    ahat: np.ndarray  # float64, index 0 unused
    weight: Weight
    source: str


def _check_weight(weight: Weight) -> None:
    if weight == "normalized":
        return
    if isinstance(weight, int) and weight > 0 and weight % 2 == 0:
        return
    raise ValueError(f"weight must be a positive even integer or 'normalized', got {weight!r}")


def eta24_expand(limit: int) -> CoeffTable:
    """Exact coefficients of x * prod_{j>=1} (1-x^j)^24 through degree limit.

    The eta power is built from the sparse pentagonal series by exact
    squarings (24 = 16 + 8); the leading x shifts indices up by one.
    Arithmetic is arbitrary-precision throughout, so no overflow is
    possible.
    """
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")
    e24 = eta_power_24(limit - 1)
    a = [0] * (limit + 1)
    for n in range(1, limit + 1):
        a[n] = int(e24[n - 1])
    if a[1] != 1:
        raise ArithmeticError("leading coefficient must be 1")
    return CoeffTable(limit=limit, a=a, weight=12, source="eta24")


def hecke_extend(
    prime_values: Mapping[int, Union[int, Fraction]],
    weight: Weight,
    limit: int,
) -> CoeffTable:
    """Extend prime coefficients to a full table via the Hecke recurrence
    at prime powers and multiplicativity at composites."""
    _check_weight(weight)
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")
    ppow, rest, pexp = _decomposition(limit)
    ps = primes_mod.get_prime_set(max(limit, 2))
    spf_l = ps.spf[: limit + 1].tolist()
    ppow_l = ppow.tolist()
    rest_l = rest.tolist()
    pexp_l = pexp.tolist()
    a: list = [0] * (limit + 1)
    a[1] = 1
    ppval: dict = {}
    for n in range(2, limit + 1):
        q = ppow_l[n]
        val = ppval.get(q)
        if val is None:
            p = spf_l[n]
            k = pexp_l[n]
            try:
                ap = prime_values[p]
            except KeyError:
                raise ValueError(f"no coefficient given for prime {p}") from None
            m = 1 if weight == "normalized" else p ** (weight - 1)
            prev2, prev1 = 1, ap
            for _ in range(2, k + 1):
                prev2, prev1 = prev1, ap * prev1 - m * prev2
            val = prev1
            ppval[q] = val
        a[n] = a[rest_l[n]] * val
    return CoeffTable(limit=limit, a=a, weight=weight, source="hecke_extend")


def prime_coefficients(t: CoeffTable) -> dict:
    ps = primes_mod.get_prime_set(max(t.limit, 2))
    return {int(p): t.a[int(p)] for p in ps.primes_upto(t.limit)}


def normalize(t: CoeffTable) -> NormalizedCoeffs:
    """a_n -> a_n / n^((k-1)/2) as float64.

    Exact integers convert to the nearest double first, then divide; for
    "normalized" sources this is the identity embedding into float.
    """
    if t.weight == "normalized":
        ahat = np.zeros(t.limit + 1, dtype=np.float64)
        for n in range(1, t.limit + 1):
            ahat[n] = float(t.a[n])
        return NormalizedCoeffs(limit=t.limit, ahat=ahat, weight=t.weight, source=t.source)
    k = t.weight
    vals = np.zeros(t.limit + 1, dtype=np.float64)
    vals[1:] = np.array(t.a[1:], dtype=np.float64)
    n = np.arange(t.limit + 1, dtype=np.float64)
    n[0] = 1.0
    ahat = vals / n ** ((k - 1) / 2.0)
    ahat[0] = 0.0
    return NormalizedCoeffs(limit=t.limit, ahat=ahat, weight=t.weight, source=t.source)


def _sign(v) -> int:
    if v > 0:
        return 1
    if v < 0:
        return -1
    return 0


def sign_function(t: CoeffTable) -> SieveTable:
    """Multiplicative sign function: sign(a) at prime powers, extended
    multiplicatively.  Verified against sign(a_n) entrywise before return."""
    limit = t.limit
    ppow, rest, pexp = _decomposition(limit)
    ppow_l = ppow.tolist()
    rest_l = rest.tolist()
    sl = [0] * (limit + 1)
    sl[1] = 1
    for n in range(2, limit + 1):
        sl[n] = sl[rest_l[n]] * _sign(t.a[ppow_l[n]])
    for n in range(1, limit + 1):
        if sl[n] != _sign(t.a[n]):
            raise ValueError(
                f"sign is not multiplicative at n={n}: table value {t.a[n]} vs extension {sl[n]}"
            )
    return SieveTable(limit=limit, values=np.array(sl, dtype=np.int8), spec_id=f"sign({t.source})", exact=True)


def nonvanish_indicator(t: CoeffTable) -> SieveTable:
    """Indicator of a_n != 0 (multiplicative since a is)."""
    limit = t.limit
    ind = np.zeros(limit + 1, dtype=np.int8)
    for n in range(1, limit + 1):
        if t.a[n] != 0:
            ind[n] = 1
    return SieveTable(limit=limit, values=ind, spec_id=f"nonzero({t.source})", exact=True)


def save_coeff_table(t: CoeffTable, path: str) -> None:
    """Coefficient CSV: header "n,a_n", rows in increasing n, exact decimal
    integers (or rationals "p/q")."""
    with open(path, "w") as fh:
        fh.write("n,a_n\n")
        for n in range(1, t.limit + 1):
            fh.write(f"{n},{t.a[n]}\n")


def load_coeff_table(path: str, declared_kind: Weight, mult_check_pairs: int = 1000) -> CoeffTable:
    """Ingest a coefficient CSV with its declared normalization.

    Rejects: malformed rows (with line number), a_1 != 1, gaps, failures of
    multiplicativity on random coprime pairs (naming the pair), and
    prime-power values violating the declared Hecke recurrence.
    """
    _check_weight(declared_kind)
    h = hashlib.sha256()
    rows = []
    with open(path, "rb") as fh:
        raw = fh.read()
    h.update(raw)
    lines = raw.decode("utf-8").splitlines()
    if not lines or lines[0].strip() != "n,a_n":
        raise ValueError(f"{path}: line 1: expected header 'n,a_n'")
    for lineno, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ValueError(f"{path}: line {lineno}: expected 'n,a_n'")
        try:
            n = int(parts[0])
            v = Fraction(parts[1]) if "/" in parts[1] else int(parts[1])
        except ValueError:
            raise ValueError(f"{path}: line {lineno}: cannot parse {line!r}") from None
        rows.append((n, v, lineno))
    if not rows:
        raise ValueError(f"{path}: no coefficient rows")
    limit = rows[-1][0]
    a: list = [0] * (limit + 1)
    expected = 1
    for n, v, lineno in rows:
        if n != expected:
            raise ValueError(f"{path}: line {lineno}: expected n={expected}, got n={n} (gaps forbidden)")
        a[n] = v
        expected += 1
    if a[1] != 1:
        raise ValueError(f"{path}: a_1 must equal 1, got {a[1]}")

    # multiplicativity on random coprime pairs (deterministic seed)
    import random

    rng = random.Random(0xC0FFEE)
    checked = 0
    attempts = 0
    while checked < mult_check_pairs and attempts < 50 * mult_check_pairs and limit >= 6:
        attempts += 1
        m = rng.randint(2, limit // 2)
        n = rng.randint(2, limit // m)
        if math.gcd(m, n) != 1:
            continue
        if a[m * n] != a[m] * a[n]:
            raise ValueError(
                f"{path}: multiplicativity fails at coprime pair ({m},{n}): "
                f"a_{m * n} != a_{m} * a_{n}"
            )
        checked += 1

    # declared recurrence at prime powers
    ps = primes_mod.get_prime_set(max(limit, 2))
    for p in ps.primes_upto(math.isqrt(limit)):
        p = int(p)
        m = 1 if declared_kind == "normalized" else p ** (declared_kind - 1)
        q = p * p
        j = 2
        while q <= limit:
            expect = a[p] * a[q // p] - m * a[q // (p * p)]
            if a[q] != expect:
                raise ValueError(
                    f"{path}: declared recurrence fails at {p}^{j}: got {a[q]}, expected {expect}"
                )
            q *= p
            j += 1

    return CoeffTable(
        limit=limit,
        a=a,
        weight=declared_kind,
        source="external",
        source_path=path,
        source_sha256=h.hexdigest(),
    )


def moment_sum(nc: NormalizedCoeffs, x: float, power: int, weighting: str) -> float:
    """sum over primes p <= x of |ahat_p|^power * weight(p), with weight one
    of "logp", "1/p", "1"."""
    if power not in (1, 2, 4):
        raise ValueError(f"power must be 1, 2 or 4, got {power}")
    if weighting not in ("logp", "1/p", "1"):
        raise ValueError(f"weighting must be 'logp', '1/p' or '1', got {weighting!r}")
    if x > nc.limit:
        raise ValueError(f"x={x} exceeds coefficient limit {nc.limit}")
    ps = primes_mod.get_prime_set(max(nc.limit, 2))
    prs = ps.primes_upto(x)
    av = np.abs(nc.ahat[prs]) ** power
    pf = prs.astype(np.float64)
    if weighting == "logp":
        w = np.log(pf)
    elif weighting == "1/p":
        w = 1.0 / pf
    else:
        w = np.ones_like(pf)
    return fsum(av * w)


def sigma_power_mod(n_max: int, power: int, modulus: int) -> np.ndarray:
    """sigma_power(n) mod modulus via a plain divisor sieve (independent of
    every eigenvalue code path; used as a congruence oracle)."""
    s = np.zeros(n_max + 1, dtype=np.int64)
    for d in range(1, n_max + 1):
        s[d::d] += pow(d, power, modulus)
    return s % modulus

"""Multiplicative functions: prime-power rules, sieving, convolution, partial sums,
and the unconditional mean-value inequalities.

A MultSpec pins down a multiplicative function by its prime values plus a
completion law for higher prime powers.  Sieving produces a dense value
table driven by the smallest-prime-factor decomposition, O(limit)
multiplications.  Exact tables hold Python ints / Fractions; float tables
are numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional, Union

import numpy as np

from . import primes as primes_mod
from .util import fsum, kahan_sum

Number = Union[int, float, complex, Fraction]

ZERO_BEYOND_FIRST = "zero_beyond_first_power"
COMPLETELY_MULTIPLICATIVE = "completely_multiplicative"
EXPONENTIAL = "exponential"
HECKE = "hecke_recurrence"
EXPLICIT = "explicit_table"

_COMPLETIONS = (ZERO_BEYOND_FIRST, COMPLETELY_MULTIPLICATIVE, EXPONENTIAL, HECKE, EXPLICIT)


class SpecError(ValueError):
    """A multiplicative-function rule is incomplete or inconsistent."""


@dataclass
class MultSpec:
    """Rule defining a multiplicative function on prime powers.

    prime_rule maps primes to values (a dict or a callable); the completion
    law extends to higher powers.  For HECKE the ``weight`` is a positive
    even integer (second recurrence term p^(k-1)) or "normalized" (term 1).
    For EXPLICIT the ``table`` maps prime powers p^k directly to values.
    The exact/float mode is fixed at creation.
    """

    prime_rule: Union[Mapping[int, Number], Callable[[int], Number], None] = None
    completion: str = ZERO_BEYOND_FIRST
    weight: Union[int, str, None] = None
    table: Optional[Mapping[int, Number]] = None
    exact: bool = False
    spec_id: str = ""
    _pp_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.completion not in _COMPLETIONS:
            raise SpecError(f"unknown completion {self.completion!r}")
        if self.completion == HECKE:
            if self.weight == "normalized":
                pass
            elif isinstance(self.weight, int) and self.weight > 0 and self.weight % 2 == 0:
                pass
            else:
                raise SpecError(
                    f"hecke completion needs a positive even weight or 'normalized', got {self.weight!r}"
                )
        if self.completion == EXPLICIT and self.table is None:
            raise SpecError("explicit_table completion needs a table")

    def value_at_prime(self, p: int) -> Number:
        if self.completion == EXPLICIT:
            return self.value_at(p, 1)
        rule = self.prime_rule
        if rule is None:
            raise SpecError("spec has no prime rule")
        if callable(rule):
            return rule(p)
        try:
            return rule[p]
        except KeyError:
            raise SpecError(f"no value for prime {p}") from None

    def value_at(self, p: int, k: int) -> Number:
        """Value at the prime power p^k (k >= 1)."""
        key = (p, k)
        cached = self._pp_cache.get(key)
        if cached is not None:
            return cached
        if self.completion == EXPLICIT:
            q = p**k
            try:
                v = self.table[q]
            except KeyError:
                raise SpecError(f"no value for prime power {q} = {p}^{k}") from None
        elif self.completion == ZERO_BEYOND_FIRST:
            v = self.value_at_prime(p) if k == 1 else 0
        elif self.completion == COMPLETELY_MULTIPLICATIVE:
            v = self.value_at_prime(p) ** k
        elif self.completion == EXPONENTIAL:
            gp = self.value_at_prime(p)
            if self.exact and isinstance(gp, (int, Fraction)):
                v = Fraction(gp) ** k / math.factorial(k)
            else:
                v = gp**k / math.factorial(k)
        else:  # HECKE three-term recurrence at prime powers
            gp = self.value_at_prime(p)
            m = 1 if self.weight == "normalized" else p ** (self.weight - 1)
            prev2, prev1 = 1, gp
            for _ in range(2, k + 1):
                prev2, prev1 = prev1, gp * prev1 - m * prev2
            v = prev1
        self._pp_cache[key] = v
        return v


@dataclass
class SieveTable:
    """Dense values v[1..limit] of a multiplicative function.

    ``values`` is indexed by n directly (entry 0 unused).  Exact tables are
    Python lists of ints/Fractions, or integer numpy arrays when the values
    are known small; float tables are float64/complex128 arrays.
    """

    limit: int
    values: Union[list, np.ndarray]
    spec_id: str = ""
    exact: bool = False

    def value(self, n: int) -> Number:
        return self.values[n]

    def as_float_array(self) -> np.ndarray:
        if isinstance(self.values, np.ndarray) and self.values.dtype in (
            np.float64,
            np.complex128,
        ):
            return self.values
        return np.array([float(v) for v in self.values], dtype=np.float64)


# Decomposition arrays shared by every sieve run at a given limit:
# ppow[n] = p^k where p = spf(n) and p^k || n; rest[n] = n / ppow[n];
# pexp[n] = k.  Cached for the largest limit seen.
_DECOMP: dict = {"limit": 0, "ppow": None, "rest": None, "pexp": None}


def _decomposition(limit: int):
    if _DECOMP["limit"] >= limit:
        d = _DECOMP
        return d["ppow"], d["rest"], d["pexp"]
    ps = primes_mod.get_prime_set(max(limit, 2))
    ppow_l = [0] * (limit + 1)
    rest_l = [0] * (limit + 1)
    pexp_l = [0] * (limit + 1)
    spf_l = ps.spf[: limit + 1].tolist()
    for n in range(2, limit + 1):
        p = spf_l[n]
        m = n // p
        if m >= p and spf_l[m] == p:
            ppow_l[n] = ppow_l[m] * p
            rest_l[n] = rest_l[m]
            pexp_l[n] = pexp_l[m] + 1
        else:
            ppow_l[n] = p
            rest_l[n] = m
            pexp_l[n] = 1
    ppow = np.array(ppow_l, dtype=np.int64)
    rest = np.array(rest_l, dtype=np.int64)
    pexp = np.array(pexp_l, dtype=np.uint8)
    _DECOMP.update({"limit": limit, "ppow": ppow, "rest": rest, "pexp": pexp})
    return ppow, rest, pexp


def sieve_values(spec: MultSpec, limit: int) -> SieveTable:
    """Dense table of the multiplicative function defined by ``spec``.

    v[n] is the product of spec values over the prime powers exactly
    dividing n, assembled from the least-factor decomposition.
    """
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")
    ppow, rest, pexp = _decomposition(limit)
    ppow_l = ppow.tolist()
    rest_l = rest.tolist()
    pexp_l = pexp.tolist()
    one: Number = 1 if spec.exact else 1.0
    v = [0] * (limit + 1)
    v[1] = one
    ppval: dict = {}
    ps = primes_mod.get_prime_set(max(limit, 2))
    spf_l = ps.spf[: limit + 1].tolist()
    for n in range(2, limit + 1):
        q = ppow_l[n]
        val = ppval.get(q)
        if val is None:
            val = spec.value_at(spf_l[n], pexp_l[n])
            if not spec.exact:
                val = complex(val) if isinstance(val, complex) else float(val)
            ppval[q] = val
        v[n] = v[rest_l[n]] * val
    if spec.exact:
        values: Union[list, np.ndarray] = v
    else:
        if any(isinstance(x, complex) for x in ppval.values()):
            values = np.array(v, dtype=np.complex128)
        else:
            values = np.array(v, dtype=np.float64)
    return SieveTable(limit=limit, values=values, spec_id=spec.spec_id, exact=spec.exact)


def naive_value(spec: MultSpec, n: int) -> Number:
    """Direct factorization evaluation (independent oracle for the sieve)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out: Number = 1 if spec.exact else 1.0
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            k = 0
            while m % p == 0:
                m //= p
                k += 1
            out = out * spec.value_at(p, k)
        p += 1
    if m > 1:
        out = out * spec.value_at(m, 1)
    return out


def dirichlet_convolve(f: SieveTable, g: SieveTable) -> SieveTable:
    """(f*g)[n] = sum over d|n of f[d] g[n/d], by the divisor double loop."""
    if f.limit != g.limit:
        raise ValueError(f"limit mismatch: {f.limit} != {g.limit}")
    L = f.limit
    exact = f.exact and g.exact
    if exact:
        out = [0] * (L + 1)
        for d in range(1, L + 1):
            fd = f.values[d]
            if fd == 0:
                continue
            for m in range(d, L + 1, d):
                out[m] += fd * g.values[m // d]
        out[0] = 0
        return SieveTable(L, out, spec_id=f"({f.spec_id})*({g.spec_id})", exact=True)
    fa = f.as_float_array()
    ga = g.as_float_array()
    out_a = np.zeros(L + 1, dtype=np.result_type(fa.dtype, ga.dtype))
    for d in range(1, L + 1):
        fd = fa[d]
        if fd == 0:
            continue
        out_a[d::d] += fd * ga[1 : L // d + 1]
    return SieveTable(L, out_a, spec_id=f"({f.spec_id})*({g.spec_id})", exact=False)


def identity_table(limit: int, exact: bool = True) -> SieveTable:
    """Unit of Dirichlet convolution: [1, 0, 0, ...]."""
    if exact:
        v = [0] * (limit + 1)
        v[1] = 1
        return SieveTable(limit, v, spec_id="epsilon", exact=True)
    v = np.zeros(limit + 1)
    v[1] = 1.0
    return SieveTable(limit, v, spec_id="epsilon", exact=False)


def mean_sum(t: SieveTable, x: float):
    """M(x): sum of v[n] for n <= x."""
    if x > t.limit:
        raise ValueError(f"x={x} exceeds table limit {t.limit}")
    m = math.floor(x)
    if m < 1:
        return 0 if t.exact else 0.0
    if isinstance(t.values, np.ndarray):
        if t.values.dtype == np.complex128:
            return complex(np.add.reduce(t.values[1 : m + 1]))
        if t.values.dtype == np.float64:
            return float(fsum(t.values[1 : m + 1]))
    return sum(t.values[1 : m + 1])


def log_weighted_sum(t: SieveTable, x: float) -> float:
    """N(x): sum of v[n] log n for n <= x, in double precision."""
    if x > t.limit:
        raise ValueError(f"x={x} exceeds table limit {t.limit}")
    m = math.floor(x)
    if m < 2:
        return 0.0
    if isinstance(t.values, np.ndarray) and t.values.dtype == np.complex128:
        logs = np.log(np.arange(1, m + 1, dtype=np.float64))
        return complex(np.add.reduce(t.values[1 : m + 1] * logs))
    vals = t.as_float_array()
    logs = np.log(np.arange(1, m + 1, dtype=np.float64))
    return fsum(vals[1 : m + 1] * logs)


def partial_summation_residual(t: SieveTable, u: float) -> float:
    """Residual of the partial-summation identity linking M and N:

        M(u) - v[1] - N(u)/log u - int_2^u N(w) / (w log^2 w) dw.

    N is constant between integers, so the integral is evaluated exactly
    piecewise using d(-1/log w) = dw/(w log^2 w).  The v[1] correction makes
    the identity exact (the plain sum starts at n=2).  All three pieces are
    computed independently and subtracted.
    """
    if u < 2:
        raise ValueError(f"u must be >= 2, got {u}")
    if u > t.limit:
        raise ValueError(f"u={u} exceeds table limit {t.limit}")
    m = math.floor(u)
    vals = t.as_float_array()
    M_u = fsum(vals[1 : m + 1])
    logs = np.log(np.arange(1, m + 1, dtype=np.float64))
    terms = vals[1 : m + 1] * logs
    N_u = fsum(terms)
    # exact piecewise integral: N constant on [n, n+1)
    inv_log = 1.0 / logs[1:]  # 1/log n for n = 2..m
    running = np.cumsum(np.array(terms[1:], dtype=np.longdouble))  # N(n), n = 2..m
    pieces = []
    if m >= 3:
        pieces.append(running[:-1] * (inv_log[:-1] - inv_log[1:]))
    if u > m:
        pieces.append(running[-1:] * (inv_log[-1:] - 1.0 / math.log(u)))
    integral = float(sum(kahan_sum(p) for p in pieces)) if pieces else 0.0
    log_u = math.log(u) if u > m else logs[-1]
    return M_u - float(vals[1]) - N_u / float(log_u) - integral


@dataclass
class MeanBoundResult:
    lhs: float
    rhs: float
    delta: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs


def mean_bound_evaluate(t: SieveTable, x: float) -> MeanBoundResult:
    """Unconditional upper bound for sums of nonnegative multiplicative g:

        sum_{2<=n<=x} g(n)  <=  (x/log x + 10 x/log^2 x) * Delta * sum_{n<=x} g(n)/n

    with Delta the running supremum of y^{-1} sum_{q<=y} g(q) log q over
    prime powers.  Returns both sides and Delta; the inequality must hold
    for every nonnegative table.
    """
    if x < 2:
        raise ValueError(f"x must be >= 2, got {x}")
    if x > t.limit:
        raise ValueError(f"x={x} exceeds table limit {t.limit}")
    vals = t.as_float_array()
    if np.iscomplexobj(vals) or np.any(vals[1:] < 0):
        raise ValueError("table must be real-valued and nonnegative")
    m = math.floor(x)
    lhs = fsum(vals[2 : m + 1])
    ps = primes_mod.get_prime_set(t.limit)
    delta = primes_mod.delta_supremum(ps, x, lambda q: float(vals[q]))
    harmonic = fsum(vals[1 : m + 1] / np.arange(1, m + 1, dtype=np.float64))
    lx = math.log(x)
    rhs = (x / lx + 10.0 * x / lx**2) * delta * harmonic
    return MeanBoundResult(lhs=lhs, rhs=rhs, delta=delta)


def harmonic_product_ratio(t: SieveTable, x: float) -> float:
    """Ratio of sum_{n<=x} g(n)/n to prod_{p<=x} (1 + g(p)/p).

    For bounded nonnegative g with convergent higher-power series the ratio
    stays between positive constants; this reports it for monitoring.
    """
    if x > t.limit:
        raise ValueError(f"x={x} exceeds table limit {t.limit}")
    vals = t.as_float_array()
    m = math.floor(x)
    num = fsum(vals[1 : m + 1] / np.arange(1, m + 1, dtype=np.float64))
    ps = primes_mod.get_prime_set(t.limit)
    prs = ps.primes_upto(x)
    den = float(np.prod(1.0 + vals[prs] / prs.astype(np.float64))) if len(prs) else 1.0
    return num / den


@dataclass
class MeanLowerResult:
    ratio: float
    c_empirical: float


def mean_lower_ratio(t: SieveTable, x: float) -> MeanLowerResult:
    """M(x) / (x * exp(-sum_{p<=x} (1-g(p))/p)), with the empirical Chebyshev
    slope c = x^{-1} sum_{p<=x} g(p) log p reported alongside."""
    if x > t.limit:
        raise ValueError(f"x={x} exceeds table limit {t.limit}")
    vals = t.as_float_array()
    m = math.floor(x)
    M_x = fsum(vals[1 : m + 1])
    ps = primes_mod.get_prime_set(t.limit)
    prs = ps.primes_upto(x)
    pf = prs.astype(np.float64)
    expo = fsum((1.0 - vals[prs]) / pf) if len(prs) else 0.0
    c_emp = fsum(vals[prs] * np.log(pf)) / x if len(prs) else 0.0
    return MeanLowerResult(ratio=M_x / (x * math.exp(-expo)), c_empirical=c_emp)


def save_table_csv(t: SieveTable, path: str) -> None:
    """CSV export: one header line recording spec_id and mode, then n,value
    rows.  Exact integers and rationals in decimal."""
    mode = "exact" if t.exact else "float"
    with open(path, "w") as fh:
        fh.write(f"# spec_id={t.spec_id} mode={mode}\n")
        for n in range(1, t.limit + 1):
            v = t.values[n]
            if not t.exact:
                v = complex(v)
                fh.write(f"{n},{v.real!r}\n" if v.imag == 0 else f"{n},{v!r}\n")
            else:
                fh.write(f"{n},{v}\n")


def load_table_csv(path: str) -> SieveTable:
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("# spec_id="):
            raise ValueError(f"{path}: missing table header")
        body = header[2:]
        spec_id = body[len("spec_id=") : body.rindex(" mode=")]
        mode = body[body.rindex(" mode=") + len(" mode=") :]
        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                n_s, v_s = line.split(",", 1)
                n = int(n_s)
            except ValueError:
                raise ValueError(f"{path}: parse error at line {lineno}") from None
            rows.append((n, v_s, lineno))
    if not rows:
        raise ValueError(f"{path}: empty table")
    limit = rows[-1][0]
    exact = mode == "exact"
    values: Union[list, np.ndarray]
    if exact:
        values = [0] * (limit + 1)
    else:
        values = np.zeros(limit + 1, dtype=np.float64)
    expected = 1
    for n, v_s, lineno in rows:
        if n != expected:
            raise ValueError(f"{path}: line {lineno}: expected n={expected}, got {n}")
        expected += 1
        if exact:
            values[n] = Fraction(v_s) if "/" in v_s else int(v_s)
        else:
            values[n] = float(v_s)
    return SieveTable(limit=limit, values=values, spec_id=spec_id, exact=exact)

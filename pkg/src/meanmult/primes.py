"""Prime generation and weighted prime sums.

Everything downstream (multiplicative sieves, distance functionals, moment
experiments) pulls its primes from here.  The central object is a dense
smallest-prime-factor table; the prime list and all prime-power iterations
derive from it.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .util import fsum

# Beyond this limit the factor table is filled in fixed-size segments to keep
# the sieve working set cache-sized.
SEGMENTED_THRESHOLD = 10**7
SEGMENT_SIZE = 1 << 20

_SPF_MAGIC = b"SPF1"


@dataclass(frozen=True)
class PrimeSet:
    """Primes up to ``limit`` plus the smallest-prime-factor table.

    ``spf[n]`` is the least prime dividing n for 2 <= n <= limit
    (entries 0 and 1 are unused zeros).  Immutable after construction;
    safe to share across threads.
    """

    limit: int
    primes: np.ndarray  # int64, ascending
    spf: np.ndarray     # uint32, index 0..limit

    def __post_init__(self):
        self.primes.setflags(write=False)
        self.spf.setflags(write=False)

    def count(self) -> int:
        return int(len(self.primes))

    def primes_upto(self, x: float) -> np.ndarray:
        """Primes p <= x as a view into the main array."""
        if x >= self.limit:
            return self.primes
        hi = int(np.searchsorted(self.primes, math.floor(x), side="right"))
        return self.primes[:hi]

    def primes_between(self, u: float, v: float) -> np.ndarray:
        """Primes with u < p <= v."""
        lo = int(np.searchsorted(self.primes, math.floor(u), side="right"))
        hi = int(np.searchsorted(self.primes, math.floor(v), side="right"))
        return self.primes[lo:hi]


def _fill_spf(limit: int, segment_size: int) -> np.ndarray:
    """Fill the smallest-prime-factor table by ascending-prime marking.

    Only unset entries are marked, so the first prime to reach an index is
    its least factor.  Segments are independent once the base primes are
    known and could be produced in parallel; they are filled in order here.
    """
    spf = np.zeros(limit + 1, dtype=np.uint32)
    root = math.isqrt(limit)
    # base primes up to sqrt(limit) via a small boolean sieve
    base_mask = np.ones(root + 1, dtype=bool)
    if root >= 0:
        base_mask[:2] = False
    for p in range(2, math.isqrt(root) + 1):
        if base_mask[p]:
            base_mask[p * p:: p] = False
    base = np.flatnonzero(base_mask)

    lo = 2
    while lo <= limit:
        hi = min(lo + segment_size, limit + 1)
        for p in base:
            p = int(p)
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start >= hi:
                continue
            block = spf[start:hi:p]
            block[block == 0] = p
        lo = hi
    return spf


def sieve_primes(limit: int, segment_size: Optional[int] = None) -> PrimeSet:
    """Primes and least-factor table up to ``limit``.

    Raises ValueError for limit < 2.  Above SEGMENTED_THRESHOLD the factor
    table is marked in SEGMENT_SIZE slices.
    """
    if limit < 2:
        raise ValueError(f"limit must be >= 2, got {limit}")
    if segment_size is None:
        segment_size = SEGMENT_SIZE if limit > SEGMENTED_THRESHOLD else limit + 1
    spf = _fill_spf(limit, segment_size)
    # untouched entries >= 2 are prime: their least factor is themselves
    prime_chunks = []
    chunk = 1 << 22
    for lo in range(2, limit + 1, chunk):
        hi = min(lo + chunk, limit + 1)
        idx = np.arange(lo, hi, dtype=np.int64)
        view = spf[lo:hi]
        is_p = view == 0
        view[is_p] = idx[is_p].astype(np.uint32)
        prime_chunks.append(idx[(view == idx)])
    primes = np.concatenate(prime_chunks) if prime_chunks else np.empty(0, np.int64)
    return PrimeSet(limit=limit, primes=primes, spf=spf)


# One shared PrimeSet per process, grown on demand.  All callers that just
# need "primes up to x" go through here.
_CACHE: dict = {"ps": None}


def get_prime_set(limit: int) -> PrimeSet:
    ps = _CACHE["ps"]
    if ps is None or ps.limit < limit:
        ps = sieve_primes(max(limit, 2))
        _CACHE["ps"] = ps
    if ps.limit == limit:
        return ps
    hi = int(np.searchsorted(ps.primes, limit, side="right"))
    return PrimeSet(limit=limit, primes=ps.primes[:hi], spf=ps.spf[: limit + 1])


def clear_cache() -> None:
    _CACHE["ps"] = None


def prime_powers_upto(ps: PrimeSet, x: float) -> np.ndarray:
    """All prime powers q = p^k <= x, ascending (int64)."""
    xf = math.floor(x)
    qs = [ps.primes_upto(xf)]
    extra = []
    for p in ps.primes_upto(math.isqrt(max(xf, 0))):
        q = int(p) * int(p)
        while q <= xf:
            extra.append(q)
            q *= int(p)
    if extra:
        qs.append(np.array(extra, dtype=np.int64))
    out = np.concatenate(qs)
    out.sort()
    return out


def chebyshev_sum(
    ps: PrimeSet,
    x: float,
    weight: Optional[Callable[[int], float]] = None,
    prime_powers: bool = False,
) -> float:
    """Sum of weight(q) * log p over primes (or prime powers q = p^k) up to x.

    For prime powers the log factor is log p, von Mangoldt style.  Weight
    defaults to 1.  Compensated summation throughout.
    """
    if x < 1:
        raise ValueError(f"x must be >= 1, got {x}")
    if x > ps.limit:
        raise ValueError(f"x={x} exceeds sieve limit {ps.limit}")
    if not prime_powers:
        prs = ps.primes_upto(x)
        if weight is None:
            return fsum(np.log(prs.astype(np.float64))) if len(prs) else 0.0
        return fsum(weight(int(p)) * math.log(p) for p in prs)
    xf = math.floor(x)
    terms = []
    for p in ps.primes_upto(xf):
        p = int(p)
        lp = math.log(p)
        q = p
        while q <= xf:
            terms.append((weight(q) if weight is not None else 1.0) * lp)
            q *= p
    return fsum(terms)


def delta_supremum(ps: PrimeSet, x: float, g: Callable[[int], float]) -> float:
    """sup over 1 <= y <= x of y^{-1} * sum_{q <= y} g(q) log q, q prime powers.

    Single left-to-right pass: the numerator only jumps at the prime powers
    and y^{-1} decreases in between, so for a nonnegative running sum the
    supremum is attained just after a jump.  The empty-range value 0 is
    always a candidate, which also covers negative running sums.
    """
    if x < 1:
        raise ValueError(f"x must be >= 1, got {x}")
    best = 0.0
    running = 0.0
    comp = 0.0  # Kahan carry
    for q in prime_powers_upto(ps, x):
        q = int(q)
        term = g(q) * math.log(q)
        y_ = term - comp
        t = running + y_
        comp = (t - running) - y_
        running = t
        cand = running / q
        if cand > best:
            best = cand
    return best


def prime_reciprocal_sum(
    ps: PrimeSet,
    u: float,
    v: float,
    weight: Optional[Callable[[int], float]] = None,
) -> float:
    """Sum of weight(p)/p over primes with u < p <= v."""
    if u < 0 or u > v:
        raise ValueError(f"need 0 <= u <= v, got u={u}, v={v}")
    if v > ps.limit:
        raise ValueError(f"v={v} exceeds sieve limit {ps.limit}")
    prs = ps.primes_between(u, v)
    if weight is None:
        return fsum(1.0 / prs.astype(np.float64)) if len(prs) else 0.0
    return fsum(weight(int(p)) / p for p in prs)


def save_spf_cache(ps: PrimeSet, path: str) -> None:
    """Binary least-factor cache: 16-byte header (magic, pad, limit u64 LE),
    then little-endian uint32 entries for indices 0..limit."""
    with open(path, "wb") as fh:
        fh.write(_SPF_MAGIC + b"\x00\x00\x00\x00" + struct.pack("<Q", ps.limit))
        fh.write(ps.spf.astype("<u4").tobytes())


def load_spf_cache(path: str) -> PrimeSet:
    with open(path, "rb") as fh:
        header = fh.read(16)
        if len(header) != 16 or header[:4] != _SPF_MAGIC:
            raise ValueError(f"{path}: not a least-factor cache file")
        (limit,) = struct.unpack("<Q", header[8:16])
        data = fh.read()
    spf = np.frombuffer(data, dtype="<u4")
    if len(spf) != limit + 1:
        raise ValueError(f"{path}: expected {limit + 1} entries, found {len(spf)}")
    spf = spf.astype(np.uint32)
    idx = np.arange(limit + 1, dtype=np.int64)
    primes = idx[2:][spf[2:] == idx[2:]]
    return PrimeSet(limit=int(limit), primes=primes, spf=spf)

"""Dirichlet characters mod D with exact root-of-unity arithmetic.

The unit group (Z/DZ)* is decomposed into cyclic factors via CRT over the
prime powers dividing D (odd p^k cyclic with a primitive root; 2^k for
k >= 3 as <-1> x <5>).  A character assigns each factor generator a root of
unity, stored as an exact exponent numerator over the factor order, so
multiplicativity and order relations are exact; complex values enter only
at summation time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional, Union

import numpy as np

from . import primes as primes_mod
from .multiplicative import SieveTable
from .util import fsum


def _factorize(n: int) -> list[tuple[int, int]]:
    out = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            k = 0
            while m % p == 0:
                m //= p
                k += 1
            out.append((p, k))
        p += 1
    if m > 1:
        out.append((m, 1))
    return out


def euler_phi(n: int) -> int:
    out = 1
    for p, k in _factorize(n):
        out *= (p - 1) * p ** (k - 1)
    return out


def _primitive_root(p: int, k: int) -> int:
    """Primitive root mod p^k for odd prime p."""
    phi_p = p - 1
    fac = [q for q, _ in _factorize(phi_p)]
    g = 2
    while True:
        if all(pow(g, phi_p // q, p) != 1 for q in fac):
            break
        g += 1
    if k == 1:
        return g
    # g works mod p^2 iff g^(p-1) != 1 mod p^2, and then for every k
    if pow(g, p - 1, p * p) == 1:
        g += p
    return g


@dataclass
class _Block:
    """Cyclic factors contributed by one prime power q | D, with joint
    discrete logs of all units mod q."""

    prime_power: int
    orders: list[int]                 # one entry per cyclic factor
    generators: list[int]             # generators mod prime_power
    dlog: dict[int, tuple[int, ...]]  # unit residue mod q -> exponent tuple


def _build_block(p: int, k: int) -> Optional[_Block]:
    q = p**k
    if p == 2:
        if k == 1:
            return None  # trivial unit group
        if k == 2:
            return _Block(q, [2], [3], {1: (0,), 3: (1,)})
        half = 2 ** (k - 2)
        dlog = {}
        for e0 in range(2):
            for e1 in range(half):
                r = (pow(-1, e0, q) * pow(5, e1, q)) % q
                dlog[r] = (e0, e1)
        return _Block(q, [2, half], [q - 1, 5], dlog)
    g = _primitive_root(p, k)
    phi = (p - 1) * p ** (k - 1)
    dlog = {}
    r = 1
    for j in range(phi):
        dlog[r] = (j,)
        r = (r * g) % q
    return _Block(q, [phi], [g], dlog)


@dataclass
class UnitGroup:
    """Cyclic decomposition of (Z/DZ)*, blocks ordered by prime power."""

    D: int
    blocks: list[_Block]
    factor_orders: list[int]

    @classmethod
    def build(cls, D: int) -> "UnitGroup":
        blocks = []
        for p, k in _factorize(D):
            b = _build_block(p, k)
            if b is not None:
                blocks.append(b)
        blocks.sort(key=lambda b: b.prime_power)
        orders = [s for b in blocks for s in b.orders]
        return cls(D=D, blocks=blocks, factor_orders=orders)

    def dlog(self, n: int) -> Optional[tuple[int, ...]]:
        """Exponent tuple of n across all factors; None when gcd(n, D) > 1."""
        if math.gcd(n, self.D) != 1:
            return None
        out: list[int] = []
        for b in self.blocks:
            e = b.dlog.get(n % b.prime_power)
            if e is None:
                return None
            out.extend(e)
        return tuple(out)


@dataclass
class DirichletCharacter:
    """A character mod D given by exponents a_i on the factor generators:
    the i-th generator maps to exp(2 pi i a_i / s_i)."""

    modulus: int
    exponents: tuple[int, ...]
    group: UnitGroup
    index: int = 0
    _value_table: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    @property
    def order(self) -> int:
        o = 1
        for a, s in zip(self.exponents, self.group.factor_orders):
            o = math.lcm(o, s // math.gcd(s, a))
        return o

    @property
    def is_principal(self) -> bool:
        return all(a == 0 for a in self.exponents)

    @property
    def is_quadratic(self) -> bool:
        return self.order == 2

    @property
    def is_real(self) -> bool:
        return self.order <= 2

    @property
    def conductor(self) -> int:
        cond = 1
        for block, exps in self.blocks_with_exponents():
            cond *= _local_conductor(block, exps)
        return cond

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    def blocks_with_exponents(self):
        i = 0
        for b in self.group.blocks:
            n = len(b.orders)
            yield b, self.exponents[i : i + n]
            i += n

    def exponent(self, n: int) -> Optional[Fraction]:
        """Exact exponent e in [0,1) with chi(n) = exp(2 pi i e); None if
        chi(n) = 0."""
        ks = self.group.dlog(n)
        if ks is None:
            return None
        e = Fraction(0)
        for a, k, s in zip(self.exponents, ks, self.group.factor_orders):
            e += Fraction(a * k, s)
        return e % 1

    def value(self, n: int) -> complex:
        e = self.exponent(n)
        if e is None:
            return 0j
        if e == 0:
            return 1 + 0j
        if 2 * e == 1:
            return -1 + 0j
        return complex(math.cos(2 * math.pi * e), math.sin(2 * math.pi * e))

    def values_mod(self) -> np.ndarray:
        """chi on residues 0..D-1 (complex128; exact at the real points)."""
        if self._value_table is None:
            D = self.modulus
            self._value_table = np.array([self.value(r) for r in range(D)], dtype=np.complex128)
        return self._value_table

    def real_values_mod(self) -> np.ndarray:
        """For real characters: exact int8 values on residues 0..D-1."""
        if not self.is_real:
            raise ValueError("character is not real-valued")
        D = self.modulus
        out = np.zeros(D, dtype=np.int8)
        for r in range(D):
            e = self.exponent(r)
            if e is None:
                continue
            out[r] = 1 if e == 0 else -1
        return out


def enumerate_characters(D: int) -> list[DirichletCharacter]:
    """All phi(D) characters mod D, in the canonical (stable) order:
    lexicographic over the generator exponent tuples, factors ordered by
    prime power (the <-1> factor before the <5> factor at 2^k, k >= 3)."""
    if D < 1:
        raise ValueError(f"modulus must be >= 1, got {D}")
    group = UnitGroup.build(D)
    chars = []
    # lexicographic product over factor exponent ranges
    def rec(prefix: tuple[int, ...], i: int):
        if i == len(group.factor_orders):
            chars.append(prefix)
            return
        for a in range(group.factor_orders[i]):
            rec(prefix + (a,), i + 1)

    rec((), 0)
    return [
        DirichletCharacter(modulus=D, exponents=e, group=group, index=i)
        for i, e in enumerate(chars)
    ]


def principal_character(D: int) -> DirichletCharacter:
    return enumerate_characters(D)[0]


def _local_conductor(block: _Block, exps: tuple[int, ...]) -> int:
    q = block.prime_power
    p = _factorize(q)[0][0]
    if p != 2:
        s = block.orders[0]
        a = exps[0]
        o = s // math.gcd(s, a)
        if o == 1:
            return 1
        # order o = p^a * m with m | p-1; need j-1 >= a
        a_val = 0
        oo = o
        while oo % p == 0:
            oo //= p
            a_val += 1
        return p ** (a_val + 1)
    if q == 4:
        return 4 if exps[0] % 2 == 1 else 1
    # q = 2^k, k >= 3: factors (<-1>, <5>)
    e0, e1 = exps
    s1 = block.orders[1]
    o1 = s1 // math.gcd(s1, e1)
    if o1 > 1:
        m = o1.bit_length() - 1
        return 2 ** (m + 2)
    return 4 if e0 % 2 == 1 else 1


def twist(t: SieveTable, chi: DirichletCharacter) -> SieveTable:
    """Entrywise product v[n] * chi(n); zero on n sharing a factor with D.

    Real characters keep exact tables exact; complex characters produce a
    complex float table.
    """
    L = t.limit
    D = chi.modulus
    spec_id = f"{t.spec_id}*chi[{D},{chi.index}]"
    res = np.arange(L + 1, dtype=np.int64) % D
    if chi.is_real:
        cv = chi.real_values_mod()[res]
        if t.exact and isinstance(t.values, list):
            vals = [0] * (L + 1)
            cl = cv.tolist()
            for n in range(1, L + 1):
                c = cl[n]
                vals[n] = t.values[n] * c if c else 0
            return SieveTable(L, vals, spec_id=spec_id, exact=True)
        if t.exact and isinstance(t.values, np.ndarray):
            out = t.values.astype(np.int64) * cv
            return SieveTable(L, out, spec_id=spec_id, exact=True)
        out = t.as_float_array() * cv
        return SieveTable(L, out, spec_id=spec_id, exact=False)
    cv = chi.values_mod()[res]
    out = t.as_float_array().astype(np.complex128) * cv
    return SieveTable(L, out, spec_id=spec_id, exact=False)


@dataclass
class ExceptionalEvidence:
    """Tail behaviour of sum g(p)/p over primes with chi(p) = -1.

    Convergence is not decidable from finite data: small tail increments are
    evidence, never proof.  Thresholds are recorded so the verdict is
    reproducible.
    """

    modulus: int
    char_index: int
    checkpoints: list[float]
    partial_sums: list[float]
    increments: list[float]
    threshold: float
    window_count: int


def detect_exceptional_quadratic(
    g_on_primes: Union[Mapping[int, float], Callable[[int], float]],
    D: int,
    x: float,
    window_count: int = 3,
    threshold: float = 0.05,
) -> Optional[tuple[DirichletCharacter, ExceptionalEvidence]]:
    """Scan the quadratic characters mod D for a convergent-looking series
    sum g(p)/p over chi(p) = -1.

    Partial sums are taken at geometric checkpoints x * 10^-j; a character
    is flagged when every increment across the last ``window_count`` decades
    falls below ``threshold``.  Returns the first flagged character in
    canonical order with its evidence, or None.
    """
    if x < 100:
        raise ValueError(f"x must be >= 100, got {x}")
    if window_count < 3:
        raise ValueError(f"window_count must be >= 3, got {window_count}")
    quads = [c for c in enumerate_characters(D) if c.is_quadratic]
    if not quads:
        return None
    ps = primes_mod.get_prime_set(int(math.floor(x)))
    prs = ps.primes_upto(x)
    pf = prs.astype(np.float64)
    if callable(g_on_primes):
        gv = np.array([float(g_on_primes(int(p))) for p in prs])
    else:
        gv = np.array([float(g_on_primes.get(int(p), 0.0)) for p in prs])
    if np.any(gv < 0):
        raise ValueError("g must be nonnegative on the primes")
    checkpoints = [x * 10.0 ** (-(window_count - j)) for j in range(window_count + 1)]
    for chi in quads:
        cvals = chi.real_values_mod()[prs % chi.modulus]
        terms = np.where(cvals == -1, gv / pf, 0.0)
        csum = np.cumsum(terms)
        partial = []
        for y in checkpoints:
            hi = int(np.searchsorted(prs, math.floor(y), side="right"))
            partial.append(float(csum[hi - 1]) if hi > 0 else 0.0)
        incs = [partial[j + 1] - partial[j] for j in range(window_count)]
        if all(inc < threshold for inc in incs):
            return chi, ExceptionalEvidence(
                modulus=D,
                char_index=chi.index,
                checkpoints=checkpoints,
                partial_sums=partial,
                increments=incs,
                threshold=threshold,
                window_count=window_count,
            )
    return None


def progression_sum(t: SieveTable, D: int, a: int, x: float):
    """Direct sum of v[n] over n <= x with n = a mod D (oracle for the
    character reconstruction identity)."""
    m = math.floor(x)
    if t.exact and isinstance(t.values, list):
        return sum(t.values[n] for n in range(1, m + 1) if n % D == a % D)
    vals = t.as_float_array()
    idx = np.arange(1, m + 1)
    return fsum(vals[idx[idx % D == a % D]])

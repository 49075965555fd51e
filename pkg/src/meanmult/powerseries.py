"""Exact truncated integer power series.

Multiplication is exact throughout: coefficient arrays are packed into huge
integers (fixed-width digits, Kronecker substitution) and multiplied with
GMP, then unpacked.  Digit width is chosen from the actual coefficient
bounds, so overflow is impossible by construction; results are returned as
int64 arrays when they fit and as arrays of Python ints otherwise
(automatic promotion, never silent wraparound).

Sign handling: a series c is split as c = pos - neg with nonnegative parts.
For a product we compute M = (P1-N1)(P2-N2) and Q = (P1+N1)(P2+N2); the
digits of M+Q and Q are nonnegative and carry-free, and their difference
recovers the signed coefficients.
"""

from __future__ import annotations

from typing import Sequence, Union

import gmpy2
import numpy as np

SeriesArray = Union[np.ndarray, list]


def pentagonal_series(degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Sparse expansion of prod_{j>=1} (1 - x^j) up to the given degree.

    Euler's pentagonal number theorem: exponents k(3k +- 1)/2 with
    coefficient (-1)^k.  Returns (exponents, coefficients) as int64 arrays.
    """
    idx = [0]
    val = [1]
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        g2 = k * (3 * k + 1) // 2
        s = -1 if k % 2 else 1
        if g1 > degree:
            break
        idx.append(g1)
        val.append(s)
        if g2 <= degree:
            idx.append(g2)
            val.append(s)
        k += 1
    return np.array(idx, dtype=np.int64), np.array(val, dtype=np.int64)


def sparse_convolve(
    idx_a: np.ndarray, val_a: np.ndarray, idx_b: np.ndarray, val_b: np.ndarray, degree: int
) -> np.ndarray:
    """Dense truncated product of two sparse integer series (int64, exact).

    Pair counts here are O(sqrt(degree)^2); values must stay within int64,
    which the callers guarantee (coefficients of low eta powers are tiny).
    """
    out = np.zeros(degree + 1, dtype=np.int64)
    for i in range(len(idx_a)):
        s = idx_a[i] + idx_b
        m = s <= degree
        np.add.at(out, s[m], val_a[i] * val_b[m])
    return out


def _max_abs(c: SeriesArray) -> int:
    if isinstance(c, np.ndarray) and c.dtype != object:
        return int(np.abs(c).max()) if len(c) else 0
    return max((abs(int(v)) for v in c), default=0)


def _split_nonneg(c: SeriesArray) -> tuple[list, list]:
    if isinstance(c, np.ndarray) and c.dtype != object:
        pos = np.where(c > 0, c, 0)
        neg = np.where(c < 0, -c, 0)
        return pos, neg
    pos = [int(v) if v > 0 else 0 for v in c]
    neg = [-int(v) if v < 0 else 0 for v in c]
    return pos, neg


def _pack(c, words: int) -> int:
    """Nonnegative coefficients -> integer with 64*words-bit digits."""
    n = len(c)
    if isinstance(c, np.ndarray) and c.dtype != object:
        m = np.zeros((n, words), dtype="<u8")
        m[:, 0] = c.astype(np.uint64)
        return int.from_bytes(m.tobytes(), "little")
    w = 8 * words
    return int.from_bytes(b"".join(int(v).to_bytes(w, "little") for v in c), "little")


def _unpack_words(value: int, n_digits: int, words: int) -> np.ndarray:
    nbytes = n_digits * words * 8
    value &= (1 << (8 * nbytes)) - 1
    return np.frombuffer(value.to_bytes(nbytes, "little"), dtype="<u8").reshape(n_digits, words)


def multiply_exact(a: SeriesArray, b: SeriesArray, degree: int):
    """Exact truncated product of two signed integer series.

    Returns an int64 ndarray when every coefficient fits, else an object
    ndarray of Python ints.
    """
    n = degree + 1
    a = a[:n] if len(a) > n else a
    b = b[:n] if len(b) > n else b
    ma, mb = _max_abs(a), _max_abs(b)
    if ma == 0 or mb == 0:
        return np.zeros(n, dtype=np.int64)
    # bound on any digit of M+Q: twice the absolute convolution bound
    bound = 2 * ma * mb * min(len(a), len(b))
    words = max(1, (bound.bit_length() + 64) // 64)

    pa, na = _split_nonneg(a)
    pb, nb = _split_nonneg(b)
    P1, N1 = gmpy2.mpz(_pack(pa, words)), gmpy2.mpz(_pack(na, words))
    P2, N2 = gmpy2.mpz(_pack(pb, words)), gmpy2.mpz(_pack(nb, words))
    M = (P1 - N1) * (P2 - N2)
    Q = (P1 + N1) * (P2 + N2)
    rw = _unpack_words(int(M + Q), n, words)
    qw = _unpack_words(int(Q), n, words)

    if words == 1:
        # digits < 2^63 by the bound above, so int64 is exact here
        return rw[:, 0].astype(np.int64) - qw[:, 0].astype(np.int64)
    rb, qb = rw.tobytes(), qw.tobytes()
    w = words * 8
    out = np.empty(n, dtype=object)
    for i in range(n):
        out[i] = int.from_bytes(rb[i * w: (i + 1) * w], "little") - int.from_bytes(
            qb[i * w: (i + 1) * w], "little"
        )
    mx = max((abs(v) for v in out), default=0)
    if mx < 2**63:
        return out.astype(np.int64)
    return out


def square_exact(a: SeriesArray, degree: int):
    return multiply_exact(a, a, degree)


def eta_power_24(degree: int) -> np.ndarray:
    """Exact coefficients of prod_{j>=1} (1-x^j)^24 through the given degree.

    Built from the pentagonal series by repeated exact squaring,
    24 = 16 + 8: E -> E^2 -> E^4 -> E^8 -> E^16, then E^16 * E^8.
    """
    pi, pv = pentagonal_series(degree)
    e2 = sparse_convolve(pi, pv, pi, pv, degree)
    e4 = multiply_exact(e2, e2, degree)
    e8 = multiply_exact(e4, e4, degree)
    e16 = multiply_exact(e8, e8, degree)
    return multiply_exact(e16, e8, degree)


def naive_multiply(a: Sequence, b: Sequence, degree: int) -> list:
    """Schoolbook truncated product over Python ints (test oracle)."""
    out = [0] * (degree + 1)
    for i, ai in enumerate(a[: degree + 1]):
        if ai == 0:
            continue
        for j, bj in enumerate(b[: degree + 1 - i]):
            if bj:
                out[i + j] += int(ai) * int(bj)
    return out

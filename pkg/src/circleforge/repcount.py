"""Exact representation counts R(n) for n = x1^2+x2^2+x3^3+x4^3+x5^6+x6^6
with positive integers x_i.

Single targets use meet-in-the-middle against a square-pair spectrum; full
ranges convolve the cube+sixth spectrum with the square-pair spectrum through
the exact transform backend.  Tuples are ordered and every variable starts at
1, so the least representable value is 6.
"""

import os
import struct
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, PreconditionError
from .exactconv import exact_convolve
from .intmath import iroot

PAIR_INDEX_BUDGET = 2 * 10**8  # entries in a pair spectrum
SINGLE_TARGET_BUDGET = 2 * 10**8  # practical memory ceiling for one target
RANGE_BUDGET = 3 * 10**7  # transform length cap (2**26)

SPECTRUM_MAGIC = b"WSPC1"


@dataclass(frozen=True)
class PairSpectrum:
    """counts[m] = #{(x, y) in [1, P]^2 : x^k + y^k = m}, ordered pairs."""

    k: int
    P: int
    counts: np.ndarray  # int64, length 2*P**k + 1


@dataclass(frozen=True)
class RangeCounts:
    X: int
    values: np.ndarray  # R(n) at index n, exact


def _powers(k: int, P: int) -> np.ndarray:
    return np.arange(1, P + 1, dtype=np.int64) ** k


def pair_spectrum(k: int, P: int) -> PairSpectrum:
    """Exact pair-sum spectrum by enumeration of all P^2 ordered pairs."""
    if k not in (2, 3, 6):
        raise PreconditionError(f"exponent k={k} not in (2, 3, 6)")
    if P < 1:
        raise PreconditionError("bound P must be >= 1")
    length = 2 * P**k + 1
    if length > PAIR_INDEX_BUDGET:
        raise BudgetError(
            f"pair spectrum needs {length} entries "
            f"({length * 8 / 2**30:.1f} GiB), budget is {PAIR_INDEX_BUDGET}"
        )
    powers = _powers(k, P)
    counts = np.zeros(length, dtype=np.int64)
    rows_per_chunk = max(1, 4 * 10**7 // P)
    for lo in range(0, P, rows_per_chunk):
        block = powers[lo : lo + rows_per_chunk, None] + powers[None, :]
        counts += np.bincount(block.ravel(), minlength=length)
    return PairSpectrum(k=k, P=P, counts=counts)


def write_spectrum(spectrum: PairSpectrum, path: str) -> None:
    """Serialise in the WSPC1 layout: magic, k/P/length as little-endian u64,
    u32 counts, and a trailing u64 checksum equal to the count sum mod 2^64."""
    counts = spectrum.counts
    if counts.max(initial=0) >= 2**32:
        raise ValueError("spectrum counts overflow the 32-bit cache format")
    payload = counts.astype("<u4").tobytes()
    checksum = int(counts.sum()) % 2**64
    with open(path, "wb") as fh:
        fh.write(SPECTRUM_MAGIC)
        fh.write(struct.pack("<QQQ", spectrum.k, spectrum.P, len(counts)))
        fh.write(payload)
        fh.write(struct.pack("<Q", checksum))


def read_spectrum(path: str) -> PairSpectrum:
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:5] != SPECTRUM_MAGIC:
        raise ValueError(f"{path}: bad magic, not a WSPC1 spectrum")
    k, P, length = struct.unpack_from("<QQQ", raw, 5)
    offset = 5 + 24
    end = offset + 4 * length
    if len(raw) != end + 8:
        raise ValueError(f"{path}: truncated spectrum file")
    counts = np.frombuffer(raw[offset:end], dtype="<u4").astype(np.int64)
    (checksum,) = struct.unpack_from("<Q", raw, end)
    if int(counts.sum()) % 2**64 != checksum:
        raise ValueError(f"{path}: checksum mismatch, refusing corrupt spectrum")
    return PairSpectrum(k=int(k), P=int(P), counts=counts)


def _cached_pair_spectrum(k: int, P: int, cache_dir: str | None) -> PairSpectrum:
    if cache_dir is None:
        return pair_spectrum(k, P)
    os.makedirs(cache_dir, exist_ok=True)
    path = os.path.join(cache_dir, f"wspc_k{k}_P{P}.bin")
    if os.path.exists(path):
        spectrum = read_spectrum(path)
        if spectrum.k == k and spectrum.P == P:
            return spectrum
    spectrum = pair_spectrum(k, P)
    write_spectrum(spectrum, path)
    return spectrum


def _value_counts(k: int, P: int, limit: int) -> tuple[np.ndarray, np.ndarray]:
    """Distinct pair-sum values <= limit with multiplicities."""
    powers = _powers(k, P)
    sums = (powers[:, None] + powers[None, :]).ravel()
    sums = sums[sums <= limit]
    return np.unique(sums, return_counts=True)


def _cube_sixth_spectrum(P3: int, P6: int, limit: int | None = None) -> np.ndarray:
    """g[m] = #{(x3,x4,x5,x6): x3^3+x4^3+x5^6+x6^6 = m}, truncated to limit."""
    full_top = 2 * P3**3 + 2 * P6**6
    top = full_top if limit is None else min(limit, full_top)
    v3, c3 = _value_counts(3, P3, top)
    v6, c6 = _value_counts(6, P6, top)
    sums = (v3[:, None] + v6[None, :]).ravel()
    weights = (c3[:, None] * c6[None, :]).ravel().astype(np.float64)
    keep = sums <= top
    g = np.bincount(sums[keep], weights=weights[keep], minlength=top + 1)
    return np.rint(g).astype(np.int64)


def rep_count_single(n: int, max_n: int = SINGLE_TARGET_BUDGET) -> int:
    """Exact R(n) by meet-in-the-middle against the square-pair spectrum."""
    if n < 1:
        raise PreconditionError("target n must be >= 1")
    if n > max_n:
        raise BudgetError(
            f"single target n={n} beyond budget {max_n} "
            f"(needs a {4 * (n + 1) / 2**30:.1f} GiB square spectrum)"
        )
    if n < 6:
        return 0
    P2 = iroot(n - 4, 2)
    squares = _powers(2, P2)
    r22 = np.zeros(n + 1, dtype=np.int64)
    rows_per_chunk = max(1, 4 * 10**7 // P2)
    for lo in range(0, P2, rows_per_chunk):
        block = (squares[lo : lo + rows_per_chunk, None] + squares[None, :]).ravel()
        block = block[block <= n]
        r22 += np.bincount(block, minlength=n + 1)
    v3, c3 = _value_counts(3, iroot(n - 4, 3), n - 4)
    v6, c6 = _value_counts(6, iroot(n - 4, 6), n - 4)
    total = 0
    for s, ws in zip(v6, c6):
        idx = n - int(s) - v3
        ok = idx >= 2
        total += int(ws) * int(np.dot(c3[ok], r22[idx[ok]]))
    return total


def rep_count_range(
    X: int, cache_dir: str | None = None, max_x: int = RANGE_BUDGET
) -> RangeCounts:
    """Exact R(n) for every n <= X via one exact convolution."""
    if X < 1:
        raise PreconditionError("range bound X must be >= 1")
    if X > max_x:
        raise BudgetError(f"range bound X={X} beyond budget {max_x}")
    P2, P3, P6 = iroot(X, 2), iroot(X, 3), iroot(X, 6)
    sq = _cached_pair_spectrum(2, P2, cache_dir)
    sq_trunc = sq.counts[: X + 1]
    g = _cube_sixth_spectrum(P3, P6, limit=X)
    values = exact_convolve(g, sq_trunc)[: X + 1]
    if X >= 6 and values[:6].any():
        raise AssertionError("convolution produced counts below the minimum value 6")
    if X <= 10**7:
        if values.max(initial=0) >= 2**32:
            raise AssertionError("32-bit storage would saturate; counts kept wide")
        values = values.astype(np.uint32)
    return RangeCounts(X=X, values=values)

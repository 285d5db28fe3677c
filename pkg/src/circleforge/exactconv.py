"""Exact integer convolution backends.

Two tools live here:

* ``exact_convolve`` — linear convolution of nonnegative int64 arrays, exact by
  construction: small problems go through direct ``np.convolve``; large ones use
  number-theoretic transforms modulo two coprime primes with reconstruction by
  remainder combination.  The modulus product must certify an a-priori bound on
  the largest output value, otherwise the call is refused.
* ``cyclic_histogram_convolution`` — cyclic convolution of several residue
  histograms mod q in arbitrary-precision integers via Kronecker substitution
  (values packed into slots of one big integer, folded back every round).
"""

import numpy as np

from .errors import BudgetError

# NTT-friendly primes p = c * 2**e + 1 with e >= 26, with primitive roots.
NTT_PRIMES = ((2013265921, 31), (1811939329, 13))
NTT_MAX_LENGTH = 1 << 26

_DIRECT_OPS_LIMIT = 10**7


def _bit_reverse_indices(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n, dtype=np.int64)
    rev = np.zeros(n, dtype=np.int64)
    for i in range(bits):
        rev = (rev << 1) | ((idx >> i) & 1)
    return rev


def _power_table(w: int, count: int, p: int) -> np.ndarray:
    """[w**0, w**1, ..., w**(count-1)] mod p, built by doubling."""
    table = np.ones(1, dtype=np.int64)
    while len(table) < count:
        step = pow(int(w), len(table), p)
        table = np.concatenate([table, (table * step) % p])
    return table[:count]


def _ntt(a: np.ndarray, p: int, g: int, invert: bool) -> np.ndarray:
    """In-place iterative radix-2 transform of ``a`` (length a power of two)."""
    n = len(a)
    a = a[_bit_reverse_indices(n)]
    root = pow(g, p - 2, p) if invert else g
    length = 2
    while length <= n:
        half = length // 2
        w = pow(root, (p - 1) // length, p)
        wp = _power_table(w, half, p)
        view = a.reshape(-1, length)
        t = (view[:, half:] * wp) % p
        left = view[:, :half].copy()
        view[:, :half] = (left + t) % p
        view[:, half:] = (left - t) % p
        length *= 2
    if invert:
        n_inv = pow(n, p - 2, p)
        a = (a * n_inv) % p
    return a


def _ntt_convolve_mod(a: np.ndarray, b: np.ndarray, n: int, p: int, g: int) -> np.ndarray:
    fa = np.zeros(n, dtype=np.int64)
    fb = np.zeros(n, dtype=np.int64)
    fa[: len(a)] = a % p
    fb[: len(b)] = b % p
    fa = _ntt(fa, p, g, invert=False)
    fb = _ntt(fb, p, g, invert=False)
    fa = (fa * fb) % p
    return _ntt(fa, p, g, invert=True)


def convolution_value_bound(a: np.ndarray, b: np.ndarray) -> int:
    """Cheap upper bound for max entry of the linear convolution a * b."""
    if len(a) == 0 or len(b) == 0:
        return 0
    sa, sb = int(a.sum()), int(b.sum())
    ma, mb = int(a.max()), int(b.max())
    return min(sa * mb, sb * ma)


def exact_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact linear convolution of nonnegative integer arrays, int64 output.

    Raises BudgetError when the certified value bound overflows the modulus
    product (or int64), or when the transform length exceeds NTT_MAX_LENGTH.
    """
    a = np.ascontiguousarray(a, dtype=np.int64)
    b = np.ascontiguousarray(b, dtype=np.int64)
    if a.min(initial=0) < 0 or b.min(initial=0) < 0:
        raise ValueError("exact_convolve expects nonnegative inputs")
    n_out = len(a) + len(b) - 1
    if len(a) == 0 or len(b) == 0:
        return np.zeros(0, dtype=np.int64)

    bound = convolution_value_bound(a, b)
    (p1, g1), (p2, g2) = NTT_PRIMES
    if bound >= p1 * p2:
        raise BudgetError(
            f"convolution values may reach {bound}, beyond the certified "
            f"modulus product {p1 * p2}"
        )

    if len(a) * len(b) <= _DIRECT_OPS_LIMIT:
        # direct path is exact in int64 whenever the certified bound is
        return np.convolve(a, b)

    n = 1 << (n_out - 1).bit_length()
    if n > NTT_MAX_LENGTH:
        raise BudgetError(
            f"transform length {n} exceeds supported maximum {NTT_MAX_LENGTH}"
        )
    r1 = _ntt_convolve_mod(a, b, n, p1, g1)[:n_out]
    r2 = _ntt_convolve_mod(a, b, n, p2, g2)[:n_out]
    # remainder combination: x = r1 + p1 * ((r2 - r1) * inv(p1) mod p2)
    inv_p1 = pow(p1, p2 - 2, p2)
    t = ((r2 - r1) % p2) * inv_p1 % p2
    return r1 + p1 * t


def _pack(values, slot_bytes: int) -> int:
    chunks = b"".join(int(v).to_bytes(slot_bytes, "little") for v in values)
    return int.from_bytes(chunks, "little")


def _unpack(packed: int, count: int, slot_bytes: int) -> list[int]:
    raw = packed.to_bytes(count * slot_bytes, "little")
    return [
        int.from_bytes(raw[i * slot_bytes : (i + 1) * slot_bytes], "little")
        for i in range(count)
    ]


def cyclic_histogram_convolution(histograms, q: int) -> list[int]:
    """Cyclic convolution mod q of integer histograms, exact at any size.

    Every intermediate entry is bounded by the product of the histogram masses,
    which fixes the Kronecker slot width up front.
    """
    if q < 1:
        raise ValueError("modulus must be positive")
    mass = 1
    for h in histograms:
        mass *= max(1, int(sum(h)))
    slot_bytes = (mass.bit_length() + 1 + 7) // 8
    slot_bits = slot_bytes * 8
    fold_shift = q * slot_bits
    fold_mask = (1 << fold_shift) - 1

    acc = None
    for h in histograms:
        if len(h) != q:
            raise ValueError("histogram length must equal the modulus")
        packed = _pack(h, slot_bytes)
        if acc is None:
            acc = packed
        else:
            acc *= packed
            while acc >> fold_shift:
                acc = (acc & fold_mask) + (acc >> fold_shift)
    if acc is None:
        raise ValueError("need at least one histogram")
    return _unpack(acc, q, slot_bytes)

"""Exact integer helpers: k-th roots, trial-division factorisation, prime tables."""

import math
from functools import lru_cache

import numpy as np

# Trial division is used for every factorisation; all moduli in this package
# stay at or below this bound.
TRIAL_DIVISION_BOUND = 10**6


def iroot(n: int, k: int) -> int:
    """floor(n ** (1/k)) computed in exact integer arithmetic."""
    if n < 0:
        raise ValueError("iroot requires n >= 0")
    if k < 1:
        raise ValueError("iroot requires k >= 1")
    if k == 1 or n < 2:
        return n
    if k == 2:
        return math.isqrt(n)
    r = int(round(n ** (1.0 / k)))
    while r > 0 and r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def primes_up_to(n: int) -> list[int]:
    """All primes <= n by a byte sieve."""
    if n < 2:
        return []
    sieve = bytearray(b"\x01") * (n + 1)
    sieve[:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            start = p * p
            sieve[start : n + 1 : p] = b"\x00" * ((n - start) // p + 1)
    return [i for i, v in enumerate(sieve) if v]


@lru_cache(maxsize=8)
def _spf_table(n: int) -> np.ndarray:
    """Smallest-prime-factor table for 0..n."""
    spf = np.arange(n + 1, dtype=np.int64)
    for p in range(2, math.isqrt(n) + 1):
        if spf[p] == p:
            block = spf[p * p : n + 1 : p]
            block[block == np.arange(p * p, n + 1, p)] = p
    return spf


def smallest_prime_factors(n: int) -> np.ndarray:
    """Read-only smallest-prime-factor table for 0..n (cached)."""
    table = _spf_table(max(n, 2))
    table.setflags(write=False)
    return table


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13):
        if n % p == 0:
            return n == p
    f = 17
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorisation [(p, exponent), ...] by trial division.

    Intended for moduli up to TRIAL_DIVISION_BOUND**2; a prime cofactor larger
    than TRIAL_DIVISION_BOUND is accepted as-is.
    """
    if n < 1:
        raise ValueError("factorize requires n >= 1")
    out = []
    for p in (2, 3, 5):
        if n % p == 0:
            h = 0
            while n % p == 0:
                n //= p
                h += 1
            out.append((p, h))
    f = 7
    while f * f <= n and f <= TRIAL_DIVISION_BOUND:
        if n % f == 0:
            h = 0
            while n % f == 0:
                n //= f
                h += 1
            out.append((f, h))
        f += 2
    if n > 1:
        out.append((n, 1))
    return out


def prime_powers_up_to(n: int) -> list[tuple[int, int, int]]:
    """All prime powers p**h <= n as (p, h, p**h), sorted by value."""
    out = []
    for p in primes_up_to(n):
        q = p
        h = 1
        while q <= n:
            out.append((p, h, q))
            q *= p
            h += 1
    out.sort(key=lambda t: t[2])
    return out

"""Singular-series machinery for the sum of two squares, two cubes and two
sixth powers.

The q-th term is

    A(q; n) = sum_{a=1..q, gcd(a,q)=1} q^{-6} S_2(q,a)^2 S_3(q,a)^2 S_6(q,a)^2 e(-n a / q)

and the truncation sums A(q; n) over q <= W.  A is multiplicative in q, so the
truncation is assembled from prime-power values; a literal per-q summation is
kept as a cross-check path.  Exact congruence counts M_n(q), obtained by cyclic
convolution of power-residue histograms in exact integers, act as an
independent oracle through the divisor-sum identity

    sum_{d | q} A(d; n) = q^{-5} M_n(q).
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BudgetError, PreconditionError
from .exactconv import cyclic_histogram_convolution
from .intmath import is_prime, prime_powers_up_to, smallest_prime_factors
from .powersums import gauss_sum_table, residue_histogram

# cost bounds: exact congruence spectra and per-q term tables are O(q log q)
# to O(q^1.6); these stops keep single calls interactive
CONGRUENCE_BUDGET = 10**4
TERM_BUDGET = 10**5
TRUNCATION_BUDGET = 5000


@dataclass(frozen=True)
class SeriesTerm:
    q: int
    n: int
    value: float


@dataclass(frozen=True)
class SingularSeriesValue:
    n: int
    W: int
    value: float
    tail_estimate: float  # |value at 2W - value at W|


@dataclass(frozen=True)
class CongruenceCount:
    q: int
    n: int
    count: int


def _term_table_complex(q: int) -> np.ndarray:
    """A(q; n mod q) for all residues n, before discarding the imaginary part."""
    s2 = gauss_sum_table(2, q)
    s3 = gauss_sum_table(3, q)
    s6 = gauss_sum_table(6, q)
    weights = s2**2 * s3**2 * s6**2 / float(q) ** 6
    weights[np.gcd(np.arange(q), q) != 1] = 0.0
    return np.fft.fft(weights)


@lru_cache(maxsize=4096)
def _term_table(q: int) -> np.ndarray:
    table = _term_table_complex(q).real
    table.setflags(write=False)
    return table


def series_term(q: int, n: int) -> SeriesTerm:
    """A(q; n); the target n is reduced mod q internally."""
    if q < 1:
        raise PreconditionError("modulus q must be a positive integer")
    if q > TERM_BUDGET:
        raise BudgetError(f"series term modulus {q} beyond budget {TERM_BUDGET}")
    return SeriesTerm(q=q, n=n, value=float(_term_table(q)[n % q]))


def series_term_direct(q: int, n: int) -> float:
    """Literal evaluation of A(q; n) from per-a Gauss sums (cross-check path)."""
    from .powersums import gauss_sum

    if q < 1:
        raise PreconditionError("modulus q must be a positive integer")
    if q > 2000:
        raise BudgetError("direct path is reserved for small moduli")
    total = 0.0 + 0.0j
    for a in range(1, q + 1):
        if np.gcd(a, q) != 1:
            continue
        s2 = gauss_sum(2, q, a).value
        s3 = gauss_sum(3, q, a).value
        s6 = gauss_sum(6, q, a).value
        total += s2**2 * s3**2 * s6**2 * np.exp(-2j * np.pi * n * a / q) / q**6
    return total.real


@lru_cache(maxsize=512)
def _congruence_spectrum(q: int) -> tuple:
    """M_n(q) for every residue n, as exact integers."""
    hists = []
    for k in (2, 2, 3, 3, 6, 6):
        hists.append([int(v) for v in residue_histogram(k, q)])
    return tuple(cyclic_histogram_convolution(hists, q))


def congruence_count(q: int, n: int) -> CongruenceCount:
    """Exact number of solutions of
    x1^2+x2^2+x3^3+x4^3+x5^6+x6^6 = n (mod q), each x_i over a complete
    residue system."""
    if q < 1:
        raise PreconditionError("modulus q must be a positive integer")
    if q > CONGRUENCE_BUDGET:
        raise BudgetError(f"congruence count modulus {q} beyond {CONGRUENCE_BUDGET}")
    return CongruenceCount(q=q, n=n, count=_congruence_spectrum(q)[n % q])


def local_density(p: int, n: int, h: int) -> float:
    """p^{-5h} * M_n(p^h); stabilises in h once lifting obstructions clear."""
    if not is_prime(p):
        raise PreconditionError(f"p={p} is not prime")
    if h < 1:
        raise PreconditionError("exponent h must be >= 1")
    q = p**h
    if q > CONGRUENCE_BUDGET:
        raise BudgetError(f"p**h = {q} beyond budget {CONGRUENCE_BUDGET}")
    return float(congruence_count(q, n).count) / float(p) ** (5 * h)


def _prime_power_values(n: int, bound: int) -> dict[int, float]:
    return {q: float(_term_table(q)[n % q]) for _, _, q in prime_powers_up_to(bound)}


def truncated_singular_series(n: int, W: int) -> SingularSeriesValue:
    """sum_{q<=W} A(q; n), assembled multiplicatively from prime-power terms.

    The tail estimate is the change when the truncation is doubled.
    """
    if n < 1:
        raise PreconditionError("target n must be >= 1")
    if W < 1:
        raise PreconditionError("truncation W must be >= 1")
    if W > TRUNCATION_BUDGET:
        raise BudgetError(f"truncation W={W} beyond budget {TRUNCATION_BUDGET}")
    pp = _prime_power_values(n, 2 * W)
    spf = smallest_prime_factors(2 * W)
    # A(q) for every q <= 2W by multiplicativity, in one ascending sweep
    terms = np.empty(2 * W + 1)
    terms[0] = 0.0
    terms[1] = 1.0
    for q in range(2, 2 * W + 1):
        p = int(spf[q])
        rest = q
        ppow = 1
        while rest % p == 0:
            rest //= p
            ppow *= p
        terms[q] = pp[ppow] * terms[rest]
    value = float(terms[1 : W + 1].sum())
    value2 = float(terms[1 : 2 * W + 1].sum())
    return SingularSeriesValue(n=n, W=W, value=value, tail_estimate=abs(value2 - value))


def series_sum_literal(n: int, W: int) -> float:
    """sum_{q<=W} A(q; n) with each term evaluated per-q (cross-check path)."""
    if W < 1:
        raise PreconditionError("truncation W must be >= 1")
    if W > 500:
        raise BudgetError("literal summation is kept only for W <= 500")
    return float(sum(series_term(q, n).value for q in range(1, W + 1)))


def series_batch(X: int, W: int) -> tuple[np.ndarray, np.ndarray]:
    """(S_W, S_2W) arrays over n = 0..X, S_W[n] = sum_{q<=W} A(q; n).

    Per-q residue tables are built multiplicatively from prime-power tables and
    tiled across the n-range.  Moduli with 2 || q are skipped: S_2(2, 1) = 0
    makes every such term vanish identically.
    """
    if X < 0:
        raise PreconditionError("range bound X must be >= 0")
    if W < 1:
        raise PreconditionError("truncation W must be >= 1")
    if W > TRUNCATION_BUDGET:
        raise BudgetError(f"truncation W={W} beyond budget {TRUNCATION_BUDGET}")
    spf = smallest_prime_factors(2 * W)
    tables: dict[int, np.ndarray] = {1: np.ones(1)}
    acc = np.ones(X + 1)  # q = 1 contributes A(1; n) = 1
    snapshot = None
    for q in range(2, 2 * W + 1):
        p = int(spf[q])
        rest = q
        ppow = 1
        while rest % p == 0:
            rest //= p
            ppow *= p
        if ppow == q:
            table = np.asarray(_term_table(q))
        else:
            idx = np.arange(q)
            table = tables[ppow][idx % ppow] * tables[rest][idx % rest]
        tables[q] = table
        if q % 4 != 2:
            acc += np.resize(table, X + 1)
        if q == W:
            snapshot = acc.copy()
    if snapshot is None:  # W == 1
        snapshot = np.ones(X + 1)
    return snapshot, acc

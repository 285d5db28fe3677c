"""Weyl sums, their continuous analogues, rational-point approximations, and
the dissection of [0, 1) into arcs around rationals.

Points are classified by the least-denominator convention: when a point lies
in several arcs of one family, it belongs to the arc whose denominator is
smallest.  Rational inputs (fractions, and floats via their exact dyadic
value) are located through continued-fraction convergents, so classification
is exact.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import BudgetError, ConvergenceError, PreconditionError
from .powersums import gauss_sum

KIND_MAJOR = "major"
KIND_ANNULUS = "annulus"
KIND_PEAK = "peak"
KIND_MINOR = "minor"

WEYL_POINT_BUDGET = 10**7
OSCILLATION_BUDGET = 10**6
_GL8 = np.polynomial.legendre.leggauss(8)
_GL4 = np.polynomial.legendre.leggauss(4)


@dataclass(frozen=True)
class ArcLabel:
    """Arc assignment of one point at dissection level Q and peak level W.

    kind is "major" when the point sits inside the half-level arcs, "annulus"
    when it is in the level-Q arcs but not the half-level ones, otherwise
    "peak"/"minor" by membership in the narrow peak arcs.  (q, a) is the
    least-denominator arc justifying the kind ((0, 0) for "minor").
    """

    q: int
    a: int
    kind: str
    Q: int
    X: int
    W: int
    peak: bool
    peak_q: int
    peak_a: int


@dataclass(frozen=True)
class ExceptionalSample:
    """A finite set of integer targets with unimodular coefficients."""

    members: tuple
    eta: tuple | None = None

    def __post_init__(self):
        if len(set(self.members)) != len(self.members):
            raise PreconditionError("sample members must be distinct")
        if self.eta is not None:
            if len(self.eta) != len(self.members):
                raise PreconditionError("one coefficient per member required")
            for c in self.eta:
                if abs(abs(complex(c)) - 1.0) > 1e-12:
                    raise PreconditionError("coefficients must be unimodular")

    @property
    def size(self) -> int:
        return len(self.members)

    def coefficients(self) -> np.ndarray:
        if self.eta is None:
            return np.ones(len(self.members), dtype=complex)
        return np.asarray(self.eta, dtype=complex)


def _alpha_as_rational(alpha) -> tuple[int, int]:
    if isinstance(alpha, Fraction):
        p, q = alpha.numerator, alpha.denominator
    elif isinstance(alpha, (int, np.integer)):
        p, q = int(alpha), 1
    else:
        p, q = float(alpha).as_integer_ratio()
    if not (0 <= p < q or (p == 0 and q == 1)):
        raise PreconditionError(f"alpha={alpha} outside [0, 1)")
    return p, q


@lru_cache(maxsize=8)
def _unity_roots(q: int) -> np.ndarray:
    table = np.exp(2j * np.pi * np.arange(q) / q)
    table.setflags(write=False)
    return table


def _phase_sum(numerators: np.ndarray, q: int) -> complex:
    """sum of e(m / q) over an int array of numerators in [0, q)."""
    if q <= 2**20:
        counts = np.bincount(numerators.astype(np.int64), minlength=q)
        return complex(np.dot(counts, _unity_roots(q)))
    return complex(np.exp(2j * np.pi * (numerators / q)).sum())


def weyl_sum(k: int, P: int, alpha) -> complex:
    """f_k(alpha) = sum_{x=1..P} e(alpha x^k).

    alpha may be a Fraction or a float; a float is treated as the exact dyadic
    rational it represents, and every phase a x^k is reduced mod the
    denominator in exact integer arithmetic before evaluation.
    """
    if k not in (2, 3, 6):
        raise PreconditionError(f"exponent k={k} not in (2, 3, 6)")
    if not 1 <= P <= WEYL_POINT_BUDGET:
        raise PreconditionError(f"requires 1 <= P <= {WEYL_POINT_BUDGET}")
    p, q = _alpha_as_rational(alpha)
    if p == 0:
        return complex(P)
    total = 0.0 + 0.0j
    chunk = 2 * 10**6
    if q < 2**31:
        pm = p % q
        for lo in range(1, P + 1, chunk):
            x = np.arange(lo, min(P, lo + chunk - 1) + 1, dtype=np.int64) % q
            x2 = x * x % q
            xk = x2 if k == 2 else (x2 * x % q) if k == 3 else (x2 * x % q) ** 2 % q
            total += _phase_sum(pm * xk % q, q)
        return total
    if (q & (q - 1)) == 0 and q.bit_length() <= 65:
        # float denominators are powers of two; wraparound in uint64 is exact
        shift = np.uint64(64 - (q.bit_length() - 1))
        pw = np.uint64(p)
        for lo in range(1, P + 1, chunk):
            x = np.arange(lo, min(P, lo + chunk - 1) + 1, dtype=np.uint64)
            x2 = x * x
            xk = x2 if k == 2 else x2 * x if k == 3 else (x2 * x) ** 2
            m = (pw * xk) << shift >> shift
            total += complex(np.exp(2j * np.pi * (m.astype(np.float64) / q)).sum())
        return total
    if P > 2 * 10**5:
        raise BudgetError("huge denominators are limited to P <= 2*10**5")
    for x in range(1, P + 1):
        m = p * pow(x, k, q) % q
        total += complex(math.cos(2 * math.pi * m / q), math.sin(2 * math.pi * m / q))
    return total


def _phase_panel_bounds(k: int, P: float, panels: int) -> np.ndarray:
    """Panel boundaries on [0, P]: an equal-phase grid (uniform increments of
    g^k) merged with a coarse uniform grid, so that neither the oscillatory
    region near P nor the wide leading panel is under-resolved."""
    j = np.arange(panels + 1, dtype=np.float64)
    phase_grid = P * (j / panels) ** (1.0 / k)
    uniform = np.linspace(0.0, float(P), 17)
    return np.unique(np.concatenate([phase_grid, uniform]))


def _initial_panels(k: int, P: float, beta: float) -> int:
    cycles = abs(beta) * float(P) ** k
    return max(8, int(math.ceil(4.0 * cycles)))


def _weyl_integral_positive(k: int, P: float, beta: float, rel_tol: float) -> complex:
    """Adaptive panel quadrature of int_0^P e(beta g^k) dg for beta > 0."""
    nodes, weights = _GL8
    panels = _initial_panels(k, P, beta)
    previous = None
    for _ in range(24):
        bounds = _phase_panel_bounds(k, P, panels)
        half = 0.5 * (bounds[1:] - bounds[:-1])
        mid = 0.5 * (bounds[1:] + bounds[:-1])
        gamma = mid[:, None] + half[:, None] * nodes[None, :]
        vals = np.exp(2j * np.pi * beta * gamma**k)
        estimate = complex((vals @ weights * half).sum())
        if previous is not None and abs(estimate - previous) <= rel_tol * P:
            return estimate
        previous = estimate
        panels *= 2
    raise ConvergenceError(
        f"quadrature did not meet {rel_tol:g}*P after {panels // 2} panels",
        achieved=previous,
        tolerance=rel_tol * P,
    )


def weyl_integral(k: int, P, beta: float) -> complex:
    """v_k(beta) = int_0^P e(beta g^k) dg, with v_k(-beta) = conj(v_k(beta))."""
    if k not in (2, 3, 6):
        raise PreconditionError(f"exponent k={k} not in (2, 3, 6)")
    if P < 1:
        raise PreconditionError("bound P must be >= 1")
    beta = float(beta)
    if beta == 0.0:
        return complex(P)
    if abs(beta) * float(P) ** k > OSCILLATION_BUDGET:
        raise BudgetError(
            f"|beta| * P^k = {abs(beta) * float(P)**k:.3g} exceeds the "
            f"oscillation budget {OSCILLATION_BUDGET}"
        )
    value = _weyl_integral_positive(k, P, abs(beta), rel_tol=1e-8)
    return value if beta > 0 else value.conjugate()


def weyl_integral_batch(k: int, P, betas: np.ndarray, rel_tol: float = 1e-8) -> np.ndarray:
    """v_k over an array of offsets, sharing one panel structure."""
    betas = np.asarray(betas, dtype=np.float64)
    out = np.full(betas.shape, complex(P), dtype=complex)
    mags = np.abs(betas)
    live = mags > 0
    if not live.any():
        return out
    top = float(mags.max())
    if top * float(P) ** k > OSCILLATION_BUDGET:
        raise BudgetError("batch offset exceeds the oscillation budget")
    nodes, weights = _GL8
    panels = _initial_panels(k, P, top)
    b = mags[live]
    previous = None
    for _ in range(24):
        bounds = _phase_panel_bounds(k, P, panels)
        half = 0.5 * (bounds[1:] - bounds[:-1])
        mid = 0.5 * (bounds[1:] + bounds[:-1])
        gamma_k = (mid[:, None] + half[:, None] * nodes[None, :]) ** k
        flat = gamma_k.ravel()
        wts = (half[:, None] * weights[None, :]).ravel()
        est = np.empty(len(b), dtype=complex)
        step = max(1, 4 * 10**6 // max(1, len(flat)))
        for lo in range(0, len(b), step):
            block = b[lo : lo + step, None] * flat[None, :]
            est[lo : lo + step] = np.exp(2j * np.pi * block) @ wts
        if previous is not None and np.abs(est - previous).max() <= rel_tol * P:
            break
        previous = est
        panels *= 2
    else:
        raise ConvergenceError("batch quadrature failed to converge", achieved=previous)
    vals = est
    out_live = np.where(betas[live] > 0, vals, np.conj(vals))
    out[live] = out_live
    return out


def major_arc_approx(k: int, q: int, a: int, beta: float, P: int) -> complex:
    """q^{-1} S_k(q, a) v_k(beta): the structured approximation to f_k near a/q."""
    if math.gcd(a if a else q, q) != 1:
        raise PreconditionError("requires gcd(a, q) = 1")
    s = gauss_sum(k, q, a if a else q).value
    return s / q * weyl_integral(k, P, beta)


def _convergents(alpha: Fraction):
    """Continued-fraction convergents p/q of alpha in [0, 1)."""
    num, den = alpha.numerator, alpha.denominator
    h_prev, h = 1, 0
    k_prev, k = 0, 1
    # leading term 0: first convergent is 0/1
    yield 0, 1
    a, b = den, num  # expanding num/den after the integer part 0
    while b:
        step = a // b
        a, b = b, a - step * b
        h_prev, h = h, step * h + h_prev
        k_prev, k = k, step * k + k_prev
        yield h, k


def _least_arc(alpha: Fraction, q_bound: int, delta: Fraction) -> tuple[int, int] | None:
    """Least q <= q_bound with |q alpha - a| <= delta, via convergents."""
    if q_bound < 1:
        return None
    for p, q in _convergents(alpha):
        if q > q_bound:
            break
        if abs(q * alpha - p) <= delta:
            return q, p
    return None


def _least_peak_arc(alpha: Fraction, W: int, X: int) -> tuple[int, int] | None:
    """Least q <= W with |alpha - a/q| <= W/X, gcd(a, q) = 1, scanned directly."""
    width = Fraction(W, X)
    for q in range(1, W + 1):
        lo = math.ceil((alpha - width) * q)
        hi = math.floor((alpha + width) * q)
        best = None
        for a in range(max(lo, 0), min(hi, q) + 1):
            if math.gcd(a, q) == 1:
                dist = abs(alpha - Fraction(a, q))
                if dist <= width and (best is None or dist < best[0]):
                    best = (dist, a)
        if best is not None:
            return q, best[1]
    return None


def classify_arc(alpha, Q: int, X: int, W: int) -> ArcLabel:
    """Assign alpha to its unique arc at level Q, with peak membership at W."""
    if X < 1 or Q < 1:
        raise PreconditionError("need X >= 1 and Q >= 1")
    if Q > 2 * math.isqrt(X):
        raise PreconditionError("level Q must satisfy Q <= 2 sqrt(X)")
    if W < 1 or W > 1000:
        raise PreconditionError("peak level W must be in 1..1000")
    p, qd = _alpha_as_rational(alpha)
    frac = Fraction(p, qd)
    level = _least_arc(frac, Q, Fraction(Q, X))
    half = _least_arc(frac, Q // 2, Fraction(Q, 2 * X))
    peak_qa = _least_peak_arc(frac, W, X)
    peak = peak_qa is not None
    if level is not None:
        kind = KIND_MAJOR if half is not None else KIND_ANNULUS
        q, a = level
    elif peak:
        kind = KIND_PEAK
        q, a = peak_qa
    else:
        kind = KIND_MINOR
        q, a = 0, 0
    pq, pa = peak_qa if peak else (0, 0)
    return ArcLabel(
        q=q, a=a, kind=kind, Q=Q, X=X, W=W, peak=peak, peak_q=pq, peak_a=pa
    )


def peak_majorant(alpha, q: int, a: int, P2: int) -> float:
    """P2 * (q + P2^2 |q alpha - a|)^(-1/2), the square-sum arc majorant."""
    if q < 1:
        raise PreconditionError("arc denominator must be positive")
    offset = abs(q * float(alpha) - a)
    return P2 / math.sqrt(q + P2**2 * offset)


def exceptional_sum(sample: ExceptionalSample, alpha) -> complex:
    """K(alpha) = sum over the sample of eta_n e(-n alpha)."""
    members = np.asarray(sample.members, dtype=np.float64)
    coeff = sample.coefficients()
    return complex((coeff * np.exp(-2j * np.pi * members * float(alpha))).sum())


def exceptional_sum_grid(sample: ExceptionalSample, alphas: np.ndarray) -> np.ndarray:
    """K over an array of points, chunked over the grid."""
    alphas = np.asarray(alphas, dtype=np.float64)
    members = np.asarray(sample.members, dtype=np.float64)
    coeff = sample.coefficients()
    out = np.empty(alphas.shape, dtype=complex)
    if len(members) == 0:
        out[:] = 0.0
        return out
    step = max(1, 4 * 10**6 // max(1, len(members)))
    for lo in range(0, len(alphas), step):
        block = np.exp(-2j * np.pi * np.outer(alphas[lo : lo + step], members))
        out[lo : lo + step] = block @ coeff
    return out

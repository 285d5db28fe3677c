"""Predictions and empirical exceptional-set scans.

A prediction pairs the exact count R(n) with its main term
C * S(n; W) * n, where C is the closed-form leading constant and S(n; W) the
truncated singular series.  A record is flagged exceptional for a growth
function psi when |R(n) - main| > n / psi(n).  Scans compute all records up to
X, dyadic aggregates, and error quantiles; records below n = 1000 are kept in
reports but marked pre-asymptotic and excluded from trend statistics.
"""

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .powersums import leading_constant
from .repcount import rep_count_range, rep_count_single
from .sseries import series_batch, truncated_singular_series

PRE_ASYMPTOTIC_CUTOFF = 1000
DEFAULT_TRUNCATION = 1000


@dataclass(frozen=True)
class PsiSpec:
    """Growth function: (log t)^A for kind "log_power", t^delta for "power".

    The power exponent is capped at 0.1, keeping every admissible function
    slowly growing.
    """

    kind: str
    param: float

    def __post_init__(self):
        if self.kind == "log_power":
            if self.param <= 0:
                raise PreconditionError("log exponent must be positive")
        elif self.kind == "power":
            if not 0 < self.param <= 0.1:
                raise PreconditionError("power exponent must be in (0, 0.1]")
        else:
            raise PreconditionError(f"unknown psi kind {self.kind!r}")

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        if self.kind == "log_power":
            return np.log(np.maximum(t, 1.0)) ** self.param
        return t**self.param

    @staticmethod
    def parse(text: str) -> "PsiSpec":
        """Grammar: "log" | "log^A" | "pow:delta"."""
        text = text.strip()
        if text == "log":
            return PsiSpec("log_power", 1.0)
        if text.startswith("log^"):
            return PsiSpec("log_power", float(text[4:]))
        if text.startswith("pow:"):
            return PsiSpec("power", float(text[4:]))
        raise PreconditionError(f"cannot parse psi descriptor {text!r}")

    def describe(self) -> str:
        if self.kind == "log_power":
            return "log" if self.param == 1.0 else f"log^{self.param:g}"
        return f"pow:{self.param:g}"


@dataclass(frozen=True)
class PredictionRecord:
    n: int
    R: int
    S_W: float
    tail_estimate: float
    main: float
    abs_err: float
    rel_err: float
    exceptional: bool | None = None


@dataclass(frozen=True)
class ScanReport:
    X: int
    psi: str
    W: int
    E: int
    dyadic_counts: tuple      # ((lo, hi, count), ...) over intervals (lo, hi]
    rel_err_quantiles: dict   # percentiles 50/90/99 over all n
    rel_err_median_asymptotic: float  # median over n >= PRE_ASYMPTOTIC_CUTOFF
    exceptional_proportion: float
    # full per-n arrays, index n (entry 0 unused)
    counts: np.ndarray
    series: np.ndarray
    tails: np.ndarray
    mains: np.ndarray
    abs_errs: np.ndarray
    rel_errs: np.ndarray
    flags: np.ndarray

    def summary(self) -> dict:
        return {
            "X": self.X,
            "psi": self.psi,
            "W": self.W,
            "E": self.E,
            "exceptional_proportion": self.exceptional_proportion,
            "dyadic_counts": [list(t) for t in self.dyadic_counts],
            "rel_err_quantiles": self.rel_err_quantiles,
            "rel_err_median_asymptotic": self.rel_err_median_asymptotic,
        }

    def record(self, n: int) -> PredictionRecord:
        return PredictionRecord(
            n=n,
            R=int(self.counts[n]),
            S_W=float(self.series[n]),
            tail_estimate=float(self.tails[n]),
            main=float(self.mains[n]),
            abs_err=float(self.abs_errs[n]),
            rel_err=float(self.rel_errs[n]),
            exceptional=bool(self.flags[n]),
        )


def predict(n: int, W: int = DEFAULT_TRUNCATION) -> PredictionRecord:
    """Exact count against main term for a single target (no flag attached)."""
    if n < 6:
        raise PreconditionError("targets below 6 have no representations")
    if W < 1:
        raise PreconditionError("truncation W must be >= 1")
    count = rep_count_single(n)
    series = truncated_singular_series(n, W)
    main = leading_constant().value * series.value * n
    abs_err = abs(count - main)
    return PredictionRecord(
        n=n,
        R=count,
        S_W=series.value,
        tail_estimate=series.tail_estimate,
        main=main,
        abs_err=abs_err,
        rel_err=abs_err / main,
    )


def _dyadic_intervals(X: int):
    yield (0, 1)
    j = 0
    while 2**j < X:
        yield (2**j, min(2 ** (j + 1), X))
        j += 1


def scan(X: int, psi: PsiSpec, W: int = DEFAULT_TRUNCATION, cache_dir=None) -> ScanReport:
    """Full exceptional-set scan over 1 <= n <= X."""
    if X < 8:
        raise PreconditionError("scan range must reach at least 8")
    counts = rep_count_range(X, cache_dir=cache_dir).values.astype(np.int64)
    series_w, series_2w = series_batch(X, W)
    n = np.arange(X + 1, dtype=np.float64)
    mains = leading_constant().value * series_w * n
    abs_errs = np.abs(counts - mains)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel_errs = np.where(mains > 0, abs_errs / np.where(mains > 0, mains, 1.0), np.inf)
    psi_vals = psi(n)
    with np.errstate(divide="ignore"):
        thresholds = np.where(psi_vals > 0, n / np.where(psi_vals > 0, psi_vals, 1.0), np.inf)
    flags = abs_errs > thresholds
    flags[0] = False

    E = int(flags[1:].sum())
    dyadic = []
    for lo, hi in _dyadic_intervals(X):
        dyadic.append((lo, hi, int(flags[lo + 1 : hi + 1].sum())))
    qs = np.percentile(rel_errs[1:], [50, 90, 99])
    asym = rel_errs[PRE_ASYMPTOTIC_CUTOFF:] if X >= PRE_ASYMPTOTIC_CUTOFF else rel_errs[1:]
    return ScanReport(
        X=X,
        psi=psi.describe(),
        W=W,
        E=E,
        dyadic_counts=tuple(dyadic),
        rel_err_quantiles={"50": float(qs[0]), "90": float(qs[1]), "99": float(qs[2])},
        rel_err_median_asymptotic=float(np.median(asym)),
        exceptional_proportion=E / X,
        counts=counts,
        series=series_w,
        tails=np.abs(series_2w - series_w),
        mains=mains,
        abs_errs=abs_errs,
        rel_errs=rel_errs,
        flags=flags,
    )


def record_rows(report: ScanReport):
    """CSV rows (n, R, S_W, tail_estimate, main, abs_err, rel_err, exceptional)."""
    for n in range(1, report.X + 1):
        yield (
            n,
            int(report.counts[n]),
            f"{report.series[n]:.12g}",
            f"{report.tails[n]:.12g}",
            f"{report.mains[n]:.12g}",
            f"{report.abs_errs[n]:.12g}",
            f"{report.rel_errs[n]:.12g}",
            int(report.flags[n]),
        )

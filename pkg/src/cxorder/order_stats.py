"""Sample ingestion, L-estimates of expected order statistics, the
interpolated empirical CDF, and null exceedance-probability bounds.

The L-estimate of the expected j-th of m order statistics weights the
sorted sample by increments of the Beta(j, m - j + 1) CDF over the grid
i/n. The exceedance bound pi(j, m) is the reference CDF evaluated at the
expected j-th of m order statistics of the reference distribution itself;
it is what the empirical counterpart is compared against.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .distributions import (
    Exponential,
    LogLogistic,
    NegExponential,
    RefFamily,
    Uniform,
)
from .special import (
    ConvergenceError,
    _beta_pdf_interior,
    integrate_01,
    partial_harmonic,
    reg_inc_beta,
)

__all__ = [
    "BoundStatus",
    "InterpolatedEcdf",
    "PiBound",
    "Sample",
    "TiesWarning",
    "hill_estimate",
    "ingest",
    "interp_ecdf",
    "l_estimate",
    "os_weights",
    "pi_bound",
]


class TiesWarning(UserWarning):
    """The ingested sample contains exactly equal values."""


@dataclass(frozen=True, eq=False)
class Sample:
    """Sorted sample with a flag recording whether ties were present."""

    values: np.ndarray
    tie_flag: bool

    @property
    def n(self) -> int:
        return int(self.values.size)


def ingest(raw) -> Sample:
    """Validate and sort raw observations.

    Rejects empty input and non-finite values. Ties are legal but flagged
    and warned about, because the interpolated ECDF collapses tied knots
    and the continuity arguments behind the test assume none.
    """
    arr = np.asarray(raw, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"expected a one-dimensional sample, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("sample is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError("sample contains non-finite values")
    values = np.sort(arr)
    tie_flag = bool(values.size > 1 and np.any(np.diff(values) == 0.0))
    if tie_flag:
        warnings.warn(
            "sample contains tied values; tied ECDF knots are collapsed",
            TiesWarning,
            stacklevel=2,
        )
    values.setflags(write=False)
    return Sample(values=values, tie_flag=tie_flag)


@lru_cache(maxsize=16384)
def _weights_readonly(n: int, j: int, m: int) -> np.ndarray:
    """Cached, read-only weight vector for (n, j, m)."""
    if n < 1:
        raise ValueError("n must be positive")
    if not 1 <= j <= m:
        raise ValueError(f"require 1 <= j <= m, got j={j}, m={m}")
    a = float(j)
    b = float(m - j + 1)
    # CDF increments over the grid i/n. Past 1/2 the complement form keeps
    # the subtraction between small same-sign numbers instead of values
    # near one, so upper-tail weights keep full relative accuracy.
    cdf = np.empty(n + 1)
    comp = np.empty(n + 1)
    for i in range(n + 1):
        t = i / n
        if t <= 0.5:
            cdf[i] = reg_inc_beta(t, a, b)
            comp[i] = 1.0 - cdf[i]
        else:
            comp[i] = reg_inc_beta(1.0 - t, b, a)
            cdf[i] = 1.0 - comp[i]
    w = np.empty(n)
    for i in range(1, n + 1):
        if (i - 1) / n >= 0.5:
            w[i - 1] = comp[i - 1] - comp[i]
        else:
            w[i - 1] = cdf[i] - cdf[i - 1]
    np.maximum(w, 0.0, out=w)
    w.setflags(write=False)
    return w


def os_weights(n: int, j: int, m: int) -> np.ndarray:
    """L-estimator weights over the sorted sample for rank j of m.

    Nonnegative, summing to one up to roundoff.
    """
    return _weights_readonly(n, j, m).copy()


def l_estimate(s: Sample, j: int, m: int) -> float:
    """L-estimate of the expected j-th of m order statistics."""
    return float(_weights_readonly(s.n, j, m) @ s.values)


@dataclass(frozen=True, eq=False)
class InterpolatedEcdf:
    """Piecewise-linear interpolator of the ECDF jump points.

    Knots are (X_{i:n}, i/n) with tied x-values collapsed to the largest
    i/n. Evaluation clamps to the nearest knot value outside the knot
    range, which keeps the estimate within 1/n of the step ECDF.
    """

    knots_x: np.ndarray
    knots_y: np.ndarray

    def evaluate(self, x):
        arr = np.asarray(x, dtype=float)
        out = np.interp(arr, self.knots_x, self.knots_y)
        return float(out) if arr.ndim == 0 else out

    __call__ = evaluate


def interp_ecdf(s: Sample) -> InterpolatedEcdf:
    """Interpolated ECDF of a sorted sample."""
    n = s.n
    grid = np.arange(1, n + 1) / n
    if s.tie_flag:
        ux = np.unique(s.values)
        last = np.searchsorted(s.values, ux, side="right") - 1
        uy = grid[last]
    else:
        ux = s.values
        uy = grid
    return InterpolatedEcdf(knots_x=ux, knots_y=uy)


class BoundStatus(Enum):
    """Character of an exceedance bound.

    FINITE: the defining expectation converges and the bound is interior.
    TRIVIALLY_ZERO / TRIVIALLY_ONE: the expectation diverges on one side
    only, so the bound is exact but carries no information.
    UNDEFINED: both one-sided expectations diverge; no bound exists.
    """

    FINITE = "finite"
    TRIVIALLY_ZERO = "trivially-zero"
    TRIVIALLY_ONE = "trivially-one"
    UNDEFINED = "undefined"


@dataclass(frozen=True)
class PiBound:
    status: BoundStatus
    value: float | None


def _divergence_sides(ref: RefFamily, j: int, m: int) -> tuple[bool, bool]:
    # The expectation of G^{-1}(B_{j:m}) integrates the quantile against a
    # density that decays like p^{j-1} at 0 and (1-p)^{m-j} at 1. A right
    # tail of index alpha makes the integrand of order (1-p)^{m-j-1/alpha},
    # divergent when m - j + 1 <= 1/alpha; symmetrically on the left.
    tails = ref.tail_info()
    inv_right = 0.0 if math.isinf(tails.right_index) else 1.0 / tails.right_index
    inv_left = 0.0 if math.isinf(tails.left_index) else 1.0 / tails.left_index
    right_div = (m - j + 1) <= inv_right + 1e-12
    left_div = j <= inv_left + 1e-12
    return right_div, left_div


def pi_bound(ref: RefFamily, j: int, m: int) -> PiBound:
    """Null probability that the j-th of m expected order statistics is
    not exceeded, under the standard reference distribution.

    Closed forms cover the uniform, exponential, negative exponential, and
    unit-shape log-logistic references; anything else goes through adaptive
    quadrature of the quantile against the Beta(j, m - j + 1) density.
    """
    if not 1 <= j <= m:
        raise ValueError(f"require 1 <= j <= m, got j={j}, m={m}")
    right_div, left_div = _divergence_sides(ref, j, m)
    if right_div and left_div:
        return PiBound(BoundStatus.UNDEFINED, None)
    if right_div:
        return PiBound(BoundStatus.TRIVIALLY_ONE, 1.0)
    if left_div:
        return PiBound(BoundStatus.TRIVIALLY_ZERO, 0.0)

    if isinstance(ref, Uniform):
        return PiBound(BoundStatus.FINITE, j / (m + 1))
    if isinstance(ref, Exponential):
        return PiBound(
            BoundStatus.FINITE, -math.expm1(-partial_harmonic(m - j + 1, m))
        )
    if isinstance(ref, NegExponential):
        return PiBound(BoundStatus.FINITE, math.exp(-partial_harmonic(j, m)))
    if isinstance(ref, LogLogistic) and ref.a == 1.0:
        return PiBound(BoundStatus.FINITE, j / m)

    # Split the expectation at probability 1/2 and fold the upper half onto
    # (0, 1/2) through the complement quantile and the Beta reflection
    # B_{j:m} =d 1 - B_{m-j+1:m}. Bisection can refine without limit near 0
    # (floats are dense there) but bottoms out near 1, so any integrable
    # singularity from a heavy right tail must be moved to the origin.

    def lower_half(u: np.ndarray) -> np.ndarray:
        # A node on an ulp-wide panel can round to exactly 0, where the
        # quantile jumps to the support endpoint; clamp into the interior.
        p = np.maximum(0.5 * u, 1e-300)
        return 0.5 * ref.quantile(p) * _beta_pdf_interior(p, j, m)

    def upper_half(u: np.ndarray) -> np.ndarray:
        q = np.maximum(0.5 * u, 1e-300)
        return 0.5 * ref.quantile_complement(q) * _beta_pdf_interior(q, m - j + 1, m)

    lo = integrate_01(lower_half, rel_tol=1e-10, abs_tol=5e-13)
    hi = integrate_01(upper_half, rel_tol=1e-10, abs_tol=5e-13)
    if not (lo.converged and hi.converged):
        raise ConvergenceError(
            f"quadrature failed for pi bound j={j}, m={m} under {ref.cache_key()}"
        )
    return PiBound(BoundStatus.FINITE, float(ref.cdf(lo.value + hi.value)))


def hill_estimate(s: Sample, k: int | None = None) -> float:
    """Hill estimator of the right tail index from the top k log-spacings.

    Defaults to k = floor(sqrt(n)). Requires the top k + 1 order
    statistics to be strictly positive.
    """
    n = s.n
    if k is None:
        k = int(math.isqrt(n))
    if not 1 <= k < n:
        raise ValueError(f"require 1 <= k < n, got k={k}, n={n}")
    top = s.values[n - k - 1 :]
    if top[0] <= 0.0:
        raise ValueError("top k + 1 order statistics must be strictly positive")
    logs = np.log(top[1:]) - math.log(top[0])
    total = float(np.sum(logs))
    if total <= 0.0:
        raise ValueError("degenerate top order statistics; tail index undefined")
    return k / total

"""Multifractal spectrum estimation from wavelet coefficients.

Two routes from a coefficient pyramid to a spectrum on a common h grid:

  * large-deviation: per-scale exponents alpha[j][k] =
    -log2|C[j][k]| / j, cumulative counts N_j(alpha) = #{alpha[j][k] <=
    alpha}, log-count growth rates lambda(alpha) fitted across scales,
    upper monotone closure, then d2(h) = h * sup_{alpha <= h}
    lambda_bar(alpha) / alpha restricted to the h range the closure
    itself certifies;
  * Legendre: partition sums S_j(q) = sum_{C != 0} |C|^q, scaling
    exponents tau(q) fitted across scales, critical order q_c where tau
    crosses zero, then d1(h) = min over q >= q_c of (h q - tau(q)).

Counts of zero are missing data, not data: every fit masks them out and
needs at least three usable scales, and grid points whose fit or sup is
undefined stay absent (NaN) end to end.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateLevelError, InsufficientScalesError
from .wavelet import CoefficientPyramid

DEFAULT_SCALE_COUNT = 10
DEFAULT_GRID_STEP = 0.005


@dataclass
class AlphaField:
    """Per-scale exponents, sorted ascending within each scale."""

    J: int
    levels: dict  # j -> sorted ndarray of finite alphas (zeros dropped)

    @classmethod
    def from_pyramid(cls, pyramid: CoefficientPyramid) -> "AlphaField":
        pyramid.validate()
        levels = {}
        for j in range(1, pyramid.J):
            c = np.abs(pyramid.levels[j])
            nz = c > 0
            alpha = -np.log2(c[nz]) / j
            alpha.sort()
            levels[j] = alpha
        return cls(J=pyramid.J, levels=levels)


def count_exceedances(field: AlphaField, j: int, alpha: float) -> int:
    """N_j(alpha): coefficients at scale j with exponent <= alpha."""
    return int(np.searchsorted(field.levels[j], alpha, side="right"))


@dataclass
class LambdaCurve:
    alpha_grid: np.ndarray
    values: np.ndarray       # NaN where fewer than 3 scales had N_j >= 1
    residuals: np.ndarray
    scale_range: tuple
    closed: bool = False


@dataclass
class TauCurve:
    q_grid: np.ndarray
    values: np.ndarray
    residuals: np.ndarray
    scale_range: tuple


def _fit_scales(J: int, scale_count: int):
    js = list(range(1, J))[-scale_count:]
    if len(js) < 3:
        raise InsufficientScalesError(
            f"need at least 3 scales for regression, have {len(js)} (J = {J})"
        )
    return np.array(js, dtype=np.float64)


def _masked_ols(x, y, mask):
    """Per-column least squares of y against x using only masked rows.

    Returns (slope, rms residual), NaN where fewer than 3 rows survive.
    """
    w = mask.astype(np.float64)
    yw = np.where(mask, y, 0.0)
    n = w.sum(axis=0)
    sx = (w * x[:, None]).sum(axis=0)
    sy = yw.sum(axis=0)
    sxx = (w * x[:, None] ** 2).sum(axis=0)
    sxy = (yw * x[:, None]).sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        denom = n * sxx - sx**2
        slope = (n * sxy - sx * sy) / denom
        intercept = (sy - slope * sx) / n
        resid = np.where(mask, y - slope[None, :] * x[:, None] - intercept[None, :], 0.0)
        rms = np.sqrt((resid**2).sum(axis=0) / n)
    bad = n < 3
    slope[bad] = np.nan
    rms[bad] = np.nan
    return slope, rms


def estimate_lambda(
    field: AlphaField,
    alpha_grid: np.ndarray,
    scale_count: int = DEFAULT_SCALE_COUNT,
) -> LambdaCurve:
    """Fit log2 N_j(alpha) against j over the largest available scales."""
    x = _fit_scales(field.J, scale_count)
    counts = np.empty((x.size, alpha_grid.size))
    for row, j in enumerate(x.astype(int)):
        counts[row] = np.searchsorted(field.levels[j], alpha_grid, side="right")
    mask = counts >= 1
    with np.errstate(divide="ignore"):
        y = np.where(mask, np.log2(np.maximum(counts, 1.0)), 0.0)
    slope, rms = _masked_ols(x, y, mask)
    return LambdaCurve(
        alpha_grid=np.asarray(alpha_grid, dtype=np.float64),
        values=slope,
        residuals=rms,
        scale_range=(int(x[0]), int(x[-1])),
    )


def upper_closure(curve: LambdaCurve) -> LambdaCurve:
    """Running max over alpha; NaN entries pass through without spreading."""
    return LambdaCurve(
        alpha_grid=curve.alpha_grid,
        values=np.fmax.accumulate(curve.values),
        residuals=curve.residuals,
        scale_range=curve.scale_range,
        closed=True,
    )


def large_deviation_spectrum(closed: LambdaCurve, h_grid=None) -> np.ndarray:
    """d2(h) = h * sup over alpha <= h of lambda_bar(alpha) / alpha.

    Negative lambda_bar values participate (they only lower the sup),
    but a sup that ends negative leaves the point absent.
    """
    if not closed.closed:
        raise ValueError("large_deviation_spectrum expects the closed curve")
    with np.errstate(invalid="ignore", divide="ignore"):
        ratios = closed.values / closed.alpha_grid
    run = np.fmax.accumulate(ratios)
    if h_grid is None:
        h = closed.alpha_grid
        sup = run
    else:
        h = np.asarray(h_grid, dtype=np.float64)
        idx = np.searchsorted(closed.alpha_grid, h, side="right") - 1
        sup = np.where(idx >= 0, run[np.maximum(idx, 0)], np.nan)
    with np.errstate(invalid="ignore"):
        d2 = h * sup
        d2 = np.where(np.isnan(sup) | (sup < 0), np.nan, d2)
    return d2


def structure_function(
    pyramid: CoefficientPyramid,
    q_grid: np.ndarray,
    scale_count: int = DEFAULT_SCALE_COUNT,
) -> TauCurve:
    """Fit log2 S_j(q) against -j, S_j(q) = sum over nonzero |C|^q.

    Sums are taken in log2 space (per-level log-sum-exp in blocks of q)
    so large |q| neither overflows nor underflows.
    """
    pyramid.validate()
    x = _fit_scales(pyramid.J, scale_count)
    q = np.asarray(q_grid, dtype=np.float64)
    y = np.empty((x.size, q.size))
    for row, j in enumerate(x.astype(int)):
        c = np.abs(pyramid.levels[j])
        nz = c > 0
        if not nz.any():
            raise DegenerateLevelError(
                f"scale {j} has no nonzero coefficients; tau(q) is undefined there"
            )
        logc = np.log2(c[nz])
        for lo in range(0, q.size, 8):
            qs = q[lo : lo + 8]
            v = qs[:, None] * logc[None, :]
            m = v.max(axis=1)
            y[row, lo : lo + 8] = m + np.log2(np.exp2(v - m[:, None]).sum(axis=1))
    mask = np.ones_like(y, dtype=bool)
    slope, rms = _masked_ols(-x, y, mask)
    return TauCurve(q_grid=q, values=slope, residuals=rms, scale_range=(int(x[0]), int(x[-1])))


def critical_q(curve: TauCurve, tol: float = 1e-8) -> float:
    """Smallest zero of the piecewise-linear interpolant of tau(q).

    Scans ascending q for a sign change and bisects that segment down
    to tol.  Without any sign change the smallest grid q is returned
    with a warning (the zero lies outside the grid).
    """
    q = curve.q_grid
    t = curve.values
    for i in range(q.size - 1):
        if t[i] == 0.0:
            return float(q[i])
        if (t[i] < 0.0 < t[i + 1]) or (t[i] > 0.0 > t[i + 1]):
            lo, hi = float(q[i]), float(q[i + 1])
            flo = float(t[i])
            slope = (float(t[i + 1]) - flo) / (hi - lo)
            f = lambda z: flo + slope * (z - lo)
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if f(lo) * f(mid) <= 0.0:
                    hi = mid
                else:
                    lo = mid
            return 0.5 * (lo + hi)
    if t[-1] == 0.0:
        return float(q[-1])
    warnings.warn(
        "tau(q) has no sign change on the q grid; falling back to the smallest grid q",
        stacklevel=2,
    )
    return float(q[0])


def legendre_spectrum(curve: TauCurve, q_c: float, h_grid: np.ndarray) -> np.ndarray:
    """d1(h) = min over q in {q_c} union grid points >= q_c of h q - tau(q)."""
    keep = curve.q_grid >= q_c - 1e-12
    qs = curve.q_grid[keep]
    ts = curve.values[keep]
    if qs.size == 0 or qs[0] > q_c + 1e-12:
        qs = np.concatenate([[q_c], qs])
        ts = np.concatenate([[0.0], ts])  # tau(q_c) = 0 by definition of q_c
    h = np.asarray(h_grid, dtype=np.float64)
    return (h[:, None] * qs[None, :] - ts[None, :]).min(axis=1)


@dataclass
class EstimatedSpectrum:
    h_grid: np.ndarray
    d2: np.ndarray           # large-deviation estimate, NaN where absent
    d1: np.ndarray           # Legendre estimate
    meta: dict = field(default_factory=dict)


@dataclass
class AnalysisResult:
    lambda_curve: LambdaCurve
    closed_curve: LambdaCurve
    tau_curve: TauCurve
    q_c: float
    spectrum: EstimatedSpectrum


def default_q_grid() -> np.ndarray:
    return np.arange(-50, 101) / 10.0


def _default_alpha_grid(field: AlphaField, step: float) -> np.ndarray:
    upper = 2.0
    finite = [a for a in field.levels.values() if a.size]
    if finite:
        top = max(float(np.quantile(a, 0.9999)) for a in finite)
        upper = max(upper, top + 1.0)
    upper = min(upper, 64.0)
    return step * np.arange(1, int(math.ceil(upper / step)) + 1)


def analyze_pyramid(
    pyramid: CoefficientPyramid,
    alpha_grid=None,
    q_grid=None,
    scale_count: int = DEFAULT_SCALE_COUNT,
    grid_step: float = DEFAULT_GRID_STEP,
) -> AnalysisResult:
    """Run both estimators on a shared h grid.

    The d2 estimate is additionally cut off above the h_max certified by
    the closure itself (h_max = 1 / sup lambda_bar(alpha)/alpha, plus
    half a grid step of slack): beyond it the formula grows linearly
    out of the last ratio and would fabricate spectrum mass.
    """
    field_ = AlphaField.from_pyramid(pyramid)
    if alpha_grid is None:
        alpha_grid = _default_alpha_grid(field_, grid_step)
    if q_grid is None:
        q_grid = default_q_grid()
    lam = estimate_lambda(field_, alpha_grid, scale_count)
    closed = upper_closure(lam)
    d2 = large_deviation_spectrum(closed)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratios = closed.values / closed.alpha_grid
    sup_all = np.nanmax(ratios) if np.isfinite(ratios).any() else np.nan
    h_max_est = 1.0 / sup_all if (np.isfinite(sup_all) and sup_all > 0) else np.nan
    nonneg = np.isfinite(closed.values) & (closed.values >= 0)
    h_min_est = float(closed.alpha_grid[nonneg][0]) if nonneg.any() else np.nan
    step = float(alpha_grid[1] - alpha_grid[0]) if len(alpha_grid) > 1 else grid_step
    if np.isfinite(h_max_est):
        d2 = np.where(closed.alpha_grid > h_max_est + 0.5 * step, np.nan, d2)
    tau = structure_function(pyramid, q_grid, scale_count)
    q_c = critical_q(tau)
    d1 = legendre_spectrum(tau, q_c, closed.alpha_grid)
    spectrum = EstimatedSpectrum(
        h_grid=closed.alpha_grid,
        d2=d2,
        d1=d1,
        meta={
            "q_c": q_c,
            "h_min": h_min_est,
            "h_max": h_max_est,
            "scale_range": closed.scale_range,
        },
    )
    return AnalysisResult(
        lambda_curve=lam,
        closed_curve=closed,
        tau_curve=tau,
        q_c=q_c,
        spectrum=spectrum,
    )

"""Singularity spectra and upper logarithmic densities of coefficient laws.

A spectrum curve assigns to each Hoelder exponent h a dimension d(h) in
[0, 1], sampled on a finite grid; absent values (exponents that do not
occur) are stored as NaN and never enter arithmetic unmasked.  An
admissible target spectrum satisfies:

  * d(h) <= 1 everywhere it is present,
  * d is present exactly on [h_min, h_max] and nonnegative there,
  * h -> d(h)/h is non-decreasing,
  * d(h_max) = 1.

``spectrum_from_rho`` maps an upper logarithmic density rho to the
spectrum it generates,

    d(h) = h * sup_{0 < a <= h} rho(a)/a   on [h_min, h_max],

with h_max = 1/sup_{a>0} rho(a)/a and h_min the infimum of {rho >= 0}.
The sup is a running maximum over evaluation points, no interpolation.

Closed-form densities come from four kernel families used for
self-similar cascade models: gaussian, shifted gamma, shifted poisson,
and dirac (exact monofractal).  Each has a validity threshold
guaranteeing rho < 0 near 0; for the gamma and poisson families the
threshold alpha* is the largest root of a transcendental equation and
is solved by bracketed root-finding.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import (
    EmptySpectrumError,
    FlatSpectrumError,
    KernelValidityError,
    MathValidityError,
    UnsupportedVariantError,
)

LOG2E = math.log2(math.e)

_TOL_ONE = 1e-9       # d(h_max) = 1 and d <= 1 slack
_TOL_ZERO = 1e-12     # d >= 0 slack
_TOL_RATIO = 1e-9     # monotonicity slack for d(h)/h
_DEFAULT_STEP = 0.005


# ---------------------------------------------------------------------------
# kernel laws

@dataclass(frozen=True)
class GaussianKernel:
    """rho(a) = 1 - log2(e) (a-m)^2 / (2 sigma^2); valid iff m > sigma*sqrt(2 ln 2)."""

    m: float
    sigma: float


@dataclass(frozen=True)
class ShiftedGammaKernel:
    """rho(a) = 1 + nu log2(a-a0) - beta log2(e) (a-a0) + nu log2(beta e / nu)
    for a > a0, -inf otherwise; valid iff a0 > alpha*(nu, beta)."""

    alpha0: float
    nu: float
    beta: float


@dataclass(frozen=True)
class ShiftedPoissonKernel:
    """rho(a) = 1 - c log2(e) + (a-a0) log2(c e / (a-a0)) for a > a0,
    -inf otherwise; valid iff a0 > alpha*(c)."""

    alpha0: float
    c: float


@dataclass(frozen=True)
class DiracKernel:
    """Monofractal law: rho = 1 at a = H, -inf elsewhere."""

    H: float


KERNEL_VARIANTS = (GaussianKernel, ShiftedGammaKernel, ShiftedPoissonKernel, DiracKernel)


def gaussian_threshold(sigma: float) -> float:
    """Smallest admissible mean for a gaussian kernel of width sigma."""
    return sigma * math.sqrt(2.0 * math.log(2.0))


def kernel_alpha_star(kernel) -> float:
    """Largest (negative) root of the kernel's validity equation.

    Shifted gamma:    1 + nu log2(-a) + beta log2(e) a + nu log2(beta e/nu) = 0
    Shifted poisson:  1 - c log2(e) - a log2(c e / (-a)) = 0

    Both equations attain the value 1 at their interior maximum, so the
    largest root is bracketed between that maximizer and 0 (gamma, and
    poisson with c > ln 2) or lies beyond it (poisson with c <= ln 2,
    where the equation has a single root).  Solved with Brent's method
    to machine precision.
    """
    if isinstance(kernel, ShiftedGammaKernel):
        nu, beta = kernel.nu, kernel.beta
        if nu <= 0 or beta <= 0:
            raise KernelValidityError("nu <= 0 or beta <= 0")

        def f(a):
            return 1.0 + nu * np.log2(-a) + beta * LOG2E * a + nu * math.log2(beta * math.e / nu)

        lo = -nu / beta            # f(lo) = 1 exactly
        hi = lo / 2.0
        while f(hi) >= 0.0:
            hi /= 2.0
        return brentq(f, lo, hi, xtol=1e-15, rtol=8.9e-16)

    if isinstance(kernel, ShiftedPoissonKernel):
        c = kernel.c
        if c <= 0:
            raise KernelValidityError("c <= 0")

        def g(t):   # equation at a = -t, t > 0
            return 1.0 - c * LOG2E + t * np.log2(c * math.e / t)

        if 1.0 - c * LOG2E < 0.0:
            lo = c / 2.0           # g -> 1 - c log2(e) < 0 as t -> 0+
            while g(lo) >= 0.0:
                lo /= 2.0
            t = brentq(g, lo, c, xtol=1e-15, rtol=8.9e-16)
        else:
            hi = 2.0 * c           # single root beyond the maximizer t = c
            while g(hi) >= 0.0:
                hi *= 2.0
            t = brentq(g, c, hi, xtol=1e-15, rtol=8.9e-16)
        return -t

    raise UnsupportedVariantError(
        f"alpha* is defined for the shifted gamma and shifted poisson families, "
        f"not {type(kernel).__name__}"
    )


def kernel_validity(kernel) -> None:
    """Raise KernelValidityError naming the violated threshold, if any."""
    if isinstance(kernel, GaussianKernel):
        if kernel.sigma <= 0:
            raise KernelValidityError("sigma <= 0")
        if not kernel.m > gaussian_threshold(kernel.sigma):
            raise KernelValidityError("m <= sigma*sqrt(2 ln 2)")
    elif isinstance(kernel, ShiftedGammaKernel):
        if not kernel.alpha0 > kernel_alpha_star(kernel):
            raise KernelValidityError("alpha0 <= alpha*(nu, beta)")
    elif isinstance(kernel, ShiftedPoissonKernel):
        if not kernel.alpha0 > kernel_alpha_star(kernel):
            raise KernelValidityError("alpha0 <= alpha*(c)")
    elif isinstance(kernel, DiracKernel):
        if not kernel.H > 0:
            raise KernelValidityError("H <= 0")
    else:
        raise UnsupportedVariantError(f"unknown kernel {type(kernel).__name__}")


def rho_of_kernel(kernel, alpha):
    """Evaluate the kernel's upper logarithmic density (vectorized; -inf allowed)."""
    a = np.asarray(alpha, dtype=np.float64)
    if isinstance(kernel, GaussianKernel):
        out = 1.0 - LOG2E * (a - kernel.m) ** 2 / (2.0 * kernel.sigma**2)
    elif isinstance(kernel, ShiftedGammaKernel):
        t = a - kernel.alpha0
        out = np.full(a.shape, -np.inf)
        pos = t > 0
        const = 1.0 + kernel.nu * math.log2(kernel.beta * math.e / kernel.nu)
        out[pos] = (
            const + kernel.nu * np.log2(t[pos]) - kernel.beta * LOG2E * t[pos]
        )
    elif isinstance(kernel, ShiftedPoissonKernel):
        t = a - kernel.alpha0
        out = np.full(a.shape, -np.inf)
        pos = t > 0
        out[pos] = (
            1.0 - kernel.c * LOG2E + t[pos] * np.log2(kernel.c * math.e / t[pos])
        )
    elif isinstance(kernel, DiracKernel):
        out = np.where(np.abs(a - kernel.H) <= 1e-12 * max(1.0, kernel.H), 1.0, -np.inf)
    else:
        raise UnsupportedVariantError(f"unknown kernel {type(kernel).__name__}")
    return out if out.shape else float(out)


def kernel_rho_peak(kernel) -> float:
    """Location where the kernel density attains its maximum value 1."""
    if isinstance(kernel, GaussianKernel):
        return kernel.m
    if isinstance(kernel, ShiftedGammaKernel):
        return kernel.alpha0 + kernel.nu / kernel.beta
    if isinstance(kernel, ShiftedPoissonKernel):
        return kernel.alpha0 + kernel.c
    if isinstance(kernel, DiracKernel):
        return kernel.H
    raise UnsupportedVariantError(f"unknown kernel {type(kernel).__name__}")


def _rho_prime(kernel, a):
    if isinstance(kernel, GaussianKernel):
        return -LOG2E * (a - kernel.m) / kernel.sigma**2
    if isinstance(kernel, ShiftedGammaKernel):
        t = a - kernel.alpha0
        return kernel.nu / (t * math.log(2.0)) - kernel.beta * LOG2E
    if isinstance(kernel, ShiftedPoissonKernel):
        t = a - kernel.alpha0
        return math.log2(kernel.c * math.e / t) - LOG2E
    raise UnsupportedVariantError(f"no derivative for {type(kernel).__name__}")


def kernel_h_min(kernel) -> float:
    """Left edge of the region where the kernel density is nonnegative."""
    kernel_validity(kernel)
    if isinstance(kernel, GaussianKernel):
        return kernel.m - gaussian_threshold(kernel.sigma)
    if isinstance(kernel, DiracKernel):
        return kernel.H
    peak = kernel_rho_peak(kernel)
    if isinstance(kernel, ShiftedPoissonKernel) and 1.0 - kernel.c * LOG2E >= 0.0:
        return kernel.alpha0   # density already nonnegative at the shift point
    lo = kernel.alpha0 + (peak - kernel.alpha0) * 1e-12
    while rho_of_kernel(kernel, lo) >= 0.0:
        lo = kernel.alpha0 + (lo - kernel.alpha0) / 2.0
    return brentq(lambda a: rho_of_kernel(kernel, a), lo, peak, xtol=1e-15, rtol=8.9e-16)


# ---------------------------------------------------------------------------
# spectrum curves

@dataclass(eq=False)
class SpectrumCurve:
    """Spectrum d(h) sampled on an increasing positive grid; NaN = absent."""

    h_grid: np.ndarray
    d_values: np.ndarray
    h_min: float
    h_max: float

    def present(self):
        return ~np.isnan(self.d_values)


@dataclass
class AdmissibilityReport:
    valid: bool
    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)


def curve_from_function(fn, h_min: float, h_max: float, step: float = _DEFAULT_STEP):
    """Sample d = fn(h) on [h_min, h_max] with approximately the given step."""
    if h_max < h_min:
        raise MathValidityError("h_max < h_min")
    if h_max == h_min:
        grid = np.array([h_min])
    else:
        n = max(1, round((h_max - h_min) / step))
        grid = np.linspace(h_min, h_max, n + 1)
    d = np.array([fn(h) for h in grid], dtype=np.float64)
    return SpectrumCurve(h_grid=grid, d_values=d, h_min=h_min, h_max=h_max)


def curve_from_samples(h_grid, d_values, h_min=None, h_max=None) -> SpectrumCurve:
    """Build a curve from grid samples; h_min/h_max default to the present span."""
    h = np.asarray(h_grid, dtype=np.float64)
    d = np.asarray(d_values, dtype=np.float64)
    if h.size != d.size or h.size == 0:
        raise MathValidityError("h and d grids must be non-empty and equal length")
    if np.any(np.diff(h) <= 0) or h[0] <= 0:
        raise MathValidityError("h grid must be strictly increasing and positive")
    present = ~np.isnan(d)
    if h_min is None or h_max is None:
        if not present.any():
            raise MathValidityError("curve has no present values")
        h_min = float(h[present][0]) if h_min is None else h_min
        h_max = float(h[present][-1]) if h_max is None else h_max
    return SpectrumCurve(h_grid=h, d_values=d, h_min=float(h_min), h_max=float(h_max))


def check_admissible(curve: SpectrumCurve) -> AdmissibilityReport:
    """Diagnose the admissibility conditions; never raises."""
    v = []
    h = np.asarray(curve.h_grid, dtype=np.float64)
    d = np.asarray(curve.d_values, dtype=np.float64)
    if h.size == 0 or h.size != d.size:
        return AdmissibilityReport(False, ["empty or mismatched grids"])
    if h[0] <= 0 or (h.size > 1 and np.any(np.diff(h) <= 0)):
        v.append("h grid must be strictly increasing and positive")
    present = ~np.isnan(d)
    span_tol = _TOL_ONE * max(1.0, abs(curve.h_max))
    inside = (h >= curve.h_min - span_tol) & (h <= curve.h_max + span_tol)
    if np.any(inside & ~present):
        v.append("absent value inside [h_min, h_max]")
    if np.any(~inside & present):
        v.append("present value outside [h_min, h_max]")
    if present.any():
        dp = d[present]
        hp = h[present]
        if np.any(dp > 1.0 + _TOL_ONE):
            v.append("d exceeds 1")
        if np.any(dp < -_TOL_ZERO):
            v.append("negative d inside [h_min, h_max]")
        ratios = dp / hp
        if np.any(np.diff(ratios) < -_TOL_RATIO):
            v.append("d(h)/h is not non-decreasing")
        near = int(np.argmin(np.abs(h - curve.h_max)))
        if np.isnan(d[near]) or abs(d[near] - 1.0) > _TOL_ONE:
            v.append(f"d at h_max is {float(d[near])!r}, expected 1")
    else:
        v.append("curve has no present values")
    notes = ["right-continuity: vacuous on a finite grid (recorded as satisfied)"]
    return AdmissibilityReport(valid=not v, violations=v, notes=notes)


# ---------------------------------------------------------------------------
# upper logarithmic densities

@dataclass(eq=False)
class LogDensity:
    """Either a closed-form kernel or (alpha_grid, rho_values) samples."""

    kernel: object = None
    alpha_grid: np.ndarray = None
    rho_values: np.ndarray = None

    @classmethod
    def from_kernel(cls, kernel):
        kernel_validity(kernel)
        return cls(kernel=kernel)

    @classmethod
    def from_samples(cls, alpha_grid, rho_values):
        a = np.asarray(alpha_grid, dtype=np.float64)
        r = np.array(rho_values, dtype=np.float64)
        if a.size != r.size or a.size == 0:
            raise MathValidityError("alpha and rho grids must be non-empty and equal length")
        if a[0] <= 0 or np.any(np.diff(a) <= 0):
            raise MathValidityError("alpha grid must be strictly increasing and positive")
        r[np.isnan(r)] = -np.inf
        if np.any(r > 1.0 + _TOL_ONE):
            raise MathValidityError("log-density exceeds 1")
        return cls(alpha_grid=a, rho_values=r)

    def gamma_check(self) -> float:
        """Smallest alpha with rho(alpha) >= 0 (must be positive for a
        well-defined process: small coefficients must dominate at fine scales)."""
        if self.kernel is not None:
            return kernel_h_min(self.kernel)
        nonneg = self.rho_values >= 0.0
        if not nonneg.any():
            raise EmptySpectrumError("log-density is negative everywhere")
        return float(self.alpha_grid[nonneg][0])


def _merge_points(base, extras, tol=1e-9):
    """Sorted union of grids, snapping near-duplicates to existing points."""
    pts = list(np.asarray(base, dtype=np.float64))
    for x in extras:
        if not any(abs(x - p) <= tol * max(1.0, abs(x)) for p in pts):
            pts.append(float(x))
    return np.array(sorted(pts))


def _step_grid(upper, step):
    n = int(math.ceil(upper / step - 1e-9))
    return step * np.arange(1, n + 1)


def spectrum_from_rho(density: LogDensity, grid_step: float = _DEFAULT_STEP) -> SpectrumCurve:
    """Spectrum generated by an upper logarithmic density.

    Raises FlatSpectrumError when rho touches zero but is never
    positive (the constant-exponent sparse construction applies there),
    EmptySpectrumError when rho is negative everywhere, and a validity
    error when rho is nonnegative arbitrarily close to 0.
    """
    if density.kernel is not None:
        kernel = density.kernel
        kernel_validity(kernel)
        if isinstance(kernel, DiracKernel):
            H = kernel.H
            grid = _merge_points(_step_grid(4.0 * H, grid_step), [H])
            d = np.where(np.abs(grid - H) <= 1e-12 * max(1.0, H), 1.0, np.nan)
            return SpectrumCurve(h_grid=grid, d_values=d, h_min=H, h_max=H)
        h_min = kernel_h_min(kernel)
        if h_min <= 0:
            raise MathValidityError(
                "log-density is nonnegative arbitrarily close to 0; no spectrum"
            )
        peak = kernel_rho_peak(kernel)
        # maximizer of rho(a)/a solves rho'(a) a = rho(a); bracketed by
        # the left zero of rho (ratio rising) and the peak (ratio falling)
        alpha_t = brentq(
            lambda a: _rho_prime(kernel, a) * a - rho_of_kernel(kernel, a),
            h_min, peak, xtol=1e-15, rtol=8.9e-16,
        )
        smax = float(rho_of_kernel(kernel, alpha_t)) / alpha_t
        h_max = 1.0 / smax
        grid = _merge_points(_step_grid(4.0 * h_max, grid_step), [h_min, alpha_t, h_max])
        rho = rho_of_kernel(kernel, grid)
    else:
        grid = density.alpha_grid
        rho = density.rho_values
        finite = np.isfinite(rho)
        if not finite.any() or np.max(rho[finite]) < -_TOL_ZERO:
            raise EmptySpectrumError(
                "log-density is negative everywhere; the process is smooth"
            )
        if np.max(rho[finite]) <= _TOL_ZERO:
            raise FlatSpectrumError(
                "log-density touches zero but is never positive; use the flat "
                "(constant-exponent) construction instead"
            )
        h_min = density.gamma_check()
        if h_min <= 0:
            raise MathValidityError(
                "log-density is nonnegative arbitrarily close to 0; no spectrum"
            )
        with np.errstate(invalid="ignore"):
            ratios = rho / grid
        smax = float(np.max(ratios[finite]))
        h_max = 1.0 / smax
        grid = _merge_points(grid, [h_max])
        rho = None  # re-evaluated below against the merged grid

    # running maximum of rho/alpha over evaluation points <= h
    if density.kernel is not None:
        vals = rho_of_kernel(density.kernel, grid)
    else:
        # merged grid differs from the density grid only by the inserted
        # h_max, whose running max is already the global one
        vals = np.full(grid.shape, -np.inf)
        src = np.searchsorted(grid, density.alpha_grid)
        vals[src] = density.rho_values
    with np.errstate(invalid="ignore", divide="ignore"):
        ratios = np.where(np.isfinite(vals), vals / grid, -np.inf)
    run = np.maximum.accumulate(ratios)
    span_tol = _TOL_ZERO * max(1.0, h_max)
    inside = (grid >= h_min - span_tol) & (grid <= h_max + span_tol)
    d_raw = grid * run
    present = inside & np.isfinite(d_raw)
    d = np.where(present, d_raw, np.nan)
    # h_min is an infimum; when the density is -inf at that exact point
    # (possible for a shifted poisson with c <= ln 2) presence starts at
    # the first grid point carrying a finite running maximum
    h_min_out = float(grid[present][0])
    return SpectrumCurve(h_grid=grid, d_values=d, h_min=h_min_out, h_max=float(h_max))

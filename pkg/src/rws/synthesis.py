"""Random wavelet series with a prescribed singularity spectrum.

Coefficients at scale j are ``C[j][k] = chi * 2**(-j*alpha)`` with chi a
fair random sign and alpha drawn independently per coefficient from a
per-scale law on (0, inf]; the value +inf encodes a zero coefficient.

Three sources of per-scale laws:

  * a target spectrum curve d(h): the law has density
    ``(j ln 2 / h_max) * 2**(j*(d(a)-1))`` on [0, h_max] plus an atom at
    +inf absorbing the leftover mass (the total is < 1 whenever d is
    admissible, asserted here rather than clipped);
  * a kernel law, scaled by the self-similarity semigroup: at scale j
    the exponent is the j-fold convolution of the kernel rescaled by
    1/j, which is available in closed form for all four families;
  * a flat law: a single exponent alpha0 occupied with probability
    ``j * 2**(-j)`` (zero otherwise), producing a degenerate spectrum.

Randomness is counter-based: scale j of a run keyed by ``seed`` uses a
Philox stream with key (seed, j); coefficient k reads column k of the
(2, 2**j) uniform matrix (row 0 drives the exponent, row 1 the sign).
Any coefficient is therefore reproducible in isolation and the output
is independent of evaluation order or available parallelism.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincc, gammaincinv, ndtr, ndtri

from .errors import AdmissibilityError, ConfigError, MathValidityError
from .spectra import (
    DiracKernel,
    GaussianKernel,
    KERNEL_VARIANTS,
    LogDensity,
    ShiftedGammaKernel,
    ShiftedPoissonKernel,
    SpectrumCurve,
    check_admissible,
    kernel_validity,
    spectrum_from_rho,
)
from .wavelet import CoefficientPyramid, daubechies_filter, inverse_dwt

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class FlatLaw:
    """Constant exponent alpha0 with sparse occupancy j * 2**(-j)."""

    alpha0: float


@dataclass
class SynthesisConfig:
    J: int
    source: object          # SpectrumCurve | kernel | FlatLaw
    wavelet_order: int = 10
    seed: int = 0


def validate_config(config: SynthesisConfig) -> None:
    if not 4 <= config.J <= 24:
        raise ConfigError(f"J must be in [4, 24], got {config.J}")
    if config.wavelet_order not in range(1, 11):
        raise ConfigError(f"wavelet order must be in 1..10, got {config.wavelet_order}")
    if not isinstance(config.seed, int) or config.seed < 0:
        raise ConfigError("seed must be a nonnegative integer")
    src = config.source
    if isinstance(src, SpectrumCurve):
        report = check_admissible(src)
        if not report.valid:
            raise AdmissibilityError("; ".join(report.violations))
    elif isinstance(src, KERNEL_VARIANTS):
        kernel_validity(src)
    elif isinstance(src, FlatLaw):
        if not src.alpha0 > 0:
            raise ConfigError("flat law needs alpha0 > 0")
    else:
        raise ConfigError(f"unknown synthesis source {type(src).__name__}")


@dataclass(eq=False)
class ScaleLawTable:
    """Law of the exponent alpha at one scale.

    Tabulated laws carry (alpha_grid, cdf) with cdf[-1] = 1 - p_inf and
    are sampled by inverse CDF with linear interpolation; direct laws
    carry the kernel and sample through closed-form quantile functions.
    """

    j: int
    p_inf: float = 0.0
    alpha_grid: np.ndarray = None
    cdf: np.ndarray = None
    kernel: object = None
    alpha_cap: float = None


def scale_law_from_spectrum(curve: SpectrumCurve, j: int) -> ScaleLawTable:
    """Tabulate the spectrum-driven density at scale j (trapezoid CDF)."""
    report = check_admissible(curve)
    if not report.valid:
        raise AdmissibilityError("; ".join(report.violations))
    h_max = curve.h_max
    step = min(0.002, h_max / 2048.0)
    n = int(math.ceil(h_max / step))
    grid = np.linspace(0.0, h_max, n + 1)
    present = curve.present()
    d = np.interp(grid, curve.h_grid[present], curve.d_values[present])
    density = np.zeros_like(grid)
    span = (grid >= curve.h_min) & (grid <= curve.h_max)
    density[span] = (j * _LN2 / h_max) * np.exp2(j * (d[span] - 1.0))
    widths = np.diff(grid)
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (density[1:] + density[:-1]) * widths)])
    mass = float(cdf[-1])
    if mass > 1.0 + 1e-9:
        raise MathValidityError(
            f"scale-{j} exponent law has mass {mass:.6f} > 1; spectrum is not admissible"
        )
    return ScaleLawTable(
        j=j,
        p_inf=max(0.0, 1.0 - mass),
        alpha_grid=grid,
        cdf=np.minimum(cdf, 1.0),
        alpha_cap=h_max,
    )


def flat_scale_law(alpha0: float, j: int) -> ScaleLawTable:
    """Atom at alpha0 with mass j * 2**(-j); +inf otherwise."""
    if not alpha0 > 0:
        raise MathValidityError("flat law needs alpha0 > 0")
    mass = j * 2.0 ** (-j)
    return ScaleLawTable(
        j=j,
        p_inf=1.0 - mass,
        alpha_grid=np.array([alpha0]),
        cdf=np.array([mass]),
        alpha_cap=alpha0,
    )


def scale_law_from_kernel(kernel, j: int) -> ScaleLawTable:
    """Scale-j exponent law of a kernel under the self-similarity semigroup.

    Closed forms: gaussian -> Normal(m, sigma^2/j) conditioned on
    alpha > 0; shifted gamma -> alpha0 + Gamma(j nu, beta)/j; shifted
    poisson -> alpha0 + Poisson(j c)/j; dirac -> exactly H.  All have
    p_inf = 0 (no zero coefficients).
    """
    if j < 1:
        raise MathValidityError("kernel scale laws are defined for j >= 1")
    kernel_validity(kernel)
    if isinstance(kernel, GaussianKernel):
        cap = kernel.m + 12.0 * kernel.sigma / math.sqrt(j)
    elif isinstance(kernel, ShiftedGammaKernel):
        mean = kernel.nu / kernel.beta
        sd = math.sqrt(kernel.nu / j) / kernel.beta
        cap = kernel.alpha0 + mean + 12.0 * sd
    elif isinstance(kernel, ShiftedPoissonKernel):
        cap = kernel.alpha0 + kernel.c + 12.0 * math.sqrt(kernel.c / j)
    else:
        cap = kernel.H
    return ScaleLawTable(j=j, p_inf=0.0, kernel=kernel, alpha_cap=cap)


def sample_alphas(law: ScaleLawTable, uniforms) -> np.ndarray:
    """Map uniforms in [0, 1) to exponents (vectorized, deterministic)."""
    u = np.asarray(uniforms, dtype=np.float64)
    j = law.j
    if law.kernel is None:
        out = np.full(u.shape, np.inf)
        mass = float(law.cdf[-1]) if law.cdf.size else 0.0
        finite = u <= mass
        if mass > 0.0 and finite.any():
            if law.alpha_grid.size == 1:
                out[finite] = law.alpha_grid[0]
            else:
                idx = np.searchsorted(law.cdf, u[finite], side="right")
                idx = np.clip(idx, 1, law.cdf.size - 1)
                c0 = law.cdf[idx - 1]
                c1 = law.cdf[idx]
                g0 = law.alpha_grid[idx - 1]
                g1 = law.alpha_grid[idx]
                out[finite] = g0 + (u[finite] - c0) * (g1 - g0) / (c1 - c0)
        return out
    kernel = law.kernel
    if isinstance(kernel, GaussianKernel):
        s = kernel.sigma / math.sqrt(j)
        z0 = ndtr(-kernel.m / s)          # one-draw conditioning on alpha > 0
        alpha = kernel.m + s * ndtri(z0 + u * (1.0 - z0))
    elif isinstance(kernel, ShiftedGammaKernel):
        x = gammaincinv(j * kernel.nu, u) / kernel.beta
        alpha = kernel.alpha0 + x / j
    elif isinstance(kernel, ShiftedPoissonKernel):
        mu = j * kernel.c
        kmax = int(math.ceil(mu + 12.0 * math.sqrt(mu))) + 20
        cdf = gammaincc(np.arange(1, kmax + 2, dtype=np.float64), mu)
        k = np.searchsorted(cdf, u, side="left")
        alpha = kernel.alpha0 + k / j
    elif isinstance(kernel, DiracKernel):
        alpha = np.full(u.shape, kernel.H)
    else:
        raise MathValidityError(f"unknown kernel {type(kernel).__name__}")
    return np.minimum(alpha, law.alpha_cap)


def sample_alpha(law: ScaleLawTable, rng: np.random.Generator) -> float:
    """Draw one exponent (consumes exactly one uniform)."""
    return float(sample_alphas(law, np.array([rng.random()]))[0])


def uniform_field(seed: int, j: int, rows: int = 2) -> np.ndarray:
    """(rows, 2**j) uniforms from the Philox stream keyed by (seed, j)."""
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, j], dtype=np.uint64)
    gen = np.random.Generator(np.random.Philox(key=key))
    return gen.random((rows, 2**j))


def _law_for_scale(source, j: int):
    if isinstance(source, SpectrumCurve):
        return scale_law_from_spectrum(source, j)
    if isinstance(source, FlatLaw):
        return flat_scale_law(source.alpha0, j)
    return scale_law_from_kernel(source, j)


def generate_coefficients(config: SynthesisConfig) -> CoefficientPyramid:
    """Draw the full coefficient pyramid (coarse_mean = 0).

    Scale 0 is degenerate: the j-weighted laws carry no mass there, so
    spectrum and flat sources put C[0][0] = 0, while kernel laws reduce
    to the convolution identity and give |C[0][0]| = 1.
    """
    J = config.J
    source = config.source
    levels = []
    for j in range(J):
        u = uniform_field(config.seed, j)
        signs = np.where(u[1] < 0.5, -1.0, 1.0)
        if j == 0:
            if isinstance(source, KERNEL_VARIANTS):
                levels.append(signs * 1.0)
            else:
                levels.append(np.zeros(1))
            continue
        law = _law_for_scale(source, j)
        alpha = sample_alphas(law, u[0])
        mag = np.where(np.isinf(alpha), 0.0, np.exp2(-j * alpha))
        levels.append(signs * mag)
    return CoefficientPyramid(J=J, levels=levels, coarse_mean=0.0)


def _source_h_max(source):
    if isinstance(source, SpectrumCurve):
        return source.h_max
    if isinstance(source, DiracKernel):
        return source.H
    if isinstance(source, KERNEL_VARIANTS):
        return spectrum_from_rho(LogDensity.from_kernel(source)).h_max
    return None


def synthesize(config: SynthesisConfig) -> np.ndarray:
    """Generate coefficients and reconstruct the sampled path."""
    validate_config(config)
    h_max = _source_h_max(config.source)
    if h_max is not None and h_max > config.wavelet_order - 1:
        warnings.warn(
            f"target h_max {h_max:.3g} exceeds the regularity guarantee of "
            f"db{config.wavelet_order} (order - 1 = {config.wavelet_order - 1}); "
            "exponents near h_max may be distorted",
            stacklevel=2,
        )
    pyramid = generate_coefficients(config)
    return inverse_dwt(pyramid, daubechies_filter(config.wavelet_order))


def flat_rws(alpha0: float, J: int, seed: int = 0) -> CoefficientPyramid:
    """Sparse constant-exponent pyramid: at scale j, each of the 2**j
    coefficients is +-2**(-j*alpha0) with probability j * 2**(-j), else 0."""
    if not alpha0 > 0:
        raise MathValidityError("flat law needs alpha0 > 0")
    if J < 1:
        raise MathValidityError("J must be >= 1")
    cfg = SynthesisConfig(J=J, source=FlatLaw(alpha0), seed=seed)
    return generate_coefficients(cfg)

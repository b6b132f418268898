"""Random wavelet series with prescribed multifractal spectra.

Synthesis draws independent wavelet coefficients whose magnitudes
follow per-scale exponent laws derived from a target spectrum, a
self-similarity kernel, or a flat (constant-exponent) law; estimation
recovers the spectrum of a sampled signal through large-deviation
log-count rates and through Legendre transforms of partition-sum
scaling exponents.
"""

from .errors import (
    AdmissibilityError,
    ConfigError,
    DegenerateLevelError,
    EmptySpectrumError,
    FlatSpectrumError,
    FormatError,
    InsufficientScalesError,
    InvalidLengthError,
    InvalidPyramidError,
    KernelValidityError,
    MathValidityError,
    RwsError,
    UnsupportedOrderError,
    UnsupportedVariantError,
)
from .estimation import (
    AlphaField,
    AnalysisResult,
    EstimatedSpectrum,
    LambdaCurve,
    TauCurve,
    analyze_pyramid,
    count_exceedances,
    critical_q,
    default_q_grid,
    estimate_lambda,
    large_deviation_spectrum,
    legendre_spectrum,
    structure_function,
    upper_closure,
)
from .spectra import (
    AdmissibilityReport,
    DiracKernel,
    GaussianKernel,
    LogDensity,
    ShiftedGammaKernel,
    ShiftedPoissonKernel,
    SpectrumCurve,
    check_admissible,
    curve_from_function,
    curve_from_samples,
    gaussian_threshold,
    kernel_alpha_star,
    kernel_h_min,
    kernel_rho_peak,
    kernel_validity,
    rho_of_kernel,
    spectrum_from_rho,
)
from .synthesis import (
    FlatLaw,
    ScaleLawTable,
    SynthesisConfig,
    flat_rws,
    flat_scale_law,
    generate_coefficients,
    sample_alpha,
    sample_alphas,
    scale_law_from_kernel,
    scale_law_from_spectrum,
    synthesize,
    uniform_field,
    validate_config,
)
from .wavelet import (
    CoefficientPyramid,
    WaveletFilter,
    daubechies_filter,
    dyadic_exponent,
    forward_dwt,
    inverse_dwt,
    parse_wavelet_name,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityError",
    "AdmissibilityReport",
    "AlphaField",
    "AnalysisResult",
    "CoefficientPyramid",
    "ConfigError",
    "DegenerateLevelError",
    "DiracKernel",
    "EmptySpectrumError",
    "EstimatedSpectrum",
    "FlatLaw",
    "FlatSpectrumError",
    "FormatError",
    "GaussianKernel",
    "InsufficientScalesError",
    "InvalidLengthError",
    "InvalidPyramidError",
    "KernelValidityError",
    "LambdaCurve",
    "LogDensity",
    "MathValidityError",
    "RwsError",
    "ScaleLawTable",
    "ShiftedGammaKernel",
    "ShiftedPoissonKernel",
    "SpectrumCurve",
    "SynthesisConfig",
    "TauCurve",
    "UnsupportedOrderError",
    "UnsupportedVariantError",
    "WaveletFilter",
    "analyze_pyramid",
    "check_admissible",
    "count_exceedances",
    "critical_q",
    "curve_from_function",
    "curve_from_samples",
    "daubechies_filter",
    "default_q_grid",
    "dyadic_exponent",
    "estimate_lambda",
    "flat_rws",
    "flat_scale_law",
    "forward_dwt",
    "gaussian_threshold",
    "generate_coefficients",
    "inverse_dwt",
    "kernel_alpha_star",
    "kernel_h_min",
    "kernel_rho_peak",
    "kernel_validity",
    "large_deviation_spectrum",
    "legendre_spectrum",
    "parse_wavelet_name",
    "rho_of_kernel",
    "sample_alpha",
    "sample_alphas",
    "scale_law_from_kernel",
    "scale_law_from_spectrum",
    "spectrum_from_rho",
    "structure_function",
    "synthesize",
    "uniform_field",
    "upper_closure",
    "validate_config",
]

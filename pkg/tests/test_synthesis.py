"""Per-scale exponent laws, coefficient draws, and path realization."""

import numpy as np
import pytest
from scipy import stats

from rws import (
    AdmissibilityError,
    ConfigError,
    DiracKernel,
    FlatLaw,
    GaussianKernel,
    KernelValidityError,
    MathValidityError,
    ShiftedGammaKernel,
    ShiftedPoissonKernel,
    SynthesisConfig,
    curve_from_function,
    flat_rws,
    flat_scale_law,
    generate_coefficients,
    sample_alphas,
    scale_law_from_kernel,
    scale_law_from_spectrum,
    synthesize,
    uniform_field,
    validate_config,
)

# Frozen against adaptive quadrature of the scale-j density
# (j ln2 / h_max) 2^(j (d(a) - 1)) for d(a) = (a - 1/2)^2 on [1/2, 3/2]:
#   j=10: mass 0.36655324344169, CDF(1.0) 0.00464588615066216
#   j=12: mass 0.359121909082646
PARABOLA_MASS_J10 = 0.36655324344169
PARABOLA_CDF1_J10 = 0.00464588615066216
PARABOLA_MASS_J12 = 0.359121909082646


def parabola_curve():
    return curve_from_function(lambda h: (h - 0.5) ** 2, 0.5, 1.5)


# ---------------------------------------------------------------------------
# config validation

def test_config_bounds():
    curve = parabola_curve()
    validate_config(SynthesisConfig(J=10, source=curve))
    with pytest.raises(ConfigError, match="J"):
        validate_config(SynthesisConfig(J=3, source=curve))
    with pytest.raises(ConfigError, match="J"):
        validate_config(SynthesisConfig(J=25, source=curve))
    with pytest.raises(ConfigError, match="wavelet order"):
        validate_config(SynthesisConfig(J=10, source=curve, wavelet_order=11))
    with pytest.raises(ConfigError, match="seed"):
        validate_config(SynthesisConfig(J=10, source=curve, seed=-1))
    with pytest.raises(ConfigError, match="seed"):
        validate_config(SynthesisConfig(J=10, source=curve, seed=1.5))


def test_config_rejects_inadmissible_spectrum():
    bump = curve_from_function(lambda h: 1.0 - ((h - 1.0) / 0.5) ** 2, 0.5, 1.5)
    with pytest.raises(AdmissibilityError):
        validate_config(SynthesisConfig(J=10, source=bump))


def test_config_rejects_invalid_kernel():
    with pytest.raises(KernelValidityError):
        validate_config(SynthesisConfig(J=10, source=GaussianKernel(m=1.0, sigma=1.0)))


def test_config_rejects_bad_flat_and_unknown_source():
    with pytest.raises(ConfigError, match="alpha0"):
        validate_config(SynthesisConfig(J=10, source=FlatLaw(0.0)))
    with pytest.raises(ConfigError, match="source"):
        validate_config(SynthesisConfig(J=10, source="noise"))


# ---------------------------------------------------------------------------
# scale laws

def test_spectrum_law_matches_quadrature():
    law = scale_law_from_spectrum(parabola_curve(), 10)
    assert abs((1.0 - law.p_inf) - PARABOLA_MASS_J10) < 1e-4
    got = float(np.interp(1.0, law.alpha_grid, law.cdf))
    assert abs(got - PARABOLA_CDF1_J10) < 1e-5
    law12 = scale_law_from_spectrum(parabola_curve(), 12)
    assert abs((1.0 - law12.p_inf) - PARABOLA_MASS_J12) < 1e-4


def test_spectrum_law_cdf_shape():
    law = scale_law_from_spectrum(parabola_curve(), 8)
    assert law.alpha_grid[0] == 0.0
    assert abs(law.alpha_grid[-1] - 1.5) < 1e-12
    assert np.all(np.diff(law.cdf) >= 0)
    assert law.cdf[0] == 0.0
    # no mass below h_min
    below = law.alpha_grid < 0.5
    assert np.all(law.cdf[below] == 0.0)


def test_spectrum_law_rejects_inadmissible():
    bump = curve_from_function(lambda h: 1.0 - ((h - 1.0) / 0.5) ** 2, 0.5, 1.5)
    with pytest.raises(AdmissibilityError):
        scale_law_from_spectrum(bump, 10)


def test_flat_law_is_single_atom():
    law = flat_scale_law(0.7, 12)
    assert law.alpha_grid.tolist() == [0.7]
    assert abs(law.cdf[0] - 12 * 2.0**-12) < 1e-18
    assert abs(law.p_inf - (1.0 - 12 * 2.0**-12)) < 1e-18
    with pytest.raises(MathValidityError):
        flat_scale_law(0.0, 12)


def test_kernel_law_requires_positive_scale():
    with pytest.raises(MathValidityError):
        scale_law_from_kernel(GaussianKernel(m=1.0, sigma=0.5), 0)


# ---------------------------------------------------------------------------
# sampling

def _uniform(n, tag):
    gen = np.random.Generator(np.random.Philox(key=np.array([500 + tag, 0], dtype=np.uint64)))
    return gen.random(n)


def test_tabulated_sampling_matches_cdf():
    law = scale_law_from_spectrum(parabola_curve(), 12)
    u = _uniform(100_000, 1)
    alpha = sample_alphas(law, u)
    finite = np.isfinite(alpha)
    # infinite fraction matches p_inf
    se = np.sqrt(law.p_inf * (1 - law.p_inf) / u.size)
    assert abs((~finite).mean() - law.p_inf) < 4 * se
    # conditional law matches the tabulated CDF
    cond = lambda x: np.interp(x, law.alpha_grid, law.cdf) / (1.0 - law.p_inf)
    ks = stats.kstest(alpha[finite], cond).statistic
    assert ks < 0.01
    assert np.all(alpha[finite] >= 0.5 - 1e-12)
    assert np.all(alpha[finite] <= 1.5 + 1e-12)


def test_flat_sampling_hits_single_atom():
    law = flat_scale_law(0.7, 12)
    u = _uniform(200_000, 2)
    alpha = sample_alphas(law, u)
    finite = np.isfinite(alpha)
    assert np.all(alpha[finite] == 0.7)
    mean = 12 * 2.0**-12
    se = np.sqrt(mean * (1 - mean) / u.size)
    assert abs(finite.mean() - mean) < 4 * se


def test_gaussian_law_matches_truncated_normal():
    j, m, sig = 8, 1.0, 0.5
    law = scale_law_from_kernel(GaussianKernel(m=m, sigma=sig), j)
    u = _uniform(100_000, 3)
    alpha = sample_alphas(law, u)
    assert np.all(alpha > 0)
    s = sig / np.sqrt(j)
    ks = stats.kstest(alpha, stats.truncnorm(-m / s, np.inf, loc=m, scale=s).cdf).statistic
    assert ks < 0.01


def test_gamma_law_matches_scaled_gamma():
    j, a0, nu, beta = 8, 0.1, 1.5, 4.0
    law = scale_law_from_kernel(ShiftedGammaKernel(alpha0=a0, nu=nu, beta=beta), j)
    u = _uniform(100_000, 4)
    alpha = sample_alphas(law, u)
    ks = stats.kstest(alpha, stats.gamma(a=j * nu, loc=a0, scale=1.0 / (beta * j)).cdf).statistic
    assert ks < 0.01


def test_poisson_law_matches_rescaled_poisson():
    j, a0, c = 8, 0.3, 1.0
    law = scale_law_from_kernel(ShiftedPoissonKernel(alpha0=a0, c=c), j)
    u = _uniform(100_000, 5)
    alpha = sample_alphas(law, u)
    k = np.round((alpha - a0) * j).astype(int)
    assert np.max(np.abs(alpha - (a0 + k / j))) < 1e-12
    # chi-square against Poisson(j c) over the bulk
    mu = j * c
    kmax = int(mu + 6 * np.sqrt(mu))
    obs = np.bincount(np.clip(k, 0, kmax), minlength=kmax + 1)
    exp = stats.poisson(mu).pmf(np.arange(kmax + 1))
    exp[-1] += stats.poisson(mu).sf(kmax)
    chi2 = float(np.sum((obs - u.size * exp) ** 2 / (u.size * exp)))
    assert chi2 < stats.chi2(kmax).ppf(0.9999)


def test_dirac_law_is_constant():
    law = scale_law_from_kernel(DiracKernel(H=0.8), 9)
    alpha = sample_alphas(law, _uniform(100, 6))
    assert np.all(alpha == 0.8)


def test_sampling_respects_alpha_cap():
    law = scale_law_from_kernel(GaussianKernel(m=1.0, sigma=0.5), 4)
    alpha = sample_alphas(law, np.array([0.0, 0.5, 1.0 - 1e-16]))
    assert np.all(alpha <= law.alpha_cap + 1e-15)


# ---------------------------------------------------------------------------
# coefficient pyramids

def test_uniform_field_is_keyed_by_scale_and_seed():
    a = uniform_field(7, 5)
    b = uniform_field(7, 5)
    assert np.array_equal(a, b)
    assert a.shape == (2, 32)
    assert not np.array_equal(a, uniform_field(8, 5))
    assert not np.array_equal(a, uniform_field(7, 6))


def test_generation_is_deterministic_and_schedule_free():
    cfg = SynthesisConfig(J=10, source=parabola_curve(), seed=3)
    p1 = generate_coefficients(cfg)
    p2 = generate_coefficients(cfg)
    for l1, l2 in zip(p1.levels, p2.levels):
        assert np.array_equal(l1, l2)
    # levels depend only on (seed, j), not on J
    p3 = generate_coefficients(SynthesisConfig(J=8, source=parabola_curve(), seed=3))
    for j in range(8):
        assert np.array_equal(p1.levels[j], p3.levels[j])


def test_seeds_decorrelate_pyramids():
    a = generate_coefficients(SynthesisConfig(J=10, source=parabola_curve(), seed=0))
    b = generate_coefficients(SynthesisConfig(J=10, source=parabola_curve(), seed=1))
    assert not np.array_equal(a.levels[9], b.levels[9])


def test_coefficient_magnitudes_encode_exponents():
    j = 9
    cfg = SynthesisConfig(J=10, source=parabola_curve(), seed=2)
    pyr = generate_coefficients(cfg)
    u = uniform_field(2, j)
    law = scale_law_from_spectrum(parabola_curve(), j)
    alpha = sample_alphas(law, u[0])
    c = pyr.levels[j]
    finite = np.isfinite(alpha)
    assert np.array_equal(c == 0.0, ~finite)
    back = -np.log2(np.abs(c[finite])) / j
    assert np.max(np.abs(back - alpha[finite])) < 1e-12


def test_signs_are_symmetric_bernoulli():
    pyr = generate_coefficients(SynthesisConfig(J=12, source=DiracKernel(H=0.8), seed=0))
    c = pyr.levels[11]
    assert np.all(np.abs(c) > 0)
    frac = (c < 0).mean()
    assert abs(frac - 0.5) < 4 * np.sqrt(0.25 / c.size)


def test_scale_zero_conventions():
    by_kernel = generate_coefficients(SynthesisConfig(J=6, source=DiracKernel(H=0.8), seed=0))
    assert abs(by_kernel.levels[0][0]) == 1.0
    by_curve = generate_coefficients(SynthesisConfig(J=6, source=parabola_curve(), seed=0))
    assert by_curve.levels[0][0] == 0.0
    by_flat = generate_coefficients(SynthesisConfig(J=6, source=FlatLaw(0.7), seed=0))
    assert by_flat.levels[0][0] == 0.0
    assert by_kernel.coarse_mean == 0.0


def test_synthesize_produces_expected_length():
    x = synthesize(SynthesisConfig(J=8, source=parabola_curve(), seed=0))
    assert x.shape == (256,)
    assert np.all(np.isfinite(x))


def test_synthesize_warns_when_target_exceeds_wavelet_regularity():
    cfg = SynthesisConfig(J=6, source=DiracKernel(H=3.5), wavelet_order=4, seed=0)
    with pytest.warns(UserWarning, match="regularity"):
        synthesize(cfg)


def test_flat_rws_counts_and_magnitudes():
    pyr = flat_rws(0.7, 13, seed=5)
    assert pyr.J == 13
    for j in (10, 11, 12):
        c = pyr.levels[j]
        nz = c != 0
        assert np.all(np.abs(c[nz]) == 2.0 ** (-j * 0.7))
        # occupancy j 2^-j: loose 6-sigma bound per level
        mean = j
        assert abs(nz.sum() - mean) < 6 * np.sqrt(mean) + 1
    with pytest.raises(MathValidityError):
        flat_rws(-0.1, 10)
    with pytest.raises(MathValidityError):
        flat_rws(0.7, 0)

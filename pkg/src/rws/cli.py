"""Command-line front end.

    rws synth CONFIG [--out DIR] [--seed N] [--wavelet dbK]
    rws analyze SIGNAL [--out DIR] [--wavelet dbK] [--scales N] [--grid-step S]
    rws kernel VARIANT key=value ... [--out DIR] [--grid-step S]
    rws selftest

Exit codes: 0 success, 1 selftest failure, 2 malformed config or file,
3 mathematically invalid input (inadmissible spectrum, kernel threshold
violation, degenerate data).

Every writing command drops a ``manifest.txt`` next to its outputs
recording the resolved parameters, inputs, and outputs in a fixed key
order with the wall-clock duration last, so two runs of the same
command differ at most in paths and duration.
"""

import argparse
import os
import sys
import time

import numpy as np

from . import fileio
from .errors import ConfigError, FormatError, MathValidityError
from .estimation import analyze_pyramid
from .spectra import (
    GaussianKernel,
    LogDensity,
    ShiftedGammaKernel,
    ShiftedPoissonKernel,
    check_admissible,
    curve_from_function,
    kernel_alpha_star,
    rho_of_kernel,
    spectrum_from_rho,
)
from .synthesis import synthesize, validate_config
from .wavelet import daubechies_filter, forward_dwt, inverse_dwt, parse_wavelet_name


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="rws",
        description="Synthesize and analyze signals with prescribed multifractal spectra.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="generate a signal from a config file")
    s.add_argument("config", help="key=value config file")
    s.add_argument("--out", default=".", help="output directory (default: .)")
    s.add_argument("--seed", type=int, default=None, help="override the config seed")
    s.add_argument("--wavelet", default=None, help="override the config wavelet (db1..db10)")

    a = sub.add_parser("analyze", help="estimate the spectrum of a sampled signal")
    a.add_argument("signal", help="rws-sig binary or one-sample-per-line text")
    a.add_argument("--out", default=".", help="output directory (default: .)")
    a.add_argument("--wavelet", default="db3", help="analysis wavelet (default: db3)")
    a.add_argument("--scales", type=int, default=10, help="scales in each fit (default: 10)")
    a.add_argument("--grid-step", type=float, default=0.005, help="h grid step (default: 0.005)")

    k = sub.add_parser("kernel", help="tabulate a kernel density and its spectrum")
    k.add_argument("variant", help="gaussian | gamma | poisson | dirac")
    k.add_argument("params", nargs="*", help="kernel parameters as key=value")
    k.add_argument("--out", default=".", help="output directory (default: .)")
    k.add_argument("--grid-step", type=float, default=0.005, help="h grid step (default: 0.005)")

    sub.add_parser("selftest", help="run built-in consistency checks")
    return p


def _check_positive(value: float, name: str) -> None:
    if not value > 0:
        raise ConfigError(f"{name} must be positive, got {value}")


def cmd_synth(args) -> int:
    t0 = time.perf_counter()
    cfg, resolved = fileio.load_synthesis_config(args.config)
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be nonnegative")
        cfg.seed = args.seed
        resolved = [(k, cfg.seed if k == "seed" else v) for k, v in resolved]
    if args.wavelet is not None:
        cfg.wavelet_order = parse_wavelet_name(args.wavelet).order
        resolved = [(k, f"db{cfg.wavelet_order}" if k == "wavelet" else v) for k, v in resolved]
    validate_config(cfg)
    signal = synthesize(cfg)
    os.makedirs(args.out, exist_ok=True)
    sig_path = os.path.join(args.out, "signal.rws")
    fileio.write_signal(sig_path, signal)
    fileio.write_key_values(
        os.path.join(args.out, "manifest.txt"),
        [("command", "synth")]
        + resolved
        + [
            ("input", args.config),
            ("output", "signal.rws"),
            ("samples", 2**cfg.J),
            ("duration_s", time.perf_counter() - t0),
        ],
    )
    print(f"wrote {sig_path} ({2**cfg.J} samples, J={cfg.J}, seed={cfg.seed})")
    return 0


def cmd_analyze(args) -> int:
    t0 = time.perf_counter()
    _check_positive(args.grid_step, "--grid-step")
    if args.scales < 3:
        raise ConfigError(f"--scales must be at least 3, got {args.scales}")
    x = fileio.read_signal(args.signal)
    filt = parse_wavelet_name(args.wavelet)
    pyramid = forward_dwt(x, filt)
    result = analyze_pyramid(pyramid, scale_count=args.scales, grid_step=args.grid_step)
    os.makedirs(args.out, exist_ok=True)
    fileio.write_lambda_csv(
        os.path.join(args.out, "lambda.csv"), result.lambda_curve, result.closed_curve
    )
    fileio.write_tau_csv(os.path.join(args.out, "tau.csv"), result.tau_curve)
    fileio.write_estimate_csv(os.path.join(args.out, "spectrum.csv"), result.spectrum)
    meta = result.spectrum.meta
    j0, j1 = meta["scale_range"]
    fileio.write_key_values(
        os.path.join(args.out, "meta.txt"),
        [
            ("J", pyramid.J),
            ("wavelet", filt.name),
            ("scales", f"{j0}..{j1}"),
            ("q_c", meta["q_c"]),
            ("h_min", meta["h_min"]),
            ("h_max", meta["h_max"]),
            ("grid_step", args.grid_step),
        ],
    )
    fileio.write_key_values(
        os.path.join(args.out, "manifest.txt"),
        [
            ("command", "analyze"),
            ("wavelet", filt.name),
            ("scales", args.scales),
            ("grid_step", args.grid_step),
            ("input", args.signal),
            ("output", "lambda.csv,tau.csv,spectrum.csv,meta.txt"),
            ("duration_s", time.perf_counter() - t0),
        ],
    )
    print(
        f"analyzed {args.signal}: q_c={meta['q_c']:.4g}, "
        f"h range [{meta['h_min']:.4g}, {meta['h_max']:.4g}], scales {j0}..{j1}"
    )
    return 0


def _parse_cli_params(pairs) -> dict:
    params = {}
    for item in pairs:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"expected key=value, got {item!r}")
        if key in params:
            raise ConfigError(f"duplicate parameter {key!r}")
        try:
            params[key] = float(value)
        except ValueError:
            raise ConfigError(f"{key} must be a number, got {value!r}") from None
    return params


def cmd_kernel(args) -> int:
    t0 = time.perf_counter()
    _check_positive(args.grid_step, "--grid-step")
    kernel = fileio.build_kernel(args.variant, _parse_cli_params(args.params))
    curve = spectrum_from_rho(LogDensity.from_kernel(kernel), grid_step=args.grid_step)
    rho = rho_of_kernel(kernel, curve.h_grid)
    os.makedirs(args.out, exist_ok=True)
    fileio.write_density_csv(os.path.join(args.out, "rho.csv"), curve.h_grid, rho)
    fileio.write_spectrum_csv(os.path.join(args.out, "spectrum.csv"), curve)
    if isinstance(kernel, (ShiftedGammaKernel, ShiftedPoissonKernel)):
        astar = kernel_alpha_star(kernel)
        astar_text = f"{astar:.12g}"
    else:
        astar = None
        astar_text = "n/a"
    items = [("command", "kernel"), ("variant", args.variant)]
    items += sorted((k, v) for k, v in _parse_cli_params(args.params).items())
    items += [
        ("alpha_star", astar_text),
        ("h_min", curve.h_min),
        ("h_max", curve.h_max),
        ("grid_step", args.grid_step),
        ("output", "rho.csv,spectrum.csv"),
        ("duration_s", time.perf_counter() - t0),
    ]
    fileio.write_key_values(os.path.join(args.out, "manifest.txt"), items)
    print(
        f"kernel {args.variant}: h_min={curve.h_min:.6g}, h_max={curve.h_max:.6g}, "
        f"alpha*={astar_text}"
    )
    return 0


# ---------------------------------------------------------------------------
# selftest

def _selftest_spectrum():
    """Admissible reference curve whose density regenerates it exactly."""
    return curve_from_function(lambda h: (h - 0.5) ** 2, 0.5, 1.5)


_SELFTEST_KERNELS = (
    GaussianKernel(m=1.0, sigma=0.5),
    ShiftedGammaKernel(alpha0=0.1, nu=1.5, beta=4.0),
    ShiftedPoissonKernel(alpha0=0.0, c=1.0),
)


def _check_filter_qmf():
    for order in range(1, 11):
        f = daubechies_filter(order)
        lo = f.lowpass
        if abs(lo.sum() - np.sqrt(2.0)) > 1e-12:
            return f"db{order}: taps sum to {lo.sum()!r}, expected sqrt(2)"
        for m in range(lo.size // 2):
            dot = float(np.dot(lo[: lo.size - 2 * m], lo[2 * m :]))
            want = 1.0 if m == 0 else 0.0
            if abs(dot - want) > 1e-12:
                return f"db{order}: shift-{2 * m} autocorrelation {dot!r}, expected {want}"
    return None


def _check_perfect_reconstruction():
    gen = np.random.Generator(np.random.Philox(key=np.array([12345, 0], dtype=np.uint64)))
    x = gen.standard_normal(1024)
    for order in range(1, 11):
        f = daubechies_filter(order)
        y = inverse_dwt(forward_dwt(x, f), f)
        err = float(np.max(np.abs(y - x)))
        if err > 1e-9:
            return f"db{order}: roundtrip error {err:.3e} > 1e-9"
    return None


def _check_kernel_maxima():
    from .spectra import kernel_rho_peak

    for kernel in _SELFTEST_KERNELS:
        peak = kernel_rho_peak(kernel)
        at_peak = float(rho_of_kernel(kernel, peak))
        if abs(at_peak - 1.0) > 1e-9:
            return f"{type(kernel).__name__}: rho(peak) = {at_peak!r}, expected 1"
        scan = peak + np.linspace(-0.01, 0.01, 201)
        top = float(np.max(rho_of_kernel(kernel, scan)))
        if top > 1.0 + 1e-9:
            return f"{type(kernel).__name__}: rho exceeds 1 near its peak ({top!r})"
    return None


def _check_spectrum_identity():
    curve = _selftest_spectrum()
    report = check_admissible(curve)
    if not report.valid:
        return f"reference curve inadmissible: {'; '.join(report.violations)}"
    density = LogDensity.from_samples(curve.h_grid, curve.d_values)
    out = spectrum_from_rho(density)
    src = np.searchsorted(out.h_grid, curve.h_grid)
    err = float(np.nanmax(np.abs(out.d_values[src] - curve.d_values)))
    if err > 1e-9:
        return f"regenerated spectrum deviates by {err:.3e} > 1e-9"
    return None


def _selftest_checks():
    return [
        ("filter-qmf", _check_filter_qmf),
        ("perfect-reconstruction", _check_perfect_reconstruction),
        ("kernel-maxima", _check_kernel_maxima),
        ("spectrum-identity", _check_spectrum_identity),
    ]


def cmd_selftest(args) -> int:
    checks = _selftest_checks()
    failures = 0
    for name, fn in checks:
        try:
            detail = fn()
        except Exception as exc:  # a crash is a failure, not an abort
            detail = f"{type(exc).__name__}: {exc}"
        if detail is None:
            print(f"PASS {name}")
        else:
            failures += 1
            print(f"FAIL {name}: {detail}")
    print(f"{len(checks) - failures} of {len(checks)} checks passed")
    return 1 if failures else 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {
        "synth": cmd_synth,
        "analyze": cmd_analyze,
        "kernel": cmd_kernel,
        "selftest": cmd_selftest,
    }[args.command]
    try:
        return handler(args)
    except (ConfigError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MathValidityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

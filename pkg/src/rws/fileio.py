"""On-disk formats.

Signals travel either as ``rws-sig`` binary (magic ``RWS1``, three
little-endian uint32 header words: version = 1, J, reserved = 0, then
2**J float64 samples, little-endian) or as plain text with one sample
per line.  Readers sniff the magic, so either format can be handed to
any command.

Tabular outputs are comment-headed CSV: a single ``# col,col`` line
followed by rows formatted with 12 significant digits.  An empty cell
means the value is absent at that grid point (NaN or -inf in memory);
absent cells round-trip back to NaN / -inf.

Configs are flat ``key=value`` text; ``#`` lines and blank lines are
skipped and unknown keys are rejected rather than ignored.
"""

import math
import os
import struct

import numpy as np

from .errors import ConfigError, FormatError
from .spectra import (
    DiracKernel,
    GaussianKernel,
    LogDensity,
    ShiftedGammaKernel,
    ShiftedPoissonKernel,
    SpectrumCurve,
    curve_from_samples,
)
from .synthesis import FlatLaw, SynthesisConfig
from .wavelet import parse_wavelet_name

_MAGIC = b"RWS1"
_HEADER = struct.Struct("<4sIII")
_VERSION = 1


def _format_cell(x: float) -> str:
    """12-significant-digit cell; non-finite values serialize as absent."""
    if not math.isfinite(x):
        return ""
    if x == 0.0:
        x = 0.0  # normalize -0.0
    return f"{x:.12g}"


def _parse_cell(text: str, absent: float, path: str, line: int) -> float:
    if text == "":
        return absent
    try:
        return float(text)
    except ValueError:
        raise FormatError(f"{path}:{line}: not a number: {text!r}") from None


def _read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror or exc}") from None
    except UnicodeDecodeError:
        raise FormatError(f"{path}: not a text file") from None


def _rows(path: str, text: str, n_cols: int):
    """Yield (line_number, cells) for data rows of a comment-headed CSV."""
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != n_cols:
            raise FormatError(
                f"{path}:{ln}: expected {n_cols} comma-separated fields, got {len(cells)}"
            )
        yield ln, cells


# ---------------------------------------------------------------------------
# signals

def write_signal(path: str, samples: np.ndarray) -> None:
    x = np.ascontiguousarray(samples, dtype="<f8")
    n = x.size
    J = n.bit_length() - 1
    if n != 2**J:
        raise FormatError(f"sample count {n} is not a power of two")
    with open(path, "wb") as f:
        f.write(_HEADER.pack(_MAGIC, _VERSION, J, 0))
        f.write(x.tobytes())


def read_signal(path: str) -> np.ndarray:
    try:
        with open(path, "rb") as f:
            blob = f.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror or exc}") from None
    if blob[:4] == _MAGIC:
        if len(blob) < _HEADER.size:
            raise FormatError(f"{path}: truncated header")
        _, version, J, _reserved = _HEADER.unpack_from(blob)
        if version != _VERSION:
            raise FormatError(f"{path}: unsupported signal format version {version}")
        if J > 30:
            raise FormatError(f"{path}: implausible J = {J}")
        expected = _HEADER.size + 8 * 2**J
        if len(blob) != expected:
            raise FormatError(
                f"{path}: payload is {len(blob) - _HEADER.size} bytes, "
                f"header promises {8 * 2**J}"
            )
        return np.frombuffer(blob[_HEADER.size :], dtype="<f8").astype(np.float64)
    # text fallback: one sample per line
    try:
        text = blob.decode("utf-8")
    except UnicodeDecodeError:
        raise FormatError(f"{path}: neither rws-sig binary nor text") from None
    values = []
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise FormatError(f"{path}:{ln}: not a number: {line!r}") from None
    n = len(values)
    if n == 0 or n & (n - 1):
        raise FormatError(f"{path}: sample count {n} is not a positive power of two")
    return np.array(values, dtype=np.float64)


# ---------------------------------------------------------------------------
# spectra and densities

def write_spectrum_csv(path: str, curve: SpectrumCurve) -> None:
    lines = ["# h,d"]
    for h, d in zip(curve.h_grid, curve.d_values):
        lines.append(f"{_format_cell(h)},{_format_cell(d)}")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def read_spectrum_csv(path: str) -> SpectrumCurve:
    text = _read_text(path)
    hs, ds = [], []
    for ln, cells in _rows(path, text, 2):
        h = _parse_cell(cells[0], math.nan, path, ln)
        if not math.isfinite(h):
            raise FormatError(f"{path}:{ln}: h cell must be a finite number")
        hs.append(h)
        ds.append(_parse_cell(cells[1], math.nan, path, ln))
    if not hs:
        raise FormatError(f"{path}: no data rows")
    h = np.array(hs)
    d = np.array(ds)
    if h[0] <= 0 or np.any(np.diff(h) <= 0):
        raise FormatError(f"{path}: h column must be positive and strictly increasing")
    if not np.any(~np.isnan(d)):
        raise FormatError(f"{path}: every d cell is empty")
    return curve_from_samples(h, d)


def write_density_csv(path: str, alpha: np.ndarray, rho: np.ndarray) -> None:
    lines = ["# alpha,rho"]
    for a, r in zip(alpha, rho):
        lines.append(f"{_format_cell(a)},{_format_cell(r)}")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def read_density_csv(path: str) -> LogDensity:
    text = _read_text(path)
    al, rl = [], []
    for ln, cells in _rows(path, text, 2):
        a = _parse_cell(cells[0], math.nan, path, ln)
        if not math.isfinite(a):
            raise FormatError(f"{path}:{ln}: alpha cell must be a finite number")
        al.append(a)
        rl.append(_parse_cell(cells[1], -math.inf, path, ln))
    if not al:
        raise FormatError(f"{path}: no data rows")
    a = np.array(al)
    if a[0] <= 0 or np.any(np.diff(a) <= 0):
        raise FormatError(f"{path}: alpha column must be positive and strictly increasing")
    return LogDensity.from_samples(a, np.array(rl))


# ---------------------------------------------------------------------------
# estimation bundle

def write_lambda_csv(path: str, raw, closed) -> None:
    lines = ["# alpha,lambda,closed_lambda,residual"]
    for a, lam, bar, res in zip(
        raw.alpha_grid, raw.values, closed.values, raw.residuals
    ):
        lines.append(
            f"{_format_cell(a)},{_format_cell(lam)},{_format_cell(bar)},{_format_cell(res)}"
        )
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def write_tau_csv(path: str, tau) -> None:
    lines = ["# q,tau,residual"]
    for q, t, res in zip(tau.q_grid, tau.values, tau.residuals):
        lines.append(f"{_format_cell(q)},{_format_cell(t)},{_format_cell(res)}")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def write_estimate_csv(path: str, spectrum) -> None:
    lines = ["# h,d2,d1"]
    for h, d2, d1 in zip(spectrum.h_grid, spectrum.d2, spectrum.d1):
        lines.append(f"{_format_cell(h)},{_format_cell(d2)},{_format_cell(d1)}")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def write_key_values(path: str, items) -> None:
    """key=value lines; floats get 12 significant digits, rest str()."""
    lines = []
    for key, value in items:
        if isinstance(value, float):
            text = f"{value:.12g}"
        else:
            text = str(value)
        lines.append(f"{key}={text}")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# configs

KERNEL_PARAM_NAMES = {
    "gaussian": ("m", "sigma"),
    "gamma": ("alpha0", "nu", "beta"),
    "poisson": ("alpha0", "c"),
    "dirac": ("H",),
}

_KERNEL_CLASSES = {
    "gaussian": GaussianKernel,
    "gamma": ShiftedGammaKernel,
    "poisson": ShiftedPoissonKernel,
    "dirac": DiracKernel,
}


def build_kernel(name: str, params: dict):
    """Instantiate a kernel from its variant name and parameter dict."""
    if name not in KERNEL_PARAM_NAMES:
        known = ", ".join(sorted(KERNEL_PARAM_NAMES))
        raise ConfigError(f"unknown kernel variant {name!r} (known: {known})")
    needed = KERNEL_PARAM_NAMES[name]
    missing = [p for p in needed if p not in params]
    if missing:
        raise ConfigError(f"kernel {name} is missing parameters: {', '.join(missing)}")
    extra = [p for p in params if p not in needed]
    if extra:
        raise ConfigError(f"kernel {name} does not take: {', '.join(extra)}")
    return _KERNEL_CLASSES[name](**{p: float(params[p]) for p in needed})


def parse_key_values(text: str, path: str = "<config>") -> dict:
    out = {}
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"{path}:{ln}: expected key=value, got {raw.strip()!r}")
        if key in out:
            raise ConfigError(f"{path}:{ln}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def _take_float(raw: dict, key: str, path: str) -> float:
    if key not in raw:
        raise ConfigError(f"{path}: missing required key {key!r}")
    value = raw.pop(key)
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{path}: {key} must be a number, got {value!r}") from None


def _take_int(raw: dict, key: str, path: str, default=None) -> int:
    if key not in raw:
        if default is None:
            raise ConfigError(f"{path}: missing required key {key!r}")
        return default
    value = raw.pop(key)
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{path}: {key} must be an integer, got {value!r}") from None


def load_synthesis_config(path: str):
    """Parse a synth config file.

    Returns (SynthesisConfig, resolved) where resolved is the ordered
    list of (key, value) pairs actually in effect, for the manifest.
    """
    raw = parse_key_values(_read_text(path), path)
    if "mode" not in raw:
        raise ConfigError(f"{path}: missing required key 'mode'")
    mode = raw.pop("mode")
    J = _take_int(raw, "J", path)
    seed = _take_int(raw, "seed", path, default=0)
    wavelet = raw.pop("wavelet", "db10")
    try:
        order = parse_wavelet_name(wavelet).order
    except Exception as exc:
        raise ConfigError(f"{path}: {exc}") from None
    resolved = [("mode", mode), ("J", J), ("seed", seed), ("wavelet", f"db{order}")]

    if mode == "spectrum":
        if "spectrum_file" not in raw:
            raise ConfigError(f"{path}: mode=spectrum needs spectrum_file")
        rel = raw.pop("spectrum_file")
        spath = os.path.normpath(os.path.join(os.path.dirname(os.path.abspath(path)), rel))
        source = read_spectrum_csv(spath)
        resolved.append(("spectrum_file", rel))
    elif mode == "kernel":
        if "kernel" not in raw:
            raise ConfigError(f"{path}: mode=kernel needs a kernel variant")
        name = raw.pop("kernel")
        if name not in KERNEL_PARAM_NAMES:
            known = ", ".join(sorted(KERNEL_PARAM_NAMES))
            raise ConfigError(f"{path}: unknown kernel variant {name!r} (known: {known})")
        params = {p: _take_float(raw, p, path) for p in KERNEL_PARAM_NAMES[name]}
        source = build_kernel(name, params)
        resolved.append(("kernel", name))
        resolved.extend(sorted(params.items()))
    elif mode == "flat":
        alpha0 = _take_float(raw, "alpha0", path)
        source = FlatLaw(alpha0)
        resolved.append(("alpha0", alpha0))
    else:
        raise ConfigError(f"{path}: unknown mode {mode!r} (known: spectrum, kernel, flat)")

    if raw:
        keys = ", ".join(sorted(raw))
        raise ConfigError(f"{path}: unknown config keys: {keys}")
    cfg = SynthesisConfig(J=J, source=source, wavelet_order=order, seed=seed)
    return cfg, resolved

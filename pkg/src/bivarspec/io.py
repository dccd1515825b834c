"""File formats: signal and spectrum CSVs, key-value spec files, manifests.

CSVs have a mandatory header row, ``.`` decimal separator and LF line
endings.  Floats are written with 17 significant digits so that reading a
file back gives the exact in-memory values.  Undefined attributes are left
blank.
"""

import csv
import hashlib
import json

import numpy as np

from .mcstudy import BiasStudyConfig
from .polar import stokes_to_quaternion
from .sigmodel import MonochromaticSpec, WhiteNoiseSpec

SPECTRUM_COLUMNS = ("nu", "S0", "S1", "S2", "S3", "s1", "s2", "s3", "phi")
SIGNAL_COLUMNS = ("t", "u", "v")
SIGNAL_KINDS = ("monochromatic", "white_noise", "tone_plus_noise")


class FormatError(ValueError):
    """Malformed input file; the message carries the line number."""


class SpecError(ValueError):
    """Invalid key in a spec or config file."""

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key


def fmt(value):
    if value is np.ma.masked:
        return ""
    return format(float(value), ".17g")


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def write_signal_csv(path, x):
    x = np.asarray(x, dtype=complex)
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(SIGNAL_COLUMNS)
        for t, (u, v) in enumerate(zip(x.real, x.imag)):
            w.writerow((t, fmt(u), fmt(v)))


def _read_table(path, expected):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise FormatError(f"{path}: line 1: missing header row")
    header = [h.strip() for h in rows[0]]
    if tuple(header[: len(expected)]) != tuple(expected):
        raise FormatError(f"{path}: line 1: expected header {','.join(expected)}, got {','.join(header)}")
    return header, rows[1:]


def _parse_float(cell, path, lineno, column, allow_blank=False):
    cell = cell.strip()
    if cell == "" and allow_blank:
        return None
    try:
        value = float(cell)
    except ValueError:
        raise FormatError(f"{path}: line {lineno}: column {column!r} is not numeric: {cell!r}") from None
    if not np.isfinite(value):
        raise FormatError(f"{path}: line {lineno}: column {column!r} is not finite")
    return value


def read_signal_csv(path):
    _, rows = _read_table(path, SIGNAL_COLUMNS)
    u, v = [], []
    for lineno, row in enumerate(rows, start=2):
        if len(row) < 3:
            raise FormatError(f"{path}: line {lineno}: expected 3 columns, got {len(row)}")
        t = _parse_float(row[0], path, lineno, "t")
        if t != lineno - 2:
            raise FormatError(f"{path}: line {lineno}: expected t = {lineno - 2}, got {row[0]}")
        u.append(_parse_float(row[1], path, lineno, "u"))
        v.append(_parse_float(row[2], path, lineno, "v"))
    if not u:
        raise FormatError(f"{path}: no samples")
    return np.array(u) + 1j * np.array(v)


def write_spectrum_csv(path, stokes, bins=None):
    """Write ``nu, S0..S3, s1..s3, phi`` rows for the selected bins."""
    bins = np.arange(len(stokes.nu)) if bins is None else bins
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(SPECTRUM_COLUMNS)
        for k in bins:
            w.writerow([fmt(getattr(stokes, c)[k]) for c in SPECTRUM_COLUMNS])


def read_spectrum_csv(path):
    """Return ``(nu, G)`` with ``G`` rebuilt from the S0..S3 columns."""
    _, rows = _read_table(path, SPECTRUM_COLUMNS)
    nu, S = [], []
    for lineno, row in enumerate(rows, start=2):
        if len(row) < len(SPECTRUM_COLUMNS):
            raise FormatError(f"{path}: line {lineno}: expected {len(SPECTRUM_COLUMNS)} columns, got {len(row)}")
        nu.append(_parse_float(row[0], path, lineno, "nu"))
        S.append([_parse_float(row[i], path, lineno, SPECTRUM_COLUMNS[i]) for i in range(1, 5)])
        for i in range(5, 9):
            _parse_float(row[i], path, lineno, SPECTRUM_COLUMNS[i], allow_blank=True)
    if not nu:
        raise FormatError(f"{path}: no spectrum rows")
    S = np.array(S)
    return np.array(nu), stokes_to_quaternion(S[:, 0], S[:, 1], S[:, 2], S[:, 3])


def write_poincare_csv(path, stokes, bins=None):
    bins = np.arange(len(stokes.nu)) if bins is None else bins
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(("nu", "phi", "two_theta", "two_chi"))
        for k in bins:
            theta, chi = stokes.theta[k], stokes.chi[k]
            w.writerow(
                (
                    fmt(stokes.nu[k]),
                    fmt(stokes.phi[k]),
                    fmt(2 * theta) if theta is not np.ma.masked else "",
                    fmt(2 * chi) if chi is not np.ma.masked else "",
                )
            )


def write_bias_csv(path, table):
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(("phi_true", "m", "bias", "stderr"))
        for phi, m, bias, se in table.rows():
            w.writerow((fmt(phi), m, fmt(bias), fmt(se)))


def write_section5_csv(path, report, bins=None):
    bins = np.arange(len(report.nu) // 2 + 1) if bins is None else bins
    columns = ("S0", "s1", "s2", "s3", "phi")
    sources = ("theory", "periodogram", "multitaper")
    stokes = {s: report.stokes(s) for s in sources}
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(["nu"] + [f"{s}_{c}" for s in sources for c in columns])
        for k in bins:
            w.writerow([fmt(report.nu[k])] + [fmt(getattr(stokes[s], c)[k]) for s in sources for c in columns])


def read_kv_file(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise FormatError(f"{path}: line {lineno}: expected 'key = value', got {line!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            if not key:
                raise FormatError(f"{path}: line {lineno}: empty key")
            if key in out:
                raise SpecError(key, f"duplicate key on line {lineno}")
            out[key.lower()] = value
    return out


def _number(kv, key, default=None, cast=float):
    if key not in kv:
        if default is None:
            raise SpecError(key, "missing required key")
        return default
    try:
        value = cast(kv[key])
    except ValueError:
        raise SpecError(key, f"not a valid number: {kv[key]!r}") from None
    if cast is float and not np.isfinite(value):
        raise SpecError(key, "must be finite")
    return value


def _check_keys(kv, allowed):
    unknown = sorted(set(kv) - set(allowed))
    if unknown:
        raise SpecError(unknown[0], "unknown key")


def parse_signal_spec(kv):
    """Turn a key-value mapping into generator specs.

    Keys: ``kind`` (monochromatic, white_noise or tone_plus_noise), ``a``,
    ``theta``, ``chi``, ``nu0`` for the tone; ``s0``, ``phi``, ``theta`` for
    noise (``noise_theta`` when both are present); ``seed`` and ``n``.

    Returns ``(kind, tone, noise, n, seed)`` with unused specs set to None.
    """
    kind = kv.get("kind")
    if kind not in SIGNAL_KINDS:
        raise SpecError("kind", f"must be one of {', '.join(SIGNAL_KINDS)}, got {kind!r}")
    common = ("kind", "seed", "n")
    tone_keys = ("a", "theta", "chi", "nu0")
    noise_keys = ("s0", "phi", "theta") if kind == "white_noise" else ("s0", "phi", "noise_theta")
    allowed = common + (tone_keys if kind != "white_noise" else ()) + (noise_keys if kind != "monochromatic" else ())
    _check_keys(kv, allowed)
    n = _number(kv, "n", default=1024, cast=int)
    if n < 1:
        raise SpecError("n", f"must be at least 1, got {n}")
    seed = _number(kv, "seed", default=0, cast=int)
    tone = noise = None
    if kind != "white_noise":
        a = _number(kv, "a", 1.0)
        theta = _number(kv, "theta", 0.0)
        chi = _number(kv, "chi", 0.0)
        nu0 = _number(kv, "nu0")
        for key, ok in (("a", a > 0), ("chi", abs(chi) <= np.pi / 4 + 1e-12), ("nu0", 0 < nu0 < 0.5)):
            if not ok:
                raise SpecError(key, f"out of range: {kv.get(key)}")
        tone = MonochromaticSpec(a=a, theta=theta, chi=chi, nu0=nu0)
    if kind != "monochromatic":
        theta_key = "theta" if kind == "white_noise" else "noise_theta"
        s0 = _number(kv, "s0", 1.0)
        phi = _number(kv, "phi", 0.0)
        theta = _number(kv, theta_key, 0.0)
        if not s0 > 0:
            raise SpecError("s0", f"must be positive, got {kv.get('s0')}")
        if not 0 <= phi <= 1:
            raise SpecError("phi", f"must lie in [0, 1], got {kv.get('phi')}")
        noise = WhiteNoiseSpec(s0=s0, phi=phi, theta=theta, seed=seed)
    return kind, tone, noise, n, seed


def parse_bias_config(kv):
    """Keys: ``phi_grid`` and ``m_values`` (comma lists), ``n``, ``replicates``, ``seed``."""
    _check_keys(kv, ("phi_grid", "m_values", "n", "replicates", "seed"))
    defaults = BiasStudyConfig()

    def _list(key, cast, default):
        if key not in kv:
            return default
        try:
            return tuple(cast(s) for s in kv[key].split(",") if s.strip())
        except ValueError:
            raise SpecError(key, f"not a comma-separated list of numbers: {kv[key]!r}") from None

    phi_grid = _list("phi_grid", float, defaults.phi_grid)
    m_values = _list("m_values", int, defaults.m_values)
    for phi in phi_grid:
        if not 0 <= phi <= 1:
            raise SpecError("phi_grid", f"value {phi} outside [0, 1]")
    for m in m_values:
        if m < 1:
            raise SpecError("m_values", f"value {m} below 1")
    n = _number(kv, "n", defaults.n, cast=int)
    if n < 4:
        raise SpecError("n", f"must be at least 4, got {n}")
    reps = _number(kv, "replicates", defaults.replicates_per_cell, cast=int)
    if reps < 1:
        raise SpecError("replicates", f"must be at least 1, got {reps}")
    seed = _number(kv, "seed", defaults.seed, cast=int)
    return BiasStudyConfig(phi_grid=phi_grid, m_values=m_values, n=n, replicates_per_cell=reps, seed=seed)


def sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(path, manifest):
    with open(path, "w", newline="") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_manifest(path):
    with open(path) as fh:
        return json.load(fh)

"""``bivarspec`` command line: simulate, estimate, average, run studies, replay.

Every command writes ``<out>.manifest.json`` (``manifest.json`` inside the
output directory for ``section5``) recording the parameters, seed, package
version, output hashes and wall-clock time.  ``bivarspec replay MANIFEST``
re-runs the command and checks the outputs are byte-identical.

Exit codes: 0 success, 1 replay mismatch, 2 invalid input, 3 I/O error,
4 numerical failure.
"""

import argparse
import os
import sys
import tempfile
import time

import numpy as np

from . import __version__
from . import io as bio
from .mcstudy import run_bias_study, run_section5_experiment
from .polar import StokesSpectrum
from .qft import frequencies, positive_bins
from .sigmodel import gen_monochromatic, gen_tone_plus_noise, gen_white_noise
from .specest import multitaper_estimate, polarization_periodogram, rectangular_taper, slepian_tapers

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4

# parameters naming files the command writes, and the ones it reads
OUTPUT_PARAMS = ("out", "poincare", "out_dir")
INPUT_PARAMS = ("spec", "signal", "inputs", "config")


def _spectrum_bins(n, full):
    return np.arange(n) if full else positive_bins(n)


def cmd_simulate(args):
    kv = bio.read_kv_file(args.spec)
    if args.n is not None:
        kv["n"] = str(args.n)
    if args.seed is not None:
        kv["seed"] = str(args.seed)
    kind, tone, noise, n, seed = bio.parse_signal_spec(kv)
    if kind == "monochromatic":
        x = gen_monochromatic(tone, n)
    elif kind == "white_noise":
        x = gen_white_noise(noise, n, replicate=args.replicate)
    else:
        x = gen_tone_plus_noise(tone, noise, n, replicate=args.replicate)
    bio.write_signal_csv(args.out, x)
    return [args.out], seed


def _estimate_one(x, args):
    if args.method == "periodogram":
        return polarization_periodogram(x)
    if args.taper == "rectangular":
        if args.k != 1:
            raise ValueError("k: the rectangular taper is a single taper, use --k 1")
        tapers = rectangular_taper(len(x))
    else:
        tapers = slepian_tapers(len(x), args.nw, args.k)
    return multitaper_estimate(x, tapers)


def cmd_estimate(args):
    x = bio.read_signal_csv(args.signal)
    G = _estimate_one(x, args)
    n = len(x)
    stokes = StokesSpectrum.from_density(G, frequencies(n))
    bins = _spectrum_bins(n, args.full_spectrum)
    bio.write_spectrum_csv(args.out, stokes, bins)
    outputs = [args.out]
    if args.poincare:
        bio.write_poincare_csv(args.poincare, stokes, bins)
        outputs.append(args.poincare)
    return outputs, None


def cmd_average(args):
    grids, densities = [], []
    for path in args.inputs:
        nu, G = bio.read_spectrum_csv(path)
        grids.append(nu)
        densities.append(G)
    for path, nu in zip(args.inputs[1:], grids[1:]):
        if nu.shape != grids[0].shape or not np.array_equal(nu, grids[0]):
            raise ValueError(
                f"inputs: {path} has a different frequency grid ({len(nu)} rows) "
                f"than {args.inputs[0]} ({len(grids[0])} rows)"
            )
    # S components are averaged and phi re-derived from them
    total = densities[0].copy()
    for G in densities[1:]:
        total += G
    mean = total / len(densities)
    stokes = StokesSpectrum.from_density(mean, grids[0])
    bio.write_spectrum_csv(args.out, stokes)
    return [args.out], None


def cmd_bias_study(args):
    cfg = bio.parse_bias_config(bio.read_kv_file(args.config))
    table = run_bias_study(cfg, n_jobs=args.threads)
    bio.write_bias_csv(args.out, table)
    return [args.out], cfg.seed


def cmd_section5(args):
    os.makedirs(args.out_dir, exist_ok=True)
    report = run_section5_experiment(seed=args.seed, m=args.m, n_tapers=args.k, n=args.n, bandwidth=args.nw)
    bins = _spectrum_bins(args.n, args.full_spectrum)
    outputs = []
    for name in ("theory", "periodogram", "multitaper"):
        path = os.path.join(args.out_dir, f"{name}.csv")
        bio.write_spectrum_csv(path, report.stokes(name), bins)
        outputs.append(path)
    path = os.path.join(args.out_dir, "report.csv")
    bio.write_section5_csv(path, report, bins)
    outputs.append(path)
    path = os.path.join(args.out_dir, "poincare_multitaper.csv")
    bio.write_poincare_csv(path, report.stokes("multitaper"), bins)
    outputs.append(path)
    return outputs, args.seed


COMMANDS = {
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "average": cmd_average,
    "bias-study": cmd_bias_study,
    "section5": cmd_section5,
}


def _manifest_path(command, params):
    if command == "section5":
        return os.path.join(params["out_dir"], "manifest.json")
    return params["out"] + ".manifest.json"


def _input_hashes(params):
    out = {}
    for key in INPUT_PARAMS:
        value = params.get(key)
        for path in [value] if isinstance(value, str) else value or []:
            out[path] = bio.sha256(path)
    return out


def _absolute_paths(params):
    out = dict(params)
    for key in INPUT_PARAMS + OUTPUT_PARAMS:
        value = out.get(key)
        if isinstance(value, str):
            out[key] = os.path.abspath(value)
        elif isinstance(value, list):
            out[key] = [os.path.abspath(v) for v in value]
    return out


def run_command(command, params):
    """Run ``command`` with a parameter dict, write its manifest, return it."""
    args = argparse.Namespace(**params)
    start = time.perf_counter()
    outputs, seed = COMMANDS[command](args)
    manifest = {
        "command": command,
        "params": params,
        "seed": seed,
        "version": __version__,
        "inputs": _input_hashes(params),
        "outputs": [{"path": p, "sha256": bio.sha256(p)} for p in outputs],
        "duration_s": time.perf_counter() - start,
    }
    bio.write_manifest(_manifest_path(command, params), manifest)
    return manifest


def _redirect(params, target_dir):
    params = dict(params)
    for key in OUTPUT_PARAMS:
        if params.get(key):
            params[key] = target_dir if key == "out_dir" else os.path.join(target_dir, os.path.basename(params[key]))
    return params


def cmd_replay(manifest_path, out_dir=None):
    """Re-run a manifest into ``out_dir`` (a temporary directory by default)."""
    manifest = bio.read_manifest(manifest_path)
    command = manifest.get("command")
    if command not in COMMANDS:
        raise ValueError(f"command: unknown command {command!r} in manifest")
    for path, digest in manifest.get("inputs", {}).items():
        if bio.sha256(path) != digest:
            raise ValueError(f"inputs: {path} changed since the manifest was written")
    with tempfile.TemporaryDirectory() as tmp:
        target = out_dir or tmp
        os.makedirs(target, exist_ok=True)
        params = _redirect(manifest["params"], target)
        fresh = run_command(command, params)
        recorded = {os.path.basename(o["path"]): o["sha256"] for o in manifest["outputs"]}
        produced = {os.path.basename(o["path"]): o["sha256"] for o in fresh["outputs"]}
    diffs = sorted(k for k in recorded.keys() | produced.keys() if recorded.get(k) != produced.get(k))
    return diffs


def build_parser():
    parser = argparse.ArgumentParser(prog="bivarspec", description="Quaternion spectral analysis of bivariate signals.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a signal CSV from a key=value spec file")
    p.add_argument("spec")
    p.add_argument("--n", type=int, help="number of samples (overrides the spec file)")
    p.add_argument("--seed", type=int, help="master seed (overrides the spec file)")
    p.add_argument("--replicate", type=int, help="realization index; draws from stream (seed, replicate)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("estimate", help="spectrum CSV from a signal CSV")
    p.add_argument("signal")
    p.add_argument("--method", choices=("periodogram", "multitaper"), default="periodogram")
    p.add_argument("--k", type=int, default=5, help="number of tapers")
    p.add_argument("--nw", type=float, default=4.0, help="time-bandwidth product")
    p.add_argument("--taper", choices=("slepian", "rectangular"), default="slepian")
    p.add_argument("--full-spectrum", action="store_true", help="write all N bins, not just 0..N/2")
    p.add_argument("--poincare", help="also write nu, phi, 2 theta, 2 chi to this CSV")
    p.add_argument("--out", required=True)

    p = sub.add_parser("average", help="average spectrum CSVs; phi is recomputed from the summed components")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out", required=True)

    p = sub.add_parser("bias-study", help="bias of the averaged degree-of-polarization estimate")
    p.add_argument("config")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: available cores)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("section5", help="tone in polarized noise: theory, periodogram and multitaper")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--m", type=int, default=20, help="number of realizations")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--nw", type=float, default=4.0)
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--full-spectrum", action="store_true")
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("replay", help="re-run a manifest and compare output hashes")
    p.add_argument("manifest")
    p.add_argument("--out-dir", help="keep the regenerated files here")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code else EXIT_OK
    try:
        if args.command == "replay":
            diffs = cmd_replay(args.manifest, args.out_dir)
            if diffs:
                print(f"bivarspec: outputs differ: {', '.join(diffs)}", file=sys.stderr)
                return EXIT_MISMATCH
            print("bivarspec: outputs reproduced byte-for-byte")
            return EXIT_OK
        params = _absolute_paths({k: v for k, v in vars(args).items() if k != "command"})
        run_command(args.command, params)
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"bivarspec: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, KeyError, ZeroDivisionError) as exc:
        print(f"bivarspec: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"bivarspec: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

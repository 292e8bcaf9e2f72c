"""Batch command-line front-end.

Subcommands
-----------
rates     : rate curves over a (d, sigma) grid -> CSV
design    : Monte-Carlo code construction -> one artifact JSON per block size + summary CSV
simulate  : block simulation of a designed artifact -> report JSON + CSV row
loss      : pure-loss capacity sequence -> CSV
selftest  : quick numeric self checks

Every run that writes files also writes a manifest (subcommand, full flag
set, seed, tool version, wall time) alongside them, and every stochastic
subcommand requires an explicit --seed: there are no wall-clock defaults, so
outputs are reproducible from their manifests.  Exit codes: 0 success,
2 usage/validation error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .channel import ChannelSpec, is_prime
from .design import artifact_from_json, artifact_to_json, design_code
from .loss import capacity_sequence
from .quadrature import NumericError
from .rates import (coherent_info_displacement, rate_analog, rate_no_analog,
                    rate_rect, rate_selfdual_staircase)
from .sim import SimConfig, estimate_logical_error

RATES_COLUMNS = ["d", "sigma", "i_analog", "i_no_analog", "i_coherent", "i_staircase"]
DESIGN_COLUMNS = ["d", "sigma", "n", "alpha", "rate_bits_per_mode", "pe1_bound",
                  "pe2_bound", "size_I", "size_A", "size_P", "size_E",
                  "m_samples", "seed"]
SIM_COLUMNS = ["d", "sigma", "n", "alpha", "rate_bits", "pe1_bound", "pe2_bound",
               "trials", "p1_hat", "p2_hat", "ci1_lo", "ci1_hi", "ci2_lo",
               "ci2_hi", "seed"]
LOSS_COLUMNS = ["d", "logN", "K_over_N", "rate_bits", "log_eps_bound"]


class UsageError(ValueError):
    """Bad flag values; maps to exit code 2."""


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t]
    except ValueError as exc:
        raise UsageError(f"expected a comma-separated integer list, got {text!r}") from exc


def _parse_sigma_grid(text: str) -> list[float]:
    """Grid syntax start:stop:step (inclusive of both ends when stop is on the
    grid, to within 1e-9 relative), or a comma-separated list of values."""
    try:
        if ":" in text:
            start, stop, step = (float(t) for t in text.split(":"))
            if step <= 0 or stop < start:
                raise UsageError(f"bad sigma grid {text!r}")
            kmax = int(math.floor((stop - start) / step + 1e-9))
            return [start + k * step for k in range(kmax + 1)]
        return [float(t) for t in text.split(",") if t]
    except ValueError as exc:
        raise UsageError(f"expected start:stop:step or a float list, got {text!r}") from exc


def _workers(args) -> int:
    if args.workers is not None:
        return max(1, args.workers)
    env = os.environ.get("GKP_POLAR_WORKERS")
    return max(1, int(env)) if env else 1


def _write_manifest(path: str, subcommand: str, args: argparse.Namespace,
                    outputs: list[str], wall_time: float) -> None:
    flags = {k: v for k, v in vars(args).items() if k != "func"}
    doc = {"subcommand": subcommand, "flags": flags,
           "seed": flags.get("seed"), "tool_version": __version__,
           "wall_time_s": round(wall_time, 3), "outputs": outputs}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True, default=str)
        fh.write("\n")


# --- rates -------------------------------------------------------------------

def cmd_rates(args) -> int:
    t0 = time.monotonic()
    d_list = _parse_int_list(args.d)
    for d in d_list:
        if not is_prime(d):
            raise UsageError(f"d must be prime, got {d}")
    sigmas = _parse_sigma_grid(args.sigma)
    if any(s <= 0 for s in sigmas):
        raise UsageError("sigma values must be positive")
    if args.rect is not None and args.rect < 1.0:
        raise UsageError("--rect aspect ratio must be >= 1")

    header = list(RATES_COLUMNS)
    if args.rect is not None:
        header.append("i_rect_f")

    def one(point):
        d, sigma = point
        spec = ChannelSpec(d, sigma)
        row = [d, sigma, rate_analog(spec).value_bits,
               rate_no_analog(spec).value_bits,
               coherent_info_displacement(sigma),
               rate_selfdual_staircase(sigma)]
        if args.rect is not None:
            row.append(rate_rect(spec, args.rect).value_bits)
        return row

    points = [(d, s) for d in d_list for s in sigmas]
    nw = _workers(args)
    if nw > 1:
        with ThreadPoolExecutor(max_workers=nw) as pool:
            rows = list(pool.map(one, points))
    else:
        rows = [one(p) for p in points]

    out = sys.stdout if args.out is None else open(args.out, "w", newline="")
    try:
        w = csv.writer(out)
        w.writerow(header)
        w.writerows(rows)
    finally:
        if args.out is not None:
            out.close()
            _write_manifest(args.out + ".manifest.json", "rates", args,
                            [args.out], time.monotonic() - t0)
    return 0


# --- design --------------------------------------------------------------------

def cmd_design(args) -> int:
    t0 = time.monotonic()
    if not is_prime(args.d):
        raise UsageError(f"d must be prime, got {args.d}")
    if args.sigma <= 0:
        raise UsageError("sigma must be positive")
    n_list = _parse_int_list(args.n_list)
    if n_list != sorted(set(n_list)) or min(n_list) < 1:
        raise UsageError("--n-list must be ascending positive exponents")
    spec = ChannelSpec(args.d, args.sigma)
    os.makedirs(args.out_dir, exist_ok=True)

    def one(n):
        return design_code(spec, n, args.alpha, args.m, (args.c_e, args.beta), args.seed)

    nw = _workers(args)
    if nw > 1:
        with ThreadPoolExecutor(max_workers=nw) as pool:
            arts = list(pool.map(one, n_list))
    else:
        arts = [one(n) for n in n_list]

    outputs = []
    summary_rows = []
    for art in arts:
        path = os.path.join(args.out_dir, f"artifact_n{art.n}.json")
        with open(path, "w") as fh:
            fh.write(artifact_to_json(art))
            fh.write("\n")
        outputs.append(path)
        zmax = np.maximum(art.z.z1, art.z.z2)
        counts, edges = np.histogram(zmax, bins=50, range=(0.0, 1.0))
        hist_path = os.path.join(args.out_dir, f"zmax_hist_n{art.n}.csv")
        with open(hist_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["bin_lo", "bin_hi", "count"])
            for lo, hi, c in zip(edges[:-1], edges[1:], counts):
                w.writerow([lo, hi, int(c)])
        outputs.append(hist_path)
        summary_rows.append([art.d, art.sigma, art.n, art.alpha,
                             art.rate_bits_per_mode, art.pe1_bound, art.pe2_bound,
                             len(art.sets.info), len(art.sets.amp_frozen),
                             len(art.sets.phase_frozen), len(art.sets.entangled),
                             art.m_samples, art.seed])

    summary = os.path.join(args.out_dir, "summary.csv")
    with open(summary, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(DESIGN_COLUMNS)
        w.writerows(summary_rows)
    outputs.append(summary)
    _write_manifest(os.path.join(args.out_dir, "manifest.json"), "design", args,
                    outputs, time.monotonic() - t0)
    return 0


# --- simulate --------------------------------------------------------------------

def cmd_simulate(args) -> int:
    t0 = time.monotonic()
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    with open(args.artifact) as fh:
        try:
            art = artifact_from_json(fh.read())
        except (ValueError, json.JSONDecodeError) as exc:
            raise UsageError(f"malformed artifact {args.artifact}: {exc}") from exc

    report = estimate_logical_error(SimConfig(art, args.trials, args.seed),
                                    random_codeword=args.random_codeword)
    doc = {
        "d": art.d, "sigma": art.sigma, "n": art.n, "alpha": art.alpha,
        "rate_bits": art.rate_bits_per_mode,
        "pe1_bound": art.pe1_bound, "pe2_bound": art.pe2_bound,
        "trials": report.trials,
        "amp_failures": report.amp_failures, "phase_failures": report.phase_failures,
        "p1_hat": report.p1_hat, "p2_hat": report.p2_hat,
        "ci95_1": list(report.ci95_1), "ci95_2": list(report.ci95_2),
        "seed": args.seed,
        "within_designed_bounds": bool(report.ci95_1[0] <= art.pe1_bound
                                       and report.ci95_2[0] <= art.pe2_bound),
    }
    print(f"p1_hat={report.p1_hat:.6g} (bound {art.pe1_bound:.6g})  "
          f"p2_hat={report.p2_hat:.6g} (bound {art.pe2_bound:.6g})  "
          f"within_bounds={doc['within_designed_bounds']}")

    outputs = []
    if args.out is not None:
        with open(args.out, "w") as fh:
            json.dump(doc, fh, indent=1, sort_keys=True)
            fh.write("\n")
        outputs.append(args.out)
    if args.csv is not None:
        new = not os.path.exists(args.csv)
        with open(args.csv, "a", newline="") as fh:
            w = csv.writer(fh)
            if new:
                w.writerow(SIM_COLUMNS)
            w.writerow([art.d, art.sigma, art.n, art.alpha, art.rate_bits_per_mode,
                        art.pe1_bound, art.pe2_bound, report.trials,
                        report.p1_hat, report.p2_hat,
                        report.ci95_1[0], report.ci95_1[1],
                        report.ci95_2[0], report.ci95_2[1], args.seed])
        outputs.append(args.csv)
    if args.out is not None:
        _write_manifest(args.out + ".manifest.json", "simulate", args, outputs,
                        time.monotonic() - t0)
    return 0


# --- loss ------------------------------------------------------------------------

def cmd_loss(args) -> int:
    t0 = time.monotonic()
    if not 0.0 < args.eta < 1.0:
        raise UsageError(f"--eta must lie in (0, 1), got {args.eta}")
    d_list = _parse_int_list(args.d)
    for d in d_list:
        if d % 4 != 3 or not is_prime(d):
            raise UsageError(f"d = {d} rejected: the sequence requires prime d = 3 (mod 4)")
    points = capacity_sequence(args.eta, d_list)
    out = sys.stdout if args.out is None else open(args.out, "w", newline="")
    try:
        w = csv.writer(out)
        w.writerow(LOSS_COLUMNS)
        for p in points:
            w.writerow([p.d, p.log_n, p.k_over_n, p.rate_bits, p.log_eps_bound])
    finally:
        if args.out is not None:
            out.close()
            _write_manifest(args.out + ".manifest.json", "loss", args,
                            [args.out], time.monotonic() - t0)
    return 0


# --- selftest ----------------------------------------------------------------------

def cmd_selftest(args) -> int:
    from .channel import p_joint, p_joint_gauss_sum, p_joint_theta_series
    from .polar import PolarCodeSpec, polar_encode, polar_encode_inverse
    from .quadrature import composite_gl
    from .theta import duality_residual

    checks = []

    res = max(duality_residual(t) for t in (0.3, 0.5, 1.0, 2.0, 3.0))
    checks.append(("theta duality residual < 1e-10", res < 1e-10, f"max={res:.3e}"))

    spec = ChannelSpec(3, 0.5)
    total = sum(composite_gl(lambda s, u=u: p_joint(spec, u, s), -0.5, 0.5)[0]
                for u in range(3))
    checks.append(("p_joint normalisation", abs(total - 1.0) < 1e-10,
                   f"sum={total:.15f}"))

    spec2 = ChannelSpec(5, 1.1)
    pts = np.linspace(-0.49, 0.49, 7)
    gap = max(abs(p_joint_theta_series(spec2, u, float(s))
                  - p_joint_gauss_sum(spec2, u, float(s)))
              / p_joint_gauss_sum(spec2, u, float(s))
              for u in range(5) for s in pts)
    checks.append(("theta/Gaussian Poisson pair", gap < 1e-12, f"max rel={gap:.3e}"))

    code = PolarCodeSpec(4, 5, 2)
    rng = np.random.default_rng(7)
    u = rng.integers(0, 5, size=16)
    ok = np.array_equal(polar_encode_inverse(polar_encode(u, code), code), u)
    checks.append(("polar encode round trip", ok, ""))

    failed = 0
    for name, ok, detail in checks:
        print(f"[{'PASS' if ok else 'FAIL'}] {name} {detail}")
        failed += 0 if ok else 1
    return 0 if failed == 0 else 3


# --- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gkp-polar",
                                 description="Analog-syndrome GKP + polar coding toolkit")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("rates", help="rate curves over a (d, sigma) grid")
    p.add_argument("--d", required=True, help="comma-separated prime dimensions")
    p.add_argument("--sigma", required=True,
                   help="grid start:stop:step (both ends included when stop is on "
                        "the grid) or comma-separated values")
    p.add_argument("--rect", type=float, default=None, metavar="F",
                   help="also emit the rectangular-bias rate column i_rect_f")
    p.add_argument("--no-analog", action="store_true",
                   help="emit the syndrome-averaged baseline column (on by default)")
    p.add_argument("--staircase", action="store_true",
                   help="emit the integer-dimension staircase column (on by default)")
    p.add_argument("--out", default=None, help="output CSV path (default stdout)")
    p.add_argument("--workers", type=int, default=None,
                   help="parallel workers (default env GKP_POLAR_WORKERS or 1); "
                        "outputs are identical for any worker count")
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("design", help="Monte-Carlo polar code construction")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--alpha", type=int, required=True, help="kernel multiplier")
    p.add_argument("--n-list", required=True,
                   help="comma-separated block-size exponents n (N = 2^n), ascending")
    p.add_argument("--m", type=int, default=10_000, help="Monte-Carlo trials per side")
    p.add_argument("--c-e", type=float, default=0.5, help="error budget prefactor")
    p.add_argument("--beta", type=float, default=2.0 / 9.0, help="error budget exponent")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("simulate", help="block simulation of a designed artifact")
    p.add_argument("--artifact", required=True, help="artifact JSON path")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--random-codeword", action="store_true",
                   help="draw random information words instead of the all-zero reduction")
    p.add_argument("--out", default=None, help="report JSON path")
    p.add_argument("--csv", default=None, help="CSV file to append one row to")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("loss", help="pure-loss capacity sequence")
    p.add_argument("--eta", type=float, required=True, help="transmittance in (0,1)")
    p.add_argument("--d", required=True, help="comma-separated primes, each = 3 mod 4")
    p.add_argument("--out", default=None, help="output CSV path (default stdout)")
    p.set_defaults(func=cmd_loss)

    p = sub.add_parser("selftest", help="quick numeric self checks")
    p.set_defaults(func=cmd_selftest)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

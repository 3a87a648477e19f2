"""Command-line interface: interpolate, kernel, constants, decay, verify."""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import kernel
from .errors import HermiteSplineError, InvalidArgumentError, MissingDerivativeError
from .experiments import (
    REFERENCE,
    decay_experiment,
    get_test_function,
    run_verification,
)
from .schemes import Approximant, SCHEMES, get_scheme, reconstruct, reconstruct_deriv, sample_at

MODE_ALIASES = {"f": "function", "fprime": "derivative", "function": "function", "derivative": "derivative"}


def parse_steps(text: str) -> list[float]:
    """``start:count:geometric[:ratio]`` (ratio defaults to 1/2) or a comma list."""
    if ":" not in text:
        return [float(x) for x in text.split(",")]
    parts = text.split(":")
    if len(parts) not in (3, 4) or parts[2] != "geometric":
        raise InvalidArgumentError("steps must look like 0.2:5:geometric[:0.5]")
    start, count = float(parts[0]), int(parts[1])
    ratio = float(parts[3]) if len(parts) == 4 else 0.5
    return [start * ratio**i for i in range(count)]


def read_samples(path: str):
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if rows and not _is_number(rows[0][0]):
        rows = rows[1:]
    if len(rows) < 2:
        raise InvalidArgumentError("need at least two sample rows")
    t = np.array([float(r[0]) for r in rows])
    f = np.array([float(r[1]) for r in rows])
    fp = None
    if all(len(r) > 2 and r[2].strip() for r in rows):
        fp = np.array([float(r[2]) for r in rows])
    dt = np.diff(t)
    if np.any(dt <= 0) or np.max(np.abs(dt - dt[0])) > 1e-9 * max(1.0, abs(dt[0])):
        raise InvalidArgumentError("sample abscissae must be uniform and increasing")
    return t, f, fp


def _is_number(s):
    try:
        float(s)
        return True
    except ValueError:
        return False


def _grid_lookup(t, values):
    t0, dt = t[0], t[1] - t[0]

    def look(x):
        idx = (np.asarray(x) - t0) / dt
        r = np.rint(idx)
        if np.any(np.abs(idx - r) > 1e-6) or np.any(r < 0) or np.any(r >= len(t)):
            raise InvalidArgumentError("step and sample grid are incompatible for this scheme")
        return values[r.astype(int)]

    return look


def cmd_interpolate(args):
    scheme = get_scheme(args.scheme)
    t, f, fp = read_samples(args.input)
    if scheme.needs_derivative and fp is None:
        raise MissingDerivativeError(f"scheme {scheme.name} needs an fprime column")
    T, N = args.step, scheme.stride
    max_shift = max(s.shift for s in scheme.sampling)
    k = np.arange(math.ceil((t[0] - 1e-9) / (N * T)), math.floor((t[-1] + 1e-9 - max_shift * T) / (N * T)) + 1)
    if k.size < 2:
        raise InvalidArgumentError("too few lattice points inside the sample range")
    coefs = sample_at(_grid_lookup(t, f), _grid_lookup(t, fp) if fp is not None else None, scheme, T, k)
    a = Approximant(scheme, T, tuple(coefs), (t[0], t[-1]))
    out_step = args.output_step or T / 10
    n = int(math.floor((t[-1] - t[0]) / out_step + 1e-9))
    x = t[0] + out_step * np.arange(n + 1)
    with _open_out(args.output) as fh:
        w = csv.writer(fh)
        w.writerow(["t", "value", "derivative"])
        for row in zip(x, reconstruct(a, x), reconstruct_deriv(a, x)):
            w.writerow([f"{v:.17g}" for v in row])


class _open_out:
    def __init__(self, path):
        self.path = path

    def __enter__(self):
        self.fh = sys.stdout if self.path in (None, "-") else open(self.path, "w", newline="")
        return self.fh

    def __exit__(self, *exc):
        if self.fh is not sys.stdout:
            self.fh.close()


def cmd_kernel(args):
    scheme = get_scheme(args.scheme)
    mode = MODE_ALIASES[args.mode]
    w = np.linspace(0.0, args.omega_max, args.points)
    E_min, E_res, E = kernel.ErrorKernel(scheme, mode).components(w)
    with _open_out(args.output) as fh:
        wr = csv.writer(fh)
        wr.writerow(["omega", "E_min", "E_res", "E"])
        for row in zip(w, E_min, E_res, E):
            wr.writerow([f"{v:.17g}" for v in row])


def cmd_constants(args):
    scheme = get_scheme(args.scheme)
    mode = MODE_ALIASES[args.mode]
    fit = kernel.asymptotic_constant(kernel.ErrorKernel(scheme, mode))
    opt = kernel.asymptotic_constant(kernel.ErrorKernel(scheme, mode, "dual"))
    ref = REFERENCE[mode]
    out = {
        "scheme": scheme.name,
        "mode": mode,
        "L": fit.power,
        "constant": fit.constant,
        "reference": ref,
        "rel_error": fit.constant / ref - 1,
        "fit_residual": fit.residual,
        "optimal_constant": opt.constant,
        "actual_over_optimal": fit.constant / opt.constant,
        "optimal_over_actual": opt.constant / fit.constant,
    }
    print(json.dumps(out, indent=2))


def cmd_decay(args):
    scheme = get_scheme(args.scheme)
    mode = MODE_ALIASES[args.mode]
    report = decay_experiment(scheme, get_test_function(args.function), parse_steps(args.steps), mode, with_kernel=True)
    with _open_out(args.output) as fh:
        wr = csv.writer(fh)
        wr.writerow(["T", "error"])
        for T, e in zip(report.steps, report.errors):
            wr.writerow([f"{T:.17g}", f"{e:.17g}"])
    print(report.to_json())


def cmd_verify(args):
    results = run_verification()
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} audits passed")
    return 0 if failed == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hermite-splines", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    schemes = sorted(SCHEMES)
    modes = sorted(MODE_ALIASES)

    s = sub.add_parser("interpolate", help="reconstruct a signal from uniform samples")
    s.add_argument("--input", required=True, help="CSV with columns t,f[,fprime]")
    s.add_argument("--scheme", choices=schemes, default="hermite")
    s.add_argument("--step", type=float, required=True, help="knot spacing T")
    s.add_argument("--output", default=None, help="output CSV (default stdout)")
    s.add_argument("--output-step", type=float, default=None, help="evaluation spacing (default T/10)")
    s.set_defaults(func=cmd_interpolate)

    s = sub.add_parser("kernel", help="tabulate the error kernel")
    s.add_argument("--scheme", choices=schemes, required=True)
    s.add_argument("--mode", choices=modes, default="f")
    s.add_argument("--omega-max", type=float, default=2 * np.pi)
    s.add_argument("--points", type=int, default=257)
    s.add_argument("--output", default=None)
    s.set_defaults(func=cmd_kernel)

    s = sub.add_parser("constants", help="fit the asymptotic constant (JSON)")
    s.add_argument("--scheme", choices=schemes, required=True)
    s.add_argument("--mode", choices=modes, default="f")
    s.set_defaults(func=cmd_constants)

    s = sub.add_parser("decay", help="measure the error decay on a test function")
    s.add_argument("--scheme", choices=schemes, required=True)
    s.add_argument("--function", default="gaussian")
    s.add_argument("--steps", default="0.2:5:geometric")
    s.add_argument("--mode", choices=modes, default="f")
    s.add_argument("--output", default=None, help="CSV of (T, error); JSON summary goes to stdout")
    s.set_defaults(func=cmd_decay)

    s = sub.add_parser("verify", help="run all numerical audits")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rc = args.func(args)
    except HermiteSplineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return rc or 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``fskde <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 numerical precondition
failure.  Errors print one line ``fskde: <kind>: <message>`` to stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bench import METHODS, DatasetError, SyntheticConfig, generate_synthetic, load_dataset, save_dataset
from .bench.runner import prepare_patches, reports_csv, run_benchmark
from .canonical import canonical_distance_fk, canonicalize_f1, canonicalize_fk
from .descriptor import AngleWeightSet, Descriptor, distance, estimate, evaluate, truncate
from .image_field import box_window, gaussian_window, gradient_field, local_fskde
from .imageio import ImageFormatError, read_image
from .kernel import TWO_PI, kernel_eval, make_kernel, truncation_mask
from .numfmt import fmt
from .stability import make_base_set, simulate_stability

EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 1, 2, 3


class UsageError(Exception):
    pass


class InputFormatError(Exception):
    """An input file exists but cannot be parsed."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _mode(text: str):
    return None if text == "auto" else text


def _write(path, text: str):
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _add_kernel_args(p, order_required=True):
    p.add_argument("--order", "-K", type=int, required=order_required, help="kernel order K")
    p.add_argument("--mode", choices=["auto", "exact", "approx"], default="auto",
                   help="coefficient formula; auto switches to approx when 2K >= 80")


def cmd_kernel(args):
    kernel = make_kernel(args.order, _mode(args.mode))
    if args.grid < 2:
        raise ValueError("--grid must be at least 2")
    theta = -math.pi + TWO_PI * np.arange(args.grid) / args.grid
    h = kernel_eval(kernel, theta)
    lines = ["theta,h"] + [f"{fmt(t)},{fmt(v)}" for t, v in zip(theta, h)]
    table = {"K": kernel.order, "mode": kernel.mode.value, "C": kernel.norm_const, "H": kernel.coeffs.tolist()}
    _write(args.csv, "\n".join(lines) + "\n")
    _write(args.json, json.dumps(table) + "\n")


def read_angle_csv(path, degrees: bool = False) -> AngleWeightSet:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "theta" not in reader.fieldnames:
            raise InputFormatError(f"{path}: expected a 'theta,weight' header")
        angles, weights = [], []
        for lineno, row in enumerate(reader, start=2):
            try:
                angles.append(float(row["theta"]))
                weights.append(float(row.get("weight") or 1.0))
            except (TypeError, ValueError):
                raise InputFormatError(f"{path}:{lineno}: malformed row {row}") from None
    angles = np.radians(angles) if degrees else np.asarray(angles)
    return AngleWeightSet(angles, weights)


def _canonical(d: Descriptor, scheme: str, level: int | None):
    if scheme == "none":
        return d
    if scheme == "f1":
        return canonicalize_f1(d).base
    return canonicalize_fk(d, level or d.order).base


def cmd_estimate(args):
    samples = read_angle_csv(args.input, args.degrees)
    kernel = make_kernel(args.order, _mode(args.mode))
    d = estimate(samples, kernel)
    if args.epsilon is not None:
        d = truncate(d, truncation_mask(kernel.order, args.epsilon))
    d = _canonical(d, args.canon, args.level)
    _write(args.output, d.to_json() + "\n")
    if args.binary:
        Path(args.binary).write_bytes(d.to_bytes())


def _load_descriptor(path) -> Descriptor:
    data = Path(path).read_bytes()
    try:
        if data[:1] in (b"{", b" ", b"\n"):
            return Descriptor.from_json(data.decode())
        return Descriptor.from_bytes(data)
    except (ValueError, KeyError, TypeError) as exc:
        raise InputFormatError(f"{path}: not a descriptor file ({exc})") from None


def cmd_evaluate(args):
    d = _load_descriptor(args.descriptor)
    theta = np.asarray(args.theta, dtype=float)
    if args.degrees:
        theta = np.radians(theta)
    values = np.atleast_1d(evaluate(d, theta))
    _write(args.output, "theta,f\n" + "".join(f"{fmt(t)},{fmt(v)}\n" for t, v in zip(theta, values)))


def cmd_distance(args):
    a, b = _load_descriptor(args.a), _load_descriptor(args.b)
    if args.canon == "none":
        value = distance(a, b)
    elif args.canon == "f1":
        value = distance(canonicalize_f1(a).base, canonicalize_f1(b).base)
    else:
        value = canonical_distance_fk(a, b)
    sys.stdout.write(fmt(value) + "\n")


def cmd_describe_image(args):
    image = read_image(args.input)
    kernel = make_kernel(args.order, _mode(args.mode))
    window = box_window(args.size) if args.window == "box" else gaussian_window(args.sigma, args.size // 2)
    field = local_fskde(gradient_field(image, args.operator), window, kernel, args.method)
    manifest = field.save(args.outdir)
    sys.stdout.write(str(manifest) + "\n")


_CANON_VARIANTS = {
    "none": {"hist": "hist", "fskde": "fskde"},
    "f1": {"hist": "hist_canon", "fskde": "fskde_f1"},
    "fk": {"hist": "hist_canon", "fskde": "fskde_fk"},
}


def cmd_match(args):
    dataset = load_dataset(args.manifest)
    methods = args.methods
    if args.canon is not None:
        table = _CANON_VARIANTS[args.canon]
        methods = list(dict.fromkeys(table.get(m.split("_")[0], m) for m in methods))
    for m in methods:
        if m not in METHODS:
            raise UsageError(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
    prepared = prepare_patches(dataset, args.rotate, args.seed, args.mask_diameter, args.operator)
    reports = []
    for m in methods:
        sizes = [0] if m == "intensity" else args.sizes
        for size in sizes:
            r = run_benchmark(dataset, m, size, rotate=args.rotate, seed=args.seed, epsilon=args.epsilon,
                              prepared=prepared)
            reports.append(r)
            if args.dump_distances:
                out = Path(args.dump_distances)
                out.mkdir(parents=True, exist_ok=True)
                (out / f"{m}_{size}.csv").write_text(r.dump_distances())
    _write(args.output, reports_csv(reports))


def cmd_simulate(args):
    rng = np.random.default_rng(np.random.SeedSequence(args.seed, spawn_key=(0,)))
    base = make_base_set(args.base, args.n, rng)
    kernel = make_kernel(args.order, _mode(args.mode))
    report = simulate_stability(base, kernel, args.sigmas, args.trials, args.seed, args.base)
    _write(args.output, report.to_csv())
    if args.summary:
        Path(args.summary).write_text(report.summary_json() + "\n")
    if args.rotation_csv:
        Path(args.rotation_csv).write_text(report.rotation_csv())


def cmd_gen_synthetic(args):
    cfg = SyntheticConfig(n_pairs=args.pairs, patch_size=args.patch_size, seed=args.seed)
    manifest = save_dataset(generate_synthetic(cfg), args.outdir, args.format)
    sys.stdout.write(str(manifest) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fskde", description="Fourier-series KDE of angular distributions with the cos^2K kernel.")
    parser.add_argument("--version", action="version", version=f"fskde {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("kernel", help="tabulate the kernel and its Fourier coefficients")
    _add_kernel_args(p)
    p.add_argument("--grid", type=int, default=360, help="number of theta samples on [-pi, pi)")
    p.add_argument("--csv", help="write the (theta, h) table here instead of stdout")
    p.add_argument("--json", help="write the coefficient table here instead of stdout")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("estimate", help="FS-KDE descriptor of a theta,weight CSV file")
    _add_kernel_args(p)
    p.add_argument("--input", "-i", required=True, help="CSV with a theta,weight header")
    p.add_argument("--degrees", action="store_true", help="angles are in degrees")
    p.add_argument("--epsilon", type=float, help="truncate coefficients with exp(-k^2/K) < epsilon")
    p.add_argument("--canon", choices=["none", "f1", "fk"], default="none")
    p.add_argument("--level", type=int, help="level for --canon fk (default K)")
    p.add_argument("--output", "-o", help="descriptor JSON path (default stdout)")
    p.add_argument("--binary", help="also write the binary descriptor here")
    p.add_argument("--seed", type=int, default=0, help="accepted for uniformity; estimation is deterministic")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("evaluate", help="evaluate a stored descriptor at given angles")
    p.add_argument("--descriptor", "-d", required=True)
    p.add_argument("--theta", type=_float_list, required=True, help="comma-separated angles")
    p.add_argument("--degrees", action="store_true")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("distance", help="distance between two stored descriptors")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--canon", choices=["none", "f1", "fk"], default="none")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("describe-image", help="per-pixel descriptor field of a PGM/PNG image")
    _add_kernel_args(p)
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--outdir", required=True)
    p.add_argument("--window", choices=["box", "gaussian"], default="box")
    p.add_argument("--size", type=int, default=9, help="window side length (odd)")
    p.add_argument("--sigma", type=float, default=2.0, help="gaussian window scale")
    p.add_argument("--method", choices=["spatial", "fft"], default="spatial")
    p.add_argument("--operator", choices=["central", "sobel"], default="central")
    p.set_defaults(func=cmd_describe_image)

    p = sub.add_parser("match", help="patch-matching benchmark on a dataset manifest")
    p.add_argument("--manifest", "-m", required=True)
    p.add_argument("--methods", type=lambda s: [m for m in s.split(",") if m], default=list(METHODS))
    p.add_argument("--sizes", type=_int_list, default=[20], help="real-number budgets (histogram bins)")
    p.add_argument("--canon", choices=["none", "f1", "fk"], help="override the hist/fskde variant")
    p.add_argument("--rotate", action="store_true", help="rotate every patch by a random angle first")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=1e-5)
    p.add_argument("--mask-diameter", type=float)
    p.add_argument("--operator", choices=["central", "sobel"], default="central")
    p.add_argument("--output", "-o", help="report CSV path (default stdout)")
    p.add_argument("--dump-distances", metavar="DIR", help="write per-pair distances for each method here")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("simulate", help="Monte-Carlo stability study of F1 canonicalization")
    _add_kernel_args(p)
    p.add_argument("--n", type=int, required=True, help="samples per set")
    p.add_argument("--sigmas", type=_float_list, required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--base", choices=["random", "symmetric"], default="random")
    p.add_argument("--output", "-o", help="per-trial CSV (default stdout)")
    p.add_argument("--summary", help="JSON summary path")
    p.add_argument("--rotation-csv", help="write the ||F - rotate(F, phi)|| curve here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gen-synthetic", help="write a synthetic patch-pair dataset")
    p.add_argument("--outdir", required=True)
    p.add_argument("--pairs", type=int, default=2000, help="pairs per class")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--patch-size", type=int, default=64)
    p.add_argument("--format", choices=["pgm", "png"], default="pgm")
    p.set_defaults(func=cmd_gen_synthetic)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args)
    except UsageError as exc:
        print(f"fskde: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, InputFormatError, DatasetError, ImageFormatError) as exc:
        print(f"fskde: io: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, ArithmeticError) as exc:
        print(f"fskde: numeric: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line surface.

Four subcommands: `resample` emits one resample or weight vector,
`posterior` reports conjugate-update parameters as JSON, `compare`
runs one calibrated two-scheme comparison, and `experiment` sweeps the
comparison over a grid of sample sizes.  Every command is a pure
function of its flags: identical invocations produce identical bytes.

Input files hold one number per line; blank lines and lines starting
with `#` are ignored.  `-` means stdin/stdout.  Exit status is 0 on
success and 2 on usage or input errors; verdicts are data, never a
failing status.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .core import (
    Dataset,
    DPParams,
    EmpiricalBase,
    InvalidInputError,
    MixtureBase,
    NormalBase,
    RngStream,
    UniformBase,
    ecdf_build,
    parse_functional,
)
from .dp import atom_masses, conjugate_update, dp0_posterior, polya_urn_predictive, stick_break
from .equiv import compare, convergence_experiment
from .resample import (
    Method,
    bayesian_bootstrap_weights,
    dp_bootstrap_sample,
    frequentist_bootstrap,
)


class CliError(Exception):
    """User-facing failure; exits with status 2."""


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _read_dataset(path: str) -> Dataset:
    if path == "-":
        lines = sys.stdin.read().splitlines()
    else:
        try:
            with open(path, "r", encoding="utf-8") as handle:
                lines = handle.read().splitlines()
        except OSError as exc:
            raise CliError(f"cannot read {path}: {exc}") from exc
    values = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        try:
            values.append(float(text))
        except ValueError:
            raise CliError(f"{path}: line {lineno}: not a number: {text!r}") from None
    if not values:
        raise CliError(f"{path}: no data")
    return Dataset(values)


def _write_text(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)


def _parse_base(text: str):
    """Parse normal:MU,SIGMA or uniform:LO,HI."""
    kind, _, params = text.partition(":")
    try:
        a, b = (float(tok) for tok in params.split(","))
    except ValueError:
        raise CliError(f"bad base measure: {text!r} (expected KIND:A,B)") from None
    if kind == "normal":
        return NormalBase(a, b)
    if kind == "uniform":
        return UniformBase(a, b)
    raise CliError(f"unknown base kind: {kind!r}")


def _float_repr(x) -> str:
    return repr(float(x))


def _stick_line_weights(data: Dataset, epsilon: float, rng: RngStream) -> np.ndarray:
    """Per-input-line posterior masses from one stick-breaking draw.

    Mass lands on distinct values; tied lines split their value's mass
    equally, so the vector sums to 1 like the flat-Dirichlet weights.
    """
    measure = stick_break(dp0_posterior(data), epsilon, rng)
    ecdf = ecdf_build(data)
    masses = atom_masses(measure, ecdf.values)
    line_idx = np.searchsorted(ecdf.values, data.values)
    return masses[line_idx] / ecdf.counts[line_idx]


def _cmd_resample(args) -> int:
    data = _read_dataset(args.input)
    rng = RngStream(args.seed, 0)
    method = Method(args.method)
    if method is Method.FREQUENTIST:
        out = frequentist_bootstrap(data, rng).values
    elif method is Method.BAYESIAN_DIRICHLET:
        out = bayesian_bootstrap_weights(len(data), rng)
    elif method is Method.DP_STICK_BREAK:
        out = _stick_line_weights(data, args.epsilon, rng)
    elif method is Method.DP_STICK_BREAK_POINTS:
        out = dp_bootstrap_sample(data, args.epsilon, rng).values
    else:
        out = polya_urn_predictive(dp0_posterior(data), len(data), rng).values
    _write_text(args.output, "".join(f"{float(v):.17g}\n" for v in out))
    return 0


def _describe_base(base) -> list:
    def label(measure) -> str:
        if isinstance(measure, EmpiricalBase):
            return "empirical"
        if isinstance(measure, NormalBase):
            return f"normal({measure.mean:g},{measure.sd:g})"
        if isinstance(measure, UniformBase):
            return f"uniform({measure.lo:g},{measure.hi:g})"
        return type(measure).__name__

    if isinstance(base, MixtureBase):
        return [{"weight": float(w), "component": label(m)} for w, m in base.components]
    return [{"weight": 1.0, "component": label(base)}]


def _cmd_posterior(args) -> int:
    data = _read_dataset(args.input)
    if args.alpha < 0:
        raise CliError("alpha must be nonnegative")
    if args.alpha == 0 or args.base == "none":
        if args.alpha > 0:
            raise CliError("a prior base is required when alpha > 0")
        posterior = dp0_posterior(data)
    else:
        posterior = conjugate_update(DPParams(args.alpha, _parse_base(args.base)), data)
    payload = {
        "alpha_posterior": float(posterior.alpha),
        "mixture": _describe_base(posterior.base),
        "n": len(data),
    }
    _write_text(args.output, json.dumps(payload, indent=2) + "\n")
    return 0


_COMPARE_COLUMNS = (
    "method_a",
    "method_b",
    "n",
    "b",
    "functional",
    "cross_ks",
    "cross_w1",
    "self_ks_median",
    "self_w1_median",
    "threshold",
    "verdict",
)


def _cmd_compare(args) -> int:
    data = _read_dataset(args.input)
    functional = parse_functional(args.functional)
    report = compare(
        Method(args.method_a),
        Method(args.method_b),
        data,
        b=args.b,
        functional=functional,
        epsilon=args.epsilon,
        master_seed=args.seed,
        threshold_factor=args.threshold,
        reps=args.reps,
        workers=args.workers,
    )
    row = {
        "method_a": args.method_a,
        "method_b": args.method_b,
        "n": len(data),
        "b": args.b,
        "functional": functional.label(),
        "cross_ks": float(report.cross.ks),
        "cross_w1": float(report.cross.wasserstein1),
        "self_ks_median": report.self_ks_median,
        "self_w1_median": report.self_w1_median,
        "threshold": float(args.threshold),
        "verdict": report.verdict.value,
    }
    if args.format == "json":
        text = json.dumps(row, indent=2) + "\n"
    else:
        cells = [_format_cell(row[name]) for name in _COMPARE_COLUMNS]
        text = ",".join(_COMPARE_COLUMNS) + "\n" + ",".join(cells) + "\n"
    _write_text(args.output, text)
    return 0


def _format_cell(value) -> str:
    if isinstance(value, float):
        return _float_repr(value)
    return str(value)


_EXPERIMENT_COLUMNS = (
    "n",
    "cross_ks",
    "cross_w1",
    "self_ks_median",
    "self_w1_median",
    "verdict",
)


def _cmd_experiment(args) -> int:
    try:
        grid = [int(token) for token in args.n_grid.split(",")]
    except ValueError:
        raise CliError(f"bad n-grid: {args.n_grid!r}") from None
    rows = convergence_experiment(
        grid,
        _parse_base(args.generator),
        b=args.b,
        functional=parse_functional(args.functional),
        epsilon=args.epsilon,
        master_seed=args.seed,
        threshold_factor=args.threshold,
        reps=args.reps,
        workers=args.workers,
    )
    records = [
        {
            "n": row.n,
            "cross_ks": float(row.cross_ks),
            "cross_w1": float(row.cross_w1),
            "self_ks_median": float(row.self_ks_median),
            "self_w1_median": float(row.self_w1_median),
            "verdict": row.verdict.value,
        }
        for row in rows
    ]
    if args.format == "json":
        text = json.dumps(records, indent=2) + "\n"
    else:
        lines = [",".join(_EXPERIMENT_COLUMNS)]
        for record in records:
            lines.append(",".join(_format_cell(record[name]) for name in _EXPERIMENT_COLUMNS))
        text = "\n".join(lines) + "\n"
    _write_text(args.output, text)
    return 0


def _add_comparison_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--b", type=int, default=2000, help="replications per ensemble")
    parser.add_argument("--functional", default="mean", help="mean | median | sd | q:P")
    parser.add_argument("--seed", type=_u64, default=0)
    parser.add_argument("--threshold", type=float, default=2.0,
                        help="verdict factor over the self-distance median")
    parser.add_argument("--reps", type=int, default=5, help="self-calibration pair count")
    parser.add_argument("--epsilon", type=float, default=1e-10)
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--workers", type=int, default=1, help="replication threads")
    parser.add_argument("--output", default="-")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dpboot",
        description="Dirichlet-process resampling and bootstrap-equivalence experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    methods = [m.value for m in Method]

    resample = sub.add_parser("resample", help="emit one resample or weight vector")
    resample.add_argument("--input", required=True)
    resample.add_argument("--method", required=True, choices=methods)
    resample.add_argument("--seed", type=_u64, default=0)
    resample.add_argument("--epsilon", type=float, default=1e-10)
    resample.add_argument("--output", default="-")
    resample.set_defaults(handler=_cmd_resample)

    posterior = sub.add_parser("posterior", help="conjugate-update parameters as JSON")
    posterior.add_argument("--input", required=True)
    posterior.add_argument("--alpha", type=float, required=True)
    posterior.add_argument("--base", default="none",
                           help="normal:MU,SIGMA | uniform:LO,HI | none")
    posterior.add_argument("--output", default="-")
    posterior.set_defaults(handler=_cmd_posterior)

    cmp_parser = sub.add_parser("compare", help="calibrated two-scheme comparison")
    cmp_parser.add_argument("--input", required=True)
    cmp_parser.add_argument("--method-a", required=True, choices=methods)
    cmp_parser.add_argument("--method-b", required=True, choices=methods)
    _add_comparison_flags(cmp_parser)
    cmp_parser.set_defaults(handler=_cmd_compare)

    experiment = sub.add_parser("experiment", help="comparison sweep over sample sizes")
    experiment.add_argument("--n-grid", required=True, help="comma-separated sizes")
    experiment.add_argument("--generator", required=True,
                            help="normal:MU,SIGMA | uniform:LO,HI")
    _add_comparison_flags(experiment)
    experiment.set_defaults(handler=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (CliError, InvalidInputError) as exc:
        print(f"dpboot: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"dpboot: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

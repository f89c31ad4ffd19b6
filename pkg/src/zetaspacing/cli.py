"""Command-line front end: every command writes CSV curves and a ``run.json`` manifest.

Exit codes: 0 success, 2 invalid arguments or malformed input, 3 missing
zeros file, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .constants import DEFAULT_SIEVE_LIMIT, ConstantSet, build_constant_set
from .cue import spacing_density
from .curves import SpacingCurve, _jsonable, parse_grid
from .errors import ConditioningError, DataError, DomainError, SingularityError
from .extract import DEFAULT_N_SEQUENCE, extract_p1
from .mc import export_as_zeros, mc_spacing_curve, sample_cue
from .predict import delta_p, derive_params, predicted_spacing
from .zeros import analyze, load_zeros, residuals, spacing_histogram, unfold

FIGURE_HEIGHTS = {"1": 2.5041178e15, "2": 2.5041178e15, "3": 1.30664344e22}
# p0/p1 are extracted on this grid so that p1(alpha s) stays interpolable
EXTRACTION_GRID = "0:6:0.01"
DEFAULT_GRID = "0:4:0.01"
MANIFEST = "run.json"


class UsageError(Exception):
    pass


def _sieve_limit(text: str) -> int:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value) or value != int(value) or value < 2:
        raise argparse.ArgumentTypeError("sieve limit must be an integer >= 2")
    return int(value)


def _n_seq(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad --n-seq {text!r}") from None


def _grid(text: str) -> str:
    try:
        parse_grid(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--sieve-limit", type=_sieve_limit, default=DEFAULT_SIEVE_LIMIT)
    common.add_argument("--out-dir", default=None, help="output directory (default: out)")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--grid", type=_grid, default=DEFAULT_GRID, help="min:max:step")
    common.add_argument("--manifest", help="replay the command recorded in a run.json")

    parser = argparse.ArgumentParser(prog="zetaspacing", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command")

    sub.add_parser("constants", parents=[common], help="prime-sum and Stieltjes constants")

    p = sub.add_parser("cue-spacing", parents=[common], help="exact CUE_N spacing density")
    p.add_argument("--n", type=int, default=16)

    p = sub.add_parser("extract", parents=[common], help="p0 and p1 by Richardson extraction")
    p.add_argument("--n-seq", type=_n_seq, default=list(DEFAULT_N_SEQUENCE))

    p = sub.add_parser("predict", parents=[common], help="finite-height spacing prediction")
    p.add_argument("--height", type=float, default=FIGURE_HEIGHTS["2"])
    p.add_argument("--n-seq", type=_n_seq, default=list(DEFAULT_N_SEQUENCE))

    p = sub.add_parser("analyze", parents=[common], help="empirical statistics of a zero table")
    p.add_argument("--zeros", required=False)
    p.add_argument("--format", choices=["plain", "offset_header"], default="plain")
    p.add_argument("--height", type=float, default=None, help="defaults to the window center")
    p.add_argument("--n-seq", type=_n_seq, default=list(DEFAULT_N_SEQUENCE))

    p = sub.add_parser("mc", parents=[common], help="Monte Carlo CUE_N spacings")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--export-zeros", action="store_true", help="also write spacings as a plain zero table")

    p = sub.add_parser("figure", parents=[common], help="curve sets of one figure panel")
    p.add_argument("fig", choices=["1a", "1b", "2a", "2b", "3a", "3b"])
    p.add_argument("--zeros", required=False)
    p.add_argument("--format", choices=["plain", "offset_header"], default="plain")
    p.add_argument("--height", type=float, default=None, help="defaults to the panel's height")
    p.add_argument("--n-seq", type=_n_seq, default=list(DEFAULT_N_SEQUENCE))
    return parser


class Run:
    """Collects outputs of one command and writes the manifest."""

    def __init__(self, command: str, config: dict, constants: ConstantSet):
        self.command = command
        self.config = config
        self.constants = constants
        self.out_dir = Path(config["out_dir"])
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.outputs: list[str] = []
        self.extra: dict = {}

    def curve(self, name: str, curve):
        csv_path, meta_path = curve.to_csv(self.out_dir / f"{name}.csv")
        self.outputs += [str(csv_path), str(meta_path)]

    def json(self, name: str, payload: dict):
        path = self.out_dir / f"{name}.json"
        path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")
        self.outputs.append(str(path))

    def finish(self) -> Path:
        manifest = {
            "command": self.command,
            "config": self.config,
            "constant_set": self.constants.to_dict(),
            "outputs": self.outputs,
            "tool_version": __version__,
            **self.extra,
        }
        path = self.out_dir / MANIFEST
        path.write_text(json.dumps(_jsonable(manifest), indent=2, sort_keys=True) + "\n")
        return path


def _extraction(run: Run):
    report = extract_p1(run.config["n_seq"], parse_grid(EXTRACTION_GRID), workers=run.config["threads"])
    run.extra["extraction"] = report.manifest()
    return report


def _load(run: Run):
    path = run.config.get("zeros")
    if not path:
        raise UsageError("--zeros is required")
    if not Path(path).is_file():
        raise FileNotFoundError(path)
    return load_zeros(path, run.config["format"])


def cmd_constants(run: Run):
    run.json("constants", run.constants.to_dict())


def cmd_cue_spacing(run: Run):
    n = run.config["n"]
    grid = parse_grid(run.config["grid"])
    if grid[-1] > min(n, 8):
        grid = grid[grid <= min(n, 8)]
    run.curve(f"p_N{n}", spacing_density(n, grid, workers=run.config["threads"]))


def cmd_extract(run: Run):
    report = extract_p1(run.config["n_seq"], parse_grid(run.config["grid"]), workers=run.config["threads"])
    run.curve("p0", report.p0)
    run.curve("p1", report.p1)
    run.extra["extraction"] = report.manifest()


def cmd_predict(run: Run):
    params = derive_params(run.config["height"], run.constants)
    grid = parse_grid(run.config["grid"])
    report = _extraction(run)
    run.curve("delta_p", delta_p(params, report.p1, grid))
    run.curve("delta_p_no_rescale", delta_p(params, report.p1, grid, no_rescale=True))
    run.curve("predicted", predicted_spacing(params, report.p0, report.p1, grid))
    run.json("params", params.to_dict())
    run.extra["params"] = params.to_dict()


def cmd_analyze(run: Run):
    ds = _load(run)
    height = run.config["height"] or ds.window_center
    run.config["height"] = float(height)
    params = derive_params(height, run.constants)
    stats = analyze(ds, params)
    report = _extraction(run)
    predicted = predicted_spacing(params, report.p0, report.p1, _covering(report.p0.grid, stats.spacing_hist))
    run.curve("spacing_hist", stats.spacing_hist)
    if stats.r2_hist is not None:
        run.curve("r2_empirical", stats.r2_hist)
    run.curve("residual_vs_predicted", residuals(stats, predicted))
    run.extra["dataset"] = ds.stats()
    run.extra["params"] = params.to_dict()
    run.extra["bins"] = {"spacing": stats.spacing_hist.meta["edges"][:1] + stats.spacing_hist.meta["edges"][-1:],
                         "count": len(stats.spacing_hist.grid)}


def cmd_mc(run: Run):
    mc_run = sample_cue(run.config["n"], run.config["samples"], run.config["seed"], workers=run.config["threads"])
    run.curve(f"mc_spacing_N{mc_run.n}", mc_spacing_curve(mc_run))
    run.json("mc_run", mc_run.manifest())
    if run.config.get("export_zeros"):
        path = export_as_zeros(mc_run, run.out_dir / "mc_zeros.txt")
        run.outputs.append(str(path))


def _difference(hist: SpacingCurve, model, label: str) -> SpacingCurve:
    diff = residuals(hist, model)
    diff.meta["role"] = label
    return diff


def cmd_figure(run: Run):
    fig = run.config["fig"]
    ds = _load(run)
    height = run.config["height"] or FIGURE_HEIGHTS[fig[0]]
    run.config["height"] = float(height)
    params = derive_params(height, run.constants)
    report = _extraction(run)
    p0, p1 = report.p0, report.p1
    hist = spacing_histogram(unfold(ds), kind_meta={"dataset": ds.stats()})
    grid = parse_grid(run.config["grid"])
    run.extra["dataset"] = ds.stats()
    run.extra["params"] = params.to_dict()

    if fig == "1a":
        run.curve("empirical_p", hist)
        run.curve("p0", _restrict(p0, grid))
    elif fig == "1b":
        # CUE_N at the integer size closest to N_0 stands in for "size N_0"
        n_int = max(2, int(round(params.n0)))
        run.extra["finite_n"] = n_int
        pn = spacing_density(n_int, report.p0.grid[report.p0.grid <= min(n_int, 8)], workers=run.config["threads"])
        p0_on = SpacingCurve(pn.grid, np.interp(pn.grid, p0.grid, p0.values), kind="p_asymptotic")
        run.curve("empirical_minus_p0", _difference(hist, p0, "empirical - p0"))
        run.curve("finite_n_minus_p0", SpacingCurve(
            pn.grid, pn.values - p0_on.values, kind="delta_p", meta={"N": n_int, "role": "p_N - p0"}))
    elif fig[1] == "a":
        run.curve("empirical_minus_p0", _difference(hist, p0, "empirical - p0"))
        run.curve("delta_p", delta_p(params, p1, grid))
        run.curve("delta_p_no_rescale", delta_p(params, p1, grid, no_rescale=True))
    else:
        predicted = predicted_spacing(params, p0, p1, _covering(p0.grid, hist))
        run.curve("empirical_minus_predicted", _difference(hist, predicted, "empirical - (p0 + delta_p)"))


def _covering(grid, hist: SpacingCurve):
    """Part of ``grid`` spanning the histogram's bins."""
    return grid[grid <= hist.meta["edges"][-1] + 1e-9]


def _restrict(curve: SpacingCurve, grid) -> SpacingCurve:
    values = np.interp(grid, curve.grid, curve.values)
    return SpacingCurve(np.asarray(grid), values, kind=curve.kind, meta=dict(curve.meta))


COMMANDS = {
    "constants": cmd_constants,
    "cue-spacing": cmd_cue_spacing,
    "extract": cmd_extract,
    "predict": cmd_predict,
    "analyze": cmd_analyze,
    "mc": cmd_mc,
    "figure": cmd_figure,
}


def _config(args: argparse.Namespace) -> dict:
    config = {k: v for k, v in vars(args).items() if k not in ("command", "manifest")}
    config["out_dir"] = config["out_dir"] or "out"
    return _jsonable(config)


def _replay(args: argparse.Namespace) -> tuple[str, dict]:
    recorded = json.loads(Path(args.manifest).read_text())
    config = dict(recorded["config"])
    if args.out_dir:
        config["out_dir"] = args.out_dir
    return recorded["command"], config


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        if args.manifest:
            command, config = _replay(args)
        else:
            command, config = args.command, _config(args)
        if config.get("threads", 1) < 1:
            raise UsageError("--threads must be >= 1")
        constants = build_constant_set(config["sieve_limit"])
        run = Run(command, config, constants)
        COMMANDS[command](run)
        path = run.finish()
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: zeros file not found: {exc}", file=sys.stderr)
        return 3
    except DataError as exc:
        print(f"error: bad zeros file: {exc}", file=sys.stderr)
        return 2
    except (DomainError, SingularityError, ConditioningError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())

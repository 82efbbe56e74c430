"""Command-line front end writing deterministic CSV data files.

Exit codes: 0 success, 2 invalid arguments, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import channel, correlations, kernel, momentum, walk
from .core import DEFAULT_COIN, InvariantError, coin_density
from .csvio import write_csv

log = logging.getLogger("nmqw")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunSpec:
    subcommand: str
    params: kernel.KernelParams
    steps: int = 100
    mode: str = "absolute"
    kappa: Optional[complex] = None
    coin: tuple = tuple(DEFAULT_COIN)
    output: str = "-"
    distributions: Optional[str] = None
    snapshots: Optional[tuple] = None
    baselines: bool = False
    dt: float = 0.01
    method: str = "closed"
    n_quad: int = momentum.DEFAULT_QUAD
    grid_theta: int = 32
    grid_phi: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.steps < 1:
            raise UsageError("--steps must be >= 1")
        if self.mode not in channel.MODES:
            raise UsageError(f"--mode must be one of {channel.MODES}")
        if self.mode == "frozen" and self.kappa is None:
            raise UsageError("--mode frozen needs --kappa")
        if self.kappa is not None and abs(self.kappa) > 1:
            raise UsageError("--kappa must satisfy |kappa| <= 1")
        if not self.dt > 0:
            raise UsageError("--dt must be positive")
        if self.n_quad < 2:
            raise UsageError("--quad must be >= 2")
        if self.grid_theta < 1 or self.grid_phi < 1:
            raise UsageError("grid sizes must be >= 1")

    @property
    def initial_coin(self) -> np.ndarray:
        return coin_density(np.array(self.coin, dtype=complex))


def build_schedule(spec: RunSpec, steps: Optional[int] = None) -> channel.StepSchedule:
    steps = steps or spec.steps
    if spec.mode == "frozen":
        return channel.frozen(spec.kappa, steps)
    df = kernel.sample_closed_form(spec.params, 1.0, float(steps))
    return channel.schedule(df, steps, spec.mode)


def _config(spec: RunSpec, sched=None) -> walk.WalkConfig:
    return walk.WalkConfig(spec.steps, initial_coin=spec.initial_coin, schedule=sched or build_schedule(spec))


def run_kappa(spec: RunSpec) -> list[str]:
    """``t, re_kappa, im_kappa, gamma, epsilon, singular`` on a grid of step ``dt``."""
    if spec.method == "volterra":
        df = kernel.kappa_volterra(spec.params, spec.dt, float(spec.steps))
    else:
        df = kernel.sample_closed_form(spec.params, spec.dt, float(spec.steps))
    gamma, eps, singular = kernel.rate_series(df)
    rows = [
        (t, k.real, k.imag, g, e, bool(s))
        for t, k, g, e, s in zip(df.times, df.values, gamma, eps, singular)
    ]
    write_csv(spec.output, ("t", "re_kappa", "im_kappa", "gamma", "epsilon", "singular"), rows)
    return [spec.output]


def run_simulate(spec: RunSpec) -> list[str]:
    """Summary ``t, mean, var`` (plus baselines) and optional ``t, x, p`` snapshots."""
    summary = []
    dist_rows = []
    wanted = set(spec.snapshots) if spec.snapshots else None
    for state in walk.iter_evolve(_config(spec)):
        d = walk.position_distribution(state)
        summary.append([state.t, d.mean, d.variance])
        if spec.distributions and (wanted is None or state.t in wanted):
            dist_rows.extend((d.t, int(x), float(p)) for x, p in zip(d.x, d.p))
    header = ["t", "mean", "var"]
    if spec.baselines:
        ideal = walk.WalkConfig(spec.steps, initial_coin=spec.initial_coin)
        for row, state in zip(summary, walk.iter_evolve(ideal)):
            row.append(float(row[0]))
            row.append(walk.position_distribution(state).variance)
        header += ["var_rw", "var_ideal"]
    write_csv(spec.output, header, summary)
    written = [spec.output]
    if spec.distributions:
        write_csv(spec.distributions, ("t", "x", "p"), dist_rows)
        written.append(spec.distributions)
    return written


def run_correlations(spec: RunSpec) -> list[str]:
    opts = correlations.DiscordOptions(n_theta=spec.grid_theta, n_phi=spec.grid_phi)
    records = correlations.correlation_trajectory(walk.iter_evolve(_config(spec)), opts)
    write_csv(
        spec.output,
        ("t", "mutual_info", "mid", "qd", "qd_theta", "qd_phi", "degenerate_flag"),
        correlations.record_rows(records),
    )
    return [spec.output]


def analytic_series(spec: RunSpec, sched: channel.StepSchedule):
    """Exact variance under the schedule and the long-time formula at the matching kappa."""
    r = momentum.BlochVector.from_density(spec.initial_coin)
    if spec.mode == "frozen" and abs(spec.kappa) < 1:
        var_exact = np.array(
            [momentum.variance_exact(t, spec.kappa, r, spec.n_quad) for t in range(1, spec.steps + 1)]
        )
    else:
        first, second = momentum.schedule_moments(sched.factors[: spec.steps], r, spec.n_quad)
        var_exact = second - first**2
    var_long = np.full(spec.steps, np.nan)
    for t in range(1, spec.steps + 1):
        kap = spec.kappa if spec.mode == "frozen" else kernel.kappa_closed_form(spec.params, float(t))
        if abs(kap) < 1:
            var_long[t - 1] = momentum.longtime_variance(t, kap, r)
    return var_exact, var_long


def run_analytic(spec: RunSpec) -> list[str]:
    var_exact, var_long = analytic_series(spec, build_schedule(spec))
    rows = [(t, ve, vl) for t, ve, vl in zip(range(1, spec.steps + 1), var_exact, var_long)]
    write_csv(spec.output, ("t", "var_exact", "var_longtime"), rows)
    return [spec.output]


def run_compare(spec: RunSpec) -> list[str]:
    """``t, var_sim, var_exact, var_longtime, rel_err``; rel_err compares long-time to simulation."""
    sched = build_schedule(spec)
    var_sim = [
        walk.position_distribution(s).variance
        for s in walk.iter_evolve(_config(spec, sched))
        if s.t > 0
    ]
    var_exact, var_long = analytic_series(spec, sched)
    rows = []
    for t, vs, ve, vl in zip(range(1, spec.steps + 1), var_sim, var_exact, var_long):
        rows.append((t, vs, ve, vl, abs(vl - vs) / vs))
    write_csv(spec.output, ("t", "var_sim", "var_exact", "var_longtime", "rel_err"), rows)
    return [spec.output]


RUNNERS = {
    "kappa": run_kappa,
    "simulate": run_simulate,
    "correlations": run_correlations,
    "analytic": run_analytic,
    "compare": run_compare,
}


def _parse_coin(text: str) -> tuple:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("coin must be two comma-separated complex amplitudes, e.g. 1,1j")
    try:
        vec = tuple(complex(p.strip()) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if vec == (0, 0):
        raise argparse.ArgumentTypeError("coin vector must be non-zero")
    return vec


def _parse_steps_list(text: str) -> tuple:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nmqw",
        description="Quantum walk on a line with a non-Markovian dephasing coin.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--g0", type=float, default=1.0, help="coupling strength (default 1)")
    common.add_argument("--eta", type=float, default=0.01, help="spectral width (default 0.01)")
    common.add_argument("--steps", type=int, default=None, help="walk steps / time span (default 100, compare 300)")
    common.add_argument("--mode", choices=channel.MODES, default="absolute", help="per-step kappa schedule")
    common.add_argument("--kappa", type=complex, default=None, help="constant kappa for --mode frozen")
    common.add_argument("--coin", type=_parse_coin, default=tuple(DEFAULT_COIN), help="initial coin amplitudes a,b")
    common.add_argument("-o", "--output", default="-", help="output CSV path ('-' for stdout)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomised checks")

    sub = parser.add_subparsers(dest="subcommand", required=True)
    p = sub.add_parser("kappa", parents=[common], help="kappa(t) with gamma(t), epsilon(t)")
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--method", choices=("closed", "volterra"), default="closed")

    p = sub.add_parser("simulate", parents=[common], help="position mean/variance per step")
    p.add_argument("--distributions", default=None, help="also write t,x,p rows to this path")
    p.add_argument("--snapshots", type=_parse_steps_list, default=None, help="steps to include in --distributions")
    p.add_argument("--baselines", action="store_true", help="add random-walk and ideal-walk variance columns")

    p = sub.add_parser("correlations", parents=[common], help="mutual information, MID and discord per step")
    p.add_argument("--grid-theta", type=int, default=32)
    p.add_argument("--grid-phi", type=int, default=64)

    for name in ("analytic", "compare"):
        p = sub.add_parser(name, parents=[common], help="momentum-space variance series")
        p.add_argument("--quad", type=int, default=momentum.DEFAULT_QUAD, dest="n_quad")
    return parser


def spec_from_args(args: argparse.Namespace) -> RunSpec:
    steps = args.steps if args.steps is not None else (300 if args.subcommand == "compare" else 100)
    try:
        params = kernel.KernelParams(args.g0, args.eta)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    extra = {}
    for name in ("distributions", "snapshots", "baselines", "dt", "method", "n_quad", "grid_theta", "grid_phi"):
        if hasattr(args, name):
            extra[name] = getattr(args, name)
    return RunSpec(
        subcommand=args.subcommand,
        params=params,
        steps=steps,
        mode=args.mode,
        kappa=args.kappa,
        coin=args.coin,
        output=args.output,
        seed=args.seed,
        **extra,
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        spec = spec_from_args(args)
        written = RUNNERS[spec.subcommand](spec)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"nmqw: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvariantError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"nmqw: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"nmqw: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"nmqw: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    log.info("wrote %s", ", ".join(written))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

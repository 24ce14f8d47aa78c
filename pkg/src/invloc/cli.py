"""Command-line entry point: one inverse (or forward) run per invocation."""

from __future__ import annotations

import argparse
import enum
import logging
import sys
import time
from contextlib import ExitStack
from dataclasses import dataclass
from pathlib import Path

from . import inverse
from .core import Instance, NormTag, Point
from .errors import (
    DegenerateInstanceError,
    InvalidArgumentError,
    ParseError,
    SolverFailureError,
    SubproblemFailureError,
    SubproblemInfeasibleError,
)
from .forward import solve_median
from .io import attach_random_params, emit_trace_csv, load_xy_points, parse_instance
from .plot import emit_svg

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2


class Algorithm(enum.Enum):
    ISFLP1 = "isflp1"
    ISFLP2 = "isflp2"
    BASELINE = "baseline"
    FORWARD = "forward"


@dataclass(frozen=True)
class RunConfig:
    instance_path: str
    norm: NormTag
    algorithm: Algorithm
    target: Point | None
    epsilon: float
    stop_kind: inverse.StopKind
    max_iter: int
    seed: int = 0
    trace_out: str | None = None
    plot_out: str | None = None
    lp_dump: str | None = None
    from_points: bool = False
    param_lo: float = 1.0
    param_hi: float = 10.0

    def __post_init__(self):
        if self.algorithm is Algorithm.BASELINE and self.norm is not NormTag.SQUARED_EUCLIDEAN:
            raise InvalidArgumentError("baseline requires squared-Euclidean norm")
        if self.algorithm is not Algorithm.FORWARD and self.target is None:
            raise InvalidArgumentError("--target is required for inverse runs")
        if not self.epsilon > 0:
            raise InvalidArgumentError("--eps must be positive")
        if self.max_iter < 1:
            raise InvalidArgumentError("--max-iter must be positive")
        if not 0 <= self.seed < 2**64:
            raise InvalidArgumentError("--seed must be a 64-bit unsigned integer")


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidArgumentError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _ArgumentParser(prog="invloc", description="Inverse minisum location with variable coordinates.")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--instance", help="instance file (a b w c1+ c2+ c1- c2- per line)")
    src.add_argument("--points", help="two-column coordinate file; weights/costs are drawn at random")
    p.add_argument("--seed", type=int, default=0, help="seed for --points parameters and CCP restarts")
    p.add_argument("--param-lo", type=float, default=1.0)
    p.add_argument("--param-hi", type=float, default=10.0)
    p.add_argument("--norm", choices=[t.value for t in NormTag], default=None,
                   help="overrides the instance header (default sq)")
    p.add_argument("--algo", choices=[a.value for a in Algorithm], default="isflp1")
    p.add_argument("--target", nargs=2, type=float, metavar=("X", "Y"))
    p.add_argument("--eps", type=float, default=None,
                   help="stop tolerance (default 1e-4 for dist, 0.01 for gap, 1e-6 for fixpoint)")
    p.add_argument("--stop", choices=[k.value for k in inverse.StopKind], default=None,
                   help="stop rule (default dist for sq, gap otherwise)")
    p.add_argument("--max-iter", type=int, default=inverse.DEFAULT_MAX_ITER_INVERSE)
    p.add_argument("--trace", help="write the iteration trace as CSV")
    p.add_argument("--plot", help="write an SVG figure of the run")
    p.add_argument("--lp-dump", help="append every squared-Euclidean subproblem LP in text form")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


_DEFAULT_EPS = {
    inverse.StopKind.TARGET_DISTANCE: 1e-4,
    inverse.StopKind.RELATIVE_GAP: 0.01,
    inverse.StopKind.COORDINATE_FIXPOINT: 1e-6,
}


def config_from_args(args: argparse.Namespace, header_norm: NormTag | None = None) -> RunConfig:
    if args.norm is not None:
        norm = NormTag.parse(args.norm)
    else:
        norm = header_norm or NormTag.SQUARED_EUCLIDEAN
    if args.stop is not None:
        kind = inverse.StopKind(args.stop)
    elif norm is NormTag.SQUARED_EUCLIDEAN:
        kind = inverse.StopKind.TARGET_DISTANCE
    else:
        kind = inverse.StopKind.RELATIVE_GAP
    eps = _DEFAULT_EPS[kind] if args.eps is None else args.eps
    return RunConfig(
        instance_path=args.instance or args.points,
        norm=norm,
        algorithm=Algorithm(args.algo),
        target=None if args.target is None else Point(*args.target),
        epsilon=eps,
        stop_kind=kind,
        max_iter=args.max_iter,
        seed=args.seed,
        trace_out=args.trace,
        plot_out=args.plot,
        lp_dump=args.lp_dump,
        from_points=args.points is not None,
        param_lo=args.param_lo,
        param_hi=args.param_hi,
    )


def load_instance(args: argparse.Namespace) -> Instance:
    if args.instance:
        return parse_instance(Path(args.instance).read_text())
    points = load_xy_points(Path(args.points).read_text())
    return attach_random_params(points, args.seed, args.param_lo, args.param_hi)


def run(cfg: RunConfig, instance: Instance) -> inverse.SolveReport:
    instance = instance.with_norm(cfg.norm)
    if cfg.algorithm is Algorithm.BASELINE:
        report = inverse.baseline_sqeuclid(instance, cfg.target)
        if cfg.lp_dump:
            with open(cfg.lp_dump, "w") as fh:
                inverse.build_baseline_lp(instance, cfg.target).dump(fh)
        return report
    stop = inverse.StopRule(cfg.stop_kind, cfg.epsilon)
    solver = inverse.isflp1 if cfg.algorithm is Algorithm.ISFLP1 else inverse.isflp2
    with ExitStack() as stack:
        on_spec = None
        if cfg.lp_dump:
            sink = stack.enter_context(open(cfg.lp_dump, "w"))
            on_spec = _lp_dumper(sink)
        return solver(instance, cfg.target, stop, cfg.max_iter, seed=cfg.seed, on_spec=on_spec)


def _lp_dumper(sink):
    from .subproblem import build_sqeuclid_lp

    counter = [0]

    def dump(spec):
        counter[0] += 1
        sink.write(f"# subproblem {counter[0]}\n")
        if spec.norm is NormTag.SQUARED_EUCLIDEAN:
            build_sqeuclid_lp(spec).dump(sink)
        else:
            sink.write("# nonlinear subproblem (solved by CCP), no single LP to dump\n")

    return dump


def _forward(instance: Instance, cfg: RunConfig) -> int:
    t0 = time.perf_counter()
    med = solve_median(instance.with_norm(cfg.norm))
    elapsed = time.perf_counter() - t0
    print(f"median=({med.location.x:.6f}, {med.location.y:.6f}) value={med.value:.6f} "
          f"iterations={med.iterations} elapsed_s={elapsed:.6f}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        instance = load_instance(args)
        cfg = config_from_args(args, instance.norm if args.instance else None)
    except (InvalidArgumentError, ParseError, DegenerateInstanceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if cfg.algorithm is Algorithm.FORWARD:
        try:
            return _forward(instance, cfg)
        except DegenerateInstanceError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG

    try:
        report = run(cfg, instance)
    except (InvalidArgumentError, DegenerateInstanceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverFailureError, SubproblemFailureError, SubproblemInfeasibleError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER

    try:
        if cfg.trace_out:
            with open(cfg.trace_out, "w") as fh:
                emit_trace_csv(report, fh)
        if cfg.plot_out:
            with open(cfg.plot_out, "w") as fh:
                emit_svg(report.initial, report, cfg.target, fh)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    print(f"cost={report.accumulated_cost:.6f} net_cost={report.net_cost:.6f} "
          f"iterations={report.num_iterations} stop={report.stop_reason.value} "
          f"elapsed_s={report.elapsed_seconds:.6f}")
    if report.stop_reason is inverse.StopReason.SUBPROBLEM_FAILED:
        print(f"solver failure: {report.message}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

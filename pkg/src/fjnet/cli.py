"""Command-line interface: analyze, simulate, tv-simulate, certify, generate.

Exit codes: 0 success, 2 parse/validation error, 3 certificate UNKNOWN under
--require-stable. Set FJ_LOG=DEBUG|INFO|WARNING for diagnostics.
"""

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import fileio, fixtures
from .dynamics import consensus_check, simulate, tv_simulate
from .errors import FJNetError, ParseError
from .graphs import natural_params
from .stability import (
    Verdict,
    stability_report,
    tv_consensus_criterion,
    tv_stability_certificate_cfj,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_UNKNOWN = 3

log = logging.getLogger("fjnet")


def _configure_logging():
    level = os.environ.get("FJ_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(name)s: %(message)s")


def _resolve_x0(source: str, prejudice: np.ndarray, n: int) -> np.ndarray:
    if source == "u":
        return np.array(prejudice)
    if source.startswith("const:"):
        return np.full(n, float(source[len("const:"):]))
    if source.startswith("values:"):
        values = [float(t) for t in source[len("values:"):].split(",")]
        if len(values) != n:
            raise FJNetError(f"x0 needs {n} values, got {len(values)}")
        return np.array(values)
    if source.startswith("file:"):
        path = source[len("file:"):]
        with open(path, "r", encoding="utf-8") as handle:
            tokens = handle.read().split()
        values = [float(t) for t in tokens]
        if len(values) != n:
            raise FJNetError(f"x0 file {path!r} holds {len(values)} values, need {n}")
        return np.array(values)
    raise FJNetError(f"unknown x0 source {source!r}; use u, const:V, values:a,b,... or file:PATH")


def _emit(text: str, out_path):
    if out_path:
        fileio.write_text(out_path, text)
    else:
        sys.stdout.write(text)


def _analyze_one(path, args) -> str:
    network = fileio.parse_network(path, row_tol=args.row_tol)
    model = network.model
    report = stability_report(
        model.profile, model.influence, delta=args.delta, eps=args.eps, tol=args.tol
    )
    lines = [f"network: {path}", f"n: {model.n}"]
    prejudiced = [i for i, d in enumerate(report.criterion_witness) if d == 0.0]
    lines.append("prejudiced_agents: " + (" ".join(str(i + 1) for i in prejudiced) or "none"))
    nat = natural_params(model.profile, model.influence)
    if nat is not None:
        lines.append(f"epsilon_0: {nat[0]:.17g}")
        lines.append(f"delta_0: {nat[1]:.17g}")
    body = fileio.render_stability_report(report, labels=network.labels).rstrip("\n")
    lines.append(body)
    if report.schur_stable:
        agree, value = consensus_check(model)
        if agree:
            lines.append(f"consensus_precondition: satisfied (common prejudice {value:.17g})")
        else:
            lines.append("consensus_precondition: violated (prejudices differ on the prejudiced set)")
    else:
        lines.append("consensus_precondition: not applicable (model is not Schur stable)")
    return "\n".join(lines) + "\n"


def cmd_analyze(args) -> int:
    code = EXIT_OK
    results = []
    if args.jobs > 1 and len(args.network) > 1:
        def worker(path):
            try:
                return path, _analyze_one(path, args), None
            except (FJNetError, OSError) as exc:
                return path, None, exc

        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(worker, args.network))
    else:
        for path in args.network:
            try:
                results.append((path, _analyze_one(path, args), None))
            except (FJNetError, OSError) as exc:
                results.append((path, None, exc))
    for index, (path, text, error) in enumerate(results):
        if error is not None:
            print(f"error: {error}", file=sys.stderr)
            code = EXIT_INPUT
            continue
        if index > 0:
            sys.stdout.write("\n")
        sys.stdout.write(text)
    return code


def cmd_simulate(args) -> int:
    network = fileio.parse_network(args.network, row_tol=args.row_tol)
    model = network.model
    x0 = _resolve_x0(args.x0, model.prejudice, model.n)
    trajectory = simulate(model, x0=x0, max_steps=args.steps, conv_tol=args.tol, stride=args.stride)
    _emit(fileio.format_trajectory(trajectory, model.n), args.out)
    return EXIT_OK


def cmd_tv_simulate(args) -> int:
    schedule_file = fileio.parse_schedule(args.schedule, row_tol=args.row_tol)
    schedule = schedule_file.schedule
    u = schedule_file.prejudice
    x0 = _resolve_x0(args.x0, u, schedule.n)
    trajectory = tv_simulate(schedule, x0, u, steps=args.steps, conv_tol=args.tol, stride=args.stride)
    _emit(fileio.format_trajectory(trajectory, schedule.n), args.out)
    return EXIT_OK


def cmd_certify(args) -> int:
    schedule_file = fileio.parse_schedule(args.schedule, row_tol=args.row_tol)
    schedule = schedule_file.schedule
    if args.mode == "cfj":
        if args.delta is None or args.eps is None or args.s is None:
            raise FJNetError("cfj mode needs --delta, --eps and --s")
        certificate = tv_stability_certificate_cfj(schedule, args.delta, args.eps, args.s)
    else:
        if args.eps is None:
            raise FJNetError("window mode needs --eps (and optionally --window)")
        certificate = tv_consensus_criterion(schedule, args.eps, args.window)
    _emit(fileio.render_certificate(certificate, n=schedule.n), args.out)
    if args.require_stable and certificate.verdict is not Verdict.STABLE:
        return EXIT_UNKNOWN
    return EXIT_OK


def cmd_generate(args) -> int:
    if args.kind == "cycle":
        text = fileio.format_network(fixtures.cycle_network(args.n, args.delta))
    elif args.kind == "example1":
        schedule, u, _ = fixtures.example1_schedule()
        text = fileio.format_schedule(fileio.ScheduleFile(schedule=schedule, prejudice=u))
    elif args.kind == "example2":
        schedule, u, _ = fixtures.example2_schedule()
        text = fileio.format_schedule(fileio.ScheduleFile(schedule=schedule, prejudice=u))
    else:
        model = fixtures.random_connected_network(args.n, args.seed, density=args.density)
        text = fileio.format_network(model)
    _emit(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fjnet",
        description="Opinion dynamics with prejudiced agents: analysis, simulation, certificates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="stability and consensus analysis of network files")
    analyze.add_argument("network", nargs="+", help="network file(s)")
    analyze.add_argument("--delta", type=float, default=None, help="class margin (default: natural)")
    analyze.add_argument("--eps", type=float, default=None, help="arc threshold (default: natural)")
    analyze.add_argument("--tol", type=float, default=1e-10, help="spectral radius tolerance")
    analyze.add_argument("--row-tol", type=float, default=1e-9, help="row-sum tolerance on input")
    analyze.add_argument("--jobs", type=int, default=1, help="analyze files concurrently")
    analyze.set_defaults(func=cmd_analyze)

    simulate_p = sub.add_parser("simulate", help="simulate a stationary model")
    simulate_p.add_argument("network")
    simulate_p.add_argument("--x0", default="u", help="u | const:V | values:a,b,... | file:PATH")
    simulate_p.add_argument("--steps", type=int, default=10_000)
    simulate_p.add_argument("--tol", type=float, default=1e-10, help="convergence tolerance")
    simulate_p.add_argument("--stride", type=int, default=None, help="record every stride-th step")
    simulate_p.add_argument("--row-tol", type=float, default=1e-9)
    simulate_p.add_argument("--out", default=None, help="trajectory output path (default stdout)")
    simulate_p.set_defaults(func=cmd_simulate)

    tv = sub.add_parser("tv-simulate", help="simulate a time-varying schedule")
    tv.add_argument("schedule")
    tv.add_argument("--x0", default="u", help="u | const:V | values:a,b,... | file:PATH")
    tv.add_argument("--steps", type=int, default=1000)
    tv.add_argument("--tol", type=float, default=0.0, help="early-stop tolerance (0: run all steps)")
    tv.add_argument("--stride", type=int, default=None)
    tv.add_argument("--row-tol", type=float, default=1e-9)
    tv.add_argument("--out", default=None)
    tv.set_defaults(func=cmd_tv_simulate)

    certify = sub.add_parser("certify", help="stability certificate for a periodic schedule")
    certify.add_argument("schedule")
    certify.add_argument("--mode", choices=("cfj", "window"), default="cfj")
    certify.add_argument("--delta", type=float, default=None)
    certify.add_argument("--eps", type=float, default=None)
    certify.add_argument("--s", type=int, default=None, help="window length minus one (cfj mode)")
    certify.add_argument("--window", type=int, default=1, help="union window T (window mode)")
    certify.add_argument("--require-stable", action="store_true", help="exit 3 unless STABLE")
    certify.add_argument("--row-tol", type=float, default=1e-9)
    certify.add_argument("--out", default=None)
    certify.set_defaults(func=cmd_certify)

    generate = sub.add_parser("generate", help="write bundled fixtures")
    generate.add_argument("kind", choices=("cycle", "example1", "example2", "random"))
    generate.add_argument("--n", type=int, default=4)
    generate.add_argument("--delta", type=float, default=0.5)
    generate.add_argument("--seed", type=int, default=0)
    generate.add_argument("--density", type=float, default=0.35)
    generate.add_argument("--out", default=None)
    generate.set_defaults(func=cmd_generate)

    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (FJNetError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

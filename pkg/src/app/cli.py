"""
collrates command line.

    python -m app.cli rate --decoder joint --class A --pdf tardos --c 2
    python -m app.cli worst-attack --decoder simple --class C --c 2..9
    python -m app.cli rate --class A,B,C,D --pdf flat --c 3..5
    python -m app.cli curve --decoder simple --class D --c 5 --grid 501
    python -m app.cli eta --c 3..10
    python -m app.cli capacity-d --c 2..20
    python -m app.cli mc-check --decoder joint --class C --c 3 --samples 1000000
    python -m app.cli tables --out tables/

Data goes to stdout or --out; logs go to stderr.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from core.analysis import check_class_ordering
from core.collusion import ClassTag, CollusionChannel, classA, parse_channel
from core.config import DEFAULT_NUMERICS
from core.errors import EXIT_INVALID_CONFIG, EXIT_OK, InvalidInputError, exit_code_for
from core.oracle import estimate_mi
from core.provenance import generate_provenance_banner, provenance_fields
from core.rate_manager import RateManager, default_rate_manager
from core.rates import Decoder, rate
from core.reports import RateReport
from core.timeshare import TimeSharingDist, parse_dist
from core.worst import SolverConfig, capacity_classd_joint, eta_c

from .outputs import emit, render_object, render_rows
from .run_config import COMMANDS, FORMATS, RunConfig, parse_c_range, parse_class_list, validate_run_config

logger = logging.getLogger(__name__)

RATE_HEADER = ["c", "decoder", "class", "pdf", "rate_bits", "theta"]
WORST_HEADER = RATE_HEADER + ["iterations", "final_gap_bits"]
TABLE_HEADER = ["c", "theta*", "rate_bits"]

TABLE_CS = tuple(range(2, 10))
ETA_TABLE_CS = (3, 4, 5, 6, 10, 15, 20)

# solver noise allowed when comparing rates across classes
CLASS_ORDER_SLACK_BITS = 1e-6

DEFAULT_C = {
    "eta": "3..10",
    "capacity-d": "2..10",
}


# ---------------------------------------------------------------------- #
# Argument parsing
# ---------------------------------------------------------------------- #


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--decoder", choices=[d.value for d in Decoder], default=Decoder.JOINT.value,
                        help="Decoder whose rate is computed")
    common.add_argument("--class", dest="class_list", default=None,
                        help="Collusion class A|B|C|D, or a list such as A,B,C,D for rate / worst-attack "
                             "(default A, or C for worst-attack / mc-check)")
    common.add_argument("--pdf", default="tardos",
                        help="tardos | flat | dirac:<p0> | discrete:<p>:<w>,... | bs:<n>")
    common.add_argument("--c", dest="c_range", default=None, help="Collusion size: <int>, a..b or a,b,c")
    common.add_argument("--grid", type=int, default=DEFAULT_NUMERICS.curve_grid, help="Curve grid points")
    common.add_argument("--tol", type=float, default=SolverConfig.gap_tol_bits, help="Solver gap tolerance in bits")
    common.add_argument("--max-iters", type=int, default=SolverConfig.max_iters, help="Solver iteration cap")
    common.add_argument("--restarts", type=int, default=SolverConfig.restarts, help="Multistart restarts")
    common.add_argument("--seed", type=int, default=0, help="Seed for solvers and Monte-Carlo")
    common.add_argument("--samples", type=int, default=1_000_000, help="Monte-Carlo samples")
    common.add_argument("--channel", default=None,
                        help="mc-check: explicit channel (comma list or named attack) instead of the class")
    common.add_argument("--plugin", action="store_true", help="mc-check: empirical plug-in estimator")
    common.add_argument("--format", dest="fmt", choices=FORMATS, default=None, help="Output format")
    common.add_argument("--out", default=None, help="Output file (directory for tables)")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    common.add_argument("-q", "--quiet", action="store_true", help="Warnings and errors only")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="collrates",
        description="Achievable rates of probabilistic traitor-tracing codes under collusion",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_parser()
    helps = {
        "rate": "Rate per c for one (decoder, class, pdf)",
        "worst-attack": "Worst collusion attack and its rate per c",
        "curve": "Pointwise rate r(c, p) over a uniform grid",
        "eta": "Lower end of the simple-decoder null-rate interval",
        "capacity-d": "Joint Class-D capacity per c",
        "mc-check": "Monte-Carlo mutual information against the quadrature rate",
        "tables": "Write the joint, simple and eta tables as TSV files",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    command = args.command
    default_class = ClassTag.C if command in ("worst-attack", "mc-check") else ClassTag.A
    c_text = args.c_range or DEFAULT_C.get(command)
    if c_text is None and command != "tables":
        raise InvalidInputError(f"{command} needs --c")
    fmt = args.fmt or {"mc-check": "json", "tables": "tsv"}.get(command, "csv")
    return RunConfig(
        command=command,
        decoder=Decoder(args.decoder),
        classes=parse_class_list(args.class_list) if args.class_list else [default_class],
        pdf=args.pdf,
        cs=parse_c_range(c_text) if c_text else [],
        out=args.out,
        fmt=fmt,
        solver=SolverConfig(
            max_iters=args.max_iters,
            gap_tol_bits=args.tol,
            restarts=args.restarts,
            seed=args.seed,
        ),
        samples=args.samples,
        seed=args.seed,
        grid=args.grid,
        channel=args.channel,
        plugin=args.plugin,
    )


def _setup_logging(verbose: bool, quiet: bool) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        stream=sys.stderr,
        force=True,
    )


# ---------------------------------------------------------------------- #
# Commands
# ---------------------------------------------------------------------- #


def _provenance(cfg: RunConfig) -> Dict[str, object]:
    extra: Dict[str, object] = {
        "decoder": cfg.decoder.value,
        "class": ",".join(tag.value for tag in cfg.classes),
        "pdf": cfg.pdf,
    }
    if cfg.command == "curve":
        extra["grid"] = cfg.grid
    if cfg.command == "mc-check":
        extra.update({"samples": cfg.samples, "seed": cfg.seed, "plugin": cfg.plugin})
    fields = provenance_fields(cfg.command, DEFAULT_NUMERICS, cfg.solver, extra)
    logger.info("\n%s", generate_provenance_banner(fields))
    return fields


def _class_reports(cfg: RunConfig, manager: RateManager, dist: TimeSharingDist) -> List[RateReport]:
    """Reports ordered by c, then class A..D; several classes are checked for R_D <= R_C <= R_B <= R_A."""
    if len(cfg.classes) == 1:
        return manager.sweep(cfg.decoder, cfg.class_tag, cfg.cs, dist, cfg.solver, DEFAULT_NUMERICS)
    reports: List[RateReport] = []
    for c in sorted(set(cfg.cs)):
        reports.extend(manager.ordering(cfg.decoder, c, dist, cfg.solver, DEFAULT_NUMERICS, cfg.classes))
    for problem in check_class_ordering(reports, slack=CLASS_ORDER_SLACK_BITS):
        logger.warning("[RATE] class ordering violated: %s", problem)
    return reports


def cmd_rate(cfg: RunConfig, manager: RateManager) -> str:
    dist = parse_dist(cfg.pdf)
    reports = _class_reports(cfg, manager, dist)
    rows = [
        [r.c, r.decoder.value, r.class_tag.value, dist.selector(), r.rate_bits, r.theta_text()]
        for r in reports
    ]
    return render_rows(RATE_HEADER, rows, cfg.fmt, _provenance(cfg))


def cmd_worst_attack(cfg: RunConfig, manager: RateManager) -> str:
    dist = parse_dist(cfg.pdf)
    reports = _class_reports(cfg, manager, dist)
    rows = []
    for r in reports:
        rows.append([r.c, r.decoder.value, r.class_tag.value, dist.selector(), r.rate_bits,
                     r.theta_text(), r.diagnostics.iterations, r.diagnostics.final_gap_bits])
        if r.theta_samples:
            for sample in r.theta_samples:
                logger.info("c=%d p=%.2f theta=%s", r.c, sample[0],
                            ",".join(f"{t:.4f}" for t in sample[1:]))
    return render_rows(WORST_HEADER, rows, cfg.fmt, _provenance(cfg))


def cmd_curve(cfg: RunConfig, manager: RateManager) -> str:
    dist = parse_dist(cfg.pdf)
    (c,) = cfg.cs
    data = manager.curve(cfg.decoder, cfg.class_tag, c, dist, cfg.grid, cfg.solver, DEFAULT_NUMERICS)
    header = ["p", "rate_bits"]
    if data.thetas is not None:
        header.append("theta")
        rows = [[float(p), float(r), ",".join(repr(float(t)) for t in th)]
                for p, r, th in zip(data.ps, data.rates_bits, data.thetas)]
    else:
        rows = [[float(p), float(r)] for p, r in zip(data.ps, data.rates_bits)]
    return render_rows(header, rows, cfg.fmt, _provenance(cfg))


def cmd_eta(cfg: RunConfig) -> str:
    rows = []
    for c in cfg.cs:
        eta = eta_c(c)
        rows.append([c, eta, eta - 1.0 / c])
    return render_rows(["c", "eta", "eta_minus_inv_c"], rows, cfg.fmt, _provenance(cfg))


def cmd_capacity_d(cfg: RunConfig, manager: RateManager) -> str:
    rows = []
    for c in cfg.cs:
        capacity = capacity_classd_joint(c)
        check = manager.solve(Decoder.JOINT, ClassTag.D, c, parse_dist("dirac:0.5"),
                              cfg.solver, DEFAULT_NUMERICS).rate_bits
        rows.append([c, capacity, check])
    return render_rows(["c", "capacity_bits", "quadrature_bits"], rows, cfg.fmt, _provenance(cfg))


def cmd_mc_check(cfg: RunConfig, manager: RateManager) -> str:
    if len(cfg.cs) != 1:
        raise InvalidInputError("mc-check takes a single --c value")
    (c,) = cfg.cs
    dist = parse_dist(cfg.pdf)
    if cfg.channel:
        attack = parse_channel(cfg.channel, c)
        class_value = attack.class_tag().value
        reference = rate(cfg.decoder, attack, dist, DEFAULT_NUMERICS)
    elif cfg.class_tag == ClassTag.A:
        attack = classA(c)
        class_value = ClassTag.A.value
        reference = rate(cfg.decoder, attack, dist, DEFAULT_NUMERICS)
    else:
        report = manager.solve(cfg.decoder, cfg.class_tag, c, dist, cfg.solver, DEFAULT_NUMERICS)
        attack = report.channel
        class_value = report.class_tag.value
        reference = report.rate_bits

    est = estimate_mi(cfg.decoder, c, attack, dist, cfg.samples, cfg.seed, plugin=cfg.plugin)
    z = est.z_score(reference)
    if abs(z) > 3.0:
        logger.warning("[MC] estimate is %.2f standard errors from the quadrature rate", z)
    payload = {
        "decoder": cfg.decoder.value,
        "class": class_value,
        "c": c,
        "pdf": dist.selector(),
        "mi_bits": est.mi_bits,
        "std_err_bits": est.std_err_bits,
        "samples": est.samples,
        "seed": est.seed,
        "reference_rate_bits": reference,
        "z_score": z,
    }
    return render_object(payload, _provenance(cfg))


def _theta_cell(ch: CollusionChannel) -> str:
    return f"({ch.to_text(3)})"


def cmd_tables(cfg: RunConfig, manager: RateManager) -> Dict[str, str]:
    """The three table files, keyed by file name."""
    tardos = parse_dist("tardos")
    files: Dict[str, str] = {}
    for decoder, name in ((Decoder.JOINT, "table_joint_tardos.tsv"), (Decoder.SIMPLE, "table_simple_tardos.tsv")):
        reports = manager.sweep(decoder, ClassTag.C, TABLE_CS, tardos, cfg.solver, DEFAULT_NUMERICS)
        rows = [[r.c, _theta_cell(r.channel), f"{r.rate_bits:.3f}"] for r in reports]
        table_cfg = RunConfig(command="tables", decoder=decoder, classes=[ClassTag.C], pdf="tardos",
                              fmt="tsv", solver=cfg.solver)
        files[name] = render_rows(TABLE_HEADER, rows, "tsv", _provenance(table_cfg))

    eta_rows = [[c, f"{eta_c(c) - 1.0 / c:.1e}"] for c in ETA_TABLE_CS]
    files["table_eta.tsv"] = render_rows(["c", "eta_minus_inv_c"], eta_rows, "tsv", _provenance(cfg))
    return files


# ---------------------------------------------------------------------- #
# Entry point
# ---------------------------------------------------------------------- #


def run(cfg: RunConfig, manager: Optional[RateManager] = None) -> None:
    manager = manager or default_rate_manager
    if cfg.command == "tables":
        out_dir = Path(cfg.out or ".")
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, text in cmd_tables(cfg, manager).items():
            emit(text, str(out_dir / name))
            logger.info("Wrote %s", out_dir / name)
        return

    handlers = {
        "rate": lambda: cmd_rate(cfg, manager),
        "worst-attack": lambda: cmd_worst_attack(cfg, manager),
        "curve": lambda: cmd_curve(cfg, manager),
        "eta": lambda: cmd_eta(cfg),
        "capacity-d": lambda: cmd_capacity_d(cfg, manager),
        "mc-check": lambda: cmd_mc_check(cfg, manager),
    }
    emit(handlers[cfg.command](), cfg.out)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _setup_logging(args.verbose, args.quiet)

    try:
        cfg = config_from_args(args)
        ok, problems = validate_run_config(cfg)
        for problem in problems:
            log = logger.error if problem.severity == "error" else logger.warning
            log("%s: %s", problem.option or "config", problem.message)
        if not ok:
            return EXIT_INVALID_CONFIG
        run(cfg)
    except Exception as exc:  # noqa: BLE001
        code = exit_code_for(exc)
        if code is None:
            raise
        logger.error("%s", exc)
        return code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""
Command-line entry point.

    python -m verification.main aut --group 2,2
    python -m verification.main verify --max-order 9 --format json
    python -m verification.main lemmas --group 2,4
    python -m verification.main table --group 4 --format csv

stdout carries report data only; logs go to stderr.
"""
import argparse
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from math import prod
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from loguru import logger
from pydantic import ValidationError

from algebra.abelian_group import abelian_groups_up_to, automorphism_count_formula, enumerate_group_automorphisms, parse_group
from algebra.automorphisms import enumerate_monoid_automorphisms, search_with_statistics
from algebra.models import GroupSpec
from algebra.power_monoid import make_context
from utils.errors import ContractViolation, ResourceBoundExceeded
from utils.logger import setup_logging
from utils.settings import get_settings
from verification.exit_codes import ExitCodes
from verification.lemma_harness import (
    KLEIN_FOUR,
    base_case_checks,
    check_idempotents,
    check_pullback_homomorphism,
    run_lemma_suite,
    skipped_report,
    verify_example_c2sq,
    verify_main_theorem,
)
from verification.report import render_aut, render_reports, render_table
from verification.schemas import CliConfig, Command, OutputFormat, VerificationReport


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(
        prog="powmon",
        description="Automorphisms of reduced power monoids of finite abelian groups",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.TEXT.value)
    common.add_argument("--out", help="write the report to this file instead of stdout")
    common.add_argument("--budget", type=int, default=settings.budget, help="search node budget (env POWMON_BUDGET)")
    common.add_argument("--parallelism", type=int, default=settings.parallelism, help="worker processes for sweeps")
    common.add_argument("--strict", action="store_true", help="exit 3 when any check was skipped")
    common.add_argument("--raw", action="store_true", help="keep the factor list as typed in the output")
    common.add_argument("--log-level", default=settings.log_level, help="loguru level for stderr")

    aut = subparsers.add_parser("aut", parents=[common], help="|Aut(G)| and |Aut(P_0(G))|")
    aut.add_argument("--group", required=True, help='comma-separated cyclic factors, e.g. "2,4"')
    aut.add_argument("--emit-maps", action="store_true", help="list every automorphism")

    verify = subparsers.add_parser("verify", parents=[common], help="verify every abelian group up to an order")
    verify.add_argument("--max-order", type=int, required=True)

    lemmas = subparsers.add_parser("lemmas", parents=[common], help="run every lemma check on one group")
    lemmas.add_argument("--group", required=True)

    table = subparsers.add_parser("table", parents=[common], help="carrier listing and Cayley table")
    table.add_argument("--group", required=True)
    return parser


def _raw_factors(text: str) -> Tuple[int, ...]:
    cleaned = text.strip()
    if cleaned in ("", "1"):
        return ()
    return tuple(int(part) for part in cleaned.split(","))


def load_config(args: argparse.Namespace) -> CliConfig:
    group = raw = None
    if getattr(args, "group", None) is not None:
        group = parse_group(args.group).invariant_factors
        raw = _raw_factors(args.group)
    return CliConfig(
        command=args.command,
        group=group,
        raw_factors=raw if args.raw else None,
        max_order=getattr(args, "max_order", None),
        format=args.format,
        out=args.out,
        budget=args.budget,
        parallelism=args.parallelism,
        emit_maps=getattr(args, "emit_maps", False),
        strict=args.strict,
        raw=args.raw,
        log_level=args.log_level,
    )


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
        logger.info(f"report written to {out}")
    else:
        sys.stdout.write(text)


def _exit_code(reports: Sequence[VerificationReport], strict: bool) -> int:
    if not all(r.passed for r in reports):
        return ExitCodes.VERIFICATION_FAILED
    if strict and any(r.skipped for r in reports):
        return ExitCodes.RESOURCE_BOUND
    return ExitCodes.SUCCESS


def cmd_aut(config: CliConfig) -> int:
    started = time.perf_counter()
    g = GroupSpec(invariant_factors=config.group)
    ctx = make_context(g)
    aut_g_order = len(enumerate_group_automorphisms(g))
    kernel, stats = search_with_statistics(ctx, config.budget)
    maps = enumerate_monoid_automorphisms(ctx, config.budget, kernel=kernel)
    metadata = {"elapsed_seconds": round(time.perf_counter() - started, 6), "search": stats.model_dump()}
    _emit(render_aut(ctx, aut_g_order, maps, config.format, config.emit_maps, config.raw_factors, metadata), config.out)
    return ExitCodes.SUCCESS


def verify_group(factors: Tuple[int, ...], budget: int, log_level: str) -> VerificationReport:
    """One group of a sweep; runs in a worker process when parallelism > 1."""
    setup_logging(log_level)
    g = GroupSpec(invariant_factors=factors)
    try:
        ctx = make_context(g)
    except ResourceBoundExceeded as e:
        return skipped_report(factors, str(e), automorphism_count_formula(g))
    return verify_main_theorem(ctx, budget)


def cmd_verify(config: CliConfig) -> int:
    started = time.perf_counter()
    groups = [g.invariant_factors for g in abelian_groups_up_to(config.max_order)]
    logger.info(f"verifying {len(groups)} groups of order <= {config.max_order}")
    if config.parallelism > 1 and len(groups) > 1:
        with ProcessPoolExecutor(max_workers=config.parallelism) as pool:
            futures = [pool.submit(verify_group, factors, config.budget, config.log_level) for factors in groups]
            reports = [future.result() for future in futures]
    else:
        reports = [verify_group(factors, config.budget, config.log_level) for factors in groups]
    reports.sort(key=lambda r: (prod(r.group), r.group))
    metadata = {"max_order": config.max_order, "elapsed_seconds": round(time.perf_counter() - started, 6)}
    _emit(render_reports(reports, config.format, metadata), config.out)
    return _exit_code(reports, config.strict)


def cmd_lemmas(config: CliConfig) -> int:
    started = time.perf_counter()
    g = GroupSpec(invariant_factors=config.group)
    ctx = make_context(g)
    kernel, _ = search_with_statistics(ctx, config.budget)
    maps = enumerate_monoid_automorphisms(ctx, config.budget, kernel=kernel)
    checks = run_lemma_suite(ctx, maps)
    checks.append(check_pullback_homomorphism(ctx, maps))
    checks.append(check_idempotents(ctx))
    checks.extend(base_case_checks(ctx, kernel))
    if g.invariant_factors == KLEIN_FOUR:
        checks.append(verify_example_c2sq(ctx, maps))
    report = VerificationReport(
        group=g.invariant_factors,
        raw_factors=config.raw_factors,
        checks=sorted(checks, key=lambda c: c.name),
        aut_g_order=len(enumerate_group_automorphisms(g)),
        aut_p0g_order=len(maps),
        exceptional=g.invariant_factors == KLEIN_FOUR,
    )
    metadata = {"automorphisms_checked": len(maps), "elapsed_seconds": round(time.perf_counter() - started, 6)}
    text = render_reports([report], config.format, metadata)
    if config.format == OutputFormat.TEXT:
        text = f"{g.label()}: {len(maps)} automorphisms checked\n" + text
    _emit(text, config.out)
    return _exit_code([report], config.strict)


def cmd_table(config: CliConfig) -> int:
    ctx = make_context(GroupSpec(invariant_factors=config.group))
    _emit(render_table(ctx, config.format), config.out)
    return ExitCodes.SUCCESS


COMMANDS = {
    Command.AUT: cmd_aut,
    Command.VERIFY: cmd_verify,
    Command.LEMMAS: cmd_lemmas,
    Command.TABLE: cmd_table,
}


def main(argv: Optional[List[str]] = None) -> int:
    try:
        parser = build_parser()
    except (ValidationError, ValueError) as e:
        sys.stderr.write(f"error: invalid settings in the environment: {e}\n")
        return ExitCodes.USAGE_ERROR
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return ExitCodes.SUCCESS if e.code == 0 else ExitCodes.USAGE_ERROR
    try:
        config = load_config(args)
    except (ContractViolation, ValidationError, ValueError) as e:
        sys.stderr.write(f"error: {e}\n")
        return ExitCodes.USAGE_ERROR

    setup_logging(config.log_level)
    try:
        return COMMANDS[config.command](config)
    except ContractViolation as e:
        logger.error(str(e))
        return ExitCodes.USAGE_ERROR
    except ResourceBoundExceeded as e:
        logger.error(f"{e} {e.stats}")
        return ExitCodes.RESOURCE_BOUND


if __name__ == "__main__":
    sys.exit(main())

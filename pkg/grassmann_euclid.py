"""Command-line entry point for the Grassmann–Euclid engine.

Exit codes: 0 when everything checked passes, 1 when a property fails,
2 for usage, configuration or input errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from rich.console import Console
from rich.table import Table

from core.config_manager import ConfigError, ConfigManager, SuiteConfig
from core.logging_setup import configure_logging
from core.report_store import ReportStore
from core.suite_runner import SUITE_NAMES, SuiteReport, SuiteRunner
from euclid_engine.algebra_core import Algebra, etale_from_poly, random_etale
from euclid_engine.codecs import DocumentCodec
from euclid_engine.errors import (
    AlgebraValidationError,
    DomainViolation,
    EngineError,
    OutsideDomainError,
    RetryBudgetExhausted,
)
from euclid_engine.euclid import big_phi, chain_report, euclid_sequence, phi_fiber_sample, phi_step, sample_good_flag
from euclid_engine.exact_linalg import PrimeField
from euclid_engine.incidence import is_good
from euclid_engine.rng_streams import derive_rng, stream_label
from euclid_engine.subspace import Side, random_subspace

logger = logging.getLogger("grassmann_euclid")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

# Stream paths for one-shot commands; suites use their own index space.
_ALGEBRA_STREAM = (1000,)
_COMMAND_STREAM = (1001,)


class UsageError(Exception):
    pass


# -------------------------
# Argument parsing
# -------------------------
def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", type=int, default=None, help="Field modulus (default 2^61-1)")
    common.add_argument("--toy", action="store_true", default=None, help="Allow primes below 2^31-1")
    common.add_argument("--seed", type=int, default=None, help="Master seed")
    common.add_argument("--trials", type=int, default=None, help="Trials per property")
    common.add_argument("--budget", type=int, default=None, help="Retry budget per sampling stage")
    common.add_argument("--out", default=None, help="Write the JSON result to this file")
    common.add_argument("--config", default=None, help="Suite configuration file (YAML or JSON)")
    common.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    common.add_argument("--poly", default=None, help="Coefficients c0,c1,...,c_{n-1} of a monic polynomial")
    common.add_argument("--neg", action="store_true", help="Negate the --poly coefficients")
    common.add_argument("--algebra", default=None, help="Algebra JSON file")
    common.add_argument("--n", type=int, default=None, help="Algebra dimension for a random étale algebra")
    common.add_argument("--r", type=int, default=None, help="Dimension r of the source Grassmannian")
    common.add_argument("--in", dest="input", default=None, help="Input JSON file (stdin when omitted)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="grassmann-euclid",
        description="Exact checks of the Euclid-chain maps between Grassmannians of an algebra",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    alg = commands.add_parser("alg", help="Algebra commands")
    alg_sub = alg.add_subparsers(dest="action", required=True)
    alg_sub.add_parser("validate", parents=[common], help="Construct and check an algebra")

    good = commands.add_parser("good", help="Goodness certificates")
    good_sub = good.add_subparsers(dest="action", required=True)
    check = good_sub.add_parser("check", parents=[common], help="Certify a subspace, or sample a good flag")
    check.add_argument("--pairs", default=None, help="Pairs r,s separated by ';' (needs a U document)")

    chain = commands.add_parser("chain", help="Euclid chain")
    chain_sub = chain.add_subparsers(dest="action", required=True)
    chain_sub.add_parser("run", parents=[common], help="Run the full chain on one subspace")

    verify = commands.add_parser("verify", parents=[common], help="Run property suites")
    verify.add_argument("--suite", default="all", choices=SUITE_NAMES + ("all",))
    verify.add_argument("--replay", default=None, help="Re-run the failures recorded in a report")

    point = commands.add_parser("point", help="Single step maps")
    point_sub = point.add_subparsers(dest="action", required=True)
    point_sub.add_parser("map", parents=[common], help="Apply one step map")
    point_sub.add_parser("fiber", parents=[common], help="Sample a preimage of one step map")
    return parser


# -------------------------
# Shared helpers
# -------------------------
def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    overrides: Dict[str, Any] = {
        "prime": args.prime,
        "toy": True if args.toy else None,
        "seed": args.seed,
        "trials": args.trials,
        "budget": args.budget,
        "out": args.out,
    }
    if getattr(args, "n", None) is not None and getattr(args, "r", None) is not None:
        overrides["cases"] = [(args.n, args.r)]
    return overrides


def _parse_ints(text: str) -> List[int]:
    try:
        return [int(part) for part in text.replace(" ", "").split(",") if part]
    except ValueError as exc:
        raise UsageError(f"cannot parse integers from {text!r}") from exc


def _resolve_algebra(args: argparse.Namespace, config: SuiteConfig, document: Optional[Dict[str, Any]] = None) -> Algebra:
    field = PrimeField(config.prime, toy=config.toy)
    if args.poly:
        coeffs = _parse_ints(args.poly)
        if args.neg:
            coeffs = [-c for c in coeffs]
        return etale_from_poly(coeffs, field)
    codec = DocumentCodec()
    if args.algebra:
        return codec.algebra(codec.load(Path(args.algebra)), toy=config.toy)
    if document is not None and "algebra" in document:
        return codec.algebra(document["algebra"], toy=config.toy)
    if args.n:
        return random_etale(args.n, field, derive_rng(config.seed, *_ALGEBRA_STREAM), config.budget)
    raise UsageError("no algebra given: use --poly, --algebra, --n or an input document with 'algebra'")


def _read_document(args: argparse.Namespace) -> Dict[str, Any]:
    codec = DocumentCodec()
    if args.input:
        return codec.load(Path(args.input))
    return codec.load_stream(sys.stdin)


def _emit(payload: Dict[str, Any], out: Optional[str]) -> None:
    codec = DocumentCodec()
    if out:
        codec.dump(payload, Path(out))
    print(codec.dumps(payload))


# -------------------------
# Commands
# -------------------------
def cmd_alg_validate(args: argparse.Namespace, config: SuiteConfig) -> int:
    document = None if (args.poly or args.algebra or args.n) else _read_document(args)
    algebra = _resolve_algebra(args, config, {"algebra": document} if document else None)
    _emit({"status": "success", "n": algebra.n, "algebra": algebra.to_json()}, args.out)
    return EXIT_OK


def cmd_good_check(args: argparse.Namespace, config: SuiteConfig) -> int:
    rng = derive_rng(config.seed, *_COMMAND_STREAM)
    if args.pairs:
        document = _read_document(args)
        algebra = _resolve_algebra(args, config, document)
        if "U" not in document:
            raise UsageError("good check --pairs needs a document with 'U'")
        U = DocumentCodec().subspace(algebra, document["U"])
        pairs: List[Tuple[int, int]] = []
        for chunk in args.pairs.split(";"):
            values = _parse_ints(chunk)
            if len(values) != 2:
                raise UsageError(f"pair {chunk!r} must be r,s")
            pairs.append((values[0], values[1]))
        certificates = is_good(algebra, U, pairs, rng, config.budget, stream_label(config.seed, _COMMAND_STREAM))
        _emit({"certificates": [c.to_json() for c in certificates]}, args.out)
        return EXIT_OK if all(c.certified for c in certificates) else EXIT_FAILURE

    if args.r is None:
        raise UsageError("good check needs --pairs with a U document, or --r for a flag")
    algebra = _resolve_algebra(args, config)
    chain = euclid_sequence(algebra.n, args.r)
    flag = sample_good_flag(
        algebra, chain, rng, config.budget, config.flag_budget, stream_label(config.seed, _COMMAND_STREAM)
    )
    _emit({"chain": chain.to_json(), "flag": flag.to_json()}, args.out)
    return EXIT_OK


def cmd_chain_run(args: argparse.Namespace, config: SuiteConfig) -> int:
    if args.r is None:
        raise UsageError("chain run needs --r")
    algebra = _resolve_algebra(args, config)
    rng = derive_rng(config.seed, *_COMMAND_STREAM)
    chain = euclid_sequence(algebra.n, args.r)
    flag = sample_good_flag(
        algebra, chain, rng, config.budget, config.flag_budget, stream_label(config.seed, _COMMAND_STREAM)
    )
    given = None
    if args.input:
        given = DocumentCodec().subspace(algebra, _read_document(args))
    for attempt in range(1, config.budget + 1):
        Y = given or random_subspace(algebra.field, algebra.n, Side.PRIMAL, args.r, rng, config.budget)
        try:
            output, trace = big_phi(algebra, Y, flag, chain)
        except OutsideDomainError as exc:
            if given is not None:
                _emit({"status": "error", "violation": exc.violation.to_json()}, args.out)
                return EXIT_FAILURE
            logger.debug("chain run: resample %d after %s", attempt, exc)
            continue
        report = chain_report(chain, flag, trace, output)
        report["input"] = Y.to_json()
        _emit(report, args.out)
        return EXIT_OK
    logger.error("chain run: no subspace in the domain after %d draws", config.budget)
    return EXIT_FAILURE


def cmd_point_map(args: argparse.Namespace, config: SuiteConfig) -> int:
    document = _read_document(args)
    algebra = _resolve_algebra(args, config, document)
    codec = DocumentCodec()
    pt = codec.point(algebra, document["point"])
    u_next = codec.subspace(algebra, document["U_next"])
    image = phi_step(algebra, pt, u_next, document.get("case"))
    if isinstance(image, DomainViolation):
        _emit({"status": "outside-domain", "violation": image.to_json()}, args.out)
        return EXIT_FAILURE
    _emit({"status": "success", "point": image.to_json()}, args.out)
    return EXIT_OK


def cmd_point_fiber(args: argparse.Namespace, config: SuiteConfig) -> int:
    document = _read_document(args)
    algebra = _resolve_algebra(args, config, document)
    codec = DocumentCodec()
    target = codec.point(algebra, document["target"])
    u_prev = codec.subspace(algebra, document["U"])
    u_next = target.U
    rng = derive_rng(config.seed, *_COMMAND_STREAM)
    preimage = phi_fiber_sample(algebra, target, u_prev, u_next, rng, config.budget, document.get("case"))
    _emit({"status": "success", "point": preimage.to_json()}, args.out)
    return EXIT_OK


def _render(console: Console, report: SuiteReport) -> None:
    table = Table(title="grassmann-euclid verification")
    table.add_column("suite")
    table.add_column("passed", justify="right")
    table.add_column("failed", justify="right")
    table.add_column("resampled", justify="right")
    table.add_column("seconds", justify="right")
    table.add_column("status")
    for suite in report.suites:
        if suite.skipped:
            status = "[yellow]skipped[/yellow]"
        else:
            status = "[green]ok[/green]" if suite.ok else "[red]FAIL[/red]"
        table.add_row(
            suite.name, str(suite.passed), str(suite.failed), str(suite.resampled_trials), f"{suite.seconds:.2f}", status
        )
    console.print(table)


def cmd_verify(args: argparse.Namespace, config: SuiteConfig, manager: ConfigManager) -> int:
    store = ReportStore(manager.get_data_root() / "reports")
    console = Console()
    if args.replay:
        loaded = store.load(Path(args.replay))
        if loaded["status"] != "success":
            raise UsageError(f"cannot load report: {loaded['detail']}")
        report = loaded["report"]
        replay_config = SuiteConfig.from_dict(report["config"]).validate()
        runner = SuiteRunner(replay_config)
        reproduced = 0
        results = []
        for suite in report.get("suites", []):
            for witness in suite.get("failures", []):
                outcome = runner.replay(witness)
                reproduced += 0 if outcome.passed else 1
                results.append({"label": witness.get("label"), "passed": outcome.passed, "detail": outcome.detail})
        _emit({"replayed": len(results), "reproduced": reproduced, "results": results}, args.out)
        return EXIT_FAILURE if reproduced else EXIT_OK

    if args.poly:
        coeffs = _parse_ints(args.poly)
        if args.neg:
            coeffs = [-c for c in coeffs]
        config.algebra = {"kind": "monogenic", "prime": str(config.prime), "poly": [str(c) for c in coeffs]}
    elif args.algebra:
        config.algebra = DocumentCodec().load(Path(args.algebra))
    runner = SuiteRunner(config, store=store)
    report = runner.run(args.suite)
    _render(console, report)
    return EXIT_OK if report.all_passed else EXIT_FAILURE


def main(argv: Optional[Sequence[str]] = None, manager: Optional[ConfigManager] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)
    try:
        manager = manager or ConfigManager()
        config = manager.build_suite_config(_overrides(args), Path(args.config) if args.config else None)
        if args.command == "alg":
            return cmd_alg_validate(args, config)
        if args.command == "good":
            return cmd_good_check(args, config)
        if args.command == "chain":
            return cmd_chain_run(args, config)
        if args.command == "verify":
            return cmd_verify(args, config, manager)
        if args.action == "map":
            return cmd_point_map(args, config)
        return cmd_point_fiber(args, config)
    except AlgebraValidationError as exc:
        witness = list(exc.witness) if exc.witness is not None else None
        print(DocumentCodec().dumps({"status": "error", "detail": exc.reason, "witness": witness}))
        return EXIT_USAGE
    except RetryBudgetExhausted as exc:
        logger.error("%s", exc)
        return EXIT_FAILURE
    except (ConfigError, UsageError, EngineError, ValueError, KeyError) as exc:
        logger.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

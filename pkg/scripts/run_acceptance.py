"""Run every property suite one at a time and write one combined report.

Usage: python scripts/run_acceptance.py [--seed N] [--out report.json]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from rich.console import Console
from rich.progress import Progress

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT))

from core.config_manager import ConfigManager  # noqa: E402
from core.logging_setup import configure_logging  # noqa: E402
from core.report_store import ReportStore  # noqa: E402
from core.suite_runner import SUITE_NAMES, SuiteReport, SuiteRunner  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description="Full acceptance sweep")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--out", default=None)
    parser.add_argument("--verbose", action="store_true")
    args = parser.parse_args()
    configure_logging(args.verbose)

    manager = ConfigManager()
    config = manager.build_suite_config({"seed": args.seed})
    runner = SuiteRunner(config)
    report = SuiteReport(config.to_json())
    console = Console()
    with Progress(console=console) as progress:
        task = progress.add_task("suites", total=len(SUITE_NAMES))
        for name in SUITE_NAMES:
            progress.update(task, description=name)
            report.suites.append(runner.run_suite(name))
            progress.advance(task)

    for suite in report.suites:
        mark = "[green]ok[/green]" if suite.ok else "[red]FAIL[/red]"
        if suite.skipped:
            mark = "[yellow]skipped[/yellow]"
        console.print(f"{suite.name:14s} {suite.passed:5d} passed {suite.failed:4d} failed  {mark}")

    store = ReportStore(manager.get_data_root() / "reports")
    result = store.write("acceptance", report.to_json(), Path(args.out) if args.out else None)
    console.print(result["detail"])
    return 0 if report.all_passed else 1


if __name__ == "__main__":
    sys.exit(main())

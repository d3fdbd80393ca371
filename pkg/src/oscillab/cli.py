"""``oscillab <command> --config <file> [--out <dir>] [--seed <n>]``.

Exit status: 0 when every result row passes, 1 when some row fails,
2 for unusable input (bad config, unreadable file).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from pydantic import ValidationError

from .reports import COMMANDS, load_config, write_outputs

log = logging.getLogger("oscillab")

THREADS_ENV = "OSCILLAB_THREADS"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="oscillab", description="Run a verification experiment and write its report.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="YAML or JSON file with the experiment parameters")
    p.add_argument("--out", default=None, help="output directory (default: output_dir from the config, else ./out/<command>)")
    p.add_argument("--seed", type=int, default=None, help="overrides the seed in the config")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _format_validation(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        path = ".".join(str(p) for p in err["loc"]) or "<root>"
        lines.append(f"  {path}: {err['msg']}")
    return "invalid config:\n" + "\n".join(lines)


def _thread_limit():
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=n)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config, args.command, args.seed)
    except ValidationError as exc:
        print(_format_validation(exc), file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"cannot load config: {exc}", file=sys.stderr)
        return 2

    from .experiments import run

    try:
        limiter = _thread_limit()
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    try:
        report, tables = run(cfg)
    finally:
        if limiter is not None:
            limiter.unregister()
    out = args.out or cfg.output_dir or os.path.join("out", cfg.command)
    write_outputs(report, out, tables, argv=["oscillab", *argv])
    for row in report.results:
        print(f"{'PASS' if row.passed else 'FAIL'}  {row.name}")
    print(f"{report.experiment_id}: {len(report.failures())} failed of {len(report.results)}; report in {out}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())

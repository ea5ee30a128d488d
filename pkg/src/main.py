import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel

from src.schemas.base import BaseResponse
from src.utils.error_handlers import handle_exception
from src.utils.request_utils import generate_run_id
from src.utils.settings import get_settings

logger = logging.getLogger(__name__)

# exit status of a verification command whose checks ran but did not hold
CHECK_FAILED = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dsm-sim",
        description="Simulate distributed sign momentum and its baselines, and verify their guarantees",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def overrides(p: argparse.ArgumentParser) -> None:
        p.add_argument("config", help="TOML experiment file")
        p.add_argument("--seed", type=int, default=None, help="Override algorithm.seed")
        p.add_argument("--out", default=None, help="Override output.directory")
        p.add_argument("--format", dest="fmt", choices=["csv", "jsonl"], default=None, help="Override output.formats")
        p.add_argument("--jobs", type=int, default=None, help="Sweep cells run concurrently")

    overrides(sub.add_parser("run", help="Run the algorithm block once"))
    overrides(sub.add_parser("sweep", help="Run every variant x horizon x seed cell"))
    overrides(sub.add_parser("check-theorems", help="Compare a sweep against the convergence bounds"))

    lemma = sub.add_parser("check-lemma1", help="Monte Carlo check of the randomized sign operators")
    lemma.add_argument("--seed", type=int, default=0)
    lemma.add_argument("--draws", type=int, default=None)
    lemma.add_argument("--out", default=None, help="Also write the report to this directory")

    reductions = sub.add_parser("check-reductions", help="Certify the reduction identities bitwise")
    reductions.add_argument("--seed", type=int, default=None, help="Certify a single seed")
    reductions.add_argument("--out", default=None, help="Also write the certificate to this directory")
    return parser


def _load(args: argparse.Namespace):
    from src.cli.config import apply_overrides, parse_config

    settings = get_settings()
    jobs = args.jobs if args.jobs is not None else (settings.jobs if settings.jobs > 1 else None)
    return apply_overrides(parse_config(args.config), seed=args.seed, out=args.out, fmt=args.fmt, jobs=jobs)


def _publish(payload: BaseModel, run_id: str, out: Optional[str] = None, filename: str = "report.json") -> None:
    body = BaseResponse[type(payload)](data=payload, runId=run_id).model_dump_json(indent=2)
    if out is not None:
        path = Path(out) / filename
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(body + "\n", encoding="utf-8")
        logger.info(f"Report written to {path}")
    sys.stdout.write(body + "\n")


def dispatch(args: argparse.Namespace, run_id: str) -> int:
    if args.command in ("run", "sweep"):
        from src.cli.runner import exit_status, run_experiment

        spec = _load(args)
        result = run_experiment(spec, run_id, single=args.command == "run")
        _publish(result, run_id)
        return exit_status(result)

    if args.command == "check-theorems":
        from src.cli.checks import check_theorems

        spec = _load(args)
        report = check_theorems(spec)
        _publish(report, run_id, spec.output.directory, "theorem_report.json")
        return 0 if report.passed else CHECK_FAILED

    if args.command == "check-lemma1":
        from src.cli.checks import LEMMA_DRAWS, check_lemma1

        report = check_lemma1(draws=args.draws or LEMMA_DRAWS, seed=args.seed)
        _publish(report, run_id, args.out, "lemma_report.json")
        return 0 if report.passed else CHECK_FAILED

    if args.command == "check-reductions":
        from src.cli.checks import check_reductions

        certificate = check_reductions() if args.seed is None else check_reductions(seeds=(args.seed,))
        _publish(certificate, run_id, args.out, "reduction_certificate.json")
        return 0 if certificate.passed else CHECK_FAILED

    raise ValueError(f"Unknown command {args.command}")


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = get_settings()
    logging.basicConfig(
        level=settings.log_level, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    )
    run_id = generate_run_id()

    logger.info("=" * 60)
    logger.info(f"Distributed sign momentum simulator: {args.command}")
    logger.info(f"  run id: {run_id}")
    if settings.cache_dir:
        logger.info(f"  optimum cache: {settings.cache_dir}")
    logger.info("=" * 60)

    try:
        return dispatch(args, run_id)
    except Exception as e:
        return handle_exception(e, run_id, sys.stderr)


if __name__ == "__main__":
    sys.exit(main())

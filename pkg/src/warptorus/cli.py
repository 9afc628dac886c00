"""Batch driver: warptorus run|sweep --config <path>."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .config import SWEEP_PARAMS, ConfigError, RunConfig, load_config, with_override
from .pipeline import run_pipeline
from .report import write_report

log = logging.getLogger("warptorus")

EXIT_ERROR = 1
# exit-code severity when a sweep combines several runs
_SEVERITY = {0: 0, 2: 1, 3: 2, 1: 3}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="JSON run configuration")
    common.add_argument("--out", help="output directory (overrides output_dir in the config)")
    common.add_argument("--workers", type=int, help="worker processes for per-j evaluation")
    common.add_argument("--quiet", action="store_true", help="only print errors")

    p = argparse.ArgumentParser(prog="warptorus", description="Convergence checks for warped tori.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="evaluate one configuration")
    sw = sub.add_parser("sweep", parents=[common], help="evaluate a configuration over one varied parameter")
    sw.add_argument("--vary", required=True, choices=SWEEP_PARAMS)
    sw.add_argument("--values", required=True, help="comma-separated values")
    return p


def _parse_values(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--values must be comma-separated numbers, got {text!r}") from None
    if not vals:
        raise ConfigError("--values is empty")
    return vals


def run_one(cfg: RunConfig, out_dir: Path, workers: Optional[int]) -> tuple[int, dict]:
    rep = run_pipeline(cfg, workers)
    doc = write_report(rep, out_dir)
    log.info("%s: verdict %s (exit %d)", out_dir, rep.verdict, rep.exit_code)
    for reason in rep.reasons:
        log.info("  %s", reason)
    return rep.exit_code, doc


def cmd_run(args, cfg: RunConfig) -> int:
    out = Path(args.out or cfg.output_dir)
    code, _ = run_one(cfg, out, args.workers)
    return code


def _final_d_unif(doc: dict):
    rows = doc["rows"]
    return rows[-1]["d_unif"] if rows else None


def cmd_sweep(args, cfg: RunConfig) -> int:
    values = _parse_values(args.values)
    base = Path(args.out or cfg.output_dir)
    base.mkdir(parents=True, exist_ok=True)
    summary = []
    worst = 0
    for v in values:
        label = f"{args.vary}={v:g}"
        try:
            run_cfg = with_override(cfg, args.vary, v)
            code, doc = run_one(run_cfg, base / label, args.workers)
            verdict, final = doc["footer"]["verdict"], _final_d_unif(doc)
        except (ConfigError, ValueError) as e:
            log.error("%s: %s", label, e)
            code, verdict, final = EXIT_ERROR, "ERROR", None
        summary.append((v, verdict, code, final))
        if _SEVERITY[code] > _SEVERITY[worst]:
            worst = code
    with open(base / "sweep_summary.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([args.vary, "verdict", "exit_code", "final_d_unif"])
        for v, verdict, code, final in summary:
            w.writerow([repr(v), verdict, code, "" if final is None else repr(final)])
    return worst


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.INFO, format="%(message)s", force=True)
    try:
        cfg = load_config(args.config)
        if args.workers is not None and args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        if args.command == "run":
            return cmd_run(args, cfg)
        return cmd_sweep(args, cfg)
    except ConfigError as e:
        log.error("%s", e)
        return EXIT_ERROR
    except Exception as e:  # noqa: BLE001 - any failure is an execution error
        log.error("execution error: %s: %s", type(e).__name__, e)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

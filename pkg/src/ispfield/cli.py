"""Command line entry point: ``isp run`` and ``isp transform-demo``.

Exit status of ``run``: 0 when every episode finished without contact, 2 when
any episode ended in contact, 1 on configuration errors.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .config import load_config
from .errors import ConfigError, InvalidParams
from .logs import _table, write_episode
from .simulator import run_episode
from .transforms import ConstraintParams, hard_transform, soft_transform

log = logging.getLogger("ispfield")

EXIT_OK, EXIT_CONFIG, EXIT_CONTACT = 0, 1, 2

# default curve families: alpha sweeps at beta=1, then beta sweeps at alpha=1
HARD_FAMILIES = [(a, 1.0) for a in range(1, 8)] + [(1.0, b) for b in range(2, 8)]
SOFT_FAMILIES = [(a, 1.0) for a in range(1, 6)] + [(1.0, round(b, 1)) for b in np.arange(0.3, 1.31, 0.2)
                                                   if round(b, 1) != 1.0]


def _setup_logging() -> None:
    level = os.environ.get("ISP_LOG_LEVEL", "info").upper()
    if level not in ("ERROR", "INFO", "DEBUG"):
        level = "INFO"
    logging.basicConfig(format="%(levelname)s %(message)s", stream=sys.stderr)
    log.setLevel(getattr(logging, level))


def run_one(config_path: str | Path, out_dir: str | Path, dump_fields: bool = False) -> int:
    try:
        cfg = load_config(config_path)
    except ConfigError as e:
        log.error("config error in %s: %s", config_path, e)
        return EXIT_CONFIG
    episode = run_episode(cfg.scenario, cfg.guidance, cfg.camera, cfg.max_steps, record_fields=dump_fields)
    write_episode(episode, cfg.scenario.desired, out_dir)
    log.info("%s: %d frames, contact=%s, min ground-truth tau=%s",
             config_path, len(episode.records), episode.contact, episode.min_gt_tau)
    return EXIT_CONTACT if episode.contact else EXIT_OK


def _run_job(args):
    return run_one(*args)


def cmd_run(args) -> int:
    target = Path(args.config)
    out = Path(args.out)
    if target.is_dir():
        configs = sorted(target.glob("*.json"))
        if not configs:
            log.error("no *.json configs in %s", target)
            return EXIT_CONFIG
        jobs = [(c, out / c.stem, args.dump_fields) for c in configs]
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                codes = list(pool.map(_run_job, jobs))
        else:
            codes = [_run_job(j) for j in jobs]
        if EXIT_CONFIG in codes:
            return EXIT_CONFIG
        return max(codes)
    return run_one(target, out, args.dump_fields)


def transform_demo(kind: str, families, lo: float, hi: float, translation: float = 0.0,
                   samples: int = 201) -> str:
    """CSV of transform values over an input grid, one curve per (alpha, beta)."""
    span = hi - lo
    margin = (2.0 if kind == "hard" else 5.0) * max(span, 1.0)
    grid = np.linspace(lo - margin, hi + margin, samples)
    rows = []
    for alpha, beta in families:
        g = ConstraintParams(translation, lo, hi, alpha, beta)
        for x in grid.tolist():
            if kind == "hard":
                value = str(hard_transform(x, g))
            else:
                value = repr(soft_transform(x, g))
            rows.append([kind, float(alpha), float(beta), x, value])
    return _table(["transform", "alpha", "beta", "input", "value"], rows)


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def cmd_transform_demo(args) -> int:
    lo, hi = args.range
    kinds = ["hard"] if args.hard else ["soft"] if args.soft else ["hard", "soft"]
    parts = []
    try:
        for kind in kinds:
            if args.alpha is None and args.beta is None:
                families = HARD_FAMILIES if kind == "hard" else SOFT_FAMILIES
            else:
                alphas = _float_list(args.alpha) if args.alpha else [1.0]
                betas = _float_list(args.beta) if args.beta else [1.0]
                families = [(a, b) for a in alphas for b in betas]
            parts.append(transform_demo(kind, families, lo, hi, args.translation, args.samples))
    except InvalidParams as e:
        log.error("%s", e)
        return EXIT_CONFIG
    text = parts[0] + "".join(p.split("\n", 1)[1] for p in parts[1:])
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isp", description="Image space potential field tools")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario config (or every *.json in a directory)")
    run.add_argument("config")
    run.add_argument("--out", default="out", help="output directory (default: out)")
    run.add_argument("--dump-fields", action="store_true", help="write fields/frame_NNNN.{txt,pgm}")
    run.add_argument("--jobs", type=int, default=1, help="parallel episodes for a config directory")
    run.set_defaults(func=cmd_run)

    demo = sub.add_parser("transform-demo", help="sample the hard/soft transforms to CSV")
    which = demo.add_mutually_exclusive_group()
    which.add_argument("--hard", action="store_true")
    which.add_argument("--soft", action="store_true")
    demo.add_argument("--alpha", help="comma-separated alpha values")
    demo.add_argument("--beta", help="comma-separated beta values")
    demo.add_argument("--range", nargs=2, type=float, default=(0.0, 1.0), metavar=("LO", "HI"))
    demo.add_argument("--translation", type=float, default=0.0)
    demo.add_argument("--samples", type=int, default=201)
    demo.add_argument("--out")
    demo.set_defaults(func=cmd_transform_demo)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        # downstream reader (e.g. ``head``) closed early
        sys.stderr.close()
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""CSV writers for episode logs."""

from __future__ import annotations

import csv
import io
from pathlib import Path

from .fieldio import write_field
from .simulator import EpisodeLog

EPISODE_COLUMNS = ["frame", "time", "x", "z", "heading", "speed", "theta_cmd", "a_cmd", "min_gt_tau", "contact"]
OBSERVATION_COLUMNS = ["frame", "time", "object_id", "scale_px", "s_dot", "tau", "tau_dot"]
DECISION_COLUMNS = ["frame", "i_star", "theta_star", "a_star", "a_max_at_istar",
                    "desired_theta", "desired_a", "num_neginf_columns"]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _table(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def episode_csv(log: EpisodeLog) -> str:
    rows = []
    last = len(log.records) - 1
    for k, r in enumerate(log.records):
        a = r.world.agent
        rows.append([r.frame, r.world.time, a.x, a.z, a.heading, a.speed, r.command.theta, r.command.a,
                     str(r.min_gt_tau), log.contact and k == last])
    return _table(EPISODE_COLUMNS, rows)


def observations_csv(log: EpisodeLog) -> str:
    rows = []
    for r in log.records:
        for oid, (obs, s_dot, est) in r.observations:
            rows.append([r.frame, obs.timestamp, oid, obs.s, s_dot, str(est.tau), est.tau_dot])
    return _table(OBSERVATION_COLUMNS, rows)


def decisions_csv(log: EpisodeLog, desired) -> str:
    rows = []
    for r in log.records:
        d = r.decision
        rows.append([r.frame, d.i_star, d.command.theta, d.command.a, d.a_max_at_istar,
                     desired.theta, desired.a, d.num_neginf_columns])
    return _table(DECISION_COLUMNS, rows)


def write_episode(log: EpisodeLog, desired, out_dir: str | Path) -> list[Path]:
    """Write ``episode.csv``, ``observations.csv``, ``decisions.csv`` and any field dumps."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in (("episode.csv", episode_csv(log)),
                       ("observations.csv", observations_csv(log)),
                       ("decisions.csv", decisions_csv(log, desired))):
        (out / name).write_text(text)
        written.append(out / name)
    if log.fields:
        fdir = out / "fields"
        fdir.mkdir(exist_ok=True)
        for k, f in enumerate(log.fields):
            write_field(f, fdir / f"frame_{k:04d}")
            written.append(fdir / f"frame_{k:04d}.txt")
    return written

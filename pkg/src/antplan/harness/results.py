"""CSV and JSON output for experiment results."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from statistics import mean
from typing import Iterable, Sequence

from .anticipation_eval import TrialRecord
from .episode import PairedTrial

PLANNING_COLUMNS = ("trial", "seed", "k", "routine_length", "batches", "plan_length", "execution_cost",
                    "cost_ratio", "length_ratio", "planning_time", "failed")
ANTICIPATION_COLUMNS = ("trial", "seed", "miss_ratio", "poc", "krcc", "incorrect", "repeats", "error")


def planning_rows(trials: Iterable[PairedTrial]) -> list[dict]:
    rows = []
    for t in sorted(trials, key=lambda t: t.trial):
        for k in sorted(set(t.episodes) | set(t.failures)):
            ep = t.episodes.get(k)
            if ep is None or 0 not in t.episodes:
                rows.append({"trial": t.trial, "seed": t.seed, "k": k, "routine_length": len(t.routine),
                             "batches": "", "plan_length": "", "execution_cost": "", "cost_ratio": "",
                             "length_ratio": "", "planning_time": "", "failed": 1})
                continue
            cr, lr = t.ratio(k)
            rows.append({"trial": t.trial, "seed": t.seed, "k": k, "routine_length": len(t.routine),
                         "batches": len(ep.batches), "plan_length": ep.plan_length,
                         "execution_cost": ep.execution_cost, "cost_ratio": cr, "length_ratio": lr,
                         "planning_time": round(ep.planning_time, 3), "failed": 0})
    return rows


def summary_rows(rows: Sequence[dict]) -> list[dict]:
    """One row of means per k over successful episodes."""
    out = []
    for k in sorted({r["k"] for r in rows}):
        ok = [r for r in rows if r["k"] == k and not r["failed"]]
        row = {"trial": "mean", "seed": "", "k": k, "routine_length": "", "failed": len(
            [r for r in rows if r["k"] == k]) - len(ok)}
        for col in ("batches", "plan_length", "execution_cost", "cost_ratio", "length_ratio", "planning_time"):
            row[col] = mean(r[col] for r in ok) if ok else ""
        out.append(row)
    return out


def _fmt(v) -> str:
    if isinstance(v, float):
        return "" if math.isnan(v) else f"{v:.6g}"
    return "" if v is None else str(v)


def _write(path: str | Path, columns: Sequence[str], rows: Iterable[dict]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r.get(c, "")) for c in columns])
    return path


def emit_results(trials: Iterable[PairedTrial], path: str | Path) -> Path:
    """Episode rows in stable column order plus per-k mean rows; header only when empty."""
    rows = planning_rows(trials)
    return _write(path, PLANNING_COLUMNS, rows + (summary_rows(rows) if rows else []))


def emit_anticipation_results(records: Iterable[TrialRecord], path: str | Path) -> Path:
    rows = []
    for r in sorted(records, key=lambda r: r.trial):
        s = r.score
        rows.append({"trial": r.trial, "seed": r.seed, "error": r.error or "",
                     **({"miss_ratio": s.miss_ratio, "poc": s.poc, "krcc": s.krcc, "incorrect": s.incorrect,
                         "repeats": s.repeats} if s else {})})
    ok = [r.score for r in records if r.score is not None]
    if ok:
        ks = [s.krcc for s in ok if s.krcc is not None]
        rows.append({"trial": "mean", "miss_ratio": mean(s.miss_ratio for s in ok), "poc": mean(s.poc for s in ok),
                     "krcc": mean(ks) if ks else None, "incorrect": mean(s.incorrect for s in ok),
                     "repeats": mean(s.repeats for s in ok)})
    return _write(path, ANTICIPATION_COLUMNS, rows)


def write_json(data, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True, default=str) + "\n")
    return path


def planning_summary(trials: Sequence[PairedTrial]) -> dict:
    rows = planning_rows(trials)
    return {f"k={r['k']}": {c: r[c] for c in ("cost_ratio", "length_ratio", "execution_cost", "plan_length",
                                               "planning_time", "failed")}
            for r in summary_rows(rows)}

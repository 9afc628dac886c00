"""Report persistence: report.json, report.csv and plotdata/*.dat.

report.csv columns, in order:
    j, amplitude, r_min, volume, diameter, diameter_err,
    area_1, area_2, area_3, l2_dev, l2_dist, w12_dist, c0_dist,
    d_unif, d_unif_err, hypotheses_ok, conclusions_ok
followed by two columns per check, "<check>.pass" and "<check>.margin", in
the order the pipeline emits them (fixed for a given case and check
selection). Missing values are written as empty cells.

Foliation areas are (z-leaf min, x-leaf, y-leaf) for the doubly warped case
and (int f, min x-slice, min y-slice) for the singly warped case.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any

from .checks import CONCLUSION, HYPOTHESIS, all_passed
from .pipeline import ConvergenceReport

SCHEMA_VERSION = 1
BASE_COLUMNS = (
    "j", "amplitude", "r_min", "volume", "diameter", "diameter_err",
    "area_1", "area_2", "area_3", "l2_dev", "l2_dist", "w12_dist", "c0_dist",
    "d_unif", "d_unif_err", "hypotheses_ok", "conclusions_ok",
)
PLOT_SERIES = ("r_min", "volume", "diameter", "d_unif", "l2_dev", "l2_dist", "w12_dist", "c0_dist")


def _clean(x: Any) -> Any:
    """JSON-safe copy: non-finite floats become null, tuples become lists."""
    if isinstance(x, float):
        return x if math.isfinite(x) else None
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if hasattr(x, "item") and not isinstance(x, (str, bytes)):
        return _clean(x.item())
    return x


def to_dict(rep: ConvergenceReport) -> dict:
    rows = []
    for r, conv in zip(rep.rows, rep.convergence or [{}] * len(rep.rows)):
        rows.append({
            "j": r.j,
            "amplitude": r.amplitude,
            "r_min": r.r_min,
            "volume": r.volume,
            "diameter": r.diameter,
            "diameter_err": r.diameter_err,
            "foliation_areas": list(r.foliation_areas),
            "d_unif": r.d_unif,
            "d_unif_err": r.d_unif_err,
            "d_unif_closed_form": r.d_unif_closed_form,
            "hypotheses_ok": all_passed(r.entries, HYPOTHESIS),
            "conclusions_ok": all_passed(r.entries, CONCLUSION),
            "distances": conv,
            "checks": [e.to_dict() for e in r.entries],
            "extras": r.extras,
        })
    return _clean({
        "schema_version": SCHEMA_VERSION,
        "case": rep.case,
        "config": rep.config,
        "rows": rows,
        "footer": {
            "limit": rep.limit,
            "rates": rep.rates,
            "flags": rep.flags,
            "sequence_checks": [e.to_dict() for e in rep.sequence_entries],
            "extras": rep.extras,
            "verdict": rep.verdict,
            "reasons": rep.reasons,
            "exit_code": rep.exit_code,
        },
    })


def csv_columns(rep: ConvergenceReport) -> list[str]:
    cols = list(BASE_COLUMNS)
    seen = set()
    for r in rep.rows:
        for e in r.entries:
            if e.name not in seen:
                seen.add(e.name)
                cols += [f"{e.name}.pass", f"{e.name}.margin"]
    return cols


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else ""
    return str(v)


def csv_rows(rep: ConvergenceReport) -> list[dict]:
    out = []
    convs = rep.convergence or [{}] * len(rep.rows)
    for r, conv in zip(rep.rows, convs):
        row = {
            "j": r.j, "amplitude": r.amplitude, "r_min": r.r_min, "volume": r.volume,
            "diameter": r.diameter, "diameter_err": r.diameter_err,
            "area_1": r.foliation_areas[0], "area_2": r.foliation_areas[1], "area_3": r.foliation_areas[2],
            "l2_dev": conv.get("l2_dev"), "l2_dist": conv.get("l2_dist"),
            "w12_dist": conv.get("w12_dist"), "c0_dist": conv.get("c0_dist"),
            "d_unif": r.d_unif, "d_unif_err": r.d_unif_err,
            "hypotheses_ok": all_passed(r.entries, HYPOTHESIS),
            "conclusions_ok": all_passed(r.entries, CONCLUSION),
        }
        for e in r.entries:
            row[f"{e.name}.pass"] = e.passed
            row[f"{e.name}.margin"] = e.margin
        out.append(row)
    return out


def write_csv(rep: ConvergenceReport, path: Path) -> None:
    cols = csv_columns(rep)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for row in csv_rows(rep):
            w.writerow([_cell(row.get(c)) for c in cols])


def plot_series(rep: ConvergenceReport) -> dict[str, list[tuple[float, float]]]:
    js = [r.j for r in rep.rows]
    series: dict[str, list] = {}
    rows = csv_rows(rep)
    for name in PLOT_SERIES:
        pts = [(j, row[name]) for j, row in zip(js, rows) if row.get(name) is not None]
        if pts:
            series[name] = pts
    for key in ("stampacchia_d", "max_h"):
        pts = [(r.j, r.extras[key]) for r in rep.rows if key in r.extras]
        if pts:
            series[key] = pts
    for key in ("slice_fraction", "c0_deficits"):
        if key in rep.extras:
            series[key] = list(zip(js, rep.extras[key]))
    return series


def write_plotdata(rep: ConvergenceReport, directory: Path) -> list[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, pts in plot_series(rep).items():
        p = directory / f"{name}.dat"
        with open(p, "w") as fh:
            fh.write(f"# j {name}\n")
            for x, y in pts:
                fh.write(f"{x!r} {float(y)!r}\n")
        paths.append(p)
    return paths


def write_report(rep: ConvergenceReport, out_dir: Path) -> dict:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    doc = to_dict(rep)
    with open(out_dir / "report.json", "w") as fh:
        json.dump(doc, fh, indent=2, allow_nan=False)
        fh.write("\n")
    write_csv(rep, out_dir / "report.csv")
    write_plotdata(rep, out_dir / "plotdata")
    return doc


def schema_path() -> Path:
    return Path(__file__).with_name("schemas") / "report.schema.json"

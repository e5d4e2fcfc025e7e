"""Artifact emission: records/metrics CSV files and the p-value heatmap.

All outputs are bit-stable for a given input: no timestamps, fixed
number formatting, and the heatmap is hand-written SVG rather than a
plotting-library figure.
"""

from __future__ import annotations

import csv
import math
from datetime import date
from pathlib import Path

import numpy as np

from .data import HOURS_PER_DAY
from .errors import FormatViolation
from .evaluation import DmMatrix, ForecastRecord, MetricRow

_PRED_COLS = [f"p{h:02d}" for h in range(HOURS_PER_DAY)]
_ACT_COLS = [f"a{h:02d}" for h in range(HOURS_PER_DAY)]
RECORD_HEADER = ["model", "zone", "date", *_PRED_COLS, *_ACT_COLS]


def write_records_csv(records: list[ForecastRecord], path: str | Path) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_HEADER)
        for r in records:
            writer.writerow(
                [r.model, r.zone, r.target_date.isoformat()]
                + [repr(float(v)) for v in r.predictions]
                + [repr(float(v)) for v in r.actuals]
            )


def read_records_csv(path: str | Path) -> list[ForecastRecord]:
    path = Path(path)
    records = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != RECORD_HEADER:
            raise FormatViolation(1, f"unexpected records header {header}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(RECORD_HEADER):
                raise FormatViolation(lineno, f"expected {len(RECORD_HEADER)} fields")
            try:
                records.append(
                    ForecastRecord(
                        model=row[0],
                        zone=row[1],
                        target_date=date.fromisoformat(row[2]),
                        predictions=np.array([float(v) for v in row[3:27]]),
                        actuals=np.array([float(v) for v in row[27:51]]),
                    )
                )
            except ValueError as exc:
                raise FormatViolation(lineno, str(exc)) from exc
    return records


def write_metrics_csv(rows: list[MetricRow], path: str | Path) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["model", "zone", "mae", "rmse", "smape", "n_days",
             "completeness", "mae_rank", "rmse_rank", "smape_rank"]
        )
        for row in rows:
            writer.writerow(
                [
                    row.model,
                    row.zone,
                    f"{row.mae:.6f}",
                    f"{row.rmse:.6f}",
                    f"{row.smape:.6f}",
                    row.n_days,
                    f"{row.completeness:.6f}",
                    row.ranks.get("mae") or "",
                    row.ranks.get("rmse") or "",
                    row.ranks.get("smape") or "",
                ]
            )


def write_dm_csv(matrix: DmMatrix, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model", *matrix.models])
        for i, model in enumerate(matrix.models):
            row: list[str] = [model]
            for j in range(len(matrix.models)):
                v = matrix.p_values[i, j]
                row.append("" if math.isnan(v) else f"{v:.6g}")
            writer.writerow(row)


# --- heatmap -------------------------------------------------------------------

_LIGHT = (255, 255, 229)  # p -> 0: light
_DARK = (8, 29, 88)  # p -> threshold: dark
_ABSENT = "#c8c8c8"
CELL = 26
PAD = 4


def _ramp_color(p: float, threshold: float) -> str:
    t = min(max(p / threshold, 0.0), 1.0)
    rgb = tuple(
        round(light + t * (dark - light)) for light, dark in zip(_LIGHT, _DARK)
    )
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def dm_heatmap_svg(
    matrix: DmMatrix, path: str | Path, threshold: float = 0.1
) -> None:
    """Standalone vector heatmap of pairwise p-values.

    Columns are the candidate (x-axis) models, rows the reference
    models: a light cell in column x, row y means x is significantly
    more accurate than y. Cells above the threshold are black, absent
    entries gray.
    """
    models = matrix.models
    m = len(models)
    label_px = max(len(name) for name in models) * 7 + 10
    grid = m * CELL
    width = label_px + grid + PAD * 2
    height = grid + label_px + PAD * 2
    x0 = label_px + PAD
    y0 = PAD

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        '<style>text{font-family:monospace;font-size:11px;fill:#000}</style>',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    for col, name in enumerate(models):  # x-axis: candidate model
        cx = x0 + col * CELL + CELL // 2 + 4
        ty = y0 + grid + 6
        parts.append(
            f'<text x="{cx}" y="{ty}" transform="rotate(90 {cx} {ty})">'
            f"{name}</text>"
        )
    for row, name in enumerate(models):  # y-axis: reference model
        ty = y0 + row * CELL + CELL // 2 + 4
        parts.append(f'<text x="{PAD}" y="{ty}">{name}</text>')

    for col in range(m):
        for row in range(m):
            p = matrix.p_values[col, row]
            if math.isnan(p):
                fill = _ABSENT
                label = "absent"
            elif p > threshold:
                fill = "#000000"
                label = f"p={p:.6g} (not significant)"
            else:
                fill = _ramp_color(float(p), threshold)
                label = f"p={p:.6g}"
            x = x0 + col * CELL
            y = y0 + row * CELL
            parts.append(
                f'<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" '
                f'fill="{fill}" stroke="#ffffff" stroke-width="1">'
                f"<title>{models[col]} vs {models[row]}: {label}</title></rect>"
            )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")

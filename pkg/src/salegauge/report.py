"""Run report assembly: stats table, band-by-class summary matrix, verdicts."""

from __future__ import annotations

import csv
import io
import json

from .errors import ContractError
from .pricebands import PriceBandStats
from .significance import SignificancePolicy, SignificanceVerdict

__all__ = ["REPORT_VERSION", "build_report", "report_to_json", "verdicts_to_csv"]

REPORT_VERSION = 1


def _verdict_dict(v: SignificanceVerdict, graded: bool) -> dict:
    out = {
        "id": v.id,
        "predicted_band": v.predicted_band,
        "sale_price_band": v.sale_price_band,
        "discount": v.discount,
        "fold": "inf" if v.fold is None else v.fold,
        "class": v.class_name,
        "anomalies": sorted(v.anomalies),
    }
    if graded:
        out["x_levels"] = v.x_levels
    return out


def build_report(
    policy: SignificancePolicy,
    stats: PriceBandStats,
    verdicts: list[SignificanceVerdict],
    rejects: list[tuple[str, str]],
    config_echo: dict,
) -> dict:
    """Report dict; summary matrix rows are bands (by predicted band), columns
    the significance classes best-to-worst, with row/column/grand totals."""
    band_names = stats.spec.names
    class_names = list(policy.class_names)

    cells = {band: {cls: 0 for cls in class_names} for band in band_names}
    for v in verdicts:
        cells[v.predicted_band][v.class_name] += 1

    matrix_rows = []
    col_totals = {cls: 0 for cls in class_names}
    grand = 0
    for band in band_names:
        row_total = sum(cells[band].values())
        grand += row_total
        for cls in class_names:
            col_totals[cls] += cells[band][cls]
        matrix_rows.append({"band": band, "counts": dict(cells[band]), "total": row_total})

    if grand != len(verdicts) or grand != sum(col_totals.values()):
        raise ContractError("summary matrix totals disagree with the verdict list")

    return {
        "version": REPORT_VERSION,
        "config_echo": config_echo,
        "stats_table": [
            {"band": r.name, "count": r.count, "mean": r.mean, "sd": r.sd}
            for r in stats.rows
        ],
        "summary_matrix": {
            "classes": class_names,
            "rows": matrix_rows,
            "column_totals": col_totals,
            "grand_total": grand,
        },
        "verdicts": [_verdict_dict(v, policy.graded_cross_class) for v in verdicts],
        "rejects": [{"id": rid, "reason": reason} for rid, reason in rejects],
    }


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def verdicts_to_csv(verdicts: list[SignificanceVerdict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["id", "predicted_band", "sale_price_band", "discount", "fold", "x_levels", "class", "anomalies"]
    )
    for v in verdicts:
        writer.writerow(
            [
                v.id,
                v.predicted_band,
                v.sale_price_band,
                v.discount,
                "inf" if v.fold is None else v.fold,
                v.x_levels,
                v.class_name,
                ";".join(sorted(v.anomalies)),
            ]
        )
    return buf.getvalue()

"""
JSON and CSV persistence for campaign results and report lists.

CSV is a flat projection of the JSON: one row per check aggregate (campaigns)
or per report (verify runs).
"""
import csv
import json
from pathlib import Path

from utils.logging_utils import get_logger
from .errors import ConfigError
from .report import _jsonable

logger = get_logger("semifinite_export")

AGGREGATE_COLUMNS = ["check", "theorem", "runs", "failures", "worst_margin", "passed"]
REPORT_COLUMNS = ["name", "passed", "worst_margin", "scale", "threshold", "failed_conditions"]


def write_json(payload, path):
    """Dump a dict (numpy values allowed) as indented JSON."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        json.dump(_jsonable(payload), f, indent=2)
    logger.info(f"Wrote JSON report to {path}")
    return path


def aggregate_rows(result_dict):
    """CSV rows for the "checks" section of a campaign result dict."""
    rows = []
    for name, aggregate in result_dict["checks"].items():
        rows.append({
            "check": name,
            "theorem": aggregate["theorem"],
            "runs": aggregate["runs"],
            "failures": aggregate["failures"],
            "worst_margin": aggregate["worst_margin"],
            "passed": aggregate["failures"] == 0,
        })
    search = result_dict.get("search")
    if search is not None:
        rows.append({
            "check": search["name"],
            "theorem": False,
            "runs": search["details"].get("trials"),
            "failures": 0,
            "worst_margin": search["worst_margin"],
            "passed": search["passed"],
        })
    return rows


def _as_dict(report):
    return report.to_dict() if hasattr(report, "to_dict") else report


def report_rows(reports):
    """CSV rows for VerificationReport objects or their dicts."""
    rows = []
    for report in map(_as_dict, reports):
        details = report["details"]
        conditions = details.get("conditions", {})
        rows.append({
            "name": report["name"],
            "passed": report["passed"],
            "worst_margin": report["worst_margin"],
            "scale": details.get("scale"),
            "threshold": details.get("threshold"),
            "failed_conditions": ";".join(k for k, v in conditions.items() if not v),
        })
    return rows


def write_csv(rows, columns, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=columns)
        writer.writeheader()
        writer.writerows(rows)
    logger.info(f"Wrote {len(rows)} CSV rows to {path}")
    return path


def write_result(result, path, output_format="json"):
    """
    Persist a CampaignResult.

    Args:
        result: CampaignResult
        path: Output file
        output_format: "json" or "csv"
    """
    if output_format == "json":
        return write_json(result.to_dict(), path)
    if output_format == "csv":
        return write_csv(aggregate_rows(result.to_dict()), AGGREGATE_COLUMNS, path)
    raise ConfigError(f"Unknown output format {output_format!r}")


def write_reports(reports, path, output_format="json"):
    """Persist VerificationReport objects or their dicts (a verify run)."""
    if output_format == "json":
        return write_json([_as_dict(r) for r in reports], path)
    if output_format == "csv":
        return write_csv(report_rows(reports), REPORT_COLUMNS, path)
    raise ConfigError(f"Unknown output format {output_format!r}")

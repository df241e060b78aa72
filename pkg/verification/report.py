"""
Rendering of command results as JSON, CSV or plain text.

Data sections are deterministic; timings live only in the JSON "metadata" block.
"""
import json
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from algebra.automorphisms import map_listing
from algebra.models import MonoidMap
from algebra.power_monoid import PowerMonoidContext
from verification.schemas import OutputFormat, VerificationReport


def report_data(report: VerificationReport) -> Dict[str, Any]:
    data = report.model_dump(mode="json", exclude={"checks": {"__all__": {"elapsed"}}})
    if data["raw_factors"] is None:
        del data["raw_factors"]
    data["group"] = list(report.group)
    data["status"] = "pass" if report.passed else "fail"
    return data


def report_timings(report: VerificationReport) -> Dict[str, float]:
    return {check.name: round(check.elapsed, 6) for check in report.checks}


def _dumps(document: Dict[str, Any]) -> str:
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def _group_name(factors: Sequence[int]) -> str:
    return ",".join(str(n) for n in factors) or "1"


def checks_frame(reports: Sequence[VerificationReport]) -> pd.DataFrame:
    rows = [
        {
            "group": _group_name(report.group),
            "check": check.name,
            "status": check.status.value,
            "note": check.note or "",
            "witness": json.dumps(check.witness, sort_keys=True) if check.witness else "",
        }
        for report in reports
        for check in report.checks
    ]
    return pd.DataFrame(rows, columns=["group", "check", "status", "note", "witness"])


def summary_frame(reports: Sequence[VerificationReport]) -> pd.DataFrame:
    rows = [
        {
            "group": _group_name(report.group),
            "aut_g": report.aut_g_order,
            "aut_p0g": report.aut_p0g_order if report.aut_p0g_order is not None else "skipped",
            "exceptional": report.exceptional,
            "status": "pass" if report.passed else "FAIL",
        }
        for report in reports
    ]
    return pd.DataFrame(rows, columns=["group", "aut_g", "aut_p0g", "exceptional", "status"])


def render_reports(reports: Sequence[VerificationReport], fmt: OutputFormat, metadata: Optional[Dict] = None) -> str:
    if fmt == OutputFormat.JSON:
        document = {
            "reports": [report_data(r) for r in reports],
            "metadata": {
                **(metadata or {}),
                "elapsed": {_group_name(r.group): report_timings(r) for r in reports},
            },
        }
        return _dumps(document)
    if fmt == OutputFormat.CSV:
        return checks_frame(reports).to_csv(index=False)
    lines = [summary_frame(reports).to_string(index=False), ""]
    checks = checks_frame(reports).drop(columns=["witness"])
    lines.append(checks.to_string(index=False))
    failures = [(r, c) for r in reports for c in r.checks if c.witness]
    for report, check in failures:
        lines.append(f"FAIL {_group_name(report.group)} {check.name}: {json.dumps(check.witness, sort_keys=True)}")
    return "\n".join(lines) + "\n"


def render_aut(
    ctx: PowerMonoidContext,
    aut_g_order: int,
    maps: Sequence[MonoidMap],
    fmt: OutputFormat,
    emit_maps: bool = False,
    raw_factors: Optional[Sequence[int]] = None,
    metadata: Optional[Dict] = None,
) -> str:
    data: Dict[str, Any] = {
        "group": list(ctx.group.invariant_factors),
        "aut_g_order": aut_g_order,
        "aut_p0g_order": len(maps),
        "exceptional": ctx.group.invariant_factors == (2, 2),
    }
    if raw_factors is not None:
        data["raw_factors"] = list(raw_factors)
    if fmt == OutputFormat.JSON:
        if emit_maps:
            data["maps"] = [
                {"image": list(f.image), "listing": map_listing(ctx, f)} for f in maps
            ]
        return _dumps({**data, "metadata": metadata or {}})
    frame = pd.DataFrame([{**data, "group": _group_name(data["group"])}])
    if fmt == OutputFormat.CSV:
        text = frame.to_csv(index=False)
        if emit_maps:
            text += maps_frame(maps).to_csv(index=False)
        return text
    lines = [frame.to_string(index=False)]
    if emit_maps:
        for index, f in enumerate(maps):
            lines.append(f"automorphism {index}:")
            lines.extend(f"  {row['subset']} -> {row['image']}" for row in map_listing(ctx, f))
    return "\n".join(lines) + "\n"


def maps_frame(maps: Sequence[MonoidMap]) -> pd.DataFrame:
    return pd.DataFrame([list(f.image) for f in maps]).rename_axis("automorphism")


def render_table(ctx: PowerMonoidContext, fmt: OutputFormat) -> str:
    """Carrier listing and Cayley table; the CSV form is the table alone."""
    frame = ctx.cayley_frame()
    carrier: List[List[int]] = [ctx.render(x) for x in ctx.enumerate_carrier()]
    if fmt == OutputFormat.CSV:
        return frame.to_csv()
    if fmt == OutputFormat.JSON:
        return _dumps(
            {
                "group": list(ctx.group.invariant_factors),
                "carrier": carrier,
                "table": frame.to_numpy().tolist(),
            }
        )
    listing = pd.DataFrame({"subset": [str(s) for s in carrier]}).rename_axis("carrier")
    return listing.to_string() + "\n\n" + frame.to_string() + "\n"

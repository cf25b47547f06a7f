"""Machine-readable verdicts shared by the library checks and the CLI."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional

__all__ = ["Report", "emit_report", "PASS", "FAIL", "WITNESS", "BOUNDED_NO"]

PASS = "pass"
FAIL = "fail"
WITNESS = "witness"
BOUNDED_NO = "bounded-no"


@dataclass
class Report:
    """Outcome of one task: a verdict plus rendered evidence.

    ``residuals`` hold rendered expressions that must all be "0" for a pass;
    ``witness`` carries computed values (solved coefficients, images of
    operators) keyed by component name.
    """

    task: str
    verdict: str
    residuals: List[str] = field(default_factory=list)
    witness: Optional[Dict[str, str]] = None
    ms: int = 0

    def __post_init__(self):
        if self.verdict == PASS and any(r != "0" for r in self.residuals):
            raise ValueError("pass verdict with nonzero residuals %r" % (self.residuals,))

    @property
    def ok(self) -> bool:
        return self.verdict in (PASS, WITNESS)


def emit_report(report: Report, format: str = "human") -> str:
    """Render a report.  ``human`` is line oriented, ``json`` a single object."""
    if format == "json":
        return json.dumps(
            {
                "task": report.task,
                "verdict": report.verdict,
                "residuals": report.residuals,
                "witness": report.witness,
                "ms": report.ms,
            },
            sort_keys=False,
        )
    if format != "human":
        raise ValueError("unknown report format %r" % (format,))
    lines = ["task: %s" % report.task, "verdict: %s" % report.verdict]
    for r in report.residuals:
        lines.append("residual: %s" % r)
    if report.witness is not None:
        for name in sorted(report.witness):
            lines.append("witness %s = %s" % (name, report.witness[name]))
    lines.append("ms: %d" % report.ms)
    return "\n".join(lines)

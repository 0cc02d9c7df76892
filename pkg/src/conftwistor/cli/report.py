"""Machine-readable verification reports."""

from __future__ import annotations

import json

from .. import __version__
from .scenes import Scene

TOOL = "conftwistor"


def build_report(scene: Scene, results: list, seed: int) -> dict:
    checks = [r.as_dict() for r in results]
    passed = sum(1 for c in checks if c["passed"])
    return {
        "tool": TOOL,
        "version": __version__,
        "scene": scene.echo(),
        "seed": seed,
        "checks": checks,
        "summary": {"total": len(checks), "passed": passed, "failed": len(checks) - passed},
    }


def dumps(report: dict) -> str:
    """Byte-stable serialization: fixed key order, repr floats, trailing newline."""
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def format_table(report: dict) -> str:
    lines = []
    for c in report["checks"]:
        mark = "PASS" if c["passed"] else "FAIL"
        lines.append(f"{mark}  {c['id']:<28} residual {c['max_residual']:.3e}"
                     f"  tol {c['tolerance']:.1e}  ({c['points_evaluated']} pts)")
    s = report["summary"]
    lines.append(f"{s['passed']}/{s['total']} checks passed on scene {report['scene']['name']!r}")
    return "\n".join(lines)

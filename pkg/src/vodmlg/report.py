"""Run reports: a human table and a machine-readable JSON form.

Rates and ratios are rounded to 6 decimals when the report is built and are
always printed with exactly 6 decimals, so writing, reading and writing again
reproduces the same bytes.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any

from .flow import PathFlow, link_utilization
from .synthesis.milp import SynthesisResult
from .synthesis.oracle import OracleResult
from .synthesis.pipeline import SynthesisRun
from .validation import ValidationReport

FORMATS = ("table", "machine")


def _r6(x: float | None) -> float | None:
    if x is None or not math.isfinite(x):
        return None
    return round(x, 6) + 0.0  # drops negative zero


@dataclass
class LinkLoad:
    link: list[str]
    flow: float
    capacity: float
    utilization: float
    installed: bool


@dataclass
class PathEntry:
    path: list[str]
    amount: float


@dataclass
class CommodityEntry:
    id: str
    destination: str
    volume: float
    servers: list[str]
    paths: list[PathEntry]


@dataclass
class Finding:
    kind: str
    message: str
    subjects: list[str]
    residual: float = 0.0


@dataclass
class Report:
    command: str
    status: str
    objective: float | None = None
    lp_bound: float | None = None
    installed_links: list[list[str]] = field(default_factory=list)
    links: list[LinkLoad] = field(default_factory=list)
    commodities: list[CommodityEntry] = field(default_factory=list)
    findings: list[Finding] = field(default_factory=list)
    stats: dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.findings and self.status in ("Optimal", "Valid", "Feasible")

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Report":
        return cls(
            command=d["command"],
            status=d["status"],
            objective=d.get("objective"),
            lp_bound=d.get("lp_bound"),
            installed_links=[list(x) for x in d.get("installed_links", [])],
            links=[LinkLoad(**x) for x in d.get("links", [])],
            commodities=[
                CommodityEntry(c["id"], c["destination"], c["volume"], list(c["servers"]), [PathEntry(**p) for p in c["paths"]])
                for c in d.get("commodities", [])
            ],
            findings=[Finding(**f) for f in d.get("findings", [])],
            stats=dict(d.get("stats", {})),
        )


def _findings(report: ValidationReport) -> list[Finding]:
    return [Finding(v.kind, v.message, [str(x) for x in v.subjects], _r6(v.residual) or 0.0) for v in report]


def validation_report(findings: ValidationReport) -> Report:
    return Report("validate", "Valid" if findings.ok else "Invalid", findings=_findings(findings))


def synthesis_report(run: SynthesisRun, structure: ValidationReport | None = None) -> Report:
    res: SynthesisResult = run.result
    findings = _findings(ValidationReport.merge(structure or ValidationReport(), run.findings))
    report = Report(
        "synthesize",
        res.status.value,
        objective=_r6(res.objective),
        lp_bound=_r6(res.lp_bound),
        findings=findings,
        stats={"bnb_nodes": res.node_count, "simplex_iterations": res.iterations},
    )
    installed = set(res.installed_links) if res.status.value == "Optimal" else set()
    report.installed_links = [list(k) for k in sorted(installed)]
    report.stats["installed_link_count"] = len(installed)
    if res.status.value != "Optimal":
        return report

    flows = res.arc_flows()
    util = link_utilization(flows, run.graph.physical)
    for e in run.graph.physical.links():
        load = flows.get((e.u, e.v), 0.0) + flows.get((e.v, e.u), 0.0)
        report.links.append(LinkLoad([e.key[0], e.key[1]], _r6(load), _r6(e.capacity), _r6(util.fractions.get(e.key, 0.0)), e.key in installed))

    by_commodity: dict[str, list[PathEntry]] = {c.id: [] for c in run.commodities}
    for pf in run.assignment.path_flows:
        by_commodity[pf.commodity].append(PathEntry(list(pf.path[1:]), _r6(pf.amount)))
    for c in run.commodities:
        paths = by_commodity[c.id]
        servers = sorted({p.path[0] for p in paths})
        report.commodities.append(CommodityEntry(c.id, c.destination, _r6(c.volume), servers, paths))
    return report


def oracle_report(result: OracleResult) -> Report:
    return Report(
        "oracle",
        "Feasible" if result.feasible else "Infeasible",
        objective=_r6(result.objective) if result.feasible else None,
        installed_links=[list(k) for k in result.best_links],
        stats={"subsets_solved": result.subsets_solved},
    )


# ---------------------------------------------------------------------------
# serialization


def _emit(obj: Any, indent: int) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json.dumps(k)}: {_emit(obj[k], indent + 1)}' for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(isinstance(x, (str, int, float)) and not isinstance(x, bool) for x in obj):
            return "[" + ", ".join(_emit(x, indent + 1) for x in obj) + "]"
        return "[\n" + ",\n".join(f"{pad}  {_emit(x, indent + 1)}" for x in obj) + f"\n{pad}]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return f"{obj:.6f}"
    if isinstance(obj, int):
        return str(obj)
    return json.dumps(obj)


def _fmt(x: float | None) -> str:
    return "-" if x is None else f"{x:.6f}"


def _table(report: Report) -> str:
    lines = [f"command: {report.command}", f"status: {report.status}"]
    if report.command != "validate":
        lines += [f"objective: {_fmt(report.objective)}"]
    if report.command == "synthesize":
        lines += [f"lp_bound: {_fmt(report.lp_bound)}"]
    for k in sorted(report.stats):
        lines.append(f"{k}: {report.stats[k]}")
    if report.installed_links:
        lines.append("")
        lines.append(f"installed links ({len(report.installed_links)}):")
        lines += [f"  {u} - {v}" for u, v in report.installed_links]
    if report.links:
        lines.append("")
        lines.append(f"{'link':<24} {'flow':>14} {'capacity':>14} {'utilization':>12}")
        for l in report.links:
            name = f"{l.link[0]}-{l.link[1]}" + ("" if l.installed else " (off)")
            lines.append(f"{name:<24} {l.flow:>14.6f} {l.capacity:>14.6f} {l.utilization:>12.6f}")
    if report.commodities:
        lines.append("")
        lines.append("commodities:")
        for c in report.commodities:
            lines.append(f"  {c.id} -> {c.destination} volume {c.volume:.6f} servers {','.join(c.servers) or '-'}")
            lines += [f"    {p.amount:.6f}  {' > '.join(p.path)}" for p in c.paths]
    if report.findings:
        lines.append("")
        lines.append(f"findings ({len(report.findings)}):")
        lines += [f"  [{f.kind}] {f.message}" for f in report.findings]
    return "\n".join(lines) + "\n"


def write_report(report: Report, fmt: str = "table") -> str:
    """Serialize ``report``; identical reports give byte-identical text."""
    if fmt == "machine":
        return _emit(report.to_dict(), 0) + "\n"
    if fmt == "table":
        return _table(report)
    raise ValueError(f"unknown report format {fmt!r}; choose from {FORMATS}")


def read_report(text: str) -> Report:
    """Parse a machine-format report."""
    return Report.from_dict(json.loads(text))


def read_path_flows(text: str) -> list[PathFlow]:
    """Path flows from a machine report or a ``{"flows": [...]}`` document.

    Each entry of ``flows`` has ``commodity``, ``path`` and ``amount``.

    Raises:
        ValueError: the document has neither form.
    """
    doc = json.loads(text)
    if not isinstance(doc, dict):
        raise ValueError("expected a JSON object")
    if "flows" in doc:
        try:
            return [PathFlow(str(f["commodity"]), tuple(f["path"]), float(f["amount"])) for f in doc["flows"]]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed flow entry: {exc}") from None
    if "commodities" in doc:
        report = Report.from_dict(doc)
        return [PathFlow(c.id, tuple(p.path), p.amount) for c in report.commodities for p in c.paths]
    raise ValueError("expected a 'flows' list or a machine report")

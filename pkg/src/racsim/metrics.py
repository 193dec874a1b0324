"""Hit/miss accounting and report rendering (JSON, CSV, comparison table)."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field, fields

from .records import Access, AccessKind, AccessOutcome, FillCase

FILL_CASES = (FillCase.C1, FillCase.C2, FillCase.C3, FillCase.C4)


@dataclass
class Stats:
    accesses: int = 0
    hits: int = 0
    misses: int = 0
    loads: int = 0
    stores: int = 0
    writebacks: int = 0
    fills_by_case: dict[str, int] = field(default_factory=lambda: {c.value: 0 for c in FILL_CASES})

    def record(self, access: Access, outcome: AccessOutcome) -> "Stats":
        self.accesses += 1
        if access.kind is AccessKind.LOAD:
            self.loads += 1
        else:
            self.stores += 1
        if outcome.hit:
            self.hits += 1
        else:
            self.misses += 1
            self.fills_by_case[outcome.fill_case.value] += 1
        self.writebacks += sum(1 for _, dirty in outcome.evicted if dirty)
        return self

    def finalize(self, policy: str = "", config: dict | None = None, seed: int = 0, trace: str = "") -> "StatsReport":
        return StatsReport(
            accesses=self.accesses,
            hits=self.hits,
            misses=self.misses,
            loads=self.loads,
            stores=self.stores,
            writebacks=self.writebacks,
            fills_by_case=dict(self.fills_by_case),
            hit_rate=self.hits / self.accesses if self.accesses else 0.0,
            policy=policy,
            config=dict(config or {}),
            seed=seed,
            trace=trace,
        )


@dataclass
class StatsReport:
    accesses: int
    hits: int
    misses: int
    loads: int
    stores: int
    writebacks: int
    fills_by_case: dict[str, int]
    hit_rate: float
    policy: str
    config: dict
    seed: int
    trace: str

    def conservation_errors(self) -> list[str]:
        errs = []
        if self.hits + self.misses != self.accesses:
            errs.append("hits + misses != accesses")
        if self.loads + self.stores != self.accesses:
            errs.append("loads + stores != accesses")
        if sum(self.fills_by_case.values()) != self.misses:
            errs.append("sum(fills_by_case) != misses")
        return errs


def finalize(stats: Stats, **echo) -> StatsReport:
    return stats.finalize(**echo)


def format_percent(hits: int, accesses: int) -> str:
    """Hit rate as a percentage truncated (not rounded) to two decimals."""
    if accesses == 0:
        return "0.00%"
    basis_points = hits * 10000 // accesses
    return f"{basis_points // 100}.{basis_points % 100:02d}%"


def to_json(report: StatsReport | list[StatsReport]) -> str:
    if isinstance(report, list):
        return json.dumps([asdict(r) for r in report], indent=2) + "\n"
    return json.dumps(asdict(report), indent=2) + "\n"


def from_json(text: str) -> StatsReport:
    return StatsReport(**json.loads(text))


CSV_COLUMNS = (
    ["policy", "trace", "seed", "accesses", "hits", "misses", "loads", "stores", "writebacks"]
    + [f"fills_{c.value}" for c in FILL_CASES]
    + ["hit_rate", "config"]
)


def to_csv(reports: list[StatsReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        row = {f.name: getattr(r, f.name) for f in fields(r) if f.name in CSV_COLUMNS}
        for c in FILL_CASES:
            row[f"fills_{c.value}"] = r.fills_by_case.get(c.value, 0)
        row["hit_rate"] = f"{r.hit_rate:.6f}"
        row["config"] = json.dumps(r.config, separators=(",", ":"), sort_keys=True)
        writer.writerow(row)
    return buf.getvalue()


def compare(reports: list[StatsReport]) -> str:
    """Plain-text table, one row per report in input order."""
    header = ("policy", "accesses", "hits", "misses", "hit_rate")
    rows = [(r.policy, str(r.accesses), str(r.hits), str(r.misses), format_percent(r.hits, r.accesses)) for r in reports]
    widths = [max([len(h)] + [len(row[i]) for row in rows]) for i, h in enumerate(header)]

    def line(cells):
        first = cells[0].ljust(widths[0])
        rest = [c.rjust(w) for c, w in zip(cells[1:], widths[1:])]
        return "  ".join([first, *rest])

    out = [line(header), "  ".join("-" * w for w in widths)]
    out += [line(row) for row in rows]
    return "\n".join(out) + "\n"


def render_human(report: StatsReport) -> str:
    fills = ", ".join(f"{k}={v}" for k, v in report.fills_by_case.items())
    return (
        f"policy      {report.policy}\n"
        f"trace       {report.trace}\n"
        f"accesses    {report.accesses} (loads {report.loads}, stores {report.stores})\n"
        f"hits        {report.hits}\n"
        f"misses      {report.misses} ({fills})\n"
        f"writebacks  {report.writebacks}\n"
        f"hit rate    {format_percent(report.hits, report.accesses)}\n"
    )

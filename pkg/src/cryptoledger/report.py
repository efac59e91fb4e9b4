"""Text balance-sheet tables and CSV series."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Mapping, Optional

from .instruments import BackingKind, backing_status
from .ledger import SECTORS, BalanceSheet, LiabilityClass, World
from .scenario import RunReport, Snapshot


def _fmt(amount: int, scale: int) -> str:
    if amount % scale == 0:
        return f"{amount // scale:,}"
    return f"{amount / scale:,.3f}"


def render_table(sheet: BalanceSheet, scale: int = 1, *, title: str = "",
                 labels: Optional[Mapping[str, str]] = None,
                 order: Optional[Iterable[str]] = None) -> str:
    """Two-column balance sheet: assets left, liabilities and net worth right.

    Rows follow ``order`` (declaration order of instruments) when given,
    otherwise the sheet's own insertion order.
    """
    labels = labels or {}
    unit = "thousands $" if scale == 1000 else "$" if scale == 1 else f"x{scale:,} $"
    ids = list(order) if order is not None else []
    ids += [i for i in list(sheet.assets) + list(sheet.liabilities) if i not in ids]
    left = [(labels.get(i, i), _fmt(sheet.assets[i], scale)) for i in ids if i in sheet.assets]
    right = [(labels.get(i, i), _fmt(sheet.liabilities[i], scale)) for i in ids if i in sheet.liabilities]
    right.append(("net worth", _fmt(sheet.net_worth, scale)))
    rows = max(len(left), len(right))
    left += [("", "")] * (rows - len(left))
    right += [("", "")] * (rows - len(right))
    head_l, head_r = f"Assets ({unit})", f"Liabilities ({unit})"
    wl = max([len(head_l)] + [len(a) + len(b) + 2 for a, b in left])
    wr = max([len(head_r)] + [len(a) + len(b) + 2 for a, b in right])

    def cell(pair: tuple[str, str], width: int) -> str:
        name, value = pair
        return name + " " * (width - len(name) - len(value)) + value

    lines = []
    if title:
        lines.append(title)
    lines.append(f"{head_l:<{wl}} | {head_r}")
    lines.append("-" * wl + "-+-" + "-" * wr)
    for l, r in zip(left, right):
        lines.append(f"{cell(l, wl)} | {cell(r, wr)}".rstrip())
    return "\n".join(lines) + "\n"


def render_agent(world: World, agent: str, scale: int = 1, title: str = "") -> str:
    labels = {i: inst.name for i, inst in world.instruments.items()}
    return render_table(world.sheet(agent), scale, title=title or world.agent(agent).name,
                        labels=labels, order=world.instruments)


# ---------------------------------------------------------------------------
# CSV export
# ---------------------------------------------------------------------------


def _write(path: Path, header: list[str], rows: Iterable[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow(r)


def _sector_row(world: World) -> list[int]:
    totals = {s: 0 for s in SECTORS}
    unassigned = 0
    for a in world.agents.values():
        if a.sector is None:
            unassigned += a.balance_sheet.net_worth
        else:
            totals[a.sector] += a.balance_sheet.net_worth
    return [totals[s] for s in SECTORS] + [unassigned]


def outstanding(world: World) -> dict[str, int]:
    """Issued instruments by liabilities, everything else by holdings."""
    out = {i: 0 for i in world.instruments}
    for a in world.agents.values():
        for iid, inst in world.instruments.items():
            if inst.liability_class is LiabilityClass.ISSUED_FINANCIAL:
                out[iid] += a.balance_sheet.liability(iid)
            else:
                out[iid] += a.balance_sheet.asset(iid)
    return out


def _ratio(world: World, iid: str) -> str:
    st = backing_status(world, iid)
    return "" if st.ratio is None else f"{float(st.ratio):.6f}"


def export_csv(report: RunReport, out_dir: str | Path) -> list[Path]:
    """Write every series of ``report`` into ``out_dir``; returns the files written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    snaps: list[Snapshot] = report.series_snapshots()
    written = []

    def emit(name: str, header: list[str], rows: Iterable[list]) -> None:
        p = out / name
        _write(p, header, rows)
        written.append(p)

    emit("sector_net_worth.csv", ["snapshot", "event_index"] + [s.value for s in SECTORS] + ["Unassigned"],
         ([s.name, s.event_index] + _sector_row(s.world) for s in snaps))

    instruments = list(report.final.instruments) if report.final else []
    emit("instrument_outstanding.csv", ["snapshot", "event_index"] + instruments,
         ([s.name, s.event_index] + [outstanding(s.world)[i] for i in instruments] for s in snaps))

    backed = [i for i, inst in (report.final.instruments.items() if report.final else [])
              if inst.backing_rule is not None and inst.backing_rule.kind is not BackingKind.NONE]
    emit("backing_ratios.csv", ["snapshot", "event_index"] + backed,
         ([s.name, s.event_index] + [_ratio(s.world, i) for i in backed] for s in snaps))

    keys: list[str] = []
    for run in report.chain_runs:
        keys += [k for k in run.stats if k not in keys]
    emit("chain_stats.csv", ["label"] + keys,
         ([run.label] + [repr(run.stats[k]) if k in run.stats else "" for k in keys]
          for run in report.chain_runs))

    flow_rows = []
    stock_rows = []
    for rec in report.sfc_records:
        for row in rec.flow.rows:
            flow_rows.append([rec.period, row] + [rec.flow.cell(row, c) for c in rec.flow.columns])
        for row in rec.stock_after.rows:
            stock_rows.append([rec.period, row] + [rec.stock_after.cell(row, c) for c in SECTORS])
    sectors = [s.value for s in SECTORS]
    emit("sfc_flows.csv", ["period", "flow"] + sectors, flow_rows)
    emit("sfc_stocks.csv", ["period", "instrument"] + sectors, stock_rows)
    return written


def summary(report: RunReport) -> str:
    lines = [f"scenario {report.scenario} (seed {report.seed})"]
    if report.checks:
        lines.append(f"  {len(report.checks)} cells checked, {len(report.mismatches)} mismatches")
        for c in report.mismatches:
            lines.append(f"  MISMATCH {c.checkpoint} {c.agent} {c.cell}: "
                         f"expected {c.expected:,}, got {c.actual:,}")
    if report.errata:
        lines.append(f"  {len(report.errata)} printed cells flagged as errata:")
        lines += [f"    {e}" for e in report.errata]
    lines.append(f"  {len(report.flags)} invariant flags")
    lines += [f"    {f}" for f in report.flags]
    for run in report.chain_runs:
        stats = ", ".join(f"{k}={v:g}" for k, v in run.stats.items())
        lines.append(f"  chain {run.label}: {stats}")
    if report.sfc_records:
        bad = sum(len(r.report.flags) for r in report.sfc_records)
        lines.append(f"  {len(report.sfc_records)} SFC periods, {bad} consistency flags")
    return "\n".join(lines) + "\n"


def render_report_tables(report: RunReport, scale: Optional[int] = None) -> str:
    """Balance sheets of each checkpoint's agents, or of every agent without checkpoints."""
    parts = []
    for snap in report.series_snapshots():
        cp_scale, agents = report.views.get(snap.name, (1, list(snap.world.agents)))
        for aid in agents:
            title = f"{snap.world.agent(aid).name} ({snap.name})"
            parts.append(render_agent(snap.world, aid, scale or cp_scale, title))
    return "\n".join(parts)

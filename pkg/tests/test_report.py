from __future__ import annotations

import csv

import pytest

from cryptoledger import fixtures
from cryptoledger.ledger import BalanceSheet
from cryptoledger.report import export_csv, outstanding, render_agent, render_table, summary
from cryptoledger.scenario import RunOptions, run_scenario


def rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


class TestRenderTable:
    def test_alice_after_mining(self, tables_report):
        w = tables_report.snapshot("table1.after").world
        text = render_agent(w, "alice")
        nw = next(line for line in text.splitlines() if "net worth" in line)
        assert nw.endswith("net worth  299,000")
        assert "Assets ($)" in text
        assert "11,000" in text

    def test_empty_sheet(self):
        text = render_table(BalanceSheet())
        lines = text.splitlines()
        assert lines[0].startswith("Assets ($)")
        assert any(line.split()[-3:] == ["net", "worth", "0"] for line in lines)

    def test_thousands(self, tables_report):
        w = tables_report.snapshot("table3.after").world
        text = render_agent(w, "bank", scale=1000)
        assert "Assets (thousands $)" in text
        assert "8,000,007" in text
        assert "400,007" in text

    def test_declaration_order(self):
        sheet = BalanceSheet.of({"b": 2, "a": 1}, {"c": 1})
        text = render_table(sheet, order=["a", "b", "c"])
        body = text.splitlines()[2:]
        assert body[0].startswith("a") and body[1].startswith("b")

    def test_non_multiple_shown_exactly(self):
        assert "1.500" in render_table(BalanceSheet.of({"x": 1_500}), scale=1000)

    def test_deterministic(self, tables_report):
        w = tables_report.final
        assert render_agent(w, "narrow_bank", 1000) == render_agent(w, "narrow_bank", 1000)


class TestCsv:
    def test_three_checkpoints_three_rows(self, tmp_path):
        sc = fixtures.builtin("table3")
        rep = run_scenario(sc)
        assert len(sc.checkpoints) == 4
        sc.checkpoints = sc.checkpoints[:3]
        rep = run_scenario(sc)
        export_csv(rep, tmp_path)
        for name in ("sector_net_worth.csv", "instrument_outstanding.csv", "backing_ratios.csv"):
            assert len(rows(tmp_path / name)) == 1 + 3

    def test_bitcoin_series_shape(self, tables_report, tmp_path):
        export_csv(tables_report, tmp_path)
        table = rows(tmp_path / "instrument_outstanding.csv")
        col = table[0].index("bitcoin")
        series = [(r[0], int(r[col])) for r in table[1:]]
        values = [v for _, v in series]
        first_after = next(i for i, (n, _) in enumerate(series) if n.startswith("table1.after"))
        assert values[0] < values[first_after]
        assert values[:first_after + 1] == sorted(values[:first_after + 1])
        assert len(set(values[first_after:])) == 1

    def test_lf_utf8_and_header(self, tables_report, tmp_path):
        files = export_csv(tables_report, tmp_path)
        assert {f.name for f in files} == {
            "sector_net_worth.csv", "instrument_outstanding.csv", "backing_ratios.csv",
            "chain_stats.csv", "sfc_flows.csv", "sfc_stocks.csv"}
        for f in files:
            raw = f.read_bytes()
            assert b"\r\n" not in raw
            raw.decode("utf-8")
            assert rows(f)[0]

    def test_sector_columns_stable(self, tables_report, tmp_path):
        export_csv(tables_report, tmp_path)
        head = rows(tmp_path / "sector_net_worth.csv")[0]
        assert head == ["snapshot", "event_index", "Households", "Firms", "Banks", "OtherFinancial",
                        "Treasury", "CentralBank", "RestOfWorld", "Unassigned"]

    @pytest.mark.parametrize("name", ["tables-all", "chain-demo", "sfc-demo"])
    def test_byte_identical_rerun(self, name, tmp_path):
        outs = []
        for k in range(2):
            rep = run_scenario(fixtures.builtin(name), RunOptions(check_invariants=True))
            d = tmp_path / str(k)
            export_csv(rep, d)
            outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
        assert outs[0] == outs[1]

    def test_sfc_series(self, tmp_path):
        rep = run_scenario(fixtures.builtin("sfc-demo"))
        export_csv(rep, tmp_path)
        flows = rows(tmp_path / "sfc_flows.csv")
        assert {int(r[0]) for r in flows[1:]} == set(range(20))
        for r in flows[1:]:
            assert sum(int(x) for x in r[2:]) == 0


class TestSummary:
    def test_mentions_errata(self, tables_report):
        text = summary(tables_report)
        assert "0 mismatches" in text
        assert "1,191,500" in text
        assert "0 invariant flags" in text

    def test_outstanding(self, tables_world):
        out = outstanding(tables_world)
        assert out["bitcoin"] == tables_world.outstanding("bitcoin")
        assert out["cbdc"] == tables_world.owing("central_bank", "cbdc")

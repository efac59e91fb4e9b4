"""Acceptance criteria 1-8.

Each test records a one-line verdict; conftest prints the verdicts in the
terminal summary so a plain ``pytest`` run shows them. Run this module
alone with ``pytest tests/test_acceptance.py -s`` to see them inline too.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction

import numpy as np

from cryptoledger import fixtures, txops
from cryptoledger.chainsim import BITCOIN, block_reward, cumulative_supply, simulate_chain
from cryptoledger.instruments import check_narrow_bank
from cryptoledger.ledger import (
    SECTORS,
    BalanceSheet,
    LiabilityClass,
    post_transaction,
    verify_global_consistency,
)
from cryptoledger.report import export_csv
from cryptoledger.scenario import RunOptions, run_scenario
from cryptoledger.sfc import build_flow_matrix, check_sfc, default_sfc_world, random_policy, run_steps
from cryptoledger.txops import NarrowBankConstraintViolated, UndercollateralizedRequest

from worldgen import corrupt_cell, random_transaction, random_world

K = 1000
VERDICTS: dict[int, str] = {}


def verdict(n: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    VERDICTS[n] = line
    print(line)
    assert ok, line


def test_criterion_1_table_replay():
    t0 = time.perf_counter()
    rep = run_scenario(fixtures.builtin("tables-all"), RunOptions(check_invariants=True))
    elapsed = time.perf_counter() - t0
    after = fixtures.printed_after_cells(rep)
    bad = [c for c in after if not c.ok]
    bob = {e.checkpoint for e in rep.errata if e.agent == "bob" and e.printed == "1,191,500"
           and e.computed == 1_199_500}
    typos_flagged = {"table4.before", "table7.after"} <= bob
    ok = not bad and not rep.mismatches and not rep.flags and typos_flagged and elapsed < 1.0
    verdict(1, ok, f"{len(after) - len(bad)}/{len(after)} printed after-cells equal; "
                   f"net-worth typo flagged at {', '.join(sorted(bob))}; {elapsed:.2f}s")


def test_criterion_2_supply_arithmetic():
    limit = cumulative_supply(BITCOIN, math.inf)
    # eras count from zero: era 3 starts at height 630,000
    era3 = block_reward(BITCOIN, 3 * 210_000)
    boundaries = all(
        block_reward(BITCOIN, 210_000 * k - 1) == 2 * block_reward(BITCOIN, 210_000 * k)
        and block_reward(BITCOIN, 210_000 * k) == block_reward(BITCOIN, 210_000 * k + 1)
        for k in range(1, 33))
    ok = limit == 21_000_000 and era3 == Fraction(25, 4) and boundaries
    verdict(2, ok, f"limit {limit}, era-3 reward {float(era3)}, halvings at 210,000k")


def test_criterion_3_chain_statistics():
    shares = [0.2, 0.3, 0.5]
    n, warmup = 10_000, 2016
    t0 = time.perf_counter()
    a = simulate_chain(BITCOIN, 3, shares, n, seed=42)
    elapsed = time.perf_counter() - t0
    b = simulate_chain(BITCOIN, 3, shares, n, seed=42)
    mean = float(a.intervals()[warmup:].mean())
    wins = a.wins(3)
    blocks = len(a.chain)
    z = [(w - blocks * p) / math.sqrt(blocks * p * (1 - p)) for w, p in zip(wins, shares)]
    ok = abs(mean - 600) <= 0.05 * 600 and max(map(abs, z)) <= 3 and a == b and elapsed < 5
    verdict(3, ok, f"mean interval {mean:.1f}s; win z-scores {', '.join(f'{v:+.2f}' for v in z)}; "
                   f"rerun identical {a == b}; {elapsed:.2f}s")


def _total_net_worth(world) -> int:
    return sum(a.balance_sheet.net_worth for a in world.agents.values())


def _issued_sums_match(world) -> bool:
    # independent recount of every issued instrument
    held: dict[str, int] = {}
    owed: dict[str, int] = {}
    for a in world.agents.values():
        for i, v in a.balance_sheet.assets.items():
            held[i] = held.get(i, 0) + v
        for i, v in a.balance_sheet.liabilities.items():
            owed[i] = owed.get(i, 0) + v
    return all(held.get(i, 0) == owed.get(i, 0) for i, inst in world.instruments.items()
               if inst.liability_class is LiabilityClass.ISSUED_FINANCIAL)


def _phantom_liability(world, rng):
    ids = list(world.agents)
    agent = ids[int(rng.integers(len(ids)))]
    iid = ["gold", "coin"][int(rng.integers(2))]
    bs = world.sheet(agent)
    book = dict(bs.liabilities)
    book[iid] = book.get(iid, 0) + int(rng.integers(1, 1000))
    return world.with_sheet(agent, BalanceSheet.of(bs.assets, book)), iid


def test_criterion_4_conservation():
    rng = np.random.default_rng(4)
    world = random_world(rng, n_agents=8, n_issuers=3)
    n_tx, symmetry_breaks, nw_breaks, creations = 10_000, 0, 0, 0
    t0 = time.perf_counter()
    for _ in range(n_tx):
        tx = random_transaction(world, rng)
        nw = _total_net_worth(world)
        world = post_transaction(world, tx)
        if not verify_global_consistency(world).ok or not _issued_sums_match(world):
            symmetry_breaks += 1
        if tx.creates:
            creations += 1
        elif _total_net_worth(world) != nw:
            nw_breaks += 1
    elapsed = time.perf_counter() - t0
    missed = 0
    trials = 500
    for k in range(trials):
        bad, iid = (corrupt_cell if k % 2 else _phantom_liability)(world, rng)
        if iid not in {f.subject for f in verify_global_consistency(bad).flags}:
            missed += 1
    ok = symmetry_breaks == 0 and nw_breaks == 0 and missed == 0 and elapsed < 10
    verdict(4, ok, f"{n_tx} transactions ({creations} creations): {symmetry_breaks} symmetry breaks, "
                   f"{nw_breaks} net-worth breaks; {trials - missed}/{trials} corruptions detected; "
                   f"{elapsed:.2f}s")


def test_criterion_5_narrow_bank():
    rep = run_scenario(fixtures.builtin("tables-all"))
    nb = "narrow_bank"
    t5 = check_narrow_bank(rep.snapshot("table5.after").world, nb)
    w5 = rep.snapshot("table5.after").world
    eq5 = (t5.cover_value == 11_000_000 * K
           and w5.owing(nb, "narrow_bank.deposits") == 9_999_999 * K
           and w5.owing(nb, "fbsc") == 1_000_001 * K)
    later = []
    for n in (6, 7):
        w = rep.snapshot(f"table{n}.after").world
        reserves_only = check_narrow_bank(w, nb)
        widened = check_narrow_bank(w, nb, include_cash_cbdc=True)
        later.append((n, reserves_only, widened))
    holds_later = all(r.satisfied and w.cover_value > w.outstanding for _, r, w in later)
    # one dollar short of cover: any further issue must be refused
    w = rep.snapshot("table5.before").world.without_journal()
    bs = w.sheet(nb)
    short = w.with_sheet(nb, BalanceSheet.of({**bs.assets, "reserves": 11_000_000 * K - 1},
                                             bs.liabilities))
    try:
        txops.issue_fbsc(short, "alice", nb, 1_000)
        refused = False
    except NarrowBankConstraintViolated:
        refused = True
    ok = t5.satisfied and eq5 and holds_later and refused
    slack = "; ".join(f"table {n}: reserve slack {(r.cover_value - r.outstanding) // K:,}k, "
                      f"with cash and CBDC {(w.cover_value - w.outstanding) // K:,}k"
                      for n, r, w in later)
    verdict(5, ok, f"table 5 reserves 11,000,000k = 9,999,999k + 1,000,001k; {slack}; "
                   f"issue beyond cover refused {refused}")


def test_criterion_6_peg_mechanics():
    rep = run_scenario(fixtures.builtin("tables-all"))
    w8 = rep.snapshot("table8.before").world.without_journal()
    maker = fixtures.MAKER
    minted = txops.open_vault_mint(w8, "alice", "makerdao", maker, 5_000, 3_000)
    try:
        txops.open_vault_mint(w8, "alice", "makerdao", maker, 5_000, 3_001)
        rejected = False
    except UndercollateralizedRequest:
        rejected = True
    vault = txops.vault_of(minted, "alice", "makerdao", maker)
    hi = txops.liquidate_vault(minted, "makerdao", vault, Fraction(9, 10))
    surplus = hi.holding("alice", "ethereum") - minted.holding("alice", "ethereum")
    lo = txops.liquidate_vault(minted, "makerdao", vault, Fraction(1, 2))
    shortfall = minted.sheet("makerdao").net_worth - lo.sheet("makerdao").net_worth

    w7 = rep.snapshot("table7.before").world.without_journal()
    six = ("bob", "bank", "narrow_bank", "administrator", "sponsors", "central_bank")
    there = txops.issue_dtc(w7, fixtures.CONSORTIUM, "bob", "bank", 5_000)
    back = txops.redeem_dtc(there, fixtures.CONSORTIUM, "bob", "bank", 5_000)
    changed = sum(there.sheet(a) != w7.sheet(a) for a in six)
    restored = all(back.sheet(a) == w7.sheet(a) for a in six) and back.agents == w7.agents
    ok = rejected and surplus == 1_500 and shortfall == 500 and changed >= 5 and restored
    verdict(6, ok, f"(5,000, 3,000) accepted, (5,000, 3,001) rejected {rejected}; "
                   f"surplus {surplus:,} at 0.9; shortfall {shortfall:,} at 0.5; "
                   f"DTC issue touches {changed} of 6 sheets, redeem restores all 6 bit-exactly {restored}")


def test_criterion_7_sfc_consistency():
    runs, steps = 50, 100
    problems, perturb_missed, checked = 0, 0, 0
    t0 = time.perf_counter()
    for seed in range(runs):
        rng = np.random.default_rng(seed)
        policy = random_policy(rng)
        world, records = run_steps(default_sfc_world(policy.banking_mode), policy, steps)
        for r in records:
            checked += 1
            rows_zero = all(r.flow.row_sum(row) == 0 for row in r.flow.rows)
            cols_match = all(r.flow.column_sum(s) == r.stock_after.net_worth(s) - r.stock_before.net_worth(s)
                             for s in SECTORS)
            stock_zero = all(r.stock_after.row_sum(row) == 0 for row in r.stock_after.rows
                             if r.stock_after.classes[row] is LiabilityClass.ISSUED_FINANCIAL)
            if not (rows_zero and cols_match and stock_zero and r.report.ok):
                problems += 1
        # perturb one flow cell of a random period
        r = records[int(rng.integers(len(records)))]
        fm = build_flow_matrix(world, r.period)
        row = fm.rows[int(rng.integers(len(fm.rows)))]
        col = SECTORS[int(rng.integers(len(SECTORS)))]
        fm.cells[(row, col)] = fm.cell(row, col) + int(rng.integers(1, 1000))
        if check_sfc(r.stock_before, fm, r.stock_after).ok:
            perturb_missed += 1
    elapsed = time.perf_counter() - t0
    ok = problems == 0 and perturb_missed == 0 and elapsed < 30
    verdict(7, ok, f"{runs} policies x {steps} steps: {checked - problems}/{checked} periods consistent; "
                   f"{runs - perturb_missed}/{runs} perturbations flagged; {elapsed:.1f}s")


def test_criterion_8_determinism(tmp_path):
    differing = []
    for name in fixtures.BUILTIN_NAMES:
        for seed in (None, 99):
            outs = []
            for k in range(2):
                rep = run_scenario(fixtures.builtin(name), RunOptions(seed=seed, check_invariants=True))
                d = tmp_path / f"{name}-{seed}-{k}"
                export_csv(rep, d)
                outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
            if outs[0] != outs[1]:
                differing.append(f"{name}@{seed}")
    ok = not differing
    verdict(8, ok, f"{2 * len(fixtures.BUILTIN_NAMES)} scenario/seed pairs rerun; "
                   f"byte-identical CSVs {'for all' if ok else 'except ' + ', '.join(differing)}")

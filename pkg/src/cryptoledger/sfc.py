"""Seven-sector stock-flow consistent layer.

Sector balance-sheet matrices, per-period transaction-flow matrices rebuilt
from the journal, the consistency checks linking them, and a discrete-time
stepper driven by a :class:`BehavioralPolicy`.

Flow-matrix cells hold each sector's net-worth change from the period's
transactions, grouped by the transaction's flow category. A pure exchange
(coin issuance, lending, open-market operations) therefore leaves a zero row,
while an income flow such as wages shows up as a receipt in one column and a
payment in another.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from . import txops
from .instruments import (
    CASH,
    CBDC,
    RESERVES,
    BackingKind,
    BackingRule,
    check_narrow_bank,
    deposits_of,
    loans_of,
    reserve_backed_coins,
)
from .ledger import (
    SECTORS,
    Agent,
    BalanceSheet,
    ConsistencyReport,
    Flag,
    Instrument,
    LedgerError,
    LiabilityClass,
    Sector,
    Transaction,
    World,
    asset_leg,
    liability_leg,
    net_worth_changes,
    post_transaction,
)


class UnassignedAgent(LedgerError):
    pass


class UntaggedTransaction(LedgerError):
    pass


class PolicyDivergence(LedgerError):
    pass


FLOW_ROWS: tuple[str, ...] = (
    "wages",
    "consumption",
    "investment",
    "imports",
    "exports",
    "taxes",
    "government_spending",
    "interest",
    "dividends",
    "transfers",
    "mining",
    "coin_flows",
    "lending",
    "portfolio",
    "open_market",
    "treasury_financing",
)

# Rows counted as household disposable income.
INCOME_ROWS = ("wages", "interest", "dividends", "taxes", "transfers")


# ---------------------------------------------------------------------------
# Aggregation and matrices
# ---------------------------------------------------------------------------


def aggregate_sector(world: World, sector: Sector, *, net: bool = False) -> BalanceSheet:
    """Instrument-wise sum over every agent of ``sector``.

    With ``net`` set, holdings and liabilities of the same issued instrument
    inside the sector cancel out.
    """
    assets: dict[str, int] = defaultdict(int)
    liabs: dict[str, int] = defaultdict(int)
    for agent in world.agents.values():
        if agent.sector is not sector:
            continue
        for iid, v in agent.balance_sheet.assets.items():
            assets[iid] += v
        for iid, v in agent.balance_sheet.liabilities.items():
            liabs[iid] += v
    if net:
        for iid in set(assets) & set(liabs):
            d = assets[iid] - liabs[iid]
            assets[iid], liabs[iid] = max(d, 0), max(-d, 0)
    return BalanceSheet.of(assets, liabs)


@dataclass
class SectorMatrix:
    """Instruments by sectors; holdings positive, liabilities negative."""

    rows: tuple[str, ...]
    classes: dict[str, LiabilityClass]
    cells: dict[tuple[str, Sector], int] = field(default_factory=dict)
    columns: tuple[Sector, ...] = SECTORS

    def cell(self, row: str, col: Sector) -> int:
        return self.cells.get((row, col), 0)

    def row_sum(self, row: str) -> int:
        return sum(self.cell(row, c) for c in self.columns)

    def column_sum(self, col: Sector) -> int:
        return sum(self.cell(r, col) for r in self.rows)

    def net_worth(self, sector: Sector) -> int:
        return self.column_sum(sector)

    def check(self) -> ConsistencyReport:
        report = ConsistencyReport()
        for r in self.rows:
            if self.classes[r] is LiabilityClass.ISSUED_FINANCIAL:
                s = self.row_sum(r)
                if s:
                    report.flags.append(Flag("stock-row", r, 0, s, "issued claims must net out"))
            else:
                neg = [c for c in self.columns if self.cell(r, c) < 0]
                if neg:
                    report.flags.append(Flag("stock-row", r, 0, self.cell(r, neg[0]),
                                             "non-financial row carries a liability"))
        return report

    def as_array(self) -> np.ndarray:
        return np.array([[self.cell(r, c) for c in self.columns] for r in self.rows], dtype=object)


def _require_sectors(world: World) -> None:
    missing = sorted(a.id for a in world.agents.values() if a.sector is None)
    if missing:
        raise UnassignedAgent(", ".join(missing))


def build_balance_sheet_matrix(world: World) -> SectorMatrix:
    _require_sectors(world)
    rows = tuple(world.instruments)
    classes = {i: world.instruments[i].liability_class for i in rows}
    m = SectorMatrix(rows, classes)
    for agent in world.agents.values():
        bs = agent.balance_sheet
        for iid, v in bs.assets.items():
            m.cells[(iid, agent.sector)] = m.cell(iid, agent.sector) + v
        for iid, v in bs.liabilities.items():
            m.cells[(iid, agent.sector)] = m.cell(iid, agent.sector) - v
    return m


@dataclass
class FlowMatrix:
    period: int
    rows: tuple[str, ...] = FLOW_ROWS
    cells: dict[tuple[str, Sector], int] = field(default_factory=dict)
    columns: tuple[Sector, ...] = SECTORS

    def cell(self, row: str, col: Sector) -> int:
        return self.cells.get((row, col), 0)

    def row_sum(self, row: str) -> int:
        return sum(self.cell(row, c) for c in self.columns)

    def column_sum(self, col: Sector) -> int:
        return sum(self.cell(r, col) for r in self.rows)

    def nonzero_rows(self) -> list[str]:
        return [r for r in self.rows if any(self.cell(r, c) for c in self.columns)]

    def check(self) -> ConsistencyReport:
        report = ConsistencyReport()
        for r in self.rows:
            s = self.row_sum(r)
            if s:
                report.flags.append(Flag("flow-row", r, 0, s, "payments must equal receipts"))
        return report


def period_transactions(world: World, period: int) -> list[Transaction]:
    # periods are stamped from a clock that never runs backwards, so scan from the tail
    out = []
    for tx in reversed(world.journal):
        if tx.period < period:
            break
        if tx.period == period:
            out.append(tx)
    return out[::-1]


def build_flow_matrix(world: World, period: int) -> FlowMatrix:
    txs = period_transactions(world, period)
    _require_sectors(world)
    extra = sorted({tx.flow for tx in txs if tx.flow and tx.flow not in FLOW_ROWS})
    fm = FlowMatrix(period, FLOW_ROWS + tuple(extra))
    for tx in txs:
        if not tx.flow:
            raise UntaggedTransaction(f"{tx.id}: {tx.description}")
        for aid, d in net_worth_changes(world, tx).items():
            key = (tx.flow, world.agent(aid).sector)
            fm.cells[key] = fm.cells.get(key, 0) + d
    return fm


def check_sfc(stock_before: SectorMatrix, flow: FlowMatrix,
              stock_after: SectorMatrix) -> ConsistencyReport:
    """Flag nonzero flow rows and sectors whose flows miss their net-worth change."""
    if stock_before.columns != flow.columns or stock_after.columns != flow.columns:
        raise ValueError("matrices use different sector labels")
    if stock_before.rows != stock_after.rows:
        raise ValueError("stock matrices use different instrument labels")
    report = flow.check()
    for c in flow.columns:
        change = stock_after.column_sum(c) - stock_before.column_sum(c)
        acc = flow.column_sum(c)
        if acc != change:
            report.flags.append(Flag("stock-flow", c.value, change, acc,
                                     "net accumulation vs change in net worth"))
    return report


# ---------------------------------------------------------------------------
# Behavioural policy
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SfcLayout:
    households: str = "households"
    firms: str = "firms"
    bank: str = "bank"
    narrow_bank: str = "narrow_bank"
    custodian: str = "custodian"
    sponsors: str = "sponsors"
    administrator: str = "administrator"
    treasury: str = "treasury"
    central_bank: str = "central_bank"
    rest_of_world: str = "rest_of_world"

    @property
    def consortium(self) -> txops.DtcConsortium:
        return txops.DtcConsortium(self.administrator, self.sponsors, self.narrow_bank)


DEFAULT_LAYOUT = SfcLayout()
BILLS = "bills"
TREASURY_ACCOUNT = "treasury_account"


@dataclass(frozen=True)
class BehavioralPolicy:
    # households
    consumption_income: float = 0.8
    consumption_wealth: float = 0.2
    import_share: float = 0.1
    cash_share: float = 0.03
    cbdc_share: float = 0.05
    fbsc_share: float = 0.02
    csc_share: float = 0.02
    dtc_share: float = 0.03
    narrow_deposit_share: float = 0.1
    # fraction of any portfolio or reserve gap closed within one period
    adjustment_speed: float = 1.0
    # firms
    wage_share: float = 0.8
    investment_share: float = 0.1
    payout_ratio: float = 1.0
    # banks: "fractional" lends by creating deposits, "narrow" keeps full reserve cover
    banking_mode: str = "fractional"
    reserve_ratio: float = 0.1
    loan_rate: float = 0.01
    deposit_rate: float = 0.003
    # treasury
    tax_rate: float = 0.25
    government_spending: int = 200_000
    # central bank
    bill_rate: float = 0.005
    reserve_rate: float = 0.004
    cbdc_rate: float = 0.0
    direct_lending: bool = False
    credit_gap_trigger: int = 0
    # rest of world
    export_propensity: float = 0.5
    dtc_trade_share: float = 0.5
    initial_demand: int = 1_000_000

    PROPENSITIES = (
        "consumption_income", "consumption_wealth", "import_share", "cash_share", "cbdc_share",
        "fbsc_share", "csc_share", "dtc_share", "narrow_deposit_share", "wage_share",
        "investment_share", "payout_ratio", "reserve_ratio", "tax_rate", "export_propensity",
        "dtc_trade_share", "adjustment_speed",
    )
    PORTFOLIO = ("cash_share", "cbdc_share", "fbsc_share", "csc_share", "dtc_share",
                 "narrow_deposit_share")

    def validate(self) -> None:
        for name in self.PROPENSITIES:
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if sum(getattr(self, n) for n in self.PORTFOLIO) > 1.0:
            raise ValueError("portfolio shares exceed 1")
        if self.investment_share >= 1.0:
            raise ValueError("investment_share must be below 1")
        if self.banking_mode not in ("fractional", "narrow"):
            raise ValueError(f"unknown banking_mode {self.banking_mode!r}")
        for name in ("loan_rate", "deposit_rate", "bill_rate", "reserve_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} outside [0, 1]")
        if not -1.0 <= self.cbdc_rate <= 1.0:
            raise ValueError("cbdc_rate outside [-1, 1]")
        if self.government_spending < 0 or self.initial_demand < 0 or self.credit_gap_trigger < 0:
            raise ValueError("spending, demand and trigger must be non-negative")

    @classmethod
    def zero(cls, **overrides) -> "BehavioralPolicy":
        """Everything switched off: no propensities, no rates, no spending."""
        base = {n: 0.0 for n in cls.PROPENSITIES}
        base.update(loan_rate=0.0, deposit_rate=0.0, bill_rate=0.0, reserve_rate=0.0,
                    cbdc_rate=0.0, government_spending=0, initial_demand=0)
        base.update(overrides)
        return cls(**base)

    @classmethod
    def from_dict(cls, data: dict) -> "BehavioralPolicy":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown policy fields: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


def random_policy(rng: np.random.Generator) -> BehavioralPolicy:
    """A valid policy with every behavioural parameter drawn at random."""
    u = lambda lo, hi: float(rng.uniform(lo, hi))  # noqa: E731
    shares = rng.dirichlet(np.ones(7))[:6] * u(0.0, 0.6)
    return BehavioralPolicy(
        consumption_income=u(0.3, 1.0),
        consumption_wealth=u(0.0, 0.2),
        import_share=u(0.0, 0.4),
        cash_share=float(shares[0]), cbdc_share=float(shares[1]), fbsc_share=float(shares[2]),
        csc_share=float(shares[3]), dtc_share=float(shares[4]),
        narrow_deposit_share=float(shares[5]),
        wage_share=u(0.3, 1.0),
        investment_share=u(0.0, 0.3),
        payout_ratio=u(0.0, 1.0),
        banking_mode="narrow" if rng.random() < 0.5 else "fractional",
        reserve_ratio=u(0.0, 0.5),
        loan_rate=u(0.0, 0.05),
        deposit_rate=u(0.0, 0.03),
        tax_rate=u(0.0, 0.5),
        government_spending=int(rng.integers(0, 500_000)),
        bill_rate=u(0.0, 0.05),
        reserve_rate=u(0.0, 0.03),
        cbdc_rate=u(-0.02, 0.02),
        direct_lending=bool(rng.random() < 0.5),
        credit_gap_trigger=int(rng.integers(0, 100_000)),
        export_propensity=u(0.0, 1.0),
        dtc_trade_share=u(0.0, 1.0),
        initial_demand=int(rng.integers(0, 3_000_000)),
        adjustment_speed=u(0.2, 1.0),
    )


# ---------------------------------------------------------------------------
# Default economy
# ---------------------------------------------------------------------------


def sfc_instruments(layout: SfcLayout = DEFAULT_LAYOUT) -> list[Instrument]:
    L = layout
    IF, R, P = LiabilityClass.ISSUED_FINANCIAL, LiabilityClass.REAL, LiabilityClass.PURE_ASSET_COIN
    return [
        Instrument(CASH, "cash", IF, L.central_bank),
        Instrument(RESERVES, "reserves", IF, L.central_bank),
        Instrument(CBDC, "CBDC", IF, L.central_bank),
        Instrument(TREASURY_ACCOUNT, "treasury account", IF, L.central_bank),
        Instrument(loans_of(L.central_bank), "central bank loans", IF, L.central_bank),
        Instrument(BILLS, "treasury bills", IF, L.treasury),
        Instrument(deposits_of(L.bank), "deposits", IF, L.bank),
        Instrument(loans_of(L.bank), "bank loans", IF, L.bank),
        Instrument(deposits_of(L.narrow_bank), "narrow bank deposits", IF, L.narrow_bank),
        Instrument("fbsc", "FBSC", IF, L.narrow_bank,
                   BackingRule(BackingKind.RESERVE_COVER, frozenset({RESERVES}))),
        Instrument("csc", "CSC", IF, L.custodian,
                   BackingRule(BackingKind.DEPOSIT_COVER, frozenset({deposits_of(L.narrow_bank)}))),
        Instrument("dtc", "DTC", IF, L.administrator,
                   BackingRule(BackingKind.BASKET_COVER, frozenset({"basket"}))),
        Instrument("basket", "basket of assets", R),
        Instrument("bitcoin", "bitcoin", P),
    ]


def default_sfc_world(banking_mode: str = "fractional",
                      layout: SfcLayout = DEFAULT_LAYOUT) -> World:
    """A small closed-books economy: every issued claim has its counterpart.

    In narrow mode the commercial bank holds no loans and full reserve cover.
    The central bank's bills and the treasury's bill liability are solved so
    that both start at zero net worth for the central bank.
    """
    L = layout
    H = Sector.HOUSEHOLDS
    bd, nbd = deposits_of(L.bank), deposits_of(L.narrow_bank)
    narrow = banking_mode == "narrow"
    sheets: dict[str, tuple[Sector, dict[str, int], dict[str, int]]] = {
        L.households: (H, {bd: 2_000_000, nbd: 300_000, CASH: 100_000, CBDC: 100_000,
                           "fbsc": 50_000, "csc": 50_000, "dtc": 50_000, "bitcoin": 100_000}, {}),
        L.firms: (Sector.FIRMS, {bd: 500_000},
                  {} if narrow else {loans_of(L.bank): 1_500_000}),
        L.sponsors: (Sector.FIRMS, {"basket": 500_000, nbd: 100_000}, {}),
        L.administrator: (Sector.FIRMS, {"basket": 100_000}, {"dtc": 100_000}),
        L.custodian: (Sector.OTHER_FINANCIAL, {nbd: 60_000}, {"csc": 50_000}),
        L.narrow_bank: (Sector.BANKS, {RESERVES: 530_000}, {nbd: 460_000, "fbsc": 50_000}),
        L.bank: (Sector.BANKS,
                 {RESERVES: 2_200_000, BILLS: 400_000} if narrow else
                 {loans_of(L.bank): 1_500_000, BILLS: 800_000, RESERVES: 300_000},
                 {bd: 2_500_000}),
        L.rest_of_world: (Sector.REST_OF_WORLD, {CASH: 100_000, "dtc": 50_000}, {}),
    }
    reserves = sum(a.get(RESERVES, 0) for _, a, _ in sheets.values())
    cash = sum(a.get(CASH, 0) for _, a, _ in sheets.values())
    cbdc = sum(a.get(CBDC, 0) for _, a, _ in sheets.values())
    account = 100_000
    cb_bills = reserves + cash + cbdc + account
    sheets[L.central_bank] = (Sector.CENTRAL_BANK, {BILLS: cb_bills},
                              {RESERVES: reserves, CASH: cash, CBDC: cbdc, TREASURY_ACCOUNT: account})
    bank_bills = sum(a.get(BILLS, 0) for _, a, _ in sheets.values())
    sheets[L.treasury] = (Sector.TREASURY, {TREASURY_ACCOUNT: account}, {BILLS: bank_bills})
    agents = [Agent(aid, aid.replace("_", " "), sector, BalanceSheet.of(a, l))
              for aid, (sector, a, l) in sheets.items()]
    return World.build(sfc_instruments(layout), agents)


# ---------------------------------------------------------------------------
# Stepper
# ---------------------------------------------------------------------------


def _part(rate: float, base: int) -> int:
    """floor(rate * base) for possibly negative rates."""
    return math.floor(rate * base)


class _Period:
    """Mutable working state for one step; the input world is never touched."""

    def __init__(self, world: World, policy: BehavioralPolicy, layout: SfcLayout):
        self.w = world
        self.p = policy
        self.L = layout
        self.start = world

    # -- posting helpers ---------------------------------------------------

    def post(self, legs: list, description: str, flow: str) -> None:
        tx = Transaction.of(legs, description, flow=flow)
        if tx.legs:
            self.w = post_transaction(self.w, tx)

    def run(self, op, *args, **kw) -> None:
        self.w = op(self.w, *args, **kw)

    def has(self, agent: str, instrument: str) -> int:
        return self.w.holding(agent, instrument)

    def owes(self, agent: str, instrument: str) -> int:
        return self.w.owing(agent, instrument)

    def nw(self, agent: str) -> int:
        return self.w.sheet(agent).net_worth

    def profit(self, agent: str) -> int:
        return self.nw(agent) - self.start.sheet(agent).net_worth

    # -- central bank plumbing ----------------------------------------------

    def bills_to_cb(self, bank: str, amount: int) -> None:
        amount = min(amount, self.has(bank, BILLS))
        cb = self.L.central_bank
        self.post([asset_leg(bank, BILLS, -amount), asset_leg(bank, RESERVES, amount),
                   asset_leg(cb, BILLS, amount), liability_leg(cb, RESERVES, amount)],
                  f"{bank} sells {amount:,} bills to the central bank", "open_market")

    def bills_from_cb(self, bank: str, amount: int) -> None:
        cb = self.L.central_bank
        amount = min(amount, self.has(cb, BILLS), self.has(bank, RESERVES))
        self.post([asset_leg(bank, BILLS, amount), asset_leg(bank, RESERVES, -amount),
                   asset_leg(cb, BILLS, -amount), liability_leg(cb, RESERVES, -amount)],
                  f"{bank} buys {amount:,} bills from the central bank", "open_market")

    def ensure_reserves(self, bank: str, need: int) -> int:
        """Sell bills until ``need`` reserves are on hand; returns what is available."""
        short = need - self.has(bank, RESERVES)
        if short > 0:
            self.bills_to_cb(bank, short)
        return self.has(bank, RESERVES)

    def finance_treasury(self, need: int) -> None:
        """The central bank buys new bills so the treasury account covers ``need``."""
        short = need - self.has(self.L.treasury, TREASURY_ACCOUNT)
        if short <= 0:
            return
        T, cb = self.L.treasury, self.L.central_bank
        self.post([asset_leg(T, TREASURY_ACCOUNT, short), liability_leg(T, BILLS, short),
                   asset_leg(cb, BILLS, short), liability_leg(cb, TREASURY_ACCOUNT, short)],
                  f"treasury issues {short:,} bills to the central bank", "treasury_financing")

    def treasury_pays_bank_client(self, client: str, bank: str, amount: int, flow: str) -> None:
        T, cb = self.L.treasury, self.L.central_bank
        self.finance_treasury(amount)
        legs = [asset_leg(T, TREASURY_ACCOUNT, -amount), liability_leg(cb, TREASURY_ACCOUNT, -amount),
                liability_leg(cb, RESERVES, amount), asset_leg(bank, RESERVES, amount)]
        if client != bank:
            legs += [liability_leg(bank, deposits_of(bank), amount),
                     asset_leg(client, deposits_of(bank), amount)]
        self.post(legs, f"treasury pays {client} {amount:,}", flow)

    def bank_client_pays_treasury(self, client: str, bank: str, amount: int, flow: str) -> int:
        T, cb = self.L.treasury, self.L.central_bank
        amount = min(amount, self.has(client, deposits_of(bank)))
        amount = min(amount, self.ensure_reserves(bank, amount))
        self.post([asset_leg(client, deposits_of(bank), -amount),
                   liability_leg(bank, deposits_of(bank), -amount),
                   asset_leg(bank, RESERVES, -amount), liability_leg(cb, RESERVES, -amount),
                   liability_leg(cb, TREASURY_ACCOUNT, amount), asset_leg(T, TREASURY_ACCOUNT, amount)],
                  f"{client} pays {amount:,} to the treasury", flow)
        return amount

    def adjust(self, gap: int) -> int:
        """Part of a stock gap closed this period, rounded toward zero."""
        return int(self.p.adjustment_speed * gap)

    def is_narrow(self, bank: str) -> bool:
        return bank == self.L.narrow_bank or self.p.banking_mode == "narrow"

    def cover_requirement(self, bank: str) -> int:
        return self.owes(bank, deposits_of(bank)) + sum(
            self.owes(bank, c) for c in reserve_backed_coins(self.w, bank))

    # -- stages ----------------------------------------------------------------

    def lagged(self) -> tuple[int, int]:
        """Output target and household disposable income from last period."""
        t = self.w.clock
        p = self.p
        if t > 0 and self.w.journal and self.w.journal[-1].period == t - 1:
            fm = build_flow_matrix(self.w, t - 1)
            F, H = Sector.FIRMS, Sector.HOUSEHOLDS
            sales = sum(fm.cell(r, F) for r in ("consumption", "government_spending", "exports"))
            sales = max(sales, 0)
            output = math.floor(sales / (1.0 - p.investment_share))
            yd = sum(fm.cell(r, H) for r in INCOME_ROWS)
            return output, max(yd, 0)
        output = p.initial_demand
        return output, _part(p.wage_share * (1.0 - p.tax_rate), output)

    def wages(self, output: int) -> int:
        L, p = self.L, self.p
        bd = deposits_of(L.bank)
        wage_bill = _part(p.wage_share, output)
        short = wage_bill - self.has(L.firms, bd)
        if short > 0:
            if p.banking_mode == "fractional":
                self.post([asset_leg(L.firms, bd, short), liability_leg(L.firms, loans_of(L.bank), short),
                           asset_leg(L.bank, loans_of(L.bank), short),
                           liability_leg(L.bank, bd, short)],
                          f"bank lends {short:,} to firms", "lending")
            elif p.direct_lending and short >= p.credit_gap_trigger:
                cb, cbl = L.central_bank, loans_of(L.central_bank)
                self.post([asset_leg(L.firms, bd, short), liability_leg(L.firms, cbl, short),
                           liability_leg(L.bank, bd, short), asset_leg(L.bank, RESERVES, short),
                           asset_leg(cb, cbl, short), liability_leg(cb, RESERVES, short)],
                          f"central bank lends {short:,} to firms", "lending")
        wage_bill = min(wage_bill, self.has(L.firms, bd))
        self.run(txops.pay, L.firms, L.bank, L.households, L.bank, wage_bill, flow="wages")
        return wage_bill

    def consumption(self, yd_prev: int) -> None:
        L, p = self.L, self.p
        H, bd = L.households, deposits_of(L.bank)
        wealth = max(self.nw(H), 0)
        spend = _part(p.consumption_income, yd_prev) + _part(p.consumption_wealth, wealth)
        spend = max(0, min(spend, self.has(H, bd)))
        imports = _part(p.import_share, spend)
        self.run(txops.pay, H, L.bank, L.firms, L.bank, spend - imports, flow="consumption")

        in_dtc = min(_part(p.dtc_trade_share, imports), self.has(H, "dtc"))
        in_cash = imports - in_dtc
        top_up = min(in_cash - self.has(H, CASH), self.has(H, bd))
        if top_up > 0:
            top_up = min(top_up, self.ensure_reserves(L.bank, top_up))
            self.run(txops.withdraw_cash, H, L.bank, L.central_bank, top_up)
        in_cash = min(in_cash, self.has(H, CASH))
        self.post([asset_leg(H, "dtc", -in_dtc), asset_leg(L.rest_of_world, "dtc", in_dtc),
                   asset_leg(H, CASH, -in_cash), asset_leg(L.rest_of_world, CASH, in_cash)],
                  "household imports", "imports")

        R = L.rest_of_world
        exports = _part(p.export_propensity, self.has(R, CASH) + self.has(R, "dtc"))
        ex_dtc = min(_part(p.dtc_trade_share, exports), self.has(R, "dtc"))
        ex_cash = min(exports - ex_dtc, self.has(R, CASH))
        self.post([asset_leg(R, "dtc", -ex_dtc), asset_leg(L.firms, "dtc", ex_dtc),
                   asset_leg(R, CASH, -ex_cash), asset_leg(L.firms, CASH, ex_cash)],
                  "exports paid in cash and DTC", "exports")
        firm_cash = self.has(L.firms, CASH)
        if firm_cash:
            self.run(txops.deposit_cash, L.firms, L.bank, L.central_bank, firm_cash)
        self.redeem_dtc(L.firms, self.has(L.firms, "dtc"))

    def redeem_dtc(self, holder: str, amount: int) -> None:
        L = self.L
        c = L.consortium
        amount = min(amount, self.has(holder, "dtc"), self.has(c.administrator, "basket"),
                     self.has(c.sponsors, deposits_of(c.affiliated_bank)),
                     self.has(c.affiliated_bank, RESERVES))
        if amount > 0:
            self.run(txops.redeem_dtc, c, holder, L.bank, amount)

    def fiscal(self, wage_bill: int) -> None:
        L, p = self.L, self.p
        self.bank_client_pays_treasury(L.households, L.bank, _part(p.tax_rate, wage_bill), "taxes")
        self.treasury_pays_bank_client(L.firms, L.bank, p.government_spending, "government_spending")

    def interest_and_dividends(self) -> None:
        L, p = self.L, self.p
        T, cb = L.treasury, L.central_bank
        banks = (L.bank, L.narrow_bank)
        income_start = {b: self.nw(b) for b in banks}

        for b in banks:
            x = _part(p.bill_rate, self.has(b, BILLS))
            if x > 0:
                self.treasury_pays_bank_client(b, b, x, "interest")
        x = _part(p.bill_rate, self.has(cb, BILLS))
        if x > 0:
            self.finance_treasury(x)
            self.post([asset_leg(T, TREASURY_ACCOUNT, -x), liability_leg(cb, TREASURY_ACCOUNT, -x)],
                      "treasury pays bill interest to the central bank", "interest")
        for b in banks:
            x = _part(p.reserve_rate, self.has(b, RESERVES))
            self.post([asset_leg(b, RESERVES, x), liability_leg(cb, RESERVES, x)],
                      f"interest on {b} reserves", "interest")
        for holder in (L.households, L.bank, L.narrow_bank):
            x = _part(p.cbdc_rate, self.has(holder, CBDC))
            x = max(x, -self.has(holder, CBDC))
            self.post([asset_leg(holder, CBDC, x), liability_leg(cb, CBDC, x)],
                      f"CBDC interest for {holder}", "interest")

        self.loan_interest(loans_of(L.bank), L.bank)
        self.loan_interest(loans_of(cb), cb)

        for b in banks:
            self.deposit_interest(b, self.nw(b) - income_start[b])

        F, H = L.firms, L.households
        for payer, bank in ((F, L.bank), (L.custodian, L.narrow_bank), (L.sponsors, L.narrow_bank)):
            div = min(_part(p.payout_ratio, self.profit(payer)), self.has(payer, deposits_of(bank)))
            if div > 0:
                self.run(txops.pay, payer, bank, H, bank, div, flow="dividends")
        for b in banks:
            div = _part(p.payout_ratio, self.profit(b))
            if div > 0:
                self.post([liability_leg(b, deposits_of(b), div), asset_leg(H, deposits_of(b), div)],
                          f"{b} pays dividends", "dividends")
        cb_profit = self.profit(cb)
        if cb_profit > 0:
            self.post([liability_leg(cb, TREASURY_ACCOUNT, cb_profit),
                       asset_leg(T, TREASURY_ACCOUNT, cb_profit)],
                      "central bank profit to the treasury", "transfers")

    def loan_interest(self, loans: str, lender: str) -> None:
        L, p = self.L, self.p
        F, bd = L.firms, deposits_of(L.bank)
        due = _part(p.loan_rate, self.owes(F, loans))
        if due <= 0:
            return
        paid = min(due, self.has(F, bd))
        if lender == L.bank:
            legs = [asset_leg(F, bd, -paid), liability_leg(L.bank, bd, -paid)]
        else:
            paid = min(paid, self.ensure_reserves(L.bank, paid))
            legs = [asset_leg(F, bd, -paid), liability_leg(L.bank, bd, -paid),
                    asset_leg(L.bank, RESERVES, -paid), liability_leg(lender, RESERVES, -paid)]
        rest = due - paid
        legs += [liability_leg(F, loans, rest), asset_leg(lender, loans, rest)]
        self.post(legs, f"firms pay {due:,} interest to {lender}", "interest")

    def deposit_interest(self, bank: str, income: int) -> None:
        dep = deposits_of(bank)
        holders = sorted(a.id for a in self.w.agents.values() if a.balance_sheet.asset(dep) > 0)
        due = {h: _part(self.p.deposit_rate, self.has(h, dep)) for h in holders}
        total = sum(due.values())
        if total <= 0:
            return
        if self.is_narrow(bank) and total > max(income, 0):
            # a full-reserve bank can only pay out what it earned
            budget = max(income, 0)
            due = {h: v * budget // total for h, v in due.items()}
        legs = []
        for h, x in due.items():
            legs += [asset_leg(h, dep, x), liability_leg(bank, dep, x)]
        self.post(legs, f"{bank} pays deposit interest", "interest")

    def portfolio(self) -> None:
        L, p = self.L, self.p
        H, bd, nbd = L.households, deposits_of(L.bank), deposits_of(L.narrow_bank)
        liquid = self.liquid_wealth()
        gap = self.adjust(_part(p.cash_share, liquid) - self.has(H, CASH))
        if gap > 0:
            gap = min(gap, self.has(H, bd))
            gap = min(gap, self.ensure_reserves(L.bank, gap))
            if gap > 0:
                self.run(txops.withdraw_cash, H, L.bank, L.central_bank, gap)
        elif gap < 0:
            self.run(txops.deposit_cash, H, L.bank, L.central_bank, -gap)

        # narrow-bank deposits also fund the FBSC position
        target = max(0, _part(p.narrow_deposit_share + p.fbsc_share, liquid) - self.has(H, "fbsc"))
        gap = self.adjust(target - self.has(H, nbd))
        if gap > 0:
            gap = min(gap, self.has(H, bd))
            gap = min(gap, self.ensure_reserves(L.bank, gap))
            if gap > 0:
                self.run(txops.pay, H, L.bank, H, L.narrow_bank, gap, flow="portfolio")
        elif gap < 0:
            self.run(txops.pay, H, L.narrow_bank, H, L.bank, -gap, flow="portfolio")

    def liquid_wealth(self) -> int:
        H = self.L.households
        ids = (deposits_of(self.L.bank), deposits_of(self.L.narrow_bank), CASH, CBDC,
               "fbsc", "csc", "dtc")
        return sum(self.has(H, i) for i in ids)

    def open_market(self) -> None:
        L, p = self.L, self.p
        for b in (L.bank, L.narrow_bank):
            if self.is_narrow(b):
                target = self.cover_requirement(b)
            else:
                target = _part(p.reserve_ratio, self.owes(b, deposits_of(b)))
            gap = self.adjust(self.has(b, RESERVES) - target)
            if gap > 0:
                self.bills_from_cb(b, gap)
            elif gap < 0:
                self.bills_to_cb(b, -gap)

    def coin_flows(self) -> None:
        L, p = self.L, self.p
        H, cb, bd, nbd = L.households, L.central_bank, deposits_of(L.bank), deposits_of(L.narrow_bank)
        liquid = self.liquid_wealth()

        gap = self.adjust(_part(p.cbdc_share, liquid) - self.has(H, CBDC))
        if gap > 0:
            gap = min(gap, self.has(H, bd))
            gap = min(gap, self.ensure_reserves(L.bank, gap))
            if gap > 0:
                self.run(txops.withdraw_cbdc, H, L.bank, cb, gap)
        elif gap < 0:
            self.run(txops.deposit_cbdc, H, L.bank, cb, -gap)

        gap = self.adjust(_part(p.fbsc_share, liquid) - self.has(H, "fbsc"))
        if gap > 0:
            gap = min(gap, self.has(H, nbd))
            if gap > 0:
                self.run(txops.issue_fbsc, H, L.narrow_bank, gap)
        elif gap < 0:
            self.run(txops.redeem_fbsc, H, L.narrow_bank, -gap)

        gap = self.adjust(_part(p.csc_share, liquid) - self.has(H, "csc"))
        if gap > 0:
            gap = min(gap, self.has(H, bd))
            gap = min(gap, self.ensure_reserves(L.bank, gap))
            if gap > 0:
                self.run(txops.issue_csc, H, L.bank, L.custodian, L.narrow_bank, gap)
        elif gap < 0:
            gap = min(-gap, self.has(L.custodian, nbd), self.has(L.narrow_bank, RESERVES))
            if gap > 0:
                self.run(txops.redeem_csc, H, L.bank, L.custodian, L.narrow_bank, gap)

        gap = self.adjust(_part(p.dtc_share, liquid) - self.has(H, "dtc"))
        c = L.consortium
        if gap > 0:
            gap = min(gap, self.has(H, bd), self.has(c.sponsors, c.basket_instrument))
            gap = min(gap, self.ensure_reserves(L.bank, gap))
            if gap > 0:
                self.run(txops.issue_dtc, c, H, L.bank, gap)
        elif gap < 0:
            self.redeem_dtc(H, -gap)

    def restore_cover(self) -> None:
        for b in (self.L.bank, self.L.narrow_bank):
            if not self.is_narrow(b):
                continue
            short = self.cover_requirement(b) - self.has(b, RESERVES)
            if short > 0:
                self.bills_to_cb(b, short)
            if not check_narrow_bank(self.w, b).satisfied:
                raise PolicyDivergence(f"{b} cannot restore full reserve cover")


def step(world: World, policy: BehavioralPolicy, layout: SfcLayout = DEFAULT_LAYOUT) -> World:
    """Advance the economy one period.

    Fixed order: production and wages, consumption with imports and exports,
    taxes and spending, interest and dividends, household portfolio
    reallocation, central-bank open-market operations, coin issuance and
    redemption. Every posting is tagged with its flow category. Any
    infeasible posting aborts the whole step with :class:`PolicyDivergence`.
    """
    policy.validate()
    per = _Period(world, policy, layout)
    try:
        output, yd_prev = per.lagged()
        wage_bill = per.wages(output)
        per.consumption(yd_prev)
        per.fiscal(wage_bill)
        per.interest_and_dividends()
        per.portfolio()
        per.open_market()
        per.coin_flows()
        per.restore_cover()
    except PolicyDivergence:
        raise
    except LedgerError as e:
        raise PolicyDivergence(f"period {world.clock}: {e}") from e
    return per.w.advance()


@dataclass
class StepRecord:
    period: int
    stock_before: SectorMatrix
    flow: FlowMatrix
    stock_after: SectorMatrix
    report: ConsistencyReport


def run_steps(world: World, policy: BehavioralPolicy, n: int,
              layout: SfcLayout = DEFAULT_LAYOUT) -> tuple[World, list[StepRecord]]:
    records = []
    stock = build_balance_sheet_matrix(world)
    for _ in range(n):
        period = world.clock
        world = step(world, policy, layout)
        after = build_balance_sheet_matrix(world)
        flow = build_flow_matrix(world, period)
        report = check_sfc(stock, flow, after)
        report.extend(after.check())
        records.append(StepRecord(period, stock, flow, after, report))
        stock = after
    return world, records


def government_debt(world: World, layout: SfcLayout = DEFAULT_LAYOUT) -> int:
    """Bills outstanding net of the treasury's own account."""
    T = layout.treasury
    return world.owing(T, BILLS) - world.holding(T, TREASURY_ACCOUNT)


def output_of(world: World, period: int) -> int:
    fm = build_flow_matrix(world, period)
    return sum(fm.cell(r, Sector.FIRMS) for r in ("consumption", "government_spending", "exports"))


def restricted_holdings(world: World, sector: Sector = Sector.REST_OF_WORLD,
                        allowed: Iterable[str] = (CASH, "dtc")) -> ConsistencyReport:
    """Flag any holdings of ``sector`` outside ``allowed`` (default: cash and DTC)."""
    allowed = set(allowed)
    report = ConsistencyReport()
    agg = aggregate_sector(world, sector)
    for iid, v in agg.assets.items():
        if iid not in allowed:
            report.flags.append(Flag("restricted-holding", iid, 0, v, sector.value))
    for iid, v in agg.liabilities.items():
        report.flags.append(Flag("restricted-holding", iid, 0, -v, sector.value))
    return report

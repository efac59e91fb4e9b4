"""Double-entry balance-sheet core.

Every agent owns one balance sheet with separate, non-negative asset and
liability maps keyed by instrument id. All amounts are integer base units
(whole dollars for the worked-table scenarios); a display ``scale`` is only a
rendering concern.

Worlds are treated as values: :func:`post_transaction` never mutates its
input, it returns a new :class:`World` whose untouched agents are shared with
the old one.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Mapping, Optional

if TYPE_CHECKING:
    from .instruments import BackingRule

# Integer base units; scale is applied at render time only.
Amount = int


class LiabilityClass(str, Enum):
    REAL = "Real"
    PURE_ASSET_COIN = "PureAssetCoin"
    ISSUED_FINANCIAL = "IssuedFinancial"


class Sector(str, Enum):
    HOUSEHOLDS = "Households"
    FIRMS = "Firms"
    BANKS = "Banks"
    OTHER_FINANCIAL = "OtherFinancial"
    TREASURY = "Treasury"
    CENTRAL_BANK = "CentralBank"
    REST_OF_WORLD = "RestOfWorld"


SECTORS: tuple[Sector, ...] = tuple(Sector)


class Side(str, Enum):
    ASSET_DEBIT = "AssetDebit"  # asset up
    ASSET_CREDIT = "AssetCredit"  # asset down
    LIABILITY_DEBIT = "LiabilityDebit"  # liability down
    LIABILITY_CREDIT = "LiabilityCredit"  # liability up

    @property
    def is_asset(self) -> bool:
        return self in (Side.ASSET_DEBIT, Side.ASSET_CREDIT)

    @property
    def sign(self) -> int:
        return 1 if self in (Side.ASSET_DEBIT, Side.LIABILITY_CREDIT) else -1


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------


class LedgerError(Exception):
    """Base class for every rejected ledger or operation request."""


class UnknownAgent(LedgerError):
    pass


class UnknownInstrument(LedgerError):
    pass


class UnbalancedFinancialLegs(LedgerError):
    pass


class UnflaggedCreation(LedgerError):
    """Real or pure-asset positions created/destroyed outside a creation event."""


class NegativePosition(LedgerError):
    pass


class InvalidPosting(LedgerError):
    pass


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Instrument:
    """A named asset class.

    ``issuer`` is the institution that creates the claim (a bank for its
    deposits, a lender for its loans) and is required exactly for issued
    financial instruments. ``underlying`` marks a wrapper such as a collateral
    vault: its positions are conserved together with the wrapped instrument.
    """

    id: str
    name: str
    liability_class: LiabilityClass
    issuer: Optional[str] = None
    backing_rule: Optional["BackingRule"] = None
    underlying: Optional[str] = None

    def __post_init__(self) -> None:
        if self.liability_class is LiabilityClass.ISSUED_FINANCIAL:
            if not self.issuer:
                raise ValueError(f"issued instrument {self.id!r} needs an issuer")
            if self.underlying is not None:
                raise ValueError(f"issued instrument {self.id!r} cannot wrap another")
        elif self.issuer is not None:
            raise ValueError(f"{self.liability_class.value} instrument {self.id!r} has no issuer")

    @property
    def conservation_key(self) -> str:
        return self.underlying or self.id


def _clean(positions: Mapping[str, int]) -> dict[str, int]:
    return {k: int(v) for k, v in positions.items() if v != 0}


@dataclass(frozen=True)
class BalanceSheet:
    assets: dict[str, int] = field(default_factory=dict)
    liabilities: dict[str, int] = field(default_factory=dict)

    @classmethod
    def of(cls, assets: Mapping[str, int] | None = None,
           liabilities: Mapping[str, int] | None = None) -> "BalanceSheet":
        return cls(_clean(assets or {}), _clean(liabilities or {}))

    def asset(self, instrument: str) -> int:
        return self.assets.get(instrument, 0)

    def liability(self, instrument: str) -> int:
        return self.liabilities.get(instrument, 0)

    @property
    def total_assets(self) -> int:
        return sum(self.assets.values())

    @property
    def total_liabilities(self) -> int:
        return sum(self.liabilities.values())

    @property
    def net_worth(self) -> int:
        return self.total_assets - self.total_liabilities


@dataclass(frozen=True)
class Agent:
    id: str
    name: str
    sector: Optional[Sector]
    balance_sheet: BalanceSheet = field(default_factory=BalanceSheet)


@dataclass(frozen=True)
class Posting:
    agent: str
    side: Side
    instrument: str
    amount: int

    @property
    def delta(self) -> int:
        """Signed change to the touched position (asset or liability)."""
        return self.side.sign * self.amount


def asset_leg(agent: str, instrument: str, delta: int) -> Posting:
    """Posting that changes ``agent``'s asset position by ``delta``."""
    side = Side.ASSET_DEBIT if delta >= 0 else Side.ASSET_CREDIT
    return Posting(agent, side, instrument, abs(delta))


def liability_leg(agent: str, instrument: str, delta: int) -> Posting:
    """Posting that changes ``agent``'s liability position by ``delta``."""
    side = Side.LIABILITY_CREDIT if delta >= 0 else Side.LIABILITY_DEBIT
    return Posting(agent, side, instrument, abs(delta))


@dataclass(frozen=True)
class Transaction:
    """An atomic multi-leg posting set.

    ``creates`` marks creation events (mining, production, revaluation) that
    may change the outstanding amount of real or pure-asset instruments.
    ``flow`` is the flow-matrix category; ``period`` is stamped from the world
    clock when the transaction is posted.
    """

    legs: tuple[Posting, ...] = ()
    description: str = ""
    creates: bool = False
    flow: Optional[str] = None
    id: str = ""
    period: Optional[int] = None

    @classmethod
    def of(cls, legs: Iterable[Posting], description: str = "", **kw) -> "Transaction":
        return cls(tuple(leg for leg in legs if leg.amount != 0), description, **kw)


@dataclass(frozen=True)
class World:
    agents: dict[str, Agent] = field(default_factory=dict)
    instruments: dict[str, Instrument] = field(default_factory=dict)
    clock: int = 0
    journal: tuple[Transaction, ...] = ()

    @classmethod
    def build(cls, instruments: Iterable[Instrument], agents: Iterable[Agent],
              clock: int = 0) -> "World":
        inst = {}
        for i in instruments:
            if i.id in inst:
                raise ValueError(f"duplicate instrument {i.id!r}")
            inst[i.id] = i
        ags = {}
        for a in agents:
            if a.id in ags:
                raise ValueError(f"duplicate agent {a.id!r}")
            ags[a.id] = a
        return cls(ags, inst, clock)

    def agent(self, agent_id: str) -> Agent:
        try:
            return self.agents[agent_id]
        except KeyError:
            raise UnknownAgent(agent_id) from None

    def instrument(self, instrument_id: str) -> Instrument:
        try:
            return self.instruments[instrument_id]
        except KeyError:
            raise UnknownInstrument(instrument_id) from None

    def sheet(self, agent_id: str) -> BalanceSheet:
        return self.agent(agent_id).balance_sheet

    def holding(self, agent_id: str, instrument_id: str) -> int:
        return self.sheet(agent_id).asset(instrument_id)

    def owing(self, agent_id: str, instrument_id: str) -> int:
        return self.sheet(agent_id).liability(instrument_id)

    def outstanding(self, instrument_id: str) -> int:
        """Total held as an asset across all agents."""
        return sum(a.balance_sheet.asset(instrument_id) for a in self.agents.values())

    def advance(self, periods: int = 1) -> "World":
        return replace(self, clock=self.clock + periods)

    def with_clock(self, clock: int) -> "World":
        return replace(self, clock=clock)

    def with_sheet(self, agent_id: str, sheet: BalanceSheet) -> "World":
        """Unchecked overwrite of one balance sheet (fixtures, fault injection)."""
        agents = dict(self.agents)
        agents[agent_id] = replace(self.agent(agent_id), balance_sheet=sheet)
        return replace(self, agents=agents)

    def without_journal(self) -> "World":
        return replace(self, journal=())


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def net_worth(agent: Agent) -> int:
    return agent.balance_sheet.net_worth


def _validate(world: World, tx: Transaction) -> None:
    fin_assets: dict[str, int] = defaultdict(int)
    fin_liabs: dict[str, int] = defaultdict(int)
    conserved: dict[str, int] = defaultdict(int)
    for leg in tx.legs:
        world.agent(leg.agent)
        inst = world.instrument(leg.instrument)
        if not isinstance(leg.amount, int) or isinstance(leg.amount, bool) or leg.amount < 0:
            raise InvalidPosting(f"leg amount must be a non-negative integer: {leg!r}")
        if inst.liability_class is LiabilityClass.ISSUED_FINANCIAL:
            if leg.side.is_asset:
                fin_assets[inst.id] += leg.delta
            else:
                fin_liabs[inst.id] += leg.delta
        else:
            if not leg.side.is_asset:
                raise InvalidPosting(
                    f"{inst.id!r} is {inst.liability_class.value}; nobody can owe it")
            conserved[inst.conservation_key] += leg.delta
    for iid in sorted(set(fin_assets) | set(fin_liabs)):
        if fin_assets[iid] != fin_liabs[iid]:
            raise UnbalancedFinancialLegs(
                f"{iid}: assets change {fin_assets[iid]:+d}, liabilities change {fin_liabs[iid]:+d}")
    if not tx.creates:
        for key, delta in sorted(conserved.items()):
            if delta != 0:
                raise UnflaggedCreation(
                    f"{key}: net {delta:+d} outside a creation event")


def post_transaction(world: World, tx: Transaction) -> World:
    """Apply every leg of ``tx`` atomically and append it to the journal.

    Raises before touching anything if an agent or instrument is unknown, the
    legs break financial symmetry, or a position would go negative.
    """
    _validate(world, tx)
    touched: dict[str, tuple[dict[str, int], dict[str, int]]] = {}
    for leg in tx.legs:
        if leg.agent not in touched:
            bs = world.agents[leg.agent].balance_sheet
            touched[leg.agent] = (dict(bs.assets), dict(bs.liabilities))
        book = touched[leg.agent][0 if leg.side.is_asset else 1]
        book[leg.instrument] = book.get(leg.instrument, 0) + leg.delta
    agents = dict(world.agents)
    for aid, (assets, liabs) in touched.items():
        for book, label in ((assets, "asset"), (liabs, "liability")):
            for iid, v in book.items():
                if v < 0:
                    raise NegativePosition(f"{aid} {label} {iid} would be {v}")
        old = agents[aid]
        agents[aid] = Agent(old.id, old.name, old.sector, BalanceSheet.of(assets, liabs))
    stamped = replace(
        tx,
        id=tx.id or f"tx{len(world.journal)}",
        period=world.clock if tx.period is None else tx.period,
    )
    return replace(world, agents=agents, journal=world.journal + (stamped,))


def replay(initial: World, journal: Iterable[Transaction]) -> World:
    """Re-post ``journal`` onto ``initial``, keeping each entry's stamped period."""
    world = initial
    for tx in journal:
        if tx.period is not None:
            world = world.with_clock(tx.period)
        world = post_transaction(world, tx)
    return world


def net_worth_changes(world: World, tx: Transaction) -> dict[str, int]:
    """Per-agent net-worth effect of one transaction's legs."""
    out: dict[str, int] = defaultdict(int)
    for leg in tx.legs:
        out[leg.agent] += leg.delta if leg.side.is_asset else -leg.delta
    return {k: v for k, v in out.items() if v}


# ---------------------------------------------------------------------------
# Consistency reporting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Flag:
    kind: str
    subject: str
    expected: int
    actual: int
    detail: str = ""

    def __str__(self) -> str:
        msg = f"[{self.kind}] {self.subject}: expected {self.expected:,}, got {self.actual:,}"
        return f"{msg} ({self.detail})" if self.detail else msg


@dataclass(frozen=True)
class InstrumentTotal:
    instrument: str
    liability_class: LiabilityClass
    assets: int
    liabilities: int


@dataclass
class ConsistencyReport:
    totals: dict[str, InstrumentTotal] = field(default_factory=dict)
    flags: list[Flag] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.flags

    def flagged(self) -> list[str]:
        return sorted({f.subject for f in self.flags})

    def extend(self, other: "ConsistencyReport") -> None:
        self.totals.update(other.totals)
        self.flags.extend(other.flags)


def verify_global_consistency(world: World) -> ConsistencyReport:
    """Check financial symmetry for every issued instrument.

    Real and pure-asset instruments are reported by total outstanding only;
    they are flagged if anybody carries them as a liability.
    """
    assets: dict[str, int] = defaultdict(int)
    liabs: dict[str, int] = defaultdict(int)
    report = ConsistencyReport()
    for agent in world.agents.values():
        bs = agent.balance_sheet
        for book, acc, label in ((bs.assets, assets, "asset"), (bs.liabilities, liabs, "liability")):
            for iid, v in book.items():
                if iid not in world.instruments:
                    report.flags.append(Flag("unknown-instrument", iid, 0, v, f"{agent.id} {label}"))
                    continue
                if v < 0:
                    report.flags.append(Flag("negative-position", iid, 0, v, f"{agent.id} {label}"))
                acc[iid] += v
    for iid, inst in world.instruments.items():
        if iid not in assets and iid not in liabs:
            continue
        a, l = assets.get(iid, 0), liabs.get(iid, 0)
        report.totals[iid] = InstrumentTotal(iid, inst.liability_class, a, l)
        if inst.liability_class is LiabilityClass.ISSUED_FINANCIAL:
            if a != l:
                report.flags.append(Flag("asymmetry", iid, l, a, "sum of holdings vs sum of liabilities"))
        elif l:
            report.flags.append(Flag("liability-on-non-financial", iid, 0, l))
    return report

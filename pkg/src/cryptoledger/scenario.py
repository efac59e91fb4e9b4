"""Scenario documents: parsing, rendering and execution.

A scenario is a JSON object tree with instrument and agent declarations, an
ordered event list of ``(time, op, args)`` entries, price or policy shocks and
named checkpoints holding expected balance-sheet cells. Amounts are integer
dollars; expected cells are written in printed units and multiplied by the
checkpoint's ``scale``.
"""

from __future__ import annotations

import inspect
import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Callable, Optional

from . import chainsim, sfc, txops
from .instruments import BackingKind, BackingRule, backing_status, check_narrow_bank
from .ledger import (
    SECTORS,
    Agent,
    BalanceSheet,
    Flag,
    Instrument,
    LedgerError,
    LiabilityClass,
    Sector,
    World,
    verify_global_consistency,
)

FORMAT_VERSION = 1


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------


class ScenarioError(Exception):
    """Base class; ``location`` is a line:column or a field path."""

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class ScenarioSyntaxError(ScenarioError):
    pass


class UnknownOperation(ScenarioError):
    pass


class InconsistentInitialState(ScenarioError):
    pass


class ScenarioRunError(Exception):
    """An operation failed; carries the event index and operation name."""

    def __init__(self, index: int, op: str, label: Optional[str], cause: Exception):
        self.index, self.op, self.label, self.cause = index, op, label, cause
        tag = f" ({label})" if label else ""
        super().__init__(f"event {index} {op}{tag}: {type(cause).__name__}: {cause}")


# ---------------------------------------------------------------------------
# Data model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EventSpec:
    time: int
    op: str
    args: dict[str, Any]
    label: Optional[str] = None


@dataclass(frozen=True)
class Shock:
    time: int
    prices: dict[str, Fraction] = field(default_factory=dict)
    policy: Optional[str] = None
    set: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class AgentExpectation:
    assets: dict[str, int] = field(default_factory=dict)
    liabilities: dict[str, int] = field(default_factory=dict)
    net_worth: Optional[int] = None

    def cells(self) -> list[tuple[str, int]]:
        out = [(f"assets.{k}", v) for k, v in self.assets.items()]
        out += [(f"liabilities.{k}", v) for k, v in self.liabilities.items()]
        if self.net_worth is not None:
            out.append(("net_worth", self.net_worth))
        return out


@dataclass(frozen=True)
class ErratumSpec:
    agent: str
    cell: str
    printed: str
    note: str = ""


@dataclass(frozen=True)
class CheckpointSpec:
    name: str
    after: Optional[str]  # event label, or None for the initial state
    scale: int = 1
    expect: dict[str, AgentExpectation] = field(default_factory=dict)
    errata: tuple[ErratumSpec, ...] = ()


@dataclass
class Scenario:
    name: str
    instruments: list[Instrument]
    agents: list[Agent]
    events: list[EventSpec] = field(default_factory=list)
    shocks: list[Shock] = field(default_factory=list)
    checkpoints: list[CheckpointSpec] = field(default_factory=list)
    seed: int = 0
    scale: int = 1
    description: str = ""
    prices: dict[str, Fraction] = field(default_factory=dict)
    consortia: dict[str, txops.DtcConsortium] = field(default_factory=dict)
    vaults: dict[str, txops.VaultParams] = field(default_factory=dict)
    policies: dict[str, sfc.BehavioralPolicy] = field(default_factory=dict)
    narrow_banks: list[str] = field(default_factory=list)
    restricted_holdings: dict[str, list[str]] = field(default_factory=dict)

    def initial_world(self) -> World:
        return World.build(self.instruments, self.agents)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


@dataclass
class RunContext:
    scenario: Scenario
    seed: int
    prices: dict[str, Fraction]
    policies: dict[str, sfc.BehavioralPolicy]
    chain_runs: list["ChainRun"] = field(default_factory=list)
    sfc_records: list[sfc.StepRecord] = field(default_factory=list)

    def consortium(self, name: str) -> txops.DtcConsortium:
        try:
            return self.scenario.consortia[name]
        except KeyError:
            raise ValueError(f"unknown consortium {name!r}") from None

    def vault_params(self, name: str) -> txops.VaultParams:
        try:
            return self.scenario.vaults[name]
        except KeyError:
            raise ValueError(f"unknown vault facility {name!r}") from None

    def policy(self, name: str) -> sfc.BehavioralPolicy:
        try:
            return self.policies[name]
        except KeyError:
            raise ValueError(f"unknown policy {name!r}") from None

    def price(self, instrument: str, override=None) -> Fraction:
        if override is not None:
            return Fraction(str(override))
        return self.prices.get(instrument, Fraction(1))


@dataclass(frozen=True)
class ChainRun:
    label: str
    stats: dict[str, float]


def _simple(fn: Callable) -> Callable:
    def op(ctx: RunContext, world: World, **kw) -> World:
        return fn(world, **kw)
    op.__signature__ = _drop_world(fn)
    return op


def _drop_world(fn: Callable) -> inspect.Signature:
    sig = inspect.signature(fn)
    params = list(sig.parameters.values())[1:]
    return sig.replace(parameters=[inspect.Parameter("ctx", inspect.Parameter.POSITIONAL_ONLY),
                                   inspect.Parameter("world", inspect.Parameter.POSITIONAL_ONLY),
                                   *[p.replace(kind=inspect.Parameter.KEYWORD_ONLY) for p in params]])


def _issue_dtc(ctx: RunContext, world: World, *, buyer: str, buyer_bank: str, amt: int,
               consortium: str = "dtc") -> World:
    return txops.issue_dtc(world, ctx.consortium(consortium), buyer, buyer_bank, amt)


def _redeem_dtc(ctx: RunContext, world: World, *, holder: str, holder_bank: str, amt: int,
                consortium: str = "dtc") -> World:
    return txops.redeem_dtc(world, ctx.consortium(consortium), holder, holder_bank, amt)


def _open_vault_mint(ctx: RunContext, world: World, *, borrower: str, protocol: str,
                     collateral_amt: int, mint_amt: int, vault: str = "maker",
                     collateral_price=None) -> World:
    p = ctx.vault_params(vault)
    return txops.open_vault_mint(world, borrower, protocol, p, collateral_amt, mint_amt,
                                 collateral_price=ctx.price(p.collateral_instrument, collateral_price))


def _repay_and_release(ctx: RunContext, world: World, *, borrower: str, protocol: str,
                       repay_amt: int, fee_amt: int = 0, vault: str = "maker") -> World:
    return txops.repay_and_release(world, borrower, protocol, repay_amt, fee_amt,
                                   vault_params=ctx.vault_params(vault))


def _liquidate_vault(ctx: RunContext, world: World, *, protocol: str, owner: str,
                     vault: str = "maker", collateral_price=None) -> World:
    p = ctx.vault_params(vault)
    v = txops.vault_of(world, owner, protocol, p)
    return txops.liquidate_vault(world, protocol, v, ctx.price(p.collateral_instrument, collateral_price))


def _simulate_chain(ctx: RunContext, world: World, *, n_miners: int, hash_shares: list,
                    n_blocks: int, seed: Optional[int] = None, label: str = "chain",
                    initial_reward=50, halving_interval: int = 210_000,
                    target_block_time: float = 600.0, retarget_window: int = 2016,
                    initial_difficulty_ratio: float = 1.0, hashrate_growth: float = 0.0,
                    propagation_delay: float = 0.0, start_height: int = 0, warmup: int = 0,
                    coin: Optional[str] = None, miners: Optional[list] = None,
                    coin_value=1) -> World:
    schedule = chainsim.SupplySchedule(Fraction(str(initial_reward)), halving_interval,
                                       target_block_time)
    state = chainsim.simulate_chain(
        schedule, n_miners, hash_shares, n_blocks, ctx.seed if seed is None else seed,
        retarget_window=retarget_window, initial_difficulty_ratio=initial_difficulty_ratio,
        hashrate_growth=hashrate_growth, propagation_delay=propagation_delay,
        start_height=start_height)
    ctx.chain_runs.append(ChainRun(label, chainsim.chain_statistics(state, n_miners, warmup)))
    if coin is not None:
        if miners is None or len(miners) != n_miners:
            raise ValueError("miners must name one agent per simulated miner")
        world = chainsim.credit_block_rewards(world, state, coin, miners, Fraction(str(coin_value)))
    return world


def _sfc_step(ctx: RunContext, world: World, *, policy: str = "default", n: int = 1) -> World:
    world, records = sfc.run_steps(world, ctx.policy(policy), n)
    ctx.sfc_records.extend(records)
    return world


def _advance(ctx: RunContext, world: World, *, periods: int = 1) -> World:
    return world.advance(periods)


OPERATIONS: dict[str, Callable] = {
    name: _simple(getattr(txops, name))
    for name in (
        "pay", "transfer", "withdraw_cash", "deposit_cash", "mine_pure_asset",
        "exchange_assets", "sell_coin_to_bank", "withdraw_cbdc", "deposit_cbdc",
        "swap_reserves_for_cbdc", "swap_cbdc_for_reserves", "issue_fbsc", "redeem_fbsc",
        "issue_csc", "redeem_csc",
    )
}
OPERATIONS.update(
    issue_dtc=_issue_dtc,
    redeem_dtc=_redeem_dtc,
    open_vault_mint=_open_vault_mint,
    repay_and_release=_repay_and_release,
    liquidate_vault=_liquidate_vault,
    simulate_chain=_simulate_chain,
    sfc_step=_sfc_step,
    advance=_advance,
)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def _frac(v: Any, where: str) -> Fraction:
    try:
        return Fraction(str(v))
    except (ValueError, ZeroDivisionError):
        raise ScenarioSyntaxError(f"not a number: {v!r}", where) from None


def _frac_str(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _obj(v: Any, where: str) -> dict:
    if not isinstance(v, dict):
        raise ScenarioSyntaxError("expected an object", where)
    return v


def _list(v: Any, where: str) -> list:
    if not isinstance(v, list):
        raise ScenarioSyntaxError("expected a list", where)
    return v


def _int(v: Any, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ScenarioSyntaxError(f"expected an integer, got {v!r}", where)
    return v


def _str(v: Any, where: str) -> str:
    if not isinstance(v, str) or not v:
        raise ScenarioSyntaxError(f"expected a non-empty string, got {v!r}", where)
    return v


def _positions(v: Any, where: str) -> dict[str, int]:
    return {k: _int(x, f"{where}.{k}") for k, x in _obj(v, where).items()}


def _enum(cls, v: Any, where: str):
    try:
        return cls(v)
    except ValueError:
        choices = ", ".join(m.value for m in cls)
        raise ScenarioSyntaxError(f"{v!r} is not one of: {choices}", where) from None


def _event_line(text: str, index: int) -> Optional[int]:
    """Best-effort source line of the ``index``-th event's ``op`` key."""
    pos = text.find('"events"')
    for _ in range(index + 1):
        if pos < 0:
            return None
        pos = text.find('"op"', pos + 1)
    return text.count("\n", 0, pos) + 1 if pos >= 0 else None


def _parse_instrument(d: Any, where: str) -> Instrument:
    d = _obj(d, where)
    cls = _enum(LiabilityClass, d.get("class"), f"{where}.class")
    rule = None
    if d.get("backing") is not None:
        b = _obj(d["backing"], f"{where}.backing")
        try:
            rule = BackingRule(_enum(BackingKind, b.get("kind"), f"{where}.backing.kind"),
                               frozenset(_list(b.get("cover", []), f"{where}.backing.cover")),
                               _frac(b.get("min_ratio", 1), f"{where}.backing.min_ratio"))
        except ValueError as e:
            if isinstance(e, ScenarioError):
                raise
            raise ScenarioSyntaxError(str(e), f"{where}.backing") from None
    try:
        iid = _str(d.get("id"), f"{where}.id")
        return Instrument(iid, d.get("name", iid), cls, d.get("issuer"), rule, d.get("underlying"))
    except ValueError as e:
        if isinstance(e, ScenarioError):
            raise
        raise ScenarioSyntaxError(str(e), where) from None


def _parse_agent(d: Any, where: str) -> Agent:
    d = _obj(d, where)
    aid = _str(d.get("id"), f"{where}.id")
    sector = None
    if d.get("sector") is not None:
        sector = _enum(Sector, d["sector"], f"{where}.sector")
    for k in ("assets", "liabilities"):
        for iid, v in _positions(d.get(k, {}), f"{where}.{k}").items():
            if v < 0:
                raise ScenarioSyntaxError("positions must be non-negative", f"{where}.{k}.{iid}")
    sheet = BalanceSheet.of(_positions(d.get("assets", {}), f"{where}.assets"),
                            _positions(d.get("liabilities", {}), f"{where}.liabilities"))
    return Agent(aid, d.get("name", aid), sector, sheet)


def _parse_event(d: Any, where: str, text: str, index: int) -> EventSpec:
    d = _obj(d, where)
    op = _str(d.get("op"), f"{where}.op")
    if op not in OPERATIONS:
        line = _event_line(text, index)
        loc = f"line {line}, {where}.op" if line else f"{where}.op"
        raise UnknownOperation(f"unknown operation {op!r}", loc)
    args = _obj(d.get("args", {}), f"{where}.args")
    try:
        inspect.signature(OPERATIONS[op]).bind(None, None, **args)
    except TypeError as e:
        raise ScenarioSyntaxError(f"bad arguments for {op}: {e}", f"{where}.args") from None
    label = d.get("label")
    return EventSpec(_int(d.get("time", index), f"{where}.time"), op, args,
                     None if label is None else _str(label, f"{where}.label"))


def _parse_checkpoint(d: Any, where: str) -> CheckpointSpec:
    d = _obj(d, where)
    expect = {}
    for aid, e in _obj(d.get("expect", {}), f"{where}.expect").items():
        w = f"{where}.expect.{aid}"
        e = _obj(e, w)
        nw = e.get("net_worth")
        expect[aid] = AgentExpectation(_positions(e.get("assets", {}), f"{w}.assets"),
                                       _positions(e.get("liabilities", {}), f"{w}.liabilities"),
                                       None if nw is None else _int(nw, f"{w}.net_worth"))
    errata = []
    for i, e in enumerate(_list(d.get("errata", []), f"{where}.errata")):
        w = f"{where}.errata[{i}]"
        e = _obj(e, w)
        errata.append(ErratumSpec(_str(e.get("agent"), f"{w}.agent"), _str(e.get("cell"), f"{w}.cell"),
                                  str(e.get("printed", "")), e.get("note", "")))
    after = d.get("after")
    return CheckpointSpec(_str(d.get("name"), f"{where}.name"),
                          None if after is None else _str(after, f"{where}.after"),
                          _int(d.get("scale", 1), f"{where}.scale"), expect, tuple(errata))


def _parse_shock(d: Any, where: str) -> Shock:
    d = _obj(d, where)
    prices = {k: _frac(v, f"{where}.prices.{k}")
              for k, v in _obj(d.get("prices", {}), f"{where}.prices").items()}
    return Shock(_int(d.get("time"), f"{where}.time"), prices, d.get("policy"),
                 dict(_obj(d.get("set", {}), f"{where}.set")))


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a scenario document.

    Raises :class:`ScenarioSyntaxError`, :class:`UnknownOperation` or
    :class:`InconsistentInitialState`, each carrying a location.
    """
    if not text.strip():
        raise ScenarioSyntaxError("empty document", "line 1")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioSyntaxError(e.msg, f"line {e.lineno}, column {e.colno}") from None
    doc = _obj(doc, "$")
    name = _str(doc.get("name"), "name")
    instruments = [_parse_instrument(d, f"instruments[{i}]")
                   for i, d in enumerate(_list(doc.get("instruments", []), "instruments"))]
    agents = [_parse_agent(d, f"agents[{i}]")
              for i, d in enumerate(_list(doc.get("agents", []), "agents"))]
    fac = _obj(doc.get("facilities", {}), "facilities")
    consortia = {}
    for k, v in _obj(fac.get("consortia", {}), "facilities.consortia").items():
        try:
            consortia[k] = txops.DtcConsortium(**_obj(v, f"facilities.consortia.{k}"))
        except TypeError as e:
            raise ScenarioSyntaxError(str(e), f"facilities.consortia.{k}") from None
    vaults = {}
    for k, v in _obj(fac.get("vaults", {}), "facilities.vaults").items():
        v = dict(_obj(v, f"facilities.vaults.{k}"))
        if "min_ratio" in v:
            v["min_ratio"] = _frac(v["min_ratio"], f"facilities.vaults.{k}.min_ratio")
        try:
            vaults[k] = txops.VaultParams(**v)
        except (TypeError, ValueError) as e:
            raise ScenarioSyntaxError(str(e), f"facilities.vaults.{k}") from None
    policies = {}
    for k, v in _obj(fac.get("policies", {}), "facilities.policies").items():
        try:
            pol = sfc.BehavioralPolicy.from_dict(_obj(v, f"facilities.policies.{k}"))
            pol.validate()
        except (TypeError, ValueError) as e:
            raise ScenarioSyntaxError(str(e), f"facilities.policies.{k}") from None
        policies[k] = pol
    config = _obj(doc.get("config", {}), "config")
    restricted = {k: list(_list(v, f"config.restricted_holdings.{k}")) for k, v in
                  _obj(config.get("restricted_holdings", {}), "config.restricted_holdings").items()}
    for k in restricted:
        _enum(Sector, k, f"config.restricted_holdings.{k}")
    text_events = _list(doc.get("events", []), "events")
    sc = Scenario(
        name=name,
        instruments=instruments,
        agents=agents,
        events=[_parse_event(d, f"events[{i}]", text, i) for i, d in enumerate(text_events)],
        shocks=[_parse_shock(d, f"shocks[{i}]") for i, d in enumerate(_list(doc.get("shocks", []), "shocks"))],
        checkpoints=[_parse_checkpoint(d, f"checkpoints[{i}]")
                     for i, d in enumerate(_list(doc.get("checkpoints", []), "checkpoints"))],
        seed=_int(doc.get("seed", 0), "seed"),
        scale=_int(doc.get("scale", 1), "scale"),
        description=doc.get("description", ""),
        prices={k: _frac(v, f"prices.{k}") for k, v in _obj(doc.get("prices", {}), "prices").items()},
        consortia=consortia,
        vaults=vaults,
        policies=policies,
        narrow_banks=list(_list(config.get("narrow_banks", []), "config.narrow_banks")),
        restricted_holdings=restricted,
    )
    _validate_references(sc)
    return sc


def _validate_references(sc: Scenario) -> None:
    labels = [e.label for e in sc.events if e.label]
    dup = {l for l in labels if labels.count(l) > 1}
    if dup:
        raise ScenarioSyntaxError(f"duplicate event labels {sorted(dup)}", "events")
    for i, cp in enumerate(sc.checkpoints):
        if cp.after is not None and cp.after not in labels:
            raise ScenarioSyntaxError(f"no event labelled {cp.after!r}", f"checkpoints[{i}].after")
    try:
        world = sc.initial_world()
    except (LedgerError, ValueError) as e:
        raise InconsistentInitialState(str(e), "agents") from None
    report = verify_global_consistency(world)
    if not report.ok:
        raise InconsistentInitialState("; ".join(report.flagged()), "agents")
    for bank in sc.narrow_banks:
        if bank not in world.agents:
            raise ScenarioSyntaxError(f"unknown agent {bank!r}", "config.narrow_banks")


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def _render_instrument(inst: Instrument) -> dict:
    d: dict[str, Any] = {"id": inst.id, "name": inst.name, "class": inst.liability_class.value}
    if inst.issuer:
        d["issuer"] = inst.issuer
    if inst.underlying:
        d["underlying"] = inst.underlying
    if inst.backing_rule is not None:
        r = inst.backing_rule
        d["backing"] = {"kind": r.kind.value, "cover": sorted(r.cover_instruments),
                        "min_ratio": _frac_str(r.min_ratio)}
    return d


def _render_agent(a: Agent) -> dict:
    d: dict[str, Any] = {"id": a.id, "name": a.name,
                         "sector": a.sector.value if a.sector else None}
    if a.balance_sheet.assets:
        d["assets"] = dict(a.balance_sheet.assets)
    if a.balance_sheet.liabilities:
        d["liabilities"] = dict(a.balance_sheet.liabilities)
    return d


def _render_checkpoint(cp: CheckpointSpec) -> dict:
    d: dict[str, Any] = {"name": cp.name, "after": cp.after, "scale": cp.scale, "expect": {}}
    for aid, e in cp.expect.items():
        x: dict[str, Any] = {}
        if e.assets:
            x["assets"] = dict(e.assets)
        if e.liabilities:
            x["liabilities"] = dict(e.liabilities)
        if e.net_worth is not None:
            x["net_worth"] = e.net_worth
        d["expect"][aid] = x
    if cp.errata:
        d["errata"] = [{"agent": e.agent, "cell": e.cell, "printed": e.printed, "note": e.note}
                       for e in cp.errata]
    return d


def scenario_to_dict(sc: Scenario) -> dict:
    d: dict[str, Any] = {
        "format": FORMAT_VERSION,
        "name": sc.name,
        "description": sc.description,
        "seed": sc.seed,
        "scale": sc.scale,
        "instruments": [_render_instrument(i) for i in sc.instruments],
        "agents": [_render_agent(a) for a in sc.agents],
    }
    if sc.prices:
        d["prices"] = {k: _frac_str(v) for k, v in sc.prices.items()}
    fac: dict[str, Any] = {}
    if sc.consortia:
        fac["consortia"] = {k: vars(c).copy() for k, c in sc.consortia.items()}
    if sc.vaults:
        fac["vaults"] = {k: {**vars(v), "min_ratio": _frac_str(v.min_ratio)} for k, v in sc.vaults.items()}
    if sc.policies:
        fac["policies"] = {k: p.to_dict() for k, p in sc.policies.items()}
    if fac:
        d["facilities"] = fac
    config: dict[str, Any] = {}
    if sc.narrow_banks:
        config["narrow_banks"] = list(sc.narrow_banks)
    if sc.restricted_holdings:
        config["restricted_holdings"] = {k: list(v) for k, v in sc.restricted_holdings.items()}
    if config:
        d["config"] = config
    d["events"] = [{"time": e.time, "op": e.op, "args": e.args,
                    **({"label": e.label} if e.label else {})} for e in sc.events]
    if sc.shocks:
        d["shocks"] = [{"time": s.time, **({"prices": {k: _frac_str(v) for k, v in s.prices.items()}}
                                           if s.prices else {}),
                        **({"policy": s.policy, "set": s.set} if s.policy else {})}
                       for s in sc.shocks]
    d["checkpoints"] = [_render_checkpoint(c) for c in sc.checkpoints]
    return d


def render_scenario(sc: Scenario) -> str:
    return json.dumps(scenario_to_dict(sc), indent=2) + "\n"


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RunOptions:
    seed: Optional[int] = None
    check_invariants: bool = False


@dataclass(frozen=True)
class Snapshot:
    name: str
    event_index: int  # -1 for the initial state
    world: World


@dataclass(frozen=True)
class CellCheck:
    checkpoint: str
    agent: str
    cell: str
    expected: int
    actual: int

    @property
    def ok(self) -> bool:
        return self.expected == self.actual


@dataclass(frozen=True)
class Erratum:
    checkpoint: str
    agent: str
    cell: str
    printed: str
    computed: int
    scale: int
    note: str

    def __str__(self) -> str:
        shown = f"{self.computed // self.scale:,}" if self.computed % self.scale == 0 else str(self.computed)
        return (f"{self.checkpoint} {self.agent} {self.cell}: printed {self.printed}, "
                f"computed {shown}" + (f" ({self.note})" if self.note else ""))


@dataclass(frozen=True)
class EventFlag:
    event_index: int
    op: str
    flag: Flag

    def __str__(self) -> str:
        return f"event {self.event_index} {self.op}: {self.flag}"


@dataclass
class RunReport:
    scenario: str
    seed: int
    snapshots: list[Snapshot] = field(default_factory=list)
    checks: list[CellCheck] = field(default_factory=list)
    errata: list[Erratum] = field(default_factory=list)
    flags: list[EventFlag] = field(default_factory=list)
    chain_runs: list[ChainRun] = field(default_factory=list)
    sfc_records: list[sfc.StepRecord] = field(default_factory=list)
    checkpoint_names: list[str] = field(default_factory=list)
    views: dict[str, tuple[int, list[str]]] = field(default_factory=dict)
    final: Optional[World] = None

    @property
    def mismatches(self) -> list[CellCheck]:
        return [c for c in self.checks if not c.ok]

    @property
    def ok(self) -> bool:
        return not self.flags and not self.mismatches

    def series_snapshots(self) -> list[Snapshot]:
        """Declared checkpoints if any, otherwise every recorded snapshot."""
        if self.checkpoint_names:
            names = set(self.checkpoint_names)
            return [s for s in self.snapshots if s.name in names]
        return list(self.snapshots)

    def snapshot(self, name: str) -> Snapshot:
        for s in self.snapshots:
            if s.name == name:
                return s
        raise KeyError(name)

    def to_dict(self) -> dict:
        def sheets(w: World) -> dict:
            return {a.id: {"assets": dict(sorted(a.balance_sheet.assets.items())),
                           "liabilities": dict(sorted(a.balance_sheet.liabilities.items())),
                           "net_worth": a.balance_sheet.net_worth}
                    for a in w.agents.values()}
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "snapshots": [{"name": s.name, "event_index": s.event_index, "clock": s.world.clock,
                           "balance_sheets": sheets(s.world)} for s in self.snapshots],
            "checks": [{"checkpoint": c.checkpoint, "agent": c.agent, "cell": c.cell,
                        "expected": c.expected, "actual": c.actual, "ok": c.ok} for c in self.checks],
            "errata": [{"checkpoint": e.checkpoint, "agent": e.agent, "cell": e.cell,
                        "printed": e.printed, "computed": e.computed, "note": e.note}
                       for e in self.errata],
            "flags": [{"event_index": f.event_index, "op": f.op, "kind": f.flag.kind,
                       "subject": f.flag.subject, "expected": f.flag.expected,
                       "actual": f.flag.actual, "detail": f.flag.detail} for f in self.flags],
            "chain_runs": [{"label": c.label, "stats": c.stats} for c in self.chain_runs],
            "sfc": [{"period": r.period, "flags": len(r.report.flags),
                     "flows": {f"{k[0]}|{k[1].value}": v for k, v in sorted(
                         r.flow.cells.items(), key=lambda kv: (kv[0][0], kv[0][1].value)) if v}}
                    for r in self.sfc_records],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=str) + "\n"


def cell_value(world: World, agent: str, cell: str) -> int:
    bs = world.sheet(agent)
    if cell == "net_worth":
        return bs.net_worth
    side, _, iid = cell.partition(".")
    if side == "assets":
        return bs.asset(iid)
    if side == "liabilities":
        return bs.liability(iid)
    raise ValueError(f"bad cell reference {cell!r}")


def invariant_flags(world: World, sc: Scenario, prices: dict[str, Fraction]) -> list[Flag]:
    """Every invariant suite that applies to a ledger-only world."""
    flags = list(verify_global_consistency(world).flags)
    for inst in world.instruments.values():
        rule = inst.backing_rule
        if rule is None or rule.kind is BackingKind.NONE:
            continue
        st = backing_status(world, inst, prices)
        if not st.satisfied:
            flags.append(Flag("backing", inst.id, math.ceil(st.required), st.cover_value,
                              rule.kind.value))
    for bank in sc.narrow_banks:
        st = check_narrow_bank(world, bank)
        if not st.satisfied:
            flags.append(Flag("narrow-bank", bank, st.outstanding, st.cover_value,
                              "reserves below deposits plus reserve-backed coins"))
    for sector, allowed in sc.restricted_holdings.items():
        flags.extend(sfc.restricted_holdings(world, Sector(sector), allowed).flags)
    return flags


def _record_checkpoint(report: RunReport, cp: CheckpointSpec, world: World) -> None:
    errata = {(e.agent, e.cell): e for e in cp.errata}
    for aid, exp in cp.expect.items():
        for cell, printed in exp.cells():
            report.checks.append(CellCheck(cp.name, aid, cell, printed * cp.scale,
                                           cell_value(world, aid, cell)))
    for (aid, cell), e in errata.items():
        report.errata.append(Erratum(cp.name, aid, cell, e.printed, cell_value(world, aid, cell),
                                     cp.scale, e.note))


def run_scenario(sc: Scenario, options: RunOptions = RunOptions()) -> RunReport:
    seed = sc.seed if options.seed is None else options.seed
    ctx = RunContext(sc, seed, dict(sc.prices), dict(sc.policies))
    report = RunReport(sc.name, seed, checkpoint_names=[c.name for c in sc.checkpoints],
                       views={c.name: (c.scale, list(c.expect)) for c in sc.checkpoints})
    world = sc.initial_world()
    by_after: dict[Optional[str], list[CheckpointSpec]] = {}
    for cp in sc.checkpoints:
        by_after.setdefault(cp.after, []).append(cp)

    def snap(name: str, idx: int, w: World) -> None:
        report.snapshots.append(Snapshot(name, idx, w))

    snap("initial", -1, world)
    for cp in by_after.get(None, []):
        _record_checkpoint(report, cp, world)
        snap(cp.name, -1, world)
    if options.check_invariants:
        report.flags += [EventFlag(-1, "initial", f) for f in invariant_flags(world, sc, ctx.prices)]

    events = sorted(enumerate(sc.events), key=lambda ie: (ie[1].time, ie[0]))
    shocks = sorted(sc.shocks, key=lambda s: s.time)
    next_shock = 0
    for idx, ev in events:
        n_sfc = len(ctx.sfc_records)
        try:
            while next_shock < len(shocks) and shocks[next_shock].time <= ev.time:
                _apply_shock(ctx, shocks[next_shock])
                next_shock += 1
            world = OPERATIONS[ev.op](ctx, world, **ev.args)
        except (LedgerError, ValueError, chainsim.InvalidShares) as e:
            raise ScenarioRunError(idx, ev.op, ev.label, e) from e
        if options.check_invariants:
            report.flags += [EventFlag(idx, ev.op, f) for f in invariant_flags(world, sc, ctx.prices)]
            for rec in ctx.sfc_records[n_sfc:]:
                report.flags += [EventFlag(idx, ev.op, f) for f in rec.report.flags]
        for cp in by_after.get(ev.label, []) if ev.label else []:
            _record_checkpoint(report, cp, world)
            snap(cp.name, idx, world)
    if sc.events and not sc.checkpoints:
        snap("final", len(sc.events) - 1, world)
    report.chain_runs = list(ctx.chain_runs)
    report.sfc_records = list(ctx.sfc_records)
    report.final = world
    return report


def _apply_shock(ctx: RunContext, shock: Shock) -> None:
    ctx.prices.update(shock.prices)
    if shock.policy is not None:
        try:
            pol = replace(ctx.policy(shock.policy), **shock.set)
            pol.validate()
        except TypeError as e:
            raise ValueError(f"bad policy shock: {e}") from None
        ctx.policies[shock.policy] = pol


def sector_names() -> list[str]:
    return [s.value for s in SECTORS]

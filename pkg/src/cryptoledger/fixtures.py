"""Built-in scenarios.

``tables-all`` replays the worked balance-sheet examples in order: mining,
a bitcoin-for-artwork swap, a sale of bitcoin to a bank, a CBDC withdrawal,
the purchase of fiat-backed, custodial and trade coins, and a Dai vault.
Individuals are recorded in dollars, institutions in thousands of dollars.

The printed tables show only the agents involved. Everything they owe to or
hold against the rest of the economy is closed here by out-of-frame agents
(other clients of each bank, lenders, coin holders, the treasury) so that the
starting world is fully double-entry consistent. ``table1`` ... ``table8``
start from the state just before the corresponding table and contain only
its own events.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from dataclasses import replace
from functools import lru_cache
from typing import Optional

from . import sfc, txops
from .instruments import CASH, CBDC, RESERVES, BackingKind, BackingRule, deposits_of, loans_of, savings_of
from .ledger import Agent, BalanceSheet, Instrument, LiabilityClass, Sector, World
from .scenario import (
    AgentExpectation,
    CheckpointSpec,
    ErratumSpec,
    EventSpec,
    OPERATIONS,
    RunContext,
    Scenario,
    parse_scenario,
    render_scenario,
)

K = 1000
R, P, IF = LiabilityClass.REAL, LiabilityClass.PURE_ASSET_COIN, LiabilityClass.ISSUED_FINANCIAL

NB, BANK, CB = "narrow_bank", "bank", "central_bank"
NBD, NBS, NBL = deposits_of(NB), savings_of(NB), loans_of(NB)
BD, BS, BL = deposits_of(BANK), savings_of(BANK), loans_of(BANK)

CONSORTIUM = txops.DtcConsortium("administrator", "sponsors", NB)
MAKER = txops.VaultParams()


def table_instruments() -> list[Instrument]:
    return [
        Instrument("house", "house", R),
        Instrument("car", "car", R),
        Instrument("artwork", "artwork", R),
        Instrument("other_assets", "other assets", R),
        Instrument("basket", "basket of assets", R),
        Instrument("bitcoin", "bitcoin", P),
        Instrument("ethereum", "ethereum", P),
        Instrument("vault", "vault", P, underlying="ethereum"),
        Instrument(NBL, "loans", IF, NB),
        Instrument(BL, "loans", IF, BANK),
        Instrument("treasuries", "treasuries", IF, "treasury"),
        Instrument(RESERVES, "reserves", IF, CB),
        Instrument(CASH, "cash", IF, CB),
        Instrument(CBDC, "CBDC", IF, CB),
        Instrument(NBD, "deposits", IF, NB),
        Instrument(NBS, "savings", IF, NB),
        Instrument(BD, "deposits", IF, BANK),
        Instrument(BS, "savings", IF, BANK),
        Instrument("bank.bonds", "bonds", IF, BANK),
        Instrument("mortgage", "mortgage", IF, "lenders"),
        Instrument("car_loan", "car loan", IF, "lenders"),
        Instrument("credit_card", "credit card", IF, "lenders"),
        Instrument(loans_of("lenders"), "loans", IF, "lenders"),
        Instrument("fbsc", "FBSC", IF, NB,
                   BackingRule(BackingKind.RESERVE_COVER, frozenset({RESERVES}))),
        Instrument("csc", "CSC", IF, "custodian",
                   BackingRule(BackingKind.DEPOSIT_COVER, frozenset({NBD}))),
        Instrument("dtc", "DTC", IF, "administrator",
                   BackingRule(BackingKind.BASKET_COVER, frozenset({"basket"}))),
        Instrument("dai", "dai", IF, "makerdao",
                   BackingRule(BackingKind.CRYPTO_OVER_COLLATERAL, frozenset({"vault"}),
                               txops.DEFAULT_MIN_RATIO)),
        Instrument("dai_loans", "dai loans", IF, "makerdao"),
    ]


def _k(d: dict[str, int]) -> dict[str, int]:
    return {k: v * K for k, v in d.items()}


# (sector, assets, liabilities) in dollars, in-frame agents first.
_IN_FRAME: dict[str, tuple[Sector, dict[str, int], dict[str, int]]] = {
    "alice": (Sector.HOUSEHOLDS,
              {"house": 750_000, "car": 30_000, NBD: 10_500, NBS: 28_000, "bitcoin": 1_000},
              {"mortgage": 500_000, "car_loan": 20_000, "credit_card": 1_500}),
    "bob": (Sector.HOUSEHOLDS,
            {"house": 1_200_000, "artwork": 80_000, BD: 10_000, BS: 150_000},
            {"mortgage": 200_000, BL: 40_000, "credit_card": 500}),
    BANK: (Sector.BANKS,
           _k({BL: 9_000_000, "treasuries": 3_000_000, RESERVES: 300_000, CASH: 200_000,
               "bitcoin": 400_000}),
           _k({BD: 8_000_000, BS: 2_000_000, "bank.bonds": 1_000_000})),
    NB: (Sector.BANKS,
         _k({NBL: 2_500_000, RESERVES: 11_000_000, CASH: 100_000, CBDC: 150_000}),
         _k({NBS: 2_500_000, NBD: 10_000_000, "fbsc": 1_000_000})),
    CB: (Sector.CENTRAL_BANK,
         _k({"treasuries": 390_000_000}),
         _k({RESERVES: 180_000_000, CASH: 100_000_000, CBDC: 60_000_000})),
    "custodian": (Sector.OTHER_FINANCIAL, _k({NBD: 310_000}), _k({"csc": 300_000})),
    "administrator": (Sector.FIRMS, _k({"basket": 450_000}), _k({"dtc": 450_000})),
    "sponsors": (Sector.FIRMS, _k({"basket": 50_000, NBD: 450_000}),
                 _k({loans_of("lenders"): 400_000})),
    "makerdao": (Sector.OTHER_FINANCIAL, _k({"dai_loans": 6_000_000, "other_assets": 2_000_000}),
                 _k({"dai": 6_000_000})),
}

# Out-of-frame agents and, for each issued instrument, who takes up the slack.
_OUT_OF_FRAME: dict[str, tuple[Sector, dict[str, int]]] = {
    "power_company": (Sector.FIRMS, {}),
    "nb_clients": (Sector.HOUSEHOLDS, {}),
    "bank_clients": (Sector.HOUSEHOLDS, {}),
    "coin_holders": (Sector.HOUSEHOLDS, {"ethereum": 1_000_000, "vault": 10_000_000 * K}),
    "other_institutions": (Sector.OTHER_FINANCIAL, {}),
    "lenders": (Sector.OTHER_FINANCIAL, {}),
    "treasury": (Sector.TREASURY, {}),
}
_SLACK = {
    NBD: "nb_clients", NBS: "nb_clients", NBL: "nb_clients",
    BD: "bank_clients", BS: "bank_clients", BL: "bank_clients", "bank.bonds": "bank_clients",
    CASH: "bank_clients", RESERVES: "other_institutions", CBDC: "coin_holders",
    "treasuries": "treasury", "mortgage": "lenders", "car_loan": "lenders",
    "credit_card": "lenders", loans_of("lenders"): "lenders",
    "fbsc": "coin_holders", "csc": "coin_holders", "dtc": "coin_holders",
    "dai": "coin_holders", "dai_loans": "coin_holders",
}


def close_books(sheets: dict[str, tuple[Sector, dict[str, int], dict[str, int]]],
                instruments: list[Instrument], slack: dict[str, str]) -> None:
    """Give each issued instrument's missing counterpart to its slack agent, in place."""
    for inst in instruments:
        if inst.liability_class is not IF:
            continue
        a = sum(s[1].get(inst.id, 0) for s in sheets.values())
        l = sum(s[2].get(inst.id, 0) for s in sheets.values())
        if a == l:
            continue
        _, assets, liabs = sheets[slack[inst.id]]
        book = assets if a < l else liabs
        book[inst.id] = book.get(inst.id, 0) + abs(l - a)


def tables_world() -> World:
    """Every agent of the worked examples before the first one, books closed."""
    instruments = table_instruments()
    sheets = {aid: (sec, dict(a), dict(l)) for aid, (sec, a, l) in _IN_FRAME.items()}
    for aid, (sec, a) in _OUT_OF_FRAME.items():
        sheets[aid] = (sec, dict(a), {})
    close_books(sheets, instruments, _SLACK)
    agents = [Agent(aid, aid.replace("_", " "), sec, BalanceSheet.of(a, l))
              for aid, (sec, a, l) in sheets.items()]
    return World.build(instruments, agents)


# ---------------------------------------------------------------------------
# Events and printed expectations
# ---------------------------------------------------------------------------

# (table number or None for a preparatory event, event)
TABLE_EVENTS: list[tuple[Optional[int], EventSpec]] = [
    (1, EventSpec(0, "mine_pure_asset",
                  {"miner": "alice", "coin": "bitcoin", "gross": 10_000, "cost": 9_000,
                   "bank": NB, "payee": "power_company"}, "mine")),
    (2, EventSpec(1, "exchange_assets",
                  {"buyer": "alice", "seller": "bob", "pay_instr": "bitcoin", "pay_amt": 8_000,
                   "recv_instr": "artwork", "recv_amt": 8_000}, "buy-artwork")),
    (3, EventSpec(2, "sell_coin_to_bank",
                  {"seller": "bob", "bank": BANK, "coin": "bitcoin", "amt": 7_000}, "sell-bitcoin")),
    (4, EventSpec(3, "withdraw_cbdc",
                  {"client": "bob", "bank": BANK, "central_bank": CB, "amt": 6_000}, "buy-cbdc")),
    # reconciles the bank's reserves between the CBDC and CSC tables
    (None, EventSpec(4, "swap_reserves_for_cbdc",
                  {"bank": BANK, "central_bank": CB, "amt": 149_994 * K}, "bank-swaps-reserves")),
    (5, EventSpec(5, "issue_fbsc", {"client": "alice", "narrow_bank": NB, "amt": 1_000}, "buy-fbsc")),
    (6, EventSpec(6, "issue_csc",
                  {"client": "bob", "client_bank": BANK, "custodian": "custodian",
                   "narrow_bank": NB, "amt": 2_000}, "buy-csc")),
    (7, EventSpec(7, "issue_dtc",
                  {"buyer": "bob", "buyer_bank": BANK, "amt": 5_000, "consortium": "dtc"}, "buy-dtc")),
    # Alice swaps savings for ether before opening her vault
    (None, EventSpec(8, "exchange_assets",
                  {"buyer": "alice", "seller": "coin_holders", "pay_instr": NBS, "pay_amt": 10_000,
                   "recv_instr": "ethereum", "recv_amt": 10_000}, "buy-ether")),
    (8, EventSpec(9, "open_vault_mint",
                  {"borrower": "alice", "protocol": "makerdao", "collateral_amt": 5_000,
                   "mint_amt": 3_000, "vault": "maker"}, "mint-dai")),
]

# Balance sheets of the individuals, one dict per printed state.
_ALICE_0 = dict(assets={"house": 750_000, "car": 30_000, NBD: 10_500, NBS: 28_000, "bitcoin": 1_000},
                liabilities={"mortgage": 500_000, "car_loan": 20_000, "credit_card": 1_500},
                net_worth=298_000)
_ALICE_1 = dict(assets={"house": 750_000, "car": 30_000, NBD: 1_500, NBS: 28_000, "bitcoin": 11_000},
                liabilities={"mortgage": 500_000, "car_loan": 20_000, "credit_card": 1_500},
                net_worth=299_000)
_ALICE_2B = dict(_ALICE_1, assets={**_ALICE_1["assets"], "artwork": 0})
_ALICE_2 = dict(_ALICE_1, assets={**_ALICE_1["assets"], "bitcoin": 3_000, "artwork": 8_000})
_ALICE_5B = dict(_ALICE_2, assets={**_ALICE_2["assets"], "fbsc": 0})
_ALICE_5 = dict(_ALICE_2, assets={**_ALICE_2["assets"], NBD: 500, "fbsc": 1_000})
_ALICE_8B = dict(assets={**_ALICE_5["assets"], NBS: 18_000, "ethereum": 10_000, "vault": 0, "dai": 0},
                 liabilities={**_ALICE_5["liabilities"], "dai_loans": 0}, net_worth=299_000)
_ALICE_8 = dict(assets={**_ALICE_8B["assets"], "ethereum": 5_000, "vault": 5_000, "dai": 3_000},
                liabilities={**_ALICE_8B["liabilities"], "dai_loans": 3_000}, net_worth=299_000)

_BOB_L = {"mortgage": 200_000, BL: 40_000, "credit_card": 500}
_BOB_2B = dict(assets={"house": 1_200_000, "artwork": 80_000, BD: 10_000, BS: 150_000, "bitcoin": 0},
               liabilities=_BOB_L, net_worth=1_199_500)
_BOB_2 = dict(_BOB_2B, assets={**_BOB_2B["assets"], "artwork": 72_000, "bitcoin": 8_000})
_BOB_3 = dict(_BOB_2, assets={**_BOB_2["assets"], BD: 17_000, "bitcoin": 1_000})
_BOB_4B = dict(_BOB_3, assets={**_BOB_3["assets"], CBDC: 0})
_BOB_4 = dict(_BOB_3, assets={**_BOB_3["assets"], BD: 11_000, CBDC: 6_000})
_BOB_6B = dict(_BOB_4, assets={**_BOB_4["assets"], "csc": 0})
_BOB_6 = dict(_BOB_4, assets={**_BOB_4["assets"], BD: 9_000, "csc": 2_000})
_BOB_7B = dict(_BOB_6, assets={**_BOB_6["assets"], "dtc": 0})
_BOB_7 = dict(_BOB_6, assets={**_BOB_6["assets"], BD: 4_000, "dtc": 5_000})

# Institutions, thousands of dollars.
_BANK_L = {BS: 2_000_000, "bank.bonds": 1_000_000}
_BANK_3B = dict(assets={BL: 9_000_000, "treasuries": 3_000_000, RESERVES: 300_000, CASH: 200_000,
                        "bitcoin": 400_000},
                liabilities={BD: 8_000_000, **_BANK_L}, net_worth=1_900_000)
_BANK_3 = dict(_BANK_3B, assets={**_BANK_3B["assets"], "bitcoin": 400_007},
               liabilities={BD: 8_000_007, **_BANK_L})
_BANK_4 = dict(_BANK_3, assets={**_BANK_3["assets"], RESERVES: 299_994},
               liabilities={BD: 8_000_001, **_BANK_L})
_BANK_6B = dict(_BANK_4, assets={**_BANK_4["assets"], RESERVES: 150_000, CBDC: 149_994})
_BANK_6 = dict(_BANK_6B, assets={**_BANK_6B["assets"], RESERVES: 149_998},
               liabilities={BD: 7_999_999, **_BANK_L})
_BANK_7 = dict(_BANK_6, assets={**_BANK_6["assets"], RESERVES: 149_993},
               liabilities={BD: 7_999_994, **_BANK_L})

_CB_4B = dict(assets={"treasuries": 390_000_000},
              liabilities={RESERVES: 180_000_000, CASH: 100_000_000, CBDC: 60_000_000},
              net_worth=50_000_000)
_CB_4 = dict(_CB_4B, liabilities={RESERVES: 179_999_994, CASH: 100_000_000, CBDC: 60_000_006})

_NB_A = {NBL: 2_500_000, RESERVES: 11_000_000, CASH: 100_000, CBDC: 150_000}
_NB_5B = dict(assets=_NB_A, liabilities={NBS: 2_500_000, NBD: 10_000_000, "fbsc": 1_000_000},
              net_worth=250_000)
_NB_5 = dict(_NB_5B, liabilities={NBS: 2_500_000, NBD: 9_999_999, "fbsc": 1_000_001})
_NB_6 = dict(assets={**_NB_A, RESERVES: 11_000_002},
             liabilities={NBS: 2_500_000, NBD: 10_000_001, "fbsc": 1_000_001}, net_worth=250_000)
_NB_7 = dict(assets={**_NB_A, RESERVES: 11_000_007},
             liabilities={NBS: 2_500_000, NBD: 10_000_006, "fbsc": 1_000_001}, net_worth=250_000)

_CUST_6B = dict(assets={NBD: 310_000}, liabilities={"csc": 300_000}, net_worth=10_000)
_CUST_6 = dict(assets={NBD: 310_002}, liabilities={"csc": 300_002}, net_worth=10_000)
_ADMIN_7B = dict(assets={"basket": 450_000}, liabilities={"dtc": 450_000}, net_worth=0)
_ADMIN_7 = dict(assets={"basket": 450_005}, liabilities={"dtc": 450_005}, net_worth=0)
_SPON_7B = dict(assets={"basket": 50_000, NBD: 450_000}, liabilities={loans_of("lenders"): 400_000},
                net_worth=100_000)
_SPON_7 = dict(assets={"basket": 49_995, NBD: 450_005}, liabilities={loans_of("lenders"): 400_000},
               net_worth=100_000)
_MAKER_8B = dict(assets={"dai_loans": 6_000_000, "other_assets": 2_000_000},
                 liabilities={"dai": 6_000_000}, net_worth=2_000_000)
_MAKER_8 = dict(assets={"dai_loans": 6_000_003, "other_assets": 2_000_000},
                liabilities={"dai": 6_000_003}, net_worth=2_000_000)

_NW_TYPO = "printed 1,191,500 where the rows add up to 1,199,500"
_BOB_TYPO = ErratumSpec("bob", "net_worth", "1,191,500", _NW_TYPO)

# table -> (event label the "before" state follows, individuals, institutions, errata)
_TABLES: dict[int, dict] = {
    1: dict(before={"alice": _ALICE_0}, after={"alice": _ALICE_1}, after_label="mine"),
    2: dict(before={"alice": _ALICE_2B, "bob": _BOB_2B}, after={"alice": _ALICE_2, "bob": _BOB_2},
            after_label="buy-artwork"),
    3: dict(before={"bob": _BOB_2}, before_k={BANK: _BANK_3B},
            after={"bob": _BOB_3}, after_k={BANK: _BANK_3}, after_label="sell-bitcoin"),
    4: dict(before={"bob": _BOB_4B}, before_k={BANK: _BANK_3, CB: _CB_4B},
            after={"bob": _BOB_4}, after_k={BANK: _BANK_4, CB: _CB_4}, after_label="buy-cbdc",
            before_errata=[_BOB_TYPO], after_errata=[_BOB_TYPO]),
    5: dict(before={"alice": _ALICE_5B}, before_k={NB: _NB_5B},
            after={"alice": _ALICE_5}, after_k={NB: _NB_5}, after_label="buy-fbsc",
            before_errata_k=[ErratumSpec(NB, f"liabilities.{NBD}", "10,000,00",
                                         "a digit is missing; the balance sheet needs 10,000,000")]),
    6: dict(before={"bob": _BOB_6B}, before_k={"custodian": _CUST_6B, BANK: _BANK_6B, NB: _NB_5},
            after={"bob": _BOB_6}, after_k={"custodian": _CUST_6, BANK: _BANK_6, NB: _NB_6},
            after_label="buy-csc"),
    7: dict(before={"bob": _BOB_7B},
            before_k={"administrator": _ADMIN_7B, "sponsors": _SPON_7B, BANK: _BANK_6, NB: _NB_6},
            after={"bob": _BOB_7},
            after_k={"administrator": _ADMIN_7, "sponsors": _SPON_7, BANK: _BANK_7, NB: _NB_7},
            after_label="buy-dtc", after_errata=[_BOB_TYPO]),
    8: dict(before={"alice": _ALICE_8B}, before_k={"makerdao": _MAKER_8B},
            after={"alice": _ALICE_8}, after_k={"makerdao": _MAKER_8}, after_label="mint-dai"),
}


def _expect(d: dict[str, dict]) -> dict[str, AgentExpectation]:
    return {aid: AgentExpectation(dict(e["assets"]), dict(e["liabilities"]), e["net_worth"])
            for aid, e in d.items()}


def table_checkpoints(n: int, before_after: Optional[str]) -> list[CheckpointSpec]:
    """Printed before/after states of table ``n`` (one checkpoint per unit scale)."""
    t = _TABLES[n]
    out = []
    for phase, after in (("before", before_after), ("after", t["after_label"])):
        out.append(CheckpointSpec(f"table{n}.{phase}", after, 1, _expect(t[phase]),
                                  tuple(t.get(f"{phase}_errata", ()))))
        if t.get(f"{phase}_k"):
            out.append(CheckpointSpec(f"table{n}.{phase}.k", after, K, _expect(t[f"{phase}_k"]),
                                      tuple(t.get(f"{phase}_errata_k", ()))))
    return out


def _base(name: str, description: str, world: World, events: list[EventSpec],
          checkpoints: list[CheckpointSpec]) -> Scenario:
    return Scenario(
        name=name,
        description=description,
        instruments=list(world.instruments.values()),
        agents=list(world.agents.values()),
        events=events,
        checkpoints=checkpoints,
        seed=0,
        scale=K,
        prices={"ethereum": Fraction(1)},
        consortia={"dtc": CONSORTIUM},
        vaults={"maker": MAKER},
        narrow_banks=[NB],
    )


def tables_all() -> Scenario:
    checkpoints: list[CheckpointSpec] = []
    prev_label: Optional[str] = None
    for table, ev in TABLE_EVENTS:
        if table is not None:
            checkpoints += table_checkpoints(table, prev_label)
        prev_label = ev.label
    return _base("tables-all", "Every worked balance-sheet example in sequence.",
                 tables_world(), [ev for _, ev in TABLE_EVENTS], checkpoints)


def table_scenario(n: int) -> Scenario:
    """Table ``n`` alone: the world just before it and its single event."""
    if n not in _TABLES:
        raise KeyError(f"table{n}")
    world = tables_world()
    ctx = RunContext(_base("", "", world, [], []), 0, {"ethereum": Fraction(1)}, {})
    main = next(i for i, (t, _) in enumerate(TABLE_EVENTS) if t == n)
    for _, ev in TABLE_EVENTS[:main]:
        world = OPERATIONS[ev.op](ctx, world, **ev.args)
    event = TABLE_EVENTS[main][1]
    return _base(f"table{n}", f"Worked example {n} on its own.", world.without_journal(),
                 [replace(event, time=0)], table_checkpoints(n, None))


def sfc_demo(steps: int = 20) -> Scenario:
    world = sfc.default_sfc_world()
    return Scenario(
        name="sfc-demo",
        description="Default seven-sector economy stepped under the default policy.",
        instruments=list(world.instruments.values()),
        agents=list(world.agents.values()),
        events=[EventSpec(0, "sfc_step", {"policy": "default", "n": steps}, "run")],
        seed=0,
        consortia={"dtc": sfc.DEFAULT_LAYOUT.consortium},
        policies={"default": sfc.BehavioralPolicy()},
        narrow_banks=[sfc.DEFAULT_LAYOUT.narrow_bank],
        restricted_holdings={Sector.REST_OF_WORLD.value: [CASH, "dtc"]},
    )


def chain_demo() -> Scenario:
    world = World.build([Instrument("bitcoin", "bitcoin", P)],
                        [Agent(f"miner_{i}", f"miner {i}", Sector.FIRMS, BalanceSheet())
                         for i in range(3)])
    return Scenario(
        name="chain-demo",
        description="Seeded proof-of-work race whose rewards are booked on the ledger.",
        instruments=list(world.instruments.values()),
        agents=list(world.agents.values()),
        events=[EventSpec(0, "simulate_chain",
                          {"n_miners": 3, "hash_shares": [0.5, 0.3, 0.2], "n_blocks": 4032,
                           "initial_difficulty_ratio": 0.5, "warmup": 2016, "coin": "bitcoin",
                           "miners": ["miner_0", "miner_1", "miner_2"]}, "mine")],
        seed=7,
    )


BUILTIN_NAMES = tuple(f"table{i}" for i in range(1, 9)) + ("tables-all", "sfc-demo", "chain-demo")


@lru_cache(maxsize=None)
def builtin_source(name: str) -> str:
    """Scenario document text of a built-in scenario."""
    if name == "tables-all":
        sc = tables_all()
    elif name == "sfc-demo":
        sc = sfc_demo()
    elif name == "chain-demo":
        sc = chain_demo()
    elif name.startswith("table") and name[5:].isdigit():
        sc = table_scenario(int(name[5:]))
    else:
        raise KeyError(f"unknown built-in scenario {name!r}; choose from {', '.join(BUILTIN_NAMES)}")
    return render_scenario(sc)


def builtin(name: str) -> Scenario:
    return parse_scenario(builtin_source(name))


def printed_after_cells(report) -> list:
    """Cell checks belonging to printed after-states."""
    return [c for c in report.checks if ".after" in c.checkpoint]


def instrument_outstanding(world: World) -> dict[str, int]:
    out: dict[str, int] = defaultdict(int)
    for a in world.agents.values():
        for iid, v in a.balance_sheet.assets.items():
            out[iid] += v
    return dict(out)

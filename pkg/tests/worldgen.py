"""Random consistent worlds and random valid transactions for property tests."""

from __future__ import annotations

import numpy as np

from cryptoledger.ledger import (
    SECTORS,
    Agent,
    BalanceSheet,
    Instrument,
    LiabilityClass,
    Transaction,
    World,
    asset_leg,
    liability_leg,
)

GOLD = "gold"
COIN = "coin"
KINDS = ("move", "swap", "issue", "redeem", "mint", "burn")


def claim_of(issuer: str) -> str:
    return f"claim.{issuer}"


def random_world(rng: np.random.Generator, n_agents: int = 5, n_issuers: int = 2,
                 max_amount: int = 10_000) -> World:
    """Every agent holds gold, coins and claims on each issuer; issuers owe the totals."""
    ids = [f"a{i}" for i in range(n_agents)]
    issuers = ids[:n_issuers]
    instruments = [
        Instrument(GOLD, "gold", LiabilityClass.REAL),
        Instrument(COIN, "coin", LiabilityClass.PURE_ASSET_COIN),
    ] + [Instrument(claim_of(b), f"claim on {b}", LiabilityClass.ISSUED_FINANCIAL, b)
         for b in issuers]
    assets: dict[str, dict[str, int]] = {a: {} for a in ids}
    liabs: dict[str, dict[str, int]] = {a: {} for a in ids}
    for a in ids:
        assets[a][GOLD] = int(rng.integers(0, max_amount))
        assets[a][COIN] = int(rng.integers(0, max_amount))
    for b in issuers:
        for a in ids:
            if a == b:
                continue
            v = int(rng.integers(0, max_amount))
            assets[a][claim_of(b)] = v
            liabs[b][claim_of(b)] = liabs[b].get(claim_of(b), 0) + v
    agents = [Agent(a, a, SECTORS[int(rng.integers(len(SECTORS)))],
                    BalanceSheet.of(assets[a], liabs[a])) for a in ids]
    return World.build(instruments, agents)


def issuers_of(world: World) -> list[str]:
    return [i.issuer for i in world.instruments.values() if i.issuer]


def _pick_holding(world: World, rng: np.random.Generator, instrument: str) -> tuple[str, int]:
    ids = list(world.agents)
    a = ids[int(rng.integers(len(ids)))]
    have = world.holding(a, instrument)
    return a, int(rng.integers(0, have + 1)) if have else 0


def random_transaction(world: World, rng: np.random.Generator,
                       kind: str | None = None) -> Transaction:
    """A transaction that is valid against ``world`` by construction."""
    kind = kind or KINDS[int(rng.integers(len(KINDS)))]
    ids = list(world.agents)
    other = ids[int(rng.integers(len(ids)))]
    tradeable = list(world.instruments)
    inst = tradeable[int(rng.integers(len(tradeable)))]
    if kind == "move":
        a, x = _pick_holding(world, rng, inst)
        return Transaction.of([asset_leg(a, inst, -x), asset_leg(other, inst, x)],
                              f"{a} moves {x} {inst}", flow="transfers")
    if kind == "swap":
        a, x = _pick_holding(world, rng, GOLD)
        x = min(x, world.holding(other, COIN))
        return Transaction.of([
            asset_leg(a, GOLD, -x), asset_leg(other, GOLD, x),
            asset_leg(other, COIN, -x), asset_leg(a, COIN, x),
        ], f"{a} swaps {x} gold for coin", flow="portfolio")
    if kind in ("issue", "redeem"):
        issuers = issuers_of(world)
        b = issuers[int(rng.integers(len(issuers)))]
        c = claim_of(b)
        if kind == "issue":
            # holder buys a new claim with gold
            a, x = _pick_holding(world, rng, GOLD)
            return Transaction.of([
                asset_leg(a, GOLD, -x), asset_leg(b, GOLD, x),
                asset_leg(a, c, x), liability_leg(b, c, x),
            ], f"{b} issues {x} to {a}", flow="lending")
        a, x = _pick_holding(world, rng, c)
        x = min(x, world.holding(b, GOLD))
        return Transaction.of([
            asset_leg(a, c, -x), liability_leg(b, c, -x),
            asset_leg(b, GOLD, -x), asset_leg(a, GOLD, x),
        ], f"{b} redeems {x} from {a}", flow="lending")
    if kind == "mint":
        x = int(rng.integers(0, 1000))
        return Transaction.of([asset_leg(other, COIN, x)], f"{other} mines {x}",
                              creates=True, flow="mining")
    if kind == "burn":
        a, x = _pick_holding(world, rng, GOLD)
        return Transaction.of([asset_leg(a, GOLD, -x)], f"{a} loses {x} gold",
                              creates=True, flow="investment")
    raise ValueError(kind)


def corrupt_cell(world: World, rng: np.random.Generator) -> tuple[World, str]:
    """Nudge one issued-instrument cell (asset or liability side) by a nonzero amount.

    Returns the corrupted world and the instrument touched.
    """
    issued = [i for i, inst in world.instruments.items()
              if inst.liability_class is LiabilityClass.ISSUED_FINANCIAL]
    iid = issued[int(rng.integers(len(issued)))]
    issuer = world.instrument(iid).issuer
    ids = list(world.agents)
    on_liability = bool(rng.integers(2))
    agent = issuer if on_liability else ids[int(rng.integers(len(ids)))]
    bs = world.sheet(agent)
    book = dict(bs.liabilities if on_liability else bs.assets)
    current = book.get(iid, 0)
    delta = int(rng.integers(1, 1000))
    if current >= delta and rng.integers(2):
        delta = -delta
    book[iid] = current + delta
    sheet = BalanceSheet.of(bs.assets, book) if on_liability else BalanceSheet.of(book, bs.liabilities)
    return world.with_sheet(agent, sheet), iid

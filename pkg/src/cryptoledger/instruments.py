"""Instrument taxonomy and backing-rule checks."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping, Optional

from .ledger import Agent, Instrument, LedgerError, LiabilityClass, Sector, World

RESERVES = "reserves"
CASH = "cash"
CBDC = "cbdc"

Prices = Mapping[str, Fraction]


def deposits_of(bank: str) -> str:
    """Instrument id of the sight deposits issued by ``bank``."""
    return f"{bank}.deposits"


def savings_of(bank: str) -> str:
    return f"{bank}.savings"


def loans_of(lender: str) -> str:
    return f"{lender}.loans"


class NoBackingRule(LedgerError):
    pass


class BackingKind(str, Enum):
    NONE = "None"
    RESERVE_COVER = "ReserveCover"
    DEPOSIT_COVER = "DepositCover"
    BASKET_COVER = "BasketCover"
    CRYPTO_OVER_COLLATERAL = "CryptoOverCollateral"


@dataclass(frozen=True)
class BackingRule:
    kind: BackingKind
    cover_instruments: frozenset[str] = frozenset()
    min_ratio: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        object.__setattr__(self, "min_ratio", Fraction(self.min_ratio))
        object.__setattr__(self, "cover_instruments", frozenset(self.cover_instruments))
        if self.min_ratio < 1:
            raise ValueError("min_ratio must be at least 1")
        if (self.kind is BackingKind.NONE) != (not self.cover_instruments):
            raise ValueError("kind None iff no cover instruments")


@dataclass(frozen=True)
class BackingStatus:
    subject: str
    outstanding: int
    cover_value: int
    ratio: Optional[Fraction]  # None when nothing is outstanding
    satisfied: bool
    required: Fraction = Fraction(0)


def classify(instrument: Instrument) -> LiabilityClass:
    return instrument.liability_class


def value_of(amount: int, instrument: str, prices: Optional[Prices]) -> int:
    """Book amount revalued at ``prices`` (missing price = par), floored."""
    if not prices or instrument not in prices:
        return amount
    v = amount * Fraction(prices[instrument])
    return v.numerator // v.denominator


def _status(subject: str, outstanding: int, cover: int, min_ratio: Fraction) -> BackingStatus:
    required = min_ratio * outstanding
    if outstanding == 0:
        return BackingStatus(subject, 0, cover, None, True, required)
    return BackingStatus(subject, outstanding, cover, Fraction(cover, outstanding),
                         cover >= required, required)


def backing_status(world: World, instrument: Instrument | str,
                   prices: Optional[Prices] = None) -> BackingStatus:
    """Cover of an issued coin against its outstanding amount.

    Cover counts the issuer's own holdings of the cover instruments, except
    for over-collateralized coins where collateral sits in vaults owned by
    the borrowers; there every holder's vault position counts.
    """
    inst = world.instrument(instrument) if isinstance(instrument, str) else instrument
    rule = inst.backing_rule
    if rule is None or rule.kind is BackingKind.NONE:
        raise NoBackingRule(inst.id)
    outstanding = world.owing(inst.issuer, inst.id) if inst.issuer else 0
    if rule.kind is BackingKind.CRYPTO_OVER_COLLATERAL:
        holders = list(world.agents.values())
    else:
        holders = [world.agent(inst.issuer)]
    cover = 0
    for cid in sorted(rule.cover_instruments):
        held = sum(a.balance_sheet.asset(cid) for a in holders)
        cover += value_of(held, cid, prices)
    return _status(inst.id, outstanding, cover, rule.min_ratio)


def reserve_backed_coins(world: World, bank_id: str) -> list[str]:
    out = []
    for inst in world.instruments.values():
        rule = inst.backing_rule
        if inst.issuer == bank_id and rule is not None and rule.kind is BackingKind.RESERVE_COVER:
            out.append(inst.id)
    return out


def check_narrow_bank(world: World, bank: Agent | str, *,
                      include_cash_cbdc: bool = False) -> BackingStatus:
    """Reserves must cover deposits plus reserve-backed coins, equality allowed.

    Only reserves count unless ``include_cash_cbdc`` widens cover to the
    bank's cash and CBDC, which the central bank converts at par.
    """
    agent = world.agent(bank) if isinstance(bank, str) else bank
    if agent.sector is not Sector.BANKS:
        raise ValueError(f"{agent.id} is not a bank")
    bs = agent.balance_sheet
    requirement = bs.liability(deposits_of(agent.id))
    requirement += sum(bs.liability(c) for c in reserve_backed_coins(world, agent.id))
    cover = bs.asset(RESERVES)
    if include_cash_cbdc:
        cover += bs.asset(CASH) + bs.asset(CBDC)
    return _status(agent.id, requirement, cover, Fraction(1))

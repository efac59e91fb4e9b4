"""Named balance-sheet operations compiled into ledger transactions.

Each operation checks its own preconditions (so callers get a specific error
such as :class:`InsufficientReserves` rather than a bare negative-position
failure), builds the legs and posts them through
:func:`~cryptoledger.ledger.post_transaction`. All of them are pure
``World -> World`` functions.

Deposits at bank ``b`` live in instrument ``b.deposits``; reserves, cash and
CBDC are the central bank's ``reserves``/``cash``/``cbdc``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .instruments import CASH, CBDC, RESERVES, check_narrow_bank, deposits_of
from .ledger import (
    LedgerError,
    Posting,
    Side,
    Transaction,
    World,
    asset_leg,
    liability_leg,
    post_transaction,
)

DEFAULT_MIN_RATIO = Fraction(5, 3)


class OperationError(LedgerError):
    pass


class InsufficientHolding(OperationError):
    pass


class InsufficientDeposits(InsufficientHolding):
    pass


class InsufficientReserves(InsufficientHolding):
    pass


class InsufficientBasket(InsufficientHolding):
    pass


class InsufficientCollateral(InsufficientHolding):
    pass


class InsufficientDai(InsufficientHolding):
    pass


class UndercollateralizedRequest(OperationError):
    pass


class ExcessRepayment(OperationError):
    pass


class VaultHealthy(OperationError):
    pass


class NarrowBankConstraintViolated(OperationError):
    pass


def _need(world: World, agent: str, instrument: str, amount: int,
          error: type[InsufficientHolding] = InsufficientHolding) -> None:
    if amount < 0:
        raise ValueError(f"negative amount {amount}")
    have = world.holding(agent, instrument)
    if have < amount:
        raise error(f"{agent} holds {have:,} {instrument}, needs {amount:,}")


def _payment_legs(payer: str, payer_bank: str, payee: str, payee_bank: str,
                  amount: int) -> list[Posting]:
    """Deposit transfer with reserve settlement between the two banks."""
    legs = [
        asset_leg(payer, deposits_of(payer_bank), -amount),
        asset_leg(payee, deposits_of(payee_bank), amount),
    ]
    if payer_bank != payee_bank:
        legs += [
            liability_leg(payer_bank, deposits_of(payer_bank), -amount),
            asset_leg(payer_bank, RESERVES, -amount),
            liability_leg(payee_bank, deposits_of(payee_bank), amount),
            asset_leg(payee_bank, RESERVES, amount),
        ]
    return legs


def _check_payment(world: World, payer: str, payer_bank: str, payee_bank: str,
                   amount: int) -> None:
    _need(world, payer, deposits_of(payer_bank), amount, InsufficientDeposits)
    if payer_bank != payee_bank:
        _need(world, payer_bank, RESERVES, amount, InsufficientReserves)


def _post(world: World, legs: list[Posting], description: str, flow: str,
          creates: bool = False) -> World:
    return post_transaction(world, Transaction.of(legs, description, creates=creates, flow=flow))


# ---------------------------------------------------------------------------
# Generic payments
# ---------------------------------------------------------------------------


def pay(world: World, payer: str, payer_bank: str, payee: str, payee_bank: str,
        amount: int, *, flow: str = "transfers", description: str = "") -> World:
    """Pay ``amount`` from one deposit account to another."""
    _check_payment(world, payer, payer_bank, payee_bank, amount)
    legs = _payment_legs(payer, payer_bank, payee, payee_bank, amount)
    return _post(world, legs, description or f"{payer} pays {payee} {amount:,}", flow)


def transfer(world: World, sender: str, receiver: str, instrument: str, amount: int, *,
             flow: str = "transfers", description: str = "") -> World:
    """Hand over an asset position without any counter-payment."""
    _need(world, sender, instrument, amount)
    legs = [asset_leg(sender, instrument, -amount), asset_leg(receiver, instrument, amount)]
    return _post(world, legs, description or f"{sender} -> {receiver} {amount:,} {instrument}", flow)


def withdraw_cash(world: World, client: str, bank: str, central_bank: str, amount: int, *,
                  flow: str = "portfolio") -> World:
    _need(world, client, deposits_of(bank), amount, InsufficientDeposits)
    _need(world, bank, RESERVES, amount, InsufficientReserves)
    legs = [
        asset_leg(client, deposits_of(bank), -amount),
        asset_leg(client, CASH, amount),
        liability_leg(bank, deposits_of(bank), -amount),
        asset_leg(bank, RESERVES, -amount),
        liability_leg(central_bank, RESERVES, -amount),
        liability_leg(central_bank, CASH, amount),
    ]
    return _post(world, legs, f"{client} withdraws {amount:,} cash", flow)


def deposit_cash(world: World, client: str, bank: str, central_bank: str, amount: int, *,
                 flow: str = "portfolio") -> World:
    _need(world, client, CASH, amount)
    legs = [
        asset_leg(client, CASH, -amount),
        asset_leg(client, deposits_of(bank), amount),
        liability_leg(bank, deposits_of(bank), amount),
        asset_leg(bank, RESERVES, amount),
        liability_leg(central_bank, RESERVES, amount),
        liability_leg(central_bank, CASH, -amount),
    ]
    return _post(world, legs, f"{client} deposits {amount:,} cash", flow)


# ---------------------------------------------------------------------------
# Pure-asset coins
# ---------------------------------------------------------------------------


def mine_pure_asset(world: World, miner: str, coin: str, gross: int, cost: int, *,
                    bank: str, payee: str, payee_bank: Optional[str] = None,
                    flow: str = "mining") -> World:
    """New coins worth ``gross`` for the miner, operating cost paid by deposit.

    The cost goes to ``payee`` (an out-of-frame supplier such as a power
    company) through the deposit rail; reserves move only when the supplier
    banks elsewhere.
    """
    if gross < 0:
        raise ValueError("gross must be non-negative")
    payee_bank = payee_bank or bank
    _check_payment(world, miner, bank, payee_bank, cost)
    legs = [asset_leg(miner, coin, gross)]
    legs += _payment_legs(miner, bank, payee, payee_bank, cost)
    return _post(world, legs, f"{miner} mines {gross:,} {coin} at cost {cost:,}", flow, creates=True)


def exchange_assets(world: World, buyer: str, seller: str, pay_instr: str, pay_amt: int,
                    recv_instr: str, recv_amt: int, *, flow: str = "portfolio") -> World:
    _need(world, buyer, pay_instr, pay_amt)
    _need(world, seller, recv_instr, recv_amt)
    legs = [
        asset_leg(buyer, pay_instr, -pay_amt),
        asset_leg(seller, pay_instr, pay_amt),
        asset_leg(seller, recv_instr, -recv_amt),
        asset_leg(buyer, recv_instr, recv_amt),
    ]
    desc = f"{buyer} pays {pay_amt:,} {pay_instr} to {seller} for {recv_amt:,} {recv_instr}"
    return _post(world, legs, desc, flow)


def sell_coin_to_bank(world: World, seller: str, bank: str, coin: str, amt: int, *,
                      flow: str = "portfolio") -> World:
    """The bank buys the coin by crediting the seller's deposit account."""
    _need(world, seller, coin, amt)
    legs = [
        asset_leg(seller, coin, -amt),
        asset_leg(seller, deposits_of(bank), amt),
        asset_leg(bank, coin, amt),
        liability_leg(bank, deposits_of(bank), amt),
    ]
    return _post(world, legs, f"{seller} sells {amt:,} {coin} to {bank}", flow)


# ---------------------------------------------------------------------------
# CBDC
# ---------------------------------------------------------------------------


def _cbdc_legs(client: str, bank: str, central_bank: str, amt: int) -> list[Posting]:
    return [
        asset_leg(client, deposits_of(bank), -amt),
        asset_leg(client, CBDC, amt),
        liability_leg(bank, deposits_of(bank), -amt),
        asset_leg(bank, RESERVES, -amt),
        liability_leg(central_bank, RESERVES, -amt),
        liability_leg(central_bank, CBDC, amt),
    ]


def withdraw_cbdc(world: World, client: str, bank: str, central_bank: str, amt: int, *,
                  flow: str = "coin_flows") -> World:
    """Convert deposits into CBDC; the bank pays with reserves, like a cash withdrawal."""
    _need(world, client, deposits_of(bank), amt, InsufficientDeposits)
    _need(world, bank, RESERVES, amt, InsufficientReserves)
    return _post(world, _cbdc_legs(client, bank, central_bank, amt),
                 f"{client} withdraws {amt:,} CBDC via {bank}", flow)


def deposit_cbdc(world: World, client: str, bank: str, central_bank: str, amt: int, *,
                 flow: str = "coin_flows") -> World:
    _need(world, client, CBDC, amt)
    legs = [Posting(p.agent, _flip(p), p.instrument, p.amount)
            for p in _cbdc_legs(client, bank, central_bank, amt)]
    return _post(world, legs, f"{client} deposits {amt:,} CBDC at {bank}", flow)


def swap_reserves_for_cbdc(world: World, bank: str, central_bank: str, amt: int, *,
                           flow: str = "portfolio") -> World:
    _need(world, bank, RESERVES, amt, InsufficientReserves)
    legs = [
        asset_leg(bank, RESERVES, -amt),
        asset_leg(bank, CBDC, amt),
        liability_leg(central_bank, RESERVES, -amt),
        liability_leg(central_bank, CBDC, amt),
    ]
    return _post(world, legs, f"{bank} swaps {amt:,} reserves for CBDC", flow)


def swap_cbdc_for_reserves(world: World, bank: str, central_bank: str, amt: int, *,
                           flow: str = "portfolio") -> World:
    _need(world, bank, CBDC, amt)
    legs = [
        asset_leg(bank, CBDC, -amt),
        asset_leg(bank, RESERVES, amt),
        liability_leg(central_bank, CBDC, -amt),
        liability_leg(central_bank, RESERVES, amt),
    ]
    return _post(world, legs, f"{bank} swaps {amt:,} CBDC for reserves", flow)


_OPPOSITE = {
    Side.ASSET_DEBIT: Side.ASSET_CREDIT,
    Side.ASSET_CREDIT: Side.ASSET_DEBIT,
    Side.LIABILITY_DEBIT: Side.LIABILITY_CREDIT,
    Side.LIABILITY_CREDIT: Side.LIABILITY_DEBIT,
}


def _flip(p: Posting) -> Side:
    return _OPPOSITE[p.side]


# ---------------------------------------------------------------------------
# Fiat-backed and custodial stable coins
# ---------------------------------------------------------------------------


def _require_narrow(world: World, bank: str) -> None:
    status = check_narrow_bank(world, bank)
    if not status.satisfied:
        raise NarrowBankConstraintViolated(
            f"{bank}: reserves {status.cover_value:,} < deposits + coins {status.outstanding:,}")


def issue_fbsc(world: World, client: str, narrow_bank: str, amt: int, *, coin: str = "fbsc",
               flow: str = "coin_flows") -> World:
    _need(world, client, deposits_of(narrow_bank), amt, InsufficientDeposits)
    legs = [
        asset_leg(client, deposits_of(narrow_bank), -amt),
        asset_leg(client, coin, amt),
        liability_leg(narrow_bank, deposits_of(narrow_bank), -amt),
        liability_leg(narrow_bank, coin, amt),
    ]
    after = _post(world, legs, f"{client} buys {amt:,} {coin} from {narrow_bank}", flow)
    _require_narrow(after, narrow_bank)
    return after


def redeem_fbsc(world: World, client: str, narrow_bank: str, amt: int, *, coin: str = "fbsc",
                flow: str = "coin_flows") -> World:
    _need(world, client, coin, amt)
    legs = [
        asset_leg(client, coin, -amt),
        asset_leg(client, deposits_of(narrow_bank), amt),
        liability_leg(narrow_bank, coin, -amt),
        liability_leg(narrow_bank, deposits_of(narrow_bank), amt),
    ]
    return _post(world, legs, f"{client} redeems {amt:,} {coin} at {narrow_bank}", flow)


def issue_csc(world: World, client: str, client_bank: str, custodian: str, narrow_bank: str,
              amt: int, *, coin: str = "csc", flow: str = "coin_flows") -> World:
    """Client pays the custodian, whose deposit at the designated bank backs the new coins."""
    _check_payment(world, client, client_bank, narrow_bank, amt)
    legs = _payment_legs(client, client_bank, custodian, narrow_bank, amt)
    legs += [asset_leg(client, coin, amt), liability_leg(custodian, coin, amt)]
    return _post(world, legs, f"{client} buys {amt:,} {coin} from {custodian}", flow)


def redeem_csc(world: World, client: str, client_bank: str, custodian: str, narrow_bank: str,
               amt: int, *, coin: str = "csc", flow: str = "coin_flows") -> World:
    _need(world, client, coin, amt)
    _check_payment(world, custodian, narrow_bank, client_bank, amt)
    legs = _payment_legs(custodian, narrow_bank, client, client_bank, amt)
    legs += [asset_leg(client, coin, -amt), liability_leg(custodian, coin, -amt)]
    return _post(world, legs, f"{client} redeems {amt:,} {coin} at {custodian}", flow)


# ---------------------------------------------------------------------------
# Digital trade coins
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DtcConsortium:
    administrator: str
    sponsors: str
    affiliated_bank: str
    basket_instrument: str = "basket"
    coin_instrument: str = "dtc"


def issue_dtc(world: World, consortium: DtcConsortium, buyer: str, buyer_bank: str, amt: int,
              *, flow: str = "coin_flows") -> World:
    """Sponsors hand basket assets to the administrator, who sells new coins at par.

    The buyer's payment lands in the sponsors' account at the affiliated bank.
    """
    c = consortium
    _need(world, c.sponsors, c.basket_instrument, amt, InsufficientBasket)
    _check_payment(world, buyer, buyer_bank, c.affiliated_bank, amt)
    legs = _payment_legs(buyer, buyer_bank, c.sponsors, c.affiliated_bank, amt)
    legs += [
        asset_leg(buyer, c.coin_instrument, amt),
        asset_leg(c.sponsors, c.basket_instrument, -amt),
        asset_leg(c.administrator, c.basket_instrument, amt),
        liability_leg(c.administrator, c.coin_instrument, amt),
    ]
    return _post(world, legs, f"{buyer} buys {amt:,} {c.coin_instrument} from {c.administrator}", flow)


def redeem_dtc(world: World, consortium: DtcConsortium, holder: str, holder_bank: str, amt: int,
               *, flow: str = "coin_flows") -> World:
    """Exact inverse of :func:`issue_dtc`; needs reserves at the affiliated bank."""
    c = consortium
    _need(world, holder, c.coin_instrument, amt)
    _need(world, c.administrator, c.basket_instrument, amt, InsufficientBasket)
    _check_payment(world, c.sponsors, c.affiliated_bank, holder_bank, amt)
    legs = _payment_legs(c.sponsors, c.affiliated_bank, holder, holder_bank, amt)
    legs += [
        asset_leg(holder, c.coin_instrument, -amt),
        asset_leg(c.sponsors, c.basket_instrument, amt),
        asset_leg(c.administrator, c.basket_instrument, -amt),
        liability_leg(c.administrator, c.coin_instrument, -amt),
    ]
    return _post(world, legs, f"{holder} sells {amt:,} {c.coin_instrument} back to {c.administrator}", flow)


# ---------------------------------------------------------------------------
# Over-collateralized coins
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VaultParams:
    collateral_instrument: str = "ethereum"
    vault_instrument: str = "vault"
    coin_instrument: str = "dai"
    loan_instrument: str = "dai_loans"
    min_ratio: Fraction = DEFAULT_MIN_RATIO

    def __post_init__(self) -> None:
        object.__setattr__(self, "min_ratio", Fraction(self.min_ratio))
        if self.min_ratio < 1:
            raise ValueError("min_ratio must be at least 1")


@dataclass(frozen=True)
class Vault:
    """A borrower's collateral lockbox, read off the borrower's balance sheet."""

    owner: str
    protocol: str
    collateral_instrument: str
    locked: int
    debt: int
    min_ratio: Fraction
    params: VaultParams

    def collateral_value(self, price: Fraction | int = 1) -> int:
        v = self.locked * Fraction(price)
        return v.numerator // v.denominator

    def healthy(self, price: Fraction | int = 1) -> bool:
        return self.collateral_value(price) >= self.min_ratio * self.debt


def vault_of(world: World, owner: str, protocol: str, params: VaultParams = VaultParams()) -> Vault:
    return Vault(owner, protocol, params.collateral_instrument,
                 world.holding(owner, params.vault_instrument),
                 world.owing(owner, params.loan_instrument),
                 params.min_ratio, params)


def open_vault_mint(world: World, borrower: str, protocol: str, vault_params: VaultParams,
                    collateral_amt: int, mint_amt: int, *, collateral_price: Fraction | int = 1,
                    flow: str = "coin_flows") -> World:
    """Lock collateral in the borrower's vault and borrow newly minted coins.

    The vault stays on the borrower's balance sheet; the coin loan is a
    liability to the protocol, which owes the coins themselves.
    """
    p = vault_params
    if mint_amt < 0:
        raise ValueError("mint amount must be non-negative")
    _need(world, borrower, p.collateral_instrument, collateral_amt, InsufficientCollateral)
    current = vault_of(world, borrower, protocol, p)
    locked = current.locked + collateral_amt
    debt = current.debt + mint_amt
    value = locked * Fraction(collateral_price)
    if value < p.min_ratio * debt:
        raise UndercollateralizedRequest(
            f"collateral worth {float(value):,.2f} cannot back {debt:,} at ratio {p.min_ratio}")
    legs = [
        asset_leg(borrower, p.collateral_instrument, -collateral_amt),
        asset_leg(borrower, p.vault_instrument, collateral_amt),
        asset_leg(borrower, p.coin_instrument, mint_amt),
        liability_leg(borrower, p.loan_instrument, mint_amt),
        asset_leg(protocol, p.loan_instrument, mint_amt),
        liability_leg(protocol, p.coin_instrument, mint_amt),
    ]
    return _post(world, legs, f"{borrower} locks {collateral_amt:,} and mints {mint_amt:,}", flow)


def repay_and_release(world: World, borrower: str, protocol: str, repay_amt: int, fee_amt: int = 0,
                      *, vault_params: VaultParams = VaultParams(),
                      flow: str = "coin_flows") -> World:
    """Repay part of a coin loan plus a stability fee; collateral comes back pro rata.

    The fee is paid in the coin itself and is the protocol's income.
    """
    p = vault_params
    if repay_amt < 0 or fee_amt < 0:
        raise ValueError("amounts must be non-negative")
    vault = vault_of(world, borrower, protocol, p)
    if repay_amt > vault.debt:
        raise ExcessRepayment(f"repaying {repay_amt:,} of a {vault.debt:,} loan")
    _need(world, borrower, p.coin_instrument, repay_amt + fee_amt, InsufficientDai)
    if repay_amt == vault.debt:
        released = vault.locked
    else:
        released = vault.locked * repay_amt // vault.debt
    legs = [
        asset_leg(borrower, p.coin_instrument, -(repay_amt + fee_amt)),
        liability_leg(borrower, p.loan_instrument, -repay_amt),
        asset_leg(borrower, p.vault_instrument, -released),
        asset_leg(borrower, p.collateral_instrument, released),
        liability_leg(protocol, p.coin_instrument, -(repay_amt + fee_amt)),
        asset_leg(protocol, p.loan_instrument, -repay_amt),
    ]
    desc = f"{borrower} repays {repay_amt:,} + fee {fee_amt:,}, releases {released:,}"
    return _post(world, legs, desc, flow)


def liquidate_vault(world: World, protocol: str, vault: Vault, collateral_price: Fraction | int,
                    *, flow: str = "coin_flows") -> World:
    """Seize an unhealthy vault and close it.

    The collateral is marked to ``collateral_price``; the protocol takes as
    much of it as retires the debt, any surplus goes back to the owner as
    unlocked collateral, and any shortfall is the protocol's loss. Marking to
    market destroys book value, so the transaction is flagged as a creation
    event.
    """
    price = Fraction(collateral_price)
    if vault.healthy(price):
        raise VaultHealthy(f"{vault.owner}: collateral {vault.collateral_value(price):,} covers debt")
    p = vault.params
    value = vault.collateral_value(price)
    seized = min(value, vault.debt)
    surplus = max(0, value - vault.debt)
    legs = [
        asset_leg(vault.owner, p.vault_instrument, -vault.locked),
        asset_leg(vault.owner, p.collateral_instrument, surplus),
        liability_leg(vault.owner, p.loan_instrument, -vault.debt),
        asset_leg(protocol, p.loan_instrument, -vault.debt),
        asset_leg(protocol, p.collateral_instrument, seized),
    ]
    desc = f"liquidate {vault.owner} vault at price {price}: seized {seized:,}, surplus {surplus:,}"
    return _post(world, legs, desc, flow, creates=True)

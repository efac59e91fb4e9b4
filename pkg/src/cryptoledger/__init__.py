"""Double-entry balance-sheet engine for cryptocurrencies and stable coins."""

from .ledger import (
    Agent,
    BalanceSheet,
    Instrument,
    LiabilityClass,
    Sector,
    Transaction,
    World,
    post_transaction,
    verify_global_consistency,
)

__all__ = [
    "Agent",
    "BalanceSheet",
    "Instrument",
    "LiabilityClass",
    "Sector",
    "Transaction",
    "World",
    "post_transaction",
    "verify_global_consistency",
]
__version__ = "0.1.0"

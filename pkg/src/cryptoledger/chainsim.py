"""Supply side of pure-asset coins.

Coinbase halving schedule, cumulative and asymptotic supply, a seeded
proof-of-work race with difficulty retargeting, longest-chain fork
resolution and linear release of pre-mined coins.

Rewards are exact rationals in coin units, so 6.25 per block is exact and the
asymptotic supply of the 50/210,000 schedule is exactly 21,000,000. Passing
``min_unit`` floors each reward to a multiple of that unit (1e-8 reproduces
Bitcoin's satoshi truncation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .ledger import Transaction, World, asset_leg, post_transaction

SATOSHI = Fraction(1, 10**8)


class InvalidShares(ValueError):
    pass


@dataclass(frozen=True)
class SupplySchedule:
    initial_reward: Fraction = Fraction(50)
    halving_interval: int = 210_000
    target_block_time: float = 600.0
    min_unit: Optional[Fraction] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "initial_reward", Fraction(self.initial_reward))
        if self.min_unit is not None:
            object.__setattr__(self, "min_unit", Fraction(self.min_unit))
        if self.halving_interval <= 0:
            raise ValueError("halving_interval must be positive")

    @property
    def asymptotic_supply(self) -> Fraction:
        """Limit of the untruncated geometric series."""
        return 2 * self.initial_reward * self.halving_interval


BITCOIN = SupplySchedule()


def era_reward(schedule: SupplySchedule, era: int) -> Fraction:
    r = schedule.initial_reward / (2 ** era)
    if schedule.min_unit is not None:
        r = (r // schedule.min_unit) * schedule.min_unit
    return r


def block_reward(schedule: SupplySchedule, height: int) -> Fraction:
    if height < 0:
        raise ValueError("height must be non-negative")
    return era_reward(schedule, height // schedule.halving_interval)


def cumulative_supply(schedule: SupplySchedule, height: float) -> Fraction:
    """Coins issued by blocks ``0 .. height-1``; ``math.inf`` gives the limit."""
    if height < 0:
        raise ValueError("height must be non-negative")
    n = schedule.halving_interval
    if height == math.inf:
        if schedule.min_unit is None:
            return schedule.asymptotic_supply
        total, era = Fraction(0), 0
        while (r := era_reward(schedule, era)) > 0:
            total += r * n
            era += 1
        return total
    height = int(height)
    full_eras, rest = divmod(height, n)
    total = Fraction(0)
    if schedule.min_unit is None:
        # closed form of the geometric sum over complete eras
        total = 2 * schedule.initial_reward * n * (1 - Fraction(1, 2 ** full_eras))
    else:
        for era in range(full_eras):
            r = era_reward(schedule, era)
            if r == 0:
                break
            total += r * n
    return total + era_reward(schedule, full_eras) * rest


# ---------------------------------------------------------------------------
# Proof-of-work race
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Block:
    height: int
    miner: int
    reward: Fraction
    timestamp: float
    difficulty: float


@dataclass
class ChainState:
    branches: list[list[Block]] = field(default_factory=list)
    canonical: int = 0

    @property
    def chain(self) -> list[Block]:
        return self.branches[self.canonical]

    def intervals(self) -> np.ndarray:
        ts = np.array([0.0] + [b.timestamp for b in self.chain])
        return np.diff(ts)

    def supply(self) -> Fraction:
        """Rewards on the canonical branch only; orphans issue nothing."""
        return sum((b.reward for b in self.chain), Fraction(0))

    def wins(self, n_miners: int) -> list[int]:
        counts = [0] * n_miners
        for b in self.chain:
            counts[b.miner] += 1
        return counts

    def orphans(self) -> list[list[Block]]:
        return [b for i, b in enumerate(self.branches) if i != self.canonical]


def _check_shares(n_miners: int, hash_shares: Sequence[float]) -> np.ndarray:
    shares = np.asarray(hash_shares, dtype=float)
    if n_miners <= 0 or shares.shape != (n_miners,):
        raise InvalidShares(f"need {n_miners} shares, got {len(shares)}")
    if np.any(shares < 0) or not math.isclose(shares.sum(), 1.0, abs_tol=1e-9):
        raise InvalidShares(f"shares must be non-negative and sum to 1: {list(hash_shares)}")
    return shares / shares.sum()


def simulate_chain(schedule: SupplySchedule, n_miners: int, hash_shares: Sequence[float],
                   n_blocks: int, seed: int, *, retarget_window: int = 2016,
                   initial_difficulty_ratio: float = 1.0, hashrate_growth: float = 0.0,
                   propagation_delay: float = 0.0, start_height: int = 0) -> ChainState:
    """Seeded block race.

    Total hash rate starts at 1 and grows by ``hashrate_growth`` per block.
    Difficulty is the expected work per block; the first window is
    mis-tuned by ``initial_difficulty_ratio`` and every ``retarget_window``
    blocks it is rescaled by target/actual window time, clamped to a factor
    of four either way. Inter-block times are exponential with mean
    difficulty / hash rate; each block's miner is drawn by hash share.

    With ``propagation_delay > 0`` a block found by a different miner within
    that delay of its predecessor becomes a stale sibling branch.
    """
    shares = _check_shares(n_miners, hash_shares)
    rng = np.random.default_rng(seed)
    target = schedule.target_block_time
    hashrate = 1.0
    difficulty = target * initial_difficulty_ratio
    chain: list[Block] = []
    stale: list[tuple[int, Block]] = []
    t = 0.0
    window_start = 0.0
    height = start_height
    while len(chain) < n_blocks:
        dt = rng.exponential(difficulty / hashrate)
        miner = int(rng.choice(n_miners, p=shares))
        if (propagation_delay > 0 and chain and dt < propagation_delay
                and miner != chain[-1].miner):
            stale.append((len(chain) - 1, Block(height - 1, miner, block_reward(schedule, height - 1),
                                                t + dt, difficulty)))
            continue
        t += dt
        chain.append(Block(height, miner, block_reward(schedule, height), t, difficulty))
        height += 1
        hashrate *= 1.0 + hashrate_growth
        if len(chain) % retarget_window == 0:
            actual = t - window_start
            factor = min(4.0, max(0.25, target * retarget_window / actual))
            difficulty *= factor
            window_start = t
    branches = [chain] + [chain[:i] + [blk] for i, blk in stale]
    return resolve_fork(ChainState(branches))


def resolve_fork(state: ChainState) -> ChainState:
    """Longest branch wins; ties go to the earliest final-block timestamp."""
    if not state.branches:
        raise ValueError("no branches")

    def key(i: int):
        b = state.branches[i]
        return (-len(b), b[-1].timestamp if b else 0.0, i)

    best = min(range(len(state.branches)), key=key)
    return ChainState(state.branches, best)


def chain_statistics(state: ChainState, n_miners: int, warmup: int = 0) -> dict[str, float]:
    iv = state.intervals()[warmup:]
    return {
        "blocks": float(len(state.chain)),
        "orphans": float(len(state.branches) - 1),
        "mean_interval": float(iv.mean()) if len(iv) else 0.0,
        "supply": float(state.supply()),
        **{f"miner_{i}_wins": float(w) for i, w in enumerate(state.wins(n_miners))},
    }


def credit_block_rewards(world: World, state: ChainState, coin: str, miners: Sequence[str],
                         coin_value: Fraction | int = 1, *, flow: str = "mining") -> World:
    """Book the canonical chain's rewards on the ledger, one creation per miner.

    ``miners[i]`` is the agent behind simulated miner ``i``; rewards are valued
    at ``coin_value`` dollars per coin and floored to whole dollars.
    """
    totals = [Fraction(0)] * len(miners)
    for b in state.chain:
        totals[b.miner] += b.reward
    legs = []
    for agent, coins in zip(miners, totals):
        v = coins * Fraction(coin_value)
        legs.append(asset_leg(agent, coin, v.numerator // v.denominator))
    tx = Transaction.of(legs, f"block rewards for {len(state.chain)} blocks", creates=True, flow=flow)
    return post_transaction(world, tx)


# ---------------------------------------------------------------------------
# Pre-mined coins
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PremineSchedule:
    total: int
    release_rate: int
    start: int = 0


def premined_circulation(schedule: PremineSchedule, month: int) -> int:
    if month < 0:
        raise ValueError("month must be non-negative")
    return min(schedule.total, schedule.release_rate * max(0, month - schedule.start))


RIPPLE = PremineSchedule(total=100 * 10**9, release_rate=10**9, start=0)

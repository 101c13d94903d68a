"""Finite state/signal spaces, signal structures, beliefs, and Bayes updates.

Everything here is a plain value type plus pure functions; nothing mutates
after construction, so instances can be shared freely across threads.

A note on the noise rate ``eta``: throughout this package ``eta`` is the
probability that the arriving trader is a *noise* trader (acting uniformly
over buy/sell/no-trade), and ``1 - eta`` the probability of an informed
trader.  Every action-likelihood formula uses the ``eta / 3`` noise arm
accordingly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptySignalSet,
    InvalidBelief,
    NonPositiveDensity,
    RowSumInvalid,
    UnknownSignal,
)

__all__ = [
    "BUY",
    "SELL",
    "NO_TRADE",
    "ACTIONS",
    "PROB_SUM_TOL",
    "StateSpace",
    "SignalSpace",
    "SignalStructure",
    "Belief",
    "NoiseRate",
    "SignalPartition",
    "validate_structure",
    "bayes_posterior",
    "bayes_posterior_set",
    "expectation",
    "posterior_values",
    "action_likelihood",
    "action_likelihood_vector",
    "update_public_belief_on_action",
]

BUY = "B"
SELL = "S"
NO_TRADE = "NT"
ACTIONS = (BUY, SELL, NO_TRADE)

# Probability-mass bookkeeping tolerance (row sums, belief sums).
PROB_SUM_TOL = 1e-12


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.asarray(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class StateSpace:
    """Strictly increasing finite asset values ``w_1 < ... < w_n``, n >= 2."""

    values: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.values)
        if arr.ndim != 1 or arr.size < 2:
            raise DimensionMismatch("state space needs at least two values in a flat sequence")
        if not np.all(np.isfinite(arr)):
            raise DimensionMismatch("state values must be finite")
        if not np.all(np.diff(arr) > 0):
            raise DimensionMismatch("state values must be strictly increasing")
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def low(self) -> float:
        return float(self.values[0])

    @property
    def high(self) -> float:
        return float(self.values[-1])


@dataclass(frozen=True)
class SignalSpace:
    """Ordered, distinct signal labels; the order given here is the order
    used by likelihood-ratio monotonicity checks."""

    labels: tuple

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(labels) < 1:
            raise DimensionMismatch("signal space needs at least one label")
        if len(set(labels)) != len(labels):
            raise DimensionMismatch("signal labels must be distinct")
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownSignal(f"signal {label!r} not in {self.labels}") from None


@dataclass(frozen=True)
class SignalStructure:
    """Conditional signal likelihoods: ``likelihood[i, j]`` is the probability
    of signal ``signals.labels[j]`` given state ``states.values[i]``.

    Construction checks shape only; use :func:`validate_structure` for the
    probabilistic invariants (row sums, strict positivity).
    """

    states: StateSpace
    signals: SignalSpace
    likelihood: np.ndarray

    def __post_init__(self):
        table = _frozen_array(self.likelihood)
        if table.shape != (len(self.states), len(self.signals)):
            raise DimensionMismatch(
                f"likelihood shape {table.shape} does not match "
                f"{len(self.states)} states x {len(self.signals)} signals"
            )
        object.__setattr__(self, "likelihood", table)

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_signals(self) -> int:
        return len(self.signals)

    def set_mass(self, signal_indices: Sequence[int]) -> np.ndarray:
        """f(S|w) for a set of signal column indices, per state."""
        idx = list(signal_indices)
        if not idx:
            return np.zeros(self.n_states)
        return self.likelihood[:, idx].sum(axis=1)


@dataclass(frozen=True)
class Belief:
    """Probability distribution over the state space, aligned with state order."""

    weights: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.weights)
        if arr.ndim != 1:
            raise InvalidBelief("belief weights must be a flat sequence")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise InvalidBelief(f"belief weights must be finite and nonnegative, got {arr!r}")
        total = float(arr.sum())
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise InvalidBelief(f"belief weights sum to {total!r}, expected 1 within {PROB_SUM_TOL}")
        object.__setattr__(self, "weights", arr)

    @classmethod
    def uniform(cls, n: int) -> "Belief":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def point_mass(cls, n: int, index: int) -> "Belief":
        w = np.zeros(n)
        w[index] = 1.0
        return cls(w)

    @classmethod
    def from_unnormalized(cls, raw) -> "Belief":
        arr = np.asarray(raw, dtype=float)
        total = arr.sum()
        if not np.isfinite(total) or total <= 0:
            raise InvalidBelief(f"cannot normalize weights with total {total!r}")
        return cls(arr / total)

    @property
    def full_support(self) -> bool:
        return bool(np.all(self.weights > 0))

    def __len__(self) -> int:
        return int(self.weights.size)


@dataclass(frozen=True)
class NoiseRate:
    """Probability that the arriving trader is a noise trader."""

    eta: float

    def __post_init__(self):
        if not (0.0 <= self.eta <= 1.0) or not np.isfinite(self.eta):
            raise InvalidBelief(f"noise rate must lie in [0, 1], got {self.eta!r}")


def _eta_value(eta) -> float:
    return eta.eta if isinstance(eta, NoiseRate) else NoiseRate(float(eta)).eta


@dataclass(frozen=True)
class SignalPartition:
    """Classification of signal columns into buy / sell / no-trade sets.

    ``buy``, ``sell`` and ``no_trade`` hold column indices into the signal
    space; together they cover every signal exactly once.
    """

    n_signals: int
    buy: tuple = ()
    sell: tuple = ()
    no_trade: tuple = field(default=None)  # derived when omitted

    def __post_init__(self):
        buy = tuple(int(j) for j in self.buy)
        sell = tuple(int(j) for j in self.sell)
        no_trade = self.no_trade
        if no_trade is None:
            taken = set(buy) | set(sell)
            no_trade = tuple(j for j in range(self.n_signals) if j not in taken)
        else:
            no_trade = tuple(int(j) for j in no_trade)
        claimed = sorted(buy + sell + no_trade)
        if claimed != list(range(self.n_signals)):
            raise DimensionMismatch(
                f"partition does not cover each of {self.n_signals} signals exactly once: {claimed}"
            )
        object.__setattr__(self, "buy", buy)
        object.__setattr__(self, "sell", sell)
        object.__setattr__(self, "no_trade", no_trade)

    def indices_for(self, action: str) -> tuple:
        if action == BUY:
            return self.buy
        if action == SELL:
            return self.sell
        if action == NO_TRADE:
            return self.no_trade
        raise KeyError(f"unknown action {action!r}")

    def action_of_index(self, j: int) -> str:
        if j in self.buy:
            return BUY
        if j in self.sell:
            return SELL
        return NO_TRADE

    def assignment(self, signals: SignalSpace) -> dict:
        """Mapping signal label -> action."""
        return {label: self.action_of_index(j) for j, label in enumerate(signals.labels)}

    @property
    def all_no_trade(self) -> bool:
        return not self.buy and not self.sell


def validate_structure(structure: SignalStructure) -> None:
    """Check row-stochasticity and strict positivity of the likelihood table.

    Raises
    ------
    RowSumInvalid
        First state whose row mass differs from 1 by more than ``PROB_SUM_TOL``.
    NonPositiveDensity
        First entry that is not strictly positive and finite.
    """
    table = structure.likelihood
    for i in range(structure.n_states):
        row = table[i]
        bad = np.flatnonzero(~(np.isfinite(row) & (row > 0)))
        if bad.size:
            j = int(bad[0])
            raise NonPositiveDensity(i, j, float(row[j]))
        total = float(row.sum())
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise RowSumInvalid(i, total)


def bayes_posterior(belief: Belief, structure: SignalStructure, signal) -> Belief:
    """Posterior after observing one signal: mu'(w) = mu(w) f(s|w) / normalizer."""
    j = structure.signals.index(signal)
    return _posterior_by_index(belief, structure, j)


def _posterior_by_index(belief: Belief, structure: SignalStructure, j: int) -> Belief:
    raw = belief.weights * structure.likelihood[:, j]
    return Belief.from_unnormalized(raw)


def bayes_posterior_set(belief: Belief, structure: SignalStructure, signal_set: Iterable) -> Belief:
    """Posterior after learning only that the signal lies in ``signal_set``,
    i.e. an update with the set likelihood f(S|w) = sum of member columns."""
    labels = list(signal_set)
    if not labels:
        raise EmptySignalSet("signal set must be nonempty")
    # canonical summation order, so unordered inputs stay bit-deterministic
    idx = sorted(structure.signals.index(s) for s in labels)
    raw = belief.weights * structure.set_mass(idx)
    return Belief.from_unnormalized(raw)


def expectation(states: StateSpace, belief: Belief) -> float:
    """Expected asset value under the belief; always inside [w_1, w_n]."""
    return float(states.values @ belief.weights)


def posterior_values(belief: Belief, structure: SignalStructure) -> np.ndarray:
    """E[w | s, H] for every signal column, as one vector.

    Positivity of the likelihood makes every denominator strictly positive
    for any valid belief.
    """
    w = belief.weights
    f_sig = w @ structure.likelihood
    num = (structure.states.values * w) @ structure.likelihood
    return num / f_sig


def action_likelihood(
    structure: SignalStructure,
    partition: SignalPartition,
    eta,
    action: str,
    state_index: int,
) -> float:
    """Probability of observing ``action`` given the state:
    eta/3 + (1 - eta) f(S_action | w).

    The three action likelihoods for a fixed state always sum to 1.
    """
    e = _eta_value(eta)
    mass = structure.set_mass(partition.indices_for(action))[state_index]
    return e / 3.0 + (1.0 - e) * float(mass)


def action_likelihood_vector(
    structure: SignalStructure,
    partition: SignalPartition,
    eta,
    action: str,
) -> np.ndarray:
    """Vectorized :func:`action_likelihood` across all states."""
    e = _eta_value(eta)
    return e / 3.0 + (1.0 - e) * structure.set_mass(partition.indices_for(action))


def update_public_belief_on_action(
    belief: Belief,
    structure: SignalStructure,
    partition: SignalPartition,
    eta,
    action: str,
) -> Belief:
    """Bayes update of the public belief after observing only an action,
    using the mixed noise/informed action likelihood."""
    like = action_likelihood_vector(structure, partition, eta, action)
    return Belief.from_unnormalized(belief.weights * like)

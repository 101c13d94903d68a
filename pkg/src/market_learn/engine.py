"""Zero-profit quote solving, informed-trader decisions, and market stepping.

The market maker posts a bid and an ask such that expected profit is zero on
each side: the ``eta/3`` chance of a noise trade subsidizes the adverse
selection suffered against informed traders.  Rearranged, the zero-profit ask
is exactly the conditional expectation of the asset value given a buy, and
symmetrically for the bid, which is how the solver computes candidates.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import NoConsistentPartition
from .model import (
    BUY,
    NO_TRADE,
    SELL,
    Belief,
    SignalPartition,
    SignalStructure,
    _eta_value,
    action_likelihood_vector,
    expectation,
    update_public_belief_on_action,
)

__all__ = [
    "BOUNDARY_BAND",
    "Quotes",
    "MarketState",
    "informative_action",
    "solve_quotes",
    "initial_market_state",
    "step_market",
    "detect_cascade",
    "transaction_price",
]

log = logging.getLogger(__name__)

# Signals whose conditional value sits within this band of a quote are
# treated as boundary cases and classified no-trade, mirroring the strict
# inequalities of the informed decision rule.  The band also keeps the
# partition well defined when a belief has numerically collapsed and all
# conditional values agree to ~1e-15.
BOUNDARY_BAND = 1e-9

# Residual tolerance for the zero-profit self-check run on every solve.
ZERO_PROFIT_TOL = 1e-10


@dataclass(frozen=True)
class Quotes:
    bid: float
    ask: float

    def __post_init__(self):
        if not (self.bid <= self.ask):
            raise NoConsistentPartition(f"bid {self.bid} above ask {self.ask}")


@dataclass(frozen=True)
class MarketState:
    """Public belief plus the quotes/partition it induces, at one date."""

    belief: Belief
    quotes: Quotes
    partition: SignalPartition
    period: int = 0


def informative_action(posterior_value: float, quotes: Quotes) -> str:
    """Decision rule of an informed trader: buy strictly above the ask,
    sell strictly below the bid, otherwise no trade."""
    if posterior_value > quotes.ask:
        return BUY
    if posterior_value < quotes.bid:
        return SELL
    return NO_TRADE


def _greedy_side(
    v: np.ndarray,
    order: np.ndarray,
    num_sig: np.ndarray,
    f_sig: np.ndarray,
    exp_val: float,
    eta: float,
    sense: int,
    band: float,
):
    """Grow one side of the partition while the next signal strictly beats
    the running quote by more than ``band``.

    The running quote is the conditional expectation of the value given the
    candidate set, which rises (falls) strictly below (above) each newly
    included signal's value; the scan therefore terminates at the largest
    self-consistent set, equivalently the tightest zero-profit quote.
    """
    noise = eta / 3.0
    informed = 1.0 - eta
    num = noise * exp_val
    den = noise
    quote = exp_val
    k = 0
    m = order.size
    while k < m and sense * (v[order[k]] - quote) > band:
        num += informed * num_sig[order[k]]
        den += informed * f_sig[order[k]]
        quote = num / den
        k += 1
    return k, float(quote)


def solve_quotes(
    belief: Belief,
    structure: SignalStructure,
    eta,
    band: float = BOUNDARY_BAND,
) -> tuple[Quotes, SignalPartition]:
    """Solve the jointly consistent zero-profit quotes and signal partition.

    Candidate buy sets are prefixes of the signals sorted by descending
    conditional value; the candidate ask for a set is E[w | buy] computed in
    closed form from the mixed action likelihood.  A set is consistent when
    every included signal's value exceeds the ask and every excluded one does
    not; among consistent sets the largest (lowest ask) wins, and the sell
    side mirrors this with the highest consistent bid.

    Degenerate noise rates are defined rather than rejected: at ``eta = 1``
    both quotes collapse to the current expectation, and at ``eta = 0`` the
    only zero-profit configuration is no trade, with the quotes placed at the
    extreme conditional values.

    Returns
    -------
    (Quotes, SignalPartition)
        The partition's buy/sell sets are exactly the signals strictly
        beyond the returned quotes (up to ``band``).
    """
    e = _eta_value(eta)
    m = structure.n_signals
    exp_val = expectation(structure.states, belief)
    w = belief.weights
    f_sig = w @ structure.likelihood
    num_sig = (structure.states.values * w) @ structure.likelihood
    v = num_sig / f_sig

    if e >= 1.0:
        quotes = Quotes(bid=exp_val, ask=exp_val)
        return quotes, SignalPartition(m)
    if e <= 0.0:
        quotes = Quotes(bid=min(exp_val, float(v.min())), ask=max(exp_val, float(v.max())))
        return quotes, SignalPartition(m)

    order_desc = np.argsort(-v, kind="stable")
    order_asc = np.argsort(v, kind="stable")
    k_buy, ask = _greedy_side(v, order_desc, num_sig, f_sig, exp_val, e, +1, band)
    k_sell, bid = _greedy_side(v, order_asc, num_sig, f_sig, exp_val, e, -1, band)

    buy = tuple(int(j) for j in order_desc[:k_buy])
    sell = tuple(int(j) for j in order_asc[:k_sell])
    if set(buy) & set(sell):
        raise NoConsistentPartition(
            f"buy and sell sets overlap: {buy} / {sell} (belief {belief.weights!r})"
        )
    partition = SignalPartition(m, buy=buy, sell=sell)
    quotes = Quotes(bid=bid, ask=ask)

    _check_zero_profit(belief, structure, partition, e, quotes, exp_val)

    if k_buy and log.isEnabledFor(logging.DEBUG):
        # Multiple consistent prefixes can exist with discrete signals; the
        # greedy scan lands on the largest, so any smaller consistent prefix
        # is worth surfacing when debugging quote selection.
        smaller = [
            k for k in range(k_buy)
            if _prefix_consistent(v, order_desc, num_sig, f_sig, exp_val, e, k, band)
        ]
        if smaller:
            log.debug("multiple consistent buy sets (sizes %s); kept %d (lowest ask)",
                      smaller + [k_buy], k_buy)

    return quotes, partition


def _prefix_consistent(v, order, num_sig, f_sig, exp_val, eta, k, band) -> bool:
    noise, informed = eta / 3.0, 1.0 - eta
    num = noise * exp_val + informed * num_sig[order[:k]].sum()
    den = noise + informed * f_sig[order[:k]].sum()
    q = num / den
    vs = v[order]
    inc_ok = k == 0 or np.all(vs[:k] - q > band)
    exc_ok = k == vs.size or np.all(vs[k:] - q <= band)
    return bool(inc_ok and exc_ok)


def _check_zero_profit(belief, structure, partition, eta, quotes, exp_val):
    """Verify, through the action-likelihood route, that each quote equals
    the conditional expectation given its own trade event."""
    for action, quote, nonempty in (
        (BUY, quotes.ask, bool(partition.buy)),
        (SELL, quotes.bid, bool(partition.sell)),
    ):
        like = action_likelihood_vector(structure, partition, eta, action)
        mass = float(belief.weights @ like)
        cond = float((structure.states.values * belief.weights) @ like) / mass
        if abs(cond - quote) > ZERO_PROFIT_TOL * max(1.0, abs(quote)):
            raise NoConsistentPartition(
                f"{action} quote {quote} deviates from conditional expectation {cond}"
            )
        if not nonempty and abs(quote - exp_val) > ZERO_PROFIT_TOL * max(1.0, abs(exp_val)):
            raise NoConsistentPartition(
                f"empty {action} side must quote the expectation, got {quote} vs {exp_val}"
            )


def initial_market_state(belief: Belief, structure: SignalStructure, eta) -> MarketState:
    quotes, partition = solve_quotes(belief, structure, eta)
    return MarketState(belief=belief, quotes=quotes, partition=partition, period=0)


def step_market(state: MarketState, structure: SignalStructure, eta, action: str) -> MarketState:
    """Advance one period on an observed action: update the public belief on
    the action likelihood, then re-solve quotes for the new belief."""
    new_belief = update_public_belief_on_action(state.belief, structure, state.partition, eta, action)
    quotes, partition = solve_quotes(new_belief, structure, eta)
    return MarketState(belief=new_belief, quotes=quotes, partition=partition, period=state.period + 1)


def detect_cascade(partition: SignalPartition) -> bool:
    """True when no signal can trigger a trade, so no action is informative."""
    return partition.all_no_trade


def transaction_price(quotes: Quotes, action: str, last_price: float) -> float:
    """Realized transaction price: the ask on a buy, the bid on a sell, and
    the previous price when nothing trades."""
    if action == BUY:
        return quotes.ask
    if action == SELL:
        return quotes.bid
    return last_price

"""Exact one-step identity checks and randomized property suites.

The one-step checks enumerate the three-action space in full, so their
tolerances cover floating-point error only; nothing here is sampled.  The
long-horizon support check is the exception: it is an explicitly statistical
surrogate and reports its thresholds alongside the result.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .conditions import is_pairwise_informative
from .engine import MarketState, initial_market_state
from .errors import DegenerateBelief, PreconditionFailed
from .model import (
    ACTIONS,
    BUY,
    NO_TRADE,
    SELL,
    Belief,
    SignalSpace,
    SignalStructure,
    StateSpace,
    action_likelihood_vector,
    expectation,
)
from .simulate import PRIVATE, ScenarioConfig, run_private_episode

__all__ = [
    "ONE_STEP_TOL",
    "DeviationReport",
    "check_belief_martingale",
    "check_price_martingale",
    "check_likelihood_ratio_martingale",
    "check_price_directions",
    "check_limit_support_3state",
    "random_structure",
    "random_belief",
    "random_market_state",
    "random_mlrp_structure",
    "run_martingale_suite",
]

ONE_STEP_TOL = 1e-10


@dataclass(frozen=True)
class DeviationReport:
    check_name: str
    max_abs_deviation: float
    tolerance: float
    passed: bool
    witness: Optional[dict] = None
    detail: str = ""

    def as_dict(self) -> dict:
        return {
            "check_name": self.check_name,
            "max_abs_deviation": self.max_abs_deviation,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "witness": self.witness,
            "detail": self.detail,
        }


def _report(name, deviation, tol, witness=None, detail=""):
    return DeviationReport(
        check_name=name,
        max_abs_deviation=float(deviation),
        tolerance=tol,
        passed=bool(deviation <= tol),
        witness=witness,
        detail=detail,
    )


def _action_mix(state: MarketState, structure: SignalStructure, eta):
    """Per action: (probability of the action, stepped belief)."""
    mix = []
    for action in ACTIONS:
        like = action_likelihood_vector(structure, state.partition, eta, action)
        prob = float(state.belief.weights @ like)
        stepped = Belief.from_unnormalized(state.belief.weights * like)
        mix.append((action, prob, like, stepped))
    return mix


def check_belief_martingale(state: MarketState, structure: SignalStructure, eta,
                            tol: float = ONE_STEP_TOL) -> DeviationReport:
    """The public belief is a martingale: averaging the three possible
    next-period beliefs by their action probabilities recovers the current
    belief coordinate by coordinate."""
    mixed = np.zeros(structure.n_states)
    for _, prob, _, stepped in _action_mix(state, structure, eta):
        mixed += prob * stepped.weights
    deviation = np.abs(mixed - state.belief.weights)
    worst = int(np.argmax(deviation))
    return _report(
        "belief_martingale",
        deviation[worst],
        tol,
        witness={"state_index": worst},
        detail="sum_a P(a) mu'(w|a) compared against mu(w) over all states",
    )


def check_price_martingale(state: MarketState, structure: SignalStructure, eta,
                           tol: float = ONE_STEP_TOL) -> DeviationReport:
    """The expectation-price is a martingale: sum_a P(a) E[w|a] equals the
    current expectation.  On the trading branches E[w|a] coincides with the
    posted quote (zero-profit), which is asserted as part of the check."""
    exp_val = expectation(structure.states, state.belief)
    mixed = 0.0
    quote_gap = 0.0
    for action, prob, _, stepped in _action_mix(state, structure, eta):
        cond = expectation(structure.states, stepped)
        mixed += prob * cond
        if action == BUY and state.partition.buy:
            quote_gap = max(quote_gap, abs(cond - state.quotes.ask))
        if action == SELL and state.partition.sell:
            quote_gap = max(quote_gap, abs(cond - state.quotes.bid))
    deviation = max(abs(mixed - exp_val), quote_gap)
    return _report(
        "price_martingale",
        deviation,
        tol,
        witness={"expectation": exp_val, "mixed": mixed, "quote_gap": quote_gap},
        detail="sum_a P(a) E[w|a,H] vs E[w|H]; trading quotes double-checked against E[w|a,H]",
    )


def check_likelihood_ratio_martingale(state: MarketState, structure: SignalStructure, eta,
                                      true_state: int, tol: float = ONE_STEP_TOL) -> DeviationReport:
    """The wrong-over-right belief odds are a martingale under the true
    state's action law: sum_a f(a|w*) lambda'(a) equals lambda."""
    weights = state.belief.weights
    if weights[true_state] <= 0.0:
        raise DegenerateBelief(f"belief places zero weight on state index {true_state}")
    lam = float((1.0 - weights[true_state]) / weights[true_state])
    mixed = 0.0
    for _, _, like, stepped in _action_mix(state, structure, eta):
        prob_true = float(like[true_state])
        w_next = stepped.weights[true_state]
        lam_next = float((1.0 - w_next) / w_next) if w_next > 0 else np.inf
        mixed += prob_true * lam_next
    deviation = abs(mixed - lam)
    return _report(
        "likelihood_ratio_martingale",
        deviation,
        tol,
        witness={"lambda": lam, "mixed": mixed, "true_state": true_state},
        detail="odds of incorrect states vs the true state, averaged under the true-state action law",
    )


def check_price_directions(state: MarketState, structure: SignalStructure, eta,
                           tol: float = ONE_STEP_TOL) -> DeviationReport:
    """Directional effect of each action on the expectation: a buy with a
    nonempty buy set strictly raises it, a sell strictly lowers it, and the
    no-trade expectation equals the current one whenever the no-trade signal
    mass is state-independent (it is not in general: a state-dependent
    no-trade region carries information of its own, and then only the
    conditional-expectation identity E[w|NT,H] holds)."""
    exp_val = expectation(structure.states, state.belief)
    violation = 0.0
    details = {}
    for action, prob, like, stepped in _action_mix(state, structure, eta):
        cond = expectation(structure.states, stepped)
        details[action] = cond
        if action == BUY and state.partition.buy:
            violation = max(violation, exp_val - cond)  # must be strictly below zero
        elif action == SELL and state.partition.sell:
            violation = max(violation, cond - exp_val)
        elif action == NO_TRADE:
            if float(like.max() - like.min()) <= 1e-12:
                violation = max(violation, abs(cond - exp_val))
    return _report(
        "price_directions",
        violation,
        tol,
        witness={"expectation": exp_val, "conditional": details},
        detail="E[w|B,H] > E[w|H] > E[w|S,H] on nonempty sides; no-trade preserves it "
               "when its signal mass is state-independent",
    )


def check_limit_support_3state(
    structure: SignalStructure,
    eta,
    trials: int = 100,
    horizon: int = 3000,
    slack: float = 0.05,
    min_pass_fraction: float = 0.95,
    seed: int = 0,
) -> DeviationReport:
    """Statistical surrogate for vertex convergence with at most three
    states: after a long private-signal run, every belief coordinate should
    sit within ``slack`` of {0, 1} in at least ``min_pass_fraction`` of
    trials.  Requires a pairwise informative structure with n <= 3."""
    if structure.n_states > 3:
        raise PreconditionFailed(f"check requires at most 3 states, got {structure.n_states}")
    if not is_pairwise_informative(structure).holds:
        raise PreconditionFailed("check requires a pairwise informative structure")

    config = ScenarioConfig(
        structure=structure,
        prior=Belief.uniform(structure.n_states),
        eta=float(eta.eta) if hasattr(eta, "eta") else float(eta),
        mode=PRIVATE,
        horizon=horizon,
        episodes=trials,
        seed=seed,
    )
    distances = []
    for i in range(trials):
        result = run_private_episode(config, i)
        final = result.belief_path[-1]
        distances.append(float(np.minimum(final, 1.0 - final).max()))
    distances = np.array(distances)
    ok_fraction = float((distances <= slack).mean())
    deviation = max(0.0, 1.0 - ok_fraction)
    worst = int(np.argmax(distances))
    return _report(
        "limit_support_3state",
        deviation,
        1.0 - min_pass_fraction,
        witness={
            "trials": trials,
            "horizon": horizon,
            "slack": slack,
            "min_pass_fraction": min_pass_fraction,
            "fraction_near_vertex": ok_fraction,
            "worst_episode": worst,
            "worst_distance": float(distances[worst]),
        },
        detail=f"statistical check: {ok_fraction:.1%} of {trials} trials ended within "
               f"{slack} of a belief vertex (needs >= {min_pass_fraction:.0%})",
    )


def random_structure(rng: np.random.Generator, n_states: Optional[int] = None,
                     n_signals: Optional[int] = None, floor: float = 1e-3) -> SignalStructure:
    """Random strictly-positive row-stochastic structure over a random
    strictly increasing value grid.  Rows are flat-Dirichlet draws floored at
    ``floor`` and renormalized so no signal can exclude any state."""
    n = int(n_states) if n_states else int(rng.integers(2, 5))
    m = int(n_signals) if n_signals else int(rng.integers(2, 6))
    rows = rng.dirichlet(np.ones(m), size=n)
    rows = np.maximum(rows, floor)
    rows /= rows.sum(axis=1, keepdims=True)
    start = float(rng.uniform(-1.0, 1.0))
    gaps = rng.uniform(0.3, 1.2, size=n - 1)
    values = start + np.concatenate([[0.0], np.cumsum(gaps)])
    labels = tuple(f"s{j + 1}" for j in range(m))
    return SignalStructure(StateSpace(values), SignalSpace(labels), rows)


def random_belief(rng: np.random.Generator, n: int, floor: float = 1e-3) -> Belief:
    raw = rng.dirichlet(np.ones(n))
    raw = np.maximum(raw, floor)
    return Belief.from_unnormalized(raw)


def random_mlrp_structure(rng: np.random.Generator, n_states: Optional[int] = None,
                          n_signals: Optional[int] = None) -> SignalStructure:
    """Structure with the strict monotone likelihood ratio property by
    construction: rows proportional to exp(theta_i x_j) with both parameter
    grids strictly increasing (log-supermodular table)."""
    n = int(n_states) if n_states else int(rng.integers(2, 5))
    m = int(n_signals) if n_signals else int(rng.integers(2, 6))
    theta = np.cumsum(rng.uniform(0.4, 1.0, size=n))
    x = np.cumsum(rng.uniform(0.4, 1.0, size=m))
    rows = np.exp(np.outer(theta, x))
    rows /= rows.sum(axis=1, keepdims=True)
    start = float(rng.uniform(-1.0, 1.0))
    gaps = rng.uniform(0.3, 1.2, size=n - 1)
    values = start + np.concatenate([[0.0], np.cumsum(gaps)])
    labels = tuple(f"s{j + 1}" for j in range(m))
    return SignalStructure(StateSpace(values), SignalSpace(labels), rows)


def random_market_state(rng: np.random.Generator, structure: Optional[SignalStructure] = None,
                        eta: Optional[float] = None):
    """A consistent market state at a random full-support belief; returns
    (state, structure, eta)."""
    structure = structure if structure is not None else random_structure(rng)
    eta = eta if eta is not None else float(rng.uniform(0.05, 0.95))
    belief = random_belief(rng, structure.n_states)
    return initial_market_state(belief, structure, eta), structure, eta


def run_martingale_suite(trials: int = 1000, seed: int = 0,
                         structure: Optional[SignalStructure] = None,
                         eta: Optional[float] = None,
                         tol: float = ONE_STEP_TOL) -> list[DeviationReport]:
    """Run the four one-step checks over ``trials`` randomized states and
    aggregate the worst deviation per check."""
    rng = np.random.default_rng(seed)
    names = ["belief_martingale", "price_martingale", "likelihood_ratio_martingale", "price_directions"]
    worst = {name: (0.0, None) for name in names}

    for trial in range(trials):
        state, struct, e = random_market_state(rng, structure=structure, eta=eta)
        true_state = int(rng.integers(0, struct.n_states))
        reports = [
            check_belief_martingale(state, struct, e, tol=tol),
            check_price_martingale(state, struct, e, tol=tol),
            check_likelihood_ratio_martingale(state, struct, e, true_state, tol=tol),
            check_price_directions(state, struct, e, tol=tol),
        ]
        for report in reports:
            if report.max_abs_deviation >= worst[report.check_name][0]:
                worst[report.check_name] = (report.max_abs_deviation, trial)

    return [
        _report(
            name,
            deviation,
            tol,
            witness={"worst_trial": trial, "trials": trials, "seed": seed},
            detail=f"worst deviation across {trials} randomized market states",
        )
        for name, (deviation, trial) in worst.items()
    ]

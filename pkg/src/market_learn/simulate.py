"""Episode and Monte Carlo drivers for the private- and public-signal markets.

Reproducibility contract: episode ``i`` of a run draws its randomness from
``numpy.random.default_rng(SeedSequence((seed, i)))``, so results are
bit-identical for a given (config, seed) regardless of worker count or
episode scheduling.  Within an episode all randomness is drawn up front in a
fixed order (true state, trader types, signals, noise actions), which also
lets the two market modes share identical draws in comparisons.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .engine import (
    detect_cascade,
    initial_market_state,
    step_market,
    transaction_price,
)
from .errors import ConfigInvalid
from .model import (
    ACTIONS,
    Belief,
    SignalStructure,
    bayes_posterior,
    expectation,
)

__all__ = [
    "PRIVATE",
    "PUBLIC",
    "ScenarioConfig",
    "EpisodeResult",
    "StateBreakdown",
    "MonteCarloSummary",
    "ModeComparison",
    "RngContract",
    "run_private_episode",
    "run_public_episode",
    "run_episodes",
    "run_monte_carlo",
    "summarize_episodes",
    "compare_modes",
    "worker_count",
]

PRIVATE = "private"
PUBLIC = "public"

THREADS_ENV_VAR = "MARKET_LEARN_THREADS"


@dataclass(frozen=True)
class RngContract:
    """Derivation rule for per-episode random streams."""

    seed: int

    def episode_rng(self, episode_index: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence((self.seed, episode_index)))


@dataclass(frozen=True)
class ScenarioConfig:
    structure: SignalStructure
    prior: Belief
    eta: float
    mode: str
    horizon: int = 1000
    episodes: int = 100
    seed: int = 0
    convergence_tol: float = 0.1
    true_state: Optional[int] = None  # fixed-true-state override; drawn from the prior when None

    def __post_init__(self):
        if self.mode not in (PRIVATE, PUBLIC):
            raise ConfigInvalid(f"mode must be '{PRIVATE}' or '{PUBLIC}', got {self.mode!r}")
        if len(self.prior) != self.structure.n_states:
            raise ConfigInvalid("prior length does not match the state space")
        if not self.prior.full_support:
            raise ConfigInvalid("prior must have full support")
        if not (0.0 <= self.eta <= 1.0):
            raise ConfigInvalid(f"eta must lie in [0, 1], got {self.eta!r}")
        if self.horizon < 1:
            raise ConfigInvalid("horizon must be at least 1")
        if self.episodes < 1:
            raise ConfigInvalid("episodes must be at least 1")
        if not (self.convergence_tol > 0):
            raise ConfigInvalid("convergence_tol must be positive")
        if self.true_state is not None and not (0 <= self.true_state < self.structure.n_states):
            raise ConfigInvalid(f"true_state index {self.true_state} out of range")

    def with_overrides(self, **kwargs) -> "ScenarioConfig":
        return replace(self, **kwargs)

    @property
    def rng_contract(self) -> RngContract:
        return RngContract(self.seed)


@dataclass(frozen=True)
class EpisodeResult:
    episode: int
    mode: str
    true_state: int
    true_value: float
    price_path: np.ndarray       # length horizon + 1, starts at the prior expectation
    belief_path: np.ndarray      # shape (horizon + 1, n_states), full resolution
    cascade_time: Optional[int]  # first date with an all-no-trade partition (private mode)
    final_belief_on_truth: float

    @property
    def final_price(self) -> float:
        return float(self.price_path[-1])

    def learned(self, convergence_tol: float) -> bool:
        return abs(self.final_price - self.true_value) < convergence_tol


@dataclass(frozen=True)
class StateBreakdown:
    state_index: int
    state_value: float
    episodes: int
    learned_fraction: float
    cascade_fraction: float
    mean_abs_price_error: float

    def as_dict(self) -> dict:
        return {
            "state_index": self.state_index,
            "state_value": self.state_value,
            "episodes": self.episodes,
            "learned_fraction": self.learned_fraction,
            "cascade_fraction": self.cascade_fraction,
            "mean_abs_price_error": self.mean_abs_price_error,
        }


@dataclass(frozen=True)
class MonteCarloSummary:
    episodes: int
    learned_fraction: float
    mean_abs_price_error: float
    cascade_fraction: float
    per_state: tuple = field(default_factory=tuple)

    def as_dict(self) -> dict:
        return {
            "episodes": self.episodes,
            "learned_fraction": self.learned_fraction,
            "mean_abs_price_error": self.mean_abs_price_error,
            "cascade_fraction": self.cascade_fraction,
            "per_state": [s.as_dict() for s in self.per_state],
        }


@dataclass(frozen=True)
class ModeComparison:
    """Side-by-side summaries from shared per-episode draws.

    ``nesting_ok`` reports the empirical containment check: the public-signal
    market should learn at least as often as the private one, up to ``slack``
    of Monte Carlo noise.
    """

    private: MonteCarloSummary
    public: MonteCarloSummary
    slack: float
    nesting_ok: bool

    def as_dict(self) -> dict:
        return {
            "private": self.private.as_dict(),
            "public": self.public.as_dict(),
            "slack": self.slack,
            "nesting_ok": self.nesting_ok,
        }


@dataclass(frozen=True)
class _EpisodeDraws:
    true_state: int
    informative: np.ndarray    # bool per period
    signals: np.ndarray        # signal column index per period
    noise_actions: np.ndarray  # 0/1/2 -> B/S/NT per period


def _draw_episode(config: ScenarioConfig, rng: np.random.Generator) -> _EpisodeDraws:
    n = config.structure.n_states
    t = config.horizon
    if config.true_state is None:
        true_state = int(rng.choice(n, p=config.prior.weights))
    else:
        true_state = config.true_state
    informative = rng.random(t) >= config.eta
    signals = rng.choice(config.structure.n_signals, size=t, p=config.structure.likelihood[true_state])
    noise_actions = rng.integers(0, 3, size=t)
    return _EpisodeDraws(true_state, informative, signals, noise_actions)


def run_private_episode(config: ScenarioConfig, episode_index: int) -> EpisodeResult:
    """One private-signal episode: each period either a noise trader acts
    uniformly or an informed trader acts on her signal's partition class;
    the market maker updates the public belief from the action alone.

    Once the partition is all-no-trade nothing can move the belief or the
    price (every action likelihood is state-independent), so the remaining
    path is filled as constant.
    """
    rng = config.rng_contract.episode_rng(episode_index)
    draws = _draw_episode(config, rng)
    structure, eta = config.structure, config.eta
    t_max = config.horizon

    state = initial_market_state(config.prior, structure, eta)
    price = expectation(structure.states, config.prior)
    prices = np.empty(t_max + 1)
    beliefs = np.empty((t_max + 1, structure.n_states))
    prices[0] = price
    beliefs[0] = state.belief.weights
    cascade_time: Optional[int] = 0 if detect_cascade(state.partition) else None

    for t in range(t_max):
        if cascade_time is not None:
            prices[t + 1:] = price
            beliefs[t + 1:] = state.belief.weights
            break
        if draws.informative[t]:
            action = state.partition.action_of_index(int(draws.signals[t]))
        else:
            action = ACTIONS[int(draws.noise_actions[t])]
        price = transaction_price(state.quotes, action, price)
        state = step_market(state, structure, eta, action)
        prices[t + 1] = price
        beliefs[t + 1] = state.belief.weights
        if detect_cascade(state.partition):
            cascade_time = state.period

    return EpisodeResult(
        episode=episode_index,
        mode=PRIVATE,
        true_state=draws.true_state,
        true_value=float(structure.states.values[draws.true_state]),
        price_path=prices,
        belief_path=beliefs,
        cascade_time=cascade_time,
        final_belief_on_truth=float(state.belief.weights[draws.true_state]),
    )


def run_public_episode(config: ScenarioConfig, episode_index: int) -> EpisodeResult:
    """One public-signal episode: informative periods reveal the signal to
    everyone and the public belief updates by Bayes rule; noise periods leave
    it untouched.  The price is the current expectation and nobody trades."""
    rng = config.rng_contract.episode_rng(episode_index)
    draws = _draw_episode(config, rng)
    structure = config.structure
    t_max = config.horizon

    belief = config.prior
    prices = np.empty(t_max + 1)
    beliefs = np.empty((t_max + 1, structure.n_states))
    prices[0] = expectation(structure.states, belief)
    beliefs[0] = belief.weights

    for t in range(t_max):
        if draws.informative[t]:
            belief = bayes_posterior(belief, structure, structure.signals.labels[int(draws.signals[t])])
        prices[t + 1] = expectation(structure.states, belief)
        beliefs[t + 1] = belief.weights

    return EpisodeResult(
        episode=episode_index,
        mode=PUBLIC,
        true_state=draws.true_state,
        true_value=float(structure.states.values[draws.true_state]),
        price_path=prices,
        belief_path=beliefs,
        cascade_time=None,
        final_belief_on_truth=float(belief.weights[draws.true_state]),
    )


def _run_one(config: ScenarioConfig, episode_index: int) -> EpisodeResult:
    if config.mode == PRIVATE:
        return run_private_episode(config, episode_index)
    return run_public_episode(config, episode_index)


def worker_count(requested: Optional[int] = None) -> int:
    """Effective parallelism: the requested count capped by the
    MARKET_LEARN_THREADS environment variable (default 1)."""
    cap = os.environ.get(THREADS_ENV_VAR)
    cap_value = max(1, int(cap)) if cap else None
    if requested is None:
        requested = cap_value if cap_value is not None else 1
    return max(1, min(requested, cap_value) if cap_value is not None else requested)


def run_episodes(config: ScenarioConfig, workers: Optional[int] = None) -> list[EpisodeResult]:
    """All episodes of the scenario, in episode order.

    Episodes own independent random streams, so any worker count produces
    identical results.
    """
    count = worker_count(workers)
    indices = range(config.episodes)
    if count <= 1 or config.episodes == 1:
        return [_run_one(config, i) for i in indices]
    with ProcessPoolExecutor(max_workers=count) as pool:
        chunk = max(1, config.episodes // (count * 4))
        return list(pool.map(_run_one, [config] * config.episodes, indices, chunksize=chunk))


def summarize_episodes(results: list[EpisodeResult], config: ScenarioConfig) -> MonteCarloSummary:
    tol = config.convergence_tol
    learned = np.array([r.learned(tol) for r in results])
    errors = np.array([abs(r.final_price - r.true_value) for r in results])
    cascaded = np.array([r.cascade_time is not None for r in results])
    states = np.array([r.true_state for r in results])

    per_state = []
    for i in range(config.structure.n_states):
        mask = states == i
        count = int(mask.sum())
        if count == 0:
            continue
        per_state.append(
            StateBreakdown(
                state_index=i,
                state_value=float(config.structure.states.values[i]),
                episodes=count,
                learned_fraction=float(learned[mask].mean()),
                cascade_fraction=float(cascaded[mask].mean()),
                mean_abs_price_error=float(errors[mask].mean()),
            )
        )

    return MonteCarloSummary(
        episodes=len(results),
        learned_fraction=float(learned.mean()),
        mean_abs_price_error=float(errors.mean()),
        cascade_fraction=float(cascaded.mean()),
        per_state=tuple(per_state),
    )


def run_monte_carlo(config: ScenarioConfig, workers: Optional[int] = None) -> MonteCarloSummary:
    return summarize_episodes(run_episodes(config, workers=workers), config)


def compare_modes(config: ScenarioConfig, slack: float = 0.05, workers: Optional[int] = None) -> ModeComparison:
    """Run both market modes on identical per-episode draws (same true
    state, same trader types, same signal stream) and compare summaries."""
    private_cfg = config.with_overrides(mode=PRIVATE)
    public_cfg = config.with_overrides(mode=PUBLIC)
    private = run_monte_carlo(private_cfg, workers=workers)
    public = run_monte_carlo(public_cfg, workers=workers)
    nesting_ok = public.learned_fraction >= private.learned_fraction - slack
    return ModeComparison(private=private, public=public, slack=slack, nesting_ok=nesting_ok)

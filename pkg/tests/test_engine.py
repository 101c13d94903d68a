import numpy as np
import pytest

from market_learn import (
    Belief,
    Quotes,
    SignalSpace,
    SignalStructure,
    StateSpace,
    binary_symmetric,
    detect_cascade,
    expectation,
    four_state_cascade,
    informative_action,
    initial_market_state,
    posterior_values,
    solve_quotes,
    step_market,
    transaction_price,
)
from market_learn.engine import BOUNDARY_BAND


def enumeration_oracle(belief, structure, eta, band=BOUNDARY_BAND):
    """Independent reference: enumerate every subset as a candidate buy (and
    sell) set, solve the zero-profit equation for the quote as a linear
    equation, keep consistent subsets, and pick the lowest ask / highest bid.
    """
    w = belief.weights
    values = structure.states.values
    exp_val = float(values @ w)
    f_sig = w @ structure.likelihood
    v = ((values * w) @ structure.likelihood) / f_sig
    noise, informed = eta / 3.0, 1.0 - eta
    m = structure.n_signals

    best_ask, best_bid = None, None
    for mask in range(2 ** m):
        sel = [j for j in range(m) if mask >> j & 1]
        rest = [j for j in range(m) if not mask >> j & 1]
        # zero profit: noise*(q - E) = informed * sum_sel (v_s - q) f(s|H)
        mass = f_sig[sel].sum()
        payoff = float((v[sel] * f_sig[sel]).sum())
        q = (noise * exp_val + informed * payoff) / (noise + informed * mass)
        if all(v[j] - q > band for j in sel) and all(v[j] - q <= band for j in rest):
            if best_ask is None or q < best_ask[0]:
                best_ask = (q, tuple(sorted(sel)))
        if all(q - v[j] > band for j in sel) and all(q - v[j] <= band for j in rest):
            if best_bid is None or q > best_bid[0]:
                best_bid = (q, tuple(sorted(sel)))
    return best_ask, best_bid


def zero_profit_residual(belief, structure, eta, quote, signal_set):
    w = belief.weights
    values = structure.states.values
    exp_val = float(values @ w)
    f_sig = w @ structure.likelihood
    v = ((values * w) @ structure.likelihood) / f_sig
    informed_leg = sum((v[j] - quote) * f_sig[j] for j in signal_set)
    return (eta / 3.0) * (quote - exp_val) - (1.0 - eta) * informed_leg


# ---------------------------------------------------------------- decision rule

def test_informative_action_strict_inequalities():
    quotes = Quotes(bid=0.32, ask=0.68)
    assert informative_action(0.8, quotes) == "B"
    assert informative_action(0.2, quotes) == "S"
    assert informative_action(0.68, quotes) == "NT"
    assert informative_action(0.32, quotes) == "NT"
    assert informative_action(0.5, quotes) == "NT"


# ---------------------------------------------------------------- quote solving

def test_binary_quotes_match_hand_solution():
    # enumeration over buy sets gives S^B={h} with ask = E[w|B] = 0.68 and
    # the mirror sell side at 0.32 (values are exact rationals: 24/75 etc.)
    structure = binary_symmetric(0.8)
    quotes, partition = solve_quotes(Belief.uniform(2), structure, 0.5)
    assert quotes.ask == pytest.approx(0.68, abs=1e-12)
    assert quotes.bid == pytest.approx(0.32, abs=1e-12)
    assert partition.assignment(structure.signals) == {"h": "B", "l": "S"}
    assert not detect_cascade(partition)


def test_four_state_uniform_collapses_to_no_trade():
    structure = four_state_cascade()
    quotes, partition = solve_quotes(Belief.uniform(4), structure, 0.5)
    assert quotes.ask == pytest.approx(1.5, abs=1e-12)
    assert quotes.bid == pytest.approx(1.5, abs=1e-12)
    assert partition.all_no_trade
    assert detect_cascade(partition)


def test_quotes_pure_noise_collapse_to_expectation():
    structure = binary_symmetric(0.8)
    prior = Belief(np.array([0.3, 0.7]))
    quotes, partition = solve_quotes(prior, structure, 1.0)
    assert quotes.bid == quotes.ask == pytest.approx(0.7, abs=1e-12)
    assert partition.all_no_trade


def test_quotes_no_noise_shut_the_market():
    # without noise traders no nonempty side can break even; quotes move to
    # the extreme conditional values and nothing trades
    structure = binary_symmetric(0.8)
    quotes, partition = solve_quotes(Belief.uniform(2), structure, 0.0)
    assert partition.all_no_trade
    values = posterior_values(Belief.uniform(2), structure)
    assert quotes.ask == pytest.approx(values.max(), abs=1e-12)
    assert quotes.bid == pytest.approx(values.min(), abs=1e-12)


def test_zero_profit_residual_binary():
    structure = binary_symmetric(0.8)
    quotes, partition = solve_quotes(Belief.uniform(2), structure, 0.5)
    assert abs(zero_profit_residual(Belief.uniform(2), structure, 0.5, quotes.ask, partition.buy)) < 1e-12
    assert abs(zero_profit_residual(Belief.uniform(2), structure, 0.5, quotes.bid, partition.sell)) < 1e-12


def test_solver_matches_enumeration_oracle_on_random_scenarios():
    rng = np.random.default_rng(5)
    for _ in range(60):
        n = int(rng.integers(2, 5))
        m = int(rng.integers(2, 6))
        rows = np.maximum(rng.dirichlet(np.ones(m), size=n), 1e-3)
        rows /= rows.sum(axis=1, keepdims=True)
        structure = SignalStructure(
            StateSpace(np.sort(rng.uniform(0, 3, size=n)) + np.arange(n) * 1e-6),
            SignalSpace(tuple(f"s{j}" for j in range(m))),
            rows,
        )
        belief = Belief.from_unnormalized(rng.dirichlet(np.ones(n)) + 1e-3)
        eta = float(rng.uniform(0.05, 0.95))
        quotes, partition = solve_quotes(belief, structure, eta)
        (oracle_ask, oracle_buy), (oracle_bid, oracle_sell) = enumeration_oracle(belief, structure, eta)
        assert tuple(sorted(partition.buy)) == oracle_buy
        assert tuple(sorted(partition.sell)) == oracle_sell
        assert quotes.ask == pytest.approx(oracle_ask, abs=1e-10)
        assert quotes.bid == pytest.approx(oracle_bid, abs=1e-10)
        assert abs(zero_profit_residual(belief, structure, eta, quotes.ask, partition.buy)) < 1e-10
        assert abs(zero_profit_residual(belief, structure, eta, quotes.bid, partition.sell)) < 1e-10


def test_price_bracket_and_strictness():
    rng = np.random.default_rng(6)
    structure = four_state_cascade()
    for _ in range(50):
        belief = Belief.from_unnormalized(rng.dirichlet(np.ones(4)) + 1e-3)
        eta = float(rng.uniform(0.05, 0.95))
        quotes, partition = solve_quotes(belief, structure, eta)
        exp_val = expectation(structure.states, belief)
        assert quotes.bid <= exp_val + 1e-12
        assert exp_val <= quotes.ask + 1e-12
        if partition.buy and partition.sell:
            assert quotes.bid < exp_val < quotes.ask


def test_resolving_is_bit_identical():
    structure = binary_symmetric(0.8)
    belief = Belief(np.array([0.37, 0.63]))
    q1, p1 = solve_quotes(belief, structure, 0.4)
    q2, p2 = solve_quotes(belief, structure, 0.4)
    assert (q1.bid, q1.ask) == (q2.bid, q2.ask)
    assert p1.buy == p2.buy and p1.sell == p2.sell


# ---------------------------------------------------------------- stepping

def test_step_on_buy_binary_example():
    structure = binary_symmetric(0.8)
    state = initial_market_state(Belief.uniform(2), structure, 0.5)
    price = transaction_price(state.quotes, "B", expectation(structure.states, state.belief))
    next_state = step_market(state, structure, 0.5, "B")
    assert price == pytest.approx(0.68, abs=1e-12)
    np.testing.assert_allclose(next_state.belief.weights, [0.32, 0.68], atol=1e-12)
    assert next_state.period == 1


def test_step_no_trade_with_empty_no_trade_set_is_inert():
    structure = binary_symmetric(0.8)
    state = initial_market_state(Belief.uniform(2), structure, 0.5)
    assert state.partition.no_trade == ()
    next_state = step_market(state, structure, 0.5, "NT")
    np.testing.assert_allclose(next_state.belief.weights, state.belief.weights, atol=1e-15)
    assert next_state.quotes.ask == pytest.approx(state.quotes.ask, abs=1e-12)
    assert next_state.quotes.bid == pytest.approx(state.quotes.bid, abs=1e-12)


def test_step_in_cascade_state_changes_nothing():
    structure = four_state_cascade()
    state = initial_market_state(Belief.uniform(4), structure, 0.5)
    for action in ("B", "S", "NT"):
        stepped = step_market(state, structure, 0.5, action)
        np.testing.assert_allclose(stepped.belief.weights, 0.25, atol=1e-14)
        assert stepped.quotes.ask == pytest.approx(1.5, abs=1e-12)
        assert detect_cascade(stepped.partition)


def test_transaction_price_rules():
    quotes = Quotes(bid=0.3, ask=0.7)
    assert transaction_price(quotes, "B", 0.5) == 0.7
    assert transaction_price(quotes, "S", 0.5) == 0.3
    assert transaction_price(quotes, "NT", 0.5) == 0.5


def test_one_step_price_martingale_on_random_states():
    # sum_a P(a|H) E[w|a,H] must equal E[w|H]; E[w|a,H] taken from the
    # stepped beliefs so the identity is the plain tower property
    rng = np.random.default_rng(11)
    structure = four_state_cascade()
    from market_learn import ACTIONS, action_likelihood_vector, update_public_belief_on_action

    for _ in range(50):
        belief = Belief.from_unnormalized(rng.dirichlet(np.ones(4)) + 1e-3)
        eta = float(rng.uniform(0.05, 0.95))
        _, partition = solve_quotes(belief, structure, eta)
        exp_val = expectation(structure.states, belief)
        mixed = 0.0
        for action in ACTIONS:
            like = action_likelihood_vector(structure, partition, eta, action)
            prob = float(belief.weights @ like)
            stepped = update_public_belief_on_action(belief, structure, partition, eta, action)
            mixed += prob * expectation(structure.states, stepped)
        assert mixed == pytest.approx(exp_val, abs=1e-10)


def test_directional_quotes_binary():
    structure = binary_symmetric(0.8)
    quotes, _ = solve_quotes(Belief.uniform(2), structure, 0.5)
    assert quotes.bid < 0.5 < quotes.ask

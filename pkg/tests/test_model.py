import numpy as np
import pytest

from market_learn import (
    ACTIONS,
    Belief,
    DimensionMismatch,
    EmptySignalSet,
    InvalidBelief,
    NonPositiveDensity,
    NoiseRate,
    RowSumInvalid,
    SignalPartition,
    SignalSpace,
    SignalStructure,
    StateSpace,
    UnknownSignal,
    action_likelihood,
    action_likelihood_vector,
    bayes_posterior,
    bayes_posterior_set,
    binary_symmetric,
    expectation,
    four_state_cascade,
    update_public_belief_on_action,
    validate_structure,
)


def make_structure(states, rows, labels=None):
    rows = np.asarray(rows, dtype=float)
    labels = tuple(labels) if labels else tuple(f"s{j+1}" for j in range(rows.shape[1]))
    return SignalStructure(StateSpace(np.asarray(states, dtype=float)), SignalSpace(labels), rows)


# ---------------------------------------------------------------- spaces

def test_state_space_requires_strictly_increasing_values():
    with pytest.raises(DimensionMismatch):
        StateSpace(np.array([0.0, 0.0, 1.0]))
    with pytest.raises(DimensionMismatch):
        StateSpace(np.array([1.0]))
    with pytest.raises(DimensionMismatch):
        StateSpace(np.array([0.0, np.inf]))


def test_signal_space_rejects_duplicates_and_keeps_order():
    with pytest.raises(DimensionMismatch):
        SignalSpace(("a", "a"))
    space = SignalSpace(("h", "l"))
    assert space.labels == ("h", "l")
    assert space.index("l") == 1
    with pytest.raises(UnknownSignal):
        space.index("x")


def test_structure_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        make_structure([0, 1], [[0.5, 0.5]])


# ---------------------------------------------------------------- validation

def test_validate_accepts_four_state_example():
    validate_structure(four_state_cascade())


def test_validate_rejects_bad_row_sum():
    bad = make_structure([0, 1], [[0.5, 0.4], [0.2, 0.8]])
    with pytest.raises(RowSumInvalid) as err:
        validate_structure(bad)
    assert err.value.state_index == 0


def test_validate_rejects_zero_density():
    bad = make_structure([0, 1], [[1.0, 0.0], [0.2, 0.8]])
    with pytest.raises(NonPositiveDensity) as err:
        validate_structure(bad)
    assert (err.value.state_index, err.value.signal_index) == (0, 1)


# ---------------------------------------------------------------- beliefs

def test_belief_invariants():
    with pytest.raises(InvalidBelief):
        Belief(np.array([0.5, -0.1, 0.6]))
    with pytest.raises(InvalidBelief):
        Belief(np.array([0.5, 0.4]))
    b = Belief.uniform(4)
    assert b.full_support
    assert not Belief.point_mass(3, 1).full_support
    assert np.allclose(Belief.from_unnormalized([2.0, 2.0]).weights, [0.5, 0.5])


def test_noise_rate_bounds():
    NoiseRate(0.0)
    NoiseRate(1.0)
    with pytest.raises(InvalidBelief):
        NoiseRate(1.5)


# ---------------------------------------------------------------- posterior updates

def test_posterior_four_state_uniform_reproduces_known_vectors():
    structure = four_state_cascade()
    uniform = Belief.uniform(4)
    expected = {
        "s1": (0.3, 0.1, 0.4, 0.2),
        "s2": (0.2, 0.4, 0.1, 0.3),
        "s3": (0.2, 0.3, 0.3, 0.2),
        "s4": (0.3, 0.2, 0.2, 0.3),
    }
    for label, vector in expected.items():
        post = bayes_posterior(uniform, structure, label)
        np.testing.assert_allclose(post.weights, vector, atol=1e-12)


def test_posterior_binary_hand_computed():
    # prior (0.5, 0.5), f(h|1)=0.8, f(h|0)=0.2:
    # posterior = (0.5*0.2, 0.5*0.8) / 0.5 = (0.2, 0.8)
    structure = binary_symmetric(0.8)
    post = bayes_posterior(Belief.uniform(2), structure, "h")
    np.testing.assert_allclose(post.weights, [0.2, 0.8], atol=1e-12)


def test_posterior_row_constant_structure_is_inert():
    structure = make_structure([0, 1, 2], [[0.7, 0.3]] * 3)
    prior = Belief(np.array([0.2, 0.5, 0.3]))
    post = bayes_posterior(prior, structure, "s1")
    np.testing.assert_allclose(post.weights, prior.weights, atol=1e-15)


def test_posterior_unknown_signal():
    with pytest.raises(UnknownSignal):
        bayes_posterior(Belief.uniform(2), binary_symmetric(), "x")


def test_posterior_preserves_support():
    structure = binary_symmetric(0.8)
    post = bayes_posterior(Belief.point_mass(2, 0), structure, "h")
    assert post.weights[0] > 0 and post.weights[1] == 0


def test_set_posterior_whole_space_is_identity():
    structure = four_state_cascade()
    prior = Belief(np.array([0.1, 0.2, 0.3, 0.4]))
    post = bayes_posterior_set(prior, structure, ["s1", "s2", "s3", "s4"])
    np.testing.assert_allclose(post.weights, prior.weights, atol=1e-14)


def test_set_posterior_balanced_pair_keeps_uniform():
    # column sums f({s1,s2}|w) computed directly from the table: equal across states
    structure = four_state_cascade()
    mass = structure.likelihood[:, [0, 1]].sum(axis=1)
    np.testing.assert_allclose(mass, 0.5, atol=1e-15)
    post = bayes_posterior_set(Belief.uniform(4), structure, ["s1", "s2"])
    np.testing.assert_allclose(post.weights, 0.25, atol=1e-14)


def test_set_posterior_singleton_matches_single_signal():
    structure = four_state_cascade()
    prior = Belief(np.array([0.4, 0.3, 0.2, 0.1]))
    a = bayes_posterior_set(prior, structure, ["s3"])
    b = bayes_posterior(prior, structure, "s3")
    np.testing.assert_array_equal(a.weights, b.weights)


def test_set_posterior_rejects_empty_set():
    with pytest.raises(EmptySignalSet):
        bayes_posterior_set(Belief.uniform(2), binary_symmetric(), [])


def test_set_posterior_equals_probability_weighted_mixture_over_cell():
    # P(.|s in cell)-weighted mixture of singleton posteriors equals the set update
    rng = np.random.default_rng(3)
    structure = four_state_cascade()
    for _ in range(20):
        prior = Belief.from_unnormalized(rng.dirichlet(np.ones(4)) + 1e-3)
        cell = ["s1", "s3"]
        set_post = bayes_posterior_set(prior, structure, cell)
        probs = np.array([float(prior.weights @ structure.likelihood[:, structure.signals.index(s)])
                          for s in cell])
        mixture = sum(
            p * bayes_posterior(prior, structure, s).weights for p, s in zip(probs, cell)
        ) / probs.sum()
        np.testing.assert_allclose(set_post.weights, mixture, atol=1e-12)


# ---------------------------------------------------------------- expectation

def test_expectation_values():
    structure = four_state_cascade()
    assert expectation(structure.states, Belief.uniform(4)) == pytest.approx(1.5, abs=1e-12)
    assert expectation(structure.states, Belief.point_mass(4, 2)) == 2.0
    binary = binary_symmetric()
    assert expectation(binary.states, Belief(np.array([0.2, 0.8]))) == pytest.approx(0.8, abs=1e-12)


# ---------------------------------------------------------------- action likelihoods

def test_action_likelihood_pure_noise_is_uniform():
    structure = binary_symmetric()
    partition = SignalPartition(2, buy=(1,), sell=(0,))
    for action in ACTIONS:
        for state in (0, 1):
            assert action_likelihood(structure, partition, 1.0, action, state) == pytest.approx(1 / 3)


def test_action_likelihood_mixed_arithmetic():
    # eta=0.5 and f(S^B|w)=0.8 gives 0.5/3 + 0.5*0.8
    structure = binary_symmetric(0.8)
    partition = SignalPartition(2, buy=(1,), sell=(0,))
    value = action_likelihood(structure, partition, 0.5, "B", 1)
    assert value == pytest.approx(0.5 / 3 + 0.5 * 0.8, abs=1e-15)


def test_action_likelihood_informed_whole_space():
    structure = binary_symmetric()
    partition = SignalPartition(2, buy=(0, 1), sell=())
    assert action_likelihood(structure, partition, 0.0, "B", 0) == pytest.approx(1.0)


def test_action_likelihoods_sum_to_one():
    rng = np.random.default_rng(9)
    structure = four_state_cascade()
    for _ in range(10):
        labels = rng.integers(0, 3, size=4)
        partition = SignalPartition(
            4,
            buy=tuple(np.flatnonzero(labels == 0)),
            sell=tuple(np.flatnonzero(labels == 1)),
        )
        eta = float(rng.uniform(0, 1))
        for state in range(4):
            total = sum(action_likelihood(structure, partition, eta, a, state) for a in ACTIONS)
            assert total == pytest.approx(1.0, abs=1e-12)


# ---------------------------------------------------------------- belief update on actions

def test_update_on_action_pure_noise_is_inert():
    structure = binary_symmetric()
    partition = SignalPartition(2, buy=(1,), sell=(0,))
    prior = Belief(np.array([0.3, 0.7]))
    for action in ACTIONS:
        post = update_public_belief_on_action(prior, structure, partition, 1.0, action)
        np.testing.assert_allclose(post.weights, prior.weights, atol=1e-15)


def test_update_on_buy_binary_example():
    # mixed likelihood f(B|w): w=1 -> 1/6 + 0.4, w=0 -> 1/6 + 0.1;
    # posterior = (0.5*(1/6+0.1), 0.5*(1/6+0.4)) normalized = (0.32, 0.68)
    structure = binary_symmetric(0.8)
    partition = SignalPartition(2, buy=(1,), sell=(0,))
    post = update_public_belief_on_action(Belief.uniform(2), structure, partition, 0.5, "B")
    np.testing.assert_allclose(post.weights, [0.32, 0.68], atol=1e-12)


def test_update_on_empty_no_trade_set_is_inert():
    structure = binary_symmetric(0.8)
    partition = SignalPartition(2, buy=(1,), sell=(0,))
    prior = Belief(np.array([0.4, 0.6]))
    post = update_public_belief_on_action(prior, structure, partition, 0.5, "NT")
    np.testing.assert_allclose(post.weights, prior.weights, atol=1e-15)


def test_action_update_martingale_identity_random_partitions():
    # sum_a P(a) mu'(w|a) must reproduce mu(w) for any total partition
    rng = np.random.default_rng(17)
    for _ in range(100):
        n = int(rng.integers(2, 5))
        m = int(rng.integers(2, 6))
        rows = rng.dirichlet(np.ones(m), size=n)
        rows = np.maximum(rows, 1e-3)
        rows /= rows.sum(axis=1, keepdims=True)
        structure = make_structure(np.arange(n, dtype=float), rows)
        belief = Belief.from_unnormalized(rng.dirichlet(np.ones(n)) + 1e-3)
        eta = float(rng.uniform(0.01, 0.99))
        labels = rng.integers(0, 3, size=m)
        partition = SignalPartition(
            m,
            buy=tuple(np.flatnonzero(labels == 0)),
            sell=tuple(np.flatnonzero(labels == 1)),
        )
        mixed = np.zeros(n)
        for action in ACTIONS:
            like = action_likelihood_vector(structure, partition, eta, action)
            prob = float(belief.weights @ like)
            mixed += prob * update_public_belief_on_action(belief, structure, partition, eta, action).weights
        np.testing.assert_allclose(mixed, belief.weights, atol=1e-10)

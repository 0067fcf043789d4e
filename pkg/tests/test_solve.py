import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellmono import bell, solve
from bellmono.lp import Status, check_point
from bellmono.model import DeterministicStrategy, enumerate_deterministic, is_no_signaling, marginalize
from conftest import brute_force_local, float_lp_value, random_marginal, random_xor_no_contradiction

Q = Fraction


def chsh_as_unique_game():
    quarter = Q(1, 4)
    return bell.unique_game(2, 2, 2, [[quarter] * 2] * 2, lambda x, y: (1, 0) if x & y else (0, 1))


@pytest.mark.parametrize(
    "expr, expected",
    [
        (bell.chsh(), Q(3, 4)),
        (bell.chained(2), Q(3, 4)),
        (bell.chained(3), Q(5, 6)),
        (bell.claim3_expression(), Q(8)),
    ],
)
def test_local_bound_matches_brute_force(expr, expected):
    value, strategy = solve.local_bound(expr)
    oracle_value, oracle_strategy = brute_force_local(expr)
    assert value == oracle_value == expected
    assert strategy == oracle_strategy
    assert bell.evaluate(expr, strategy.to_box()) == value


def test_chained_local_bound_with_uneven_weights():
    support = bell.chain_pairs(3)
    mu = [[Q(0)] * 3 for _ in range(3)]
    for x, y in support:
        mu[x][y] = Q(11, 60)
    mu[2][1] = Q(1, 12)  # smallest weight; the rest sum to 11/12
    expr = bell.chained(3, mu)
    assert expr.weight_total() == 1
    assert solve.local_bound(expr)[0] == brute_force_local(expr)[0] == Q(11, 12)


def test_chsh_ns_bound_and_pr_witness():
    sol = solve.ns_bound(bell.chsh())
    assert sol.value == 1
    box = sol.witness
    assert is_no_signaling(box)
    for x, y in itertools.product(range(2), range(2)):
        assert sum(box.prob((x, y), (a, b)) for a in (0, 1) for b in (0, 1) if a ^ b == (x & y)) == 1
    alice = marginalize(box, {0})
    assert set(alice.table.values()) == {Q(1, 2)}


def test_claim3_ns_bound():
    sol = solve.ns_bound(bell.claim3_expression())
    assert sol.value == 9
    assert is_no_signaling(sol.witness)
    assert bell.evaluate(bell.claim3_expression(), sol.witness) == 9


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_chained_ns_bound(n):
    sol = solve.ns_bound(bell.chained(n))
    assert sol.value == 1
    lp = solve.ns_program(bell.chained(n))
    assert abs(float_lp_value(lp) - 1) < 1e-9


def test_unique_game_ns_bound_is_weight_total(rng):
    for _ in range(5):
        d = rng.randint(2, 3)
        mu = [[Q(rng.randint(1, 6), 7) for _ in range(2)] for _ in range(2)]
        perms = [[rng.sample(range(d), d) for _ in range(2)] for _ in range(2)]
        game = bell.unique_game(2, 2, d, mu, perms)
        assert solve.ns_bound(game).value == game.weight_total()


def test_identity_unique_game_trivial():
    game = bell.identity_unique_game(3, 2, 2)
    assert solve.local_bound(game)[0] == solve.ns_bound(game).value == 1


def test_flip_on_last_pair_is_chsh_equivalent():
    game = chsh_as_unique_game()
    chsh = bell.chsh()
    assert solve.local_bound(game)[0] == solve.local_bound(chsh)[0] == Q(3, 4)
    assert solve.ns_bound(game).value == solve.ns_bound(chsh).value == 1


def test_single_bob_setting_is_classical(rng):
    for _ in range(5):
        d = rng.randint(2, 4)
        mu = [[Q(rng.randint(0, 5), 3)] for _ in range(3)]
        perms = [[rng.sample(range(d), d)] for _ in range(3)]
        game = bell.unique_game(3, 1, d, mu, perms)
        assert solve.local_bound(game)[0] == solve.ns_bound(game).value


def test_fixed_marginal_chsh_first_setting_only():
    expr = bell.restrict_bob_settings(bell.chsh(), {1})
    uniform = [[Q(1, 2), Q(1, 2)], [Q(1, 2), Q(1, 2)]]
    ns = solve.ns_bound_with_marginal(expr, uniform)
    local = solve.local_bound_with_marginal(expr, uniform)
    assert ns.value == local.value == Q(1, 2)
    assert is_no_signaling(ns.witness) and is_no_signaling(local.witness)
    assert marginalize(local.witness, {0}).table == marginalize(ns.witness, {0}).table
    # explicit two-strategy mixture: everyone outputs 0, or everyone outputs 1
    zeros = DeterministicStrategy(expr.scenario, (0, 0), (0, 0))
    ones = DeterministicStrategy(expr.scenario, (1, 1), (1, 1))
    assert (bell.evaluate(expr, zeros.to_box()) + bell.evaluate(expr, ones.to_box())) / 2 == Q(1, 2)


def test_fixed_deterministic_marginal():
    expr = bell.chained(3)
    alice = (0, 1, 1)
    marg = [[Q(int(a == alice[x])) for a in (0, 1)] for x in range(3)]
    best = max(
        solve.strategy_value(expr, s)
        for s in enumerate_deterministic(expr.scenario)
        if s.alice_outputs == alice
    )
    assert solve.local_bound_with_marginal(expr, marg).value == best
    assert solve.local_bound(expr, fixed_alice=dict(enumerate(alice)))[0] == best


def test_marginal_shape_checked():
    with pytest.raises(ValueError):
        solve.ns_bound_with_marginal(bell.chsh(), [[1, 0]])


def test_unnormalized_marginal_infeasible():
    expr = bell.chsh()
    bad = [[Q(1, 2), Q(1, 3)], [Q(1, 2), Q(1, 2)]]
    assert solve.ns_bound_with_marginal(expr, bad).status is Status.INFEASIBLE
    assert solve.local_bound_with_marginal(expr, bad).status is Status.INFEASIBLE


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6))
def test_xor_fixed_marginal_ns_equals_local(seed):
    rng = random.Random(seed)
    game = random_xor_no_contradiction(rng, rng.randint(1, 3), rng.randint(1, 3))
    marg = random_marginal(rng, game.m_a, 2)
    ns = solve.ns_bound_with_marginal(game, marg)
    local = solve.local_bound_with_marginal(game, marg)
    assert ns.value == local.value
    assert local.value <= ns.value


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10**6))
def test_identity_game_fixed_marginal_two_alice_settings(seed):
    rng = random.Random(seed)
    d, m_b = rng.randint(2, 3), rng.randint(1, 2)
    mu = [[Q(rng.randint(0, 6), 5) for _ in range(m_b)] for _ in range(2)]
    game = bell.identity_unique_game(d, 2, m_b, mu)
    marg = random_marginal(rng, 2, d)
    assert solve.ns_bound_with_marginal(game, marg).value == solve.local_bound_with_marginal(game, marg).value


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_local_below_ns_and_witness_valid(seed):
    rng = random.Random(seed)
    d = rng.choice([2, 3])
    m_a, m_b = rng.randint(1, 3), rng.randint(1, 3)
    coeffs = {
        key: Q(rng.randint(-3, 5), 4)
        for key in itertools.product(range(d), range(d), range(m_a), range(m_b))
        if rng.random() < 0.5
    }
    expr = bell.general(m_a, m_b, d, coeffs)
    local, strategy = solve.local_bound(expr)
    assert local == brute_force_local(expr)[0]
    sol = solve.ns_bound(expr)
    assert local <= sol.value
    assert is_no_signaling(sol.witness)
    sol.witness.validate()
    assert bell.evaluate(expr, sol.witness) == sol.value
    assert check_point(solve.ns_program(expr), sol.point) == sol.value
    assert abs(float_lp_value(solve.ns_program(expr)) - float(sol.value)) < 1e-7


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5), st.integers(1, 5))
def test_scaling_equivariance(seed, num, den):
    rng = random.Random(seed)
    c = Q(num, den)
    expr = random_xor_no_contradiction(rng, 2, 2) if seed % 2 else bell.chained(3)
    scaled = expr.scaled(c)
    v, s = solve.local_bound(expr)
    vs, ss = solve.local_bound(scaled)
    assert vs == c * v and ss.alice_outputs == s.alice_outputs and ss.bob_outputs == s.bob_outputs
    ns, ns_scaled = solve.ns_bound(expr), solve.ns_bound(scaled)
    assert ns_scaled.value == c * ns.value
    assert ns_scaled.witness.support().keys() == ns.witness.support().keys()

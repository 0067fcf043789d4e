import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from bellmono import bell, solve
from bellmono.model import (
    ConditionalBox,
    Scenario,
    enumerate_deterministic,
    product_box,
)


def random_distribution(rng, size, zero_prob=0.3):
    weights = [0 if rng.random() < zero_prob else rng.randint(1, 9) for _ in range(size)]
    if not any(weights):
        weights[rng.randrange(size)] = 1
    total = sum(weights)
    return [Fraction(w, total) for w in weights]


def random_single_party(rng, settings, d):
    rows = [random_distribution(rng, d) for _ in range(settings)]
    return ConditionalBox.from_function(Scenario(settings, (), d), lambda i, o: rows[i[0]][o[0]])


def random_correlated_pair(rng, m_a, m_b, d):
    """Box with P(a, s_xy(a) | x, y) = 1/d for random permutations s_xy: NS, generally nonlocal."""
    perms = {}
    for x, y in itertools.product(range(m_a), range(m_b)):
        p = list(range(d))
        rng.shuffle(p)
        perms[(x, y)] = p
    w = Fraction(1, d)
    return ConditionalBox.from_function(
        Scenario.bipartite(m_a, m_b, d),
        lambda i, o: w if perms[i][o[0]] == o[1] else 0,
    )


def random_ns_box(rng, scenario, terms=3):
    """Convex mixture of product boxes and (nonlocal pair) x (single parties)."""
    settings = scenario.settings
    d = scenario.outcomes
    parts = []
    for _ in range(terms):
        if scenario.parties >= 2 and rng.random() < 0.6:
            partner = rng.randrange(1, scenario.parties)
            pair = random_correlated_pair(rng, settings[0], settings[partner], d)
            singles = [random_single_party(rng, settings[p], d) for p in range(1, scenario.parties) if p != partner]
            joint = product_box([pair, *singles])
            # reorder parties so the pair's Bob lands at index `partner`
            order = [0, partner] + [p for p in range(1, scenario.parties) if p != partner]
            table = {}
            for (ins, outs), p in joint.table.items():
                new_in = [0] * scenario.parties
                new_out = [0] * scenario.parties
                for pos, party in enumerate(order):
                    new_in[party] = ins[pos]
                    new_out[party] = outs[pos]
                table[(tuple(new_in), tuple(new_out))] = p
            parts.append(ConditionalBox(scenario, table))
        else:
            parts.append(product_box([random_single_party(rng, m, d) for m in settings]))
    weights = random_distribution(rng, terms, zero_prob=0)
    table = {cell: sum((w * part.table[cell] for w, part in zip(weights, parts)), Fraction(0)) for cell in scenario.cells()}
    return ConditionalBox(scenario, table)


def random_xor_no_contradiction(rng, m_a, m_b):
    """Random XOR game whose unrestricted NS optimum is already local."""
    while True:
        mu = [[Fraction(rng.randint(0, 4), 12) for _ in range(m_b)] for _ in range(m_a)]
        pred = [[rng.choice([(1, 0), (0, 1), (1, 1), (0, 0)]) for _ in range(m_b)] for _ in range(m_a)]
        game = bell.xor_game(m_a, m_b, mu, pred)
        if solve.local_bound(game)[0] == solve.ns_bound(game).value:
            return game


def random_marginal(rng, m_a, d):
    return [random_distribution(rng, d) for _ in range(m_a)]


def brute_force_local(expr):
    """Max of evaluate over every deterministic strategy box, first maximizer kept."""
    best = None
    for s in enumerate_deterministic(expr.scenario):
        v = bell.evaluate(expr, s.to_box())
        if best is None or v > best[0]:
            best = (v, s)
    return best


def float_lp_value(lp):
    """Independent floating-point optimum of a LinearProgram (HiGHS)."""
    index = {v: j for j, v in enumerate(lp.variables)}
    c = np.zeros(len(index))
    for v, coef in lp.objective.items():
        c[index[v]] = -float(coef)
    a = np.zeros((len(lp.equalities), len(index)))
    b = np.zeros(len(lp.equalities))
    for i, (row, rhs) in enumerate(lp.equalities):
        for v, coef in row.items():
            a[i, index[v]] = float(coef)
        b[i] = float(rhs)
    res = linprog(c, A_eq=a, b_eq=b, bounds=(0, None), method="highs")
    assert res.status == 0, res.message
    return -res.fun


@pytest.fixture
def rng():
    return random.Random(20240611)


ACCEPTANCE_RESULTS: dict[str, bool] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS, key=lambda n: int(n.split()[1].rstrip(":"))):
        verdict = "PASS" if ACCEPTANCE_RESULTS[name] else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")

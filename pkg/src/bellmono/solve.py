"""Local and no-signaling optima of Bell expressions.

Local bounds come from enumerating deterministic strategies; no-signaling
bounds from exact linear programs over the no-signaling polytope.  The two
fixed-marginal variants pin Alice's marginal ``P(a|x)`` and are used to
test whether a restricted optimum with that marginal is attained locally.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterator, Sequence

from bellmono.bell import BellExpression
from bellmono.lp import LinearProgram, LpSolution, Status, lp_maximize
from bellmono.model import (
    ZERO,
    ConditionalBox,
    DeterministicStrategy,
    Scenario,
    UnsupportedScenarioError,
    as_rational,
)

Marginal = Sequence[Sequence[Fraction]]  # marginal[x][a] = P(a|x)


def no_signaling_constraints(scenario: Scenario) -> list[tuple[dict, Fraction]]:
    """Normalization plus every no-signaling equality, as sparse rows over cells.

    For each party, the sum over its output at input ``s`` must equal the
    same sum at input ``s + 1``, for every assignment of the other parties'
    inputs and outputs.
    """
    rows: list[tuple[dict, Fraction]] = []
    outputs = list(scenario.output_tuples())
    for inputs in scenario.input_tuples():
        rows.append(({(inputs, o): Fraction(1) for o in outputs}, Fraction(1)))

    settings = scenario.settings
    d = scenario.outcomes
    for party, m in enumerate(settings):
        if m == 1 or scenario.parties == 1:
            continue
        other_settings = settings[:party] + settings[party + 1 :]
        other_inputs = list(itertools.product(*(range(k) for k in other_settings)))
        other_outputs = list(itertools.product(range(d), repeat=scenario.parties - 1))
        for s in range(m - 1):
            for ins in other_inputs:
                for outs in other_outputs:
                    row = {}
                    for own in range(d):
                        o = outs[:party] + (own,) + outs[party:]
                        row[(ins[:party] + (s,) + ins[party:], o)] = Fraction(1)
                        row[(ins[:party] + (s + 1,) + ins[party:], o)] = Fraction(-1)
                    rows.append((row, Fraction(0)))
    return rows


def ns_program(objective, extra_rows: Sequence = ()) -> LinearProgram:
    """LP maximizing ``objective`` over the NS polytope of its scenario."""
    scenario = objective.scenario
    return LinearProgram(
        variables=list(scenario.cells()),
        objective=dict(objective.cell_coefficients()),
        equalities=no_signaling_constraints(scenario) + list(extra_rows),
        scenario=scenario,
    )


def _require_bipartite(expr: BellExpression) -> None:
    if expr.scenario.num_bobs != 1:
        raise UnsupportedScenarioError("bounds are defined for bipartite expressions")


def _best_bob(expr: BellExpression, alice: Sequence[int]) -> tuple[Fraction, tuple[int, ...]]:
    """Best value and lexicographically first best Bob reply to a fixed Alice assignment."""
    total = ZERO
    bob = []
    for y in range(expr.m_b):
        best_v, best_b = None, 0
        for b in range(expr.d):
            v = sum((expr.coefficient(alice[x], b, x, y) for x in range(expr.m_a)), ZERO)
            if best_v is None or v > best_v:
                best_v, best_b = v, b
        total += best_v
        bob.append(best_b)
    return total, tuple(bob)


def _alice_assignments(expr: BellExpression, fixed: dict[int, int] | None = None) -> Iterator[tuple[int, ...]]:
    for alice in itertools.product(range(expr.d), repeat=expr.m_a):
        if fixed and any(alice[x] != a for x, a in fixed.items()):
            continue
        yield alice


def local_bound(expr: BellExpression, fixed_alice: dict[int, int] | None = None) -> tuple[Fraction, DeterministicStrategy]:
    """Maximum over deterministic strategies, and the first maximizer in enumeration order.

    For each Alice assignment Bob's settings decouple, so each is optimized
    independently with ties going to the lowest output; the overall winner is
    therefore the lexicographically first optimal ``(alice, bob)`` pair.
    ``fixed_alice`` restricts to strategies with ``alice[x] = a`` for given pairs.
    """
    _require_bipartite(expr)
    best = None
    for alice in _alice_assignments(expr, fixed_alice):
        value, bob = _best_bob(expr, alice)
        if best is None or value > best[0]:
            best = (value, alice, bob)
    value, alice, bob = best
    return value, DeterministicStrategy(expr.scenario, alice, bob)


def strategy_value(expr: BellExpression, strategy: DeterministicStrategy) -> Fraction:
    return sum(
        (
            expr.coefficient(strategy.alice_outputs[x], strategy.bob_outputs[y], x, y)
            for x in range(expr.m_a)
            for y in range(expr.m_b)
        ),
        ZERO,
    )


def ns_bound(expr: BellExpression) -> LpSolution:
    """Maximum of ``expr`` over the bipartite no-signaling polytope."""
    _require_bipartite(expr)
    return lp_maximize(ns_program(expr))


def _marginal(expr: BellExpression, marg: Marginal) -> tuple[tuple[Fraction, ...], ...]:
    if len(marg) != expr.m_a or any(len(row) != expr.d for row in marg):
        raise ValueError(f"marginal must be indexed [x][a] with shape {expr.m_a}x{expr.d}")
    return tuple(tuple(as_rational(p) for p in row) for row in marg)


def ns_bound_with_marginal(expr: BellExpression, marg: Marginal) -> LpSolution:
    """NS optimum with Alice's marginal pinned: ``sum_b P(a,b|x,y) = marg[x][a]``."""
    _require_bipartite(expr)
    marg = _marginal(expr, marg)
    extra = []
    for x, y, a in itertools.product(range(expr.m_a), range(expr.m_b), range(expr.d)):
        row = {((x, y), (a, b)): Fraction(1) for b in range(expr.d)}
        extra.append((row, marg[x][a]))
    return lp_maximize(ns_program(expr, extra))


def local_bound_with_marginal(expr: BellExpression, marg: Marginal) -> LpSolution:
    """Best mixture of deterministic strategies whose Alice marginal is ``marg``.

    Variables are mixture weights, one per deterministic strategy.  The
    witness is the mixed box.
    """
    _require_bipartite(expr)
    marg = _marginal(expr, marg)
    strategies = [
        (alice, bob)
        for alice in itertools.product(range(expr.d), repeat=expr.m_a)
        for bob in itertools.product(range(expr.d), repeat=expr.m_b)
    ]
    objective = {}
    for alice, bob in strategies:
        s = DeterministicStrategy(expr.scenario, alice, bob)
        objective[(alice, bob)] = strategy_value(expr, s)
    rows = [({s: Fraction(1) for s in strategies}, Fraction(1))]
    for x, a in itertools.product(range(expr.m_a), range(expr.d)):
        rows.append(({s: Fraction(1) for s in strategies if s[0][x] == a}, marg[x][a]))
    sol = lp_maximize(LinearProgram(strategies, objective, rows))
    if sol.status is not Status.OPTIMAL:
        return sol
    table = {cell: ZERO for cell in expr.scenario.cells()}
    for (alice, bob), w in sol.point.items():
        if w:
            for x, y in itertools.product(range(expr.m_a), range(expr.m_b)):
                table[((x, y), (alice[x], bob[y]))] += w
    return LpSolution(sol.status, sol.value, sol.point, ConditionalBox(expr.scenario, table), sol.pivots)

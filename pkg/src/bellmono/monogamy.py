"""Contradiction numbers and monogamy checks over multi-Bob extensions.

A monogamy relation bounds ``sum_i B_{A B^i}`` over every no-signaling box
shared by Alice and ``K`` Bobs.  The optimum of that sum is an exact LP
(:func:`extension_optimum`); the checks compare it with ``K * R_L`` for
``K = m_B`` (general relation) or ``K = C + 1`` with ``C`` the contradiction
number (strengthened relation), and with ``2 * R_NS`` for unique games.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from bellmono import bell, solve
from bellmono.bell import BellExpression
from bellmono.lp import LpSolution, Status, lp_maximize
from bellmono.model import (
    ZERO,
    ConditionalBox,
    Scenario,
    is_no_signaling,
    marginalize,
)

DEFAULT_CAP = 100_000


class LpSizeError(RuntimeError):
    def __init__(self, variables: int, cap: int):
        super().__init__(f"extension LP needs {variables} variables, cap is {cap}")
        self.variables = variables
        self.cap = cap


class ScopeError(ValueError):
    """The requested relation is not proven for this expression."""


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class ContradictionReport:
    number: int
    witness_set: tuple[int, ...]
    restricted_local: Fraction
    restricted_ns: Fraction
    strong: bool


@dataclass(frozen=True)
class MonogamyVerdict:
    relation: str  # "thm1", "eq4" or "obs1"
    lhs_optimum: Fraction
    rhs_bound: Fraction
    holds: bool
    witness: ConditionalBox | None
    num_bobs: int
    in_proven_scope: bool = True
    contradiction: ContradictionReport | None = None
    certified_by: str = "lp"
    notes: tuple[str, ...] = field(default=())


def _removal_sets(m_b: int, k: int):
    """Removal sets of size ``k``, ordered by the settings they keep.

    Kept sets go in lexicographic order, so removing the highest-labelled
    settings is tried first (``{m_B - 1}`` before ``{0}`` when ``k = 1``).
    """
    for kept in itertools.combinations(range(m_b), m_b - k):
        yield tuple(y for y in range(m_b) if y not in kept)


def _qualifies(expr: BellExpression, removed, strong: bool):
    restricted = bell.restrict_bob_settings(expr, removed)
    r_local, _ = solve.local_bound(restricted)
    sol = solve.ns_bound(restricted)
    if sol.value != r_local:
        return None
    if strong:
        for x, a in itertools.product(range(expr.m_a), range(expr.d)):
            value, _ = solve.local_bound(restricted, fixed_alice={x: a})
            if value != sol.value:
                return None
    return r_local, sol.value


def contradiction_number(expr: BellExpression, strong: bool = False) -> ContradictionReport:
    """Fewest Bob settings whose removal makes the NS optimum locally attainable.

    With ``strong=True`` a removal set only counts if, for every Alice
    setting ``x`` and outcome ``a``, some optimal deterministic strategy
    answers ``a`` on ``x``.
    """
    for k in range(expr.m_b):
        for removed in _removal_sets(expr.m_b, k):
            found = _qualifies(expr, removed, strong)
            if found is not None:
                return ContradictionReport(k, removed, found[0], found[1], strong)
    raise AssertionError("no removal set of size m_B - 1 qualified")  # pragma: no cover


def strong_contradiction_number(expr: BellExpression) -> ContradictionReport:
    return contradiction_number(expr, strong=True)


def minimal_removal_sets(expr: BellExpression, strong: bool = False) -> list[tuple[int, ...]]:
    """Every qualifying removal set of minimum size, in canonical order."""
    for k in range(expr.m_b):
        found = [r for r in _removal_sets(expr.m_b, k) if _qualifies(expr, r, strong) is not None]
        if found:
            return found
    return []  # pragma: no cover


def extension_size(expr: BellExpression, num_bobs: int) -> int:
    return expr.d ** (num_bobs + 1) * expr.m_a * expr.m_b**num_bobs


def extension_optimum(expr: BellExpression, num_bobs: int, cap: int = DEFAULT_CAP) -> LpSolution:
    """Maximum of ``sum_i lift(expr, K, i)`` over the (1+K)-party NS polytope."""
    if num_bobs < 1:
        raise ValueError("need at least one Bob")
    size = extension_size(expr, num_bobs)
    if size > cap:
        raise LpSizeError(size, cap)
    return lp_maximize(solve.ns_program(bell.lifted_sum(expr, num_bobs)))


def _lhs(expr, num_bobs, cap, certificate, ns_value):
    """Optimum of the lifted sum, from a certificate box when it meets ``K * R_NS``."""
    if certificate is not None:
        objective = bell.lifted_sum(expr, num_bobs)
        value = bell.evaluate(objective, certificate)
        # Each lifted term is at most R_NS, so reaching K * R_NS is optimal.
        if value == num_bobs * ns_value and is_no_signaling(certificate):
            return value, certificate, "certificate"
    sol = extension_optimum(expr, num_bobs, cap)
    if sol.status is not Status.OPTIMAL:  # pragma: no cover - NS polytope is never empty
        raise RuntimeError(f"extension LP ended with status {sol.status.value}")
    return sol.value, sol.witness, "lp"


def check_general_monogamy(expr: BellExpression, cap: int = DEFAULT_CAP) -> MonogamyVerdict:
    """Compare the ``K = m_B`` extension optimum against ``m_B * R_L``.

    This relation holds in every no-signaling theory, so ``holds=False``
    means a solver bug.
    """
    r_local, _ = solve.local_bound(expr)
    sol = extension_optimum(expr, expr.m_b, cap)
    rhs = expr.m_b * r_local
    notes = () if sol.value <= rhs else ("violation of a proven relation: solver bug",)
    return MonogamyVerdict("thm1", sol.value, rhs, sol.value <= rhs, sol.witness, expr.m_b, notes=notes)


def proven_scope(expr: BellExpression) -> str | None:
    """Which contradiction number the strengthened relation is proven with, if any."""
    if expr.is_xor():
        return "weak"
    if expr.is_unique() and (expr.m_a == 2 or bell.is_beta_restricted(expr.mu) is not None):
        return "strong"
    return None


def check_strong_monogamy(
    expr: BellExpression,
    use_strong: bool | None = None,
    *,
    force: bool = False,
    cap: int = DEFAULT_CAP,
    certificate: ConditionalBox | None = None,
) -> MonogamyVerdict:
    """Compare the ``K = C + 1`` extension optimum against ``(C + 1) * R_L``.

    ``use_strong`` picks the strong contradiction number; by default XOR
    families use the plain one and unique games the strong one.  Expressions
    outside the proven classes raise :class:`ScopeError` unless ``force``.
    ``certificate`` is an optional (1+K)-party box; if it reaches
    ``K * R_NS`` it settles the optimum without solving the LP.
    """
    scope = proven_scope(expr)
    if scope is None and not force:
        raise ScopeError("strengthened monogamy is only proven for XOR games and restricted unique games")
    if use_strong is None:
        use_strong = scope != "weak"
    report = contradiction_number(expr, strong=use_strong)
    num_bobs = report.number + 1
    r_local, _ = solve.local_bound(expr)
    ns_value = solve.ns_bound(expr).value
    lhs, witness, how = _lhs(expr, num_bobs, cap, certificate, ns_value)
    rhs = num_bobs * r_local
    holds = lhs <= rhs
    in_scope = scope is not None and (scope == "weak" or use_strong)
    notes = []
    if not in_scope:
        notes.append("outside proven scope")
    elif not holds:
        notes.append("violation of a proven relation: solver bug")
    return MonogamyVerdict(
        "eq4", lhs, rhs, holds, witness, num_bobs, in_scope, report, how, tuple(notes)
    )


def strict_unique_monogamy(game: BellExpression, cap: int = DEFAULT_CAP) -> MonogamyVerdict:
    """Two Bobs cannot both reach the NS optimum of a nontrivial unique game."""
    if not game.is_unique():
        raise TypeError("strict monogamy applies to unique games")
    r_local, _ = solve.local_bound(game)
    r_ns = game.weight_total()
    if r_ns == r_local:
        raise PreconditionError("game is trivial: local and no-signaling optima coincide")
    sol = extension_optimum(game, 2, cap)
    rhs = 2 * r_ns
    return MonogamyVerdict("obs1", sol.value, rhs, sol.value < rhs, sol.witness, 2)


def claim3_box() -> ConditionalBox:
    """Tripartite NS box whose AB and AC marginals both maximally violate the table expression."""
    signs = bell.claim3_signs()
    eighth, sixteenth = Fraction(1, 8), Fraction(1, 16)

    def prob(inputs, outputs):
        x, y, z = inputs
        a, b, c = outputs
        if y == z:
            return eighth if b == c and signs[(a, b, x, y)] else ZERO
        return sixteenth if signs[(a, b, x, y)] and signs[(a, c, x, z)] else ZERO

    return ConditionalBox.from_function(Scenario(3, (3, 3), 4), prob)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    expected: object
    actual: object

    @property
    def discrepancy(self) -> Fraction | None:
        if isinstance(self.expected, Fraction) and isinstance(self.actual, Fraction):
            return self.actual - self.expected
        return None


@dataclass(frozen=True)
class Claim3Report:
    checks: tuple[Check, ...]
    witness_set: tuple[int, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]


def verify_claim3() -> Claim3Report:
    expr = bell.claim3_expression()
    box = claim3_box()
    checks = []

    ns_ok = is_no_signaling(box)
    checks.append(Check("box is no-signaling", ns_ok, True, ns_ok))

    nine = Fraction(9)
    ab = bell.evaluate(expr, marginalize(box, {0, 1}, {2: 0}))
    ac = bell.evaluate(expr, marginalize(box, {0, 2}, {1: 0}))
    checks.append(Check("AB marginal value", ab == nine, nine, ab))
    checks.append(Check("AC marginal value", ac == nine, nine, ac))

    r_local, _ = solve.local_bound(expr)
    checks.append(Check("local bound", r_local == 8, Fraction(8), r_local))
    r_ns = solve.ns_bound(expr).value
    checks.append(Check("no-signaling bound", r_ns == nine, nine, r_ns))

    weak = contradiction_number(expr)
    strong = contradiction_number(expr, strong=True)
    numbers = (weak.number, strong.number)
    checks.append(Check("contradiction numbers (C, C_strong)", numbers == (1, 1), (1, 1), numbers))

    total = bell.evaluate(bell.lifted_sum(expr, 2), box)
    checks.append(Check("lifted sum equals 2 R_NS", total == 2 * r_ns == 18, Fraction(18), total))
    return Claim3Report(tuple(checks), weak.witness_set)

"""Bell expressions as exact coefficient tensors.

A :class:`BellExpression` stores ``B(a, b, x, y)`` (the input weight already
multiplied in) for a bipartite scenario, plus whatever family parameters
it was built from.  Constructors cover XOR games, correlation expressions,
unique games, chained inequalities and the 3-setting, 4-outcome table
counterexample.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from bellmono.model import (
    ZERO,
    Cell,
    ConditionalBox,
    Scenario,
    as_rational,
)

Matrix = tuple[tuple[Fraction, ...], ...]

KINDS = ("general", "xor_game", "correlation", "unique_game", "chained", "table")
XOR_KINDS = ("xor_game", "chained")


@dataclass(frozen=True)
class BellExpression:
    """Coefficient tensor ``B(a, b, x, y)`` over a bipartite scenario.

    Only nonzero coefficients are stored.  ``mu`` is indexed ``mu[x][y]``;
    ``predicate`` (XOR families) is indexed ``predicate[x][y][c]``;
    ``sigma`` (unique games) is indexed ``sigma[x][y][a]``.
    ``active_settings`` lists the Bob settings that have not been removed.
    """

    scenario: Scenario
    coefficients: Mapping[tuple[int, int, int, int], Fraction]
    kind: str = "general"
    mu: Matrix | None = None
    predicate: tuple | None = None
    alpha: Matrix | None = None
    lambdas: tuple[Fraction, ...] | None = None
    sigma: tuple | None = None
    chain_length: int | None = None
    active_settings: tuple[int, ...] | None = None
    setting_labels: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.scenario.num_bobs != 1:
            raise ValueError("Bell expressions are bipartite (exactly one Bob)")
        if self.kind not in KINDS:
            raise ValueError(f"unknown provenance {self.kind!r}")
        coeffs = {}
        for key, value in self.coefficients.items():
            value = as_rational(value)
            if value != 0:
                coeffs[tuple(key)] = value
        object.__setattr__(self, "coefficients", coeffs)
        if self.active_settings is None:
            object.__setattr__(self, "active_settings", tuple(range(self.m_b)))
        else:
            object.__setattr__(self, "active_settings", tuple(sorted(self.active_settings)))

    @property
    def m_a(self) -> int:
        return self.scenario.alice_settings

    @property
    def m_b(self) -> int:
        return self.scenario.bob_settings[0]

    @property
    def d(self) -> int:
        return self.scenario.outcomes

    def coefficient(self, a: int, b: int, x: int, y: int) -> Fraction:
        return self.coefficients.get((a, b, x, y), ZERO)

    def cell_coefficients(self) -> Iterator[tuple[Cell, Fraction]]:
        for (a, b, x, y), c in self.coefficients.items():
            yield ((x, y), (a, b)), c

    def is_xor(self) -> bool:
        return self.kind in XOR_KINDS

    def is_unique(self) -> bool:
        return self.kind == "unique_game"

    def weight_total(self) -> Fraction | None:
        """Sum of the input weights over active settings, when weights are known."""
        if self.mu is None:
            return None
        return sum((self.mu[x][y] for x in range(self.m_a) for y in self.active_settings), ZERO)

    def label(self, y: int) -> str:
        if self.setting_labels is not None:
            return self.setting_labels[y]
        return str(y + 1)

    def scaled(self, factor) -> BellExpression:
        factor = as_rational(factor)
        mu = None if self.mu is None else _matrix(lambda x, y: self.mu[x][y] * factor, self.m_a, self.m_b)
        return replace(
            self,
            coefficients={k: v * factor for k, v in self.coefficients.items()},
            mu=mu,
        )

    def transpose(self) -> BellExpression:
        """Swap the roles of Alice and Bob."""
        scenario = Scenario.bipartite(self.m_b, self.m_a, self.d)
        coeffs = {(b, a, y, x): c for (a, b, x, y), c in self.coefficients.items()}
        mu = None if self.mu is None else _matrix(lambda y, x: self.mu[x][y], self.m_b, self.m_a)
        if self.active_settings != tuple(range(self.m_b)):
            return BellExpression(scenario, coeffs, mu=mu)
        if self.kind == "xor_game":
            pred = tuple(tuple(self.predicate[x][y] for x in range(self.m_a)) for y in range(self.m_b))
            return BellExpression(scenario, coeffs, kind="xor_game", mu=mu, predicate=pred)
        if self.kind == "unique_game":
            inv = tuple(
                tuple(_inverse(self.sigma[x][y]) for x in range(self.m_a)) for y in range(self.m_b)
            )
            return BellExpression(scenario, coeffs, kind="unique_game", mu=mu, sigma=inv)
        return BellExpression(scenario, coeffs, mu=mu)


@dataclass(frozen=True)
class LiftedExpression:
    """A linear objective over the cells of a multi-party box."""

    scenario: Scenario
    coefficients: Mapping[Cell, Fraction]

    def cell_coefficients(self) -> Iterator[tuple[Cell, Fraction]]:
        return iter(self.coefficients.items())

    def __add__(self, other: LiftedExpression) -> LiftedExpression:
        if other.scenario != self.scenario:
            raise ValueError("cannot add objectives over different scenarios")
        total = dict(self.coefficients)
        for cell, c in other.coefficients.items():
            v = total.get(cell, ZERO) + c
            if v:
                total[cell] = v
            else:
                total.pop(cell, None)
        return LiftedExpression(self.scenario, total)


def _matrix(f: Callable[[int, int], object], rows: int, cols: int) -> Matrix:
    return tuple(tuple(as_rational(f(x, y)) for y in range(cols)) for x in range(rows))


def _as_matrix(values, rows: int, cols: int, name: str) -> Matrix:
    if callable(values):
        return _matrix(values, rows, cols)
    if len(values) != rows or any(len(row) != cols for row in values):
        raise ValueError(f"{name} must be a {rows}x{cols} matrix")
    return tuple(tuple(as_rational(v) for v in row) for row in values)


def _inverse(perm: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for a, b in enumerate(perm):
        inv[b] = a
    return tuple(inv)


def evaluate(expr, box: ConditionalBox) -> Fraction:
    """Exact value ``sum B(cell) * P(cell)`` of an expression on a box."""
    if expr.scenario != box.scenario:
        raise ValueError(f"scenario mismatch: expression {expr.scenario}, box {box.scenario}")
    return sum((c * box.table[cell] for cell, c in expr.cell_coefficients()), ZERO)


def general(m_a: int, m_b: int, d: int, coefficients: Mapping) -> BellExpression:
    return BellExpression(Scenario.bipartite(m_a, m_b, d), coefficients)


def xor_game(m_a: int, m_b: int, mu, predicate, d: int = 2) -> BellExpression:
    """``B(a,b,x,y) = mu(x,y) * V(a xor b | x,y)`` with ``V`` 0/1-valued.

    ``predicate`` is either ``predicate[x][y][c]`` or a callable ``V(c, x, y)``.
    """
    if d != 2:
        raise ValueError("XOR games have binary outcomes (d = 2)")
    mu = _as_matrix(mu, m_a, m_b, "mu")
    if callable(predicate):
        fn = predicate
        predicate = [[[fn(c, x, y) for c in (0, 1)] for y in range(m_b)] for x in range(m_a)]
    pred = tuple(tuple(tuple(int(v) for v in predicate[x][y]) for y in range(m_b)) for x in range(m_a))
    for x, y in itertools.product(range(m_a), range(m_b)):
        if len(pred[x][y]) != 2 or any(v not in (0, 1) for v in pred[x][y]):
            raise ValueError(f"predicate at (x={x}, y={y}) must be two 0/1 values")
        if mu[x][y] < 0:
            raise ValueError(f"negative weight mu({x},{y})")
    coeffs = {
        (a, b, x, y): mu[x][y]
        for x, y, a, b in itertools.product(range(m_a), range(m_b), (0, 1), (0, 1))
        if pred[x][y][a ^ b]
    }
    return BellExpression(Scenario.bipartite(m_a, m_b, 2), coeffs, kind="xor_game", mu=mu, predicate=pred)


def chsh() -> BellExpression:
    """CHSH game: win iff ``a xor b = x and y``, uniform weights 1/4."""
    quarter = Fraction(1, 4)
    return xor_game(2, 2, [[quarter] * 2] * 2, lambda c, x, y: int(c == (x & y)))


def correlation_expression(m_a: int, m_b: int, d: int, alpha, lambdas: Sequence) -> BellExpression:
    """``B(a,b,x,y) = alpha[x][y] * lambdas[(a - b) mod d]``."""
    if len(lambdas) != d:
        raise ValueError(f"lambdas must have length d = {d}, got {len(lambdas)}")
    lambdas = tuple(as_rational(v) for v in lambdas)
    alpha = _as_matrix(alpha, m_a, m_b, "alpha")
    coeffs = {
        (a, b, x, y): alpha[x][y] * lambdas[(a - b) % d]
        for x, y, a, b in itertools.product(range(m_a), range(m_b), range(d), range(d))
    }
    return BellExpression(
        Scenario.bipartite(m_a, m_b, d), coeffs, kind="correlation", alpha=alpha, lambdas=lambdas
    )


def unique_game(m_a: int, m_b: int, d: int, mu, sigma) -> BellExpression:
    """``B(a,b,x,y) = mu(x,y)`` when ``b = sigma[x][y][a]``, else 0."""
    mu = _as_matrix(mu, m_a, m_b, "mu")
    if callable(sigma):
        fn = sigma
        sigma = [[fn(x, y) for y in range(m_b)] for x in range(m_a)]
    perms = tuple(tuple(tuple(int(v) for v in sigma[x][y]) for y in range(m_b)) for x in range(m_a))
    for x, y in itertools.product(range(m_a), range(m_b)):
        if sorted(perms[x][y]) != list(range(d)):
            raise ValueError(f"sigma at (x={x}, y={y}) is not a permutation of 0..{d - 1}")
        if mu[x][y] < 0:
            raise ValueError(f"negative weight mu({x},{y})")
    coeffs = {
        (a, perms[x][y][a], x, y): mu[x][y]
        for x, y, a in itertools.product(range(m_a), range(m_b), range(d))
    }
    return BellExpression(Scenario.bipartite(m_a, m_b, d), coeffs, kind="unique_game", mu=mu, sigma=perms)


def identity_unique_game(d: int, m_a: int, m_b: int, mu=None) -> BellExpression:
    if mu is None:
        w = Fraction(1, m_a * m_b)
        mu = [[w] * m_b for _ in range(m_a)]
    return unique_game(m_a, m_b, d, mu, lambda x, y: tuple(range(d)))


def chain_pairs(n: int) -> list[tuple[int, int]]:
    """Input pairs carrying weight in the N-setting chain, including ``(0, N-1)``."""
    pairs = {(x, y) for x in range(n) for y in range(n) if x == y or x == y + 1}
    pairs.add((0, n - 1))
    return sorted(pairs)


def chained(n: int, mu=None) -> BellExpression:
    """Chained (Braunstein-Caves) XOR game on ``n`` settings per party.

    Outputs must agree on pairs ``x = y`` and ``x = y + 1`` and disagree on
    ``(0, n - 1)``.  ``mu`` defaults to ``1/(2n)`` on every chain pair.
    """
    if n < 2:
        raise ValueError("chained expressions need N >= 2")
    support = set(chain_pairs(n))
    if mu is None:
        w = Fraction(1, 2 * n)
        mu = [[w if (x, y) in support else ZERO for y in range(n)] for x in range(n)]
    mu = _as_matrix(mu, n, n, "mu")
    for x, y in itertools.product(range(n), range(n)):
        if mu[x][y] != 0 and (x, y) not in support:
            raise ValueError(f"mu({x},{y}) is off the chain support")
    anti = (0, n - 1)
    pred = [[(int((x, y) != anti), int((x, y) == anti)) for y in range(n)] for x in range(n)]
    expr = xor_game(n, n, mu, pred)
    return replace(expr, kind="chained", chain_length=n)


# Rows: Alice setting x (I, II, III) and outcome a (1..4).
# Columns: Bob setting y (I, II, III), each with outcomes b = 1..4.
CLAIM3_TABLE = (
    "++-- ++-- ++--",
    "++-- --++ --++",
    "--++ ++-- --++",
    "--++ --++ ++--",
    "+-+- +-+- +-+-",
    "+-+- -+-+ -+-+",
    "-+-+ +-+- -+-+",
    "-+-+ -+-+ +-+-",
    "+--+ +--+ -++-",
    "+--+ -++- +--+",
    "-++- +--+ +--+",
    "-++- -++- -++-",
)
ROMAN = ("I", "II", "III")


def claim3_signs() -> dict[tuple[int, int, int, int], bool]:
    """``(a, b, x, y) -> True`` on the "+" cells of the table."""
    signs = {}
    for row, line in enumerate(CLAIM3_TABLE):
        x, a = divmod(row, 4)
        for y, block in enumerate(line.split()):
            for b, mark in enumerate(block):
                signs[(a, b, x, y)] = mark == "+"
    return signs


def claim3_expression() -> BellExpression:
    """The 3-setting, 4-outcome indicator expression; coefficient 1 on "+" cells."""
    coeffs = {key: Fraction(1) for key, plus in claim3_signs().items() if plus}
    return BellExpression(
        Scenario.bipartite(3, 3, 4), coeffs, kind="table", setting_labels=ROMAN
    )


def restrict_bob_settings(expr: BellExpression, removed: Iterable[int]) -> BellExpression:
    """Zero every coefficient on the removed Bob settings (indices are kept)."""
    removed = set(removed)
    if any(y < 0 or y >= expr.m_b for y in removed):
        raise ValueError(f"Bob settings must lie in 0..{expr.m_b - 1}")
    active = tuple(y for y in expr.active_settings if y not in removed)
    if not active:
        raise ValueError("cannot remove every Bob setting")
    coeffs = {k: v for k, v in expr.coefficients.items() if k[3] not in removed}
    return replace(expr, coefficients=coeffs, active_settings=active)


def lift(expr: BellExpression, num_bobs: int, bob: int) -> LiftedExpression:
    """Place ``expr`` between Alice and Bob number ``bob`` (1-based) of ``num_bobs``.

    The other Bobs' inputs are held at setting 0 and their outputs summed
    over, so on a no-signaling box the value equals ``expr`` on the
    Alice-``bob`` marginal.
    """
    if num_bobs < 1 or not 1 <= bob <= num_bobs:
        raise ValueError(f"bob index {bob} out of range 1..{num_bobs}")
    d = expr.d
    scenario = Scenario(expr.m_a, (expr.m_b,) * num_bobs, d)
    others = list(itertools.product(range(d), repeat=num_bobs - 1))
    coeffs = {}
    for (a, b, x, y), c in expr.coefficients.items():
        inputs = [0] * num_bobs
        inputs[bob - 1] = y
        for rest in others:
            outs = list(rest)
            outs.insert(bob - 1, b)
            coeffs[((x, *inputs), (a, *outs))] = c
    return LiftedExpression(scenario, coeffs)


def lifted_sum(expr: BellExpression, num_bobs: int) -> LiftedExpression:
    """``sum_i lift(expr, num_bobs, i)``: the monogamy objective."""
    total = lift(expr, num_bobs, 1)
    for i in range(2, num_bobs + 1):
        total = total + lift(expr, num_bobs, i)
    return total


def is_beta_restricted(mu) -> dict[tuple[int, int], Fraction] | None:
    """Ratios ``beta[y, y']`` with ``mu(x, y) = beta * mu(x, y')`` for all ``x``.

    Returns ``None`` when two nonzero columns are not proportional.  A zero
    column ``y`` gets ``beta[y, y'] = 0``; pairs with a zero column ``y'``
    have no defined ratio and are left out.
    """
    rows = [[as_rational(v) for v in row] for row in mu]
    if any(v < 0 for row in rows for v in row):
        raise ValueError("weights must be nonnegative")
    cols = list(zip(*rows))
    beta = {}
    for y, col in enumerate(cols):
        for y2, ref in enumerate(cols):
            pivot = next((x for x, v in enumerate(ref) if v != 0), None)
            if pivot is None:
                continue
            ratio = col[pivot] / ref[pivot]
            if any(c != ratio * r for c, r in zip(col, ref)):
                return None
            beta[(y, y2)] = ratio
    return beta

"""Scenarios, conditional probability boxes and deterministic strategies.

Party 0 is Alice, parties 1..K are the Bobs.  Input and output tuples are
ordered the same way.  All indices are 0-based; all probabilities are
:class:`fractions.Fraction`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence

Rational = Fraction
Cell = tuple[tuple[int, ...], tuple[int, ...]]

ZERO = Fraction(0)
ONE = Fraction(1)


class StructuralError(ValueError):
    """A box table is missing entries or has the wrong shape."""


class SignalingError(ValueError):
    """A box violates a no-signaling constraint where one is required."""


class UnsupportedScenarioError(ValueError):
    pass


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected: they would smuggle rounding into exact results.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, str)):
        return Fraction(value)
    if hasattr(value, "numerator") and hasattr(value, "denominator") and not isinstance(value, float):
        return Fraction(int(value.numerator), int(value.denominator))
    raise TypeError(f"cannot use {type(value).__name__} {value!r} as an exact rational")


@dataclass(frozen=True)
class Scenario:
    """Setting counts for Alice and each Bob, plus the common outcome count.

    ``bob_settings`` may be empty, which describes a single-party box (used
    for factors of product boxes and single-party marginals).
    """

    alice_settings: int
    bob_settings: tuple[int, ...]
    outcomes: int

    def __post_init__(self):
        object.__setattr__(self, "bob_settings", tuple(self.bob_settings))
        for m in (self.alice_settings, *self.bob_settings):
            if not isinstance(m, int) or m < 1:
                raise ValueError(f"setting counts must be positive integers, got {m!r}")
        if not isinstance(self.outcomes, int) or self.outcomes < 1:
            raise ValueError(f"outcome count must be a positive integer, got {self.outcomes!r}")

    @classmethod
    def bipartite(cls, alice_settings: int, bob_settings: int, outcomes: int) -> Scenario:
        return cls(alice_settings, (bob_settings,), outcomes)

    @property
    def num_bobs(self) -> int:
        return len(self.bob_settings)

    @property
    def parties(self) -> int:
        return 1 + len(self.bob_settings)

    @property
    def settings(self) -> tuple[int, ...]:
        return (self.alice_settings, *self.bob_settings)

    def input_tuples(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(m) for m in self.settings))

    def output_tuples(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(range(self.outcomes), repeat=self.parties)

    def cells(self) -> Iterator[Cell]:
        outputs = list(self.output_tuples())
        for inputs in self.input_tuples():
            for outs in outputs:
                yield inputs, outs

    def num_cells(self) -> int:
        n = self.outcomes**self.parties
        for m in self.settings:
            n *= m
        return n


@dataclass(frozen=True)
class ConditionalBox:
    """A table ``P(outputs | inputs)`` keyed by ``(inputs, outputs)`` cells."""

    scenario: Scenario
    table: Mapping[Cell, Fraction]

    @classmethod
    def from_function(cls, scenario: Scenario, prob: Callable[[tuple, tuple], object]) -> ConditionalBox:
        table = {(i, o): as_rational(prob(i, o)) for i, o in scenario.cells()}
        return cls(scenario, table)

    @classmethod
    def from_sparse(cls, scenario: Scenario, entries: Mapping[Cell, object]) -> ConditionalBox:
        """Dense box from a sparse mapping; absent cells are zero."""
        table = {}
        for cell in scenario.cells():
            table[cell] = as_rational(entries.get(cell, 0))
        extra = set(entries) - table.keys()
        if extra:
            raise StructuralError(f"cell {min(extra)} is outside the scenario")
        return cls(scenario, table)

    def __getitem__(self, cell: Cell) -> Fraction:
        return self.table[cell]

    def prob(self, inputs: Sequence[int], outputs: Sequence[int]) -> Fraction:
        return self.table[(tuple(inputs), tuple(outputs))]

    def check_structure(self) -> None:
        for cell in self.scenario.cells():
            if cell not in self.table:
                raise StructuralError(f"box table is missing entry {cell}")
        if len(self.table) != self.scenario.num_cells():
            raise StructuralError("box table has entries outside the scenario")

    def validate(self) -> None:
        """Raise unless the table is complete, nonnegative and normalized."""
        self.check_structure()
        outputs = list(self.scenario.output_tuples())
        for inputs in self.scenario.input_tuples():
            total = ZERO
            for outs in outputs:
                p = self.table[(inputs, outs)]
                if p < 0:
                    raise ValueError(f"negative probability at {(inputs, outs)}: {p}")
                total += p
            if total != 1:
                raise ValueError(f"probabilities at inputs {inputs} sum to {total}, not 1")

    def support(self) -> dict[Cell, Fraction]:
        return {cell: p for cell, p in self.table.items() if p != 0}


@dataclass(frozen=True)
class DeterministicStrategy:
    """Alice answers ``alice_outputs[x]``, Bob answers ``bob_outputs[y]``."""

    scenario: Scenario
    alice_outputs: tuple[int, ...]
    bob_outputs: tuple[int, ...]

    def to_box(self) -> ConditionalBox:
        return ConditionalBox.from_function(
            self.scenario,
            lambda i, o: ONE if o == (self.alice_outputs[i[0]], self.bob_outputs[i[1]]) else ZERO,
        )


def _marginal_sums(box: ConditionalBox, party: int) -> dict:
    """Sum over ``party``'s output, keyed by (other inputs, other outputs, party input)."""
    sums: dict = {}
    for (inputs, outs), p in box.table.items():
        key = (
            inputs[:party] + inputs[party + 1 :],
            outs[:party] + outs[party + 1 :],
            inputs[party],
        )
        sums[key] = sums.get(key, ZERO) + p
    return sums


def is_no_signaling(box: ConditionalBox) -> bool:
    """True iff no party's input changes the joint marginal of the others.

    Checks, for every party, that summing out its output gives a table that
    does not depend on its input.  Comparing consecutive inputs suffices.
    """
    box.check_structure()
    scenario = box.scenario
    for party, m in enumerate(scenario.settings):
        if m == 1 or scenario.parties == 1:
            continue
        sums = _marginal_sums(box, party)
        for (others_in, others_out, setting), total in sums.items():
            if setting + 1 < m and sums[(others_in, others_out, setting + 1)] != total:
                return False
    return True


def _project(box: ConditionalBox, keep: tuple[int, ...], fixed: Mapping[int, int]) -> dict:
    drop = [p for p in range(box.scenario.parties) if p not in keep]
    table: dict = {}
    for (inputs, outs), p in box.table.items():
        if any(inputs[q] != fixed[q] for q in drop):
            continue
        key = (tuple(inputs[q] for q in keep), tuple(outs[q] for q in keep))
        table[key] = table.get(key, ZERO) + p
    return table


def marginalize(
    box: ConditionalBox,
    keep: Iterable[int],
    fixed_inputs: Mapping[int, int] | None = None,
) -> ConditionalBox:
    """Sum out every party not in ``keep`` with its input held at ``fixed_inputs``.

    Dropped parties default to input 0.  The result is recomputed with each
    dropped party's input shifted by one and compared exactly; a mismatch
    raises :class:`SignalingError`.
    """
    keep = tuple(sorted(set(keep)))
    scenario = box.scenario
    if not keep or keep[0] < 0 or keep[-1] >= scenario.parties:
        raise ValueError(f"keep must name parties in 0..{scenario.parties - 1}, got {keep}")
    drop = [p for p in range(scenario.parties) if p not in keep]
    if fixed_inputs is None:
        fixed_inputs = {p: 0 for p in drop}
    if set(fixed_inputs) != set(drop):
        raise ValueError(f"fixed_inputs must cover exactly the dropped parties {drop}")
    box.check_structure()

    table = _project(box, keep, fixed_inputs)
    settings = scenario.settings
    alternative = {p: (fixed_inputs[p] + 1) % settings[p] for p in drop}
    if alternative != dict(fixed_inputs) and _project(box, keep, alternative) != table:
        raise SignalingError("marginal ill-defined: box is signaling")

    kept = [settings[p] for p in keep]
    return ConditionalBox(Scenario(kept[0], tuple(kept[1:]), scenario.outcomes), table)


def enumerate_deterministic(scenario: Scenario) -> Iterator[DeterministicStrategy]:
    """All deterministic strategies of a bipartite scenario, lexicographically."""
    if scenario.num_bobs != 1:
        raise UnsupportedScenarioError("deterministic enumeration needs exactly one Bob")
    m_a, (m_b,) = scenario.alice_settings, scenario.bob_settings
    d = scenario.outcomes
    for alice in itertools.product(range(d), repeat=m_a):
        for bob in itertools.product(range(d), repeat=m_b):
            yield DeterministicStrategy(scenario, alice, bob)


def product_box(parts: Sequence[ConditionalBox]) -> ConditionalBox:
    """Tensor product; the parties of ``parts`` are concatenated in order."""
    if not parts:
        raise ValueError("product_box needs at least one factor")
    d = parts[0].scenario.outcomes
    if any(part.scenario.outcomes != d for part in parts):
        raise ValueError("all factors must share the outcome count")
    for part in parts:
        part.check_structure()
    settings = [m for part in parts for m in part.scenario.settings]
    scenario = Scenario(settings[0], tuple(settings[1:]), d)

    table = dict(parts[0].table)
    for part in parts[1:]:
        table = {
            (i1 + i2, o1 + o2): p1 * p2
            for (i1, o1), p1 in table.items()
            for (i2, o2), p2 in part.table.items()
        }
    return ConditionalBox(scenario, table)


def uniform_box(scenario: Scenario) -> ConditionalBox:
    p = Fraction(1, scenario.outcomes**scenario.parties)
    return ConditionalBox.from_function(scenario, lambda i, o: p)


def deterministic_party_box(outputs: Sequence[int], outcomes: int) -> ConditionalBox:
    """Single-party box answering ``outputs[setting]`` with certainty."""
    scenario = Scenario(len(outputs), (), outcomes)
    return ConditionalBox.from_function(scenario, lambda i, o: ONE if o[0] == outputs[i[0]] else ZERO)


def uniform_unique_winner(game) -> ConditionalBox:
    """The box with ``P(a, sigma_xy(a) | x, y) = 1/d``; wins every round of a unique game."""
    sigma = getattr(game, "sigma", None)
    if getattr(game, "kind", None) != "unique_game" or sigma is None:
        raise TypeError("uniform_unique_winner needs an expression with unique-game provenance")
    d = game.scenario.outcomes
    weight = Fraction(1, d)
    return ConditionalBox.from_function(
        game.scenario,
        lambda i, o: weight if sigma[i[0]][i[1]][o[0]] == o[1] else ZERO,
    )

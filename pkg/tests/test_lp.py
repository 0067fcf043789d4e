import random
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from bellmono.lp import LinearProgram, Status, check_point, lp_maximize
from conftest import float_lp_value

Q = Fraction


def test_single_variable():
    lp = LinearProgram(["x", "s"], {"x": 1}, [({"x": 1, "s": 1}, 1)])
    sol = lp_maximize(lp)
    assert sol.status is Status.OPTIMAL
    assert sol.value == 1
    assert sol.point == {"x": 1, "s": 0}


def test_infeasible():
    lp = LinearProgram(["x"], {"x": 1}, [({"x": 1}, 1), ({"x": 1}, 2)])
    assert lp_maximize(lp).status is Status.INFEASIBLE


def test_infeasible_negative_rhs():
    lp = LinearProgram(["x", "y"], {"x": 1}, [({"x": 1, "y": 1}, -1)])
    assert lp_maximize(lp).status is Status.INFEASIBLE


def test_unbounded():
    lp = LinearProgram(["x", "y"], {"x": 1}, [({"x": 1, "y": -1}, 0)])
    assert lp_maximize(lp).status is Status.UNBOUNDED


def test_redundant_rows():
    rows = [({"x": 1, "y": 1}, 1), ({"x": 2, "y": 2}, 2), ({"x": 1, "y": 1}, 1)]
    sol = lp_maximize(LinearProgram(["x", "y"], {"x": 3, "y": 1}, rows))
    assert sol.value == 3


def test_beale_cycling_example():
    """Textbook problem on which Dantzig's rule cycles; Bland's rule must not."""
    names = [f"x{i}" for i in range(1, 8)]
    rows = [
        ({"x1": 1, "x4": Q(1, 4), "x5": -8, "x6": -1, "x7": 9}, 0),
        ({"x2": 1, "x4": Q(1, 2), "x5": -12, "x6": Q(-1, 2), "x7": 3}, 0),
        ({"x3": 1, "x6": 1}, 1),
    ]
    objective = {"x4": Q(3, 4), "x5": -20, "x6": Q(1, 2), "x7": -6}
    sol = lp_maximize(LinearProgram(names, objective, rows))
    assert sol.value == Q(5, 4)
    assert check_point(LinearProgram(names, objective, rows), sol.point) == Q(5, 4)


def test_deterministic_output():
    rows = [({"a": 1, "b": 1, "c": 1}, 1)]
    lp = LinearProgram(["a", "b", "c"], {"a": 1, "b": 1, "c": 1}, rows)
    first = lp_maximize(lp)
    assert all(lp_maximize(lp).point == first.point for _ in range(3))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_random_lps_against_float_solver(seed):
    """Bounded random LPs: exact optimum agrees with HiGHS and the point is feasible."""
    rng = random.Random(seed)
    n, m = rng.randint(2, 7), rng.randint(1, 4)
    names = list(range(n))
    x0 = [Q(rng.randint(0, 4), rng.randint(1, 3)) for _ in names]
    rows = []
    for _ in range(m):
        row = {j: Q(rng.randint(-4, 4)) for j in names if rng.random() < 0.7}
        rows.append((row, sum((c * x0[j] for j, c in row.items()), Q(0))))
    rows.append(({j: 1 for j in names}, sum(x0)))  # keeps the feasible region bounded
    objective = {j: Q(rng.randint(-5, 5), rng.randint(1, 4)) for j in names}
    lp = LinearProgram(names, objective, rows)
    sol = lp_maximize(lp)
    assert sol.status is Status.OPTIMAL
    assert check_point(lp, sol.point) == sol.value
    # the float solver is an independent cross-check only, hence the tolerance
    assert abs(float_lp_value(lp) - float(sol.value)) < 1e-7

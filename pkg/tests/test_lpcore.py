from fractions import Fraction

import pytest

from lipcert.errors import InvalidInput
from lipcert.lpcore import LinearProgram, solve_lp

from lp_oracle import oracle_solve


def _lp(num_vars, constraints, objective):
    lp = LinearProgram(num_vars)
    for row, bound in constraints:
        lp.add_constraint([Fraction(c) for c in row], bound)
    lp.set_objective([Fraction(c) for c in objective])
    return lp


def test_simple_optimum():
    res = solve_lp(_lp(1, [([1], 1), ([-1], 0)], [1]))
    assert res.status == "optimal"
    assert res.value == 1 and res.point == (1,)


def test_infeasible():
    res = solve_lp(_lp(1, [([-1], -2), ([1], 1)], [1]))
    assert res.status == "infeasible"


def test_unbounded():
    res = solve_lp(_lp(1, [([-1], 0)], [1]))
    assert res.status == "unbounded"


def test_two_variable_vertex():
    # max x + y over the triangle x,y >= 0, x + y <= 3/2
    res = solve_lp(_lp(2, [([1, 1], Fraction(3, 2)), ([-1, 0], 0),
                           ([0, -1], 0)], [1, 1]))
    assert res.status == "optimal"
    assert res.value == Fraction(3, 2)


def test_free_variables_can_go_negative():
    res = solve_lp(_lp(1, [([1], -3)], [1]))
    assert res.status == "optimal"
    assert res.value == -3 and res.point == (-3,)


def test_optimal_point_satisfies_constraints_exactly(rng):
    for _ in range(50):
        n = rng.randint(1, 3)
        m = rng.randint(1, 5)
        cons = [([Fraction(rng.randint(-3, 3)) for _ in range(n)],
                 Fraction(rng.randint(-4, 6), rng.randint(1, 3)))
                for _ in range(m)]
        obj = [Fraction(rng.randint(-3, 3)) for _ in range(n)]
        res = solve_lp(_lp(n, cons, obj))
        if res.status != "optimal":
            continue
        for row, bound in cons:
            assert sum(c * x for c, x in zip(row, res.point)) <= bound
        assert sum(c * x for c, x in zip(obj, res.point)) == res.value


def test_matches_vertex_enumeration_oracle(rng):
    for _ in range(60):
        n = rng.randint(1, 3)
        m = rng.randint(1, 5)
        rows = [[Fraction(rng.randint(-3, 3)) for _ in range(n)]
                for _ in range(m)]
        rhs = [Fraction(rng.randint(-4, 6), rng.randint(1, 3))
               for _ in range(m)]
        obj = [Fraction(rng.randint(-3, 3)) for _ in range(n)]
        res = solve_lp(_lp(n, list(zip(rows, rhs)), obj))
        ref = oracle_solve(n, rows, rhs, obj)
        assert res.status == ref[0]
        if ref[0] == "optimal":
            assert res.value == ref[1]


def test_shape_validation():
    lp = LinearProgram(2)
    with pytest.raises(InvalidInput):
        lp.add_constraint([1], 0)
    with pytest.raises(InvalidInput):
        lp.set_objective([1, 2, 3])
    lp2 = LinearProgram(1)
    lp2.add_constraint([1], 1)
    with pytest.raises(InvalidInput):
        solve_lp(lp2)  # objective not set

import numpy as np
import pytest
from conftest import SQRT3, SYM2

from circlepack import (
    INF,
    Move,
    MoveWord,
    apply,
    commuting_check,
    holonomy_of,
    move_matrix,
    rigidity_compare,
    select_dependent_triple,
    solve_dependent_triple,
    torus_traces,
)
from circlepack.errors import PatternMismatchError, PointNotInSpaceError, ValidationError
from circlepack.holonomy import (
    ACW,
    CW,
    normalize_trace,
    relation_product,
    remark,
    rotate,
    side_pairing_generator,
    torus_example_generators,
    triple_generators,
)
from circlepack.solver import gap_products, torus_point


def test_move_matrices():
    p = torus_point(2, 1, 3)
    r = move_matrix(remark(ACW), p)
    assert np.allclose(r.m, [[0, 1j], [1j, 1]])
    assert apply(r, 0) == pytest.approx(1j)
    assert apply(r, 1j) is INF
    assert apply(r, INF) == pytest.approx(0)
    assert np.allclose(move_matrix(remark(CW), p).m, [[1, -1j], [-1j, 0]])
    assert np.allclose(move_matrix(rotate(0, CW), p).m, [[0, 1], [-1, 2]])
    assert np.allclose((move_matrix(rotate(0, CW), p) @ move_matrix(rotate(0, ACW), p)).m, np.eye(2))


def test_bad_moves_are_rejected():
    with pytest.raises(ValidationError):
        Move("slide", CW, 0)
    with pytest.raises(ValidationError):
        Move("rotate", CW)


def test_empty_words_give_identity():
    h = holonomy_of(MoveWord(), MoveWord(), torus_point(2, 1, 3))
    assert np.allclose(h.matrix.m, np.eye(2))


@pytest.mark.parametrize("x,y", [(2.0, 1.0), (SQRT3, SQRT3), (0.7, 3.1)])
def test_torus_first_generator_closed_form(x, y):
    p = torus_point(x, y)
    z = p.values[2]
    g1 = torus_example_generators(p)[0]
    expected = [[x * 1j, x - 1j], [(x * z - 1) * 1j, (x * z - 1) - z * 1j]]
    assert np.allclose(g1.matrix.m, expected, atol=1e-12)


def test_torus_trace_examples():
    assert torus_traces(SQRT3, SQRT3, SQRT3) == pytest.approx((2, 2))
    t1, t2 = torus_traces(2, 1, 3)
    assert t1 == pytest.approx(5 - 1j)
    assert t2 == pytest.approx(1 - 1j)
    with pytest.raises(PointNotInSpaceError):
        torus_traces(1, 1, 1)


def test_torus_traces_match_matrices():
    rng = np.random.default_rng(5)
    for _ in range(50):
        x, y = rng.uniform(0.5, 4, 2)
        if x * y <= 1.1:
            continue
        p = torus_point(x, y)
        gens = torus_example_generators(p)
        formula = torus_traces(*p.values)
        assert normalize_trace(gens[0].trace) == pytest.approx(formula[0], abs=1e-12)
        assert normalize_trace(gens[1].trace) == pytest.approx(formula[1], abs=1e-12)


def test_torus_relation_and_abelian_holonomy():
    p = torus_point(SQRT3, SQRT3)
    g1, g2, g3 = torus_example_generators(p)
    rel = relation_product((g3, g2, g1), (1, -1, 1))
    assert rel.projectively_close(type(rel).identity(), 1e-9)
    assert commuting_check(g1, g2)
    assert commuting_check(g1, g1)


def test_genus_two_triple(symmetric_point):
    gens = triple_generators(symmetric_point)
    rel = relation_product(gens[::-1], (1, 1, 1))
    assert rel.projectively_close(type(rel).identity(), 1e-9)
    assert not commuting_check(gens[0], gens[1])


def test_first_triple_trace_formula(genus2_patterns):
    checked = 0
    for p in genus2_patterns:
        layout = select_dependent_triple(p)
        free = [SYM2 + 0.1 * k for k in range(6)]
        try:
            t, _, _ = gap_products(layout, free)
        except Exception:
            continue
        point = solve_dependent_triple(layout, free).point
        g1 = triple_generators(point)[0]
        expected = -t[3] - (t[1] + t[2]) * 1j
        assert normalize_trace(g1.trace) == pytest.approx(normalize_trace(expected), abs=1e-9)
        checked += 1
    assert checked == len(genus2_patterns)


def test_side_pairings_carry_partner_sides(symmetric_point):
    p = symmetric_point
    for s in range(p.pattern.sides):
        g = side_pairing_generator(p, s)
        h = side_pairing_generator(p, p.pattern.partner[s])
        assert (g.matrix @ h.matrix).projectively_close(type(g.matrix).identity(), 1e-9)


def test_rigidity_examples(symmetric_point, example_pattern):
    assert rigidity_compare(symmetric_point, symmetric_point).verdict == "equal"
    layout = symmetric_point.layout
    free = [SYM2] * 6
    free[0] += 1e-2
    moved = solve_dependent_triple(layout, free).point
    assert rigidity_compare(symmetric_point, moved).verdict == "different"
    assert rigidity_compare(torus_point(SQRT3, SQRT3), torus_point(2, 1, 3)).verdict == "different"
    with pytest.raises(PatternMismatchError):
        rigidity_compare(symmetric_point, torus_point(2, 1, 3))

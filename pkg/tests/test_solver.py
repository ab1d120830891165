import json
import math

import numpy as np
import pytest
from conftest import SQRT3, SYM2
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import finite_difference_jacobian, grid_oracle, word_matrix

from circlepack import (
    ParameterPoint,
    dependent_thresholds,
    jacobian_dependent,
    select_dependent_triple,
    solve_dependent_triple,
    torus_dependent,
    triple_identity_check,
    verify_point,
)
from circlepack.errors import (
    FreeValuesInadmissibleError,
    NoNonseparatingTripleError,
    NotStrictlyAdmissibleError,
    OutsideConvexImageError,
    PointNotInSpaceError,
)
from circlepack.solver import gap_products, torus_point
from circlepack.words import Admissibility, extension_threshold


def test_torus_points():
    sym = verify_point(torus_point(SQRT3, SQRT3, SQRT3))
    assert sym.in_space and sym.residual <= 1e-12
    assert verify_point(torus_point(2, 1, 3)).in_space
    assert verify_point(torus_point(1, 1, 1)).verdict == "out"


def test_torus_dependent():
    assert torus_dependent(SQRT3, SQRT3) == pytest.approx(SQRT3)
    assert torus_dependent(2, 1) == pytest.approx(3)
    with pytest.raises(OutsideConvexImageError):
        torus_dependent(1, 1)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.2, 8), st.floats(0.2, 8))
def test_torus_round_trip(x, y):
    if x * y <= 1.05:
        return
    report = verify_point(torus_point(x, y))
    assert report.in_space
    assert report.residual <= 1e-12


def test_threshold_of_two_two_gap():
    assert extension_threshold([2, 2], "both") == pytest.approx(1)


def test_symmetric_point_thresholds(genus2_patterns):
    for p in genus2_patterns:
        layout = select_dependent_triple(p)
        assert max(dependent_thresholds(layout, [SYM2] * 6)) < SYM2


def test_symmetric_solve_on_every_pattern(genus2_patterns):
    for p in genus2_patterns:
        layout = select_dependent_triple(p)
        res = solve_dependent_triple(layout, [SYM2] * 6)
        assert np.allclose(res.triple, [SYM2] * 3, atol=1e-9)
        assert res.residual <= 1e-12
        report = verify_point(res.point)
        assert report.in_space
        assert all(report.worst[L] is Admissibility.STRICT for L in range(1, 17))
        assert report.worst[17] is Admissibility.BOUNDARY


def test_example_pattern_lifted_solve(example_pattern):
    layout = select_dependent_triple(example_pattern)
    v = 1.1
    while True:
        try:
            gap_products(layout, [v] * 6)
            break
        except FreeValuesInadmissibleError:
            v += 0.1
    res = solve_dependent_triple(layout, [v] * 6)
    assert verify_point(res.point).residual <= 1e-9
    count, root = grid_oracle(*gap_products(layout, [v] * 6), res.thresholds)
    assert count == 1
    assert np.allclose(root, res.triple, atol=1e-6)


def test_inadmissible_gap_is_rejected(example_pattern):
    layout = select_dependent_triple(example_pattern)
    with pytest.raises(FreeValuesInadmissibleError):
        solve_dependent_triple(layout, [0.5] * 6)


def test_triple_identity_examples():
    s = [SQRT3, SQRT3]
    assert triple_identity_check(s, s, s)
    assert np.allclose(word_matrix(s * 3), -np.eye(2), atol=1e-12)
    assert not triple_identity_check([2, 2], [2, 2], [2, 2])
    with pytest.raises(NotStrictlyAdmissibleError):
        triple_identity_check([0.1, 0.1], s, s)


def test_jacobian_at_symmetric_point(symmetric_point):
    layout = symmetric_point.layout
    jac = jacobian_dependent(layout, symmetric_point)
    assert abs(np.linalg.det(jac)) > 1e-6
    fd = finite_difference_jacobian(layout, symmetric_point)
    assert np.max(np.abs(jac - fd)) / np.max(np.abs(jac)) <= 1e-6


def test_jacobian_preconditions(symmetric_point, torus):
    with pytest.raises(NoNonseparatingTripleError):
        select_dependent_triple(torus)
    bad = symmetric_point.with_values([v * 1.01 for v in symmetric_point.values])
    with pytest.raises(PointNotInSpaceError):
        jacobian_dependent(symmetric_point.layout, bad)


def test_parameter_json_round_trip(symmetric_point):
    text = json.dumps(symmetric_point.to_json())
    again = ParameterPoint.from_json(json.loads(text))
    assert again.values == symmetric_point.values
    assert again.layout.dependent == symmetric_point.layout.dependent
    assert verify_point(again).verdict == verify_point(symmetric_point).verdict


def test_solutions_lie_above_thresholds(genus2_patterns):
    rng = np.random.default_rng(11)
    for p in genus2_patterns:
        layout = select_dependent_triple(p)
        done = 0
        while done < 5:
            free = list(rng.uniform(1.5, 3, 6))
            try:
                gap_products(layout, free)
            except FreeValuesInadmissibleError:
                continue
            done += 1
            res = solve_dependent_triple(layout, free)
            assert all(v > t for v, t in zip(res.triple, res.thresholds))
            assert verify_point(res.point).in_space
            assert math.isfinite(res.residual)

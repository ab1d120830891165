import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from oracles import geometric_class

from circlepack import (
    Admissibility,
    associated_matrix,
    classify_admissibility,
    extension_threshold,
    tangency_points,
    word_product,
)
from circlepack.errors import NonpositiveCrossRatioError, NotStrictlyAdmissibleError
from circlepack.words import classify_cyclic_subwords

S2 = math.sqrt(2)


def test_associated_matrix():
    assert np.allclose(associated_matrix(S2), [[0, 1], [-1, S2]])
    m = associated_matrix(1)
    assert np.trace(m) == 1 and np.linalg.det(m) == pytest.approx(1)
    with pytest.raises(NonpositiveCrossRatioError):
        associated_matrix(0)


def test_word_products():
    assert np.allclose(word_product([S2] * 3).matrix, [[-S2, 1], [-1, 0]])
    assert np.allclose(word_product([]).matrix, np.eye(2))
    assert np.allclose(word_product([math.sqrt(3)] * 6).matrix, -np.eye(2), atol=1e-12)


def test_classification_examples():
    assert classify_admissibility([2, 2]).kind is Admissibility.STRICT
    assert classify_admissibility([S2] * 3).kind is Admissibility.BOUNDARY
    five = classify_admissibility([S2] * 5)
    assert five.kind is Admissibility.INADMISSIBLE
    assert five.span is not None and five.condition is not None


def test_four_root_two_is_not_admissible():
    # its product is -I, so b = 0 fails the strict sign condition on b
    assert np.allclose(word_product([S2] * 4).matrix, -np.eye(2), atol=1e-12)
    assert classify_admissibility([S2] * 4).kind is Admissibility.INADMISSIBLE


def test_violation_is_shortest_then_leftmost():
    cls = classify_admissibility([3, 3, 0.1, 3])
    assert cls.span == (1, 2)
    assert cls.margin < 0


def test_tangency_point_examples():
    assert tangency_points([2, 2]) == pytest.approx([1 / 2, 2 / 3])
    pts = tangency_points([S2] * 3)
    assert pts[:2] == pytest.approx([1 / S2, S2]) and math.isinf(pts[2])
    assert tangency_points([3.0]) == pytest.approx([1 / 3])


def test_extension_thresholds():
    assert extension_threshold([2, 2], "left") == pytest.approx(2 / 3)
    assert extension_threshold([2, 2], "right") == pytest.approx(2 / 3)
    assert extension_threshold([2, 2], "both") == pytest.approx(1)
    assert classify_admissibility([1, 2, 2, 1]).kind is Admissibility.BOUNDARY
    with pytest.raises(NotStrictlyAdmissibleError):
        extension_threshold([S2] * 3, "left")


def test_cyclic_table_matches_direct_classification():
    rng = np.random.default_rng(3)
    for _ in range(50):
        xs = list(rng.uniform(0.5, 4, 7))
        table = classify_cyclic_subwords(xs, 7)
        for length, classes in table.items():
            for i, got in enumerate(classes):
                sub = [xs[(i + k) % 7] for k in range(length)]
                assert got is classify_admissibility(sub).kind


entries = st.floats(min_value=1e-3, max_value=4.0, allow_nan=False)
words = st.lists(entries, min_size=1, max_size=8)


@settings(max_examples=500, deadline=None)
@given(words)
def test_sign_test_matches_geometric_oracle(xs):
    assert classify_admissibility(xs).kind.value == geometric_class(xs)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.floats(0.8, 4.0), min_size=2, max_size=6), st.data())
def test_convexity(u, data):
    v = data.draw(st.lists(st.floats(0.8, 4.0), min_size=len(u), max_size=len(u)))
    assume(classify_admissibility(u).is_strict and classify_admissibility(v).is_strict)
    t = data.draw(st.floats(0, 1))
    w = [t * a + (1 - t) * b for a, b in zip(u, v)]
    assert classify_admissibility(w).is_strict

    def p(xs):
        m = word_product(xs)
        return m.b / m.d

    assert p(w) <= t * p(u) + (1 - t) * p(v) + 1e-9


@settings(max_examples=300, deadline=None)
@given(st.lists(st.floats(0.8, 4.0), min_size=1, max_size=7), st.data())
def test_increasing_an_entry_keeps_strictness(u, data):
    assume(classify_admissibility(u).is_strict)
    k = data.draw(st.integers(0, len(u) - 1))
    bump = data.draw(st.floats(0, 5))
    lifted = list(u)
    lifted[k] += bump
    assert classify_admissibility(lifted).is_strict


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0.8, 4.0), min_size=1, max_size=6))
def test_proper_subwords_of_boundary_words_are_strict(u):
    assume(classify_admissibility(u).is_strict)
    x = extension_threshold(u, "right")
    w = list(u) + [x]
    assume(classify_admissibility(w).kind is Admissibility.BOUNDARY)
    for i in range(len(w)):
        for j in range(i + 1, len(w) + 1):
            if j - i < len(w):
                assert classify_admissibility(w[i:j]).is_strict


@settings(max_examples=300, deadline=None)
@given(st.lists(st.floats(0.8, 4.0), min_size=1, max_size=6), st.sampled_from(["left", "right", "both"]))
def test_threshold_is_sharp(u, side):
    assume(classify_admissibility(u).is_strict)
    x = extension_threshold(u, side)

    def extend(y):
        if side == "left":
            return [y] + list(u)
        if side == "right":
            return list(u) + [y]
        return [y] + list(u) + [y]

    assert classify_admissibility(extend(x + 1e-6)).is_strict
    if x - 1e-6 > 0:
        assert not classify_admissibility(extend(x - 1e-6)).is_admissible

"""Associated matrices, cross-ratio words and the admissibility sign test.

The associated matrix of a cross ratio ``x > 0`` is ``A(x) = [[0, 1], [-1, x]]``.
A word ``(x_1, ..., x_n)`` has product ``A(x_1) ... A(x_n) = [[a, b], [c, d]]``.
Products are carried as plain 4-tuples of floats ``(a, b, c, d)``; the cost
of numpy dispatch dominates for 2x2 matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import NonpositiveCrossRatioError, NotStrictlyAdmissibleError

SIGN_TOL = 1e-12

Mat = tuple[float, float, float, float]
IDENTITY: Mat = (1.0, 0.0, 0.0, 1.0)


def mat_mul(p: Mat, q: Mat) -> Mat:
    return (
        p[0] * q[0] + p[1] * q[2],
        p[0] * q[1] + p[1] * q[3],
        p[2] * q[0] + p[3] * q[2],
        p[2] * q[1] + p[3] * q[3],
    )


def mat_inv(p: Mat) -> Mat:
    """Inverse of a unit-determinant matrix."""
    return (p[3], -p[1], -p[2], p[0])


def amat(x: float) -> Mat:
    return (0.0, 1.0, -1.0, float(x))


def _check_entries(entries: Iterable[float]) -> tuple[float, ...]:
    out = tuple(float(x) for x in entries)
    for k, x in enumerate(out):
        if not (x > 0 and math.isfinite(x)):
            raise NonpositiveCrossRatioError(f"entry {k + 1} is {x!r}; cross ratios must be positive")
    return out


def product(entries: Sequence[float]) -> Mat:
    """Product of associated matrices without validation."""
    p = IDENTITY
    for x in entries:
        # p @ A(x) = [[-b, a + b x], [-d, c + d x]]
        p = (-p[1], p[0] + p[1] * x, -p[3], p[2] + p[3] * x)
    return p


def associated_matrix(x: float) -> np.ndarray:
    """The matrix ``[[0, 1], [-1, x]]`` attached to an edge with cross ratio ``x``."""
    (x,) = _check_entries((x,))
    return np.array([[0.0, 1.0], [-1.0, x]])


@dataclass(frozen=True)
class CrossRatioWord:
    entries: tuple[float, ...]
    a: float
    b: float
    c: float
    d: float

    @property
    def abcd(self) -> Mat:
        return (self.a, self.b, self.c, self.d)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def __len__(self) -> int:
        return len(self.entries)


def word_product(entries: Iterable[float]) -> CrossRatioWord:
    """Validate ``entries`` and cache the product of their associated matrices."""
    xs = _check_entries(entries)
    return CrossRatioWord(xs, *product(xs))


def as_word(w) -> CrossRatioWord:
    return w if isinstance(w, CrossRatioWord) else word_product(w)


class Admissibility(str, Enum):
    STRICT = "strict"
    BOUNDARY = "boundary"
    INADMISSIBLE = "inadmissible"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class AdmissibilityClass:
    """Outcome of the sign test.

    ``span`` is the 0-based inclusive index range of the first violating
    subword (shortest, then leftmost) and ``condition`` names the failed
    inequality.  ``margin`` is the smallest slack over every inequality
    tested; it is negative exactly when some inequality fails outright.
    """

    kind: Admissibility
    span: tuple[int, int] | None = None
    condition: str | None = None
    margin: float = math.inf

    @property
    def is_strict(self) -> bool:
        return self.kind is Admissibility.STRICT

    @property
    def is_admissible(self) -> bool:
        return self.kind is not Admissibility.INADMISSIBLE


def _abc_failure(p: Mat, length: int, tol: float) -> tuple[str | None, float]:
    """First failed condition among a, b, c and their smallest slack.

    A single associated matrix has ``a == 0`` identically, so the ``a``
    condition only applies to subwords of length at least 2.
    """
    a, b, c, _ = p
    checks = [("b>0", b), ("c<0", -c)]
    if length > 1:
        checks.insert(0, ("a<0", -a))
    failed = None
    margin = math.inf
    for name, slack in checks:
        margin = min(margin, slack)
        if failed is None and not slack > tol:
            failed = name
    return failed, margin


def _subword_products(xs: Sequence[float], max_len: int, cyclic: bool):
    """Yield ``(length, row)`` where ``row[i]`` is the product of the subword
    of that length starting at ``i``."""
    n = len(xs)
    starts = n if cyclic else None
    rows = None
    for length in range(1, max_len + 1):
        count = starts if cyclic else n - length + 1
        if rows is None:
            rows = [amat(xs[i]) for i in range(count)]
        else:
            new = []
            for i in range(count):
                p = rows[i]
                x = xs[(i + length - 1) % n]
                new.append((-p[1], p[0] + p[1] * x, -p[3], p[2] + p[3] * x))
            rows = new
        yield length, rows


def classify_admissibility(entries: Iterable[float], tol: float = SIGN_TOL) -> AdmissibilityClass:
    """Three-way sign test on every subword of ``entries``.

    Every subword must satisfy ``a <= 0`` (strictly unless it has length 1),
    ``b > 0``, ``c < 0``; proper subwords also need ``d > 0``.  The full word
    is strict when ``d > 0`` and boundary when ``|d| <= tol``.
    """
    xs = _check_entries(entries)
    n = len(xs)
    if n == 0:
        return AdmissibilityClass(Admissibility.STRICT)
    margin = math.inf
    boundary = False
    for length, rows in _subword_products(xs, n, cyclic=False):
        first = None
        for i, p in enumerate(rows):
            failed, m = _abc_failure(p, length, tol)
            d = p[3]
            margin = min(margin, m, abs(d) if length == n and abs(d) <= tol else d)
            if failed is None:
                if length < n and not d > tol:
                    failed = "d>0"
                elif length == n and abs(d) <= tol:
                    boundary = True
                elif length == n and d < -tol:
                    failed = "d>=0"
            if failed is not None and first is None:
                first = ((i, i + length - 1), failed)
        if first is not None:
            return AdmissibilityClass(Admissibility.INADMISSIBLE, first[0], first[1], margin)
    kind = Admissibility.BOUNDARY if boundary else Admissibility.STRICT
    return AdmissibilityClass(kind, None, None, margin)


def classify_cyclic_subwords(
    entries: Sequence[float],
    max_len: int,
    tol: float = SIGN_TOL,
    last_tol: Sequence[float] | None = None,
) -> dict[int, list[Admissibility]]:
    """Classify every cyclic subword of length ``1..max_len``.

    Returns ``{length: [class of the subword starting at i for each i]}``.
    Uses the recursion ``good(i, L) = ok(i, L) and good(i, L-1) and
    good(i+1, L-1)`` so the whole table costs ``O(n * max_len)`` products.
    ``last_tol[i]``, when given, replaces ``tol`` in the boundary test of the
    longest subword starting at ``i``.
    """
    xs = _check_entries(entries)
    n = len(xs)
    if max_len > n:
        raise ValueError("max_len exceeds word length")
    out: dict[int, list[Admissibility]] = {}
    prev_good: list[bool] | None = None
    for length, rows in _subword_products(xs, max_len, cyclic=True):
        good = []
        classes = []
        for i, p in enumerate(rows):
            failed, _ = _abc_failure(p, length, tol)
            inner = True if prev_good is None else prev_good[i] and prev_good[(i + 1) % n]
            d = p[3]
            dtol = last_tol[i] if last_tol is not None and length == max_len else tol
            g = inner and failed is None and d > dtol
            good.append(g)
            if g:
                classes.append(Admissibility.STRICT)
            elif inner and failed is None and abs(d) <= dtol:
                classes.append(Admissibility.BOUNDARY)
            else:
                classes.append(Admissibility.INADMISSIBLE)
        out[length] = classes
        prev_good = good
    return out


def tangency_points(entries: Iterable[float], tol: float = SIGN_TOL) -> list[float]:
    """Tangency points ``p_2, ..., p_{k+1}`` of the fan on the real line.

    ``p_{j+1} = b_j / d_j`` for the length-``j`` prefix, ``inf`` when
    ``|d_j| <= tol``.  The fan starts at ``p_0 = -inf`` and ``p_1 = 0``.
    """
    xs = _check_entries(entries)
    out = []
    p = IDENTITY
    for x in xs:
        p = (-p[1], p[0] + p[1] * x, -p[3], p[2] + p[3] * x)
        out.append(math.inf if abs(p[3]) <= tol else p[1] / p[3])
    return out


def extension_threshold(w, side: str) -> float:
    """Smallest cross ratio that keeps ``w`` admissible when appended.

    ``left`` prepends ``x``, ``right`` appends ``x``, ``both`` does both with
    the same ``x``.  Strictly above the threshold the extension is strict,
    at the threshold it is boundary.
    """
    w = as_word(w)
    if not classify_admissibility(w.entries).is_strict:
        raise NotStrictlyAdmissibleError("extension threshold needs a strictly admissible word")
    a, b, c, d = w.abcd
    if side == "left":
        return b / d
    if side == "right":
        return -c / d
    if side == "both":
        return (b - c + math.sqrt((b + c) ** 2 + 4.0)) / (2.0 * d)
    raise ValueError(f"side must be 'left', 'right' or 'both', not {side!r}")

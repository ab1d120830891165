"""Cross-ratio parameter space: verification, the torus closed form and the
dependent-triple solve for genus at least 2.

A parameter point assigns a positive cross ratio to every edge.  It lies in
the parameter space when the cyclic vertex word multiplies to ``-I`` and its
cyclic subwords of length up to ``n - 2`` are strictly admissible (length
``n - 1`` may be boundary).

For a layout ``x T x y U y z V z`` write ``A = XTX``, ``B = YUY``,
``C = ZVZ``.  With ``T, U, V`` fixed, ``ABC = -I`` reduces to the three
(2,2)-entry equations ``h1(x, y) = v4``, ``h2(y, z) = t4``, ``h3(z, x) = u4``
where ``t4, u4, v4`` are the ``d`` entries of the gap products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .combinatorics import (
    EdgeLayout,
    SidePairingPattern,
    build_pattern,
    edge_index,
    edge_label,
    layout_at,
    select_dependent_triple,
)
from .errors import (
    BracketNotFoundError,
    DegenerateLayoutError,
    FreeValuesInadmissibleError,
    NonpositiveCrossRatioError,
    NotStrictlyAdmissibleError,
    OutsideConvexImageError,
    PatternMismatchError,
    PointNotInSpaceError,
    UnknownEdgeError,
    ValidationError,
)
from .words import (
    SIGN_TOL,
    Admissibility,
    Mat,
    as_word,
    classify_admissibility,
    classify_cyclic_subwords,
    extension_threshold,
    product,
)

RESIDUAL_TOL = 1e-9
POLISH_TOL = 1e-12
TORUS_PAIRS = ((1, 4), (2, 5), (3, 6))

IN_SPACE = "in-space"
BOUNDARY = "boundary"
OUT = "out"


def torus_pattern() -> SidePairingPattern:
    return build_pattern(1, TORUS_PAIRS, name="torus")


@dataclass(frozen=True)
class ParameterPoint:
    """Positive cross ratios indexed by edge, plus an optional dependent layout."""

    pattern: SidePairingPattern
    values: tuple[float, ...]
    layout: EdgeLayout | None = None

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if len(vals) != len(self.pattern.edges):
            raise ValidationError(f"expected {len(self.pattern.edges)} edge values, got {len(vals)}")
        for e, v in enumerate(vals):
            if not (v > 0 and math.isfinite(v)):
                raise NonpositiveCrossRatioError(f"edge {edge_label(e)} has value {v!r}")
        if self.layout is not None and self.layout.pattern.partner != self.pattern.partner:
            raise PatternMismatchError("layout belongs to a different pattern")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_mapping(cls, pattern, values: Mapping, layout: EdgeLayout | None = None):
        """Build from ``{label or index: value}`` covering every edge."""
        out = [None] * len(pattern.edges)
        for key, v in values.items():
            e = _edge_key(pattern, key)
            out[e] = v
        missing = [edge_label(e) for e, v in enumerate(out) if v is None]
        if missing:
            raise ValidationError(f"missing values for {', '.join(missing)}")
        return cls(pattern, tuple(out), layout)

    def value(self, edge) -> float:
        return self.values[_edge_key(self.pattern, edge)]

    def as_dict(self) -> dict[str, float]:
        return {edge_label(e): v for e, v in enumerate(self.values)}

    def side_values(self, start: int = 0) -> tuple[float, ...]:
        """Cross ratios along the vertex word starting at side ``start``."""
        n = self.pattern.sides
        eos = self.pattern.edge_of_side
        return tuple(self.values[eos[(start + t) % n]] for t in range(n))

    def with_values(self, values: Sequence[float]) -> "ParameterPoint":
        return ParameterPoint(self.pattern, tuple(values), self.layout)

    def to_json(self) -> dict:
        out = {"pattern": self.pattern.to_json(), "values": self.as_dict()}
        if self.layout is not None:
            out["dependent"] = list(self.layout.dependent_labels)
        return out

    @classmethod
    def from_json(cls, obj: Mapping, pattern: SidePairingPattern | None = None) -> "ParameterPoint":
        if pattern is None:
            pat_obj = obj.get("pattern")
            if not isinstance(pat_obj, Mapping):
                raise ValidationError("parameter file needs an inline 'pattern' object")
            pattern = SidePairingPattern.from_json(pat_obj)
        values = obj.get("values")
        if not isinstance(values, Mapping):
            raise ValidationError("parameter file needs a 'values' object")
        layout = None
        if pattern.genus >= 2:
            dep = obj.get("dependent")
            layout = layout_for_labels(pattern, dep) if dep is not None else select_dependent_triple(pattern)
        return cls.from_mapping(pattern, values, layout)


def _edge_key(pattern: SidePairingPattern, key) -> int:
    if isinstance(key, (int, np.integer)) and not isinstance(key, bool):
        e = int(key)
    else:
        try:
            e = edge_index(key)
        except ValueError:
            raise UnknownEdgeError(f"unknown edge {key!r}") from None
    if not 0 <= e < len(pattern.edges):
        raise UnknownEdgeError(f"unknown edge {key!r}")
    return e


def layout_for_labels(pattern: SidePairingPattern, labels: Sequence[str]) -> EdgeLayout:
    """The layout whose dependent edges are ``labels`` (in x, y, z order)."""
    want = tuple(_edge_key(pattern, lab) for lab in labels)
    if len(want) != 3:
        raise ValidationError("'dependent' must list three edge labels")
    fallback = None
    for c in range(pattern.sides):
        try:
            layout = layout_at(pattern, c)
        except Exception:
            continue
        if layout.dependent == want:
            return layout
        if fallback is None and set(layout.dependent) == set(want):
            fallback = layout
    if fallback is not None:
        return fallback
    raise ValidationError(f"{list(labels)} is not a nonseparating triple of the pattern")


# --- verification ----------------------------------------------------------------


@dataclass(frozen=True)
class VerificationReport:
    """``residual`` is ``max|W + I|`` for the determinant-normalized vertex word.

    ``subwords`` maps each length ``L <= n - 1`` to the classes of the ``n``
    cyclic subwords of that length; ``worst`` keeps the worst class per length.
    """

    residual: float
    subwords: dict[int, list[Admissibility]]
    verdict: str
    worst: dict[int, Admissibility] = field(default_factory=dict)

    @property
    def in_space(self) -> bool:
        return self.verdict == IN_SPACE

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "residual": self.residual,
            "subwords": {str(k): str(v) for k, v in self.worst.items()},
        }


_RANK = {Admissibility.STRICT: 0, Admissibility.BOUNDARY: 1, Admissibility.INADMISSIBLE: 2}


def word_residual(w: Mat) -> float:
    a, b, c, d = w
    det = a * d - b * c
    if det > 0:
        s = math.sqrt(det)
        a, b, c, d = a / s, b / s, c / s, d / s
    return max(abs(a + 1.0), abs(b), abs(c), abs(d + 1.0))


def verify_point(p: ParameterPoint) -> VerificationReport:
    """Check ``W = -I`` and the admissibility of every cyclic subword.

    The verdict is ``in-space`` when the residual is at most ``1e-9``, every
    subword of length up to ``n - 2`` is strict and those of length ``n - 1``
    are at least boundary.  The boundary test for length ``n - 1`` allows
    ``|d|`` up to twice the residual of the rotated word.  It is ``boundary`` when the residual test passes
    and no subword is inadmissible but some shorter subword is only boundary,
    and ``out`` otherwise.
    """
    xs = p.side_values()
    n = len(xs)
    rotated = [word_residual(product(xs[i:] + xs[:i])) for i in range(n)]
    residual = rotated[0]
    # the longest subword from i is W_i A^-1, so its d entry is within the
    # residual of the rotation W_i of being zero
    last_tol = [max(SIGN_TOL, 2.0 * r) for r in rotated]
    table = classify_cyclic_subwords(xs, n - 1, last_tol=last_tol)
    worst = {L: max(cls, key=_RANK.__getitem__) for L, cls in table.items()}
    short_ok = all(worst[L] is Admissibility.STRICT for L in worst if L <= n - 2)
    long_ok = worst[n - 1] is not Admissibility.INADMISSIBLE
    none_bad = all(w is not Admissibility.INADMISSIBLE for w in worst.values())
    if residual <= RESIDUAL_TOL and short_ok and long_ok:
        verdict = IN_SPACE
    elif residual <= RESIDUAL_TOL and none_bad:
        verdict = BOUNDARY
    else:
        verdict = OUT
    return VerificationReport(residual, table, verdict, worst)


# --- torus -----------------------------------------------------------------------


def torus_dependent(x: float, y: float) -> float:
    """The ``z`` solving ``xyz = x + y + z``, defined when ``xy > 1``."""
    x, y = float(x), float(y)
    if not (x > 0 and y > 0):
        raise NonpositiveCrossRatioError("torus cross ratios must be positive")
    if not x * y > 1.0:
        raise OutsideConvexImageError(f"xy = {x * y!r} is not greater than 1")
    return (x + y) / (x * y - 1.0)


def torus_point(x: float, y: float, z: float | None = None) -> ParameterPoint:
    """Torus parameter point with vertex word ``x y z x y z``."""
    if z is None:
        z = torus_dependent(x, y)
    return ParameterPoint(torus_pattern(), (x, y, z))


# --- dependent triple ------------------------------------------------------------


def free_value_map(layout: EdgeLayout, free_values) -> dict[int, float]:
    """Normalize free values given as a mapping or a sequence aligned with ``layout.free``."""
    if isinstance(free_values, ParameterPoint):
        return {e: free_values.values[e] for e in layout.free}
    if isinstance(free_values, Mapping):
        out = {}
        for key, v in free_values.items():
            e = _edge_key(layout.pattern, key)
            if e in layout.dependent:
                continue
            out[e] = float(v)
        missing = [edge_label(e) for e in layout.free if e not in out]
        if missing:
            raise ValidationError(f"missing free values for {', '.join(missing)}")
        return out
    vals = [float(v) for v in free_values]
    if len(vals) != len(layout.free):
        raise ValidationError(f"expected {len(layout.free)} free values, got {len(vals)}")
    return dict(zip(layout.free, vals))


def gap_products(layout: EdgeLayout, free_values) -> tuple[Mat, Mat, Mat]:
    """Products of the gap words ``T``, ``U``, ``V``; each must be strict."""
    vals = free_value_map(layout, free_values)
    out = []
    for name in ("T", "U", "V"):
        gap = getattr(layout, name)
        if not gap:
            raise DegenerateLayoutError(f"gap word {name} is empty")
        entries = [vals[e] for e in gap]
        cls = classify_admissibility(entries)
        if not cls.is_strict:
            raise FreeValuesInadmissibleError(name, f"{cls.kind}, condition {cls.condition}")
        out.append(product(entries))
    return tuple(out)


def dependent_thresholds(layout: EdgeLayout, free_values) -> tuple[float, float, float]:
    """``(alpha, beta, gamma)``: ``XTX`` is strict exactly when ``x > alpha``, and so on."""
    vals = free_value_map(layout, free_values)
    gap_products(layout, vals)
    return tuple(
        extension_threshold([vals[e] for e in getattr(layout, name)], "both") for name in ("T", "U", "V")
    )


def xwx(x: float, w: Mat) -> Mat:
    """``A(x) W A(x)`` in closed form."""
    w1, w2, w3, w4 = w
    return (-w4, w3 + w4 * x, w2 - w4 * x, w4 * x * x + (w3 - w2) * x - w1)


def _larger_root(qa: float, qb: float, qc: float) -> float:
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0:
        disc = 0.0
    sq = math.sqrt(disc)
    q = -0.5 * (qb + math.copysign(sq, qb))
    r1 = q / qa
    r2 = qc / q if q != 0 else r1
    return max(r1, r2)


def _solve_second(first: Mat, w: Mat, target: float) -> float:
    """Larger root ``s`` of ``(F . A(s) W A(s))_22 = target`` for fixed ``F``."""
    f21, f22 = first[2], first[3]
    w1, w2, w3, w4 = w
    # F21 (w3 + w4 s) + F22 (w4 s^2 + (w3 - w2) s - w1) = target
    return _larger_root(f22 * w4, f21 * w4 + f22 * (w3 - w2), f21 * w3 - f22 * w1 - target)


@dataclass(frozen=True)
class DependentSolveResult:
    x: float
    y: float
    z: float
    thresholds: tuple[float, float, float]
    iterations: int
    newton_iterations: int
    residual: float
    point: ParameterPoint

    @property
    def triple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


def assemble_point(layout: EdgeLayout, free_values, triple: Sequence[float]) -> ParameterPoint:
    vals = free_value_map(layout, free_values)
    full = [0.0] * len(layout.pattern.edges)
    for e, v in vals.items():
        full[e] = v
    for e, v in zip(layout.dependent, triple):
        full[e] = float(v)
    return ParameterPoint(layout.pattern, tuple(full), layout)


def layout_word(point: ParameterPoint, layout: EdgeLayout) -> tuple[float, ...]:
    return point.side_values(layout.corner)


def solve_dependent_triple(layout: EdgeLayout, free_values, max_bisect: int = 400) -> DependentSolveResult:
    """The unique ``(x, y, z)`` above the thresholds making the vertex word ``-I``.

    For trial ``z`` the equation ``h3(z, x) = u4`` is a quadratic in ``x``
    with positive leading coefficient; its larger root gives ``x``.  Likewise
    ``h1(x, y) = v4`` gives ``y``.  The outer function ``h2(y, z) - t4`` is
    negative just above ``gamma`` and positive for large ``z``; it is
    bracketed by doubling the width above ``gamma`` and bisected, then the
    triple is polished by Newton steps.
    """
    vals = free_value_map(layout, free_values)
    t, u, v = gap_products(layout, vals)
    alpha, beta, gamma = dependent_thresholds(layout, vals)
    t4, u4, v4 = t[3], u[3], v[3]

    def inner(z: float) -> tuple[float, float, float]:
        c = xwx(z, v)
        x = _solve_second(c, t, u4)
        a = xwx(x, t)
        y = _solve_second(a, u, v4)
        b = xwx(y, u)
        # h2(y, z) = (B C)_22
        return x, y, b[2] * c[1] + b[3] * c[3] - t4

    width = 1.0
    hi = gamma + width
    lo = gamma
    iterations = 0
    while True:
        iterations += 1
        _, _, f_hi = inner(hi)
        if f_hi > 0:
            break
        lo = hi
        width *= 2.0
        hi = gamma + width
        if width > 1e12:
            raise BracketNotFoundError(f"no sign change for z in ({gamma!r}, {hi!r}]")
    for _ in range(max_bisect):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        iterations += 1
        _, _, f_mid = inner(mid)
        if f_mid > 0:
            hi = mid
        else:
            lo = mid
    z = 0.5 * (lo + hi)
    x, y, _ = inner(z)

    point = assemble_point(layout, vals, (x, y, z))
    best = (word_residual(product(layout_word(point, layout))), point)
    newton = 0
    while best[0] > POLISH_TOL and newton < 50:
        newton += 1
        cur = best[1]
        w = product(layout_word(cur, layout))
        r = np.array([w[0] + 1.0, w[1], w[2]])
        jac = _closed_form_jacobian(layout, cur)
        try:
            step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            break
        trial = tuple(cur.value(e) + s for e, s in zip(layout.dependent, step))
        if min(trial) <= 0:
            break
        cand = assemble_point(layout, vals, trial)
        res = word_residual(product(layout_word(cand, layout)))
        if res >= best[0]:
            break
        best = (res, cand)
    point = best[1]
    x, y, z = (point.value(e) for e in layout.dependent)
    return DependentSolveResult(x, y, z, (alpha, beta, gamma), iterations, newton, best[0], point)


def _closed_form_jacobian(layout: EdgeLayout, p: ParameterPoint) -> np.ndarray:
    xs = layout_word(p, layout)
    jac = np.zeros((3, 3))
    prefixes = []
    w: Mat = (1.0, 0.0, 0.0, 1.0)
    for x in xs:
        prefixes.append(w)
        w = (-w[1], w[0] + w[1] * x, -w[3], w[2] + w[3] * x)
    for col, name in enumerate(("x", "y", "z")):
        for pos in layout.positions[name]:
            _, b, _, d = prefixes[pos]
            # d(a, b, c) contributed by the occurrence at `pos`
            jac[0, col] += -b * d
            jac[1, col] += b * b
            jac[2, col] += -d * d
    return jac


def jacobian_dependent(layout: EdgeLayout, p: ParameterPoint) -> np.ndarray:
    """Jacobian of the entries ``(a, b, c)`` of the vertex word with respect to ``(x, y, z)``.

    At a point where the word is ``-I``, the derivative along the occurrence
    at offset ``k`` is ``[[-b d, b^2], [-d^2, b d]]`` where ``b, d`` belong to
    the prefix of length ``k``; each dependent edge sums its two occurrences.
    """
    if p.pattern.partner != layout.pattern.partner:
        raise PatternMismatchError("point and layout belong to different patterns")
    report = verify_point(p)
    if not report.in_space:
        raise PointNotInSpaceError(f"verdict {report.verdict}, residual {report.residual:.3e}")
    return _closed_form_jacobian(layout, p)


def triple_identity_check(A, B, C, tol: float = RESIDUAL_TOL) -> bool:
    """Whether the (2,2) entries of ``AB``, ``BC``, ``CA`` match ``-C^-1``, ``-A^-1``, ``-B^-1``.

    Each comparison allows ``tol`` times the size of its largest term (at
    least 1), so long or large-entry words are judged at a fixed relative
    precision.
    """
    words = [as_word(w) for w in (A, B, C)]
    for name, w in zip("ABC", words):
        if not classify_admissibility(w.entries).is_strict:
            raise NotStrictlyAdmissibleError(f"{name} is not strictly admissible")
    a, b, c = (w.abcd for w in words)

    def close(p: Mat, q: Mat, r: Mat) -> bool:
        # (p q)_22 against (-r^-1)_22 = -r11
        t1, t2 = p[2] * q[1], p[3] * q[3]
        scale = max(1.0, abs(t1), abs(t2), abs(r[0]))
        return abs(t1 + t2 + r[0]) <= tol * scale

    return close(a, b, c) and close(b, c, a) and close(c, a, b)

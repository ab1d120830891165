"""Breadth-first development of a packing into the extended plane.

States are marked triangles ``(g, c)``: the triangle at corner ``c`` of the
deck copy ``g``, marked at that copy's circle.  ``g`` is a word in the side
generators, where generator ``s`` carries side ``mu(s)`` to side ``s`` and
generator ``mu(s)`` is its inverse.  Moves act on states as

* rotate clockwise: ``(g, c) -> (g, c + 1)``, frame times ``A(x)``;
* rotate anticlockwise: ``(g, c) -> (g, c - 1)``, frame times ``A(x)^-1``;
* remark ``R``: ``(g, c) -> (g s_c, mu(c) + 1)``;
* remark ``R^-1``: ``(g, c) -> (g s_{c-1}, mu(c - 1))``.

Words are reduced freely and by the corner relators: going three times
around a triangle with ``R`` multiplies the three generators of a corner
cycle, which is therefore trivial.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import NotTangentError, PointNotInSpaceError, ValidationError
from .holonomy import ACW, CW, R, R_INV, Move, MoveWord, remark, rotate
from .moebius import (
    STANDARD_INTERSTICE,
    GeneralizedCircle,
    Moebius,
    tangency_discriminant,
    tangency_point,
    transform_circle,
)
from .solver import ParameterPoint, verify_point

AUDIT_TOL = 1e-9
MERGE_TOL = 1e-9

Word = tuple[int, ...]


def _rewrite_rules(pattern) -> dict[tuple[int, int], tuple[int, ...]]:
    mu = pattern.partner
    rules: dict[tuple[int, int], tuple[int, ...]] = {}
    for s in range(pattern.sides):
        rules[(s, mu[s])] = ()
    for cyc in pattern.corner_cycles:
        for r in range(3):
            a, b, c = cyc[r], cyc[(r + 1) % 3], cyc[(r + 2) % 3]
            # a b c = 1 and its inverse mu(c) mu(b) mu(a) = 1
            rules.setdefault((a, b), (mu[c],))
            rules.setdefault((mu[c], mu[b]), (a,))
    return rules


def reduce_word(word, rules) -> Word:
    """Apply length-reducing rewrites until none applies."""
    out: list[int] = []
    for s in word:
        out.append(s)
        while len(out) >= 2 and (out[-2], out[-1]) in rules:
            repl = rules[(out[-2], out[-1])]
            del out[-2:]
            for t in repl:
                out.append(t)
                while len(out) >= 2 and (out[-2], out[-1]) in rules:
                    inner = rules[(out[-2], out[-1])]
                    del out[-2:]
                    out.extend(inner)
    return tuple(out)


@dataclass(frozen=True)
class DevelopedInterstice:
    """A marked triangle: deck word, corner, the move path that reached it and its frame."""

    word: Word
    corner: int
    path: MoveWord
    transform: Moebius
    circles: tuple[GeneralizedCircle, GeneralizedCircle, GeneralizedCircle]

    @property
    def address(self) -> tuple[Word, int]:
        return (self.word, self.corner)


@dataclass(frozen=True)
class SceneCircle:
    """A developed circle; ``address`` is the deck word of the circle's copy."""

    address: Word
    circle: GeneralizedCircle


@dataclass
class PackingScene:
    depth: int
    circles: list[SceneCircle] = field(default_factory=list)
    interstices: list[DevelopedInterstice] = field(default_factory=list)
    checks: list[tuple[GeneralizedCircle, GeneralizedCircle]] = field(default_factory=list)
    merged_circles: int = 0

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "circles": [_circle_json(c) for c in self.circles],
            "interstices": [
                {
                    "word": [s + 1 for s in t.word],
                    "corner": t.corner + 1,
                    "path": str(t.path),
                    "transform": [[v.real, v.imag] for v in t.transform.m.ravel()],
                }
                for t in self.interstices
            ],
        }


def _circle_json(sc: SceneCircle) -> dict:
    c = sc.circle
    out = {"address": [s + 1 for s in sc.address], "hermitian": list(c.as_vector())}
    if c.is_line:
        p, d = c.line_point_direction()
        out["shape"] = {"kind": "line", "point": [p.real, p.imag], "direction": [d.real, d.imag]}
    else:
        z = c.center
        out["shape"] = {"kind": "circle", "center": [z.real, z.imag], "radius": c.radius}
    return out


def _triangle_circles(frame: Moebius):
    return tuple(transform_circle(frame, c) for c in STANDARD_INTERSTICE)


def _rotation_matrix(x: float, direction: str) -> Moebius:
    if direction == CW:
        return Moebius.from_entries(0, 1, -1, x, normalize=False)
    return Moebius.from_entries(x, -1, 1, 0, normalize=False)


class _CircleIndex:
    """Canonical-form lookup by tolerance, not by hashing floats."""

    def __init__(self, tol: float):
        self.tol = tol
        self.vecs = np.zeros((0, 4))

    def find(self, c: GeneralizedCircle) -> int | None:
        if not len(self.vecs):
            return None
        v = np.array(c.as_vector())
        dist = np.minimum(np.abs(self.vecs - v).max(axis=1), np.abs(self.vecs + v).max(axis=1))
        k = int(np.argmin(dist))
        return k if dist[k] <= self.tol else None

    def add(self, c: GeneralizedCircle) -> None:
        self.vecs = np.vstack([self.vecs, np.array(c.as_vector())])


def develop(p: ParameterPoint, depth: int, force: bool = False) -> PackingScene:
    """All marked triangles within ``depth`` moves of the standard interstice.

    Circles are keyed first by deck word; circles from distinct words that
    coincide within ``1e-9`` are merged afterwards.  ``force=True`` skips the
    in-space precondition, which is useful for negative controls.
    """
    depth = int(depth)
    if depth < 0:
        raise ValidationError("depth must be nonnegative")
    if not force:
        report = verify_point(p)
        if not report.in_space:
            raise PointNotInSpaceError(f"verdict {report.verdict}, residual {report.residual:.3e}")
    pattern = p.pattern
    n = pattern.sides
    mu = pattern.partner
    eos = pattern.edge_of_side
    rules = _rewrite_rules(pattern)

    def neighbours(word: Word, c: int):
        yield rotate(eos[c], CW), word, (c + 1) % n, _rotation_matrix(p.values[eos[c]], CW)
        prev = (c - 1) % n
        yield rotate(eos[prev], ACW), word, prev, _rotation_matrix(p.values[eos[prev]], ACW)
        yield remark(ACW), reduce_word(word + (c,), rules), (mu[c] + 1) % n, R
        yield remark(CW), reduce_word(word + (prev,), rules), mu[prev], R_INV

    scene = PackingScene(depth)
    frames: dict[tuple[Word, int], Moebius] = {}
    start = ((), 0)
    frames[start] = Moebius.identity()
    order = [(start, MoveWord())]
    queue = deque([(start, MoveWord(), 0)])
    while queue:
        (word, c), path, dist = queue.popleft()
        if dist == depth:
            continue
        frame = frames[(word, c)]
        for move, w2, c2, mat in neighbours(word, c):
            key = (w2, c2)
            cand = frame @ mat
            if key not in frames:
                frames[key] = cand
                new_path = path + MoveWord((move,))
                order.append((key, new_path))
                queue.append((key, new_path, dist + 1))
            if move.kind == "rotate":
                scene.checks.extend(_crossing_checks(cand, frames[key], move.direction))

    # circles of triangle (g, c): its own copy, then the copies across the
    # R^-1 and R moves (images of the upper line and the small circle)
    index = _CircleIndex(MERGE_TOL)
    seen_words: set[Word] = set()
    for (word, c), path in order:
        frame = frames[(word, c)]
        circles = _triangle_circles(frame)
        scene.interstices.append(DevelopedInterstice(word, c, path, frame, circles))
        scene.checks.extend(((circles[0], circles[1]), (circles[1], circles[2]), (circles[0], circles[2])))
        words = (word, reduce_word(word + ((c - 1) % n,), rules), reduce_word(word + (c,), rules))
        for w, circ in zip(words, circles):
            if w in seen_words:
                continue
            seen_words.add(w)
            if index.find(circ) is not None:
                scene.merged_circles += 1
                continue
            index.add(circ)
            scene.circles.append(SceneCircle(w, circ))
    return scene


def _crossing_checks(from_source: Moebius, stored: Moebius, direction: str):
    """Circle pairs that must be tangent after crossing an edge.

    After a clockwise rotation the circle shared across the edge is the image
    of the upper line in the target frame; computed from the source it is the
    image of the small circle (and the reverse for anticlockwise).  That
    circle must touch both the marked circle and the far circle of the
    target triangle as stored.
    """
    src = _triangle_circles(from_source)
    tgt = _triangle_circles(stored)
    shared = src[1] if direction == CW else src[2]
    far = tgt[2] if direction == CW else tgt[1]
    return ((shared, tgt[0]), (shared, far))


@dataclass(frozen=True)
class AuditReport:
    count: int
    max_discriminant: float
    failures: int
    passed: bool

    def to_json(self) -> dict:
        return {
            "count": self.count,
            "max_discriminant": self.max_discriminant,
            "failures": self.failures,
            "passed": self.passed,
        }


def tangency_audit(scene: PackingScene, tol: float = AUDIT_TOL) -> AuditReport:
    """Check every recorded circle pair with :func:`tangency_point`."""
    worst = 0.0
    failures = 0
    for c1, c2 in scene.checks:
        try:
            tangency_point(c1, c2, tol)
        except NotTangentError:
            failures += 1
        worst = max(worst, abs(tangency_discriminant(c1, c2)))
    return AuditReport(len(scene.checks), worst, failures, failures == 0)


def path_to(p: ParameterPoint, word: Word, corner: int) -> MoveWord:
    """A move path from the base triangle to ``(word, corner)``.

    Each generator ``s`` is reached by rotating clockwise to corner ``s`` and
    remarking with ``R``; the path ends with clockwise rotations to ``corner``.
    """
    pattern = p.pattern
    n = pattern.sides
    eos = pattern.edge_of_side
    moves: list[Move] = []
    cur = 0
    for s in list(word) + [None]:
        target = corner if s is None else s
        for t in range((target - cur) % n):
            moves.append(rotate(eos[(cur + t) % n], CW))
        if s is not None:
            moves.append(remark(ACW))
            cur = (pattern.partner[s] + 1) % n
    return MoveWord(tuple(moves))


def address_frame(p: ParameterPoint, word: Word, corner: int) -> Moebius:
    return path_to(p, word, corner).product(p)


# --- rendering ----------------------------------------------------------------


def _fmt(v: float) -> str:
    s = format(v, ".12g")
    return "0" if s in ("-0", "0") else s


def _clip_line(p: complex, d: complex, xmin, xmax, ymin, ymax):
    """Liang-Barsky clip of the line ``p + t d`` to a box."""
    t0, t1 = -math.inf, math.inf
    for q, dq, lo, hi in ((p.real, d.real, xmin, xmax), (p.imag, d.imag, ymin, ymax)):
        if abs(dq) < 1e-15:
            if q < lo or q > hi:
                return None
            continue
        a, b = (lo - q) / dq, (hi - q) / dq
        if a > b:
            a, b = b, a
        t0, t1 = max(t0, a), min(t1, b)
    if t0 >= t1:
        return None
    return p + t0 * d, p + t1 * d


def render_svg(
    scene: PackingScene,
    center: complex = 0.5j,
    half_width: float = 2.0,
    min_radius: float = 1e-3,
    stroke_width: float = 0.01,
    size: int = 800,
) -> str:
    """Deterministic SVG of the scene's circles inside a square viewport.

    The imaginary axis points up.  Lines become segments clipped to the
    viewport; circles with radius below ``min_radius`` are omitted.
    """
    if not half_width > 0:
        raise ValidationError("viewport half-width must be positive")
    cx, cy = complex(center).real, complex(center).imag
    xmin, xmax, ymin, ymax = cx - half_width, cx + half_width, cy - half_width, cy + half_width
    sw = _fmt(stroke_width)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="{_fmt(xmin)} {_fmt(-ymax)} {_fmt(2 * half_width)} {_fmt(2 * half_width)}">',
        f'<rect x="{_fmt(xmin)}" y="{_fmt(-ymax)}" width="{_fmt(2 * half_width)}" '
        f'height="{_fmt(2 * half_width)}" fill="none" stroke="gray" stroke-width="{sw}"/>',
    ]
    for sc in sorted(scene.circles, key=lambda s: (len(s.address), s.address)):
        c = sc.circle
        if c.is_line:
            pt, d = c.line_point_direction()
            seg = _clip_line(pt, d, xmin, xmax, ymin, ymax)
            if seg is None:
                continue
            a, b = seg
            lines.append(
                f'<line x1="{_fmt(a.real)}" y1="{_fmt(-a.imag)}" x2="{_fmt(b.real)}" '
                f'y2="{_fmt(-b.imag)}" stroke="black" stroke-width="{sw}"/>'
            )
            continue
        r = c.radius
        if r < min_radius:
            continue
        z = c.center
        lines.append(
            f'<circle cx="{_fmt(z.real)}" cy="{_fmt(-z.imag)}" r="{_fmt(r)}" '
            f'fill="none" stroke="black" stroke-width="{sw}"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"

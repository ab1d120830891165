"""Holonomy from marked-triangle moves, trace invariants and rigidity checks.

A marked triangle is an interstice together with one of its three circles.
Rotating about the marked circle across an edge with cross ratio ``x`` acts
by ``A(x)`` (clockwise) or ``A(x)^-1``; moving the mark to the next circle
acts by ``R = [[0, i], [i, 1]]`` (anticlockwise) or ``R^-1``.

Marked triangles of the fan around the single vertex are indexed by polygon
corners; the triangle at corner ``c`` is reached from corner ``b`` by
rotating clockwise across sides ``b, ..., c - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .combinatorics import EdgeLayout, edge_label, select_dependent_triple
from .errors import PatternMismatchError, PointNotInSpaceError, ValidationError
from .moebius import Moebius
from .solver import ParameterPoint, torus_point, verify_point

ROTATE = "rotate"
REMARK = "remark"
CW = "cw"
ACW = "acw"
TRACE_TOL = 1e-9

R = Moebius.from_entries(0, 1j, 1j, 1, normalize=False)
R_INV = Moebius.from_entries(1, -1j, -1j, 0, normalize=False)


@dataclass(frozen=True)
class Move:
    kind: str
    direction: str
    edge: int | str | None = None

    def __post_init__(self):
        if self.kind not in (ROTATE, REMARK):
            raise ValidationError(f"unknown move kind {self.kind!r}")
        if self.direction not in (CW, ACW):
            raise ValidationError(f"unknown move direction {self.direction!r}")
        if self.kind == ROTATE and self.edge is None:
            raise ValidationError("a rotation needs the crossed edge")

    def __str__(self) -> str:
        if self.kind == REMARK:
            return "R" if self.direction == ACW else "R^-1"
        label = self.edge if isinstance(self.edge, str) else edge_label(self.edge)
        return f"A[{label}]" if self.direction == CW else f"A[{label}]^-1"


def rotate(edge, direction: str = CW) -> Move:
    return Move(ROTATE, direction, edge)


def remark(direction: str = ACW) -> Move:
    return Move(REMARK, direction)


def move_matrix(m: Move, p: ParameterPoint) -> Moebius:
    """``A(x)``, ``A(x)^-1``, ``R`` or ``R^-1`` for a single move."""
    if m.kind == REMARK:
        return R if m.direction == ACW else R_INV
    x = p.value(m.edge)
    if m.direction == CW:
        return Moebius.from_entries(0, 1, -1, x, normalize=False)
    return Moebius.from_entries(x, -1, 1, 0, normalize=False)


@dataclass(frozen=True)
class MoveWord:
    moves: tuple[Move, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "moves", tuple(self.moves))

    def product(self, p: ParameterPoint) -> Moebius:
        out = Moebius.identity()
        for m in self.moves:
            out = out @ move_matrix(m, p)
        return out

    def __add__(self, other: "MoveWord") -> "MoveWord":
        return MoveWord(self.moves + other.moves)

    def __len__(self) -> int:
        return len(self.moves)

    def __str__(self) -> str:
        return " ".join(str(m) for m in self.moves) or "1"


def as_move_word(w: MoveWord | Iterable[Move]) -> MoveWord:
    return w if isinstance(w, MoveWord) else MoveWord(tuple(w))


@dataclass(frozen=True)
class HolonomyElement:
    """``product(w2) product(w1)^-1`` with its defining move words."""

    matrix: Moebius
    w1: MoveWord
    w2: MoveWord

    @property
    def trace(self) -> complex:
        return self.matrix.trace

    @property
    def normalized_trace(self) -> complex:
        return normalize_trace(self.trace)

    def inverse(self) -> "HolonomyElement":
        return HolonomyElement(self.matrix.inverse(), self.w2, self.w1)

    def __matmul__(self, other: "HolonomyElement") -> Moebius:
        return self.matrix @ other.matrix


def holonomy_of(w1, w2, p: ParameterPoint) -> HolonomyElement:
    """Deck element taking the marked triangle at the end of ``w1`` to that of ``w2``."""
    w1, w2 = as_move_word(w1), as_move_word(w2)
    return HolonomyElement(w2.product(p) @ w1.product(p).inverse(), w1, w2)


def normalize_trace(t: complex, tol: float = 1e-15) -> complex:
    """Fix the sign of a PSL2 trace: first nonzero of (real, imag) made positive."""
    t = complex(t)
    if abs(t.real) > tol:
        sign = 1.0 if t.real > 0 else -1.0
    else:
        sign = 1.0 if t.imag >= 0 else -1.0
    return complex(sign * t.real + 0.0, sign * t.imag + 0.0)


def fan_word(p: ParameterPoint, base: int, steps: int) -> MoveWord:
    """Clockwise rotations across sides ``base, ..., base + steps - 1``."""
    n = p.pattern.sides
    eos = p.pattern.edge_of_side
    return MoveWord(tuple(rotate(eos[(base + t) % n]) for t in range(steps)))


def side_pairing_words(p: ParameterPoint, side: int, base: int = 0) -> tuple[MoveWord, MoveWord]:
    """Move words of the deck element carrying side ``mu(side)`` to ``side``.

    Relative to the marked triangle at corner ``base`` this element is
    ``W(side + 1) R^-1 W(mu(side))^-1`` where ``W(c)`` is the fan product up to
    corner ``c``.
    """
    n = p.pattern.sides
    m = p.pattern.partner[side]
    w1 = fan_word(p, base, (m - base) % n)
    w2 = fan_word(p, base, (side - base) % n + 1) + MoveWord((remark(CW),))
    return w1, w2


def side_pairing_generator(p: ParameterPoint, side: int, base: int = 0) -> HolonomyElement:
    w1, w2 = side_pairing_words(p, side, base)
    return holonomy_of(w1, w2, p)


def triple_generators(p: ParameterPoint, layout: EdgeLayout | None = None) -> tuple[HolonomyElement, ...]:
    """``rho(gamma1), rho(gamma2), rho(gamma3)`` for the dependent triple.

    In the frame of the layout corner these are ``XTX R^-1``,
    ``XTX YUY R^-1 (XTX)^-1`` and ``W R^-1 (XTX YUY)^-1``; their product
    ``gamma3 gamma2 gamma1`` is trivial.
    """
    layout = layout or p.layout or select_dependent_triple(p.pattern)
    n = p.pattern.sides
    c = layout.corner
    return tuple(
        side_pairing_generator(p, (c + layout.positions[name][1]) % n, base=c) for name in ("x", "y", "z")
    )


def torus_example_generators(p: ParameterPoint) -> tuple[HolonomyElement, ...]:
    """The three torus generators written with edges ``e1, e2, e3`` as ``A1, A2, A3``:
    ``A3 A1 R``, ``A3 A1 A2 R A3^-1`` and ``A3 A1 A2 A3 R A1^-1 A3^-1``."""
    a1, a2, a3 = (rotate(e) for e in (0, 1, 2))
    r = remark(ACW)
    pairs = (
        ((), (a3, a1, r)),
        ((a3,), (a3, a1, a2, r)),
        ((a3, a1), (a3, a1, a2, a3, r)),
    )
    return tuple(holonomy_of(MoveWord(w1), MoveWord(w2), p) for w1, w2 in pairs)


def _require_in_space(p: ParameterPoint) -> None:
    report = verify_point(p)
    if not report.in_space:
        raise PointNotInSpaceError(f"verdict {report.verdict}, residual {report.residual:.3e}")


def torus_traces(x: float, y: float, z: float) -> tuple[complex, complex]:
    """Sign-normalized traces ``xz - 1 + (x - z) i`` and ``yx - 1 + (y - x) i``."""
    _require_in_space(torus_point(x, y, z))
    return (
        normalize_trace(complex(x * z - 1.0, x - z)),
        normalize_trace(complex(y * x - 1.0, y - x)),
    )


def commuting_check(g: HolonomyElement | Moebius, h: HolonomyElement | Moebius, tol: float = TRACE_TOL) -> bool:
    """Whether ``tr(g h g^-1 h^-1) = 2`` within ``tol``."""
    gm = g.matrix if isinstance(g, HolonomyElement) else g
    hm = h.matrix if isinstance(h, HolonomyElement) else h
    comm = gm @ hm @ gm.inverse() @ hm.inverse()
    return abs(comm.trace - 2.0) <= tol


def commutator_trace(g: HolonomyElement, h: HolonomyElement) -> complex:
    gm, hm = g.matrix, h.matrix
    return (gm @ hm @ gm.inverse() @ hm.inverse()).trace


@dataclass(frozen=True)
class RigidityReport:
    generators: tuple[str, ...]
    traces: tuple[complex, ...]
    other_traces: tuple[complex, ...]
    agree: tuple[bool, ...]
    verdict: str

    def to_json(self) -> dict:
        return {
            "generators": list(self.generators),
            "traces": [[t.real, t.imag] for t in self.traces],
            "compare_traces": [[t.real, t.imag] for t in self.other_traces],
            "agree": list(self.agree),
            "verdict": self.verdict,
        }


def comparison_generators(p: ParameterPoint) -> tuple[tuple[str, ...], tuple[HolonomyElement, ...]]:
    """Generators used by :func:`rigidity_compare`.

    Genus at least 2 uses the dependent triple's side pairings; the torus uses
    the side pairing of each edge, carrying its first side to its second.
    """
    if p.pattern.genus >= 2:
        layout = p.layout or select_dependent_triple(p.pattern)
        return ("gamma1", "gamma2", "gamma3"), triple_generators(p, layout)
    gens = tuple(side_pairing_generator(p, t) for _, t in p.pattern.edges)
    names = tuple(f"gamma[{edge_label(e)}]" for e in range(len(p.pattern.edges)))
    return names, gens


def rigidity_compare(p1: ParameterPoint, p2: ParameterPoint, tol: float = TRACE_TOL) -> RigidityReport:
    """Compare sign-normalized generator traces of two in-space points."""
    if p1.pattern.partner != p2.pattern.partner:
        raise PatternMismatchError("points belong to different patterns")
    if p1.pattern.genus >= 2:
        l1 = p1.layout or select_dependent_triple(p1.pattern)
        l2 = p2.layout or select_dependent_triple(p2.pattern)
        if l1.corner != l2.corner:
            raise PatternMismatchError("points use different dependent triples")
        p1 = ParameterPoint(p1.pattern, p1.values, l1)
        p2 = ParameterPoint(p2.pattern, p2.values, l1)
    _require_in_space(p1)
    _require_in_space(p2)
    names, g1 = comparison_generators(p1)
    _, g2 = comparison_generators(p2)
    t1 = tuple(g.normalized_trace for g in g1)
    t2 = tuple(g.normalized_trace for g in g2)
    agree = tuple(abs(a - b) <= tol for a, b in zip(t1, t2))
    return RigidityReport(names, t1, t2, agree, "equal" if all(agree) else "different")


def relation_product(gens: Sequence[HolonomyElement], exponents: Sequence[int]) -> Moebius:
    """``gens[0]^e0 gens[1]^e1 ...`` with exponents in ``{1, -1}``."""
    out = Moebius.identity()
    for g, e in zip(gens, exponents):
        out = out @ (g.matrix if e == 1 else g.matrix.inverse())
    return out

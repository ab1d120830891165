"""Side-pairing patterns of the (12g-6)-gon.

Cutting a genus-``g`` surface with a one-vertex triangulation along the dual
trivalent graph gives a polygon with ``N = 12g - 6`` sides, glued in pairs.
Sides are numbered ``0..N-1`` internally and ``1..N`` in files.  Corner ``c``
sits between side ``c - 1`` and side ``c``.  Sides are glued reversing
orientation, so the start of side ``s`` meets the end of side ``mu(s)`` and
the corner successor is ``c -> mu(c) + 1``.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CornerCycleError,
    GenusMismatchError,
    NoNonseparatingTripleError,
    NotInvolutionError,
    PatternError,
)

SEPARATING = "separating"
NONSEPARATING = "nonseparating"


def side_count(genus: int) -> int:
    return 12 * genus - 6


@dataclass(frozen=True)
class SidePairingPattern:
    """A fixed-point-free involution on polygon sides with all corner cycles of length 3.

    Construct through :func:`build_pattern` or :meth:`from_partner`, which
    validate; the bare constructor trusts its input.
    """

    genus: int
    partner: tuple[int, ...]
    name: str | None = None

    @classmethod
    def from_partner(cls, genus: int, partner: Sequence[int], name: str | None = None):
        partner = tuple(int(p) for p in partner)
        _validate(genus, partner)
        return cls(genus, partner, name)

    @property
    def sides(self) -> int:
        return len(self.partner)

    def next_corner(self, c: int) -> int:
        return (self.partner[c] + 1) % self.sides

    @cached_property
    def corner_cycles(self) -> tuple[tuple[int, ...], ...]:
        """Corner cycles, each listed from its smallest corner, ordered by that corner."""
        return _corner_cycles(self.partner)

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        """Side pairs ``(s, mu(s))`` with ``s < mu(s)``, in order of first appearance."""
        return tuple((s, p) for s, p in enumerate(self.partner) if s < p)

    @cached_property
    def edge_of_side(self) -> tuple[int, ...]:
        out = [0] * self.sides
        for e, (s, t) in enumerate(self.edges):
            out[s] = out[t] = e
        return tuple(out)

    @property
    def edge_labels(self) -> tuple[str, ...]:
        return tuple(edge_label(e) for e in range(len(self.edges)))

    @property
    def vertex_word(self) -> tuple[int, ...]:
        """Edge index of each side in polygon order: the cyclic vertex word."""
        return self.edge_of_side

    def pairs_one_based(self) -> list[list[int]]:
        return [[s + 1, t + 1] for s, t in self.edges]

    def to_json(self) -> dict:
        out = {"genus": self.genus, "sides": self.sides, "pairing": self.pairs_one_based()}
        if self.name is not None:
            out["name"] = self.name
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "SidePairingPattern":
        try:
            genus = int(obj["genus"])
            pairs = obj["pairing"]
        except (KeyError, TypeError, ValueError) as exc:
            raise PatternError(f"malformed pattern object: {exc}") from None
        pattern = build_pattern(genus, pairs, name=obj.get("name"))
        if "sides" in obj and int(obj["sides"]) != pattern.sides:
            raise GenusMismatchError(f"'sides' is {obj['sides']} but genus {genus} needs {pattern.sides}")
        return pattern

    def canonical(self) -> "SidePairingPattern":
        return SidePairingPattern(self.genus, canonical_partner(self.partner), self.name)


def edge_label(e: int) -> str:
    return f"e{e + 1}"


def edge_index(label: str) -> int:
    if not (isinstance(label, str) and label.startswith("e") and label[1:].isdigit()):
        raise ValueError(f"not an edge label: {label!r}")
    return int(label[1:]) - 1


def _corner_cycles(partner: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    n = len(partner)
    seen = [False] * n
    cycles = []
    for c in range(n):
        if seen[c]:
            continue
        cyc = []
        d = c
        while not seen[d]:
            seen[d] = True
            cyc.append(d)
            d = (partner[d] + 1) % n
        cycles.append(tuple(cyc))
    return tuple(cycles)


def _validate(genus: int, partner: Sequence[int]) -> None:
    if genus < 1:
        raise GenusMismatchError(f"genus must be at least 1, got {genus}")
    n = side_count(genus)
    if len(partner) != n:
        raise GenusMismatchError(f"genus {genus} needs {n} sides, pairing covers {len(partner)}")
    for s, p in enumerate(partner):
        if not 0 <= p < n or p == s or partner[p] != s:
            raise NotInvolutionError(f"side {s + 1} is not properly paired")
    for cyc in _corner_cycles(partner):
        if len(cyc) != 3:
            raise CornerCycleError(cyc)


def build_pattern(genus: int, pairs: Iterable[Sequence[int]], name: str | None = None) -> SidePairingPattern:
    """Validate a 1-based pairing list and return the pattern."""
    genus = int(genus)
    if genus < 1:
        raise GenusMismatchError(f"genus must be at least 1, got {genus}")
    n = side_count(genus)
    pairs = [tuple(p) for p in pairs]
    if 2 * len(pairs) != n:
        raise GenusMismatchError(f"genus {genus} needs {n // 2} pairs, got {len(pairs)}")
    partner = [-1] * n
    for pair in pairs:
        if len(pair) != 2:
            raise NotInvolutionError(f"pair {list(pair)} does not have two sides")
        try:
            s, t = (int(v) - 1 for v in pair)
        except (TypeError, ValueError):
            raise NotInvolutionError(f"pair {list(pair)} is not a pair of integers") from None
        if not (0 <= s < n and 0 <= t < n):
            raise NotInvolutionError(f"pair {list(pair)} has a side outside 1..{n}")
        if s == t:
            raise NotInvolutionError(f"side {s + 1} is paired with itself")
        if partner[s] != -1 or partner[t] != -1:
            raise NotInvolutionError(f"pair {list(pair)} reuses a side")
        partner[s], partner[t] = t, s
    return SidePairingPattern.from_partner(genus, partner, name)


# --- canonical forms ---------------------------------------------------------


def _relabelings(n: int) -> list[np.ndarray]:
    """All dihedral relabelings of side indices as permutation arrays."""
    idx = np.arange(n)
    out = []
    for s in range(n):
        out.append((idx + s) % n)
        out.append((s - 1 - idx) % n)
    return out


def canonical_partners(partners: np.ndarray) -> np.ndarray:
    """Lexicographically least dihedral relabeling of each row of ``partners``."""
    partners = np.atleast_2d(np.asarray(partners, dtype=np.int64))
    m, n = partners.shape
    rows = np.arange(m)
    best = None
    for sig in _relabelings(n):
        inv = np.argsort(sig)
        cand = sig[partners[:, inv]]
        if best is None:
            best = cand.copy()
            continue
        diff = cand != best
        first = np.argmax(diff, axis=1)
        less = diff.any(axis=1) & (cand[rows, first] < best[rows, first])
        best[less] = cand[less]
    return best


def canonical_partner(partner: Sequence[int]) -> tuple[int, ...]:
    return tuple(int(v) for v in canonical_partners(np.array([partner]))[0])


# --- enumeration -------------------------------------------------------------


def _rooted_involutions(n: int, first_partner: int | None = None) -> list[tuple[int, ...]]:
    """All valid labeled pairings on ``n`` sides, by backtracking.

    The lowest free side is paired at each level.  After every assignment the
    open chains of glued corners through the new sides are followed: a chain
    longer than 3 is pruned, a closed chain must have length exactly 3, and
    an open chain of 3 corners forces the pair that closes it.
    """
    mu = [-1] * n
    out: list[tuple[int, ...]] = []

    def chain_ok(c: int, forced: list) -> bool:
        f = 0
        d = c
        while mu[d] != -1:
            d = (mu[d] + 1) % n
            f += 1
            if d == c:
                return f == 3
            if f > 3:
                return False
        end = d
        b = 0
        d = c
        while mu[(d - 1) % n] != -1:
            d = mu[(d - 1) % n]
            b += 1
            if f + b + 1 > 3:
                return False
        start = d
        if f + b + 1 == 3:
            # the corner after `end` must be `start`: mu(end) + 1 = start
            forced.append((end, (start - 1) % n))
        return True

    def propagate(a: int, b: int, trail: list) -> bool:
        queue = [(a, b)]
        while queue:
            a, b = queue.pop()
            if a == b:
                return False
            if mu[a] != -1 or mu[b] != -1:
                if mu[a] == b:
                    continue
                return False
            mu[a], mu[b] = b, a
            trail.extend((a, b))
            forced: list = []
            if not chain_ok(a, forced) or not chain_ok(b, forced):
                return False
            queue.extend(forced)
        return True

    def rec() -> None:
        try:
            a = mu.index(-1)
        except ValueError:
            out.append(tuple(mu))
            return
        for b in range(a + 1, n):
            if mu[b] != -1:
                continue
            trail: list = []
            if propagate(a, b, trail):
                rec()
            for s in trail:
                mu[s] = -1

    if first_partner is None:
        rec()
    else:
        trail: list = []
        if propagate(0, first_partner, trail):
            rec()
    return out


def _canonical_set(genus: int, first_partner: int | None) -> set[tuple[int, ...]]:
    raw = _rooted_involutions(side_count(genus), first_partner)
    if not raw:
        return set()
    return {tuple(int(v) for v in row) for row in canonical_partners(np.array(raw))}


def enumerate_patterns(genus: int, workers: int = 1) -> list[SidePairingPattern]:
    """All side-pairing patterns of the given genus up to dihedral relabeling.

    Output is the sorted list of canonical representatives, named
    ``g{genus}-{k}``.  With ``workers > 1`` the subtrees fixed by the partner
    of side 1 are explored in separate processes; the merged result does not
    depend on scheduling.
    """
    genus = int(genus)
    if genus < 1:
        raise GenusMismatchError(f"genus must be at least 1, got {genus}")
    n = side_count(genus)
    found: set[tuple[int, ...]] = set()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_canonical_set, [genus] * (n - 1), range(1, n)):
                found |= part
    else:
        found = _canonical_set(genus, None)
    return [
        SidePairingPattern(genus, partner, f"g{genus}-{k + 1}")
        for k, partner in enumerate(sorted(found))
    ]


# --- vertex triples and layouts ---------------------------------------------


@dataclass(frozen=True)
class VertexTriple:
    """The three side pairs meeting at a corner cycle, seen from ``corner``.

    With ``i = corner - 1``, ``j = mu(i)`` and ``k = mu(i + 1)`` the pairs are
    ``(i, j)``, ``(i + 1, k)`` and ``(k + 1, j - 1)``.
    """

    corner: int
    cycle: tuple[int, ...]
    pairs: tuple[tuple[int, int], tuple[int, int], tuple[int, int]]
    kind: str

    @property
    def is_separating(self) -> bool:
        return self.kind == SEPARATING


def _cycle_of(p: SidePairingPattern, corner: int) -> tuple[int, ...]:
    for cyc in p.corner_cycles:
        if corner in cyc:
            return cyc
    raise PatternError(f"corner {corner} does not belong to the pattern")


def classify_triple(p: SidePairingPattern, corner: int | Sequence[int]) -> VertexTriple:
    """Classify the triple at a corner (or corner cycle) by the cyclic order of its sides."""
    if not isinstance(corner, (int, np.integer)):
        cyc = tuple(corner)
        if cyc not in p.corner_cycles and sorted(cyc) not in [sorted(c) for c in p.corner_cycles]:
            raise PatternError(f"{list(cyc)} is not a corner cycle of the pattern")
        corner = cyc[0]
    n = p.sides
    corner = int(corner) % n
    mu = p.partner
    i = (corner - 1) % n
    j = mu[i]
    k = mu[corner]
    pairs = ((i, j), (corner, k), ((k + 1) % n, (j - 1) % n))

    def increasing(seq):
        offs = [(s - i) % n for s in seq]
        return all(a < b for a, b in zip(offs, offs[1:]))

    if increasing((i, i + 1, j - 1, j, k, k + 1)):
        kind = SEPARATING
    elif increasing((i, i + 1, k, k + 1, j - 1, j)):
        kind = NONSEPARATING
    else:  # pragma: no cover - the two orders are exhaustive for valid patterns
        raise PatternError(f"corner {corner} has neither cyclic order")
    return VertexTriple(corner, _cycle_of(p, corner), pairs, kind)


@dataclass(frozen=True)
class EdgeLayout:
    """The vertex word rotated to read ``x T x y U y z V z``.

    ``word`` holds edge indices starting at side ``corner``.  ``x``, ``y``,
    ``z`` are the dependent edges; ``T``, ``U``, ``V`` are the gap subwords
    (edge indices, in word order) and ``free`` lists the remaining edges in
    increasing order.  ``positions`` maps each dependent label to its two
    offsets in ``word``.
    """

    pattern: SidePairingPattern
    corner: int
    word: tuple[int, ...]
    x: int
    y: int
    z: int
    T: tuple[int, ...]
    U: tuple[int, ...]
    V: tuple[int, ...]
    free: tuple[int, ...]
    positions: dict

    @property
    def dependent(self) -> tuple[int, int, int]:
        return (self.x, self.y, self.z)

    @property
    def dependent_labels(self) -> tuple[str, str, str]:
        return tuple(edge_label(e) for e in self.dependent)

    @property
    def free_labels(self) -> tuple[str, ...]:
        return tuple(edge_label(e) for e in self.free)

    def gap_free_indices(self, gap: str) -> tuple[int, ...]:
        """Positions of a gap word's edges within ``free``."""
        where = {e: k for k, e in enumerate(self.free)}
        return tuple(where[e] for e in getattr(self, gap))


def layout_at(p: SidePairingPattern, corner: int) -> EdgeLayout:
    """Layout for the nonseparating triple seen from ``corner``."""
    triple = classify_triple(p, corner)
    if triple.is_separating:
        raise PatternError(f"corner {corner + 1} carries a separating triple")
    n = p.sides
    c = triple.corner
    (i, j), (_, k), _ = triple.pairs
    word = tuple(p.edge_of_side[(c + t) % n] for t in range(n))

    def off(s: int) -> int:
        return (s - c) % n

    ok, oj = off(k), off(j)
    x, y, z = word[0], word[ok + 1], word[oj]
    T = word[1:ok]
    U = word[ok + 2 : oj - 1]
    V = word[oj + 1 : n - 1]
    dependent = {x, y, z}
    free = tuple(e for e in range(len(p.edges)) if e not in dependent)
    positions = {"x": (0, ok), "y": (ok + 1, oj - 1), "z": (oj, n - 1)}
    return EdgeLayout(p, c, word, x, y, z, T, U, V, free, positions)


def select_dependent_triple(p: SidePairingPattern) -> EdgeLayout:
    """Layout at the first corner (by index) carrying a nonseparating triple."""
    if p.genus < 2:
        raise NoNonseparatingTripleError("a dependent triple needs genus at least 2")
    for c in range(p.sides):
        if not classify_triple(p, c).is_separating:
            return layout_at(p, c)
    raise NoNonseparatingTripleError("pattern has no nonseparating triple")

"""Independent reference computations used by the tests.

None of these call into the code they check beyond building inputs.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def geometric_class(entries, tol=1e-12):
    """Admissibility from the tangency points of the fan around the real line.

    The points ``0, p_2, ..., p_{n+1}`` with ``p_{j+1} = b_j / d_j`` must
    increase strictly; infinity may only occur last (boundary).
    """
    m = np.eye(2)
    pts = [0.0]
    for x in entries:
        m = m @ np.array([[0.0, 1.0], [-1.0, x]])
        b, d = m[0, 1], m[1, 1]
        pts.append(math.inf if abs(d) <= tol else b / d)
    for k in range(1, len(pts)):
        if math.isinf(pts[k]):
            if k != len(pts) - 1:
                return "inadmissible"
            continue
        if not pts[k] > pts[k - 1]:
            return "inadmissible"
    return "boundary" if math.isinf(pts[-1]) else "strict"


def brute_force_patterns(n):
    """Fixed-point-free involutions on ``n`` sides with all corner cycles of length 3.

    Also returns how many involutions were examined.
    """
    out = []
    total = 0

    def matchings(rest):
        if not rest:
            yield []
            return
        a = rest[0]
        for k in range(1, len(rest)):
            b = rest[k]
            for m in matchings(rest[1:k] + rest[k + 1 :]):
                yield [(a, b)] + m

    for m in matchings(list(range(n))):
        total += 1
        mu = [0] * n
        for a, b in m:
            mu[a], mu[b] = b, a
        seen = set()
        ok = True
        for c in range(n):
            if c in seen:
                continue
            cyc = []
            d = c
            while d not in seen:
                seen.add(d)
                cyc.append(d)
                d = (mu[d] + 1) % n
            ok &= len(cyc) == 3
        if ok:
            out.append(tuple(mu))
    return out, total


def dihedral_orbit(mu):
    n = len(mu)
    out = set()
    for s in range(n):
        for refl in (False, True):
            sig = [((s - 1 - p) % n) if refl else ((p + s) % n) for p in range(n)]
            m = [0] * n
            for p in range(n):
                m[sig[p]] = sig[mu[p]]
            out.add(tuple(m))
    return out


def word_matrix(entries):
    m = np.eye(2)
    for x in entries:
        m = m @ np.array([[0.0, 1.0], [-1.0, x]])
    return m


def _xwx_arrays(s, w):
    """Entries (c, d) of the second row of A(s) W A(s) for an array of s."""
    w1, w2, w3, w4 = w
    return w2 - w4 * s, w4 * s * s + (w3 - w2) * s - w1, -w4 + 0 * s, w3 + w4 * s


def _components(cells):
    """Connected components of a set of integer 3-cells under 26-adjacency."""
    cells = set(cells)
    comps = []
    while cells:
        seed = cells.pop()
        comp = [seed]
        stack = [seed]
        while stack:
            c = stack.pop()
            for d in itertools.product((-1, 0, 1), repeat=3):
                nb = (c[0] + d[0], c[1] + d[1], c[2] + d[2])
                if nb in cells:
                    cells.remove(nb)
                    comp.append(nb)
                    stack.append(nb)
        comps.append(comp)
    return comps


def _root_cells(t, u, v, lo, step, count):
    """Cells of a ``count``-cell grid where all three pairwise equations change sign."""
    axes = [lo[k] + step[k] * np.arange(count + 1) for k in range(3)]
    xs, ys, zs = axes
    # second rows of XTX, YUY, ZVZ and first-row entry 12
    a21, a22, _, a12 = _xwx_arrays(xs, t)
    b21, b22, _, b12 = _xwx_arrays(ys, u)
    c21, c22, _, c12 = _xwx_arrays(zs, v)
    g1 = np.outer(a21, b12) + np.outer(a22, b22) - v[3]  # (AB)_22 - v4 over (x, y)
    g2 = np.outer(b21, c12) + np.outer(b22, c22) - t[3]  # (BC)_22 - t4 over (y, z)
    g3 = np.outer(c21, a12) + np.outer(c22, a22) - u[3]  # (CA)_22 - u4 over (z, x)

    def changes(g):
        corners = np.stack([g[:-1, :-1], g[1:, :-1], g[:-1, 1:], g[1:, 1:]])
        return (corners.min(axis=0) <= 0) & (corners.max(axis=0) >= 0)

    s1, s2, s3 = changes(g1), changes(g2), changes(g3)
    cells = []
    for i, j in zip(*np.nonzero(s1)):
        ks = np.nonzero(s2[j, :] & s3[:, i])[0]
        cells.extend((int(i), int(j), int(k)) for k in ks)
    return cells


def _refine(t, u, v, lo, steps, comp, final):
    while steps.max() > final:
        idx = np.array(comp)
        first = idx.min(axis=0) - 1
        last = idx.max(axis=0) + 2
        lo = lo + first * steps
        steps = (last - first) * steps / 20.0
        comps = _components(_root_cells(t, u, v, lo, steps, 20))
        if not comps:
            return None
        comp = max(comps, key=len)
    idx = np.array(comp)
    return lo + (idx.min(axis=0) + idx.max(axis=0) + 1) / 2.0 * steps


def grid_oracle(t, u, v, thresholds, width=10.0, step=0.05, final=1e-10, max_width=160.0):
    """Locate roots of the (2,2)-entry system by grid scan and refinement.

    ``t, u, v`` are gap products ``(a, b, c, d)``.  The box of the given
    width above the thresholds is scanned; if no component refines to a
    root the width is doubled.  Returns the number of connected root-cell
    components in the final box and the refined root.
    """
    lo = np.array(thresholds, dtype=float)
    while width <= max_width:
        count = int(round(width / step))
        steps = np.full(3, step)
        comps = _components(_root_cells(t, u, v, lo, steps, count))
        roots = [r for r in (_refine(t, u, v, lo, steps, c, final) for c in comps) if r is not None]
        if roots:
            return len(comps), tuple(float(r) for r in roots[0])
        width *= 2.0
    return 0, None


def finite_difference_jacobian(layout, point, h=1e-6):
    """Central differences of (a, b, c) of the rotated vertex word in (x, y, z)."""
    jac = np.zeros((3, 3))
    base = list(point.values)
    n = point.pattern.sides
    eos = point.pattern.edge_of_side
    for col, e in enumerate(layout.dependent):
        rows = []
        for sgn in (1.0, -1.0):
            vals = list(base)
            vals[e] += sgn * h
            word = [vals[eos[(layout.corner + k) % n]] for k in range(n)]
            m = word_matrix(word)
            rows.append(np.array([m[0, 0], m[0, 1], m[1, 0]]))
        jac[:, col] = (rows[0] - rows[1]) / (2 * h)
    return jac

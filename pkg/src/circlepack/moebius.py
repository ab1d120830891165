"""Extended complex plane, Moebius maps, generalized circles and cross ratios.

Points of the extended plane are Python ``complex`` values or the sentinel
``INF``.  A generalized circle is stored as a Hermitian matrix ``H`` and
represents ``{z : h11|z|^2 + h12 conj(z) + conj(h12) z + h22 = 0}``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DegeneratePointsError, NotTangentError, ValidationError

TOL = 1e-9
_POLE_TOL = 1e-15


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()

ExtendedComplex = Union[complex, _Infinity]


def is_inf(z) -> bool:
    return z is INF


def as_point(z) -> ExtendedComplex:
    """Coerce a number (or ``INF`` / a float infinity) to an extended point."""
    if z is INF:
        return INF
    w = complex(z)
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        return INF
    return complex(w.real + 0.0, w.imag + 0.0)


def points_close(z, w, tol: float = TOL) -> bool:
    if z is INF or w is INF:
        return z is w
    return abs(z - w) <= tol


@dataclass(frozen=True, eq=False)
class Moebius:
    """A 2x2 complex matrix acting by linear fractional transformations.

    Matrices built through :meth:`from_entries` are scaled to determinant 1
    unless ``normalize=False``; products of unit-determinant matrices keep
    their sign, so a ``Moebius`` doubles as an ``SL2`` lift.
    """

    m: np.ndarray

    @classmethod
    def from_entries(cls, a, b, c, d, normalize: bool = True) -> "Moebius":
        mat = np.array([[a, b], [c, d]], dtype=complex)
        return cls.from_matrix(mat, normalize=normalize)

    @classmethod
    def from_matrix(cls, mat, normalize: bool = True) -> "Moebius":
        mat = np.array(mat, dtype=complex).reshape(2, 2)
        if normalize:
            det = mat[0, 0] * mat[1, 1] - mat[0, 1] * mat[1, 0]
            if abs(det) == 0.0:
                raise ValidationError("singular matrix does not define a Moebius map")
            mat = mat / cmath.sqrt(det)
        mat.setflags(write=False)
        return cls(mat)

    @classmethod
    def identity(cls) -> "Moebius":
        return cls.from_matrix(np.eye(2), normalize=False)

    @property
    def det(self) -> complex:
        m = self.m
        return complex(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])

    @property
    def trace(self) -> complex:
        return complex(self.m[0, 0] + self.m[1, 1])

    def __matmul__(self, other: "Moebius") -> "Moebius":
        return Moebius.from_matrix(self.m @ other.m, normalize=False)

    def __neg__(self) -> "Moebius":
        return Moebius.from_matrix(-self.m, normalize=False)

    def inverse(self) -> "Moebius":
        (a, b), (c, d) = self.m
        det = a * d - b * c
        return Moebius.from_matrix(np.array([[d, -b], [-c, a]]) / det, normalize=False)

    def __call__(self, z):
        return apply(self, z)

    def close_to(self, other: "Moebius", tol: float = TOL) -> bool:
        """Entrywise equality including sign."""
        return float(np.max(np.abs(self.m - other.m))) <= tol

    def projectively_close(self, other: "Moebius", tol: float = TOL) -> bool:
        """Equality in ``PSL2``: up to an overall sign."""
        return self.close_to(other, tol) or self.close_to(-other, tol)

    def __repr__(self) -> str:
        return f"Moebius({self.m.tolist()!r})"


def apply(m: Moebius, z) -> ExtendedComplex:
    """Return ``(a z + b) / (c z + d)`` with the usual conventions at poles."""
    (a, b), (c, d) = m.m
    if z is INF:
        if abs(c) <= _POLE_TOL * max(abs(a), 1.0):
            return INF
        return complex(a / c)
    num = a * z + b
    den = c * z + d
    scale = max(abs(c * z), abs(d), abs(num), 1e-300)
    if abs(den) <= _POLE_TOL * scale:
        return INF
    return as_point(num / den)


def cross_ratio(z1, z2, z3, z4) -> complex:
    """Image of ``z1`` under the map sending ``z2, z3, z4`` to ``1, 0, INF``."""
    pts = [as_point(z) for z in (z1, z2, z3, z4)]
    for i in range(4):
        for j in range(i + 1, 4):
            if points_close(pts[i], pts[j], 0.0):
                raise DegeneratePointsError(f"points {i + 1} and {j + 1} coincide")
    z1, z2, z3, z4 = pts
    if z1 is INF:
        return complex((z2 - z4) / (z2 - z3))
    if z2 is INF:
        return complex((z1 - z3) / (z1 - z4))
    if z3 is INF:
        return complex((z2 - z4) / (z1 - z4))
    if z4 is INF:
        return complex((z1 - z3) / (z2 - z3))
    return complex((z1 - z3) * (z2 - z4) / ((z1 - z4) * (z2 - z3)))


def _canonical_hermitian(h: np.ndarray) -> np.ndarray:
    h = np.array(h, dtype=complex)
    h = 0.5 * (h + h.conj().T)
    h[0, 0] = h[0, 0].real
    h[1, 1] = h[1, 1].real
    norm = np.linalg.norm(h)
    if norm == 0.0:
        raise ValidationError("zero matrix is not a circle")
    h = h / norm
    h11 = h[0, 0].real
    if abs(h11) > 1e-12:
        sign = 1.0 if h11 > 0 else -1.0
    else:
        h12 = h[0, 1]
        if abs(h12.real) > 1e-12:
            sign = 1.0 if h12.real > 0 else -1.0
        else:
            sign = 1.0 if h12.imag > 0 else -1.0
    h = sign * h
    h.setflags(write=False)
    return h


@dataclass(frozen=True, eq=False)
class GeneralizedCircle:
    """A circle or line stored as a canonically normalized Hermitian matrix."""

    H: np.ndarray

    def __post_init__(self):
        h = _canonical_hermitian(self.H)
        det = (h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0]).real
        if not det < 0:
            raise ValidationError("Hermitian matrix has det >= 0: not a circle or line")
        object.__setattr__(self, "H", h)

    @classmethod
    def from_center_radius(cls, center: complex, radius: float) -> "GeneralizedCircle":
        if not radius > 0:
            raise ValidationError("radius must be positive")
        c = complex(center)
        return cls(np.array([[1.0, -c], [-c.conjugate(), abs(c) ** 2 - radius**2]]))

    @classmethod
    def line(cls, point: complex, direction: complex) -> "GeneralizedCircle":
        """The line through ``point`` with the given direction."""
        p = complex(point)
        d = complex(direction)
        if d == 0:
            raise ValidationError("line direction must be nonzero")
        # normal n = i d; the line is Re(conj(n) z) = Re(conj(n) p)
        n = 1j * d
        h12 = n / 2
        h22 = -(n.conjugate() * p).real
        return cls(np.array([[0.0, h12], [h12.conjugate(), h22]]))

    @classmethod
    def from_vector(cls, vec) -> "GeneralizedCircle":
        """Inverse of :meth:`as_vector`."""
        h11, re12, im12, h22 = (float(v) for v in vec)
        h12 = complex(re12, im12)
        return cls(np.array([[h11, h12], [h12.conjugate(), h22]]))

    def as_vector(self) -> tuple[float, float, float, float]:
        h = self.H
        return (float(h[0, 0].real), float(h[0, 1].real), float(h[0, 1].imag), float(h[1, 1].real))

    @property
    def is_line(self) -> bool:
        return abs(self.H[0, 0].real) <= 1e-12

    @property
    def center(self) -> complex:
        if self.is_line:
            raise ValidationError("a line has no center")
        return complex(-self.H[0, 1] / self.H[0, 0].real)

    @property
    def radius(self) -> float:
        if self.is_line:
            return math.inf
        h11 = self.H[0, 0].real
        c = self.center
        return math.sqrt(max(abs(c) ** 2 - self.H[1, 1].real / h11, 0.0))

    def line_point_direction(self) -> tuple[complex, complex]:
        """A point on the line nearest the origin and a unit direction."""
        h12 = complex(self.H[0, 1])
        h22 = self.H[1, 1].real
        # line: 2 Re(conj(h12) z) = -h22
        n = h12
        p = -h22 * n / (2 * abs(n) ** 2)
        direction = -1j * n / abs(n)
        return p, direction

    def evaluate(self, z) -> float:
        """Signed value of the defining form at ``z`` (``h11`` at infinity)."""
        h = self.H
        if z is INF:
            return float(h[0, 0].real)
        z = complex(z)
        val = h[0, 0] * abs(z) ** 2 + h[0, 1] * z.conjugate() + h[1, 0] * z + h[1, 1]
        return float(val.real)

    def contains(self, z, tol: float = TOL) -> bool:
        if z is INF:
            return self.is_line
        scale = 1.0 + abs(complex(z)) ** 2
        return abs(self.evaluate(z)) <= tol * scale

    def close_to(self, other: "GeneralizedCircle", tol: float = TOL) -> bool:
        d1 = np.max(np.abs(self.H - other.H))
        d2 = np.max(np.abs(self.H + other.H))
        return float(min(d1, d2)) <= tol

    def __repr__(self) -> str:
        if self.is_line:
            p, d = self.line_point_direction()
            return f"GeneralizedCircle(line through {p:.6g} dir {d:.6g})"
        return f"GeneralizedCircle(center {self.center:.6g}, radius {self.radius:.6g})"


REAL_LINE = GeneralizedCircle(np.array([[0.0, 0.5j], [-0.5j, 0.0]]))
UPPER_LINE = GeneralizedCircle(np.array([[0.0, 0.5j], [-0.5j, -1.0]]))
SMALL_CIRCLE = GeneralizedCircle.from_center_radius(0.5j, 0.5)
STANDARD_INTERSTICE = (REAL_LINE, UPPER_LINE, SMALL_CIRCLE)


def transform_circle(m: Moebius, c: GeneralizedCircle) -> GeneralizedCircle:
    """Image of ``c`` under ``m``: ``(m^-1)^* H m^-1``."""
    inv = m.inverse().m
    return GeneralizedCircle(inv.conj().T @ c.H @ inv)


def _hdet(h: np.ndarray) -> float:
    return float((h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0]).real)


def _pencil(c1: GeneralizedCircle, c2: GeneralizedCircle) -> tuple[float, float, float]:
    h, k = c1.H, c2.H
    bilinear = float(
        (h[0, 0] * k[1, 1] + h[1, 1] * k[0, 0]).real - 2.0 * (h[0, 1] * np.conj(k[0, 1])).real
    )
    return _hdet(h), bilinear, _hdet(k)


def tangency_discriminant(c1: GeneralizedCircle, c2: GeneralizedCircle) -> float:
    """Discriminant of ``t -> det(H1 + t H2)``; zero exactly for tangent pairs.

    Positive for disjoint or nested pairs, negative for crossing pairs.
    """
    d1, bil, d2 = _pencil(c1, c2)
    return bil * bil - 4.0 * d1 * d2


def tangency_point(c1: GeneralizedCircle, c2: GeneralizedCircle, tol: float = TOL):
    """The common point of two tangent circles."""
    disc = tangency_discriminant(c1, c2)
    if abs(disc) > tol:
        raise NotTangentError(disc)
    _, bil, d2 = _pencil(c1, c2)
    t0 = -bil / (2.0 * d2)
    # the pencil member p is a point circle |z - q|^2 = 0 up to scale
    p = c1.H + t0 * c2.H
    if abs(p[0, 0]) >= abs(p[1, 1]):
        return as_point(-p[0, 1] / p[0, 0])
    if abs(p[1, 0]) <= 1e-12 * abs(p[1, 1]):
        return INF
    return as_point(-p[1, 1] / p[1, 0])

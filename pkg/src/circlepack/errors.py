"""Exception hierarchy.

Errors split into two families so the command line can map them to exit
codes: ``ValidationError`` for malformed input and ``VerdictError`` for
well-formed input that fails a mathematical test.
"""

from __future__ import annotations


class CirclePackError(Exception):
    """Base class for all package errors."""


class ValidationError(CirclePackError, ValueError):
    """Input is malformed or violates a structural precondition."""

    kind = "validation"


class VerdictError(CirclePackError, ValueError):
    """Input is well formed but fails a mathematical condition."""

    kind = "verdict"


class DegeneratePointsError(ValidationError):
    kind = "degenerate-points"


class NotTangentError(VerdictError):
    kind = "not-tangent"

    def __init__(self, discriminant: float):
        super().__init__(f"circles are not tangent (discriminant {discriminant:.3e})")
        self.discriminant = discriminant


class NonpositiveCrossRatioError(ValidationError):
    kind = "nonpositive-cross-ratio"


class NotStrictlyAdmissibleError(VerdictError):
    kind = "not-strictly-admissible"


class PatternError(ValidationError):
    kind = "pattern"


class NotInvolutionError(PatternError):
    kind = "not-an-involution"


class CornerCycleError(PatternError):
    kind = "corner-cycle"

    def __init__(self, cycle: tuple[int, ...]):
        sides = ",".join(str(c + 1) for c in cycle)
        super().__init__(f"corner cycle of length {len(cycle)} (corners {sides})")
        self.cycle = cycle


class GenusMismatchError(PatternError):
    kind = "genus-mismatch"


class DegenerateLayoutError(PatternError):
    kind = "degenerate-layout"


class NoNonseparatingTripleError(PatternError):
    kind = "no-nonseparating-triple"


class UnknownEdgeError(ValidationError, KeyError):
    kind = "unknown-edge"

    def __str__(self) -> str:
        return Exception.__str__(self)


class PatternMismatchError(ValidationError):
    kind = "pattern-mismatch"


class OutsideConvexImageError(VerdictError):
    kind = "outside-convex-image"


class FreeValuesInadmissibleError(VerdictError):
    kind = "free-values-inadmissible"

    def __init__(self, word: str, detail: str = ""):
        msg = f"gap word {word} is not strictly admissible"
        super().__init__(msg + (f" ({detail})" if detail else ""))
        self.word = word


class BracketNotFoundError(CirclePackError, RuntimeError):
    kind = "bracket-not-found"


class PointNotInSpaceError(VerdictError):
    kind = "point-not-in-space"

"""Determinant lines reduced to bookkeeping.

A determinant line never materializes as a vector space here: relative to a
fixed ordered basis it is canonically F, so an isomorphism of lines is just a
nonzero scalar tagged with its source and target context.  Plus legs change
covariantly under a basis change and starred (minus) legs contravariantly;
``wedge_scalar`` is the single place where coefficients are extracted.
"""

from __future__ import annotations

from dataclasses import dataclass

from .linalg import LinalgError, Matrix

__all__ = ["Line", "LineIso", "wedge_scalar", "compose_line_isos", "tensor_line_isos"]


@dataclass(frozen=True)
class Line:
    """Context tag for a determinant line |H+| (x) |H-|^*."""

    label: str
    dim_plus: int = 0
    dim_minus: int = 0

    def tensor(self, other: "Line") -> "Line":
        return Line(
            f"{self.label}(x){other.label}",
            self.dim_plus + other.dim_plus,
            self.dim_minus + other.dim_minus,
        )


UNIT_LINE = Line("F", 0, 0)


@dataclass(frozen=True)
class LineIso:
    """A line isomorphism stored as its scalar relative to fixed bases."""

    source: Line
    target: Line
    scalar: object

    def __post_init__(self):
        if not self.scalar:
            raise LinalgError("a line isomorphism has a nonzero scalar")

    def compose(self, other: "LineIso") -> "LineIso":
        """self followed by other; contexts must chain."""
        if other.source != self.target:
            raise LinalgError(
                f"cannot compose: {self.target} does not match {other.source}"
            )
        return LineIso(self.source, other.target, self.scalar * other.scalar)

    def tensor(self, other: "LineIso") -> "LineIso":
        return LineIso(
            self.source.tensor(other.source),
            self.target.tensor(other.target),
            self.scalar * other.scalar,
        )

    def inverse(self) -> "LineIso":
        inv = self.scalar.inverse() if hasattr(self.scalar, "inverse") else 1 / self.scalar
        return LineIso(self.target, self.source, inv)


def compose_line_isos(f: LineIso, g: LineIso) -> LineIso:
    return f.compose(g)


def tensor_line_isos(f: LineIso, g: LineIso) -> LineIso:
    return f.tensor(g)


def wedge_scalar(vectors: Matrix, reference: Matrix):
    """The unique c with v_1 ^ ... ^ v_n = c * (b_1 ^ ... ^ b_n).

    ``vectors`` and ``reference`` hold columns; the vectors must lie in the
    span of the reference basis and match its count, otherwise this raises.
    The coefficient is the determinant of the coordinate matrix.
    """
    if vectors.cols != reference.cols:
        raise LinalgError(
            f"wedge length {vectors.cols} does not match basis size {reference.cols}"
        )
    coords = reference.solve(vectors)
    if coords is None:
        raise LinalgError("wedge vectors are not inside the span of the reference")
    return coords.det()

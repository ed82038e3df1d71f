"""Exact matrix algebra over the scalar tower.

Matrices are immutable, row-major, and homogeneous in their scalar variant
(rational, gaussian, polynomial or ratfunc).  Elimination-based operations
(echelon forms, kernels, determinants, pseudo-inverses) are available over
the field variants; polynomial matrices support the ring operations plus
entrywise evaluation, which is all the parametrized machinery needs.

Subspaces are stored through a canonical reduced column echelon basis, so
two equal subspaces always carry byte-identical bases and every complement
construction is deterministic.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .exactnum import (
    GaussianRational,
    Polynomial,
    RatFunc,
    ScalarMismatchError,
)

__all__ = [
    "Matrix",
    "Subspace",
    "LinalgError",
    "rref",
    "kernel_basis",
    "image_basis",
    "complement",
    "pseudo_inverse",
    "det",
    "det_class_det",
]


class LinalgError(ValueError):
    pass


_ZERO = {
    "rational": Fraction(0),
    "gaussian": GaussianRational(0),
    "polynomial": Polynomial(),
    "ratfunc": RatFunc(0),
}
_ONE = {
    "rational": Fraction(1),
    "gaussian": GaussianRational(1),
    "polynomial": Polynomial([1]),
    "ratfunc": RatFunc(1),
}
FIELD_VARIANTS = ("rational", "gaussian", "ratfunc")


def _coerce(x, field):
    if field == "rational":
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
    elif field == "gaussian":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction)):
            return GaussianRational(x)
    elif field == "polynomial":
        if isinstance(x, Polynomial):
            return x
        if isinstance(x, (int, GaussianRational)):
            return Polynomial([x])
    elif field == "ratfunc":
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, (int, GaussianRational, Polynomial)):
            return RatFunc(x)
    raise ScalarMismatchError(f"entry {x!r} does not belong to the {field} variant")


def _infer_field(x):
    if isinstance(x, Fraction):
        return "rational"
    if isinstance(x, GaussianRational):
        return "gaussian"
    if isinstance(x, Polynomial):
        return "polynomial"
    if isinstance(x, RatFunc):
        return "ratfunc"
    raise ScalarMismatchError(f"cannot infer scalar variant of {x!r} (give field=)")


def _inv(x, field):
    if field == "rational":
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return Fraction(1) / x
    if field in ("gaussian", "ratfunc"):
        return x.inverse()
    raise LinalgError("polynomial entries are not invertible")


class Matrix:
    """An immutable rows x cols matrix with entries in one scalar variant."""

    __slots__ = ("rows", "cols", "data", "field")

    def __init__(self, data, field=None, cols=None):
        data = [list(r) for r in data]
        rows = len(data)
        if rows:
            cols = len(data[0])
        elif cols is None:
            cols = 0
        if any(len(r) != cols for r in data):
            raise LinalgError("ragged rows")
        if field is None:
            probe = None
            for r in data:
                for x in r:
                    if not isinstance(x, int):
                        probe = x
                        break
                if probe is not None:
                    break
            field = _infer_field(probe) if probe is not None else "rational"
        grid = tuple(tuple(_coerce(x, field) for x in r) for r in data)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "data", grid)
        object.__setattr__(self, "field", field)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zeros(rows, cols, field):
        z = _ZERO[field]
        return Matrix([[z] * cols for _ in range(rows)], field, cols=cols)

    @staticmethod
    def identity(n, field):
        z, o = _ZERO[field], _ONE[field]
        return Matrix([[o if i == j else z for j in range(n)] for i in range(n)], field)

    @staticmethod
    def from_cols(cols, ambient_dim=None, field=None):
        cols = list(cols)
        if not cols:
            if ambient_dim is None or field is None:
                raise LinalgError("empty column list needs ambient_dim and field")
            return Matrix([[] for _ in range(ambient_dim)], field)
        n = len(cols[0])
        return Matrix([[col[i] for col in cols] for i in range(n)], field)

    @staticmethod
    def block(grid, field):
        """Assemble a block matrix from a grid of matrices (None means zero)."""
        row_heights = []
        for brow in grid:
            h = None
            for m in brow:
                if m is not None:
                    h = m.rows
                    break
            if h is None:
                raise LinalgError("block row with no matrix; use explicit zeros")
            row_heights.append(h)
        ncols_blocks = len(grid[0])
        col_widths = []
        for j in range(ncols_blocks):
            w = None
            for brow in grid:
                if brow[j] is not None:
                    w = brow[j].cols
                    break
            if w is None:
                raise LinalgError("block column with no matrix; use explicit zeros")
            col_widths.append(w)
        out = []
        for bi, brow in enumerate(grid):
            for r in range(row_heights[bi]):
                line = []
                for bj, m in enumerate(brow):
                    if m is None:
                        line.extend([_ZERO[field]] * col_widths[bj])
                    else:
                        if m.rows != row_heights[bi] or m.cols != col_widths[bj]:
                            raise LinalgError("inconsistent block shapes")
                        line.extend(m.data[r])
                out.append(line)
        return Matrix(out, field, cols=sum(col_widths))

    # -- basic structure ---------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and self.field == other.field
            and self.data == other.data
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.field, self.data))

    def __repr__(self):
        return f"Matrix({[list(r) for r in self.data]!r}, field={self.field!r})"

    def is_zero(self):
        z = _ZERO[self.field]
        return all(x == z for r in self.data for x in r)

    def transpose(self):
        return Matrix(
            [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)],
            self.field,
            cols=self.rows,
        )

    def col(self, j):
        return [self.data[i][j] for i in range(self.rows)]

    def take_cols(self, idx):
        idx = list(idx)
        return Matrix([[r[j] for j in idx] for r in self.data], self.field, cols=len(idx))

    def take_rows(self, idx):
        return Matrix([list(self.data[i]) for i in idx], self.field, cols=self.cols)

    def hstack(self, other):
        if self.rows != other.rows or self.field != other.field:
            raise LinalgError("hstack shape/field mismatch")
        return Matrix(
            [list(a) + list(b) for a, b in zip(self.data, other.data)],
            self.field,
            cols=self.cols + other.cols,
        )

    def vstack(self, other):
        if self.cols != other.cols or self.field != other.field:
            raise LinalgError("vstack shape/field mismatch")
        return Matrix(
            [list(r) for r in self.data] + [list(r) for r in other.data],
            self.field,
            cols=self.cols,
        )

    def map_entries(self, f, field=None):
        return Matrix([[f(x) for x in r] for r in self.data], field or self.field, cols=self.cols)

    def eval_at(self, z):
        """Evaluate a polynomial or ratfunc matrix at a Gaussian point."""
        if self.field not in ("polynomial", "ratfunc"):
            raise LinalgError("eval_at needs polynomial or ratfunc entries")
        return Matrix([[x(z) for x in r] for r in self.data], "gaussian", cols=self.cols)

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        if self.rows != other.rows or self.cols != other.cols or self.field != other.field:
            raise LinalgError("matrix addition shape/field mismatch")
        return Matrix(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.data, other.data)],
            self.field,
            cols=self.cols,
        )

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Matrix([[-x for x in r] for r in self.data], self.field, cols=self.cols)

    def scale(self, c):
        c = _coerce(c, self.field)
        return Matrix([[c * x for x in r] for r in self.data], self.field, cols=self.cols)

    def __mul__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.cols != other.rows or self.field != other.field:
            raise LinalgError(
                f"matmul mismatch: {self.rows}x{self.cols} * {other.rows}x{other.cols}"
            )
        z = _ZERO[self.field]
        bt = other.transpose().data
        out = []
        for r in self.data:
            line = []
            for c in bt:
                acc = z
                for a, b in zip(r, c):
                    if a != z and b != z:
                        acc = acc + a * b
                line.append(acc)
            out.append(line)
        return Matrix(out, self.field, cols=other.cols)

    # -- elimination -------------------------------------------------------

    def rref(self):
        """Reduced row echelon form: (echelon, pivots, transform) with
        transform * self == echelon and strictly increasing pivot columns."""
        if self.field not in FIELD_VARIANTS:
            raise LinalgError(f"rref needs a field variant, not {self.field}")
        z, o = _ZERO[self.field], _ONE[self.field]
        m = [list(r) for r in self.data]
        t = [[o if i == j else z for j in range(self.rows)] for i in range(self.rows)]
        pivots = []
        r = 0
        for c in range(self.cols):
            pr = None
            for i in range(r, self.rows):
                if m[i][c] != z:
                    pr = i
                    break
            if pr is None:
                continue
            if pr != r:
                m[r], m[pr] = m[pr], m[r]
                t[r], t[pr] = t[pr], t[r]
            piv_inv = _inv(m[r][c], self.field)
            m[r] = [x * piv_inv for x in m[r]]
            t[r] = [x * piv_inv for x in t[r]]
            for i in range(self.rows):
                if i != r and m[i][c] != z:
                    f = m[i][c]
                    m[i] = [x - f * y for x, y in zip(m[i], m[r])]
                    t[i] = [x - f * y for x, y in zip(t[i], t[r])]
            pivots.append(c)
            r += 1
            if r == self.rows:
                break
        return (
            Matrix(m, self.field, cols=self.cols),
            tuple(pivots),
            Matrix(t, self.field, cols=self.rows),
        )

    def rank(self):
        return len(self.rref()[1])

    def column_echelon(self):
        """Canonical reduced column echelon basis of the column span."""
        ech, pivots, _ = self.transpose().rref()
        cols = [ech.data[i] for i in range(len(pivots))]
        return Matrix.from_cols(cols, ambient_dim=self.rows, field=self.field), tuple(pivots)

    def kernel_basis(self):
        """Canonical basis of the kernel, as a Subspace of the domain."""
        ech, pivots, _ = self.rref()
        free = [c for c in range(self.cols) if c not in pivots]
        z, o = _ZERO[self.field], _ONE[self.field]
        vecs = []
        for fc in free:
            v = [z] * self.cols
            v[fc] = o
            for ri, pc in enumerate(pivots):
                v[pc] = -ech.data[ri][fc]
            vecs.append(v)
        raw = Matrix.from_cols(vecs, ambient_dim=self.cols, field=self.field)
        return Subspace.from_span(raw)

    def image_basis(self):
        """Canonical basis of the column span, as a Subspace of the codomain."""
        return Subspace.from_span(self)

    def solve(self, rhs):
        """One exact solution X of self * X = rhs (columnwise), or None."""
        if rhs.rows != self.rows or rhs.field != self.field:
            raise LinalgError("solve shape/field mismatch")
        _, pivots, t = self.rref()
        b = t * rhs
        z = _ZERO[self.field]
        for i in range(len(pivots), self.rows):
            if any(b.data[i][j] != z for j in range(rhs.cols)):
                return None
        # rows are fully reduced, so pinning the free variables to zero leaves
        # x[pivot] = b[row] directly
        out = [[z] * rhs.cols for _ in range(self.cols)]
        for ri, pc in enumerate(pivots):
            for j in range(rhs.cols):
                out[pc][j] = b.data[ri][j]
        return Matrix(out, self.field, cols=rhs.cols)

    def inverse(self):
        if self.rows != self.cols:
            raise LinalgError("inverse of a non-square matrix")
        ech, pivots, t = self.rref()
        if len(pivots) != self.rows:
            raise LinalgError("matrix is singular")
        return t

    # -- determinants ------------------------------------------------------

    def det(self):
        """Exact determinant of a square matrix."""
        if self.rows != self.cols:
            raise LinalgError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return _ONE[self.field]
        if self.field in ("rational", "gaussian"):
            return self._det_bareiss()
        return self._det_cofactor()

    def _det_bareiss(self):
        # fraction-free elimination over the Gaussian integers; rationals ride
        # along with zero imaginary part
        n = self.rows
        factor = Fraction(1)
        m = []
        for row in self.data:
            den = 1
            for x in row:
                if isinstance(x, Fraction):
                    den = den * x.denominator // gcd(den, x.denominator)
                else:
                    for part in (x.re, x.im):
                        den = den * part.denominator // gcd(den, part.denominator)
            factor *= den
            line = []
            for x in row:
                if isinstance(x, Fraction):
                    line.append((int(x * den), 0))
                else:
                    line.append((int(x.re * den), int(x.im * den)))
            m.append(line)
        sign = 1
        prev = (1, 0)
        for k in range(n - 1):
            if m[k][k] == (0, 0):
                for i in range(k + 1, n):
                    if m[i][k] != (0, 0):
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return _ZERO[self.field]
            pa, pb = m[k][k]
            qa, qb = prev
            qn = qa * qa + qb * qb
            for i in range(k + 1, n):
                ia, ib = m[i][k]
                for j in range(k + 1, n):
                    ja, jb = m[k][j]
                    xa, xb = m[i][j]
                    ta = xa * pa - xb * pb - (ia * ja - ib * jb)
                    tb = xa * pb + xb * pa - (ia * jb + ib * ja)
                    m[i][j] = ((ta * qa + tb * qb) // qn, (tb * qa - ta * qb) // qn)
                m[i][k] = (0, 0)
            prev = (pa, pb)
        a, b = m[n - 1][n - 1]
        if self.field == "rational":
            return Fraction(sign * a) / factor
        return GaussianRational(Fraction(sign * a) / factor, Fraction(sign * b) / factor)

    def _det_cofactor(self):
        n = self.rows
        z = _ZERO[self.field]
        memo = {}

        def minor(rows):
            if not rows:
                return _ONE[self.field]
            got = memo.get(rows)
            if got is not None:
                return got
            c = n - len(rows)
            acc = z
            for idx, r in enumerate(rows):
                a = self.data[r][c]
                if a == z:
                    continue
                term = a * minor(rows[:idx] + rows[idx + 1 :])
                acc = acc + term if idx % 2 == 0 else acc - term
            memo[rows] = acc
            return acc

        return minor(tuple(range(n)))

    def adjugate(self):
        """Classical adjugate, valid over any commutative entry ring."""
        n = self.rows
        if n != self.cols:
            raise LinalgError("adjugate of a non-square matrix")
        if n == 0:
            return self
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                sub = Matrix(
                    [
                        [self.data[r][c] for c in range(n) if c != i]
                        for r in range(n)
                        if r != j
                    ],
                    self.field,
                )
                cof = sub.det() if n > 1 else _ONE[self.field]
                row.append(cof if (i + j) % 2 == 0 else -cof)
            out.append(row)
        return Matrix(out, self.field)

    def det_class_det(self):
        """Determinant computed on the invariant subspace Im(1 - T).

        Requires an invertible square matrix; in this finite-dimensional
        setting the value agrees with ``det`` but goes through the restricted
        computation so the restriction path is exercised for real.
        """
        n = self.rows
        if n != self.cols:
            raise LinalgError("determinant class needs a square matrix")
        if self.rank() != n:
            raise LinalgError("determinant class requires an invertible operator")
        e = (Matrix.identity(n, self.field) - self).image_basis()
        if e.dim == 0:
            return _ONE[self.field]
        coords = e.basis.solve(self * e.basis)
        if coords is None:
            raise LinalgError("Im(1-T) failed to be invariant; should not happen")
        return coords.det()


# ---------------------------------------------------------------------------
# subspaces


class Subspace:
    """A subspace stored through its canonical reduced column echelon basis."""

    __slots__ = ("ambient_dim", "basis", "pivots", "field")

    def __init__(self, ambient_dim, basis, pivots, field):
        object.__setattr__(self, "ambient_dim", ambient_dim)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "pivots", pivots)
        object.__setattr__(self, "field", field)

    def __setattr__(self, name, value):
        raise AttributeError("Subspace is immutable")

    @staticmethod
    def from_span(mat):
        basis, pivots = mat.column_echelon()
        return Subspace(mat.rows, basis, pivots, mat.field)

    @staticmethod
    def zero(ambient_dim, field):
        return Subspace.from_span(Matrix.zeros(ambient_dim, 0, field))

    @staticmethod
    def full(ambient_dim, field):
        return Subspace.from_span(Matrix.identity(ambient_dim, field))

    @property
    def dim(self):
        return self.basis.cols

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self):
        return hash((self.ambient_dim, self.basis))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"

    def contains_matrix(self, mat):
        return self.basis.solve(mat) is not None

    def contains(self, other):
        return self.contains_matrix(other.basis)

    def coords_of(self, mat):
        x = self.basis.solve(mat)
        if x is None:
            raise LinalgError("vectors are not inside the subspace")
        return x

    def sum(self, other):
        return Subspace.from_span(self.basis.hstack(other.basis))

    def intersect(self, other):
        stacked = self.quotient_map().vstack(other.quotient_map())
        return stacked.kernel_basis()

    def quotient_map(self):
        """A surjection of the ambient space with kernel exactly this subspace.

        The rows are the dual coordinates of the canonical complement, so two
        vectors have equal images iff they agree modulo the subspace.
        """
        comp = complement(self)
        full = self.basis.hstack(comp.basis)
        inv = full.inverse()
        return inv.take_rows(range(self.dim, self.ambient_dim))


def rref(mat):
    return mat.rref()


def kernel_basis(mat):
    return mat.kernel_basis()


def image_basis(mat):
    return mat.image_basis()


def complement(sub, inside=None):
    """Deterministic direct-sum complement of ``sub`` (inside a subspace or
    the ambient space): standard basis vectors at the non-pivot coordinates,
    rewritten through the containing basis when one is given."""
    if inside is None:
        free = [c for c in range(sub.ambient_dim) if c not in sub.pivots]
        vecs = Matrix.identity(sub.ambient_dim, sub.field).take_cols(free)
        return Subspace.from_span(vecs)
    if not inside.contains(sub):
        raise LinalgError("complement: subspace is not contained in `inside`")
    coords = inside.coords_of(sub.basis)
    inner = complement(Subspace.from_span(coords))
    return Subspace.from_span(inside.basis * inner.basis)


def pseudo_inverse(mat):
    """The canonical reflexive pseudo-inverse.

    Inverts ``mat`` from its image back onto the canonical complement of the
    kernel and vanishes on the canonical complement of the image.  Both
    defining idempotent conditions hold, together with the reflexive
    identities M M' M = M and M' M M' = M'.
    """
    ker = mat.kernel_basis()
    cdom = complement(ker)
    im = mat.image_basis()
    cim = complement(im)
    mc = mat * cdom.basis
    x = mc.solve(im.basis)
    if x is None:
        raise LinalgError("pseudo_inverse internal error")
    left = (cdom.basis * x).hstack(Matrix.zeros(mat.cols, cim.dim, mat.field))
    return left * im.basis.hstack(cim.basis).inverse()


def det(mat):
    return mat.det()


def det_class_det(mat):
    return mat.det_class_det()

"""Torsion isomorphisms of exact six-term sequences and cone triangles.

The sign exponent mu is evaluated literally on the degrees of the chosen
top-wedge vectors, including the lone epsilon(t+) term.  These signs are
deliberately not the textbook ones; no simplification is applied.
"""

from __future__ import annotations

from .complexes import SixTermSequence, six_term
from .linalg import LinalgError, Matrix, complement
from .lines import Line, LineIso

__all__ = ["torsion_scalar", "triangle_torsion", "stabilized_hexagon"]


def _one(field):
    return Matrix.identity(1, field).data[0][0]


def _node_section(outgoing: Matrix, rng=None) -> Matrix:
    """A complement of Ker(outgoing), optionally shifted by a random graph map
    into the kernel and mixed by a random unimodular change of basis."""
    ker = outgoing.kernel_basis()
    comp = complement(ker).basis
    if rng is None or comp.cols == 0:
        return comp
    if ker.dim:
        shift = Matrix(
            [[rng.randint(-2, 2) for _ in range(comp.cols)] for _ in range(ker.dim)],
            comp.field,
        )
        comp = comp + ker.basis * shift
    mix = [[1 if i == j else 0 for j in range(comp.cols)] for i in range(comp.cols)]
    for i in range(comp.cols):
        for j in range(i + 1, comp.cols):
            mix[i][j] = rng.randint(-1, 1)
    return comp * Matrix(mix, comp.field)


def torsion_scalar(seq: SixTermSequence, rng=None, source=None, target=None) -> LineIso:
    """The torsion isomorphism of an exact hexagon as a scalar.

    Complements of the six kernels are chosen (canonically, or at random when
    ``rng`` is given; the result does not depend on the choice), the six
    displayed wedges are formed, their coefficients against the standard node
    bases are extracted, and the whole thing is multiplied by (-1)^mu.
    """
    t1p = _node_section(seq.a_plus, rng)
    t2p = _node_section(seq.i_plus, rng)
    tp = _node_section(seq.p_plus, rng)
    t1m = _node_section(seq.a_minus, rng)
    t2m = _node_section(seq.i_minus, rng)
    tm = _node_section(seq.p_minus, rng)

    def coeff(lead: Matrix, tail: Matrix, dim: int):
        cols = lead.hstack(tail)
        if cols.cols != dim:
            raise LinalgError("exactness defect: wedge does not fill the node")
        return cols.det()

    d1p, d2p, dp, d1m, d2m, dm = seq.dims
    c2p = coeff(seq.a_plus * t1p, t2p, d2p)
    c2m = coeff(seq.a_minus * t1m, t2m, d2m)
    c1p = coeff(seq.p_minus * tm, t1p, d1p)
    c1m = coeff(seq.p_plus * tp, t1m, d1m)
    cp = coeff(seq.i_plus * t2p, tp, dp)
    cm = coeff(seq.i_minus * t2m, tm, dm)
    if not (c2p and c2m and c1m and cm):
        raise LinalgError("torsion wedge degenerated; hexagon is not exact")

    e1p, e2p, ep = t1p.cols, t2p.cols, tp.cols
    e1m, e2m, em = t1m.cols, t2m.cols, tm.cols
    mu = (
        (e2p + 1) * (e1m + e1p)
        + e1m * (ep + em)
        + em * (e2p + e2m)
        + ep
    )
    one = _one(seq.field)
    sign = one if mu % 2 == 0 else -one
    scalar = sign * c1p * cp * c2m * (_inv(c1m) * _inv(cm) * _inv(c2p))
    source = source or Line("V2", d2p, d2m)
    target = target or Line("V1", d1p, d1m).tensor(Line("V", dp, dm))
    return LineIso(source, target, scalar)


def _inv(x):
    return x.inverse() if hasattr(x, "inverse") else 1 / x


def triangle_torsion(d1, d2, a, rng=None) -> LineIso:
    """Torsion of the cone triangle of a: fold, take the homology hexagon,
    and extract the scalar relative to the canonical homology bases."""
    seq = six_term(a)
    d1p, d2p, dp, d1m, d2m, dm = seq.dims
    return torsion_scalar(
        seq,
        rng=rng,
        source=Line("det(D2)", d2p, d2m),
        target=Line("det(D1)", d1p, d1m).tensor(Line("det(cone)", dp, dm)),
    )


def stabilized_hexagon(seq: SixTermSequence, n_plus, n_minus, m_plus, m_minus) -> SixTermSequence:
    """The hexagon of the stabilized triangle: trivial summands F^{n+-} on the
    one-side nodes, F^{m+-} on the two-side nodes, and F^{n-+} + F^{m+-} on
    the cone nodes, with the inclusion/projection blocks in that order."""
    f = seq.field
    d1p, d2p, dp, d1m, d2m, dm = seq.dims

    def z(r, c):
        return Matrix.zeros(r, c, f)

    def ident(n):
        return Matrix.identity(n, f)

    a_plus = Matrix.block([[seq.a_plus, z(d2p, n_plus)], [z(m_plus, d1p), z(m_plus, n_plus)]], f)
    i_plus = Matrix.block(
        [
            [seq.i_plus, z(dp, m_plus)],
            [z(n_minus, d2p), z(n_minus, m_plus)],
            [z(m_plus, d2p), ident(m_plus)],
        ],
        f,
    )
    p_plus = Matrix.block(
        [[seq.p_plus, z(d1m, n_minus), z(d1m, m_plus)], [z(n_minus, dp), ident(n_minus), z(n_minus, m_plus)]],
        f,
    )
    a_minus = Matrix.block([[seq.a_minus, z(d2m, n_minus)], [z(m_minus, d1m), z(m_minus, n_minus)]], f)
    i_minus = Matrix.block(
        [
            [seq.i_minus, z(dm, m_minus)],
            [z(n_plus, d2m), z(n_plus, m_minus)],
            [z(m_minus, d2m), ident(m_minus)],
        ],
        f,
    )
    p_minus = Matrix.block(
        [[seq.p_minus, z(d1p, n_plus), z(d1p, m_minus)], [z(n_plus, dm), ident(n_plus), z(n_plus, m_minus)]],
        f,
    )
    return SixTermSequence(a_plus, i_plus, p_plus, a_minus, i_minus, p_minus)

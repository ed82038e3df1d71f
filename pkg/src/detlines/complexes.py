"""Bounded graded chain complexes, their Z/2 folding, cones and homology.

The Z-graded side carries the familiar objects (complexes, chain maps,
mapping cones, degreewise homology).  Everything determinant-line related
happens after folding to the Z/2-graded picture: even chains sum to the plus
side, odd chains to the minus side, with blocks ordered by ascending degree.
That fixed ordering is what makes every sign and every stored scalar in the
higher modules reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

from .linalg import LinalgError, Matrix, Subspace, complement

__all__ = [
    "GradedSpace",
    "ChainComplex",
    "ChainMap",
    "Z2Complex",
    "HomologyData",
    "GradedHomology",
    "SixTermSequence",
    "PseudoInverseComplex",
    "ComplexError",
    "validate_complex",
    "homology",
    "homology_z2",
    "fold_z2",
    "fold_chain_map",
    "shift",
    "index",
    "mapping_cone",
    "six_term",
    "induced_map",
    "stabilize",
    "direct_sum_z2",
    "complex_pseudo_inverse",
]


class ComplexError(ValueError):
    pass


class GradedSpace:
    """Finite support mapping degree -> dimension; absent degrees are zero."""

    __slots__ = ("dims",)

    def __init__(self, dims):
        object.__setattr__(
            self, "dims", {int(j): int(n) for j, n in dict(dims).items() if int(n) != 0}
        )

    def __setattr__(self, name, value):
        raise AttributeError("GradedSpace is immutable")

    def dim(self, j):
        return self.dims.get(j, 0)

    def degrees(self):
        return sorted(self.dims)

    def __eq__(self, other):
        return isinstance(other, GradedSpace) and self.dims == other.dims

    def __repr__(self):
        return f"GradedSpace({self.dims!r})"


class ChainComplex:
    """A bounded complex (X, d) with d_j : X_j -> X_{j-1} and d*d = 0."""

    def __init__(self, space, differentials, field):
        self.space = space if isinstance(space, GradedSpace) else GradedSpace(space)
        self.field = field
        diffs = {}
        for j, m in differentials.items():
            j = int(j)
            if m.rows != self.space.dim(j - 1) or m.cols != self.space.dim(j):
                raise ComplexError(
                    f"differential at degree {j} has shape {m.rows}x{m.cols}, "
                    f"expected {self.space.dim(j - 1)}x{self.space.dim(j)}"
                )
            if m.rows and m.cols:
                diffs[j] = m
        self.differentials = diffs

    def d(self, j):
        m = self.differentials.get(j)
        if m is None:
            return Matrix.zeros(self.space.dim(j - 1), self.space.dim(j), self.field)
        return m

    def validate(self):
        for j in sorted(self.differentials):
            upper = self.differentials.get(j + 1)
            if upper is None:
                continue
            if not (self.differentials[j] * upper).is_zero():
                raise ComplexError(f"d*d != 0 at degree {j + 1}")

    def __eq__(self, other):
        return (
            isinstance(other, ChainComplex)
            and self.space == other.space
            and self.field == other.field
            and all(self.d(j) == other.d(j) for j in set(self.space.dims) | {0})
            and self.differentials.keys() == other.differentials.keys()
            and all(self.differentials[j] == other.differentials[j] for j in self.differentials)
        )

    def euler_characteristic(self):
        return sum((-1) ** j * n for j, n in self.space.dims.items())


def validate_complex(cx: ChainComplex):
    cx.validate()


class ChainMap:
    """Degreewise maps A_j : X^1_j -> X^2_j commuting with the differentials."""

    def __init__(self, source, target, components):
        self.source = source
        self.target = target
        comps = {}
        for j, m in components.items():
            j = int(j)
            if m.rows != target.space.dim(j) or m.cols != source.space.dim(j):
                raise ComplexError(f"chain map component at degree {j} has wrong shape")
            if m.rows and m.cols:
                comps[j] = m
        self.components = comps

    def at(self, j):
        m = self.components.get(j)
        if m is None:
            return Matrix.zeros(self.target.space.dim(j), self.source.space.dim(j), self.source.field)
        return m

    def validate(self):
        degrees = set(self.source.space.dims) | set(self.target.space.dims)
        for j in sorted(degrees):
            lhs = self.target.d(j) * self.at(j)
            rhs = self.at(j - 1) * self.source.d(j)
            if lhs != rhs:
                raise ComplexError(f"chain map does not commute at degree {j}")


@dataclass
class GradedHomology:
    """Degreewise cycles, boundaries and representative columns."""

    by_degree: dict  # degree -> (cycles: Subspace, boundaries: Subspace, reps: Matrix)

    def dim(self, j):
        if j not in self.by_degree:
            return 0
        return self.by_degree[j][2].cols


def homology(cx: ChainComplex) -> GradedHomology:
    """Canonical homology data: representatives are the pivot-rule complement
    of the boundaries inside the cycles, one degree at a time."""
    out = {}
    for j in cx.space.degrees():
        cycles = cx.d(j).kernel_basis()
        boundaries = cx.d(j + 1).image_basis()
        reps = complement(boundaries, inside=cycles).basis
        out[j] = (cycles, boundaries, reps)
    return GradedHomology(out)


class Z2Complex:
    """A Z/2-graded complex d_plus : X+ -> X-, d_minus : X- -> X+."""

    def __init__(self, d_plus, d_minus, layout=None):
        if d_plus.field != d_minus.field:
            raise ComplexError("mixed scalar variants in a Z/2 complex")
        if d_plus.cols != d_minus.rows or d_plus.rows != d_minus.cols:
            raise ComplexError("d_plus and d_minus shapes do not match")
        self.d_plus = d_plus
        self.d_minus = d_minus
        self.dim_plus = d_plus.cols
        self.dim_minus = d_plus.rows
        self.field = d_plus.field
        # which Z-degrees were folded into each parity, in block order
        self.layout = layout or {
            "plus": [(0, self.dim_plus)],
            "minus": [(1, self.dim_minus)],
        }

    def validate(self):
        if not (self.d_minus * self.d_plus).is_zero():
            raise ComplexError("d_minus * d_plus != 0")
        if not (self.d_plus * self.d_minus).is_zero():
            raise ComplexError("d_plus * d_minus != 0")

    def __eq__(self, other):
        return (
            isinstance(other, Z2Complex)
            and self.d_plus == other.d_plus
            and self.d_minus == other.d_minus
        )


@dataclass
class HomologyData:
    """Cycles, boundaries and representative bases of H+/H- of a Z2Complex."""

    cycles_plus: Subspace
    boundaries_plus: Subspace
    reps_plus: Matrix
    cycles_minus: Subspace
    boundaries_minus: Subspace
    reps_minus: Matrix

    @property
    def dim_plus(self):
        return self.reps_plus.cols

    @property
    def dim_minus(self):
        return self.reps_minus.cols

    def swapped(self):
        return HomologyData(
            self.cycles_minus,
            self.boundaries_minus,
            self.reps_minus,
            self.cycles_plus,
            self.boundaries_plus,
            self.reps_plus,
        )

    def with_reps(self, reps_plus, reps_minus):
        return HomologyData(
            self.cycles_plus,
            self.boundaries_plus,
            reps_plus,
            self.cycles_minus,
            self.boundaries_minus,
            reps_minus,
        )


def homology_z2(cx: Z2Complex) -> HomologyData:
    zp = cx.d_plus.kernel_basis()
    bp = cx.d_minus.image_basis()
    zm = cx.d_minus.kernel_basis()
    bm = cx.d_plus.image_basis()
    return HomologyData(
        zp, bp, complement(bp, inside=zp).basis,
        zm, bm, complement(bm, inside=zm).basis,
    )


def index(cx: Z2Complex) -> int:
    h = homology_z2(cx)
    return h.dim_plus - h.dim_minus


def _parity_layout(space, parity):
    return [(j, space.dim(j)) for j in space.degrees() if j % 2 == parity and space.dim(j)]


def _offsets(layout):
    offs, total = {}, 0
    for j, n in layout:
        offs[j] = total
        total += n
    return offs, total


def fold_z2(cx: ChainComplex) -> Z2Complex:
    """Fold a Z-graded complex: X+ = sum of even chains, X- = odd chains,
    blocks in ascending degree order."""
    plus = _parity_layout(cx.space, 0)
    minus = _parity_layout(cx.space, 1)
    poffs, ptot = _offsets(plus)
    moffs, mtot = _offsets(minus)
    z = Matrix.zeros(1, 1, cx.field).data[0][0]
    dp = [[z] * ptot for _ in range(mtot)]
    dm = [[z] * mtot for _ in range(ptot)]
    for j, m in cx.differentials.items():
        if j % 2 == 0:
            if j in poffs and (j - 1) in moffs:
                r0, c0 = moffs[j - 1], poffs[j]
                for r in range(m.rows):
                    for c in range(m.cols):
                        dp[r0 + r][c0 + c] = m.data[r][c]
        else:
            if j in moffs and (j - 1) in poffs:
                r0, c0 = poffs[j - 1], moffs[j]
                for r in range(m.rows):
                    for c in range(m.cols):
                        dm[r0 + r][c0 + c] = m.data[r][c]
    return Z2Complex(
        Matrix(dp, cx.field, cols=ptot),
        Matrix(dm, cx.field, cols=mtot),
        layout={"plus": plus, "minus": minus},
    )


def fold_chain_map(a: ChainMap):
    """Fold a chain map to its (plus, minus) block-diagonal pieces."""
    out = []
    for parity in (0, 1):
        src = _parity_layout(a.source.space, parity)
        tgt = _parity_layout(a.target.space, parity)
        soffs, stot = _offsets(src)
        toffs, ttot = _offsets(tgt)
        z = Matrix.zeros(1, 1, a.source.field).data[0][0]
        grid = [[z] * stot for _ in range(ttot)]
        for j, n in src:
            if j not in toffs:
                continue
            m = a.at(j)
            r0, c0 = toffs[j], soffs[j]
            for r in range(m.rows):
                for c in range(m.cols):
                    grid[r0 + r][c0 + c] = m.data[r][c]
        out.append(Matrix(grid, a.source.field, cols=stot))
    return out[0], out[1]


def shift(cx: ChainComplex) -> ChainComplex:
    """The shifted complex: chains X_{j-1} in degree j, differential -d_{j-1}."""
    dims = {j + 1: n for j, n in cx.space.dims.items()}
    diffs = {j + 1: -m for j, m in cx.differentials.items()}
    return ChainComplex(GradedSpace(dims), diffs, cx.field)


def mapping_cone(a: ChainMap):
    """The cone with chains X^2_j + X^1_{j-1} and the standard block
    differential [[d2, A], [0, -d1]]; returns (cone, inclusion, projection)."""
    a.validate()
    d1, d2 = a.source, a.target
    dims = {}
    degrees = set(d2.space.dims) | {j + 1 for j in d1.space.dims}
    for j in degrees:
        dims[j] = d2.space.dim(j) + d1.space.dim(j - 1)
    diffs = {}
    for j in sorted(dims):
        if dims.get(j, 0) == 0 or dims.get(j - 1, 0) == 0:
            continue
        blocks = [
            [d2.d(j), a.at(j - 1)],
            [Matrix.zeros(d1.space.dim(j - 2), d2.space.dim(j), d1.field), -d1.d(j - 1)],
        ]
        diffs[j] = Matrix.block(blocks, d1.field)
    cone = ChainComplex(GradedSpace(dims), diffs, d1.field)
    incl = {}
    proj = {}
    for j in sorted(dims):
        n2 = d2.space.dim(j)
        n1 = d1.space.dim(j - 1)
        if n2:
            incl[j] = Matrix.identity(n2 + n1, d1.field).take_cols(range(n2))
        if n1:
            proj[j] = Matrix.identity(n2 + n1, d1.field).take_rows(range(n2, n2 + n1))
    i = ChainMap(d2, cone, incl)
    p = ChainMap(cone, shift(d1), proj)
    return cone, i, p


def induced_map(f: Matrix, src: tuple, tgt: tuple) -> Matrix:
    """Matrix of the map induced on homology by ``f``, relative to the given
    representative bases.  ``src``/``tgt`` are (reps, boundaries) pairs."""
    src_reps, _ = src
    tgt_reps, tgt_bnd = tgt
    carrier = tgt_reps.hstack(tgt_bnd.basis)
    coords = carrier.solve(f * src_reps)
    if coords is None:
        raise ComplexError("map does not send cycles into cycles")
    return coords.take_rows(range(tgt_reps.cols))


class SixTermSequence:
    """The exact hexagon of even/odd homology attached to a cone triangle.

    Maps cycle as  V1+ --a+--> V2+ --i+--> V+ --p+--> V1- --a---> V2-
    --i---> V- --p---> V1+.  Exactness at every node is checked on demand.
    """

    def __init__(self, a_plus, i_plus, p_plus, a_minus, i_minus, p_minus):
        self.a_plus = a_plus
        self.i_plus = i_plus
        self.p_plus = p_plus
        self.a_minus = a_minus
        self.i_minus = i_minus
        self.p_minus = p_minus
        self.field = a_plus.field
        shapes = [
            (a_plus.cols, p_minus.rows),
            (i_plus.cols, a_plus.rows),
            (p_plus.cols, i_plus.rows),
            (a_minus.cols, p_plus.rows),
            (i_minus.cols, a_minus.rows),
            (p_minus.cols, i_minus.rows),
        ]
        if any(x != y for x, y in shapes):
            raise ComplexError("hexagon maps do not chain up")

    @property
    def dims(self):
        return (
            self.a_plus.cols, self.a_plus.rows, self.i_plus.rows,
            self.a_minus.cols, self.a_minus.rows, self.i_minus.rows,
        )

    def nodes(self):
        """The six (incoming, outgoing) pairs in cyclic order starting V1+."""
        return [
            (self.p_minus, self.a_plus),
            (self.a_plus, self.i_plus),
            (self.i_plus, self.p_plus),
            (self.p_plus, self.a_minus),
            (self.a_minus, self.i_minus),
            (self.i_minus, self.p_minus),
        ]

    def validate_exactness(self):
        names = ["V1+", "V2+", "V+", "V1-", "V2-", "V-"]
        for name, (inc, out) in zip(names, self.nodes()):
            if inc.image_basis() != out.kernel_basis():
                raise ComplexError(f"hexagon fails exactness at node {name}")


def six_term(a: ChainMap, cone=None, i=None, p=None, h1=None, h2=None, hc=None):
    """Build the homology hexagon of the cone triangle of ``a``.

    Homology data may be passed in (relative to the folded complexes); by
    default the canonical data is computed here.  Exactness is validated.
    """
    if cone is None:
        cone, i, p = mapping_cone(a)
    f1, f2, fc = fold_z2(a.source), fold_z2(a.target), fold_z2(cone)
    h1 = h1 or homology_z2(f1)
    h2 = h2 or homology_z2(f2)
    hc = hc or homology_z2(fc)
    ap, am = fold_chain_map(a)
    ip, im = fold_chain_map(i)
    # p lands in the shifted complex: plus side of T D^1 is the minus side of
    # D^1 with identical canonical cycles/boundaries, so target data swaps
    pp, pm = fold_chain_map(p)
    s1p = (h1.reps_plus, h1.boundaries_plus)
    s1m = (h1.reps_minus, h1.boundaries_minus)
    s2p = (h2.reps_plus, h2.boundaries_plus)
    s2m = (h2.reps_minus, h2.boundaries_minus)
    scp = (hc.reps_plus, hc.boundaries_plus)
    scm = (hc.reps_minus, hc.boundaries_minus)
    seq = SixTermSequence(
        induced_map(ap, s1p, s2p),
        induced_map(ip, s2p, scp),
        induced_map(pp, scp, s1m),
        induced_map(am, s1m, s2m),
        induced_map(im, s2m, scm),
        induced_map(pm, scm, s1p),
    )
    seq.validate_exactness()
    return seq


def direct_sum_z2(a: Z2Complex, b: Z2Complex) -> Z2Complex:
    f = a.field
    dp = Matrix.block(
        [[a.d_plus, Matrix.zeros(a.dim_minus, b.dim_plus, f)],
         [Matrix.zeros(b.dim_minus, a.dim_plus, f), b.d_plus]], f)
    dm = Matrix.block(
        [[a.d_minus, Matrix.zeros(a.dim_plus, b.dim_minus, f)],
         [Matrix.zeros(b.dim_plus, a.dim_minus, f), b.d_minus]], f)
    return Z2Complex(dp, dm)


def _pad_cols(m: Matrix, extra_rows: int) -> Matrix:
    if extra_rows == 0:
        return m
    return m.vstack(Matrix.zeros(extra_rows, m.cols, m.field))


def stabilize(cx: Z2Complex, n_plus: int, n_minus: int, hdata: HomologyData = None):
    """Direct sum with the trivial complex (F^{n+} + F^{n-}, 0).

    Returns the stabilized complex, its homology data (old representatives
    padded with zeros, then the standard basis of the new block) and the
    embedding scalar, which is 1 by this ordering convention.
    """
    f = cx.field
    triv = Z2Complex(Matrix.zeros(n_minus, n_plus, f), Matrix.zeros(n_plus, n_minus, f))
    big = direct_sum_z2(cx, triv)
    hdata = hdata or homology_z2(cx)
    std_p = Matrix.identity(big.dim_plus, f).take_cols(range(cx.dim_plus, big.dim_plus))
    std_m = Matrix.identity(big.dim_minus, f).take_cols(range(cx.dim_minus, big.dim_minus))
    reps_p = _pad_cols(hdata.reps_plus, n_plus).hstack(std_p)
    reps_m = _pad_cols(hdata.reps_minus, n_minus).hstack(std_m)
    hbig = homology_z2(big).with_reps(reps_p, reps_m)
    return big, hbig


@dataclass
class PseudoInverseComplex:
    """Pseudo-inverses of both differentials with vanishing compositions."""

    d_plus_dagger: Matrix
    d_minus_dagger: Matrix

    def verify(self, cx: Z2Complex):
        dp, dm = cx.d_plus, cx.d_minus
        tp, tm = self.d_plus_dagger, self.d_minus_dagger
        checks = [
            (dp * tp * dp == dp, "d+ d+' d+ = d+"),
            (dm * tm * dm == dm, "d- d-' d- = d-"),
            (tp * dp * tp == tp, "d+' d+ d+' = d+'"),
            (tm * dm * tm == tm, "d-' d- d-' = d-'"),
            ((tp * tm).is_zero(), "d+' d-' = 0"),
            ((tm * tp).is_zero(), "d-' d+' = 0"),
        ]
        for ok, label in checks:
            if not ok:
                raise ComplexError(f"pseudo-inverse complex violates {label}")


def _shifted_complement(base: Subspace, inside_basis: Matrix, rng=None):
    """A complement equal to ``base`` shifted by a random graph map into
    ``inside_basis``; with rng=None the canonical complement is returned."""
    if rng is None or base.dim == 0 or inside_basis.cols == 0:
        return base.basis
    shift_coeffs = Matrix(
        [[rng.randint(-2, 2) for _ in range(base.dim)] for _ in range(inside_basis.cols)],
        base.field,
    )
    return base.basis + inside_basis * shift_coeffs


def complex_pseudo_inverse(cx: Z2Complex, rng=None) -> PseudoInverseComplex:
    """Adapted-decomposition pseudo-inverse of a Z/2 complex.

    Decomposes X+ = Im(d-) + H+ + C+ with Ker(d+) = Im(d-) + H+ (same on the
    minus side), inverts each differential from its image back onto the
    C-block and kills the complementary blocks.  The vanishing compositions
    d+' d-' = 0 = d-' d+' hold by construction.  Passing an ``rng`` shifts
    every chosen complement by a random graph map, staying inside the space
    of admissible pseudo-inverses.
    """
    dp, dm = cx.d_plus, cx.d_minus
    zp = dp.kernel_basis()
    bp = dm.image_basis()
    hp = complement(bp, inside=zp)
    cp = complement(zp)
    zm = dm.kernel_basis()
    bm = dp.image_basis()
    hm = complement(bm, inside=zm)
    cm = complement(zm)
    hp_b = _shifted_complement(hp, bp.basis, rng)
    cp_b = _shifted_complement(cp, zp.basis, rng)
    hm_b = _shifted_complement(hm, bm.basis, rng)
    cm_b = _shifted_complement(cm, zm.basis, rng)

    def dagger(d, c_src, b_tgt, h_tgt, c_tgt, dim_src):
        img = d * c_src
        x = img.solve(b_tgt.basis) if b_tgt.dim else Matrix.zeros(c_src.cols, 0, d.field)
        if x is None:
            raise ComplexError("pseudo-inverse internal failure")
        left = c_src * x
        left = left.hstack(Matrix.zeros(dim_src, h_tgt.cols + c_tgt.cols, d.field))
        frame = b_tgt.basis.hstack(h_tgt).hstack(c_tgt)
        return left * frame.inverse()

    dpd = dagger(dp, cp_b, bm, hm_b, cm_b, cx.dim_plus)
    dmd = dagger(dm, cm_b, bp, hp_b, cp_b, cx.dim_minus)
    return PseudoInverseComplex(dpd, dmd)

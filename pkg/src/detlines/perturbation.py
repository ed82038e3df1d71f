"""Perturbation isomorphisms for operators and Z/2-graded complexes.

Two Fredholm operators with finite-rank difference carry a canonical scalar
between their kernel/cokernel determinant lines.  The scalar is produced by
an auxiliary triple (L, M, N) making

    Sigma = (A + L P_A)(B' + M Q_B) + N Q_B        (index <= 0)
    Sigma = (B' + M Q_B)(A + L P_A) + N P_A        (index >= 0)

invertible of determinant class, combined with the displayed wedge formulas.
The result is independent of the pseudo-inverses and of the triple; the
verification campaigns exercise exactly that freedom.  Complexes reduce to
the operator case through sigma+ = d+ + d-' and the canonical identification
of homology with Ker/Coker of sigma+.

The module also carries the explicit stabilized-instance formula (an
independent oracle that never touches Sigma) used to cross-check the general
algorithm.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexes import (
    HomologyData,
    Z2Complex,
    complex_pseudo_inverse,
    homology_z2,
    induced_map,
    stabilize,
)
from .linalg import LinalgError, Matrix, Subspace, complement
from .lines import Line, LineIso

__all__ = [
    "PerturbationTriple",
    "PerturbationError",
    "build_perturbation_triple",
    "operator_perturbation_scalar",
    "complex_perturbation_scalar",
    "SpecialInstance",
    "special_perturbation_scalar",
    "line_of",
]


class PerturbationError(ValueError):
    pass


def line_of(label: str, h: HomologyData) -> Line:
    return Line(label, h.dim_plus, h.dim_minus)


def _quotient_coords(reps: Matrix, modulo: Subspace) -> Matrix:
    """Row map sending a vector to its coordinates in the classes of ``reps``
    modulo the given subspace; errors out on vectors outside the span."""
    carrier = reps.hstack(modulo.basis)
    return carrier, reps.cols


def _coords_mod(carrier_pair, vectors: Matrix) -> Matrix:
    carrier, keep = carrier_pair
    sol = carrier.solve(vectors)
    if sol is None:
        raise PerturbationError("vectors left the span of representatives")
    return sol.take_rows(range(keep))


def _rand_full_rank(rng, rows, cols, field, attempts=32):
    for _ in range(attempts):
        m = Matrix([[rng.randint(-2, 2) for _ in range(cols)] for _ in range(rows)], field)
        if m.rank() == min(rows, cols):
            return m
    raise PerturbationError("failed to sample a full-rank matrix")


@dataclass
class PerturbationTriple:
    """The auxiliary maps with explicit bases for every implicit choice.

    The maps are stored by their values on explicit basis columns: L on
    ``ker_a``, M on ``ker_bd``, N on ``active`` (its extension-by-zero
    complement is ``passive``, which is exactly Ker(N)).
    """

    branch: str  # "minus" (index <= 0) or "plus" (index >= 0)
    ker_a: Matrix
    l_vals: Matrix
    ker_bd: Matrix
    m_vals: Matrix
    active: Matrix
    n_vals: Matrix
    passive: Matrix

    def validate(self, a, b_dagger):
        im_a = a.image_basis()
        im_bd = b_dagger.image_basis()
        qa = _quotient_coords(complement(im_a).basis, im_a)
        qbd = _quotient_coords(complement(im_bd).basis, im_bd)
        l_classes = _coords_mod(qa, self.l_vals)
        m_classes = _coords_mod(qbd, self.m_vals)
        if self.branch == "minus":
            if l_classes.rank() != self.ker_a.cols:
                raise PerturbationError("L fails to be injective into Coker(A)")
            if m_classes.rank() != m_classes.rows:
                raise PerturbationError("M fails to be surjective onto Coker(B')")
            big = im_a.sum(self.l_vals.image_basis())
            qn = _quotient_coords(complement(big).basis, big)
            n_classes = _coords_mod(qn, self.n_vals)
            if n_classes.rows != n_classes.cols or not n_classes.det():
                raise PerturbationError("N fails to hit W/(Im A + Im L) bijectively")
        else:
            if l_classes.rank() != l_classes.rows:
                raise PerturbationError("L fails to be surjective onto Coker(A)")
            if m_classes.rank() != self.ker_bd.cols:
                raise PerturbationError("M fails to be injective into Coker(B')")
            big = im_bd.sum(self.m_vals.image_basis())
            qn = _quotient_coords(complement(big).basis, big)
            n_classes = _coords_mod(qn, self.n_vals)
            if n_classes.rows != n_classes.cols or not n_classes.det():
                raise PerturbationError("N fails to hit V/(Im M + Im B') bijectively")
        split = self.active.hstack(self.passive)
        if split.rank() != split.cols:
            raise PerturbationError("active/passive split is degenerate")


def build_perturbation_triple(a: Matrix, b: Matrix, a_dagger: Matrix, b_dagger: Matrix, rng=None) -> PerturbationTriple:
    """A deterministic (or seeded-random) perturbation triple for A -> B.

    The canonical rule maps leading kernel basis vectors to leading canonical
    cokernel complement vectors and routes the residual bases bijectively.
    With ``rng`` the same shapes are filled with random admissible choices,
    including noise inside the images, staying within the freedom the
    independence theorem quantifies over.
    """
    field = a.field
    ker_a = a.kernel_basis().basis
    im_a = a.image_basis()
    cok_a = complement(im_a).basis
    ker_bd = b_dagger.kernel_basis().basis
    im_bd = b_dagger.image_basis()
    cok_bd = complement(im_bd).basis
    ind = ker_a.cols - cok_a.cols
    k, c = ker_a.cols, cok_a.cols
    kb, cb = cok_bd.cols, ker_bd.cols  # dim Ker(B), dim Coker(B)

    if ind <= 0:
        branch = "minus"
        if rng is None:
            l_vals = cok_a.take_cols(range(k))
            m_vals = cok_bd.hstack(Matrix.zeros(a.cols, cb - kb, field))
            active = ker_bd.take_cols(range(kb, cb))
            passive = ker_bd.take_cols(range(kb))
        else:
            mix_l = _rand_full_rank(rng, c, k, field)
            l_vals = cok_a * mix_l + a * Matrix(
                [[rng.randint(-1, 1) for _ in range(k)] for _ in range(a.cols)], field
            )
            u = _rand_unimodular(rng, cb, field)
            kbasis = ker_bd * u
            mix_m = _rand_full_rank(rng, kb, kb, field)
            m_vals = (cok_bd * mix_m).hstack(Matrix.zeros(a.cols, cb - kb, field))
            m_vals = m_vals + b_dagger * Matrix(
                [[rng.randint(-1, 1) for _ in range(cb)] for _ in range(b_dagger.cols)], field
            )
            active = kbasis.take_cols(range(kb, cb))
            passive = kbasis.take_cols(range(kb))
            ker_bd = kbasis
        big = im_a.sum(l_vals.image_basis())
        cn = complement(big).basis
        if rng is None:
            n_vals = cn
        else:
            n_vals = cn * _rand_full_rank(rng, cn.cols, cn.cols, field) + big.basis * Matrix(
                [[rng.randint(-1, 1) for _ in range(cn.cols)] for _ in range(big.dim)], field
            )
        return PerturbationTriple(branch, ker_a, l_vals, ker_bd, m_vals, active, n_vals, passive)

    branch = "plus"
    if rng is None:
        l_vals = cok_a.hstack(Matrix.zeros(a.rows, k - c, field))
        active = ker_a.take_cols(range(c, k))
        passive = ker_a.take_cols(range(c))
        m_vals = cok_bd.take_cols(range(cb))
    else:
        u = _rand_unimodular(rng, k, field)
        kbasis = ker_a * u
        mix_l = _rand_full_rank(rng, c, c, field)
        l_vals = (cok_a * mix_l).hstack(Matrix.zeros(a.rows, k - c, field))
        l_vals = l_vals + a * Matrix(
            [[rng.randint(-1, 1) for _ in range(k)] for _ in range(a.cols)], field
        )
        active = kbasis.take_cols(range(c, k))
        passive = kbasis.take_cols(range(c))
        ker_a = kbasis
        mix_m = _rand_full_rank(rng, kb, cb, field)
        m_vals = cok_bd * mix_m + b_dagger * Matrix(
            [[rng.randint(-1, 1) for _ in range(cb)] for _ in range(b_dagger.cols)], field
        )
    big = im_bd.sum(m_vals.image_basis())
    cn = complement(big).basis
    if rng is None:
        n_vals = cn
    else:
        n_vals = cn * _rand_full_rank(rng, cn.cols, cn.cols, field) + big.basis * Matrix(
            [[rng.randint(-1, 1) for _ in range(cn.cols)] for _ in range(big.dim)], field
        )
    return PerturbationTriple(branch, ker_a, l_vals, ker_bd, m_vals, active, n_vals, passive)


def _rand_unimodular(rng, n, field):
    m = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            if i < j:
                m[i][j] = rng.randint(-1, 1)
    return Matrix(m, field)


def _values_on(vals: Matrix, basis: Matrix, vectors: Matrix) -> Matrix:
    """Apply the map given by ``vals`` on ``basis`` columns to ``vectors``."""
    coords = basis.solve(vectors)
    if coords is None:
        raise PerturbationError("vector outside the domain basis of a triple map")
    return vals * coords


def operator_perturbation_scalar(
    a: Matrix,
    b: Matrix,
    a_dagger: Matrix,
    b_dagger: Matrix,
    ker_a_basis: Matrix,
    coker_a_reps: Matrix,
    ker_b_basis: Matrix,
    coker_b_reps: Matrix,
    triple: PerturbationTriple = None,
    rng=None,
):
    """The perturbation scalar from A to B relative to the given bases.

    ``coker`` bases are representative columns in the codomain, independent
    modulo the image.  The index-sign dispatch follows the sign of
    dim Ker - dim Coker, with index zero routed to the plus branch.
    """
    field = a.field
    n_dom = Matrix.identity(a.cols, field)
    n_cod = Matrix.identity(a.rows, field)
    p_a = n_dom - a_dagger * a
    p_b = n_dom - b_dagger * b
    q_b = n_cod - b * b_dagger
    if triple is None:
        triple = build_perturbation_triple(a, b, a_dagger, b_dagger, rng=rng)
        triple.validate(a, b_dagger)
    ind = ker_a_basis.cols - coker_a_reps.cols

    im_a = a.image_basis()
    qa = _quotient_coords(coker_a_reps, im_a)
    im_b = b.image_basis()
    qb = _quotient_coords(coker_b_reps, im_b)

    l_on = lambda v: _values_on(triple.l_vals, triple.ker_a, v)
    m_on = lambda v: _values_on(triple.m_vals, triple.ker_bd, v)
    n_full_basis = triple.active.hstack(triple.passive)
    n_full_vals = triple.n_vals.hstack(
        Matrix.zeros(triple.n_vals.rows, triple.passive.cols, field)
    )
    n_on = lambda v: _values_on(n_full_vals, n_full_basis, v)

    if triple.branch == "minus":
        lp = _values_on(triple.l_vals, triple.ker_a, p_a)
        mq = _values_on(triple.m_vals, triple.ker_bd, q_b)
        nq = _values_on(n_full_vals, n_full_basis, q_b)
        sigma = (a + lp) * (b_dagger + mq) + nq
        det_sigma = sigma.det_class_det()
        c1 = _coords_mod(qa, l_on(ker_a_basis).hstack(n_on(triple.active))).det()
        c2 = ker_b_basis.solve(p_b * m_on(triple.passive))
        if c2 is None:
            raise PerturbationError("M t0 failed to project onto Ker(B)")
        c2 = c2.det()
        c3 = _coords_mod(qb, triple.passive.hstack(triple.active)).det()
        scalar = c1 * c2 * _sinv(c3 * det_sigma)
    else:
        lp = _values_on(triple.l_vals, triple.ker_a, p_a)
        mq = _values_on(triple.m_vals, triple.ker_bd, q_b)
        np_ = _values_on(n_full_vals, n_full_basis, p_a)
        sigma = (b_dagger + mq) * (a + lp) + np_
        det_sigma = sigma.det_class_det()
        c0 = ker_a_basis.solve(triple.active.hstack(triple.passive))
        if c0 is None:
            raise PerturbationError("triple kernel split left the given Ker(A) basis")
        c0 = c0.det()
        c1 = _coords_mod(qa, l_on(triple.passive)).det()
        c2 = ker_b_basis.solve(p_b * (n_on(triple.active).hstack(m_on(triple.ker_bd))))
        if c2 is None:
            raise PerturbationError("N s0 ^ M t failed to project onto Ker(B)")
        c2 = c2.det()
        c3 = _coords_mod(qb, triple.ker_bd).det()
        scalar = c1 * c2 * _sinv(c0 * c3 * det_sigma)
    if not scalar:
        raise PerturbationError("perturbation scalar degenerated to zero")
    return scalar


def _sinv(x):
    if not x:
        raise PerturbationError("degenerate wedge coefficient in perturbation formula")
    return x.inverse() if hasattr(x, "inverse") else 1 / x


def complex_perturbation_scalar(
    d: Z2Complex,
    delta: Z2Complex,
    h_d: HomologyData = None,
    h_delta: HomologyData = None,
    pinv_d=None,
    pinv_delta=None,
    rng=None,
    triple_rng=None,
    labels=("det(D)", "det(Delta)"),
) -> LineIso:
    """The perturbation isomorphism of d -> delta on shared chains.

    Builds (or accepts) pseudo-inverse complexes, forms sigma+ and tau+, and
    dispatches to the operator scalar after rewriting the homology bases
    through the quotient idempotents P+ = 1 - sigma- sigma+ and
    Q+ = 1 - tau- tau+.
    """
    if d.dim_plus != delta.dim_plus or d.dim_minus != delta.dim_minus:
        raise PerturbationError("complexes do not share their chains")
    field = d.field
    h_d = h_d or homology_z2(d)
    h_delta = h_delta or homology_z2(delta)
    pinv_d = pinv_d or complex_pseudo_inverse(d, rng=rng)
    pinv_delta = pinv_delta or complex_pseudo_inverse(delta, rng=rng)
    sigma_p = d.d_plus + pinv_d.d_minus_dagger
    sigma_m = d.d_minus + pinv_d.d_plus_dagger
    tau_p = delta.d_plus + pinv_delta.d_minus_dagger
    tau_m = delta.d_minus + pinv_delta.d_plus_dagger
    eye_p = Matrix.identity(d.dim_plus, field)
    p_plus = eye_p - sigma_m * sigma_p
    q_plus = eye_p - tau_m * tau_p
    ker_a = p_plus * h_d.reps_plus
    ker_b = q_plus * h_delta.reps_plus
    scalar = operator_perturbation_scalar(
        sigma_p,
        tau_p,
        sigma_m,
        tau_m,
        ker_a,
        h_d.reps_minus,
        ker_b,
        h_delta.reps_minus,
        rng=triple_rng,
    )
    return LineIso(line_of(labels[0], h_d), line_of(labels[1], h_delta), scalar)


# ---------------------------------------------------------------------------
# the stabilized special case (independent oracle)


@dataclass
class SpecialInstance:
    """Data of a stabilized perturbation with a closed-form scalar.

    ``base`` is a Z/2 complex D; the direct sum with the trivial complex
    (F^{n+} + F^{n-}, 0) is perturbed by the block maps F+/F-/N+ subject to
    d+ F- = 0, d- F+ = 0, F- N+ = 0 and F+(Ker N+) = Im F+.  The subspace
    data and the pair of isomorphisms (L, M) satisfy the four hypotheses
    below, and the perturbation scalar is then det(L) * det(M) without any
    Sigma computation.
    """

    base: Z2Complex
    n_plus: int
    n_minus: int
    f_minus: Matrix  # F^{n-} -> X+
    f_plus: Matrix  # F^{n+} -> X-
    n_map: Matrix  # N+ : F^{n+} -> F^{n-}
    v_plus: Matrix  # columns in F^{n+}
    z_plus: Matrix
    v_minus: Matrix  # columns in F^{n-}
    q_plus: Matrix  # columns in X+
    q_minus: Matrix  # columns in X-
    l_map: Matrix  # H+(D+C) -> H-(D+C) in the stabilized bases
    m_map: Matrix  # H-(perturbed) -> H+(perturbed)


def special_stabilized_pair(inst: SpecialInstance):
    """The (stabilized, perturbed) complexes of a special instance, plus the
    stabilized homology data that fixes the determinant-line bases."""
    d = inst.base
    f = d.field
    stab, h_stab = stabilize(d, inst.n_plus, inst.n_minus)
    dp_hat = Matrix.block(
        [[d.d_plus, inst.f_plus], [Matrix.zeros(inst.n_minus, d.dim_plus, f), inst.n_map]], f
    )
    dm_hat = Matrix.block(
        [[d.d_minus, inst.f_minus], [Matrix.zeros(inst.n_plus, d.dim_minus, f), Matrix.zeros(inst.n_plus, inst.n_minus, f)]],
        f,
    )
    hat = Z2Complex(dp_hat, dm_hat)
    hat.validate()
    return stab, h_stab, hat


def _projection_onto(image: Matrix, killed: Subspace, ambient: int, field: str) -> Matrix:
    """The idempotent with the given image whose kernel contains ``killed``,
    completed canonically."""
    img_space = Subspace.from_span(image)
    rest = complement(Subspace.from_span(image.hstack(killed.basis)))
    frame = image.hstack(killed.basis).hstack(rest.basis)
    if frame.cols != ambient:
        raise PerturbationError("projection frame does not span")
    left = image.hstack(Matrix.zeros(ambient, killed.dim + rest.dim, field))
    if img_space.dim != image.cols:
        raise PerturbationError("projection image columns are dependent")
    return left * frame.inverse()


def special_perturbation_scalar(inst: SpecialInstance) -> LineIso:
    """Closed-form perturbation scalar of a conforming stabilized instance.

    Every hypothesis is re-verified here; a violation raises with the name
    of the failing condition.  No Sigma determinant is computed: the scalar
    is det(L) * det(M) relative to the stabilized homology bases.
    """
    d = inst.base
    f = d.field
    stab, h_stab, hat = special_stabilized_pair(inst)

    if not (d.d_plus * inst.f_minus).is_zero():
        raise PerturbationError("structure: d+ F- != 0")
    if not (d.d_minus * inst.f_plus).is_zero():
        raise PerturbationError("structure: d- F+ != 0")
    if not (inst.f_minus * inst.n_map).is_zero():
        raise PerturbationError("structure: F- N+ != 0")
    ker_n = inst.n_map.kernel_basis()
    if (inst.f_plus * ker_n.basis).image_basis() != inst.f_plus.image_basis():
        raise PerturbationError("structure: F+(Ker N+) != Im F+")

    im_dp = d.d_plus.image_basis()
    im_dm = d.d_minus.image_basis()
    qp_mod = im_dm.quotient_map() * inst.f_minus  # F- classes mod Im d-
    w_minus = qp_mod.kernel_basis()
    wp_rows = im_dp.quotient_map() * inst.f_plus
    w_plus = wp_rows.vstack(inst.n_map).kernel_basis()

    def _direct_sum_check(parts, total_dim, label):
        joined = parts[0]
        for p in parts[1:]:
            joined = joined.hstack(p)
        if joined.cols != total_dim or joined.rank() != total_dim:
            raise PerturbationError(f"hypothesis 1: {label} fails to split")

    vp = Subspace.from_span(inst.v_plus)
    if not ker_n.contains(vp) or not ker_n.contains(w_plus):
        raise PerturbationError("hypothesis 1: V+ or W+ leaves Ker N+")
    if vp.dim + w_plus.dim != ker_n.dim or vp.sum(w_plus) != ker_n:
        raise PerturbationError("hypothesis 1: Ker N+ != V+ (+) W+")
    zp = Subspace.from_span(inst.z_plus)
    if not inst.f_plus.kernel_basis().contains(zp):
        raise PerturbationError("hypothesis 1: Z+ leaves Ker F+")
    _direct_sum_check([inst.v_plus, w_plus.basis, inst.z_plus], inst.n_plus, "F^{n+}")
    _direct_sum_check([inst.v_minus, w_minus.basis], inst.n_minus, "F^{n-}")

    ker_dp = d.d_plus.kernel_basis()
    ker_dm = d.d_minus.kernel_basis()
    big_p = im_dm.sum(inst.f_minus.image_basis())
    big_m = im_dp.sum(inst.f_plus.image_basis())
    qp_sub = Subspace.from_span(inst.q_plus)
    qm_sub = Subspace.from_span(inst.q_minus)
    if not ker_dp.contains(qp_sub) or not ker_dm.contains(qm_sub):
        raise PerturbationError("hypothesis 2: Q+- leaves the cycles")
    if (
        qp_sub.dim + big_p.dim != ker_dp.dim
        or qp_sub.sum(big_p) != ker_dp
        or (big_p.quotient_map() * inst.q_plus).rank() != qp_sub.dim
    ):
        raise PerturbationError("hypothesis 2: Q+ is not a complement")
    if (
        qm_sub.dim + big_m.dim != ker_dm.dim
        or qm_sub.sum(big_m) != ker_dm
        or (big_m.quotient_map() * inst.q_minus).rank() != qm_sub.dim
    ):
        raise PerturbationError("hypothesis 2: Q- is not a complement")

    # condition 3: L[F- v-, v+ + z+] = [F+ v+, v- + N+ z+]
    plus_coords = _stab_class_coords(h_stab, parity="plus")
    minus_coords = _stab_class_coords(h_stab, parity="minus")
    lhs = inst.l_map * plus_coords(inst.f_minus * inst.v_minus, Matrix.zeros(inst.n_plus, inst.v_minus.cols, f))
    rhs = minus_coords(Matrix.zeros(d.dim_minus, inst.v_minus.cols, f), _eye_cols(inst.v_minus, inst.n_minus, f))
    if lhs != rhs:
        raise PerturbationError("hypothesis 3: fails on V-")
    lhs = inst.l_map * plus_coords(Matrix.zeros(d.dim_plus, inst.v_plus.cols, f), inst.v_plus)
    rhs = minus_coords(inst.f_plus * inst.v_plus, Matrix.zeros(inst.n_minus, inst.v_plus.cols, f))
    if lhs != rhs:
        raise PerturbationError("hypothesis 3: fails on V+")
    lhs = inst.l_map * plus_coords(Matrix.zeros(d.dim_plus, inst.z_plus.cols, f), inst.z_plus)
    rhs = minus_coords(Matrix.zeros(d.dim_minus, inst.z_plus.cols, f), inst.n_map * inst.z_plus)
    if lhs != rhs:
        raise PerturbationError("hypothesis 3: fails on Z+")

    # condition 4: phi+ o M = L^{-1} o phi-
    e_plus = _projection_onto(inst.q_plus, big_p, d.dim_plus, f)
    e_minus = _projection_onto(inst.q_minus, big_m, d.dim_minus, f)
    omega = _omega_idempotent(inst, w_minus, f)
    phi_plus = Matrix.block(
        [[e_plus, None], [None, Matrix.identity(inst.n_plus, f)]], f
    )
    phi_minus = Matrix.block(
        [[e_minus, None], [None, Matrix.identity(inst.n_minus, f) - omega]], f
    )
    h_hat = homology_z2(hat)
    from .complexes import induced_map

    phip_h = induced_map(
        phi_plus,
        (h_hat.reps_plus, h_hat.boundaries_plus),
        (h_stab.reps_plus, h_stab.boundaries_plus),
    )
    phim_h = induced_map(
        phi_minus,
        (h_hat.reps_minus, h_hat.boundaries_minus),
        (h_stab.reps_minus, h_stab.boundaries_minus),
    )
    lhs = inst.l_map * phip_h * inst.m_map
    if lhs != phim_h:
        raise PerturbationError("hypothesis 4: the comparison square does not commute")

    det_l = inst.l_map.det()
    det_m = inst.m_map.det()
    if not det_l or not det_m:
        raise PerturbationError("L or M fails to be an isomorphism")
    return LineIso(
        line_of("det(D+C)", h_stab), line_of("det(perturbed)", h_hat), det_l * det_m
    )


def _eye_cols(cols_of: Matrix, n: int, field: str) -> Matrix:
    return cols_of


def _stab_class_coords(h_stab: HomologyData, parity: str):
    """Coordinates of classes [(x, lam)] in the stabilized homology basis."""
    if parity == "plus":
        reps, bnd = h_stab.reps_plus, h_stab.boundaries_plus
    else:
        reps, bnd = h_stab.reps_minus, h_stab.boundaries_minus
    carrier = reps.hstack(bnd.basis)

    def coords(x: Matrix, lam: Matrix) -> Matrix:
        vecs = x.vstack(lam)
        sol = carrier.solve(vecs)
        if sol is None:
            raise PerturbationError("class fell outside the cycle span")
        return sol.take_rows(range(reps.cols))

    return coords


def _omega_idempotent(inst: SpecialInstance, w_minus: Subspace, field: str) -> Matrix:
    """Idempotent on F^{n-} with image Im(N+), vanishing on V- and on the
    canonical complement of Im(N+) inside W-."""
    im_n = inst.n_map.image_basis()
    if im_n.dim == 0:
        return Matrix.zeros(inst.n_minus, inst.n_minus, field)
    if not w_minus.contains(im_n):
        raise PerturbationError("structure: Im N+ leaves W-")
    wc = complement(im_n, inside=w_minus)
    frame = im_n.basis.hstack(inst.v_minus).hstack(wc.basis)
    if frame.cols != inst.n_minus:
        raise PerturbationError("Omega frame does not span F^{n-}")
    left = im_n.basis.hstack(Matrix.zeros(inst.n_minus, frame.cols - im_n.dim, field))
    return left * frame.inverse()

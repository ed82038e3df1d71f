"""Exact scalar arithmetic for the three-level field tower Q < Q(i) < Q(i)(z).

Everything here is exact: rationals are ``fractions.Fraction``, Gaussian
rationals are pairs of Fractions, univariate polynomials carry Gaussian
coefficients in canonical form (no trailing zeros), and rational functions
are stored reduced with a monic denominator.  Two scalars are equal exactly
when their canonical representations coincide, which is what makes identity
testing downstream fully reliable.

The module also provides the textual scalar grammar used by the file formats
(``"-3/4"``, ``"1/2+3/4*i"``, ``"1/2 - 3*z + z^2"``) and exact recovery of a
rational function from point samples.
"""

from __future__ import annotations

from fractions import Fraction
from math import inf

__all__ = [
    "Fraction",
    "GaussianRational",
    "Polynomial",
    "RatFunc",
    "ScalarMismatchError",
    "ReconstructionError",
    "variant_of",
    "scalar_add",
    "scalar_mul",
    "scalar_neg",
    "scalar_inv",
    "scalar_eq",
    "gauss",
    "parse_rational",
    "parse_gaussian",
    "parse_polynomial",
    "parse_scalar",
    "format_scalar",
    "poly_gcd",
    "rational_reconstruct",
]


class ScalarMismatchError(TypeError):
    """Raised when an operation mixes scalars from different tower levels."""


class ReconstructionError(ValueError):
    """Raised when no rational function within the degree bounds fits the samples."""


class GaussianRational:
    """An element a + b*i of Q(i) with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    def _coerce(self, other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, int):
            return GaussianRational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = GaussianRational(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inverse(self):
        sq = self.re * self.re + self.im * self.im
        if sq == 0:
            raise ZeroDivisionError("inverse of zero Gaussian rational")
        return GaussianRational(self.re / sq, -self.im / sq)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __eq__(self, other):
        if isinstance(other, int):
            other = GaussianRational(other)
        if not isinstance(other, GaussianRational):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def __str__(self):
        return format_scalar(self)


def gauss(re=0, im=0) -> GaussianRational:
    """Shorthand constructor for Gaussian rationals."""
    return GaussianRational(re, im)


_GZERO = GaussianRational(0)
_GONE = GaussianRational(1)


class Polynomial:
    """A univariate polynomial in z over Q(i), stored without trailing zeros."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [c if isinstance(c, GaussianRational) else GaussianRational(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @property
    def degree(self):
        """Degree of the polynomial; -inf for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else -inf

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> GaussianRational:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, GaussianRational)):
            return Polynomial([other])
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = max(len(self.coeffs), len(o.coeffs))
        a = list(self.coeffs) + [_GZERO] * (n - len(self.coeffs))
        b = list(o.coeffs) + [_GZERO] * (n - len(o.coeffs))
        return Polynomial([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return Polynomial([-c for c in self.coeffs])

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not self.coeffs or not o.coeffs:
            return Polynomial()
        out = [_GZERO] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(o.coeffs):
                out[i + j] = out[i + j] + a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    def __call__(self, z: GaussianRational) -> GaussianRational:
        out = _GZERO
        for c in reversed(self.coeffs):
            out = out * z + c
        return out

    def scale(self, c) -> "Polynomial":
        c = c if isinstance(c, GaussianRational) else GaussianRational(c)
        return Polynomial([c * a for a in self.coeffs])

    def monic(self) -> "Polynomial":
        if not self.coeffs:
            return self
        return self.scale(self.leading().inverse())

    def divmod(self, other: "Polynomial"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        quo = [_GZERO] * max(0, len(rem) - len(other.coeffs) + 1)
        dlead = other.leading().inverse()
        dn = len(other.coeffs)
        for k in range(len(rem) - dn, -1, -1):
            c = rem[k + dn - 1] * dlead
            if not c:
                quo[k] = _GZERO
                continue
            quo[k] = c
            for j, b in enumerate(other.coeffs):
                rem[k + j] = rem[k + j] - c * b
        return Polynomial(quo), Polynomial(rem[: dn - 1])

    def __repr__(self):
        return f"Polynomial({list(self.coeffs)!r})"

    def __str__(self):
        return format_scalar(self)


POLY_ZERO = Polynomial()
POLY_ONE = Polynomial([1])
POLY_Z = Polynomial([0, 1])


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic greatest common divisor, computed by the Euclidean algorithm."""
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
        # renormalize each step to keep coefficient sizes in check
        if not b.is_zero():
            b = b.monic()
    if a.is_zero():
        return a
    return a.monic()


class RatFunc:
    """A reduced rational function num/den over Q(i) with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=POLY_ONE):
        num = num if isinstance(num, Polynomial) else Polynomial([num])
        den = den if isinstance(den, Polynomial) else Polynomial([den])
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            num, den = POLY_ZERO, POLY_ONE
        else:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num = num.divmod(g)[0]
                den = den.divmod(g)[0]
            lead = den.leading().inverse()
            num = num.scale(lead)
            den = den.scale(lead)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RatFunc is immutable")

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, (int, GaussianRational, Polynomial)):
            return RatFunc(other)
        return None

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RatFunc(self.den, self.num)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return not self.num.is_zero()

    def __call__(self, z: GaussianRational) -> GaussianRational:
        d = self.den(z)
        if not d:
            raise ZeroDivisionError("rational function evaluated at a pole")
        return self.num(z) / d

    def __repr__(self):
        return f"RatFunc({self.num!r}, {self.den!r})"

    def __str__(self):
        return format_scalar(self)


# ---------------------------------------------------------------------------
# variant dispatch


def variant_of(s) -> str:
    if isinstance(s, Fraction):
        return "rational"
    if isinstance(s, GaussianRational):
        return "gaussian"
    if isinstance(s, Polynomial):
        return "polynomial"
    if isinstance(s, RatFunc):
        return "ratfunc"
    if isinstance(s, int):
        return "rational"
    raise ScalarMismatchError(f"not a scalar: {s!r}")


def _check_same(a, b):
    va, vb = variant_of(a), variant_of(b)
    if va != vb:
        raise ScalarMismatchError(f"scalar variants differ: {va} vs {vb}")
    return va


def scalar_add(a, b):
    _check_same(a, b)
    return a + b


def scalar_mul(a, b):
    _check_same(a, b)
    return a * b


def scalar_neg(a):
    variant_of(a)
    return -a


def scalar_inv(a):
    v = variant_of(a)
    if v == "rational":
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return Fraction(1) / Fraction(a)
    if v == "polynomial":
        raise ScalarMismatchError("polynomials are not invertible; use ratfunc")
    return a.inverse()


def scalar_eq(a, b) -> bool:
    _check_same(a, b)
    return a == b


# ---------------------------------------------------------------------------
# textual grammar


def parse_rational(text: str) -> Fraction:
    return Fraction(text.strip())


def _split_terms(text: str):
    """Split on top-level + and - (not inside parentheses), keeping signs."""
    terms, depth, cur = [], 0, ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0 and cur.strip() and not cur.rstrip().endswith(("^", "*", "/", "+", "-", "(")):
            terms.append(cur)
            cur = ch
        else:
            cur += ch
    if cur.strip():
        terms.append(cur)
    return terms


def parse_gaussian(text: str) -> GaussianRational:
    text = text.strip()
    if not text:
        raise ValueError("empty gaussian scalar")
    re_part = Fraction(0)
    im_part = Fraction(0)
    for term in _split_terms(text):
        t = term.replace(" ", "")
        if t in ("i", "+i"):
            im_part += 1
        elif t == "-i":
            im_part -= 1
        elif t.endswith("*i"):
            im_part += Fraction(t[:-2])
        elif t.endswith("i"):
            im_part += Fraction(t[:-1] + "1" if t[:-1] in ("", "+", "-") else t[:-1])
        else:
            re_part += Fraction(t)
    return GaussianRational(re_part, im_part)


def _parse_poly_coeff(text: str) -> GaussianRational:
    t = text.strip()
    if t.startswith("(") and t.endswith(")"):
        return parse_gaussian(t[1:-1])
    return parse_gaussian(t)


def parse_polynomial(text: str) -> Polynomial:
    text = text.strip()
    if not text:
        raise ValueError("empty polynomial")
    coeffs = {}
    for term in _split_terms(text):
        t = term.replace(" ", "")
        sign = GaussianRational(1)
        while t and t[0] in "+-":
            if t[0] == "-":
                sign = -sign
            t = t[1:]
        if "z" in t:
            head, _, tail = t.partition("z")
            head = head.rstrip("*")
            coeff = _parse_poly_coeff(head) if head else _GONE
            if tail.startswith("^"):
                power = int(tail[1:])
            elif tail == "":
                power = 1
            else:
                raise ValueError(f"bad polynomial term: {term!r}")
        else:
            coeff = _parse_poly_coeff(t)
            power = 0
        coeffs[power] = coeffs.get(power, _GZERO) + sign * coeff
    top = max(coeffs) if coeffs else 0
    return Polynomial([coeffs.get(k, _GZERO) for k in range(top + 1)])


def parse_scalar(text: str, kind: str):
    """Parse a scalar of the given variant from its textual form."""
    if kind == "rational":
        return parse_rational(text)
    if kind == "gaussian":
        return parse_gaussian(text)
    if kind == "polynomial":
        return parse_polynomial(text)
    if kind == "ratfunc":
        num, sep, den = text.partition(")/(")
        if not sep:
            return RatFunc(parse_polynomial(text))
        return RatFunc(parse_polynomial(num.lstrip("(")), parse_polynomial(den.rstrip(")")))
    raise ValueError(f"unknown scalar kind {kind!r}")


def _format_gaussian(s: GaussianRational) -> str:
    if not s.im:
        return str(s.re)
    if s.im == 1:
        im = "i"
    elif s.im == -1:
        im = "-i"
    else:
        im = f"{s.im}*i"
    if not s.re:
        return im
    if im.startswith("-"):
        return f"{s.re}-{im[1:]}"
    return f"{s.re}+{im}"


def _format_poly(p: Polynomial) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for k, c in enumerate(p.coeffs):
        if not c:
            continue
        if c.im:
            coeff = f"({_format_gaussian(c)})"
            negative = False
        else:
            negative = c.re < 0
            coeff = str(-c.re if negative else c.re)
        if k == 0:
            body = coeff
        else:
            var = "z" if k == 1 else f"z^{k}"
            body = var if coeff == "1" else f"{coeff}*{var}"
        if not parts:
            parts.append(f"-{body}" if negative else body)
        else:
            parts.append(f" - {body}" if negative else f" + {body}")
    return "".join(parts)


def format_scalar(s) -> str:
    """Canonical textual form of a scalar; inverse of parse_scalar."""
    v = variant_of(s)
    if v == "rational":
        return str(Fraction(s))
    if v == "gaussian":
        return _format_gaussian(s)
    if v == "polynomial":
        return _format_poly(s)
    num = _format_poly(s.num)
    if s.den == POLY_ONE:
        return num
    return f"({num})/({_format_poly(s.den)})"


# ---------------------------------------------------------------------------
# rational function recovery from samples


def _gaussian_nullspace(rows, ncols):
    """Canonical nullspace basis of a matrix over Q(i) given as row lists."""
    mat = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, len(mat)):
            if mat[i][c]:
                pr = i
                break
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        inv = mat[r][c].inverse()
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [_GZERO] * ncols
        vec[fc] = _GONE
        for ri, pc in enumerate(pivots):
            vec[pc] = -mat[ri][fc]
        basis.append(vec)
    return basis


def rational_reconstruct(samples, num_degree_bound: int, den_degree_bound: int) -> RatFunc:
    """Recover the unique P/Q with deg P <= nb, deg Q <= db matching every sample.

    The samples are (point, value) pairs of Gaussian rationals with pairwise
    distinct points; at least nb + db + 2 of them are required.  The linear
    system P(z_k) - v_k * Q(z_k) = 0 is solved exactly and the reduced
    candidate is re-verified against every sample, so an inconsistent sample
    set cannot slip through.
    """
    pts = [p for p, _ in samples]
    if len(set((p.re, p.im) for p in pts)) != len(pts):
        raise ValueError("sample points must be pairwise distinct")
    nb, db = num_degree_bound, den_degree_bound
    if len(samples) < nb + db + 2:
        raise ValueError(f"need at least {nb + db + 2} samples, got {len(samples)}")
    rows = []
    for z, v in samples:
        pows = [_GONE]
        for _ in range(max(nb, db)):
            pows.append(pows[-1] * z)
        rows.append([pows[k] for k in range(nb + 1)] + [-v * pows[k] for k in range(db + 1)])
    for vec in _gaussian_nullspace(rows, nb + db + 2):
        q = Polynomial(vec[nb + 1 :])
        if q.is_zero():
            continue
        cand = RatFunc(Polynomial(vec[: nb + 1]), q)
        ok = True
        for z, v in samples:
            if not cand.den(z):
                ok = False
                break
            if cand.num(z) != v * cand.den(z):
                ok = False
                break
        if ok:
            return cand
    raise ReconstructionError(
        f"no rational function with degree bounds ({nb}, {db}) fits the samples"
    )

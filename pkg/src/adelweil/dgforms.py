"""Graded-commutative differential forms with exact coefficients.

A `DGContext` fixes three groups of even variables: simplex coordinates
t_1..t_l (the affine coordinates of a simplex, with t_0 = 1 - sum t_i
eliminated), base coordinates (functions on a chart), and inert
parameters (formal even variables killed by d, used for deformation
parameters).  Each simplex or base variable x contributes one odd
generator "d x"; simplex odds order before base odds, which is exactly
what makes the total differential split as

    d = d_simplex + d_base,

with d_base acting as (-1)^q d on a term of simplex odd-degree q.  The
Koszul sign rule is implemented once, in `_merge_odd`, and everything
else (wedge, curvature, transgression, contraction) rides on it.

`FormMatrix` is a matrix of forms; `InvariantPolynomial` is a
polynomial in the elementary invariants P_1 = trace .. P_r = det, the
coefficients of the characteristic polynomial det(1 + tau M).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    ContextMismatch,
    DegreeError,
    DimensionMismatch,
    OddEntries,
)
from .exactalg import (
    MultiPoly,
    RatFunc,
    RingMatrix,
    ZERO,
    ONE,
    format_rational,
    rat,
)


@dataclass(frozen=True)
class DGContext:
    """Variable bookkeeping for one algebra of forms."""

    simplex_vars: tuple[str, ...]
    base_vars: tuple[str, ...]
    inert_vars: tuple[str, ...] = ()
    even_vars: tuple[str, ...] = field(init=False)
    odd_names: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        overlap = (set(self.simplex_vars) & set(self.base_vars)
                   | set(self.simplex_vars) & set(self.inert_vars)
                   | set(self.base_vars) & set(self.inert_vars))
        if overlap:
            raise DimensionMismatch(f"variables used twice: {sorted(overlap)}")
        object.__setattr__(self, "even_vars",
                           self.simplex_vars + self.base_vars + self.inert_vars)
        object.__setattr__(self, "odd_names",
                           tuple(f"d {v}" for v in
                                 self.simplex_vars + self.base_vars))

    # odd generators 0..S-1 are simplex, S..S+B-1 are base
    @property
    def simplex_odd_count(self) -> int:
        return len(self.simplex_vars)

    @property
    def odd_count(self) -> int:
        return len(self.simplex_vars) + len(self.base_vars)

    def odd_index(self, name: str) -> int:
        """Odd generator index for a simplex or base variable name."""
        diffables = self.simplex_vars + self.base_vars
        if name not in diffables:
            raise DimensionMismatch(f"no differential for variable {name!r}")
        return diffables.index(name)

    def diff_var(self, index: int) -> str:
        return (self.simplex_vars + self.base_vars)[index]

    # -- ring-level helpers --------------------------------------------------

    def ring_const(self, value) -> RatFunc:
        return RatFunc.from_const(self.even_vars, value)

    def ring_var(self, name) -> RatFunc:
        return RatFunc.var(self.even_vars, name)

    def ring_poly(self, poly: MultiPoly) -> RatFunc:
        if poly.vars != self.even_vars:
            poly = poly.extend_vars(self.even_vars)
        return RatFunc(poly)

    def t_coeff(self, i: int) -> RatFunc:
        """Affine coordinate t_i of the simplex, with t_0 eliminated."""
        l = len(self.simplex_vars)
        if not 0 <= i <= l:
            raise DimensionMismatch(f"t_{i} outside simplex of dimension {l}")
        if i == 0:
            acc = self.ring_const(1)
            for name in self.simplex_vars:
                acc = acc - self.ring_var(name)
            return acc
        return self.ring_var(self.simplex_vars[i - 1])

    # -- form-level helpers --------------------------------------------------

    def zero_form(self) -> "DiffForm":
        return DiffForm(self, {})

    def one_form(self) -> "DiffForm":
        return DiffForm(self, {(): self.ring_const(1)})

    def form_scalar(self, value) -> "DiffForm":
        if isinstance(value, DiffForm):
            return value
        if isinstance(value, MultiPoly):
            value = self.ring_poly(value)
        if not isinstance(value, RatFunc):
            value = self.ring_const(value)
        if value.is_zero():
            return self.zero_form()
        return DiffForm(self, {(): value})

    def t(self, i: int) -> "DiffForm":
        return self.form_scalar(self.t_coeff(i))

    def dt(self, i: int) -> "DiffForm":
        """Differential dt_i; dt_0 expands to -sum of the others."""
        l = len(self.simplex_vars)
        if not 0 <= i <= l:
            raise DimensionMismatch(f"dt_{i} outside simplex of dimension {l}")
        if i == 0:
            acc = self.zero_form()
            for j in range(1, l + 1):
                acc = acc - self.dt(j)
            return acc
        return DiffForm(self, {(i - 1,): self.ring_const(1)})

    def df(self, name: str) -> "DiffForm":
        if name not in self.base_vars:
            raise DimensionMismatch(f"{name!r} is not a base variable")
        idx = self.simplex_odd_count + self.base_vars.index(name)
        return DiffForm(self, {(idx,): self.ring_const(1)})

    def d_by_name(self, name: str) -> "DiffForm":
        return DiffForm(self, {(self.odd_index(name),): self.ring_const(1)})

    def f(self, name: str) -> "DiffForm":
        return self.form_scalar(self.ring_var(name))


def polynomial_context(base_vars, inert_vars=()) -> DGContext:
    """Context with base variables only (no simplex factor)."""
    return DGContext((), tuple(base_vars), tuple(inert_vars))


def simplex_context(l: int, prefix: str = "t") -> DGContext:
    """Forms on the l-simplex in the coordinates t_1..t_l."""
    return DGContext(tuple(f"{prefix}{i}" for i in range(1, l + 1)), ())


def chain_context(l: int, base_vars, inert_vars=()) -> DGContext:
    """Simplex factor of a length-l chain times a base chart."""
    return DGContext(tuple(f"t{i}" for i in range(1, l + 1)),
                     tuple(base_vars), tuple(inert_vars))


def _poly_image(p: MultiPoly, images: dict, target: DGContext) -> RatFunc:
    """Push a polynomial through a variable assignment into a context."""
    acc = target.ring_const(0)
    for exp, c in p.coeffs.items():
        term = target.ring_const(c)
        for name, k in zip(p.vars, exp):
            if k:
                term = term * images[name] ** k
        acc = acc + term
    return acc


def _merge_odd(a: tuple[int, ...], b: tuple[int, ...]):
    """Concatenate sorted odd monomials; None on a repeated generator.

    Returns (merged tuple, Koszul sign).
    """
    if not a:
        return b, 1
    if not b:
        return a, 1
    merged = []
    sign = 1
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            return None, 0
        if a[i] < b[j]:
            merged.append(a[i])
            i += 1
        else:
            # b[j] jumps over the remaining entries of a
            if (len(a) - i) % 2:
                sign = -sign
            merged.append(b[j])
            j += 1
    merged.extend(a[i:])
    merged.extend(b[j:])
    return tuple(merged), sign


def _insert_odd(idx: int, mono: tuple[int, ...]):
    """Wedge a single generator on the left of a sorted monomial."""
    return _merge_odd((idx,), mono)


class DiffForm:
    """Element of the free graded-commutative algebra of a context.

    Stored as {sorted odd index tuple: RatFunc coefficient}; the term
    degree is the number of odd factors.
    """

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: DGContext, terms: dict):
        self.ctx = ctx
        clean = {}
        for mono, c in terms.items():
            if not c.is_zero():
                clean[tuple(mono)] = c
        self.terms = clean

    # -- predicates ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set[int]:
        return {len(m) for m in self.terms}

    def degree(self) -> int:
        """Degree of a homogeneous form (0 for the zero form)."""
        degs = self.degrees()
        if not degs:
            return 0
        if len(degs) > 1:
            raise DegreeError(f"form of mixed degrees {sorted(degs)}")
        return degs.pop()

    def is_even(self) -> bool:
        return all(len(m) % 2 == 0 for m in self.terms)

    def bidegree_component(self, p: int, q: int) -> "DiffForm":
        """Terms with p base differentials and q simplex differentials."""
        s = self.ctx.simplex_odd_count
        out = {}
        for mono, c in self.terms.items():
            qq = sum(1 for i in mono if i < s)
            if qq == q and len(mono) - qq == p:
                out[mono] = c
        return DiffForm(self.ctx, out)

    def coefficient(self, mono: tuple[int, ...]) -> RatFunc:
        return self.terms.get(tuple(mono), self.ctx.ring_const(0))

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other: "DiffForm"):
        if self.ctx != other.ctx:
            raise ContextMismatch("forms from different contexts")

    def _coerce(self, other) -> "DiffForm":
        if isinstance(other, DiffForm):
            return other
        return self.ctx.form_scalar(other)

    def __add__(self, other):
        other = self._coerce(other)
        self._check(other)
        terms = dict(self.terms)
        for mono, c in other.terms.items():
            s = terms.get(mono)
            s = c if s is None else s + c
            if s.is_zero():
                terms.pop(mono, None)
            else:
                terms[mono] = s
        return DiffForm(self.ctx, terms)

    __radd__ = __add__

    def __neg__(self):
        return DiffForm(self.ctx, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        self._check(other)
        terms: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono, sign = _merge_odd(m1, m2)
                if mono is None:
                    continue
                c = c1 * c2
                if sign < 0:
                    c = -c
                s = terms.get(mono)
                s = c if s is None else s + c
                if s.is_zero():
                    terms.pop(mono, None)
                else:
                    terms[mono] = s
        return DiffForm(self.ctx, terms)

    def __rmul__(self, other):
        # scalars commute past everything
        return self * other

    def __pow__(self, n: int):
        result = self.ctx.one_form()
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        if not isinstance(other, DiffForm):
            try:
                other = self._coerce(other)
            except Exception:
                return NotImplemented
        return self.ctx == other.ctx and (self - other).is_zero()

    # -- calculus ------------------------------------------------------------

    def _derive(self, var_names) -> "DiffForm":
        terms: dict = {}
        for mono, c in self.terms.items():
            for name in var_names:
                dc = c.diff(name)
                if dc.is_zero():
                    continue
                new, sign = _insert_odd(self.ctx.odd_index(name), mono)
                if new is None:
                    continue
                add = dc if sign > 0 else -dc
                s = terms.get(new)
                s = add if s is None else s + add
                if s.is_zero():
                    terms.pop(new, None)
                else:
                    terms[new] = s
        return DiffForm(self.ctx, terms)

    def d(self) -> "DiffForm":
        """Total differential (inert variables are constants)."""
        return self._derive(self.ctx.simplex_vars + self.ctx.base_vars)

    def d_simplex(self) -> "DiffForm":
        """The simplex-direction piece of d."""
        return self._derive(self.ctx.simplex_vars)

    def d_base(self) -> "DiffForm":
        """The base-direction piece: acts as (-1)^q d_chart on (p,q) terms."""
        return self._derive(self.ctx.base_vars)

    def contract(self, components: dict) -> "DiffForm":
        """Interior product against sum v_i d/df_i (odd derivation).

        `components` maps base variable names to ring elements; simplex
        differentials contract to zero.
        """
        comp = {}
        for name, v in components.items():
            idx = self.ctx.odd_index(name)
            if idx < self.ctx.simplex_odd_count:
                raise DimensionMismatch(
                    "vector fields live in the base directions only")
            if isinstance(v, MultiPoly):
                v = self.ctx.ring_poly(v)
            elif not isinstance(v, RatFunc):
                v = self.ctx.ring_const(v)
            comp[idx] = v
        terms: dict = {}
        for mono, c in self.terms.items():
            for pos, idx in enumerate(mono):
                v = comp.get(idx)
                if v is None:
                    continue
                coeff = c * v
                if pos % 2:
                    coeff = -coeff
                new = mono[:pos] + mono[pos + 1:]
                s = terms.get(new)
                s = coeff if s is None else s + coeff
                if s.is_zero():
                    terms.pop(new, None)
                else:
                    terms[new] = s
        return DiffForm(self.ctx, terms)

    def map_coefficients(self, fn) -> "DiffForm":
        return DiffForm(self.ctx, {m: fn(c) for m, c in self.terms.items()})

    def substitute(self, target: DGContext, even_images: dict | None = None,
                   odd_images: dict | None = None) -> "DiffForm":
        """DGA homomorphism into another context.

        `even_images` maps source variable names to ring elements of the
        target; `odd_images` maps source odd indices to target forms.
        Unmapped variables go to the same-named generator of the target.
        """
        full_even: dict[str, RatFunc] = {}
        for name in self.ctx.even_vars:
            img = (even_images or {}).get(name)
            if img is None:
                if name not in target.even_vars:
                    raise ContextMismatch(
                        f"no image given for variable {name!r}")
                full_even[name] = target.ring_var(name)
            elif isinstance(img, MultiPoly):
                full_even[name] = target.ring_poly(img)
            elif isinstance(img, RatFunc):
                full_even[name] = img
            else:
                full_even[name] = target.ring_const(img)
        odd_images = dict(odd_images or {})
        acc = target.zero_form()
        for mono, c in sorted(self.terms.items(),
                              key=lambda kv: (len(kv[0]), kv[0])):
            num = _poly_image(c.num, full_even, target)
            den = _poly_image(c.den, full_even, target)
            img = target.form_scalar(num / den)
            for idx in mono:
                oi = odd_images.get(idx)
                if oi is None:
                    name = self.ctx.diff_var(idx)
                    if name not in target.simplex_vars + target.base_vars:
                        raise ContextMismatch(
                            f"no image given for the differential of {name!r}")
                    oi = target.d_by_name(name)
                img = img * oi
            acc = acc + img
        return acc

    def inert_coefficient(self, name: str, power: int) -> "DiffForm":
        """Coefficient of an inert variable power, as a form without it."""
        idx = self.ctx.even_vars.index(name)
        out: dict = {}
        for mono, c in self.terms.items():
            if not c.den.degree_in(name) <= 0:
                raise DimensionMismatch(
                    f"denominator depends on inert variable {name}")
            num = {}
            for exp, v in c.num.coeffs.items():
                if exp[idx] == power:
                    e = list(exp)
                    e[idx] = 0
                    num[tuple(e)] = v
            if num:
                out[mono] = RatFunc(MultiPoly(c.num.vars, num), c.den)
        return DiffForm(self.ctx, out)

    # -- rendering -----------------------------------------------------------

    def render(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for mono in sorted(self.terms, key=lambda m: (len(m), m)):
            c = self.terms[mono]
            odd = "^".join(self.ctx.odd_names[i] for i in mono)
            c_str = c.render()
            negative = c_str.startswith("-")
            body = c_str[1:] if negative else c_str
            if odd:
                if body == "1":
                    body = odd
                else:
                    if " " in body and not (body.startswith("(")
                                            and body.endswith(")")):
                        body = f"({body})"
                    body = f"{body} {odd}"
            if not pieces:
                pieces.append(f"-{body}" if negative else body)
            else:
                pieces.append(f"- {body}" if negative else f"+ {body}")
        return " ".join(pieces)

    def __repr__(self):
        return f"DiffForm({self.render()!r})"


class FormMatrix:
    """Matrix with DiffForm entries over one context."""

    __slots__ = ("ctx", "rows")

    def __init__(self, ctx: DGContext, rows):
        self.ctx = ctx
        self.rows = []
        for row in rows:
            out = []
            for x in row:
                if not isinstance(x, DiffForm):
                    x = ctx.form_scalar(x)
                elif x.ctx != ctx:
                    raise ContextMismatch("matrix entry from another context")
                out.append(x)
            self.rows.append(out)
        if len({len(r) for r in self.rows}) > 1:
            raise DimensionMismatch("ragged matrix")

    @classmethod
    def identity(cls, ctx: DGContext, r: int) -> "FormMatrix":
        one, zero = ctx.one_form(), ctx.zero_form()
        return cls(ctx, [[one if i == j else zero for j in range(r)]
                         for i in range(r)])

    @classmethod
    def zero(cls, ctx: DGContext, r: int, c: int | None = None) -> "FormMatrix":
        c = r if c is None else c
        z = ctx.zero_form()
        return cls(ctx, [[z for _ in range(c)] for _ in range(r)])

    @classmethod
    def from_ring(cls, ctx: DGContext, rows) -> "FormMatrix":
        """Matrix of scalars (ring elements, polynomials, rationals)."""
        if isinstance(rows, RingMatrix):
            rows = rows.rows
        return cls(ctx, [[ctx.form_scalar(x) for x in row] for row in rows])

    @property
    def shape(self):
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def entrywise(self, fn) -> "FormMatrix":
        return FormMatrix(self.ctx, [[fn(x) for x in row] for row in self.rows])

    def __add__(self, other):
        if self.shape != other.shape:
            raise DimensionMismatch("matrix addition shape mismatch")
        return FormMatrix(self.ctx,
                          [[a + b for a, b in zip(r1, r2)]
                           for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self.entrywise(lambda x: -x)

    def scale(self, c) -> "FormMatrix":
        c = self.ctx.form_scalar(c) if not isinstance(c, DiffForm) else c
        return self.entrywise(lambda x: c * x)

    def __matmul__(self, other):
        m, k = self.shape
        k2, n = other.shape
        if k != k2:
            raise DimensionMismatch("matrix product shape mismatch")
        out = []
        for i in range(m):
            row = []
            for j in range(n):
                acc = self.ctx.zero_form()
                for t in range(k):
                    acc = acc + self.rows[i][t] * other.rows[t][j]
                row.append(acc)
            out.append(row)
        return FormMatrix(self.ctx, out)

    def d(self) -> "FormMatrix":
        return self.entrywise(lambda x: x.d())

    def d_simplex(self) -> "FormMatrix":
        return self.entrywise(lambda x: x.d_simplex())

    def d_base(self) -> "FormMatrix":
        return self.entrywise(lambda x: x.d_base())

    def bidegree_component(self, p: int, q: int) -> "FormMatrix":
        return self.entrywise(lambda x: x.bidegree_component(p, q))

    def contract(self, components: dict) -> "FormMatrix":
        return self.entrywise(lambda x: x.contract(components))

    def trace(self) -> DiffForm:
        m, n = self.shape
        if m != n:
            raise DimensionMismatch("trace of a non-square matrix")
        acc = self.ctx.zero_form()
        for i in range(m):
            acc = acc + self.rows[i][i]
        return acc

    def is_zero(self) -> bool:
        return all(x.is_zero() for row in self.rows for x in row)

    def __eq__(self, other):
        if not isinstance(other, FormMatrix):
            return NotImplemented
        return self.shape == other.shape and (self - other).is_zero()

    def _require_even(self, what: str):
        if not all(x.is_even() for row in self.rows for x in row):
            raise OddEntries(f"{what} needs even-degree entries")

    def det(self) -> DiffForm:
        m, n = self.shape
        if m != n:
            raise DimensionMismatch("determinant of a non-square matrix")
        self._require_even("determinant")
        acc = self.ctx.zero_form()
        for perm in itertools.permutations(range(n)):
            term = self.ctx.one_form()
            for i in range(n):
                term = term * self.rows[i][perm[i]]
            sign = _perm_sign_cached(perm)
            acc = acc + (term if sign > 0 else -term)
        return acc

    def invariant(self, k: int) -> DiffForm:
        """k-th elementary invariant: sum of principal k x k minors."""
        m, n = self.shape
        if m != n:
            raise DimensionMismatch("invariants of a non-square matrix")
        if k == 0:
            return self.ctx.one_form()
        self._require_even("invariant")
        acc = self.ctx.zero_form()
        for subset in itertools.combinations(range(n), k):
            sub = FormMatrix(self.ctx,
                             [[self.rows[i][j] for j in subset]
                              for i in subset])
            acc = acc + sub.det()
        return acc

    def odd_decomposition(self) -> dict:
        """Write the matrix as sum of odd monomials times ring matrices."""
        m, n = self.shape
        monos = sorted({mono for row in self.rows for x in row
                        for mono in x.terms},
                       key=lambda mo: (len(mo), mo))
        zero = self.ctx.ring_const(0)
        out = {}
        for mono in monos:
            out[mono] = RingMatrix(
                [[self.rows[i][j].terms.get(mono, zero) for j in range(n)]
                 for i in range(m)])
        return out

    def render(self) -> str:
        return "[" + ", ".join(
            "[" + ", ".join(x.render() for x in row) + "]"
            for row in self.rows) + "]"

    def __repr__(self):
        return f"FormMatrix({self.render()})"


_SIGN_CACHE: dict = {}


def _perm_sign_cached(perm) -> int:
    sign = _SIGN_CACHE.get(perm)
    if sign is None:
        sign = 1
        seen = [False] * len(perm)
        for i in range(len(perm)):
            if seen[i]:
                continue
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            if length % 2 == 0:
                sign = -sign
        _SIGN_CACHE[perm] = sign
    return sign


class InvariantPolynomial:
    """Polynomial in the elementary invariants P_1..P_r of a rank.

    Monomials are exponent tuples (e_1..e_r) meaning P_1^e_1 ... P_r^e_r;
    all monomials must share the weighted degree sum i * e_i, which is
    the form degree the polynomial produces out of a curvature matrix
    (in units of 2) and the number of slots of its polarization.
    """

    __slots__ = ("r", "terms", "degree")

    def __init__(self, r: int, terms: dict):
        self.r = r
        clean = {}
        degrees = set()
        for exp, c in terms.items():
            exp = tuple(exp)
            if len(exp) != r:
                raise DimensionMismatch(f"monomial {exp} for rank {r}")
            c = rat(c)
            if c:
                clean[exp] = c
                degrees.add(sum((i + 1) * e for i, e in enumerate(exp)))
        if len(degrees) > 1:
            raise DegreeError(
                f"mixed weighted degrees {sorted(degrees)} in one invariant")
        self.terms = clean
        self.degree = degrees.pop() if degrees else 0

    @classmethod
    def elementary(cls, r: int, i: int) -> "InvariantPolynomial":
        """P_i for rank r (P_1 = trace, P_r = determinant)."""
        if not 1 <= i <= r:
            raise DimensionMismatch(f"P_{i} undefined for rank {r}")
        exp = [0] * r
        exp[i - 1] = 1
        return cls(r, {tuple(exp): ONE})

    @classmethod
    def power_of_trace(cls, r: int, n: int) -> "InvariantPolynomial":
        exp = [0] * r
        exp[0] = n
        return cls(r, {tuple(exp): ONE})

    def render(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for exp in sorted(self.terms):
            c = self.terms[exp]
            mono = "*".join(
                f"c{i + 1}" if e == 1 else f"c{i + 1}^{e}"
                for i, e in enumerate(exp) if e)
            if not mono:
                body = format_rational(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{format_rational(abs(c))}*{mono}"
            if not pieces:
                pieces.append(body if c > 0 else f"-{body}")
            else:
                pieces.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(pieces)

    def __repr__(self):
        return f"InvariantPolynomial({self.render()!r})"


def invariant_eval(P: InvariantPolynomial, M: FormMatrix) -> DiffForm:
    """Evaluate an invariant polynomial on an even-entried matrix.

    Example: P_1^2 on M is (trace M)^2; P_2 on a 2x2 matrix is det M.
    """
    if M.shape[0] != P.r:
        raise DimensionMismatch(
            f"rank-{P.r} invariant on a {M.shape[0]}x{M.shape[1]} matrix")
    cache: dict[int, DiffForm] = {}

    def elem(i: int) -> DiffForm:
        if i not in cache:
            cache[i] = M.invariant(i)
        return cache[i]

    acc = M.ctx.zero_form()
    for exp, c in sorted(P.terms.items()):
        term = M.ctx.form_scalar(c)
        for i, e in enumerate(exp):
            for _ in range(e):
                term = term * elem(i + 1)
        acc = acc + term
    return acc


def invariant_eval_ring(P: InvariantPolynomial, M: RingMatrix, one):
    """Same as invariant_eval but over a plain commutative ring."""
    if M.shape[0] != P.r:
        raise DimensionMismatch(
            f"rank-{P.r} invariant on a {M.shape[0]}x{M.shape[1]} matrix")
    cache: dict[int, object] = {}

    def elem(i: int):
        if i not in cache:
            cache[i] = M.principal_minor_sum(i)
        return cache[i]

    acc = one * 0
    for exp, c in sorted(P.terms.items()):
        term = one * c
        for i, e in enumerate(exp):
            for _ in range(e):
                term = term * elem(i + 1)
        acc = acc + term
    return acc


def matrix_curvature(theta: FormMatrix) -> FormMatrix:
    """Curvature of a connection matrix: d(theta) - theta * theta."""
    m, n = theta.shape
    if m != n:
        raise DimensionMismatch("connection matrix must be square")
    return theta.d() - (theta @ theta)


def polarize(P: InvariantPolynomial, Ms: list[FormMatrix]) -> DiffForm:
    """Full polarization of P on even matrices, by inclusion-exclusion.

    P~(M_1..M_m) = (1/m!) sum over nonempty S of (-1)^(m-|S|) P(sum_S M_i);
    it is symmetric, multilinear, and restores P on the diagonal.
    """
    m = P.degree
    if len(Ms) != m:
        raise DegreeError(f"polarization of degree {m} needs {m} arguments")
    for M in Ms:
        M._require_even("polarization")
    ctx = Ms[0].ctx
    acc = ctx.zero_form()
    for picks in itertools.product((0, 1), repeat=m):
        size = sum(picks)
        if not size:
            continue
        total = None
        for flag, M in zip(picks, Ms):
            if flag:
                total = M if total is None else total + M
        value = invariant_eval(P, total)
        if (m - size) % 2:
            value = -value
        acc = acc + value
    return acc.map_coefficients(lambda c: c * Fraction(1, math.factorial(m)))


def _polarize_ring(P: InvariantPolynomial, Cs: list[RingMatrix], ctx: DGContext):
    """Inclusion-exclusion polarization on coefficient matrices."""
    m = len(Cs)
    one = ctx.ring_const(1)
    acc = ctx.ring_const(0)
    for picks in itertools.product((0, 1), repeat=m):
        size = sum(picks)
        if not size:
            continue
        total = None
        for flag, C in zip(picks, Cs):
            if flag:
                total = C if total is None else total + C
        value = invariant_eval_ring(P, total, one)
        if (m - size) % 2:
            value = -value
        acc = acc + value
    return acc * Fraction(1, math.factorial(m))


def polarize_mixed(P: InvariantPolynomial, args: list[FormMatrix]) -> DiffForm:
    """Polarization extended to matrices of forms of any degrees.

    Each argument is decomposed into odd monomials with coefficient
    matrices; the value on one choice of monomials is the product of
    the monomials in argument order times the scalar polarization of
    the coefficient matrices.  With at most one odd-degree argument
    (the use here) this left-to-right convention is the only one.
    """
    m = P.degree
    if len(args) != m:
        raise DegreeError(f"polarization of degree {m} needs {m} arguments")
    ctx = args[0].ctx
    decomps = [A.odd_decomposition() for A in args]
    acc = ctx.zero_form()
    for combo in itertools.product(*[sorted(d, key=lambda mo: (len(mo), mo))
                                     for d in decomps]):
        mono: tuple[int, ...] = ()
        sign = 1
        for piece in combo:
            mono, s = _merge_odd(mono, piece)
            if mono is None:
                break
            sign *= s
        if mono is None:
            continue
        coeff = _polarize_ring(P, [d[mu] for d, mu in zip(decomps, combo)], ctx)
        if coeff.is_zero():
            continue
        if sign < 0:
            coeff = -coeff
        acc = acc + DiffForm(ctx, {mono: coeff})
    return acc


def transgression(P: InvariantPolynomial, theta: FormMatrix) -> DiffForm:
    """Chern-Simons transgression of P at a degree-1 connection matrix.

    TP(theta) = m * integral over s in [0,1] of P~(theta, R_s, .., R_s)
    with R_s = s d(theta) - s^2 theta^2; the s-integration is done
    exactly term by term.  Its defining property d TP(theta) = P(R) is
    checked by the test suite, not assumed.

    Example: for P = P_1^2, TP(theta) = trace(theta) * trace(d theta).
    """
    m = P.degree
    if m < 1:
        raise DegreeError("transgression needs a positive degree")
    for row in theta.rows:
        for x in row:
            if not x.is_zero() and x.degree() != 1:
                raise DegreeError("connection matrix entries must be 1-forms")
    A = theta.d()
    B = -(theta @ theta)
    ctx = theta.ctx
    acc = ctx.zero_form()
    for j in range(m):
        # slots: theta, then (m-1-j) copies of s*A, then j copies of s^2*B
        args = [theta] + [A] * (m - 1 - j) + [B] * j
        weight = (Fraction(m) * math.comb(m - 1, j)) / (m + j)
        value = polarize_mixed(P, args)
        acc = acc + value.map_coefficients(lambda c: c * weight)
    return acc


def chern_character(R: FormMatrix, assume_nilpotent: bool = True) -> DiffForm:
    """Trace of exp(R), exact because form-degree is bounded.

    A curvature matrix has entries of positive degree, so its powers
    vanish once the degree exceeds the number of odd generators.
    """
    m, n = R.shape
    if m != n:
        raise DimensionMismatch("character of a non-square matrix")
    acc = R.ctx.form_scalar(m)
    power = R
    k = 1
    bound = R.ctx.odd_count + 1
    while not power.is_zero():
        acc = acc + power.trace().map_coefficients(
            lambda c: c * Fraction(1, math.factorial(k)))
        k += 1
        if k > bound:
            raise DegreeError("matrix is not nilpotent in this context")
        power = power @ R
    return acc


def contract(form: DiffForm, components: dict) -> DiffForm:
    """Interior product of a form against a base vector field."""
    return form.contract(components)

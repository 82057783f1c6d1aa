"""Simplex category, polynomial forms on simplices, exact integration.

Morphisms of the simplex category are monotone maps of vertex sets;
pulling forms back along them is variable substitution.  Integration
over a simplex is the Dirichlet integral, done exactly in rationals.
The cochain side (normalized cochains on a finite simplicial set, the
front/back-face product) lives here too, together with the comparison
map rho sending a form to the cochain of its face integrals.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import (
    ContextMismatch,
    DimensionMismatch,
    Incomposable,
    ParseError,
)
from .dgforms import DGContext, DiffForm, simplex_context
from .exactalg import rat


# -- the simplex category ----------------------------------------------------


@dataclass(frozen=True)
class DeltaMorphism:
    """Monotone nondecreasing map [source] -> [target] of vertex sets."""

    source: int
    target: int
    values: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.values) != self.source + 1:
            raise DimensionMismatch(
                f"map on [{self.source}] needs {self.source + 1} values")
        if any(not 0 <= v <= self.target for v in self.values):
            raise DimensionMismatch(
                f"values {self.values} escape [{self.target}]")
        if any(a > b for a, b in zip(self.values, self.values[1:])):
            raise DimensionMismatch(f"values {self.values} not monotone")

    def __call__(self, i: int) -> int:
        return self.values[i]

    def is_injective(self) -> bool:
        return len(set(self.values)) == len(self.values)

    def is_surjective(self) -> bool:
        return set(self.values) == set(range(self.target + 1))

    def preimage(self, j: int) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.values) if v == j)

    def factor(self) -> tuple["DeltaMorphism", "DeltaMorphism"]:
        """Unique epi-mono factorization (epi first, then mono)."""
        image = sorted(set(self.values))
        p = len(image) - 1
        mono = DeltaMorphism(p, self.target, tuple(image))
        position = {v: k for k, v in enumerate(image)}
        epi = DeltaMorphism(self.source, p,
                            tuple(position[v] for v in self.values))
        return epi, mono

    def face_indices(self) -> tuple[int, ...]:
        """Vertices missed by the mono part, descending.

        The mono part equals face(..) generators composed in this order.
        """
        _, mono = self.factor()
        missed = sorted(set(range(self.target + 1)) - set(mono.values),
                        reverse=True)
        return tuple(missed)

    def degeneracy_indices(self) -> tuple[int, ...]:
        """Collapsed positions of the epi part, ascending."""
        epi, _ = self.factor()
        return tuple(sorted(epi.values[i]
                            for i in range(1, len(epi.values))
                            if epi.values[i] == epi.values[i - 1]))


def identity_morphism(n: int) -> DeltaMorphism:
    return DeltaMorphism(n, n, tuple(range(n + 1)))


def face(n: int, i: int) -> DeltaMorphism:
    """Coface [n-1] -> [n] skipping vertex i."""
    if not 0 <= i <= n:
        raise DimensionMismatch(f"face index {i} outside [0, {n}]")
    return DeltaMorphism(n - 1, n,
                         tuple(v for v in range(n + 1) if v != i))


def degeneracy(n: int, i: int) -> DeltaMorphism:
    """Codegeneracy [n+1] -> [n] repeating vertex i."""
    if not 0 <= i <= n:
        raise DimensionMismatch(f"degeneracy index {i} outside [0, {n}]")
    return DeltaMorphism(n + 1, n,
                         tuple(min(v, n) if v <= i else v - 1
                               for v in range(n + 2)))


def vertex_inclusion(n: int, i: int) -> DeltaMorphism:
    return DeltaMorphism(0, n, (i,))


def compose(sigma: DeltaMorphism, tau: DeltaMorphism) -> DeltaMorphism:
    """The composite sigma after tau."""
    if tau.target != sigma.source:
        raise Incomposable(
            f"[{tau.source}]->[{tau.target}] then "
            f"[{sigma.source}]->[{sigma.target}] do not compose")
    return DeltaMorphism(tau.source, sigma.target,
                         tuple(sigma(v) for v in tau.values))


# -- forms on simplices ------------------------------------------------------


@dataclass(frozen=True)
class SimplexForms:
    """The algebra of polynomial forms on one standard simplex."""

    n: int
    ctx: DGContext = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "ctx", simplex_context(self.n))

    def t(self, i: int) -> DiffForm:
        return self.ctx.t(i)

    def dt(self, i: int) -> DiffForm:
        return self.ctx.dt(i)

    def zero(self) -> DiffForm:
        return self.ctx.zero_form()

    def one(self) -> DiffForm:
        return self.ctx.one_form()


def pullback_along(sigma: DeltaMorphism, form: DiffForm) -> DiffForm:
    """Pull a form back along a simplex-category morphism.

    The simplex factor of the context must have dimension target(sigma);
    base and inert variables ride along unchanged.  Coordinates map by
    t_j goes to the sum of t_i over the preimage of j, with the usual
    t_0 elimination on both sides.
    """
    src = form.ctx
    n = len(src.simplex_vars)
    if n != sigma.target:
        raise DimensionMismatch(
            f"form lives on a {n}-simplex, morphism lands in [{sigma.target}]")
    m = sigma.source
    tgt = DGContext(tuple(f"t{i}" for i in range(1, m + 1)),
                    src.base_vars, src.inert_vars)
    even_images: dict = {}
    odd_images: dict = {}
    for j in range(1, n + 1):
        pre = sigma.preimage(j)
        even = tgt.ring_const(0)
        odd = tgt.zero_form()
        for i in pre:
            even = even + tgt.t_coeff(i)
            odd = odd + tgt.dt(i)
        even_images[src.simplex_vars[j - 1]] = even
        odd_images[j - 1] = odd
    return form.substitute(tgt, even_images, odd_images)


def vertex_value(form: DiffForm, i: int) -> DiffForm:
    """Evaluate at vertex i of the simplex factor (a base-level form)."""
    n = len(form.ctx.simplex_vars)
    return pullback_along(vertex_inclusion(n, i), form)


def dirichlet_integral(l: int, exponents, a0: int = 0) -> Fraction:
    """Exact integral of a monomial over the l-simplex.

    Integrates t_1^a_1 .. t_l^a_l * t_0^a_0 against dt_1..dt_l, where
    t_0 = 1 - sum t_i; the value is prod(a_i!) * a0! / (l + sum a + a0)!.
    """
    num = math.factorial(a0)
    for a in exponents:
        num *= math.factorial(a)
    return Fraction(num, math.factorial(l + sum(exponents) + a0))


def integrate_over_simplex(form: DiffForm, l: int | None = None) -> Fraction:
    """Integrate the top simplex-degree part of a form, exactly.

    Terms of simplex odd-degree below l integrate to zero by
    convention; terms carrying base differentials are rejected (use
    fiber_integrate for those).  Coefficients must be polynomial in the
    simplex variables.
    """
    ctx = form.ctx
    if l is None:
        l = len(ctx.simplex_vars)
    elif l != len(ctx.simplex_vars):
        raise DimensionMismatch(
            f"form lives on a {len(ctx.simplex_vars)}-simplex, not {l}")
    top = tuple(range(l))
    total = Fraction(0)
    for mono, c in form.terms.items():
        if any(i >= l for i in mono):
            raise DimensionMismatch(
                "base differentials present; use fiber_integrate")
        if mono != top:
            continue
        total += _integrate_coefficient(ctx, c, l)
    return total


def _integrate_coefficient(ctx: DGContext, c, l: int) -> Fraction:
    for name in ctx.simplex_vars:
        if c.den.degree_in(name) > 0:
            raise DimensionMismatch(
                f"cannot integrate a coefficient with {name} in the denominator")
    den = c.den.constant_term() if c.den.is_constant() else None
    if den is None:
        # denominator in base variables only: integration is on num
        raise DimensionMismatch(
            "coefficient is not scalar-valued; use fiber_integrate")
    total = Fraction(0)
    for exp, v in c.num.coeffs.items():
        t_part = exp[:l]
        if any(exp[l:]):
            raise DimensionMismatch("coefficient involves base variables")
        total += v * dirichlet_integral(l, t_part)
    return total / den


def fiber_integrate(form: DiffForm) -> DiffForm:
    """Integrate out the simplex factor, leaving a base-context form.

    Picks the terms with the full dt_1..dt_l factor, Dirichlet-integrates
    their t-dependence, and reindexes the remaining base differentials.
    Simplex variables may not occur in denominators.
    """
    ctx = form.ctx
    l = len(ctx.simplex_vars)
    base = DGContext((), ctx.base_vars, ctx.inert_vars)
    acc = base.zero_form()
    top = tuple(range(l))
    for mono, c in form.terms.items():
        if mono[:l] != top:
            continue
        rest = tuple(i - l for i in mono[l:])
        for name in ctx.simplex_vars:
            if c.den.degree_in(name) > 0:
                raise DimensionMismatch(
                    f"simplex variable {name} in a denominator")
        den = base.ring_poly(_drop_simplex_vars(ctx, base, c.den))
        num_acc = base.ring_const(0)
        for exp, v in c.num.coeffs.items():
            weight = v * dirichlet_integral(l, exp[:l])
            if not weight:
                continue
            tail = exp[l:]
            mono_poly = base.ring_const(weight)
            for name, k in zip(base.even_vars, tail):
                if k:
                    mono_poly = mono_poly * base.ring_var(name) ** k
            num_acc = num_acc + mono_poly
        coeff = num_acc / den
        acc = acc + DiffForm(base, {rest: coeff})
    return acc


def _drop_simplex_vars(src: DGContext, base: DGContext, poly):
    from .exactalg import MultiPoly
    l = len(src.simplex_vars)
    coeffs = {}
    for exp, v in poly.coeffs.items():
        if any(exp[:l]):
            raise DimensionMismatch("simplex variable in a denominator")
        coeffs[exp[l:]] = v
    return MultiPoly(base.even_vars, coeffs)


# -- finite simplicial sets --------------------------------------------------


class FiniteSimplicialSet:
    """Nondegenerate simplices with face maps, dimensions bounded.

    Only regular sets are supported: each face of a nondegenerate
    simplex must itself be nondegenerate, so the face maps are total on
    the stored simplices.  `vertices` optionally records vertex tuples
    for subsets of a standard simplex, which the comparison map uses.
    """

    def __init__(self, name: str, simplices: dict, faces: dict,
                 vertices: dict | None = None):
        self.name = name
        self.simplices = dict(simplices)          # id -> dimension
        self.faces = {k: tuple(v) for k, v in faces.items()}
        self.vertices = dict(vertices) if vertices else None
        self._validate()

    def _validate(self):
        for sid, dim in self.simplices.items():
            if not isinstance(dim, int) or dim < 0:
                raise ParseError(f"bad dimension for simplex {sid!r}")
            if dim == 0:
                if sid in self.faces:
                    raise ParseError(f"vertex {sid!r} lists faces")
                continue
            fs = self.faces.get(sid)
            if fs is None or len(fs) != dim + 1:
                raise ParseError(
                    f"simplex {sid!r} of dimension {dim} needs {dim + 1} faces")
            for fid in fs:
                fdim = self.simplices.get(fid)
                if fdim is None:
                    raise ParseError(f"unknown face {fid!r} of {sid!r}")
                if fdim != dim - 1:
                    raise ParseError(
                        f"face {fid!r} of {sid!r} has dimension {fdim}")
        # d_i d_j = d_{j-1} d_i for i < j
        for sid, dim in self.simplices.items():
            if dim < 2:
                continue
            for j in range(1, dim + 1):
                for i in range(j):
                    left = self.face(self.face(sid, j), i)
                    right = self.face(self.face(sid, i), j - 1)
                    if left != right:
                        raise ParseError(
                            f"simplicial identity fails at {sid!r} "
                            f"(i={i}, j={j})")

    @property
    def dimension(self) -> int:
        return max(self.simplices.values(), default=0)

    def simplices_of(self, q: int) -> list[str]:
        return sorted(s for s, d in self.simplices.items() if d == q)

    def dim_of(self, sid: str) -> int:
        return self.simplices[sid]

    def face(self, sid: str, i: int) -> str:
        return self.faces[sid][i]

    def subface(self, sid: str, keep) -> str:
        """Face spanned by the given vertex positions (sorted)."""
        dim = self.simplices[sid]
        drop = sorted(set(range(dim + 1)) - set(keep), reverse=True)
        for i in drop:
            sid = self.face(sid, i)
        return sid

    def front_face(self, sid: str, p: int) -> str:
        return self.subface(sid, range(p + 1))

    def back_face(self, sid: str, q: int) -> str:
        dim = self.simplices[sid]
        return self.subface(sid, range(dim - q, dim + 1))

    def vertex_tuple(self, sid: str) -> tuple[int, ...]:
        if self.vertices is None or sid not in self.vertices:
            raise DimensionMismatch(
                f"{self.name}: no vertex coordinates for {sid!r}")
        return tuple(self.vertices[sid])

    def __eq__(self, other):
        return (isinstance(other, FiniteSimplicialSet)
                and self.simplices == other.simplices
                and self.faces == other.faces)

    # -- serialization -------------------------------------------------

    def to_json(self) -> dict:
        data = {"name": self.name,
                "simplices": dict(self.simplices),
                "faces": {k: list(v) for k, v in self.faces.items()}}
        if self.vertices is not None:
            data["vertices"] = {k: list(v) for k, v in self.vertices.items()}
        return data

    @classmethod
    def from_json(cls, data) -> "FiniteSimplicialSet":
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as exc:
                raise ParseError(f"bad JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ParseError("simplicial set description must be an object")
        try:
            name = data.get("name", "unnamed")
            simplices = {str(k): int(v)
                         for k, v in data["simplices"].items()}
            faces = {str(k): [str(x) for x in v]
                     for k, v in data.get("faces", {}).items()}
            vertices = data.get("vertices")
            if vertices is not None:
                vertices = {str(k): tuple(int(x) for x in v)
                            for k, v in vertices.items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad simplicial set description: {exc}") from None
        return cls(name, simplices, faces, vertices)


def _subset_id(vs) -> str:
    return "".join(str(v) for v in vs)


def _subsets_sset(name: str, n: int, top: bool) -> FiniteSimplicialSet:
    import itertools
    simplices, faces, vertices = {}, {}, {}
    max_size = n + 1 if top else n
    for size in range(1, max_size + 1):
        for vs in itertools.combinations(range(n + 1), size):
            sid = _subset_id(vs)
            simplices[sid] = size - 1
            vertices[sid] = vs
            if size > 1:
                faces[sid] = [_subset_id(vs[:i] + vs[i + 1:])
                              for i in range(size)]
    return FiniteSimplicialSet(name, simplices, faces, vertices)


@lru_cache(maxsize=None)
def standard_simplex_sset(n: int) -> FiniteSimplicialSet:
    """The standard n-simplex: nonempty vertex subsets of {0..n}."""
    if n > 9:
        raise DimensionMismatch("vertex-digit simplex ids stop at dimension 9")
    return _subsets_sset(f"simplex-{n}", n, top=True)


@lru_cache(maxsize=None)
def boundary_simplex_sset(n: int) -> FiniteSimplicialSet:
    """The boundary of the n-simplex (all proper faces)."""
    if n > 9:
        raise DimensionMismatch("vertex-digit simplex ids stop at dimension 9")
    if n < 1:
        raise DimensionMismatch("the 0-simplex has empty boundary")
    return _subsets_sset(f"boundary-{n}", n, top=False)


@lru_cache(maxsize=None)
def disjoint_points(k: int) -> FiniteSimplicialSet:
    return FiniteSimplicialSet(f"points-{k}",
                               {f"p{i}": 0 for i in range(k)}, {})


# -- normalized cochains -----------------------------------------------------


class Cochain:
    """Rational cochain on the nondegenerate q-simplices of a set.

    Normalization is implicit: degenerate simplices are never stored,
    and the cochain is zero on them.
    """

    __slots__ = ("sset", "degree", "values")

    def __init__(self, sset: FiniteSimplicialSet, degree: int, values=None):
        self.sset = sset
        self.degree = degree
        self.values = {}
        for sid, v in (values or {}).items():
            if sset.simplices.get(sid) != degree:
                raise DimensionMismatch(
                    f"{sid!r} is not a {degree}-simplex of {sset.name}")
            v = rat(v)
            if v:
                self.values[sid] = v

    def __call__(self, sid: str) -> Fraction:
        return self.values.get(sid, Fraction(0))

    def is_zero(self) -> bool:
        return not self.values

    def _check(self, other: "Cochain"):
        if self.sset != other.sset:
            raise ContextMismatch("cochains on different simplicial sets")

    def __add__(self, other: "Cochain") -> "Cochain":
        self._check(other)
        if self.degree != other.degree:
            raise DimensionMismatch("cochain degrees differ")
        vals = dict(self.values)
        for sid, v in other.values.items():
            vals[sid] = vals.get(sid, Fraction(0)) + v
        return Cochain(self.sset, self.degree, vals)

    def __neg__(self):
        return Cochain(self.sset, self.degree,
                       {s: -v for s, v in self.values.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Cochain":
        c = rat(c)
        return Cochain(self.sset, self.degree,
                       {s: c * v for s, v in self.values.items()})

    def __eq__(self, other):
        return (isinstance(other, Cochain) and self.sset == other.sset
                and self.degree == other.degree
                and self.values == other.values)

    def coboundary(self) -> "Cochain":
        """Alternating sum of face restrictions, one degree up."""
        q = self.degree + 1
        vals = {}
        for sid in self.sset.simplices_of(q):
            total = Fraction(0)
            for i in range(q + 1):
                v = self(self.sset.face(sid, i))
                total += v if i % 2 == 0 else -v
            if total:
                vals[sid] = total
        return Cochain(self.sset, q, vals)

    def render(self) -> str:
        from .exactalg import format_rational
        if not self.values:
            return "0"
        return " + ".join(f"{format_rational(v)}*<{s}>"
                          for s, v in sorted(self.values.items()))

    def __repr__(self):
        return f"Cochain(deg {self.degree}: {self.render()})"


def aw_product(a: Cochain, b: Cochain) -> Cochain:
    """Front/back-face cochain product (associative, not commutative).

    On a (p+q)-simplex the value is a on the first p+1 vertices times
    b on the last q+1.
    """
    a._check(b)
    p, q = a.degree, b.degree
    vals = {}
    for sid in a.sset.simplices_of(p + q):
        v = a(a.sset.front_face(sid, p)) * b(b.sset.back_face(sid, q))
        if v:
            vals[sid] = v
    return Cochain(a.sset, p + q, vals)


def rho(form: DiffForm, n: int | None = None) -> Cochain:
    """Integrate a form over every face of the standard simplex.

    Sends a degree-q form on the n-simplex to the q-cochain whose value
    on a face is the integral of the pullback; this is a chain map.
    """
    if n is None:
        n = len(form.ctx.simplex_vars)
    q = form.degree()
    sset = standard_simplex_sset(n)
    vals = {}
    for sid in sset.simplices_of(q):
        sigma = DeltaMorphism(q, n, sset.vertex_tuple(sid))
        vals[sid] = integrate_over_simplex(pullback_along(sigma, form), q)
    return Cochain(sset, q, vals)

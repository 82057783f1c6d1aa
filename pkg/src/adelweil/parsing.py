"""Input formats: the series grammar and the JSON file schemas.

The expression grammar covers rational constants (7, 3/2), variable
names, +, -, *, ^ and parentheses; multiplication is always explicit.
Everything a file can contain parses through here, so malformed input
surfaces as ParseError uniformly.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

from .errors import ParseError
from .exactalg import MultiPoly, RingMatrix, parse_rational
from .dgforms import InvariantPolynomial
from .adelic import Chain, ChartModel
from .residues import GeneralizedFraction, LocalZeroData
from .scenarios import Scenario
from .simplicial import FiniteSimplicialSet

_TOKEN = re.compile(r"(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_]\w*)"
                    r"|(?P<op>[-+*^()])")


def _tokenize(text: str) -> list:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"bad character {text[pos]!r} in {text!r}")
        pos = m.end()
        if m.group("num"):
            out.append(parse_rational(m.group("num")))
        elif m.group("name"):
            out.append(m.group("name"))
        else:
            out.append(m.group("op"))
    return out


class _Parser:
    def __init__(self, tokens: list, vars: tuple[str, ...]):
        self.toks = tokens
        self.pos = 0
        self.vars = vars

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expr(self) -> MultiPoly:
        acc = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self) -> MultiPoly:
        acc = self.factor()
        while self.peek() == "*":
            self.take()
            acc = acc * self.factor()
        return acc

    def factor(self) -> MultiPoly:
        if self.peek() == "-":
            self.take()
            return -self.factor()
        base = self.atom()
        if self.peek() == "^":
            self.take()
            e = self.take()
            if not isinstance(e, Fraction) or e.denominator != 1 or e < 0:
                raise ParseError(f"exponent must be a natural number, got {e}")
            return base ** int(e)
        return base

    def atom(self) -> MultiPoly:
        tok = self.take()
        if isinstance(tok, Fraction):
            return MultiPoly.const(self.vars, tok)
        if tok == "(":
            inner = self.expr()
            if self.take() != ")":
                raise ParseError("unbalanced parentheses")
            return inner
        if isinstance(tok, str) and tok not in "+-*^()":
            if tok not in self.vars:
                raise ParseError(f"unknown variable {tok!r} "
                                 f"(expected one of {self.vars})")
            return MultiPoly.var(self.vars, tok)
        raise ParseError(f"unexpected token {tok!r}")


def parse_polynomial(text: str, vars) -> MultiPoly:
    vars = tuple(vars)
    parser = _Parser(_tokenize(text), vars)
    if not parser.toks:
        raise ParseError("empty expression")
    out = parser.expr()
    if parser.pos != len(parser.toks):
        raise ParseError(f"trailing input at {parser.toks[parser.pos]!r}")
    return out


def parse_invariant_text(text: str, r: int) -> InvariantPolynomial:
    """An invariant polynomial written in c1..cr."""
    vars = tuple(f"c{i}" for i in range(1, r + 1))
    poly = parse_polynomial(text, vars)
    return InvariantPolynomial(r, dict(poly.coeffs))


def load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from None


def _require(data: dict, key: str, where: str):
    if not isinstance(data, dict) or key not in data:
        raise ParseError(f"missing key {key!r} in {where}")
    return data[key]


def _var_tuple(value, where: str) -> tuple:
    if not isinstance(value, (list, tuple)) or \
            not all(isinstance(v, str) for v in value):
        raise ParseError(f"{where}: variables must be a list of names")
    return tuple(value)


def fraction_from_json(data: dict) -> GeneralizedFraction:
    vars = _var_tuple(_require(data, "vars", "fraction"), "fraction")
    num = parse_polynomial(_require(data, "numerator", "fraction"), vars)
    dens = [parse_polynomial(d, vars)
            for d in _require(data, "denominators", "fraction")]
    return GeneralizedFraction(vars, num, tuple(dens))


def _matrix_from_json(rows, vars) -> RingMatrix:
    return RingMatrix([[parse_polynomial(x, vars) for x in row]
                       for row in rows])


def chart_from_json(data: dict) -> ChartModel:
    vars = _var_tuple(_require(data, "vars", "chart"), "chart")
    rank = _require(data, "rank", "chart")
    frames = {lab: _matrix_from_json(rows, vars)
              for lab, rows in _require(data, "frames", "chart").items()}
    points = {}
    for lab, pt in _require(data, "points", "chart").items():
        points[lab] = (None if pt is None else
                       {v: parse_rational(c) for v, c in pt.items()})
    a = data.get("a")
    if a is not None:
        a = [parse_polynomial(x, vars) for x in a]
    lift = data.get("lift")
    if lift is not None:
        lift = _matrix_from_json(lift, vars)
    return ChartModel(vars, rank, frames, points, a, lift)


def scenario_from_json(data: dict) -> Scenario:
    name = _require(data, "name", "scenario")
    n = _require(data, "n", "scenario")
    r = _require(data, "r", "scenario")
    if not isinstance(n, int) or not isinstance(r, int):
        raise ParseError("scenario: n and r must be integers")
    zeros = {}
    for k, z in enumerate(_require(data, "zeros", "scenario")):
        label = z.get("label", f"p{k}")
        vars = _var_tuple(_require(z, "coords", f"zero {label}"),
                          f"zero {label}")
        a = tuple(parse_polynomial(x, vars)
                  for x in _require(z, "a", f"zero {label}"))
        lift = _matrix_from_json(_require(z, "lambda", f"zero {label}"), vars)
        zeros[label] = LocalZeroData(vars, r, a, lift)
    scn = Scenario(
        name=name, n=n, r=r, zeros=zeros,
        expected=(parse_rational(data["expected"])
                  if "expected" in data else None),
        expected_poly=data.get("expected_poly"),
        provenance=data.get("provenance", ""),
    )
    if "chart" in data:
        scn.chart = chart_from_json(data["chart"])
    if "curve" in data:
        cv = data["curve"]
        scn.curve = {
            "degree": _require(cv, "degree", "curve"),
            "section": parse_polynomial(_require(cv, "section", "curve"),
                                        ("f",)),
        }
        if "infinity_chart" in cv:
            scn.curve["infinity_chart"] = cv["infinity_chart"]
    if "whitney" in data:
        w = data["whitney"]
        sub = chart_from_json(_require(w, "sub", "whitney"))
        quot = chart_from_json(_require(w, "quot", "whitney"))
        mixing = {lab: _matrix_from_json(rows, sub.base_vars)
                  for lab, rows in _require(w, "mixing", "whitney").items()}
        chain = Chain(tuple(_require(w, "chain", "whitney")))
        scn.whitney = (sub, quot, mixing, chain)
    return scn


def sset_from_json(data: dict) -> FiniteSimplicialSet:
    return FiniteSimplicialSet.from_json(data)

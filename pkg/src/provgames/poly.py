"""Exact multivariate provenance polynomials and their quotient variants.

All kinds share one representation: a canonical mapping from monomials to
coefficients.  A kind descriptor says which quotient is in force (drop
coefficients, cap exponents, erase complementary pairs, keep an absorption
antichain, truncate by total degree).  Values are immutable.
"""

from dataclasses import dataclass

from .errors import DualityViolated, IllegalProjection, KindMismatch, ProvError
from .infinity import INF, ext_add
from .monomials import (
    ONE_MONOMIAL,
    Monomial,
    format_monomial,
    negate_token,
    normalize_antichain,
    sort_monomials,
)


@dataclass(frozen=True)
class PolyKind:
    """Which quotient of N[X u ~X] a polynomial lives in."""

    name: str
    coefficients: bool = True
    multilinear: bool = False
    antichain: bool = False
    dual: bool = False
    inf_exponents: bool = False
    inf_coefficients: bool = False
    degree_bound: int | None = None

    def __str__(self):
        if self.degree_bound is not None:
            return f"{self.name}(D={self.degree_bound})"
        return self.name


NATPOLY = PolyKind("natpoly")
BOOLPOLY = PolyKind("boolpoly", coefficients=False)
WHYPOLY = PolyKind("whypoly", coefficients=False, multilinear=True)
POSBOOL = PolyKind("posbool", coefficients=False, multilinear=True, antichain=True)
SORP = PolyKind("sorp", coefficients=False, antichain=True)
SORPINF = PolyKind("sorpinf", coefficients=False, antichain=True, inf_exponents=True)
DUALNAT = PolyKind("dualnat", dual=True)
SORPINFDUAL = PolyKind(
    "sorpinfdual", coefficients=False, antichain=True, dual=True, inf_exponents=True
)


def trunc_kind(degree_bound, dual=False):
    """Degree-truncated stand-in for the power series N^inf[[X]]."""
    return PolyKind(
        "seriesdual" if dual else "series",
        inf_coefficients=True,
        dual=dual,
        degree_bound=degree_bound,
    )


def _coeff_mul(a, b):
    if a == 0 or b == 0:
        return 0
    if a is INF or b is INF:
        return INF
    return a * b


class Polynomial:
    """Canonical-form provenance value of a fixed kind."""

    __slots__ = ("kind", "monos", "truncated")

    def __init__(self, kind, monos, truncated=False):
        canon, cut = _canonicalize(kind, monos)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "monos", canon)
        object.__setattr__(self, "truncated", truncated or cut)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def zero(cls, kind):
        return cls(kind, {})

    @classmethod
    def one(cls, kind):
        return cls(kind, {ONE_MONOMIAL: 1})

    @classmethod
    def token(cls, kind, name):
        return cls(kind, {Monomial({name: 1}): 1})

    @classmethod
    def from_monomial(cls, kind, mono, coeff=1):
        return cls(kind, {mono: coeff})

    @property
    def is_zero(self):
        return not self.monos

    @property
    def is_one(self):
        return self.monos == {ONE_MONOMIAL: 1}

    def coefficient(self, mono):
        return self.monos.get(mono, 0)

    def __eq__(self, other):
        # The truncated marker is metadata, not part of the value.
        return (
            isinstance(other, Polynomial)
            and self.kind == other.kind
            and self.monos == other.monos
        )

    def __hash__(self):
        return hash((self.kind, frozenset(self.monos.items())))

    def _check_kind(self, other):
        if not isinstance(other, Polynomial):
            raise KindMismatch(f"cannot combine polynomial with {type(other).__name__}")
        if self.kind != other.kind:
            raise KindMismatch(f"kind mismatch: {self.kind} vs {other.kind}")

    def __add__(self, other):
        self._check_kind(other)
        merged = dict(self.monos)
        for m, c in other.monos.items():
            merged[m] = ext_add(merged.get(m, 0), c)
        return Polynomial(self.kind, merged, self.truncated or other.truncated)

    def __mul__(self, other):
        self._check_kind(other)
        out = {}
        for m1, c1 in self.monos.items():
            for m2, c2 in other.monos.items():
                m = m1.mul(m2)
                out[m] = ext_add(out.get(m, 0), _coeff_mul(c1, c2))
        return Polynomial(self.kind, out, self.truncated or other.truncated)

    def cap_exponents(self, threshold):
        """Saturation step: exponents >= threshold become INF."""
        return Polynomial(
            self.kind,
            {m.cap_at(threshold): c for m, c in self.monos.items()},
            self.truncated,
        )

    def cap_coefficients(self, threshold):
        """Saturation step: coefficients >= threshold become INF."""
        return Polynomial(
            self.kind,
            {m: (INF if (c is INF or c >= threshold) else c) for m, c in self.monos.items()},
            self.truncated,
        )

    def __repr__(self):
        return f"<{self.kind}: {format_poly(self)}>"


def _canonicalize(kind, monos):
    if isinstance(monos, Polynomial):
        monos = monos.monos
    staged = {}
    for m, c in monos.items():
        if c == 0:
            continue
        if kind.dual and m.has_complementary_pair():
            continue
        if kind.multilinear:
            m = m.cap_linear()
        if not kind.inf_exponents and any(e is INF for _, e in m):
            raise ProvError(f"kind {kind} does not admit infinite exponents")
        if c is INF:
            if not kind.inf_coefficients:
                raise ProvError(f"kind {kind} does not admit infinite coefficients")
        elif not isinstance(c, int):
            raise ProvError(f"kind {kind} needs integer coefficients, got {c!r}")
        staged[m] = ext_add(staged.get(m, 0), c)
    truncated = False
    if kind.degree_bound is not None:
        kept = {}
        for m, c in staged.items():
            d = m.degree()
            if d is INF or d > kind.degree_bound:
                truncated = True
            else:
                kept[m] = c
        staged = kept
    if not kind.coefficients:
        staged = {m: 1 for m in staged}
    if kind.antichain:
        staged = {m: 1 for m in normalize_antichain(staged)}
    return staged, truncated


# --- projections between kinds ------------------------------------------

_LEGAL_PROJECTIONS = {
    "natpoly": {"boolpoly", "whypoly", "posbool", "sorp", "sorpinf"},
    "boolpoly": {"whypoly", "posbool", "sorp", "sorpinf"},
    "whypoly": {"posbool"},
    "sorp": {"sorpinf"},
    "dualnat": {"sorpinfdual"},
}


def project(poly, target_kind):
    """Canonical image of `poly` under the quotient onto `target_kind`."""
    if poly.kind == target_kind:
        return poly
    if target_kind.name not in _LEGAL_PROJECTIONS.get(poly.kind.name, ()):
        raise IllegalProjection(f"no quotient map {poly.kind} -> {target_kind}")
    return Polynomial(target_kind, dict(poly.monos), poly.truncated)


# --- specialization into application semirings ---------------------------


def specialize(poly, handle, assignment):
    """Homomorphic image of `poly` under token -> value, evaluated in `handle`.

    For dual kinds the assignment must send every complementary pair to
    values with product 0.
    """
    if poly.kind.dual:
        for token in assignment:
            other = negate_token(token)
            if other in assignment:
                if handle.mul(assignment[token], assignment[other]) != handle.zero:
                    raise DualityViolated(
                        f"tokens {token!r} and {other!r} map to values with nonzero product"
                    )
    total = handle.zero
    for m, c in poly.monos.items():
        val = handle.one
        for t, e in m:
            if t not in assignment:
                raise ProvError(f"token {t!r} has no assigned value")
            v = assignment[t]
            val = handle.mul(val, handle.pow_inf(v) if e is INF else handle.power(v, e))
        total = handle.add(total, handle.times(c, val))
    return total


# --- truncated geometric series ------------------------------------------


def series_geom(numerator, ratio, degree_bound):
    """numerator * (1 + ratio + ratio^2 + ...) truncated at total degree D.

    A ratio with a constant term feeds every reachable monomial forever, so
    the coefficients that are still growing when the degree filter stops
    producing new monomials are pinned to infinity.
    """
    kind = trunc_kind(degree_bound, dual=numerator.kind.dual)
    base = Polynomial(kind, dict(numerator.monos), numerator.truncated)
    ratio = Polynomial(kind, dict(ratio.monos), ratio.truncated)
    if base.is_zero:
        return base
    acc = base
    budget = 2 * (degree_bound + 2)
    for _ in range(budget):
        nxt = base + ratio * acc
        if nxt == acc:
            # nxt, not acc: only nxt carries the truncation marker from the
            # final (dropped) multiplication.
            return nxt
        acc = nxt
    for _ in range(budget):
        nxt = base + ratio * acc
        moving = {
            m for m in set(acc.monos) | set(nxt.monos)
            if acc.coefficient(m) != nxt.coefficient(m)
        }
        if not moving:
            break
        acc = Polynomial(
            kind,
            {m: (INF if m in moving else c) for m, c in nxt.monos.items()},
            nxt.truncated,
        )
    return acc


# --- text syntax ----------------------------------------------------------


def format_poly(poly):
    if poly.is_zero:
        return "0"
    parts = []
    for m in sort_monomials(poly.monos):
        c = poly.monos[m]
        if m.is_one:
            parts.append(str(c))
        elif c == 1:
            parts.append(format_monomial(m))
        else:
            parts.append(f"{c}*{format_monomial(m)}")
    return " + ".join(parts)


class _PolyParser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def error(self, message):
        raise ProvError(f"{message} in polynomial {self.text!r} at offset {self.pos}")

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def eat(self, char):
        if self.peek() == char:
            self.pos += 1
            return True
        return False

    def ident(self):
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (
            self.text[self.pos].isalnum() or self.text[self.pos] == "_"
        ):
            self.pos += 1
        if start == self.pos:
            self.error("expected identifier or number")
        return self.text[start : self.pos]

    def exponent(self):
        word = self.ident()
        if word == "inf":
            return INF
        if word.isdigit():
            return int(word)
        self.error(f"bad exponent {word!r}")

    def term(self):
        coeff = 1
        exps = {}
        while True:
            self.skip_ws()
            ch = self.peek()
            if ch.isdigit():
                start = self.pos
                while self.pos < len(self.text) and self.text[self.pos].isdigit():
                    self.pos += 1
                coeff = _coeff_mul(coeff, int(self.text[start : self.pos]))
            else:
                neg = self.eat("~")
                name = self.ident()
                if not neg and name == "inf":
                    coeff = INF
                else:
                    token = ("~" + name) if neg else name
                    e = self.exponent() if self.eat("^") else 1
                    exps[token] = ext_add(exps.get(token, 0), e)
            if not self.eat("*"):
                return Monomial(exps), coeff

    def parse(self, kind):
        monos = {}
        while True:
            m, c = self.term()
            monos[m] = ext_add(monos.get(m, 0), c)
            if not self.eat("+"):
                break
        self.skip_ws()
        if self.pos != len(self.text):
            self.error("trailing input")
        # A bare "0" term parses as coefficient 0, which canonicalizes away.
        return Polynomial(kind, monos)


def parse_poly(kind, text):
    """Parse canonical polynomial syntax, e.g. '2*s^2*t + s*~p + t^inf'."""
    return _PolyParser(text).parse(kind)

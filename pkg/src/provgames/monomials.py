"""Monomials with exponents in N u {inf} and the absorption order.

A monomial maps tokens to exponents; absent tokens have exponent 0.  The
absorption order follows the convention that smaller exponents absorb:
m1 is below m2 exactly when m1 has pointwise *larger* exponents.  Negative
tokens of a dual pair are written with a leading '~'.
"""

from .infinity import INF, ext_add, ext_le

NEG_PREFIX = "~"


def negate_token(token):
    """The complementary token: p <-> ~p."""
    if token.startswith(NEG_PREFIX):
        return token[len(NEG_PREFIX):]
    return NEG_PREFIX + token


def base_token(token):
    return token[len(NEG_PREFIX):] if token.startswith(NEG_PREFIX) else token


class Monomial:
    """Immutable product of token powers; exponents are ints >= 1 or INF."""

    __slots__ = ("exps",)

    def __init__(self, exps=()):
        if isinstance(exps, dict):
            exps = exps.items()
        cleaned = tuple(sorted((t, e) for t, e in exps if e != 0))
        for _, e in cleaned:
            if e is not INF and (not isinstance(e, int) or e < 0):
                raise ValueError(f"bad exponent {e!r}")
        object.__setattr__(self, "exps", cleaned)

    def __setattr__(self, name, value):
        raise AttributeError("Monomial is immutable")

    def __eq__(self, other):
        return isinstance(other, Monomial) and self.exps == other.exps

    def __hash__(self):
        return hash(self.exps)

    def __iter__(self):
        return iter(self.exps)

    def exponent(self, token):
        for t, e in self.exps:
            if t == token:
                return e
        return 0

    def tokens(self):
        return tuple(t for t, _ in self.exps)

    @property
    def is_one(self):
        return not self.exps

    def degree(self):
        """Total degree; INF if any exponent is infinite."""
        total = 0
        for _, e in self.exps:
            total = ext_add(total, e)
        return total

    def mul(self, other):
        merged = dict(self.exps)
        for t, e in other.exps:
            merged[t] = ext_add(merged.get(t, 0), e)
        return Monomial(merged)

    def has_complementary_pair(self):
        toks = set(self.tokens())
        return any(negate_token(t) in toks for t in toks)

    def cap_linear(self):
        """Image under the exponent-dropping quotient (all exponents -> 1)."""
        return Monomial((t, 1) for t, _ in self.exps)

    def cap_at(self, threshold):
        """Exponents >= threshold become INF (gfp saturation step)."""
        return Monomial(
            (t, INF if (e is INF or e >= threshold) else e) for t, e in self.exps
        )

    def __repr__(self):
        return f"Monomial({format_monomial(self)})"


ONE_MONOMIAL = Monomial()


def mono_absorbs(m1, m2):
    """True iff m2 absorbs m1, i.e. m2 has pointwise <= exponents (m1 <= m2)."""
    m1_exps = dict(m1.exps)
    for t, e in m2.exps:
        if not ext_le(e, m1_exps.get(t, 0)):
            return False
    return True


def normalize_antichain(monomials):
    """Keep only the absorption-maximal monomials of the given collection."""
    pool = list(dict.fromkeys(monomials))
    keep = []
    for m in pool:
        if any(m2 is not m and mono_absorbs(m, m2) and not mono_absorbs(m2, m) for m2 in pool):
            continue
        if any(m == k for k in keep):
            continue
        keep.append(m)
    return set(keep)


def _degree_sort_key(m):
    d = m.degree()
    return (
        1 if d is INF else 0,
        d if d is not INF else 0,
        tuple((t, 1 if e is INF else 0, e if e is not INF else 0) for t, e in m.exps),
    )


def sort_monomials(monomials):
    """Canonical display order: (total degree, lexicographic)."""
    return sorted(monomials, key=_degree_sort_key)


def format_monomial(m):
    if m.is_one:
        return "1"
    parts = []
    for t, e in m.exps:
        if e == 1:
            parts.append(t)
        elif e is INF:
            parts.append(f"{t}^inf")
        else:
            parts.append(f"{t}^{e}")
    return "*".join(parts)

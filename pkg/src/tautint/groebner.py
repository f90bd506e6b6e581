"""Buchberger engine over QQ with lex, grevlex and block elimination orders.

Internal workhorse for the equivariant-dual pipeline.  Polynomials here are
dicts mapping fixed-width exponent tuples to rational coefficients (ints or
Fractions); all basis elements are kept monic.  The pair-update logic
follows the classical Gebauer-Moeller criteria.  Determinism: selection and
insertion use explicit total orders, never hash iteration order.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Sequence

GPoly = dict  # tuple[int, ...] -> int | Fraction


class GroebnerError(Exception):
    pass


# -- monomial orders ---------------------------------------------------------

def lex_key(mono):
    return mono


def grevlex_key(mono):
    return (sum(mono), tuple(-e for e in reversed(mono)))


def make_block_order(nelim: int) -> Callable:
    """Elimination order: grevlex on the first nelim variables dominates
    grevlex on the rest; any monomial containing an eliminated variable is
    larger than any without."""

    def key(mono):
        return (grevlex_key(mono[:nelim]), grevlex_key(mono[nelim:]))

    return key


def order_by_name(name: str) -> Callable:
    if name == "lex":
        return lex_key
    if name == "grevlex":
        return grevlex_key
    raise GroebnerError(f"unknown monomial order {name!r}")


# -- polynomial helpers -------------------------------------------------------

def p_normalize(p: GPoly) -> GPoly:
    out = {}
    for m, c in p.items():
        c = Fraction(c)
        if c != 0:
            out[m] = c
    return out


def leading_term(p: GPoly, key):
    lm = max(p, key=key)
    return lm, p[lm]


def mono_div(a, b):
    """a / b if b divides a, else None."""
    out = []
    for x, y in zip(a, b):
        if x < y:
            return None
        out.append(x - y)
    return tuple(out)


def mono_lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def mono_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


def p_sub_scaled(p: GPoly, q: GPoly, mono, coeff) -> GPoly:
    """p - coeff * x^mono * q."""
    out = dict(p)
    for m, c in q.items():
        key = mono_mul(m, mono)
        acc = out.get(key, 0) - coeff * c
        if acc == 0:
            out.pop(key, None)
        else:
            out[key] = acc
    return out


def make_monic(p: GPoly, key) -> GPoly:
    if not p:
        return p
    _, lc = leading_term(p, key)
    if lc == 1:
        return p
    inv = Fraction(1) / Fraction(lc)
    return {m: c * inv for m, c in p.items()}


def normal_form(p: GPoly, basis: Sequence[GPoly], key) -> GPoly:
    """Fully reduce p modulo the (monic) basis."""
    if not basis:
        return dict(p)
    lms = [max(g, key=key) for g in basis]
    remainder: GPoly = {}
    work = dict(p)
    while work:
        lm, lc = leading_term(work, key)
        reduced = False
        for g, glm in zip(basis, lms):
            quot = mono_div(lm, glm)
            if quot is not None:
                work = p_sub_scaled(work, g, quot, lc)
                reduced = True
                break
        if not reduced:
            remainder[lm] = lc
            del work[lm]
    return remainder


def spoly(f: GPoly, g: GPoly, key) -> GPoly:
    lmf, lcf = leading_term(f, key)
    lmg, lcg = leading_term(g, key)
    l = mono_lcm(lmf, lmg)
    out = p_sub_scaled({}, f, mono_div(l, lmf), Fraction(-1) / Fraction(lcf))
    out = p_sub_scaled(out, g, mono_div(l, lmg), Fraction(1) / Fraction(lcg))
    return out


def buchberger(gens: Iterable[GPoly], key) -> list:
    """Reduced Groebner basis (monic, sorted descending by leading monomial).

    Improved Buchberger with the Gebauer-Moeller pair criteria; the result
    is the unique reduced basis for the order, so the routine is idempotent.
    """
    f = [p_normalize(g) for g in gens]
    f = [g for g in f if g]
    if not f:
        return []

    # Interreduce the (monic) input.
    f = [make_monic(g, key) for g in f]
    while True:
        f2: list = []
        changed = False
        for p in f:
            r = normal_form(p, f2, key)
            if r:
                r = make_monic(r, key)
                f2.append(r)
            if r != p:
                changed = True
        f = f2
        if not changed:
            break
    f = sorted(f, key=lambda g: key(max(g, key=key)))

    basis: list = []       # indices into polys
    polys: list = list(f)
    pairs: set = set()

    def lm(i):
        return max(polys[i], key=key)

    def update(new_index: int):
        # Gebauer-Moeller update of the pair set on adding polys[new_index].
        nonlocal basis, pairs
        mh = lm(new_index)
        candidates = []
        for ig in basis:
            candidates.append(ig)
        d = []
        c = list(candidates)
        while c:
            ig = c.pop()
            mg = lm(ig)
            lcm_hg = mono_lcm(mh, mg)
            coprime = mono_mul(mh, mg) == lcm_hg

            def lcm_divides(other):
                m = mono_lcm(mh, lm(other))
                return mono_div(lcm_hg, m) is not None

            if coprime or (not any(lcm_divides(ic) for ic in c)
                           and not any(lcm_divides(ie) for (_, ie) in d)):
                d.append((new_index, ig))
        e = [(ih, ig) for (ih, ig) in d
             if mono_mul(mh, lm(ig)) != mono_lcm(mh, lm(ig))]
        new_pairs = set()
        for (i1, i2) in pairs:
            l12 = mono_lcm(lm(i1), lm(i2))
            if (mono_div(l12, mh) is None
                    or mono_lcm(lm(i1), mh) == l12
                    or mono_lcm(lm(i2), mh) == l12):
                new_pairs.add((i1, i2))
        new_pairs.update((min(a, b), max(a, b)) for a, b in e)
        pairs = new_pairs
        basis = [ig for ig in basis if mono_div(lm(ig), mh) is None]
        basis.append(new_index)

    for i in range(len(polys)):
        update(i)

    while pairs:
        pair = min(pairs, key=lambda ab: (key(mono_lcm(lm(ab[0]), lm(ab[1]))),
                                          ab))
        pairs.discard(pair)
        i1, i2 = pair
        s = spoly(polys[i1], polys[i2], key)
        ordered = sorted(basis, key=lambda ig: key(lm(ig)))
        h = normal_form(s, [polys[ig] for ig in ordered], key)
        if h:
            polys.append(make_monic(h, key))
            update(len(polys) - 1)

    # Minimalize and reduce.
    chosen = sorted(basis, key=lambda ig: key(lm(ig)))
    minimal = []
    for ig in chosen:
        if not any(mono_div(lm(ig), lm(other)) is not None
                   for other in minimal):
            minimal.append(ig)
    reduced = []
    for pos, ig in enumerate(minimal):
        others = [polys[other] for other in minimal if other != ig]
        r = normal_form(polys[ig], others, key)
        if r:
            reduced.append(make_monic(r, key))
    reduced.sort(key=lambda g: key(max(g, key=key)), reverse=True)
    return reduced


def eliminate(gens: Iterable[GPoly], nelim: int) -> list:
    """Generators of the elimination ideal: drop the first nelim variables.

    Returns polynomials over the remaining variables (exponent tuples
    shortened by nelim); they form a Groebner basis for the grevlex order
    on those variables.
    """
    key = make_block_order(nelim)
    gb = buchberger(gens, key)
    out = []
    for g in gb:
        if all(all(e == 0 for e in m[:nelim]) for m in g):
            out.append({m[nelim:]: c for m, c in g.items()})
    return out


def is_groebner(basis: Sequence[GPoly], key) -> bool:
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            if normal_form(spoly(basis[i], basis[j], key), basis, key):
                return False
    return True

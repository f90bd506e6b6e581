"""Exact sparse multivariate polynomials over a typed symbol alphabet.

Symbols come in six alphabets:

    Z        z_1, ..., z_k       residue variables
    LAMBDA   lam_1, ..., lam_n   equivariant weights (localisation oracle only)
    THETA    th_1, ..., th_r     Chern roots of the twisting bundle
    SEGRE_X  s_1, ..., s_n       Segre classes of the base variety
    CHERN_F  cF_1, ..., cF_r     Chern classes of the twisting bundle
    COORD    y_1, ..., y_N       coordinates of an ambient linear space
                                 (ideal-theoretic pipeline only)

Under the grading, z/lam/th/y symbols have degree 1 while s_i and cF_j carry
degree i and j respectively.

A polynomial maps monomials to nonzero rational coefficients; a monomial is
a tuple of (symbol, exponent) pairs sorted by symbol.  Coefficients are
arbitrary-precision rationals: plain ints where the value is integral,
fractions.Fraction otherwise.  Since ints and Fractions with denominator 1
hash and compare equal, the term map is canonical: two polynomials are equal
iff their term maps are equal.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

# Alphabet codes.  The numeric order (Z < LAMBDA < ... < COORD) fixes the
# canonical symbol ordering used in monomials and serialization.
Z, LAMBDA, THETA, SEGRE_X, CHERN_F, COORD = range(6)

_ALPHABET_NAMES = {Z: "z", LAMBDA: "lam", THETA: "th", SEGRE_X: "s",
                   CHERN_F: "cF", COORD: "y"}

Symbol = "tuple[int, int]"           # (alphabet, index), index >= 1
Mono = "tuple[tuple[tuple[int, int], int], ...]"
Coeff = Union[int, Fraction]


class ExactPolyError(Exception):
    """Base error for the polynomial layer."""


class NotThetaSymmetricError(ExactPolyError):
    """Raised when a theta-reduction is asked of an asymmetric polynomial."""


def z(i: int):
    return (Z, i)


def lam(i: int):
    return (LAMBDA, i)


def theta(j: int):
    return (THETA, j)


def segre(i: int):
    return (SEGRE_X, i)


def chern_f(j: int):
    return (CHERN_F, j)


def coord(i: int):
    return (COORD, i)


def symbol_name(sym) -> str:
    alphabet, index = sym
    return f"{_ALPHABET_NAMES[alphabet]}{index}"


def symbol_degree(sym) -> int:
    """Degree of a symbol under the grading (s_i and cF_j are degree i, j)."""
    alphabet, index = sym
    if alphabet in (SEGRE_X, CHERN_F):
        return index
    return 1


def _norm_coeff(c):
    """Canonicalize a rational coefficient: integral Fractions become ints."""
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def mono_mul(m1, m2):
    """Merge two sorted monomials, adding exponents."""
    if not m1:
        return m2
    if not m2:
        return m1
    out = []
    i = j = 0
    n1, n2 = len(m1), len(m2)
    while i < n1 and j < n2:
        s1, e1 = m1[i]
        s2, e2 = m2[j]
        if s1 == s2:
            out.append((s1, e1 + e2))
            i += 1
            j += 1
        elif s1 < s2:
            out.append(m1[i])
            i += 1
        else:
            out.append(m2[j])
            j += 1
    out.extend(m1[i:])
    out.extend(m2[j:])
    return tuple(out)


def mono_degree(m) -> int:
    return sum(e * symbol_degree(s) for s, e in m)


def mono_str(m) -> str:
    if not m:
        return "1"
    parts = []
    for sym, e in m:
        parts.append(symbol_name(sym) if e == 1 else f"{symbol_name(sym)}^{e}")
    return "*".join(parts)


def coeff_str(c) -> str:
    """Canonical rational string: "p" for integers, "p/q" otherwise."""
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def parse_coeff(text: str):
    """Parse "p" or "p/q" into a rational, rejecting floats."""
    return _norm_coeff(Fraction(text.strip()))


class _NonHomogeneous:
    def __repr__(self):
        return "NONHOMOGENEOUS"


#: Marker returned by graded_degree for inhomogeneous polynomials.
NONHOMOGENEOUS = _NonHomogeneous()


class MultiPoly:
    """Immutable sparse polynomial.  `terms` maps monomials to coefficients.

    Never mutate `terms` after construction; all operations return fresh
    instances, so values may be freely shared between threads.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for mono, c in terms.items():
                c = _norm_coeff(c)
                if c != 0:
                    clean[mono] = c
        self.terms = clean
        self._hash = None

    @staticmethod
    def _raw(terms) -> "MultiPoly":
        # Internal: terms already canonical (no zeros, normalized coeffs).
        p = MultiPoly.__new__(MultiPoly)
        p.terms = terms
        p._hash = None
        return p

    @staticmethod
    def zero() -> "MultiPoly":
        return MultiPoly._raw({})

    @staticmethod
    def const(c) -> "MultiPoly":
        c = _norm_coeff(c)
        if c == 0:
            return MultiPoly._raw({})
        return MultiPoly._raw({(): c})

    @staticmethod
    def var(sym, exp: int = 1, coeff=1) -> "MultiPoly":
        if exp < 0:
            raise ExactPolyError("negative exponent")
        coeff = _norm_coeff(coeff)
        if coeff == 0:
            return MultiPoly.zero()
        if exp == 0:
            return MultiPoly.const(coeff)
        return MultiPoly._raw({((sym, exp),): coeff})

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        other = _as_poly(other)
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for mono, c in other.terms.items():
            acc = out.get(mono, 0) + c
            if acc == 0:
                out.pop(mono, None)
            else:
                out[mono] = _norm_coeff(acc)
        return MultiPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = _norm_coeff(other)
            if other == 0:
                return MultiPoly.zero()
            if other == 1:
                return self
            return MultiPoly._raw(
                {m: _norm_coeff(c * other) for m, c in self.terms.items()})
        a, b = self.terms, other.terms
        if not a or not b:
            return MultiPoly.zero()
        if len(a) < len(b):
            a, b = b, a
        out = {}
        for mb, cb in b.items():
            for ma, ca in a.items():
                key = mono_mul(ma, mb)
                acc = out.get(key, 0) + ca * cb
                if acc == 0:
                    out.pop(key, None)
                else:
                    out[key] = acc
        for key in [k for k, v in out.items() if type(v) is Fraction]:
            out[key] = _norm_coeff(out[key])
        return MultiPoly._raw(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ExactPolyError("negative power")
        out = MultiPoly.const(1)
        for _ in range(e):
            out = out * self
        return out

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.const(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: t[0])

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, c in self.sorted_terms():
            cs = coeff_str(c)
            if mono == ():
                parts.append(cs)
            elif cs == "1":
                parts.append(mono_str(mono))
            elif cs == "-1":
                parts.append(f"-{mono_str(mono)}")
            else:
                parts.append(f"{cs}*{mono_str(mono)}")
        text = " + ".join(parts)
        return text.replace("+ -", "- ")

    def __repr__(self):
        return f"MultiPoly({self})"

    def symbols(self) -> set:
        out = set()
        for mono in self.terms:
            for sym, _ in mono:
                out.add(sym)
        return out

    def has_alphabet(self, alphabet: int) -> bool:
        return any(sym[0] == alphabet for mono in self.terms for sym, _ in mono)

    def max_exponent(self, sym) -> int:
        best = 0
        for mono in self.terms:
            for s, e in mono:
                if s == sym and e > best:
                    best = e
        return best

    def constant_term(self):
        return self.terms.get((), 0)

    def substitute(self, sym, value: "MultiPoly") -> "MultiPoly":
        """Substitute `value` for `sym` (exact; value may use any symbols)."""
        by_power: dict = {}
        for mono, c in self.terms.items():
            e = 0
            rest = []
            for s, ee in mono:
                if s == sym:
                    e = ee
                else:
                    rest.append((s, ee))
            key = tuple(rest)
            bucket = by_power.setdefault(e, {})
            acc = bucket.get(key, 0) + c
            if acc == 0:
                bucket.pop(key, None)
            else:
                bucket[key] = _norm_coeff(acc)
        out = MultiPoly.zero()
        vpow = MultiPoly.const(1)
        for e in range(0, (max(by_power) if by_power else 0) + 1):
            if e in by_power:
                out = out + MultiPoly._raw(by_power[e]) * vpow
            if e < (max(by_power) if by_power else 0):
                vpow = vpow * value
        return out

    def rename_symbols(self, mapping: Mapping) -> "MultiPoly":
        """Relabel symbols via `mapping` (symbols absent from it are kept)."""
        out = {}
        for mono, c in self.terms.items():
            merged: dict = {}
            for s, e in mono:
                s2 = mapping.get(s, s)
                merged[s2] = merged.get(s2, 0) + e
            key = tuple(sorted(merged.items()))
            acc = out.get(key, 0) + c
            if acc == 0:
                out.pop(key, None)
            else:
                out[key] = _norm_coeff(acc)
        return MultiPoly._raw(out)


def _as_poly(x) -> MultiPoly:
    if isinstance(x, MultiPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return MultiPoly.const(x)
    raise TypeError(f"cannot coerce {x!r} to MultiPoly")


def add(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """Ring addition in canonical form."""
    return a + b


def mul(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """Ring multiplication in canonical form."""
    return a * b


def coefficient_of(p: MultiPoly, sym, power: int) -> MultiPoly:
    """Coefficient of sym^power, viewing p as a polynomial in sym.

    The returned polynomial does not involve `sym`.
    """
    if power < 0:
        raise ExactPolyError("power must be >= 0")
    out = {}
    for mono, c in p.terms.items():
        e = 0
        rest = []
        for s, ee in mono:
            if s == sym:
                e = ee
            else:
                rest.append((s, ee))
        if e != power:
            continue
        key = tuple(rest)
        acc = out.get(key, 0) + c
        if acc == 0:
            out.pop(key, None)
        else:
            out[key] = _norm_coeff(acc)
    return MultiPoly._raw(out)


def split_by_power(p: MultiPoly, sym) -> dict:
    """Decompose p = sum_d sym^d * q_d; returns {d: q_d} with q_d sym-free."""
    buckets: dict = {}
    for mono, c in p.terms.items():
        e = 0
        rest = []
        for s, ee in mono:
            if s == sym:
                e = ee
            else:
                rest.append((s, ee))
        bucket = buckets.setdefault(e, {})
        key = tuple(rest)
        acc = bucket.get(key, 0) + c
        if acc == 0:
            bucket.pop(key, None)
        else:
            bucket[key] = _norm_coeff(acc)
    return {e: MultiPoly._raw(b) for e, b in buckets.items() if b}


def graded_degree(p: MultiPoly):
    """Total degree under the grading, or NONHOMOGENEOUS.

    deg z = deg lam = deg th = deg y = 1, deg s_i = i, deg cF_j = j.
    The zero polynomial reports degree 0.
    """
    degs = {mono_degree(m) for m in p.terms}
    if not degs:
        return 0
    if len(degs) > 1:
        return NONHOMOGENEOUS
    return degs.pop()


def elementary_symmetric(m: int, symbols: Sequence) -> MultiPoly:
    """Elementary symmetric polynomial e_m of the given symbols."""
    if m < 0 or m > len(symbols):
        raise ExactPolyError(
            f"elementary_symmetric: m={m} out of range 0..{len(symbols)}")
    return esym_list([MultiPoly.var(s) for s in symbols])[m]


def esym_list(values: Sequence[MultiPoly]) -> list:
    """All elementary symmetric polynomials e_0..e_n of a list of values."""
    es = [MultiPoly.const(1)]
    for v in values:
        es.append(MultiPoly.zero())
        for i in range(len(es) - 1, 0, -1):
            es[i] = es[i] + es[i - 1] * v
    return es


def _theta_indices(p: MultiPoly) -> int:
    best = 0
    for mono in p.terms:
        for (alphabet, index), _ in mono:
            if alphabet == THETA and index > best:
                best = index
    return best


def permute_theta(p: MultiPoly, perm: Mapping[int, int]) -> MultiPoly:
    mapping = {theta(i): theta(j) for i, j in perm.items()}
    return p.rename_symbols(mapping)


def is_theta_symmetric(p: MultiPoly, r: int | None = None) -> bool:
    """Whether p is invariant under all permutations of th_1..th_r.

    Checked by explicit comparison against the adjacent transpositions,
    which generate the symmetric group.
    """
    if r is None:
        r = _theta_indices(p)
    for i in range(1, r):
        if permute_theta(p, {i: i + 1, i + 1: i}) != p:
            return False
    return True


def reduce_theta_symmetric(p: MultiPoly, r: int | None = None) -> MultiPoly:
    """Rewrite a th-symmetric polynomial in cF symbols via e_j(th) = cF_j.

    Uses iterated subtraction of elementary-symmetric products (Gauss's
    algorithm): the lex-leading theta part th^a (a_1 >= a_2 >= ...) of the
    remainder is killed by c * prod_j e_j(th)^{a_j - a_{j+1}}, and the same
    product in cF symbols is emitted.  Substituting e_j(th) back for cF_j
    reproduces the input exactly.
    """
    if r is None:
        r = _theta_indices(p)
    if not is_theta_symmetric(p, r):
        raise NotThetaSymmetricError(
            f"polynomial is not symmetric in th_1..th_{r}")
    theta_syms = [theta(j) for j in range(1, r + 1)]
    e_polys = esym_list([MultiPoly.var(s) for s in theta_syms])
    out = MultiPoly.zero()
    rem = p
    while rem.terms:
        # Leading theta exponent vector (lex on (th_1, ..., th_r)).
        lead = None
        for mono in rem.terms:
            vec = [0] * r
            for (alphabet, index), e in mono:
                if alphabet == THETA:
                    vec[index - 1] = e
            vec = tuple(vec)
            if lead is None or vec > lead:
                lead = vec
        if lead == (0,) * r:
            out = out + rem
            break
        if any(lead[i] < lead[i + 1] for i in range(r - 1)):
            raise NotThetaSymmetricError(
                "leading theta exponents not weakly decreasing")
        coeff = rem
        for j, sym in enumerate(theta_syms):
            coeff = coefficient_of(coeff, sym, lead[j])
        mults = [lead[j] - (lead[j + 1] if j + 1 < r else 0) for j in range(r)]
        e_prod = MultiPoly.const(1)
        c_prod = MultiPoly.const(1)
        for j, mj in enumerate(mults):
            for _ in range(mj):
                e_prod = e_prod * e_polys[j + 1]
                c_prod = c_prod * MultiPoly.var(chern_f(j + 1))
        rem = rem - coeff * e_prod
        out = out + coeff * c_prod
    return out


def substitute_chern_back(p: MultiPoly, r: int) -> MultiPoly:
    """Replace each cF_j by e_j(th_1..th_r); section check for the reduction."""
    theta_syms = [theta(j) for j in range(1, r + 1)]
    e_polys = esym_list([MultiPoly.var(s) for s in theta_syms])
    out = p
    for j in range(1, r + 1):
        out = out.substitute(chern_f(j), e_polys[j])
    return out

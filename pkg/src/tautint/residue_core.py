"""Rational forms with affine-linear denominators and their iterated residues.

A ResidueForm denotes

    numerator / prod_i omega_i^{mult_i}

expanded in the asymptotic domain |z_1| << |z_2| << ... << |z_k|, each
omega_i an affine-linear form in the z variables (with coefficients that may
involve lam/th/s symbols in the constant part).  The residue in one variable
z_m is the coefficient of z_m^{-1} of the geometric-series expansion at
|z_m| -> infinity, times the orientation sign fixed so that fully iterating
over dz/(z_1...z_k) yields (-1)^k.

Every factor is expanded via

    1/omega^mu = sum_j binom(mu-1+j, j) (-1)^j rho^j / (a z_m)^{mu+j}

where omega = a*z_m + rho and rho involves only lower-index z variables, so
the class is closed under one-variable extraction and every residue here is
a finite exact computation: the expansion order needed is bounded a priori
by deg_{z_m}(numerator) + 1 - (total multiplicity in z_m).
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Sequence

from . import _packed
from .exact_poly import (LAMBDA, Z, MultiPoly, _norm_coeff, lam, mono_mul, z)


class ResidueError(Exception):
    """Raised on residue-precondition violations."""


@dataclass(frozen=True)
class LinearForm:
    """constant + sum_i zcoeffs[i-1] * z_i, with at least one nonzero zcoeff.

    The constant part may involve any non-Z symbols.
    """

    nvars: int
    zcoeffs: tuple
    constant: MultiPoly

    def __post_init__(self):
        if len(self.zcoeffs) != self.nvars:
            raise ResidueError("zcoeffs length must equal nvars")
        object.__setattr__(
            self, "zcoeffs", tuple(_norm_coeff(Fraction(c)) for c in self.zcoeffs))
        if all(c == 0 for c in self.zcoeffs):
            raise ResidueError("a denominator factor must involve some z variable")
        if self.constant.has_alphabet(Z):
            raise ResidueError("constant part of a linear form cannot contain z symbols")

    @property
    def leading_var(self) -> int:
        """Largest z index with nonzero coefficient (1-based)."""
        for i in range(self.nvars, 0, -1):
            if self.zcoeffs[i - 1] != 0:
                return i
        raise AssertionError("unreachable: some zcoeff is nonzero")

    def coeff(self, i: int):
        return self.zcoeffs[i - 1]

    def as_poly(self) -> MultiPoly:
        p = self.constant
        for i, c in enumerate(self.zcoeffs, start=1):
            if c != 0:
                p = p + MultiPoly.var(z(i), 1, c)
        return p

    def drop_var(self, m: int) -> MultiPoly:
        """The form minus its z_m term (the `rho` of the expansion)."""
        p = self.constant
        for i, c in enumerate(self.zcoeffs, start=1):
            if i != m and c != 0:
                p = p + MultiPoly.var(z(i), 1, c)
        return p

    def sort_key(self):
        return (self.leading_var, self.zcoeffs,
                tuple(sorted(self.constant.terms.items())))

    def __str__(self):
        return str(self.as_poly())


def linear_form(nvars: int, zcoeffs: Mapping[int, object] | Sequence,
                constant: MultiPoly | int = 0) -> LinearForm:
    """Convenience constructor; zcoeffs as {index: coeff} or a sequence."""
    if isinstance(zcoeffs, Mapping):
        vec = [0] * nvars
        for i, c in zcoeffs.items():
            vec[i - 1] = c
    else:
        vec = list(zcoeffs)
    if isinstance(constant, int):
        constant = MultiPoly.const(constant)
    return LinearForm(nvars, tuple(vec), constant)


@dataclass(frozen=True)
class ResidueForm:
    """numerator / product of linear forms, in the iterated-expansion domain."""

    numerator: MultiPoly
    denominator: tuple  # tuple of (LinearForm, multiplicity), canonical order
    nvars: int

    def __post_init__(self):
        merged: dict = {}
        for form, mult in self.denominator:
            if mult <= 0:
                raise ResidueError("multiplicities must be positive")
            if form.nvars != self.nvars:
                raise ResidueError("denominator factor nvars mismatch")
            merged[form] = merged.get(form, 0) + mult
        canon = tuple(sorted(merged.items(), key=lambda fm: fm[0].sort_key()))
        object.__setattr__(self, "denominator", canon)

    def denominator_degree(self) -> int:
        return sum(mult for _, mult in self.denominator)

    def factors_with(self, m: int):
        return [(f, mu) for f, mu in self.denominator if f.coeff(m) != 0]

    def factors_without(self, m: int):
        return tuple((f, mu) for f, mu in self.denominator if f.coeff(m) == 0)

    def expanded_factors(self):
        """Denominator as a flat list of LinearForm with repetition."""
        out = []
        for f, mu in self.denominator:
            out.extend([f] * mu)
        return out

    def __str__(self):
        den = " * ".join(
            f"({f})" + (f"^{mu}" if mu > 1 else "")
            for f, mu in self.denominator) or "1"
        return f"[{self.numerator}] / [{den}]"


def _packing_for(form: ResidueForm, extra: Iterable[MultiPoly] = ()) -> _packed.Packing:
    symbols = {z(i) for i in range(1, form.nvars + 1)}
    symbols |= form.numerator.symbols()
    for f, _ in form.denominator:
        symbols |= f.constant.symbols()
    for p in extra:
        symbols |= p.symbols()
    # z symbols first so variable slicing is cheap and predictable.
    zsyms = sorted(s for s in symbols if s[0] == Z)
    rest = sorted(s for s in symbols if s[0] != Z)
    return _packed.Packing(zsyms + rest)


def _extract_packed(num: dict, packing: _packed.Packing, m: int,
                    factors) -> dict:
    """Coefficient of z_m^{-1} (times the orientation sign) of num/factors.

    `factors` lists (LinearForm, mult) pairs, all with leading_var == m.
    Returns a packed polynomial free of z_m.
    """
    pos = packing.position[z(m)]
    slices = _packed.slice_var(num, pos)
    if not slices:
        return {}
    if not factors:
        # A polynomial has no z_m^{-1} coefficient.
        return {}
    deg = max(slices)
    total_mult = sum(mu for _, mu in factors)
    jmax = deg + 1 - total_mult
    if jmax < 0:
        return {}

    # prod[j] = packed coefficient of z_m^{-(total_mult + j)} in the product
    # of all factor expansions.
    prod = {0: {0: 1}}
    for f, mu in factors:
        a = f.coeff(m)
        rho = packing.pack(f.drop_var(m))
        ser = {}
        rho_pow = {0: 1}
        for j in range(jmax + 1):
            c = comb(mu - 1 + j, j) * (-1) ** j
            if a == 1:
                coefficient = c
            elif a == -1:
                coefficient = c * (-1) ** (mu + j)
            else:
                coefficient = Fraction(c, 1) / Fraction(a) ** (mu + j)
            if rho_pow:
                ser[j] = _packed.p_scale(rho_pow, coefficient)
            if not rho_pow:
                break
            if j < jmax:
                rho_pow = _packed.p_mul(rho_pow, rho)
        new_prod: dict = {}
        for j1, p1 in prod.items():
            for j2, p2 in ser.items():
                if j1 + j2 > jmax:
                    continue
                piece = _packed.p_mul(p1, p2)
                if j1 + j2 in new_prod:
                    _packed.p_add_inplace(new_prod[j1 + j2], piece)
                else:
                    new_prod[j1 + j2] = piece
        prod = {j: p for j, p in new_prod.items() if p}

    out: dict = {}
    for d, cpoly in slices.items():
        j = d + 1 - total_mult
        piece = prod.get(j)
        if piece:
            _packed.p_add_inplace(out, _packed.p_mul(cpoly, piece))
    _packed._strip(out)
    return {k: -c for k, c in out.items()}


def residue_one_var(f: ResidueForm, m: int) -> ResidueForm:
    """Extract the residue in z_m; result is free of z_m top and bottom.

    Preconditions: 1 <= m <= nvars and every denominator factor involving
    z_m has leading variable m.
    """
    if not 1 <= m <= f.nvars:
        raise ResidueError(f"variable index {m} out of range 1..{f.nvars}")
    with_m = f.factors_with(m)
    for form, _ in with_m:
        if form.leading_var != m:
            raise ResidueError(
                f"factor ({form}) contains z{m} but leads with z{form.leading_var}")
    packing = _packing_for(f)
    num = packing.pack(f.numerator)
    out = _extract_packed(num, packing, m, with_m)
    return ResidueForm(packing.unpack(out), f.factors_without(m), f.nvars)


def iterated_residue(f: ResidueForm, order: Sequence[int] | None = None,
                     per_var_factors: Mapping[int, MultiPoly] | None = None
                     ) -> MultiPoly:
    """Fully iterated residue; the result is a genuine polynomial (no z).

    Variables are processed in decreasing index order unless `order` (a
    permutation of 1..nvars) says otherwise; any order is accepted as long
    as, at each step, the factors involving the current variable lead with
    it.  `per_var_factors` optionally supplies an extra numerator factor
    F_m depending only on z_m (and non-z symbols), multiplied in just
    before z_m is extracted; since F_m is constant in every later-processed
    variable, the result equals the residue of numerator * prod_m F_m.
    """
    poly, _ = iterated_residue_with_stats(f, order, per_var_factors)
    return poly


def iterated_residue_with_stats(f: ResidueForm,
                                order: Sequence[int] | None = None,
                                per_var_factors: Mapping[int, MultiPoly] | None = None):
    """iterated_residue plus per-variable intermediate sizes (for reports)."""
    k = f.nvars
    if order is None:
        order = range(k, 0, -1)
    order = list(order)
    if sorted(order) != list(range(1, k + 1)):
        raise ResidueError(f"order must be a permutation of 1..{k}")
    extra = dict(per_var_factors or {})
    for m, p in extra.items():
        bad = [i for i in range(1, k + 1)
               if i != m and p.max_exponent(z(i)) > 0]
        if bad:
            raise ResidueError(
                f"per-variable factor for z{m} involves z{bad[0]}")
    packing = _packing_for(f, extra.values())
    num = packing.pack(f.numerator)
    remaining = list(f.denominator)
    stats = []
    for m in order:
        if m in extra:
            num = _packed.p_mul(num, packing.pack(extra[m]))
        with_m = [(form, mu) for form, mu in remaining if form.coeff(m) != 0]
        for form, _ in with_m:
            if form.leading_var != m:
                raise ResidueError(
                    f"factor ({form}) contains z{m} but leads with z{form.leading_var}")
        before = len(num)
        num = _extract_packed(num, packing, m, with_m)
        remaining = [(form, mu) for form, mu in remaining if form.coeff(m) == 0]
        stats.append({"variable": m, "terms_before": before,
                      "terms_after": len(num)})
    if remaining:
        raise ResidueError("denominator factors left after full iteration")
    result = packing.unpack(num)
    if result.has_alphabet(Z):
        raise ResidueError("iterated residue left z symbols behind")
    return result, stats


# -- vanishing predicates ---------------------------------------------------

def subst_degree(p: MultiPoly, subset: Iterable[int]):
    """Degree in t of p with z_i -> t (i in subset), z_i -> 1 (other i).

    Non-z symbols are carried along symbolically.  Returns None for the
    polynomial that collapses to zero under the substitution.
    """
    sset = set(subset)
    buckets: dict = {}
    for mono, c in p.terms.items():
        tdeg = 0
        rest = []
        for sym, e in mono:
            if sym[0] == Z:
                if sym[1] in sset:
                    tdeg += e
            else:
                rest.append((sym, e))
        key = (tdeg, tuple(rest))
        acc = buckets.get(key, 0) + c
        if acc == 0:
            buckets.pop(key, None)
        else:
            buckets[key] = acc
    degrees = [tdeg for (tdeg, _rest) in buckets]
    return max(degrees) if degrees else None


def product_subst_degree(forms: Sequence[LinearForm], subset: Iterable[int]) -> int:
    """deg of a product of linear forms on a subset: the number of factors
    with a nonzero coefficient on at least one z_s, s in subset."""
    sset = set(subset)
    return sum(1 for f in forms if any(f.coeff(s) != 0 for s in sset
                                       if 1 <= s <= f.nvars))


def lead_count(forms: Sequence[LinearForm], m: int) -> int:
    """Number of factors whose nonzero z coefficient of largest index is m."""
    return sum(1 for f in forms if f.leading_var == m)


def vanish_option1(p: MultiPoly, q: Sequence[LinearForm], l: int) -> bool:
    """First vanishing criterion on the suffix set {l, l+1, ..., k}."""
    if not q:
        return False
    k = q[0].nvars
    if l > k:
        raise ResidueError("l must be <= the number of variables")
    subset = range(l, k + 1)
    dp = subst_degree(p, subset)
    dq = product_subst_degree(q, subset)
    if dp is None:
        return 0 < dq
    return dp + (k - l + 1) < dq


def vanish_option2(p: MultiPoly, q: Sequence[LinearForm], l: int) -> bool:
    """Second vanishing criterion at the single variable z_l.

    Requires every factor involving z_l to involve no higher variable
    (deg(q; l) = lead(q; l)) and the numerator to have z_l degree at least
    two below it.
    """
    if not q:
        return False
    k = q[0].nvars
    if l > k:
        raise ResidueError("l must be <= the number of variables")
    dq = product_subst_degree(q, [l])
    if dq != lead_count(q, l):
        return False
    dp = subst_degree(p, [l])
    if dp is None:
        return 0 < dq
    return dp + 1 < dq


# -- fixed-point localisation oracle -----------------------------------------

def _lambda_pair_poly(a: int, b: int) -> MultiPoly:
    return MultiPoly.var(lam(a)) - MultiPoly.var(lam(b))


def ab_sum(qpoly: MultiPoly, n: int, k: int):
    """Fixed-point sum over ordered k-subsets of {1..n}.

        sum_sigma Q(lam_sigma(1), ..., lam_sigma(k))
                  / prod_{m<=k} prod_{i not in sigma(1..m)} (lam_i - lam_sigma(m))

    Returns (numerator, denominator) as a single exact pair of MultiPoly
    over the common denominator prod_{a<b} (lam_a - lam_b)^{max multiplicity}.
    Used only as an independent oracle for the residue engine.
    """
    if k > n:
        raise ResidueError("ab_sum requires k <= n")
    terms = []
    for sigma in itertools.permutations(range(1, n + 1), k):
        mapping = {z(i + 1): lam(sigma[i]) for i in range(k)}
        numer = qpoly.rename_symbols(mapping)
        sign = 1
        denom: Counter = Counter()
        for mpos in range(1, k + 1):
            sm = sigma[mpos - 1]
            used = set(sigma[:mpos])
            for i in range(1, n + 1):
                if i in used:
                    continue
                a, b = i, sm
                if a > b:
                    a, b = b, a
                    sign = -sign
                denom[(a, b)] += 1
        terms.append((numer, sign, denom))
    common: Counter = Counter()
    for _, _, denom in terms:
        for key, mult in denom.items():
            common[key] = max(common[key], mult)
    total = MultiPoly.zero()
    for numer, sign, denom in terms:
        cofactor = MultiPoly.const(sign)
        for key in sorted(common):
            for _ in range(common[key] - denom.get(key, 0)):
                cofactor = cofactor * _lambda_pair_poly(*key)
        total = total + numer * cofactor
    den = MultiPoly.const(1)
    for key in sorted(common):
        for _ in range(common[key]):
            den = den * _lambda_pair_poly(*key)
    return total, den


def flagres_form(qpoly: MultiPoly, n: int, k: int) -> ResidueForm:
    """The residue side matching ab_sum: Vandermonde * Q over prod (lam_i - z_l)."""
    num = qpoly
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            num = num * (MultiPoly.var(z(i)) - MultiPoly.var(z(j)))
    den = []
    for l in range(1, k + 1):
        for i in range(1, n + 1):
            den.append((linear_form(k, {l: -1}, MultiPoly.var(lam(i))), 1))
    return ResidueForm(num, tuple(den), k)


def rational_equal(num_den, poly: MultiPoly) -> bool:
    """Whether the exact fraction num/den equals the polynomial, by
    cross-multiplication."""
    num, den = num_den
    return num == poly * den

"""Characteristic-class ingredients of the main residue formula.

Builds the truncated Segre series of the base variety, the Chern classes of
the twisted tautological bundle (formal roots th_j and z_i + th_j), the
requested Chern monomial, and the fully assembled rational integrand.

Conventions.  s_i(X) denotes the i-th Segre class of the tangent bundle
(the inverse total Chern class: s_1 = -c_1, s_2 = c_1^2 - c_2, ...).  The
Segre factor attached to z_i is carried as the numerator polynomial
z_i^n + s_1 z_i^{n-1} + ... + s_n, with the matching z_i^n merged into the
global denominator, so the integrand stays inside the ResidueForm class.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

from . import equivariant_dual
from .exact_poly import MultiPoly, esym_list, graded_degree, segre, theta, z
from .residue_core import ResidueForm, linear_form


class SpecError(Exception):
    """Invalid problem instance (dimensions, ranks, degree bookkeeping)."""


class DegreeError(SpecError):
    """Chern monomial of the wrong weighted degree."""


@dataclass(frozen=True)
class ChernMonomial:
    """Monomial in the Chern classes c_1, c_2, ... as {index: exponent}."""

    exponents: tuple

    def __post_init__(self):
        pairs = tuple(sorted((int(i), int(e)) for i, e in self.exponents if e))
        for i, e in pairs:
            if i < 1:
                raise SpecError(f"Chern class index must be >= 1, got {i}")
            if e < 0:
                raise SpecError(f"negative exponent for c_{i}")
        object.__setattr__(self, "exponents", pairs)

    @staticmethod
    def from_mapping(m: Mapping[int, int]) -> "ChernMonomial":
        return ChernMonomial(tuple(m.items()))

    @property
    def weighted_degree(self) -> int:
        return sum(i * e for i, e in self.exponents)

    @property
    def max_index(self) -> int:
        return max((i for i, _ in self.exponents), default=0)

    @property
    def total_factors(self) -> int:
        return sum(e for _, e in self.exponents)

    def as_dict(self) -> dict:
        return dict(self.exponents)

    def __str__(self):
        if not self.exponents:
            return "1"
        return "*".join(f"c{i}" if e == 1 else f"c{i}^{e}"
                        for i, e in self.exponents)


@dataclass(frozen=True)
class IntegrandSpec:
    """A complete integrand instance: dimension n, jet order k (the locus
    parametrizes k+1 colliding points), twisting rank r, Chern monomial M."""

    n: int
    k: int
    r: int
    monomial: ChernMonomial
    override_degree_check: bool = False

    def __post_init__(self):
        if self.n < 2:
            raise SpecError(f"dimension n must be >= 2, got {self.n}")
        if self.k < 1:
            raise SpecError(f"jet order k must be >= 1, got {self.k}")
        if self.r < 1:
            raise SpecError(f"rank r must be >= 1, got {self.r}")
        top = self.r * (self.k + 1)
        if self.monomial.max_index > top:
            raise SpecError(
                f"monomial uses c_{self.monomial.max_index} but only "
                f"c_1..c_{top} exist for k={self.k}, r={self.r}")
        expected = self.expected_weighted_degree
        got = self.monomial.weighted_degree
        if got != expected and not self.override_degree_check:
            raise DegreeError(
                f"weighted degree {got} != {expected} = n + (n-1)k "
                f"(pass override_degree_check to compute anyway)")

    @property
    def expected_weighted_degree(self) -> int:
        # Dimension of the curvilinear locus over an n-fold at jet order k.
        return self.n + (self.n - 1) * self.k


def segre_series(n: int, zindex: int) -> MultiPoly:
    """Numerator of the Segre factor at 1/z_i, truncated at order n:

        z_i^n + s_1 z_i^{n-1} + ... + s_n

    The caller accounts for the z_i^n denominator.
    """
    if zindex < 1:
        raise SpecError("zindex must be >= 1")
    out = MultiPoly.var(z(zindex), n)
    for j in range(1, n + 1):
        out = out + MultiPoly.var(z(zindex), n - j) * MultiPoly.var(segre(j))
    return out


@lru_cache(maxsize=None)
def _taut_chern_all(k: int, r: int) -> tuple:
    """Coefficients of t^0..t^{r(k+1)} in
    prod_j (1 + th_j t) * prod_i prod_j (1 + (z_i + th_j) t)."""
    roots = [MultiPoly.var(theta(j)) for j in range(1, r + 1)]
    for i in range(1, k + 1):
        zi = MultiPoly.var(z(i))
        for j in range(1, r + 1):
            roots.append(zi + MultiPoly.var(theta(j)))
    return tuple(esym_list(roots))


def taut_chern(i: int, k: int, r: int) -> MultiPoly:
    """Coefficient of t^i in the tautological total Chern class, i.e. the
    i-th elementary symmetric polynomial of the roots th_j and z_i + th_j."""
    top = r * (k + 1)
    if not 0 <= i <= top:
        raise SpecError(f"taut_chern index {i} out of range 0..{top}")
    return _taut_chern_all(k, r)[i]


def chern_monomial_value(monomial: ChernMonomial, k: int, r: int) -> MultiPoly:
    """The Chern monomial evaluated on the tautological Chern classes."""
    coeffs = _taut_chern_all(k, r)
    # Multiply small factors first; repeated factors incrementally.
    factors = []
    for i, e in monomial.exponents:
        if i > r * (k + 1):
            raise SpecError(f"monomial index c_{i} exceeds rank {r * (k + 1)}")
        factors.extend([coeffs[i]] * e)
    factors.sort(key=lambda p: len(p.terms))
    out = MultiPoly.const(1)
    for f in factors:
        out = out * f
    return out


def segre_from_chern(c: Sequence[MultiPoly], n: int) -> list:
    """The unique s_1..s_n with (1 + sum c_i)(1 + sum s_i) = 1 mod degree > n."""
    if len(c) != n:
        raise SpecError(f"expected {n} Chern classes, got {len(c)}")
    s: list = []
    for i in range(1, n + 1):
        acc = -c[i - 1]
        for j in range(1, i):
            acc = acc - c[j - 1] * s[i - j - 1]
        s.append(acc)
    return s


def chern_from_segre(s: Sequence[MultiPoly], n: int) -> list:
    """Inverse of segre_from_chern (the relation is symmetric)."""
    return segre_from_chern(s, n)


def denominator_triples(k: int) -> list:
    """All (i, j, l) with i <= j and i + j <= l <= k (unordered pairs)."""
    out = []
    for i in range(1, k + 1):
        for j in range(i, k + 1):
            for l in range(i + j, k + 1):
                out.append((i, j, l))
    return out


def integrand_denominator(spec: IntegrandSpec) -> tuple:
    """Denominator multiset: the collision forms z_i + z_j - z_l and each
    z_i with multiplicity 2n (the formula's z_i^n merged with the Segre
    numerator convention)."""
    k, n = spec.k, spec.n
    den = []
    for (i, j, l) in denominator_triples(k):
        coeffs = {l: -1}
        coeffs[i] = coeffs.get(i, 0) + 1
        coeffs[j] = coeffs.get(j, 0) + 1
        den.append((linear_form(k, coeffs, 0), 1))
    for i in range(1, k + 1):
        den.append((linear_form(k, {i: 1}, 0), 2 * n))
    return tuple(den)


def integrand_parts(spec: IntegrandSpec):
    """Core numerator factors (sign, Vandermonde, Q_k, Chern monomial) and
    the per-variable Segre numerators, plus the denominator multiset.

    All factors are homogeneous, so the graded degree of the full rational
    expression is the sum of their degrees minus the denominator degree.
    """
    k, n, r = spec.k, spec.n, spec.r
    core = MultiPoly.const((-1) ** k)
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            core = core * (MultiPoly.var(z(i)) - MultiPoly.var(z(j)))
    core = core * equivariant_dual.qk_lookup(k)
    core = core * chern_monomial_value(spec.monomial, k, r)
    per_var = {i: segre_series(n, i) for i in range(1, k + 1)}
    return core, per_var, integrand_denominator(spec)


def build_integrand(spec: IntegrandSpec) -> ResidueForm:
    """The fully expanded integrand of the main formula.

    numerator = (-1)^k * prod_{i<j}(z_i - z_j) * Q_k * M(taut Chern classes)
                * prod_i (z_i^n + s_1 z_i^{n-1} + ... + s_n)
    denominator = {z_i + z_j - z_l : i <= j, i + j <= l <= k}
                  + {z_i with multiplicity 2n}

    Every denominator factor leads with its largest variable, so the
    iterated-residue precondition holds.  The sign differs from a printed
    (-1)^{nk} convention; the one used here is the one under which the
    result is the plain coefficient of (z_1...z_k)^{-1} of the expansion
    and which the rank-one geometric oracle confirms (see k1_oracle).
    """
    core, per_var, den = integrand_parts(spec)
    num = core
    for i in range(1, spec.k + 1):
        num = num * per_var[i]
    return ResidueForm(num, den, spec.k)


def integrand_graded_degree(spec: IntegrandSpec) -> int:
    """Graded total degree of the rational integrand, computed factorwise.

    Each numerator factor is homogeneous; raises if not.  For every valid
    spec this equals n - k.
    """
    core, per_var, den = integrand_parts(spec)
    total = 0
    for factor in [core, *per_var.values()]:
        d = graded_degree(factor)
        if not isinstance(d, int):
            raise SpecError("integrand factor is not homogeneous")
        total += d
    return total - sum(mult for _, mult in den)

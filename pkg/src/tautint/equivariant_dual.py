"""Torus-equivariant duals (multidegrees) and the singularity factor Q_k.

The main pipeline always reads Q_k from the hardcoded table (qk_lookup).
The rest of this module is a from-first-principles verification route:

  1. parametrize the Borel-orbit closure of the structure tensor eps inside
     the weight subspace N_k of Hom(C^k, Sym^2 C^k) (coordinates q^{mr}_l of
     torus weight z_m + z_r - z_l, identifying q^{mr}_l = q^{rm}_l),
  2. eliminate the group parameters by a block-order Groebner basis,
  3. degenerate onto the initial monomial ideal,
  4. sum the duals of the top-dimensional coordinate subspaces with their
     localization multiplicities.

The dual of a coordinate subspace {y_i = 0, i in S} is the product of the
weights of the vanishing coordinates; degeneration leaves the multidegree
unchanged, so the choice of monomial order is a reproducibility convention
only (graded reverse lexicographic on coordinates sorted by (l, m, r)).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import groebner
from .exact_poly import COORD, MultiPoly, _norm_coeff, coord, mono_degree, z


class EquivariantDualError(Exception):
    pass


class UnavailableError(EquivariantDualError):
    """Requested data beyond the validated table (no reference value exists)."""


# -- torus weights ------------------------------------------------------------

TorusWeight = tuple  # integer coefficient vector over z_1..z_k


def weight_poly(w: TorusWeight) -> MultiPoly:
    out = MultiPoly.zero()
    for i, c in enumerate(w, start=1):
        if c:
            out = out + MultiPoly.var(z(i), 1, c)
    return out


def weight_of_mono(mono, weights: Sequence[TorusWeight]) -> tuple:
    k = len(weights[0]) if weights else 0
    acc = [0] * k
    for (alphabet, index), e in mono:
        if alphabet != COORD:
            raise EquivariantDualError("ideal generators must use y symbols only")
        w = weights[index - 1]
        for i in range(k):
            acc[i] += e * w[i]
    return tuple(acc)


# -- ideals -------------------------------------------------------------------

@dataclass(frozen=True)
class WeightedIdeal:
    """Polynomial ideal in y_1..y_N with a torus weight per coordinate.

    Every generator must be weight-homogeneous (all its monomials share one
    total weight), which is what torus invariance of the subvariety means.
    """

    nvars: int
    generators: tuple
    weights: tuple

    def __post_init__(self):
        if len(self.weights) != self.nvars:
            raise EquivariantDualError("one weight per coordinate required")
        for g in self.generators:
            ws = {weight_of_mono(m, self.weights) for m in g.terms}
            if len(ws) > 1:
                raise EquivariantDualError(
                    f"generator {g} is not weight-homogeneous: weights {ws}")

    def nonzero_generators(self):
        return [g for g in self.generators if not g.is_zero()]


@dataclass(frozen=True)
class MonomialIdeal:
    """Monomial ideal given by its minimal generating exponent vectors."""

    nvars: int
    generators: frozenset

    def __post_init__(self):
        gens = {tuple(g) for g in self.generators}
        minimal = set()
        for g in sorted(gens, key=lambda t: (sum(t), t)):
            if not any(all(x >= y for x, y in zip(g, h)) for h in minimal):
                minimal.add(g)
        object.__setattr__(self, "generators", frozenset(minimal))

    def is_proper(self) -> bool:
        return (0,) * self.nvars not in self.generators

    def contains_mono(self, mono) -> bool:
        return any(all(x >= y for x, y in zip(mono, g))
                   for g in self.generators)


# -- conversions between MultiPoly (COORD) and the Groebner representation ----

def _to_gpoly(p: MultiPoly, nvars: int, offset: int = 0, width: int | None = None):
    width = nvars + offset if width is None else width
    out = {}
    for mono, c in p.terms.items():
        exp = [0] * width
        for (alphabet, index), e in mono:
            if alphabet != COORD or not 1 <= index <= nvars:
                raise EquivariantDualError(
                    f"expected y_1..y_{nvars} symbols, got {alphabet, index}")
            exp[offset + index - 1] = e
        out[tuple(exp)] = Fraction(c)
    return out


def _from_gpoly(g, nvars: int, offset: int = 0) -> MultiPoly:
    terms = {}
    for exp, c in g.items():
        mono = tuple((coord(i + 1), e)
                     for i, e in enumerate(exp[offset:offset + nvars]) if e)
        terms[mono] = _norm_coeff(Fraction(c))
    return MultiPoly(terms)


def _clear_denominators(p: MultiPoly) -> MultiPoly:
    denom = 1
    for c in p.terms.values():
        denom = denom * Fraction(c).denominator // _gcd(denom, Fraction(c).denominator)
    if denom == 1:
        nums = [abs(Fraction(c).numerator) for c in p.terms.values()]
        g = 0
        for x in nums:
            g = _gcd(g, x)
        if g > 1:
            return p * Fraction(1, g)
        return p
    return p * denom


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


# -- the published table -------------------------------------------------------

def qk_lookup(k: int) -> MultiPoly:
    """The multidegree Q_k for 1 <= k <= 5 (validated by epd_pipeline).

    No reference value exists beyond k = 5, so larger k raises rather than
    guessing.
    """
    if k < 1:
        raise EquivariantDualError(f"k must be >= 1, got {k}")
    if k > 5:
        raise UnavailableError(
            f"Q_{k} unavailable: the table ends at k = 5")
    if k <= 3:
        return MultiPoly.const(1)
    zv = lambda i: MultiPoly.var(z(i))  # noqa: E731
    if k == 4:
        return 2 * zv(1) + zv(2) - zv(4)
    first = 2 * zv(1) + zv(2) - zv(5)
    second = (2 * zv(1) ** 2 + 3 * zv(1) * zv(2) - 2 * zv(1) * zv(5)
              + 2 * zv(2) * zv(3) - zv(2) * zv(4) - zv(2) * zv(5)
              - zv(3) * zv(4) + zv(4) * zv(5))
    return first * second


# -- multidegrees of monomial ideals -------------------------------------------

def coordinate_subspace_dual(subset: Iterable[int],
                             weights: Sequence[TorusWeight]) -> MultiPoly:
    """Dual of {y_i = 0 : i in subset}: the product of those weights."""
    out = MultiPoly.const(1)
    for i in sorted(subset):
        out = out * weight_poly(weights[i - 1])
    return out


def _minimal_covers(supports: Sequence[frozenset], universe: int):
    """All minimal hitting sets of the supports (minimal primes)."""
    covers: set = set()

    def extend(partial: frozenset, remaining: tuple):
        if any(c <= partial for c in covers):
            return
        if not remaining:
            covers.add(partial)
            return
        head = remaining[0]
        if head & partial:
            extend(partial, remaining[1:])
            return
        for v in sorted(head):
            extend(partial | {v}, remaining[1:])

    extend(frozenset(), tuple(sorted(supports, key=sorted)))
    # Drop non-minimal covers produced by different branch orders.
    return [c for c in covers if not any(d < c for d in covers)]


def _localized_multiplicity(I: MonomialIdeal, cover: frozenset) -> int:
    """Length of the localization at the prime of `cover`: the number of
    monomials in the cover variables outside the localized ideal."""
    vars_sorted = sorted(cover)
    local_gens = []
    for g in I.generators:
        local_gens.append(tuple(g[v - 1] for v in vars_sorted))
    bounds = [max(g[i] for g in local_gens) for i in range(len(vars_sorted))]

    count = 0
    for mono in itertools.product(*(range(b) for b in bounds)):
        if not any(all(x >= y for x, y in zip(mono, g)) for g in local_gens):
            count += 1
    return count


def multidegree_monomial(I: MonomialIdeal,
                         weights: Sequence[TorusWeight]) -> MultiPoly:
    """Multidegree: sum over top-dimensional coordinate components of
    multiplicity times the product of the vanishing coordinates' weights."""
    if not I.is_proper():
        raise EquivariantDualError("multidegree of an improper ideal")
    if not I.generators:
        return MultiPoly.const(1)
    supports = [frozenset(i + 1 for i, e in enumerate(g) if e)
                for g in I.generators]
    covers = _minimal_covers(supports, I.nvars)
    codim = min(len(c) for c in covers)
    out = MultiPoly.zero()
    for cover in sorted((c for c in covers if len(c) == codim), key=sorted):
        mult = _localized_multiplicity(I, cover)
        out = out + mult * coordinate_subspace_dual(cover, weights)
    return out


def ideal_codim(I: MonomialIdeal) -> int:
    if not I.generators:
        return 0
    supports = [frozenset(i + 1 for i, e in enumerate(g) if e)
                for g in I.generators]
    return min(len(c) for c in _minimal_covers(supports, I.nvars))


# -- Groebner surface -----------------------------------------------------------

def groebner_basis(I: WeightedIdeal, order: str = "grevlex") -> WeightedIdeal:
    """Reduced Groebner basis of I for the named order (y_1 > y_2 > ...)."""
    gens = I.nonzero_generators()
    if not gens:
        return WeightedIdeal(I.nvars, (), I.weights)
    key = groebner.order_by_name(order)
    gb = groebner.buchberger([_to_gpoly(g, I.nvars) for g in gens], key)
    back = tuple(_clear_denominators(_from_gpoly(g, I.nvars)) for g in gb)
    return WeightedIdeal(I.nvars, back, I.weights)


def initial_ideal(I: WeightedIdeal, order: str = "grevlex") -> MonomialIdeal:
    """Leading monomials of the reduced Groebner basis, minimalized."""
    gens = I.nonzero_generators()
    if not gens:
        return MonomialIdeal(I.nvars, frozenset())
    key = groebner.order_by_name(order)
    gb = groebner.buchberger([_to_gpoly(g, I.nvars) for g in gens], key)
    return MonomialIdeal(I.nvars, frozenset(max(g, key=key) for g in gb))


def epd_of_ideal(I: WeightedIdeal, order: str = "grevlex") -> MultiPoly:
    """Multidegree of a weighted ideal via Groebner degeneration."""
    return multidegree_monomial(initial_ideal(I, order), I.weights)


# -- the Borel orbit of the structure tensor -----------------------------------

def nk_coordinates(k: int) -> list:
    """Coordinates (m, r, l), m <= r, m + r <= l <= k, sorted by (l, m, r)."""
    out = []
    for l in range(2, k + 1):
        for m in range(1, l + 1):
            for r in range(m, l - m + 1):
                out.append((m, r, l))
    return sorted(out, key=lambda t: (t[2], t[0], t[1]))


def nk_weights(k: int) -> list:
    """Weight z_m + z_r - z_l of each coordinate, in nk_coordinates order."""
    out = []
    for (m, r, l) in nk_coordinates(k):
        w = [0] * k
        w[m - 1] += 1
        w[r - 1] += 1
        w[l - 1] -= 1
        out.append(tuple(w))
    return out


def _eps_coefficient(m: int, r: int, l: int) -> int:
    # eps(f_l) = sum over ordered pairs (a, b), a + b = l, of f_a f_b.
    if m + r != l:
        return 0
    return 2 if m != r else 1


def _stabilizer_transversal(k: int) -> bool:
    """Exact check that the Lie-algebra stabilizer of eps inside the upper
    triangular matrices is transversal to the slice {first row 0, X_11 = 0}.

    The slice parametrization of the orbit is only a valid substitute for
    the full group when this holds.
    """
    coords = nk_coordinates(k)
    coord_index = {c: i for i, c in enumerate(coords)}
    basis = [(a, b) for a in range(1, k + 1) for b in range(a, k + 1)]
    rows = []
    for (a, b) in basis:
        # Image of the basis matrix E_ab acting on eps, in N_k coordinates.
        image = [Fraction(0)] * len(coords)
        # Derivative of Sym^2 applied to eps(f_l): E_ab replaces f_b by f_a
        # in one tensor slot.
        for l in range(2, k + 1):
            for mm in range(1, l):
                rr = l - mm
                if mm > rr:
                    continue
                c = _eps_coefficient(mm, rr, l)
                if c == 0:
                    continue
                if mm == b:
                    x, y = (a, rr) if a <= rr else (rr, a)
                    if (x, y, l) in coord_index:
                        image[coord_index[(x, y, l)]] += c
                if rr == b:
                    x, y = (mm, a) if mm <= a else (a, mm)
                    if (x, y, l) in coord_index:
                        image[coord_index[(x, y, l)]] += c
        # Minus eps applied after E_ab: eps(E_ab f_l) = [l == b] eps(f_a).
        if b >= 2:
            l = b
            for mm in range(1, a):
                rr = a - mm
                if mm > rr:
                    continue
                c = _eps_coefficient(mm, rr, a)
                if c and (mm, rr, l) in coord_index:
                    image[coord_index[(mm, rr, l)]] -= c
        rows.append(image)

    kernel_dim = len(basis) - _rank(rows)
    # Restrict to the slice complement: stabilizer vectors supported on the
    # first row and the (1, 1) diagonal entry only would witness failure.
    slice_positions = [i for i, (a, b) in enumerate(basis) if a >= 2]
    sliced = [[row[j] for j in range(len(coords))]
              for i, row in enumerate(rows) if i in set(slice_positions)]
    slice_rank = _rank(sliced)
    # Transversality: the slice directions inject into the tangent space of
    # the orbit, and together with the stabilizer they span everything.
    return (slice_rank == len(slice_positions)
            and kernel_dim + len(slice_positions) == len(basis))


def _rank(rows) -> int:
    m = [list(map(Fraction, row)) for row in rows if any(row)]
    rank = 0
    ncols = len(m[0]) if m else 0
    col = 0
    r = 0
    while r < len(m) and col < ncols:
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = Fraction(1) / m[r][col]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                c = m[i][col]
                m[i] = [x - c * y for x, y in zip(m[i], m[r])]
        r += 1
        col += 1
        rank += 1
    return rank


def _unipotent_orbit_coordinates(k: int, uvar: dict):
    """Coordinates of u . eps for a symbolic unipotent upper-triangular u
    with first row zeroed (the slice); entries are polynomials in the u
    variables, returned as {(m, r, l): MultiPoly in COORD u-symbols}."""
    # u(f_j) = f_j + sum_{2 <= a < j} u[a, j] f_a ; u(f_1) = f_1.
    ucols = {}
    for j in range(1, k + 1):
        col = {j: MultiPoly.const(1)}
        for a in range(2, j):
            col[a] = MultiPoly.var(uvar[(a, j)])
        ucols[j] = col
    # Inverse columns by forward substitution: u(inv_col_j) = f_j.
    inv_cols = {}
    for j in range(1, k + 1):
        col = {j: MultiPoly.const(1)}
        for a in range(j - 1, 0, -1):
            acc = MultiPoly.zero()
            for b in range(a + 1, j + 1):
                if a in ucols[b]:
                    coeff = ucols[b][a] if b != a else MultiPoly.const(1)
                    acc = acc - coeff * col.get(b, MultiPoly.zero())
            if not acc.is_zero():
                col[a] = acc
        inv_cols[j] = col

    out: dict = {}
    for l in range(2, k + 1):
        # eps(u^{-1} f_l) as coefficients on ordered pairs via Sym^2(u).
        acc: dict = {}
        for b, wb in inv_cols[l].items():
            for mm in range(1, b):
                rr = b - mm
                if mm > rr:
                    continue
                c = _eps_coefficient(mm, rr, b)
                # Apply Sym^2(u): f_mm f_rr -> u(f_mm) u(f_rr).
                for a1, c1 in ucols[mm].items():
                    for a2, c2 in ucols[rr].items():
                        x, y = (a1, a2) if a1 <= a2 else (a2, a1)
                        prev = acc.get((x, y), MultiPoly.zero())
                        acc[(x, y)] = prev + c * wb * c1 * c2
        for (x, y), value in acc.items():
            if value.is_zero():
                continue
            if x + y > l:
                raise EquivariantDualError(
                    "orbit left the invariant subspace; module convention broken")
            out[(x, y, l)] = out.get((x, y, l), MultiPoly.zero()) + value
    return out


def borel_orbit_ideal(k: int) -> WeightedIdeal:
    """Ideal of the Borel-orbit closure of eps in N_k, by elimination.

    Parametrizes the orbit on a slice (unipotent part with zero first row,
    torus with t_1 = 1, inverses adjoined as t_a * s_a - 1), then eliminates
    all group parameters with a block Groebner order.  Raises if the slice
    fails its exact transversality check, rather than silently computing a
    smaller orbit.
    """
    if not 2 <= k <= 5:
        raise EquivariantDualError(
            f"borel_orbit_ideal supports 2 <= k <= 5, got {k}")
    if not _stabilizer_transversal(k):
        raise EquivariantDualError(
            f"slice parametrization not transversal at k={k}")

    coords = nk_coordinates(k)
    weights = nk_weights(k)
    n_y = len(coords)

    # Variable layout: u variables, then t_2..t_k, then s_2..s_k, then y's.
    uvars = [(a, b) for b in range(3, k + 1) for a in range(2, b)]
    n_u = len(uvars)
    n_t = k - 1
    n_elim = n_u + 2 * n_t
    width = n_elim + n_y

    # Build u . eps over a COORD universe for the u variables only.
    u_symbol = {ab: coord(i + 1) for i, ab in enumerate(uvars)}
    ueps = _unipotent_orbit_coordinates(k, u_symbol)

    def upoly_to_exp(p: MultiPoly):
        return groebner.p_normalize(_to_gpoly(p, n_u, offset=0, width=width))

    gens = []
    for idx, (m, r, l) in enumerate(coords):
        value = ueps.get((m, r, l), MultiPoly.zero())
        g = upoly_to_exp(value)
        # Multiply by t_m * t_r * s_l (t_1 = s_1 = 1 on the slice).
        tmono = [0] * width
        for t_index in (m, r):
            if t_index >= 2:
                tmono[n_u + t_index - 2] += 1
        if l >= 2:
            tmono[n_u + n_t + l - 2] += 1
        g = {groebner.mono_mul(mono, tuple(tmono)): c for mono, c in g.items()}
        ymono = [0] * width
        ymono[n_elim + idx] = 1
        g[tuple(ymono)] = g.get(tuple(ymono), Fraction(0)) + Fraction(-1)
        gens.append({mono: -c for mono, c in g.items()})
    for a in range(2, k + 1):
        mono = [0] * width
        mono[n_u + a - 2] = 1
        mono[n_u + n_t + a - 2] = 1
        gens.append({tuple(mono): Fraction(1), (0,) * width: Fraction(-1)})

    eliminated = groebner.eliminate(gens, n_elim)
    generators = tuple(_clear_denominators(_from_gpoly(g, n_y))
                       for g in eliminated)
    ideal = WeightedIdeal(n_y, generators, tuple(weights))

    # Codimension must match the degree of the published dual.
    expected = qk_lookup(k)
    codim = ideal_codim(initial_ideal(ideal))
    degree = max({mono_degree(m) for m in expected.terms} or {0})
    if codim != degree:
        raise EquivariantDualError(
            f"orbit ideal codimension {codim} != deg Q_{k} = {degree}")
    return ideal


def epd_pipeline(k: int) -> MultiPoly:
    """First-principles multidegree of the orbit closure; must equal
    qk_lookup(k) for every supported k."""
    if not 2 <= k <= 5:
        raise EquivariantDualError(
            f"epd_pipeline supports 2 <= k <= 5, got {k}")
    ideal = borel_orbit_ideal(k)
    return epd_of_ideal(ideal)


def audit_text(k: int) -> str:
    """Plain-text audit artifact: orbit ideal generators and the reduced
    Groebner basis, one generator per line, in the degeneration order
    (grevlex on y coordinates sorted by (l, m, r), y_1 largest)."""
    ideal = borel_orbit_ideal(k)
    gb = groebner_basis(ideal)
    init = initial_ideal(ideal)
    lines = [
        f"# Borel orbit closure in N_{k}",
        f"# coordinates (m, r, l) by (l, m, r): {nk_coordinates(k)}",
        "# term order: graded reverse lexicographic, y1 > y2 > ...",
        "",
        "[generators]",
    ]
    lines += [str(g) for g in ideal.generators] or ["0"]
    lines += ["", "[reduced groebner basis]"]
    lines += [str(g) for g in gb.generators] or ["0"]
    lines += ["", "[initial ideal]"]
    for g in sorted(init.generators):
        mono = tuple((coord(i + 1), e) for i, e in enumerate(g) if e)
        lines.append(str(MultiPoly({mono: 1})))
    if not init.generators:
        lines.append("0")
    lines += ["", f"[multidegree]", str(epd_of_ideal(ideal)),
              "", f"[table value]", str(qk_lookup(k))]
    return "\n".join(lines) + "\n"

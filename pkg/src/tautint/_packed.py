"""Bit-packed monomial kernel for the hot polynomial loops.

Internal to the residue engine.  A monomial over a fixed, finite symbol
table is packed into a single Python int, 16 bits per symbol; monomial
multiplication then becomes integer addition (no field can overflow: total
degrees in this artifact stay far below 2^16).  Coefficients remain exact
(int or Fraction).  Public module boundaries always use MultiPoly; packing
is a per-computation implementation detail.
"""

from __future__ import annotations

from fractions import Fraction

from .exact_poly import MultiPoly, _norm_coeff

BITS = 16
MASK = (1 << BITS) - 1


class Packing:
    """Fixed symbol table mapping monomials to packed integer keys."""

    __slots__ = ("symbols", "position")

    def __init__(self, symbols):
        self.symbols = tuple(symbols)
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("duplicate symbols in packing")
        self.position = {s: i for i, s in enumerate(self.symbols)}

    def pack_mono(self, mono) -> int:
        key = 0
        pos = self.position
        for sym, e in mono:
            key |= e << (BITS * pos[sym])
        return key

    def unpack_mono(self, key: int):
        out = []
        i = 0
        while key:
            e = key & MASK
            if e:
                out.append((self.symbols[i], e))
            key >>= BITS
            i += 1
        return tuple(sorted(out))

    def pack(self, p: MultiPoly) -> dict:
        return {self.pack_mono(m): c for m, c in p.terms.items()}

    def unpack(self, d: dict) -> MultiPoly:
        out = {}
        for key, c in d.items():
            mono = self.unpack_mono(key)
            acc = out.get(mono, 0) + c
            if acc == 0:
                out.pop(mono, None)
            else:
                out[mono] = _norm_coeff(acc)
        return MultiPoly._raw(out)


def p_mul(a: dict, b: dict) -> dict:
    """Product of packed polynomials (sparse dict convolution)."""
    if not a or not b:
        return {}
    if len(a) < len(b):
        a, b = b, a
    out: dict = {}
    get = out.get
    for kb, cb in b.items():
        for ka, ca in a.items():
            key = ka + kb
            acc = get(key, 0) + ca * cb
            if acc == 0:
                out.pop(key, None)
            else:
                out[key] = acc
    _strip(out)
    return out


def p_addmul(acc: dict, a: dict, key: int, c) -> None:
    """acc += (monomial key with coefficient c) * a, in place."""
    get = acc.get
    for ka, ca in a.items():
        k = ka + key
        v = get(k, 0) + ca * c
        if v == 0:
            acc.pop(k, None)
        else:
            acc[k] = v


def p_add_inplace(acc: dict, a: dict) -> None:
    get = acc.get
    for k, c in a.items():
        v = get(k, 0) + c
        if v == 0:
            acc.pop(k, None)
        else:
            acc[k] = v


def p_scale(a: dict, c) -> dict:
    if c == 0:
        return {}
    if c == 1:
        return dict(a)
    return {k: v * c for k, v in a.items()}


def _strip(d: dict) -> None:
    # Normalize Fractions that collapsed to integers during accumulation.
    for k in [k for k, v in d.items() if type(v) is Fraction and v.denominator == 1]:
        d[k] = d[k].numerator


def slice_var(p: dict, pos: int) -> dict:
    """Split by the exponent of the symbol at `pos`: {e: packed poly}.

    The returned polynomials have the symbol's field cleared.
    """
    shift = BITS * pos
    fieldmask = MASK << shift
    out: dict = {}
    for key, c in p.items():
        e = (key >> shift) & MASK
        base = key & ~fieldmask
        bucket = out.setdefault(e, {})
        acc = bucket.get(base, 0) + c
        if acc == 0:
            bucket.pop(base, None)
        else:
            bucket[base] = acc
    return {e: b for e, b in out.items() if b}

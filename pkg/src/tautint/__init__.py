"""Exact tautological-integral calculator for curvilinear point loci.

Evaluates intersection monomials of tautological bundle Chern classes
against the curvilinear locus of punctual configurations via an exact
iterated-residue engine, with independent verification routes (fixed-point
localisation sums, equivariant multidegrees, a projective-bundle oracle).
"""

__version__ = "0.1.0"

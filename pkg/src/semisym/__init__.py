"""Semisymmetric incidence graphs from linear representations in PG(n+1,q).

Submodules:
    gf          exact GF(p^h) arithmetic
    pg          projective geometry over GF(q), collineations, stabilizer oracle
    pointsets   the point-set families K and the dual-arc transform
    setanalysis span / arc / tangency predicates and the closure procedure
    linrep      incidence-graph construction (and related graph families)
    graphalg    graph analytics, canonical forms, automorphism engine
    graphio     graph6 encoding plus JSON sidecars
    cli         command-line interface
"""

__version__ = "0.1.0"

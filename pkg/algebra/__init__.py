"""
Algebra Package

Finite abelian groups and the reduced power monoid P_0(G):
- models: pydantic domain types (GroupSpec, Subgroup, GroupAutMap, MonoidMap, ...)
- abelian_group: invariant factors, subgroups, quotients and Aut(G)
- power_monoid: sumsets, divisibility, idempotents and the P_{0,H}(G) family
- search: backtracking search for automorphisms with trivial pullback
- automorphisms: augmentations, pullbacks, restriction, quotient induction and Aut(P_0(G))
"""

__version__ = "1.0.0"

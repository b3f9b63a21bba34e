"""Theory specifications: constraint content and structure tables.

A TheorySpec is pure data.  The Poisson structure it induces is realised by
``algebra.Algebra(spec)``:

* ``u_table[(a, b, g)]`` holds the coefficient polynomial of the closed
  constraint bracket  {xi_a, xi_b} = sum_g U_abg * xi_g  (so first-classness
  is manifest).  Values are expression strings in coordinate variables.
* ``mixed_table[(i, j)]`` holds brackets involving at least one physical
  coordinate, with global coordinate indices (constraints first).  Missing
  mirror entries are completed by graded antisymmetry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping


@dataclass(frozen=True)
class TheorySpec:
    constraint_parities: tuple
    physical_parities: tuple = ()
    u_table: Mapping = field(default_factory=dict)
    mixed_table: Mapping = field(default_factory=dict)
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "constraint_parities",
                           tuple(p & 1 for p in self.constraint_parities))
        object.__setattr__(self, "physical_parities",
                           tuple(p & 1 for p in self.physical_parities))

    @property
    def m(self):
        return len(self.constraint_parities)

    @property
    def n_physical(self):
        return len(self.physical_parities)


def abelian_spec(m, parities=None, label="abelian"):
    """m constraints with vanishing brackets."""
    if parities is None:
        parities = (0,) * m
    return TheorySpec(tuple(parities), label=label)


def so3_spec(label="so3"):
    """Angular-momentum algebra: {xi_i, xi_j} = eps_ijk xi_k."""
    u = {(1, 2, 3): "1", (2, 3, 1): "1", (3, 1, 2): "1"}
    return TheorySpec((0, 0, 0), u_table=u, label=label)


def deformed_so3_spec(label="so3-deformed"):
    """so(3) with a polynomial deformation {xi_3, xi_1} = xi_2 + xi_2^2.

    The cyclic Jacobi sum vanishes identically for any deformation of this
    entry that depends on xi_2 alone.
    """
    u = {(1, 2, 3): "1", (2, 3, 1): "1", (3, 1, 2): "1 + xi[2]"}
    return TheorySpec((0, 0, 0), u_table=u, label=label)


def mixed_parity_spec(label="mixed2"):
    """One bosonic and one fermionic constraint with a polynomial bracket:
    {xi_2, xi_2} = xi_1 + xi_1^2."""
    u = {(2, 2, 1): "1 + xi[1]"}
    return TheorySpec((0, 1), u_table=u, label=label)


def jacobi_violations(alg, max_report=10):
    """Check the graded Jacobi identity on all coordinate triples.

    Returns a list of (i, j, k, defect) with nonzero defect polynomials,
    where the defect is the graded-cyclic sum
    (-1)^(e_i e_k) {xi_i, {xi_j, xi_k}} + cyclic.
    """
    n = alg.m + alg.n_physical
    coords = [alg._xi_vid(i + 1) for i in range(n)]
    gens = [alg.gen(v) for v in coords]
    eps = [alg.var_parity[v] for v in coords]
    bad = []
    for i in range(n):
        for j in range(i, n):
            for k in range(j, n):
                defect = alg.zero()
                for (a, b, c) in ((i, j, k), (j, k, i), (k, i, j)):
                    inner = alg.bracket(gens[b], gens[c])
                    term = alg.bracket(gens[a], inner)
                    if (eps[a] & eps[c]):
                        term = -term
                    defect = defect + term
                if defect:
                    bad.append((i + 1, j + 1, k + 1, defect))
                    if len(bad) >= max_report:
                        return bad
    return bad

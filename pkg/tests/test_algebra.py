"""Graded algebra foundations: variables, gradings, products, guards."""

from fractions import Fraction

import pytest

from sp2brst.algebra import Algebra, Sector, TheoryError
from sp2brst.theory import TheorySpec, abelian_spec, mixed_parity_spec, so3_spec


def test_variable_gradings_mixed_theory(mixed_alg):
    alg = mixed_alg  # constraints: parity 0 and parity 1
    for a, eps in ((1, 0), (2, 1)):
        assert alg.xi(a).parity() == eps
        assert alg.xi(a).ngh() == 0
        assert alg.xi(a).n_degree() == 1
        assert alg.xi(a).cp_degree() == 0
        for i in (1, 2):
            assert alg.ghost_mom(a, i).parity() == (eps + 1) % 2
            assert alg.ghost_mom(a, i).ngh() == -1
            assert alg.ghost_mom(a, i).n_degree() == 1
            assert alg.ghost_mom(a, i).cp_degree() == 0
            assert alg.ghost(a, i).parity() == (eps + 1) % 2
            assert alg.ghost(a, i).ngh() == 1
            assert alg.ghost(a, i).n_degree() == 0
            assert alg.ghost(a, i).cp_degree() == 1
        assert alg.lagrange(a).parity() == eps
        assert alg.lagrange(a).ngh() == -2
        assert alg.lagrange(a).n_degree() == 1
        assert alg.lagrange_mom(a).ngh() == 2
        assert alg.lagrange_mom(a).cp_degree() == 1
        assert alg.lagrange_mom(a).n_degree() == 0


def test_canonical_variable_order():
    spec = TheorySpec((0, 0), physical_parities=(0,))
    alg = Algebra(spec)
    sectors = [v.sector for v in alg.vars]
    want = ([Sector.XI] * 2 + [Sector.XI_PHYS] + [Sector.GHOST_MOM] * 4
            + [Sector.GHOST] * 4 + [Sector.LAGRANGE] * 2 + [Sector.LAGRANGE_MOM] * 2)
    assert sectors == want


def test_odd_variables_square_to_zero(mixed_alg):
    alg = mixed_alg
    f = alg.xi(2)  # fermionic constraint
    assert alg.mul(f, f).is_zero()
    c = alg.ghost(1, 1)  # ghost of a bosonic constraint is odd
    assert alg.mul(c, c).is_zero()
    assert (f + c) * (f + c) == alg.mul(f, c) + alg.mul(c, f)


def test_graded_commutativity(mixed_alg):
    alg = mixed_alg
    b, f = alg.xi(1), alg.xi(2)
    assert alg.mul(b, f) == alg.mul(f, b)
    c1, c2 = alg.ghost(1, 1), alg.ghost(1, 2)
    assert alg.mul(c1, c2) == -alg.mul(c2, c1)
    assert alg.mul(b, c1) == alg.mul(c1, b)


def test_scalar_arithmetic(mixed_alg):
    alg = mixed_alg
    x = alg.xi(1)
    p = 2 * x + x * Fraction(1, 2) - x
    assert p == x * Fraction(3, 2)
    assert (p - p).is_zero()
    assert (x + 0) == x
    assert (x * 0).is_zero()
    assert x ** 3 == alg.mul(alg.mul(x, x), x)


def test_homogeneity_errors(mixed_alg):
    alg = mixed_alg
    p = alg.xi(1) + alg.ghost(1, 1)
    with pytest.raises(ValueError):
        p.ngh()
    with pytest.raises(ValueError):
        p.parity()
    assert p.min_cp() == 0


def test_grade_decompose_roundtrip(mixed_alg):
    alg = mixed_alg
    p = (alg.xi(1) + alg.ghost(1, 1) * alg.xi(2)
         + alg.lagrange(1) * alg.lagrange_mom(2) * alg.xi(1))
    parts = p.grade_decompose()
    total = alg.zero()
    for (nd, cp), part in parts.items():
        assert part.n_degree() == nd
        assert part.cp_degree() == cp
        total = total + part
    assert total == p


def test_truncate_and_parts(mixed_alg):
    alg = mixed_alg
    p = alg.xi(1) + alg.mul(alg.ghost(1, 1), alg.xi(2)) \
        + alg.mul(alg.mul(alg.ghost(1, 1), alg.lagrange_mom(2)), alg.xi(1))
    assert p.truncate_cp(1).term_count() == 2
    assert p.cp_part(0) == alg.xi(1)
    assert p.truncate_cp(5) is p
    assert p.min_cp() == 0
    assert p.in_v()
    assert not (p + alg.ghost(1, 1)).in_v()


def test_substitute_zero_restriction():
    # setting the constraint sector to zero kills xi terms, leaves physical ones
    spec = TheorySpec((0,), physical_parities=(0,), mixed_table={(1, 2): "1"})
    alg = Algebra(spec)
    p = alg.xi(1) + alg.xip(1)
    q = p.substitute_zero((Sector.XI,))
    assert q == alg.xip(1)
    assert alg.xi(1).substitute_zero((Sector.XI,)).is_zero()


def test_cross_theory_mixing_rejected():
    a1 = Algebra(so3_spec())
    a2 = Algebra(abelian_spec(3))
    with pytest.raises(TheoryError):
        a1.mul(a1.xi(1), a2.xi(1))
    with pytest.raises(TheoryError):
        a1.bracket(a1.xi(1), a2.xi(1))
    with pytest.raises(TheoryError):
        a1.xi(1) + a2.xi(1)


def test_twin_algebras_are_compatible():
    # regression: equality and mixing must be structural, not instance-based
    a1 = Algebra(so3_spec())
    a2 = Algebra(so3_spec())
    assert a1.compatible(a2)
    assert a1.xi(1) == a2.xi(1)
    assert a1.xi(1) + a2.xi(2) == a2.xi(1) + a1.xi(2)
    assert a1.bracket(a1.xi(1), a2.xi(2)) == a1.xi(3)
    assert not (a1.xi(1) == a2.xi(2))


def test_spec_validation_errors():
    with pytest.raises(TheoryError):
        Algebra(TheorySpec((0, 0), u_table={(1, 1, 2): "1"}))  # even self-bracket
    with pytest.raises(TheoryError):
        Algebra(TheorySpec((0, 0), u_table={(1, 3, 2): "1"}))  # index range
    with pytest.raises(TheoryError):
        # violates graded antisymmetry
        Algebra(TheorySpec((0, 0, 0), u_table={(1, 2, 3): "1", (2, 1, 3): "1"}))
    with pytest.raises(TheoryError):
        # ghosts may not appear in structure entries
        Algebra(TheorySpec((0, 0), u_table={(1, 2, 1): "C[1,1]"}))
    with pytest.raises(TheoryError):
        # wrong parity for the entry
        Algebra(TheorySpec((0, 1), u_table={(1, 2, 1): "1"}))


def test_fermionic_self_bracket_allowed():
    alg = Algebra(mixed_parity_spec())
    # {xi_2, xi_2} = (1 + xi_1) * xi_1 for this theory
    got = alg.bracket(alg.xi(2), alg.xi(2))
    assert got == alg.xi(1) + alg.mul(alg.xi(1), alg.xi(1))

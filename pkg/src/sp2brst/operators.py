"""The Sp(2) operator calculus on ghost polynomials and symmetric tensors.

Component (scalar) operators, all first-order with left derivatives:

    N      = xi d/dxi + P d/dP + lam d/dlam        (counts constraint-sector factors)
    W^a    = xi_r d/dP_ra + eps^ab P_rb d/dlam_r + (-1)^eps_r eps^ab pi^r d/dC^rb
    Gamma_a = P_ra d/dxi_r - eps_ab lam_r d/dP_rb
    M      = Gamma_a W^a

Tensor operators: W raises the rank by one via the cyclic sum over the
output indices, Gamma contracts the last index, N/M/Q/V act per component.
On rank n >= 1, Q is the exact inverse of (nN + M); its closed form is
polynomial in M and N^-1 thanks to the reduction
M^n = (2^(n-1)-1) N^(n-2) M^2 - (2^(n-1)-2) N^(n-1) M.

Sp(2) metric conventions:  eps^12 = +1 = -eps^21,  eps_12 = -1 = -eps_21,
so that eps^ab eps_bc = delta^a_c.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import GradedPoly, Sector
from .tensors import SymTensor

EPS_UP = {(1, 2): 1, (2, 1): -1, (1, 1): 0, (2, 2): 0}
EPS_DOWN = {(1, 2): -1, (2, 1): 1, (1, 1): 0, (2, 2): 0}


class OutsideDomainError(ValueError):
    """N is not invertible: some term carries no constraint-sector factor."""


# ---------------------------------------------------------------------------
# component operators


def n_apply(p: GradedPoly) -> GradedPoly:
    alg = p.alg
    return alg.poly({m: c * alg.term_ndeg(m) for m, c in p.terms.items()})


def n_inverse(p: GradedPoly, power=1) -> GradedPoly:
    alg = p.alg
    out = {}
    for m, c in p.terms.items():
        d = alg.term_ndeg(m)
        if d == 0:
            raise OutsideDomainError(
                f"term outside the invertible domain of N: {GradedPoly(alg, {m: c})!r}")
        out[m] = c / Fraction(d) ** power
    return alg.poly(out)


def w_component(p: GradedPoly, a: int) -> GradedPoly:
    alg = p.alg
    b = 3 - a
    eab = EPS_UP[(a, b)]
    out = alg.zero()
    for r in range(1, alg.m + 1):
        eps_r = alg.spec.constraint_parities[r - 1] & 1
        out = out + alg.replace_left(
            p, alg.vid(Sector.GHOST_MOM, r, a), alg.vid(Sector.XI, r), 1)
        out = out + alg.replace_left(
            p, alg.vid(Sector.LAGRANGE, r), alg.vid(Sector.GHOST_MOM, r, b), eab)
        out = out + alg.replace_left(
            p, alg.vid(Sector.GHOST, r, b), alg.vid(Sector.LAGRANGE_MOM, r),
            -eab if eps_r else eab)
    return out


def gamma_component(p: GradedPoly, a: int) -> GradedPoly:
    alg = p.alg
    b = 3 - a
    e_ab = EPS_DOWN[(a, b)]
    out = alg.zero()
    for r in range(1, alg.m + 1):
        out = out + alg.replace_left(
            p, alg.vid(Sector.XI, r), alg.vid(Sector.GHOST_MOM, r, a), 1)
        out = out + alg.replace_left(
            p, alg.vid(Sector.GHOST_MOM, r, b), alg.vid(Sector.LAGRANGE, r), -e_ab)
    return out


def m_component(p: GradedPoly) -> GradedPoly:
    out = p.alg.zero()
    for a in (1, 2):
        out = out + gamma_component(w_component(p, a), a)
    return out


# ---------------------------------------------------------------------------
# tensor operators


def apply_N(t: SymTensor) -> SymTensor:
    return t.map(n_apply)


def apply_N_inverse(t: SymTensor, power=1) -> SymTensor:
    return t.map(lambda p: n_inverse(p, power))


def apply_M(t: SymTensor) -> SymTensor:
    return t.map(m_component)


def apply_W(t: SymTensor) -> SymTensor:
    """Rank n -> n+1: cyclic sum  (WX)^{a0..an} = sum_j W^{aj} X^{rest}."""
    alg = t.alg

    def comp(idx):
        out = alg.zero()
        for j in range(len(idx)):
            rest = idx[:j] + idx[j + 1:]
            out = out + w_component(t.get(rest), idx[j])
        return out

    return SymTensor.from_full(alg, t.rank + 1, comp)


def apply_Gamma(t: SymTensor) -> SymTensor:
    """Rank n -> n-1 (zero on rank 0): contraction on the last index."""
    alg = t.alg
    if t.rank == 0:
        return SymTensor.zero(alg, 0)
    out = SymTensor(alg, t.rank - 1)
    for idx in out.indices():
        p = alg.zero()
        for a in (1, 2):
            p = p + gamma_component(t.get(idx + (a,)), a)
        if p:
            out.comps[idx] = p
    return out


def apply_Q(t: SymTensor) -> SymTensor:
    """Exact inverse used by the ghost-extension machinery.

    rank 0:    Q = (1/6) (11 N^-1 - 6 M N^-2 + M^2 N^-3)
    rank n>=1: Q = (nN + M)^-1
             = (1/n) N^-1 - (1/(n(n+1)(n+2))) ((n+3) M N^-2 - M^2 N^-3)
    """
    n = t.rank
    if n == 0:
        p1 = apply_N_inverse(t, 1)
        p2 = apply_M(apply_N_inverse(t, 2))
        p3 = apply_M(apply_M(apply_N_inverse(t, 3)))
        return p1 * Fraction(11, 6) - p2 + p3 * Fraction(1, 6)
    p1 = apply_N_inverse(t, 1) * Fraction(1, n)
    c = Fraction(1, n * (n + 1) * (n + 2))
    p2 = apply_M(apply_N_inverse(t, 2)) * (c * (n + 3))
    p3 = apply_M(apply_M(apply_N_inverse(t, 3))) * c
    return p1 - p2 + p3


def apply_W_plus(t: SymTensor) -> SymTensor:
    """W+ = Q Gamma: rank n -> n-1; vanishes identically on rank 0."""
    return apply_Q(apply_Gamma(t))


def apply_V(t: SymTensor, n: int) -> SymTensor:
    """The rank-n complement factor:
    V = (1/(n(n+1)(n+2))) (n(n^2+4n+6) I - (n-4) M N^-1 - 2 M^2 N^-2)."""
    if n < 1:
        raise ValueError("V is defined for rank n >= 1")
    c = Fraction(1, n * (n + 1) * (n + 2))
    p0 = t * (c * n * (n * n + 4 * n + 6))
    p1 = apply_M(apply_N_inverse(t, 1)) * (c * (n - 4))
    p2 = apply_M(apply_M(apply_N_inverse(t, 2))) * (2 * c)
    return p0 - p1 - p2


def apply_decompose(t: SymTensor):
    """Split a rank n >= 1 tensor exactly as X = W+ W X + W W+ X.

    The complement factor is the identity: since Q_n W = W Q_(n-1) for
    n >= 1 (Q on rank 0 is by construction the rank-1 Q shifted through W),
    one has (I - W+ W)X = Q_n W Gamma X = W W+ X.  Substituting any other
    polynomial in M, N^-1 for the complement breaks the reconstruction,
    because M's minimal polynomial m(m-N)(m-2N) pins it to the identity;
    see the tests for an explicit check that apply_V's polynomial does not
    reproduce it.
    """
    if t.rank < 1:
        raise ValueError("decomposition applies to rank >= 1")
    head = apply_W_plus(apply_W(t))
    tail = apply_W(apply_W_plus(t))
    return head, tail


# ---------------------------------------------------------------------------
# contracted second-order operators (rank 0)


def bar_w(p: GradedPoly) -> GradedPoly:
    """barW = eps_ab W^a W^b = W^2 W^1 - W^1 W^2."""
    return w_component(w_component(p, 1), 2) - w_component(w_component(p, 2), 1)


def bar_gamma(p: GradedPoly) -> GradedPoly:
    """barGamma = eps^ab Gamma_a Gamma_b = Gamma_1 Gamma_2 - Gamma_2 Gamma_1."""
    return gamma_component(gamma_component(p, 2), 1) - gamma_component(gamma_component(p, 1), 2)


def apply_bar_ops(t: SymTensor):
    """On a rank-0 tensor in the invertible domain of N, return
    (barW x, barGamma x, head, tail) with x = head + tail,
    head = (1/2) M N^-1 x and tail = (1/4)(barW barGamma - barGamma barW) N^-2 x."""
    if t.rank != 0:
        raise ValueError("contracted operators act on rank-0 tensors")
    x = t.get(())
    bw = bar_w(x)
    bg = bar_gamma(x)
    head = m_component(n_inverse(x, 1)) * Fraction(1, 2)
    y = n_inverse(x, 2)
    tail = (bar_w(bar_gamma(y)) - bar_gamma(bar_w(y))) * Fraction(1, 4)
    return bw, bg, head, tail


# ---------------------------------------------------------------------------


@dataclass
class OperatorReport:
    """Shape summary of one operator application."""

    name: str
    input_rank: int
    output_rank: int
    terms_by_n: dict  # N-degree -> (terms in, terms out)

    def render(self):
        rows = ", ".join(f"N={n}: {i}->{o}" for n, (i, o) in sorted(self.terms_by_n.items()))
        return f"{self.name}: rank {self.input_rank} -> {self.output_rank} ({rows or 'empty'})"


def operator_report(name, t_in: SymTensor, t_out: SymTensor) -> OperatorReport:
    def census(t):
        alg = t.alg
        by_n: dict = {}
        for p in t.comps.values():
            for m in p.terms:
                d = alg.term_ndeg(m)
                by_n[d] = by_n.get(d, 0) + 1
        return by_n

    a, b = census(t_in), census(t_out)
    merged = {n: (a.get(n, 0), b.get(n, 0)) for n in set(a) | set(b)}
    return OperatorReport(name, t_in.rank, t_out.rank, merged)

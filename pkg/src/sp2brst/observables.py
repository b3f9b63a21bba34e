"""Lifting first-class functions to observables of the extended theory.

A first-class function phi0 (a polynomial in the matter variables whose
bracket with every constraint lies in the ideal generated by the
constraints) extends to Phi' = phi0 + K commuting with both charges,

    {Omega^a, Phi'}' = 0,

subject to the boundary conditions ngh(Phi') = 0, Phi'|_(C=pi=0) = phi0
and barGamma K = 0.  Those conditions remove the homogeneous freedom of
the projected equation, leaving the finite Neumann sum

    K = -(I + W+(A + ad Pi))^-1 W+ [Omega, phi0],

which is built from W+ images and therefore satisfies barGamma K = 0
automatically (barGamma W+ = 0).  Restriction to C = pi = 0 inverts the
lift, and on lifted elements the bracket and the product restrict to the
bracket and the product of the originals: the first-class functions and
their lifts realize the same algebra.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import Algebra, GradedPoly, Sector
from .operators import apply_W, apply_W_plus, bar_gamma
from .solver import (DEFAULT_MAX_TERMS, SolverResult, apply_A, neumann_apply,
                     tensor_bracket)
from .tensors import SymTensor

_MATTER = (Sector.XI, Sector.XI_PHYS)
_RESTRICTED = (Sector.GHOST, Sector.LAGRANGE_MOM)


class NotFirstClassError(ValueError):
    """The function's bracket with some constraint leaves the constraint
    ideal; the witness records the constraint index and the remainder."""

    def __init__(self, alpha: int, remainder: GradedPoly):
        self.alpha = alpha
        self.remainder = remainder
        super().__init__(
            f"not first class: {{phi0, xi[{alpha}]}} has remainder "
            f"{remainder!r} outside the constraint ideal")


@dataclass(frozen=True)
class FirstClassCheck:
    ok: bool
    alpha: int | None = None
    remainder: GradedPoly | None = None


def _require_matter_only(phi0: GradedPoly) -> None:
    sec = phi0.alg.var_sector
    for mono in phi0.terms:
        for v, _ in mono:
            if sec[v] not in _MATTER:
                raise ValueError(
                    "phi0 must be a polynomial in the matter variables only")


def check_first_class(phi0: GradedPoly, alg: Algebra | None = None) -> FirstClassCheck:
    """First class means {phi0, xi_alpha}' lies in the ideal generated by
    the constraints for every alpha.  The ideal is linear in the xi, so
    membership is decided by setting xi = 0: the remainder must vanish."""
    if alg is None:
        alg = phi0.alg
    _require_matter_only(phi0)
    for alpha in range(1, alg.m + 1):
        remainder = alg.bracket(phi0, alg.xi(alpha)).substitute_zero((Sector.XI,))
        if remainder:
            return FirstClassCheck(False, alpha, remainder)
    return FirstClassCheck(True)


def restrict(phi_prime: GradedPoly) -> GradedPoly:
    """Inverse of the lift: set the ghosts C and pi to zero."""
    return phi_prime.substitute_zero(_RESTRICTED)


@dataclass(frozen=True)
class LiftLine:
    degree: int
    direct_zero: bool
    structured_zero: bool
    agree: bool


@dataclass(frozen=True)
class ObservableLift:
    """A lifted observable Phi' = phi0 + K with its verification record.

    residual is the directly evaluated {Omega^a, Phi'}'; structured is
    W K + [Omega, phi0] + A K + [Pi, K].  Both must vanish through the
    truncation degree and agree term by term for any K.
    """

    phi0: GradedPoly
    k_part: GradedPoly
    phi_prime: GradedPoly
    k: int
    residual: SymTensor
    structured: SymTensor
    lines: tuple
    bar_gamma_zero: bool
    restriction_ok: bool
    ngh_ok: bool

    @property
    def ok(self) -> bool:
        return (self.residual.is_zero() and self.residual == self.structured
                and self.bar_gamma_zero and self.restriction_ok and self.ngh_ok)

    def render(self) -> str:
        rows = [
            "observable lift: " + ("verified" if self.ok else "FAILED")
            + f" through cp-degree {self.k}",
            f"  correction terms: {self.k_part.term_count()}",
        ]
        for line in self.lines:
            status = "zero" if line.direct_zero else "NONZERO"
            extra = "" if line.agree else "  [structured form DISAGREES]"
            rows.append(f"  degree {line.degree}: commutator {status}{extra}")
        rows.append(f"  boundary barGamma K = 0: {'yes' if self.bar_gamma_zero else 'NO'}")
        rows.append(f"  restriction returns phi0: {'yes' if self.restriction_ok else 'NO'}")
        return "\n".join(rows)


def lift(phi0: GradedPoly, omega_result: SolverResult, k: int | None = None,
         max_terms: int = DEFAULT_MAX_TERMS) -> ObservableLift:
    """Extend a first-class phi0 to Phi' = phi0 + K with
    {Omega^a, Phi'}' = 0 through the solver's truncation degree.

    The truncation must match the solve (a lift at a different order has
    no residual guarantee); a non-first-class phi0 is rejected with the
    witnessing constraint and remainder.
    """
    if k is None:
        k = omega_result.config.k
    if k != omega_result.config.k:
        raise ValueError(
            f"lift order {k} differs from the solve order {omega_result.config.k}")
    alg = omega_result.algebra
    if not alg.compatible(phi0.alg):
        raise ValueError("phi0 belongs to an algebra over a different theory")
    fc = check_first_class(phi0, alg)
    if not fc.ok:
        raise NotFirstClassError(fc.alpha, fc.remainder)

    omega, pi = omega_result.omega, omega_result.pi

    def op(t: SymTensor) -> SymTensor:
        return apply_A(t) + tensor_bracket(pi, t)

    seed = -apply_W_plus(tensor_bracket(omega, SymTensor.from_scalar(phi0)))
    k_tensor = neumann_apply(op, seed, k, max_terms)
    k_part = k_tensor.get(())
    phi_prime = phi0 + k_part

    direct = SymTensor.from_full(
        alg, 1, lambda idx: alg.bracket(omega.get(idx), phi_prime)
    ).truncate_cp(k)
    structured = (apply_W(k_tensor)
                  + tensor_bracket(omega, SymTensor.from_scalar(phi0))
                  + apply_A(k_tensor)
                  + tensor_bracket(pi, k_tensor)).truncate_cp(k)
    lines = tuple(
        LiftLine(
            d,
            direct.cp_part(d).is_zero(),
            structured.cp_part(d).is_zero(),
            direct.cp_part(d) == structured.cp_part(d),
        )
        for d in range(k + 1)
    )
    ngh_ok = all(alg.term_ngh(m) == 0 for m in phi_prime.terms)
    return ObservableLift(
        phi0=phi0, k_part=k_part, phi_prime=phi_prime, k=k,
        residual=direct, structured=structured, lines=lines,
        bar_gamma_zero=bar_gamma(k_part).is_zero(),
        restriction_ok=restrict(phi_prime) == phi0,
        ngh_ok=ngh_ok)


@dataclass(frozen=True)
class RealizationReport:
    """Bracket and product compatibility of two lifts under restriction."""

    bracket_ok: bool
    product_ok: bool
    bracket_restricted: GradedPoly
    bracket_expected: GradedPoly
    product_restricted: GradedPoly
    product_expected: GradedPoly

    @property
    def ok(self) -> bool:
        return self.bracket_ok and self.product_ok

    def render(self) -> str:
        return ("realization: bracket "
                + ("matches" if self.bracket_ok else "DIFFERS")
                + ", product "
                + ("matches" if self.product_ok else "DIFFERS"))


def verify_realization(lift1: ObservableLift, lift2: ObservableLift) -> RealizationReport:
    """restrict({Phi'_1, Phi'_2}') must equal {phi_1, phi_2}' and
    restrict(Phi'_1 Phi'_2) must equal phi_1 phi_2, exactly."""
    if lift1.k != lift2.k:
        raise ValueError("lifts were computed at different truncation orders")
    alg = lift1.phi_prime.alg
    br = restrict(alg.bracket(lift1.phi_prime, lift2.phi_prime))
    br_want = alg.bracket(lift1.phi0, lift2.phi0)
    pr = restrict(alg.mul(lift1.phi_prime, lift2.phi_prime))
    pr_want = alg.mul(lift1.phi0, lift2.phi0)
    return RealizationReport(
        bracket_ok=br == br_want, product_ok=pr == pr_want,
        bracket_restricted=br, bracket_expected=br_want,
        product_restricted=pr, product_expected=pr_want)

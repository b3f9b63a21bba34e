"""Construction of the Sp(2) pair of BRST charges for a first-class theory.

The charges are assembled as Omega^a = Omega_1^a + Pi^a where the boundary
part is fixed,

    Omega_1^a = sum_alpha  xi_alpha C^(alpha a) + eps^ab P_(alpha b) pi^alpha,

and Pi collects the higher ghost-degree corrections.  The master equations
{Omega^a, Omega^b}' = 0 are equivalent to the rank-2 statement

    G  =  W Pi + F + A Pi + quad(Pi)  =  0,
    quad(Pi)^ab = {Pi^a, Pi^b}',

which holds term by term against the directly evaluated bracket for *any*
Pi, not just solutions (verify_master checks both sides).  Projecting with
the generalized inverse W+ turns G = 0 into the fixed-point problem

    Pi = Pi_0 + 1/2 <Pi, Pi>,      Pi_0 = (I + W+ A)^-1 (Upsilon - W+ F),

whose iteration terminates exactly at any finite truncation degree because
every bracket application strictly raises the C,pi-degree.  The same
solution is reproduced by the multi-bracket expansion Pi = <e^(Pi_0)>,
evaluated either through the normative recursion or as a sum over distinct
descendant pairing trees; the solver can run both and insists they agree.

All arithmetic is exact (Fraction coefficients); truncation at cp-degree k
is a projection, not an approximation, so a zero residual through k is a
proof through k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations

from .algebra import Algebra, GradedPoly, Sector, TheoryError
from .operators import EPS_UP, apply_W, apply_W_plus
from .tensors import SymTensor
from .theory import TheorySpec

DEFAULT_MAX_TERMS = 1_000_000

HALF = Fraction(1, 2)

# Normalisation of the pair bracket <.,.> relative to the symmetrized
# double bracket [x,y] + [y,x].  The value -1/2 is pinned by requiring the
# fixed point of Pi = Pi_0 + 1/2 <Pi,Pi> to solve the projected master
# equation Pi = Upsilon - W+(F + A Pi + quad(Pi)) with the same quad(Pi)
# that the residual G contains; the so(3) regression test shows that -1/4
# in its place leaves a nonzero residual at cp-degree 3.
PAIR_COEFF = Fraction(-1, 2)


class ConventionError(RuntimeError):
    """An internal consistency property failed; signals a convention bug."""


class TermBudgetError(RuntimeError):
    """An intermediate result exceeded the configured term budget."""


class Method(Enum):
    FIXED_POINT = "fixed-point"
    DESCENDANTS = "descendants"
    BOTH = "both"


@dataclass(frozen=True)
class SolverConfig:
    """Truncation degree, optional boundary datum Upsilon, and method.

    k is the cp-degree (ghost C plus ghost momentum pi count) through which
    the charges are constructed and verified; every reported zero is exact
    through that degree.
    """

    k: int
    upsilon: SymTensor | None = None
    method: Method = Method.BOTH
    max_terms: int = DEFAULT_MAX_TERMS

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("truncation degree k must be at least 2")
        if self.max_terms < 1:
            raise ValueError("max_terms must be positive")


def _guard(t: SymTensor, max_terms: int) -> SymTensor:
    if t.term_count() > max_terms:
        raise TermBudgetError(
            f"intermediate tensor has {t.term_count()} terms "
            f"(budget {max_terms})")
    return t


def validate_upsilon(alg: Algebra, upsilon: SymTensor) -> None:
    """The boundary datum must be rank 1, odd, ngh 1, cp-degree >= 2 and
    annihilated by the rank-raising W."""
    if upsilon.rank != 1:
        raise TheoryError("upsilon must be a rank-1 tensor")
    for idx in upsilon.indices():
        p = upsilon.get(idx)
        if not p:
            continue
        if p.parity() != 1 or p.ngh() != 1:
            raise TheoryError("upsilon components must be odd with ngh = 1")
    mc = upsilon.min_cp()
    if mc is not None and mc < 2:
        raise TheoryError("upsilon must start at cp-degree 2")
    if not apply_W(upsilon).is_zero():
        raise TheoryError("upsilon is not annihilated by W")


# ---------------------------------------------------------------------------
# building blocks


def build_omega1(alg: Algebra) -> SymTensor:
    """The boundary part  Omega_1^a = xi_alpha C^(alpha a)
    + eps^ab P_(alpha b) pi^alpha  (both boundary conditions read off it)."""

    def comp(idx):
        (a,) = idx
        b = 3 - a
        eab = EPS_UP[(a, b)]
        out = alg.zero()
        for r in range(1, alg.m + 1):
            out = out + alg.mul(alg.xi(r), alg.ghost(r, a))
            out = out + alg.mul(alg.ghost_mom(r, b), alg.lagrange_mom(r)) * eab
        return out

    return SymTensor.from_full(alg, 1, comp)


def build_F(alg: Algebra) -> SymTensor:
    """F^ab = C^(alpha a) {xi_alpha, xi_beta}' C^(beta b); equals the direct
    bracket {Omega_1^a, Omega_1^b}' (the ghost-sector pairings cancel)."""

    def comp(idx):
        a, b = idx
        out = alg.zero()
        for al in range(1, alg.m + 1):
            for be in range(1, alg.m + 1):
                w = alg.bracket(alg.xi(al), alg.xi(be))
                if w:
                    out = out + alg.mul(alg.mul(alg.ghost(al, a), w), alg.ghost(be, b))
        return out

    return SymTensor.from_full(alg, 2, comp)


def a_component(p: GradedPoly, a: int) -> GradedPoly:
    """A^a = C^(alpha a) {xi_alpha, . }'."""
    alg = p.alg
    out = alg.zero()
    for r in range(1, alg.m + 1):
        w = alg.bracket(alg.xi(r), p)
        if w:
            out = out + alg.mul(alg.ghost(r, a), w)
    return out


def apply_A(t: SymTensor) -> SymTensor:
    """Rank n -> n+1: (A X)^(a0..an) = sum_j A^(aj) X^(rest), the same
    index-placement sum as the rank-raising W."""
    alg = t.alg

    def comp(idx):
        out = alg.zero()
        for j in range(len(idx)):
            out = out + a_component(t.get(idx[:j] + idx[j + 1:]), idx[j])
        return out

    return SymTensor.from_full(alg, t.rank + 1, comp)


def tensor_bracket(x: SymTensor, y: SymTensor) -> SymTensor:
    """[x, y]^(a a1..an) = {x^(a, y^a1..an)}': rank 1 x rank n -> rank n+1,
    summed over the placements of x's index (no normalisation factor)."""
    if x.rank != 1:
        raise ValueError("tensor_bracket expects a rank-1 first argument")
    alg = x.alg

    def comp(idx):
        out = alg.zero()
        for j in range(len(idx)):
            out = out + alg.bracket(x.get((idx[j],)), y.get(idx[:j] + idx[j + 1:]))
        return out

    return SymTensor.from_full(alg, y.rank + 1, comp)


def quad_term(pi: SymTensor) -> SymTensor:
    """quad(Pi)^ab = {Pi^a, Pi^b}' = 1/2 [Pi, Pi]^ab for odd rank-1 Pi."""
    return tensor_bracket(pi, pi) * HALF


# ---------------------------------------------------------------------------
# the inverse (I + W+ op)^-1 and the pair bracket


def neumann_apply(op, x: SymTensor, k: int, max_terms: int = DEFAULT_MAX_TERMS) -> SymTensor:
    """(I + W+ op)^-1 x = sum_m (-1)^m (W+ op)^m x, exact under truncation.

    Each W+ op application must strictly raise the minimum cp-degree (A adds
    a ghost; a bracket with Pi adds at least one); the series therefore has
    at most k nonzero terms.  A step that fails to raise the degree signals
    a convention bug and raises ConventionError.
    """
    total = x.truncate_cp(k)
    term = total
    while term:
        floor = term.min_cp()
        term = -apply_W_plus(op(term)).truncate_cp(k)
        _guard(term, max_terms)
        if term:
            ceil = term.min_cp()
            if floor is None or ceil <= floor:
                raise ConventionError(
                    f"Neumann term failed to raise cp-degree ({floor} -> {ceil})")
        total = _guard(total + term, max_terms)
    return total


def build_pi0(alg: Algebra, config: SolverConfig, f: SymTensor | None = None) -> SymTensor:
    """Pi_0 = (I + W+ A)^-1 (Upsilon - W+ F)."""
    if f is None:
        f = build_F(alg)
    seed = -apply_W_plus(f)
    if config.upsilon is not None:
        seed = config.upsilon + seed
    return neumann_apply(apply_A, seed, config.k, config.max_terms)


def pair_bracket(x: SymTensor, y: SymTensor, k: int,
                 max_terms: int = DEFAULT_MAX_TERMS) -> SymTensor:
    """<x, y> = -1/2 (I + W+ A)^-1 W+ ([x, y] + [y, x]).

    Symmetric in its arguments and cp-degree raising:
    cp(<x,y>) >= cp(x) + cp(y) - 1.
    """
    raw = tensor_bracket(x, y) + tensor_bracket(y, x)
    seed = apply_W_plus(raw).truncate_cp(k) * PAIR_COEFF
    return neumann_apply(apply_A, seed, k, max_terms)


# ---------------------------------------------------------------------------
# fixed point


def solve_pi_fixed_point(alg: Algebra, config: SolverConfig,
                         pi0: SymTensor | None = None) -> SymTensor:
    """Iterate Pi <- Pi_0 + 1/2 <Pi, Pi> from Pi_0 until the truncated
    iterate repeats; the degree-d part freezes after at most d-1 rounds."""
    if pi0 is None:
        pi0 = build_pi0(alg, config)
    k, budget = config.k, config.max_terms
    pi = pi0
    for _ in range(k + 1):
        nxt = (pi0 + pair_bracket(pi, pi, k, budget) * HALF).truncate_cp(k)
        if nxt == pi:
            return pi
        pi = _guard(nxt, budget)
    raise ConventionError(
        f"fixed-point iteration did not stabilise within {k} rounds")


# ---------------------------------------------------------------------------
# multi-brackets and descendants


def multi_bracket(xs, k: int, max_terms: int = DEFAULT_MAX_TERMS) -> SymTensor:
    """<X_1, ..., X_m>: <X> = X, <X_1,X_2> = pair_bracket, and for m >= 3

        <X_1..X_m> = 1/2 sum over proper nonempty subsets S of
                     < <X_S>, <X_complement> >,

    which counts every unordered split twice, hence the 1/2.  The result is
    m-linear and fully symmetric."""
    xs = list(xs)
    if not xs:
        raise ValueError("multi_bracket needs at least one argument")
    cache: dict = {}

    def rec(ids):
        if ids in cache:
            return cache[ids]
        if len(ids) == 1:
            val = xs[ids[0]]
        elif len(ids) == 2:
            val = pair_bracket(xs[ids[0]], xs[ids[1]], k, max_terms)
        else:
            total = SymTensor.zero(xs[0].alg, 1)
            for r in range(1, len(ids)):
                for sub in combinations(ids, r):
                    rest = tuple(i for i in ids if i not in sub)
                    total = total + pair_bracket(rec(sub), rec(rest), k, max_terms)
            val = total * HALF
        cache[ids] = val
        return val

    return rec(tuple(range(len(xs))))


def _merge_trees(a: str, b: str) -> str:
    return "(" + min(a, b) + "," + max(a, b) + ")"


def descendant_trees(m: int):
    """All structurally distinct full pairing trees over leaves 1..m, as
    canonical strings; there are (2m-3)!! of them."""
    if m < 1:
        raise ValueError("need at least one leaf")
    results = set()
    seen = set()

    def rec(state):
        if len(state) == 1:
            results.add(state[0])
            return
        if state in seen:
            return
        seen.add(state)
        for i in range(len(state)):
            for j in range(i + 1, len(state)):
                rest = [state[p] for p in range(len(state)) if p not in (i, j)]
                rest.append(_merge_trees(state[i], state[j]))
                rec(tuple(sorted(rest)))

    rec(tuple(sorted(str(i) for i in range(1, m + 1))))
    return results


def double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _split_tree(tree: str):
    depth = 0
    for pos, ch in enumerate(tree):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 1:
            return tree[1:pos], tree[pos + 1:-1]
    raise ValueError(f"malformed tree {tree!r}")


def descendant_expand(xs, k: int, max_terms: int = DEFAULT_MAX_TERMS) -> SymTensor:
    """Cross-check path for multi_bracket: the sum of all distinct
    descendants (fully reduced pairing trees) of (X_1, ..., X_m)."""
    xs = list(xs)
    if not xs:
        raise ValueError("descendant_expand needs at least one argument")
    vals: dict = {}

    def value(tree):
        if tree in vals:
            return vals[tree]
        if "," not in tree:
            v = xs[int(tree) - 1]
        else:
            left, right = _split_tree(tree)
            v = pair_bracket(value(left), value(right), k, max_terms)
        vals[tree] = v
        return v

    total = SymTensor.zero(xs[0].alg, 1)
    for tree in sorted(descendant_trees(len(xs))):
        total = total + value(tree)
    return total


def solve_pi_descendants(alg: Algebra, config: SolverConfig,
                         pi0: SymTensor | None = None) -> SymTensor:
    """Pi = <e^(Pi_0)> = sum_(m>=1) <Pi_0^m> / m!, a finite sum: the m-fold
    bracket has cp-degree at least m(b-1)+1 with b = min cp-degree of Pi_0."""
    if pi0 is None:
        pi0 = build_pi0(alg, config)
    if pi0.is_zero():
        return pi0
    k, budget = config.k, config.max_terms
    b = max(2, pi0.min_cp())
    total = SymTensor.zero(alg, 1)
    m = 1
    while m * (b - 1) + 1 <= k:
        term = multi_bracket([pi0] * m, k, budget)
        total = _guard((total + term * Fraction(1, math.factorial(m))).truncate_cp(k),
                       budget)
        m += 1
    return total


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class DegreeLine:
    degree: int
    direct_zero: bool
    structured_zero: bool
    agree: bool


@dataclass(frozen=True)
class MasterReport:
    """Residual of the master equations through cp-degree k, evaluated both
    ways: directly as {Omega^a, Omega^b}' and structurally as
    G = W Pi + F + A Pi + quad(Pi).  The two must agree term by term."""

    k: int
    residual: SymTensor
    structured: SymTensor
    lines: tuple

    @property
    def ok(self) -> bool:
        return self.residual.is_zero()

    @property
    def agree(self) -> bool:
        return self.residual == self.structured

    def render(self) -> str:
        rows = []
        for line in self.lines:
            status = "zero" if line.direct_zero else "NONZERO"
            extra = "" if line.agree else "  [structured form DISAGREES]"
            rows.append(f"  degree {line.degree}: residual {status}{extra}")
        head = "master equations: " + ("satisfied" if self.ok else "VIOLATED")
        return "\n".join([f"{head} through cp-degree {self.k}"] + rows)


def verify_master(omega: SymTensor, k: int) -> MasterReport:
    """Evaluate {Omega^a, Omega^b}' directly and compare with the structured
    residual; the two agree identically for any Pi = Omega - Omega_1."""
    alg = omega.alg
    direct = SymTensor.from_full(
        alg, 2,
        lambda idx: alg.bracket(omega.get((idx[0],)), omega.get((idx[1],)))
    ).truncate_cp(k)
    pi = omega - build_omega1(alg)
    structured = (apply_W(pi) + build_F(alg) + apply_A(pi)
                  + quad_term(pi)).truncate_cp(k)
    lines = tuple(
        DegreeLine(
            d,
            direct.cp_part(d).is_zero(),
            structured.cp_part(d).is_zero(),
            direct.cp_part(d) == structured.cp_part(d),
        )
        for d in range(k + 1)
    )
    return MasterReport(k, direct, structured, lines)


def boundary_violations(omega: SymTensor):
    """Derivative read-offs: d_l Omega^a / dC^(alpha b) at C=pi=P=lambda=0
    must equal xi_alpha delta^a_b, and d_l Omega^a / dpi^alpha at
    C=pi=lambda=0 must equal eps^ab P_(alpha b)."""
    alg = omega.alg
    ghost_zero = (Sector.GHOST, Sector.LAGRANGE_MOM, Sector.GHOST_MOM,
                  Sector.LAGRANGE)
    pi_zero = (Sector.GHOST, Sector.LAGRANGE_MOM, Sector.LAGRANGE)
    problems = []
    for a in (1, 2):
        w = omega.get((a,))
        for r in range(1, alg.m + 1):
            for b in (1, 2):
                d = alg.derive_left(w, alg.vid(Sector.GHOST, r, b))
                d = d.substitute_zero(ghost_zero)
                want = alg.xi(r) if a == b else alg.zero()
                if d != want:
                    problems.append(
                        f"dOmega^{a}/dC[{r},{b}] at zero ghosts is {d!r}, "
                        f"expected {want!r}")
            d = alg.derive_left(w, alg.vid(Sector.LAGRANGE_MOM, r))
            d = d.substitute_zero(pi_zero)
            want = alg.ghost_mom(r, 3 - a) * EPS_UP[(a, 3 - a)]
            if d != want:
                problems.append(
                    f"dOmega^{a}/dpi[{r}] at zero ghosts is {d!r}, "
                    f"expected {want!r}")
    return problems


# ---------------------------------------------------------------------------
# the pipeline


@dataclass(frozen=True)
class SolverResult:
    """Everything the construction produced, plus the verification report."""

    spec: TheorySpec
    config: SolverConfig
    algebra: Algebra
    omega: SymTensor
    omega1: SymTensor
    f: SymTensor
    pi0: SymTensor
    pi: SymTensor
    report: MasterReport
    boundary_problems: tuple

    @property
    def ok(self) -> bool:
        return self.report.ok and self.report.agree and not self.boundary_problems

    def render(self) -> str:
        rows = [
            f"theory: {self.spec.label} "
            f"(m={self.spec.m}, physical={self.spec.n_physical})",
            f"truncation: cp-degree {self.config.k}, method {self.config.method.value}",
            f"Omega terms: {self.omega.term_count()} "
            f"(boundary {self.omega1.term_count()}, correction {self.pi.term_count()})",
            self.report.render(),
        ]
        if self.boundary_problems:
            rows.append("boundary conditions VIOLATED:")
            rows.extend("  " + p for p in self.boundary_problems)
        else:
            rows.append("boundary conditions: satisfied")
        return "\n".join(rows)


def solve(spec: TheorySpec, config: SolverConfig,
          algebra: Algebra | None = None) -> SolverResult:
    """Assemble Omega^a = Omega_1^a + Pi^a and verify the master equations
    through cp-degree k (exactly)."""
    if algebra is not None:
        alg = algebra
    elif config.upsilon is not None:
        alg = config.upsilon.alg
    else:
        alg = Algebra(spec)
    if alg.spec != spec:
        raise TheoryError("algebra and upsilon must be built over the given theory")
    if config.upsilon is not None:
        validate_upsilon(alg, config.upsilon)
    omega1 = build_omega1(alg)
    f = build_F(alg)
    pi0 = build_pi0(alg, config, f=f)
    pis = {}
    if config.method in (Method.FIXED_POINT, Method.BOTH):
        pis[Method.FIXED_POINT] = solve_pi_fixed_point(alg, config, pi0)
    if config.method in (Method.DESCENDANTS, Method.BOTH):
        pis[Method.DESCENDANTS] = solve_pi_descendants(alg, config, pi0)
    if len(pis) == 2 and pis[Method.FIXED_POINT] != pis[Method.DESCENDANTS]:
        raise ConventionError(
            "fixed-point and descendant expansions disagree")
    pi = pis[Method.FIXED_POINT if Method.FIXED_POINT in pis else Method.DESCENDANTS]
    omega = omega1 + pi
    report = verify_master(omega, config.k)
    problems = tuple(boundary_violations(omega))
    return SolverResult(spec=spec, config=config, algebra=alg, omega=omega,
                        omega1=omega1, f=f, pi0=pi0, pi=pi, report=report,
                        boundary_problems=problems)

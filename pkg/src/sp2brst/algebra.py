"""Exact graded-commutative polynomial algebra on the Sp(2)-extended phase space.

Variables come in six sectors, listed in canonical monomial order:

    xi[1..m]      constraint coordinates          parity eps_a, ngh 0, N-weight 1
    xip[1..p]     remaining (physical) coordinates parity eps_a', ngh 0
    P[a,1|2]      ghost momenta                   parity eps_a+1, ngh -1, N-weight 1
    C[a,1|2]      ghosts                          parity eps_a+1, ngh +1, cp-weight 1
    lam[1..m]     Lagrange multipliers            parity eps_a, ngh -2, N-weight 1
    pi[1..m]      multiplier momenta              parity eps_a, ngh +2, cp-weight 1

All coefficients are `fractions.Fraction`; odd (Grassmann) variables square to
zero and reordering picks up Koszul signs.  A monomial is a tuple of
(variable id, exponent) pairs sorted by id; a polynomial is a dict from
monomial to coefficient with no zero entries.

The graded Poisson bracket is realised as a single sum over a sparse
"symplectic pairing" table:  {X,Y} = sum_AB (d_r X/d v_A) w_AB (d_l Y/d v_B),
with right derivatives acting on X and left derivatives on Y.  The ghost
entries of w are fixed by the canonical pairings (C,P) and (pi,lam); the
matter entries come from the theory's structure tables, completed by graded
antisymmetry  w_ji = -(-1)^(eps_i eps_j) w_ij.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction

_ZERO = Fraction(0)
_ONE = Fraction(1)


class Sector(IntEnum):
    """Variable sectors, enum order == canonical monomial order."""

    XI = 0            # constraint coordinates xi[a]
    XI_PHYS = 1       # physical coordinates xip[a]
    GHOST_MOM = 2     # ghost momenta P[a,i]
    GHOST = 3         # ghosts C[a,i]
    LAGRANGE = 4      # multipliers lam[a]
    LAGRANGE_MOM = 5  # multiplier momenta pi[a]


_SECTOR_BASENAME = {
    Sector.XI: "xi",
    Sector.XI_PHYS: "xip",
    Sector.GHOST_MOM: "P",
    Sector.GHOST: "C",
    Sector.LAGRANGE: "lam",
    Sector.LAGRANGE_MOM: "pi",
}

_SECTOR_NGH = {
    Sector.XI: 0,
    Sector.XI_PHYS: 0,
    Sector.GHOST_MOM: -1,
    Sector.GHOST: 1,
    Sector.LAGRANGE: -2,
    Sector.LAGRANGE_MOM: 2,
}

# sectors counting towards the N-degree (constraint sector) / the C-pi degree
_N_SECTORS = (Sector.XI, Sector.GHOST_MOM, Sector.LAGRANGE)
_CP_SECTORS = (Sector.GHOST, Sector.LAGRANGE_MOM)


class TheoryError(ValueError):
    """Inconsistent structure tables or malformed theory data."""


@dataclass(frozen=True)
class Variable:
    vid: int
    sector: Sector
    alpha: int          # 1-based constraint / physical index
    sp2: int | None     # Sp(2) index 1|2 for P and C, else None
    parity: int         # 0 even, 1 odd
    ngh: int
    name: str           # serialised spelling, e.g. "P[2,1]"

    def __repr__(self):
        return self.name


Monomial = tuple  # tuple[tuple[int, int], ...]


class GradedPoly:
    """Sparse polynomial over one Algebra.  Treat instances as immutable."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: "Algebra", terms: dict):
        self.alg = alg
        self.terms = terms

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(alg):
        return GradedPoly(alg, {})

    # -- queries -----------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def term_count(self):
        return len(self.terms)

    def _homogeneous(self, term_fn, what):
        vals = {term_fn(m) for m in self.terms}
        if not vals:
            return 0
        if len(vals) > 1:
            raise ValueError(f"polynomial is not homogeneous in {what}: {sorted(vals)}")
        return vals.pop()

    def parity(self):
        return self._homogeneous(self.alg.term_parity, "parity")

    def ngh(self):
        return self._homogeneous(self.alg.term_ngh, "ngh")

    def n_degree(self):
        return self._homogeneous(self.alg.term_ndeg, "N-degree")

    def cp_degree(self):
        return self._homogeneous(self.alg.term_cpdeg, "cp-degree")

    def min_cp(self):
        """Smallest cp-degree over terms, or None for the zero polynomial."""
        if not self.terms:
            return None
        cp = self.alg.term_cpdeg
        return min(cp(m) for m in self.terms)

    def in_v(self):
        """True when every term has N-degree >= 1."""
        nd = self.alg.term_ndeg
        return all(nd(m) >= 1 for m in self.terms)

    def grade_decompose(self):
        """Split into homogeneous (N-degree, cp-degree) buckets."""
        alg = self.alg
        buckets: dict = {}
        for m, c in self.terms.items():
            key = (alg.term_ndeg(m), alg.term_cpdeg(m))
            buckets.setdefault(key, {})[m] = c
        return {k: GradedPoly(alg, t) for k, t in sorted(buckets.items())}

    def truncate_cp(self, k):
        """Drop every term of cp-degree greater than k."""
        cp = self.alg.term_cpdeg
        kept = {m: c for m, c in self.terms.items() if cp(m) <= k}
        if len(kept) == len(self.terms):
            return self
        return GradedPoly(self.alg, kept)

    def cp_part(self, d):
        """The terms of cp-degree exactly d."""
        cp = self.alg.term_cpdeg
        return GradedPoly(self.alg, {m: c for m, c in self.terms.items() if cp(m) == d})

    def substitute_zero(self, sectors):
        """Set every variable of the given sectors to zero (drop those terms)."""
        sec = self.alg.var_sector
        wanted = set(sectors)
        out = {}
        for m, c in self.terms.items():
            if not any(sec[v] in wanted for v, _ in m):
                out[m] = c
        return GradedPoly(self.alg, out)

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, GradedPoly):
            if other.alg is not self.alg and not self.alg.compatible(other.alg):
                raise TheoryError(
                    "cannot combine elements of algebras over different theories")
            return other
        if isinstance(other, (int, Fraction)):
            return self.alg.scalar(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, _ZERO) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return GradedPoly(self.alg, out)

    __radd__ = __add__

    def __neg__(self):
        return GradedPoly(self.alg, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return GradedPoly.zero(self.alg)
            return GradedPoly(self.alg, {m: c * other for m, c in self.terms.items()})
        if isinstance(other, GradedPoly):
            return self.alg.mul(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.__mul__(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        out = self.alg.one()
        base = self
        while n:
            if n & 1:
                out = self.alg.mul(out, base)
            base = self.alg.mul(base, base)
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.alg.scalar(other)
        if not isinstance(other, GradedPoly):
            return NotImplemented
        if self.alg is not other.alg and not self.alg.compatible(other.alg):
            return False
        return self.terms == other.terms

    __hash__ = None

    def __repr__(self):
        from . import expr

        return expr.serialize(self)


class Algebra:
    """Variable table, graded product and Poisson bracket for one theory."""

    def __init__(self, spec):
        self.spec = spec
        m = spec.m
        p = spec.n_physical

        vars_: list[Variable] = []

        def _emit(sector, alpha, sp2, parity):
            vid = len(vars_)
            base = _SECTOR_BASENAME[sector]
            name = f"{base}[{alpha},{sp2}]" if sp2 else f"{base}[{alpha}]"
            vars_.append(Variable(vid, sector, alpha, sp2, parity & 1, _SECTOR_NGH[sector], name))

        for a in range(1, m + 1):
            _emit(Sector.XI, a, None, spec.constraint_parities[a - 1])
        for a in range(1, p + 1):
            _emit(Sector.XI_PHYS, a, None, spec.physical_parities[a - 1])
        for a in range(1, m + 1):
            for i in (1, 2):
                _emit(Sector.GHOST_MOM, a, i, spec.constraint_parities[a - 1] + 1)
        for a in range(1, m + 1):
            for i in (1, 2):
                _emit(Sector.GHOST, a, i, spec.constraint_parities[a - 1] + 1)
        for a in range(1, m + 1):
            _emit(Sector.LAGRANGE, a, None, spec.constraint_parities[a - 1])
        for a in range(1, m + 1):
            _emit(Sector.LAGRANGE_MOM, a, None, spec.constraint_parities[a - 1])

        self.vars = tuple(vars_)
        self.var_parity = tuple(v.parity for v in vars_)
        self.var_ngh = tuple(v.ngh for v in vars_)
        self.var_sector = tuple(v.sector for v in vars_)
        self.var_nwt = tuple(1 if v.sector in _N_SECTORS else 0 for v in vars_)
        self.var_cpwt = tuple(1 if v.sector in _CP_SECTORS else 0 for v in vars_)
        self.by_name = {v.name: v.vid for v in vars_}
        self._index = {(v.sector, v.alpha, v.sp2): v.vid for v in vars_}
        self._one = GradedPoly(self, {(): _ONE})

        # sparse pairing table: list of (vid_a, vid_b, scalar, mid_terms|None)
        self._omega: list = []
        self._build_ghost_omega()
        self._build_matter_omega()

    def compatible(self, other):
        """Two algebras over equal theory specs have identical variable
        tables and pairing structure, so their elements may be mixed."""
        return self is other or self.spec == other.spec

    # -- variable lookup ----------------------------------------------------

    @property
    def m(self):
        return self.spec.m

    @property
    def n_physical(self):
        return self.spec.n_physical

    def vid(self, sector, alpha, sp2=None):
        try:
            return self._index[(sector, alpha, sp2)]
        except KeyError:
            raise KeyError(f"no variable {sector.name}[{alpha},{sp2}]") from None

    def xi(self, a):
        return self.gen(self.vid(Sector.XI, a))

    def xip(self, a):
        return self.gen(self.vid(Sector.XI_PHYS, a))

    def ghost_mom(self, a, i):
        return self.gen(self.vid(Sector.GHOST_MOM, a, i))

    def ghost(self, a, i):
        return self.gen(self.vid(Sector.GHOST, a, i))

    def lagrange(self, a):
        return self.gen(self.vid(Sector.LAGRANGE, a))

    def lagrange_mom(self, a):
        return self.gen(self.vid(Sector.LAGRANGE_MOM, a))

    # -- term-level grading -------------------------------------------------

    def term_parity(self, mono):
        par = self.var_parity
        s = 0
        for v, e in mono:
            s += par[v] * e
        return s & 1

    def term_ngh(self, mono):
        ngh = self.var_ngh
        return sum(ngh[v] * e for v, e in mono)

    def term_ndeg(self, mono):
        w = self.var_nwt
        return sum(w[v] * e for v, e in mono)

    def term_cpdeg(self, mono):
        w = self.var_cpwt
        return sum(w[v] * e for v, e in mono)

    # -- constructors -------------------------------------------------------

    def zero(self):
        return GradedPoly(self, {})

    def one(self):
        return self._one

    def scalar(self, c):
        c = Fraction(c)
        return GradedPoly(self, {(): c} if c else {})

    def gen(self, vid):
        return GradedPoly(self, {((vid, 1),): _ONE})

    def poly(self, terms):
        """Build from {monomial: coefficient}, dropping zeros."""
        return GradedPoly(self, {m: Fraction(c) for m, c in terms.items() if c})

    # -- normal ordering ----------------------------------------------------

    def normal_form(self, factors):
        """Normal-order an unordered product of variables.

        `factors` is a sequence of Variables or ids (repetitions allowed).
        Returns (sign, monomial), or None when an odd variable repeats.
        The sign is the parity of the permutation restricted to odd factors.
        """
        vids = [f.vid if isinstance(f, Variable) else int(f) for f in factors]
        par = self.var_parity
        odd = [v for v in vids if par[v]]
        if len(odd) != len(set(odd)):
            return None
        inv = 0
        for i in range(len(odd)):
            for j in range(i + 1, len(odd)):
                if odd[i] > odd[j]:
                    inv += 1
        counts: dict = {}
        for v in vids:
            counts[v] = counts.get(v, 0) + 1
        mono = tuple(sorted(counts.items()))
        return (-1 if inv & 1 else 1), mono

    def monomial(self, factors):
        """normal_form wrapped into a polynomial (zero when an odd repeats)."""
        nf = self.normal_form(factors)
        if nf is None:
            return self.zero()
        sign, mono = nf
        return GradedPoly(self, {mono: Fraction(sign)})

    # -- products -----------------------------------------------------------

    def _mul_terms(self, m1, m2):
        """Merge two normal-ordered monomials.

        Returns (sign, monomial) or None when an odd variable collides.
        Sign counts inversions between odd factors of m1 and of m2 (merging
        two sorted sequences, only cross pairs can be out of order).
        """
        if not m1:
            return 1, m2
        if not m2:
            return 1, m1
        par = self.var_parity
        odd1 = [v for v, _ in m1 if par[v]]
        flips = 0
        if odd1:
            n1 = len(odd1)
            for v, _ in m2:
                if par[v]:
                    flips += n1 - bisect_right(odd1, v)
        out = []
        i = j = 0
        l1, l2 = len(m1), len(m2)
        while i < l1 and j < l2:
            v1, e1 = m1[i]
            v2, e2 = m2[j]
            if v1 < v2:
                out.append((v1, e1))
                i += 1
            elif v1 > v2:
                out.append((v2, e2))
                j += 1
            else:
                if par[v1]:
                    return None
                out.append((v1, e1 + e2))
                i += 1
                j += 1
        out.extend(m1[i:])
        out.extend(m2[j:])
        return (-1 if flips & 1 else 1), tuple(out)

    def mul(self, p, q):
        if (p.alg is not self or q.alg is not self) and not (
                self.compatible(p.alg) and self.compatible(q.alg)):
            raise TheoryError(
                "cannot multiply elements of algebras over different theories")
        out: dict = {}
        mul_terms = self._mul_terms
        for m1, c1 in p.terms.items():
            for m2, c2 in q.terms.items():
                r = mul_terms(m1, m2)
                if r is None:
                    continue
                s, m = r
                c = c1 * c2
                if s < 0:
                    c = -c
                acc = out.get(m)
                if acc is None:
                    out[m] = c
                else:
                    acc += c
                    if acc:
                        out[m] = acc
                    else:
                        del out[m]
        return GradedPoly(self, out)

    # -- derivatives ---------------------------------------------------------

    def _derive_terms(self, terms, vid, left):
        """Left or right derivative of a raw term dict with respect to vid."""
        par = self.var_parity
        pv = par[vid]
        out: dict = {}
        for mono, coeff in terms.items():
            seq = mono if left else tuple(reversed(mono))
            side = 0
            for pos, (v, e) in enumerate(seq):
                if v == vid:
                    c = coeff * e
                    if pv and (side & 1):
                        c = -c
                    if e == 1:
                        new = mono[:pos] + mono[pos + 1:] if left else \
                            mono[:len(mono) - 1 - pos] + mono[len(mono) - pos:]
                    else:
                        idx = pos if left else len(mono) - 1 - pos
                        new = mono[:idx] + ((v, e - 1),) + mono[idx + 1:]
                    acc = out.get(new)
                    if acc is None:
                        out[new] = c
                    else:
                        acc += c
                        if acc:
                            out[new] = acc
                        else:
                            del out[new]
                    break
                side += par[v] * e
        return out

    def derive_left(self, p, vid):
        return GradedPoly(self, self._derive_terms(p.terms, vid, True))

    def derive_right(self, p, vid):
        return GradedPoly(self, self._derive_terms(p.terms, vid, False))

    def replace_left(self, p, src_vid, dst_vid, coeff):
        """coeff * dst * (left derivative of p w.r.t. src), term by term."""
        coeff = Fraction(coeff)
        if not coeff:
            return self.zero()
        d = self._derive_terms(p.terms, src_vid, True)
        if not d:
            return self.zero()
        head = ((dst_vid, 1),)
        out: dict = {}
        mul_terms = self._mul_terms
        for mono, c in d.items():
            r = mul_terms(head, mono)
            if r is None:
                continue
            s, m = r
            cc = coeff * c
            if s < 0:
                cc = -cc
            acc = out.get(m)
            if acc is None:
                out[m] = cc
            else:
                acc += cc
                if acc:
                    out[m] = acc
                else:
                    del out[m]
        return GradedPoly(self, out)

    # -- the graded Poisson bracket ------------------------------------------

    def _build_ghost_omega(self):
        """Canonical pairings: (C,P) -> +1, (P,C) -> (-1)^eps_a,
        (pi,lam) -> +1, (lam,pi) -> -(-1)^eps_a."""
        emit = self._omega.append
        for a in range(1, self.m + 1):
            eps = self.spec.constraint_parities[a - 1] & 1
            sgn = -1 if eps else 1
            for i in (1, 2):
                c = self.vid(Sector.GHOST, a, i)
                pm = self.vid(Sector.GHOST_MOM, a, i)
                emit((c, pm, _ONE, None))
                emit((pm, c, Fraction(sgn), None))
            pi = self.vid(Sector.LAGRANGE_MOM, a)
            lam = self.vid(Sector.LAGRANGE, a)
            emit((pi, lam, _ONE, None))
            emit((lam, pi, Fraction(-sgn), None))

    def _xi_vid(self, i):
        """Global coordinate index (constraints first, then physical) -> vid."""
        m, p = self.m, self.n_physical
        if 1 <= i <= m:
            return self.vid(Sector.XI, i)
        if m < i <= m + p:
            return self.vid(Sector.XI_PHYS, i - m)
        raise TheoryError(f"coordinate index {i} out of range 1..{m + p}")

    def _xi_parity(self, i):
        return self.var_parity[self._xi_vid(i)]

    def _build_matter_omega(self):
        from . import expr

        spec = self.spec
        m, p = self.m, self.n_physical
        given: dict = {}

        def _xi_only(poly, where):
            for mono in poly.terms:
                for v, _ in mono:
                    if self.var_sector[v] not in (Sector.XI, Sector.XI_PHYS):
                        raise TheoryError(
                            f"{where}: structure entries may involve only coordinates, "
                            f"found {self.vars[v].name}")

        for (a, b, g), text in sorted(spec.u_table.items()):
            for idx, hi in ((a, m), (b, m), (g, m)):
                if not 1 <= idx <= hi:
                    raise TheoryError(f"U[{a},{b},{g}]: constraint index {idx} out of range 1..{m}")
            u = expr.parse(self, text) if isinstance(text, str) else text
            _xi_only(u, f"U[{a},{b},{g}]")
            w = self.mul(u, self.xi(g))
            key = (a, b)
            given[key] = given.get(key, self.zero()) + w

        for (i, j), text in sorted(spec.mixed_table.items()):
            if not (1 <= i <= m + p and 1 <= j <= m + p):
                raise TheoryError(f"mixed[{i},{j}]: index out of range 1..{m + p}")
            if i <= m and j <= m:
                raise TheoryError(
                    f"mixed[{i},{j}]: constraint-constraint brackets must be given through U")
            w = expr.parse(self, text) if isinstance(text, str) else text
            _xi_only(w, f"mixed[{i},{j}]")
            if (i, j) in given:
                raise TheoryError(f"mixed[{i},{j}]: duplicate entry")
            given[(i, j)] = w

        # antisymmetric completion and consistency checks
        table: dict = {}
        for (i, j), w in given.items():
            ei, ej = self._xi_parity(i), self._xi_parity(j)
            want = (ei + ej) & 1
            for mono in w.terms:
                if self.term_parity(mono) != want:
                    raise TheoryError(
                        f"bracket table entry ({i},{j}) must have parity {want}, "
                        f"found a term of parity {self.term_parity(mono)}")
            flip = -w if (ei & ej) == 0 else w  # -(-1)^(ei ej) w
            if i == j:
                if not ei:
                    if w:
                        raise TheoryError(
                            f"bracket table entry ({i},{i}) must vanish for an even coordinate")
                    continue
                table[(i, j)] = w
                continue
            if (j, i) in given:
                if given[(j, i)] != flip:
                    raise TheoryError(
                        f"bracket table entries ({i},{j}) and ({j},{i}) violate graded antisymmetry")
            table[(i, j)] = w
            table.setdefault((j, i), flip)

        emit = self._omega.append
        for (i, j), w in sorted(table.items()):
            if not w:
                continue
            vi, vj = self._xi_vid(i), self._xi_vid(j)
            if w.terms.keys() == {()}:
                emit((vi, vj, w.terms[()], None))
            else:
                emit((vi, vj, _ONE, w.terms))
        self.matter_table = table

    def matter_bracket_entry(self, i, j):
        """The pairing {xi_i, xi_j} of two coordinates (global indices)."""
        w = getattr(self, "matter_table", {}).get((i, j))
        return w if w is not None else self.zero()

    def bracket(self, x, y):
        """Graded Poisson bracket {x, y}."""
        if (x.alg is not self or y.alg is not self) and not (
                self.compatible(x.alg) and self.compatible(y.alg)):
            raise TheoryError(
                "bracket arguments belong to an algebra over a different theory")
        out: dict = {}
        dx_cache: dict = {}
        dy_cache: dict = {}
        mul_terms = self._mul_terms

        def _accumulate(m1, c1, m2, c2, c0):
            r = mul_terms(m1, m2)
            if r is None:
                return
            s, mres = r
            c = c0 * c1 * c2
            if s < 0:
                c = -c
            acc = out.get(mres)
            if acc is None:
                out[mres] = c
            else:
                acc += c
                if acc:
                    out[mres] = acc
                else:
                    del out[mres]

        for va, vb, c0, mid in self._omega:
            dx = dx_cache.get(va)
            if dx is None:
                dx = self._derive_terms(x.terms, va, False)
                dx_cache[va] = dx
            if not dx:
                continue
            dy = dy_cache.get(vb)
            if dy is None:
                dy = self._derive_terms(y.terms, vb, True)
                dy_cache[vb] = dy
            if not dy:
                continue
            if mid is None:
                for m1, c1 in dx.items():
                    for m2, c2 in dy.items():
                        _accumulate(m1, c1, m2, c2, c0)
            else:
                # dx * w first, then * dy
                tmp: dict = {}
                for m1, c1 in dx.items():
                    for mw, cw in mid.items():
                        r = mul_terms(m1, mw)
                        if r is None:
                            continue
                        s, m = r
                        c = c1 * cw
                        if s < 0:
                            c = -c
                        acc = tmp.get(m)
                        if acc is None:
                            tmp[m] = c
                        else:
                            acc += c
                            if acc:
                                tmp[m] = acc
                            else:
                                del tmp[m]
                for m1, c1 in tmp.items():
                    for m2, c2 in dy.items():
                        _accumulate(m1, c1, m2, c2, c0)
        return GradedPoly(self, out)


def poisson_bracket(x: GradedPoly, y: GradedPoly) -> GradedPoly:
    """Module-level convenience wrapper around Algebra.bracket."""
    return x.alg.bracket(x, y)

"""JSON theory documents and result files.

A theory document carries the data of a constraint system:

    {
      "format": 1,
      "label": "so3",
      "constraints": [{"name": "J1", "parity": 0}, ...],
      "physical":    [{"name": "q",  "parity": 0}, ...],
      "U":     {"1,2,3": "1", ...},
      "mixed": {"1,4": "xi[1]", ...},
      "observables": ["xi[1]^2", {"name": "casimir", "expr": "..."}],
      "order": 6
    }

Expression strings use the canonical variable names (xi[1], xip[1],
P[1,1], C[1,2], lam[1], pi[1]); declared constraint/physical names may
be used as aliases and are rewritten to the canonical names before
parsing.  U keys are "alpha,beta,gamma" constraint triples; mixed keys
are "i,j" global coordinate pairs (constraints first, then physical).
Structure validation (index ranges, parity consistency, graded
antisymmetry, first-class form) happens when the algebra is built.

Solved charges and lifted observables round-trip through companion JSON
documents ("kind": "omega" / "observable") holding serialized
components, so a verification run can re-check a previously emitted
result from the files alone.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from . import expr
from .algebra import Algebra, TheoryError
from .tensors import SymTensor
from .theory import TheorySpec, jacobi_violations

FORMAT = 1
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")
_RESERVED = {"xi", "xip", "P", "C", "lam", "pi"}


class TheoryFileError(ValueError):
    """Malformed document: bad JSON, bad shape, bad expression, or a
    structure table the algebra rejects."""


@dataclass(frozen=True)
class TheoryDocument:
    spec: TheorySpec
    constraint_names: tuple
    physical_names: tuple
    observables: tuple  # of (name, expression-string)
    order: int | None

    def observable(self, name: str) -> str:
        for n, text in self.observables:
            if n == name:
                return text
        known = ", ".join(n for n, _ in self.observables) or "none defined"
        raise TheoryFileError(f"no observable named {name!r} (known: {known})")


def _fail(msg: str) -> None:
    raise TheoryFileError(msg)


def _named_list(raw, what):
    if not isinstance(raw, list):
        _fail(f"{what} must be a list")
    names, parities = [], []
    for i, entry in enumerate(raw, 1):
        if not isinstance(entry, dict):
            _fail(f"{what}[{i}] must be an object with name and parity")
        name, parity = entry.get("name"), entry.get("parity")
        if not isinstance(name, str) or not _NAME_RE.match(name):
            _fail(f"{what}[{i}]: name must be an identifier")
        if name in _RESERVED:
            _fail(f"{what}[{i}]: name {name!r} collides with a canonical variable family")
        if parity not in (0, 1):
            _fail(f"{what}[{i}]: parity must be 0 or 1")
        names.append(name)
        parities.append(parity)
    if len(set(names)) != len(names):
        _fail(f"{what}: duplicate names")
    return tuple(names), tuple(parities)


def _index_key(key, arity, what):
    parts = key.split(",")
    if len(parts) != arity:
        _fail(f"{what} key {key!r} must be {arity} comma-separated indices")
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        _fail(f"{what} key {key!r} must be {arity} comma-separated indices")


def _alias_rewriter(names):
    if not names:
        return lambda text: text
    pattern = re.compile(
        r"\b(" + "|".join(re.escape(n) for n in sorted(names, key=len, reverse=True))
        + r")\b")
    return lambda text: pattern.sub(lambda m: names[m.group(1)], text)


def parse_theory(data) -> TheoryDocument:
    """Parse and validate a theory document (bytes, text, or dict)."""
    if isinstance(data, (bytes, str)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise TheoryFileError(
                f"line {e.lineno}, col {e.colno}: {e.msg}") from None
    if not isinstance(data, dict):
        _fail("document must be a JSON object")
    if data.get("format") != FORMAT:
        _fail(f"unsupported format {data.get('format')!r} (expected {FORMAT})")
    unknown = set(data) - {"format", "label", "constraints", "physical",
                           "U", "mixed", "observables", "order"}
    if unknown:
        _fail(f"unknown fields: {', '.join(sorted(unknown))}")

    c_names, c_par = _named_list(data.get("constraints", []), "constraints")
    p_names, p_par = _named_list(data.get("physical", []), "physical")
    if set(c_names) & set(p_names):
        _fail("constraint and physical names overlap")

    alias = {}
    for i, n in enumerate(c_names, 1):
        alias[n] = f"xi[{i}]"
    for i, n in enumerate(p_names, 1):
        alias[n] = f"xip[{i}]"
    rewrite = _alias_rewriter(alias)

    u_raw = data.get("U", {})
    if not isinstance(u_raw, dict):
        _fail("U must be an object")
    u_table = {}
    for key, text in u_raw.items():
        if not isinstance(text, str):
            _fail(f"U[{key}] must be an expression string")
        u_table[_index_key(key, 3, "U")] = rewrite(text)

    mixed_raw = data.get("mixed", {})
    if not isinstance(mixed_raw, dict):
        _fail("mixed must be an object")
    mixed_table = {}
    for key, text in mixed_raw.items():
        if not isinstance(text, str):
            _fail(f"mixed[{key}] must be an expression string")
        mixed_table[_index_key(key, 2, "mixed")] = rewrite(text)

    obs_raw = data.get("observables", [])
    if not isinstance(obs_raw, list):
        _fail("observables must be a list")
    observables = []
    for i, entry in enumerate(obs_raw, 1):
        if isinstance(entry, str):
            observables.append((str(i), rewrite(entry)))
        elif isinstance(entry, dict) and isinstance(entry.get("expr"), str):
            name = entry.get("name", str(i))
            if not isinstance(name, str):
                _fail(f"observables[{i}]: name must be a string")
            observables.append((name, rewrite(entry["expr"])))
        else:
            _fail(f"observables[{i}] must be an expression string or "
                  "an object with an 'expr' field")
    if len({n for n, _ in observables}) != len(observables):
        _fail("observables: duplicate names")

    order = data.get("order")
    if order is not None and (not isinstance(order, int) or order < 2):
        _fail("order must be an integer >= 2")

    label = data.get("label", "")
    if not isinstance(label, str):
        _fail("label must be a string")

    spec = TheorySpec(c_par, p_par, u_table, mixed_table,
                      label=label or "theory")
    return TheoryDocument(spec, c_names, p_names, tuple(observables), order)


def build_algebra(doc: TheoryDocument) -> Algebra:
    """Realize the document's bracket structure, surfacing table and
    expression problems as document errors."""
    try:
        return Algebra(doc.spec)
    except (TheoryError, expr.ExprError) as e:
        raise TheoryFileError(f"invalid structure table: {e}") from None


@dataclass(frozen=True)
class JacobiReport:
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations

    def render(self) -> str:
        if self.ok:
            return "Jacobi identity: holds on all coordinate triples"
        rows = ["Jacobi identity: VIOLATED"]
        for (i, j, k, defect) in self.violations:
            rows.append(f"  triple ({i},{j},{k}): defect {defect!r}")
        return "\n".join(rows)


def validate_jacobi(alg: Algebra, max_report: int = 10) -> JacobiReport:
    return JacobiReport(tuple(jacobi_violations(alg, max_report)))


# -- result documents --------------------------------------------------------

def omega_document(label: str, order: int, omega: SymTensor) -> dict:
    return {
        "format": FORMAT,
        "kind": "omega",
        "label": label,
        "order": order,
        "components": {str(a): expr.serialize(omega.get((a,))) for a in (1, 2)},
    }


def observable_document(label: str, name: str, order: int,
                        phi0, phi_prime) -> dict:
    return {
        "format": FORMAT,
        "kind": "observable",
        "label": label,
        "name": name,
        "order": order,
        "phi0": expr.serialize(phi0),
        "phi_prime": expr.serialize(phi_prime),
    }


def dump_document(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_omega(data, alg: Algebra):
    """Read back an omega document; returns (omega tensor, order)."""
    if isinstance(data, (bytes, str)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise TheoryFileError(
                f"line {e.lineno}, col {e.colno}: {e.msg}") from None
    if not isinstance(data, dict):
        _fail("omega document must be a JSON object")
    if data.get("format") != FORMAT:
        _fail(f"unsupported format {data.get('format')!r}")
    if data.get("kind") != "omega":
        _fail(f"expected an omega document, found kind {data.get('kind')!r}")
    order = data.get("order")
    if not isinstance(order, int) or order < 2:
        _fail("omega document: order must be an integer >= 2")
    comps = data.get("components")
    if not isinstance(comps, dict) or set(comps) != {"1", "2"}:
        _fail("omega document: components must map '1' and '2' to expressions")
    parsed = {}
    for a in (1, 2):
        text = comps[str(a)]
        if not isinstance(text, str):
            _fail(f"omega component {a} must be an expression string")
        try:
            parsed[a] = expr.parse(alg, text)
        except expr.ExprError as e:
            raise TheoryFileError(f"omega component {a}: {e}") from None
    omega = SymTensor.from_full(alg, 1, lambda idx: parsed[idx[0]])
    return omega, order

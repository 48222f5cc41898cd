"""Verification of pseudocharacter axioms on finite groups.

Every verifier returns a :class:`VerificationReport`.  No check short-circuits:
all axiom families run and every violation found is recorded.  Relation
families are evaluated on every tuple when ``|G|^arity`` fits the budget and
on a seeded uniform sample otherwise; the report records which.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product
from typing import Callable, Mapping, Sequence

import numpy as np

from .groups import FiniteGroup
from .linalg import format_rational
from .relations import compiled_g, compiled_gl, det_from_traces_relation

DEFAULT_BUDGET = 2_000_000
# total term evaluations allowed for one sampled relation family
SAMPLE_TERM_BUDGET = 20_000_000
MIN_SAMPLE = 32
MAX_SAMPLE = 512
DEFAULT_MAX_VIOLATIONS = 10

SYMPLECTIC_BANNER = "symplectic relation family not checked"


class InvalidSimilitudeError(ValueError):
    """``l`` is not a homomorphism to the nonzero rationals."""


@dataclass(frozen=True, eq=False)
class PseudocharData:
    group: FiniteGroup
    dim: int
    T: tuple
    l: tuple | None = None
    P: Mapping | Callable | None = None
    model: object = None  # optional Representation the data came from

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        if len(self.T) != self.group.order:
            raise ValueError(f"T has {len(self.T)} values for a group of order {self.group.order}")
        object.__setattr__(self, "T", tuple(Fraction(x) for x in self.T))
        if self.l is not None:
            lam = tuple(Fraction(x) for x in self.l)
            if len(lam) != self.group.order:
                raise InvalidSimilitudeError("l needs one value per element")
            _check_character(lam, self.group)
            object.__setattr__(self, "l", lam)
        if isinstance(self.P, Mapping):
            object.__setattr__(self, "P", {tuple(int(g) for g in k): Fraction(v) for k, v in self.P.items()})

    def with_T(self, T) -> "PseudocharData":
        return PseudocharData(self.group, self.dim, tuple(T), self.l, self.P, self.model)

    def P_value(self, tup: tuple) -> Fraction | None:
        if self.P is None:
            return None
        if callable(self.P):
            return Fraction(self.P(tup))
        return self.P.get(tup)


def _check_character(lam: tuple, grp: FiniteGroup):
    if lam[grp.identity] != 1:
        raise InvalidSimilitudeError(f"l(identity) = {format_rational(lam[grp.identity])}, expected 1")
    for a in range(grp.order):
        if lam[a] == 0:
            raise InvalidSimilitudeError(f"l({a}) = 0")
        for b in range(grp.order):
            if lam[grp.mult[a][b]] != lam[a] * lam[b]:
                raise InvalidSimilitudeError(f"l is not multiplicative at ({a}, {b})")


@dataclass(frozen=True, order=True)
class Violation:
    axiom: str
    where: tuple
    value: Fraction

    def to_dict(self, grp: FiniteGroup | None = None) -> dict:
        tup = [grp.label(g) for g in self.where] if grp is not None else [str(g) for g in self.where]
        return {"axiom": self.axiom, "tuple": tup, "value": format_rational(self.value)}


@dataclass
class VerificationReport:
    family: str
    dim: int
    group: FiniteGroup | None = None
    checked: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    coverage: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "fail" if self.violations else "pass"

    @property
    def passed(self) -> bool:
        return not self.violations

    def failed_axioms(self) -> list[str]:
        return sorted({v.axiom for v in self.violations})

    def record(self, axiom: str, tup: tuple, value, ok: bool):
        self.checked[axiom] = self.checked.get(axiom, 0) + 1
        if not ok:
            self.violations.append(Violation(axiom, tuple(int(g) for g in tup), Fraction(value)))

    def finish(self) -> "VerificationReport":
        self.violations.sort()
        return self

    def to_dict(self, max_violations: int = DEFAULT_MAX_VIOLATIONS) -> dict:
        failed: dict[str, int] = {}
        for v in self.violations:
            failed[v.axiom] = failed.get(v.axiom, 0) + 1
        return {
            "family": self.family,
            "dim": self.dim,
            "verdict": self.verdict,
            "counts": {a: {"checked": c, "failed": failed.get(a, 0)} for a, c in self.checked.items()},
            "coverage": self.coverage,
            "violation_count": len(self.violations),
            "violations": [v.to_dict(self.group) for v in self.violations[:max_violations]],
            "notes": list(self.notes),
        }

    def to_json(self, max_violations: int = DEFAULT_MAX_VIOLATIONS) -> str:
        return json.dumps(self.to_dict(max_violations), indent=2, sort_keys=True)

    def to_text(self, max_violations: int = DEFAULT_MAX_VIOLATIONS) -> str:
        d = self.to_dict(max_violations)
        lines = [f"family: {self.family}", f"dim: {self.dim}", f"verdict: {self.verdict}"]
        for axiom, c in d["counts"].items():
            cov = self.coverage.get(axiom)
            extra = ""
            if cov and cov["mode"] == "sampled":
                extra = f" (sampled {cov['size']} of {cov['total']} tuples, seed {cov['seed']})"
            lines.append(f"  {axiom}: checked {c['checked']}, failed {c['failed']}{extra}")
        if self.violations:
            lines.append(f"violations ({len(self.violations)} total, showing {len(d['violations'])}):")
            for v in d["violations"]:
                lines.append(f"  {v['axiom']} at ({', '.join(v['tuple'])}) = {v['value']}")
        for note in self.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines)


# -- tuple selection ---------------------------------------------------------

def _tuples(order: int, arity: int, budget: int, seed: int, terms: int = 1):
    """All tuples in lexicographic order, or a seeded sample with its coverage record."""
    total = order**arity
    if total <= budget:
        arr = np.array(list(product(range(order), repeat=arity)), dtype=np.intp).reshape(-1, arity)
        return arr, {"mode": "exhaustive", "size": total, "total": total}
    size = max(MIN_SAMPLE, min(MAX_SAMPLE, budget, SAMPLE_TERM_BUDGET // max(terms, 1)))
    rng = np.random.default_rng(seed)
    arr = rng.integers(0, order, size=(size, arity), dtype=np.intp)
    return arr, {"mode": "sampled", "size": size, "total": total, "seed": seed}


# -- axiom families ------------------------------------------------------------

def _check_identity(d: PseudocharData, rep: VerificationReport):
    e = d.group.identity
    rep.record("T(1)=n", (e,), d.T[e], d.T[e] == d.dim)


def _check_centrality(d: PseudocharData, rep: VerificationReport, budget: int, seed: int):
    grp = d.group
    pairs, cov = _tuples(grp.order, 2, budget, seed)
    rep.coverage["centrality"] = cov
    for a, b in pairs:
        ab, ba = grp.mult[a][b], grp.mult[b][a]
        diff = d.T[ab] - d.T[ba]
        rep.record("centrality", (a, b), diff, diff == 0)


def _check_inversion(d: PseudocharData, lam: tuple, rep: VerificationReport):
    grp = d.group
    for g in range(grp.order):
        diff = d.T[g] - lam[g] * d.T[grp.inv[g]]
        rep.record("inversion", (g,), diff, diff == 0)


def _check_relation(name: str, compiled, d: PseudocharData, lam, rep: VerificationReport, budget: int, seed: int):
    tuples, cov = _tuples(d.group.order, compiled.arity, budget, seed, terms=len(compiled.base_coeffs))
    rep.coverage[name] = cov
    values = compiled.evaluate(d.T, lam, d.group, tuples)
    for tup, v in zip(tuples, values):
        rep.record(name, tuple(tup), v, v == 0)


def _check_trivial_l(d: PseudocharData, rep: VerificationReport):
    if d.l is None:
        return
    for g, x in enumerate(d.l):
        rep.record("l=1", (g,), x, x == 1)


def _check_det(d: PseudocharData, rep: VerificationReport):
    grp = d.group
    det_of = det_from_traces_relation(d.dim)
    for g in range(grp.order):
        powers, x = [], g
        for _ in range(d.dim):
            powers.append(d.T[x])
            x = grp.mult[x][g]
        value = det_of(powers)
        rep.record("det=1", (g,), value, value == 1)


# -- verifiers -----------------------------------------------------------------

def verify_gl(d: PseudocharData, budget: int = DEFAULT_BUDGET, seed: int = 0) -> VerificationReport:
    rep = VerificationReport("GL", d.dim, d.group)
    _gl_checks(d, rep, budget, seed)
    return rep.finish()


def _gl_checks(d, rep, budget, seed):
    _check_identity(d, rep)
    _check_centrality(d, rep, budget, seed)
    _check_relation("gl_relation", compiled_gl(d.dim), d, None, rep, budget, seed)


def _go_checks(d: PseudocharData, lam: tuple, rep: VerificationReport, budget: int, seed: int):
    n = d.dim
    _check_identity(d, rep)
    _check_centrality(d, rep, budget, seed)
    _check_inversion(d, lam, rep)
    for j in range((n + 1) // 2 + 1):
        _check_relation(f"go_relation[j={j}]", compiled_g(n, j), d, lam, rep, budget, seed)


def verify_go(d: PseudocharData, budget: int = DEFAULT_BUDGET, seed: int = 0) -> VerificationReport:
    from .relations import MissingSimilitudeError

    if d.l is None:
        raise MissingSimilitudeError("GO verification needs the similitude character l")
    rep = VerificationReport("GO", d.dim, d.group)
    _go_checks(d, d.l, rep, budget, seed)
    return rep.finish()


def _ones(d: PseudocharData) -> tuple:
    return (Fraction(1),) * d.group.order


def verify_o(d: PseudocharData, budget: int = DEFAULT_BUDGET, seed: int = 0) -> VerificationReport:
    """GO verification with ``l = 1``; a supplied nontrivial ``l`` is itself a violation."""
    rep = VerificationReport("O", d.dim, d.group)
    _check_trivial_l(d, rep)
    _go_checks(d, _ones(d), rep, budget, seed)
    return rep.finish()


def verify_gsp(d: PseudocharData, budget: int = DEFAULT_BUDGET, seed: int = 0, family: str = "GSp") -> VerificationReport:
    """The printed symplectic axioms plus the GL relation at the same dimension.

    The symplectic relation family itself is not checked; the report says so.
    """
    from .relations import MissingSimilitudeError

    if d.dim % 2:
        raise ValueError("symplectic verification needs an even dimension")
    if d.l is None and family == "GSp":
        raise MissingSimilitudeError("GSp verification needs the similitude character l")
    rep = VerificationReport(family, d.dim, d.group)
    lam = d.l if family == "GSp" else _ones(d)
    if family == "Sp":
        _check_trivial_l(d, rep)
    _gl_checks(d, rep, budget, seed)
    _check_inversion(d, lam, rep)
    rep.notes.append(SYMPLECTIC_BANNER)
    return rep.finish()


def verify_sp(d: PseudocharData, budget: int = DEFAULT_BUDGET, seed: int = 0) -> VerificationReport:
    return verify_gsp(d, budget, seed, family="Sp")


def verify_so_odd(d: PseudocharData, budget: int = DEFAULT_BUDGET, seed: int = 0) -> VerificationReport:
    if d.dim % 2 == 0:
        raise ValueError("odd special orthogonal verification needs an odd dimension")
    rep = VerificationReport("SO", d.dim, d.group)
    _check_trivial_l(d, rep)
    _go_checks(d, _ones(d), rep, budget, seed)
    _check_det(d, rep)
    return rep.finish()


def _check_P(d: PseudocharData, rep: VerificationReport, budget: int, seed: int):
    half = d.dim // 2
    grp = d.group
    if isinstance(d.P, Mapping):
        bad = [k for k in d.P if len(k) != half]
        if bad:
            raise ValueError(f"P entries must have arity {half}, got a key of length {len(bad[0])}")
        keys = sorted(d.P)
        for k in keys:
            if any(not 0 <= g < grp.order for g in k):
                raise ValueError(f"P entry {k} names an element outside the group")
        # symmetry: permuted keys that are also present must agree
        for k in keys:
            for perm in set(permutations(k)):
                other = d.P.get(perm)
                if other is not None and perm > k:
                    diff = d.P[k] - other
                    rep.record("P_symmetry", k, diff, diff == 0)
        rep.coverage["P_symmetry"] = {"mode": "supplied entries", "size": len(keys), "total": grp.order**half}
        tuples = np.array(keys, dtype=np.intp).reshape(-1, half)
        cov = {"mode": "supplied entries", "size": len(keys), "total": grp.order**half}
    else:
        tuples, cov = _tuples(grp.order, half, budget, seed)
        for k in tuples:
            k = tuple(int(g) for g in k)
            v = d.P_value(k)
            for perm in sorted(set(permutations(k))):
                if perm > k:
                    diff = v - d.P_value(perm)
                    rep.record("P_symmetry", k, diff, diff == 0)
        rep.coverage["P_symmetry"] = cov
    if d.model is None:
        rep.notes.append("P supplied without a matrix model: only symmetry is checked")
        return
    rep.coverage["P_model"] = cov
    model_values = d.model.pl_values(tuples)
    for k, mv in zip(tuples, model_values):
        k = tuple(int(g) for g in k)
        diff = d.P_value(k) - mv
        rep.record("P_model", k, diff, diff == 0)


def verify_so_even(d: PseudocharData, budget: int = DEFAULT_BUDGET, seed: int = 0) -> VerificationReport:
    """O axioms, the determinant axiom and, when ``P`` is supplied, its consistency checks.

    The pairing relation between values of ``P`` is not checked; a supplied
    ``P`` is compared against ``pl`` of the attached matrix model instead.
    """
    if d.dim % 2:
        raise ValueError("even special orthogonal verification needs an even dimension")
    rep = VerificationReport("SO", d.dim, d.group)
    _check_trivial_l(d, rep)
    _go_checks(d, _ones(d), rep, budget, seed)
    _check_det(d, rep)
    if d.P is None:
        rep.notes.append("P not supplied")
    else:
        _check_P(d, rep, budget, seed)
    rep.notes.append("P pairing relation not checked")
    return rep.finish()


def verify_so(d: PseudocharData, budget: int = DEFAULT_BUDGET, seed: int = 0) -> VerificationReport:
    return (verify_so_odd if d.dim % 2 else verify_so_even)(d, budget, seed)


VERIFIERS = {
    "GL": verify_gl,
    "O": verify_o,
    "GO": verify_go,
    "SO": verify_so,
    "Sp": verify_sp,
    "GSp": verify_gsp,
}


def verify(d: PseudocharData, family: str, budget: int = DEFAULT_BUDGET, seed: int = 0) -> VerificationReport:
    try:
        fn = VERIFIERS[family]
    except KeyError:
        raise ValueError(f"unknown family {family!r}; expected one of {sorted(VERIFIERS)}") from None
    return fn(d, budget, seed)


def kernel_of_T(d: PseudocharData) -> frozenset[int]:
    """``{eta : T(g eta) = T(g) for all g}``."""
    grp = d.group
    return frozenset(
        eta for eta in range(grp.order) if all(d.T[grp.mult[g][eta]] == d.T[g] for g in range(grp.order))
    )

"""Element conjugacy, global conjugacy and the special orthogonal counterexample."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Sequence

from .groups import build_cyclic, direct_product, generator_words
from .linalg import Matrix, direct_sum, format_rational
from .representations import (
    Representation,
    classify,
    conjugate_rep,
    from_generator_assignment,
    similitude_lambda,
)

DEFAULT_TUPLE_BUDGET = 2_000_000
FAMILIES = ("GL", "O", "GO", "SO", "Sp", "GSp")

ROTATION = Matrix([[0, 1], [-1, 0]])
IDENTITY_2 = Matrix.identity(2)


def non_increasing_tuples(order: int, size: int):
    """Non-increasing ``size``-tuples over ``range(order)`` in lexicographic order."""

    def rec(prefix, top, left):
        if not left:
            yield tuple(prefix)
            return
        for x in range(top + 1):
            prefix.append(x)
            yield from rec(prefix, x, left - 1)
            prefix.pop()

    if size == 0:
        yield ()
        return
    for first in range(order):
        yield from rec([first], first, size - 1)


def _count_multisets(order: int, size: int) -> int:
    from math import comb

    return comb(order + size - 1, size)


def _check_pair(r1: Representation, r2: Representation):
    if r1.group != r2.group:
        raise ValueError("representations are over different groups")
    if r1.dim != r2.dim:
        raise ValueError(f"dimensions differ: {r1.dim} vs {r2.dim}")


def _family_lambda(rep: Representation, family: str):
    if family in ("GO", "GSp"):
        lam = similitude_lambda(rep, family)
        if lam is None:
            raise ValueError(f"representation does not land in {family}")
        return lam
    return None


def _label_tuple(grp, tup) -> str:
    return "(" + ", ".join(grp.label(g) for g in tup) + ")"


@dataclass
class ConjugacyVerdict:
    family: str
    element_conjugate: bool
    globally_conjugate: bool
    element_witness: dict | None = None
    global_witness: dict | None = None
    sampled: bool = False
    notes: list = field(default_factory=list)

    @property
    def outcome(self) -> str:
        if self.globally_conjugate:
            return "globally-conjugate"
        if self.element_conjugate:
            return "element-conjugate-only"
        return "not-conjugate"

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "outcome": self.outcome,
            "element_conjugate": self.element_conjugate,
            "globally_conjugate": self.globally_conjugate,
            "element_witness": self.element_witness,
            "global_witness": self.global_witness,
            "sampled": self.sampled,
            "notes": list(self.notes),
        }

    def to_text(self) -> str:
        lines = [f"family: {self.family}", f"outcome: {self.outcome}"]
        if self.element_witness:
            w = self.element_witness
            lines.append(f"not element-conjugate at {w['element']}: {w['invariant']} {w['values'][0]} vs {w['values'][1]}")
        if self.global_witness:
            w = self.global_witness
            lines.append(f"distinguished by {w['invariant']} at {w['tuple']}: {w['values'][0]} vs {w['values'][1]}")
        for note in self.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines)


def _witness(grp, invariant, where, a, b, key="tuple"):
    return {
        key: _label_tuple(grp, where) if key == "tuple" else grp.label(where),
        "invariant": invariant,
        "values": [format_rational(Fraction(a)), format_rational(Fraction(b))],
    }


def _powers(grp, g) -> list[int]:
    out, x = [], grp.identity
    for _ in range(grp.elem_orders[g]):
        out.append(x)
        x = grp.mult[x][g]
    return out


def _so_even(family: str, dim: int) -> bool:
    return family == "SO" and dim % 2 == 0


def element_conjugate(r1: Representation, r2: Representation, family: str) -> tuple[bool, dict | None]:
    """Compare the restrictions to every cyclic subgroup ``<g>``.

    Power traces (and ``lambda(g)`` for similitude families) decide conjugacy
    of semisimple cyclic restrictions; in even special orthogonal mode the
    ``pl`` values on tuples of powers of ``g`` are compared as well.
    """
    _check_pair(r1, r2)
    grp = r1.group
    lam1, lam2 = _family_lambda(r1, family), _family_lambda(r2, family)
    t1, t2 = r1.traces, r2.traces
    half = r1.dim // 2
    for g in range(grp.order):
        powers = _powers(grp, g)
        for x in powers:
            if t1[x] != t2[x]:
                return False, _witness(grp, f"tr at power {grp.label(x)}", g, t1[x], t2[x], key="element")
        if lam1 is not None and lam1[g] != lam2[g]:
            return False, _witness(grp, "lambda", g, lam1[g], lam2[g], key="element")
        if _so_even(family, r1.dim):
            tuples = [tuple(reversed(c)) for c in combinations_with_replacement(sorted(powers), half)]
            for tup, a, b in zip(tuples, r1.pl_values(tuples), r2.pl_values(tuples)):
                if a != b:
                    return False, _witness(grp, f"pl on powers {_label_tuple(grp, tup)}", g, a, b, key="element")
    return True, None


def globally_conjugate(
    r1: Representation,
    r2: Representation,
    family: str,
    budget: int = DEFAULT_TUPLE_BUDGET,
) -> tuple[bool, dict | None, bool]:
    """Pseudocharacter equality; returns ``(equal, first distinguishing invariant, sampled)``.

    ``pl`` is symmetric, so only non-increasing tuples are compared, in
    lexicographic order; the first difference found is the lexicographically
    least one.  Above the budget the comparison stops after ``budget`` tuples
    and the result is marked sampled.
    """
    _check_pair(r1, r2)
    grp = r1.group
    t1, t2 = r1.traces, r2.traces
    for g in range(grp.order):
        if t1[g] != t2[g]:
            return False, _witness(grp, "tr", (g,), t1[g], t2[g]), False
    lam1, lam2 = _family_lambda(r1, family), _family_lambda(r2, family)
    if lam1 is not None:
        for g in range(grp.order):
            if lam1[g] != lam2[g]:
                return False, _witness(grp, "lambda", (g,), lam1[g], lam2[g]), False
    if not _so_even(family, r1.dim):
        return True, None, False
    half = r1.dim // 2
    sampled = _count_multisets(grp.order, half) > budget
    chunk: list[tuple] = []

    def flush():
        for tup, a, b in zip(chunk, r1.pl_values(chunk), r2.pl_values(chunk)):
            if a != b:
                return _witness(grp, "pl", tup, a, b)
        return None

    for k, tup in enumerate(non_increasing_tuples(grp.order, half)):
        if k >= budget:
            break
        chunk.append(tup)
        if len(chunk) == 4096:
            found = flush()
            if found:
                return False, found, sampled
            chunk = []
    if chunk:
        found = flush()
        if found:
            return False, found, sampled
    return True, None, sampled


def compare(r1: Representation, r2: Representation, family: str, budget: int = DEFAULT_TUPLE_BUDGET) -> ConjugacyVerdict:
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")
    elem, ew = element_conjugate(r1, r2, family)
    glob, gw, sampled = globally_conjugate(r1, r2, family, budget)
    verdict = ConjugacyVerdict(family, elem, glob and elem, ew, gw, sampled)
    if glob and not elem:
        verdict.notes.append("pseudocharacter data agree but an element restriction differs")
    if sampled and glob:
        verdict.notes.append("no distinction found (sampled)")
    return verdict


@dataclass
class CriterionResult:
    holds: bool
    witness: tuple | None = None
    value: Fraction | None = None
    blocking: int | None = None
    checked: int = 0
    sampled: bool = False

    def to_dict(self, grp=None) -> dict:
        lab = (lambda g: grp.label(g)) if grp is not None else str
        return {
            "holds": self.holds,
            "witness": [lab(g) for g in self.witness] if self.witness else None,
            "value": format_rational(self.value) if self.value is not None else None,
            "blocking": lab(self.blocking) if self.blocking is not None else None,
            "tuples_checked": self.checked,
            "sampled": self.sampled,
        }


def so_counterexample_criterion(rep: Representation, budget: int = DEFAULT_TUPLE_BUDGET) -> CriterionResult:
    """``det(rho(g) - rho(g)^t) = 0`` for all ``g`` and some tuple with ``pl != 0``."""
    if rep.dim % 2:
        raise ValueError("the criterion needs an even dimension")
    if classify(rep).family != "SO":
        raise ValueError("the criterion needs a special orthogonal representation")
    for g, m in enumerate(rep.images):
        if (m - m.T).det() != 0:
            return CriterionResult(False, blocking=g)
    grp = rep.group
    half = rep.dim // 2
    sampled = _count_multisets(grp.order, half) > budget
    checked = 0
    chunk: list[tuple] = []
    for tup in non_increasing_tuples(grp.order, half):
        if checked + len(chunk) >= budget:
            break
        chunk.append(tup)
        if len(chunk) == 512:
            for t, v in zip(chunk, rep.pl_values(chunk)):
                checked += 1
                if v:
                    return CriterionResult(True, t, v, checked=checked, sampled=sampled)
            chunk = []
    for t, v in zip(chunk, rep.pl_values(chunk) if chunk else []):
        checked += 1
        if v:
            return CriterionResult(True, t, v, checked=checked, sampled=sampled)
    return CriterionResult(False, checked=checked, sampled=sampled)


def _rho_images(n: int) -> tuple[Matrix, Matrix]:
    tail = [ROTATION] * (n - 3)
    first = direct_sum(ROTATION, ROTATION, IDENTITY_2, *tail)
    second = direct_sum(IDENTITY_2, ROTATION, ROTATION, *tail)
    return first, second


def build_rho_2n(n: int) -> Representation:
    """The representation of ``Z/4 x Z/4`` in dimension ``2n`` built from rotation blocks."""
    if n < 3:
        raise ValueError(f"the construction needs n >= 3, got {n}")
    grp = direct_product(build_cyclic(4), build_cyclic(4))
    gens = (4, 1)  # (1,0) and (0,1)
    words = generator_words(grp, gens)
    return from_generator_assignment(grp, gens, _rho_images(n), words)


def reflection(dim: int) -> Matrix:
    return Matrix.diag([-1] + [1] * (dim - 1))


def rho_prime(rep: Representation, x: Matrix | None = None) -> Representation:
    """Conjugate by an element of ``O \\ SO``, by default ``diag(-1, 1, ..., 1)``."""
    x = reflection(rep.dim) if x is None else x
    if x @ x.T != Matrix.identity(rep.dim) or x.det() != -1:
        raise ValueError("conjugator must be orthogonal with determinant -1")
    return conjugate_rep(rep, x)


@dataclass
class AcceptabilityReport:
    family: str
    results: list = field(default_factory=list)  # (name, verdict)
    violations: list = field(default_factory=list)  # names of element-conjugate, not global pairs

    @property
    def clean(self) -> bool:
        return not self.violations


def acceptability_suite(
    family: str,
    fixtures: Sequence[tuple],
    budget: int = DEFAULT_TUPLE_BUDGET,
) -> AcceptabilityReport:
    """Run ``compare`` on named fixture pairs ``(name, r1, r2)``.

    Any pair that is element-conjugate but not globally conjugate is listed as
    a violation of acceptability for the family.
    """
    report = AcceptabilityReport(family)
    for item in fixtures:
        if len(item) == 2:
            name, (r1, r2) = f"pair{len(report.results)}", item
        else:
            name, r1, r2 = item
        v = compare(r1, r2, family, budget)
        report.results.append((name, v))
        if v.element_conjugate and not v.globally_conjugate:
            report.violations.append(name)
    return report

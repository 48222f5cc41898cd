"""Exact matrix representations of finite groups."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .groups import FiniteGroup, from_cayley_table
from .linalg import (
    DimensionError,
    LinearizedPfaffianTable,
    Matrix,
    SingularMatrixError,
    classify_similitude,
    direct_sum,
)

DEFAULT_MAX_ORDER = 5000

# strongest first
FAMILY_PRIORITY = ("SO", "O", "GO", "Sp", "GSp", "GL")
_KIND_FAMILY = {
    "special_orthogonal": "SO",
    "orthogonal": "O",
    "general_orthogonal": "GO",
    "symplectic": "Sp",
    "general_symplectic": "GSp",
    "general_linear": "GL",
}


class GroupTooLargeError(ValueError):
    pass


class NotAHomomorphismError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Representation:
    group: FiniteGroup
    images: tuple[Matrix, ...]
    generators: tuple[int, ...] | None = None

    def __post_init__(self):
        if len(self.images) != self.group.order:
            raise ValueError("need one image per group element")
        shapes = {m.shape for m in self.images}
        if len(shapes) != 1 or not self.images[0].is_square:
            raise DimensionError("images must be square matrices of one dimension")
        if self.images[self.group.identity] != Matrix.identity(self.dim):
            raise NotAHomomorphismError("the identity element is not sent to I")

    @property
    def dim(self) -> int:
        return self.images[0].rows

    def __getitem__(self, g: int) -> Matrix:
        return self.images[g]

    def __eq__(self, other):
        if not isinstance(other, Representation):
            return NotImplemented
        return self.group == other.group and self.images == other.images

    def __hash__(self):
        return hash((self.group, self.images))

    def __repr__(self):
        return f"Representation(order={self.group.order}, dim={self.dim})"

    @cached_property
    def traces(self) -> tuple[Fraction, ...]:
        return tuple(m.trace() for m in self.images)

    @cached_property
    def pl_table(self) -> LinearizedPfaffianTable:
        """Batch ``pl`` evaluator over element tuples, built once per representation."""
        if self.dim % 2:
            raise DimensionError("pl needs an even dimension")
        return LinearizedPfaffianTable(self.images)

    def pl(self, tup: Sequence[int]) -> Fraction:
        return self.pl_table.value(tup)

    def pl_values(self, tuples) -> list[Fraction]:
        return self.pl_table.values(tuples)

    def check_homomorphism(self) -> None:
        """Exhaustive ``rho(g) rho(h) = rho(gh)`` check; raises on the first bad pair."""
        grp = self.group
        for g in range(grp.order):
            for h in range(grp.order):
                if self.images[g] @ self.images[h] != self.images[grp.mult[g][h]]:
                    raise NotAHomomorphismError(f"rho({g}) rho({h}) != rho({grp.mult[g][h]})")


def from_matrix_generators(gens: Sequence[Matrix], max_order: int = DEFAULT_MAX_ORDER) -> Representation:
    """Close the generators under multiplication; the closure becomes the group.

    Elements are numbered in breadth-first order from the identity, so the
    generated group and its table are deterministic.
    """
    gens = [g if isinstance(g, Matrix) else Matrix(g) for g in gens]
    if not gens:
        raise ValueError("need at least one generator")
    dims = {g.shape for g in gens}
    if len(dims) != 1 or not gens[0].is_square:
        raise DimensionError("generators must be square matrices of one dimension")
    for k, g in enumerate(gens):
        if g.det() == 0:
            raise SingularMatrixError(f"generator {k} is singular")
    n = gens[0].rows
    eye = Matrix.identity(n)
    index = {eye: 0}
    elems = [eye]
    right: list[list[int]] = []  # right[g][k] = index of elems[g] @ gens[k]
    queue = deque([0])
    while queue:
        g = queue.popleft()
        row = []
        for s in gens:
            x = elems[g] @ s
            h = index.get(x)
            if h is None:
                if len(elems) >= max_order:
                    raise GroupTooLargeError(f"closure exceeds max_order={max_order}")
                h = index[x] = len(elems)
                elems.append(x)
                queue.append(h)
            row.append(h)
        right.append(row)

    # words from BFS parents give products by walking right-multiplications
    words: list[tuple[int, ...]] = [()] * len(elems)
    seen = [False] * len(elems)
    seen[0] = True
    order = deque([0])
    while order:
        g = order.popleft()
        for k, h in enumerate(right[g]):
            if not seen[h]:
                seen[h] = True
                words[h] = words[g] + (k,)
                order.append(h)
    mult = []
    for g in range(len(elems)):
        row = []
        for h in range(len(elems)):
            x = g
            for k in words[h]:
                x = right[x][k]
            row.append(x)
        mult.append(row)
    grp = from_cayley_table(mult)
    gen_idx = tuple(index[s] for s in gens)
    return Representation(grp, tuple(elems), gen_idx)


def _word_letters(word) -> list[tuple[int, int]]:
    return [(int(x[0]), int(x[1])) for x in word]


def from_generator_assignment(
    grp: FiniteGroup,
    gen_elems: Sequence[int],
    gen_mats: Sequence[Matrix],
    words: Sequence,
) -> Representation:
    """Images from per-element words in the generators, checked to form a homomorphism.

    ``words[g]`` is a sequence of ``(k, e)`` with ``k`` the 1-based generator
    position and ``e = +1`` or ``-1``.  Checking ``rho(g) rho(s) = rho(gs)``
    for every element ``g`` and generator ``s`` is equivalent to the full
    pairwise check, because every element is a product of generators.
    """
    gen_mats = [m if isinstance(m, Matrix) else Matrix(m) for m in gen_mats]
    if len(gen_elems) != len(gen_mats):
        raise ValueError("one matrix per generator element is required")
    if not gen_mats:
        raise ValueError("need at least one generator")
    if len({m.shape for m in gen_mats}) != 1 or not gen_mats[0].is_square:
        raise DimensionError("generator matrices must be square of one dimension")
    if len(words) != grp.order:
        raise ValueError("need one word per group element")
    n = gen_mats[0].rows
    inverses = [None] * len(gen_mats)

    def mat(k, e):
        if e > 0:
            return gen_mats[k - 1]
        if inverses[k - 1] is None:
            inverses[k - 1] = gen_mats[k - 1].inverse()
        return inverses[k - 1]

    images = []
    for g, word in enumerate(words):
        letters = _word_letters(word)
        x = grp.identity
        m = Matrix.identity(n)
        for k, e in letters:
            if not 1 <= k <= len(gen_elems):
                raise ValueError(f"word for element {g} uses unknown generator {k}")
            s = gen_elems[k - 1]
            x = grp.mult[x][s if e > 0 else grp.inv[s]]
            m = m @ mat(k, e)
        if x != g:
            raise ValueError(f"word for element {g} evaluates to {x}")
        images.append(m)
    for g in range(grp.order):
        for k, s in enumerate(gen_elems):
            if images[g] @ gen_mats[k] != images[grp.mult[g][s]]:
                raise NotAHomomorphismError(
                    f"not a homomorphism: rho({g}) rho({s}) != rho({grp.mult[g][s]})"
                )
    return Representation(grp, tuple(images), tuple(gen_elems))


@dataclass(frozen=True)
class RepClass:
    family: str
    families: frozenset
    lambda_fn: tuple[Fraction, ...] | None = None

    def __contains__(self, family: str) -> bool:
        return family in self.families


def _lambda_for(family: str, classes) -> tuple[Fraction, ...] | None:
    if family in ("SO", "O", "Sp"):
        return tuple(Fraction(1) for _ in classes)
    if family == "GO":
        return tuple(c.orthogonal_lambda for c in classes)
    if family == "GSp":
        return tuple(c.symplectic_lambda for c in classes)
    return None


def classify(rep: Representation) -> RepClass:
    """Strongest family containing every image, with its similitude character."""
    classes = [classify_similitude(m) for m in rep.images]
    common = frozenset.intersection(*(c.kinds for c in classes))
    families = frozenset(_KIND_FAMILY[k] for k in common)
    family = next(f for f in FAMILY_PRIORITY if f in families)
    return RepClass(family, families, _lambda_for(family, classes))


def similitude_lambda(rep: Representation, family: str) -> tuple[Fraction, ...] | None:
    """Similitude character for a requested family; ``None`` if some image is outside it."""
    classes = [classify_similitude(m) for m in rep.images]
    kind = {v: k for k, v in _KIND_FAMILY.items()}[family]
    if any(kind not in c.kinds for c in classes):
        return None
    return _lambda_for(family, classes)


def trace_function(rep: Representation, family: str | None = None):
    """``T = tr(rho)``, with ``l = lambda(rho)`` when the family carries a similitude."""
    from .pseudochar import PseudocharData

    if family is None:
        family = classify(rep).family
    lam = similitude_lambda(rep, family) if family != "GL" else None
    if family != "GL" and lam is None:
        raise ValueError(f"representation does not land in {family}")
    return PseudocharData(rep.group, rep.dim, rep.traces, lam, model=rep)


def conjugate_rep(rep: Representation, x: Matrix) -> Representation:
    if not x.is_square or x.rows != rep.dim:
        raise DimensionError("conjugator dimension does not match")
    x_inv = x.inverse()
    return Representation(rep.group, tuple(x @ m @ x_inv for m in rep.images), rep.generators)


def direct_sum_rep(reps: Sequence[Representation]) -> Representation:
    if not reps:
        raise ValueError("empty direct sum")
    grp = reps[0].group
    if any(r.group != grp for r in reps):
        raise ValueError("direct sum needs a common group")
    images = tuple(direct_sum(*(r.images[g] for r in reps)) for g in range(grp.order))
    return Representation(grp, images, reps[0].generators)


def trivial_rep(grp: FiniteGroup, dim: int) -> Representation:
    if dim < 1:
        raise ValueError("dimension must be positive")
    eye = Matrix.identity(dim)
    return Representation(grp, (eye,) * grp.order)

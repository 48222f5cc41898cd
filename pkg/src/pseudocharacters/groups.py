"""Finite groups stored as dense multiplication tables.

Elements are plain integer indices ``0 .. order-1``.  Every group carries its
Cayley table, an inverse table and element orders; an optional tuple of
labels is used only for display.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

FULL_ASSOCIATIVITY_LIMIT = 64
SAMPLED_TRIPLES = 1000


class MalformedGroupError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    mult: tuple[tuple[int, ...], ...]
    identity: int
    inv: tuple[int, ...]
    elem_orders: tuple[int, ...]
    labels: tuple[str, ...] | None = field(default=None)

    @property
    def order(self) -> int:
        return len(self.mult)

    def __len__(self) -> int:
        return len(self.mult)

    def __eq__(self, other):
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        return self.mult == other.mult and self.identity == other.identity

    def __hash__(self):
        return hash((self.mult, self.identity))

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"

    @cached_property
    def table(self) -> np.ndarray:
        return np.array(self.mult, dtype=np.intp).reshape(self.order, self.order)

    @cached_property
    def inv_array(self) -> np.ndarray:
        return np.array(self.inv, dtype=np.intp)

    def mul(self, a: int, b: int) -> int:
        return self.mult[a][b]

    def product(self, elems: Sequence[int]) -> int:
        g = self.identity
        for e in elems:
            g = self.mult[g][e]
        return g

    def power(self, g: int, m: int) -> int:
        return power(g, m, self)

    def label(self, g: int) -> str:
        if self.labels is None:
            return str(g)
        return self.labels[g]

    def is_abelian(self) -> bool:
        n = self.order
        return all(self.mult[a][b] == self.mult[b][a] for a in range(n) for b in range(a + 1, n))


def power(g: int, m: int, grp: FiniteGroup) -> int:
    """Return ``g**m``; negative exponents go through the inverse table."""
    if m < 0:
        g, m = grp.inv[g], -m
    result = grp.identity
    base = g
    while m:
        if m & 1:
            result = grp.mult[result][base]
        base = grp.mult[base][base]
        m >>= 1
    return result


def _element_orders(mult, identity) -> tuple[int, ...]:
    orders = []
    for g in range(len(mult)):
        x, k = g, 1
        while x != identity:
            x = mult[x][g]
            k += 1
            if k > len(mult):
                raise MalformedGroupError(f"element {g} has no finite order within the table")
        orders.append(k)
    return tuple(orders)


def from_cayley_table(
    mult: Sequence[Sequence[int]],
    labels: Sequence[str] | None = None,
    seed: int = 0,
) -> FiniteGroup:
    """Validate a square Cayley table and build the group it describes.

    Associativity is checked on every triple up to order 64 and on 1000
    seeded random triples above that.
    """
    rows = tuple(tuple(int(x) for x in row) for row in mult)
    n = len(rows)
    if n == 0:
        raise MalformedGroupError("empty table")
    for i, row in enumerate(rows):
        if len(row) != n:
            raise MalformedGroupError(f"table is not square: row {i} has length {len(row)}")
        for x in row:
            if not 0 <= x < n:
                raise MalformedGroupError(f"entry {x} in row {i} is out of range")

    identity = None
    for e in range(n):
        if all(rows[e][g] == g and rows[g][e] == g for g in range(n)):
            identity = e
            break
    if identity is None:
        raise MalformedGroupError("no identity element")

    inv = []
    for g in range(n):
        for h in range(n):
            if rows[g][h] == identity and rows[h][g] == identity:
                inv.append(h)
                break
        else:
            raise MalformedGroupError(f"element {g} has no inverse")

    if n <= FULL_ASSOCIATIVITY_LIMIT:
        triples = ((a, b, c) for a in range(n) for b in range(n) for c in range(n))
    else:
        rng = random.Random(seed)
        triples = ((rng.randrange(n), rng.randrange(n), rng.randrange(n)) for _ in range(SAMPLED_TRIPLES))
    for a, b, c in triples:
        if rows[rows[a][b]][c] != rows[a][rows[b][c]]:
            raise MalformedGroupError(f"not associative at ({a}, {b}, {c})")

    if labels is not None:
        labels = tuple(str(s) for s in labels)
        if len(labels) != n:
            raise MalformedGroupError("label count does not match the table")
    return FiniteGroup(rows, identity, tuple(inv), _element_orders(rows, identity), labels)


def build_cyclic(m: int) -> FiniteGroup:
    if m < 1:
        raise ValueError(f"cyclic group order must be positive, got {m}")
    mult = tuple(tuple((a + b) % m for b in range(m)) for a in range(m))
    inv = tuple((-a) % m for a in range(m))
    orders = tuple(m // _gcd(a, m) for a in range(m))
    return FiniteGroup(mult, 0, inv, orders, tuple(str(a) for a in range(m)))


def _gcd(a: int, b: int) -> int:
    while a:
        a, b = b % a, a
    return b


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    """Componentwise product; the pair ``(a, b)`` is encoded as ``a*|h| + b``."""
    ng, nh = g.order, h.order
    mult = tuple(
        tuple(g.mult[a1][a2] * nh + h.mult[b1][b2] for a2 in range(ng) for b2 in range(nh))
        for a1 in range(ng)
        for b1 in range(nh)
    )
    inv = tuple(g.inv[a] * nh + h.inv[b] for a in range(ng) for b in range(nh))
    orders = tuple(_lcm(g.elem_orders[a], h.elem_orders[b]) for a in range(ng) for b in range(nh))
    labels = tuple(f"({_strip(g.label(a))},{_strip(h.label(b))})" for a in range(ng) for b in range(nh))
    return FiniteGroup(mult, g.identity * nh + h.identity, inv, orders, labels)


def _strip(label: str) -> str:
    # flatten nested products: ((1,0),2) -> (1,0,2)
    return label[1:-1] if label.startswith("(") else label


def _lcm(a: int, b: int) -> int:
    return a * b // _gcd(a, b)


def generator_words(grp: FiniteGroup, gens: Sequence[int]) -> list[tuple[tuple[int, int], ...]]:
    """Shortest positive words in ``gens`` for every element, by BFS on the Cayley graph.

    Word letters are ``(k, +1)`` with ``k`` the 1-based generator position.
    Raises ``ValueError`` if the generators do not generate ``grp``.
    """
    words: list[tuple | None] = [None] * grp.order
    words[grp.identity] = ()
    queue = deque([grp.identity])
    while queue:
        g = queue.popleft()
        for k, s in enumerate(gens, start=1):
            h = grp.mult[g][s]
            if words[h] is None:
                words[h] = words[g] + ((k, 1),)
                queue.append(h)
    missing = [g for g, w in enumerate(words) if w is None]
    if missing:
        raise ValueError(f"generators do not generate the group; element {missing[0]} unreachable")
    return words

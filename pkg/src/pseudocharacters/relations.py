"""Symbolic trace relations and their exact evaluation.

Polynomials live in one of two rings:

* ``"R"``: products of trace symbols ``T[w]`` with ``w`` a canonical
  :data:`~pseudocharacters.words.TWord`;
* ``"S"``: products of ``U[w]`` (``w`` a canonical group word), a
  similitude monomial ``l[e]`` and a power of the dimension constant ``n``.

Relations are built once per ``(n, j)`` and cached; evaluation on group
tuples goes through :class:`CompiledRelation`, which vectorises over terms.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce
from itertools import permutations
from typing import Callable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from .groups import FiniteGroup
from .linalg import Matrix, charpoly_coeffs_from_traces, format_rational
from .words import (
    GLetter,
    Letter,
    canonical_t_symbol,
    canonical_u_symbol,
    eval_gword,
    eval_gword_in_group,
    eval_tword,
    format_word,
    go_split,
    go_split_codes,
    gword_from_codes,
    letter_codes,
    canonical_t_codes,
    tword_from_codes,
    word_transpose,
)

MAX_ARITY = 9


class BudgetError(ValueError):
    pass


class MissingSimilitudeError(ValueError):
    pass


def _check_arity(m: int):
    if m < 1:
        raise ValueError(f"need at least one slot, got {m}")
    if m > MAX_ARITY:
        raise BudgetError(f"{m}! terms exceeds the enumeration ceiling of {MAX_ARITY}! ({math.factorial(MAX_ARITY)})")


# -- permutations ---------------------------------------------------------

def cycles_of(images: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    """Cycles of a permutation of ``1..m`` given by its images, least element first."""
    m = len(images)
    seen = [False] * (m + 1)
    out = []
    for start in range(1, m + 1):
        if seen[start]:
            continue
        cyc = []
        i = start
        while not seen[i]:
            seen[i] = True
            cyc.append(i)
            i = images[i - 1]
        out.append(tuple(cyc))
    return tuple(out)


def perm_sign(images: Sequence[int]) -> int:
    cyc = cycles_of(images)
    return -1 if (len(images) - len(cyc)) % 2 else 1


def perms_with_sign(m: int) -> Iterator[tuple[tuple[int, ...], int, tuple[tuple[int, ...], ...]]]:
    """All permutations of ``1..m`` in lexicographic order with sign and cycles."""
    _check_arity(m)
    for images in permutations(range(1, m + 1)):
        cyc = cycles_of(images)
        yield images, (-1 if (m - len(cyc)) % 2 else 1), cyc


# -- polynomials ----------------------------------------------------------

class TermKey(NamedTuple):
    t: tuple = ()          # sorted canonical trace words (ring R)
    u: tuple = ()          # sorted canonical group words (ring S)
    l: tuple = ()          # similitude exponents per slot (ring S)
    n_power: int = 0       # power of the constant n = T(1) = U_1


@dataclass(frozen=True)
class RelationPolynomial:
    ring: str
    arity: int
    n: int
    terms: Mapping[TermKey, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.ring not in ("R", "S"):
            raise ValueError(f"unknown ring {self.ring!r}")
        clean = {k: c for k, c in self.terms.items() if c}
        keys = list(clean)
        if any(a >= b for a, b in zip(keys, keys[1:])):
            clean = dict(sorted(clean.items()))
        object.__setattr__(self, "terms", clean)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, RelationPolynomial):
            return NotImplemented
        return (self.ring, self.arity, self.n, self.terms) == (other.ring, other.arity, other.n, other.terms)

    def __hash__(self):
        return hash((self.ring, self.arity, self.n, tuple(self.terms.items())))

    def __str__(self):
        return format_polynomial(self)

    def has_similitude(self) -> bool:
        return any(any(k.l) for k in self.terms)


def _format_l(exps: Sequence[int]) -> str:
    parts = []
    for i, e in enumerate(exps, start=1):
        if e == 1:
            parts.append(f"A{i}")
        elif e > 1:
            parts.append(f"A{i}^{e}")
    return "l[" + " ".join(parts) + "]"


def format_term(key: TermKey) -> str:
    factors = [f"T[{format_word(w)}]" for w in key.t]
    factors += [f"U[{format_word(w)}]" for w in key.u]
    if any(key.l):
        factors.append(_format_l(key.l))
    if key.n_power == 1:
        factors.append("n")
    elif key.n_power > 1:
        factors.append(f"n^{key.n_power}")
    return "·".join(factors)


def format_polynomial(p: RelationPolynomial) -> str:
    if not p.terms:
        return "0"
    pieces = []
    for i, (key, c) in enumerate(p.terms.items()):
        body = format_term(key)
        mag = abs(c)
        text = body if (mag == 1 and body) else (f"{mag}·{body}" if body else str(mag))
        if i == 0:
            pieces.append(text if c > 0 else f"−{text}")
        else:
            pieces.append(f" + {text}" if c > 0 else f" − {text}")
    return "".join(pieces)


# -- vectorised expansion over all permutations ---------------------------
#
# With single-letter slots every cycle word uses distinct letters, so its
# canonical form is the rotation that starts at the least letter, read in the
# orientation where that letter is untransposed.  That makes the whole
# expansion expressible as array operations over the permutation table.

_CHUNK = 1 << 15
_NO_WORD = np.iinfo(np.int64).max


@lru_cache(maxsize=None)
def _perm_table(m: int) -> tuple[np.ndarray, np.ndarray]:
    """All permutations of ``range(m)`` in lexicographic order, with signs."""
    perms = np.array(list(permutations(range(m))), dtype=np.intp).reshape(-1, m)
    inversions = np.zeros(len(perms), dtype=np.int64)
    for a in range(m):
        for b in range(a + 1, m):
            inversions += perms[:, a] > perms[:, b]
    return perms, np.where(inversions % 2, -1, 1).astype(np.int64)


def _canonical_cycle_words(nxt: np.ndarray, letter_of: np.ndarray, width: int) -> np.ndarray:
    """Canonical cycle words of each row of a point map, as packed integers.

    ``nxt[r]`` maps points to points; walking it from a point reads the
    letters ``letter_of[point]`` (small positive codes).  A walk is kept when
    its first letter is untransposed and least in its orbit.  Returns a
    ``(rows, width)`` array of packed words, ascending, padded with ``_NO_WORD``.
    """
    rows, k = nxt.shape
    start = np.broadcast_to(np.arange(k), (rows, k))
    cur = start.copy()
    word = np.zeros((rows, k), dtype=np.int64)
    low = np.full((rows, k), 1 << 30, dtype=np.int64)
    active = np.ones((rows, k), dtype=bool)
    for _ in range(k):
        letter = letter_of[cur]
        word = np.where(active, word * 32 + letter, word)
        low = np.where(active, np.minimum(low, letter), low)
        cur = np.take_along_axis(nxt, cur, axis=1)
        active &= cur != start
    first = letter_of[start]
    keep = (first == low) & (first % 2 == 0)
    out = np.sort(np.where(keep, word, _NO_WORD), axis=1)
    return out[:, :width]


def _digits(codes: np.ndarray, width: int) -> np.ndarray:
    """Unpack base-32 words into left-aligned letter codes, zero padded."""
    lengths = np.zeros(len(codes), dtype=np.int64)
    x = codes.copy()
    while x.any():
        lengths += x > 0
        x >>= 5
    out = np.zeros((len(codes), width), dtype=np.int64)
    for k in range(width):
        shift = 5 * (lengths - 1 - k)
        ok = shift >= 0
        out[:, k] = np.where(ok, (codes >> np.maximum(shift, 0)) & 31, 0)
    return out


def _rows_to_tuples(digits: np.ndarray) -> list[tuple]:
    return [tuple(x for x in row if x) for row in digits.tolist()]


def _lex_order(keys: np.ndarray) -> np.ndarray:
    """Row order of a 2-D array under lexicographic comparison (column 0 first)."""
    if keys.shape[1] == 0:
        return np.arange(len(keys))
    return np.lexsort(keys.T[::-1])


def _gletter_key(digits: np.ndarray) -> np.ndarray:
    # GLetter sorts inverse before positive; codes put the inverse flag in the low bit
    return np.where(digits > 0, digits ^ 1, 0)


def _dj_nxt(perms: np.ndarray, n: int, j: int) -> np.ndarray:
    rows, cols = _dj_labels(n, j)
    code = lambda sym: 2 * (sym[0] - 1) + (0 if sym[1] == "u" else 1)
    r = np.array([code(x) for x in rows], dtype=np.intp)
    c = np.array([code(x) for x in cols], dtype=np.intp)
    partner = np.empty((len(perms), 2 * (n + 1)), dtype=np.intp)
    matched = c[perms]
    partner[:, r] = matched
    np.put_along_axis(partner, matched, np.broadcast_to(r, matched.shape), axis=1)
    return partner ^ 1


@dataclass(frozen=True)
class _Collected:
    """Collected terms: word ranks per factor (``-1`` padded) and coefficients.

    ``digits[r]`` holds the letter codes of the word of rank ``r``.
    """

    digits: np.ndarray     # (words, arity)
    factors: np.ndarray    # (terms, width)
    coeffs: np.ndarray     # (terms,)


def _collect(word_rows: np.ndarray, signs: np.ndarray, width: int, group_order: bool) -> _Collected:
    codes, inverse = np.unique(word_rows, return_inverse=True)
    inverse = inverse.reshape(word_rows.shape)
    real = np.flatnonzero(codes != _NO_WORD)
    digits = _digits(codes[real], width)
    order = _lex_order(_gletter_key(digits) if group_order else digits)
    rank = np.full(len(codes), _NO_WORD, dtype=np.int64)
    rank[real[order]] = np.arange(len(order))
    ranked = np.sort(rank[inverse], axis=1)
    ranked[ranked == _NO_WORD] = -1
    keys, idx = np.unique(ranked, axis=0, return_inverse=True)
    coeffs = np.bincount(idx.ravel(), weights=signs, minlength=len(keys)).astype(np.int64)
    nonzero = coeffs != 0
    return _Collected(digits[order], keys[nonzero], coeffs[nonzero])


def _letters_u(i: int) -> int:
    return 2 * (i + 1)


@lru_cache(maxsize=None)
def _gl_collected(m: int) -> _Collected:
    perms, signs = _perm_table(m)
    letter_of = np.array([_letters_u(i) for i in range(m)], dtype=np.int64)
    rows = np.concatenate(
        [_canonical_cycle_words(perms[a:a + _CHUNK], letter_of, m) for a in range(0, len(perms), _CHUNK)]
    )
    return _collect(rows, signs, m, group_order=True)


@lru_cache(maxsize=None)
def _dj_collected(n: int, j: int) -> _Collected:
    m = n + 1
    perms, signs = _perm_table(m)
    # leaving through u_a reads A_a^t, through v_a reads A_a
    letter_of = np.array([(x ^ 1) + 2 for x in range(2 * m)], dtype=np.int64)
    rows = np.concatenate(
        [
            _canonical_cycle_words(_dj_nxt(perms[a:a + _CHUNK], n, j), letter_of, m)
            for a in range(0, len(perms), _CHUNK)
        ]
    )
    return _collect(rows, signs, m, group_order=False)


@dataclass(frozen=True)
class _SArrays:
    """An S-ring polynomial as arrays: group words, factor ranks, l exponents, n powers."""

    digits: np.ndarray     # (words, max length) letter codes of each group word, 0 padded
    factors: np.ndarray    # (terms, width), -1 padded
    l_exps: np.ndarray     # (terms, arity)
    n_powers: np.ndarray   # (terms,)
    coeffs: np.ndarray     # (terms,)

    def polynomial(self, n: int) -> "RelationPolynomial":
        m = self.l_exps.shape[1]
        words = [gword_from_codes(c) for c in _rows_to_tuples(self.digits)]
        terms = {}
        for row, exps, p, c in zip(self.factors.tolist(), self.l_exps.tolist(), self.n_powers.tolist(), self.coeffs.tolist()):
            terms[TermKey(u=tuple(words[r] for r in row if r >= 0), l=tuple(exps), n_power=p)] = c
        return RelationPolynomial("S", m, n, terms)


@lru_cache(maxsize=None)
def _gl_arrays(m: int) -> _SArrays:
    col = _gl_collected(m)
    terms = len(col.coeffs)
    zeros = np.zeros((terms, m), dtype=np.int64)
    return _SArrays(col.digits, col.factors, zeros, np.zeros(terms, dtype=np.int64), col.coeffs)


@lru_cache(maxsize=None)
def _g_arrays(n: int, j: int) -> _SArrays:
    """``G_{j,n+1}`` straight from the collected ``F_{j,n+1}``.

    With single-letter slots a canonical trace word has distinct letters, so
    replacing transposes by inverses leaves a reduced word already in
    canonical rotation: group words are the trace words read with the low
    bit as an inverse flag, ``U_1`` never occurs, and the similitude
    exponent of a word is its set of transposed letters.
    """
    m = n + 1
    col = _dj_collected(n, j)
    digits = col.digits
    per_word = np.zeros((len(digits) + 1, m), dtype=np.int64)  # last row: padding
    present = digits > 0
    rows = np.nonzero(present)[0]
    np.add.at(per_word, (rows, (digits[present] >> 1) - 1), digits[present] & 1)
    order = _lex_order(_gletter_key(digits))
    g_rank = np.empty(len(digits) + 1, dtype=np.int64)
    g_rank[order] = np.arange(len(order))
    g_rank[-1] = _NO_WORD
    f = col.factors
    l_exps = per_word[f].sum(axis=1)
    ranked = np.sort(g_rank[f], axis=1)
    ranked[ranked == _NO_WORD] = -1
    term_order = _lex_order(ranked)
    return _SArrays(
        digits[order],
        ranked[term_order],
        l_exps[term_order],
        np.zeros(len(f), dtype=np.int64),
        col.coeffs[term_order],
    )


# -- GL relation ----------------------------------------------------------

# -- GL relation ----------------------------------------------------------

@lru_cache(maxsize=None)
def gl_relation(n: int) -> RelationPolynomial:
    """``sum_sigma sgn(sigma) prod_cycles U[A_i1 ... A_ir]`` over ``S_{n+1}``."""
    if n < 1:
        raise ValueError("dimension must be positive")
    _check_arity(n + 1)
    return _gl_arrays(n + 1).polynomial(n)


# -- the determinant D^j and its trace translation ------------------------

def _dj_labels(n: int, j: int):
    if not 0 <= 2 * j <= n + 1:
        raise ValueError(f"j={j} outside 0 <= j <= (n+1)/2 for n={n}")
    s = n + 1 - 2 * j
    rows = [(a, "u") for a in range(1, j + s + 1)] + [(a, "v") for a in range(1, j + 1)]
    cols = [(a, "u") for a in range(j + s + 1, n + 2)] + [(a, "v") for a in range(j + 1, n + 2)]
    return rows, cols


def _pair(a, b):
    return (a, b) if a <= b else (b, a)


def build_dj_monomials(n: int, j: int) -> Iterator[tuple[int, tuple]]:
    """Expand ``D^j`` over column permutations.

    Each monomial is ``(sign, pairs)`` with ``pairs`` a sorted tuple of
    unordered symbol pairs ``((a, 'u'|'v'), (b, 'u'|'v'))``.
    """
    if n < 1:
        raise ValueError("dimension must be positive")
    rows, cols = _dj_labels(n, j)
    _check_arity(n + 1)
    for pi in permutations(range(n + 1)):
        sign = perm_sign([p + 1 for p in pi])
        yield sign, tuple(sorted(_pair(rows[r], cols[pi[r]]) for r in range(n + 1)))


def _default_slots(m: int) -> list[tuple]:
    return [(Letter(i, False),) for i in range(1, m + 1)]


def walk_cycles(pairs: Sequence[tuple], start_letter: str = "u", reverse: bool = False) -> list[list[tuple[int, bool]]]:
    """Decompose a monomial into cycles of ``(index, transposed)`` steps.

    Each cycle starts at its least unvisited index and leaves it through
    ``start_letter``.  ``reverse`` walks each cycle the other way round,
    which is only used to check that the result does not depend on it.
    """
    partner = {}
    for a, b in pairs:
        if a in partner or b in partner:
            raise AssertionError(f"symbol used twice in monomial: {a} / {b}")
        partner[a] = b
        partner[b] = a
    indices = sorted({sym[0] for sym in partner})
    for i in indices:
        if (i, "u") not in partner or (i, "v") not in partner:
            raise AssertionError(f"index {i} does not have degree 2")
    other = {"u": "v", "v": "u"}
    first = other[start_letter] if reverse else start_letter
    visited = set()
    out = []
    for a in indices:
        if a in visited:
            continue
        cyc = []
        cur = (a, first)
        while True:
            idx, letter = cur
            visited.add(idx)
            # leaving through u_a means the factor is M_a^t, through v_a it is M_a
            cyc.append((idx, letter == "u"))
            entry = partner[cur]
            if entry == (a, other[first]):
                break
            cur = (entry[0], other[entry[1]])
        out.append(cyc)
    return out


def _cycle_word(cyc, slot_words) -> tuple:
    word = []
    for idx, transposed in cyc:
        w = slot_words[idx - 1]
        word.extend(word_transpose(w) if transposed else w)
    return tuple(word)


def monomial_to_term(pairs: Sequence[tuple], slot_words: Sequence[tuple] | None = None) -> tuple:
    """Translate one ``D^j`` monomial into a sorted tuple of canonical trace words."""
    m = len(pairs)
    slots = _default_slots(m) if slot_words is None else [tuple(w) for w in slot_words]
    return tuple(sorted(canonical_t_symbol(_cycle_word(c, slots)) for c in walk_cycles(pairs)))


def _dj_collect(n: int, j: int, slots) -> tuple[Counter, list[tuple]]:
    """Collect ``D^j`` monomials as sorted tuples of canonical trace-word ids.

    Same result as ``monomial_to_term`` over ``build_dj_monomials``, but on
    integer symbol codes: symbol ``u_a`` is ``2(a-1)``, ``v_a`` is ``2(a-1)+1``.
    The returned words are letter-code tuples (see ``words.letter_codes``).
    """
    rows, cols = _dj_labels(n, j)
    m = n + 1
    code = lambda sym: 2 * (sym[0] - 1) + (0 if sym[1] == "u" else 1)
    row_codes = [code(s) for s in rows]
    col_codes = [code(s) for s in cols]
    # slot word and its transpose, indexed like the step codes below
    slot_codes = []
    for w in slots:
        c = letter_codes(w)
        slot_codes += [c, tuple(k ^ 1 for k in reversed(c))]
    raw_ids: dict[tuple, int] = {}
    word_ids: dict[tuple, int] = {}
    words: list[tuple] = []
    terms: Counter = Counter()
    partner = [0] * (2 * m)
    pairs = list(zip(range(m), row_codes))
    for pi, sign in zip(permutations(col_codes), _perm_table(m)[1].tolist()):
        for r, a in pairs:
            b = pi[r]
            partner[a] = b
            partner[b] = a
        visited = 0
        factors = []
        for start in range(m):
            if visited >> start & 1:
                continue
            raw = []
            cur = 2 * start  # leave through u_start
            close = cur + 1
            while True:
                visited |= 1 << (cur >> 1)
                raw.append(cur ^ 1)  # low bit 1 = transposed factor
                entry = partner[cur]
                if entry == close:
                    break
                cur = entry ^ 1
            key = tuple(raw)
            wid = raw_ids.get(key)
            if wid is None:
                canon = canonical_t_codes(tuple(k for c in key for k in slot_codes[c]))
                wid = word_ids.get(canon)
                if wid is None:
                    wid = word_ids[canon] = len(words)
                    words.append(canon)
                raw_ids[key] = wid
            factors.append(wid)
        factors.sort()
        terms[tuple(factors)] += sign
    return terms, words


def _r_polynomial(n, raw: Counter, words) -> RelationPolynomial:
    # codes sort like letters, so ordering by word id rank keeps terms sorted
    order = sorted(range(len(words)), key=words.__getitem__)
    rank = [0] * len(words)
    for r, i in enumerate(order):
        rank[i] = r
    letters = [tword_from_codes(words[i]) for i in order]
    keyed = sorted((tuple(sorted(rank[i] for i in k)), c) for k, c in raw.items() if c)
    return RelationPolynomial("R", n + 1, n, {TermKey(t=tuple(letters[r] for r in k)): c for k, c in keyed})


@lru_cache(maxsize=None)
def _f_relation_default(n: int, j: int) -> RelationPolynomial:
    col = _dj_collected(n, j)
    words = [tword_from_codes(w) for w in _rows_to_tuples(col.digits)]
    terms = {
        TermKey(t=tuple(words[r] for r in row if r >= 0)): c
        for row, c in zip(col.factors.tolist(), col.coeffs.tolist())
    }
    return RelationPolynomial("R", n + 1, n, terms)


def f_relation(n: int, j: int, slot_words: Sequence[tuple] | None = None) -> RelationPolynomial:
    """Orthogonal trace relation ``F_{j,n+1}`` as a collected R-ring polynomial."""
    if n < 1:
        raise ValueError("dimension must be positive")
    _dj_labels(n, j)
    _check_arity(n + 1)
    if slot_words is None:
        return _f_relation_default(n, j)
    slots = [tuple(w) for w in slot_words]
    if len(slots) != n + 1 or any(not w for w in slots):
        raise ValueError(f"need {n + 1} nonempty slot words")
    return _r_polynomial(n, *_dj_collect(n, j, slots))


def f_relation_slow(n: int, j: int, slot_words: Sequence[tuple] | None = None) -> RelationPolynomial:
    """Reference build through :func:`build_dj_monomials` and :func:`monomial_to_term`."""
    terms: Counter = Counter()
    for sign, pairs in build_dj_monomials(n, j):
        terms[TermKey(t=monomial_to_term(pairs, slot_words))] += sign
    return RelationPolynomial("R", n + 1, n, terms)


def to_similitude_ring(p: RelationPolynomial, m: int | None = None) -> RelationPolynomial:
    """Replace every ``T[w]`` by ``l[w'] U[w'']``; ``U[1]`` becomes the constant ``n``."""
    if p.ring != "R":
        raise ValueError("expected an R-ring polynomial")
    m = p.arity if m is None else m
    split_cache: dict[tuple, tuple] = {}
    terms: Counter = Counter()
    for key, c in p.terms.items():
        exps = [0] * m
        us = []
        n_power = key.n_power
        for w in key.t:
            got = split_cache.get(w)
            if got is None:
                counts, g = go_split(w, m)
                got = split_cache[w] = (counts, canonical_u_symbol(g))
            counts, cu = got
            for i, e in enumerate(counts):
                exps[i] += e
            if cu:
                us.append(cu)
            else:
                n_power += 1
        terms[TermKey(u=tuple(sorted(us)), l=tuple(exps), n_power=n_power)] += c
    return RelationPolynomial("S", p.arity, p.n, terms)


@lru_cache(maxsize=None)
def _g_relation_default(n: int, j: int) -> RelationPolynomial:
    return _g_arrays(n, j).polynomial(n)


def g_relation(n: int, j: int, slot_words: Sequence[tuple] | None = None) -> RelationPolynomial:
    """``G_{j,n+1}``: the similitude-ring image of ``F_{j,n+1}``."""
    if slot_words is None:
        _dj_labels(n, j)
        _check_arity(n + 1)
        return _g_relation_default(n, j)
    f = f_relation(n, j, slot_words)
    m = max(x.var for w in slot_words for x in w)
    return to_similitude_ring(f, m)


def transpose_free_to_u(p: RelationPolynomial) -> RelationPolynomial:
    """Read an R-ring polynomial with no transposed letters as an S-ring one."""
    if p.ring != "R":
        raise ValueError("expected an R-ring polynomial")
    terms: Counter = Counter()
    for key, c in p.terms.items():
        us = []
        for w in key.t:
            if any(x.transposed for x in w):
                raise ValueError(f"word {format_word(w)} contains a transpose")
            us.append(canonical_u_symbol(tuple(GLetter(x.var, 1) for x in w)))
        terms[TermKey(u=tuple(sorted(us)), l=(0,) * p.arity, n_power=key.n_power)] += c
    return RelationPolynomial("S", p.arity, p.n, terms)


# -- evaluation -----------------------------------------------------------

def evaluate_on_matrices(
    p: RelationPolynomial,
    mats: Sequence[Matrix],
    lambdas: Sequence | None = None,
) -> Fraction:
    """Evaluate with ``T[w]``/``U[w]`` -> trace of the word and ``l`` -> ``lambdas``."""
    cache: dict[tuple, Fraction] = {}
    n_val = Fraction(mats[0].rows)
    if p.ring == "S":
        if p.has_similitude() and lambdas is None:
            raise MissingSimilitudeError("relation has similitude factors but no lambdas were given")
        # only letters that occur inverted need an invertible assignment
        needed = {x.var for key in p.terms for w in key.u for x in w if x.exp < 0}
        inverses = [m.inverse() if i + 1 in needed else None for i, m in enumerate(mats)]

    def sym(w):
        v = cache.get(w)
        if v is None:
            v = cache[w] = (eval_tword(w, mats) if p.ring == "R" else eval_gword(w, mats, inverses)).trace()
        return v

    total = Fraction(0)
    for key, c in p.terms.items():
        val = Fraction(c) * n_val ** key.n_power
        for w in key.t:
            val *= sym(w)
        for w in key.u:
            val *= sym(w)
        for i, e in enumerate(key.l):
            if e:
                val *= Fraction(lambdas[i]) ** e
        total += val
    return total


def eval_relation(
    p: RelationPolynomial,
    T: Sequence,
    l: Sequence | None,
    tup: Sequence[int],
    grp: FiniteGroup,
    n: int | None = None,
) -> Fraction:
    """Exact value of an S-ring relation at one group tuple (reference path)."""
    if p.ring != "S":
        raise ValueError("group evaluation needs an S-ring polynomial")
    if len(tup) != p.arity:
        raise ValueError(f"tuple length {len(tup)} does not match arity {p.arity}")
    if l is None and p.has_similitude():
        raise MissingSimilitudeError("relation has similitude factors but no l was supplied")
    n_val = Fraction(p.n if n is None else n)
    total = Fraction(0)
    for key, c in p.terms.items():
        val = Fraction(c) * n_val ** key.n_power
        for w in key.u:
            val *= T[eval_gword_in_group(w, tup, grp)]
        for i, e in enumerate(key.l):
            if e:
                val *= Fraction(l[tup[i]]) ** e
        total += val
    return total


class CompiledRelation:
    """An S-ring polynomial flattened into arrays for batch evaluation on group tuples."""

    def __init__(self, arrays: _SArrays, n: int, poly: RelationPolynomial | None = None):
        self._arrays = arrays
        self._poly = poly
        self.n = n
        self.arity = arrays.l_exps.shape[1]
        digits = arrays.digits
        n_sym = self.n_sym = len(digits)
        f = arrays.factors
        if f.shape[1] == 0:
            f = np.full((len(f), 1), -1, dtype=np.int64)
        self.factors = np.where(f < 0, n_sym, f).astype(np.intp)
        self.degrees = (f >= 0).sum(axis=1).astype(np.int64)
        self.base_coeffs = [c * n**p for c, p in zip(arrays.coeffs.tolist(), arrays.n_powers.tolist())]
        self.l_exps = np.asarray(arrays.l_exps, dtype=np.int64)
        self.needs_l = bool(self.l_exps.any())
        # letters padded with slot -1, which evaluates to the identity
        self.letter_slot = np.where(digits > 0, (digits >> 1) - 1, -1).astype(np.intp)
        self.letter_inv = (digits & 1).astype(bool)
        if self.letter_slot.shape[1] == 0:
            self.letter_slot = np.full((n_sym, 1), -1, dtype=np.intp)
            self.letter_inv = np.zeros((n_sym, 1), dtype=bool)

    @property
    def symbols(self) -> list:
        return [gword_from_codes(c) for c in _rows_to_tuples(self._arrays.digits)]

    @classmethod
    def from_polynomial(cls, p: RelationPolynomial) -> "CompiledRelation":
        if p.ring != "S":
            raise ValueError("only S-ring relations compile for group evaluation")
        symbols: dict[tuple, int] = {}
        rows = [[symbols.setdefault(w, len(symbols)) for w in key.u] for key in p.terms]
        width = max((len(r) for r in rows), default=0)
        factors = np.full((len(rows), width), -1, dtype=np.int64)
        for k, r in enumerate(rows):
            factors[k, : len(r)] = r
        l_exps = np.array([key.l if key.l else (0,) * p.arity for key in p.terms], dtype=np.int64).reshape(len(rows), p.arity)
        width = max((len(w) for w in symbols), default=0)
        digits = np.zeros((len(symbols), width), dtype=np.int64)
        for k, w in enumerate(symbols):
            digits[k, : len(w)] = letter_codes(w)
        arrays = _SArrays(
            digits,
            factors,
            l_exps,
            np.array([key.n_power for key in p.terms], dtype=np.int64),
            np.array(list(p.terms.values()), dtype=np.int64),
        )
        return cls(arrays, p.n, p)

    @property
    def poly(self) -> RelationPolynomial:
        if self._poly is None:
            self._poly = self._arrays.polynomial(self.n)
        return self._poly

    def __len__(self):
        return len(self.base_coeffs)

    def _symbol_elements(self, grp: FiniteGroup, tuples: np.ndarray) -> np.ndarray:
        """Group element of every symbol at every tuple, shape ``(batch, n_symbols)``."""
        table = grp.table
        inv = grp.inv_array
        ident = np.full((len(tuples), 1), grp.identity, dtype=np.intp)
        ext = np.concatenate([tuples, ident], axis=1)  # slot -1 -> identity
        letters = ext[:, self.letter_slot]  # (batch, n_sym, max_len)
        letters = np.where(self.letter_inv[None], inv[letters], letters)
        g = letters[:, :, 0]
        for c in range(1, letters.shape[2]):
            g = table[g, letters[:, :, c]]
        return g

    def evaluate(
        self,
        T: Sequence,
        l: Sequence | None,
        grp: FiniteGroup,
        tuples: Sequence[Sequence[int]],
        cells: int = 1 << 22,
    ) -> list[Fraction]:
        """Exact values at each tuple.

        Integer-valued data with ``l`` in ``{+1, -1}`` runs in int64 when a
        magnitude bound allows it, otherwise in Python integers; any other
        similitude values fall back to the term-by-term reference path.
        Tuples are processed in batches of about ``cells`` term evaluations.
        """
        tuples = np.asarray(tuples, dtype=np.intp).reshape(-1, self.arity)
        if self.needs_l and l is None:
            raise MissingSimilitudeError("relation has similitude factors but no l was supplied")
        T = [Fraction(x) for x in T]
        if self.needs_l and any(Fraction(x) not in (1, -1) for x in l):
            return [eval_relation(self.poly, T, l, tuple(int(x) for x in t), grp) for t in tuples]
        D = reduce(math.lcm, (x.denominator for x in T), 1)
        t_int = [int(x * D) for x in T]
        maxdeg = int(self.degrees.max()) if len(self.degrees) else 0
        coeffs = [c * D ** (maxdeg - int(d)) for c, d in zip(self.base_coeffs, self.degrees)]
        big = max(max((abs(x) for x in t_int), default=1), 1)
        bound = sum(abs(c) * big ** int(d) for c, d in zip(coeffs, self.degrees))
        dtype = np.int64 if bound < 2**62 else object
        t_arr = np.array(t_int + [1], dtype=dtype)
        c_arr = np.array(coeffs, dtype=dtype)
        one_col = self.n_sym
        odd = (self.l_exps % 2).astype(np.int64) if self.needs_l else None
        l_neg = np.array([Fraction(x) == -1 for x in l], dtype=np.int64) if self.needs_l else None
        n_terms = max(len(coeffs), 1)
        batch = max(1, cells // n_terms)
        denom = D**maxdeg
        out: list[Fraction] = []
        for start in range(0, len(tuples), batch):
            block = tuples[start:start + batch]
            elems = self._symbol_elements(grp, block)
            vals = np.empty((len(block), one_col + 1), dtype=dtype)
            vals[:, :one_col] = t_arr[elems]
            vals[:, one_col] = 1
            acc = np.broadcast_to(c_arr, (len(block), len(c_arr))).copy()
            for f in range(self.factors.shape[1]):
                acc = acc * vals[:, self.factors[:, f]]
            if self.needs_l:
                flips = (l_neg[block] @ odd.T) % 2 == 1
                acc = np.where(flips, -acc, acc)
            out.extend(Fraction(int(x), denom) for x in acc.sum(axis=1))
        return out


@lru_cache(maxsize=None)
def compiled_gl(n: int) -> CompiledRelation:
    if n < 1:
        raise ValueError("dimension must be positive")
    _check_arity(n + 1)
    return CompiledRelation(_gl_arrays(n + 1), n)


@lru_cache(maxsize=None)
def compiled_g(n: int, j: int) -> CompiledRelation:
    _dj_labels(n, j)
    _check_arity(n + 1)
    return CompiledRelation(_g_arrays(n, j), n)


# -- other relations ------------------------------------------------------

def tnn_relation_check(ms: Sequence[tuple], assign: Sequence[Matrix], normalized: bool = True) -> Fraction:
    """``tr(M N N^t P) - tr(MP) tr(N N^t) / n`` (or without ``/ n`` if not normalized)."""
    m_word, n_word, p_word = (tuple(w) for w in ms)
    dim = assign[0].rows
    lhs = eval_tword(m_word + n_word + word_transpose(n_word) + p_word, assign).trace()
    mp = eval_tword(m_word + p_word, assign).trace()
    nnt = eval_tword(n_word + word_transpose(n_word), assign).trace()
    if normalized:
        return lhs - mp * nnt / dim
    return lhs - mp * nnt


def det_from_traces_relation(n: int) -> Callable[[Sequence], Fraction]:
    """The map ``(T(g), ..., T(g^n)) -> det`` through the Newton recurrence."""
    if n < 1:
        raise ValueError("dimension must be positive")

    def det_of_traces(traces: Sequence) -> Fraction:
        if len(traces) != n:
            raise ValueError(f"expected {n} power traces, got {len(traces)}")
        return charpoly_coeffs_from_traces(traces)[-1]

    return det_of_traces

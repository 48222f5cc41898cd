"""Words in the letters ``A_i``, ``A_i^t`` and ``A_i^-1`` and their canonical forms.

Two kinds of word are used:

* ``TWord``: a tuple of :class:`Letter` over ``{A_1, A_1^t, ..., A_m, A_m^t}``.
  Trace symbols ``T[w]`` are identified under cyclic rotation and transposition.
* ``GWord``: a reduced tuple of :class:`GLetter` in the free group on
  ``A_1 .. A_m``.  Symbols ``U[w]`` are identified under cyclic rotation only.

Text form: ``"A1 A2' A1-"`` where ``'`` marks a transpose and ``-`` an inverse.
"""

from __future__ import annotations

from functools import reduce
from typing import NamedTuple, Sequence

from .groups import FiniteGroup
from .linalg import DimensionError, Matrix


class Letter(NamedTuple):
    var: int
    transposed: bool = False

    def __str__(self):
        return f"A{self.var}'" if self.transposed else f"A{self.var}"


class GLetter(NamedTuple):
    var: int
    exp: int = 1

    def __str__(self):
        return f"A{self.var}-" if self.exp < 0 else f"A{self.var}"


TWord = tuple  # tuple[Letter, ...], nonempty
GWord = tuple  # tuple[GLetter, ...], reduced


def _letter(var, transposed=False) -> Letter:
    return Letter(int(var), bool(transposed))


def tword(*spec) -> TWord:
    """``tword(1, (2, True))`` -> ``A1 A2'``.  Also accepts a text form."""
    if len(spec) == 1 and isinstance(spec[0], str):
        return parse_tword(spec[0])
    out = []
    for s in spec:
        out.append(_letter(*s) if isinstance(s, tuple) else _letter(s))
    return tuple(out)


def gword(*spec) -> GWord:
    """``gword(1, (2, -1))`` -> ``A1 A2-`` (reduced)."""
    if len(spec) == 1 and isinstance(spec[0], str):
        return parse_gword(spec[0])
    out = []
    for s in spec:
        out.append(GLetter(*s) if isinstance(s, tuple) else GLetter(s, 1))
    return reduce_gword(out)


def _parse_tokens(text: str):
    for tok in text.split():
        if not tok.startswith("A"):
            raise ValueError(f"bad letter {tok!r}")
        body, suffix = tok[1:], ""
        while body and body[-1] in "'-":
            suffix += body[-1]
            body = body[:-1]
        if not body.isdigit() or int(body) < 1:
            raise ValueError(f"bad letter {tok!r}")
        yield int(body), suffix


def parse_tword(text: str) -> TWord:
    out = []
    for var, suffix in _parse_tokens(text):
        if suffix not in ("", "'"):
            raise ValueError(f"trace words admit only transposes, got A{var}{suffix}")
        out.append(Letter(var, suffix == "'"))
    if not out:
        raise ValueError("trace words are nonempty")
    return tuple(out)


def parse_gword(text: str) -> GWord:
    if text.strip() in ("", "1"):
        return ()
    out = []
    for var, suffix in _parse_tokens(text):
        if suffix not in ("", "-"):
            raise ValueError(f"group words admit only inverses, got A{var}{suffix}")
        out.append(GLetter(var, -1 if suffix else 1))
    return reduce_gword(out)


def format_word(w) -> str:
    if not w:
        return "1"
    return " ".join(str(x) for x in w)


def word_transpose(w: TWord) -> TWord:
    return tuple(Letter(x.var, not x.transposed) for x in reversed(w))


# Integer letter codes: ``2*var + flag`` where the flag marks a transpose (trace
# words) or an inverse (group words).  Codes sort exactly like the letters.

def letter_codes(w) -> tuple[int, ...]:
    if w and isinstance(w[0], GLetter):
        return tuple(2 * x.var + (x.exp < 0) for x in w)
    return tuple(2 * x.var + bool(x.transposed) for x in w)


def tword_from_codes(codes) -> TWord:
    return tuple(Letter(k >> 1, bool(k & 1)) for k in codes)


def gword_from_codes(codes) -> GWord:
    return tuple(GLetter(k >> 1, -1 if k & 1 else 1) for k in codes)


def _least_rotation(w: tuple) -> tuple:
    return min(w[i:] + w[:i] for i in range(len(w)))


def canonical_t_codes(codes: tuple) -> tuple:
    return min(_least_rotation(codes), _least_rotation(tuple(k ^ 1 for k in reversed(codes))))


def canonical_t_symbol(w: TWord) -> TWord:
    """Least word among the rotations of ``w`` and of its transpose."""
    if not w:
        raise ValueError("trace words are nonempty")
    return tword_from_codes(canonical_t_codes(letter_codes(w)))


def _reduce_codes(codes) -> list[int]:
    stack: list[int] = []
    for k in codes:
        if stack and stack[-1] == k ^ 1:
            stack.pop()
        else:
            stack.append(k)
    return stack


def canonical_u_codes(codes) -> tuple:
    w = _reduce_codes(codes)
    lo, hi = 0, len(w)
    while hi - lo >= 2 and w[lo] == w[hi - 1] ^ 1:
        lo += 1
        hi -= 1
    w = tuple(w[lo:hi])
    return _least_rotation(w) if w else ()


def reduce_gword(letters: Sequence[GLetter]) -> GWord:
    stack: list[GLetter] = []
    for x in letters:
        if stack and stack[-1].var == x.var and stack[-1].exp == -x.exp:
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


def cyclically_reduce(w: GWord) -> GWord:
    w = reduce_gword(w)
    while len(w) >= 2 and w[0].var == w[-1].var and w[0].exp == -w[-1].exp:
        w = w[1:-1]
    return w


def invert_gword(w: GWord) -> GWord:
    return tuple(GLetter(x.var, -x.exp) for x in reversed(w))


def canonical_u_symbol(w: GWord) -> GWord:
    """Least rotation of the cyclic reduction of ``w``; inversion is not identified."""
    if not w:
        return ()
    return gword_from_codes(canonical_u_codes(letter_codes(tuple(w))))


def go_split_codes(codes, m: int) -> tuple[tuple[int, ...], tuple]:
    """``go_split`` on trace-word codes; returns exponents and canonical group-word codes."""
    counts = [0] * m
    for k in codes:
        if k & 1:
            counts[(k >> 1) - 1] += 1
    return tuple(counts), canonical_u_codes(codes)


def go_split(w: TWord, m: int | None = None) -> tuple[tuple[int, ...], GWord]:
    """Split a trace word into its similitude exponent and its group word.

    The exponent counts transposed occurrences of each variable; the group
    word replaces every ``A_i^t`` with ``A_i^-1`` and is then reduced.
    """
    if m is None:
        m = max((x.var for x in w), default=0)
    counts = [0] * m
    letters = []
    for x in w:
        if x.var > m:
            raise ValueError(f"letter A{x.var} outside alphabet of size {m}")
        if x.transposed:
            counts[x.var - 1] += 1
            letters.append(GLetter(x.var, -1))
        else:
            letters.append(GLetter(x.var, 1))
    return tuple(counts), reduce_gword(letters)


def eval_tword(w: TWord, assign: Sequence[Matrix]) -> Matrix:
    """Product of the assigned matrices (or transposes) in word order."""
    if not w:
        raise ValueError("trace words are nonempty")
    dims = {m.shape for m in assign}
    if len(dims) > 1 or any(not m.is_square for m in assign):
        raise DimensionError("assignments must be square matrices of one dimension")
    mats = []
    for x in w:
        if x.var > len(assign):
            raise ValueError(f"no assignment for A{x.var}")
        a = assign[x.var - 1]
        mats.append(a.T if x.transposed else a)
    return reduce(Matrix.__matmul__, mats)


def eval_gword(w: GWord, assign: Sequence[Matrix], inverses: Sequence[Matrix] | None = None) -> Matrix:
    """Evaluate a group word on invertible matrices; the empty word gives ``I``."""
    if not assign:
        raise ValueError("empty assignment")
    n = assign[0].rows
    if inverses is None:
        needed = {x.var for x in w if x.exp < 0}
        inverses = [assign[i].inverse() if (i + 1) in needed else None for i in range(len(assign))]
    out = Matrix.identity(n)
    for x in w:
        out = out @ (assign[x.var - 1] if x.exp > 0 else inverses[x.var - 1])
    return out


def eval_gword_in_group(w: GWord, assign: Sequence[int], grp: FiniteGroup) -> int:
    g = grp.identity
    for x in w:
        if x.var > len(assign):
            raise ValueError(f"no assignment for A{x.var}")
        e = assign[x.var - 1]
        g = grp.mult[g][e if x.exp > 0 else grp.inv[e]]
    return g

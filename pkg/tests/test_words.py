import random
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pseudocharacters.groups import build_cyclic, direct_product
from pseudocharacters.linalg import Matrix, random_rational_matrix, sample_orthogonal
from pseudocharacters.words import (
    GLetter,
    Letter,
    canonical_t_symbol,
    canonical_u_symbol,
    cyclically_reduce,
    eval_gword,
    eval_gword_in_group,
    eval_tword,
    format_word,
    go_split,
    gword,
    invert_gword,
    parse_gword,
    parse_tword,
    reduce_gword,
    tword,
    word_transpose,
)

letters = st.builds(Letter, st.integers(1, 3), st.booleans())
twords = st.lists(letters, min_size=1, max_size=6).map(tuple)


def test_word_transpose_examples():
    assert word_transpose(tword("A1")) == tword("A1'")
    assert word_transpose(tword("A1 A2'")) == tword("A2 A1'")


@given(twords)
def test_word_transpose_is_an_involution(w):
    assert word_transpose(word_transpose(w)) == w


def test_canonical_t_examples():
    assert canonical_t_symbol(tword("A2 A1")) == tword("A1 A2")
    assert canonical_t_symbol(tword("A1'")) == tword("A1")
    assert canonical_t_symbol(tword("A1 A2'")) == canonical_t_symbol(tword("A2 A1'"))


def _orbit(w):
    out = set()
    for v in (w, word_transpose(w)):
        for i in range(len(v)):
            out.add(v[i:] + v[:i])
    return out


def test_canonical_t_is_orbit_minimum_for_short_words():
    alphabet = [Letter(v, t) for v in (1, 2) for t in (False, True)]
    for length in range(1, 6):
        for w in product(alphabet, repeat=length):
            orbit = _orbit(w)
            canon = canonical_t_symbol(w)
            assert canon == min(orbit)
            assert canonical_t_symbol(canon) == canon
            assert all(canonical_t_symbol(v) == canon for v in orbit)


def test_trace_is_invariant_under_canonical_form():
    rng = random.Random(1)
    for _ in range(200):
        w = tuple(Letter(rng.randint(1, 3), rng.random() < 0.5) for _ in range(rng.randint(1, 5)))
        assign = [random_rational_matrix(3, rng) for _ in range(3)]
        assert eval_tword(w, assign).trace() == eval_tword(canonical_t_symbol(w), assign).trace()


def test_go_split_examples():
    assert go_split(tword("A1 A2")) == ((0, 0), gword(1, 2))
    assert go_split(tword("A1'")) == ((1,), gword((1, -1)))
    assert go_split(tword("A1 A1'")) == ((1,), ())


@settings(max_examples=100)
@given(twords, twords)
def test_go_split_respects_concatenation(w, v):
    cw, gw = go_split(w, 3)
    cv, gv = go_split(v, 3)
    cwv, gwv = go_split(w + v, 3)
    assert cwv == tuple(a + b for a, b in zip(cw, cv))
    assert gwv == reduce_gword(gw + gv)


def test_canonical_u_examples():
    assert canonical_u_symbol(gword(2, 1)) == gword(1, 2)
    assert canonical_u_symbol(gword(1, 2, (1, -1))) == gword(2)
    assert canonical_u_symbol(gword((1, -1))) != canonical_u_symbol(gword(1))
    assert canonical_u_symbol(()) == ()


def test_reduction_is_eager():
    assert gword(1, (1, -1), 2) == (GLetter(2, 1),)
    assert cyclically_reduce(parse_gword("A1 A2 A1-")) == parse_gword("A2")
    assert invert_gword(parse_gword("A1 A2-")) == parse_gword("A2 A1-")


def test_text_round_trip():
    assert format_word(parse_tword("A1 A2' A3")) == "A1 A2' A3"
    assert format_word(parse_gword("A1 A2- A3")) == "A1 A2- A3"
    assert format_word(()) == "1"


@pytest.mark.parametrize("bad", ["B1", "A0", "A1-", ""])
def test_parse_tword_rejects(bad):
    with pytest.raises(ValueError):
        parse_tword(bad)


def test_eval_tword_on_orthogonal_matrix():
    q = sample_orthogonal(3, seed=4)
    assert eval_tword(tword("A1 A1'"), [q]) == Matrix.identity(3)
    m = Matrix([[1, 2], [3, 4]])
    assert eval_tword(tword("A1"), [m]) == m


def test_eval_gword_inverts():
    m = Matrix([[2, 1], [1, 1]])
    assert eval_gword(gword(1, 1), [m]) == m @ m
    assert eval_gword(gword((1, -1)), [m]) == m.inverse()
    assert eval_gword((), [m]) == Matrix.identity(2)


def test_eval_gword_in_group():
    z4 = build_cyclic(4)
    assert eval_gword_in_group((), [1], z4) == 0
    assert eval_gword_in_group(gword((1, -1)), [1], z4) == 3
    g = direct_product(z4, z4)
    assert eval_gword_in_group(gword(1, 2), [4, 1], g) == 5

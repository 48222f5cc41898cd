import random
from collections import Counter
from fractions import Fraction
from itertools import product

import pytest

from pseudocharacters.groups import build_cyclic
from pseudocharacters.linalg import Matrix, random_rational_matrix, sample_orthogonal, sample_signed_permutation
from pseudocharacters.relations import (
    BudgetError,
    MissingSimilitudeError,
    RelationPolynomial,
    build_dj_monomials,
    compiled_g,
    compiled_gl,
    cycles_of,
    det_from_traces_relation,
    eval_relation,
    evaluate_on_matrices,
    f_relation,
    f_relation_slow,
    format_polynomial,
    g_relation,
    gl_relation,
    monomial_to_term,
    perms_with_sign,
    tnn_relation_check,
    to_similitude_ring,
    transpose_free_to_u,
    walk_cycles,
)
from pseudocharacters.words import tword


def js(n):
    return range((n + 1) // 2 + 1)


def test_perms_with_sign_small():
    assert list(perms_with_sign(1)) == [((1,), 1, ((1,),))]
    assert sum(s for _, s, _ in perms_with_sign(3)) == 0


def test_cycle_type_census_m4():
    census = Counter(tuple(sorted((len(c) for c in cyc), reverse=True)) for _, _, cyc in perms_with_sign(4))
    assert census == {(1, 1, 1, 1): 1, (2, 1, 1): 6, (2, 2): 3, (3, 1): 8, (4,): 6}


def test_budget_ceiling():
    with pytest.raises(BudgetError):
        next(perms_with_sign(10))
    with pytest.raises(BudgetError):
        gl_relation(9)


def test_cycles_of():
    assert cycles_of((2, 1, 3)) == ((1, 2), (3,))


def test_gl_relation_n1_text():
    assert format_polynomial(gl_relation(1)) == "U[A1]·U[A2] − U[A1 A2]"


def test_gl_relation_n2_text():
    assert format_polynomial(gl_relation(2)) == (
        "U[A1]·U[A2]·U[A3] − U[A1]·U[A2 A3] − U[A1 A2]·U[A3] + U[A1 A2 A3] − U[A1 A3]·U[A2] + U[A1 A3 A2]"
    )


def test_gl_relation_vanishes_by_cayley_hamilton():
    rng = random.Random(0)
    p = gl_relation(2)
    assert len(p) == 6
    for _ in range(100):
        assert evaluate_on_matrices(p, [random_rational_matrix(2, rng) for _ in range(3)]) == 0


def test_gl_relation_detects_wrong_dimension():
    d = Matrix.diag([1, 2])
    assert evaluate_on_matrices(gl_relation(1), [d, d]) != 0


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_term_counts(n):
    # distinct letters in every cycle word: nothing collects
    import math

    assert len(gl_relation(n)) == math.factorial(n + 1)
    for j in js(n):
        assert len(f_relation(n, j)) == math.factorial(n + 1)
        assert len(g_relation(n, j)) == math.factorial(n + 1)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_dj_monomials_use_every_symbol_once(n):
    for j in js(n):
        count = 0
        for _, pairs in build_dj_monomials(n, j):
            syms = [s for pair in pairs for s in pair]
            assert sorted(syms) == sorted((a, c) for a in range(1, n + 2) for c in "uv")
            if j == 0:
                assert all({a[1], b[1]} == {"u", "v"} for a, b in pairs)
            count += 1
        assert count == __import__("math").factorial(n + 1)


def test_dj_j_out_of_range():
    with pytest.raises(ValueError):
        f_relation(2, 2)
    with pytest.raises(ValueError):
        list(build_dj_monomials(1, -1))


def test_fixed_point_pair_gives_singleton():
    assert walk_cycles((((1, "u"), (1, "v")),)) == [[(1, True)]]
    assert monomial_to_term((((1, "u"), (1, "v")),)) == (tword("A1"),)


def test_cycle_walk_direction_is_irrelevant():
    from pseudocharacters.relations import _default_slots, _cycle_word
    from pseudocharacters.words import canonical_t_symbol

    for n in (1, 2, 3):
        slots = _default_slots(n + 1)
        for j in js(n):
            for _, pairs in build_dj_monomials(n, j):
                base = monomial_to_term(pairs)
                for start in "uv":
                    for rev in (False, True):
                        cyc = walk_cycles(pairs, start, rev)
                        got = tuple(sorted(canonical_t_symbol(_cycle_word(c, slots)) for c in cyc))
                        assert got == base


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_fast_and_reference_builds_agree(n):
    for j in js(n):
        assert f_relation(n, j) == f_relation_slow(n, j)
        assert g_relation(n, j) == to_similitude_ring(f_relation_slow(n, j))


def test_collected_equals_uncollected_sum():
    rng = random.Random(4)
    for n in (1, 2, 3):
        for j in js(n):
            mats = [random_rational_matrix(n, rng) for _ in range(n + 1)]
            raw = Fraction(0)
            for sign, pairs in build_dj_monomials(n, j):
                term = Fraction(sign)
                for w in monomial_to_term(pairs):
                    from pseudocharacters.words import eval_tword

                    term *= eval_tword(w, mats).trace()
                raw += term
            assert evaluate_on_matrices(f_relation(n, j), mats) == raw


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_f0_reduces_to_gl(n):
    assert transpose_free_to_u(f_relation(n, 0)) == gl_relation(n)


def test_f_relation_vanishes_on_orthogonal_triples():
    for j in js(2):
        p = f_relation(2, j)
        for seed in range(30):
            mats = [sample_orthogonal(2, seed=100 * seed + k) for k in range(3)]
            assert evaluate_on_matrices(p, mats) == 0


def test_orthogonal_relations_are_trace_identities_on_all_matrices():
    # transposes are kept symbolic, so the relations hold on every n x n matrix
    rng = random.Random(8)
    for n in (1, 2, 3):
        for j in js(n):
            mats = [random_rational_matrix(n, rng) for _ in range(n + 1)]
            assert evaluate_on_matrices(f_relation(n, j), mats) == 0


def test_similitude_form_detects_non_similitudes():
    # with A^t replaced by l A^-1 the relation does constrain the matrices
    rng = random.Random(8)
    p = g_relation(2, 1)
    values = []
    for _ in range(10):
        mats = [random_rational_matrix(2, rng) for _ in range(3)]
        if all(m.det() for m in mats):
            values.append(evaluate_on_matrices(p, mats, [1, 1, 1]))
    assert any(values)


def test_g_relation_vanishes_on_similitudes():
    p = g_relation(2, 1)
    assert p.has_similitude()
    for seed in range(30):
        qs = [sample_orthogonal(2, seed=7 * seed + k) for k in range(3)]
        cs = [Fraction(seed % 3 + 1), Fraction(-1, 2), Fraction(3)]
        mats = [q * c for q, c in zip(qs, cs)]
        assert evaluate_on_matrices(p, mats, [c * c for c in cs]) == 0


def test_g_relation_with_unit_similitude_matches_f():
    for j in js(3):
        for seed in range(5):
            mats = [sample_signed_permutation(3, seed=seed * 4 + k) for k in range(4)]
            f = evaluate_on_matrices(f_relation(3, j), mats)
            g = evaluate_on_matrices(g_relation(3, j), mats, [1] * 4)
            assert f == g == 0


def test_g0_with_trivial_similitude_is_gl():
    rng = random.Random(2)
    mats = [random_rational_matrix(2, rng) for _ in range(3)]
    assert evaluate_on_matrices(g_relation(2, 0), mats, [1, 1, 1]) == evaluate_on_matrices(gl_relation(2), mats)


def test_missing_similitude():
    mats = [sample_orthogonal(2, seed=k) for k in range(3)]
    with pytest.raises(MissingSimilitudeError):
        evaluate_on_matrices(g_relation(2, 1), mats)
    with pytest.raises(MissingSimilitudeError):
        eval_relation(g_relation(2, 1), [1] * 4, None, (0, 0, 0), build_cyclic(4))


def test_custom_slot_words():
    slots = [tword("A1 A2"), tword("A2"), tword("A1")]
    p = f_relation(2, 1, slots)
    assert p == f_relation_slow(2, 1, slots)
    rng = random.Random(6)
    for seed in range(5):
        q = [sample_orthogonal(2, seed=seed * 2 + k) for k in range(2)]
        assert evaluate_on_matrices(p, q) == 0


def test_identity_slot_kills_gl_relation():
    # the relation is multilinear with an alternating sum, so a slot equal to I vanishes
    rng = random.Random(1)
    mats = [Matrix.identity(2)] + [random_rational_matrix(2, rng) for _ in range(2)]
    assert evaluate_on_matrices(gl_relation(2), mats) == 0


def test_tnn_check():
    rng = random.Random(3)
    m, p = random_rational_matrix(3, rng), random_rational_matrix(3, rng)
    n = sample_orthogonal(3, seed=1) * 2
    words = (tword("A1"), tword("A2"), tword("A3"))
    assert tnn_relation_check(words, [m, n, p]) == 0
    assert tnn_relation_check(words, [m, random_rational_matrix(3, rng), p]) != 0
    eye = Matrix.identity(3)
    assert tnn_relation_check(words, [m, eye, p], normalized=False) == (m @ p).trace() * (1 - 3)


def test_det_from_traces():
    f = det_from_traces_relation(2)
    assert f([3, 5]) == Fraction(3 * 3 - 5, 2)
    rng = random.Random(0)
    g = det_from_traces_relation(5)
    for _ in range(50):
        b = random_rational_matrix(5, rng)
        assert g([(b**k).trace() for k in range(1, 6)]) == b.det()
    q = sample_orthogonal(3, special=True, seed=2)
    assert det_from_traces_relation(3)([(q**k).trace() for k in (1, 2, 3)]) == 1


def test_compiled_matches_reference_evaluation():
    grp = build_cyclic(4)
    T = [Fraction(x) for x in (2, 0, -2, 0)]
    l = [Fraction(1)] * 4
    tuples = list(product(range(4), repeat=3))
    for p, c in ((gl_relation(2), compiled_gl(2)), (g_relation(2, 1), compiled_g(2, 1))):
        got = c.evaluate(T, l, grp, tuples)
        want = [eval_relation(p, T, l, t, grp) for t in tuples]
        assert list(got) == want
    bad = [Fraction(x) for x in (2, 1, -2, 0)]
    assert any(compiled_gl(1).evaluate(bad, None, grp, list(product(range(4), repeat=2))))


def test_polynomials_are_sorted_and_stable():
    p = f_relation(3, 1)
    keys = list(p.terms)
    assert keys == sorted(keys)
    assert format_polynomial(p) == format_polynomial(f_relation_slow(3, 1))
    assert format_polynomial(RelationPolynomial("S", 1, 1, {})) == "0"

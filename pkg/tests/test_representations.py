from fractions import Fraction

import pytest

from pseudocharacters.conjugacy import ROTATION, build_rho_2n, reflection
from pseudocharacters.groups import build_cyclic, direct_product, generator_words
from pseudocharacters.linalg import Matrix, direct_sum, omega
from pseudocharacters.representations import (
    GroupTooLargeError,
    NotAHomomorphismError,
    Representation,
    classify,
    conjugate_rep,
    direct_sum_rep,
    from_generator_assignment,
    from_matrix_generators,
    similitude_lambda,
    trace_function,
    trivial_rep,
)

I2 = Matrix.identity(2)


def test_closure_of_identity_is_trivial():
    rep = from_matrix_generators([I2])
    assert rep.group.order == 1 and rep.dim == 2


def test_closure_of_rotation_is_cyclic_four():
    rep = from_matrix_generators([ROTATION])
    assert rep.group.order == 4
    assert sorted(rep.group.elem_orders) == [1, 2, 4, 4]


def test_closure_of_rho6_generators(rho6):
    rep = from_matrix_generators([rho6.images[4], rho6.images[1]])
    assert rep.group.order == 16
    assert sorted(rep.group.elem_orders) == sorted(rho6.group.elem_orders)
    assert set(rep.images) == set(rho6.images)


def test_closure_too_large():
    with pytest.raises(GroupTooLargeError):
        from_matrix_generators([Matrix([[1, 1], [0, 1]])], max_order=50)


def test_rho6_images(rho6):
    a = ROTATION
    assert rho6.images[4] == direct_sum(a, a, I2)
    assert rho6.images[1] == direct_sum(I2, a, a)
    rho6.check_homomorphism()


def test_trivial_assignment():
    grp = build_cyclic(3)
    rep = from_generator_assignment(grp, [1], [I2], generator_words(grp, [1]))
    assert rep == trivial_rep(grp, 2)


def test_non_homomorphism_names_a_pair():
    grp = build_cyclic(4)
    with pytest.raises(NotAHomomorphismError, match="rho"):
        from_generator_assignment(grp, [1], [Matrix([[1, 1], [0, 1]])], generator_words(grp, [1]))


def test_order_two_image_of_order_four_generator_is_fine():
    grp = build_cyclic(4)
    rep = from_generator_assignment(grp, [1], [Matrix.diag([1, -1])], generator_words(grp, [1]))
    assert rep.images[2] == I2


def test_classify(rho6):
    assert classify(rho6).family == "SO"
    assert classify(from_matrix_generators([omega(4)])).family in ("SO", "Sp")
    assert "Sp" in classify(from_matrix_generators([omega(4)]))
    shear = from_matrix_generators([Matrix([[1, -1], [1, 0]])])
    assert classify(shear).family == "Sp"
    assert classify(from_matrix_generators([Matrix.diag([1, -1])])).family == "O"


def test_similitude_character_is_multiplicative():
    rep = from_matrix_generators([Matrix.diag([1, -1])])
    lam = similitude_lambda(rep, "GSp")
    assert sorted(lam) == [-1, 1]
    grp = rep.group
    for a in range(grp.order):
        for b in range(grp.order):
            assert lam[grp.mult[a][b]] == lam[a] * lam[b]
    assert similitude_lambda(from_matrix_generators([Matrix([[1, -1], [1, 0]])]), "GO") is None


def test_trace_function_of_trivial_rep():
    d = trace_function(trivial_rep(build_cyclic(5), 3))
    assert d.T == (3,) * 5


def test_trace_function_rejects_wrong_family():
    with pytest.raises(ValueError):
        trace_function(from_matrix_generators([Matrix([[1, -1], [1, 0]])]), "O")


def test_conjugation(rho6):
    assert conjugate_rep(rho6, Matrix.identity(6)) == rho6
    x = reflection(6)
    prime = conjugate_rep(rho6, x)
    assert prime != rho6
    assert prime.traces == rho6.traces
    assert conjugate_rep(prime, x.inverse()) == rho6


def test_conjugation_by_singular_matrix(rho6):
    with pytest.raises(ValueError):
        conjugate_rep(rho6, Matrix.zeros(6))


def test_direct_sum():
    a = from_matrix_generators([ROTATION])
    s = direct_sum_rep([a, trivial_rep(a.group, 1)])
    assert s.dim == 3
    assert s.traces == tuple(t + 1 for t in a.traces)
    with pytest.raises(ValueError):
        direct_sum_rep([a, trivial_rep(build_cyclic(2), 1)])


def test_identity_must_map_to_identity():
    grp = build_cyclic(2)
    with pytest.raises(NotAHomomorphismError):
        Representation(grp, (Matrix.diag([1, -1]), I2))


def test_pl_on_rho6(rho6):
    assert rho6.pl((4, 1, 1)) == 16
    assert rho6.pl_values([(4, 1, 1), (0, 0, 0)]) == [16, 0]

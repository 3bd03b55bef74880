import gc
import weakref

from euclid_engine.algebra_core import (
    Algebra,
    etale_from_poly,
    from_structure_constants,
    is_commutative_at,
    is_separable,
    matrix_algebra,
    random_etale,
    split_algebra,
)
from euclid_engine.errors import AlgebraValidationError, NotInvertibleError
from euclid_engine.exact_linalg import Matrix, PrimeField, rank
from euclid_engine.rng_streams import derive_rng

F7 = PrimeField(7, toy=True)
F101 = PrimeField(101, toy=True)

# e0 is the unit, e1·e1 = e2, e1·e2 = 0, e2·e1 = e1: (e1·e1)·e1 != e1·(e1·e1)
NON_ASSOCIATIVE = [
    [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
    [[0, 1, 0], [0, 0, 1], [0, 0, 0]],
    [[0, 0, 1], [0, 1, 0], [0, 0, 0]],
]


def _t_squared_minus_three():
    return etale_from_poly([-3, 0], F7)


def test_one_dimensional_field():
    algebra = from_structure_constants(F7, [[[1]]], [1])
    assert algebra.n == 1
    assert algebra.mul((3,), (5,)) == (1,)


def test_split_algebra_accepted():
    algebra = split_algebra(2, F7)
    assert algebra.mul((1, 0), (1, 0)) == (1, 0)
    assert algebra.mul((1, 0), (0, 1)) == (0, 0)


def test_bad_unit_rejected():
    # F_7[t]/(t²-1) with the unit placed on e1
    c = [[[1, 0], [0, 1]], [[0, 1], [1, 0]]]
    try:
        from_structure_constants(F7, c, [0, 1])
    except AlgebraValidationError as exc:
        assert exc.reason == "bad unit"
    else:
        raise AssertionError("wrong unit accepted")


def test_non_associative_table_reports_triple():
    try:
        from_structure_constants(F7, NON_ASSOCIATIVE, [1, 0, 0])
    except AlgebraValidationError as exc:
        assert exc.reason == "not associative"
        assert exc.witness[:2] == (1, 1)
    else:
        raise AssertionError("non-associative table accepted")


def test_separability():
    assert is_separable([-3, 0], F7)
    assert not is_separable([0, 0], F7)
    try:
        etale_from_poly([0, 0], F7)
    except AlgebraValidationError as exc:
        assert exc.reason == "not separable"
        assert exc.witness == (1, 0)
    else:
        raise AssertionError("t² accepted as separable")


def test_cubic_reduction_mod_101():
    algebra = etale_from_poly([-2, 0, 0], F101)
    t = algebra.generator()
    assert algebra.mul(t, t) == (0, 0, 1)
    assert algebra.mul(t, (0, 0, 1)) == (2, 0, 0)


def test_multiplication_examples():
    algebra = _t_squared_minus_three()
    t = (0, 1)
    assert algebra.mul(algebra.unit, (4, 2)) == (4, 2)
    assert algebra.mul(t, t) == (3, 0)
    assert algebra.mul((1, 1), (1, 6)) == (5, 0)


def test_left_multiplication_matrix():
    algebra = _t_squared_minus_three()
    assert algebra.left_mul_matrix(algebra.unit) == Matrix.identity(F7, 2)
    assert algebra.left_mul_matrix((0, 1)).to_rows() == [[0, 3], [1, 0]]
    assert algebra.dual_module_action_matrix((0, 1)).to_rows() == [[0, 1], [3, 0]]
    assert algebra.dual_module_action_matrix(algebra.unit) == Matrix.identity(F7, 2)
    assert algebra.gl1_dual_action_matrix(algebra.unit) == Matrix.identity(F7, 2)


def test_inverse():
    algebra = _t_squared_minus_three()
    assert algebra.invert(algebra.unit) == algebra.unit
    assert algebra.invert((0, 1)) == (0, 5)
    split = split_algebra(2, F7)
    assert split.invert((0, 1)) is None
    try:
        split.gl1_dual_action_matrix((0, 1))
    except NotInvertibleError:
        pass
    else:
        raise AssertionError("zero divisor treated as invertible")


def test_random_invertible_succeeds():
    field = PrimeField()
    rng = derive_rng(1)
    algebra = random_etale(3, field, rng)
    for _ in range(100):
        a = algebra.random_invertible(rng)
        assert algebra.mul(a, algebra.invert(a)) == algebra.unit
    line = from_structure_constants(field, [[[1]]], [1])
    assert line.random_invertible(rng)[0] != 0


def test_commutative_and_json():
    rng = derive_rng(2)
    algebra = random_etale(4, PrimeField(), rng)
    assert is_commutative_at(algebra, [algebra.random_element(rng) for _ in range(5)])
    again = Algebra.from_json(algebra.to_json())
    assert again.structure_constants() == algebra.structure_constants()

    table = split_algebra(3, F7)
    loaded = Algebra.from_json(table.to_json(), toy=True)
    assert loaded.monogenic is None
    assert loaded.unit == (1, 1, 1)


def _algebras():
    rng = derive_rng(30)
    return [matrix_algebra(2, PrimeField()), random_etale(4, PrimeField(), rng)]


def test_matrix_algebra_is_not_commutative():
    m2 = matrix_algebra(2, F7)
    e12, e21 = (0, 1, 0, 0), (0, 0, 1, 0)
    assert m2.unit == (1, 0, 0, 1)
    assert m2.mul(e12, e21) == (1, 0, 0, 0)
    assert m2.mul(e21, e12) == (0, 0, 0, 1)
    assert not is_commutative_at(m2, [e12])
    assert m2.left_mul_matrix(e12) != m2.right_mul_matrix(e12)


def test_dual_module_action_is_a_left_module_law():
    for algebra in _algebras():
        rng = derive_rng(31, algebra.n)
        for _ in range(20):
            a, b = algebra.random_element(rng), algebra.random_element(rng)
            M = algebra.dual_module_action_matrix
            assert M(algebra.mul(a, b)) == M(a) @ M(b)


def test_gl1_dual_action_is_a_group_law():
    for algebra in _algebras():
        rng = derive_rng(32, algebra.n)
        for _ in range(20):
            a, b = algebra.random_invertible(rng), algebra.random_invertible(rng)
            G = algebra.gl1_dual_action_matrix
            assert G(algebra.mul(a, b)) == G(a) @ G(b)
            assert G(a) @ G(algebra.invert(a)) == Matrix.identity(algebra.field, algebra.n)


def test_dual_actions_commute():
    # (u·(a·φ))(z) = φ(a⁻¹·z·u) = (a·(u·φ))(z)
    for algebra in _algebras():
        rng = derive_rng(33, algebra.n)
        for _ in range(20):
            u, a = algebra.random_element(rng), algebra.random_invertible(rng)
            D, G = algebra.dual_module_action_matrix(u), algebra.gl1_dual_action_matrix(a)
            assert D @ G == G @ D


def test_invertible_exactly_when_left_multiplication_has_full_rank():
    m2 = matrix_algebra(2, PrimeField())
    singular = [(1, 0, 0, 0), (1, 1, 1, 1), (0, 1, 0, 0), (0, 0, 0, 0)]
    rng = derive_rng(34)
    samples = singular + [m2.random_element(rng) for _ in range(20)]
    for a in samples:
        assert (m2.invert(a) is not None) == (rank(m2.left_mul_matrix(a)) == m2.n)
    for a in singular:
        assert m2.invert(a) is None
    split = split_algebra(3, F7)
    for a in [(1, 0, 1), (2, 3, 4), (0, 0, 0)]:
        assert (split.invert(a) is not None) == (rank(split.left_mul_matrix(a)) == 3)


def test_action_matrices_do_not_keep_the_algebra_alive():
    algebra = random_etale(3, PrimeField(), derive_rng(35))
    first = algebra.left_mul_matrix((1, 2, 3))
    assert algebra.left_mul_matrix((1, 2, 3)) is first
    assert algebra.right_mul_matrix((1, 2, 3)) == first
    ref = weakref.ref(algebra)
    del algebra
    gc.collect()
    assert ref() is None

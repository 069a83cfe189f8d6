import itertools
import json
import math

import numpy as np
import pytest

from tensorconc import (
    InvalidInputError,
    ResourceLimitError,
    Tensor,
    TensorSeries,
    apply_form,
    contract,
    frobenius,
    hadamard,
    inner,
    is_diagonal_free,
    is_symmetric,
    outer,
    star,
    sym_embed,
    symmetrize,
    vector_piece,
)

I2 = Tensor.from_array(np.eye(2))


def random_tensor(rng, d, r):
    return Tensor.from_array(rng.standard_normal((d,) * r))


def test_constructor_rejects_bad_entry_count():
    with pytest.raises(InvalidInputError):
        Tensor.from_entries(order=2, dim=2, entries=[1.0, 2.0, 3.0])


def test_constructor_rejects_nonfinite():
    with pytest.raises(InvalidInputError):
        Tensor.from_entries(order=1, dim=2, entries=[1.0, float("nan")])


def test_constructor_guard():
    with pytest.raises(ResourceLimitError):
        Tensor(order=9, dim=100, array=np.zeros(1))


def test_entries_row_major():
    t = Tensor.from_entries(order=2, dim=2, entries=[1.0, 2.0, 3.0, 4.0])
    assert t.array[0, 1] == 2.0 and t.array[1, 0] == 3.0


def test_inner_identity():
    assert inner(I2, I2) == 2.0


def test_inner_is_squared_frobenius():
    rng = np.random.default_rng(1)
    t = random_tensor(rng, 3, 3)
    assert inner(t, t) == pytest.approx(frobenius(t) ** 2, rel=1e-12)


def test_inner_shape_mismatch():
    with pytest.raises(InvalidInputError):
        inner(I2, Tensor.from_array(np.eye(3)))


def test_frobenius_trivial():
    assert frobenius(Tensor.from_array(np.zeros((2, 2)))) == 0.0
    assert frobenius(Tensor.from_entries(0, 1, [-3.0])) == 3.0
    assert frobenius(I2) == pytest.approx(math.sqrt(2.0))


def test_hadamard():
    rng = np.random.default_rng(2)
    t = random_tensor(rng, 2, 2)
    ones = Tensor.from_array(np.ones((2, 2)))
    zeros = Tensor.from_array(np.zeros((2, 2)))
    assert np.array_equal(hadamard(t, ones).array, t.array)
    assert np.array_equal(hadamard(t, zeros).array, zeros.array)


def test_contract_matrix_vector():
    e1 = np.array([1.0, 0.0])
    out = contract(I2, e1, 1)
    assert out.order == 1
    assert np.allclose(out.array, e1)


def test_contract_zero_is_identity():
    rng = np.random.default_rng(3)
    t = random_tensor(rng, 2, 3)
    assert np.array_equal(contract(t, np.zeros(2), 0).array, t.array)


def test_contract_rank1_derived():
    # contract(v x v x v, v, 2) = ||v||_2^4 v, by direct expansion:
    # sum_{j,k} v_i v_j v_k v_j v_k = v_i (sum_j v_j^2)(sum_k v_k^2)
    rng = np.random.default_rng(4)
    v = rng.standard_normal(4)
    t = outer([v, v, v])
    out = contract(t, v, 2)
    expected = (v @ v) ** 2 * v
    assert np.allclose(out.array, expected, rtol=1e-12)


def test_contract_validation():
    with pytest.raises(InvalidInputError):
        contract(I2, np.zeros(3), 1)
    with pytest.raises(InvalidInputError):
        contract(I2, np.zeros(2), 3)


def test_star_matrix_product():
    rng = np.random.default_rng(5)
    a = random_tensor(rng, 3, 2)
    b = random_tensor(rng, 3, 2)
    assert np.allclose(star(a, b, 1).array, a.array @ b.array, rtol=1e-12)


def test_star_full_contraction_is_inner():
    rng = np.random.default_rng(6)
    a = random_tensor(rng, 2, 3)
    b = random_tensor(rng, 2, 3)
    assert star(a, b, 3).item() == pytest.approx(inner(a, b), rel=1e-12)


def test_star_zero_outer():
    rng = np.random.default_rng(7)
    a = random_tensor(rng, 2, 2)
    b = random_tensor(rng, 2, 2)
    out = star(a, b, 0)
    assert out.order == 4
    for i, j, k, l in itertools.product(range(2), repeat=4):
        assert out.array[i, j, k, l] == a.array[i, j] * b.array[k, l]


def test_star_definition_against_loops():
    # independent oracle: the raw index-sum definition
    rng = np.random.default_rng(8)
    d, r, q = 2, 3, 2
    a = random_tensor(rng, d, r)
    b = random_tensor(rng, d, r)
    out = star(a, b, q)
    for idx in itertools.product(range(d), repeat=2 * r - 2 * q):
        left, right = idx[: r - q], idx[r - q :]
        expected = sum(
            a.array[left + js] * b.array[js + right]
            for js in itertools.product(range(d), repeat=q)
        )
        assert out.array[idx] == pytest.approx(expected, rel=1e-12)


def test_star_bilinearity():
    rng = np.random.default_rng(9)
    a = random_tensor(rng, 2, 2)
    b = random_tensor(rng, 2, 2)
    c = random_tensor(rng, 2, 2)
    alpha, beta = 0.7, -1.3
    combo = Tensor.from_array(alpha * a.array + beta * b.array)
    lhs = star(combo, c, 1).array
    rhs = alpha * star(a, c, 1).array + beta * star(b, c, 1).array
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


def test_star_hilbert_schmidt():
    rng = np.random.default_rng(10)
    a = random_tensor(rng, 4, 2)
    b = random_tensor(rng, 4, 2)
    assert star(a, b, 2).item() == pytest.approx(float(np.sum(a.array * b.array)), rel=1e-12)


def test_symmetrize_fixed_point_and_idempotent():
    rng = np.random.default_rng(11)
    t = random_tensor(rng, 2, 3)
    s = symmetrize(t)
    assert is_symmetric(s, tol=1e-12 * np.max(np.abs(s.array)))
    again = symmetrize(s)
    assert np.allclose(s.array, again.array, rtol=1e-12, atol=1e-15)


def test_symmetrize_matrix():
    rng = np.random.default_rng(12)
    t = random_tensor(rng, 3, 2)
    assert np.allclose(symmetrize(t).array, (t.array + t.array.T) / 2)


def test_symmetrize_two_permutation_average():
    e1xe2 = np.zeros((2, 2))
    e1xe2[0, 1] = 1.0
    s = symmetrize(Tensor.from_array(e1xe2))
    assert s.array[0, 1] == 0.5 and s.array[1, 0] == 0.5
    assert s.array[0, 0] == 0.0 and s.array[1, 1] == 0.0


def test_is_symmetric_examples():
    assert is_symmetric(I2, tol=0.0)
    e1xe2 = np.zeros((2, 2))
    e1xe2[0, 1] = 1.0
    assert not is_symmetric(Tensor.from_array(e1xe2), tol=0.0)


def test_is_diagonal_free():
    assert not is_diagonal_free(I2)
    off = Tensor.from_array(np.array([[0.0, 1.0], [2.0, 0.0]]))
    assert is_diagonal_free(off)


def test_sym_embed_block_structure_r2():
    rng = np.random.default_rng(13)
    a = random_tensor(rng, 3, 2)
    e = sym_embed(a)
    assert e.dim == 6 and e.order == 2
    arr = e.array
    assert np.array_equal(arr[:3, 3:], a.array)
    assert np.array_equal(arr[3:, :3], a.array.T)
    assert not arr[:3, :3].any() and not arr[3:, 3:].any()


def test_sym_embed_1x1():
    t = Tensor.from_entries(2, 1, [[3.0]])
    e = sym_embed(t)
    assert np.array_equal(e.array, np.array([[0.0, 3.0], [3.0, 0.0]]))


def test_sym_embed_symmetric_and_diagonal_free():
    rng = np.random.default_rng(14)
    for r in (2, 3):
        t = random_tensor(rng, 2, r)
        e = sym_embed(t)
        assert is_symmetric(e, tol=0.0)
        assert is_diagonal_free(e)


def test_sym_embed_defining_identity():
    # independent oracle: evaluate the permutation sum directly
    rng = np.random.default_rng(15)
    for r, d in ((2, 3), (3, 2)):
        t = random_tensor(rng, d, r)
        e = sym_embed(t)
        for _ in range(5):
            vs = [rng.standard_normal(r * d) for _ in range(r)]
            lhs = apply_form(e, vs)
            rhs = sum(
                apply_form(t, [vector_piece(vs[tau[q]], q + 1, d) for q in range(r)])
                for tau in itertools.permutations(range(r))
            )
            assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)


def test_sym_embed_linearity():
    rng = np.random.default_rng(16)
    a = random_tensor(rng, 2, 3)
    b = random_tensor(rng, 2, 3)
    combo = Tensor.from_array(1.5 * a.array - 0.5 * b.array)
    lhs = sym_embed(combo).array
    rhs = 1.5 * sym_embed(a).array - 0.5 * sym_embed(b).array
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-15)


def test_vector_piece():
    v = np.array([1.0, 2.0, 3.0, 4.0])
    assert np.array_equal(vector_piece(v, 1, 2), [1.0, 2.0])
    assert np.array_equal(vector_piece(v, 2, 2), [3.0, 4.0])
    with pytest.raises(InvalidInputError):
        vector_piece(v, 3, 2)


def test_vector_piece_norm_never_larger():
    rng = np.random.default_rng(17)
    from tensorconc import lp_norm

    for _ in range(20):
        v = rng.standard_normal(6)
        for p in (1.0, 2.0, 3.0):
            for q in (1, 2, 3):
                assert lp_norm(vector_piece(v, q, 2), p) <= lp_norm(v, p) + 1e-15


def test_tensor_json_round_trip():
    rng = np.random.default_rng(18)
    t = random_tensor(rng, 3, 2)
    text = json.dumps(t.to_json_dict())
    back = Tensor.from_json_dict(json.loads(text))
    assert back.order == t.order and back.dim == t.dim
    assert np.array_equal(back.array, t.array)


def test_series_json_round_trip():
    rng = np.random.default_rng(19)
    series = TensorSeries(terms=tuple(random_tensor(rng, 2, 2) for _ in range(3)))
    text = json.dumps(series.to_json_list())
    back = TensorSeries.from_json_list(json.loads(text))
    assert len(back) == 3
    for a, b in zip(series, back):
        assert np.array_equal(a.array, b.array)


def test_series_shape_validation():
    with pytest.raises(InvalidInputError):
        TensorSeries(terms=(I2, Tensor.from_array(np.eye(3))))
    with pytest.raises(InvalidInputError):
        TensorSeries(terms=())


def test_tensor_immutability():
    t = Tensor.from_array(np.eye(2))
    with pytest.raises(ValueError):
        t.array[0, 0] = 5.0

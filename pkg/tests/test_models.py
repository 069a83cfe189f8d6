import itertools
import math

import numpy as np
import pytest

from tensorconc import (
    Hypergraph,
    InvalidInputError,
    MatchingFamily,
    ModelSpec,
    SolverConfig,
    Tensor,
    adjacency_tensor,
    apply_form,
    complete_hypergraph,
    delta_j,
    delta_vector,
    frobenius,
    iid_star_sum,
    iid_symmetric,
    injective_norm,
    is_symmetric,
    lower_bound_series,
    lower_bound_witness,
    lp_norm,
    matching_series,
    nonhomogeneous,
    pca_observation,
    rank1_series,
    star_sum,
    type2_variance,
)
from tensorconc.seeds import generator
from tensorconc.tensor import TensorSeries, series_weighted_sum

CFG = SolverConfig(seed=5)


def test_iid_symmetric_is_exactly_symmetric():
    rng = generator(1)
    t = iid_symmetric(4, 3, rng)
    assert is_symmetric(t, tol=0.0)


def test_iid_symmetric_frobenius_moment():
    # E ||T||_F^2 = d^r by orbit counting
    rng = generator(2)
    d, r, n = 3, 2, 400
    sq = np.array([frobenius(iid_symmetric(d, r, rng)) ** 2 for _ in range(n)])
    se = sq.std(ddof=1) / math.sqrt(n)
    assert abs(sq.mean() - d**r) <= 3 * se


def test_nonhomogeneous_zero_variances():
    rng = generator(3)
    z = Tensor.from_array(np.zeros((3, 3)))
    assert not nonhomogeneous(z, rng).array.any()


def test_nonhomogeneous_entry_variance():
    rng = generator(4)
    a = Tensor.from_array(np.ones((3, 3)))
    n = 10**4
    draws = np.stack([nonhomogeneous(a, rng).array for _ in range(n)])
    var = draws.var(axis=0, ddof=1)
    se = math.sqrt(2.0 / n)  # stderr of a unit-Gaussian sample variance
    assert np.all(np.abs(var - 1.0) <= 5 * se)


def test_nonhomogeneous_rejects_negative_or_asymmetric():
    rng = generator(5)
    with pytest.raises(InvalidInputError):
        nonhomogeneous(Tensor.from_array(np.array([[1.0, -0.5], [-0.5, 1.0]]) * -1), rng)
    with pytest.raises(InvalidInputError):
        nonhomogeneous(Tensor.from_array(np.array([[1.0, 2.0], [0.0, 1.0]])), rng)


def test_adjacency_complete_graph():
    k3 = complete_hypergraph(3, 2)
    adj = adjacency_tensor(k3)
    assert np.array_equal(adj.array, np.ones((3, 3)) - np.eye(3))


def test_adjacency_single_triangle_edge():
    h = Hypergraph(d=3, r=3, edges=((1, 2, 3),))
    adj = adjacency_tensor(h)
    assert adj.array.sum() == 6.0
    assert adj.array[0, 1, 2] == 1.0 and adj.array[2, 1, 0] == 1.0
    assert adj.array[0, 0, 1] == 0.0


def test_adjacency_entry_count():
    h = Hypergraph(d=5, r=3, edges=((1, 2, 3), (2, 4, 5)))
    assert adjacency_tensor(h).array.sum() == math.factorial(3) * len(h.edges)


def test_delta_complete_examples():
    # complete r-uniform hypergraph: delta_j = C(d - j, r - j)
    for d, r in ((4, 2), (6, 3)):
        h = complete_hypergraph(d, r)
        for j in range(r + 1):
            assert delta_j(h, j) == math.comb(d - j, r - j)
    k4 = complete_hypergraph(4, 2)
    assert delta_vector(k4) == [6, 3, 1]


def test_delta_single_edge():
    h = Hypergraph(d=6, r=3, edges=((2, 4, 6),))
    assert all(delta_j(h, j) == 1 for j in range(4))


def brute_force_delta(h, j):
    if j == 0:
        return len(h.edges)
    best = 0
    for sub in itertools.combinations(range(1, h.d + 1), j):
        count = sum(1 for e in h.edges if set(sub) <= set(e))
        best = max(best, count)
    return best


def test_delta_matches_brute_force():
    rng = generator(6)
    for _ in range(20):
        d = int(rng.integers(3, 9))
        r = int(rng.integers(2, min(d, 4)))
        all_edges = list(itertools.combinations(range(1, d + 1), r))
        k = int(rng.integers(1, min(len(all_edges), 10) + 1))
        pick = rng.choice(len(all_edges), size=k, replace=False)
        h = Hypergraph(d=d, r=r, edges=tuple(all_edges[i] for i in pick))
        for j in range(r + 1):
            assert delta_j(h, j) == brute_force_delta(h, j)


def test_hypergraph_validation():
    with pytest.raises(InvalidInputError):
        Hypergraph(d=3, r=2, edges=((1, 1),))
    with pytest.raises(InvalidInputError):
        Hypergraph(d=3, r=2, edges=((1, 2), (2, 1)))
    with pytest.raises(InvalidInputError):
        Hypergraph(d=3, r=2, edges=((1, 4),))


def test_matching_series_statistics():
    family = MatchingFamily(d=4, matchings=(((1, 2),), ((1, 3), (2, 4))))
    series, mu, degree = matching_series(family)
    assert np.array_equal(mu, [1.0, 2.0])
    assert np.array_equal(degree, [2.0, 2.0, 1.0, 1.0])
    assert 2 * lp_norm(mu, 1) == pytest.approx(lp_norm(degree, 1))
    assert np.array_equal(star_sum(series, 1).array, np.diag(degree))


def test_matching_family_rejects_overlap():
    with pytest.raises(InvalidInputError):
        MatchingFamily(d=4, matchings=(((1, 2), (2, 3)),))


def test_pca_observation_support():
    h = Hypergraph(d=4, r=2, edges=((1, 2), (3, 4)))
    rng = generator(7)
    v = np.ones(4)
    y = pca_observation(h, v, 0.0, rng)
    adj = adjacency_tensor(h)
    assert not y.array[adj.array == 0.0].any()
    y2 = pca_observation(h, v, 3.0, generator(7))
    # same noise seed: difference is exactly the signal lam * A
    assert np.allclose(y2.array - y.array, 3.0 * adj.array)


def test_pca_observation_validates_signal():
    h = Hypergraph(d=2, r=2, edges=((1, 2),))
    with pytest.raises(InvalidInputError):
        pca_observation(h, np.array([0.5, 1.0]), 1.0, generator(8))


def test_lower_bound_series_terms_have_unit_norm():
    series = lower_bound_series(4, 3)
    assert len(series) == 4
    for t in series:
        assert frobenius(t) == 1.0
        for p in (1.5, 2.0, 3.0):
            assert injective_norm(t, p, CFG).value == pytest.approx(1.0, rel=1e-10)
    assert type2_variance(series, 2.0, CFG) == pytest.approx(2.0, rel=1e-10)


def test_lower_bound_witness_certifies_all_sign_patterns():
    d, r = 4, 2
    series = lower_bound_series(d, r)
    for p in (2.0, 3.0):
        target = d ** (1.0 - 1.0 / p)
        for signs in itertools.product((-1.0, 1.0), repeat=d):
            s = series_weighted_sum(series, np.array(signs))
            witness = lower_bound_witness(d, r, p, signs)
            value = apply_form(s, witness)
            assert value >= target - 1e-12
            for w in witness:
                assert lp_norm(w, p) <= 1.0 + 1e-12


def test_rank1_series_terms():
    u = np.array([1.0, 2.0])
    series = rank1_series([u], 3)
    assert series.order == 3
    assert series.terms[0].array[1, 1, 1] == 8.0


def test_iid_star_sum_matches_explicit_series():
    # oracle: build the orbit-indicator series and star it directly
    for d, r in ((2, 2), (3, 2), (2, 3)):
        terms = []
        for idx in itertools.combinations_with_replacement(range(d), r):
            arr = np.zeros((d,) * r)
            for perm in set(itertools.permutations(idx)):
                arr[perm] = 1.0
            terms.append(Tensor.from_array(arr))
        series = TensorSeries(terms=tuple(terms))
        for q in range(r + 1):
            expected = star_sum(series, q)
            got = iid_star_sum(d, r, q)
            assert np.array_equal(got.array.reshape(-1), expected.array.reshape(-1))


def test_seed_determinism_bitwise():
    spec = ModelSpec(kind="iid_symmetric", d=4, r=3)
    a = spec.sample(generator(99))
    b = spec.sample(generator(99))
    assert np.array_equal(a.array, b.array)
    spec2 = ModelSpec(kind="lower_bound_series", d=3, r=2)
    x = spec2.sample(generator(5))
    y = spec2.sample(generator(5))
    assert np.array_equal(x.array, y.array)


def test_model_spec_json_round_trip():
    specs = [
        ModelSpec(kind="iid_symmetric", d=4, r=2),
        ModelSpec(kind="lower_bound_series", d=3, r=3),
        ModelSpec(
            kind="censored_pca",
            hypergraph=Hypergraph(d=3, r=2, edges=((1, 2),)),
            signal=(1.0, -1.0, 1.0),
            lam=0.5,
        ),
        ModelSpec(
            kind="matching_series",
            family=MatchingFamily(d=4, matchings=(((1, 2),), ((3, 4),))),
        ),
        ModelSpec(kind="rank1_series", vectors=((1.0, 0.0), (0.5, 0.5)), r=2),
    ]
    for spec in specs:
        back = ModelSpec.from_json_dict(spec.to_json_dict())
        assert back.to_json_dict() == spec.to_json_dict()
        a = spec.sample(generator(3))
        b = back.sample(generator(3))
        assert np.array_equal(a.array, b.array)


def test_model_spec_validation():
    with pytest.raises(InvalidInputError):
        ModelSpec(kind="mystery")
    with pytest.raises(InvalidInputError):
        ModelSpec(kind="iid_symmetric", d=0, r=2)
    with pytest.raises(InvalidInputError):
        ModelSpec(kind="matching_series")


def test_hypergraph_json_round_trip():
    h = Hypergraph(d=5, r=3, edges=((1, 2, 3), (2, 4, 5)))
    back = Hypergraph.from_json_dict(h.to_json_dict())
    assert back == h
    f = MatchingFamily(d=4, matchings=(((1, 2), (3, 4)),))
    assert MatchingFamily.from_json_dict(f.to_json_dict()) == f

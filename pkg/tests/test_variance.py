import itertools
import math

import numpy as np
import pytest

from tensorconc import (
    InvalidInputError,
    MatchingFamily,
    SolverConfig,
    Tensor,
    TensorSeries,
    VarianceProfile,
    frobenius,
    inner,
    lp_norm,
    matching_series,
    natural_distance,
    rank1_series,
    sample_ball_batch,
    sigma_frobenius_upper,
    sigma_q_direct,
    sigma_q_sup,
    spectral_exact,
    star_sum,
    symmetrize,
    type2_variance,
    variance_profile,
)
from tensorconc.seeds import generator
from tensorconc.variance import TAG_EXACT

CFG = SolverConfig(seed=11)


def symmetric_series(rng, d, r, n):
    return TensorSeries(
        terms=tuple(
            symmetrize(Tensor.from_array(rng.standard_normal((d,) * r))) for _ in range(n)
        )
    )


def diagonal_entry_series(c, d, r):
    """One symmetric term: value c at the (1,...,1) corner; sigma_q = |c| for all q."""
    arr = np.zeros((d,) * r)
    arr[(0,) * r] = c
    return TensorSeries(terms=(Tensor.from_array(arr),))


MATCHINGS = MatchingFamily(d=4, matchings=(((1, 2),), ((1, 3), (2, 4))))


def test_sigma_r_is_frobenius_sum():
    rng = np.random.default_rng(0)
    series = symmetric_series(rng, 3, 3, 4)
    expected = math.sqrt(sum(inner(t, t) for t in series))
    assert sigma_q_direct(series, 3, 2.0, CFG) == pytest.approx(expected, rel=1e-12)
    assert sigma_q_sup(series, 3, 2.0, CFG) == pytest.approx(expected, rel=1e-12)


def test_matching_sigma2_exact():
    series, mu, _ = matching_series(MATCHINGS)
    assert sigma_q_direct(series, 2, 2.0, CFG) ** 2 == pytest.approx(2 * lp_norm(mu, 1), abs=1e-12)
    assert 2 * lp_norm(mu, 1) == pytest.approx(6.0)


def test_matching_star_sum_is_degree_matrix():
    series, _, degree = matching_series(MATCHINGS)
    m = star_sum(series, 1)
    assert np.array_equal(m.array, np.diag(degree))
    assert np.array_equal(degree, [2.0, 2.0, 1.0, 1.0])


def test_matching_sigma1_p2_is_max_degree():
    series, _, degree = matching_series(MATCHINGS)
    expected = math.sqrt(max(degree))
    assert sigma_q_direct(series, 1, 2.0, CFG) == pytest.approx(expected, rel=1e-12)
    assert sigma_q_sup(series, 1, 2.0, CFG) == pytest.approx(expected, rel=1e-4)


def test_diagonal_entry_series_all_sigmas():
    # direct star expansion: the only surviving product sits at the all-ones
    # corner, so every sigma_q equals |c|
    series = diagonal_entry_series(-2.5, 3, 3)
    for q in range(4):
        for p in (2.0, 4.0):
            assert sigma_q_direct(series, q, p, CFG) == pytest.approx(2.5, rel=1e-9)


def test_direct_vs_sup_agreement():
    rng = np.random.default_rng(1)
    for _ in range(6):
        d = int(rng.integers(2, 4))
        r = int(rng.integers(2, 4))
        n = int(rng.integers(1, 4))
        series = symmetric_series(rng, d, r, n)
        for q in range(r + 1):
            for p in (2.0, 4.0):
                direct = sigma_q_direct(series, q, p, CFG)
                sup = sigma_q_sup(series, q, p, CFG)
                assert abs(direct - sup) <= 0.02 * max(direct, sup, 1e-12)


def test_sigma_q_sup_requires_symmetric():
    asym = TensorSeries(terms=(Tensor.from_array(np.array([[0.0, 1.0], [0.0, 0.0]])),))
    with pytest.raises(InvalidInputError):
        sigma_q_sup(asym, 1, 2.0, CFG)


def test_type2_variance_identical_terms():
    series = TensorSeries(terms=(diagonal_entry_series(1.0, 2, 2).terms[0],) * 5)
    assert type2_variance(series, 2.0, CFG) == pytest.approx(math.sqrt(5.0), rel=1e-10)


def test_type2_variance_zero_series():
    series = TensorSeries(terms=(Tensor.from_array(np.zeros((2, 2))),))
    assert type2_variance(series, 3.0, CFG) == 0.0


def test_natural_distance_examples():
    series = TensorSeries(terms=(Tensor.from_array(np.eye(2)),))
    e1 = np.array([1.0, 0.0])
    assert natural_distance(series, e1, e1) == 0.0
    assert natural_distance(series, e1, np.zeros(2)) == pytest.approx(1.0)


def test_natural_distance_triangle():
    rng = np.random.default_rng(2)
    series = symmetric_series(rng, 3, 2, 3)
    for _ in range(30):
        u, v, w = rng.standard_normal((3, 3))
        duw = natural_distance(series, u, w)
        duv = natural_distance(series, u, v)
        dvw = natural_distance(series, v, w)
        assert duw <= duv + dvw + 1e-12


def test_lipschitz_bound_with_frobenius_surrogate():
    rng = np.random.default_rng(3)
    gen = generator(31)
    for p in (2.0, 4.0):
        series = symmetric_series(rng, 3, 3, 2)
        sigma0_upper = sigma_frobenius_upper(series, 0, p)
        pts = sample_ball_batch(3, p, 2000, gen)
        for i in range(0, 2000, 2):
            u, v = pts[i], pts[i + 1]
            lhs = natural_distance(series, u, v)
            assert lhs <= 3 * sigma0_upper * lp_norm(u - v, p) + 1e-12


def test_lipschitz_sharp_on_exact_instance():
    # sigma_0 = |c| exactly for the diagonal-corner series
    series = diagonal_entry_series(1.7, 3, 3)
    gen = generator(32)
    pts = sample_ball_batch(3, 2.0, 1000, gen)
    for i in range(0, 1000, 2):
        u, v = pts[i], pts[i + 1]
        lhs = natural_distance(series, u, v)
        assert lhs <= 3 * 1.7 * 1.05 * lp_norm(u - v, 2.0) + 1e-12


def test_holder_chain_sigma0_le_sigma1():
    # sigma_0 <= d^{1/2 - 1/p} sigma_1 at p = 2 with the exact sigma_1 oracle
    rng = np.random.default_rng(4)
    for _ in range(5):
        series = symmetric_series(rng, 3, 2, 3)
        sigma1 = math.sqrt(spectral_exact(star_sum(series, 1)))
        sigma0_est = sigma_q_direct(series, 0, 2.0, CFG)
        assert sigma0_est <= sigma1 + 1e-9


def test_diameter_at_most_twice_sigma0():
    rng = np.random.default_rng(5)
    a = symmetrize(Tensor.from_array(rng.standard_normal((3, 3))))
    series = TensorSeries(terms=(a,))
    sigma0 = spectral_exact(a)  # exact for a single symmetric matrix at p=2
    gen = generator(33)
    pts = sample_ball_batch(3, 2.0, 2000, gen)
    worst = max(
        natural_distance(series, pts[i], pts[i + 1]) for i in range(0, 2000, 2)
    )
    assert worst <= 2 * sigma0 + 1e-12


def test_type2_comparison_scaling():
    # sigma_q <= r! r^r d^{max(q/p - 1/2, 0)} sigma_T2 across a d-sweep
    rng = np.random.default_rng(6)
    r = 2
    for d in (2, 4, 8):
        vecs = [rng.standard_normal(d) for _ in range(3)]
        series = rank1_series(vecs, r)
        for p in (2.0, 4.0):
            t2 = type2_variance(series, p, CFG)
            slack = math.factorial(r) * r**r
            for q in range(r + 1):
                sq = sigma_q_direct(series, q, p, CFG)
                assert sq <= slack * d ** max(q / p - 0.5, 0.0) * t2 + 1e-9


def test_orthonormal_rank1_sigma1():
    basis = np.eye(4)
    series = rank1_series([basis[0], basis[1], basis[2]], 3)
    assert sigma_q_direct(series, 1, 2.0, CFG) == pytest.approx(1.0, rel=1e-8)


def test_rank1_norm_duality():
    rng = np.random.default_rng(7)
    u = rng.standard_normal(4)
    series = rank1_series([u], 3)
    for p in (2.0, 3.0):
        q = p / (p - 1.0)
        assert type2_variance(series, p, CFG) == pytest.approx(lp_norm(u, q) ** 3, rel=1e-8)


def test_variance_profile_matchings():
    series, mu, degree = matching_series(MATCHINGS)
    prof = variance_profile(series, 2.0, CFG)
    assert prof.sigma[2] ** 2 == pytest.approx(2 * lp_norm(mu, 1), abs=1e-12)
    assert prof.sigma[1] ** 2 == pytest.approx(max(degree), abs=1e-12)
    assert prof.method_tags[2] == TAG_EXACT
    assert prof.method_tags[1] == TAG_EXACT
    assert prof.sigma[0] <= prof.sigma_type2 + 1e-9


def test_variance_profile_sigma0_le_type2_when_exact():
    series = diagonal_entry_series(2.0, 2, 2)
    prof = variance_profile(series, 2.0, CFG)
    assert prof.sigma[0] <= prof.sigma_type2 + 1e-10
    assert prof.sigma_type2 == pytest.approx(2.0, rel=1e-9)


def test_iid_orbit_series_sigma0_bound():
    # sigma_0^2 <= r! d^{r - 2r/p} for the orbit-indicator series
    d, r = 2, 2
    terms = []
    for idx in itertools.combinations_with_replacement(range(d), r):
        arr = np.zeros((d,) * r)
        for perm in set(itertools.permutations(idx)):
            arr[perm] = 1.0
        terms.append(Tensor.from_array(arr))
    series = TensorSeries(terms=tuple(terms))
    for p in (2.0, 4.0):
        s0 = sigma_q_direct(series, 0, p, CFG)
        assert s0 <= math.sqrt(math.factorial(r)) * d ** (r / 2.0 - r / p) + 1e-9


def test_profile_json_round_trip():
    series, _, _ = matching_series(MATCHINGS)
    prof = variance_profile(series, 4.0, CFG)
    back = VarianceProfile.from_json_dict(prof.to_json_dict())
    assert back.sigma == prof.sigma
    assert back.method_tags == prof.method_tags
    assert back.sigma_type2 == prof.sigma_type2


def test_sigma_frobenius_upper_reduces_at_p2():
    rng = np.random.default_rng(8)
    series = symmetric_series(rng, 3, 2, 2)
    fro = math.sqrt(sum(frobenius(t) ** 2 for t in series))
    assert sigma_frobenius_upper(series, 0, 2.0) == pytest.approx(fro, rel=1e-12)
    assert sigma_frobenius_upper(series, 2, 4.0) == pytest.approx(fro, rel=1e-12)
    assert sigma_frobenius_upper(series, 0, 4.0) == pytest.approx(
        3 ** (2 * 0.25) * fro, rel=1e-12
    )

import numpy as np
import pytest

from ginlab.pfaffian import (
    Matching,
    canonical_matching,
    canonical_symplectic,
    enumerate_matchings,
    identity_matching,
    inversions,
    matching_sign,
    pfaffian,
    pfaffian_matchings,
    require_skew,
)


def random_skew(rng, n, complex_entries=True):
    a = rng.normal(size=(n, n))
    if complex_entries:
        a = a + 1j * rng.normal(size=(n, n))
    return a - a.T


def test_pfaffian_2x2():
    assert pfaffian(np.array([[0.0, 3.0], [-3.0, 0.0]])) == 3.0


def test_pfaffian_canonical_symplectic():
    assert pfaffian(canonical_symplectic(4)) == 1.0
    assert pfaffian_matchings(canonical_symplectic(6)) == 1.0
    j = canonical_symplectic(6)
    assert np.array_equal(j @ j, -np.eye(6))
    assert np.array_equal(j.T, -j)


def test_pfaffian_4x4_closed_form():
    rng = np.random.default_rng(0)
    a = random_skew(rng, 4)
    expected = a[0, 1] * a[2, 3] - a[0, 2] * a[1, 3] + a[0, 3] * a[1, 2]
    assert abs(pfaffian_matchings(a) - expected) < 1e-14 * abs(expected)
    assert abs(pfaffian(a) - expected) < 1e-12 * abs(expected)


@pytest.mark.parametrize("n", [2, 4, 6, 8, 10, 12])
@pytest.mark.parametrize("complex_entries", [False, True])
def test_pfaffian_square_is_determinant(n, complex_entries):
    rng = np.random.default_rng(n)
    for _ in range(10):
        a = random_skew(rng, n, complex_entries)
        pf = pfaffian(a)
        det = np.linalg.det(a)
        assert abs(pf * pf - det) <= 1e-10 * abs(det)


@pytest.mark.parametrize("n", [2, 4, 6, 8, 10])
def test_pfaffian_matches_matchings_sum(n):
    rng = np.random.default_rng(100 + n)
    for _ in range(6):
        a = random_skew(rng, n)
        pf = pfaffian(a)
        assert abs(pf - pfaffian_matchings(a)) <= 1e-11 * abs(pf)


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_pfaffian_congruence_transformation(n):
    # Pf(B A B^T) = det(B) Pf(A)
    rng = np.random.default_rng(200 + n)
    for _ in range(6):
        a = random_skew(rng, n)
        b = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        lhs = pfaffian(b @ a @ b.T)
        rhs = np.linalg.det(b) * pfaffian(a)
        assert abs(lhs - rhs) <= 1e-9 * abs(rhs)


def test_pfaffian_zero_on_rank_deficient():
    a = np.zeros((4, 4))
    a[0, 1], a[1, 0] = 1.0, -1.0
    assert pfaffian(a) == 0.0


def test_pfaffian_rejects_odd_and_nonskew():
    with pytest.raises(ValueError):
        pfaffian(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        pfaffian(np.ones((4, 4)))


def test_require_skew_cleans_roundoff():
    rng = np.random.default_rng(5)
    a = random_skew(rng, 6)
    noisy = a + 1e-15 * np.max(np.abs(a)) * rng.normal(size=(6, 6))
    cleaned = require_skew(noisy)
    assert np.max(np.abs(cleaned + cleaned.T)) == 0.0
    assert np.all(np.diag(cleaned) == 0.0)


def test_enumerate_matchings_counts():
    assert [m.pairs for m in enumerate_matchings(2)] == [((1, 2),)]
    four = enumerate_matchings(4)
    assert {m.pairs for m in four} == {
        ((1, 2), (3, 4)),
        ((1, 3), (2, 4)),
        ((1, 4), (2, 3)),
    }
    assert len(enumerate_matchings(8)) == 105
    with pytest.raises(ValueError):
        enumerate_matchings(5)
    with pytest.raises(ValueError):
        enumerate_matchings(18)


def test_enumerate_matchings_deterministic_order():
    first = enumerate_matchings(6)
    second = enumerate_matchings(6)
    assert [m.pairs for m in first] == [m.pairs for m in second]
    assert first[0] == identity_matching(6)


def test_matching_canonical_form():
    m = canonical_matching([(4, 1), (3, 2)])
    assert m.pairs == ((1, 4), (2, 3))
    with pytest.raises(ValueError):
        Matching(((1, 2), (2, 3)))
    with pytest.raises(ValueError):
        Matching(((3, 4), (1, 2)))


def test_inversions_examples():
    assert inversions(canonical_matching([(1, 2), (3, 4)])) == 0
    assert inversions(canonical_matching([(1, 3), (2, 4)])) == 1
    assert inversions(canonical_matching([(1, 4), (2, 3)])) == 2


@pytest.mark.parametrize("two_k", [2, 4, 6, 8])
def test_matching_sign_is_pfaffian_coefficient(two_k):
    # the sign of each matching's term in the expanded Pfaffian is (-1)**inversions
    for m in enumerate_matchings(two_k):
        a = np.zeros((two_k, two_k))
        for i, j in m.pairs:
            a[i - 1, j - 1] = 1.0
            a[j - 1, i - 1] = -1.0
        assert pfaffian(a) == matching_sign(m)


def test_matchings_sum_dimension_cap():
    with pytest.raises(ValueError):
        pfaffian_matchings(np.zeros((14, 14)))


def test_pfaffian_dtype_follows_input():
    rng = np.random.default_rng(9)
    assert isinstance(pfaffian(random_skew(rng, 4, complex_entries=False)), float)
    assert isinstance(pfaffian(random_skew(rng, 4, complex_entries=True)), complex)

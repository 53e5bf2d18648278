import math
from math import gcd

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_maps, random_mobius
from modspace.entropy import (
    LOG2,
    char_poly,
    lap_counts,
    lap_entropy,
    expected_char_poly,
    markov_entropy,
    markov_matrix,
    pq_root,
    pq_value,
    root_of_Pq,
    spectral_radius,
)
from modspace.ratmap import MixedNormalForm, QuadMap, classify_real, mobius_conjugate

GOLDEN = (1 + math.sqrt(5)) / 2


def valid_pairs(q_max):
    return [(q, p) for q in range(2, q_max + 1) for p in range(1, q) if gcd(p, q) == 1]


def test_markov_matrix_3_1(frozen):
    assert markov_matrix(3, 1).matrix.tolist() == frozen["markov_3_1"]


def test_markov_matrix_5_2_structure():
    A = markov_matrix(5, 2).matrix
    assert not A[2].any()
    assert [A[i, 0] for i in range(5)] == [1, 1, 0, 1, 1]
    for j in range(1, 5):
        assert A[:, j].sum() == 1 and A[(j + 2) % 5, j] == 1


@pytest.mark.parametrize("q,p", [(1, 1), (4, 2), (5, 0), (5, 5)])
def test_markov_matrix_rejects(q, p):
    with pytest.raises(ValueError):
        markov_matrix(q, p)


def test_char_poly_examples():
    assert char_poly(markov_matrix(3, 1)) == [1, -1, -1, 0]
    assert char_poly(markov_matrix(4, 3)) == [1, -1, -1, -1, 0]
    assert char_poly(markov_matrix(7, 2)) == char_poly(markov_matrix(7, 3))


@pytest.mark.parametrize("q,p", valid_pairs(12))
def test_char_poly_closed_form(q, p):
    got = char_poly(markov_matrix(q, p))
    assert got == expected_char_poly(q)
    assert all(isinstance(c, int) for c in got)


def test_char_poly_against_numpy():
    # independent route: numpy's eigenvalue-based characteristic polynomial
    for q, p in [(5, 2), (9, 4), (11, 3)]:
        A = markov_matrix(q, p).matrix
        assert np.allclose(np.poly(A), char_poly(markov_matrix(q, p)), atol=1e-8)


def test_spectral_radius_examples(frozen):
    assert spectral_radius(markov_matrix(3, 1)) == pytest.approx(GOLDEN, abs=1e-9)
    assert spectral_radius(markov_matrix(4, 1)) == pytest.approx(frozen["roots"]["4"], abs=1e-9)
    assert spectral_radius(markov_matrix(4, 1)) == pytest.approx(1.8392867552, abs=1e-9)


@pytest.mark.parametrize("q,p", [pr for pr in valid_pairs(12) if pr[0] >= 3])
def test_markov_matches_root(q, p):
    assert markov_entropy(q, p).value == pytest.approx(root_of_Pq(q).value, abs=1e-9)


def test_root_ladder(frozen):
    prev = 1.0
    for q in range(3, 41):
        r, width, _ = pq_root(q)
        assert abs(r - frozen["roots"][str(q)]) < 1e-10
        assert width < 1e-10
        assert prev < r < 2
        assert 2 * (q - 1) / q < r
        assert 2 - r < 2 / q
        prev = r
    assert root_of_Pq(3).value == pytest.approx(math.log(GOLDEN), abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.integers(3, 40), st.floats(1.0, 2.0))
def test_pq_product_form_matches_horner(q, t):
    horner = 0.0
    for c in [1.0, -2.0] + [0.0] * (q - 2) + [1.0]:
        horner = horner * t + c
    scale = max(1.0, t ** q)
    assert abs(pq_value(q, t) - horner) <= 1e-12 * scale


def test_pq_root_rejects_small_q():
    with pytest.raises(ValueError):
        root_of_Pq(2)


# ---------------------------------------------------------------- laps

def test_lap_entropy_examples():
    assert lap_entropy(QuadMap(1, 0, 1, 1, 0, 0)).value == pytest.approx(0.0, abs=1e-3)
    assert lap_entropy(QuadMap(-10, 0, 1, 1, 0, 0)).value == pytest.approx(LOG2, abs=1e-2)
    assert lap_entropy(QuadMap(1, 0, -1, 1, 0, 0)).value == pytest.approx(math.log(GOLDEN), abs=1e-2)


def test_lap_counts_never_decrease():
    for m in random_maps(30, 8) + [QuadMap(1, 0, 1, 1, 0, 0)]:
        if classify_real(m).kind.is_covering or classify_real(m).kind.is_monotone:
            continue
        counts, _ = lap_counts(m, 16)
        assert all(b >= a for a, b in zip(counts, counts[1:]))


def test_covering_and_monotone_are_exact():
    for m in random_maps(200, 21):
        kind = classify_real(m).kind
        if kind.is_covering:
            assert lap_entropy(m).value == LOG2
        elif kind.is_monotone:
            assert lap_entropy(m).value == 0.0
    assert lap_entropy(MixedNormalForm(3.0, 0.0, "minus").to_map()).value == LOG2


@pytest.mark.parametrize("mu,a", [(-4.649435914489493, -0.5698402909980532), (-8.0, -0.6), (-2.5, 0.3),
                                  (-20.0, -0.1), (-6.0, 0.8)])
def test_lap_entropy_conjugation_invariant(mu, a):
    m = MixedNormalForm(mu, a).to_map()
    base = lap_entropy(m)
    rng = np.random.default_rng(int(abs(mu) * 100))
    for _ in range(4):
        mob = random_mobius(rng)
        if mob[0][0] * mob[1][1] - mob[0][1] * mob[1][0] < 0:
            mob = ((-mob[0][0], -mob[0][1]), mob[1])
        other = lap_entropy(mobius_conjugate(m, mob))
        assert abs(other.value - base.value) <= max(base.error_bound, other.error_bound, 1e-3)


def test_estimate_serializes():
    d = root_of_Pq(5).to_dict()
    assert d["method"] == "PolyRoot" and set(d) == {"value", "method", "error_bound", "iterations"}
    assert markov_matrix(3, 1).to_csv() == "1,0,1\n0,0,0\n1,1,0\n"

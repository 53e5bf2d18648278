import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import close, mobius, quad_maps, random_maps, random_mobius
from modspace.ratmap import (
    INF,
    DegenerateMapError,
    MixedNormalForm,
    QuadMap,
    RealClass,
    ToleranceError,
    classify_real,
    critical_points,
    eval_map,
    fixed_point_data,
    from_mixed_normal,
    is_inf,
    mobius_conjugate,
    moduli_point,
    normalize_center_form,
    sigmas_from_multipliers,
)

INV_SQ = QuadMap(0, 0, 1, 1, 0, 0)
ONE_MINUS_INV_SQ = QuadMap(1, 0, -1, 1, 0, 0)


def b_plus_inv_sq(b):
    return QuadMap(b, 0, 1, 1, 0, 0)


# ---------------------------------------------------------------- evaluation

def test_eval_simple_values():
    assert eval_map(INV_SQ, 2.0) == pytest.approx(0.25)
    assert is_inf(eval_map(INV_SQ, 0.0))
    assert eval_map(INV_SQ, INF) == 0.0
    half_joukowski = QuadMap(1, 0, 1, 0, 2, 0)
    assert eval_map(half_joukowski, 1.0) == pytest.approx(1.0)


def test_degenerate_maps_rejected():
    with pytest.raises(DegenerateMapError):
        QuadMap(1, 1, 0, 1, 0, 0)  # common root z = 0 ... numerator z(z+1), denominator z^2
    with pytest.raises(DegenerateMapError):
        QuadMap(0, 0, 0, 0, 0, 0)
    with pytest.raises(DegenerateMapError):
        QuadMap(1, math.nan, 0, 0, 1, 0)


def test_scaling_normalizes():
    assert QuadMap(2, 0, 2, 0, 4, 0).max_diff(QuadMap(1, 0, 1, 0, 2, 0)) == 0.0
    assert QuadMap(-1, 0, -1, 0, -2, 0).max_diff(QuadMap(1, 0, 1, 0, 2, 0)) == 0.0


def test_critical_points():
    assert critical_points(INV_SQ) == (0.0, INF)
    for b in (-3.0, 0.5, 7.0):
        assert critical_points(b_plus_inv_sq(b)) == (0.0, INF)
    c = critical_points(MixedNormalForm(-3.0, 0.4).to_map())
    assert c[0] == pytest.approx(-1.0) and c[1] == pytest.approx(1.0)


# ---------------------------------------------------------------- fixed points, moduli

def test_inverse_square_fixed_points(frozen):
    fp = fixed_point_data(INV_SQ)
    got = sorted(m.real for m in fp.multipliers)
    assert got == pytest.approx(frozen["inverse_square_multipliers"], abs=1e-12)
    for p in fp.points:
        assert abs(complex(p) ** 3 - 1) < 1e-12
    assert fp.formula_residual() < 1e-12


def test_one_minus_inverse_square_fixed_points():
    fp = fixed_point_data(ONE_MINUS_INV_SQ)
    for p, mu in zip(fp.points, fp.multipliers):
        p = complex(p)
        assert abs(p ** 3 - p ** 2 + 1) < 1e-12
        assert abs(mu - 2 / p ** 3) < 1e-12


def test_moduli_examples(frozen):
    assert moduli_point(INV_SQ).as_tuple() == pytest.approx(frozen["inverse_square_sigmas"][:2], abs=1e-9)
    assert moduli_point(ONE_MINUS_INV_SQ).as_tuple() == pytest.approx(
        frozen["one_minus_inverse_square_sigmas"][:2], abs=1e-9)
    for b, (s1, s2, _) in frozen["b_inverse_square"].items():
        b = float(b)
        assert moduli_point(b_plus_inv_sq(b)).as_tuple() == pytest.approx((s1, s2), abs=1e-9)
        assert s2 == pytest.approx(4 * b ** 3 + 12, abs=1e-9)


def test_mixed_normal_examples(frozen):
    for key, (mu, a) in (("mixed_2_0", (2.0, 0.0)), ("mixed_4_1", (4.0, 1.0))):
        m, pt = from_mixed_normal(MixedNormalForm(mu, a))
        assert pt.as_tuple() == pytest.approx(frozen[key][:2], abs=1e-12)
        assert moduli_point(m).as_tuple() == pytest.approx(frozen[key][:2], abs=1e-9)


def test_complex_symmetric_function_rejected():
    with pytest.raises(ToleranceError):
        sigmas_from_multipliers((1j, 2.0, 3.0))


@settings(max_examples=200, deadline=None)
@given(quad_maps())
def test_fixed_point_formula(m):
    fp = fixed_point_data(m)
    if all(abs(1 - mu) > 1e-6 for mu in fp.multipliers) and not fp.parabolic:
        assert fp.formula_residual() < 1e-9 * max(1.0, max(abs(1 / (1 - mu)) for mu in fp.multipliers))


@settings(max_examples=200, deadline=None)
@given(quad_maps())
def test_sigma3_relation(m):
    fp = fixed_point_data(m)
    if fp.parabolic:
        return
    s1, s2, s3 = fp.symmetric_functions()
    assert abs(s3 - (s1 - 2)) < 1e-9 * max(1.0, abs(s1), abs(s3))


@settings(max_examples=100, deadline=None)
@given(quad_maps(), mobius())
def test_moduli_conjugation_invariant(m, mob):
    # near-parabolic maps have a double fixed point, found only to sqrt(eps)
    if any(abs(1 - mu) < 1e-3 for mu in fixed_point_data(m).multipliers):
        return
    try:
        a = moduli_point(m)
        b = moduli_point(mobius_conjugate(m, mob))
    except (ToleranceError, DegenerateMapError):
        return
    scale = max(1.0, abs(a.sigma1), abs(a.sigma2))
    assert a.distance(b) < 1e-7 * scale


def test_closed_formula_matches_multiplier_route_on_grid():
    mus = np.concatenate([np.linspace(-5, -0.1, 25), np.linspace(0.1, 5, 25)])
    for mu in mus:
        for a in np.linspace(-3, 3, 50):
            m, pt = from_mixed_normal(MixedNormalForm(float(mu), float(a)))
            mp_ = moduli_point(m)
            scale = max(1.0, abs(pt.sigma1), abs(pt.sigma2))
            assert pt.distance(mp_) < 1e-9 * scale


# ---------------------------------------------------------------- classification

def test_classify_examples():
    assert classify_real(QuadMap(1, 0, 1, 1, 0, 0)).kind is RealClass.Unimodal
    assert classify_real(QuadMap(1, 0, -1, 0, 3, 0)).kind.is_covering
    assert classify_real(ONE_MINUS_INV_SQ).kind is RealClass.BimodalPlusMinusPlus


@pytest.mark.parametrize("b", [-5.0, -1.0, -0.1, 0.1, 1.0, 5.0])
def test_classify_b_family(b):
    k = classify_real(b_plus_inv_sq(b)).kind
    if b > 0:
        assert k is RealClass.Unimodal
    else:
        assert k is RealClass.BimodalPlusMinusPlus or k.is_covering


def test_classify_is_conjugation_invariant():
    rng = np.random.default_rng(3)
    for m in random_maps(40, 11):
        base = classify_real(m)
        if base.boundary_ambiguous:
            continue
        for _ in range(3):
            mob = random_mobius(rng)
            other = classify_real(mobius_conjugate(m, mob))
            if other.boundary_ambiguous:
                continue
            if base.kind.is_covering:
                assert other.kind.is_covering
            else:
                assert other.kind == base.kind


def test_monotone_classes_occur():
    # (z^2 + 1)/(z^2 + 2) maps R^ into [1/2, 1] and is unimodal there only if 0 is inside
    kinds = {classify_real(m).kind for m in random_maps(300, 5)}
    assert RealClass.Unimodal in kinds
    assert any(k.is_covering for k in kinds)
    assert any(k.is_monotone for k in kinds)


# ---------------------------------------------------------------- center form

def _ratio_match(m: QuadMap, target, tol):
    c = np.array(m.coeffs)
    t = np.array(target, dtype=float)
    s = c[np.argmax(np.abs(t))] / t[np.argmax(np.abs(t))]
    return np.max(np.abs(c - s * t)) / np.max(np.abs(c)) < tol


def test_center_form_of_inverse_square():
    r3 = math.sqrt(3)
    target = (r3, -2 * r3 * r3, 3 * r3, 9, -2 * r3, 3)
    assert _ratio_match(normalize_center_form(INV_SQ, 0), target, 1e-6)


def test_center_form_of_one_minus_inverse_square():
    target = (1.7753, -2.3560, -1.0, 3.5339, 2.7753, 1.1780)
    assert _ratio_match(normalize_center_form(ONE_MINUS_INV_SQ, 0), target, 1e-3)


def test_center_form_of_two_thirds_model():
    target = (1.3876, 2.3560, 1.0, -2.1914, 0.3876, 0.1645)
    assert _ratio_match(normalize_center_form(QuadMap(0, 0, 1, -1, 0, 1), 0), target, 1e-3)


def test_center_form_is_idempotent():
    once = normalize_center_form(ONE_MINUS_INV_SQ, 0)
    idx = [i for i, c in enumerate(critical_points(once)) if not is_inf(c) and abs(c) < 1e-9][0]
    twice = normalize_center_form(once, idx)
    assert once.max_diff(twice) < 1e-9
    fp = fixed_point_data(once)
    nonreal = sorted((complex(z) for z in fp.points if not is_inf(z) and abs(complex(z).imag) > 1e-9),
                     key=lambda z: z.imag)
    assert abs(nonreal[0] + 1j) < 1e-9 and abs(nonreal[1] - 1j) < 1e-9


def test_center_form_requires_nonreal_pair():
    with pytest.raises(ValueError):
        normalize_center_form(QuadMap(1, 0, 1, 0, 3, 0))

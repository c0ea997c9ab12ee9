
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from poincare_convex import gallery
from poincare_convex import inequalities as iq
from poincare_convex.spectral_core import PreconditionError

from conftest import random_spectrum, single_block

EPS = 0.05


def build(spec, **kw):
    return gallery.build(spec, **kw)


def test_checker_spot_values():
    assert iq.check_eg5(single_block(3, 4), 3).deficit == 112.0
    assert iq.check_eg5(single_block(3, 4), 3).terms["product_form"] == 112.0
    assert iq.check_m2(single_block(3, 3), 3).deficit == 60.0
    rep = iq.check_gap(single_block(3, 3), 3)
    assert (rep.lhs, rep.rhs, rep.deficit) == (4.0, 10.0, 6.0)
    rep = iq.check_poincare(single_block(3, 1), 3)
    assert rep.deficit == 0.0 and rep.equality


@pytest.mark.parametrize("d", range(2, 7))
def test_checkers_equality_cases(d):
    assert iq.check_poincare(single_block(d, 1, band_limit=4), d).equality
    assert iq.check_gap(single_block(d, 2, band_limit=4), d).equality
    assert iq.check_eg4(single_block(d, 2, band_limit=4), d).equality
    assert iq.check_m2(single_block(d, 2, band_limit=4), d).equality
    assert iq.check_eg5(single_block(d, 3, band_limit=4), d).equality
    assert not iq.check_eg5(single_block(d, 4), d).equality


def test_checkers_reject_low_degrees():
    with pytest.raises(PreconditionError):
        iq.check_poincare(single_block(3, 0, band_limit=2), 3)
    with pytest.raises(PreconditionError):
        iq.check_eg5(single_block(3, 1, band_limit=4), 3)
    with pytest.raises(ValueError):
        iq.check_gap(single_block(3, 2), 2)


@settings(max_examples=60, deadline=None)
@given(d=st.integers(2, 7), seed=st.integers(0, 2**31))
def test_checkers_hold_on_random(d, seed):
    rng = np.random.default_rng(seed)
    F1 = random_spectrum(rng, d, 9, low=1)
    F2 = random_spectrum(rng, d, 9, low=2)
    for rep in (iq.check_poincare(F1, d), iq.check_m2(F1, d), iq.check_eg4(F1, d),
                iq.check_gap(F2, d), iq.check_eg5(F2, d)):
        assert rep.holds
        assert not rep.equality
        if "product_form" in rep.terms:
            assert_allclose(rep.deficit, rep.terms["product_form"], rtol=1e-10)


def test_theorem1_y3():
    rep = iq.theorem1(build(gallery.perturbation(1.0, 3, [(3, 1, EPS)])))
    assert_allclose(rep.deficit, 3 * EPS**2, rtol=1e-9)
    assert rep.holds and not rep.equality
    classical = rep.related[0]
    assert classical.name == "minkowski_classical"
    # dropping the delta_2 term can only enlarge the deficit
    assert classical.deficit >= rep.deficit
    assert_allclose(classical.deficit, 5 * EPS**2, rtol=1e-9)


def test_theorem2_y3():
    rep = iq.theorem2(build(gallery.perturbation(1.0, 3, [(3, 1, EPS)])))
    assert_allclose([rep.lhs, rep.rhs], [5 * EPS**2, 12.5 * EPS**2], rtol=1e-9)


def test_theorem3_y4_matches_eg5():
    rep = iq.theorem3(build(gallery.perturbation(1.0, 3, [(4, 6, EPS)])))
    oracle = iq.check_eg5(single_block(3, 4, EPS**2), 3).deficit / ((3 - 1) * (3 + 1))
    assert_allclose(rep.deficit, 14 * EPS**2, rtol=1e-9)
    assert_allclose(rep.deficit, oracle, rtol=1e-9)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_sharpness(d):
    y2 = gallery.perturbation(1.0, d, [(2, 0, EPS)])
    y23 = gallery.perturbation(1.0, d, [(2, 0, EPS), (3, 1, EPS)])
    K2, K23 = build(y2), build(y23)
    for rep in (iq.theorem1(K2), iq.theorem2(K2), iq.theorem3(K23)):
        assert rep.equality
        assert abs(rep.deficit) <= 1e-9 * rep.scale
    assert not iq.theorem1(K23).equality
    assert not iq.theorem_general_m(K23, 2).equality
    assert iq.theorem_general_m(K23, 3).equality


def test_translation_does_not_mask_equality():
    K = build(gallery.perturbation(1.0, 3, [(3, 0, EPS)], center=(5.0, 0.0, 0.0)))
    assert not iq.theorem1(K).equality
    assert iq.theorem1(build(gallery.ball(1.0, 3, center=(5.0, 0, 0)))).equality


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**31), t=st.floats(0.2, 5.0), d=st.sampled_from([2, 3]))
def test_theorems_invariance(seed, t, d):
    K = build(gallery.random_perturbation(np.random.default_rng(seed), d, max_degree=5))
    shift = np.linspace(-1.0, 1.0, d)
    for fn in (iq.theorem1, iq.theorem2, iq.theorem3):
        a, b, c = fn(K), fn(K.scaled(t)), fn(K.translated(shift))
        assert a.holds and b.holds and c.holds
        assert_allclose(b.deficit, t * t * a.deficit, rtol=1e-9, atol=1e-14)
        assert_allclose(c.deficit, a.deficit, rtol=1e-9, atol=1e-14)


def test_general_m_paths_agree():
    K = build(gallery.ellipsoid((1.0, 0.9, 0.8)), band_limit=32)
    for m in range(2, 7):
        p = iq.general_m_paths(K, m)
        assert abs(p["direct"] - p["expanded"]) <= 1e-9 * p["magnitude"]
        rep = iq.theorem_general_m(K, m)
        assert rep.holds and rep.terms["m"] == m
    with pytest.raises(ValueError):
        iq.general_m_paths(K, 1)


def test_general_m_expected_coefficients():
    p = iq.general_m_paths(build(gallery.ball(1.0, 3)), 2)
    assert p["P"] == (0, -4, 1)
    assert (p["coeff1"], p["coeff2"]) == (4.0, -8.0)


def test_mixed_self_pair_is_equality():
    K = build(gallery.perturbation(1.0, 3, [(2, 0, EPS), (3, 2, EPS)]))
    rep = iq.theorem_mixed(K, K)
    assert rep.equality and rep.holds
    assert rep.terms["width_ratio"] == 1.0
    af = rep.related[0]
    assert af.name == "aleksandrov_fenchel" and af.holds


def test_mixed_homothetic_pair():
    K = build(gallery.perturbation(1.0, 3, [(2, 0, EPS)]))
    rep = iq.theorem_mixed(K.scaled(2.0), K.translated((0.3, 0.0, 0.0)))
    assert_allclose(rep.terms["width_ratio"], 2.0, rtol=1e-15)
    assert rep.equality
    assert abs(rep.related[0].deficit) <= 1e-9 * rep.scale


def test_mixed_rejects_dimension_mismatch():
    with pytest.raises(ValueError):
        iq.theorem_mixed(build(gallery.ball(1.0, 2)), build(gallery.ball(1.0, 3)))


def test_report_serialization():
    rep = iq.theorem1(build(gallery.ball(1.0, 3)))
    data = rep.as_dict()
    assert data["related"][0]["name"] == "minkowski_classical"
    assert [r.name for r in rep.flatten()] == ["theorem1", "minkowski_classical"]
    assert rep.convexity_flag == "certified"

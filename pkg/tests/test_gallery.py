import json
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from poincare_convex import convex_body as cb
from poincare_convex import gallery


def test_ball_spectrum():
    K = gallery.build(gallery.ball(2.0, 3))
    assert_allclose(K.spectrum.blocks[0], [2 * math.sqrt(4 * math.pi)], rtol=1e-15)
    assert np.all(K.spectrum.block(1) == 0)


def test_perturbation_sparsity():
    K = gallery.build(gallery.perturbation(1.0, 3, [(4, 2, 0.03)]))
    assert K.band_limit == 4
    nz = [(n, k) for n in range(5) for k in np.flatnonzero(K.spectrum.blocks[n])]
    assert nz == [(0, 0), (4, 2)]
    assert K.spectrum.blocks[4][2] == 0.03


def test_perturbation_rejects_bad_slot():
    with pytest.raises(gallery.SpecError):
        gallery.build(gallery.perturbation(1.0, 3, [(2, 5, 0.1)]))
    with pytest.raises(gallery.SpecError):
        gallery.build(gallery.perturbation(-1.0, 3, []))


@pytest.mark.parametrize("d", [2, 3])
def test_round_ellipsoid_is_ball(d):
    E = gallery.build(gallery.ellipsoid((1.3,) * d), band_limit=16)
    B = gallery.build(gallery.ball(1.3, d)).spectrum.padded(16)
    assert math.sqrt((E.spectrum - B).norm2()) < 1e-12
    assert E.tail_energy < 1e-12


def test_ellipse_tail_small():
    E = gallery.build(gallery.ellipsoid((1.0, 0.8)), max_tail=gallery.MAX_TAIL_FRACTION)
    assert E.tail_energy <= 1e-9 * E.spectrum.norm2()
    with pytest.raises(gallery.SpecError):
        gallery.build(gallery.ellipsoid((1.0, 0.2)), band_limit=4, max_tail=gallery.MAX_TAIL_FRACTION)


def test_minkowski_linearity():
    a = gallery.ellipsoid((1.0, 0.9, 0.8))
    b = gallery.perturbation(0.5, 3, [(3, 0, 0.02)], center=(0.1, 0.2, 0.0))
    S = gallery.build(gallery.minkowski_sum(a, b), band_limit=24)
    A = gallery.build(a, band_limit=24)
    B = gallery.build(b, band_limit=24)
    assert math.sqrt((S.spectrum - (A.spectrum + B.spectrum)).norm2()) < 1e-14
    assert_allclose(cb.mean_width(S), cb.mean_width(A) + cb.mean_width(B), rtol=1e-14)
    assert_allclose(cb.steiner_point(S), cb.steiner_point(A) + cb.steiner_point(B), atol=1e-14)


def test_json_round_trip():
    for name, spec in gallery.canonical_specs().items():
        text = json.dumps(spec.to_json())
        back = gallery.BodySpec.from_json(json.loads(text))
        assert back.to_json() == spec.to_json(), name


def test_from_json_errors():
    with pytest.raises(gallery.SpecError):
        gallery.BodySpec.from_json({"kind": "cube", "d": 3})
    with pytest.raises(gallery.SpecError):
        gallery.BodySpec.from_json({"kind": "ball", "d": 1, "params": {"radius": 1}})
    with pytest.raises(gallery.SpecError):
        gallery.BodySpec.from_json({"kind": "minkowski_sum", "d": 3, "params": {"bodies": []}})
    with pytest.raises(gallery.SpecError):
        gallery.build(gallery.BodySpec("translated_ball", 3, {"radius": 1.0}))


def test_require_convex():
    spec = gallery.perturbation(1.0, 2, [(2, 0, 0.5 * math.sqrt(math.pi))])
    assert gallery.build(spec).convexity_flag == cb.FAILED
    with pytest.raises(gallery.NonConvexError):
        gallery.build(spec, require_convex=True)


def test_canonical_specs_certified():
    for name, spec in gallery.canonical_specs().items():
        K = gallery.build(spec, max_tail=gallery.MAX_TAIL_FRACTION)
        assert K.convexity_flag == cb.CERTIFIED, name


def test_random_perturbation_deterministic():
    a = gallery.random_perturbation(np.random.default_rng(3), 3)
    b = gallery.random_perturbation(np.random.default_rng(3), 3)
    assert a.to_json() == b.to_json()
    assert gallery.build(a).convexity_flag == cb.CERTIFIED

import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from htkernels.group import (
    GroupPoint,
    dilate,
    gauge,
    group_from_json,
    group_to_json,
    heisenberg,
    inverse,
    make_standard_group,
    multiply,
    quaternionic,
    validate_h_type,
)

GROUPS = [heisenberg(1), heisenberg(2), quaternionic()]
coord = st.floats(-3.0, 3.0).filter(lambda v: v == 0.0 or abs(v) > 1e-60)


def random_point(G, rng):
    return GroupPoint(rng.normal(size=G.m), rng.normal(size=G.k))


def test_heisenberg_structure():
    G = heisenberg(1)
    assert (G.m, G.k, G.Q) == (2, 1, 4)
    assert_allclose(G.J[0] @ G.J[0], -np.eye(2))
    assert heisenberg(2).Q == 6


def test_quaternionic_anticommutes():
    G = quaternionic()
    assert (G.m, G.k, G.Q) == (4, 3, 10)
    for a, b in itertools.combinations(G.J, 2):
        assert_allclose(a @ b + b @ a, 0.0, atol=1e-15)
    for a in G.J:
        assert_allclose(a @ a, -np.eye(4))


def test_validate_rejects_bad_structures():
    assert validate_h_type(heisenberg(1).J)
    rep = validate_h_type([np.array([[0.0, 1.0], [1.0, 0.0]])])
    assert not rep and any("skew" in msg for msg in rep.messages)
    J1, J2 = quaternionic().J[:2]
    flipped = J2.copy()
    flipped[0, 2] *= -1
    flipped[2, 0] *= -1
    rep = validate_h_type([J1, flipped])
    assert not rep and any("H-type" in msg for msg in rep.messages)


def test_group_law_by_hand():
    G = heisenberg(1)
    g = multiply(G, GroupPoint([1.0, 0.0], [0.0]), GroupPoint([0.0, 1.0], [0.0]))
    assert_allclose(g.z, [1.0, 1.0])
    assert_allclose(g.sigma, [-0.5])


@pytest.mark.parametrize("G", GROUPS, ids=lambda G: G.name)
def test_group_axioms(G):
    rng = np.random.default_rng(11)
    e = G.identity()
    for _ in range(25):
        a, b, c = (random_point(G, rng) for _ in range(3))
        lhs = multiply(G, multiply(G, a, b), c)
        rhs = multiply(G, a, multiply(G, b, c))
        assert_allclose(lhs.z, rhs.z, atol=1e-12)
        assert_allclose(lhs.sigma, rhs.sigma, atol=1e-12)
        ai = multiply(G, a, inverse(G, a))
        assert ai.is_identity() or np.allclose(np.r_[ai.z, ai.sigma], 0.0, atol=1e-14)
        ae = multiply(G, a, e)
        assert_allclose(ae.z, a.z)
        assert_allclose(ae.sigma, a.sigma)


@pytest.mark.parametrize("G", GROUPS, ids=lambda G: G.name)
def test_dilation_is_automorphism_and_scales_gauge(G):
    rng = np.random.default_rng(12)
    for lam in (0.3, 2.0, 7.5):
        a, b = random_point(G, rng), random_point(G, rng)
        lhs = dilate(G, lam, multiply(G, a, b))
        rhs = multiply(G, dilate(G, lam, a), dilate(G, lam, b))
        assert_allclose(lhs.z, rhs.z, atol=1e-12)
        assert_allclose(lhs.sigma, rhs.sigma, atol=1e-11)
        assert gauge(G, dilate(G, lam, a)) == pytest.approx(lam * gauge(G, a), rel=1e-13)


@given(x=coord, y=coord, s=coord)
@settings(max_examples=100, deadline=None)
def test_gauge_properties(x, y, s):
    G = heisenberg(1)
    g = GroupPoint([x, y], [s])
    assert gauge(G, g) == pytest.approx(gauge(G, inverse(G, g)), rel=1e-15)
    assert gauge(G, GroupPoint([x, y], [0.0])) == pytest.approx(np.hypot(x, y), rel=1e-13, abs=1e-300)
    assert gauge(G, GroupPoint([0.0, 0.0], [s])) == pytest.approx(2.0 * abs(s) ** 0.5, rel=1e-13, abs=1e-300)


def test_errors():
    G = heisenberg(1)
    with pytest.raises(ValueError):
        heisenberg(0)
    with pytest.raises(ValueError):
        GroupPoint([np.nan, 0.0], [0.0])
    with pytest.raises(ValueError):
        multiply(G, GroupPoint([1.0, 0.0, 0.0], [0.0]), G.identity())
    with pytest.raises(ValueError):
        dilate(G, -1.0, G.identity())
    with pytest.raises(ValueError):
        make_standard_group("octonionic")


@pytest.mark.parametrize("G", GROUPS, ids=lambda G: G.name)
def test_json_round_trip(G):
    H = group_from_json(group_to_json(G))
    assert (H.m, H.k) == (G.m, G.k)
    for a, b in zip(G.J, H.J):
        assert_allclose(a, b)


def test_json_dimension_mismatch():
    data = json.loads(group_to_json(heisenberg(1)))
    data["k"] = 2
    with pytest.raises(ValueError):
        group_from_json(json.dumps(data))

import numpy as np
import pytest

from cutloci import manifolds as mf
from cutloci import matfun
from cutloci.errors import UnsupportedDistance, UnsupportedGeodesic


S2 = mf.parse_manifold("sphere:2")
T2 = mf.parse_manifold("torus:2")
E2 = mf.parse_manifold("euclidean:2")
M2 = mf.parse_manifold("matspace:2")
GL2 = mf.parse_manifold("glplus:2")
U11 = mf.parse_manifold("upq:1,1")


def test_parse_roundtrip():
    for text in ["euclidean:3", "sphere:4", "torus:2", "matspace:3", "glplus:2", "upq:2,1"]:
        assert str(mf.parse_manifold(text)) == text


def test_point_validation():
    with pytest.raises(ValueError):
        mf.point(S2, [1.0, 1.0, 0.0])
    with pytest.raises(ValueError):
        mf.point(GL2, [[1.0, 0.0], [0.0, -1.0]])
    c, s = np.cosh(0.3), np.sinh(0.3)
    mf.point(U11, [[c, s], [s, c]])  # valid hyperbolic rotation
    with pytest.raises(ValueError):
        mf.point(U11, [[1.0, 0.5], [0.0, 1.0]])


def test_exp_map_sphere_antipode():
    p = mf.point(S2, [0.0, 0.0, 1.0])
    v = mf.tangent(p, [1.0, 0.0, 0.0])
    out = mf.exp_map(p, v, np.pi)
    assert np.allclose(out.coords, [0.0, 0.0, -1.0], atol=1e-12)


def test_exp_map_torus_wrap():
    p = mf.point(T2, [0.5, 0.5])
    v = mf.tangent(p, [1.0, 0.0])
    assert np.allclose(mf.exp_map(p, v, 0.25).coords, [0.75, 0.5])
    assert np.allclose(mf.exp_map(p, v, 0.75).coords, [0.25, 0.5])


def test_exp_map_glplus_diagonal():
    p = mf.point(GL2, np.eye(2))
    v = mf.tangent(p, np.eye(2))
    out = mf.exp_map(p, v, 1.0)
    assert np.allclose(out.coords, np.diag([np.e, np.e]))


def test_exp_map_glplus_rejects_bad_base():
    p = mf.point(GL2, np.diag([2.0, 1.0]))
    v = mf.tangent(p, np.eye(2))
    with pytest.raises(UnsupportedGeodesic):
        mf.exp_map(p, v, 1.0)


def test_exp_map_upq_stays_in_group():
    p = mf.point(U11, np.eye(2, dtype=complex))
    y = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    v = mf.tangent(p, y)
    for t in np.linspace(0.0, 3.0, 7):
        out = mf.exp_map(p, v, float(t))
        assert mf.upq_defect(U11, out.coords) <= 1e-8


def test_exp_map_upq_rejects_mixed_direction():
    p = mf.point(U11, np.eye(2, dtype=complex))
    y = np.array([[1.0j, 1.0], [1.0, 0.0]], dtype=complex)
    with pytest.raises(UnsupportedGeodesic):
        mf.exp_map(p, mf.tangent(p, y), 1.0)


def test_exp_map_time_zero_is_identity():
    cases = [
        (mf.point(S2, [1.0, 0.0, 0.0]), [0.0, 1.0, 0.0]),
        (mf.point(T2, [0.25, 0.75]), [0.3, -0.4]),
        (mf.point(E2, [1.0, 2.0]), [0.5, 0.5]),
    ]
    for p, vec in cases:
        out = mf.exp_map(p, mf.tangent(p, vec), 0.0)
        assert np.array_equal(out.coords, p.coords)


def test_distance_examples():
    assert mf.riem_distance(mf.point(S2, [0, 0, 1.0]), mf.point(S2, [0, 0, -1.0])) == pytest.approx(np.pi)
    assert mf.riem_distance(mf.point(T2, [0.5, 0.5]), mf.point(T2, [0.0, 0.5])) == pytest.approx(0.5)
    rot = np.array([[0.0, -1.0], [1.0, 0.0]])
    assert mf.riem_distance(mf.point(M2, np.eye(2)), mf.point(M2, rot)) == pytest.approx(2.0)


def test_distance_unsupported_on_groups():
    p = mf.point(GL2, np.eye(2))
    q = mf.point(GL2, np.diag([2.0, 1.0]))
    with pytest.raises(UnsupportedDistance):
        mf.riem_distance(p, q)


def test_inner_examples():
    p = mf.point(E2, [0.0, 0.0])
    e1 = mf.tangent(p, [1.0, 0.0])
    assert mf.inner(p, e1, e1) == pytest.approx(1.0)

    a = mf.point(GL2, np.diag([2.0, 2.0]))
    w = np.diag([1.0, 0.0])
    aw = mf.tangent(a, a.coords @ w)
    assert mf.inner(a, aw, aw) == pytest.approx(1.0)

    p = mf.point(U11, np.eye(2, dtype=complex))
    y = mf.tangent(p, np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex))
    assert mf.inner(p, y, y) == pytest.approx(2.0)


def _speed(p, v, t, h=1e-6):
    a = mf.exp_map(p, v, t - h)
    b = mf.exp_map(p, v, t + h)
    mid = mf.exp_map(p, v, t)
    if p.manifold.kind == "torus":
        diff = mf.torus_delta(b.coords, a.coords) / (2 * h)
    else:
        diff = (b.coords - a.coords) / (2 * h)
    w = mf.TangentVector.__new__(mf.TangentVector)
    object.__setattr__(w, "base", mid)
    object.__setattr__(w, "vec", diff)
    return np.sqrt(mf.inner(mid, w, w))


def test_geodesic_speed_constancy():
    rng = np.random.default_rng(7)
    cases = []
    p = mf.point(S2, [0.0, 0.0, 1.0])
    cases.append((p, mf.tangent(p, [0.7, 0.3, 0.0])))
    p = mf.point(T2, [0.21, 0.77])
    cases.append((p, mf.tangent(p, [0.3, 0.41])))
    p = mf.point(E2, [1.0, -1.0])
    cases.append((p, mf.tangent(p, rng.normal(size=2))))
    p = mf.point(GL2, np.eye(2))
    w = rng.normal(size=(2, 2))
    cases.append((p, mf.tangent(p, 0.5 * (w + w.T))))
    p = mf.point(U11, np.eye(2, dtype=complex))
    b = rng.normal() + 1j * rng.normal()
    cases.append((p, mf.tangent(p, np.array([[0, b], [np.conj(b), 0]]))))
    for p, v in cases:
        target = np.sqrt(mf.inner(p, v, v))
        for t in [0.1, 0.5, 1.1, 2.3, 2.9]:
            if p.manifold.kind == "torus":
                # avoid finite differencing across a wrap
                pos = p.coords + t * v.vec
                if np.any(np.abs(pos - np.round(pos)) < 1e-4):
                    continue
            assert abs(_speed(p, v, t) - target) <= 1e-5 * max(1.0, target)


def test_sphere_geodesics_stay_unit():
    p = mf.point(S2, [1.0, 0.0, 0.0])
    v = mf.tangent(p, [0.0, 0.8, 0.6])
    for t in np.linspace(0, 3, 13):
        assert abs(np.linalg.norm(mf.exp_map(p, v, float(t)).coords) - 1.0) <= 1e-10


def test_distance_symmetry_and_triangle():
    rng = np.random.default_rng(3)
    for kind, make in [
        ("sphere", lambda: mf.point(S2, _unit(rng.normal(size=3)))),
        ("torus", lambda: mf.point(T2, rng.uniform(size=2))),
        ("euclidean", lambda: mf.point(E2, rng.normal(size=2))),
        ("matspace", lambda: mf.point(M2, rng.normal(size=(2, 2)))),
    ]:
        for _ in range(250):
            a, b, c = make(), make(), make()
            dab = mf.riem_distance(a, b)
            assert abs(dab - mf.riem_distance(b, a)) <= 1e-10
            assert dab <= mf.riem_distance(a, c) + mf.riem_distance(c, b) + 1e-10


def _unit(x):
    return x / np.linalg.norm(x)


def test_upq_membership_defect_helper():
    c, s = np.cosh(1.0), np.sinh(1.0)
    a = np.array([[c, s], [s, c]], dtype=complex)
    assert mf.upq_defect(U11, a) <= 1e-12
    u = mf.point(U11, np.eye(2, dtype=complex))
    y = np.array([[0, 0.3 + 0.1j], [0.3 - 0.1j, 0]])
    out = mf.exp_map(u, mf.tangent(u, y), 2.0)
    assert mf.upq_defect(U11, out.coords) <= 1e-9


def test_default_t_max():
    assert mf.default_t_max(S2) > np.pi
    assert mf.default_t_max(T2) == pytest.approx(np.sqrt(2))
    assert mf.default_t_max(E2) is None

import math

import numpy as np
import pytest

from cutloci import cutengine as ce
from cutloci import manifolds as mf
from cutloci import submanifolds as sm
from cutloci.errors import NoCutInRange, OnCutLocus, OnSubmanifold

S2 = mf.parse_manifold("sphere:2")
S3 = mf.parse_manifold("sphere:3")
T2 = mf.parse_manifold("torus:2")
E2 = mf.parse_manifold("euclidean:2")
M2 = mf.parse_manifold("matspace:2")


# ---------------------------------------------------------------------------
# shoot
# ---------------------------------------------------------------------------

def test_shoot_equator_great_circle():
    eq = sm.EquatorSphere(S2, 1)
    foot = mf.point(S2, [1.0, 0.0, 0.0])
    v = mf.tangent(foot, [0.0, 0.0, 1.0])
    out = ce.shoot(eq, foot, v, np.pi / 4)
    assert np.allclose(out.coords, [np.cos(np.pi / 4), 0.0, np.sin(np.pi / 4)])


def test_shoot_orthogonal_straight_line():
    og = sm.OrthogonalGroup(M2)
    foot = mf.point(M2, np.eye(2))
    w = np.eye(2) / np.sqrt(2.0)
    out = ce.shoot(og, foot, mf.tangent(foot, w), np.sqrt(2.0))
    assert np.allclose(out.coords, np.diag([2.0, 2.0]))


# ---------------------------------------------------------------------------
# cut_time
# ---------------------------------------------------------------------------

def test_cut_time_point_on_sphere_is_pi():
    n = sm.FinitePoints(S2, [[0.0, 0.0, -1.0]])
    foot = n.points[0]
    for vec in ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.6, 0.8, 0.0]):
        rho = ce.cut_time(n, foot, mf.tangent(foot, vec))
        assert abs(rho - np.pi) <= 1e-9


def test_cut_time_equators_is_half_pi():
    for n, k in [(2, 0), (2, 1), (3, 1), (4, 2)]:
        amb = mf.parse_manifold(f"sphere:{n}")
        eq = sm.EquatorSphere(amb, k)
        foot = eq.sample_feet(1, seed=3)[0]
        v = eq.unit_normals(foot, seed=4, count=1)[0]
        rho = ce.cut_time(eq, foot, v)
        assert abs(rho - np.pi / 2) <= 1e-9


def test_cut_time_torus_wraparound():
    n = sm.FinitePoints(T2, [[0.5, 0.5]])
    foot = n.points[0]
    rho = ce.cut_time(n, foot, mf.tangent(foot, [1.0, 0.0]))
    assert abs(rho - 0.5) <= 1e-9


def test_cut_time_ellipse_minor_axis():
    el = sm.Ellipse(E2, 2.0, 1.0)
    foot = mf.point(E2, [0.0, 1.0])
    rho = ce.cut_time(el, foot, mf.tangent(foot, [0.0, -1.0]), t_max=3.0)
    assert abs(rho - 1.0) <= 1e-9


def test_cut_time_infinite_when_no_cut():
    el = sm.Ellipse(E2, 2.0, 1.0)
    foot = mf.point(E2, [0.0, 1.0])
    assert math.isinf(ce.cut_time(el, foot, mf.tangent(foot, [0.0, 1.0]), t_max=8.0))


def test_minimality_below_and_failure_above_rho():
    cases = []
    eq = sm.EquatorSphere(S3, 1)
    foot = eq.sample_feet(1, seed=9)[0]
    cases.append((eq, foot, eq.unit_normals(foot, seed=2, count=1)[0], None))
    hopf = sm.HopfLink(S3)
    foot = hopf.sample_feet(1, seed=9)[0]
    cases.append((hopf, foot, hopf.unit_normals(foot, seed=2, count=1)[0], None))
    torus = sm.FinitePoints(T2, [[0.5, 0.5]])
    foot = torus.points[0]
    cases.append((torus, foot, mf.tangent(foot, [0.8, 0.6]), None))
    el = sm.Ellipse(E2, 2.0, 1.0)
    foot = mf.point(E2, [0.0, 1.0])
    cases.append((el, foot, mf.tangent(foot, [0.0, -1.0]), 3.0))
    for n, foot, v, t_max in cases:
        rho = ce.cut_time(n, foot, v, t_max=t_max)
        for frac in np.linspace(0.1, 0.9, 9):
            t = frac * rho
            d = n.dist_to(ce.shoot(n, foot, v, t)).distance
            assert abs(d - t) <= 1e-7
        delta = 10 * ce.TOL_RHO_CLOSED
        d = n.dist_to(ce.shoot(n, foot, v, rho + delta)).distance
        assert d < rho + delta - ce.EPS_PRED_CLOSED


def test_rho_continuity_along_direction_family():
    # constant family on the equator case, genuinely varying on the torus
    eq = sm.EquatorSphere(S2, 1)
    foot = mf.point(S2, [1.0, 0.0, 0.0])
    rhos = []
    for sign in (1.0, -1.0):
        rhos.append(ce.cut_time(eq, foot, mf.tangent(foot, [0.0, 0.0, sign])))
    assert abs(rhos[0] - rhos[1]) <= 1e-2

    torus = sm.FinitePoints(T2, [[0.5, 0.5]])
    foot = torus.points[0]
    angles = np.arange(0.0, 0.2, 1e-3)
    prev = None
    for a in angles:
        rho = ce.cut_time(torus, foot, mf.tangent(foot, [np.cos(a), np.sin(a)]))
        if prev is not None:
            assert abs(rho - prev) <= 1e-2
        prev = rho


# ---------------------------------------------------------------------------
# separating_test / sample_cut_locus
# ---------------------------------------------------------------------------

def test_separating_test_examples():
    m1 = mf.parse_manifold("matspace:1")
    og1 = sm.OrthogonalGroup(m1)
    verdict = ce.separating_test(og1, mf.point(m1, [[0.0]]))
    assert verdict.separating and verdict.minimizer_set.multiplicity == 2

    hopf = sm.HopfLink(S3)
    verdict = ce.separating_test(hopf, mf.point(S3, [0.5, 0.5, 0.5, 0.5]))
    assert verdict.separating and verdict.minimizer_set.multiplicity == 2

    og2 = sm.OrthogonalGroup(M2)
    verdict = ce.separating_test(og2, mf.point(M2, np.diag([1.0, 0.0])))
    assert verdict.separating and verdict.minimizer_set.multiplicity == 2


def test_sample_cut_locus_equator_complement():
    eq = sm.EquatorSphere(S3, 1)
    samples, errors = ce.sample_cut_locus(eq, 8, 16, seed=21)
    assert not errors and len(samples) == 128
    for s in samples:
        assert abs(s.rho - np.pi / 2) <= 1e-8
        assert np.linalg.norm(s.cut_point.coords[:2]) <= 1e-8
        assert abs(s.rho - eq.dist_to(s.cut_point).distance) <= 1e-7


def test_sample_cut_locus_three_points_meridians():
    # cut points of k equatorial points lie on meridian half-circles through
    # the angular midpoints
    pts = [[np.cos(a), np.sin(a), 0.0] for a in (0.0, 2 * np.pi / 3, 4 * np.pi / 3)]
    n = sm.FinitePoints(S2, pts)
    samples, _ = ce.sample_cut_locus(n, 3, 64, seed=4)
    mids = [np.pi / 3, np.pi, 5 * np.pi / 3]
    for s in samples:
        x, y, z = s.cut_point.coords
        planar = np.hypot(x, y)
        if planar < 1e-9:
            continue  # pole: on every meridian
        ang = np.arctan2(y, x) % (2 * np.pi)
        assert min(abs(ang - m) for m in mids) <= 1e-6


def test_sample_determinism_and_thread_independence(monkeypatch):
    hopf = sm.HopfLink(S3)
    monkeypatch.setenv("CUTLOCI_THREADS", "1")
    s1, _ = ce.sample_cut_locus(hopf, 6, 6, seed=31)
    monkeypatch.setenv("CUTLOCI_THREADS", "4")
    s2, _ = ce.sample_cut_locus(hopf, 6, 6, seed=31)
    assert len(s1) == len(s2)
    for a, b in zip(s1, s2):
        assert a.rho == b.rho
        assert np.array_equal(a.cut_point.coords, b.cut_point.coords)


def test_separating_reverified_with_independent_seed():
    hopf = sm.HopfLink(S3)
    samples, _ = ce.sample_cut_locus(hopf, 4, 8, seed=55)
    angles = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
    grids = [
        np.stack([np.cos(angles), np.sin(angles), 0 * angles, 0 * angles], axis=1),
        np.stack([0 * angles, 0 * angles, np.cos(angles), np.sin(angles)], axis=1),
    ]
    for s in samples:
        assert s.classification == "separating"
        per_comp = [
            np.arccos(np.clip(g @ s.cut_point.coords, -1, 1)).min() for g in grids
        ]
        assert abs(per_comp[0] - per_comp[1]) <= 1e-6  # two geodesics confirmed


# ---------------------------------------------------------------------------
# flows
# ---------------------------------------------------------------------------

def test_morse_bott_flow_converges_to_meridian_point():
    eq = sm.EquatorSphere(S2, 1)
    lat = np.pi / 3
    q = mf.point(S2, [np.cos(lat), 0.0, np.sin(lat)])
    st = ce.morse_bott_flow(eq, q, 8.0)
    assert np.allclose(st.position.coords, [1.0, 0.0, 0.0], atol=1e-6)
    assert st.distance_to_n == pytest.approx(lat * np.exp(-16.0))


def test_flow_line_exponential_decay():
    eq = sm.EquatorSphere(S2, 1)
    q = mf.point(S2, [0.8, 0.0, 0.6])
    d0 = eq.dist_to(q).distance
    for t in (0.1, 0.5, 1.3):
        st = ce.morse_bott_flow(eq, q, t)
        f = eq.dist_to(st.position).distance ** 2
        assert f == pytest.approx(d0 ** 2 * np.exp(-4 * t), rel=1e-6)


def test_retract_lands_on_n():
    rng = np.random.default_rng(17)
    eq = sm.EquatorSphere(S2, 1)
    count = 0
    while count < 100:
        u = rng.normal(size=3)
        u /= np.linalg.norm(u)
        if abs(u[2]) < 1e-3 or abs(abs(u[2]) - 1.0) < 1e-3:
            continue
        out = ce.retract_to_n(eq, mf.point(S2, u), 1.0)
        assert eq.membership_defect(out) <= 1e-8
        count += 1


def test_flow_errors_on_cut_and_on_n():
    eq = sm.EquatorSphere(S2, 1)
    with pytest.raises(OnCutLocus):
        ce.morse_bott_flow(eq, mf.point(S2, [0.0, 0.0, 1.0]), 1.0)
    with pytest.raises(OnSubmanifold):
        ce.morse_bott_flow(eq, mf.point(S2, [1.0, 0.0, 0.0]), 1.0)


def test_push_to_cut_reaches_singular_matrix():
    og = sm.OrthogonalGroup(M2)
    q = mf.point(M2, np.diag([0.9, 0.8]))
    # path stays on the straight line through I and diag(2,3)
    for s in np.linspace(0.0, 1.0, 6):
        pos = ce.push_to_cut(og, q, float(s), t_max=5.0).coords
        step = pos - np.eye(2)
        line_dir = np.diag([1.0, 2.0]) / np.sqrt(5.0)
        resid = step - float(np.sum(step * line_dir)) * line_dir
        assert np.linalg.norm(resid) <= 1e-9
    end = ce.push_to_cut(og, q, 1.0, t_max=5.0)
    assert abs(np.linalg.det(end.coords)) <= 1e-6


def test_push_to_cut_raises_when_geodesic_never_cuts():
    # the N-geodesic from I through diag(2,3) has increasing singular values
    # and stays minimal forever, so there is no cut point to walk to
    og = sm.OrthogonalGroup(M2)
    with pytest.raises(NoCutInRange):
        ce.push_to_cut(og, mf.point(M2, np.diag([2.0, 3.0])), 1.0, t_max=20.0)


def test_retract_matches_polar_factor_for_orthogonal_group():
    og = sm.OrthogonalGroup(M2)
    rng = np.random.default_rng(23)
    for _ in range(10):
        a = rng.normal(size=(2, 2)) + 1.5 * np.eye(2)
        if np.linalg.svd(a, compute_uv=False).min() < 0.2:
            continue
        out = ce.retract_to_n(og, mf.point(M2, a), 1.0)
        from cutloci.matfun import polar

        assert np.allclose(out.coords, polar(a).orthogonal_factor, atol=1e-9)


# ---------------------------------------------------------------------------
# gradient checks and one-sided probes
# ---------------------------------------------------------------------------

def test_gradient_check_sphere_and_o2():
    rng = np.random.default_rng(29)
    eq = sm.EquatorSphere(S2, 1)
    for _ in range(10):
        u = rng.normal(size=3)
        u /= np.linalg.norm(u)
        if abs(u[2]) < 0.05 or abs(abs(u[2]) - 1.0) < 0.05:
            continue
        assert ce.gradient_check(eq, mf.point(S2, u)) <= 1e-4

    og = sm.OrthogonalGroup(M2)
    assert ce.gradient_check(og, mf.point(M2, np.diag([2.0, 3.0]))) <= 1e-5


def test_gradient_closed_form_o2_example():
    # grad f = 2A - 2 A (sqrt(A^T A))^{-1} = diag(2, 4) at diag(2, 3)
    og = sm.OrthogonalGroup(M2)
    a = np.diag([2.0, 3.0])
    h = 1e-5
    grad = np.zeros((2, 2))
    for i in range(2):
        for j in range(2):
            e = np.zeros((2, 2))
            e[i, j] = 1.0
            fp = og.dist_to(mf.point(M2, a + h * e)).distance ** 2
            fm = og.dist_to(mf.point(M2, a - h * e)).distance ** 2
            grad[i, j] = (fp - fm) / (2 * h)
    assert np.allclose(grad, np.diag([2.0, 4.0]), atol=1e-5)


def test_onesided_probe_separating_vs_p0():
    el = sm.Ellipse(E2, 2.0, 1.0)
    q = mf.point(E2, [0.5, 0.0])
    ms = el.dist_to(q)
    u = (q.coords - ms.minimizers[0].coords) / ms.distance
    pr = ce.onesided_derivative_probe(el, q, u)
    assert pr.left_slope == pytest.approx(2 * ms.distance, abs=1e-4)
    assert pr.slope_gap > 0.01

    pr0 = ce.onesided_derivative_probe(el, mf.point(E2, [1.5, 0.0]), np.array([1.0, 0.0]))
    assert abs(pr0.left_slope - pr0.right_slope) <= 1e-4
    assert pr0.right_quad == pytest.approx(1.0, rel=0.15)
    assert pr0.left_quad == pytest.approx(-1.0 / 3.0, rel=0.15)

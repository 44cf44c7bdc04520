import numpy as np
import pytest

from cutloci import groupgeo as gg
from cutloci import manifolds as mf
from cutloci import matfun
from cutloci import submanifolds as sm
from cutloci.errors import MembershipViolation


def rng(seed=0):
    return np.random.default_rng(seed)


# ---------------------------------------------------------------------------
# gradient flow in matrix space
# ---------------------------------------------------------------------------

def test_flow_constant_on_orthogonal_matrices():
    q = sm.haar_orthogonal(3, rng(1))
    for t in (0.0, 0.5, 2.0, 7.0):
        assert np.allclose(gg.flow_to_orthogonal(q, t), q, atol=1e-12)


def test_flow_limit_is_identity_for_spd_diagonal():
    a = np.diag([2.0, 3.0])
    assert np.linalg.norm(gg.flow_to_orthogonal(a, 10.0) - np.eye(2)) <= 1e-8


@pytest.mark.parametrize("seed", range(12))
def test_flow_ode_residual_random(seed):
    g = rng(seed)
    n = 2 + seed % 3
    a = g.normal(size=(n, n))
    while np.linalg.svd(a, compute_uv=False).min() < 0.1:
        a = g.normal(size=(n, n))
    for t in (0.0, 0.5, 1.0, 2.0):
        assert gg.flow_ode_residual(a, t) <= 1e-7


@pytest.mark.parametrize("seed", range(8))
def test_flow_gram_identity(seed):
    g = rng(seed + 100)
    a = g.normal(size=(3, 3))
    while np.linalg.svd(a, compute_uv=False).min() < 0.15:
        a = g.normal(size=(3, 3))
    for t in (0.3, 1.1):
        curve = gg.flow_to_orthogonal(a, t)
        assert np.linalg.norm(curve.T @ curve - gg.gram_flow_closed_form(a, t)) <= 1e-9


# ---------------------------------------------------------------------------
# Hessian of d^2(., O(n))
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n", [2, 3])
def test_hessian_is_twice_identity(n):
    m = n * (n + 1) // 2
    hess = gg.hessian_normal_check(np.eye(n))
    assert np.max(np.abs(hess - 2 * np.eye(m))) <= 1e-3


def test_hessian_at_random_orthogonal_point():
    q = sm.haar_orthogonal(2, rng(5))
    hess = gg.hessian_normal_check(q)
    assert np.max(np.abs(hess - 2 * np.eye(3))) <= 1e-3


def test_hessian_rejects_non_orthogonal():
    with pytest.raises(MembershipViolation):
        gg.hessian_normal_check(np.diag([2.0, 1.0]))


# ---------------------------------------------------------------------------
# left-invariant geodesic to SO(n)
# ---------------------------------------------------------------------------

def test_geodesic_endpoints_and_speed():
    g = rng(7)
    for n in (2, 3):
        a = g.normal(size=(n, n))
        if np.linalg.det(a) < 0:
            a[:, 0] = -a[:, 0]
        while np.linalg.svd(a, compute_uv=False).min() < 0.2:
            a = g.normal(size=(n, n))
            if np.linalg.det(a) < 0:
                a[:, 0] = -a[:, 0]
        start = gg.geodesic_to_so(a, 0.0)
        assert np.allclose(start, matfun.polar(a).orthogonal_factor, atol=1e-9)
        assert np.allclose(gg.geodesic_to_so(a, 1.0), a, atol=1e-9)
        speeds = [gg.geodesic_to_so_speed(a, t) for t in (0.1, 0.4, 0.9)]
        assert max(speeds) - min(speeds) <= 1e-6


def test_geodesic_constant_on_so():
    q = sm.haar_orthogonal(3, rng(8), special=True)
    for t in (0.0, 0.5, 1.0):
        assert np.allclose(gg.geodesic_to_so(q, t), q, atol=1e-10)


def test_geodesic_exponential_scaling():
    a = np.diag([np.e, np.e])
    for t in (0.0, 0.3, 1.0):
        assert np.allclose(gg.geodesic_to_so(a, t), np.diag([np.e ** t] * 2), atol=1e-12)


def test_geodesic_length_matches_closed_form_and_dist_to():
    a = np.diag([2.0, 3.0])
    target = np.sqrt(np.log(2.0) ** 2 + np.log(3.0) ** 2)
    assert abs(gg.geodesic_to_so_length(a) - target) <= 1e-8
    gl2 = mf.parse_manifold("glplus:2")
    so = sm.SpecialOrthogonal(gl2)
    assert abs(so.dist_to(mf.point(gl2, a)).distance - target) <= 1e-12


# ---------------------------------------------------------------------------
# U(p,q)
# ---------------------------------------------------------------------------

def u11(r, lam=1.0 + 0.0j):
    c, s = np.cosh(r), np.sinh(r)
    return np.array([[c, s], [lam * np.conj(s), lam * np.conj(c)]], dtype=complex)


def test_membership_examples():
    assert gg.upq_membership(np.eye(2, dtype=complex), 1, 1) == 0.0
    assert gg.upq_membership(u11(1.0), 1, 1) <= 1e-12
    block = np.diag([np.exp(0.3j), np.exp(-1.2j)])
    assert gg.upq_membership(block, 1, 1) <= 1e-12


def test_block_identities_on_random_members():
    g = rng(11)
    for p, q in ((1, 1), (2, 1)):
        for _ in range(20):
            a = gg.random_upq(p, q, g)
            assert gg.upq_block_identities(a, p, q).max_defect <= 1e-9


def test_inverse_closed_form_values():
    inv = gg.upq_inverse_closed_form(np.eye(2, dtype=complex), 1, 1)
    assert np.allclose(inv, 0.5 * np.eye(2))
    inv = gg.upq_inverse_closed_form(u11(1.0), 1, 1)
    t = np.tanh(1.0)
    assert np.allclose(inv, 0.5 * np.array([[1.0, -t], [-t, 1.0]]), atol=1e-12)


def test_inverse_matches_direct_inverse():
    g = rng(12)
    for _ in range(20):
        a = gg.random_upq(2, 1, g)
        direct = np.linalg.inv(a.conj().T @ a + np.eye(3))
        assert np.linalg.norm(gg.upq_inverse_closed_form(a, 2, 1) - direct) <= 1e-9


def test_inverse_rejects_non_members():
    with pytest.raises(MembershipViolation):
        gg.upq_inverse_closed_form(np.diag([2.0 + 0j, 1.0]), 1, 1)


def test_decompose_block_diagonal_gives_zero():
    block = np.diag([np.exp(0.5j), np.exp(-0.25j)])
    dec = gg.upq_decompose(block, 1, 1)
    assert np.linalg.norm(dec.n_part) <= 1e-12
    assert gg.dist_upq(block, 1, 1) <= 1e-12


def test_decompose_hyperbolic_rotation():
    dec = gg.upq_decompose(u11(1.0), 1, 1)
    assert np.allclose(dec.n_part, [[0.0, 1.0], [1.0, 0.0]], atol=1e-12)
    assert np.allclose(dec.unitary_part, np.eye(2), atol=1e-12)
    assert gg.dist_upq(u11(1.0), 1, 1) == pytest.approx(np.sqrt(2.0))


def test_decompose_roundtrip_recovers_generator():
    g = rng(13)
    for _ in range(20):
        b = g.normal(size=(2, 1)) + 1j * g.normal(size=(2, 1))
        y0 = gg.n_block(b)
        y0 *= 1.5 / np.linalg.norm(y0)
        a = matfun.mat_exp(y0)
        dec = gg.upq_decompose(a, 2, 1)
        assert np.linalg.norm(dec.n_part - y0) <= 1e-9
        assert np.linalg.norm(dec.unitary_part - np.eye(3)) <= 1e-9


def test_surjectivity_roundtrip_on_random_members():
    g = rng(14)
    for p, q in ((1, 1), (2, 1)):
        for _ in range(100):
            a = gg.random_upq(p, q, g)
            dec = gg.upq_decompose(a, p, q)
            assert np.linalg.norm(dec.reconstruct() - a) <= 1e-9


def test_sqrt_of_gram_stays_in_group():
    g = rng(15)
    for _ in range(20):
        a = gg.random_upq(2, 1, g)
        s = matfun.sym_sqrt(a.conj().T @ a)
        assert gg.upq_membership(s, 2, 1) <= 1e-8


def test_decomposition_deterministic():
    a = gg.random_upq(2, 1, rng(16))
    d1 = gg.upq_decompose(a, 2, 1)
    d2 = gg.upq_decompose(a, 2, 1)
    assert np.linalg.norm(d1.n_part - d2.n_part) <= 1e-10
    assert np.linalg.norm(d1.unitary_part - d2.unitary_part) <= 1e-10


def test_block_series_cross_check():
    g = rng(17)
    for _ in range(10):
        a = gg.random_upq(2, 1, g)
        dec = gg.upq_decompose(a, 2, 1)
        y_series = gg.upq_log_block_series(a, 2, 1)
        assert np.linalg.norm(y_series - dec.n_part) <= 1e-9


def test_exp_n_closed_form_matches_expm():
    g = rng(18)
    for p, q in ((1, 1), (2, 1), (2, 2)):
        for _ in range(10):
            b = g.normal(size=(p, q)) + 1j * g.normal(size=(p, q))
            y = gg.n_block(b)
            y *= g.uniform(0.1, 2.0) / np.linalg.norm(y)
            assert np.linalg.norm(gg.exp_n_closed(y, p, q) - matfun.mat_exp(y)) <= 1e-10


def test_dist_upq_scales_linearly_in_r():
    for r in (0.1, 1.0, 2.0):
        assert gg.dist_upq(u11(r), 1, 1) == pytest.approx(r * np.sqrt(2.0), abs=1e-8)


def test_exp_map_upq_matches_dist():
    # shooting from I in a unit n-direction for time t gives a point at
    # distance t from the subgroup
    u11m = mf.parse_manifold("upq:1,1")
    sub = sm.UpUqSubgroup(u11m)
    y = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex) / np.sqrt(2.0)
    base = mf.point(u11m, np.eye(2, dtype=complex))
    for t in (0.3, 1.0, 2.2):
        out = mf.exp_map(base, mf.tangent(base, y), t)
        assert sub.dist_to(out).distance == pytest.approx(t, abs=1e-9)

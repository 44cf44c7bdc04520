# cutloci/verify.py
"""Named verification suites behind ``cutloci verify --suite <name>``.

Each suite returns a list of Check rows (name, value, bound, direction,
pass).  The suites implement the package acceptance criteria at full listed
counts; the acceptance test module simply runs them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import cutengine, equivariant, groupgeo, matfun
from . import manifolds as mf
from . import submanifolds as sm


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    bound: float
    op: str = "<="  # "<=" or ">="

    @property
    def passed(self) -> bool:
        if math.isnan(self.value):
            return False
        return bool(self.value <= self.bound if self.op == "<=" else self.value >= self.bound)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "value": float(self.value),
            "bound": float(self.bound),
            "op": self.op,
            "pass": self.passed,
        }


SUITES = ("matfun", "flows", "groupgeo", "cutlocus", "equivariant", "fermat")


def run_suite(name: str, params: dict | None = None) -> list[Check]:
    params = params or {}
    if name == "all":
        out = []
        for s in SUITES:
            out.extend(run_suite(s, params))
        return out
    fn = {
        "matfun": suite_matfun,
        "flows": suite_flows,
        "groupgeo": suite_groupgeo,
        "cutlocus": suite_cutlocus,
        "equivariant": suite_equivariant,
        "fermat": suite_fermat,
    }.get(name)
    if fn is None:
        raise ValueError(f"unknown suite {name!r}; know {', '.join(SUITES)} and 'all'")
    return fn(**params) if name == "fermat" else fn()


# ---------------------------------------------------------------------------
# matfun
# ---------------------------------------------------------------------------

def suite_matfun() -> list[Check]:
    rng = np.random.default_rng(1001)
    frechet_err = 0.0
    sylvester_err = 0.0
    grad_err = 0.0
    polar_err = 0.0
    log_rt_err = 0.0
    gregory_err = 0.0
    for i in range(100):
        n = 2 + i % 5
        g = rng.normal(size=(n, n))
        a = g @ g.T + (0.5 + rng.random()) * np.eye(n)
        h = rng.normal(size=(n, n))
        h = 0.5 * (h + h.T)
        x = matfun.frechet_sqrt(a, h)
        r = matfun.sym_sqrt(a)
        sylvester_err = max(
            sylvester_err,
            np.linalg.norm(x @ r + r @ x - h) / max(1.0, np.linalg.norm(h)),
        )
        step = 1e-5
        fd = (matfun.sym_sqrt(a + step * h) - matfun.sym_sqrt(a - step * h)) / (2 * step)
        frechet_err = max(frechet_err, np.linalg.norm(x - fd) / max(1.0, np.linalg.norm(fd)))

        b = rng.normal(size=(n, n)) + 2.5 * np.eye(n)
        grad = matfun.grad_trace_sqrt(b)

        def tr_sqrt(m):
            return float(np.trace(matfun.sym_sqrt(m.T @ m)))

        fd_dir = (tr_sqrt(b + step * h) - tr_sqrt(b - step * h)) / (2 * step)
        grad_err = max(grad_err, abs(float(np.sum(grad * h)) - fd_dir) / max(1.0, abs(fd_dir)))

        c = rng.normal(size=(n, n))
        pf = matfun.polar(c)
        polar_err = max(
            polar_err,
            np.linalg.norm(pf.reconstruct() - c) / max(1.0, np.linalg.norm(c)),
        )

        s = rng.normal(size=(n, n))
        s = 0.5 * (s + s.T)
        s *= min(1.0, 2.0 / np.linalg.norm(s))
        e = matfun.mat_exp(s)
        log_rt_err = max(
            log_rt_err,
            np.linalg.norm(matfun.principal_log(e, "eigen") - s) / max(1.0, np.linalg.norm(s)),
        )
        gregory_err = max(
            gregory_err,
            np.linalg.norm(
                matfun.principal_log(e, "gregory") - matfun.principal_log(e, "eigen")
            ),
        )
    return [
        Check("frechet_sqrt_vs_fd_rel", frechet_err, 1e-6),
        Check("frechet_sylvester_identity", sylvester_err, 1e-10),
        Check("grad_trace_sqrt_vs_fd_rel", grad_err, 1e-6),
        Check("polar_reconstruction_rel", polar_err, 1e-10),
        Check("log_exp_roundtrip_rel", log_rt_err, 1e-9),
        Check("gregory_vs_eigen_log", gregory_err, 1e-9),
    ]


# ---------------------------------------------------------------------------
# flows (gradient flow in matrix space + Morse-Bott checks)
# ---------------------------------------------------------------------------

def suite_flows() -> list[Check]:
    rng = np.random.default_rng(2002)
    ode_resid = 0.0
    gram_err = 0.0
    orth_defect = 0.0
    for i in range(100):
        n = 2 + i % 3
        a = rng.normal(size=(n, n))
        while abs(np.linalg.det(a)) < 1e-3:
            a = rng.normal(size=(n, n))
        t = rng.uniform(0.0, 3.0)
        ode_resid = max(ode_resid, groupgeo.flow_ode_residual(a, t))
        g = groupgeo.flow_to_orthogonal(a, t)
        gram_err = max(
            gram_err, np.linalg.norm(g.T @ g - groupgeo.gram_flow_closed_form(a, t))
        )
        g10 = groupgeo.flow_to_orthogonal(a, 10.0)
        sing = np.linalg.svd(g10, compute_uv=False)
        orth_defect = max(orth_defect, float(np.sqrt(np.sum((sing - 1.0) ** 2))))

    s2 = mf.parse_manifold("sphere:2")
    m2 = mf.parse_manifold("matspace:2")
    eq = sm.EquatorSphere(s2, 1)
    og = sm.OrthogonalGroup(m2)
    grad_resid = 0.0
    decay_err = 0.0
    for i in range(100):
        if i % 2 == 0:
            u = rng.normal(size=3)
            u /= np.linalg.norm(u)
            while abs(abs(u[2]) - 1.0) < 1e-2 or abs(u[2]) < 1e-2:
                u = rng.normal(size=3)
                u /= np.linalg.norm(u)
            q = mf.point(s2, u)
            n_desc = eq
        else:
            a = rng.normal(size=(2, 2)) + 2.0 * np.eye(2)
            if np.linalg.svd(a, compute_uv=False).min() < 0.3:
                continue
            q = mf.point(m2, a)
            n_desc = og
        grad_resid = max(grad_resid, cutengine.gradient_check(n_desc, q))
        d0 = n_desc.dist_to(q).distance
        for t in (0.2, 0.7, 1.5):
            st = cutengine.morse_bott_flow(n_desc, q, t)
            f_val = n_desc.dist_to(st.position).distance ** 2
            target = d0 ** 2 * np.exp(-4.0 * t)
            decay_err = max(decay_err, abs(f_val - target) / max(target, 1e-300))
    return [
        Check("flow_ode_residual", ode_resid, 1e-7),
        Check("flow_gram_closed_form", gram_err, 1e-9),
        Check("flow_t10_orthogonality_defect", orth_defect, 1e-8),
        Check("gradient_check_residual", grad_resid, 1e-4),
        Check("flow_decay_e4t_rel", decay_err, 1e-6),
    ]


# ---------------------------------------------------------------------------
# groupgeo (Hessian, left-invariant geodesics, U(p,q))
# ---------------------------------------------------------------------------

def suite_groupgeo() -> list[Check]:
    rng = np.random.default_rng(3003)
    hess_err = 0.0
    for n in (2, 3):
        m = n * (n + 1) // 2
        hess = groupgeo.hessian_normal_check(np.eye(n))
        hess_err = max(hess_err, float(np.max(np.abs(hess - 2.0 * np.eye(m)))))
        q = sm.haar_orthogonal(n, rng)
        hess = groupgeo.hessian_normal_check(q)
        hess_err = max(hess_err, float(np.max(np.abs(hess - 2.0 * np.eye(m)))))

    so_err = 0.0
    len_err = 0.0
    for n in (2, 3, 4):
        gl = mf.parse_manifold(f"glplus:{n}")
        so = sm.SpecialOrthogonal(gl)
        for _ in range(25):
            a = rng.normal(size=(n, n))
            if np.linalg.det(a) < 0:
                a[:, 0] = -a[:, 0]
            if np.linalg.svd(a, compute_uv=False).min() < 0.1:
                continue
            sig = np.linalg.svd(a, compute_uv=False)
            formula = float(np.sqrt(np.sum(np.log(sig) ** 2)))
            d = so.dist_to(mf.point(gl, a)).distance
            so_err = max(so_err, abs(d - formula))
            len_err = max(len_err, abs(groupgeo.geodesic_to_so_length(a) - d))

    member_err = 0.0
    block_err = 0.0
    inv_err = 0.0
    rt_err = 0.0
    expn_err = 0.0
    for p, q in ((1, 1), (2, 1)):
        for _ in range(100):
            a = groupgeo.random_upq(p, q, rng)
            member_err = max(member_err, groupgeo.upq_membership(a, p, q))
            block_err = max(block_err, groupgeo.upq_block_identities(a, p, q).max_defect)
            gram1 = a.conj().T @ a + np.eye(p + q)
            inv_err = max(
                inv_err,
                np.linalg.norm(
                    groupgeo.upq_inverse_closed_form(a, p, q) - np.linalg.inv(gram1)
                ),
            )
            dec = groupgeo.upq_decompose(a, p, q)
            rt_err = max(rt_err, np.linalg.norm(dec.reconstruct() - a))
            b = rng.normal(size=(p, q)) + 1j * rng.normal(size=(p, q))
            y = groupgeo.n_block(b)
            y *= rng.uniform(0.2, 2.0) / np.linalg.norm(y)
            expn_err = max(
                expn_err,
                np.linalg.norm(groupgeo.exp_n_closed(y, p, q) - matfun.mat_exp(y)),
            )
    dist_err = 0.0
    for r in (0.1, 1.0, 2.0):
        c, s = np.cosh(r), np.sinh(r)
        a = np.array([[c, s], [s, c]], dtype=complex)
        dist_err = max(dist_err, abs(groupgeo.dist_upq(a, 1, 1) - r * np.sqrt(2.0)))
    return [
        Check("hessian_normal_2I_max_abs", hess_err, 1e-3),
        Check("so_distance_vs_log_singvals", so_err, 1e-12),
        Check("so_distance_vs_integrated_length", len_err, 1e-8),
        Check("upq_membership", member_err, 1e-9),
        Check("upq_block_identities", block_err, 1e-9),
        Check("upq_inverse_closed_form", inv_err, 1e-9),
        Check("upq_decompose_roundtrip", rt_err, 1e-9),
        Check("upq_dist_r_sqrt2", dist_err, 1e-8),
        Check("upq_block_exponential_vs_expm", expn_err, 1e-10),
    ]


# ---------------------------------------------------------------------------
# cutlocus (joins, points, O(n) oracle, ellipse regularity, Hopf link)
# ---------------------------------------------------------------------------

def multistart_orthogonal_min(a: np.ndarray, starts: int = 16, seed: int = 0, iters: int = 500):
    """Multistart Cayley-retraction descent of ||A - B||^2 over O(n);
    independent of the closed-form oracle."""
    n = a.shape[0]
    rng = np.random.default_rng(seed)
    eye = np.eye(n)
    best_val, best_b = np.inf, None
    for _ in range(starts):
        b = sm.haar_orthogonal(n, rng)
        f = float(np.sum(a * b))
        eta = 1.0
        for _ in range(iters):
            g = b.T @ a
            omega = 0.5 * (g - g.T)
            gn = float(np.linalg.norm(omega))
            if gn < 1e-11:
                break
            eta = min(eta * 2.0, 4.0)  # warm-start the line search
            accepted = False
            while eta > 1e-14:
                step = eta * omega
                cay = np.linalg.solve(eye - 0.5 * step, eye + 0.5 * step)
                b_new = b @ cay
                f_new = float(np.sum(a * b_new))
                if f_new > f + 1e-4 * eta * gn * gn:
                    b, f = b_new, f_new
                    accepted = True
                    break
                eta *= 0.5
            if not accepted:
                break
        b = _stationarity_polish(a, b)
        val = float(np.linalg.norm(a - b) ** 2)
        if val < best_val:
            best_val, best_b = val, b
    return best_val, best_b


def _skew_basis(n: int) -> list[np.ndarray]:
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            w = np.zeros((n, n))
            w[i, j], w[j, i] = 1.0, -1.0
            out.append(w / np.sqrt(2.0))
    return out


def _stationarity_polish(a: np.ndarray, b: np.ndarray, steps: int = 4) -> np.ndarray:
    """Newton iteration on the first-order condition skew(B^T A) = 0 in the
    skew coordinates of B e^Omega; quadratic convergence near a minimizer."""
    basis = _skew_basis(a.shape[0])
    for _ in range(steps):
        m = b.T @ a
        f_vec = np.array([float(np.sum(w * 0.5 * (m - m.T))) for w in basis])
        if np.linalg.norm(f_vec) < 1e-14:
            break
        jac = np.zeros((len(basis), len(basis)))
        for j, wj in enumerate(basis):
            dm = -0.5 * (wj @ m - (wj @ m).T)  # d/dt skew(e^{-tW} M) at t=0
            for i, wi in enumerate(basis):
                jac[i, j] = float(np.sum(wi * dm))
        try:
            delta = np.linalg.solve(jac, -f_vec)
        except np.linalg.LinAlgError:
            break
        omega = sum(d * w for d, w in zip(delta, basis))
        b = b @ matfun.mat_exp(omega)
    return b


def checks_sphere_joins() -> list[Check]:
    """rho = pi/2 for every S^k in S^n, cut points on the complement."""
    rho_err = 0.0
    comp_err = 0.0
    for n in (2, 3, 4):
        amb = mf.parse_manifold(f"sphere:{n}")
        for k in range(n):
            eq = sm.EquatorSphere(amb, k)
            samples, errs = cutengine.sample_cut_locus(eq, 32, 64, seed=100 + 10 * n + k)
            assert len(samples) == 2048 and not errs
            for s in samples:
                rho_err = max(rho_err, abs(s.rho - np.pi / 2))
                head = np.linalg.norm(s.cut_point.coords[: k + 1])
                tail = np.linalg.norm(s.cut_point.coords[k + 1:])
                comp_err = max(comp_err, head, abs(tail - 1.0))
    return [
        Check("join_rho_pi_over_2", rho_err, 1e-8),
        Check("join_cut_on_complement", comp_err, 1e-8),
    ]


def checks_point_cut_locus() -> list[Check]:
    checks = []
    rho_pi_err = 0.0
    for n in (2, 3):
        amb = mf.parse_manifold(f"sphere:{n}")
        pole = np.zeros(n + 1)
        pole[-1] = -1.0
        pt = sm.FinitePoints(amb, [pole])
        samples, _ = cutengine.sample_cut_locus(pt, 1, 256, seed=11 + n)
        for s in samples:
            rho_pi_err = max(rho_pi_err, abs(s.rho - np.pi))
    checks.append(Check("point_rho_pi", rho_pi_err, 1e-9))

    t2 = mf.parse_manifold("torus:2")
    center = sm.FinitePoints(t2, [[0.5, 0.5]])
    samples, _ = cutengine.sample_cut_locus(center, 1, 512, seed=5)
    bdry = 0.0
    for s in samples:
        c = s.cut_point.coords
        bdry = max(bdry, float(np.min(np.minimum(c, 1.0 - c))))
    checks.append(Check("torus_center_cut_on_boundary", bdry, 1e-6))
    return checks


def checks_orthogonal_oracle() -> list[Check]:
    rng = np.random.default_rng(4004)
    m2 = {n: mf.parse_manifold(f"matspace:{n}") for n in (2, 3)}
    og = {n: sm.OrthogonalGroup(m2[n]) for n in (2, 3)}
    f_gap = 0.0
    min_gap = 0.0
    for i in range(100):
        n = 2 + i % 2
        a = rng.normal(size=(n, n))
        ms = og[n].dist_to(mf.point(m2[n], a))
        f_closed = og[n].gram_trace_formula(a)
        best_val, best_b = multistart_orthogonal_min(a, starts=16, seed=i)
        f_gap = max(f_gap, abs(f_closed - best_val))
        if ms.multiplicity == 1:
            min_gap = max(min_gap, float(np.linalg.norm(ms.minimizers[0].coords - best_b)))
    checks = [
        Check("orthogonal_closed_vs_multistart", f_gap, 1e-6),
        Check("orthogonal_minimizer_vs_polar", min_gap, 1e-6),
    ]

    fam_err = 0.0
    for i in range(50):
        n = 2 + i % 2
        k = i % n  # rank 0 .. n-1
        u = sm.haar_orthogonal(n, rng)
        v = sm.haar_orthogonal(n, rng)
        d = np.zeros(n)
        d[:k] = rng.uniform(0.5, 2.0, size=k)
        a = u @ np.diag(d) @ v.T
        ms = og[n].dist_to(mf.point(m2[n], a))
        for member in ms.minimizers:
            fam_err = max(
                fam_err,
                abs(np.linalg.norm(a - member.coords) - ms.distance),
                og[n].membership_defect(member),
            )
    checks.append(Check("orthogonal_singular_family_equidistant", fam_err, 1e-9))
    return checks


def checks_ellipse_regularity() -> list[Check]:
    e2 = mf.parse_manifold("euclidean:2")
    el = sm.Ellipse(e2, 2.0, 1.0)
    worst_gap = np.inf
    for x in np.linspace(0.1, 1.4, 14):
        q = mf.point(e2, [x, 0.0])
        ms = el.dist_to(q)
        u = (q.coords - ms.minimizers[0].coords) / ms.distance
        pr = cutengine.onesided_derivative_probe(el, q, u)
        worst_gap = min(worst_gap, pr.slope_gap)
    p0 = mf.point(e2, [1.5, 0.0])
    pr = cutengine.onesided_derivative_probe(el, p0, np.array([1.0, 0.0]))
    return [
        Check("ellipse_separating_slope_gap", worst_gap, 0.01, op=">="),
        Check("ellipse_p0_first_order_match", abs(pr.left_slope - pr.right_slope), 1e-4),
        Check("ellipse_p0_right_quad_vs_1", abs(pr.right_quad - 1.0), 0.15),
        Check("ellipse_p0_left_quad_vs_minus_third", abs(pr.left_quad + 1.0 / 3.0), 0.15 / 3.0),
    ]


def checks_hopf_link() -> list[Check]:
    s3 = mf.parse_manifold("sphere:3")
    hopf = sm.HopfLink(s3)
    samples, errs = cutengine.sample_cut_locus(hopf, 32, 64, seed=77)
    assert len(samples) == 2048 and not errs
    torus_defect = 0.0
    mult_ok = True
    for s in samples:
        c = s.cut_point.coords
        torus_defect = max(
            torus_defect,
            abs(np.linalg.norm(c[:2]) - 1 / np.sqrt(2)),
            abs(np.linalg.norm(c[2:]) - 1 / np.sqrt(2)),
        )
        mult_ok = mult_ok and s.classification == "separating" and s.multiplicity == 2
    return [
        Check("hopf_cut_on_clifford_torus", torus_defect, 1e-6),
        Check("hopf_all_separating_mult2", 1.0 if mult_ok else 0.0, 1.0, op=">="),
    ]


def suite_cutlocus() -> list[Check]:
    return (
        checks_sphere_joins()
        + checks_point_cut_locus()
        + checks_orthogonal_oracle()
        + checks_ellipse_regularity()
        + checks_hopf_link()
    )


# ---------------------------------------------------------------------------
# equivariant
# ---------------------------------------------------------------------------

def suite_equivariant() -> list[Check]:
    checks: list[Check] = []
    s2 = mf.parse_manifold("sphere:2")
    s3 = mf.parse_manifold("sphere:3")
    cases = [
        (
            "antipodal_point_pair",
            sm.FinitePoints(s2, [[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]),
            equivariant.parse_action("antipodal", s2),
        ),
        (
            "hopf_equator_circle",
            sm.EquatorSphere(s3, 1),
            equivariant.parse_action("hopf", s3),
        ),
    ]
    floor = 1e-9
    for label, n_desc, action in cases:
        discrepancies = []
        for samples in (2000, 4000, 8000, 16000):
            rep = equivariant.equivariance_check(n_desc, action, samples=samples, seed=42)
            discrepancies.append(max(rep.max_discrepancy, floor))
        checks.append(Check(f"{label}_discrepancy_at_2000", discrepancies[0], 1e-3))
        monotone = all(
            discrepancies[i + 1] <= discrepancies[i] for i in range(len(discrepancies) - 1)
        )
        checks.append(
            Check(f"{label}_monotone_decrease", 1.0 if monotone else 0.0, 1.0, op=">=")
        )
    return checks


# ---------------------------------------------------------------------------
# fermat
# ---------------------------------------------------------------------------

def suite_fermat(n: int | None = None, d: int | None = None) -> list[Check]:
    checks: list[Check] = []
    if n is not None or d is not None:
        rep = equivariant.fermat_verify(int(d or 2), int(n or 1), grid=10, seed=42)
        checks.append(Check(f"fermat_d{rep.degree}_n{rep.n}_tie", rep.max_tie_residual, 1e-9))
        if math.isfinite(rep.min_offset_gap):
            checks.append(
                Check(f"fermat_d{rep.degree}_n{rep.n}_gap", rep.min_offset_gap, 1e-3, op=">=")
            )
        return checks

    for deg in range(2, 9):
        rep = equivariant.fermat_verify(deg, 1, grid=10, seed=42)
        checks.append(Check(f"fermat_n1_d{deg}_tie_residual", rep.max_tie_residual, 1e-9))
        checks.append(Check(f"fermat_n1_d{deg}_offset_gap", rep.min_offset_gap, 1e-3, op=">="))
        if deg == 2:
            checks.append(
                Check("fermat_n1_d2_note_parametrization", rep.note_param_max_tie, 1e-8)
            )
    for nn in (1, 2, 3):
        rep = equivariant.fermat_verify(2, nn, grid=10, seed=42)
        checks.append(
            Check(
                f"fermat_d2_n{nn}_separating_fraction",
                rep.separating_fraction,
                1.0,
                op=">=",
            )
        )
    return checks

# cutloci/cutengine.py
"""Cut-locus machinery: geodesic shooting from a submanifold, cut times,
separating-set detection, cut-point sampling and the distance-squared
gradient flow.

The cut time rho(v) is found by bisection on the minimality predicate

    minimal(t)  :=  t - d(N, shoot(foot, v, t)) <= eps

which holds exactly on [0, rho] and fails beyond.  The predicate slack is
tied to the oracle class: closed-form distance oracles run at 1e-12 (their
noise floor is machine precision), multistart oracles at 1e-7.  A single
slack of 1e-7 would bias detected cut times by ~eps/slope, which is more
than the 1e-8 accuracy the sphere-join checks require.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import matfun
from .errors import NoCutInRange, OnCutLocus, OnSubmanifold, OracleFailure, UnsupportedDistance
from .manifolds import (
    ManifoldPoint,
    TangentVector,
    default_t_max,
    exp_map,
    point,
    tangent,
    torus_delta,
)
from .submanifolds import FermatLift, MinimizerSet, Submanifold

TOL_RHO_CLOSED = 1e-9
TOL_RHO_MULTISTART = 1e-6
EPS_PRED_CLOSED = 1e-12
EPS_PRED_MULTISTART = 1e-7
BISECT_CAP = 80


def _oracle_class(n: Submanifold) -> tuple[float, float]:
    """(tol_rho, predicate slack) for the descriptor's distance oracle."""
    if isinstance(n, FermatLift) and n.nproj > 1:
        return TOL_RHO_MULTISTART, EPS_PRED_MULTISTART
    eps = n.predicate_slack if n.predicate_slack is not None else EPS_PRED_CLOSED
    return TOL_RHO_CLOSED, eps


def split_seed(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


@dataclass(frozen=True, eq=False)
class CutSample:
    foot: ManifoldPoint
    direction: TangentVector
    rho: float
    cut_point: ManifoldPoint
    multiplicity: int
    saturated: bool
    classification: str  # "separating" | "focal_or_unresolved"


@dataclass(frozen=True, eq=False)
class FlowState:
    position: ManifoldPoint
    time: float
    distance_to_n: float


@dataclass(frozen=True, eq=False)
class SeparatingVerdict:
    minimizer_set: MinimizerSet
    separating: bool


def shoot(n: Submanifold, foot: ManifoldPoint, v: TangentVector, t: float) -> ManifoldPoint:
    """Normal geodesic exp_foot(t v); minimal for t below the cut time."""
    return exp_map(foot, v, t)


def cut_time(
    n: Submanifold,
    foot: ManifoldPoint,
    v: TangentVector,
    t_max: float | None = None,
    tol_rho: float | None = None,
) -> float:
    """Cut time of the normal geodesic in direction v, or +inf if the
    geodesic stays minimal on the whole search bracket [0, t_max]."""
    if t_max is None:
        t_max = default_t_max(foot.manifold)
        if t_max is None:
            raise ValueError(f"t_max required for ambient {foot.manifold.kind}")
    tol_default, eps = _oracle_class(n)
    tol = tol_rho if tol_rho is not None else tol_default

    def minimal(t: float) -> bool:
        try:
            d = n.dist_to(shoot(n, foot, v, t)).distance
        except Exception as exc:  # pragma: no cover - oracle failure path
            raise OracleFailure(f"distance oracle failed at t={t}: {exc}") from exc
        return t - d <= eps

    if minimal(t_max):
        return math.inf
    lo, hi = 0.0, float(t_max)
    for _ in range(BISECT_CAP):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if minimal(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def vector_bisect(dist_fn, shoot_fn, n_rays: int, t_max: float, tol: float, eps: float):
    """Lockstep bisection of the minimality predicate over a batch of rays.

    ``shoot_fn(t_array) -> coords array``, ``dist_fn(coords) -> distances``.
    Returns cut times with +inf where the predicate holds at t_max.
    """
    t_edge = np.full(n_rays, float(t_max))
    d_edge = dist_fn(shoot_fn(t_edge))
    no_cut = (t_edge - d_edge) <= eps
    lo = np.zeros(n_rays)
    hi = np.full(n_rays, float(t_max))
    for _ in range(BISECT_CAP):
        if np.all(hi - lo <= tol):
            break
        mid = 0.5 * (lo + hi)
        d = dist_fn(shoot_fn(mid))
        is_min = (mid - d) <= eps
        lo = np.where(is_min, mid, lo)
        hi = np.where(is_min, hi, mid)
    rho = 0.5 * (lo + hi)
    rho[no_cut] = np.inf
    return rho


def separating_test(n: Submanifold, q: ManifoldPoint) -> SeparatingVerdict:
    """Multiplicity verdict at q: separating iff at least two distance
    minimal geodesics reach q (counted minimizers >= 2 or a continuum)."""
    ms = n.dist_to(q)
    return SeparatingVerdict(ms, ms.multiplicity >= 2 or ms.saturated)


def _thread_count() -> int:
    raw = os.environ.get("CUTLOCI_THREADS", "1")
    try:
        val = int(raw)
    except ValueError:
        val = 1
    if val == 0:
        return os.cpu_count() or 1
    return max(1, val)


def sample_cut_locus(
    n: Submanifold,
    feet_count: int,
    dirs_per_foot: int,
    seed: int = 42,
    t_max: float | None = None,
    feet: list[ManifoldPoint] | None = None,
    dirs: list[list[TangentVector]] | None = None,
) -> tuple[list[CutSample], list[str]]:
    """Sample the cut locus through the rescaled exponential: for seeded
    (foot, direction) pairs emit (rho, cut point, multiplicity).

    Rays whose geodesic stays minimal to t_max are reported in the error
    list, not as samples.  Deterministic for a fixed seed, independent of
    the thread count.
    """
    if feet is None:
        feet = n.sample_feet(feet_count, seed)
    if dirs is None:
        dirs = [
            n.unit_normals(foot, seed=int(np.random.SeedSequence([seed, i]).generate_state(1)[0]), count=dirs_per_foot)
            for i, foot in enumerate(feet)
        ]
    rays = [(i, j, foot, v) for i, (foot, dvs) in enumerate(zip(feet, dirs)) for j, v in enumerate(dvs)]

    horizon = t_max if t_max is not None else default_t_max(n.ambient)
    if horizon is None:
        raise ValueError(f"t_max required for ambient {n.ambient.kind}")

    rhos = _ray_cut_times(n, rays, horizon)

    def finish(item):
        (i, j, foot, v), rho = item
        if not math.isfinite(rho):
            return None, f"ray foot={i} dir={j}: no cut point within t_max={horizon}"
        try:
            cp = shoot(n, foot, v, rho)
            verdict = separating_test(n, cp)
        except Exception as exc:
            return None, f"ray foot={i} dir={j}: {exc}"
        ms = verdict.minimizer_set
        return (
            CutSample(
                foot=foot,
                direction=v,
                rho=float(rho),
                cut_point=cp,
                multiplicity=ms.multiplicity,
                saturated=ms.saturated,
                classification="separating" if verdict.separating else "focal_or_unresolved",
            ),
            None,
        )

    workers = _thread_count()
    items = list(zip(rays, rhos))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(finish, items))
    else:
        results = [finish(it) for it in items]
    samples = [s for s, _ in results if s is not None]
    errors = [e for _, e in results if e is not None]
    return samples, errors


def _ray_cut_times(n: Submanifold, rays, horizon: float) -> list[float]:
    tol, eps = _oracle_class(n)
    kind = n.ambient.kind
    batch_ok = kind in {"euclidean", "matspace", "sphere", "torus"}
    if batch_ok and rays:
        feet_arr = np.stack([r[2].coords.ravel() for r in rays]).astype(float)
        dirs_arr = np.stack([np.asarray(r[3].vec, dtype=float).ravel() for r in rays])
        if kind == "sphere":
            def shoot_fn(t):
                return feet_arr * np.cos(t)[:, None] + dirs_arr * np.sin(t)[:, None]
        elif kind == "torus":
            def shoot_fn(t):
                return np.mod(feet_arr + dirs_arr * t[:, None], 1.0)
        else:
            def shoot_fn(t):
                return feet_arr + dirs_arr * t[:, None]

        dist_fn = n.batch_distance
        if dist_fn(shoot_fn(np.zeros(len(rays)))) is not None:
            return list(vector_bisect(dist_fn, shoot_fn, len(rays), horizon, tol, eps))
    out = []
    for _, _, foot, v in rays:
        out.append(cut_time(n, foot, v, t_max=horizon))
    return out


# ---------------------------------------------------------------------------
# gradient flow of the squared distance
# ---------------------------------------------------------------------------

def geodesic_through(n: Submanifold, q: ManifoldPoint):
    """Unique minimal geodesic data (foot m, unit direction u at m, d(q)).

    Raises OnCutLocus when the nearest point is ambiguous and OnSubmanifold
    when q lies on N itself.
    """
    ms = n.dist_to(q)
    if ms.multiplicity >= 2 or ms.saturated:
        raise OnCutLocus(f"{ms.multiplicity} minimal geodesics at the query point")
    d = ms.distance
    if d < 1e-10:
        raise OnSubmanifold("query point lies on the submanifold")
    m = ms.minimizers[0]
    kind = q.manifold.kind
    if kind in {"euclidean", "matspace"}:
        u = (q.coords - m.coords) / d
    elif kind == "sphere":
        u = (q.coords - m.coords * np.cos(d)) / np.sin(d)
        u = u - np.dot(u, m.coords) * m.coords
        u = u / np.linalg.norm(u)
    elif kind == "torus":
        u = torus_delta(q.coords, m.coords) / d
    elif kind == "glplus":
        w = matfun.principal_log(matfun.sym_sqrt(q.coords.T @ q.coords), "eigen")
        u = m.coords @ (w / np.linalg.norm(w))
    elif kind == "upq":
        y = 0.5 * matfun.principal_log(q.coords.conj().T @ q.coords, "eigen")
        u = m.coords @ (y / np.linalg.norm(y))
    else:
        raise UnsupportedDistance(kind)
    return m, tangent(m, u), d


def morse_bott_flow(n: Submanifold, q: ManifoldPoint, t: float) -> FlowState:
    """Negative gradient flow of d(N,.)^2 at time t: the point gamma(d e^{-2t})
    on the unique minimal geodesic through q."""
    m, u, d = geodesic_through(n, q)
    s = d * math.exp(-2.0 * t)
    return FlowState(position=exp_map(m, u, s), time=float(t), distance_to_n=s)


def retract_to_n(n: Submanifold, q: ManifoldPoint, s: float) -> ManifoldPoint:
    """Reparametrized flow line: s=0 is q, s=1 lands on N."""
    m, u, d = geodesic_through(n, q)
    return exp_map(m, u, (1.0 - s) * d)


def push_to_cut(
    n: Submanifold, q: ManifoldPoint, s: float, t_max: float | None = None
) -> ManifoldPoint:
    """Walk from q to the first cut point along its minimal geodesic:
    s=0 is q, s=1 is the cut point.  Raises NoCutInRange when the geodesic
    stays minimal up to t_max (empty cut along this ray)."""
    m, u, d = geodesic_through(n, q)
    rho = cut_time(n, m, u, t_max=t_max)
    if not math.isfinite(rho):
        raise NoCutInRange("geodesic through q stays minimal within t_max")
    return exp_map(m, u, s * rho + (1.0 - s) * d)


def _tangent_frame(q: ManifoldPoint) -> list[np.ndarray]:
    kind = q.manifold.kind
    dim = q.coords.size
    if kind in {"euclidean", "matspace", "torus"}:
        return [e.reshape(q.coords.shape) for e in np.eye(dim)]
    if kind == "sphere":
        frame = []
        for e in np.eye(dim):
            v = e - np.dot(e, q.coords) * q.coords
            for f in frame:
                v = v - np.dot(v, f) * f
            nrm = np.linalg.norm(v)
            if nrm > 1e-8:
                frame.append(v / nrm)
        return frame
    raise UnsupportedDistance(f"gradient frame unsupported on {kind}")


def gradient_check(n: Submanifold, q: ManifoldPoint, h: float = 1e-5) -> float:
    """|| grad_num f - 2 d(q) gamma'(d(q)) || with grad_num from central
    finite differences of f = d(N,.)^2 in an orthonormal frame at q."""
    m, u, d = geodesic_through(n, q)
    kind = q.manifold.kind
    if kind == "sphere":
        velocity = -m.coords * np.sin(d) + u.vec * np.cos(d)
    else:
        velocity = u.vec
    closed = 2.0 * d * velocity
    frame = _tangent_frame(q)
    grad = np.zeros(len(frame))
    for i, e in enumerate(frame):
        qp = exp_map(q, tangent(q, e), h)
        qm = exp_map(q, tangent(q, e), -h)
        fp = n.dist_to(qp).distance ** 2
        fm = n.dist_to(qm).distance ** 2
        grad[i] = (fp - fm) / (2.0 * h)
    closed_components = np.array([float(np.sum(np.conj(e) * closed).real) for e in frame])
    return float(np.linalg.norm(grad - closed_components))


@dataclass(frozen=True)
class ProbeResult:
    left_slope: float
    right_slope: float
    left_quad: float
    right_quad: float

    @property
    def slope_gap(self) -> float:
        return self.left_slope - self.right_slope


def _richardson(hs: np.ndarray, vals: np.ndarray) -> float:
    """Neville extrapolation of first-order one-sided quotients to h -> 0."""
    tbl = list(vals.astype(float))
    h = list(hs.astype(float))
    k = len(tbl)
    for order in range(1, k):
        new = []
        for i in range(k - order):
            num = h[i] * tbl[i + 1] - h[i + order] * tbl[i]
            new.append(num / (h[i] - h[i + order]))
        tbl = new
    return float(tbl[0])


def onesided_derivative_probe(
    n: Submanifold,
    q: ManifoldPoint,
    direction: np.ndarray,
    h_sequence=(1e-2, 1e-3, 1e-4, 1e-5),
    h_second=(1e-2, 5e-3, 2.5e-3),
) -> ProbeResult:
    """One-sided first and second difference quotients of d^2 along the
    straight probe through q in the given unit direction.

    left quotients use [g(0)-g(-h)]/h, right use [g(h)-g(0)]/h; first-order
    values are Richardson extrapolated.  At a separating point probed along
    an incoming N-geodesic the left slope is 2 d(q) while the right slope is
    2 d(q) cos(omega) < 2 d(q)."""
    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u)

    def g(eps: float) -> float:
        return n.dist_to(exp_map(q, tangent(q, u), eps)).distance ** 2

    g0 = g(0.0)
    hs = np.asarray(h_sequence, dtype=float)
    right_q = np.array([(g(h) - g0) / h for h in hs])
    left_q = np.array([(g0 - g(-h)) / h for h in hs])
    right = _richardson(hs, right_q)
    left = _richardson(hs, left_q)
    rq, lq = [], []
    for h in h_second:
        rq.append((g(2 * h) - 2 * g(h) + g0) / (2 * h * h))
        lq.append((g(-2 * h) - 2 * g(-h) + g0) / (2 * h * h))
    return ProbeResult(
        left_slope=left,
        right_slope=right,
        left_quad=float(np.mean(lq)),
        right_quad=float(np.mean(rq)),
    )

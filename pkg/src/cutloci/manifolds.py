# cutloci/manifolds.py
"""Model Riemannian manifolds with closed-form exponential maps.

Supported kinds:

====================  =========================================================
euclidean:n           R^n with the flat metric
sphere:n              unit n-sphere in R^(n+1), round metric
torus:n               flat torus [0,1)^n
matspace:n            n x n real matrices with the Frobenius metric
glplus:n              GL+(n,R) with the left-invariant metric generated by the
                      Euclidean inner product at I; geodesics only through the
                      orthogonal subgroup in symmetric directions
upq:p,q               the indefinite unitary group U(p,q) with the
                      left-invariant trace metric; geodesics only through
                      U(p)xU(q) in the supported Lie-algebra directions
====================  =========================================================
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import matfun
from .errors import BaseMismatch, UnsupportedDistance, UnsupportedGeodesic

POINT_TOL = 1e-10
GROUP_TOL = 1e-9


@dataclass(frozen=True)
class ManifoldId:
    kind: str  # euclidean | sphere | torus | matspace | glplus | upq
    n: int     # sphere dimension for "sphere", matrix size for matrix kinds
    p: int = 0
    q: int = 0

    def __post_init__(self):
        if self.kind not in {"euclidean", "sphere", "torus", "matspace", "glplus", "upq"}:
            raise ValueError(f"unknown manifold kind {self.kind!r}")
        if self.kind == "upq":
            if self.p < 1 or self.q < 1:
                raise ValueError("upq requires p >= 1 and q >= 1")
        elif self.n < 1:
            raise ValueError("dimension must be >= 1")

    @property
    def is_matrix(self) -> bool:
        return self.kind in {"matspace", "glplus", "upq"}

    @property
    def size(self) -> int:
        """Matrix size for matrix kinds, coordinate length otherwise."""
        if self.kind == "upq":
            return self.p + self.q
        if self.kind == "sphere":
            return self.n + 1
        return self.n

    def __str__(self) -> str:
        if self.kind == "upq":
            return f"upq:{self.p},{self.q}"
        return f"{self.kind}:{self.n}"


def parse_manifold(text: str) -> ManifoldId:
    """Parse CLI strings like "sphere:2", "upq:1,1"."""
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    if kind == "upq":
        p, q = (int(x) for x in rest.split(","))
        return ManifoldId(kind="upq", n=p + q, p=p, q=q)
    return ManifoldId(kind=kind, n=int(rest))


def ipq_matrix(p: int, q: int) -> np.ndarray:
    return np.diag(np.concatenate([np.ones(p), -np.ones(q)])).astype(complex)


def upq_defect(m: ManifoldId, a: np.ndarray) -> float:
    ipq = ipq_matrix(m.p, m.q)
    return float(np.linalg.norm(a.conj().T @ ipq @ a - ipq))


def _validate_point(m: ManifoldId, coords: np.ndarray) -> np.ndarray:
    if m.kind in {"euclidean", "torus"}:
        coords = np.asarray(coords, dtype=float).reshape(m.n)
        if m.kind == "torus":
            if np.any(coords < -POINT_TOL) or np.any(coords >= 1.0):
                coords = np.mod(coords, 1.0)
        return coords
    if m.kind == "sphere":
        coords = np.asarray(coords, dtype=float).reshape(m.n + 1)
        if abs(np.linalg.norm(coords) - 1.0) > POINT_TOL:
            raise ValueError(f"sphere point has norm {np.linalg.norm(coords):.12f}")
        return coords
    if m.kind == "matspace":
        return matfun.as_matrix(coords, field="real").reshape(m.n, m.n)
    if m.kind == "glplus":
        coords = matfun.as_matrix(coords, field="real").reshape(m.n, m.n)
        if np.linalg.det(coords) <= 0:
            raise ValueError("glplus point must have positive determinant")
        return coords
    # upq
    coords = matfun.as_matrix(coords, field="complex").reshape(m.size, m.size)
    if upq_defect(m, coords) > GROUP_TOL:
        raise ValueError(f"upq membership defect {upq_defect(m, coords):.3e}")
    return coords


@dataclass(frozen=True, eq=False)
class ManifoldPoint:
    manifold: ManifoldId
    coords: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "coords", _validate_point(self.manifold, self.coords))


@dataclass(frozen=True, eq=False)
class TangentVector:
    base: ManifoldPoint
    vec: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = self.base.manifold
        vec = np.asarray(self.vec, dtype=complex if m.kind == "upq" else float)
        vec = vec.reshape(self.base.coords.shape)
        if m.kind == "sphere" and abs(float(np.dot(vec, self.base.coords))) > POINT_TOL:
            raise ValueError("sphere tangent vector is not orthogonal to the base point")
        object.__setattr__(self, "vec", vec)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))


def point(manifold: ManifoldId, coords) -> ManifoldPoint:
    return ManifoldPoint(manifold=manifold, coords=np.asarray(coords))


def tangent(p: ManifoldPoint, vec) -> TangentVector:
    return TangentVector(base=p, vec=np.asarray(vec))


# ---- geodesics ----------------------------------------------------------------

def _glplus_geodesic_data(p: ManifoldPoint, v: TangentVector) -> np.ndarray:
    b = p.coords
    if np.linalg.norm(b.T @ b - np.eye(b.shape[0])) > GROUP_TOL:
        raise UnsupportedGeodesic("glplus geodesics are supported only through SO(n)")
    w = b.T @ v.vec
    if np.linalg.norm(w - w.T) > GROUP_TOL * max(1.0, np.linalg.norm(w)):
        raise UnsupportedGeodesic("direction must be B*W with W symmetric")
    return 0.5 * (w + w.T)


def _upq_geodesic_data(p: ManifoldPoint, v: TangentVector) -> np.ndarray:
    m = p.manifold
    u = p.coords
    pp, qq = m.p, m.q
    if np.linalg.norm(u[:pp, pp:]) > GROUP_TOL or np.linalg.norm(u[pp:, :pp]) > GROUP_TOL:
        raise UnsupportedGeodesic("upq geodesics are supported only through U(p)xU(q)")
    y = np.linalg.solve(u, v.vec)
    diag_norm = np.linalg.norm(y[:pp, :pp]) + np.linalg.norm(y[pp:, pp:])
    off = y[:pp, pp:]
    off_norm = np.linalg.norm(off) + np.linalg.norm(y[pp:, :pp])
    in_n = (
        diag_norm <= GROUP_TOL * max(1.0, np.linalg.norm(y))
        and np.linalg.norm(y[pp:, :pp] - off.conj().T) <= GROUP_TOL * max(1.0, np.linalg.norm(y))
    )
    skew_a = y[:pp, :pp]
    skew_d = y[pp:, pp:]
    in_k = (
        off_norm <= GROUP_TOL * max(1.0, np.linalg.norm(y))
        and np.linalg.norm(skew_a + skew_a.conj().T) <= GROUP_TOL
        and np.linalg.norm(skew_d + skew_d.conj().T) <= GROUP_TOL
    )
    if not (in_n or in_k):
        raise UnsupportedGeodesic("direction must be U*Y with Y in n or in u(p)+u(q)")
    return y


def exp_map(p: ManifoldPoint, v: TangentVector, t: float) -> ManifoldPoint:
    """Geodesic exp_p(t v) on the model manifold of p."""
    m = p.manifold
    if v.base is not p and not np.array_equal(v.base.coords, p.coords):
        raise BaseMismatch("tangent vector is not based at p")
    if m.kind in {"euclidean", "matspace"}:
        return ManifoldPoint(m, p.coords + t * v.vec)
    if m.kind == "torus":
        return ManifoldPoint(m, np.mod(p.coords + t * v.vec, 1.0))
    if m.kind == "sphere":
        speed = v.norm
        if speed == 0.0:
            return p
        ang = speed * t
        coords = p.coords * np.cos(ang) + (v.vec / speed) * np.sin(ang)
        return ManifoldPoint(m, coords / np.linalg.norm(coords))
    if m.kind == "glplus":
        w = _glplus_geodesic_data(p, v)
        return ManifoldPoint(m, p.coords @ matfun.mat_exp(t * w))
    if m.kind == "upq":
        y = _upq_geodesic_data(p, v)
        return ManifoldPoint(m, p.coords @ matfun.mat_exp(t * y))
    raise UnsupportedGeodesic(m.kind)


def torus_delta(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Shortest displacement b -> a on the flat torus (componentwise wrap)."""
    d = a - b
    return d - np.round(d)


def sphere_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Great-circle distance, stable near 0 and near pi.

    arccos(a.b) loses ~1e-16/sin(d) near the endpoints; chord-based arcsin
    forms keep absolute accuracy ~1e-15 everywhere, which the cut-time
    bisection relies on.
    """
    if float(np.dot(a, b)) >= 0.0:
        return float(2.0 * np.arcsin(min(1.0, 0.5 * np.linalg.norm(a - b))))
    return float(np.pi - 2.0 * np.arcsin(min(1.0, 0.5 * np.linalg.norm(a + b))))


def sphere_distance_batch(points: np.ndarray, ref: np.ndarray) -> np.ndarray:
    dots = points @ ref
    near = 0.5 * np.linalg.norm(points - ref, axis=-1)
    far = 0.5 * np.linalg.norm(points + ref, axis=-1)
    return np.where(
        dots >= 0.0,
        2.0 * np.arcsin(np.minimum(1.0, near)),
        np.pi - 2.0 * np.arcsin(np.minimum(1.0, far)),
    )


def riem_distance(p: ManifoldPoint, q: ManifoldPoint) -> float:
    """Point-to-point geodesic distance where a closed form exists."""
    m = p.manifold
    if m != q.manifold:
        raise BaseMismatch("points on different manifolds")
    if m.kind in {"euclidean", "matspace"}:
        return float(np.linalg.norm(p.coords - q.coords))
    if m.kind == "sphere":
        return sphere_distance(p.coords, q.coords)
    if m.kind == "torus":
        best = np.inf
        diff = p.coords - q.coords
        for shift in itertools.product((-1.0, 0.0, 1.0), repeat=m.n):
            best = min(best, float(np.linalg.norm(diff + np.asarray(shift))))
        return best
    raise UnsupportedDistance(f"no point-to-point distance on {m.kind}")


def inner(p: ManifoldPoint, u: TangentVector, v: TangentVector) -> float:
    """Riemannian inner product of two tangent vectors at p."""
    if not np.array_equal(u.base.coords, p.coords) or not np.array_equal(v.base.coords, p.coords):
        raise BaseMismatch("tangent vectors not based at p")
    m = p.manifold
    if m.kind in {"euclidean", "sphere", "torus", "matspace"}:
        return float(np.real(np.sum(np.conj(u.vec) * v.vec)))
    if m.kind == "glplus":
        au = np.linalg.solve(p.coords, u.vec)
        av = np.linalg.solve(p.coords, v.vec)
        return float(np.trace(au.T @ av))
    if m.kind == "upq":
        au = np.linalg.solve(p.coords, u.vec)
        av = np.linalg.solve(p.coords, v.vec)
        return float(np.real(np.trace(au.conj().T @ av)))
    raise UnsupportedDistance(m.kind)


def default_t_max(m: ManifoldId) -> float | None:
    """Default cut-time search horizon; None means the caller must supply one.

    The sphere horizon sits just past the diameter pi so that a cut at
    exactly pi (antipodal point) is still inside the bracket.
    """
    if m.kind == "sphere":
        return np.pi * (1.0 + 1e-6) + 1e-6
    if m.kind == "torus":
        return float(np.sqrt(m.n))
    return None

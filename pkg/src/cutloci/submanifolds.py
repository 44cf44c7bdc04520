# cutloci/submanifolds.py
"""Submanifold descriptors with distance oracles and minimizer enumeration.

Each descriptor knows three things about its submanifold N:

* ``dist_to(q)``        exact distance d(N, q) plus the set of points of N
                        realizing it (the equidistant set), closed form
                        wherever one exists;
* ``unit_normals(...)`` seeded samples from the unit normal space at a point
                        of N;
* ``sample_feet(...)``  seeded points on N for cut-locus sampling.

Minimizer multiplicity counts distance-minimal geodesics: on the flat torus
two wrap-around geodesics to the same point of N count twice, and continua
(e.g. the orthogonal-completion family at a rank-deficient matrix) are
returned as capped representative samples with ``saturated=True``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import matfun
from .errors import (
    LogSpectrumViolation,
    NotOnSubmanifold,
    QuarticSolveFailure,
    UnsupportedAmbient,
)
from .manifolds import ManifoldId, ManifoldPoint, TangentVector, point, riem_distance, tangent

EPS_TIE = 1e-7        # distances closer than this tie
DELTA_CLUSTER = 1e-4  # minimizers closer than this merge
SATURATED_CAP = 32    # representative cap for continua
RANK_TOL = 1e-10
ON_N_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class MinimizerSet:
    distance: float
    minimizers: list[ManifoldPoint] = field(repr=False)
    multiplicity: int
    saturated: bool = False
    family_tag: str | None = None


def _cluster(points: list[np.ndarray], delta: float = DELTA_CLUSTER) -> list[np.ndarray]:
    reps: list[np.ndarray] = []
    for c in points:
        if all(np.linalg.norm(c - r) > delta for r in reps):
            reps.append(c)
    return reps


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


class Submanifold:
    """Base descriptor; concrete kinds override the oracle methods."""

    ambient: ManifoldId
    label: str
    # noise floor of dist_to, used as minimality-predicate slack; None means
    # the engine default for the oracle class
    predicate_slack: float | None = None

    def _check_ambient(self, q: ManifoldPoint) -> None:
        if q.manifold != self.ambient:
            raise UnsupportedAmbient(
                f"{self.label} lives in {self.ambient}, got point on {q.manifold}"
            )

    def dist_to(self, q: ManifoldPoint) -> MinimizerSet:
        raise NotImplementedError

    def membership_defect(self, p: ManifoldPoint) -> float:
        raise NotImplementedError

    def unit_normals(self, p: ManifoldPoint, seed: int, count: int) -> list[TangentVector]:
        raise NotImplementedError

    def sample_feet(self, count: int, seed: int) -> list[ManifoldPoint]:
        raise NotImplementedError

    def batch_distance(self, coords: np.ndarray) -> np.ndarray | None:
        """Vectorized d(N, .) over stacked coordinates, or None if unsupported."""
        return None

    def require_on(self, p: ManifoldPoint, tol: float = 1e-8) -> None:
        defect = self.membership_defect(p)
        if defect > tol:
            raise NotOnSubmanifold(f"membership defect {defect:.3e} > {tol:.1e}")


# ---------------------------------------------------------------------------
# finite point sets
# ---------------------------------------------------------------------------

class FinitePoints(Submanifold):
    def __init__(self, ambient: ManifoldId, points_list, label: str = "points"):
        self.ambient = ambient
        self.points = [point(ambient, c) for c in points_list]
        if not self.points:
            raise ValueError("need at least one point")
        self.label = label

    def dist_to(self, q: ManifoldPoint) -> MinimizerSet:
        self._check_ambient(q)
        dists = np.array([riem_distance(p, q) for p in self.points])
        d0 = float(dists.min())
        tied = [self.points[i] for i in np.flatnonzero(dists <= d0 + EPS_TIE)]
        reps = _cluster([p.coords for p in tied])
        multiplicity = len(reps)
        saturated = False
        if self.ambient.kind == "torus":
            multiplicity = self._torus_geodesic_count(q, d0)
        elif self.ambient.kind == "sphere" and d0 >= np.pi - 1e-9:
            # antipodal point: a continuum of minimal geodesics to one foot
            saturated = True
            multiplicity = max(multiplicity, 2)
        return MinimizerSet(
            distance=d0,
            minimizers=[point(self.ambient, c) for c in reps],
            multiplicity=multiplicity,
            saturated=saturated,
        )

    def _torus_geodesic_count(self, q: ManifoldPoint, d0: float) -> int:
        import itertools

        count = 0
        for p in self.points:
            diff = q.coords - p.coords
            for shift in itertools.product((-1.0, 0.0, 1.0), repeat=self.ambient.n):
                if abs(np.linalg.norm(diff + np.asarray(shift)) - d0) <= EPS_TIE:
                    count += 1
        return max(count, 1)

    def membership_defect(self, p: ManifoldPoint) -> float:
        return float(min(riem_distance(p, x) for x in self.points))

    def unit_normals(self, p: ManifoldPoint, seed: int, count: int) -> list[TangentVector]:
        self.require_on(p)
        rng = np.random.default_rng(seed)
        out = []
        for _ in range(count):
            v = rng.normal(size=p.coords.shape)
            if self.ambient.kind == "sphere":
                v = v - np.dot(v, p.coords) * p.coords
            out.append(tangent(p, _unit(v)))
        return out

    def sample_feet(self, count: int, seed: int) -> list[ManifoldPoint]:
        return [self.points[i % len(self.points)] for i in range(count)]

    def batch_distance(self, coords: np.ndarray) -> np.ndarray:
        pts = np.stack([p.coords for p in self.points])
        if self.ambient.kind == "sphere":
            from .manifolds import sphere_distance_batch

            cols = [sphere_distance_batch(coords, p) for p in pts]
            return np.stack(cols, axis=1).min(axis=1)
        if self.ambient.kind == "torus":
            import itertools

            best = np.full(coords.shape[0], np.inf)
            for shift in itertools.product((-1.0, 0.0, 1.0), repeat=self.ambient.n):
                diff = coords[:, None, :] - pts[None, :, :] + np.asarray(shift)
                best = np.minimum(best, np.linalg.norm(diff, axis=2).min(axis=1))
            return best
        diff = coords[:, None, :] - pts[None, :, :]
        return np.linalg.norm(diff.reshape(coords.shape[0], len(self.points), -1), axis=2).min(axis=1)


# ---------------------------------------------------------------------------
# coordinate sub-spheres of S^n
# ---------------------------------------------------------------------------

class EquatorSphere(Submanifold):
    """S^k embedded in the first k+1 coordinates of S^n."""

    def __init__(self, ambient: ManifoldId, k: int):
        if ambient.kind != "sphere":
            raise UnsupportedAmbient("equator descriptor needs a sphere ambient")
        if not 0 <= k <= ambient.n - 1:
            raise ValueError(f"need 0 <= k <= n-1, got k={k}, n={ambient.n}")
        self.ambient = ambient
        self.k = k
        self.label = f"equator:{k}"

    def _embed(self, head: np.ndarray) -> np.ndarray:
        out = np.zeros(self.ambient.n + 1)
        out[: self.k + 1] = head
        return out

    def dist_to(self, q: ManifoldPoint) -> MinimizerSet:
        self._check_ambient(q)
        head = q.coords[: self.k + 1]
        hn = float(np.linalg.norm(head))
        d = float(np.arccos(np.clip(hn, -1.0, 1.0)))
        if hn <= 1e-9:
            # whole equator is equidistant at pi/2
            reps = self._grid_points(min(SATURATED_CAP, 2 * (self.k + 1) * 4))
            saturated = self.k >= 1
            mult = len(reps) if not saturated else max(len(reps), 2)
            return MinimizerSet(d, reps, multiplicity=mult, saturated=saturated,
                                family_tag=f"S^{self.k} (full equator)")
        m = point(self.ambient, self._embed(head / hn))
        return MinimizerSet(d, [m], multiplicity=1)

    def _grid_points(self, count: int) -> list[ManifoldPoint]:
        if self.k == 0:
            return [point(self.ambient, self._embed(np.array([s]))) for s in (1.0, -1.0)]
        rng = np.random.default_rng(20240 + self.k)
        out = []
        for _ in range(count):
            out.append(point(self.ambient, self._embed(_unit(rng.normal(size=self.k + 1)))))
        return out

    def membership_defect(self, p: ManifoldPoint) -> float:
        tail = p.coords[self.k + 1:]
        head = p.coords[: self.k + 1]
        return float(np.linalg.norm(tail) + abs(np.linalg.norm(head) - 1.0))

    def unit_normals(self, p: ManifoldPoint, seed: int, count: int) -> list[TangentVector]:
        self.require_on(p)
        m = self.ambient.n - self.k  # dimension of the normal sphere + 1
        rng = np.random.default_rng(seed)
        out = []
        for i in range(count):
            if m == 1:
                w = np.array([1.0 if i % 2 == 0 else -1.0])
            else:
                w = _unit(rng.normal(size=m))
            vec = np.zeros(self.ambient.n + 1)
            vec[self.k + 1:] = w
            out.append(tangent(p, vec))
        return out

    def normal_circle(self, p: ManifoldPoint, angles: np.ndarray) -> list[TangentVector]:
        """Deterministic normal directions for 2-D normal spaces (grid use)."""
        m = self.ambient.n - self.k
        if m != 2:
            raise ValueError("normal_circle needs a 2-dimensional normal space")
        out = []
        for a in angles:
            vec = np.zeros(self.ambient.n + 1)
            vec[self.k + 1] = np.cos(a)
            vec[self.k + 2] = np.sin(a)
            out.append(tangent(p, vec))
        return out

    def sample_feet(self, count: int, seed: int) -> list[ManifoldPoint]:
        rng = np.random.default_rng(seed)
        out = []
        for i in range(count):
            if self.k == 0:
                head = np.array([1.0 if i % 2 == 0 else -1.0])
            else:
                head = _unit(rng.normal(size=self.k + 1))
            out.append(point(self.ambient, self._embed(head)))
        return out

    def batch_distance(self, coords: np.ndarray) -> np.ndarray:
        hn = np.linalg.norm(coords[:, : self.k + 1], axis=1)
        return np.arccos(np.clip(hn, -1.0, 1.0))


# ---------------------------------------------------------------------------
# ellipse in the plane
# ---------------------------------------------------------------------------

class Ellipse(Submanifold):
    """x^2/a^2 + y^2/b^2 = 1 in R^2 with a > b > 0.

    The nearest point for a query (x0, y0) has foot (a^2 x0/(t+a^2),
    b^2 y0/(t+b^2)) where t is the unique root of the foot-point quartic in
    (-b^2, inf).  On the major axis inside the open segment |x| <
    (a^2-b^2)/a there are two symmetric minimizers.
    """

    # the foot point is ill-conditioned near the major axis (quartic root
    # next to the t = -b^2 pole), so the oracle noise floor sits higher
    predicate_slack = 1e-10

    def __init__(self, ambient: ManifoldId, a: float, b: float):
        if ambient.kind != "euclidean" or ambient.n != 2:
            raise UnsupportedAmbient("ellipse descriptor needs euclidean:2")
        if not a > b > 0:
            raise ValueError("need a > b > 0")
        self.ambient = ambient
        self.a = float(a)
        self.b = float(b)
        self.cusp = (a * a - b * b) / a
        self.label = f"ellipse:{a},{b}"

    def _implicit(self, x: float, y: float) -> float:
        return (x / self.a) ** 2 + (y / self.b) ** 2 - 1.0

    def _quartic_root(self, ax: float, ay: float) -> float:
        a, b = self.a, self.b

        def g(t):
            return (a * ax / (t + a * a)) ** 2 + (b * ay / (t + b * b)) ** 2 - 1.0

        lo = -b * b + 1e-12
        if g(lo) <= 0.0:
            raise QuarticSolveFailure("no sign change at the left bracket end")
        hi = max(1.0, a * ax + b * ay)
        for _ in range(200):
            if g(hi) < 0.0:
                break
            hi *= 2.0
        else:
            raise QuarticSolveFailure("failed to bracket the quartic root")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if g(mid) > 0.0:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-15 * max(1.0, abs(hi)):
                break
        t = 0.5 * (lo + hi)

        def dg(tt):
            return (
                -2.0 * (a * ax) ** 2 / (tt + a * a) ** 3
                - 2.0 * (b * ay) ** 2 / (tt + b * b) ** 3
            )

        for _ in range(3):  # polish: the root is simple, Newton is safe here
            slope = dg(t)
            if slope == 0.0:
                break
            step = g(t) / slope
            t_new = t - step
            if not lo <= t_new <= hi:
                break
            t = t_new
        return t

    def _foot(self, x: float, y: float) -> tuple[float, float]:
        t = self._quartic_root(abs(x), abs(y))
        fx = self.a ** 2 * abs(x) / (t + self.a ** 2)
        fy = self.b ** 2 * abs(y) / (t + self.b ** 2)
        return float(np.copysign(fx, x) if x else fx), float(np.copysign(fy, y) if y else fy)

    def _opposite_side_distance(self, x: float, y: float) -> float:
        """Best distance to the half of the ellipse across the major axis."""
        sign = -1.0 if y > 0 else 1.0
        thetas = np.linspace(0.0, np.pi, 257)
        pts_x = self.a * np.cos(thetas)
        pts_y = sign * self.b * np.sin(thetas)
        d2 = (pts_x - x) ** 2 + (pts_y - y) ** 2
        i = int(np.argmin(d2))
        lo, hi = thetas[max(i - 1, 0)], thetas[min(i + 1, len(thetas) - 1)]

        def f(t):
            return (self.a * np.cos(t) - x) ** 2 + (sign * self.b * np.sin(t) - y) ** 2

        golden = (np.sqrt(5.0) - 1.0) / 2.0
        c = hi - golden * (hi - lo)
        dd = lo + golden * (hi - lo)
        for _ in range(90):
            if f(c) < f(dd):
                hi = dd
            else:
                lo = c
            c = hi - golden * (hi - lo)
            dd = lo + golden * (hi - lo)
        t = 0.5 * (lo + hi)
        return float(np.sqrt(f(t)))

    def dist_to(self, q: ManifoldPoint) -> MinimizerSet:
        self._check_ambient(q)
        x, y = float(q.coords[0]), float(q.coords[1])
        if abs(self._implicit(x, y)) <= ON_N_TOL:
            return MinimizerSet(0.0, [q], multiplicity=1)
        a, b = self.a, self.b
        if abs(y) <= 1e-12:
            ax = abs(x)
            if ax < self.cusp - 1e-12:
                xc = a * a * x / (a * a - b * b)
                yc = b * np.sqrt(max(0.0, 1.0 - (xc / a) ** 2))
                d = float(np.hypot(x - xc, yc))
                mins = [point(self.ambient, [xc, yc]), point(self.ambient, [xc, -yc])]
                if abs(yc) < DELTA_CLUSTER / 2:  # merged at the cusp
                    mins, mult = mins[:1], 1
                else:
                    mult = 2
                return MinimizerSet(d, mins, multiplicity=mult)
            vx = np.copysign(a, x) if x else a
            return MinimizerSet(abs(ax - a), [point(self.ambient, [vx, 0.0])], multiplicity=1)
        fx, fy = self._foot(x, y)
        d = float(np.hypot(x - fx, y - fy))
        mins = [point(self.ambient, [fx, fy])]
        mult = 1
        if self._implicit(x, y) < 0 and abs(x) < self.a:
            d_opp = self._opposite_side_distance(x, y)
            if d_opp - d <= EPS_TIE:
                # recover the opposite foot from the mirrored query's quartic
                mult = 2
                fx2, fy2 = self._foot(x, -y)
                mins.append(point(self.ambient, [fx2, -fy2]))
        return MinimizerSet(d, mins, multiplicity=mult)

    def membership_defect(self, p: ManifoldPoint) -> float:
        return abs(self._implicit(float(p.coords[0]), float(p.coords[1])))

    def unit_normals(self, p: ManifoldPoint, seed: int, count: int) -> list[TangentVector]:
        self.require_on(p)
        x, y = float(p.coords[0]), float(p.coords[1])
        n = _unit(np.array([x / self.a ** 2, y / self.b ** 2]))
        return [tangent(p, n if i % 2 == 0 else -n) for i in range(count)]

    def sample_feet(self, count: int, seed: int) -> list[ManifoldPoint]:
        rng = np.random.default_rng(seed)
        thetas = rng.uniform(0.0, 2 * np.pi, size=count)
        return [point(self.ambient, [self.a * np.cos(t), self.b * np.sin(t)]) for t in thetas]

    def batch_distance(self, coords: np.ndarray) -> np.ndarray:
        out = np.empty(coords.shape[0])
        for i, (x, y) in enumerate(coords):
            ms = self.dist_to(point(self.ambient, [x, y]))
            out[i] = ms.distance
        return out


# ---------------------------------------------------------------------------
# orthogonal group inside matrix space
# ---------------------------------------------------------------------------

def haar_orthogonal(n: int, rng: np.random.Generator, special: bool = False) -> np.ndarray:
    a = rng.normal(size=(n, n))
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))
    if special and np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    elif not special and rng.random() < 0.5 and n >= 1:
        q[:, 0] = -q[:, 0]
    return q


class OrthogonalGroup(Submanifold):
    """O(n) inside the Euclidean matrix space M(n, R).

    d^2(A, O(n)) = n + tr(A^T A) - 2 tr sqrt(A^T A) = sum (sigma_i - 1)^2;
    invertible A has the polar factor as unique minimizer, a rank-k matrix
    has the whole family U (I_k + O(n-k)) V^T.
    """

    def __init__(self, ambient: ManifoldId):
        if ambient.kind != "matspace":
            raise UnsupportedAmbient("orthogonal descriptor needs matspace ambient")
        self.ambient = ambient
        self.n = ambient.n
        self.label = f"orthogonal:{self.n}"

    @staticmethod
    def gram_trace_formula(a: np.ndarray) -> float:
        """The closed-form d^2 as written: n + tr(A^T A) - 2 tr sqrt(A^T A)."""
        n = a.shape[0]
        return float(n + np.trace(a.T @ a) - 2.0 * np.trace(matfun.sym_sqrt(a.T @ a)))

    def dist_to(self, q: ManifoldPoint) -> MinimizerSet:
        self._check_ambient(q)
        a = q.coords
        u, sing, vh = np.linalg.svd(a)
        d = float(np.sqrt(np.sum((sing - 1.0) ** 2)))
        k = int(np.sum(sing > RANK_TOL))
        n = self.n
        if k == n:
            m = point(self.ambient, u @ vh)
            return MinimizerSet(d, [m], multiplicity=1)
        tag = f"U(I_{k}+O({n - k}))V^T"
        members = [self._family_member(u, vh, k, c) for c in self._completions(n - k)]
        saturated = (n - k) >= 2
        mult = len(members)
        return MinimizerSet(d, members, multiplicity=mult, saturated=saturated, family_tag=tag)

    def _completions(self, m: int) -> list[np.ndarray]:
        if m == 1:
            return [np.array([[1.0]]), np.array([[-1.0]])]
        rng = np.random.default_rng(777 + m)
        comps = [np.eye(m), np.diag([1.0] * (m - 1) + [-1.0])]
        while len(comps) < SATURATED_CAP:
            comps.append(haar_orthogonal(m, rng))
        return comps

    def _family_member(self, u, vh, k, c) -> ManifoldPoint:
        n = self.n
        block = np.eye(n)
        block[k:, k:] = c
        return point(self.ambient, u @ block @ vh)

    def membership_defect(self, p: ManifoldPoint) -> float:
        a = p.coords
        return float(np.linalg.norm(a.T @ a - np.eye(self.n)))

    def unit_normals(self, p: ManifoldPoint, seed: int, count: int) -> list[TangentVector]:
        self.require_on(p)
        rng = np.random.default_rng(seed)
        out = []
        for _ in range(count):
            w = rng.normal(size=(self.n, self.n))
            w = 0.5 * (w + w.T)
            w /= np.linalg.norm(w)
            out.append(tangent(p, p.coords @ w))
        return out

    def sample_feet(self, count: int, seed: int) -> list[ManifoldPoint]:
        rng = np.random.default_rng(seed)
        return [point(self.ambient, haar_orthogonal(self.n, rng)) for _ in range(count)]

    def batch_distance(self, coords: np.ndarray) -> np.ndarray:
        sing = np.linalg.svd(coords.reshape(-1, self.n, self.n), compute_uv=False)
        return np.sqrt(np.sum((sing - 1.0) ** 2, axis=1))


# ---------------------------------------------------------------------------
# SO(n) inside GL+(n) with the left-invariant metric
# ---------------------------------------------------------------------------

class SpecialOrthogonal(Submanifold):
    """SO(n) in GL+(n,R); d(A, SO(n)) = || log sqrt(A^T A) ||_F."""

    def __init__(self, ambient: ManifoldId):
        if ambient.kind != "glplus":
            raise UnsupportedAmbient("specialorthogonal descriptor needs glplus ambient")
        self.ambient = ambient
        self.n = ambient.n
        self.label = f"specialorthogonal:{self.n}"

    def dist_to(self, q: ManifoldPoint) -> MinimizerSet:
        self._check_ambient(q)
        a = q.coords
        u, sing, vh = np.linalg.svd(a)
        if sing.min() <= RANK_TOL:
            raise LogSpectrumViolation("matrix is numerically singular")
        d = float(np.sqrt(np.sum(np.log(sing) ** 2)))
        m = point(self.ambient, u @ vh)
        return MinimizerSet(d, [m], multiplicity=1)

    def membership_defect(self, p: ManifoldPoint) -> float:
        a = p.coords
        if np.linalg.det(a) < 0:
            return 2.0
        return float(np.linalg.norm(a.T @ a - np.eye(self.n)))

    def unit_normals(self, p: ManifoldPoint, seed: int, count: int) -> list[TangentVector]:
        self.require_on(p)
        rng = np.random.default_rng(seed)
        out = []
        for _ in range(count):
            w = rng.normal(size=(self.n, self.n))
            w = 0.5 * (w + w.T)
            w /= np.linalg.norm(w)
            out.append(tangent(p, p.coords @ w))
        return out

    def sample_feet(self, count: int, seed: int) -> list[ManifoldPoint]:
        rng = np.random.default_rng(seed)
        return [
            point(self.ambient, haar_orthogonal(self.n, rng, special=True))
            for _ in range(count)
        ]

    def batch_distance(self, coords: np.ndarray) -> np.ndarray:
        sing = np.linalg.svd(coords.reshape(-1, self.n, self.n), compute_uv=False)
        return np.sqrt(np.sum(np.log(sing) ** 2, axis=1))


# ---------------------------------------------------------------------------
# U(p) x U(q) inside U(p,q)
# ---------------------------------------------------------------------------

def random_block_unitary(p: int, q: int, rng: np.random.Generator) -> np.ndarray:
    def haar_u(m):
        z = (rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))) / np.sqrt(2.0)
        qq, rr = np.linalg.qr(z)
        return qq * (np.diag(rr) / np.abs(np.diag(rr)))

    out = np.zeros((p + q, p + q), dtype=complex)
    out[:p, :p] = haar_u(p)
    out[p:, p:] = haar_u(q)
    return out


class UpUqSubgroup(Submanifold):
    """U(p) x U(q) in U(p,q); d(A) = 0.5 || log(A* A) ||_F."""

    def __init__(self, ambient: ManifoldId):
        if ambient.kind != "upq":
            raise UnsupportedAmbient("upuq descriptor needs an upq ambient")
        self.ambient = ambient
        self.p, self.q = ambient.p, ambient.q
        self.label = f"upuq:{self.p},{self.q}"

    def dist_to(self, q: ManifoldPoint) -> MinimizerSet:
        self._check_ambient(q)
        a = q.coords
        gram = a.conj().T @ a
        w = np.linalg.eigvalsh(0.5 * (gram + gram.conj().T))
        if w.min() <= 0:
            raise LogSpectrumViolation("Gram matrix not positive definite")
        d = 0.5 * float(np.sqrt(np.sum(np.log(w) ** 2)))
        s = matfun.sym_sqrt(gram)
        minimizer = a @ np.linalg.inv(s)
        return MinimizerSet(d, [point(self.ambient, minimizer)], multiplicity=1)

    def membership_defect(self, p: ManifoldPoint) -> float:
        a = p.coords
        pp = self.p
        off = np.linalg.norm(a[:pp, pp:]) + np.linalg.norm(a[pp:, :pp])
        ua = a[:pp, :pp]
        ud = a[pp:, pp:]
        unit = np.linalg.norm(ua.conj().T @ ua - np.eye(pp)) + np.linalg.norm(
            ud.conj().T @ ud - np.eye(self.q)
        )
        return float(off + unit)

    def unit_normals(self, p: ManifoldPoint, seed: int, count: int) -> list[TangentVector]:
        self.require_on(p)
        rng = np.random.default_rng(seed)
        out = []
        for _ in range(count):
            b = rng.normal(size=(self.p, self.q)) + 1j * rng.normal(size=(self.p, self.q))
            y = np.zeros((self.p + self.q, self.p + self.q), dtype=complex)
            y[: self.p, self.p:] = b
            y[self.p:, : self.p] = b.conj().T
            y /= np.linalg.norm(y)
            out.append(tangent(p, p.coords @ y))
        return out

    def sample_feet(self, count: int, seed: int) -> list[ManifoldPoint]:
        rng = np.random.default_rng(seed)
        return [point(self.ambient, random_block_unitary(self.p, self.q, rng)) for _ in range(count)]


# ---------------------------------------------------------------------------
# the Hopf link in S^3
# ---------------------------------------------------------------------------

class HopfLink(Submanifold):
    """The two coordinate circles {(cos t, sin t, 0, 0)} u {(0, 0, cos t, sin t)}."""

    def __init__(self, ambient: ManifoldId):
        if ambient.kind != "sphere" or ambient.n != 3:
            raise UnsupportedAmbient("hopflink descriptor needs sphere:3")
        self.ambient = ambient
        self.label = "hopflink"

    def _component_data(self, q: np.ndarray):
        h1 = float(np.linalg.norm(q[:2]))
        h2 = float(np.linalg.norm(q[2:]))
        return h1, h2

    def dist_to(self, qp: ManifoldPoint) -> MinimizerSet:
        self._check_ambient(qp)
        q = qp.coords
        h1, h2 = self._component_data(q)
        d1 = float(np.arccos(np.clip(h1, -1.0, 1.0)))
        d2 = float(np.arccos(np.clip(h2, -1.0, 1.0)))
        entries = []
        for comp, (h, d) in enumerate([(h1, d1), (h2, d2)]):
            if h <= 1e-9:
                grid = np.linspace(0.0, 2 * np.pi, 17)[:-1]
                pts = [self._circle_point(comp, t) for t in grid]
                entries.append((d, pts, True))
            else:
                head = q[:2] / h if comp == 0 else q[2:] / h
                entries.append((d, [self._circle_point_from_head(comp, head)], False))
        d0 = min(e[0] for e in entries)
        mins: list[ManifoldPoint] = []
        saturated = False
        mult = 0
        for d, pts, sat in entries:
            if d <= d0 + EPS_TIE:
                mins.extend(pts)
                saturated = saturated or sat
                mult += max(len(pts), 2) if sat else len(pts)
        return MinimizerSet(d0, mins, multiplicity=mult, saturated=saturated)

    def _circle_point(self, comp: int, t: float) -> ManifoldPoint:
        c = np.zeros(4)
        if comp == 0:
            c[0], c[1] = np.cos(t), np.sin(t)
        else:
            c[2], c[3] = np.cos(t), np.sin(t)
        return point(self.ambient, c)

    def _circle_point_from_head(self, comp: int, head: np.ndarray) -> ManifoldPoint:
        c = np.zeros(4)
        if comp == 0:
            c[:2] = head
        else:
            c[2:] = head
        return point(self.ambient, c)

    def membership_defect(self, p: ManifoldPoint) -> float:
        h1, h2 = self._component_data(p.coords)
        return float(min(abs(h1 - 1.0) + h2, abs(h2 - 1.0) + h1))

    def unit_normals(self, p: ManifoldPoint, seed: int, count: int) -> list[TangentVector]:
        self.require_on(p)
        h1, _ = self._component_data(p.coords)
        comp = 0 if abs(h1 - 1.0) < 0.5 else 1
        rng = np.random.default_rng(seed)
        out = []
        for _ in range(count):
            theta = rng.uniform(0.0, 2 * np.pi)
            vec = np.zeros(4)
            if comp == 0:
                vec[2], vec[3] = np.cos(theta), np.sin(theta)
            else:
                vec[0], vec[1] = np.cos(theta), np.sin(theta)
            out.append(tangent(p, vec))
        return out

    def sample_feet(self, count: int, seed: int) -> list[ManifoldPoint]:
        rng = np.random.default_rng(seed)
        out = []
        for i in range(count):
            out.append(self._circle_point(i % 2, rng.uniform(0.0, 2 * np.pi)))
        return out

    def batch_distance(self, coords: np.ndarray) -> np.ndarray:
        h1 = np.linalg.norm(coords[:, :2], axis=1)
        h2 = np.linalg.norm(coords[:, 2:], axis=1)
        return np.minimum(
            np.arccos(np.clip(h1, -1.0, 1.0)), np.arccos(np.clip(h2, -1.0, 1.0))
        )


# ---------------------------------------------------------------------------
# Fermat-type hypersurface lift in odd spheres
# ---------------------------------------------------------------------------

def to_complex(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x[0::2] + 1j * x[1::2]


def to_real(z: np.ndarray) -> np.ndarray:
    out = np.empty(2 * z.size)
    out[0::2] = z.real
    out[1::2] = z.imag
    return out


class FermatLift(Submanifold):
    """Unit-sphere lift of the degree-d Fermat hypersurface.

    Points of the ambient S^(2n+1) are stored in interleaved real
    coordinates (Re z_0, Im z_0, ..., Re z_n, Im z_n); the submanifold is
    {z : sum z_j^d = 0, |z| = 1}.  For n = 1 the surface splits into d
    circles X_k = {(z, xi_k z), |z| = 1/sqrt(2)} with xi_k =
    exp(i pi (2k+1)/d) and per-component closed-form distances; general n
    falls back to multistart projected-gradient minimization.
    """

    MULTISTART = 64

    def __init__(self, ambient: ManifoldId, d: int):
        if ambient.kind != "sphere" or ambient.n % 2 == 0:
            raise UnsupportedAmbient("fermat descriptor needs an odd sphere ambient")
        if d < 2:
            raise ValueError("degree must be >= 2")
        self.ambient = ambient
        self.d = int(d)
        self.ncomplex = (ambient.n + 1) // 2  # this is n+1 for S^(2n+1)
        self.nproj = self.ncomplex - 1
        self.label = f"fermat:{d}"

    # -- generic constraint helpers --------------------------------------

    def poly_value(self, z: np.ndarray) -> complex:
        return complex(np.sum(z ** self.d))

    def membership_defect(self, p: ManifoldPoint) -> float:
        z = to_complex(p.coords)
        return float(abs(self.poly_value(z)) + abs(np.linalg.norm(z) - 1.0))

    def _constraints(self, x: np.ndarray):
        z = to_complex(x)
        val = self.poly_value(z)
        c = np.array([val.real, val.imag, float(np.dot(x, x)) - 1.0])
        dz = self.d * z ** (self.d - 1)
        jac = np.zeros((3, x.size))
        jac[0, 0::2] = dz.real
        jac[0, 1::2] = -dz.imag
        jac[1, 0::2] = dz.imag
        jac[1, 1::2] = dz.real
        jac[2] = 2.0 * x
        return c, jac

    def project(self, x: np.ndarray, tol: float = 1e-13, iters: int = 60) -> np.ndarray:
        x = np.asarray(x, dtype=float).copy()
        for _ in range(iters):
            c, jac = self._constraints(x)
            if np.linalg.norm(c) <= tol:
                return x
            gram = jac @ jac.T
            try:
                delta = np.linalg.solve(gram, c)
            except np.linalg.LinAlgError:
                delta = np.linalg.lstsq(gram, c, rcond=None)[0]
            x = x - jac.T @ delta
        c, _ = self._constraints(x)
        if np.linalg.norm(c) > 1e-8:
            raise NotOnSubmanifold(f"projection stalled at defect {np.linalg.norm(c):.2e}")
        return x

    # -- n = 1 closed form -------------------------------------------------

    def component_distances(self, q: np.ndarray) -> np.ndarray:
        """arccos(|conj(z0) + conj(z1) xi_k| / sqrt(2)) for each component (n=1)."""
        z = to_complex(q)
        ks = np.arange(self.d)
        xi = np.exp(1j * np.pi * (2 * ks + 1) / self.d)
        coef = np.conj(z[0]) + np.conj(z[1]) * xi
        return np.arccos(np.clip(np.abs(coef) / np.sqrt(2.0), -1.0, 1.0))

    def _component_minimizer(self, q: np.ndarray, k: int):
        z = to_complex(q)
        xi = np.exp(1j * np.pi * (2 * k + 1) / self.d)
        coef = np.conj(z[0]) + np.conj(z[1]) * xi
        if abs(coef) <= 1e-12:
            grid = np.linspace(0.0, 2 * np.pi, 17)[:-1]
            pts = []
            for t in grid:
                zz = np.exp(1j * t) / np.sqrt(2.0)
                pts.append(point(self.ambient, to_real(np.array([zz, xi * zz]))))
            return pts, True
        zz = np.conj(coef) / abs(coef) / np.sqrt(2.0)
        return [point(self.ambient, to_real(np.array([zz, xi * zz])))], False

    def dist_to(self, qp: ManifoldPoint) -> MinimizerSet:
        self._check_ambient(qp)
        if self.nproj == 1:
            dists = self.component_distances(qp.coords)
            d0 = float(dists.min())
            mins: list[ManifoldPoint] = []
            mult = 0
            saturated = False
            for k in np.flatnonzero(dists <= d0 + EPS_TIE):
                pts, sat = self._component_minimizer(qp.coords, int(k))
                mins.extend(pts)
                saturated = saturated or sat
                mult += max(len(pts), 2) if sat else len(pts)
            return MinimizerSet(d0, mins, multiplicity=mult, saturated=saturated)
        return self._dist_multistart(qp)

    def _constraints_batch(self, xs: np.ndarray):
        z = xs[:, 0::2] + 1j * xs[:, 1::2]
        val = np.sum(z ** self.d, axis=1)
        c = np.stack(
            [val.real, val.imag, np.sum(xs * xs, axis=1) - 1.0], axis=1
        )
        dz = self.d * z ** (self.d - 1)
        jac = np.zeros((xs.shape[0], 3, xs.shape[1]))
        jac[:, 0, 0::2] = dz.real
        jac[:, 0, 1::2] = -dz.imag
        jac[:, 1, 0::2] = dz.imag
        jac[:, 1, 1::2] = dz.real
        jac[:, 2, :] = 2.0 * xs
        return c, jac

    def project_batch(self, xs: np.ndarray, tol: float = 1e-13, iters: int = 60) -> np.ndarray:
        """Gauss-Newton projection of each row onto the surface, in lockstep."""
        xs = np.array(xs, dtype=float)
        for _ in range(iters):
            c, jac = self._constraints_batch(xs)
            if np.max(np.linalg.norm(c, axis=1)) <= tol:
                return xs
            gram = jac @ np.transpose(jac, (0, 2, 1))
            delta = np.linalg.solve(gram, c[:, :, None])[:, :, 0]
            xs = xs - np.einsum("mkd,mk->md", jac, delta)
        return xs

    def _dist_multistart(self, qp: ManifoldPoint, starts: int | None = None, seed: int = 0) -> MinimizerSet:
        q = np.asarray(qp.coords, dtype=float)
        rng = np.random.default_rng(seed ^ 0x5EED)
        starts = starts or self.MULTISTART
        x0 = rng.normal(size=(starts, q.size))
        x0 /= np.linalg.norm(x0, axis=1, keepdims=True)
        xs = self.project_batch(x0)
        good = np.linalg.norm(self._constraints_batch(xs)[0], axis=1) <= 1e-10
        if not np.any(good):
            raise NotOnSubmanifold("multistart failed to land on the surface")
        xs = self._refine_batch(q, xs[good])
        dists = np.arccos(np.clip(xs @ q, -1.0, 1.0))
        d0 = float(dists.min())
        tied = [xs[i] for i in np.flatnonzero(dists <= d0 + max(EPS_TIE, 1e-6))]
        reps = _cluster(tied)
        saturated = len(reps) > 8
        reps = reps[:SATURATED_CAP]
        return MinimizerSet(
            d0,
            [point(self.ambient, r) for r in reps],
            multiplicity=len(reps),
            saturated=saturated,
        )

    def _refine_batch(self, q: np.ndarray, xs: np.ndarray, iters: int = 200) -> np.ndarray:
        """Projected gradient ascent of <q, x> with Armijo backtracking,
        lockstep over the rows of xs."""
        xs = np.array(xs, dtype=float)
        fx = xs @ q
        eta = np.ones(xs.shape[0])
        for _ in range(iters):
            _, jac = self._constraints_batch(xs)
            gram = jac @ np.transpose(jac, (0, 2, 1))
            coeff = np.linalg.solve(gram, (jac @ q)[:, :, None])[:, :, 0]
            g_t = q[None, :] - np.einsum("mkd,mk->md", jac, coeff)
            gn2 = np.sum(g_t * g_t, axis=1)
            active = gn2 > 1e-20
            if not np.any(active):
                break
            eta = np.minimum(eta * 2.0, 1.0)  # allow the step to grow back
            accepted = np.zeros(xs.shape[0], dtype=bool)
            for _ in range(40):
                trial = np.where(accepted[:, None], xs, xs + eta[:, None] * g_t)
                trial = self.project_batch(trial, iters=12)
                f_new = trial @ q
                ok = (~accepted) & active & (f_new >= fx + 1e-4 * eta * gn2)
                xs = np.where(ok[:, None], trial, xs)
                fx = np.where(ok, f_new, fx)
                accepted |= ok
                remaining = active & ~accepted & (eta > 1e-12)
                if not np.any(remaining):
                    break
                eta = np.where(remaining, eta * 0.5, eta)
            if not np.any(accepted):
                break
        return xs

    def unit_normals(self, p: ManifoldPoint, seed: int, count: int) -> list[TangentVector]:
        self.require_on(p)
        x = p.coords
        z = to_complex(x)
        g1 = to_real(np.conj(self.d * z ** (self.d - 1)))
        g2 = to_real(1j * np.conj(self.d * z ** (self.d - 1)))
        e1 = g1 - np.dot(g1, x) * x
        e1 = _unit(e1)
        e2 = g2 - np.dot(g2, x) * x - np.dot(g2, e1) * e1
        e2 = _unit(e2)
        rng = np.random.default_rng(seed)
        out = []
        for _ in range(count):
            alpha = rng.uniform(0.0, 2 * np.pi)
            out.append(tangent(p, np.cos(alpha) * e1 + np.sin(alpha) * e2))
        return out

    def sample_feet(self, count: int, seed: int) -> list[ManifoldPoint]:
        rng = np.random.default_rng(seed)
        out = []
        if self.nproj == 1:
            for i in range(count):
                k = i % self.d
                xi = np.exp(1j * np.pi * (2 * k + 1) / self.d)
                zz = np.exp(1j * rng.uniform(0, 2 * np.pi)) / np.sqrt(2.0)
                out.append(point(self.ambient, to_real(np.array([zz, xi * zz]))))
            return out
        while len(out) < count:
            x0 = rng.normal(size=self.ambient.n + 1)
            try:
                out.append(point(self.ambient, self.project(x0 / np.linalg.norm(x0))))
            except NotOnSubmanifold:
                continue
        return out

    def batch_distance(self, coords: np.ndarray) -> np.ndarray | None:
        if self.nproj != 1:
            return None
        z0 = coords[:, 0] + 1j * coords[:, 1]
        z1 = coords[:, 2] + 1j * coords[:, 3]
        ks = np.arange(self.d)
        xi = np.exp(1j * np.pi * (2 * ks + 1) / self.d)
        coef = np.conj(z0)[:, None] + np.conj(z1)[:, None] * xi[None, :]
        vals = np.abs(coef) / np.sqrt(2.0)
        return np.arccos(np.clip(vals.max(axis=1), -1.0, 1.0))


# ---------------------------------------------------------------------------
# CLI parsing
# ---------------------------------------------------------------------------

def parse_submanifold(text: str, ambient: ManifoldId, points_loader=None) -> Submanifold:
    """Build a descriptor from CLI syntax against the given ambient manifold.

    ``points_loader`` maps a filename to a list of coordinate arrays for the
    "points:<file>" form.
    """
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    if kind == "points":
        if points_loader is None:
            raise ValueError("points descriptor needs a file loader")
        return FinitePoints(ambient, points_loader(rest), label=text)
    if kind == "equator":
        return EquatorSphere(ambient, int(rest))
    if kind == "ellipse":
        a, b = (float(x) for x in rest.split(","))
        return Ellipse(ambient, a, b)
    if kind == "orthogonal":
        if ambient.kind != "matspace" or ambient.n != int(rest):
            raise UnsupportedAmbient("orthogonal:n needs ambient matspace:n")
        return OrthogonalGroup(ambient)
    if kind == "specialorthogonal":
        if ambient.kind != "glplus" or ambient.n != int(rest):
            raise UnsupportedAmbient("specialorthogonal:n needs ambient glplus:n")
        return SpecialOrthogonal(ambient)
    if kind == "upuq":
        p, q = (int(x) for x in rest.split(","))
        if ambient.kind != "upq" or (ambient.p, ambient.q) != (p, q):
            raise UnsupportedAmbient("upuq:p,q needs ambient upq:p,q")
        return UpUqSubgroup(ambient)
    if kind == "hopflink":
        return HopfLink(ambient)
    if kind == "fermat":
        return FermatLift(ambient, int(rest))
    raise ValueError(f"unknown submanifold descriptor {text!r}")

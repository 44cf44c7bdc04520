# cutloci/groupgeo.py
"""Matrix-group specializations.

* the gradient flow of d^2(., O(n)) in matrix space and its closed-form
  flow line A e^{-2t} + (1 - e^{-2t}) A (sqrt(A^T A))^{-1};
* second-difference Hessian checks of that distance squared at orthogonal
  points (the normal Hessian is 2I);
* the left-invariant minimal geodesic from GL+(n) to SO(n);
* the U(p,q) structure theory: membership and block identities, the
  closed-form inverse of A*A + I, the unique decomposition A = U e^Y with
  U block-unitary and Y in the anti-diagonal subspace, and the cosh/sinh
  block form of e^Y.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matfun
from .errors import MembershipViolation, NearSingular
from .manifolds import ipq_matrix

MEMBERSHIP_TOL = 1e-9


# ---------------------------------------------------------------------------
# O(n) flow in matrix space
# ---------------------------------------------------------------------------

def _polar_orthogonal(a: np.ndarray) -> np.ndarray:
    sing = np.linalg.svd(a, compute_uv=False)
    if sing.min() <= 1e-10:
        raise NearSingular(f"singular value {sing.min():.3e} too small")
    s = matfun.sym_sqrt(a.T @ a)
    return np.linalg.solve(s.T, a.T).T


def flow_to_orthogonal(a: np.ndarray, t: float) -> np.ndarray:
    """Closed-form integral curve of -grad d^2(., O(n)) started at A."""
    a = matfun.as_matrix(a, field="real")
    q = _polar_orthogonal(a)
    decay = np.exp(-2.0 * t)
    return a * decay + (1.0 - decay) * q


def flow_ode_rhs(g: np.ndarray) -> np.ndarray:
    """-2 gamma + 2 gamma (sqrt(gamma^T gamma))^{-1}, the negative gradient."""
    s = matfun.sym_sqrt(g.T @ g)
    return -2.0 * g + 2.0 * np.linalg.solve(s.T, g.T).T


def flow_ode_residual(a: np.ndarray, t: float, h: float = 1e-6) -> float:
    """|| d/dt gamma (central difference) - rhs(gamma) || at time t."""
    deriv = (flow_to_orthogonal(a, t + h) - flow_to_orthogonal(a, t - h)) / (2.0 * h)
    return float(np.linalg.norm(deriv - flow_ode_rhs(flow_to_orthogonal(a, t))))


def gram_flow_closed_form(a: np.ndarray, t: float) -> np.ndarray:
    """The in-proof identity gamma^T gamma = (sqrt(A^T A) e^{-2t} + (1-e^{-2t}) I)^2."""
    s = matfun.sym_sqrt(a.T @ a)
    decay = np.exp(-2.0 * t)
    base = s * decay + (1.0 - decay) * np.eye(a.shape[0])
    return base @ base


def _sym_basis(n: int) -> list[np.ndarray]:
    """Frobenius-orthonormal basis of symmetric n x n matrices."""
    basis = []
    for i in range(n):
        e = np.zeros((n, n))
        e[i, i] = 1.0
        basis.append(e)
    for i in range(n):
        for j in range(i + 1, n):
            e = np.zeros((n, n))
            e[i, j] = e[j, i] = 1.0 / np.sqrt(2.0)
            basis.append(e)
    return basis


def hessian_normal_check(q: np.ndarray, h: float = 1e-3) -> np.ndarray:
    """Second-difference Hessian of d^2(., O(n)) at an orthogonal Q in the
    normal directions Q W_i; the exact answer is 2 I_{n(n+1)/2}."""
    q = matfun.as_matrix(q, field="real")
    n = q.shape[0]
    if np.linalg.norm(q.T @ q - np.eye(n)) > 1e-8:
        raise MembershipViolation("base point is not orthogonal")

    def f(mat):
        sing = np.linalg.svd(mat, compute_uv=False)
        return float(np.sum((sing - 1.0) ** 2))

    dirs = [q @ w for w in _sym_basis(n)]
    m = len(dirs)
    out = np.zeros((m, m))
    f0 = f(q)
    for i in range(m):
        out[i, i] = (f(q + h * dirs[i]) - 2.0 * f0 + f(q - h * dirs[i])) / (h * h)
        for j in range(i + 1, m):
            mixed = (
                f(q + h * (dirs[i] + dirs[j]))
                - f(q + h * (dirs[i] - dirs[j]))
                - f(q - h * (dirs[i] - dirs[j]))
                + f(q - h * (dirs[i] + dirs[j]))
            ) / (4.0 * h * h)
            out[i, j] = out[j, i] = mixed
    return out


# ---------------------------------------------------------------------------
# GL+(n) -> SO(n) minimal geodesic
# ---------------------------------------------------------------------------

def geodesic_to_so(a: np.ndarray, t: float) -> np.ndarray:
    """gamma(t) = A (sqrt(A^T A))^{-1} e^{t log sqrt(A^T A)}: the minimal
    left-invariant geodesic with gamma(0) the polar factor, gamma(1) = A."""
    a = matfun.as_matrix(a, field="real")
    if np.linalg.det(a) <= 0:
        raise NearSingular("geodesic_to_so needs det A > 0")
    w = matfun.principal_log(matfun.sym_sqrt(a.T @ a), "eigen")
    return _polar_orthogonal(a) @ matfun.mat_exp(t * w)


def geodesic_to_so_speed(a: np.ndarray, t: float, h: float = 1e-6) -> float:
    """Left-invariant speed || gamma^{-1} gamma' ||_F at time t (central FD)."""
    g = geodesic_to_so(a, t)
    deriv = (geodesic_to_so(a, t + h) - geodesic_to_so(a, t - h)) / (2.0 * h)
    return float(np.linalg.norm(np.linalg.solve(g, deriv)))


def geodesic_to_so_length(a: np.ndarray, nodes: int = 16) -> float:
    """Gauss-Legendre integral of the numeric speed over [0, 1]."""
    x, wts = np.polynomial.legendre.leggauss(nodes)
    ts = 0.5 * (x + 1.0)
    return float(sum(w * geodesic_to_so_speed(a, float(t)) for t, w in zip(ts, wts)) * 0.5)


# ---------------------------------------------------------------------------
# U(p,q)
# ---------------------------------------------------------------------------

def _blocks(a: np.ndarray, p: int):
    return a[:p, :p], a[:p, p:], a[p:, :p], a[p:, p:]


def upq_membership(a: np.ndarray, p: int, q: int) -> float:
    """Frobenius defect of the defining relation A* I_{p,q} A = I_{p,q}."""
    a = matfun.as_matrix(a, field="complex")
    ipq = ipq_matrix(p, q)
    return float(np.linalg.norm(a.conj().T @ ipq @ a - ipq))


@dataclass(frozen=True)
class BlockIdentityReport:
    membership: float
    upper_left: float   # A*A - C*C - I_p
    mixed: float        # A*B - C*D
    lower_right: float  # B*B - D*D + I_q

    @property
    def max_defect(self) -> float:
        return max(self.membership, self.upper_left, self.mixed, self.lower_right)


def upq_block_identities(a: np.ndarray, p: int, q: int) -> BlockIdentityReport:
    a = matfun.as_matrix(a, field="complex")
    ba, bb, bc, bd = _blocks(a, p)
    return BlockIdentityReport(
        membership=upq_membership(a, p, q),
        upper_left=float(np.linalg.norm(ba.conj().T @ ba - bc.conj().T @ bc - np.eye(p))),
        mixed=float(np.linalg.norm(ba.conj().T @ bb - bc.conj().T @ bd)),
        lower_right=float(np.linalg.norm(bb.conj().T @ bb - bd.conj().T @ bd + np.eye(q))),
    )


def upq_inverse_closed_form(a: np.ndarray, p: int, q: int) -> np.ndarray:
    """(A*A + I)^{-1} = 1/2 [[I, -A^{-1}B], [-B*(A*)^{-1}, I]]."""
    a = matfun.as_matrix(a, field="complex")
    if upq_membership(a, p, q) > MEMBERSHIP_TOL:
        raise MembershipViolation("matrix is not in U(p,q)")
    ba, bb, _, _ = _blocks(a, p)
    top_right = -np.linalg.solve(ba, bb)
    out = np.zeros((p + q, p + q), dtype=complex)
    out[:p, :p] = np.eye(p)
    out[p:, p:] = np.eye(q)
    out[:p, p:] = top_right
    out[p:, :p] = top_right.conj().T
    return 0.5 * out


def n_block(b: np.ndarray) -> np.ndarray:
    """Embed a p x q block as [[0, B], [B*, 0]]."""
    p, q = b.shape
    y = np.zeros((p + q, p + q), dtype=complex)
    y[:p, p:] = b
    y[p:, :p] = b.conj().T
    return y


def exp_n_closed(y: np.ndarray, p: int, q: int) -> np.ndarray:
    """Closed-form exponential of Y = [[0,B],[B*,0]]:
    [[cosh sqrt(BB*), (sinh) dressed by the polar isometry of B],
     [..., cosh sqrt(B*B)]], computed through the SVD of B."""
    y = matfun.as_matrix(y, field="complex")
    b = y[:p, p:]
    if np.linalg.norm(y[:p, :p]) > 1e-10 or np.linalg.norm(y[p:, p:]) > 1e-10:
        raise MembershipViolation("Y has nonzero diagonal blocks")
    if np.linalg.norm(y[p:, :p] - b.conj().T) > 1e-10:
        raise MembershipViolation("Y is not of the form [[0,B],[B*,0]]")
    u, sig, vh = np.linalg.svd(b)
    cosh_p = (u * np.cosh(_pad(sig, p))) @ u.conj().T
    cosh_q = (vh.conj().T * np.cosh(_pad(sig, q))) @ vh
    sinh_pq = u[:, : sig.size] @ np.diag(np.sinh(sig)).astype(complex) @ vh[: sig.size, :]
    out = np.zeros((p + q, p + q), dtype=complex)
    out[:p, :p] = cosh_p
    out[p:, p:] = cosh_q
    out[:p, p:] = sinh_pq
    out[p:, :p] = sinh_pq.conj().T
    return out


def _pad(sig: np.ndarray, m: int) -> np.ndarray:
    out = np.zeros(m)
    out[: sig.size] = sig
    return out


@dataclass(frozen=True)
class UpqDecomposition:
    """source = unitary_part @ exp(n_part), unique with n_part in the
    anti-diagonal subspace and unitary_part in U(p) x U(q)."""

    unitary_part: np.ndarray
    n_part: np.ndarray
    source: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.unitary_part @ matfun.mat_exp(self.n_part)


def upq_decompose(a: np.ndarray, p: int, q: int) -> UpqDecomposition:
    """Split a member of U(p,q) as (block unitary) * e^Y, Y = 0.5 log(A*A)."""
    a = matfun.as_matrix(a, field="complex")
    if upq_membership(a, p, q) > MEMBERSHIP_TOL:
        raise MembershipViolation("matrix is not in U(p,q)")
    gram = a.conj().T @ a
    y = 0.5 * matfun.principal_log(gram, "eigen")
    diag_defect = np.linalg.norm(y[:p, :p]) + np.linalg.norm(y[p:, p:])
    if diag_defect > 1e-8:
        raise MembershipViolation(f"log has diagonal blocks of norm {diag_defect:.2e}")
    unitary = a @ matfun.mat_exp(-y)
    return UpqDecomposition(unitary_part=unitary, n_part=y, source=a)


def upq_log_block_series(a: np.ndarray, p: int, q: int) -> np.ndarray:
    """Independent route to Y: the Gregory series collapses onto odd powers
    of K = [[0, A^{-1}B], [B*(A*)^{-1}, 0]], so Y = sum K^{2m+1}/(2m+1)."""
    a = matfun.as_matrix(a, field="complex")
    ba, bb, _, _ = _blocks(a, p)
    top = np.linalg.solve(ba, bb)
    k = np.zeros((p + q, p + q), dtype=complex)
    k[:p, p:] = top
    k[p:, :p] = top.conj().T
    k2 = k @ k
    power = k.copy()
    acc = np.zeros_like(k)
    from .errors import NoConvergence

    for m in range(matfun.GREGORY_MAX_TERMS):
        term = power / (2 * m + 1)
        acc = acc + term
        if np.linalg.norm(term) <= matfun.GREGORY_RTOL * max(
            np.linalg.norm(acc), np.finfo(float).tiny
        ):
            return acc
        power = power @ k2
    raise NoConvergence("block Gregory series did not converge")


def dist_upq(a: np.ndarray, p: int, q: int) -> float:
    """d(A, U(p)xU(q)) = ||Y||_F = 0.5 || log(A*A) ||_F."""
    a = matfun.as_matrix(a, field="complex")
    if upq_membership(a, p, q) > MEMBERSHIP_TOL:
        raise MembershipViolation("matrix is not in U(p,q)")
    w = np.linalg.eigvalsh(a.conj().T @ a)
    return 0.5 * float(np.sqrt(np.sum(np.log(w) ** 2)))


def random_upq(p: int, q: int, rng: np.random.Generator, y_norm: float = 2.0) -> np.ndarray:
    """Random member as (block unitary) * e^Y with ||Y|| <= y_norm; rejection
    sampling of the defining relation has measure-zero hit rate."""
    from .submanifolds import random_block_unitary

    b = rng.normal(size=(p, q)) + 1j * rng.normal(size=(p, q))
    y = n_block(b)
    scale = rng.uniform(0.2, 1.0) * y_norm / np.linalg.norm(y)
    return random_block_unitary(p, q, rng) @ matfun.mat_exp(scale * y)

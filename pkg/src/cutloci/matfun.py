# cutloci/matfun.py
"""Dense matrix-function kernels.

Everything here operates on plain ``numpy.ndarray`` matrices (real or
complex).  Symmetric/Hermitian square roots and logarithms go through the
eigendecomposition; the Gregory series is kept as an independent
implementation of the principal logarithm for cross-checking.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    NearSingular,
    NegativeSpectrum,
    NoConvergence,
    NotHermitian,
    SingularSylvester,
    SpectrumViolation,
)

# Eigenvalues in [-CLAMP_SILENT, 0] are set to 0 silently; values in
# [-CLAMP_HARD, -CLAMP_SILENT) are clamped with a warning; anything below
# -CLAMP_HARD is an error.
CLAMP_SILENT = 1e-12
CLAMP_HARD = 1e-8

HERMITIAN_RTOL = 1e-12
GREGORY_MAX_TERMS = 200
GREGORY_RTOL = 1e-14


def as_matrix(a, field: str | None = None) -> np.ndarray:
    """Validate and coerce ``a`` to a finite 2-D array.

    ``field`` forces ``"real"`` or ``"complex"`` storage; by default the
    dtype of the input decides.
    """
    m = np.asarray(a)
    if field == "real":
        m = m.astype(float)
    elif field == "complex":
        m = m.astype(complex)
    elif not np.iscomplexobj(m):
        m = m.astype(float)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.view(float) if np.iscomplexobj(m) else m)):
        raise ValueError("matrix entries must be finite")
    return m


def hermitian_defect(a: np.ndarray) -> float:
    """Relative Frobenius asymmetry ``|A - A*| / max(1, |A|)``."""
    a = np.asarray(a)
    return float(np.linalg.norm(a - a.conj().T) / max(1.0, np.linalg.norm(a)))


def require_hermitian(a: np.ndarray, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    if a.shape[0] != a.shape[1]:
        raise NotHermitian(f"matrix is not square: {a.shape}")
    if hermitian_defect(a) > rtol:
        raise NotHermitian(f"asymmetry {hermitian_defect(a):.3e} exceeds {rtol:.1e}")
    return 0.5 * (a + a.conj().T)


def _clamped_psd_eigh(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian PSD matrix with the clamping policy."""
    w, v = np.linalg.eigh(require_hermitian(as_matrix(a)))
    low = float(w.min())
    if low < -CLAMP_HARD:
        raise NegativeSpectrum(f"eigenvalue {low:.3e} below -{CLAMP_HARD:.0e}")
    if low < -CLAMP_SILENT:
        warnings.warn(
            f"clamping eigenvalue {low:.3e} to 0", RuntimeWarning, stacklevel=3
        )
    return np.maximum(w, 0.0), v


def sym_sqrt(a) -> np.ndarray:
    """Hermitian PSD square root, R with R @ R = A.

    Computed by eigendecomposition with square-rooted (clamped) eigenvalues.
    """
    w, v = _clamped_psd_eigh(a)
    r = (v * np.sqrt(w)) @ v.conj().T
    return 0.5 * (r + r.conj().T)


@dataclass(frozen=True)
class PolarFactors:
    """A = orthogonal_factor @ psd_factor with the psd factor = sqrt(A*A)."""

    orthogonal_factor: np.ndarray
    psd_factor: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.orthogonal_factor @ self.psd_factor


def polar(a, singular_tol: float = 1e-10) -> PolarFactors:
    """Polar decomposition A = Q S with S = sym_sqrt(A*A).

    For invertible A the factorization is unique and Q = A S^-1; for
    (near-)singular A the orthogonal factor is taken from the SVD as U V*,
    one valid minimizer among the whole equidistant family.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError("polar decomposition requires a square matrix")
    s = sym_sqrt(a.conj().T @ a)
    u, sing, vh = np.linalg.svd(a)
    if sing.min() > singular_tol:
        q = np.linalg.solve(s.conj().T, a.conj().T).conj().T
    else:
        q = u @ vh
    return PolarFactors(orthogonal_factor=q, psd_factor=s)


def mat_exp(a) -> np.ndarray:
    """Matrix exponential (scaling-and-squaring Pade via scipy)."""
    return scipy.linalg.expm(as_matrix(a))


def svd(a) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """SVD A = U diag(s) V^T with singular values descending."""
    u, s, vh = np.linalg.svd(as_matrix(a))
    return u, s, vh.conj().T


def principal_log(a, method: str = "eigen") -> np.ndarray:
    """Principal matrix logarithm.

    method="eigen"
        A must be Hermitian positive definite; log through eigh.
    method="gregory"
        Gregory series, valid when the spectrum lies in the open right
        half-plane; truncated at GREGORY_MAX_TERMS or when the increment
        drops below GREGORY_RTOL relative to the accumulated sum.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError("logarithm requires a square matrix")
    if method == "eigen":
        w, v = np.linalg.eigh(require_hermitian(a))
        if w.min() <= 0.0:
            raise SpectrumViolation(f"nonpositive eigenvalue {w.min():.3e}")
        out = (v * np.log(w)) @ v.conj().T
        return 0.5 * (out + out.conj().T)
    if method == "gregory":
        return _gregory_log(a)
    raise ValueError(f"unknown log method {method!r}")


def _gregory_log(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    eye = np.eye(n, dtype=a.dtype)
    eigs = np.linalg.eigvals(a)
    if eigs.real.min() <= 0.0:
        raise SpectrumViolation(
            f"eigenvalue with real part {eigs.real.min():.3e} <= 0"
        )
    k = np.linalg.solve((eye + a).conj().T, (eye - a).conj().T).conj().T
    k2 = k @ k
    power = k.copy()
    acc = np.zeros_like(k)
    for m in range(GREGORY_MAX_TERMS):
        term = (2.0 / (2 * m + 1)) * power
        acc = acc + term
        tn = np.linalg.norm(term)
        if tn <= GREGORY_RTOL * max(np.linalg.norm(acc), np.finfo(float).tiny):
            return -acc
        power = power @ k2
    raise NoConvergence(
        f"Gregory series did not converge within {GREGORY_MAX_TERMS} terms"
    )


def frechet_sqrt(a, h) -> np.ndarray:
    """Directional derivative X of the PSD square root at A along H.

    X solves the Sylvester relation X sqrt(A) + sqrt(A) X = H; in the
    eigenbasis of sqrt(A) with eigenvalues s_i this is X_ij = H_ij/(s_i+s_j).
    """
    a = as_matrix(a)
    h = require_hermitian(as_matrix(h))
    if a.shape != h.shape:
        raise ValueError("A and H must have the same shape")
    w, v = _clamped_psd_eigh(a)
    s = np.sqrt(w)
    denom = s[:, None] + s[None, :]
    if denom.min() < 1e-12:
        raise SingularSylvester("sqrt eigenvalue pair sum below 1e-12")
    ht = v.conj().T @ h @ v
    x = v @ (ht / denom) @ v.conj().T
    return 0.5 * (x + x.conj().T)


def grad_trace_sqrt(a) -> np.ndarray:
    """Gradient of A -> trace(sqrt(A^T A)), equal to the polar orthogonal factor."""
    a = as_matrix(a)
    sing = np.linalg.svd(a, compute_uv=False)
    if sing.min() <= 1e-10:
        raise NearSingular(f"smallest singular value {sing.min():.3e} <= 1e-10")
    s = sym_sqrt(a.conj().T @ a)
    return np.linalg.solve(s.conj().T, a.conj().T).conj().T

"""Complex-matrix decompositions shared by every precoder construction.

All routines are thin, convention-pinning wrappers over LAPACK (via numpy):
QR is made unique by forcing a real nonnegative diagonal on R, the SVD is
returned with V (not V^H), and the regularized inverse follows the MMSE
channel-inversion form (H^H H + alpha I)^{-1} H^H.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import SingularMatrixError

#: relative singular-value cutoff used for numerical rank decisions
RANK_TOL = 1e-12


def as_complex_matrix(a, name="a"):
    """Validate and return `a` as a finite 2-D complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got ndim={m.ndim}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"{name} must be nonempty, got shape {m.shape}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return m


@dataclass(frozen=True)
class SvdResult:
    """SVD a = u @ diag(sigma) @ v^H with sigma sorted descending."""

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    def rank(self, tol=RANK_TOL):
        if self.sigma.size == 0 or self.sigma[0] == 0.0:
            return 0
        return int(np.sum(self.sigma > tol * self.sigma[0]))

    def reconstruct(self):
        k = self.sigma.size
        return (self.u[:, :k] * self.sigma) @ self.v[:, :k].conj().T


def qr_decompose(a):
    """Thin QR with real nonnegative diagonal on R.

    Requires rows >= cols; the sign convention makes the factorization
    unique for full-rank input.
    """
    a = as_complex_matrix(a)
    m, n = a.shape
    if m < n:
        raise ValueError(f"qr_decompose needs rows >= cols, got {a.shape}")
    q, r = np.linalg.qr(a, mode="reduced")
    d = np.diagonal(r).copy()
    phase = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1.0), 1.0)
    q = q * phase[np.newaxis, :]
    r = r * phase.conj()[:, np.newaxis]
    return q, r


def svd(a, full_matrices=False):
    """SVD wrapper returning an SvdResult (thin by default)."""
    a = as_complex_matrix(a)
    u, s, vh = np.linalg.svd(a, full_matrices=full_matrices)
    return SvdResult(u=u, sigma=s, v=vh.conj().T)


def regularized_mmse_inverse(h, alpha):
    """MMSE channel inversion (h^H h + alpha I)^{-1} h^H.

    With alpha = 0 this is the left pseudo-inverse and h^H h must be
    invertible.
    """
    h = as_complex_matrix(h, "h")
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    n = h.shape[1]
    if alpha == 0.0:
        s = np.linalg.svd(h, compute_uv=False)
        if h.shape[0] < n or s[-1] <= RANK_TOL * s[0]:
            raise SingularMatrixError(
                "h^H h is rank-deficient; alpha = 0 inversion impossible"
            )
    gram = h.conj().T @ h + alpha * np.eye(n)
    return np.linalg.solve(gram, h.conj().T)


def null_space(a, tol=1e-10):
    """Orthonormal basis of the right null space {x : a x = 0}.

    Column count is cols(a) - rank(a); rank uses the relative cutoff
    tol * sigma_max. A full-rank wide input yields a zero-column matrix.
    """
    a = as_complex_matrix(a)
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    if s.size == 0 or s[0] == 0.0:
        rank = 0
    else:
        rank = int(np.sum(s > tol * s[0]))
    return vh[rank:].conj().T

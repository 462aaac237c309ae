"""Linear precoder constructions: ZF, MMSE, BD, GMI and S-GMI.

Each constructor returns a LinearPrecoder whose stacked matrix is
column-partitioned per user (n_r streams each). The GMI family follows the
regularized channel-inversion route: invert the stacked multiuser channel,
take the per-user column block, orthonormalize it with a thin QR, and
diagonalize the per-user effective channel with an SVD. GMI additionally
applies the minimum-MSE transmit combining matrix before the final SVD;
S-GMI omits it.
"""

from dataclasses import dataclass, replace

import numpy as np

from .exceptions import (
    InfeasibleDimensionsError,
    RankDeficiencyError,
    ZeroBlockError,
)
from .numerics import null_space, qr_decompose, regularized_mmse_inverse, svd

RANK_TOL = 1e-10


@dataclass(frozen=True)
class LinearPrecoder:
    """Stacked precoding matrix with per-user receive filters and scalings."""

    p: np.ndarray
    m_filters: list
    betas: list
    algorithm_tag: str
    stream_counts: list

    def block(self, r):
        """Column block of user r."""
        start = sum(self.stream_counts[:r])
        return self.p[:, start : start + self.stream_counts[r]]

    @property
    def n_users(self):
        return len(self.stream_counts)

    def scaled(self):
        """Precoding matrix with each user block multiplied by its beta."""
        cols = [self.betas[r] * self.block(r) for r in range(self.n_users)]
        return np.hstack(cols)


def _check_stacked_rank(h):
    s = np.linalg.svd(h, compute_uv=False)
    if h.shape[0] > h.shape[1] or s[-1] <= RANK_TOL * s[0]:
        raise RankDeficiencyError("stacked user channel is not full row rank")


def zf_precoder(csi, dims):
    """Zero-forcing: p = H^H (H H^H)^{-1}, H p = I."""
    h = csi.stacked_users_est()
    _check_stacked_rank(h)
    p = h.conj().T @ np.linalg.inv(h @ h.conj().T)
    eye = np.eye(dims.n_r)
    return LinearPrecoder(
        p=p,
        m_filters=[eye.copy() for _ in range(dims.t_users)],
        betas=[1.0] * dims.t_users,
        algorithm_tag="zf",
        stream_counts=[dims.n_r] * dims.t_users,
    )


def mmse_precoder(csi, dims, alpha):
    """Regularized channel inversion of the stacked user channel."""
    h = csi.stacked_users_est()
    if alpha == 0.0:
        _check_stacked_rank(h)
    p = regularized_mmse_inverse(h, alpha)
    eye = np.eye(dims.n_r)
    return LinearPrecoder(
        p=p,
        m_filters=[eye.copy() for _ in range(dims.t_users)],
        betas=[1.0] * dims.t_users,
        algorithm_tag="mmse",
        stream_counts=[dims.n_r] * dims.t_users,
    )


def bd_precoder(csi, dims):
    """Block diagonalization: per-user null space of the other users'
    stacked channels, then per-user SVD of the effective channel."""
    t = dims.t_users
    if t > 1 and dims.n_t <= (t - 1) * dims.n_r:
        raise InfeasibleDimensionsError(
            f"n_t={dims.n_t} leaves no null space for {t} users x {dims.n_r} antennas"
        )
    blocks, filters = [], []
    for r in range(t):
        h_r = csi.users_est[r]
        others = [csi.users_est[j] for j in range(t) if j != r]
        if others:
            n = null_space(np.vstack(others))
        else:
            n = np.eye(dims.n_t, dtype=np.complex128)
        if n.shape[1] < dims.n_r:
            raise InfeasibleDimensionsError(
                f"null space dimension {n.shape[1]} < {dims.n_r} streams for user {r}"
            )
        dec = svd(h_r @ n)
        blocks.append(n @ dec.v[:, : dims.n_r])
        filters.append(dec.u[:, : dims.n_r].conj().T)
    return LinearPrecoder(
        p=np.hstack(blocks),
        m_filters=filters,
        betas=[1.0] * t,
        algorithm_tag="bd",
        stream_counts=[dims.n_r] * t,
    )


def _gmi_blocks(csi, dims, alpha):
    """Shared GMI/S-GMI front end: per-user orthonormal basis Q_r of the
    MMSE inversion column block, plus per-user channels."""
    h = csi.stacked_users_est()
    h_bar = regularized_mmse_inverse(h, alpha)
    qs = []
    for r in range(dims.t_users):
        block = h_bar[:, r * dims.n_r : (r + 1) * dims.n_r]
        q, _ = qr_decompose(block)
        qs.append(q)
    return qs


def gmi_precoder(csi, dims, alpha):
    """GMI: MMSE inversion + QR + transmit combining matrix + SVD."""
    if alpha <= 0:
        raise ValueError(f"gmi_precoder needs alpha > 0, got {alpha}")
    qs = _gmi_blocks(csi, dims, alpha)
    gram_all = sum(h.conj().T @ h for h in csi.users_est)
    blocks, filters = [], []
    for r in range(dims.t_users):
        q, h_r = qs[r], csi.users_est[r]
        hq = h_r @ q
        lhs = q.conj().T @ gram_all @ q + alpha * np.eye(q.shape[1])
        t_comb = np.linalg.solve(lhs, hq.conj().T @ hq)
        dec = svd(hq @ t_comb)
        k = dims.n_r
        blocks.append(q @ t_comb @ dec.v[:, :k])
        filters.append(dec.u[:, :k].conj().T)
    return LinearPrecoder(
        p=np.hstack(blocks),
        m_filters=filters,
        betas=[1.0] * dims.t_users,
        algorithm_tag="gmi",
        stream_counts=[dims.n_r] * dims.t_users,
    )


def sgmi_precoder(csi, dims, alpha):
    """S-GMI: MMSE inversion + QR + per-user SVD, no combining matrix."""
    if alpha <= 0:
        raise ValueError(f"sgmi_precoder needs alpha > 0, got {alpha}")
    qs = _gmi_blocks(csi, dims, alpha)
    blocks, filters = [], []
    for r in range(dims.t_users):
        dec = svd(csi.users_est[r] @ qs[r])
        k = dims.n_r
        blocks.append(qs[r] @ dec.v[:, :k])
        filters.append(dec.u[:, :k].conj().T)
    return LinearPrecoder(
        p=np.hstack(blocks),
        m_filters=filters,
        betas=[1.0] * dims.t_users,
        algorithm_tag="sgmi",
        stream_counts=[dims.n_r] * dims.t_users,
    )


def normalize_power(pre, e_r):
    """Per-user power scaling beta_r = sqrt(e_r / ||P_r||_F^2)."""
    if len(e_r) != pre.n_users:
        raise ValueError("one power budget per user required")
    betas = []
    for r in range(pre.n_users):
        norm2 = float(np.sum(np.abs(pre.block(r)) ** 2))
        if norm2 == 0.0:
            raise ZeroBlockError(f"precoder block {r} is all zero")
        betas.append(float(np.sqrt(e_r[r] / norm2)))
    return replace(pre, betas=betas)

"""scikit-learn style wrappers around the precoder constructions.

Each estimator is fitted on a stack of per-user channel matrices, shaped
(t_users, n_r, n_t), and then transforms symbol vectors (columns of an
(n_streams, n_frames) array) into transmit vectors. This makes the
precoders clonable, grid-searchable and pipeline-compatible.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .channel import CsiView, SystemDims
from .precoding import (
    bd_precoder,
    gmi_precoder,
    mmse_precoder,
    normalize_power,
    sgmi_precoder,
    zf_precoder,
)
from .thp import QPSK_TAU, so_thp_classic, so_thp_sgmi, thp_encode


def check_channel_stack(X):
    """Validate a (t_users, n_r, n_t) complex channel stack."""
    X = np.asarray(X, dtype=np.complex128)
    if X.ndim != 3:
        raise ValueError(f"expected (t_users, n_r, n_t) channel stack, got {X.shape}")
    if not np.all(np.isfinite(X.real)) or not np.all(np.isfinite(X.imag)):
        raise ValueError("channel stack contains NaN or Inf entries")
    return X


def _dims_from_stack(X):
    t, n_r, n_t = X.shape
    return SystemDims(n_t=n_t, t_users=t, n_r=n_r, k_eves=1, n_k=1)


class BaseLinearPrecoder(BaseEstimator, TransformerMixin):
    """Common fit/transform machinery for the linear precoders."""

    def __init__(self, e_s=1.0):
        self.e_s = e_s

    def _construct(self, csi, dims):
        raise NotImplementedError

    def fit(self, X, y=None):
        X = check_channel_stack(X)
        dims = _dims_from_stack(X)
        csi = CsiView(users_est=list(X), error_var=0.0)
        pre = self._construct(csi, dims)
        e_r = [self.e_s / dims.t_users] * dims.t_users
        self.precoder_ = normalize_power(pre, e_r)
        self.dims_ = dims
        return self

    def transform(self, S):
        S = np.asarray(S, dtype=np.complex128)
        if S.shape[0] != self.dims_.total_streams:
            raise ValueError(
                f"expected {self.dims_.total_streams} stream rows, got {S.shape[0]}"
            )
        return self.precoder_.scaled() @ S


class ZeroForcingPrecoder(BaseLinearPrecoder):
    def _construct(self, csi, dims):
        return zf_precoder(csi, dims)


class MmsePrecoder(BaseLinearPrecoder):
    def __init__(self, e_s=1.0, alpha=1e-2):
        super().__init__(e_s=e_s)
        self.alpha = alpha

    def _construct(self, csi, dims):
        return mmse_precoder(csi, dims, self.alpha)


class BlockDiagonalizationPrecoder(BaseLinearPrecoder):
    def _construct(self, csi, dims):
        return bd_precoder(csi, dims)


class GmiPrecoder(BaseLinearPrecoder):
    def __init__(self, e_s=1.0, alpha=1e-2):
        super().__init__(e_s=e_s)
        self.alpha = alpha

    def _construct(self, csi, dims):
        return gmi_precoder(csi, dims, self.alpha)


class SgmiPrecoder(BaseLinearPrecoder):
    def __init__(self, e_s=1.0, alpha=1e-2):
        super().__init__(e_s=e_s)
        self.alpha = alpha

    def _construct(self, csi, dims):
        return sgmi_precoder(csi, dims, self.alpha)


class ThpPrecoder(BaseEstimator, TransformerMixin):
    """Non-linear successive-cancellation precoder.

    variant="sgmi" composes THP with the S-GMI feedforward; "classic"
    uses successive null-space feedforward blocks.
    """

    def __init__(self, variant="sgmi", e_s=1.0, alpha=1e-2, tau=QPSK_TAU):
        self.variant = variant
        self.e_s = e_s
        self.alpha = alpha
        self.tau = tau

    def fit(self, X, y=None):
        X = check_channel_stack(X)
        dims = _dims_from_stack(X)
        csi = CsiView(users_est=list(X), error_var=0.0)
        e_r = [self.e_s / dims.t_users] * dims.t_users
        if self.variant == "sgmi":
            self.precoder_ = so_thp_sgmi(csi, dims, self.alpha, tau=self.tau, e_r=e_r)
        elif self.variant == "classic":
            self.precoder_ = so_thp_classic(csi, dims, tau=self.tau, e_r=e_r)
        else:
            raise ValueError(f"unknown variant {self.variant!r}")
        self.dims_ = dims
        return self

    def transform(self, S):
        """Encode symbol columns (already in encoding order) and apply the
        scaled feedforward matrix."""
        S = np.asarray(S, dtype=np.complex128)
        if S.shape[0] != self.dims_.total_streams:
            raise ValueError(
                f"expected {self.dims_.total_streams} stream rows, got {S.shape[0]}"
            )
        pre = self.precoder_
        cols = []
        for k in range(pre.n_users):
            start = sum(pre.stream_counts[:k])
            stop = start + pre.stream_counts[k]
            cols.append(pre.betas[k] * pre.f[:, start:stop])
        f_scaled = np.hstack(cols)
        out = np.empty((f_scaled.shape[0], S.shape[1]), dtype=np.complex128)
        for j in range(S.shape[1]):
            out[:, j] = f_scaled @ thp_encode(S[:, j], pre.b, pre.tau)
        return out

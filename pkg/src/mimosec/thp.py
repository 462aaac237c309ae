"""Non-linear precoding: modulo arithmetic, feedback construction, user
ordering and the two successive-optimization THP variants.

Stream conventions: users are permuted into an encoding order, the
feedforward matrix F stacks the ordered per-user blocks, the receive
combiner D is block diagonal in the same order, and the feedback matrix B
is strictly lower triangular over the reordered streams. B is normalized
row-wise (each row of D H F divided by its diagonal entry) so that the
successive cancellation loop and the per-stream receiver gain division
invert each other exactly.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import (
    InfeasibleDimensionsError,
    SingularMatrixError,
    ZeroDiagonalError,
)
from .numerics import null_space, qr_decompose, svd
from .precoding import LinearPrecoder, normalize_power

#: modulo base for unit-energy QPSK: 2 * (|c|_max + d_min / 2)
QPSK_TAU = 2.0 * np.sqrt(2.0)


@dataclass(frozen=True)
class NonlinearPrecoder:
    """THP transmit/receive state for one channel realization."""

    f: np.ndarray
    b: np.ndarray
    d: np.ndarray
    order: np.ndarray
    tau: float
    betas: list
    gains: np.ndarray
    stream_counts: list
    algorithm_tag: str

    @property
    def n_users(self):
        return len(self.stream_counts)

    def d_block(self, k):
        """Receive combiner block of the user at encoding position k."""
        start = sum(self.stream_counts[:k])
        stop = start + self.stream_counts[k]
        return self.d[start:stop, start:stop]


def modulo(x, tau):
    """Fold real and imaginary parts independently into [-tau/2, tau/2)."""
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    x = np.asarray(x, dtype=np.complex128)
    re = x.real - tau * np.floor((x.real + tau / 2.0) / tau)
    im = x.imag - tau * np.floor((x.imag + tau / 2.0) / tau)
    return re + 1j * im


def build_feedback(d, h, f):
    """Feedback matrix from the effective channel G = D H F.

    Rows of G are divided by their diagonal entries and the strictly
    lower triangular part is returned; the unit diagonal is carried by
    the identity of the (I + B)^{-1} feedback loop.
    """
    g = d @ h @ f
    if g.shape[0] != g.shape[1]:
        raise ValueError(f"D H F must be square, got {g.shape}")
    diag = np.diagonal(g)
    if np.any(np.abs(diag) < 1e-12):
        raise ZeroDiagonalError("effective channel has a (near-)zero diagonal entry")
    normalized = g / diag[:, np.newaxis]
    return np.tril(normalized, k=-1)


def thp_encode(s, b, tau):
    """Successive-cancellation encode: v_k = mod(s_k - sum_{j<k} B_kj v_j).

    Satisfies (I + B) v = s + z with z on the tau-spaced complex integer
    lattice.
    """
    s = np.asarray(s, dtype=np.complex128)
    n = s.shape[0]
    if b.shape != (n, n):
        raise ValueError(f"feedback shape {b.shape} does not match {n} streams")
    v = np.zeros(n, dtype=np.complex128)
    for k in range(n):
        v[k] = modulo(s[k] - b[k, :k] @ v[:k], tau)
    return v


def thp_decode(y, d_block, beta, tau, constellation):
    """Combine, remove per-stream gain, fold with the modulo and slice.

    `beta` may be a scalar or a per-stream gain vector.
    """
    r = np.asarray(d_block) @ np.asarray(y, dtype=np.complex128)
    r = modulo(r / beta, tau)
    constellation = np.asarray(constellation)
    dist = np.abs(r[:, np.newaxis] - constellation[np.newaxis, :])
    return np.argmin(dist, axis=1)


def so_thp_order(csi, dims):
    """Encoding order: weakest user (smallest channel Frobenius norm)
    first; ties break on the lower index.

    The first encoded user gets the only feedforward slot that is free of
    nulling constraints, so weakest-first hands the full array gain to the
    user that needs it most.
    """
    norms = [float(np.linalg.norm(csi.users_est[r])) for r in range(dims.t_users)]
    return np.array(sorted(range(dims.t_users), key=lambda r: (norms[r], r)))


def _assemble(csi, dims, order, blocks, filters, tau, e_r, tag):
    """Common tail: power scaling, effective channel, feedback matrix."""
    t = dims.t_users
    stream_counts = [dims.n_r] * t
    pre = LinearPrecoder(
        p=np.hstack(blocks),
        m_filters=filters,
        betas=[1.0] * t,
        algorithm_tag=tag,
        stream_counts=stream_counts,
    )
    pre = normalize_power(pre, e_r)
    f_scaled = pre.scaled()
    d = np.zeros((dims.total_streams, dims.total_streams), dtype=np.complex128)
    for k in range(t):
        start = k * dims.n_r
        d[start : start + dims.n_r, start : start + dims.n_r] = filters[k]
    h_perm = np.vstack([csi.users_est[u] for u in order])
    g = d @ h_perm @ f_scaled
    diag = np.diagonal(g)
    if np.any(np.abs(diag) < 1e-12):
        raise ZeroDiagonalError("effective channel has a (near-)zero diagonal entry")
    b = np.tril(g / diag[:, np.newaxis], k=-1)
    return NonlinearPrecoder(
        f=pre.p,
        b=b,
        d=d,
        order=np.asarray(order),
        tau=tau,
        betas=pre.betas,
        gains=diag.copy(),
        stream_counts=stream_counts,
        algorithm_tag=tag,
    )


def _placed_users_block(h_stack, n_last, alpha):
    """Last n_last columns of the regularized inverse of the stacked
    placed-users channel, computed in the Gram form
    H^H (H H^H + alpha I)^{-1} which is cheapest while few users are
    placed."""
    gram = h_stack @ h_stack.conj().T
    gram[np.diag_indices_from(gram)] += alpha
    rhs = np.zeros((h_stack.shape[0], n_last), dtype=np.complex128)
    rhs[-n_last:] = np.eye(n_last)
    try:
        cols = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError("placed-users Gram matrix is singular") from exc
    return h_stack.conj().T @ cols


def so_thp_sgmi(csi, dims, alpha, tau=QPSK_TAU, e_r=None):
    """SO-THP with successively built S-GMI feedforward blocks.

    The block of the user at encoding position k comes from the
    regularized inversion of the stacked channel of the first k ordered
    users only: the first user keeps an unconstrained SVD beam and each
    later user suppresses the already-encoded ones in the regularized
    (MMSE) sense instead of by exact nulling. The feedback matrix then
    cancels the remaining lower-triangular interference.
    """
    t = dims.t_users
    if e_r is None:
        e_r = [1.0 / t] * t
    order = so_thp_order(csi, dims)
    blocks, filters = [], []
    for k in range(1, t + 1):
        stack = np.vstack([csi.users_est[u] for u in order[:k]])
        block = _placed_users_block(stack, dims.n_r, alpha)
        q, _ = qr_decompose(block)
        dec = svd(csi.users_est[order[k - 1]] @ q)
        blocks.append(q @ dec.v[:, : dims.n_r])
        filters.append(dec.u[:, : dims.n_r].conj().T)
    e_perm = [e_r[u] for u in order]
    return _assemble(csi, dims, list(order), blocks, filters, tau, e_perm, "so-thp-sgmi")


def so_thp_classic(csi, dims, tau=QPSK_TAU, e_r=None):
    """Classic SO-THP: successive null-space feedforward.

    At each position the remaining candidates are scored by the minimum
    singular value of their channel restricted to the null space of the
    already-placed users; the weakest is placed next, so later users null
    all earlier ones and the upper triangle of D H F vanishes.
    """
    t = dims.t_users
    if t > 1 and dims.n_t < t * dims.n_r:
        raise InfeasibleDimensionsError(
            f"n_t={dims.n_t} cannot carry {t} users x {dims.n_r} streams"
        )
    if e_r is None:
        e_r = [1.0 / t] * t
    remaining = list(range(t))
    placed = []
    order, blocks, filters = [], [], []
    for _ in range(t):
        if placed:
            basis = null_space(np.vstack([csi.users_est[u] for u in placed]))
        else:
            basis = np.eye(dims.n_t, dtype=np.complex128)
        if basis.shape[1] < dims.n_r:
            raise InfeasibleDimensionsError(
                f"null space dimension {basis.shape[1]} < {dims.n_r} streams"
            )
        best = None
        for u in remaining:
            dec = svd(csi.users_est[u] @ basis)
            metric = float(dec.sigma[min(dims.n_r, dec.sigma.size) - 1])
            if best is None or (metric, u) < best[:2]:
                best = (metric, u, dec)
        _, chosen, dec = best
        order.append(chosen)
        blocks.append(basis @ dec.v[:, : dims.n_r])
        filters.append(dec.u[:, : dims.n_r].conj().T)
        placed.append(chosen)
        remaining.remove(chosen)
    e_perm = [e_r[u] for u in order]
    return _assemble(csi, dims, order, blocks, filters, tau, e_perm, "so-thp")

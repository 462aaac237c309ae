"""Analytical FLOP-count model for the precoder constructions.

Complex-arithmetic costs come from the standard real-arithmetic operation
counts evaluated on the 2m x 2n extended real matrix: Householder QR
factorization 2n^2(m - n/3), Golub-Reinsch SVD with full U and V
4m^2 n + 8mn^2 + 9n^3, and inversion 2n^3. Complex matrix multiplication
is charged 8mnp directly. Explicit accumulation of the Q factor is charged
separately (thin or full) because the null-space and inversion-based
routes need different amounts of it.

The model mirrors the exact primitive sequence of each constructor in
`precoding` and `thp`; it is a pure function of the dimensions. The
standard family of comparable systems keeps two users and two
eavesdroppers and scales antennas (n_t x n_t x n_t), which is what
`figure_dims` produces.
"""

from .channel import SystemDims
from .exceptions import ConfigError

#: algorithms appearing in the complexity comparison figure
COMPLEXITY_FIGURE_SET = ("bd", "gmi", "sgmi", "so-thp", "so-thp-sgmi")

ALL_ALGORITHMS = ("zf", "mmse", "bd", "gmi", "sgmi", "so-thp", "so-thp-sgmi")


def _real_qr_factor(m, n):
    return 2.0 * n * n * (m - n / 3.0)


def _real_svd(m, n):
    return 4.0 * m * m * n + 8.0 * m * n * n + 9.0 * n ** 3


def _real_inverse(n):
    return 2.0 * n ** 3


def cmatmul(m, n, p):
    """Complex (m x n) @ (n x p)."""
    return 8.0 * m * n * p


def cqr_factor(m, n):
    """Householder factorization of a complex m x n matrix (R + implicit Q)."""
    return _real_qr_factor(2 * m, 2 * n)


def cform_q_thin(m, n):
    """Accumulate the thin m x n Q factor."""
    M, N = 2 * m, 2 * n
    return 4.0 * (M * N * N - N ** 3 / 3.0)


def cform_q_full(m, n):
    """Accumulate the full m x m Q factor from an m x n factorization."""
    M, N = 2 * m, 2 * n
    return 4.0 * (M * M * N - M * N * N + N ** 3 / 3.0)


def csvd(m, n):
    """Complex SVD with full U and V; symmetric in its arguments."""
    if m < n:
        m, n = n, m
    return _real_svd(2 * m, 2 * n)


def cinverse(n):
    """Complex n x n inversion."""
    return _real_inverse(2 * n)


def flops_primitive(kind, *dims):
    """Primitive cost lookup: matmul(m,n,p), qr(m,n), svd(m,n), inverse(n)."""
    if any(d < 1 for d in dims):
        raise ValueError(f"dimensions must be >= 1, got {dims}")
    table = {"matmul": cmatmul, "qr": cqr_factor, "svd": csvd, "inverse": cinverse}
    if kind not in table:
        raise ConfigError(f"unknown primitive kind {kind!r}")
    return table[kind](*dims)


def _mmse_inversion(dims):
    """(H^H H + alpha I)^{-1} H^H on the stacked K x n_t channel."""
    k = dims.total_streams
    nt = dims.n_t
    return cmatmul(nt, k, nt) + cinverse(nt) + cmatmul(nt, nt, k)


def _null_space_cost(nt, rows):
    """Null-space basis via QR of the stacked channel's adjoint."""
    return cqr_factor(nt, rows) + cform_q_full(nt, rows)


def _bd(dims):
    total = 0.0
    nr, nt, t = dims.n_r, dims.n_t, dims.t_users
    for _ in range(t):
        others = (t - 1) * nr
        null_dim = nt - others
        if others > 0:
            total += _null_space_cost(nt, others)
        total += cmatmul(nr, nt, null_dim)
        total += csvd(nr, null_dim)
        total += cmatmul(nt, null_dim, nr)
    return total


def _sgmi(dims):
    nr, nt, t = dims.n_r, dims.n_t, dims.t_users
    total = _mmse_inversion(dims)
    for _ in range(t):
        total += cqr_factor(nt, nr) + cform_q_thin(nt, nr)
        total += cmatmul(nr, nt, nr)
        total += csvd(nr, nr)
        total += cmatmul(nt, nr, nr)
    return total


def _gmi(dims):
    nr, nt, t = dims.n_r, dims.n_t, dims.t_users
    total = _mmse_inversion(dims)
    total += t * cmatmul(nt, nr, nt)  # accumulate sum_j H_j^H H_j
    for _ in range(t):
        total += cqr_factor(nt, nr) + cform_q_thin(nt, nr)
        total += cmatmul(nr, nt, nr)  # H_r Q_r
        total += cmatmul(nr, nt, nt) + cmatmul(nr, nt, nr)  # Q^H A Q
        total += cinverse(nr)
        total += cmatmul(nr, nr, nr)  # (H_r Q)^H (H_r Q)
        total += cmatmul(nr, nr, nr)  # combining matrix solve
        total += cmatmul(nr, nr, nr)  # effective channel with combining
        total += csvd(nr, nr)
        total += cmatmul(nr, nr, nr) + cmatmul(nt, nr, nr)  # precoder block
    return total


def _feedback_build(dims):
    k = dims.total_streams
    return cmatmul(k, dims.n_t, k) + cmatmul(k, k, k)


def _so_thp(dims):
    """Successive nulling with per-candidate SVD scoring at every round."""
    nr, nt, t = dims.n_r, dims.n_t, dims.t_users
    total = 0.0
    for k in range(t):
        placed_rows = k * nr
        null_dim = nt - placed_rows
        if placed_rows > 0:
            total += _null_space_cost(nt, placed_rows)
        candidates = t - k
        total += candidates * (cmatmul(nr, nt, null_dim) + csvd(nr, null_dim))
        total += cmatmul(nt, null_dim, nr)  # chosen block
    return total + _feedback_build(dims)


def _so_thp_sgmi(dims):
    """Successive construction: position k inverts the Gram matrix of the
    first k placed users only (norm-based ordering is not charged)."""
    nr, nt, t = dims.n_r, dims.n_t, dims.t_users
    total = 0.0
    for k in range(1, t + 1):
        rows = k * nr
        total += cmatmul(rows, nt, rows)  # placed-users Gram matrix
        total += cinverse(rows)
        total += cmatmul(nt, rows, nr)  # inverse columns of the new user
        total += cqr_factor(nt, nr) + cform_q_thin(nt, nr)
        total += cmatmul(nr, nt, nr)  # effective channel H_r Q
        total += csvd(nr, nr)
        total += cmatmul(nt, nr, nr)  # feedforward block
    return total + _feedback_build(dims)


_PATHS = {
    "zf": lambda d: cmatmul(d.total_streams, d.n_t, d.total_streams)
    + cinverse(d.total_streams)
    + cmatmul(d.n_t, d.total_streams, d.total_streams),
    "mmse": _mmse_inversion,
    "bd": _bd,
    "gmi": _gmi,
    "sgmi": _sgmi,
    "so-thp": _so_thp,
    "so-thp-sgmi": _so_thp_sgmi,
}


def flops_algorithm(tag, dims):
    """Total construction cost of one precoder for the given dimensions."""
    if tag not in _PATHS:
        raise ConfigError(f"unknown algorithm tag {tag!r}")
    return float(_PATHS[tag](dims))


def figure_dims(n_t):
    """Square n_t x n_t x n_t system: two users and two eavesdroppers with
    n_t/2 antennas each."""
    if n_t % 2 != 0:
        raise ConfigError(f"n_t must be even for the square family, got {n_t}")
    per = n_t // 2
    return SystemDims(n_t=n_t, t_users=2, n_r=per, k_eves=2, n_k=per)

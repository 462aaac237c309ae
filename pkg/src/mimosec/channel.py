"""Flat-fading MU-MIMO channel generation, imperfect CSI, and noise.

Complex Gaussian convention: a variance-v entry has independent real and
imaginary parts of variance v/2 each. Every random draw goes through an
explicit numpy Generator; `substream` derives reproducible per-trial
generators from (seed, key...) so results never depend on execution order.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SystemDims:
    """Antenna/user bookkeeping for one broadcast setup."""

    n_t: int
    t_users: int
    n_r: int
    k_eves: int
    n_k: int

    def __post_init__(self):
        for name in ("n_t", "t_users", "n_r", "k_eves", "n_k"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.n_t < self.t_users * self.n_r:
            raise ValueError(
                f"n_t={self.n_t} < t_users*n_r={self.t_users * self.n_r}: "
                "spatially infeasible"
            )

    @property
    def total_streams(self):
        return self.t_users * self.n_r


@dataclass(frozen=True)
class ChannelSet:
    """True channel realizations plus noise variances for one trial."""

    users: list
    eves: list
    sigma_b2: float
    sigma_e2: float
    m_ratio: float

    def stacked_users(self):
        return np.vstack(self.users)

    def stacked_eves(self):
        return np.vstack(self.eves)


@dataclass(frozen=True)
class CsiView:
    """Transmitter-side channel knowledge.

    eves_est is None: the transmitter knows only the eavesdropper channel
    distribution, never the draw.
    """

    users_est: list
    error_var: float
    eves_est: list | None = field(default=None)

    def stacked_users_est(self):
        return np.vstack(self.users_est)


def substream(seed, *key):
    """Generator for an independent, order-invariant random substream."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def complex_gaussian(rng, shape, var):
    """i.i.d. complex Gaussian entries, zero mean, per-entry variance `var`."""
    if var < 0:
        raise ValueError(f"variance must be nonnegative, got {var}")
    scale = np.sqrt(var / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def generate_channels(dims, m_ratio, sigma_b2, sigma_e2, rng):
    """Draw one ChannelSet: unit-variance user entries, m_ratio-variance
    eavesdropper entries (m_ratio > 1 means the statistically stronger
    eavesdropper)."""
    if m_ratio <= 0:
        raise ValueError(f"m_ratio must be positive, got {m_ratio}")
    if sigma_b2 < 0 or sigma_e2 < 0:
        raise ValueError("noise variances must be nonnegative")
    users = [
        complex_gaussian(rng, (dims.n_r, dims.n_t), 1.0) for _ in range(dims.t_users)
    ]
    eves = [
        complex_gaussian(rng, (dims.n_k, dims.n_t), m_ratio)
        for _ in range(dims.k_eves)
    ]
    return ChannelSet(
        users=users, eves=eves, sigma_b2=sigma_b2, sigma_e2=sigma_e2, m_ratio=m_ratio
    )


def perturb_csi(channel_set, error_var, rng):
    """Additive-error CSI model: H_est = H + E, E i.i.d. complex Gaussian."""
    if error_var < 0:
        raise ValueError(f"error_var must be nonnegative, got {error_var}")
    if error_var == 0.0:
        users_est = [h.copy() for h in channel_set.users]
    else:
        users_est = [
            h + complex_gaussian(rng, h.shape, error_var) for h in channel_set.users
        ]
    return CsiView(users_est=users_est, error_var=error_var, eves_est=None)


def apply_channel(h, x, noise_var, rng):
    """Return h @ x + n with per-entry complex noise variance noise_var."""
    h = np.asarray(h)
    x = np.asarray(x)
    if x.shape[0] != h.shape[1]:
        raise ValueError(f"length(x)={x.shape[0]} != cols(h)={h.shape[1]}")
    y = h @ x
    if noise_var > 0:
        y = y + complex_gaussian(rng, y.shape, noise_var)
    return y

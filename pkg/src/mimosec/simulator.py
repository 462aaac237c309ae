"""Monte Carlo engine: QPSK chains, per-frame precoding, BER and
secrecy-rate measurement over SNR sweeps.

Channels are regenerated every frame (fast fading). Each frame derives its
random substreams from (seed, snr index, frame index), and partial results
are combined in a fixed chunk order, so a run is bit-identical for any
worker count.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import complexity
from .channel import (
    SystemDims,
    apply_channel,
    generate_channels,
    perturb_csi,
    substream,
)
from .exceptions import ConfigError
from .precoding import (
    bd_precoder,
    gmi_precoder,
    mmse_precoder,
    normalize_power,
    sgmi_precoder,
    zf_precoder,
)
from .secrecy import design_artificial_noise, precoder_covariance, secrecy_rate
from .thp import (
    QPSK_TAU,
    NonlinearPrecoder,
    modulo,
    so_thp_classic,
    so_thp_sgmi,
    thp_encode,
)

#: frames per parallel work unit; fixed so that reduction order never
#: depends on the worker count
CHUNK_FRAMES = 256

_SQRT2 = math.sqrt(2.0)

#: symbol for bit pair (b1, b2) at index 2*b1 + b2
QPSK_POINTS = np.array(
    [(+1 + 1j), (-1 + 1j), (+1 - 1j), (-1 - 1j)], dtype=np.complex128
) / _SQRT2
QPSK_BITS = np.array([(0, 0), (0, 1), (1, 0), (1, 1)], dtype=np.int64)


def qpsk_modulate(bits):
    """Gray-mapped unit-energy QPSK. bits has shape (..., 2)."""
    bits = np.asarray(bits)
    b1, b2 = bits[..., 0], bits[..., 1]
    return ((1 - 2 * b2) + 1j * (1 - 2 * b1)) / _SQRT2


def qpsk_demodulate(y):
    """Sign slicing per real/imag part; exact zero decides toward bit 0."""
    y = np.asarray(y)
    b1 = (y.imag < 0).astype(np.int64)
    b2 = (y.real < 0).astype(np.int64)
    return np.stack([b1, b2], axis=-1)


@dataclass(frozen=True)
class ExperimentConfig:
    dims: SystemDims = SystemDims(4, 2, 2, 2, 2)
    snr_db_list: tuple = tuple(range(0, 21, 2))
    algorithms: tuple = complexity.ALL_ALGORITHMS
    m_ratio: float = 0.5
    rho: float = 1.0
    csi_error_var: float = 0.0
    an_enabled: bool = False
    frames_per_point: int = 20000
    seed: int = 1
    e_s: float = 1.0
    #: skip secrecy-rate and eavesdropper measurements (BER-only sweeps)
    ber_only: bool = False

    def validate(self):
        if len(self.snr_db_list) == 0:
            raise ConfigError("snr_db_list must be nonempty")
        if list(self.snr_db_list) != sorted(self.snr_db_list):
            raise ConfigError("snr_db_list must be sorted ascending")
        if self.frames_per_point < 1:
            raise ConfigError("frames_per_point must be >= 1")
        if not 0 < self.rho <= 1:
            raise ConfigError(f"rho must lie in (0, 1], got rho={self.rho}")
        if self.m_ratio <= 0:
            raise ConfigError("m_ratio must be positive")
        if self.csi_error_var < 0:
            raise ConfigError("csi_error_var must be nonnegative")
        if self.e_s <= 0:
            raise ConfigError("e_s must be positive")
        if len(self.algorithms) == 0:
            raise ConfigError("algorithms must be nonempty")
        for tag in self.algorithms:
            if tag not in complexity.ALL_ALGORITHMS:
                raise ConfigError(f"unknown algorithm tag {tag!r}")
        if self.an_enabled and self.rho < 1 and self.dims.n_t <= self.dims.t_users * self.dims.n_r:
            raise ConfigError(
                "artificial noise needs spare transmit antennas: "
                "n_t must exceed total user antennas"
            )
        return self


@dataclass
class ResultCell:
    ber: float
    secrecy_rate_bits: float
    flops: float
    frames: int
    bit_errors: int
    bits_total: int
    ber_eve: float


@dataclass
class SimResult:
    """Grid of measurements, one cell per (algorithm, SNR) pair."""

    config: ExperimentConfig
    cells: dict = field(default_factory=dict)

    def cell(self, tag, snr_db):
        return self.cells[(tag, float(snr_db))]

    def rows(self):
        """Rows in CSV order: algorithm order, then ascending SNR."""
        for tag in self.config.algorithms:
            for snr in self.config.snr_db_list:
                c = self.cell(tag, snr)
                yield {
                    "algorithm": tag,
                    "snr_db": float(snr),
                    "ber": c.ber,
                    "secrecy_rate_bits": c.secrecy_rate_bits,
                    "flops": c.flops,
                    "frames": c.frames,
                    "bit_errors": c.bit_errors,
                }


def noise_variance(e_s, snr_db):
    """SNR is total transmit power over per-antenna noise variance."""
    if math.isinf(snr_db):
        return 0.0
    return e_s * 10.0 ** (-snr_db / 10.0)


def mmse_loading(dims, sigma_b2, e_s):
    """Regularization alpha = n_t sigma_B^2 / E_s, floored away from zero
    for the constructions that require strict positivity."""
    return max(dims.n_t * sigma_b2 / e_s, 1e-12)


def build_precoder(tag, csi, dims, alpha, e_r, tau=QPSK_TAU):
    """Construct and power-normalize the precoder named by `tag`."""
    if tag == "zf":
        pre = zf_precoder(csi, dims)
    elif tag == "mmse":
        pre = mmse_precoder(csi, dims, alpha)
    elif tag == "bd":
        pre = bd_precoder(csi, dims)
    elif tag == "gmi":
        pre = gmi_precoder(csi, dims, alpha)
    elif tag == "sgmi":
        pre = sgmi_precoder(csi, dims, alpha)
    elif tag == "so-thp":
        return so_thp_classic(csi, dims, tau=tau, e_r=e_r)
    elif tag == "so-thp-sgmi":
        return so_thp_sgmi(csi, dims, alpha, tau=tau, e_r=e_r)
    else:
        raise ConfigError(f"unknown algorithm tag {tag!r}")
    return normalize_power(pre, e_r)


@dataclass(frozen=True)
class FrameStats:
    bit_errors: int
    bits_total: int
    eve_bit_errors: int
    eve_bits_total: int


def _scaled_matrix(precoder):
    if isinstance(precoder, NonlinearPrecoder):
        cols = []
        for k in range(precoder.n_users):
            start = sum(precoder.stream_counts[:k])
            stop = start + precoder.stream_counts[k]
            cols.append(precoder.betas[k] * precoder.f[:, start:stop])
        return np.hstack(cols)
    return precoder.scaled()


def _decode_users(precoder, channels, x, sigma_b2, rng, bits):
    """Per-user receive chains; returns (bit_errors, bits_total)."""
    errors = 0
    if isinstance(precoder, NonlinearPrecoder):
        tau = precoder.tau
        for k in range(precoder.n_users):
            u = int(precoder.order[k])
            y = apply_channel(channels.users[u], x, sigma_b2, rng)
            start = sum(precoder.stream_counts[:k])
            stop = start + precoder.stream_counts[k]
            z = precoder.d_block(k) @ y
            z = modulo(z / precoder.gains[start:stop], tau)
            hat = qpsk_demodulate(z)
            errors += int(np.sum(hat != bits[start:stop]))
    else:
        for r in range(precoder.n_users):
            y = apply_channel(channels.users[r], x, sigma_b2, rng)
            z = precoder.m_filters[r] @ y / precoder.betas[r]
            start = sum(precoder.stream_counts[:r])
            stop = start + precoder.stream_counts[r]
            hat = qpsk_demodulate(z)
            errors += int(np.sum(hat != bits[start:stop]))
    return errors, bits.size


def _decode_eves(precoder, channels, x, p_scaled, sigma_e2, rng, bits):
    """Eavesdropper chains: per-eve MMSE equalizer on the effective
    stream matrix, modulo for THP, then slicing."""
    nonlinear = isinstance(precoder, NonlinearPrecoder)
    errors = 0
    total = 0
    reg = max(sigma_e2, 1e-12)
    for h_e in channels.eves:
        y = apply_channel(h_e, x, sigma_e2, rng)
        a = h_e @ p_scaled
        w = np.linalg.solve(
            a.conj().T @ a + reg * np.eye(a.shape[1]), a.conj().T
        )
        z = w @ y
        if nonlinear:
            z = modulo(z, precoder.tau)
        hat = qpsk_demodulate(z)
        errors += int(np.sum(hat != bits))
        total += bits.size
    return errors, total


def run_frame(cfg, channels, precoder, an, snr_db, rng):
    """One transmit/receive round trip; counts bit errors for all users
    and, separately, all eavesdroppers."""
    sigma_b2 = noise_variance(cfg.e_s, snr_db)
    sigma_e2 = sigma_b2
    n_streams = cfg.dims.total_streams
    bits = rng.integers(0, 2, size=(n_streams, 2))
    s = qpsk_modulate(bits)

    p_scaled = _scaled_matrix(precoder)
    if isinstance(precoder, NonlinearPrecoder):
        # bits are laid out in encoding order; s feeds the feedback loop
        v = thp_encode(s, precoder.b, precoder.tau)
        x = p_scaled @ v
    else:
        x = p_scaled @ s

    if an is not None and an.m_an > 0 and an.rho < 1.0:
        x = x + an.p_prime @ an.sample(rng)

    errors, total = _decode_users(precoder, channels, x, sigma_b2, rng, bits)
    if cfg.ber_only:
        eve_errors, eve_total = 0, 0
    else:
        eve_errors, eve_total = _decode_eves(
            precoder, channels, x, p_scaled, sigma_e2, rng, bits
        )
    return FrameStats(errors, total, eve_errors, eve_total)


def _simulate_chunk(cfg, snr_index, frame_lo, frame_hi):
    """Simulate frames [frame_lo, frame_hi) at one SNR point for every
    configured algorithm; returns per-algorithm partial sums."""
    dims = cfg.dims
    snr_db = float(cfg.snr_db_list[snr_index])
    sigma_b2 = noise_variance(cfg.e_s, snr_db)
    alpha = mmse_loading(dims, sigma_b2, cfg.e_s)
    an_on = cfg.an_enabled and cfg.rho < 1.0
    rho_eff = cfg.rho if an_on else 1.0
    e_r = [rho_eff * cfg.e_s / dims.t_users] * dims.t_users

    acc = {
        tag: np.zeros(5) for tag in cfg.algorithms
    }  # bit_err, bits, eve_err, eve_bits, secrecy_sum
    for frame in range(frame_lo, frame_hi):
        ch_rng = substream(cfg.seed, snr_index, frame, 0)
        channels = generate_channels(dims, cfg.m_ratio, sigma_b2, sigma_b2, ch_rng)
        csi_rng = substream(cfg.seed, snr_index, frame, 1)
        csi = perturb_csi(channels, cfg.csi_error_var, csi_rng)
        an = design_artificial_noise(csi, dims, cfg.rho, cfg.e_s) if an_on else None
        q_an = an.transmit_covariance() if an_on else None
        h_b = channels.stacked_users()
        for ai, tag in enumerate(cfg.algorithms):
            rng = substream(cfg.seed, snr_index, frame, 3 + ai)
            precoder = build_precoder(tag, csi, dims, alpha, e_r)
            stats = run_frame(cfg, channels, precoder, an, snr_db, rng)
            if sigma_b2 > 0 and not cfg.ber_only:
                # non-colluding eavesdroppers: rate against the strongest
                q_s = precoder_covariance(precoder, cfg.e_s, rho_eff)
                rate = min(
                    secrecy_rate(
                        h_b,
                        h_e,
                        q_s,
                        q_an_eve=q_an,
                        sigma_b2=sigma_b2,
                        sigma_e2=sigma_b2,
                        q_an_user=q_an,
                    ).rate_bits
                    for h_e in channels.eves
                )
            else:
                rate = 0.0
            acc[tag] += (
                stats.bit_errors,
                stats.bits_total,
                stats.eve_bit_errors,
                stats.eve_bits_total,
                rate,
            )
    return acc


def _chunk_task(args):
    return _simulate_chunk(*args)


def run_experiment(cfg, workers=1):
    """Full sweep over (algorithm, SNR); deterministic for any worker
    count at a fixed seed."""
    cfg.validate()
    tasks = []
    for si in range(len(cfg.snr_db_list)):
        lo = 0
        while lo < cfg.frames_per_point:
            hi = min(lo + CHUNK_FRAMES, cfg.frames_per_point)
            tasks.append((cfg, si, lo, hi))
            lo = hi

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(_chunk_task, tasks, chunksize=1))
    else:
        partials = [_simulate_chunk(*t) for t in tasks]

    # reduce in fixed task order
    totals = {}
    for (cfg_, si, lo, hi), part in zip(tasks, partials):
        snr = float(cfg.snr_db_list[si])
        for tag, vec in part.items():
            key = (tag, snr)
            totals.setdefault(key, np.zeros(5))
            totals[key] = totals[key] + vec

    result = SimResult(config=cfg)
    for tag in cfg.algorithms:
        flops = complexity.flops_algorithm(tag, cfg.dims)
        for snr in cfg.snr_db_list:
            vec = totals[(tag, float(snr))]
            bit_err, bits, eve_err, eve_bits, rate_sum = vec
            result.cells[(tag, float(snr))] = ResultCell(
                ber=float(bit_err / bits),
                secrecy_rate_bits=float(rate_sum / cfg.frames_per_point),
                flops=flops,
                frames=cfg.frames_per_point,
                bit_errors=int(bit_err),
                bits_total=int(bits),
                ber_eve=float(eve_err / eve_bits) if eve_bits else 0.0,
            )
    return result

"""Artificial-noise design and secrecy-rate evaluation.

The secrecy rate is the clamped difference of two log-det mutual
informations, in bits per channel use. Artificial noise lives in the null
space of the (estimated) stacked user channel and consumes the fraction
1 - rho of the power budget.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import NullSpaceUnavailableError
from .channel import complex_gaussian
from .numerics import null_space


@dataclass(frozen=True)
class ArtificialNoise:
    """Jamming-signal subspace and covariance."""

    p_prime: np.ndarray
    q_s_prime: np.ndarray
    rho: float

    @property
    def m_an(self):
        return self.p_prime.shape[1]

    def transmit_covariance(self):
        """AN covariance seen at the transmit antennas: P' Q' P'^H."""
        if self.m_an == 0:
            n = self.p_prime.shape[0]
            return np.zeros((n, n), dtype=np.complex128)
        return self.p_prime @ self.q_s_prime @ self.p_prime.conj().T

    def sample(self, rng):
        """Draw one jamming vector with E{s' s'^H} = Q'."""
        if self.m_an == 0:
            return np.zeros(0, dtype=np.complex128)
        var = self.q_s_prime[0, 0].real
        return complex_gaussian(rng, (self.m_an,), var)


@dataclass(frozen=True)
class SecrecyReport:
    """User/eavesdropper mutual-information terms and their clamped gap."""

    rate_bits: float
    rate_user_term: float
    rate_eve_term: float


def design_artificial_noise(csi, dims, rho, e_s):
    """Place AN in the null space of the estimated user channel with an
    isotropic covariance of total power (1 - rho) * e_s."""
    if not 0 < rho <= 1:
        raise ValueError(f"rho must lie in (0, 1], got {rho}")
    if e_s <= 0:
        raise ValueError(f"e_s must be positive, got {e_s}")
    basis = null_space(csi.stacked_users_est())
    m_an = basis.shape[1]
    if rho == 1.0:
        return ArtificialNoise(
            p_prime=basis, q_s_prime=np.zeros((m_an, m_an)), rho=rho
        )
    if m_an == 0:
        raise NullSpaceUnavailableError(
            "user channel has no null space; artificial noise needs spare "
            "transmit dimensions (n_t > total user antennas)"
        )
    q = ((1.0 - rho) * e_s / m_an) * np.eye(m_an)
    return ArtificialNoise(p_prime=basis, q_s_prime=q, rho=rho)


def _hermitian_psd(q, tol=1e-9):
    q = np.asarray(q)
    if not np.allclose(q, q.conj().T, atol=tol):
        return False
    w = np.linalg.eigvalsh((q + q.conj().T) / 2.0)
    return bool(w.min() >= -tol * max(1.0, abs(w.max())))


def _logdet2(a):
    sign, logabs = np.linalg.slogdet(a)
    return logabs / np.log(2.0)


def _rate_term(h, q_s, noise_cov):
    """log2 det(I + C^{-1} H Q H^H) via det ratios; C is the effective
    noise covariance at the receiver."""
    signal = h @ q_s @ h.conj().T
    return _logdet2(noise_cov + signal) - _logdet2(noise_cov)


def secrecy_rate(
    h_b, h_e, q_s, q_an_eve=None, sigma_b2=1.0, sigma_e2=1.0, q_an_user=None
):
    """Clamped log-det secrecy rate in bits per channel use.

    q_an_eve / q_an_user are optional transmit-side AN covariances
    (P' Q' P'^H); they enter as extra colored noise at the respective
    receiver. Under perfect CSI q_an_user contributes nothing because the
    AN lies in the user channel's null space.
    """
    if sigma_b2 <= 0 or sigma_e2 <= 0:
        raise ValueError("noise variances must be positive")
    if not _hermitian_psd(q_s):
        raise ValueError("q_s must be Hermitian positive semidefinite")
    h_b = np.atleast_2d(np.asarray(h_b, dtype=np.complex128))
    h_e = np.atleast_2d(np.asarray(h_e, dtype=np.complex128))

    cov_b = sigma_b2 * np.eye(h_b.shape[0], dtype=np.complex128)
    if q_an_user is not None:
        cov_b = cov_b + h_b @ q_an_user @ h_b.conj().T
    cov_e = sigma_e2 * np.eye(h_e.shape[0], dtype=np.complex128)
    if q_an_eve is not None:
        cov_e = cov_e + h_e @ q_an_eve @ h_e.conj().T

    user_term = float(_rate_term(h_b, q_s, cov_b))
    eve_term = float(_rate_term(h_e, q_s, cov_e))
    return SecrecyReport(
        rate_bits=max(0.0, user_term - eve_term),
        rate_user_term=user_term,
        rate_eve_term=eve_term,
    )


def precoder_covariance(pre, e_s, rho=1.0):
    """Transmit covariance induced by a precoder, scaled so that
    trace(Q_s) = rho * e_s exactly."""
    p = pre.f if hasattr(pre, "f") else pre.p
    gram = p @ p.conj().T
    tr = float(np.trace(gram).real)
    if tr <= 0.0:
        raise ValueError("precoder matrix is zero; covariance undefined")
    return (rho * e_s / tr) * gram


def uniform_covariance(e_s, n_t, rho=1.0):
    """Isotropic benchmark covariance with trace rho * e_s."""
    return (rho * e_s / n_t) * np.eye(n_t, dtype=np.complex128)

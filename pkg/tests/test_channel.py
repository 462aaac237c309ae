"""Channel generation, CSI perturbation, and substream reproducibility."""

import numpy as np
import pytest

from mimosec.channel import (
    SystemDims,
    apply_channel,
    complex_gaussian,
    generate_channels,
    perturb_csi,
    substream,
)


def test_system_dims_validation():
    d = SystemDims(4, 2, 2, 2, 2)
    assert d.total_streams == 4
    with pytest.raises(ValueError):
        SystemDims(3, 2, 2, 2, 2)  # n_t < t_users * n_r
    with pytest.raises(ValueError):
        SystemDims(4, 0, 2, 2, 2)
    with pytest.raises(ValueError):
        SystemDims(4, 2, 2, 2, 0)


def test_substream_is_reproducible_and_key_sensitive():
    a = substream(1, 0, 5).standard_normal(8)
    b = substream(1, 0, 5).standard_normal(8)
    c = substream(1, 0, 6).standard_normal(8)
    d = substream(2, 0, 5).standard_normal(8)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_complex_gaussian_moments():
    rng = substream(42, 0)
    x = complex_gaussian(rng, (200_000,), 3.0)
    assert abs(np.mean(x)) < 0.02
    assert abs(np.var(x) - 3.0) < 0.05
    # real/imag split evenly
    assert abs(np.var(x.real) - 1.5) < 0.03
    assert abs(np.var(x.imag) - 1.5) < 0.03


def test_complex_gaussian_rejects_negative_variance():
    with pytest.raises(ValueError):
        complex_gaussian(substream(0), (3,), -1.0)


def test_generate_channels_shapes_and_variances():
    dims = SystemDims(4, 2, 2, 3, 2)
    rng = substream(7, 0)
    m_ratio = 2.0
    cs = generate_channels(dims, m_ratio, 0.1, 0.2, rng)
    assert len(cs.users) == 2 and len(cs.eves) == 3
    assert all(h.shape == (2, 4) for h in cs.users)
    assert all(h.shape == (2, 4) for h in cs.eves)
    assert cs.stacked_users().shape == (4, 4)
    assert cs.stacked_eves().shape == (6, 4)
    # empirical variances over many draws
    user_entries, eve_entries = [], []
    for i in range(400):
        cs = generate_channels(dims, m_ratio, 0.1, 0.2, substream(7, i))
        user_entries.append(np.concatenate([h.ravel() for h in cs.users]))
        eve_entries.append(np.concatenate([h.ravel() for h in cs.eves]))
    vu = np.var(np.concatenate(user_entries))
    ve = np.var(np.concatenate(eve_entries))
    assert abs(vu - 1.0) < 0.05
    assert abs(ve - m_ratio) < 0.1


def test_generate_channels_rejects_bad_params():
    dims = SystemDims(4, 2, 2, 2, 2)
    with pytest.raises(ValueError):
        generate_channels(dims, 0.0, 0.1, 0.1, substream(0))
    with pytest.raises(ValueError):
        generate_channels(dims, 1.0, -0.1, 0.1, substream(0))


def test_perturb_csi_zero_error_copies():
    dims = SystemDims(4, 2, 2, 2, 2)
    cs = generate_channels(dims, 0.5, 0.1, 0.1, substream(3, 0))
    csi = perturb_csi(cs, 0.0, substream(3, 1))
    for est, true in zip(csi.users_est, cs.users):
        assert np.array_equal(est, true)
        assert est is not true
    assert csi.eves_est is None
    assert csi.error_var == 0.0


def test_perturb_csi_error_statistics():
    dims = SystemDims(4, 2, 2, 2, 2)
    err_var = 0.05
    diffs = []
    for i in range(500):
        cs = generate_channels(dims, 0.5, 0.1, 0.1, substream(5, i, 0))
        csi = perturb_csi(cs, err_var, substream(5, i, 1))
        for est, true in zip(csi.users_est, cs.users):
            diffs.append((est - true).ravel())
    d = np.concatenate(diffs)
    assert abs(np.mean(d)) < 0.01
    assert abs(np.var(d) - err_var) < 0.01


def test_apply_channel_noiseless_is_exact_product():
    h = np.array([[1.0, 2.0], [0.0, 1j]], dtype=np.complex128)
    x = np.array([1.0 + 1j, -1.0], dtype=np.complex128)
    y = apply_channel(h, x, 0.0, substream(0))
    assert np.array_equal(y, h @ x)


def test_apply_channel_noise_variance():
    h = np.eye(2, dtype=np.complex128)
    x = np.zeros(2, dtype=np.complex128)
    samples = [apply_channel(h, x, 0.25, substream(9, i)) for i in range(20000)]
    v = np.var(np.concatenate(samples))
    assert abs(v - 0.25) < 0.01


def test_apply_channel_shape_mismatch():
    with pytest.raises(ValueError):
        apply_channel(np.eye(2), np.zeros(3), 0.0, substream(0))

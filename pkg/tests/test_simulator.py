"""Monte Carlo engine: QPSK mapping, configuration, determinism."""

import math
import pickle
from dataclasses import replace

import numpy as np
import pytest

from mimosec.channel import SystemDims, substream
from mimosec.exceptions import ConfigError
from mimosec.simulator import (
    QPSK_POINTS,
    ExperimentConfig,
    build_precoder,
    mmse_loading,
    noise_variance,
    qpsk_demodulate,
    qpsk_modulate,
    run_experiment,
)
from mimosec.thp import NonlinearPrecoder

DIMS = SystemDims(4, 2, 2, 2, 2)


def test_qpsk_roundtrip_all_bit_pairs():
    bits = np.array([[0, 0], [0, 1], [1, 0], [1, 1]])
    s = qpsk_modulate(bits)
    assert np.allclose(np.abs(s), 1.0)
    assert np.array_equal(qpsk_demodulate(s), bits)


def test_qpsk_gray_mapping_neighbors_differ_in_one_bit():
    # quadrant neighbors (sharing a real or imaginary sign) differ in
    # exactly one bit
    bits = np.array([[0, 0], [0, 1], [1, 0], [1, 1]])
    s = qpsk_modulate(bits)
    for i in range(4):
        for j in range(4):
            if i == j:
                continue
            shared_re = np.sign(s[i].real) == np.sign(s[j].real)
            shared_im = np.sign(s[i].imag) == np.sign(s[j].imag)
            hamming = int(np.sum(bits[i] != bits[j]))
            if shared_re or shared_im:
                assert hamming == 1
            else:
                assert hamming == 2


def test_qpsk_demodulate_zero_ties_to_bit_zero():
    assert np.array_equal(qpsk_demodulate(np.array(0.0 + 0.0j)), [0, 0])


def test_qpsk_points_match_modulator():
    bits = np.array([[0, 0], [0, 1], [1, 0], [1, 1]])
    assert np.allclose(QPSK_POINTS, qpsk_modulate(bits))


def test_noise_variance():
    assert noise_variance(1.0, 0.0) == 1.0
    assert abs(noise_variance(1.0, 10.0) - 0.1) < 1e-15
    assert noise_variance(2.0, 3.0) == 2.0 * 10 ** (-0.3)
    assert noise_variance(1.0, math.inf) == 0.0


def test_mmse_loading_floor():
    assert mmse_loading(DIMS, 0.1, 1.0) == 0.4
    assert mmse_loading(DIMS, 0.0, 1.0) == 1e-12


def test_config_validation_errors():
    good = ExperimentConfig()
    good.validate()
    with pytest.raises(ConfigError):
        replace(good, snr_db_list=()).validate()
    with pytest.raises(ConfigError):
        replace(good, snr_db_list=(10.0, 0.0)).validate()
    with pytest.raises(ConfigError):
        replace(good, frames_per_point=0).validate()
    with pytest.raises(ConfigError):
        replace(good, rho=0.0).validate()
    with pytest.raises(ConfigError):
        replace(good, rho=1.5).validate()
    with pytest.raises(ConfigError):
        replace(good, m_ratio=0.0).validate()
    with pytest.raises(ConfigError):
        replace(good, csi_error_var=-0.1).validate()
    with pytest.raises(ConfigError):
        replace(good, e_s=0.0).validate()
    with pytest.raises(ConfigError):
        replace(good, algorithms=()).validate()
    with pytest.raises(ConfigError):
        replace(good, algorithms=("zf", "vp")).validate()
    with pytest.raises(ConfigError):
        # AN needs spare transmit antennas
        replace(good, an_enabled=True, rho=0.6).validate()


def test_an_config_feasible_with_single_antenna_users():
    cfg = ExperimentConfig(
        dims=SystemDims(4, 2, 1, 2, 2), an_enabled=True, rho=0.6
    )
    cfg.validate()


def _small_csi(seed):
    from mimosec.channel import generate_channels, perturb_csi

    cs = generate_channels(DIMS, 0.5, 0.1, 0.1, substream(seed, 0))
    return perturb_csi(cs, 0.0, substream(seed, 1))


def test_build_precoder_dispatch():
    csi = _small_csi(1)
    e_r = [0.5, 0.5]
    for tag in ("zf", "mmse", "gmi", "sgmi"):
        pre = build_precoder(tag, csi, DIMS, 0.04, e_r)
        assert pre.algorithm_tag == tag
        # power normalized
        total = np.sum(np.abs(pre.scaled()) ** 2)
        assert abs(total - 1.0) < 1e-10
    for tag in ("so-thp", "so-thp-sgmi"):
        pre = build_precoder(tag, csi, DIMS, 0.04, e_r)
        assert isinstance(pre, NonlinearPrecoder)
        assert pre.algorithm_tag == tag
    with pytest.raises(ConfigError):
        build_precoder("vp", csi, DIMS, 0.04, e_r)


def _tiny_cfg(**kw):
    base = dict(
        dims=DIMS,
        snr_db_list=(10.0,),
        algorithms=("mmse", "so-thp-sgmi"),
        frames_per_point=64,
        seed=5,
    )
    base.update(kw)
    return ExperimentConfig(**base).validate()


def test_run_experiment_grid_and_counters():
    cfg = _tiny_cfg(snr_db_list=(0.0, 10.0))
    res = run_experiment(cfg)
    rows = list(res.rows())
    assert len(rows) == 4
    assert [r["algorithm"] for r in rows] == ["mmse", "mmse", "so-thp-sgmi", "so-thp-sgmi"]
    assert [r["snr_db"] for r in rows] == [0.0, 10.0, 0.0, 10.0]
    for r in rows:
        assert r["frames"] == 64
        c = res.cell(r["algorithm"], r["snr_db"])
        assert c.bits_total == 64 * DIMS.total_streams * 2
        assert 0.0 <= c.ber <= 1.0
        assert c.ber == c.bit_errors / c.bits_total
        assert c.flops > 0


def test_run_experiment_worker_invariance():
    cfg = _tiny_cfg(frames_per_point=300)  # spans two chunks
    r1 = run_experiment(cfg, workers=1)
    r2 = run_experiment(cfg, workers=2)
    assert pickle.dumps(r1) == pickle.dumps(r2)


def test_run_experiment_seed_sensitivity():
    a = run_experiment(_tiny_cfg())
    b = run_experiment(_tiny_cfg(seed=6))
    assert a.cell("mmse", 10.0).bit_errors != b.cell("mmse", 10.0).bit_errors


def test_ber_decreases_with_snr():
    cfg = _tiny_cfg(snr_db_list=(0.0, 20.0), algorithms=("mmse",),
                    frames_per_point=400, ber_only=True)
    res = run_experiment(cfg)
    assert res.cell("mmse", 0.0).ber > res.cell("mmse", 20.0).ber


def test_ber_only_preserves_user_ber():
    full = run_experiment(_tiny_cfg())
    fast = run_experiment(_tiny_cfg(ber_only=True))
    for tag in ("mmse", "so-thp-sgmi"):
        assert full.cell(tag, 10.0).bit_errors == fast.cell(tag, 10.0).bit_errors
        assert fast.cell(tag, 10.0).secrecy_rate_bits == 0.0
        assert fast.cell(tag, 10.0).ber_eve == 0.0
        assert full.cell(tag, 10.0).secrecy_rate_bits > 0.0


def test_secrecy_rate_populated_and_an_run_works():
    cfg = ExperimentConfig(
        dims=SystemDims(4, 2, 1, 2, 2),
        snr_db_list=(10.0,),
        algorithms=("sgmi",),
        frames_per_point=32,
        an_enabled=True,
        rho=0.6,
        csi_error_var=0.05,
        seed=9,
    ).validate()
    res = run_experiment(cfg)
    cell = res.cell("sgmi", 10.0)
    assert cell.secrecy_rate_bits >= 0.0
    assert cell.frames == 32

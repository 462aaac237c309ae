"""Analytical FLOP model: primitive counts and algorithm orderings."""

import pytest

from mimosec.channel import SystemDims
from mimosec.complexity import (
    ALL_ALGORITHMS,
    COMPLEXITY_FIGURE_SET,
    figure_dims,
    flops_algorithm,
    flops_primitive,
)
from mimosec.exceptions import ConfigError

DIMS = SystemDims(4, 2, 2, 2, 2)


# Independent re-derivations of the real-arithmetic base counts, applied
# to the doubled (2m x 2n) real embedding of a complex matrix.
def _qr_real(m, n):
    return 2.0 * n * n * (m - n / 3.0)


def _svd_real(m, n):
    return 4.0 * m * m * n + 8.0 * m * n * n + 9.0 * n ** 3


def test_primitive_matmul():
    assert flops_primitive("matmul", 2, 3, 4) == 8 * 2 * 3 * 4


def test_primitive_qr():
    assert flops_primitive("qr", 4, 2) == _qr_real(8, 4)


def test_primitive_svd_and_symmetry():
    assert flops_primitive("svd", 4, 2) == _svd_real(8, 4)
    assert flops_primitive("svd", 2, 4) == flops_primitive("svd", 4, 2)


def test_primitive_inverse():
    assert flops_primitive("inverse", 4) == 2.0 * 8 ** 3


def test_primitive_validation():
    with pytest.raises(ConfigError):
        flops_primitive("cholesky", 3)
    with pytest.raises(ValueError):
        flops_primitive("matmul", 2, 0, 4)


def test_zf_count_matches_hand_derivation():
    # H H^H (K x n_t x K), inversion of K x K, H^H times inverse
    k, nt = DIMS.total_streams, DIMS.n_t
    expected = 8 * k * nt * k + 2.0 * (2 * k) ** 3 + 8 * nt * k * k
    assert flops_algorithm("zf", DIMS) == expected == 2048.0


def test_mmse_count_matches_hand_derivation():
    k, nt = DIMS.total_streams, DIMS.n_t
    expected = 8 * nt * k * nt + 2.0 * (2 * nt) ** 3 + 8 * nt * nt * k
    assert flops_algorithm("mmse", DIMS) == expected == 2048.0


def test_unknown_tag_raises():
    with pytest.raises(ConfigError):
        flops_algorithm("dirty-paper", DIMS)


def test_counts_positive_and_deterministic():
    for tag in ALL_ALGORITHMS:
        a = flops_algorithm(tag, DIMS)
        b = flops_algorithm(tag, DIMS)
        assert a == b > 0


def test_doubling_antennas_increases_every_count():
    small = figure_dims(4)
    big = figure_dims(8)
    for tag in ALL_ALGORITHMS:
        assert flops_algorithm(tag, big) > flops_algorithm(tag, small)


def test_figure_ordering_bd_lowest_and_thp_sgmi_cheaper():
    for n_t in (4, 6, 8):
        dims = figure_dims(n_t)
        counts = {tag: flops_algorithm(tag, dims) for tag in COMPLEXITY_FIGURE_SET}
        assert min(counts, key=counts.get) == "bd"
        assert counts["bd"] < counts["sgmi"]
        assert counts["so-thp-sgmi"] < counts["so-thp"]


def test_figure_dims_family():
    d = figure_dims(6)
    assert (d.n_t, d.t_users, d.n_r, d.k_eves, d.n_k) == (6, 2, 3, 2, 3)
    with pytest.raises(ConfigError):
        figure_dims(5)


def test_nonlinear_variants_cost_more_than_their_linear_core():
    # the feedback construction adds strictly positive work
    assert flops_algorithm("so-thp-sgmi", DIMS) > flops_algorithm("sgmi", DIMS)


def test_pure_function_of_dims():
    d1 = SystemDims(4, 2, 2, 2, 2)
    d2 = SystemDims(4, 2, 2, 7, 3)  # eavesdroppers do not enter the counts
    for tag in ALL_ALGORITHMS:
        assert flops_algorithm(tag, d1) == flops_algorithm(tag, d2)

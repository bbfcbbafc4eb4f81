import numpy as np
import pytest

from wnfield.errors import DimensionMismatchError, InsufficientSamplesError
from wnfield.field import (
    build_field,
    covariance_standard_error,
    draw_noise,
    empirical_covariance,
    mollify_factor,
    noise_matrix,
    sample,
    tangent_gram,
    truncation_error,
    white_noise_functional,
)
from wnfield.kernels import CovarianceKernel, assemble, builtin_kernel
from wnfield.spaces import DiscreteMeasureSpace, interval_grid
from wnfield.spectral import reproduce_covariance

ZERO_KERNEL = CovarianceKernel("zero", lambda s, t: np.zeros(np.broadcast(s, t).shape))
CONSTANT_KERNEL = CovarianceKernel("constant", lambda s, t: np.full(np.broadcast(s, t).shape, 0.7))


def test_sample_deterministic_given_seed():
    fld = build_field(builtin_kernel("brownian_motion"), interval_grid(8))
    b1 = sample(fld, 2, seed=5)
    b2 = sample(fld, 2, seed=5)
    assert np.array_equal(b1.draws, b2.draws)
    b3 = sample(fld, 2, seed=6)
    assert not np.array_equal(b1.draws, b3.draws)


def test_sample_zero_kernel_gives_zero_draws():
    fld = build_field(ZERO_KERNEL, interval_grid(6))
    assert fld.dec.rank == 0
    batch = sample(fld, 4, seed=1)
    assert np.array_equal(batch.draws, np.zeros((4, 6)))


def test_sample_single_point_standard_normal():
    # counting measure on one point with unit white kernel: draws ~ N(0,1)
    space = DiscreteMeasureSpace(points=[0.0], weights=[1.0])
    fld = build_field(builtin_kernel("white_diagonal", {"sigma2": 1.0}), space)
    draws = sample(fld, 100_000, seed=314).draws.ravel()
    assert 0.985 <= draws.var() <= 1.015


def test_sample_truncation_validation():
    fld = build_field(builtin_kernel("brownian_motion"), interval_grid(8))
    with pytest.raises(ValueError):
        sample(fld, 3, m=9)
    with pytest.raises(ValueError):
        sample(fld, 3, m=-1)
    with pytest.raises(ValueError):
        sample(fld, 0)


def test_sample_truncations_share_noise():
    fld = build_field(builtin_kernel("brownian_motion"), interval_grid(8))
    full = sample(fld, 10, seed=3)
    part = sample(fld, 10, m=2, seed=3)
    expected = noise_matrix(10, 2, 3, stride=8) @ fld.factor.factor[:, :2].T
    assert np.array_equal(part.draws, expected)
    assert full.truncation == 8 and part.truncation == 2


def test_empirical_covariance_zero_rows_and_sample_count():
    fld = build_field(ZERO_KERNEL, interval_grid(3))
    batch = sample(fld, 5, seed=0)
    assert np.array_equal(empirical_covariance(batch), np.zeros((3, 3)))
    with pytest.raises(InsufficientSamplesError):
        empirical_covariance(sample(fld, 1, seed=0))


def test_empirical_covariance_band_brownian():
    n_draws = 40_000
    sp = interval_grid(16)
    fld = build_field(builtin_kernel("brownian_motion"), sp)
    C = assemble(builtin_kernel("brownian_motion"), sp)
    emp = empirical_covariance(sample(fld, n_draws, seed=2026))
    se = covariance_standard_error(C, n_draws)
    assert np.max(np.abs(emp - C) / se) < 5.0


def test_empirical_covariance_rank_one_truncation():
    n_draws = 40_000
    sp = interval_grid(16)
    fld = build_field(builtin_kernel("brownian_motion"), sp)
    lam1 = fld.dec.eigenvalues[0]
    phi1 = fld.dec.eigenfunctions[:, 0]
    C1 = lam1 * np.outer(phi1, phi1)
    emp = empirical_covariance(sample(fld, n_draws, m=1, seed=7))
    se = covariance_standard_error(C1, n_draws)
    assert np.max(np.abs(emp - C1) / se) < 5.0


def test_gauge_does_not_change_sampling_distribution():
    n_draws = 40_000
    sp = interval_grid(16)
    C = assemble(builtin_kernel("brownian_motion"), sp)
    se = covariance_standard_error(C, n_draws)
    for gauge, gauge_seed in (("symmetric_sqrt", 0), ("rotated", 11)):
        fld = build_field(builtin_kernel("brownian_motion"), sp, gauge=gauge,
                          gauge_seed=gauge_seed)
        emp = empirical_covariance(sample(fld, n_draws, seed=31))
        assert np.max(np.abs(emp - C) / se) < 5.0


def test_truncation_error_edges():
    fld = build_field(builtin_kernel("brownian_motion"), interval_grid(32))
    dec = fld.dec
    assert truncation_error(dec, dec.rank) == 0.0
    assert truncation_error(dec, 0) == pytest.approx(dec.eigenvalues.sum(), rel=1e-15)
    with pytest.raises(ValueError):
        truncation_error(dec, dec.rank + 1)


def test_truncation_error_brownian_tail_vs_analytic():
    fld = build_field(builtin_kernel("brownian_motion"), interval_grid(512))
    analytic_head = sum(1.0 / (((k - 0.5) * np.pi) ** 2) for k in range(1, 6))
    assert truncation_error(fld.dec, 5) == pytest.approx(0.5 - analytic_head, rel=0.01)


def test_truncation_error_matches_empirical():
    n_draws = 40_000
    fld = build_field(builtin_kernel("brownian_motion"), interval_grid(16))
    sp = fld.space
    full = sample(fld, n_draws, seed=99).draws
    for m in (1, fld.dec.rank // 2):
        trunc = sample(fld, n_draws, m=m, seed=99).draws
        sq = ((full - trunc) ** 2 * sp.weights[None, :]).sum(axis=1)
        target = truncation_error(fld.dec, m)
        se = np.sqrt(2.0 * np.sum(fld.dec.eigenvalues[m:] ** 2) / n_draws)
        assert abs(sq.mean() - target) < 5.0 * se


def test_white_noise_functional_exact_cases():
    noise = draw_noise(4, seed=12)
    assert white_noise_functional(np.zeros(4), noise) == 0.0
    e1 = np.array([1.0, 0.0, 0.0, 0.0])
    assert white_noise_functional(e1, noise) == noise.xi[0]
    with pytest.raises(DimensionMismatchError):
        white_noise_functional(np.ones(3), noise)


def test_white_noise_functional_linearity():
    rng = np.random.default_rng(4)
    noise = draw_noise(6, seed=8)
    for _ in range(20):
        h, g = rng.standard_normal((2, 6))
        a, b = rng.standard_normal(2)
        lhs = white_noise_functional(a * h + b * g, noise)
        rhs = a * white_noise_functional(h, noise) + b * white_noise_functional(g, noise)
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_white_noise_functional_second_moment():
    # ||h|| = 2: E[W(h)^2] = 4, chi-square standard error 4*sqrt(2/N)
    n_draws = 100_000
    h = np.array([2.0, 0.0, 0.0])
    xi = noise_matrix(n_draws, 3, seed=21)
    values = xi @ h
    se = 4.0 * np.sqrt(2.0 / n_draws)
    assert abs((values**2).mean() - 4.0) < 5.0 * se


def test_white_noise_isometry_battery():
    n_draws = 100_000
    rng = np.random.default_rng(55)
    xi = noise_matrix(n_draws, 8, seed=13)
    for _ in range(20):
        h, g = rng.standard_normal((2, 8))
        target = float(np.dot(h, g))
        estimate = ((xi @ h) * (xi @ g)).mean()
        se = np.sqrt((np.dot(h, h) * np.dot(g, g) + target**2) / n_draws)
        assert abs(estimate - target) < 5.0 * se


def test_noise_rows_are_order_independent():
    A = noise_matrix(12, 5, seed=42)
    B = noise_matrix(4, 5, seed=42, row_start=6)
    assert np.array_equal(B, A[6:10])
    d = draw_noise(5, seed=42, stream=3)
    assert np.array_equal(d.xi, A[3])


def test_mollify_identity_below_cell_width():
    fld = build_field(builtin_kernel("brownian_motion"), interval_grid(32))
    out = mollify_factor(fld, 1e-4)
    assert np.max(np.abs(out.factor - fld.factor.factor)) <= 1e-12


def test_mollify_constant_factor_unchanged():
    fld = build_field(CONSTANT_KERNEL, interval_grid(16))
    assert fld.dec.rank == 1
    for bw in (0.01, 0.1, 1.0):
        out = mollify_factor(fld, bw)
        assert np.max(np.abs(out.factor - fld.factor.factor)) <= 1e-12


def test_mollify_bandwidth_ladder_monotone():
    fld = build_field(builtin_kernel("brownian_motion"), interval_grid(128))
    C = assemble(builtin_kernel("brownian_motion"), fld.space)
    distances = []
    for bw in (0.1, 0.05, 0.025, 0.0125):
        Cn = reproduce_covariance(mollify_factor(fld, bw), fld.space)
        distances.append(np.max(np.abs(Cn - C)))
    for a, b in zip(distances, distances[1:]):
        assert b <= a + 1e-12


def test_mollify_rejects_bad_bandwidth():
    fld = build_field(builtin_kernel("brownian_motion"), interval_grid(8))
    with pytest.raises(ValueError):
        mollify_factor(fld, 0.0)
    with pytest.raises(ValueError):
        mollify_factor(fld, -0.1)


def test_tangent_gram_zero_offsets():
    fld = build_field(builtin_kernel("brownian_motion"), interval_grid(64))
    G = tangent_gram(fld, 30, [0, 0], r=0.125)
    assert np.array_equal(G, np.zeros((2, 2)))


def test_tangent_gram_brownian_increment_variance():
    # (K(t+c,t+c) - 2K(t+c,t) + K(t,t))/c = 1 exactly for min(s,t)
    n = 128
    fld = build_field(builtin_kernel("brownian_motion"), interval_grid(n))
    G = tangent_gram(fld, n // 2, [1], r=np.sqrt(1.0 / n))
    assert abs(G[0, 0] - 1.0) <= 1e-8


def test_tangent_gram_fbm_scaling():
    n = 1024
    hurst = 0.7
    fld = build_field(builtin_kernel("fbm", {"hurst": hurst}), interval_grid(n))
    c = 1.0 / n
    G = tangent_gram(fld, n // 2, [1], r=c**hurst)
    assert G[0, 0] == pytest.approx(1.0, rel=0.02)


def test_tangent_gram_kernel_arithmetic_oracle():
    n = 64
    fld = build_field(builtin_kernel("fbm", {"hurst": 0.3}), interval_grid(n))
    C = assemble(builtin_kernel("fbm", {"hurst": 0.3}), fld.space)
    t, offs, r = 20, [1, 3], 0.2
    G = tangent_gram(fld, t, offs, r)
    for a, oa in enumerate(offs):
        for b, ob in enumerate(offs):
            oracle = (C[t + oa, t + ob] - C[t + oa, t] - C[t, t + ob] + C[t, t]) / r**2
            assert G[a, b] == pytest.approx(oracle, abs=1e-9)


def test_tangent_gram_validation():
    fld = build_field(builtin_kernel("brownian_motion"), interval_grid(16))
    with pytest.raises(IndexError):
        tangent_gram(fld, 15, [1], r=0.1)
    with pytest.raises(IndexError):
        tangent_gram(fld, 0, [-1], r=0.1)
    with pytest.raises(ValueError):
        tangent_gram(fld, 3, [1], r=0.0)

"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as the
criteria execute. Tolerances are pinned here, not configurable.
"""

import time

import numpy as np

from wnfield.chaos import expectation, random_polynomial
from wnfield.field import (
    build_field,
    covariance_standard_error,
    empirical_covariance,
    mollify_factor,
    noise_matrix,
    sample,
    tangent_gram,
    truncation_error,
)
from wnfield.integrals import (
    RandomIntegrand,
    deterministic_integrand,
    duality_check,
    skorokhod_integral,
    transfer,
)
from wnfield.kernels import assemble, builtin_kernel, trace_of_operator
from wnfield.spaces import interval_grid
from wnfield.spectral import (
    GAUGES,
    decompose,
    factorize,
    kernel_section,
    reproduce_covariance,
    rkhs_inner,
    to_rkhs,
)

ALL_KERNELS = [
    ("brownian_motion", {}),
    ("brownian_bridge", {}),
    ("fbm", {"hurst": 0.7}),
    ("squared_exponential", {"length_scale": 1.0}),
    ("white_diagonal", {"sigma2": 1.0}),
]

BM_ANALYTIC = [1.0 / (((k - 0.5) * np.pi) ** 2) for k in range(1, 6)]


def _report(number: int, name: str, ok: bool, detail: str):
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] criterion {number}: {name} ({detail})")
    assert ok, f"criterion {number} failed: {name} ({detail})"


def test_criterion_1_factorization_identity():
    start = time.monotonic()
    worst = 0.0
    for name, params in ALL_KERNELS:
        for n in (8, 64, 256):
            sp = interval_grid(n)
            C = assemble(builtin_kernel(name, params), sp)
            dec = decompose(C, sp)
            lam1 = dec.eigenvalues[0]
            for gauge in GAUGES:
                h = factorize(dec, gauge, seed=7)
                err = np.max(np.abs(reproduce_covariance(h, sp) - C)) / lam1
                worst = max(worst, err)
    elapsed = time.monotonic() - start
    ok = worst <= 1e-8 and elapsed < 10.0
    _report(1, "factorization identity, all kernels/gauges/sizes", ok,
            f"worst err/lam1 {worst:.2e} (tol 1e-8), {elapsed:.1f}s (limit 10s)")


def test_criterion_2_brownian_spectral_convergence():
    start = time.monotonic()
    sp = interval_grid(512)
    C = assemble(builtin_kernel("brownian_motion"), sp)
    dec = decompose(C, sp)
    worst = max(
        abs(dec.eigenvalues[k] - BM_ANALYTIC[k]) / BM_ANALYTIC[k] for k in range(5)
    )
    trace_err = abs(trace_of_operator(C, sp) - 0.5) / 0.5
    elapsed = time.monotonic() - start
    ok = worst <= 0.01 and trace_err <= 0.005 and elapsed < 5.0
    _report(2, "Brownian KL eigenvalues at n=512", ok,
            f"worst eigenvalue err {worst:.2e} (tol 1e-2), trace err {trace_err:.2e} "
            f"(tol 5e-3), {elapsed:.1f}s (limit 5s)")


def test_criterion_3_reproducing_property():
    rng = np.random.default_rng(314)
    worst = 0.0
    for name in ("brownian_motion", "squared_exponential"):
        sp = interval_grid(128)
        C = assemble(builtin_kernel(name), sp)
        dec = decompose(C, sp)
        for _ in range(10):
            coeffs = rng.standard_normal(dec.rank)
            f = dec.eigenfunctions @ (np.sqrt(dec.eigenvalues) * coeffs)
            a = to_rkhs(f, dec)
            norm = np.sqrt(a.norm_squared())
            for x in range(sp.size):
                lhs = rkhs_inner(a, kernel_section(x, dec))
                scale = norm * np.sqrt(max(C[x, x], 1e-300))
                worst = max(worst, abs(lhs - f[x]) / scale)
    ok = worst <= 1e-6
    _report(3, "reproducing property, BM and squared-exponential at n=128", ok,
            f"worst scaled err {worst:.2e} (tol 1e-6)")


def test_criterion_4_sampling_consistency():
    start = time.monotonic()
    n_draws = 200_000
    worst_band = 0.0
    worst_trunc = 0.0
    for name, params in (("brownian_motion", {}), ("fbm", {"hurst": 0.7})):
        sp = interval_grid(16)
        fld = build_field(builtin_kernel(name, params), sp)
        C = assemble(builtin_kernel(name, params), sp)
        batch = sample(fld, n_draws, seed=2026)
        emp = empirical_covariance(batch)
        se = covariance_standard_error(C, n_draws)
        worst_band = max(worst_band, float(np.max(np.abs(emp - C) / se)))
        full = batch.draws
        for m in (1, fld.dec.rank // 2):
            trunc = sample(fld, n_draws, m=m, seed=2026).draws
            sq = ((full - trunc) ** 2 * sp.weights[None, :]).sum(axis=1)
            target = truncation_error(fld.dec, m)
            tail_se = np.sqrt(2.0 * np.sum(fld.dec.eigenvalues[m:] ** 2) / n_draws)
            worst_trunc = max(worst_trunc, abs(float(sq.mean()) - target) / tail_se)
    elapsed = time.monotonic() - start
    ok = worst_band < 5.0 and worst_trunc < 5.0 and elapsed < 60.0
    _report(4, "sampling consistency at N=2e5, BM and fbm(0.7)", ok,
            f"covariance band {worst_band:.2f} SE, truncation band {worst_trunc:.2f} SE "
            f"(limit 5), {elapsed:.1f}s (limit 60s)")


def test_criterion_5_malliavin_duality():
    start = time.monotonic()
    rng = np.random.default_rng(1618)
    worst = 0.0
    for _ in range(100):
        m = int(rng.integers(1, 7))
        F = random_polynomial(rng, m, 4, 5)
        u = RandomIntegrand(tuple(random_polynomial(rng, m, 4, 4) for _ in range(m)))
        worst = max(worst, duality_check(F, u))
    elapsed = time.monotonic() - start
    ok = worst <= 1e-10 and elapsed < 5.0
    _report(5, "Malliavin duality over 100 random (F, u) pairs", ok,
            f"worst |E[F delta(u)] - E[<DF,u>]| = {worst:.2e} (tol 1e-10), "
            f"{elapsed:.1f}s (limit 5s)")


def test_criterion_6_deterministic_isometry():
    # symbolic: E[delta(f)^2] equals the squared coefficient norm exactly
    fld = build_field(builtin_kernel("brownian_motion"), interval_grid(33))
    section = kernel_section(16, fld.dec)
    assert fld.space.points[16] == 0.5
    delta = skorokhod_integral(deterministic_integrand(section))
    symbolic_err = abs(expectation(delta * delta) - section.norm_squared())
    # empirical: variance of the integral over 1e5 draws targets K(0.5,0.5)
    n_draws = 100_000
    xi = noise_matrix(n_draws, fld.dec.rank, seed=77, stride=fld.dec.rank)
    values = xi @ section.coeffs
    target = 0.5
    se = target * np.sqrt(2.0 / n_draws)
    emp_err = abs(float((values**2).mean()) - target)
    ok = symbolic_err <= 1e-12 and emp_err < 5.0 * se
    _report(6, "deterministic-integrand isometry for the midpoint section", ok,
            f"symbolic err {symbolic_err:.2e} (tol 1e-12), empirical "
            f"{emp_err / se:.2f} SE (limit 5)")


def test_criterion_7_transfer_identity():
    fld = build_field(builtin_kernel("brownian_motion"), interval_grid(5))
    rank = fld.dec.rank
    rng = np.random.default_rng(271)
    worst = 0.0
    for _ in range(20):
        u = RandomIntegrand(tuple(random_polynomial(rng, rank, 3, 3) for _ in range(rank)))
        field_side = skorokhod_integral(u)
        noise_side = skorokhod_integral(transfer(u, fld.dec))
        keys = set(field_side.terms) | set(noise_side.terms)
        for key in keys:
            worst = max(worst, abs(field_side.terms.get(key, 0.0)
                                   - noise_side.terms.get(key, 0.0)))
    ok = worst <= 1e-12
    _report(7, "transfer identity over 20 random integrands", ok,
            f"worst coefficient gap {worst:.2e} (tol 1e-12)")


def test_criterion_8_gauge_invariance():
    # reproduction identical across gauges
    sp = interval_grid(64)
    C = assemble(builtin_kernel("brownian_motion"), sp)
    dec = decompose(C, sp)
    lam1 = dec.eigenvalues[0]
    reproductions = [
        reproduce_covariance(factorize(dec, g, seed=7), sp) for g in GAUGES
    ]
    spread = max(
        float(np.max(np.abs(a - b)))
        for i, a in enumerate(reproductions)
        for b in reproductions[i + 1:]
    ) / lam1
    # two-gauge sampling, both within the criterion-4 band
    n_draws = 200_000
    sp16 = interval_grid(16)
    C16 = assemble(builtin_kernel("brownian_motion"), sp16)
    se = covariance_standard_error(C16, n_draws)
    bands = []
    for gauge, gauge_seed in (("symmetric_sqrt", 0), ("rotated", 11)):
        fld = build_field(builtin_kernel("brownian_motion"), sp16,
                          gauge=gauge, gauge_seed=gauge_seed)
        emp = empirical_covariance(sample(fld, n_draws, seed=31))
        bands.append(float(np.max(np.abs(emp - C16) / se)))
    ok = spread <= 1e-8 and max(bands) < 5.0
    _report(8, "gauge/unitary invariance", ok,
            f"reproduction spread {spread:.2e} (tol 1e-8), sampling bands "
            f"{bands[0]:.2f}/{bands[1]:.2f} SE (limit 5)")


def test_criterion_9_tangent_structure():
    n = 1024
    fld_bm = build_field(builtin_kernel("brownian_motion"), interval_grid(n))
    g_bm = tangent_gram(fld_bm, n // 2, [1], r=np.sqrt(1.0 / n))[0, 0]
    fld_fbm = build_field(builtin_kernel("fbm", {"hurst": 0.7}), interval_grid(n))
    g_fbm = tangent_gram(fld_fbm, n // 2, [1], r=(1.0 / n) ** 0.7)[0, 0]
    ok = abs(g_bm - 1.0) <= 1e-8 and abs(g_fbm - 1.0) <= 0.02
    _report(9, "tangent structure of rescaled increments", ok,
            f"BM gram {g_bm:.10f} (tol 1e-8), fbm(0.7) gram {g_fbm:.6f} (tol 2%)")


def test_criterion_10_mollification_ladder():
    fld = build_field(builtin_kernel("brownian_motion"), interval_grid(128))
    C = assemble(builtin_kernel("brownian_motion"), fld.space)
    ladder = (0.1, 0.05, 0.025, 0.0125)
    distances = [
        float(np.max(np.abs(reproduce_covariance(mollify_factor(fld, bw), fld.space) - C)))
        for bw in ladder
    ]
    ok = all(b < a for a, b in zip(distances, distances[1:]))
    _report(10, "mollified covariance distance decreases along the ladder", ok,
            "distances " + " > ".join(f"{d:.4f}" for d in distances))

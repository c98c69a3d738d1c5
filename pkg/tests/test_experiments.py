import math

import numpy as np
import pytest

from ppt_volume.experiments import (
    CHUNK_SIZE,
    DegenerateFit,
    VolumeEstimate,
    chunk_layout,
    conditional_by_entropy,
    conditional_by_participation,
    distribution_of_participation,
    estimate_ppt_volume,
    fit_exponential,
    high_purity_violations,
    mean_t,
    scan_dimensions,
    separability_label,
)


def _exact(size, p, n=10**12):
    # an estimate whose p_hat equals p to ~1e-12 relative
    dims = {4: (2, 2), 6: (2, 3), 8: (2, 4), 9: (3, 3), 12: (3, 4), 16: (4, 4)}[size]
    return VolumeEstimate(dims, n, int(round(p * n)))


def test_chunk_layout():
    assert chunk_layout(25_000) == [(0, CHUNK_SIZE), (1, CHUNK_SIZE), (2, 5_000)]
    assert sum(c for _, c in chunk_layout(123_457)) == 123_457


def test_labels():
    assert separability_label((2, 2)) == "separable_volume"
    assert separability_label((3, 2)) == "separable_volume"
    assert separability_label((2, 4)) == "upper_bound_on_separable_volume"


def test_volume_estimate_fields():
    e = VolumeEstimate((2, 2), 1000, 600)
    assert e.p_hat == 0.6
    assert e.stderr == math.sqrt(0.6 * 0.4 / 1000)
    # doubling n at fixed p shrinks the error by sqrt(2)
    assert VolumeEstimate((2, 2), 2000, 1200).stderr == pytest.approx(e.stderr / math.sqrt(2), rel=1e-14)


def test_estimate_rejects_small_n():
    with pytest.raises(ValueError):
        estimate_ppt_volume((2, 2), 999, seed=1)


def test_estimate_rejects_large_dims():
    with pytest.raises(ValueError):
        estimate_ppt_volume((4, 9), 1000, seed=1)


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (2, 4), (3, 3)])
def test_identity_mixture_all_ppt(dims):
    n = dims[0] * dims[1]
    e = estimate_ppt_volume(dims, 1000, seed=5, mixture=2 / (2 + n))
    assert e.p_hat == 1.0
    assert e.mean_t == 0.0


def test_estimate_deterministic_and_worker_independent():
    a = estimate_ppt_volume((2, 2), 30_000, seed=42, workers=1)
    b = estimate_ppt_volume((2, 2), 30_000, seed=42, workers=1)
    c = estimate_ppt_volume((2, 2), 30_000, seed=42, workers=8)
    assert a == b == c
    assert a.mean_t == c.mean_t
    assert a.tolerance_hits == c.tolerance_hits


def test_estimate_ballpark():
    e = estimate_ppt_volume((2, 2), 50_000, seed=3)
    assert abs(e.p_hat - 0.632) < 4 * e.stderr + 0.002
    assert 0 <= e.hits <= e.n


def test_tolerance_sensitivity_small():
    e = estimate_ppt_volume((2, 3), 50_000, seed=4)
    counts = list(e.tolerance_hits.values())
    assert max(counts) - min(counts) <= 1e-4 * e.n


def test_swapped_dims_agree():
    a, b = scan_dimensions([(2, 3), (3, 2)], 20_000, seed=6)
    assert abs(a.p_hat - b.p_hat) <= 3 * math.hypot(a.stderr, b.stderr)


def test_mean_t_requires_samples():
    with pytest.raises(ValueError):
        mean_t((2, 2), 9_999, seed=0)


def test_mean_t_small_run():
    t, se = mean_t((2, 2), 20_000, seed=9)
    assert 0 < se < 0.01
    assert abs(t - 0.057) < 5 * se + 0.004


def test_fit_recovers_generator():
    est = [_exact(n, 1.8 * math.exp(-0.26 * n)) for n in (4, 6, 8, 9, 12, 16)]
    fit = fit_exponential(est)
    assert fit.prefactor == pytest.approx(1.8, abs=1e-6)
    assert fit.rate == pytest.approx(0.26, abs=1e-6)
    np.testing.assert_allclose(fit.predict([4, 6]), [e.p_hat for e in est[:2]], rtol=1e-6)


def test_fit_two_points():
    fit = fit_exponential([VolumeEstimate((2, 2), 1000, 632), VolumeEstimate((2, 3), 1000, 384)])
    assert fit.rate == pytest.approx(math.log(0.632 / 0.384) / 2, abs=1e-10)
    assert fit.rate == pytest.approx(0.249, abs=1e-3)
    assert fit.rss < 1e-20


def test_fit_residual_bound():
    est = [VolumeEstimate(d, 1000, h) for d, h in [((2, 2), 630), ((2, 3), 390), ((2, 4), 200), ((3, 3), 160)]]
    fit = fit_exponential(est)
    resid = np.log([e.p_hat for e in est]) - np.log(fit.predict([e.size for e in est]))
    assert np.all(np.abs(resid) <= math.sqrt(fit.rss) + 1e-12)


def test_fit_degenerate():
    with pytest.raises(DegenerateFit):
        fit_exponential([VolumeEstimate((2, 2), 1000, 600), VolumeEstimate((2, 2), 1000, 640)])
    with pytest.raises(ValueError):
        fit_exponential([VolumeEstimate((2, 2), 1000, 600), VolumeEstimate((4, 4), 1000, 0)])


@pytest.fixture(scope="module")
def cond_r_22():
    return conditional_by_participation((2, 2), 200_000, seed=11)


def test_conditional_r_counts(cond_r_22):
    b = cond_r_22
    assert b.n == 200_000
    assert b.bin_edges[0] == 1.0 and b.bin_edges[-1] == 4.0
    assert len(b.bin_edges) == 61
    assert np.all(b.ppt_counts <= b.counts)
    assert np.all(b.t_sums >= 0)


def test_conditional_r_high_mixedness_all_ppt(cond_r_22):
    b = cond_r_22
    above = b.bin_edges[:-1] >= 3.0 - 1e-12
    assert np.all(b.ppt_counts[above] == b.counts[above])
    # the entanglement degree vanishes there too
    assert np.all(b.t_sums[above] == 0.0)


def test_conditional_r_near_pure_entangled(cond_r_22):
    assert cond_r_22.counts[0] > 0
    assert cond_r_22.ppt_fraction[0] < 0.01


def test_conditional_r_six_levels():
    b = conditional_by_participation((2, 3), 100_000, seed=12)
    above = b.bin_edges[:-1] >= 5.0 - 1e-12
    assert np.all(b.ppt_counts[above] == b.counts[above])
    assert np.all(b.t_sums[above] == 0.0)


def test_conditional_r_worker_independent():
    a = conditional_by_participation((2, 2), 30_000, seed=13, workers=1)
    b = conditional_by_participation((2, 2), 30_000, seed=13, workers=3)
    np.testing.assert_array_equal(a.counts, b.counts)
    np.testing.assert_array_equal(a.ppt_counts, b.ppt_counts)
    np.testing.assert_array_equal(a.t_sums, b.t_sums)


def test_conditional_r_bins_validated():
    with pytest.raises(ValueError):
        conditional_by_participation((2, 2), 1000, seed=0, bins=3)


def test_distribution_of_participation():
    h = distribution_of_participation((2, 2), 100_000, seed=14)
    assert h.n == 100_000
    assert abs(h.mass.sum() - 1) <= 1e-12
    assert abs(np.sum(h.density * np.diff(h.bin_edges)) - 1) <= 1e-12
    assert h.bin_edges[0] == 1.0 and h.bin_edges[-1] == 4.0


def test_distribution_matches_volume_run():
    # spectra of the histogram are the spectra of the full states for the same seed
    h = distribution_of_participation((2, 2), 20_000, seed=15)
    b = conditional_by_participation((2, 2), 20_000, seed=15)
    np.testing.assert_array_equal(h.counts, b.counts)


def test_conditional_entropy_structure():
    out = conditional_by_entropy((2, 2), [1, 2], 50_000, seed=16)
    assert [c.q for c in out] == [1.0, 2.0]
    for c in out:
        assert c.binned.n == 50_000
        assert c.binned.bin_edges[-1] == pytest.approx(math.log(4))
        assert 0 <= c.cumulative_at_threshold <= 1
    h2 = out[1].binned
    above = h2.bin_edges[:-1] >= math.log(3) - 1e-12
    assert np.all(h2.ppt_counts[above] == h2.counts[above])


def test_conditional_entropy_rejects_order():
    with pytest.raises(ValueError):
        conditional_by_entropy((2, 2), [0], 1000, seed=0)


@pytest.mark.slow
def test_entropy_threshold_cumulative_q2():
    (c,) = conditional_by_entropy((2, 2), [2], 1_000_000, seed=42)
    assert abs(c.cumulative_at_threshold - 0.7) <= 0.03


@pytest.mark.parametrize("source", ["simplex", "ball"])
def test_high_purity_region_is_ppt(source):
    checked, bad = high_purity_violations((2, 2), 50_000, seed=17, source=source)
    assert checked > 10_000
    assert bad == 0


def test_high_purity_unknown_source():
    with pytest.raises(ValueError):
        high_purity_violations((2, 2), 1000, seed=0, source="cube")

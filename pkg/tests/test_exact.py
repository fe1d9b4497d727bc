from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sci_integrate

from conftest import stopped_batch
from stopped_occupancy.asymptotics import constants
from stopped_occupancy.exact import (
    stopped_max_cdf,
    stopped_max_pmf,
    stopping_time_cdf,
    stopping_time_pdf,
    stopping_window,
)
from stopped_occupancy.quadrature import QuadratureSpec
from stopped_occupancy.sim import ModelParams
from stopped_occupancy.stats import empirical_pmf, mc_summary, tv_distance, tv_noise

# mpmath quadrature of the mixture formula (tests/oracles/generate.py)
CDF_REF = {
    (10, 0, 0, 3): 0.12589347612158475,
    (10, 0, 0, 5): 0.52410932499562652,
    (10, 0, 0, 7): 0.8199542532017847,
    (20, 1, 2, 6): 0.28700203074637832,
}


class TestStoppingTime:
    def test_single_box_is_exponential(self):
        t = np.linspace(0, 10, 21)
        assert np.allclose(stopping_time_pdf(ModelParams(1), t), np.exp(-t), rtol=1e-14)

    def test_two_boxes(self):
        t = np.linspace(0.1, 10, 21)
        expected = 2 * (1 - np.exp(-t)) * np.exp(-t)
        assert np.allclose(stopping_time_pdf(ModelParams(2), t), expected, rtol=1e-13)

    def test_normalized(self):
        params = ModelParams(100, m=2, ell=3)
        total, _ = sci_integrate.quad(lambda t: stopping_time_pdf(params, t), 0, 60, points=[8, 10, 15], limit=200)
        assert total == pytest.approx(1.0, abs=1e-10)

    def test_cdf_is_integral_of_pdf(self):
        params = ModelParams(30, m=1, ell=2)
        for t in [2.0, 4.0, 7.0]:
            area, _ = sci_integrate.quad(lambda s: stopping_time_pdf(params, s), 0, t, epsabs=1e-13)
            assert stopping_time_cdf(params, t) == pytest.approx(area, abs=1e-10)

    def test_rejects_negative_time(self):
        with pytest.raises(ValueError):
            stopping_time_pdf(ModelParams(3), -1.0)

    def test_window_holds_mass(self):
        params = ModelParams(1000, m=1, ell=5)
        a, b = stopping_window(params, 1e-12)
        assert stopping_time_cdf(params, a) + (1 - stopping_time_cdf(params, b)) < 1e-12


class TestStoppedMaxCDF:
    def test_at_or_below_threshold(self):
        assert stopped_max_cdf(ModelParams(50, m=2), 2) == 0.0
        assert stopped_max_cdf(ModelParams(50, m=2), 0) == 0.0

    def test_one_box_over_threshold(self):
        assert stopped_max_cdf(ModelParams(4, m=1, ell=3), 2) == 1.0

    def test_two_boxes_closed_form(self):
        for r in range(1, 40):
            assert stopped_max_cdf(ModelParams(2), r) == pytest.approx(1 - 2.0**-r, abs=1e-12)

    @pytest.mark.parametrize("key", sorted(CDF_REF))
    def test_reference_values(self, key):
        n, m, ell, r = key
        assert stopped_max_cdf(ModelParams(n, m, ell), r) == pytest.approx(CDF_REF[key], abs=1e-10)

    def test_defect_far_right(self):
        c = constants(10_000)
        assert 1 - stopped_max_cdf(ModelParams(10_000), c.b_n + 60) < 1e-9

    @settings(max_examples=25, deadline=None)
    @given(n=st.integers(3, 500), m=st.integers(0, 3), ell=st.integers(0, 2))
    def test_monotone_and_bounded(self, n, m, ell):
        params = ModelParams(n, m, min(ell, n - 1))
        values = [stopped_max_cdf(params, r) for r in range(m, m + 25)]
        assert all(0.0 <= v <= 1.0 for v in values)
        assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))

    def test_window_enlargement_is_invisible(self):
        params = ModelParams(500, m=1, ell=1)
        a, b = stopping_window(params, 1e-11)
        for r in [5, 8, 12]:
            base = stopped_max_cdf(params, r)
            wide = stopped_max_cdf(params, r, QuadratureSpec(window=(max(a - 10, 0.0), b + 10)))
            assert abs(base - wide) < 1e-10


class TestStoppedMaxPMF:
    def test_two_boxes_geometric(self):
        pmf = stopped_max_pmf(ModelParams(2))
        r = pmf.support
        assert np.allclose(pmf.probs, 2.0**-r, atol=1e-12)

    def test_normalized(self):
        pmf = stopped_max_pmf(ModelParams(1000, m=1, ell=2))
        assert pmf.probs.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(pmf.probs >= 0)

    def test_small_window_raises(self):
        with pytest.raises(ValueError):
            stopped_max_pmf(ModelParams(1000), window=(1, 10))

    @pytest.mark.parametrize("n", [10, 100, 1000])
    def test_mean_matches_simulation(self, n):
        pmf = stopped_max_pmf(ModelParams(n))
        mean, sem = mc_summary(stopped_batch(n, reps=20_000, seed=77).maxima)
        assert abs(pmf.mean() - mean) < 3 * sem

    def test_simulated_with_thresholds(self):
        params = ModelParams(200, m=1, ell=3)
        pmf = stopped_max_pmf(params)
        mean, sem = mc_summary(stopped_batch(200, m=1, ell=3, reps=20_000, seed=78).maxima)
        assert abs(pmf.mean() - mean) < 4 * sem

    def test_pmf_against_empirical(self, ccp_1e4):
        pmf = stopped_max_pmf(ModelParams(10_000))
        emp = empirical_pmf(ccp_1e4.maxima)
        support = np.count_nonzero(pmf.probs > 1e-6)
        assert tv_distance(pmf, emp) <= 3 * tv_noise(support, len(ccp_1e4.maxima))

    def test_known_means(self):
        # frozen from the quadrature; cross-checked against simulation above
        assert stopped_max_pmf(ModelParams(100)).mean() == pytest.approx(11.6619, abs=1e-3)
        assert stopped_max_pmf(ModelParams(1000)).mean() == pytest.approx(17.7636, abs=1e-3)

    def test_mean_grows_like_e_log_n(self):
        means = [stopped_max_pmf(ModelParams(10**k)).mean() for k in (3, 4, 5, 6)]
        steps = np.diff(means) / math.log(10)
        assert np.all(np.abs(steps - math.e) < 0.3)

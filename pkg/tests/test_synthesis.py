import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mixfractal import (
    FlowSpec,
    HurstComponent,
    TraceSeries,
    aggregate,
    compose_mixture,
    cumulate,
    difference,
    fgn_autocovariance,
    synthesize_fgn,
)
from mixfractal.errors import DomainError, KindError, SynthesisError
from mixfractal.rng import derive_seed
from mixfractal.synthesis import EIGEN_TOL, circulant_eigenvalues, component_seed

from oracles import sample_autocovariance


class TestAutocovariance:
    def test_unit_variance(self):
        assert fgn_autocovariance(0.5, 0) == 1.0
        assert fgn_autocovariance(0.83, 0) == 1.0

    def test_white_noise_lags_vanish(self):
        assert fgn_autocovariance(0.5, 3) == 0.0

    def test_h07_lag1(self):
        # 0.5 * (2**1.4 - 2)
        assert fgn_autocovariance(0.7, 1) == pytest.approx(0.3195079107728942, rel=1e-12)

    def test_vectorised_matches_scalar(self):
        lags = np.arange(6)
        vec = fgn_autocovariance(0.3, lags)
        assert np.allclose(vec, [fgn_autocovariance(0.3, int(k)) for k in lags])

    @pytest.mark.parametrize("h", [0.0, 1.0, -0.2, 1.5])
    def test_domain(self, h):
        with pytest.raises(DomainError):
            fgn_autocovariance(h, 1)

    @given(st.floats(0.01, 0.99), st.integers(1, 50))
    def test_sum_of_lags_is_block_variance(self, h, n):
        # Var(sum of n fGn samples) = n**(2H) for exact self-similarity
        k = np.arange(1, n)
        var = n + 2 * np.sum((n - k) * fgn_autocovariance(h, k))
        assert var == pytest.approx(n ** (2 * h), rel=1e-9)


class TestSynthesizeFgn:
    def test_white_noise_lag1(self):
        x = synthesize_fgn(0.5, 2 ** 10, 42).values
        r1 = np.corrcoef(x[:-1], x[1:])[0, 1]
        assert abs(r1) < 4 / np.sqrt(x.size)

    def test_h07_lag1(self):
        x = synthesize_fgn(0.7, 2 ** 16, 1).values
        r1 = np.corrcoef(x[:-1], x[1:])[0, 1]
        assert abs(r1 - 0.3195079107728942) < 0.02

    def test_deterministic(self):
        a = synthesize_fgn(0.66, 2 ** 12, 9).values
        b = synthesize_fgn(0.66, 2 ** 12, 9).values
        assert a.tobytes() == b.tobytes()
        assert not np.array_equal(a, synthesize_fgn(0.66, 2 ** 12, 10).values)

    def test_shape_and_kind(self):
        s = synthesize_fgn(0.4, 2 ** 9, 3)
        assert len(s) == 2 ** 9 and s.kind == "increments"
        assert s.meta["hurst"] == 0.4 and s.meta["seed"] == 3

    def test_requires_power_of_two(self):
        with pytest.raises(DomainError):
            synthesize_fgn(0.5, 1000, 1)

    def test_embedding_eigenvalues_nonnegative(self):
        for h in (0.05, 0.3, 0.5, 0.7, 0.95):
            eig = circulant_eigenvalues(h, 2 ** 10)
            assert eig.min() >= -EIGEN_TOL * eig.max()

    def test_negative_eigenvalue_raises(self, monkeypatch):
        import mixfractal.synthesis as syn

        def bad(h, n):
            eig = np.ones(2 * n)
            eig[3] = -0.5
            return eig

        monkeypatch.setattr(syn, "circulant_eigenvalues", bad)
        with pytest.raises(SynthesisError, match="-0.5"):
            syn.synthesize_fgn(0.7, 2 ** 8, 1)

    @pytest.mark.parametrize("h", [0.3, 0.5, 0.7, 0.9])
    def test_autocovariance_matches_closed_form(self, h):
        n = 2 ** 14
        acov = np.mean(
            [sample_autocovariance(synthesize_fgn(h, n, s).values, 10) for s in range(10)],
            axis=0,
        )
        assert np.all(np.abs(acov - fgn_autocovariance(h, np.arange(11))) < 4 / np.sqrt(n))

    @pytest.mark.parametrize("h", [0.5, 0.8])
    def test_second_order_self_similarity(self, h):
        n = 2 ** 16
        x = synthesize_fgn(h, n, 77)
        for block in (1, 4, 16, 64, 256):
            agg = aggregate(x, block).values
            ratio = agg.var() / block ** (2 * h)
            # mean removal biases LRD block variances low by about m**(2H-2)
            m = n // block
            expected = 1 - m ** (2 * h - 2)
            assert abs(ratio - expected) < 5 / np.sqrt(m)


class TestMixture:
    def test_singleton_matches_fgn(self):
        spec = FlowSpec([HurstComponent(0.6, 1.0)], 2 ** 10, seed=5)
        z = compose_mixture(spec).values
        x = synthesize_fgn(0.6, 2 ** 10, derive_seed(5, 0)).values
        assert np.array_equal(z, x)

    def test_explicit_component_seed(self):
        spec = FlowSpec([HurstComponent(0.6, 1.0, seed=11)], 2 ** 10, seed=5)
        assert component_seed(spec, 0) == 11
        assert np.array_equal(compose_mixture(spec).values, synthesize_fgn(0.6, 2 ** 10, 11).values)

    def test_variance_adds(self):
        spec = FlowSpec([HurstComponent(0.5, 2.0), HurstComponent(0.7, 1.0)], 2 ** 16, seed=3)
        z = compose_mixture(spec).values
        assert abs(z.var() / 5.0 - 1) < 0.05

    def test_components_independent(self):
        spec = FlowSpec([HurstComponent(0.5, 1.0), HurstComponent(0.7, 1.0)], 2 ** 16, seed=3)
        s0, s1 = component_seed(spec, 0), component_seed(spec, 1)
        assert s0 != s1
        a = synthesize_fgn(0.5, 2 ** 16, s0).values
        b = synthesize_fgn(0.7, 2 ** 16, s1).values
        assert abs(np.corrcoef(a, b)[0, 1]) < 4 / np.sqrt(2 ** 16)

    def test_meta_records_seeds(self):
        spec = FlowSpec([HurstComponent(0.5, 1.0), HurstComponent(0.7, 1.0)], 2 ** 8, seed=3)
        meta = compose_mixture(spec).meta
        assert meta["component_seeds"] == [component_seed(spec, 0), component_seed(spec, 1)]
        assert meta["spec_hash"] == spec.digest()

    def test_chi_squared_marginal(self):
        spec = FlowSpec([HurstComponent(0.7, 1.0)], 2 ** 16, seed=3, marginal="chi-squared")
        z = compose_mixture(spec).values
        assert abs(z.mean()) < 0.05
        assert abs(z.var() - 1) < 0.1
        # skewness of (X^2 - 1)/sqrt(2) is 2*sqrt(2)
        skew = np.mean((z - z.mean()) ** 3) / z.std() ** 3
        assert skew > 2.0


class TestSpecValidation:
    def test_hurst_order_enforced(self):
        with pytest.raises(DomainError):
            FlowSpec([HurstComponent(0.7, 1), HurstComponent(0.5, 1)], 2 ** 8)
        with pytest.raises(DomainError):
            FlowSpec([HurstComponent(0.5, 1), HurstComponent(0.5, 1)], 2 ** 8)

    @pytest.mark.parametrize("length", [128, 1000, 0])
    def test_length(self, length):
        with pytest.raises(DomainError):
            FlowSpec([HurstComponent(0.5, 1)], length)

    def test_component_invariants(self):
        with pytest.raises(DomainError):
            HurstComponent(1.0, 1)
        with pytest.raises(DomainError):
            HurstComponent(0.5, 0.0)

    def test_empty_and_marginal(self):
        with pytest.raises(DomainError):
            FlowSpec([], 2 ** 8)
        with pytest.raises(DomainError):
            FlowSpec([HurstComponent(0.5, 1)], 2 ** 8, marginal="pareto")

    def test_dict_round_trip(self):
        spec = FlowSpec([HurstComponent(0.5, 2.0), HurstComponent(0.7, 1.0, seed=4)], 2 ** 9, 8)
        assert FlowSpec.from_dict(spec.to_dict()) == spec
        assert FlowSpec.from_dict(spec.to_dict()).digest() == spec.digest()


class TestCumulateDifference:
    def test_cumulate(self):
        assert cumulate(TraceSeries([1, 2, 3])).values.tolist() == [1, 3, 6]

    def test_difference(self):
        out = difference(TraceSeries([1, 3, 6], "cumulative"))
        assert out.values.tolist() == [2, 3] and out.kind == "increments"

    def test_kind_errors(self):
        with pytest.raises(KindError):
            cumulate(TraceSeries([1, 2], "cumulative"))
        with pytest.raises(KindError):
            difference(TraceSeries([1, 2]))

    @settings(max_examples=50)
    @given(st.lists(st.integers(-1000, 1000), min_size=2, max_size=50))
    def test_round_trip(self, xs):
        s = TraceSeries(xs)
        assert difference(cumulate(s)).values.tolist() == xs[1:]


def test_trace_rejects_non_finite_and_empty():
    with pytest.raises(DomainError):
        TraceSeries([1.0, np.nan])
    with pytest.raises(DomainError):
        TraceSeries([])
    with pytest.raises(KindError):
        TraceSeries([1.0], "bogus")

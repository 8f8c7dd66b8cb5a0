import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blowuplab.exponents import (
    HypothesisError,
    ModelParams,
    UncoveredCaseError,
    Verdict,
    admissible_range,
    atlas,
    classify,
    fujita,
    kbar_zero,
    lifespan_exponent,
    mu_max,
    p_bar,
    strauss,
)

# 20-digit reference constants
SQRT17 = 4.1231056256176605498
SQRT5 = 2.2360679774997896964
SQRT2 = 1.4142135623730950488
SQRT7 = 2.6457513110645905905


def quadratic_residual(d, p):
    return (d - 1.0) * p * p - (d + 1.0) * p - 2.0


class TestFujita:
    def test_h2(self):
        assert fujita(2.0) == 2.0

    def test_half(self):
        assert fujita(0.5) == 5.0

    def test_meets_strauss_at_kbar0(self):
        # the curve value at the n=3, mu=2 intersection abscissa
        h = (1.0 + SQRT17) / 2.0
        assert fujita(h) == pytest.approx((3.0 + SQRT17) / 4.0, abs=1e-12)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            fujita(0.0)
        with pytest.raises(ValueError):
            fujita(-1.0)

    @given(st.floats(min_value=1e-3, max_value=1e3), st.floats(min_value=1e-6, max_value=10.0))
    def test_strictly_decreasing(self, h, dh):
        assert fujita(h + dh) < fujita(h)

    def test_limit_one(self):
        assert fujita(1e12) == pytest.approx(1.0, abs=1e-11)


class TestStrauss:
    def test_d5_exact(self):
        assert strauss(5.0) == pytest.approx((3.0 + SQRT17) / 4.0, abs=1e-12)

    def test_d3(self):
        assert strauss(3.0) == pytest.approx(1.0 + SQRT2, abs=1e-12)

    def test_d2_by_residual(self):
        assert abs(quadratic_residual(2.0, strauss(2.0))) < 1e-12

    def test_domain_error(self):
        with pytest.raises(ValueError):
            strauss(1.0)

    def test_residual_random_batch(self):
        rng = np.random.default_rng(2024)
        ds = rng.uniform(1.0, 100.0, size=1000)
        ds = ds[ds > 1.01]
        for d in ds:
            assert abs(quadratic_residual(d, strauss(d))) < 1e-12

    def test_strictly_decreasing_on_sample(self):
        ds = np.linspace(1.05, 100.0, 4000)
        vals = np.array([strauss(d) for d in ds])
        assert np.all(np.diff(vals) < 0)


class TestKbarZero:
    def test_n3_mu2(self):
        assert kbar_zero(3, 2.0) == pytest.approx((-1.0 + SQRT17) / 2.0, abs=1e-12)

    def test_n5_mu2(self):
        # (n-5+sqrt(n^2+14n+17))/4 at n=5 reduces to sqrt(7)
        assert kbar_zero(5, 2.0) == pytest.approx(math.sqrt(112.0) / 4.0, abs=1e-12)
        assert kbar_zero(5, 2.0) == pytest.approx(SQRT7, abs=1e-12)

    @given(st.integers(min_value=2, max_value=12), st.floats(min_value=0.0, max_value=6.0))
    def test_defining_identity(self, n, mu):
        k0 = kbar_zero(n, mu)
        assert abs(fujita(k0 + mu / 2.0) - strauss(n + mu)) < 1e-12


class TestMuMax:
    def test_n3(self):
        assert mu_max(3) == pytest.approx(1.0 + SQRT5, abs=1e-12)

    def test_n9(self):
        assert mu_max(9) == pytest.approx(4.0 * (1.0 + SQRT2), abs=1e-12)

    @given(st.integers(min_value=2, max_value=200))
    def test_above_two(self, n):
        # equality holds at n = 2 exactly: (1/2)(1 + sqrt(9)) = 2
        assert mu_max(n) >= 2.0
        if n >= 3:
            assert mu_max(n) > 2.0


class TestPBar:
    def test_n4_mu2(self):
        assert p_bar(4, 2.0) == pytest.approx(9.0 / 5.0, abs=1e-14)

    def test_n5_mu2(self):
        assert p_bar(5, 2.0) == pytest.approx(5.0 / 3.0, abs=1e-14)

    @given(st.integers(min_value=2, max_value=12), st.floats(min_value=0.1, max_value=20.0))
    def test_large_mu_branch(self, n, mu):
        # mu >= n-1 makes the pure-damping branch the minimum
        if mu >= n - 1:
            assert p_bar(n, mu) == fujita(mu)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            p_bar(4, 0.0)


class TestAdmissibleRange:
    def test_n3_p2_mu2(self):
        k1, k2 = admissible_range(3, 2.0, 2.0)
        assert k1 == pytest.approx(1.0)
        assert k2 == pytest.approx(2.0)

    def test_n4_p2_mu2(self):
        _, k2 = admissible_range(4, 2.0, 2.0)
        assert k2 == pytest.approx(3.0)

    def test_n5_p2_mu2(self):
        k1, _ = admissible_range(5, 2.0, 2.0)
        assert k1 == pytest.approx(2.0)

    def test_n5_mu2_extra_decay_cap(self):
        # the n=5 lists carry the sharper cap kbar <= 3
        _, k2 = admissible_range(5, 2.0, 2.0)
        assert k2 == pytest.approx(3.0)

    def test_uncovered_case(self):
        with pytest.raises(UncoveredCaseError):
            admissible_range(2, 2.0, 2.0)
        with pytest.raises(UncoveredCaseError):
            admissible_range(4, 2.0, 50.0)

    def test_general_mu_even(self):
        k1, k2 = admissible_range(4, 2.0, 3.0)
        assert k1 == pytest.approx(max(1.5, 2.0 - 1.5))
        assert k2 == pytest.approx(min(3.0, 3.0 * 2.0 - 2.5))


def _alt_exponent(p, mu, kbar):
    return 1.0 / (2.0 / (p - 1.0) - mu / 2.0 - kbar)


class TestLifespanExponent:
    def test_hand_value(self):
        params = ModelParams(n=3, mu=2.0, nu=0.0, p=1.5, kbar=1.0)
        assert lifespan_exponent(params) == pytest.approx(0.5, abs=1e-14)

    def test_mu0_reduction(self):
        params = ModelParams(n=3, mu=0.0, nu=0.0, p=2.0, kbar=0.5)
        expected = (params.p - 1.0) / (2.0 - params.kbar * (params.p - 1.0))
        assert lifespan_exponent(params) == pytest.approx(expected, rel=1e-14)

    def test_divergence_at_critical_power(self):
        kbar, mu = 1.0, 2.0
        p_crit = fujita(kbar + mu / 2.0)
        alpha = lifespan_exponent(ModelParams(n=3, mu=mu, nu=0.0, p=p_crit - 1e-10, kbar=kbar))
        assert alpha > 1e8

    def test_hypothesis_errors_are_named(self):
        with pytest.raises(HypothesisError, match="kbar"):
            lifespan_exponent(ModelParams(n=3, mu=0.5, nu=0.0, p=1.5, kbar=-0.5))
        with pytest.raises(HypothesisError, match="nu"):
            lifespan_exponent(ModelParams(n=3, mu=2.0, nu=1.0, p=1.5, kbar=1.0))
        with pytest.raises(HypothesisError, match="p_F"):
            lifespan_exponent(ModelParams(n=3, mu=2.0, nu=0.0, p=2.5, kbar=1.0))

    @given(
        st.floats(min_value=0.0, max_value=4.0),
        st.floats(min_value=-0.9, max_value=4.0),
        st.floats(min_value=1e-4, max_value=0.999),
    )
    @settings(max_examples=300)
    def test_two_expressions_agree(self, mu, kbar, frac):
        h = kbar + mu / 2.0
        if h <= 1e-6:
            return
        p = 1.0 + frac * (fujita(h) - 1.0)
        nu = 0.25 * mu * (mu - 2.0)  # largest mass the hypotheses allow
        params = ModelParams(n=4, mu=mu, nu=nu, p=p, kbar=kbar)
        a = lifespan_exponent(params)
        b = _alt_exponent(p, mu, kbar)
        assert abs(a - b) <= 1e-12 * abs(b)
        assert a > 0


class TestLifespanExponentDomain:
    @given(
        st.floats(min_value=0.0, max_value=4.0),
        st.floats(min_value=-0.9, max_value=4.0),
        st.floats(min_value=1.01, max_value=8.0),
    )
    @settings(max_examples=300)
    def test_positive_exactly_below_heat_threshold(self, mu, kbar, p):
        # alpha > 0 iff p < p_F(kbar + mu/2); outside, the hypothesis is
        # rejected rather than a nonpositive value returned
        h = kbar + mu / 2.0
        if h <= 1e-9:
            return
        params = ModelParams(n=3, mu=mu, nu=0.25 * mu * (mu - 2.0), p=p, kbar=kbar)
        if p < fujita(h):
            assert lifespan_exponent(params) > 0
        else:
            with pytest.raises(HypothesisError):
                lifespan_exponent(params)


class TestClassify:
    def test_blow_up_example(self):
        v = classify(ModelParams(n=3, mu=2.0, nu=0.0, p=1.6, kbar=1.0))
        assert v.kind is Verdict.BLOW_UP
        assert v.lifespan_exponent == pytest.approx(0.75, abs=1e-12)
        assert "p < p_F(kbar + mu/2)" in v.active_constraints

    def test_global_existence_example(self):
        v = classify(ModelParams(n=3, mu=2.0, nu=0.0, p=2.2, kbar=3.0))
        assert v.kind is Verdict.GLOBAL_EXISTENCE
        assert v.lifespan_exponent is None
        assert "kbar > k2: reduced to k2" in v.active_constraints

    def test_unknown_when_mass_above_critical(self):
        v = classify(ModelParams(n=3, mu=2.0, nu=0.5, p=2.2, kbar=3.0))
        assert v.kind is Verdict.UNKNOWN

    def test_boundary_power_is_unknown(self):
        # exactly on p = p_F(kbar + mu/2): nothing is proved there
        v = classify(ModelParams(n=3, mu=2.0, nu=0.0, p=2.0, kbar=1.0))
        assert v.kind is Verdict.UNKNOWN

    def test_white_zone_below_kbar0(self):
        # slightly below kbar0, between the wave and heat thresholds
        kbar = kbar_zero(3, 2.0) - 0.15
        p_lo = strauss(5.0)
        p_hi = fujita(kbar + 1.0)
        p = 0.5 * (p_lo + p_hi)
        assert p_lo < p < p_hi
        v = classify(ModelParams(n=3, mu=2.0, nu=0.0, p=p, kbar=kbar))
        assert v.kind is Verdict.BLOW_UP

    def test_uncovered_literature_case_is_unknown(self):
        # n=2, mu=2 has no encoded global-existence result
        v = classify(ModelParams(n=2, mu=2.0, nu=0.0, p=3.5, kbar=3.0))
        assert v.kind is Verdict.UNKNOWN

    @given(st.floats(min_value=1e-3, max_value=1e3), st.floats(min_value=1e-3, max_value=1e3))
    @settings(max_examples=100)
    def test_invariant_under_data_rescaling(self, M, eps):
        for p, kbar in [(1.6, 1.0), (2.2, 3.0), (2.0, 1.0)]:
            a = classify(ModelParams(n=3, mu=2.0, nu=0.0, p=p, kbar=kbar, M=M, eps=eps))
            b = classify(ModelParams(n=3, mu=2.0, nu=0.0, p=p, kbar=kbar))
            assert a.kind is b.kind

    @given(
        st.integers(min_value=2, max_value=8),
        st.floats(min_value=0.0, max_value=5.0),
        st.floats(min_value=-1.0, max_value=3.0),
        st.floats(min_value=-0.9, max_value=5.0),
        st.floats(min_value=1.01, max_value=4.0),
    )
    @settings(max_examples=300)
    def test_blow_up_verdict_implies_hypotheses(self, n, mu, nu, kbar, p):
        v = classify(ModelParams(n=n, mu=mu, nu=nu, p=p, kbar=kbar))
        if v.kind is Verdict.BLOW_UP:
            h = kbar + mu / 2.0
            assert h > 0
            assert 0.25 * mu * (mu - 2.0) >= nu
            assert p < fujita(h)
            assert v.lifespan_exponent > 0


class TestModelParams:
    def test_m_derived(self):
        assert ModelParams(n=5, mu=2.0, nu=0.0, p=2.0, kbar=1.0).m == 2
        assert ModelParams(n=2, mu=2.0, nu=0.0, p=2.0, kbar=1.0).m == 1

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(n=1, mu=0.0, nu=0.0, p=2.0, kbar=0.0),
            dict(n=3, mu=0.0, nu=0.0, p=1.0, kbar=0.0),
            dict(n=3, mu=0.0, nu=0.0, p=2.0, kbar=-1.0),
            dict(n=3, mu=0.0, nu=0.0, p=2.0, kbar=0.0, M=0.0),
            dict(n=3, mu=0.0, nu=0.0, p=2.0, kbar=0.0, eps=0.0),
            dict(n=3.0, mu=0.0, nu=0.0, p=2.0, kbar=0.0),
        ],
    )
    def test_rejected_at_construction(self, kwargs):
        with pytest.raises(ValueError):
            ModelParams(**kwargs)


class TestAtlas:
    def test_single_node_matches_classify(self):
        res = atlas(3, 2.0, 0.0, [1.0], [1.6])
        v = classify(ModelParams(n=3, mu=2.0, nu=0.0, p=1.6, kbar=1.0))
        assert res.verdicts[0, 0] == v.kind.value
        assert res.alphas[0, 0] == pytest.approx(v.lifespan_exponent)

    def test_boundary_point(self):
        res = atlas(3, 2.0, 0.0, (-0.5, 4.0, 10), (1.05, 3.5, 10))
        assert res.kbar0 == pytest.approx((-1.0 + SQRT17) / 2.0, abs=1e-12)
        assert res.p_strauss == pytest.approx((3.0 + SQRT17) / 4.0, abs=1e-12)

    def test_nodes_hugging_curve_blow_up(self):
        ks = np.linspace(0.2, 3.0, 40)
        for k in ks:
            p = fujita(k + 1.0) - 1e-9
            res = atlas(3, 2.0, 0.0, [float(k)], [float(p)])
            assert res.verdicts[0, 0] == Verdict.BLOW_UP.value

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            atlas(3, 2.0, 0.0, [], [2.0])
        with pytest.raises(ValueError):
            atlas(3, 2.0, 0.0, (0.0, 1.0, 0), [2.0])

    def test_out_of_domain_grid_rejected(self):
        with pytest.raises(ValueError):
            atlas(3, 2.0, 0.0, [-1.5], [2.0])
        with pytest.raises(ValueError):
            atlas(3, 2.0, 0.0, [1.0], [0.9])

    def test_csv_round_trip_shape(self):
        res = atlas(3, 2.0, 0.0, (0.0, 2.0, 5), (1.2, 2.5, 7))
        text = res.to_csv_string()
        lines = text.strip().splitlines()
        assert lines[0] == "kbar,p,verdict,alpha"
        assert len(lines) == 1 + 5 * 7

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import binomial_sigma, bootstrap_lambda_se
from qlcontext import (
    Classification,
    CountTable,
    EnsembleSpec,
    Mode,
    estimate_data,
    interference_profile,
    run_interference_experiment,
    sample_context,
    sample_filtration,
    two_scale_collect,
    validate_data,
    von_neumann_test,
)
from qlcontext.ensemble import (
    PRESETS,
    interpolate_specs,
    lambda_gradient,
    lambda_standard_errors,
    preset,
    repeat_b_frequency,
    sample_counts,
)
from qlcontext.errors import EmptyFiltration, ZeroTotal

UNIFORM = [[0.25, 0.25], [0.25, 0.25]]
POINT = [[1.0, 0.0], [0.0, 0.0]]


def nondisturbing(joint):
    return EnsembleSpec("C", joint, None, Mode.NON_DISTURBING)


def disturbing(joint, kernel):
    return EnsembleSpec("C", joint, kernel, Mode.DISTURBING)


class TestSpec:
    def test_validation(self):
        with pytest.raises(ValueError, match="probability table"):
            nondisturbing([[0.5, 0.5], [0.5, 0.5]])
        with pytest.raises(ValueError, match="disturbance"):
            disturbing(UNIFORM, [[0.5, 0.6], [0.4, 0.4]])
        with pytest.raises(ValueError, match="kernel"):
            EnsembleSpec("C", UNIFORM)
        with pytest.raises(ValueError, match="2x2"):
            nondisturbing([0.25] * 4)

    def test_dict_round_trip(self):
        for name, sc in PRESETS.items():
            assert EnsembleSpec.from_dict(sc.spec.to_dict()).to_dict() == sc.spec.to_dict(), name

    def test_analytic_transition(self):
        spec = nondisturbing([[0.3, 0.1], [0.2, 0.4]])
        np.testing.assert_allclose(spec.transition(), [[0.6, 0.2], [0.4, 0.8]])
        np.testing.assert_allclose(interference_profile(spec.analytic_data()).lambdas, 0, atol=1e-15)

    def test_presets(self):
        np.testing.assert_allclose(interference_profile(preset("canonical").spec.analytic_data()).lambdas, (0.5, -0.5))
        prof = interference_profile(preset("hyperbolic").spec.analytic_data())
        assert prof.classification is Classification.HYPERBOLIC
        np.testing.assert_allclose(prof.lambdas, (1.5, -1.5), atol=1e-14)
        with pytest.raises(KeyError, match="unknown preset"):
            preset("nope")


class TestSampleContext:
    def test_uniform(self):
        n = 10**5
        n_a, n_b = sample_context(nondisturbing(UNIFORM), n, 11)
        bound = 3 * binomial_sigma(n, 0.5)
        assert abs(n_a[0] - n / 2) <= bound
        assert abs(n_b[0] - n / 2) <= bound
        assert n_a.sum() == n_b.sum() == n

    @given(st.integers(1, 1000), st.integers(0, 2**32 - 1))
    @settings(max_examples=30)
    def test_concentrated(self, n, seed):
        n_a, n_b = sample_context(nondisturbing(POINT), n, seed)
        assert tuple(n_a) == (n, 0) and tuple(n_b) == (n, 0)

    def test_rejects_empty_sample(self):
        with pytest.raises(ValueError):
            sample_context(nondisturbing(UNIFORM), 0, 1)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=20)
    def test_repeatable(self, seed):
        spec = preset("opinion-poll").spec
        assert sample_counts(spec, 500, seed) == sample_counts(spec, 500, seed)


class TestFiltration:
    def test_disturbing(self):
        n = 10**5
        spec = disturbing(UNIFORM, [[0.9, 0.5], [0.1, 0.5]])
        counts = sample_filtration(spec, 0, n, 5)
        assert abs(counts[0] - 0.9 * n) <= 3 * binomial_sigma(n, 0.9)

    def test_nondisturbing_uniform(self):
        n = 10**5
        counts = sample_filtration(nondisturbing(UNIFORM), 0, n, 5)
        assert abs(counts[0] - 0.5 * n) <= 3 * binomial_sigma(n, 0.5)

    def test_nondisturbing_concentrated(self):
        assert tuple(sample_filtration(nondisturbing(POINT), 0, 1000, 1)) == (1000, 0)

    def test_empty(self):
        with pytest.raises(EmptyFiltration):
            sample_filtration(nondisturbing(POINT), 1, 10, 1)

    @pytest.mark.parametrize("name", sorted(PRESETS))
    @pytest.mark.parametrize("y", [0, 1])
    def test_repetition_postulate(self, name, y):
        assert repeat_b_frequency(preset(name).spec, y, 10**4, 3) == 1.0


class TestEstimate:
    def table(self, n_a=(75000, 25000), n_b=(50000, 50000), q=((50000, 50000), (50000, 50000))):
        return CountTable(n_a, n_b, q)

    def test_example(self):
        data, se = estimate_data(self.table())
        np.testing.assert_array_equal(data.pa, (0.75, 0.25))
        assert se.pa[0] == pytest.approx(math.sqrt(0.75 * 0.25 / 1e5))
        assert se.pa[0] == pytest.approx(0.00137, abs=5e-6)
        assert data.provenance.value == "empirical"
        assert validate_data(data) == []

    def test_degenerate_counts(self):
        data, se = estimate_data(self.table(n_a=(100, 0)))
        np.testing.assert_array_equal(data.pa, (1.0, 0.0))
        np.testing.assert_array_equal(se.pa, (0.0, 0.0))

    def test_zero_total(self):
        with pytest.raises(ZeroTotal, match="filtration_y2"):
            estimate_data(self.table(q=((10, 0), (10, 0))))

    def test_negative_counts(self):
        with pytest.raises(ValueError):
            CountTable((-1, 2), (1, 1), ((1, 1), (1, 1)))

    @pytest.mark.parametrize("name", sorted(PRESETS))
    def test_round_trip_within_3_sigma(self, name):
        spec = preset(name).spec
        data, se = estimate_data(sample_counts(spec, 10**5, 21))
        exact = spec.analytic_data()
        for got, want, s in ((data.pa, exact.pa, se.pa), (data.pb, exact.pb, se.pb), (data.P, exact.P, se.P)):
            assert np.all(np.abs(got - want) <= 3 * s + 1e-15)

    def test_convergence_rate(self):
        spec = preset("opinion-poll").spec
        ses = []
        for n in (10**3, 10**4, 10**5):
            _, se = estimate_data(sample_counts(spec, n, 8))
            ses.append(np.concatenate([se.pa, se.pb, se.P.ravel()]))
        for lo, hi in zip(ses, ses[1:]):
            ratio = lo / hi
            assert np.all((ratio >= math.sqrt(10) / 2) & (ratio <= 2 * math.sqrt(10)))


class TestLambdaErrors:
    def test_gradient_matches_finite_differences(self):
        d = estimate_data(CountTable((700, 300), (450, 550), ((300, 650), (700, 350))))[0]
        for x in (0, 1):
            g = lambda_gradient(d, x)
            base = np.array([d.pa[x], d.pb[0], d.P[x, 0], d.P[x, 1]])

            def lam(v):
                pa, pb1, P1, P2 = v
                A, B = pb1 * P1, (1 - pb1) * P2
                return (pa - A - B) / (2 * math.sqrt(A * B))

            h = 1e-6
            fd = [(lam(base + h * e) - lam(base - h * e)) / (2 * h) for e in np.eye(4)]
            np.testing.assert_allclose(g, fd, rtol=1e-6)

    @pytest.mark.parametrize("name", ["canonical", "opinion-poll", "grandmother-neurons"])
    def test_delta_method_matches_bootstrap(self, name):
        result = run_interference_experiment(preset(name).spec, 10**4, 4)
        t = result.table
        q1 = (t.n_a_given_y[0][0], t.n_a_given_y[1][0])
        q2 = (t.n_a_given_y[0][1], t.n_a_given_y[1][1])
        rng = np.random.default_rng(99)
        for x in (0, 1):
            boot = bootstrap_lambda_se((t.n_a, t.n_b, q1, q2), x, 20000, rng)
            assert result.profile.lambda_se[x] == pytest.approx(boot, rel=0.1)

    def test_profile_carries_errors(self):
        r = run_interference_experiment(preset("canonical").spec, 10**4, 1)
        np.testing.assert_array_equal(r.profile.lambda_se, lambda_standard_errors(r.data, r.table))
        assert r.table.seed == 1


class TestExperiment:
    def test_canonical(self):
        r = run_interference_experiment(preset("canonical").spec, 10**5, 2024)
        assert abs(r.profile.lambdas[0] - 0.5) <= 3 * r.profile.lambda_se[0]

    @pytest.mark.parametrize("seed", range(5))
    def test_nondisturbing_is_classical(self, seed):
        r = run_interference_experiment(preset("classical").spec, 10**5, seed)
        assert all(abs(lam) <= 3 * s for lam, s in zip(r.profile.lambdas, r.profile.lambda_se))

    def test_hyperbolic_detected(self):
        r = run_interference_experiment(preset("hyperbolic").spec, 10**6, 7)
        assert r.profile.classification is Classification.HYPERBOLIC

    def test_deterministic(self):
        spec = preset("grandmother-neurons").spec
        a = run_interference_experiment(spec, 1000, 5)
        b = run_interference_experiment(spec, 1000, 5)
        assert a.table == b.table
        assert a.profile == b.profile


class TestVonNeumann:
    def test_shared_kernel_passes(self):
        kernel = [[0.7, 0.2], [0.3, 0.8]]
        specs = [disturbing(UNIFORM, kernel), disturbing([[0.1, 0.2], [0.3, 0.4]], kernel)]
        r = von_neumann_test(specs, 0, 10**5, 12)
        assert r.passed
        assert r.discrepancy < r.threshold

    def test_nondisturbing_conditionals_fail(self):
        specs = [nondisturbing([[0.15, 0.25], [0.35, 0.25]]), nondisturbing([[0.35, 0.25], [0.15, 0.25]])]
        r = von_neumann_test(specs, 0, 10**5, 12)
        assert not r.passed
        se = math.hypot(*r.standard_errors)
        assert abs(r.discrepancy - 0.4) <= 3 * se

    def test_duplicate_under_shared_seed(self):
        spec = preset("opinion-poll").spec
        r = von_neumann_test([spec, spec], 1, 10**4, 3, shared_seed=True)
        assert r.discrepancy == 0.0
        assert r.passed

    def test_needs_two(self):
        with pytest.raises(ValueError):
            von_neumann_test([preset("canonical").spec], 0, 10, 1)


class TestTwoScale:
    def test_static_is_stationary(self):
        steps = two_scale_collect(preset("canonical").spec, 10, 10**4, 17)
        assert [s.t for s in steps] == list(range(10))
        lams = np.array([s.result.profile.lambdas[0] for s in steps])
        ses = np.array([s.result.profile.lambda_se[0] for s in steps])
        pooled = lams.mean()
        assert np.all(np.abs(lams - pooled) <= 3 * ses)

    def test_schedule_drifts(self):
        start = disturbing(np.outer([0.5, 0.5], [0.5, 0.5]), [[0.5, 0.5], [0.5, 0.5]])
        stop = preset("canonical").spec
        schedule = interpolate_specs(start, stop, 6)
        steps = two_scale_collect(schedule, 6, 10**5, 5)
        analytic = [interference_profile(s.analytic_data()).lambdas[0] for s in schedule]
        np.testing.assert_allclose(analytic, np.linspace(0, 0.5, 6), atol=1e-12)
        lams = [s.result.profile.lambdas[0] for s in steps]
        ses = [s.result.profile.lambda_se[0] for s in steps]
        assert all(abs(lam - a) <= 3 * s for lam, a, s in zip(lams, analytic, ses))
        assert lams[-1] - lams[0] > 10 * max(ses)
        assert all(b > a for a, b in zip(lams, lams[1:]))

    def test_single_step_reduces_to_experiment(self):
        spec = preset("opinion-poll").spec
        (step,) = two_scale_collect(spec, 1, 5000, 8)
        direct = run_interference_experiment(spec, 5000, 8)
        assert step.result.table == direct.table
        assert step.result.profile == direct.profile

    def test_validation(self):
        spec = preset("canonical").spec
        with pytest.raises(ValueError):
            two_scale_collect(spec, 3, 0, 1)
        with pytest.raises(ValueError, match="schedule"):
            two_scale_collect([spec, spec], 3, 10, 1)

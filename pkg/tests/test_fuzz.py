import numpy as np

from gexlab.experiments import require_mean_zero
from gexlab.fuzz import (
    SuiteReport,
    axiom_suite,
    capacity_duality_suite,
    independence_suite,
    random_ambiguity_set,
    random_catalog_phi,
    random_interval,
    random_oracle_set,
)
from gexlab.pengsum import count_adapted_strategies


class TestGenerators:
    def test_random_set_shape(self, rng):
        for _ in range(20):
            aset = random_ambiguity_set(rng)
            assert aset.step in (0.25, 0.5)
            assert 1 <= len(aset.laws) <= 4
            for law in aset.laws:
                assert np.abs(law.support).max() <= 2.5 + 1e-15

    def test_mean_zero_draws(self, rng):
        for _ in range(20):
            require_mean_zero(random_ambiguity_set(rng, mean_zero=True))

    def test_catalog_phi_is_callable(self, rng):
        xs = np.linspace(-2.0, 2.0, 9)
        for _ in range(30):
            phi = random_catalog_phi(rng)
            vals = np.asarray(phi(xs), dtype=np.float64)
            assert vals.shape == xs.shape
            assert np.isfinite(vals).all()

    def test_oracle_set_respects_ceiling(self, rng):
        for _ in range(20):
            aset = random_oracle_set(rng, n=4)
            assert count_adapted_strategies(aset, 4) <= 10**6

    def test_oracle_set_tiny_ceiling_forces_single_law(self, rng):
        aset = random_oracle_set(rng, n=3, ceiling=1)
        assert len(aset.laws) == 1

    def test_interval_overlaps_support(self, rng):
        aset = random_ambiguity_set(rng)
        pts = np.concatenate([law.support for law in aset.laws])
        for _ in range(10):
            a, b = random_interval(rng, aset)
            assert a <= b
            assert a >= pts.min() - aset.step - 1e-12
            assert b <= pts.max() + aset.step + 1e-12


class TestSuiteReport:
    def test_empty_checks(self):
        report = SuiteReport("empty", 0, 0, 1e-12, {})
        assert report.max_violation == 0.0
        assert report.passed

    def test_dict_and_csv_projections(self):
        report = SuiteReport("demo", 3, 7, 1e-12, {"a": 1e-15, "b": 2e-15})
        d = report.to_dict()
        assert list(d) == [
            "kind", "trials", "seed", "tolerance", "checks", "maxViolation", "pass",
        ]
        assert d["maxViolation"] == 2e-15
        assert report.csv_rows() == [("a", 1e-15), ("b", 2e-15)]


class TestSuites:
    def test_axiom_suite_passes(self):
        report = axiom_suite(9, trials=40)
        assert report.passed
        assert set(report.checks) == {
            "monotonicity",
            "constantPreserving",
            "subAdditivity",
            "positiveHomogeneity",
            "capacityDuality",
        }
        assert all(v >= 0.0 for v in report.checks.values())

    def test_axiom_suite_is_seed_deterministic(self):
        assert axiom_suite(9, trials=40).to_dict() == axiom_suite(9, trials=40).to_dict()

    def test_capacity_duality_suite_passes(self):
        report = capacity_duality_suite(11, n_sets=4, n_events=20)
        assert report.passed
        assert report.trials == 80

    def test_independence_suite_passes(self):
        report = independence_suite(3, n_pairs=2)
        assert report.passed
        assert set(report.checks) == {"upperFactorization", "lowerFactorization"}

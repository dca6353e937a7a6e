import numpy as np
import pytest

from bfequiv.properties import PropertySpec, catalogue, run_catalogue, run_property
from bfequiv.rng import RngStream


class TestCatalogue:
    def test_size_at_least_twelve(self):
        assert len(catalogue()) >= 12

    def test_names_unique_and_claims_present(self):
        specs = catalogue()
        names = [s.name for s in specs]
        assert len(set(names)) == len(names)
        assert all(s.claim for s in specs)

    def test_full_run_passes(self):
        results, transcript = run_catalogue(RngStream(0), n_trials=25)
        assert all(r.passed for r in results)
        assert transcript.count("PASS") == len(results)

    def test_transcript_deterministic(self):
        _, t1 = run_catalogue(RngStream(123), n_trials=10)
        _, t2 = run_catalogue(RngStream(123), n_trials=10)
        assert t1 == t2


class TestRunProperty:
    def test_failure_reports_shrunk_counterexample(self):
        spec = PropertySpec(
            name="always_fails_above_one",
            claim="x stays below 1",
            draw=lambda rng: {"x": float(rng.generator.uniform(5.0, 10.0))},
            test=lambda c: None if c["x"] < 1.0 else f"x = {c['x']}",
            shrink_keys=("x",),
        )
        result = run_property(spec, RngStream(1), n_trials=10)
        assert not result.passed
        assert result.counterexample is not None
        # shrinking halves toward zero while the predicate still fails
        assert result.counterexample["x"] < 5.0
        assert result.counterexample["x"] >= 1.0
        assert "FAIL" in result.line()

    def test_pass_line_format(self):
        spec = PropertySpec(
            name="trivial",
            claim="draws are finite",
            draw=lambda rng: {"x": 0.5},
            test=lambda c: None,
        )
        result = run_property(spec, RngStream(2), n_trials=5)
        assert result.passed
        assert result.line() == "PASS trivial (5 trials): draws are finite"

import math

import numpy as np
import pytest

from linear_ess.bench import (CSV_COLUMNS, BenchInstance, MAX_WORST_CASE_M, brute_force_operations,
                              fast_path_operations, gen_random_instance, gen_worst_case_angles,
                              instance_angles, loglog_slope, read_csv, step_with_method,
                              time_methods, worst_case_instance, write_csv)
from linear_ess.intervals import active_intervals_brute, active_intervals_fast
from linear_ess.polytope import residuals
from linear_ess.sampler import SamplerConfig, run_chain

TWO_PI = 2 * math.pi


class TestGenerators:
    def test_random_strictly_feasible(self):
        rng = np.random.default_rng(0)
        for d in (1, 5, 64):
            inst = gen_random_instance(d, rng)
            assert inst.dims == (d, d)
            assert residuals(inst.poly, inst.x0).max() < 0

    def test_random_deterministic(self):
        a = gen_random_instance(8, 3)
        b = gen_random_instance(8, 3)
        assert np.array_equal(a.poly.A, b.poly.A) and np.array_equal(a.x0, b.x0)

    def test_worst_case_order(self):
        x = gen_worst_case_angles(MAX_WORST_CASE_M)
        a, b = x.alphas, x.betas
        assert np.all(a < b)
        assert np.all(b[1:] < a[:-1])

    def test_worst_case_bounds(self):
        with pytest.raises(ValueError):
            gen_worst_case_angles(0)
        with pytest.raises(ValueError):
            gen_worst_case_angles(MAX_WORST_CASE_M + 1)

    def test_worst_case_instance_angles(self):
        # recompute the angles from the polytope; arccos near 1 limits accuracy
        inst = worst_case_instance(12)
        got = instance_angles(BenchInstance(inst.poly, inst.x0, "x"), inst.nu)
        np.testing.assert_allclose(got.alphas, inst.angles.alphas, rtol=0, atol=1e-10)
        np.testing.assert_allclose(got.betas, inst.angles.betas, rtol=0, atol=1e-10)

    def test_random_instances_no_rejection(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            inst = gen_random_instance(32, rng)
            _, stats = run_chain(inst.poly, inst.x0, 50, SamplerConfig(seed=0))
            assert stats.rejections == 0


class TestOperationCounts:
    def test_fast_count_matches_result(self):
        x = gen_worst_case_angles(30)
        result, ops = fast_path_operations(x)
        assert result == active_intervals_fast(x)
        assert ops > 0

    def test_brute_growth(self):
        result, counts, ops = brute_force_operations(gen_worst_case_angles(25))
        assert counts == list(range(2, 27))
        assert result == active_intervals_brute(gen_worst_case_angles(25))

    def test_slopes(self):
        ms = [16, 32, 64, 128]
        fast = [fast_path_operations(gen_worst_case_angles(m))[1] for m in ms]
        brute = [brute_force_operations(gen_worst_case_angles(m))[2] for m in ms]
        assert loglog_slope(ms, brute) >= 1.8
        assert loglog_slope(ms, fast) <= 1.2

    def test_loglog_slope(self):
        assert loglog_slope([1, 10, 100], [3, 300, 30000]) == pytest.approx(2.0)


class TestTiming:
    def test_step_methods_agree(self):
        inst = gen_random_instance(16, 4)
        nu = np.random.default_rng(5).standard_normal(16)
        out = [step_with_method(inst, inst.x0, nu, 0.37, m) for m in ("fast", "brute", "likelihood")]
        np.testing.assert_allclose(out[0], out[1], atol=1e-14)
        np.testing.assert_allclose(out[0], out[2], atol=1e-14)
        with pytest.raises(ValueError):
            step_with_method(inst, inst.x0, nu, 0.5, "nope")

    def test_rows(self, tmp_path):
        rows = time_methods([gen_random_instance(8, 0), worst_case_instance(16)], reps=3,
                            chains=2, sampler_samples=20)
        methods = [(r.label, r.method) for r in rows]
        assert ("worst-m16", "brute") in methods and ("worst-m16", "likelihood") in methods
        assert ("random-d8", "step-fast") in methods and ("random-d8", "sampler-2") in methods
        assert not any(m.startswith("step") for label, m in methods if label == "worst-m16")
        path = tmp_path / "b.csv"
        write_csv(rows, path)
        back = read_csv(path)
        assert len(back) == len(rows) and tuple(back[0]) == CSV_COLUMNS

    def test_reps(self):
        with pytest.raises(ValueError):
            time_methods([gen_random_instance(4, 0)], reps=2)

import math

import numpy as np
import pytest

from supermt.radial import constants_for, dirichlet_energy, make_grid
from supermt.functionals import FunctionalSpec, eval_functional
from supermt.families import MoserParams, concentrating_function, moser_function
from supermt.maximize import (MaximizerOptions, Start, certified_gap_report,
                              default_multistart, divergence_probe, maximize)

A2 = 4 * math.pi
J2 = constants_for(2).concentration_level


@pytest.fixture(scope="module")
def grid2000():
    return make_grid(2000, "log", strength=40.0)


@pytest.fixture(scope="module")
def mt_report(grid2000):
    return maximize(FunctionalSpec(kind="mt", n=2), grid2000,
                    MaximizerOptions(seed=1))


@pytest.fixture(scope="module")
def probe_grid():
    return make_grid(4000, "log", strength=60.0)


class TestMaximizeSubcritical:
    def test_beats_trivial_plateau(self, mt_report):
        assert mt_report.best_value > math.pi + 1e-3
        assert not mt_report.diverged
        assert not mt_report.trivial_plateau
        assert math.isfinite(mt_report.best_value)

    def test_argmax_nonincreasing_and_positive(self, mt_report, grid2000):
        # monotone up to the optimizer's tolerance scale ...
        vals = mt_report.argmax.values
        assert np.all(np.diff(vals) <= 1e-6)
        assert np.all(vals[:-1] > 0.0)
        # ... and exactly monotone with the rearrangement projection on
        rep = maximize(FunctionalSpec(kind="mt", n=2), grid2000,
                       MaximizerOptions(seed=1, monotone_projection=True,
                                        multistart=[Start("moser", 64.0)]))
        assert np.all(np.diff(rep.argmax.values) <= 0.0)
        assert rep.best_value == pytest.approx(mt_report.best_value, rel=1e-5)

    def test_argmax_feasible(self, mt_report):
        assert dirichlet_energy(mt_report.argmax) == pytest.approx(1.0, abs=1e-8)

    def test_trace_monotone_and_feasible(self, mt_report):
        values = [v for v, _, _ in mt_report.trace]
        assert all(b >= a for a, b in zip(values, values[1:]))
        assert all(abs(e - 1.0) <= 1e-8 for _, _, e in mt_report.trace)

    def test_dominates_every_multistart_family_member(self, grid2000, mt_report):
        spec = FunctionalSpec(kind="mt", n=2)
        statics = []
        for j in (8.0, 64.0, 512.0):
            u = moser_function(MoserParams(j=j, n=2), grid2000)
            statics.append(eval_functional(u, spec).value)
        for eps in (1e-2, 1e-4, 1e-6):
            u, _ = concentrating_function(eps, 2, grid2000)
            statics.append(eval_functional(u, spec).value)
        assert mt_report.best_value >= max(statics) - 1e-12

    def test_all_starts_converge_to_common_value(self, mt_report):
        finals = [o.value for o in mt_report.starts]
        assert max(finals) - min(finals) <= 1e-4 * max(finals)

    def test_deterministic_given_seed(self, grid2000):
        spec = FunctionalSpec(kind="mt", n=2)
        opts = MaximizerOptions(seed=7, multistart=[Start("zero-perturbed")],
                                max_iters=40)
        r1 = maximize(spec, grid2000, opts)
        r2 = maximize(spec, grid2000, opts)
        assert r1.best_value == r2.best_value
        assert np.array_equal(r1.argmax.values, r2.argmax.values)

    def test_mt2_exceeds_concentration_level(self, grid2000):
        spec = FunctionalSpec(kind="mt2", n=2, alpha=1.0)
        rep = maximize(spec, grid2000, MaximizerOptions(seed=1))
        assert rep.best_value > J2
        conc = [o for o in rep.starts if o.provenance.startswith("concentrating")]
        assert any(o.value > J2 for o in conc)

    def test_grid_refinement_stability(self, grid2000, mt_report):
        fine = make_grid(4000, "log", strength=40.0)
        rep_fine = maximize(FunctionalSpec(kind="mt", n=2), fine,
                            MaximizerOptions(seed=1))
        rel = abs(rep_fine.best_value - mt_report.best_value) / rep_fine.best_value
        assert rel < 0.005

    def test_monotone_projection_does_not_lose_value(self):
        grid = make_grid(1000, "log", strength=30.0)
        spec = FunctionalSpec(kind="mt", n=2)
        for seed in range(3):
            opts_off = MaximizerOptions(seed=seed, multistart=[
                Start("zero-perturbed"), Start("moser", 64.0)])
            opts_on = MaximizerOptions(seed=seed, monotone_projection=True,
                                       multistart=[Start("zero-perturbed"),
                                                   Start("moser", 64.0)])
            v_off = maximize(spec, grid, opts_off).best_value
            v_on = maximize(spec, grid, opts_on).best_value
            assert v_on >= v_off - 1e-6

    def test_trivial_plateau_flagged(self, grid2000):
        spec = FunctionalSpec(kind="mt", n=2, gamma=1e-9)
        opts = MaximizerOptions(max_iters=0, multistart=[Start("moser", 8.0)])
        rep = maximize(spec, grid2000, opts)
        assert rep.trivial_plateau

    def test_previous_solution_start(self, grid2000, mt_report):
        spec = FunctionalSpec(kind="mt", n=2)
        opts = MaximizerOptions(multistart=[
            Start("previous", values=mt_report.argmax.values)], max_iters=50)
        rep = maximize(spec, grid2000, opts)
        assert rep.best_value >= mt_report.best_value - 1e-9

    def test_compared_thresholds_present(self, mt_report):
        assert mt_report.compared_thresholds["concentration_level"] == (
            pytest.approx(J2))


class TestGapReports:
    def test_mt1_strictly_above_mt(self, grid2000):
        opts = MaximizerOptions(seed=2)
        rep = certified_gap_report(
            FunctionalSpec(kind="mt1", n=2, alpha=1.0),
            FunctionalSpec(kind="mt", n=2), grid2000, opts)
        assert rep.gap > 0.0
        assert rep.significant
        assert rep.first.compared_thresholds["other_best"] == (
            pytest.approx(rep.second.best_value))

    def test_identical_specs_indistinguishable(self, grid2000):
        opts = MaximizerOptions(seed=2, multistart=[Start("moser", 64.0)],
                                max_iters=120)
        rep = certified_gap_report(
            FunctionalSpec(kind="mt1", n=2, alpha=1.0),
            FunctionalSpec(kind="mt1", n=2, alpha=1.0), grid2000, opts)
        assert abs(rep.gap) <= 1e-8 * rep.first.best_value
        assert not rep.significant
        assert "indistinguishable" in rep.note

    def test_mt2_above_concentration_level_baseline(self, grid2000):
        rep = maximize(FunctionalSpec(kind="mt2", n=2, alpha=1.0), grid2000,
                       MaximizerOptions(seed=3))
        assert rep.best_value - J2 > 0.5

    def test_dimension_mismatch_rejected(self, grid2000):
        with pytest.raises(ValueError):
            certified_gap_report(FunctionalSpec(kind="mt", n=2),
                                 FunctionalSpec(kind="mt", n=3), grid2000)


class TestDivergenceProbe:
    def test_supercritical_probe_triggers(self, probe_grid):
        spec = FunctionalSpec(kind="mt1", n=2, gamma=1.2 * A2, alpha=1.0)
        rep = divergence_probe(spec, probe_grid,
                               MaximizerOptions(max_iters=200), ceiling=1e6)
        assert rep.triggered
        assert rep.trigger in ("ceiling", "exponent-cap")
        assert rep.trigger_j is not None

    def test_growth_slope_matches_theory(self, probe_grid):
        spec = FunctionalSpec(kind="mt2", n=2, gamma=1.2 * A2, alpha=1.0)
        js = [2.0 ** k for k in range(8, 17)]
        rep = divergence_probe(spec, probe_grid,
                               MaximizerOptions(max_iters=0), ceiling=1e12,
                               j_list=js)
        assert rep.growth_slope == pytest.approx(rep.expected_slope, rel=0.05)

    def test_critical_gamma_rejected_by_probe(self, probe_grid):
        with pytest.raises(ValueError):
            divergence_probe(FunctionalSpec(kind="mt", n=2), probe_grid)

    def test_no_divergence_at_sharp_constant(self, grid2000):
        # finite plateau at gamma = alpha_n: no flag, no runaway
        rep = maximize(FunctionalSpec(kind="mt1", n=2, alpha=1.0), grid2000,
                       MaximizerOptions(seed=1))
        assert not rep.diverged
        assert rep.best_value < 1e3

    def test_all_starts_diverged_flag(self, grid2000):
        spec = FunctionalSpec(kind="mt", n=2, gamma=50 * A2)
        opts = MaximizerOptions(multistart=[Start("moser", 1e5),
                                            Start("moser", 1e6)])
        rep = maximize(spec, grid2000, opts)
        assert rep.all_starts_diverged
        assert rep.diverged

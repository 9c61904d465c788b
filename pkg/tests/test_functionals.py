import math

import numpy as np
import pytest

from supermt.radial import (RadialFunction, constants_for, dirichlet_energy,
                            make_grid, normalize)
from supermt.functionals import (FunctionalSpec, check_profile_conditions,
                                 eval_functional, eval_mt_constant_lower_bound,
                                 objective_gradient, objective_gradient_full)
from supermt.families import (MoserParams, concentrating_function,
                              default_family_grid, moser_function)

A2 = 4 * math.pi


def random_unit(grid, n, seed):
    rng = np.random.default_rng(seed)
    vals = rng.standard_normal(grid.count)
    vals[-1] = 0.0
    return normalize(RadialFunction(grid=grid, values=vals, dim_n=n))


class TestSpecValidation:
    def test_mt1_requires_alpha(self):
        with pytest.raises(ValueError, match="alpha"):
            FunctionalSpec(kind="mt1", n=2)

    def test_general_requires_profile(self):
        with pytest.raises(ValueError, match="profile"):
            FunctionalSpec(kind="general-additive", n=2)

    def test_profile_rejected_elsewhere(self):
        with pytest.raises(ValueError):
            FunctionalSpec(kind="mt", n=2, profile=lambda r: r)

    def test_gamma_defaults_to_sharp_constant(self):
        assert FunctionalSpec(kind="mt", n=2).gamma == pytest.approx(A2)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            FunctionalSpec(kind="mt3", n=2)


class TestEvalFunctional:
    def test_zero_function_gives_ball_volume(self):
        g = make_grid(200, "log", strength=20.0)
        u = RadialFunction(grid=g, values=np.zeros(200), dim_n=2)
        for kind, alpha in (("mt", None), ("mt1", 1.0), ("mt2", 1.0)):
            fv = eval_functional(u, FunctionalSpec(kind=kind, n=2, alpha=alpha))
            assert fv.value == pytest.approx(math.pi, abs=1e-10)
            assert not fv.diverged

    def test_moser_values_bounded_at_sharp_constant(self):
        # subcritical-in-j boundedness: values stay under a j-free cap
        for j in (16, 256, 4096):
            g = default_family_grid(1.0 / j, count=8000)
            u = moser_function(MoserParams(j=j, n=2), g)
            fv = eval_functional(u, FunctionalSpec(kind="mt", n=2))
            assert not fv.diverged
            assert fv.value < 14.0

    def test_moser_supercritical_lower_bound(self):
        # value >= pi * j^{0.2} at gamma = 1.1 alpha_2
        gamma = 1.1 * A2
        for j in (64.0, 1024.0):
            g = default_family_grid(1.0 / j, count=20000)
            u = moser_function(MoserParams(j=j, n=2), g)
            fv = eval_functional(u, FunctionalSpec(kind="mt", n=2, gamma=gamma))
            assert fv.value >= math.pi * j ** 0.2

    def test_monotone_in_gamma(self):
        g = make_grid(300, "log", strength=20.0)
        for seed in range(10):
            u = random_unit(g, 2, seed)
            vals = [eval_functional(
                u, FunctionalSpec(kind="mt", n=2, gamma=gam)).value
                for gam in (0.5 * A2, 0.9 * A2, A2)]
            assert vals[0] < vals[1] < vals[2]

    def test_mt1_dominates_mt(self):
        g = make_grid(300, "log", strength=20.0)
        spec_mt = FunctionalSpec(kind="mt", n=2)
        for seed in range(5):
            u = random_unit(g, 2, seed)
            for alpha in (0.5, 1.0, 2.0):
                spec1 = FunctionalSpec(kind="mt1", n=2, alpha=alpha)
                assert (eval_functional(u, spec1).value
                        >= eval_functional(u, spec_mt).value)
        # strict for a nonzero witness
        u = random_unit(g, 2, 0)
        assert (eval_functional(u, FunctionalSpec(kind="mt1", n=2, alpha=1.0)).value
                > eval_functional(u, spec_mt).value)

    def test_divergence_flag_instead_of_inf(self):
        g = make_grid(200, "log", strength=30.0)
        u = moser_function(MoserParams(j=1e6, n=2), g)
        fv = eval_functional(u, FunctionalSpec(kind="mt", n=2, gamma=40 * A2))
        assert fv.diverged
        assert math.isfinite(fv.value)

    def test_general_kinds_match_power_profiles(self):
        g = make_grid(400, "log", strength=20.0)
        u = random_unit(g, 2, 42)
        alpha = 1.3
        prof = lambda r: np.asarray(r) ** alpha
        v1 = eval_functional(u, FunctionalSpec(kind="mt1", n=2, alpha=alpha))
        v1g = eval_functional(u, FunctionalSpec(kind="general-additive", n=2,
                                                profile=prof))
        assert v1g.value == pytest.approx(v1.value, rel=1e-13)
        v2 = eval_functional(u, FunctionalSpec(kind="mt2", n=2, alpha=alpha))
        v2g = eval_functional(u, FunctionalSpec(kind="general-exponent", n=2,
                                                profile=prof))
        assert v2g.value == pytest.approx(v2.value, rel=1e-13)

    def test_dimension_mismatch_rejected(self):
        g = make_grid(64, "uniform")
        u = RadialFunction(grid=g, values=np.zeros(64), dim_n=3)
        with pytest.raises(ValueError, match="dimension"):
            eval_functional(u, FunctionalSpec(kind="mt", n=2))


class TestObjectiveGradient:
    def test_zero_function_zero_gradient_n2(self):
        # exponent 2 at n=2: derivative vanishes at u = 0
        g = make_grid(128, "uniform")
        u = RadialFunction(grid=g, values=np.zeros(128), dim_n=2)
        grad = objective_gradient(u, FunctionalSpec(kind="mt", n=2))
        assert grad.shape == (127,)
        assert np.all(grad == 0.0)

    @pytest.mark.parametrize("kind,alpha", [("mt", None), ("mt1", 1.0),
                                            ("mt2", 1.0)])
    def test_matches_central_differences(self, kind, alpha):
        g = make_grid(120, "log", strength=12.0)
        spec = FunctionalSpec(kind=kind, n=2, alpha=alpha)
        for seed in range(5):
            u = random_unit(g, 2, seed)
            grad = objective_gradient(u, spec)
            scale = np.max(np.abs(grad))
            rng = np.random.default_rng(seed + 100)
            # error relative to the gradient's sup norm: below that scale the
            # central difference itself drowns in value roundoff
            for k in rng.integers(0, 119, size=5):
                h = 1e-6 * max(1.0, abs(u.values[k]))
                vp, vm = u.values.copy(), u.values.copy()
                vp[k] += h
                vm[k] -= h
                fd = (eval_functional(u.with_values(vp), spec).value
                      - eval_functional(u.with_values(vm), spec).value) / (2 * h)
                assert abs(grad[k] - fd) <= 1e-5 * scale

    def test_divergence_flag_propagates(self):
        g = make_grid(200, "log", strength=30.0)
        u = moser_function(MoserParams(j=1e6, n=2), g)
        _, div = objective_gradient_full(
            u, FunctionalSpec(kind="mt", n=2, gamma=40 * A2))
        assert div


class TestLowerBoundCertificate:
    def test_empty_family_gives_ball_volume(self):
        spec = FunctionalSpec(kind="mt2", n=2, alpha=1.0)
        assert eval_mt_constant_lower_bound(spec, None) == pytest.approx(math.pi)

    def test_max_semantics(self):
        spec = FunctionalSpec(kind="mt2", n=2, alpha=1.0)
        J = constants_for(2).concentration_level
        assert eval_mt_constant_lower_bound(spec, J + 0.3) == pytest.approx(J + 0.3)
        assert eval_mt_constant_lower_bound(spec, 0.1) == pytest.approx(math.pi)

    def test_concentrating_sweep_exceeds_concentration_level(self):
        spec = FunctionalSpec(kind="mt2", n=2, alpha=1.0)
        J = constants_for(2).concentration_level
        best = 0.0
        for eps in (1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8):
            g = default_family_grid(eps, count=40000)
            u, _ = concentrating_function(eps, 2, g)
            best = max(best, eval_functional(u, spec).value)
        assert eval_mt_constant_lower_bound(spec, best) > J


class TestProfileConditions:
    def test_power_profile_passes_everything(self):
        rep = check_profile_conditions(lambda r: r, which="f2",
                                       params={"c": 1.0, "gamma_f3": 0.5,
                                               "gamma_exponent": 3.0})
        assert rep.f1_ok and rep.f2_ok and rep.f2prime_ok and rep.f3_ok
        assert rep.selected_ok
        for rows in rep.witnesses.values():
            assert len(rows) >= 8

    def test_constant_profile_fails_near_origin(self):
        rep = check_profile_conditions(lambda r: 1.0, which="f2")
        assert not rep.f1_ok
        assert not rep.f2_ok

    def test_log_cubed_profile_saturates_f2prime(self):
        prof = lambda r: 1.0 / (-math.log(r)) ** 3 if r > 0 else 0.0
        rep = check_profile_conditions(prof, which="f2prime",
                                       params={"gamma_exponent": 3.0})
        assert rep.f2prime_ok
        assert all(m >= 0.0 for _, _, _, m in rep.witnesses["f2prime"])

    def test_negative_profile_rejected(self):
        with pytest.raises(ValueError):
            check_profile_conditions(lambda r: -1.0, which="f2")


class TestFinitenessUnderConstraint:
    def test_no_divergence_flag_at_sharp_constant(self):
        # unit-energy profiles from every family stay finite for mt1/mt2
        g = make_grid(2000, "log", strength=40.0)
        funcs = [moser_function(MoserParams(j=j, n=2), g) for j in (8, 512)]
        funcs += [concentrating_function(e, 2, g)[0] for e in (1e-2, 1e-6)]
        funcs += [random_unit(g, 2, s) for s in range(3)]
        for kind in ("mt1", "mt2"):
            spec = FunctionalSpec(kind=kind, n=2, alpha=1.0)
            for u in funcs:
                fv = eval_functional(u, spec)
                assert not fv.diverged
                assert fv.value < 50.0

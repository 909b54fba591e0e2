import itertools
import math

import numpy as np
import pytest

from ineqlab import constants as C
from ineqlab import moments as Mo
from ineqlab.dirichlet import random_reversible_kernel
from ineqlab.finite_space import lr_norm, mean
from ineqlab.models import build_interchange
from ineqlab.util import AliasSampler, stream

from conftest import FAST_OPTS, bernoulli_product


class TestKappa:
    def test_values(self):
        assert Mo.kappa(0.0) == pytest.approx(2.5414940825, rel=1e-9)
        assert Mo.kappa(1.0) == pytest.approx(1.5819767069, rel=1e-9)

    def test_decreasing(self):
        grid = np.linspace(0.0, 3.0, 40)
        vals = [Mo.kappa(s) for s in grid]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_domain(self):
        with pytest.raises(ValueError):
            Mo.kappa(-0.1)


class TestRegime:
    def test_validation(self):
        with pytest.raises(ValueError):
            Mo.BecknerRegime(a=0.0, s=0.0)
        with pytest.raises(ValueError):
            Mo.BecknerRegime(a=1.0, s=-1.0)
        with pytest.raises(ValueError):
            Mo.BecknerRegime(a=1.0, s=0.0, p_floor=2.5)
        with pytest.warns(UserWarning):
            Mo.BecknerRegime(a=1.0, s=1.5)

    def test_restricted_range(self):
        reg = Mo.BecknerRegime(a=1.0, s=0.0, p_floor=1.25)
        assert reg.max_r == pytest.approx(5.0)
        reg.check_r(5.0)
        with pytest.raises(ValueError, match="p_floor"):
            reg.check_r(5.5)
        with pytest.raises(ValueError):
            reg.check_r(1.5)


class TestExactChecks:
    def test_constant_function_trivial(self, two_point):
        reg = Mo.BecknerRegime(a=1.0, s=0.0)
        rep = Mo.check_onesided_moments(two_point, [2.0, 2.0], reg, [2, 4])
        for lhs, rhs in rep.sides.values():
            assert all(abs(x) < 1e-15 for x in lhs)
            assert all(abs(x) < 1e-15 for x in rhs)

    def test_bernoulli_regime_margins(self):
        b = bernoulli_product(5)
        f = np.array([float(sum(s)) for s in b.space.labels])
        reg = Mo.BecknerRegime(a=1.0 / 6.0, s=0.0, provenance="product profile")
        one = Mo.check_onesided_moments(b.kernel, f, reg, list(range(2, 8)))
        two = Mo.check_twosided_moments(b.kernel, f, reg, list(range(2, 8)))
        assert one.min_margin >= -1e-10
        assert two.min_margin >= -1e-10

    def test_poincare_regime_random_f(self, two_point):
        lam = C.optimal_poincare(two_point).value
        reg = Mo.BecknerRegime(a=lam, s=1.0, provenance="spectral gap")
        rng = np.random.default_rng(3)
        for _ in range(5):
            f = rng.standard_normal(2) * 3.0
            rep = Mo.check_onesided_moments(two_point, f, reg, [2, 3, 5, 8])
            assert rep.min_margin >= -1e-10

    def test_weaker_variance_bound_never_violated(self):
        # at r=2, s=1, a=lambda the two-sided bound is Poincare weakened by
        # 4 kappa(1); both must hold
        k = random_reversible_kernel(5, seed=70, extra_edges=3)
        lam = C.optimal_poincare(k).value
        rng = np.random.default_rng(4)
        f = rng.standard_normal(5)
        reg = Mo.BecknerRegime(a=lam, s=1.0)
        rep = Mo.check_twosided_moments(k, f, reg, [2])
        var = lr_norm(k.space, f - mean(k.space, f), 2.0) ** 2
        from ineqlab.dirichlet import dirichlet_form
        assert var <= dirichlet_form(k, f, f) / lam + 1e-12   # sharp Poincare
        assert rep.min_margin >= -1e-12                        # weakened bound

    def test_monotone_in_r(self):
        b = bernoulli_product(4)
        f = np.array([float(sum(s)) for s in b.space.labels])
        reg = Mo.BecknerRegime(a=1.0 / 6.0, s=0.0)
        rep = Mo.check_onesided_moments(b.kernel, f, reg, [2, 3, 4, 6, 8])
        for lhs, rhs in rep.sides.values():
            assert all(a <= b2 + 1e-12 for a, b2 in zip(lhs, lhs[1:]))
            assert all(a <= b2 + 1e-12 for a, b2 in zip(rhs, rhs[1:]))

    def test_r_below_two_rejected(self, two_point):
        reg = Mo.BecknerRegime(a=1.0, s=0.0)
        with pytest.raises(ValueError):
            Mo.check_onesided_moments(two_point, [0.0, 1.0], reg, [1.5])


class TestSymmetricGroup:
    def test_single_coordinate_statistic(self):
        a = np.array([2.0, -1.0, 0.5, 3.0])
        rep = Mo.symmetric_group_moment_check(4, lambda s: a[s[0]], [2, 4, 8])
        assert rep.min_margin >= -1e-12

    def test_constant_equality_at_zero(self):
        rep = Mo.symmetric_group_moment_check(3, lambda s: 7.0, [2, 4])
        for lhs, rhs in rep.sides.values():
            assert all(abs(x) < 1e-14 for x in lhs + rhs)

    def test_hoeffding_n5(self):
        rng = stream(12, 0)
        a = rng.standard_normal((5, 5))
        f = Mo.hoeffding_statistic(a)
        rep = Mo.symmetric_group_moment_check(5, f, [2, 4, 8])
        assert rep.min_margin >= -1e-12

    def test_range(self):
        with pytest.raises(ValueError):
            Mo.symmetric_group_moment_check(7, lambda s: 0.0, [2])


class TestHoeffdingSupremum:
    def test_zero_matrix(self):
        hb = Mo.hoeffding_supremum_bound([np.zeros((4, 4))], r=3.0, n=4)
        assert hb.bound == 0.0
        assert hb.A == 0.0 and hb.B_r == 0.0

    def test_exact_ingredients_and_domination(self):
        rng = stream(21, 0)
        mats = [rng.standard_normal((4, 4)) for _ in range(3)]
        r = 4.0
        hb = Mo.hoeffding_supremum_bound(mats, r=r, n=4)
        assert hb.method == "exact"
        perms = list(itertools.permutations(range(4)))
        S = [max(math.sqrt(sum(m[k, p[k]] ** 2 for k in range(4))) for m in mats)
             for p in perms]
        Mx = [max(max(abs(m[k, p[k]]) for m in mats) for k in range(4))
              for p in perms]
        assert hb.A == pytest.approx(np.mean(S), rel=1e-12)
        assert hb.B_r == pytest.approx(np.mean(np.array(Mx) ** r) ** (1 / r),
                                       rel=1e-12)
        Z = np.array([max(sum(m[k, p[k]] for k in range(4)) for m in mats)
                      for p in perms])
        exact = (np.maximum(Z - Z.mean(), 0.0) ** r).mean() ** (1 / r)
        assert hb.bound >= exact
        assert hb.tail_threshold == pytest.approx(math.e * hb.bound)

    def test_monte_carlo_path_records_stderr(self):
        rng = stream(22, 0)
        mats = [rng.standard_normal((8, 8))]
        hb = Mo.hoeffding_supremum_bound(mats, r=2.0, n=8, samples=4000, seed=1)
        assert hb.method == "monte_carlo"
        assert hb.stderr_A > 0 and hb.sample_count == 4000

    def test_sampling_without_replacement_encoding(self):
        vectors = [np.array([1.0, -1.0, 2.0, -2.0, 0.0])]
        m = 3
        mats = Mo.sampling_without_replacement_matrices(vectors, m)
        sigma = (4, 2, 0, 1, 3)
        z_matrix = max(sum(a[k, sigma[k]] for k in range(5)) for a in mats)
        z_direct = max(sum(x[sigma[k]] for k in range(m)) for x in vectors)
        assert z_matrix == pytest.approx(z_direct)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            Mo.hoeffding_supremum_bound([], r=2.0, n=4)


class TestMonteCarloTails:
    def test_tail_compare_dominates(self):
        b = bernoulli_product(8)
        f = np.array([float(sum(s)) for s in b.space.labels])
        moment = Mo.glauber_tail_moment_bound(b.kernel, f, rho0=1.0)
        bound_fn = lambda t: Mo.chebyshev_tail_from_moments(
            t, moment, r_grid=np.linspace(2, 30, 29))
        rep = Mo.monte_carlo_tail_compare(b, f, bound_fn, t_grid=[0, 1, 2, 3, 4],
                                          samples=20_000, seed=5)
        assert rep.all_dominated
        assert rep.empirical[0] <= 1.0     # t = 0 row is report-only

    def test_hoeffding_tail_on_s5(self):
        inter = build_interchange(5)
        rng = stream(23, 0)
        a = rng.standard_normal((5, 5))
        f = Mo.hoeffding_statistic(a)

        def bound_fn(t):
            # smallest e^{2-r} whose threshold is below t
            best = 1.0
            for r in np.linspace(2.0, 20.0, 50):
                hb = Mo.hoeffding_supremum_bound([a], r=r, n=5)
                if hb.tail_threshold <= t:
                    best = min(best, math.exp(2.0 - r))
            return best

        rep = Mo.monte_carlo_tail_compare(inter, f, bound_fn,
                                          t_grid=[1.0, 2.0, 4.0],
                                          samples=20_000, seed=6)
        assert rep.all_dominated

    def test_sampler_stderr_scaling(self):
        # doubling the sample size shrinks the standard error like 1/sqrt(2)
        b = bernoulli_product(6)
        f = np.array([float(sum(s)) for s in b.space.labels])
        sampler = AliasSampler(b.space.mu)

        def se(n, seed):
            draws = f[sampler.sample(stream(seed, 0), n)]
            return draws.std(ddof=1) / math.sqrt(n)

        ratio = se(40_000, 1) / se(160_000, 2)
        assert 1.6 <= ratio <= 2.4

    def test_alias_sampler_distribution(self):
        probs = np.array([0.5, 0.25, 0.125, 0.125])
        s = AliasSampler(probs)
        draws = s.sample(stream(9, 9), 200_000)
        freq = np.bincount(draws, minlength=4) / 200_000
        np.testing.assert_allclose(freq, probs, atol=0.005)

    def test_chebyshev_helper(self):
        moment = lambda r: 2.0 * math.sqrt(r)
        vals = [Mo.chebyshev_tail_from_moments(t, moment, [2, 4, 8, 16])
                for t in (1.0, 5.0, 10.0, 20.0)]
        assert vals[0] == 1.0
        assert all(a >= b for a, b in zip(vals, vals[1:]))

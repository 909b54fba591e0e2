import itertools
import math

import numpy as np
import pytest

from ineqlab import constants as C
from ineqlab.dirichlet import (Kernel, ReducibleKernelError,
                               random_reversible_kernel)
from ineqlab.finite_space import FiniteSpace, uniform_space
from ineqlab.models import build_interchange, two_point_bundle

from conftest import FAST_OPTS


def product_of(kernel):
    """Independent two-fold product of a chain: labels are pairs, rates act
    on one factor at a time."""
    n = kernel.n_states
    mu = kernel.space.mu
    Q = kernel.rate_matrix()
    labels = [(a, b) for a in range(n) for b in range(n)]
    joint = np.array([mu[a] * mu[b] for a, b in labels])
    idx = {lab: k for k, lab in enumerate(labels)}
    triples = []
    for a, b in labels:
        for c in range(n):
            if Q[a, c] > 0:
                triples.append((idx[(a, b)], idx[(c, b)], Q[a, c]))
            if Q[b, c] > 0:
                triples.append((idx[(a, b)], idx[(a, c)], Q[b, c]))
    return Kernel(FiniteSpace(labels, joint), triples)


class TestPoincare:
    def test_two_point_gap(self, two_point):
        rep = C.optimal_poincare(two_point)
        assert rep.value == pytest.approx(2.0, abs=1e-12)
        assert np.ptp(rep.witness) > 0.1

    def test_two_point_grid_oracle(self, two_point):
        # the ratio over f = (0, t) is constantly 2
        for t in np.linspace(0.05, 1.0, 16):
            f = np.array([0.0, t])
            assert C.poincare_ratio(two_point, f) == pytest.approx(2.0, rel=1e-12)

    def test_tensorization(self):
        k = random_reversible_kernel(3, seed=7, extra_edges=1)
        lam = C.optimal_poincare(k).value
        lam2 = C.optimal_poincare(product_of(k)).value
        assert lam2 == pytest.approx(lam, rel=1e-10)

    def test_interchange_s4_lower_bound(self):
        k = build_interchange(4).kernel
        assert C.optimal_poincare(k).value >= (4 + 2) / (4 * 3) - 1e-8

    def test_reducible_raises(self):
        sp = uniform_space(4)
        k = Kernel(sp, [(0, 1, 1.0), (1, 0, 1.0), (2, 3, 1.0), (3, 2, 1.0)])
        with pytest.raises(ReducibleKernelError) as err:
            C.optimal_poincare(k)
        assert len(err.value.components) == 2

    def test_affine_invariance_of_ratio(self, two_point):
        f = np.array([0.3, 1.9])
        a = C.poincare_ratio(two_point, f)
        b = C.poincare_ratio(two_point, 4.0 * f - 11.0)
        assert a == pytest.approx(b, rel=1e-12)


class TestConversionConstants:
    def test_k_theta_near_one_limit(self):
        assert C.k_theta(1.001, (1.001 - 1.0) ** 2) > 0.98

    def test_k_theta_at_most_one(self):
        grid = np.geomspace(1e-6, 1 - 1e-6, 500)
        for p in (1.01, 1.2, 1.7, 2.0):
            assert np.max(C.k_theta(p, grid)) <= 1.0 + 1e-12

    def test_k_theta_reference_point(self):
        assert C.k_theta(1.2, 0.25 * (1.0 - 1.2) ** 2) > 0.0

    def test_k_theta_domain(self):
        with pytest.raises(ValueError):
            C.k_theta(1.0, 0.5)
        with pytest.raises(ValueError):
            C.k_theta(1.5, 1.0)

    def test_big_K_bounds(self):
        tc = C.big_K(1.2)
        assert 0.0 < tc.theta_opt < 1.0
        assert tc.K_p >= 1.0 - 1.0 / 1.2
        assert tc.K_p <= 0.18
        assert C.big_K(1.001).K_p >= 0.49
        assert C.big_K(1.999).K_p >= 0.49

    def test_big_K_floor(self):
        for p in np.linspace(1.01, 2.0, 25):
            tc = C.big_K(p)
            assert tc.K_p >= 0.17
            assert tc.K_p >= 1.0 - 1.0 / p


class TestMlsi:
    def test_two_point_sandwich(self, two_point):
        rho0 = C.optimal_mlsi(two_point, FAST_OPTS).value
        rho1 = C.optimal_lsi(two_point, FAST_OPTS).value
        lam = C.optimal_poincare(two_point).value
        assert 2.0 - 1e-6 <= rho0 <= 4.0 * rho1 * (1.0 + 1e-6)
        assert rho0 <= 2.0 * lam * (1.0 + 1e-9)

    def test_product_bernoulli_at_least_one(self):
        from conftest import bernoulli_product
        bundle = bernoulli_product(3)
        rho0 = C.optimal_mlsi(bundle.kernel, FAST_OPTS).value
        assert rho0 >= 1.0 - 1e-9

    def test_dominates_four_lsi(self, chain_family):
        for _, k in chain_family[:6]:
            rho0 = C.optimal_mlsi(k, FAST_OPTS).value
            rho1 = C.optimal_lsi(k, FAST_OPTS).value
            assert rho0 >= 4.0 * rho1 - C.default_slack(4.0 * rho1)

    def test_witness_positive_nonconstant(self, two_point):
        rep = C.optimal_mlsi(two_point, FAST_OPTS)
        assert np.all(rep.witness > 0)
        assert np.ptp(rep.witness) > 0


class TestLsi:
    def test_two_point_grid_oracle(self, two_point):
        # dense scan over rays g = (cos t, sin t); skip the numerically
        # constant direction (the constants are infima over non-constant g)
        from ineqlab.finite_space import entropy
        vals = []
        for t in np.linspace(1e-3, math.pi / 2 - 1e-3, 20001):
            g = np.array([math.cos(t), math.sin(t)])
            if entropy(two_point.space, g * g) > 1e-15:
                vals.append(C.lsi_ratio(two_point, g))
        grid_min = min(vals)
        est = C.optimal_lsi(two_point, FAST_OPTS).value
        assert est <= grid_min + 1e-6
        assert est == pytest.approx(grid_min, rel=2e-3)

    def test_below_poincare(self, chain_family):
        for _, k in chain_family[:6]:
            rho1 = C.optimal_lsi(k, FAST_OPTS).value
            lam = C.optimal_poincare(k).value
            assert rho1 <= lam + C.default_slack(lam)


class TestBecknerP:
    def test_p2_matches_poincare_exactly(self, chain_family):
        # spectral-gap agreement at p = 2 within 1e-6 relative
        for _, k in chain_family[:8]:
            lam = C.optimal_poincare(k).value
            a2 = C.optimal_beckner_p(k, 2.0, FAST_OPTS).value
            assert a2 == pytest.approx(lam, rel=1e-6)

    def test_poincare_route_lower_bound(self, chain_family):
        # alpha_p >= (1 - 1/p) rho0
        p = 1.5
        for _, k in chain_family[:6]:
            rho0 = C.optimal_mlsi(k, FAST_OPTS).value
            ap = C.optimal_beckner_p(k, p, FAST_OPTS).value
            rhs = (1.0 - 1.0 / p) * rho0
            assert ap >= rhs - C.default_slack(rhs)

    def test_small_p_extrapolation_hits_mlsi(self, chain_family):
        for _, k in chain_family[:5]:
            rho0 = C.optimal_mlsi(k, FAST_OPTS).value
            limit = C.mlsi_from_beckner_limit(k, FAST_OPTS)
            assert limit == pytest.approx(rho0, rel=0.05)

    def test_domain(self, two_point):
        with pytest.raises(ValueError):
            C.optimal_beckner_p(two_point, 1.0, FAST_OPTS)
        with pytest.raises(ValueError):
            C.optimal_beckner_p(two_point, 2.1, FAST_OPTS)


class TestBecknerQ:
    def test_q1_matches_poincare(self, chain_family):
        for _, k in chain_family[:6]:
            lam = C.optimal_poincare(k).value
            b1 = C.optimal_beckner_q(k, 1.0, FAST_OPTS).value
            assert b1 == pytest.approx(lam, rel=1e-6)

    def test_q_vs_lsi_and_p(self, chain_family):
        q = 1.5
        for _, k in chain_family[:5]:
            bq = C.optimal_beckner_q(k, q, FAST_OPTS).value
            rho1 = C.optimal_lsi(k, FAST_OPTS).value
            assert bq >= q * rho1 - C.default_slack(q * rho1)
            a = C.optimal_beckner_p(k, 2.0 / q, FAST_OPTS).value
            assert a >= bq - C.default_slack(bq)

    def test_domain(self, two_point):
        with pytest.raises(ValueError):
            C.optimal_beckner_q(two_point, 0.9, FAST_OPTS)
        with pytest.raises(ValueError):
            C.optimal_beckner_q(two_point, 2.0, FAST_OPTS)


class TestOptimizerContract:
    def test_monotone_refinement(self, two_point):
        k = random_reversible_kernel(4, seed=9, extra_edges=2)
        small = C.OptimizerOptions(seed=5, n_starts=6, max_iter=220)
        large = C.OptimizerOptions(seed=5, n_starts=24, max_iter=220)
        for fn in (C.optimal_mlsi, C.optimal_lsi):
            assert fn(k, large).value <= fn(k, small).value + 1e-12

    def test_rate_scaling_of_objectives(self):
        # the objective ratio is literally linear in Q at fixed test function
        k = random_reversible_kernel(4, seed=11, extra_edges=2)
        k3 = k.scaled(3.0)
        f = np.array([0.5, 1.5, 0.7, 2.0])
        assert C.mlsi_ratio(k3, f) == pytest.approx(3.0 * C.mlsi_ratio(k, f),
                                                    rel=1e-12)
        assert C.beckner_p_ratio(k3, f, 1.4) == pytest.approx(
            3.0 * C.beckner_p_ratio(k, f, 1.4), rel=1e-12)
        assert C.optimal_poincare(k3).value == pytest.approx(
            3.0 * C.optimal_poincare(k).value, rel=1e-12)

    def test_brute_force_grid_oracle_4_states(self):
        # optimizer value must not exceed the best ratio on a coarse 4-d grid
        k = random_reversible_kernel(4, seed=13, extra_edges=2)
        p = 1.5
        est = C.optimal_beckner_p(k, p, FAST_OPTS).value
        grid = (0.25, 0.5, 1.0, 2.0, 4.0)
        best = math.inf
        for f in itertools.product(grid, repeat=4):
            farr = np.array(f)
            if np.ptp(farr) == 0:
                continue
            best = min(best, C.beckner_p_ratio(k, farr, p))
        assert est <= best + 1e-9

    def test_report_fields(self, two_point):
        rep = C.optimal_mlsi(two_point, FAST_OPTS)
        assert rep.kind == "mlsi"
        assert rep.optimizer_iterations > 0
        assert rep.converged
        payload = rep.to_json()
        assert set(payload) >= {"kind", "value", "witness",
                                "optimizer_iterations", "gap_certificate"}


class TestVerification:
    def test_main_theorem_two_point(self, two_point):
        rep = C.verify_main_theorem(two_point, (1.05, 1.2, 1.5, 2.0), FAST_OPTS)
        assert rep.passed
        assert all(c.margin >= 0 for c in rep.checks)

    def test_main_theorem_random_chain(self):
        k = random_reversible_kernel(4, seed=17, extra_edges=2)
        rep = C.verify_main_theorem(k, (1.05, 1.2, 1.5, 2.0), FAST_OPTS)
        assert rep.passed

    def test_main_theorem_interchange_s4(self):
        k = build_interchange(4).kernel
        rep = C.verify_main_theorem(k, (1.05, 1.2, 1.5, 2.0), FAST_OPTS)
        assert rep.passed

    def test_diagram_two_point(self, two_point):
        rep = C.verify_implication_diagram(two_point, FAST_OPTS)
        assert rep.passed

    def test_diagram_bernoulli_02_flip(self):
        bundle = two_point_bundle(0.2)
        rep = C.verify_implication_diagram(bundle.kernel, FAST_OPTS)
        assert rep.passed

    def test_diagram_json_shape(self, two_point):
        rep = C.verify_implication_diagram(two_point, FAST_OPTS)
        data = rep.to_json()
        assert data["passed"] is True
        assert {"lambda", "rho0", "rho1", "alpha_p", "beta_q"} <= set(data["constants"])

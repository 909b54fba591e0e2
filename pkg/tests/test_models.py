import itertools
import math

import numpy as np
import pytest

from ineqlab import constants as C
from ineqlab import models as M
from ineqlab.dirichlet import (Kernel, ReducibleKernelError,
                               check_detailed_balance, dirichlet_form,
                               stationarity_residual)

from conftest import FAST_OPTS, bernoulli_product


class TestGlauber:
    def test_product_rates_are_marginals(self):
        spec = M.ProductSpec(alphabets=[[0, 1], [0, 1]],
                             marginals=[[0.3, 0.7], [0.5, 0.5]])
        b = M.build_glauber(spec)
        Q = b.kernel.rate_matrix()
        i00 = b.space.index_of((0, 0))
        i10 = b.space.index_of((1, 0))
        i01 = b.space.index_of((0, 1))
        assert Q[i00, i10] == pytest.approx(0.7)   # resample site 0 to 1
        assert Q[i00, i01] == pytest.approx(0.5)   # resample site 1 to 1
        assert check_detailed_balance(b.kernel) == []

    def test_product_predictions(self):
        b = bernoulli_product(2)
        kinds = {p.kind: p for p in b.predicted}
        assert kinds["mlsi"].value == 1.0
        assert kinds["beckner_p"].value == pytest.approx(1.0 / 6.0)

    def test_alpha_at_least_rho0_over_six(self):
        b = bernoulli_product(2)
        rho0 = C.optimal_mlsi(b.kernel, FAST_OPTS).value
        for p in (1.2, 1.7):
            ap = C.optimal_beckner_p(b.kernel, p, FAST_OPTS).value
            assert ap >= rho0 / 6.0 - C.default_slack(rho0 / 6.0)

    def test_disconnected_support_rejected(self):
        joint = {(0, 0): 0.5, (1, 1): 0.5}
        spec = M.ProductSpec(alphabets=[[0, 1], [0, 1]], joint=joint)
        with pytest.raises(ReducibleKernelError):
            M.build_glauber(spec)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            M.ProductSpec(alphabets=[[0, 1]], marginals=[[0.5, 0.5]],
                          joint={(0,): 1.0})
        with pytest.raises(ValueError):
            M.ProductSpec(alphabets=[[0, 1]], marginals=[[0.6, 0.6]])


class TestDobrushin:
    def test_product_measure(self):
        spec = M.ProductSpec(alphabets=[[0, 1], [0, 1]],
                             marginals=[[0.5, 0.5], [0.25, 0.75]])
        alpha, beta, preds = M.dobrushin_parameters(spec)
        assert alpha == pytest.approx(1.0, abs=1e-12)
        assert beta == pytest.approx(0.25, abs=1e-12)   # min marginal mass
        assert any(p.kind == "mlsi" for p in preds)

    def test_ising_independent(self):
        b = M.build_ising(np.zeros((2, 2)), np.zeros(2))
        spec = M.ProductSpec(alphabets=[[-1, 1]] * 2,
                             joint={s: float(m) for s, m in
                                    zip(b.space.labels, b.space.mu)})
        alpha, beta, _ = M.dobrushin_parameters(spec)
        assert alpha == pytest.approx(1.0, abs=1e-12)
        assert beta == pytest.approx(0.5, abs=1e-12)

    def test_rho0_prediction_holds(self):
        b = M.build_ising(np.array([[0.0, 0.2], [0.2, 0.0]]), np.array([0.1, -0.1]))
        spec = M.ProductSpec(alphabets=[[-1, 1]] * 2,
                             joint={s: float(m) for s, m in
                                    zip(b.space.labels, b.space.mu)})
        alpha, beta, preds = M.dobrushin_parameters(spec)
        bound = next(p for p in preds if p.kind == "mlsi").value
        assert bound == pytest.approx(alpha * alpha * beta)
        rho0 = C.optimal_mlsi(b.kernel, FAST_OPTS).value
        assert rho0 >= bound - C.default_slack(bound)
        rho1 = C.optimal_lsi(b.kernel, FAST_OPTS).value
        lsi_bound = next(p for p in preds if p.kind == "lsi").value
        assert rho1 >= lsi_bound - C.default_slack(lsi_bound)


class TestIsing:
    def test_two_spin_partition_function(self):
        t = 0.7
        b = M.build_ising([[0.0, t], [t, 0.0]], [0.0, 0.0])
        Z = 2.0 * math.exp(t) + 2.0 * math.exp(-t)
        assert b.space.mu[b.space.index_of((1, 1))] == pytest.approx(
            math.exp(t) / Z, rel=1e-12)
        assert b.space.mu[b.space.index_of((-1, 1))] == pytest.approx(
            math.exp(-t) / Z, rel=1e-12)

    def test_global_flip_symmetry_without_field(self):
        rng = np.random.default_rng(0)
        J = rng.uniform(-0.2, 0.2, (4, 4))
        J = (J + J.T) / 2.0
        np.fill_diagonal(J, 0.0)
        b = M.build_ising(J, np.zeros(4))
        for s in b.space.labels:
            flipped = tuple(-x for x in s)
            assert b.space.mu[b.space.index_of(s)] == pytest.approx(
                b.space.mu[b.space.index_of(flipped)], rel=1e-12)

    def test_zero_coupling_matches_product_glauber(self):
        h = np.array([0.4, -0.3])
        b = M.build_ising(np.zeros((2, 2)), h)
        # marginals P(e_i = 1) = e^{-h}/ (e^{-h} + e^{h})
        marg = [[math.exp(hi) / (2.0 * math.cosh(hi)),
                 math.exp(-hi) / (2.0 * math.cosh(hi))] for hi in h]
        g = M.build_glauber(M.ProductSpec(alphabets=[[-1, 1]] * 2, marginals=marg))
        assert b.space.labels == g.space.labels
        np.testing.assert_allclose(b.space.mu, g.space.mu, rtol=1e-12)
        np.testing.assert_allclose(b.kernel.rate_matrix(), g.kernel.rate_matrix(),
                                   rtol=1e-12)

    def test_alpha_bound_prediction(self):
        J = np.array([[0.0, 0.1, 0.05], [0.1, 0.0, 0.0], [0.05, 0.0, 0.0]])
        b = M.build_ising(J, np.zeros(3))
        alpha_pred = next(p for p in b.predicted if p.kind == "dobrushin_alpha")
        assert alpha_pred.value == pytest.approx(1.0 - 0.15)
        beta_pred = next(p for p in b.predicted if p.kind == "dobrushin_beta")
        assert not beta_pred.checkable   # unspecified universal constant

    def test_validation(self):
        with pytest.raises(ValueError):
            M.build_ising(np.zeros((2, 2)), np.zeros(3))
        with pytest.raises(ValueError):
            M.build_ising(np.array([[0.0, 1.0], [0.5, 0.0]]), np.zeros(2))
        with pytest.raises(ValueError):
            M.build_ising(np.zeros((21, 21)), np.zeros(21))


class TestHardcore:
    def test_star_partition_function(self):
        n, eta = 6, 0.1
        b = M.build_hardcore(n + 1, M.star_edges(n), eta)
        Z = eta + (1.0 + eta) ** n
        assert b.metadata["Z"] == pytest.approx(Z, rel=1e-12)
        center = (1,) + (0,) * n
        full = (0,) + (1,) * n
        assert b.space.mu[b.space.index_of(center)] == pytest.approx(eta / Z,
                                                                     rel=1e-12)
        assert b.space.mu[b.space.index_of(full)] == pytest.approx(
            eta ** n / Z, rel=1e-12)

    def test_edgeless_is_product(self):
        eta = 0.3
        b = M.build_hardcore(3, [], eta)
        q = eta / (1.0 + eta)
        g = bernoulli_product(3, q)
        np.testing.assert_allclose(np.sort(b.space.mu), np.sort(g.space.mu),
                                   rtol=1e-12)
        assert b.space.n_states == 8

    def test_conforti_prediction_attaches(self):
        b = M.build_hardcore(5, M.star_edges(4), 0.1)
        pred = next(p for p in b.predicted if p.kind == "mlsi")
        assert pred.value == pytest.approx(M.conforti_bound(0.1, 4))
        # no prediction when eta * Delta >= 1
        b2 = M.build_hardcore(5, M.star_edges(4), 0.3)
        assert not any(p.kind == "mlsi" for p in b2.predicted)

    def test_star_gap_analytics(self):
        gap = M.hardcore_star_gap(10, 1.0 / 20.0)
        want = 1.0 / (1.05 * math.log(20.0))
        assert gap.rho1_upper_eta_form == pytest.approx(want, rel=1e-12)
        assert gap.rho1_test_function_bound <= want
        # module-vs-analytic agreement is asserted inside the call
        assert gap.ent_module == pytest.approx(gap.ent_analytic, rel=1e-12)
        assert gap.energy_module == pytest.approx(gap.energy_analytic, rel=1e-12)

    def test_conforti_trend_independent_of_n(self):
        values = [M.conforti_bound(1.0 / (2 * n), n) for n in (4, 8, 12)]
        assert all(v >= 0.5 for v in values)          # limit value is 1/2
        assert values[0] >= values[1] >= values[2]
        assert abs(values[1] - values[2]) <= 0.1 * values[2]


class TestInterchange:
    def test_structure_n3(self):
        b = M.build_interchange(3)
        assert b.space.n_states == 6
        Q = b.kernel.rate_matrix()
        # each permutation reaches 3 transposed neighbors at rate 1/3
        assert np.allclose((Q > 0).sum(axis=1), 3)
        assert np.allclose(Q[Q > 0], 1.0 / 3.0)

    def test_predictions(self):
        b = M.build_interchange(4)
        kinds = {p.kind: p for p in b.predicted}
        assert kinds["mlsi"].value == pytest.approx(1.0 / 3.0)
        assert kinds["beckner_p"].per_p
        assert kinds["beckner_p"].at(2.0) == pytest.approx(0.5)
        assert kinds["poincare"].value == pytest.approx(0.5)

    def test_range(self):
        with pytest.raises(ValueError):
            M.build_interchange(7)


class TestMultislice:
    def test_smallest_slice_is_flip(self):
        b = M.build_multislice(2, [1, 1])
        assert b.space.n_states == 2
        Q = b.kernel.rate_matrix()
        assert Q[0, 1] == pytest.approx(1.0)

    def test_2_2_slice(self):
        b = M.build_multislice(4, [2, 2])
        assert b.space.n_states == 6
        assert check_detailed_balance(b.kernel) == []

    def test_projection_consistency(self):
        # lifting f through coordinate labels preserves the Dirichlet form
        n = 4
        ms = M.build_multislice(n, [2, 2])
        inter = M.build_interchange(n)
        word = (0, 0, 1, 1)
        rng = np.random.default_rng(1)
        f_slice = rng.standard_normal(ms.space.n_states)

        def lift(sigma):
            projected = tuple(word[sigma[i]] for i in range(n))
            return f_slice[ms.space.index_of(projected)]

        f_lift = np.array([lift(s) for s in inter.space.labels])
        e_slice = dirichlet_form(ms.kernel, f_slice, f_slice)
        e_lift = dirichlet_form(inter.kernel, f_lift, f_lift)
        assert e_lift == pytest.approx(e_slice, rel=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            M.build_multislice(4, [2, 1])


class TestZeroRange:
    def test_single_site_rejected(self):
        with pytest.raises(ValueError, match="no moves"):
            M.build_zero_range(3, 1, "linear", [1.0])

    def test_independent_walkers_measure(self):
        m, n = 4, 3
        b = M.build_zero_range(m, n, "linear", [1 / 3] * 3)
        assert b.space.n_states == math.comb(m + n - 1, n - 1)
        # multinomial(m; uniform) conditioned on the simplex = multinomial itself
        for x in b.space.labels:
            want = math.factorial(m) / np.prod([math.factorial(k) for k in x]) \
                / n ** m
            assert b.space.mu[b.space.index_of(x)] == pytest.approx(want, rel=1e-12)

    def test_stationarity(self):
        b = M.build_zero_range(4, 3, "linear", [0.5, 0.3, 0.2])
        assert stationarity_residual(b.kernel) < 1e-10

    def test_predictions(self):
        b = M.build_zero_range(4, 3, "linear", [1 / 3] * 3)
        assert b.metadata["delta"] == 1.0 and b.metadata["Delta"] == 1.0
        kinds = {p.kind: p for p in b.predicted}
        assert kinds["mlsi"].value == pytest.approx(0.5)
        assert kinds["beckner_p"].value == pytest.approx(1.0 / 12.0)

    def test_rate_table_validation(self):
        with pytest.raises(ValueError):
            M.build_zero_range(2, 2, [[0.5, 1.0, 2.0], [0.0, 1.0, 2.0]],
                               [0.5, 0.5])


class TestErg:
    def test_single_edge_graph_has_zero_delta(self):
        assert M.erg_graph_delta([0.4], [1]).delta == 0.0

    def test_cherry_example(self):
        rep = M.erg_graph_delta([0.2, 0.1], [1, 3])
        assert rep.delta == pytest.approx(0.3)
        alpha = next(p for p in rep.predicted if p.kind == "dobrushin_alpha")
        assert alpha.value == pytest.approx(0.7)

    def test_supercritical_no_prediction(self):
        rep = M.erg_graph_delta([0.2, 1.0], [1, 3])
        assert rep.delta >= 1.0
        assert rep.predicted == []

    def test_exact_small_erg_bundle(self):
        # 3 vertices, edges + triangle term
        b = M.build_erg([0.1, 0.05], [[[0, 1]], [[0, 1], [1, 2], [0, 2]]], 3)
        assert b.space.n_states == 8
        assert check_detailed_balance(b.kernel) == []


class TestMetropolis:
    def test_detailed_balance_and_normalization(self):
        from ineqlab.finite_space import FiniteSpace
        sp = FiniteSpace(["a", "b", "c"], [0.5, 0.3, 0.2])
        pairs = [(0, 1), (1, 2)]
        k = M.metropolis_kernel(sp, pairs, normalization=0.25)
        assert check_detailed_balance(k) == []
        Q = k.rate_matrix()
        assert Q[0, 1] == pytest.approx(0.25 * min(1.0, 0.3 / 0.5))
        assert Q[1, 0] == pytest.approx(0.25)

    def test_constants_scale_with_normalization(self):
        from ineqlab.finite_space import FiniteSpace
        sp = FiniteSpace(["a", "b", "c"], [0.5, 0.3, 0.2])
        pairs = [(0, 1), (1, 2), (0, 2)]
        lam1 = C.optimal_poincare(M.metropolis_kernel(sp, pairs, 1.0)).value
        lam2 = C.optimal_poincare(M.metropolis_kernel(sp, pairs, 2.0)).value
        assert lam2 == pytest.approx(2.0 * lam1, rel=1e-10)


class TestZooRegression:
    BUNDLES = [
        lambda: bernoulli_product(2),
        lambda: M.build_ising(np.array([[0.0, 0.15], [0.15, 0.0]]),
                              np.array([0.1, 0.0])),
        lambda: M.build_hardcore(5, M.star_edges(4), 0.1),
        lambda: M.build_interchange(4),
        lambda: M.build_multislice(4, [2, 2]),
        lambda: M.build_zero_range(3, 3, "linear", [1 / 3] * 3),
    ]

    @pytest.mark.parametrize("factory", BUNDLES)
    def test_all_detailed_balanced(self, factory):
        b = factory()
        assert check_detailed_balance(b.kernel) == []
        assert all(p.citation for p in b.predicted)

    @pytest.mark.parametrize("factory", BUNDLES)
    def test_predictions_respected(self, factory):
        b = factory()
        if b.space.n_states > 200:
            pytest.skip("optimizer regression limited to small bundles")
        rep = M.check_predictions(b, FAST_OPTS)
        assert rep.passed, [c.name for c in rep.checks if not c.passed]

    def test_bundle_serialization(self):
        b = M.build_interchange(3)
        payload = b.to_json()
        k2 = Kernel.from_json({"space": payload["space"], "rates": payload["rates"]})
        np.testing.assert_allclose(k2.rate_matrix(), b.kernel.rate_matrix())

    def test_model_from_json_round(self):
        spec = {"model": "zero_range",
                "params": {"m": 3, "n": 2, "rates": "linear", "p": [0.4, 0.6]}}
        b = M.model_from_json(spec)
        assert b.name == "zero_range"
        with pytest.raises(ValueError):
            M.model_from_json({"model": "nope"})

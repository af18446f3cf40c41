import json
import math
from statistics import NormalDist

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ggms import (
    AdjacencyGraph,
    FisherZ,
    LossSpec,
    OptimalUnbiased,
    SampleMatrix,
    edge_test,
    generate_model,
    make_config,
    make_procedure,
    sample_gaussian,
    select_fisher_z,
    select_ou,
    select_with_alpha,
)
from ggms.covariance import sample_partial_correlations
from ggms.oracle import oracle_decision
from ggms.covariance import sample_covariance


def fixture_sample(k, p=5, n=40):
    model = generate_model(p, "random", 0.35, seed=1000 + k, density=0.4)
    return sample_gaussian(model, n, seed=k)


samples = st.builds(fixture_sample, st.integers(0, 10_000), st.integers(3, 7), st.integers(12, 60))


class TestOptimalUnbiased:
    def test_alpha_form_equals_loss_form(self):
        for k in range(100):
            x = fixture_sample(k)
            g1 = select_with_alpha(x, 0.05)
            g2 = select_ou(x, LossSpec(0.95, 0.05))
            assert g1.edges.tobytes() == g2.edges.tobytes()

    def test_alpha_near_one_gives_complete_graph(self):
        x = sample_gaussian(generate_model(6, "empty"), 30, seed=3)
        assert select_ou(x, LossSpec(1e-12, 1.0)) == AdjacencyGraph.complete(6)

    def test_tiny_alpha_gives_empty_graph(self):
        x = sample_gaussian(generate_model(5, "empty"), 40, seed=4)
        r = sample_partial_correlations(x).values
        alpha = 1e-12
        assert np.abs(r[np.triu_indices(5, 1)]).max() < make_config(40, 5, alpha).threshold
        assert select_with_alpha(x, alpha) == AdjacencyGraph.empty(5)

    def test_deterministic_on_fixture(self, chain_sample):
        outs = {OptimalUnbiased.with_alpha(0.05).fit(chain_sample).to_edgelist() for _ in range(5)}
        assert len(outs) == 1

    def test_per_edge_decomposition(self, rng):
        # recompute every decision from r_ij and (n, p, alpha_ij) alone
        p, n = 6, 25
        a = rng.uniform(0.1, 2.0, (p, p))
        b = rng.uniform(0.1, 2.0, (p, p))
        losses = LossSpec((a + a.T) / 2, (b + b.T) / 2)
        alphas = losses.alpha_matrix(p)
        for k in range(20):
            x = fixture_sample(k, p, n)
            g = select_ou(x, losses).edges
            r = sample_partial_correlations(x).values
            for i in range(p):
                for j in range(i + 1, p):
                    assert g[i, j] == edge_test(r[i, j], make_config(n, p, alphas[i, j]))

    def test_agrees_with_conditional_oracle(self):
        n, alpha = 10, 0.05
        x = sample_gaussian(generate_model(3, "chain", 0.5), n, seed=17)
        g = select_with_alpha(x, alpha)
        s = sample_covariance(x).values
        for i, j in [(0, 1), (0, 2), (1, 2)]:
            assert int(g.edges[i, j]) == oracle_decision(s, n, alpha, (i, j))

    def test_empty_model_size(self):
        # null pairs reject at rate alpha (spot check, the acceptance suite runs the full grid)
        from ggms import estimate_risk

        rep = estimate_risk(generate_model(5, "empty"), OptimalUnbiased.with_alpha(0.05), 50, 20000,
                            LossSpec.from_alpha(0.05), seed=5)
        rate = np.array(rep.per_edge_rejection_rate)[np.triu_indices(5, 1)]
        assert np.all(np.abs(rate - 0.05) <= 0.007)

    def test_singular_raises(self):
        x = fixture_sample(1, 4, 20).values.copy()
        x[3] = 2 * x[0] - x[1]
        with pytest.raises(ValueError):
            select_with_alpha(SampleMatrix(x), 0.05)


class TestInvariances:
    @settings(max_examples=60, deadline=None)
    @given(samples, st.randoms(use_true_random=False))
    def test_label_equivariance(self, x, rnd):
        perm = list(range(x.p))
        rnd.shuffle(perm)
        g = select_with_alpha(x, 0.1)
        gp = select_with_alpha(SampleMatrix(x.values[perm]), 0.1)
        assert gp == g.permute(perm)

    @settings(max_examples=60, deadline=None)
    @given(samples, st.data())
    def test_scale_equivariance(self, x, data):
        scales = data.draw(st.lists(st.sampled_from([0.5, 2.0, 4.0, 0.125, 1024.0]), min_size=x.p, max_size=x.p))
        y = SampleMatrix(x.values * np.array(scales)[:, None])
        # power-of-two scales leave the floating point partials bitwise unchanged
        assert select_with_alpha(y, 0.1) == select_with_alpha(x, 0.1)

    @settings(max_examples=60, deadline=None)
    @given(samples, st.floats(0.001, 0.9), st.floats(0.001, 0.099))
    def test_monotone_in_alpha(self, x, a1, gap):
        g1 = select_with_alpha(x, a1).edges
        g2 = select_with_alpha(x, a1 + gap).edges
        assert np.all(g2[g1])

    @settings(max_examples=40, deadline=None)
    @given(samples)
    def test_output_symmetric_zero_diagonal(self, x):
        for proc in (OptimalUnbiased.with_alpha(0.2), FisherZ(0.2, "holm")):
            g = proc.select(x).edges
            assert np.array_equal(g, g.T) and not g.diagonal().any()


class TestFisherZ:
    def test_zero_partials_give_empty_graph(self):
        r = np.eye(4)[None]
        for c in ("none", "bonferroni", "holm"):
            assert not FisherZ(0.2, c).decide(r, 20).any()

    def test_threshold_formula(self):
        n, p, alpha = 40, 5, 0.05
        z = NormalDist().inv_cdf(1 - alpha / 2)
        t = math.tanh(z / math.sqrt(n - p - 1))
        r = np.eye(p)
        r[0, 1] = r[1, 0] = math.nextafter(t, 1) * 1.0000001
        r[2, 3] = r[3, 2] = t * 0.9999999
        g = FisherZ(alpha).decide(r[None], n)[0]
        assert g[0, 1] and not g[2, 3]

    def test_bonferroni_single_pair_equals_none(self):
        for k in range(50):
            x = fixture_sample(k, 2, 15)
            assert select_fisher_z(x, 0.1, "bonferroni") == select_fisher_z(x, 0.1, "none")

    def test_holm_contains_bonferroni(self):
        for k in range(200):
            x = fixture_sample(k, 6, 30)
            bon = select_fisher_z(x, 0.2, "bonferroni").edges
            holm = select_fisher_z(x, 0.2, "holm").edges
            assert np.all(holm[bon])

    def test_holm_step_down_by_hand(self):
        n, p, alpha = 30, 3, 0.1
        scale = math.sqrt(n - p - 1)
        crit = [-NormalDist().inv_cdf(alpha / m / 2) for m in (3, 2, 1)]
        # largest statistic passes alpha/3, second passes alpha/2 only, third passes nothing
        stats = [crit[0] + 0.1, crit[1] + 0.01, 0.1]
        r = np.eye(3)
        for (i, j), s in zip([(0, 1), (0, 2), (1, 2)], stats):
            r[i, j] = r[j, i] = math.tanh(s / scale)
        g = FisherZ(alpha, "holm").decide(r[None], n)[0]
        assert g[0, 1] and g[0, 2] and not g[1, 2]
        gb = FisherZ(alpha, "bonferroni").decide(r[None], n)[0]
        assert gb[0, 1] and not gb[0, 2]

    def test_holm_stops_at_first_failure(self):
        n, p, alpha = 30, 3, 0.1
        scale = math.sqrt(n - p - 1)
        c3 = -NormalDist().inv_cdf(alpha / 3 / 2)
        r = np.eye(3)
        # every statistic below the first Holm critical value: nothing rejected
        for (i, j) in [(0, 1), (0, 2), (1, 2)]:
            r[i, j] = r[j, i] = math.tanh((c3 - 0.05) / scale)
        assert not FisherZ(alpha, "holm").decide(r[None], n).any()

    def test_preconditions(self):
        with pytest.raises(ValueError):
            FisherZ(0.0)
        with pytest.raises(ValueError):
            FisherZ(0.1, "bh")
        with pytest.raises(ValueError):
            FisherZ(0.1).decide(np.eye(4)[None], 5)
        r = np.eye(3)
        r[0, 1] = r[1, 0] = 1.0
        with pytest.raises(ValueError):
            FisherZ(0.1).decide(r[None], 20)


class TestResultFormats:
    def test_json(self, chain_sample):
        res = OptimalUnbiased.with_alpha(0.05).fit(chain_sample)
        d = json.loads(res.to_json())
        assert d["p"] == 4 and d["n"] == 30
        assert [tuple(e) for e in d["edges"]] == [(i + 1, j + 1) for i, j in res.graph.edge_list()]
        assert np.allclose(np.array(d["alpha_matrix"])[np.triu_indices(4, 1)], 0.05)
        assert d["thresholds"][0][1] == make_config(30, 4, 0.05).threshold

    def test_dot(self, chain_sample):
        res = OptimalUnbiased.with_alpha(0.05).fit(chain_sample)
        text = res.to_dot()
        assert "graph G {" in text and text.rstrip().endswith("}")
        for i, j in res.graph.edge_list():
            assert f"{i + 1} -- {j + 1};" in text

    def test_edgelist_round_trip(self, chain_sample):
        res = OptimalUnbiased.with_alpha(0.3).fit(chain_sample)
        assert AdjacencyGraph.from_edgelist(res.to_edgelist(["x=1"])) == res.graph


class TestMakeProcedure:
    @pytest.mark.parametrize("name,cls", [("ou", OptimalUnbiased), ("fisher-z", FisherZ),
                                          ("fisher-z-holm", FisherZ), ("fisher-z-bonferroni", FisherZ)])
    def test_names(self, name, cls):
        proc = make_procedure(name, LossSpec.from_alpha(0.05))
        assert isinstance(proc, cls) and proc.describe()["procedure"] == name

    def test_fisher_level_from_losses(self):
        assert make_procedure("fisher-z", LossSpec(3.0, 1.0)).alpha == 0.25

    def test_unknown(self):
        with pytest.raises(KeyError):
            make_procedure("lasso", LossSpec.from_alpha(0.05))

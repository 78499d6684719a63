import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, strategies as st
from scipy import stats

from topicmodels import albu, dirichlet
from topicmodels.corpus import Corpus, Document, Vocabulary, build_corpus
from topicmodels.exceptions import ConfigError, DegenerateStateError
from topicmodels.simulator import SimSettings, generate_corpus

from .oracles import exact_phi, tiny_corpus

# Prior asimétrico: sin él el posterior exacto es simétrico en las etiquetas.
TINY_ALPHA = 0.5
TINY_BETA = [[1.0, 0.5, 0.1], [0.1, 0.5, 1.0]]

small_corpora = st.lists(
    st.lists(st.integers(0, 5), min_size=1, max_size=6), min_size=1, max_size=4,
).map(lambda docs: build_corpus([[f"t{i}" for i in doc] for doc in docs], 1))


def one_token_corpus():
    return Corpus(Vocabulary.from_tokens(['a']), (Document((0,)),))


def simulated_corpus():
    corpus, _ = generate_corpus(SimSettings(V=20, K_regular=2, topics_per_doc=1, doc_len=15, M=8,
                                            alpha_gen=0.5, beta_gen=0.5, seed=3))
    return corpus


class CancellationTests(SimpleTestCase):

    def setUp(self):
        self.corpus = tiny_corpus()
        self.state, self.branches = albu.initialize(self.corpus, albu.AlbuConfig(K=2))

    def test_initial_epoch_cancels_to_prior(self):
        np.testing.assert_array_equal(albu.cancel_alpha(self.state, self.branches, 0, 1), [0.1, 0.1])
        value, row_sum = albu.cancel_beta(self.state, self.branches, 1, 2, 1, 1)
        self.assertEqual(value, 0.1)
        self.assertAlmostEqual(row_sum, 0.3)

    def test_cancel_alpha_subtracts_last_increment(self):
        self.state.alpha_post[0] = [1.6, 0.5]
        self.branches.last_alpha_increment[0] = [0.9, 0.1]
        np.testing.assert_allclose(albu.cancel_alpha(self.state, self.branches, 0, 0), [0.7, 0.4])

    def test_cancel_then_readd_restores(self):
        self.state.alpha_post[0] = [1.6, 0.5]
        self.branches.last_alpha_increment[0] = [0.9, 0.1]
        cancelled = albu.cancel_alpha(self.state, self.branches, 0, 0)
        np.testing.assert_allclose(
            dirichlet.add_counts(cancelled, self.branches.last_alpha_increment[0]), [1.6, 0.5])

    def test_cancel_beta_stops_at_prior(self):
        self.state.beta_post[0] = [0.8, 0.1, 0.1]
        self.branches.last_beta_increment[0] = [0.7, 0.3]
        value, row_sum = albu.cancel_beta(self.state, self.branches, 0, 0, 0, 0)
        self.assertAlmostEqual(value, 0.1)
        self.assertAlmostEqual(row_sum, 0.3)

    def test_cancel_beta_row_sum_follows_subtraction(self):
        self.state.beta_post[1] = [2.0, 0.4, 0.6]
        self.branches.last_beta_increment[0] = [0.25, 0.75]
        value, row_sum = albu.cancel_beta(self.state, self.branches, 1, 0, 0, 0)
        self.assertAlmostEqual(value, 1.25)
        self.assertAlmostEqual(row_sum, 3.0 - 0.75)

    def test_cancel_beta_rejects_other_word(self):
        with self.assertRaises(ValueError):
            albu.cancel_beta(self.state, self.branches, 0, 1, 0, 0)

    def test_unknown_branch(self):
        with self.assertRaises(IndexError):
            albu.cancel_alpha(self.state, self.branches, 0, 2)


class MessageTests(SimpleTestCase):

    def test_z_prior_message(self):
        np.testing.assert_allclose(albu.z_prior_message([2, 1, 1]), [0.5, 0.25, 0.25])
        np.testing.assert_allclose(albu.z_prior_message([0.3, 0.3]), [0.5, 0.5])
        np.testing.assert_allclose(albu.z_prior_message([0.1, 0.3]), [0.25, 0.75])

    def test_topic_proportions(self):
        np.testing.assert_allclose(albu.topic_proportions([0.5, 0.5], [0.5, 0.25]), [2 / 3, 1 / 3])
        np.testing.assert_allclose(albu.topic_proportions([0.25] * 4, [0.1] * 4), [0.25] * 4)
        np.testing.assert_allclose(albu.topic_proportions([1.0, 0.0], [0.2, 0.9]), [1.0, 0.0])

    def test_vanishing_products(self):
        with self.assertRaises(DegenerateStateError):
            albu.topic_proportions([1.0, 0.0], [0.0, 0.5])


class UpdateTests(SimpleTestCase):

    def test_alpha_update_symmetric_branch(self):
        alpha, increments = albu.alpha_update([[0.5, 0.5]], [[0.1, 0.1]], [0.1, 0.1])
        np.testing.assert_allclose(alpha, [0.6, 0.6])
        np.testing.assert_allclose(increments, [[0.5, 0.5]])

    def test_alpha_update_scales_by_cancelled_alpha(self):
        alpha, increments = albu.alpha_update([[0.8, 0.2]], [[1.0, 3.0]], [0.1, 0.1])
        np.testing.assert_allclose(increments, [[0.8 / 1.4, 0.6 / 1.4]])
        np.testing.assert_allclose(alpha, [0.1 + 0.8 / 1.4, 0.1 + 0.6 / 1.4])
        self.assertAlmostEqual(alpha[0], 0.6714, places=4)
        self.assertAlmostEqual(alpha[1], 0.5286, places=4)

    def test_alpha_update_adds_one_per_branch(self):
        proportions = [[0.2, 0.8], [0.6, 0.4], [0.5, 0.5]]
        alpha, _ = albu.alpha_update(proportions, [[1.0, 2.0]] * 3, [0.1, 0.1])
        self.assertAlmostEqual(float(np.sum(alpha - 0.1)), 3.0)

    def test_alpha_update_over_documents(self):
        prior = np.full((2, 2), 0.1)
        alpha, _ = albu.alpha_update([[1.0, 0.0], [0.0, 1.0], [0.5, 0.5]], np.ones((3, 2)), prior,
                                     doc_ids=np.array([0, 0, 1]))
        np.testing.assert_allclose(alpha, [[1.1, 1.1], [0.6, 0.6]])

    def test_beta_update_single_branch(self):
        beta, _ = albu.beta_update(np.array([0]), [[0.7, 0.3]], np.full((2, 2), 0.1))
        np.testing.assert_allclose(beta[:, 0], [0.8, 0.4])
        np.testing.assert_allclose(beta[:, 1], [0.1, 0.1])

    def test_beta_update_hard_assignments(self):
        beta, _ = albu.beta_update(np.array([1, 1]), [[1.0, 0.0], [0.0, 1.0]], np.full((2, 3), 0.1))
        np.testing.assert_allclose(beta[:, 1], [1.1, 1.1])
        self.assertAlmostEqual(float(np.sum(beta - 0.1)), 2.0)


class EpochTests(SimpleTestCase):

    def test_symmetric_single_token(self):
        corpus = one_token_corpus()
        state, branches = albu.initialize(corpus, albu.AlbuConfig(K=2), initial_proportions=[[0.5, 0.5]])
        state = albu.run_epoch(corpus, state, branches)
        np.testing.assert_allclose(state.alpha_post, [[0.6, 0.6]])
        np.testing.assert_allclose(branches.last_alpha_increment, [[0.5, 0.5]])
        self.assertEqual(state.epoch, 1)

    def test_infinite_tolerance_runs_one_epoch(self):
        state = albu.fit(tiny_corpus(), albu.AlbuConfig(K=2, tol=math.inf))
        self.assertEqual(state.epoch, 1)
        self.assertTrue(state.converged)

    def test_epoch_cap(self):
        state = albu.fit(tiny_corpus(), albu.AlbuConfig(K=2, max_epochs=3, tol=0.0))
        self.assertEqual(state.epoch, 3)
        self.assertFalse(state.converged)

    def test_callback_sees_every_epoch(self):
        seen = []
        albu.fit(tiny_corpus(), albu.AlbuConfig(K=2, max_epochs=4, tol=0.0), callback=lambda s: seen.append(s.epoch))
        self.assertEqual(seen, [1, 2, 3, 4])

    @given(small_corpora, st.integers(2, 4), st.integers(0, 2 ** 16), st.integers(1, 3))
    def test_same_seed_is_bit_identical(self, corpus, K, seed, restarts):
        config = albu.AlbuConfig(K=K, max_epochs=5, seed=seed, restarts=restarts)
        first = albu.fit(corpus, config)
        second = albu.fit(corpus, config)
        np.testing.assert_array_equal(first.alpha_post, second.alpha_post)
        np.testing.assert_array_equal(first.beta_post, second.beta_post)
        self.assertEqual(first.epoch, second.epoch)

    @given(small_corpora, st.integers(0, 2 ** 16),
           st.integers(2, 4).flatmap(lambda K: st.tuples(st.just(K), st.permutations(range(K)))))
    def test_permuting_initial_topics_permutes_posterior(self, corpus, seed, case):
        K, order = case
        order = list(order)
        config = albu.AlbuConfig(K=K, max_epochs=5, tol=0.0, seed=seed)
        _, branches = albu.initialize(corpus, config)
        first = albu.fit(corpus, config, initial_proportions=branches.proportions)
        second = albu.fit(corpus, config, initial_proportions=branches.proportions[:, order])
        np.testing.assert_allclose(second.beta_post, first.beta_post[order], rtol=1e-7, atol=1e-10)
        np.testing.assert_allclose(second.alpha_post, first.alpha_post[:, order], rtol=1e-7, atol=1e-10)

    def test_bad_config(self):
        with self.assertRaises(ConfigError):
            albu.fit(tiny_corpus(), albu.AlbuConfig(K=1))
        with self.assertRaises(ConfigError):
            albu.fit(tiny_corpus(), albu.AlbuConfig(K=2, alpha=-0.1))
        with self.assertRaises(ConfigError):
            albu.fit(tiny_corpus(), albu.AlbuConfig(K=2, restarts=0))

    @given(small_corpora, st.integers(2, 4), st.sampled_from([0.1, 0.5, 1.0]),
           st.integers(0, 2 ** 16), st.integers(1, 4))
    def test_epoch_invariants(self, corpus, K, prior, seed, epochs):
        state, branches = albu.initialize(corpus, albu.AlbuConfig(K=K, alpha=prior, beta=prior, seed=seed))
        for _ in range(epochs):
            state = albu.run_epoch(corpus, state, branches)

        # Conservación de cuentas.
        np.testing.assert_allclose((state.alpha_post - state.prior_alpha).sum(axis=1), corpus.doc_lengths, rtol=1e-6)
        self.assertAlmostEqual(float((state.beta_post - state.prior_beta).sum()) / corpus.total_tokens, 1.0, places=6)

        # Proporciones en el símplex.
        self.assertTrue(np.all(branches.proportions >= 0))
        np.testing.assert_allclose(branches.proportions.sum(axis=1), 1.0, atol=1e-9)

        # Los incrementos de alpha' y beta' de cada rama son sus proporciones finales.
        np.testing.assert_allclose(branches.last_alpha_increment, branches.proportions, rtol=1e-9, atol=1e-12)
        np.testing.assert_allclose(branches.last_beta_increment, branches.proportions, rtol=1e-9, atol=1e-12)

        # Suelos de cancelación.
        for m, document in enumerate(corpus.documents):
            for n, v in enumerate(document.tokens):
                cancelled = albu.cancel_alpha(state, branches, m, n)
                self.assertTrue(np.all(cancelled >= state.prior_alpha[m] - 1e-9))
                for k in range(K):
                    value, _ = albu.cancel_beta(state, branches, k, v, m, n)
                    self.assertGreaterEqual(value, state.prior_beta[k, v] - 1e-9)


class RestartTests(SimpleTestCase):

    def candidates(self, corpus, config):
        return [albu.fit(corpus, config, initial_proportions=draw) for draw in albu.initial_draws(corpus, config)]

    def test_single_restart_starts_from_first_draw(self):
        corpus = simulated_corpus()
        config = albu.AlbuConfig(K=3, max_epochs=10, seed=5, restarts=1)
        expected = self.candidates(corpus, config)[0]
        np.testing.assert_array_equal(albu.fit(corpus, config).beta_post, expected.beta_post)

    def test_draws_differ_between_restarts(self):
        corpus = simulated_corpus()
        first, second = albu.initial_draws(corpus, albu.AlbuConfig(K=3, seed=5, restarts=2))
        self.assertEqual(first.shape, (corpus.total_tokens, 3))
        self.assertFalse(np.array_equal(first, second))

    def test_keeps_highest_log_likelihood(self):
        corpus = simulated_corpus()
        config = albu.AlbuConfig(K=3, max_epochs=10, seed=5, restarts=4)
        candidates = self.candidates(corpus, config)
        scores = [state.log_likelihood(corpus) for state in candidates]
        best = candidates[int(np.argmax(scores))]

        kept = albu.fit(corpus, config)
        np.testing.assert_array_equal(kept.beta_post, best.beta_post)
        np.testing.assert_array_equal(kept.alpha_post, best.alpha_post)
        self.assertEqual(kept.log_likelihood(corpus), max(scores))

    def test_callback_sees_only_the_kept_run(self):
        corpus = simulated_corpus()
        config = albu.AlbuConfig(K=3, max_epochs=4, tol=0.0, seed=5, restarts=3)
        seen = []
        kept = albu.fit(corpus, config, callback=seen.append)
        self.assertEqual([state.epoch for state in seen], [1, 2, 3, 4])
        np.testing.assert_array_equal(seen[-1].beta_post, kept.beta_post)


class TinyCorpusOracleTests(SimpleTestCase):

    def test_close_to_exact_posterior(self):
        corpus = tiny_corpus()
        prior_alpha = np.full((corpus.M, 2), TINY_ALPHA)
        prior_beta = np.array(TINY_BETA)
        exact = exact_phi(corpus, prior_alpha, prior_beta)

        config = albu.AlbuConfig(K=2, alpha=TINY_ALPHA, beta=TINY_BETA, max_epochs=500, tol=1e-12)
        state = albu.fit(corpus, config, initial_proportions=np.full((corpus.total_tokens, 2), 0.5))
        learnt = state.phi_means()

        uniform = np.full(corpus.V, 1.0 / corpus.V)
        for k in range(2):
            self.assertLess(dirichlet.kld(exact[k], learnt[k]), dirichlet.kld(exact[k], uniform))
            self.assertEqual(int(np.argmax(learnt[k])), int(np.argmax(exact[k])))


class ThetaMessageDiagnosticTests(SimpleTestCase):

    def test_two_topic_mass(self):
        grid = albu.exact_theta_message_diagnostic([2.0, 3.0], [0.3, 0.7])
        self.assertAlmostEqual(grid.mass('exact'), 1.0, delta=1e-3)
        self.assertAlmostEqual(grid.mass('approximate'), 1.0, delta=1e-3)

    def test_three_topic_mass(self):
        grid = albu.exact_theta_message_diagnostic([2.0, 2.0, 3.0], [0.2, 0.3, 0.5], resolution=150)
        self.assertAlmostEqual(grid.mass('exact'), 1.0, delta=1e-3)
        self.assertAlmostEqual(grid.mass('approximate'), 1.0, delta=1e-3)

    def test_symmetric_inputs_give_symmetric_density(self):
        grid = albu.exact_theta_message_diagnostic([2.0, 2.0], [0.5, 0.5], resolution=100)
        np.testing.assert_allclose(grid.exact, grid.exact[::-1], rtol=1e-9)

    def test_two_topics_reduce_to_beta_times_linear(self):
        a = np.array([1.5, 2.5])
        p = np.array([0.4, 0.6])
        grid = albu.exact_theta_message_diagnostic(a, p, resolution=50)
        t = grid.points[:, 0]
        expected = stats.beta.pdf(t, a[0], a[1]) * a.sum() * (p[0] * t + p[1] * (1 - t)) / (p @ a)
        np.testing.assert_allclose(grid.exact, expected, rtol=1e-9)

    def test_approximation_keeps_the_mean(self):
        grid = albu.exact_theta_message_diagnostic([2.0, 2.0, 3.0], [0.2, 0.3, 0.5], resolution=150)
        np.testing.assert_allclose(grid.mean('exact'), grid.mean('approximate'), atol=1e-3)

    def test_too_many_topics(self):
        with self.assertRaises(ConfigError):
            albu.exact_theta_message_diagnostic([1.0] * 4, [0.25] * 4)

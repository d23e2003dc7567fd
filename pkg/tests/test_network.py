import math

import numpy as np
import pytest

from beliefdialog.classifier.network import (
    BeliefDistribution,
    ModelParams,
    backward,
    cross_entropy,
    forward,
    forward_batch,
    init_params,
    lstm_cell,
    softmax,
)
from beliefdialog.errors import ConfigError, NumericError


def zero_params(vocab_size=4, embed_dim=3, hidden=2, n_labels=3) -> ModelParams:
    return ModelParams(
        embedding=np.zeros((vocab_size + 1, embed_dim)),
        lstm_W=np.zeros((embed_dim, 4 * hidden)),
        lstm_U=np.zeros((hidden, 4 * hidden)),
        lstm_b=np.zeros(4 * hidden),
        dense_W=np.zeros((hidden, n_labels)),
        dense_b=np.zeros(n_labels),
    )


def scalar_lstm_step(x, h_prev, c_prev, W, U, b, hidden):
    """Independent scalar recomputation of one step, no numpy vectorization."""
    def sig(v):
        return 1.0 / (1.0 + math.exp(-v))

    z = [sum(x[d] * W[d][k] for d in range(len(x)))
         + sum(h_prev[j] * U[j][k] for j in range(hidden))
         + b[k]
         for k in range(4 * hidden)]
    h, c = [], []
    for j in range(hidden):
        i_g = sig(z[j])
        f_g = sig(z[hidden + j])
        g_g = math.tanh(z[2 * hidden + j])
        o_g = sig(z[3 * hidden + j])
        c_j = f_g * c_prev[j] + i_g * g_g
        c.append(c_j)
        h.append(o_g * math.tanh(c_j))
    return h, c


class TestLstmCell:
    def test_zero_params_zero_state(self):
        params = zero_params()
        h, c = lstm_cell(np.ones(3), np.zeros(2), np.zeros(2), params)
        np.testing.assert_array_equal(h, np.zeros(2))
        np.testing.assert_array_equal(c, np.zeros(2))

    def test_zero_params_halves_cell(self):
        params = zero_params()
        c_prev = np.array([0.4, -1.2])
        h, c = lstm_cell(np.zeros(3), np.zeros(2), c_prev, params)
        np.testing.assert_allclose(c, 0.5 * c_prev, atol=1e-15)
        np.testing.assert_allclose(h, 0.5 * np.tanh(0.5 * c_prev), atol=1e-15)

    def test_matches_scalar_oracle(self):
        rng = np.random.default_rng(42)
        params = init_params(vocab_size=3, embed_dim=2, hidden_units=3, n_labels=3, rng=rng)
        x = rng.normal(size=2)
        h_prev = rng.normal(size=3)
        c_prev = rng.normal(size=3)
        h, c = lstm_cell(x, h_prev, c_prev, params)
        oh, oc = scalar_lstm_step(
            x.tolist(), h_prev.tolist(), c_prev.tolist(),
            params.lstm_W.tolist(), params.lstm_U.tolist(), params.lstm_b.tolist(), 3)
        np.testing.assert_allclose(h, oh, atol=1e-12)
        np.testing.assert_allclose(c, oc, atol=1e-12)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ConfigError):
            lstm_cell(np.zeros(5), np.zeros(2), np.zeros(2), zero_params())


class TestForward:
    def test_zero_params_uniform(self):
        probs, _ = forward(np.array([1, 2, 0, 3]), zero_params())
        np.testing.assert_allclose(probs, [1 / 3] * 3, atol=1e-15)

    def test_known_bias_logits(self):
        params = zero_params()
        params.dense_b = np.array([math.log(2.0), 0.0, 0.0])
        probs, _ = forward(np.array([0, 0]), params)
        np.testing.assert_allclose(probs, [0.5, 0.25, 0.25], atol=1e-12)

    def test_matches_independent_recomputation(self):
        # brute-force scalar pipeline: embed, step over time, dense, softmax
        rng = np.random.default_rng(7)
        params = init_params(vocab_size=6, embed_dim=3, hidden_units=4, n_labels=3, rng=rng)
        seq = [2, 0, 5, 6, 1]
        probs, _ = forward(np.array(seq), params)

        h = [0.0] * 4
        c = [0.0] * 4
        for index in seq:
            x = params.embedding[index].tolist()
            h, c = scalar_lstm_step(x, h, c, params.lstm_W.tolist(),
                                    params.lstm_U.tolist(), params.lstm_b.tolist(), 4)
        logits = [sum(h[j] * params.dense_W[j][k] for j in range(4)) + params.dense_b[k]
                  for k in range(3)]
        peak = max(logits)
        exp = [math.exp(v - peak) for v in logits]
        expected = [v / sum(exp) for v in exp]
        np.testing.assert_allclose(probs, expected, atol=1e-12)

    def test_softmax_distribution_invariants(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            params = init_params(5, 3, 4, 3, rng)
            probs, _ = forward(rng.integers(0, 6, size=8), params)
            assert abs(probs.sum() - 1.0) < 1e-9
            assert np.all(probs > 0) and np.all(probs < 1)

    def test_bias_shift_leaves_argmax(self):
        rng = np.random.default_rng(5)
        params = init_params(5, 3, 4, 3, rng)
        seq = rng.integers(0, 6, size=8)
        before, _ = forward(seq, params)
        params.dense_b = params.dense_b + 3.7
        after, _ = forward(seq, params)
        assert np.argmax(before) == np.argmax(after)

    def test_index_out_of_range_rejected(self):
        with pytest.raises(ConfigError):
            forward(np.array([99]), zero_params(vocab_size=4))

    def test_non_finite_propagates_as_numeric_error(self):
        params = zero_params()
        params.dense_W = np.full_like(params.dense_W, np.nan)
        params.lstm_b = np.full_like(params.lstm_b, 10.0)  # nonzero h
        with pytest.raises(NumericError):
            forward(np.array([1, 2]), params)

    def test_labelled_forward_returns_distribution(self):
        dist, _ = forward(np.array([0, 1]), zero_params(), labels=("x", "y", "z"))
        assert isinstance(dist, BeliefDistribution)
        assert dist.top_label == "x"  # uniform, lowest index wins


class TestCrossEntropy:
    def test_one_hot_is_zero(self):
        dist = BeliefDistribution(("a", "b", "c"), (1.0, 0.0, 0.0))
        assert cross_entropy(dist, "a") == 0.0

    def test_uniform_is_ln3(self):
        dist = BeliefDistribution(("a", "b", "c"), (1 / 3, 1 / 3, 1 / 3))
        assert abs(cross_entropy(dist, "b") - math.log(3)) < 1e-12

    def test_quarter_is_ln4(self):
        dist = BeliefDistribution(("a", "b", "c"), (0.5, 0.25, 0.25))
        assert abs(cross_entropy(dist, 1) - math.log(4)) < 1e-12

    def test_floor_keeps_loss_finite(self):
        dist = BeliefDistribution(("a", "b"), (1.0, 0.0))
        assert cross_entropy(dist, "b") == pytest.approx(-math.log(1e-12))


def finite_difference_check(params, x, y, tol=1e-4, step=1e-5):
    """Compare analytic gradients against central differences, componentwise.

    Relative error uses a 1e-6 denominator floor: the difference quotient
    itself carries ~1e-11 float64 rounding noise, so components far below
    the floor cannot be resolved relatively and are judged near the floor.
    """
    def loss_of():
        probs, _ = forward_batch(x, params)
        return float(-np.log(max(probs[0, y], 1e-12)))

    probs, cache = forward_batch(x, params)
    grads = backward(cache, np.array([y]), params)
    worst = 0.0
    for name, tensor in params.tensors().items():
        analytic = getattr(grads, name)
        it = np.nditer(tensor, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            original = tensor[idx]
            tensor[idx] = original + step
            up = loss_of()
            tensor[idx] = original - step
            down = loss_of()
            tensor[idx] = original
            fd = (up - down) / (2 * step)
            rel = abs(fd - analytic[idx]) / max(abs(fd), abs(analytic[idx]), 1e-6)
            worst = max(worst, rel)
            assert rel <= tol, f"{name}{idx}: analytic {analytic[idx]} vs fd {fd} (rel {rel:.2e})"
    return worst


class TestBackward:
    def test_dense_bias_gradient_closed_form(self):
        rng = np.random.default_rng(9)
        params = init_params(5, 3, 4, 3, rng)
        x = rng.integers(0, 6, size=(1, 7))
        probs, cache = forward_batch(x, params)
        grads = backward(cache, np.array([2]), params)
        expected = probs[0].copy()
        expected[2] -= 1.0
        np.testing.assert_allclose(grads.dense_b, expected, atol=1e-12)

    def test_saturated_one_hot_gives_zero_dense_gradient(self):
        params = zero_params()
        params.dense_b = np.array([1000.0, 0.0, 0.0])
        probs, cache = forward_batch(np.array([[0, 0]]), params)
        grads = backward(cache, np.array([0]), params)
        np.testing.assert_array_equal(grads.dense_b, np.zeros(3))

    def test_gradients_match_finite_differences(self):
        rng = np.random.default_rng(3)
        params = init_params(vocab_size=10, embed_dim=4, hidden_units=5, n_labels=3, rng=rng)
        x = rng.integers(0, 11, size=(1, 6))
        finite_difference_check(params, x, int(rng.integers(0, 3)))

    def test_gradient_with_dropout_mask(self):
        # the mask participates in both passes, so gradcheck still holds
        rng = np.random.default_rng(8)
        params = init_params(5, 3, 4, 3, rng)
        x = rng.integers(0, 6, size=(1, 5))
        mask = (rng.random((1, 4)) >= 0.5) / 0.5

        def loss_of():
            probs, _ = forward_batch(x, params, mask)
            return float(-np.log(max(probs[0, 1], 1e-12)))

        _, cache = forward_batch(x, params, mask)
        grads = backward(cache, np.array([1]), params)
        step = 1e-5
        for name, tensor in params.tensors().items():
            analytic = getattr(grads, name)
            it = np.nditer(tensor, flags=["multi_index"])
            for _ in it:
                idx = it.multi_index
                original = tensor[idx]
                tensor[idx] = original + step
                up = loss_of()
                tensor[idx] = original - step
                down = loss_of()
                tensor[idx] = original
                fd = (up - down) / (2 * step)
                assert abs(fd - analytic[idx]) / max(abs(fd), abs(analytic[idx]), 1e-6) <= 1e-4


class TestSoftmax:
    def test_rows_sum_to_one(self):
        rng = np.random.default_rng(0)
        rows = softmax(rng.normal(size=(20, 5)) * 10)
        np.testing.assert_allclose(rows.sum(axis=1), 1.0, atol=1e-9)

    def test_handles_large_logits(self):
        probs = softmax(np.array([1000.0, 999.0, 998.0]))
        assert np.isfinite(probs).all()
        assert abs(probs.sum() - 1.0) < 1e-12

import copy

import numpy as np
import pytest

from aeromine import ArrayConfiguration, OracleConstants, RandomKey, synthetic_evaluate
from aeromine import surrogate as sg
from aeromine.design_space import denormalize


def constant_dataset(n=5, value=3.0, dim=3, seed=0):
    rng = np.random.default_rng(seed)
    X = np.tile(rng.random(dim), (n, 1))
    return sg.Dataset(X, np.full(n, value))


def random_model(dim, seed):
    rng = np.random.default_rng(seed)
    return sg.SurrogateModel(
        w1=rng.normal(size=(dim, 4)), b1=rng.normal(size=4),
        w2=rng.normal(size=4), b2=float(rng.normal()),
        input_dim=dim, hidden_units=4,
        target_mean=float(rng.normal()), target_std=float(abs(rng.normal()) + 0.5),
        constant_target=False,
    )


def finite_difference(model, x, target, step=1e-5):
    out = {}
    for attr in ("w1", "b1", "w2", "b2"):
        base = getattr(model, attr)
        if attr == "b2":
            m = copy.deepcopy(model); m.b2 = base + step
            up = sg.row_squared_error(m, x, target)
            m = copy.deepcopy(model); m.b2 = base - step
            dn = sg.row_squared_error(m, x, target)
            out[attr] = np.array((up - dn) / (2 * step))
            continue
        grad = np.empty_like(base)
        for idx in np.ndindex(base.shape):
            m = copy.deepcopy(model)
            getattr(m, attr)[idx] = base[idx] + step
            up = sg.row_squared_error(m, x, target)
            m = copy.deepcopy(model)
            getattr(m, attr)[idx] = base[idx] - step
            dn = sg.row_squared_error(m, x, target)
            grad[idx] = (up - dn) / (2 * step)
        out[attr] = grad
    return out


class TestFit:
    def test_constant_dataset_interpolated(self):
        data = constant_dataset(value=3.0)
        model = sg.fit(data, sg.FitHyper(), RandomKey(1))
        assert model.constant_target
        assert sg.predict(model, data.inputs[0]) == pytest.approx(3.0, abs=1e-6)

    def test_bit_identical_refit(self):
        rng = np.random.default_rng(2)
        data = sg.Dataset(rng.random((20, 3)), rng.random(20))
        a = sg.fit(data, sg.FitHyper(), RandomKey(5))
        b = sg.fit(data, sg.FitHyper(), RandomKey(5))
        assert np.array_equal(a.w1, b.w1) and np.array_equal(a.b1, b.b1)
        assert np.array_equal(a.w2, b.w2) and a.b2 == b.b2
        assert a.final_loss == b.final_loss and a.epochs_run == b.epochs_run

    def test_holdout_rmse_on_synthetic_landscape(self, space, constants):
        def fitness_at(v):
            genome = denormalize(v, space)
            cfg = ArrayConfiguration((genome,), 0.25, (1.0,))
            return synthetic_evaluate(cfg, space, constants).fitness

        rng = np.random.default_rng(0)
        X = rng.random((80, 4))
        y = np.array([fitness_at(x) for x in X])
        model = sg.fit(sg.Dataset(X[:50], y[:50]), sg.FitHyper(), RandomKey(1))
        pred = np.array([sg.predict(model, x) for x in X[50:]])
        rmse = float(np.sqrt(np.mean((pred - y[50:]) ** 2)))
        assert rmse < 0.15 * (y.max() - y.min())

    def test_empty_dataset_rejected(self):
        with pytest.raises(sg.SurrogateError):
            sg.Dataset(np.empty((0, 3)), np.empty(0))

    def test_nonfinite_target_rejected(self):
        with pytest.raises(sg.SurrogateError):
            sg.Dataset(np.ones((2, 2)), np.array([1.0, np.nan]))


class TestPredict:
    def test_bias_only_model_is_constant(self):
        model = sg.SurrogateModel(
            w1=np.zeros((3, 4)), b1=np.zeros(4), w2=np.zeros(4), b2=0.0,
            input_dim=3, hidden_units=4,
            target_mean=2.0, target_std=1.0, constant_target=False)
        rng = np.random.default_rng(0)
        for _ in range(10):
            assert sg.predict(model, rng.random(3)) == 2.0

    def test_purity(self):
        model = random_model(3, 1)
        x = np.random.default_rng(2).random(3)
        assert sg.predict(model, x) == sg.predict(model, x)

    def test_dimension_mismatch(self):
        with pytest.raises(sg.SurrogateError):
            sg.predict(random_model(3, 1), np.zeros(4))

    def test_normalization_round_trip(self):
        model = random_model(3, 7)
        x = np.random.default_rng(3).random(3)
        raw = sg.predict(model, x)
        normalized = float(np.tanh(x @ model.w1 + model.b1) @ model.w2 + model.b2)
        assert raw == normalized * model.target_std + model.target_mean


class TestLoss:
    def test_exact_fit_zero(self):
        data = constant_dataset(value=3.0)
        model = sg.fit(data, sg.FitHyper(), RandomKey(1))
        assert sg.loss(model, data) == 0.0

    def test_constant_model_vs_pm_one_targets(self):
        # z-scored targets are {-1, +1}; predicting their mean gives MSE 1
        model = sg.SurrogateModel(
            w1=np.zeros((2, 3)), b1=np.zeros(3), w2=np.zeros(3), b2=0.0,
            input_dim=2, hidden_units=3,
            target_mean=0.0, target_std=1.0, constant_target=False)
        data = sg.Dataset(np.zeros((2, 2)), np.array([-1.0, 1.0]))
        assert sg.loss(model, data) == pytest.approx(1.0)

    def test_row_permutation_invariant(self):
        rng = np.random.default_rng(5)
        X, y = rng.random((10, 3)), rng.random(10)
        model = random_model(3, 9)
        perm = rng.permutation(10)
        a = sg.loss(model, sg.Dataset(X, y))
        b = sg.loss(model, sg.Dataset(X[perm], y[perm]))
        assert a == pytest.approx(b)


class TestGradient:
    def test_zero_error_row_has_zero_gradient(self):
        model = random_model(3, 11)
        x = np.random.default_rng(1).random(3)
        target = sg.predict(model, x)
        g = sg.gradient(model, x, target)
        for arr in g.values():
            assert np.allclose(arr, 0.0, atol=1e-12)

    def test_output_bias_gradient_formula(self):
        model = random_model(3, 13)
        x = np.random.default_rng(2).random(3)
        target = 0.3
        tn = (target - model.target_mean) / model.target_std
        pred_n = float(np.tanh(x @ model.w1 + model.b1) @ model.w2 + model.b2)
        g = sg.gradient(model, x, target)
        assert float(g["b2"]) == pytest.approx(2.0 * (pred_n - tn))

    @pytest.mark.parametrize("seed", range(10))
    def test_finite_difference_agreement(self, seed):
        rng = np.random.default_rng(seed)
        model = random_model(4, seed + 100)
        x = rng.random(4)
        target = float(rng.normal())
        analytic = sg.gradient(model, x, target)
        numeric = finite_difference(model, x, target)
        for attr in ("w1", "b1", "w2", "b2"):
            denom = np.maximum(np.abs(numeric[attr]), 1e-6)
            rel = np.abs(analytic[attr] - numeric[attr]) / denom
            assert np.max(rel) < 1e-4, attr


class TestTrainingDynamics:
    def test_best_loss_non_increasing(self):
        # recorded best loss at increasing epoch budgets never goes up
        rng = np.random.default_rng(8)
        data = sg.Dataset(rng.random((30, 3)), rng.random(30))
        losses = []
        for epochs in (100, 300, 1000):
            hyper = sg.FitHyper(epochs=epochs, early_stop_patience=min(50, epochs))
            losses.append(sg.fit(data, hyper, RandomKey(2)).final_loss)
        assert losses[0] >= losses[1] >= losses[2]

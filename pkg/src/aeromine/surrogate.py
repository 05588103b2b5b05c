"""Feed-forward surrogate of the design-to-power mapping.

One hidden tanh layer, linear output, trained by full-batch gradient
descent on mean squared error with z-scored targets.  Small on purpose:
archives hold at most a few hundred measured designs and the model is
refitted from scratch every mining iteration, so training must stay well
under a second.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import RandomKey, as_generator


class SurrogateError(ValueError):
    pass


@dataclass(frozen=True)
class FitHyper:
    hidden_units: int = 10
    learning_rate: float = 0.1
    epochs: int = 1000
    early_stop_patience: int = 50
    init_range: float = 0.5

    def __post_init__(self):
        if min(self.hidden_units, self.epochs, self.early_stop_patience) <= 0:
            raise SurrogateError("hyperparameters must be positive")
        if self.learning_rate <= 0 or self.init_range <= 0:
            raise SurrogateError("hyperparameters must be positive")
        if self.early_stop_patience > self.epochs:
            raise SurrogateError("patience must not exceed epochs")


@dataclass
class Dataset:
    inputs: np.ndarray    # (n, d), unit-interval coordinates
    targets: np.ndarray   # (n,), measured fitness in watts

    def __post_init__(self):
        self.inputs = np.atleast_2d(np.asarray(self.inputs, dtype=float))
        self.targets = np.asarray(self.targets, dtype=float).ravel()
        if self.inputs.shape[0] != self.targets.shape[0]:
            raise SurrogateError("inputs/targets length mismatch")
        if self.inputs.shape[0] == 0:
            raise SurrogateError("empty dataset")
        if not np.all(np.isfinite(self.targets)):
            raise SurrogateError("non-finite target")

    def __len__(self):
        return len(self.targets)


@dataclass
class SurrogateModel:
    w1: np.ndarray        # (d, h)
    b1: np.ndarray        # (h,)
    w2: np.ndarray        # (h,)
    b2: float
    input_dim: int
    hidden_units: int
    target_mean: float
    target_std: float
    constant_target: bool
    epochs_run: int = 0
    final_loss: float = 0.0


def _forward(model: SurrogateModel, X: np.ndarray):
    H = np.tanh(X @ model.w1 + model.b1)
    return H, H @ model.w2 + model.b2


def predict(model: SurrogateModel, x: np.ndarray) -> float:
    """Prediction in raw target units at one point."""
    x = np.asarray(x, dtype=float)
    if x.shape != (model.input_dim,):
        raise SurrogateError(f"input shape {x.shape} != ({model.input_dim},)")
    _, out = _forward(model, x[None, :])
    return float(out[0]) * model.target_std + model.target_mean


def predict_batch(model: SurrogateModel, X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model.input_dim:
        raise SurrogateError(f"input dim {X.shape[1]} != {model.input_dim}")
    _, out = _forward(model, X)
    return out * model.target_std + model.target_mean


def loss(model: SurrogateModel, data: Dataset) -> float:
    """Mean squared error in normalized target space."""
    if data.inputs.shape[1] != model.input_dim:
        raise SurrogateError("dimension mismatch")
    yn = (data.targets - model.target_mean) / model.target_std
    _, out = _forward(model, data.inputs)
    return float(np.mean((out - yn) ** 2))


def fit(data: Dataset, hyper: FitHyper = FitHyper(), stream: RandomKey | None = None) -> SurrogateModel:
    """Train from scratch; deterministic given (data, hyper, stream).

    Keeps the best-loss weights seen, and stops once the best loss fails to
    improve by 1e-9 for `early_stop_patience` consecutive epochs.
    """
    rng = as_generator(stream if stream is not None else RandomKey(0))
    X, y = data.inputs, data.targets
    n, d = X.shape
    h = hyper.hidden_units

    mean = float(np.mean(y))
    std = float(np.std(y))
    constant = std == 0.0
    if constant:
        std = 1.0
    yn = (y - mean) / std

    r = hyper.init_range
    model = SurrogateModel(
        w1=rng.uniform(-r, r, size=(d, h)),
        b1=rng.uniform(-r, r, size=h),
        w2=rng.uniform(-r, r, size=h),
        b2=float(rng.uniform(-r, r)),
        input_dim=d, hidden_units=h,
        target_mean=mean, target_std=std, constant_target=constant,
    )

    if constant:
        # z-scored targets are identically zero: a zero output layer is the
        # exact least-squares optimum, which GD would only approach
        model.w2 = np.zeros(h)
        model.b2 = 0.0
        model.epochs_run = 0
        model.final_loss = 0.0
        return model

    lr = hyper.learning_rate
    w1, b1, w2, b2 = model.w1, model.b1, model.w2, model.b2
    best = None
    best_loss = np.inf
    stall = 0
    epoch = 0
    for epoch in range(1, hyper.epochs + 1):
        H = np.tanh(X @ w1 + b1)
        err = H @ w2 + b2 - yn
        cur = float(err @ err) / n
        if cur < best_loss - 1e-9:
            best_loss = cur
            best = (w1.copy(), b1.copy(), w2.copy(), b2)
            stall = 0
        else:
            stall += 1
            if stall >= hyper.early_stop_patience:
                break
        dout = err * (2.0 / n)
        dH = dout[:, None] * (w2 * (1.0 - H * H))
        w1 = w1 - lr * (X.T @ dH)
        b1 = b1 - lr * dH.sum(axis=0)
        w2 = w2 - lr * (H.T @ dout)
        b2 = b2 - lr * float(dout.sum())

    if best is not None:
        model.w1, model.b1, model.w2, model.b2 = best
    else:
        model.w1, model.b1, model.w2, model.b2 = w1, b1, w2, b2
        best_loss = float(np.mean((_forward(model, X)[1] - yn) ** 2))
    model.epochs_run = epoch
    model.final_loss = best_loss
    return model


def gradient(model: SurrogateModel, x: np.ndarray, target: float) -> dict[str, np.ndarray]:
    """Analytic gradient of the single-row squared error, in normalized target space."""
    x = np.asarray(x, dtype=float)
    if x.shape != (model.input_dim,):
        raise SurrogateError(f"input shape {x.shape} != ({model.input_dim},)")
    tn = (target - model.target_mean) / model.target_std
    a = x @ model.w1 + model.b1
    H = np.tanh(a)
    out = float(H @ model.w2 + model.b2)
    dout = 2.0 * (out - tn)
    dH = dout * model.w2 * (1.0 - H ** 2)
    return {
        "w1": np.outer(x, dH),
        "b1": dH,
        "w2": dout * H,
        "b2": np.array(dout),
    }


def row_squared_error(model: SurrogateModel, x: np.ndarray, target: float) -> float:
    """The quantity gradient() differentiates; used by the finite-difference check."""
    tn = (target - model.target_mean) / model.target_std
    _, out = _forward(model, np.asarray(x, dtype=float)[None, :])
    return float((out[0] - tn) ** 2)


def diagnostics(model: SurrogateModel, data: Dataset) -> dict:
    """Predicted-vs-measured pairs plus training metadata, for the service."""
    preds = predict_batch(model, data.inputs)
    return {
        "epochs_run": model.epochs_run,
        "final_loss": model.final_loss,
        "target_mean": model.target_mean,
        "target_std": model.target_std,
        "constant_target": model.constant_target,
        "pairs": [
            {"predicted": float(p), "measured": float(t)}
            for p, t in zip(preds, data.targets)
        ],
    }

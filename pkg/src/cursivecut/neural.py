"""From-scratch MLP and RBF networks, their ensemble, and fit metrics.

Both members are single-hidden-layer feed-forward networks scoring a cut's
feature vector in [0, 1]; the ensemble prediction is their plain arithmetic
mean and a cut is valid when the mean clears the threshold.  The MLP trains
by online backpropagation with momentum; the RBF picks centers by k-means
and solves its output layer in closed form.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np


class ModelError(ValueError):
    """Unreadable or structurally invalid model file."""


@dataclass
class TrainConfig:
    learning_rate: float = 0.1
    momentum: float = 0.9
    max_epochs: int = 2000
    target_mse: float = 0.01
    rng_seed: int = 0
    hidden: int = 16
    rbf_centers: int = 20
    rbf_ridge: float = 1e-6

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not (0.0 <= self.momentum < 1.0):
            raise ValueError("momentum must be in [0, 1)")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")
        if self.hidden < 1 or self.rbf_centers < 1:
            raise ValueError("layer sizes must be positive")


@dataclass
class TrainLog:
    """Per-epoch MSE trace plus the final value."""

    epoch_mse: list[float] = field(default_factory=list)

    @property
    def final_mse(self) -> float:
        return self.epoch_mse[-1] if self.epoch_mse else math.nan


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


@dataclass
class MlpModel:
    """input -> sigmoid hidden layer -> sigmoid output unit."""

    w1: np.ndarray  # (hidden, input_dim)
    b1: np.ndarray  # (hidden,)
    w2: np.ndarray  # (1, hidden)
    b2: np.ndarray  # (1,)

    @property
    def layer_sizes(self) -> list[int]:
        return [self.w1.shape[1], self.w1.shape[0], 1]

    @property
    def input_dim(self) -> int:
        return self.w1.shape[1]


def mlp_init(input_dim: int, hidden: int, rng: np.random.Generator) -> MlpModel:
    """Random weights uniform in [-0.5, 0.5]."""
    return MlpModel(
        w1=rng.uniform(-0.5, 0.5, (hidden, input_dim)),
        b1=rng.uniform(-0.5, 0.5, hidden),
        w2=rng.uniform(-0.5, 0.5, (1, hidden)),
        b2=rng.uniform(-0.5, 0.5, 1),
    )


def _check_dim(model, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.input_dim,):
        raise ValueError(f"feature vector has shape {x.shape}, expected ({model.input_dim},)")
    return x


def mlp_forward(m: MlpModel, x) -> float:
    x = _check_dim(m, x)
    a1 = _sigmoid(m.w1 @ x + m.b1)
    return float(_sigmoid(m.w2 @ a1 + m.b2)[0])


def mlp_gradients(m: MlpModel, x, target: float):
    """Squared-error loss and its gradients for one sample.

    loss = (out - target)^2; returns (loss, dw1, db1, dw2, db2).
    """
    x = _check_dim(m, x)
    a1 = _sigmoid(m.w1 @ x + m.b1)
    out = _sigmoid(m.w2 @ a1 + m.b2)
    err = out[0] - target
    delta2 = np.array([2.0 * err * out[0] * (1.0 - out[0])])
    dw2 = np.outer(delta2, a1)
    db2 = delta2
    delta1 = (m.w2.T @ delta2) * a1 * (1.0 - a1)
    dw1 = np.outer(delta1, x)
    db1 = delta1
    return err * err, dw1, db1, dw2, db2


def mlp_train(X, y, cfg: TrainConfig) -> tuple[MlpModel, TrainLog]:
    """Online backpropagation with momentum; stops at target_mse or max_epochs.

    Weights start uniform in [-0.5, 0.5] from cfg.rng_seed; samples are
    visited in their given order each epoch, so a seed and a data set fix the
    whole trajectory.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("training data must be a nonempty (n, dim) array")
    if y.shape != (X.shape[0],):
        raise ValueError("labels must be one value per row")
    rng = np.random.default_rng(cfg.rng_seed)
    m = mlp_init(X.shape[1], cfg.hidden, rng)
    vel = [np.zeros_like(p) for p in (m.w1, m.b1, m.w2, m.b2)]
    log = TrainLog()
    for _ in range(cfg.max_epochs):
        total = 0.0
        for xi, ti in zip(X, y):
            loss, *grads = mlp_gradients(m, xi, ti)
            total += loss
            params = (m.w1, m.b1, m.w2, m.b2)
            for v, p, g in zip(vel, params, grads):
                v *= cfg.momentum
                v -= cfg.learning_rate * g
                p += v
        log.epoch_mse.append(total / X.shape[0])
        if log.epoch_mse[-1] <= cfg.target_mse:
            break
    return m, log


@dataclass
class RbfModel:
    """Gaussian kernel layer with a linear read-out, clamped to [0, 1]."""

    centers: np.ndarray  # (k, input_dim)
    widths: np.ndarray  # (k,) all positive
    output_weights: np.ndarray  # (k,)
    bias: float

    @property
    def input_dim(self) -> int:
        return self.centers.shape[1]


def _kernel_activations(m: RbfModel, x: np.ndarray) -> np.ndarray:
    d2 = ((m.centers - x) ** 2).sum(axis=1)
    return np.exp(-d2 / (2.0 * m.widths**2))


def rbf_forward(m: RbfModel, x) -> float:
    x = _check_dim(m, x)
    raw = float(_kernel_activations(m, x) @ m.output_weights + m.bias)
    return min(max(raw, 0.0), 1.0)


def _kmeans(X: np.ndarray, k: int, rng: np.random.Generator, iters: int = 50) -> np.ndarray:
    n = X.shape[0]
    centers = X[rng.choice(n, size=k, replace=False)].copy()
    assign = np.full(n, -1)
    for _ in range(iters):
        d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_assign = d2.argmin(axis=1)
        for j in range(k):
            members = new_assign == j
            if members.any():
                centers[j] = X[members].mean(axis=0)
            else:
                # re-seat an empty cluster on the worst-served point
                centers[j] = X[d2.min(axis=1).argmax()]
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
    return centers


def _center_widths(centers: np.ndarray) -> np.ndarray:
    k = centers.shape[0]
    if k == 1:
        return np.ones(1)
    d = np.sqrt(((centers[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2))
    np.fill_diagonal(d, np.inf)
    d.sort(axis=1)
    widths = d[:, : min(2, k - 1)].mean(axis=1)
    widths[widths <= 0] = 1.0
    return widths


def rbf_train(X, y, cfg: TrainConfig) -> tuple[RbfModel, TrainLog]:
    """Centers by seeded k-means, widths by neighbor spacing, ridge read-out.

    The ridge penalty applies to the kernel weights only; the bias stays
    free, so a degenerate one-point data set yields a constant model.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("training data must be a nonempty (n, dim) array")
    if y.shape != (X.shape[0],):
        raise ValueError("labels must be one value per row")
    if cfg.rbf_centers > X.shape[0]:
        raise ValueError(f"rbf_centers={cfg.rbf_centers} exceeds {X.shape[0]} data rows")
    rng = np.random.default_rng(cfg.rng_seed)
    centers = _kmeans(X, cfg.rbf_centers, rng)
    widths = _center_widths(centers)

    d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    phi = np.exp(-d2 / (2.0 * widths**2))
    design = np.hstack([phi, np.ones((X.shape[0], 1))])
    penalty = np.eye(cfg.rbf_centers + 1) * cfg.rbf_ridge
    penalty[-1, -1] = 0.0
    gram = design.T @ design + penalty
    try:
        theta = np.linalg.solve(gram, design.T @ y)
    except np.linalg.LinAlgError:
        theta = np.linalg.lstsq(gram, design.T @ y, rcond=None)[0]

    model = RbfModel(
        centers=centers,
        widths=widths,
        output_weights=theta[:-1],
        bias=float(theta[-1]),
    )
    log = TrainLog()
    preds = np.clip(design @ theta, 0.0, 1.0)
    log.epoch_mse.append(float(((preds - y) ** 2).mean()))
    return model, log


@dataclass
class EnsembleModel:
    mlp: MlpModel
    rbf: RbfModel
    threshold: float = 0.5


def ensemble_predict(e: EnsembleModel, x) -> float:
    return (mlp_forward(e.mlp, x) + rbf_forward(e.rbf, x)) / 2.0


def classify_cut(e: EnsembleModel, x) -> str:
    """'valid' iff the ensemble score reaches the threshold (ties valid)."""
    return "valid" if ensemble_predict(e, x) >= e.threshold else "invalid"


def rmse(y, x) -> float:
    """sqrt(mean squared difference) between attained y and target x."""
    y = np.asarray(y, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if y.shape != x.shape or y.ndim != 1:
        raise ValueError("series must be 1-D and equally long")
    if y.size == 0:
        raise ValueError("series must be nonempty")
    return float(np.sqrt(((y - x) ** 2).mean()))


def corr_r(y, x) -> float:
    """Pearson correlation between attained and target series."""
    y = np.asarray(y, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if y.shape != x.shape or y.ndim != 1 or y.size < 2:
        raise ValueError("series must be 1-D, equally long, length >= 2")
    dx = x - x.mean()
    dy = y - y.mean()
    denom = math.sqrt(float((dx**2).sum()) * float((dy**2).sum()))
    if denom == 0.0:
        raise ValueError("correlation undefined for a constant series")
    return float((dx * dy).sum() / denom)


def scatter_index(y, x) -> float:
    """RMSE normalized by the target mean."""
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0 or x.mean() == 0.0:
        raise ValueError("scatter index undefined when the target mean is zero")
    return rmse(y, x) / float(x.mean())


FORMAT_VERSION = 1


def _emit_json(obj, indent: int = 0) -> str:
    """JSON with floats printed at 17 significant digits (lossless)."""
    pad = " " * indent
    if isinstance(obj, dict):
        items = ",\n".join(
            f'{pad}  {json.dumps(k)}: {_emit_json(v, indent + 2).lstrip()}'
            for k, v in obj.items()
        )
        return f"{pad}{{\n{items}\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        items = ",\n".join(_emit_json(v, indent + 2) for v in obj)
        return f"{pad}[\n{items}\n{pad}]"
    if isinstance(obj, bool):
        return pad + ("true" if obj else "false")
    if isinstance(obj, float):
        return pad + format(obj, ".17g")
    if isinstance(obj, int):
        return pad + str(obj)
    return pad + json.dumps(obj)


def save_model(model: EnsembleModel, path) -> None:
    doc = {
        "format_version": FORMAT_VERSION,
        "mlp": {
            "layer_sizes": model.mlp.layer_sizes,
            "weights": [model.mlp.w1.tolist(), model.mlp.w2.tolist()],
            "biases": [model.mlp.b1.tolist(), model.mlp.b2.tolist()],
        },
        "rbf": {
            "centers": model.rbf.centers.tolist(),
            "widths": model.rbf.widths.tolist(),
            "output_weights": model.rbf.output_weights.tolist(),
            "bias": model.rbf.bias,
        },
        "threshold": model.threshold,
    }
    with open(path, "w", encoding="ascii") as fh:
        fh.write(_emit_json(doc))
        fh.write("\n")


def load_model(path) -> EnsembleModel:
    try:
        with open(path, encoding="ascii") as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelError(f"corrupt model file {path}: {exc}") from exc
    try:
        if doc["format_version"] != FORMAT_VERSION:
            raise ModelError(f"unsupported model format_version {doc['format_version']}")
        mlp = MlpModel(
            w1=np.asarray(doc["mlp"]["weights"][0], dtype=np.float64),
            b1=np.asarray(doc["mlp"]["biases"][0], dtype=np.float64),
            w2=np.asarray(doc["mlp"]["weights"][1], dtype=np.float64),
            b2=np.asarray(doc["mlp"]["biases"][1], dtype=np.float64),
        )
        rbf = RbfModel(
            centers=np.asarray(doc["rbf"]["centers"], dtype=np.float64),
            widths=np.asarray(doc["rbf"]["widths"], dtype=np.float64),
            output_weights=np.asarray(doc["rbf"]["output_weights"], dtype=np.float64),
            bias=float(doc["rbf"]["bias"]),
        )
        threshold = float(doc["threshold"])
    except (KeyError, IndexError, TypeError) as exc:
        raise ModelError(f"corrupt model file {path}: missing {exc}") from exc
    if (rbf.widths <= 0).any():
        raise ModelError(f"corrupt model file {path}: non-positive RBF width")
    return EnsembleModel(mlp=mlp, rbf=rbf, threshold=threshold)


@dataclass
class EnsembleReport:
    """Training traces plus final fit metrics for train and held-out data."""

    mlp: TrainLog
    rbf: TrainLog
    train: dict
    test: dict | None = None


def _fit_metrics(model: EnsembleModel, X, y) -> dict:
    preds = np.array([ensemble_predict(model, xi) for xi in X])
    y = np.asarray(y, dtype=np.float64)
    out = {"rmse": rmse(preds, y)}
    try:
        out["r"] = corr_r(preds, y)
    except ValueError:
        out["r"] = None
    try:
        out["si"] = scatter_index(preds, y)
    except ValueError:
        out["si"] = None
    return out


def train_ensemble(X, y, cfg: TrainConfig, X_test=None, y_test=None):
    """Train both members on the same rows; report ensemble fit metrics.

    Returns (EnsembleModel, EnsembleReport).
    """
    mlp, mlp_log = mlp_train(X, y, cfg)
    rbf, rbf_log = rbf_train(X, y, cfg)
    model = EnsembleModel(mlp=mlp, rbf=rbf)
    report = EnsembleReport(mlp=mlp_log, rbf=rbf_log, train=_fit_metrics(model, X, y))
    if X_test is not None and len(X_test):
        report.test = _fit_metrics(model, X_test, y_test)
    return model, report

"""A trainable window-attention classifier with symmetry channels.

Forward pass, for a window x of shape (k, d):

    q = x w_q,  k = x w_k,  v = x w_v
    y = attention output of the selected variant
    pooled = column mean of y over the k window rows
    logits = pooled w_out

Variants share identical weight shapes so comparisons are parameter-matched:

    baseline  plain attention, ignores the projectors
    pre       per-channel attention on projected q/k/v, summed
    post      plain attention (its channel split is a post-hoc projection of
              the output, so training is identical to baseline)

Gradients are computed by hand. The only nonlinearity is the row softmax,
whose Jacobian is applied in closed form; everything else is linear algebra.
Mean pooling keeps the logits invariant under the group action for every
variant, which is checked in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .attention import equivariance_report
from .irreps import ProjectorSet
from .numerics import Matrix, Rng, as_matrix, rand_matrix, softmax_rows, softmax_rows_vjp

VARIANTS = ("baseline", "pre", "post")


def _sigmoid(z: float) -> float:
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def loss_bce(logits, label: int) -> tuple[float, np.ndarray]:
    """Stable binary cross-entropy on a single logit.

    Returns (loss, gradient wrt the logit). The gradient is sigmoid(z) - y,
    and the loss is evaluated as max(z, 0) - z y + log(1 + exp(-|z|)) so large
    logits of either sign stay finite.
    """
    logits = np.asarray(logits, dtype=np.float64).reshape(-1)
    if logits.shape != (1,):
        raise ValueError(f"loss_bce: expected a single logit, got shape {logits.shape}")
    if label not in (0, 1):
        raise ValueError(f"loss_bce: label must be 0 or 1, got {label!r}")
    z = float(logits[0])
    loss = max(z, 0.0) - z * label + math.log1p(math.exp(-abs(z)))
    return loss, np.array([_sigmoid(z) - label])


class WindowAttentionLayer:
    """Window attention with a pooled linear readout."""

    def __init__(self, projectors: ProjectorSet, w_q: Matrix, w_k: Matrix,
                 w_v: Matrix, w_out: Matrix, variant: str):
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}, expected one of {VARIANTS}")
        w_q, w_k, w_v, w_out = (np.array(w, dtype=np.float64) for w in (w_q, w_k, w_v, w_out))
        d = w_q.shape[0]
        for name, w in (("w_q", w_q), ("w_k", w_k), ("w_v", w_v)):
            if w.shape != (d, d):
                raise ValueError(f"{name} must be {d}x{d}, got {w.shape}")
        if w_out.ndim != 2 or w_out.shape[0] != d:
            raise ValueError(f"w_out must have {d} rows, got shape {w_out.shape}")
        self.projectors = projectors
        self.variant = variant
        self.w_q, self.w_k, self.w_v, self.w_out = w_q, w_k, w_v, w_out

    @classmethod
    def random(cls, projectors: ProjectorSet, feature_dim: int, n_classes: int,
               variant: str, rng: Rng) -> "WindowAttentionLayer":
        """Uniform init in [-s, s] with s = 1/sqrt(feature_dim)."""
        s = feature_dim ** -0.5
        return cls(projectors,
                   rand_matrix(rng, feature_dim, feature_dim, s),
                   rand_matrix(rng, feature_dim, feature_dim, s),
                   rand_matrix(rng, feature_dim, feature_dim, s),
                   rand_matrix(rng, feature_dim, n_classes, s),
                   variant)

    @property
    def window(self) -> int:
        return self.projectors.window

    @property
    def feature_dim(self) -> int:
        return self.w_q.shape[0]

    @property
    def n_classes(self) -> int:
        return self.w_out.shape[1]

    def _channel_projectors(self):
        # None stands for the identity projector and skips two matmuls.
        if self.variant == "pre":
            return [(item.irrep.label, item.projector) for item in self.projectors.items]
        return [("all", None)]

    def forward(self, x) -> tuple[np.ndarray, dict]:
        x = as_matrix(x)
        if x.shape != (self.window, self.feature_dim):
            raise ValueError(f"forward: expected {self.window}x{self.feature_dim} window, "
                             f"got {x.shape}")
        q = x @ self.w_q
        k = x @ self.w_k
        v = x @ self.w_v
        scale = math.sqrt(self.feature_dim)
        y = np.zeros_like(v)
        channels = []
        for label, p in self._channel_projectors():
            if p is None:
                qp, kp, vp = q, k, v
            else:
                qp, kp, vp = p @ q, p @ k, p @ v
            wts = softmax_rows((qp @ kp.T) / scale)
            y = y + wts @ vp
            channels.append((label, p, qp, kp, vp, wts))
        pooled = y.mean(axis=0)
        logits = pooled @ self.w_out
        cache = {"layer": self, "x": x, "q": q, "k": k, "v": v,
                 "channels": channels, "y": y, "pooled": pooled}
        return logits, cache

    def window_map(self, x) -> Matrix:
        """The pre-pooling window-to-window map; equivariant for all variants."""
        _, cache = self.forward(x)
        return cache["y"]

    def backward(self, cache: dict, dlogits) -> dict[str, Matrix]:
        """Gradients of the four weight matrices given d(loss)/d(logits)."""
        if cache.get("layer") is not self:
            raise ValueError("backward: cache does not belong to this layer")
        dlogits = np.asarray(dlogits, dtype=np.float64).reshape(-1)
        if dlogits.shape != (self.n_classes,):
            raise ValueError(f"backward: dlogits must have shape ({self.n_classes},)")
        x, q, k, v = cache["x"], cache["q"], cache["k"], cache["v"]
        kwin = self.window
        scale = math.sqrt(self.feature_dim)

        d_wout = np.outer(cache["pooled"], dlogits)
        dpooled = self.w_out @ dlogits
        # pooled = (1/k) * ones^T y, so every row of dy is dpooled / k.
        dy = np.tile(dpooled / kwin, (kwin, 1))

        dq = np.zeros_like(q)
        dk = np.zeros_like(k)
        dv = np.zeros_like(v)
        for _, p, qp, kp, vp, wts in cache["channels"]:
            dwts = dy @ vp.T
            dvp = wts.T @ dy
            ds = softmax_rows_vjp(wts, dwts) / scale
            dqp = ds @ kp
            dkp = ds.T @ qp
            if p is None:
                dq += dqp
                dk += dkp
                dv += dvp
            else:
                # Projectors are symmetric, so P^T = P.
                dq += p @ dqp
                dk += p @ dkp
                dv += p @ dvp
        return {"w_q": x.T @ dq, "w_k": x.T @ dk, "w_v": x.T @ dv, "w_out": d_wout}

    def loss_and_grads(self, x, label: int) -> tuple[float, dict[str, Matrix]]:
        logits, cache = self.forward(x)
        loss, dlogits = loss_bce(logits, label)
        return loss, self.backward(cache, dlogits)


def finite_diff_check(layer: WindowAttentionLayer, x, label: int,
                      eps: float = 1e-5) -> float:
    """Max relative error between analytic and central-difference gradients.

    The relative error of a pair (a, b) is |a - b| / max(|a|, |b|, 1e-4).
    The 1e-4 floor keeps central-difference round-off (about 1e-11 per entry
    at eps = 1e-5 for unit-scale losses) from registering as error on
    components whose true gradient is near zero. eps must lie in
    [1e-7, 1e-4].
    """
    if not 1e-7 <= eps <= 1e-4:
        raise ValueError(f"finite_diff_check: eps {eps} outside [1e-7, 1e-4]")
    x = as_matrix(x)
    _, grads = layer.loss_and_grads(x, label)
    worst = 0.0
    for name in ("w_q", "w_k", "w_v", "w_out"):
        w = getattr(layer, name)
        g = grads[name]
        for idx in np.ndindex(*w.shape):
            orig = w[idx]
            w[idx] = orig + eps
            up, _ = loss_bce(layer.forward(x)[0], label)
            w[idx] = orig - eps
            down, _ = loss_bce(layer.forward(x)[0], label)
            w[idx] = orig
            fd = (up - down) / (2.0 * eps)
            a = float(g[idx])
            rel = abs(fd - a) / max(abs(fd), abs(a), 1e-4)
            worst = max(worst, rel)
    return worst


@dataclass
class TrainConfig:
    epochs: int
    learning_rate: float
    seed: int
    batch_size: int = 1
    task: str = ""
    tracker_trials: int = 2


def _as_sample(item) -> tuple[Matrix, int]:
    if hasattr(item, "features") and hasattr(item, "label"):
        return as_matrix(item.features), int(item.label)
    feats, label = item
    return as_matrix(feats), int(label)


def _evaluate(layer: WindowAttentionLayer, samples) -> tuple[float, float]:
    total = 0.0
    correct = 0
    for feats, label in samples:
        logits, _ = layer.forward(feats)
        loss, _ = loss_bce(logits, label)
        total += loss
        correct += int((logits[0] > 0.0) == bool(label))
    return total / len(samples), correct / len(samples)


def train(layer: WindowAttentionLayer, train_data, val_data,
          cfg: TrainConfig) -> list[dict]:
    """Plain SGD with mean gradients per shuffled mini-batch.

    Returns one history row per epoch: epoch, train_loss, val_loss, val_acc
    and equivariance_max (the layer's window map, checked against its group).
    A non-finite loss aborts with a diagnostic rather than training on.
    """
    if cfg.epochs < 1:
        raise ValueError(f"train: epochs must be >= 1, got {cfg.epochs}")
    if cfg.batch_size < 1:
        raise ValueError(f"train: batch_size must be >= 1, got {cfg.batch_size}")
    train_samples = [_as_sample(s) for s in train_data]
    val_samples = [_as_sample(s) for s in val_data]
    if not train_samples or not val_samples:
        raise ValueError("train: empty train or validation split")

    shuffle_rng = Rng(cfg.seed).derive(1)
    names = ("w_q", "w_k", "w_v", "w_out")
    history = []
    for epoch in range(1, cfg.epochs + 1):
        order = shuffle_rng.permutation(len(train_samples))
        # fsum keeps the reported loss independent of the shuffle order.
        epoch_losses = []
        for start in range(0, len(order), cfg.batch_size):
            batch = [train_samples[i] for i in order[start:start + cfg.batch_size]]
            sums = {name: np.zeros_like(getattr(layer, name)) for name in names}
            for feats, label in batch:
                loss, grads = layer.loss_and_grads(feats, label)
                epoch_losses.append(loss)
                for name in names:
                    sums[name] += grads[name]
            for name in names:
                getattr(layer, name)[...] -= cfg.learning_rate * sums[name] / len(batch)
        train_loss = math.fsum(epoch_losses) / len(train_samples)
        if not math.isfinite(train_loss):
            raise RuntimeError(f"train: loss diverged at epoch {epoch} "
                               f"(train loss {train_loss!r})")
        val_loss, val_acc = _evaluate(layer, val_samples)
        if not math.isfinite(val_loss):
            raise RuntimeError(f"train: loss diverged at epoch {epoch} "
                               f"(validation loss {val_loss!r})")
        report = equivariance_report(
            layer.window_map, layer.projectors.group, layer.feature_dim,
            cfg.tracker_trials, Rng(cfg.seed).derive(1000 + epoch))
        history.append({"epoch": epoch,
                        "train_loss": float(train_loss),
                        "val_loss": float(val_loss),
                        "val_acc": float(val_acc),
                        "equivariance_max": float(report.max_error)})
    return history

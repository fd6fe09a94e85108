"""Training loops: CAE reconstruction, stacked AEs, and MLP heads."""

from dataclasses import dataclass, field

import numpy as np

from .adam import Adam
from .arch import CaeModel, build_cae
from .layers import Dense, Dropout, ReLU, Sequential


class DivergedError(RuntimeError):
    def __init__(self, epoch):
        super().__init__(f"non-finite loss at epoch {epoch}")
        self.epoch = epoch


@dataclass
class TrainConfig:
    learning_rate: float = 0.001
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    batch_size: int = 32
    epochs: int = 50
    seed: int = 0
    deterministic: bool = True
    early_stopping_patience: int = 10  # 0 disables; engages only when a val split exists

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")
        if not (0 < self.adam_beta1 < 1 and 0 < self.adam_beta2 < 1):
            raise ValueError("adam betas must lie in (0, 1)")


def _batches(n, batch_size, rng):
    order = rng.permutation(n)
    for s in range(0, n, batch_size):
        yield order[s : s + batch_size]


def mse_loss(pred, target):
    """L = mean((target - pred)^2) over all elements, and dL/dpred."""
    diff = pred - target
    return float(np.mean(diff * diff)), 2.0 * diff / diff.size


def train_cae(dataset, arch_id, config: TrainConfig):
    """Fit a CAE by Adam on mean squared reconstruction error.

    Returns (model, loss_history) with one mean-epoch loss per epoch.
    """
    x = np.asarray(dataset, dtype=np.float64)
    if x.ndim == 3:
        x = x[..., None]
    if x.shape[0] == 0:
        raise ValueError("empty dataset")
    model = build_cae(arch_id, seed=config.seed)
    if x.shape[1:] != (model.input_hw, model.input_hw, model.channels):
        raise ValueError(
            f"dataset shape {x.shape[1:]} does not match arch "
            f"{arch_id!r} input {model.input_hw}x{model.input_hw}x{model.channels}")
    opt = Adam(model.params, lr=config.learning_rate, beta1=config.adam_beta1,
               beta2=config.adam_beta2, eps=config.adam_epsilon)
    rng = np.random.default_rng(config.seed + 1)
    history = []
    for epoch in range(config.epochs):
        losses = []
        for idx in _batches(x.shape[0], config.batch_size, rng):
            xb = x[idx]
            _, recon = model.forward(xb, train=True)
            loss, drecon = mse_loss(recon, xb)
            if not np.isfinite(loss):
                raise DivergedError(epoch)
            dz = model.decoder.backward(drecon)
            model.encoder.backward(dz)
            if config.learning_rate > 0:
                opt.step(model.grads)
            losses.append(loss)
        history.append(float(np.mean(losses)))
    return model, history


@dataclass
class StackedAeModel:
    """Dense autoencoder over latent codes: linear input-N-input or
    nonlinear input-hidden-N-hidden-input with ReLU."""

    kind: str
    input_dim: int
    bottleneck: int
    hidden_dim: int
    net: Sequential
    enc_depth: int  # layers belonging to the encoder half

    def encode(self, z):
        x = np.asarray(z, dtype=np.float64)
        for l in self.net.layers[: self.enc_depth]:
            x = l.forward(x)
        return x

    def decode(self, v):
        x = np.asarray(v, dtype=np.float64)
        for l in self.net.layers[self.enc_depth :]:
            x = l.forward(x)
        return x


def default_stacked_hidden(input_dim):
    # 4096-wide latents pair with 512 hidden units, 640-wide with 128;
    # other widths scale to roughly an eighth.
    if input_dim >= 4096:
        return 512
    if input_dim >= 640:
        return 128
    return max(8, input_dim // 8)


def train_stacked_ae(latents, n_components, kind, config: TrainConfig | None = None,
                     hidden_dim=None):
    """Fit a linear or nonlinear stacked AE minimizing MSE on latent codes."""
    z = np.asarray(latents, dtype=np.float64)
    d = z.shape[1]
    if n_components >= d:
        raise ValueError(f"bottleneck {n_components} must be < input width {d}")
    if kind not in ("linear", "nonlinear"):
        raise ValueError(f"kind must be 'linear' or 'nonlinear', got {kind!r}")
    config = config or TrainConfig(epochs=200)
    rng = np.random.default_rng(config.seed)
    if kind == "linear":
        layers = [Dense(d, n_components, rng=rng), Dense(n_components, d, rng=rng)]
        enc_depth, hidden = 1, 0
    else:
        hidden = hidden_dim or default_stacked_hidden(d)
        layers = [Dense(d, hidden, rng=rng), ReLU(),
                  Dense(hidden, n_components, rng=rng),
                  Dense(n_components, hidden, rng=rng), ReLU(),
                  Dense(hidden, d, rng=rng)]
        enc_depth, hidden = 3, hidden
    net = Sequential(layers)
    opt = Adam(net.params, lr=config.learning_rate, beta1=config.adam_beta1,
               beta2=config.adam_beta2, eps=config.adam_epsilon)
    brng = np.random.default_rng(config.seed + 1)
    for epoch in range(config.epochs):
        for idx in _batches(z.shape[0], config.batch_size, brng):
            zb = z[idx]
            out = net.forward(zb, train=True)
            loss, dout = mse_loss(out, zb)
            if not np.isfinite(loss):
                raise DivergedError(epoch)
            net.backward(dout)
            opt.step(net.grads)
    return StackedAeModel(kind=kind, input_dim=d, bottleneck=n_components,
                          hidden_dim=hidden, net=net, enc_depth=enc_depth)


HEAD_WIDTHS = {"streetview": (64, 32, 16), "streetnet": (32, 16)}


@dataclass
class MlpModel:
    head_id: str
    task: str  # "regression" | "classification"
    num_classes: int
    net: Sequential
    dropout_rate: float = 0.2
    l1_coefficient: float = 1e-4
    layer_widths: tuple = ()

    def predict(self, features):
        return self.net.forward(np.asarray(features, dtype=np.float64))


def _softmax(logits):
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def cross_entropy_loss(logits, labels):
    """Mean categorical cross-entropy from logits plus dL/dlogits."""
    p = _softmax(logits)
    n = logits.shape[0]
    eps = 1e-12
    loss = float(-np.mean(np.log(p[np.arange(n), labels] + eps)))
    dlogits = p.copy()
    dlogits[np.arange(n), labels] -= 1.0
    return loss, dlogits / n


def build_mlp(n_features, task, head_id, num_classes=4, seed=0,
              dropout_rate=0.2, l1_coefficient=1e-4):
    widths = HEAD_WIDTHS[head_id]
    rng = np.random.default_rng(seed)
    layers = []
    din = n_features
    for w in widths:
        layers += [Dense(din, w, rng=rng), ReLU()]
        din = w
    dout = 1 if task == "regression" else num_classes
    layers += [Dropout(dropout_rate, rng=np.random.default_rng(seed + 7)),
               Dense(din, dout, rng=rng)]
    return MlpModel(head_id=head_id, task=task,
                    num_classes=num_classes if task == "classification" else 0,
                    net=Sequential(layers), dropout_rate=dropout_rate,
                    l1_coefficient=l1_coefficient, layer_widths=widths)


def _head_loss(model, features, targets, train=False):
    out = model.net.forward(features, train=train)
    if model.task == "regression":
        loss, dout = mse_loss(out[:, 0], targets)
        dout = dout[:, None]
    else:
        loss, dout = cross_entropy_loss(out, targets)
    return out, loss, dout


def train_mlp_head(features, targets, task, head_id, config: TrainConfig,
                   splits=None, num_classes=4):
    """Train a prediction head; returns (model, per-split metrics).

    ``splits`` is a (train, val, test) index triple; defaults to training on
    everything with empty val/test.
    """
    from ..experiments import compute_metrics  # local import avoids a cycle

    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(targets)
    if x.shape[0] != y.shape[0]:
        raise ValueError("features/targets misaligned")
    if task == "classification":
        y = y.astype(int)
        if y.min() < 0 or y.max() >= num_classes:
            raise ValueError(f"class label outside [0, {num_classes})")
    model = build_mlp(x.shape[1], task, head_id, num_classes=num_classes,
                      seed=config.seed)
    if splits is None:
        splits = (np.arange(x.shape[0]), np.array([], int), np.array([], int))
    tr, va, te = (np.asarray(s, dtype=int) for s in splits)
    final_w = model.net.params[-2]  # l1 penalty applies to the final layer
    final_g = model.net.grads[-2]
    opt = Adam(model.net.params, lr=config.learning_rate, beta1=config.adam_beta1,
               beta2=config.adam_beta2, eps=config.adam_epsilon)
    brng = np.random.default_rng(config.seed + 1)
    best_val, best_state, patience = np.inf, None, 0
    for epoch in range(config.epochs):
        for idx in _batches(tr.size, config.batch_size, brng):
            xb, yb = x[tr[idx]], y[tr[idx]]
            _, loss, dout = _head_loss(model, xb, yb, train=True)
            if not np.isfinite(loss):
                raise DivergedError(epoch)
            model.net.backward(dout)
            final_g += model.l1_coefficient * np.sign(final_w)
            opt.step(model.net.grads)
        if config.early_stopping_patience and va.size:
            _, vloss, _ = _head_loss(model, x[va], y[va])
            if vloss < best_val - 1e-12:
                best_val, patience = vloss, 0
                best_state = [p.copy() for p in model.net.params]
            else:
                patience += 1
                if patience >= config.early_stopping_patience:
                    break
    if best_state is not None:
        for p, s in zip(model.net.params, best_state):
            p[...] = s
    metrics = {}
    for name, idx in (("train", tr), ("val", va), ("test", te)):
        if idx.size:
            pred = model.predict(x[idx])
            metrics[name] = compute_metrics(
                pred[:, 0] if task == "regression" else pred, y[idx], task)
    return model, metrics

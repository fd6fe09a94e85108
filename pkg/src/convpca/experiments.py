"""Experiment orchestration: splits, metrics, and the reducer x component
sweep (PCA truncation vs linear vs nonlinear stacked AE, N in
{4,8,16,32,64}, 15 cells per task)."""

import csv
from dataclasses import dataclass, field

import numpy as np

from .latent import fit_pca, project
from .neural.train import TrainConfig, train_mlp_head, train_stacked_ae

REDUCERS = ("pca_lin", "ae_lin", "ae_non")
COMPONENT_GRID = (4, 8, 16, 32, 64)


@dataclass
class SplitSpec:
    ratios: tuple = (0.70, 0.15, 0.15)
    seed: int = 0

    def __post_init__(self):
        if abs(sum(self.ratios) - 1.0) > 1e-9:
            raise ValueError("split ratios must sum to 1")


def split_dataset(n, spec: SplitSpec):
    """Seeded shuffle then contiguous slices; train absorbs rounding."""
    if n < 10:
        raise ValueError("need at least 10 samples to split")
    n_val = int(n * spec.ratios[1])
    n_test = int(n * spec.ratios[2])
    n_train = n - n_val - n_test
    if min(n_train, n_val, n_test) < 1:
        raise ValueError(f"n={n} too small for ratios {spec.ratios}")
    order = np.random.default_rng(spec.seed).permutation(n)
    return (order[:n_train], order[n_train : n_train + n_val],
            order[n_train + n_val :])


def compute_metrics(predictions, targets, task):
    """Regression -> {mse, r2}; classification -> {cross_entropy, accuracy}.

    Classification predictions are logits [n, k]; regression predictions a
    vector.
    """
    targets = np.asarray(targets)
    if task == "regression":
        pred = np.asarray(predictions, dtype=np.float64).ravel()
        if pred.size != targets.size:
            raise ValueError("predictions/targets misaligned")
        ss_tot = float(((targets - targets.mean()) ** 2).sum())
        if ss_tot <= 0:
            raise ValueError("zero-variance targets: R^2 undefined")
        ss_res = float(((targets - pred) ** 2).sum())
        return {"mse": ss_res / pred.size, "r2": 1.0 - ss_res / ss_tot}
    if task == "classification":
        logits = np.atleast_2d(np.asarray(predictions, dtype=np.float64))
        labels = targets.astype(int)
        shifted = logits - logits.max(axis=1, keepdims=True)
        logp = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
        ce = float(-logp[np.arange(labels.size), labels].mean())
        acc = float((logits.argmax(axis=1) == labels).mean())
        return {"cross_entropy": ce, "accuracy": acc}
    raise ValueError(f"unknown task {task!r}")


@dataclass
class ExperimentResult:
    reducer: str
    n_components: int
    task: str
    metrics: dict = field(default_factory=dict)  # per split
    seed: int = 0


def _reduce(z_train, z_all, reducer, n, seed):
    if reducer == "pca_lin":
        pca = fit_pca(z_train)
        return project(pca, z_all)[:, :n]
    kind = "linear" if reducer == "ae_lin" else "nonlinear"
    cfg = TrainConfig(epochs=150, seed=seed, batch_size=32)
    ae = train_stacked_ae(z_train, n, kind, config=cfg)
    return ae.encode(z_all)


def run_grid(latents, targets, task, head_id, seed=0, split=None,
             head_epochs=200, reducers=REDUCERS, grid=COMPONENT_GRID):
    """The full reducer x N sweep; reducers and heads fit on the train split
    only, metrics reported per split."""
    z = np.asarray(latents, dtype=np.float64)
    y = np.asarray(targets)
    if z.shape[0] != y.shape[0]:
        raise ValueError("latents/targets misaligned")
    if split is None:
        split = split_dataset(z.shape[0], SplitSpec(seed=seed))
    tr, va, te = split
    results = []
    for reducer in reducers:
        for n in grid:
            feats = _reduce(z[tr], z, reducer, n, seed)
            cfg = TrainConfig(epochs=head_epochs, seed=seed, batch_size=32,
                              early_stopping_patience=10)
            _, metrics = train_mlp_head(feats, y, task, head_id, cfg,
                                        splits=(tr, va, te))
            results.append(ExperimentResult(reducer=reducer, n_components=n,
                                            task=task, metrics=metrics, seed=seed))
    return results


def results_to_csv(results, path):
    keys = sorted({k for r in results for m in r.metrics.values() for k in m})
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["reducer", "n_components", "task", "split"] + keys)
        for r in results:
            for split_name, m in r.metrics.items():
                w.writerow([r.reducer, r.n_components, r.task, split_name]
                           + [f"{m.get(k, float('nan')):.6g}" for k in keys])


def render_table(results, split="test"):
    """Text table with reducers as row groups and component counts as
    columns."""
    grid = sorted({r.n_components for r in results})
    lines = []
    metric_keys = None
    for reducer in REDUCERS:
        rows = {r.n_components: r for r in results if r.reducer == reducer}
        if not rows:
            continue
        if metric_keys is None:
            any_m = next(iter(rows.values())).metrics.get(split, {})
            metric_keys = sorted(any_m)
            lines.append("components".ljust(12) + "".join(str(n).rjust(10) for n in grid))
        for key in metric_keys:
            cells = []
            for n in grid:
                m = rows.get(n)
                val = m.metrics.get(split, {}).get(key) if m else None
                cells.append(f"{val:.4f}".rjust(10) if val is not None else " " * 10)
            lines.append(f"{reducer}/{key}".ljust(12)[:12] + "".join(cells))
    return "\n".join(lines)

"""Model persistence: a directory holding ``manifest.json`` plus
``weights.bin`` (little-endian float32, tensors concatenated in manifest
order)."""

import json
from pathlib import Path

import numpy as np

from .. import FORMAT_VERSION
from .arch import build_cae
from .train import StackedAeModel, MlpModel, build_mlp


def _write_weights(path, params):
    with open(path, "wb") as f:
        for p in params:
            f.write(np.asarray(p, dtype="<f4").tobytes())


def _read_weights(path, shapes):
    raw = np.fromfile(path, dtype="<f4")
    expected = sum(int(np.prod(s)) for s in shapes)
    if raw.size != expected:
        raise ValueError(f"weights.bin holds {raw.size} floats, manifest expects {expected}")
    out, off = [], 0
    for s in shapes:
        n = int(np.prod(s))
        out.append(raw[off : off + n].astype(np.float64).reshape(s))
        off += n
    return out


def save_model(model, directory):
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    if hasattr(model, "arch_id"):  # CAE
        manifest = {
            "version": FORMAT_VERSION,
            "model_type": "cae",
            "arch_id": model.arch_id,
            "seed": model.seed,
            "input_hw": model.input_hw,
            "channels": model.channels,
            "latent_dim": model.latent_dim,
            "latent_target": model.meta.get("latent_target"),
            "tensors": [list(p.shape) for p in model.params],
        }
        params = model.params
    elif isinstance(model, StackedAeModel):
        manifest = {
            "version": FORMAT_VERSION,
            "model_type": "stacked_ae",
            "kind": model.kind,
            "input_dim": model.input_dim,
            "bottleneck": model.bottleneck,
            "hidden_dim": model.hidden_dim,
            "tensors": [list(p.shape) for p in model.net.params],
        }
        params = model.net.params
    elif isinstance(model, MlpModel):
        manifest = {
            "version": FORMAT_VERSION,
            "model_type": "mlp",
            "head_id": model.head_id,
            "task": model.task,
            "num_classes": model.num_classes,
            "n_features": model.net.params[0].shape[0],
            "dropout_rate": model.dropout_rate,
            "l1_coefficient": model.l1_coefficient,
            "tensors": [list(p.shape) for p in model.net.params],
        }
        params = model.net.params
    else:
        raise TypeError(f"cannot persist {type(model).__name__}")
    (d / "manifest.json").write_text(json.dumps(manifest, indent=2))
    _write_weights(d / "weights.bin", params)
    return d


def load_model(directory):
    d = Path(directory)
    manifest = json.loads((d / "manifest.json").read_text())
    if manifest.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported model version {manifest.get('version')!r}")
    shapes = manifest["tensors"]
    weights = _read_weights(d / "weights.bin", shapes)
    mtype = manifest["model_type"]
    if mtype == "cae":
        model = build_cae(manifest["arch_id"], seed=manifest.get("seed", 0))
        params = model.params
    elif mtype == "stacked_ae":
        from .train import train_stacked_ae  # build skeleton via a 0-epoch fit
        from .layers import Dense, ReLU, Sequential
        d_in, n = manifest["input_dim"], manifest["bottleneck"]
        if manifest["kind"] == "linear":
            layers = [Dense(d_in, n), Dense(n, d_in)]
            enc_depth = 1
        else:
            h = manifest["hidden_dim"]
            layers = [Dense(d_in, h), ReLU(), Dense(h, n),
                      Dense(n, h), ReLU(), Dense(h, d_in)]
            enc_depth = 3
        model = StackedAeModel(kind=manifest["kind"], input_dim=d_in,
                               bottleneck=n, hidden_dim=manifest["hidden_dim"],
                               net=Sequential(layers), enc_depth=enc_depth)
        params = model.net.params
    elif mtype == "mlp":
        model = build_mlp(manifest["n_features"], manifest["task"],
                          manifest["head_id"],
                          num_classes=manifest["num_classes"] or 4,
                          dropout_rate=manifest["dropout_rate"],
                          l1_coefficient=manifest["l1_coefficient"])
        params = model.net.params
    else:
        raise ValueError(f"unknown model_type {mtype!r}")
    for p, w in zip(params, weights):
        if tuple(p.shape) != tuple(w.shape):
            raise ValueError(f"tensor shape mismatch: {p.shape} vs {w.shape}")
        p[...] = w
    return model

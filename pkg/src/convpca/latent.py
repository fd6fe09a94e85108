"""Linear PCA over latent codes: fit, project, inverse-project, perturbation
sweeps, and component-extreme selection.

Latents are standardized (centered, scaled to unit variance with a 1e-8
std floor) before eigendecomposition of their covariance.  Components are
ordered by descending eigenvalue and sign-normalized so fits are
deterministic.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import FORMAT_VERSION

STD_FLOOR = 1e-8


@dataclass
class PcaModel:
    mean: np.ndarray          # [d]
    std: np.ndarray           # [d], floored
    eigenvectors: np.ndarray  # [d, d], columns ordered by eigenvalue desc
    eigenvalues: np.ndarray   # [d], descending, clamped at 0

    @property
    def dim(self):
        return self.mean.size

    def standardize(self, z):
        return (np.asarray(z, dtype=np.float64) - self.mean) / self.std


def _sign_normalize(w):
    # largest-|entry| element of each column made positive
    idx = np.abs(w).argmax(axis=0)
    signs = np.sign(w[idx, np.arange(w.shape[1])])
    signs[signs == 0] = 1.0
    return w * signs


def fit_pca(latents):
    """Eigendecomposition of the covariance of standardized latents.

    Uses the d x d covariance when n > d, otherwise the n x n Gram trick.
    """
    z = np.asarray(latents, dtype=np.float64)
    if z.ndim != 2 or z.shape[0] < 2:
        raise ValueError("need a 2-D matrix with at least 2 rows")
    if not np.isfinite(z).all():
        raise ValueError("non-finite entries in latent matrix")
    n, d = z.shape
    mean = z.mean(axis=0)
    std = np.maximum(z.std(axis=0, ddof=0), STD_FLOOR)
    x = (z - mean) / std
    if n > d:
        cov = (x.T @ x) / (n - 1)
        evals, evecs = np.linalg.eigh(cov)
    else:
        gram = (x @ x.T) / (n - 1)
        gvals, gvecs = np.linalg.eigh(gram)
        keep = gvals > 1e-12
        lead = x.T @ gvecs[:, keep]
        lead /= np.linalg.norm(lead, axis=0)
        # complete to a full orthonormal basis; extra directions carry
        # eigenvalue 0
        q, _ = np.linalg.qr(np.hstack([lead, np.eye(d)]))
        evecs = np.hstack([lead, q[:, keep.sum() : d]]) if keep.sum() < d else lead
        evals = np.zeros(d)
        evals[: keep.sum()] = gvals[keep]
    order = np.argsort(evals)[::-1]
    evals = np.clip(evals[order], 0.0, None)
    evecs = _sign_normalize(evecs[:, order])
    return PcaModel(mean=mean, std=std, eigenvectors=evecs, eigenvalues=evals)


def project(model, z):
    """V = standardized(Z) @ W."""
    z = np.atleast_2d(np.asarray(z, dtype=np.float64))
    if z.shape[1] != model.dim:
        raise ValueError(f"width {z.shape[1]} != model dim {model.dim}")
    return model.standardize(z) @ model.eigenvectors


def inverse_project(model, v):
    """Z' = (V @ W^T) * s + mu; missing trailing components treated as 0."""
    v = np.atleast_2d(np.asarray(v, dtype=np.float64))
    d = model.dim
    if v.shape[1] > d:
        raise ValueError(f"width {v.shape[1]} exceeds model dim {d}")
    if v.shape[1] < d:
        v = np.hstack([v, np.zeros((v.shape[0], d - v.shape[1]))])
    return (v @ model.eigenvectors.T) * model.std + model.mean


def perturb_sweep(model, decoder, k, half_range=3.0, steps=9):
    """Decode a grid of images varying component k around the mean vector.

    ``k`` is 1-based.  Offsets run linearly over
    [-half_range*sqrt(lambda_k), +half_range*sqrt(lambda_k)]; the center
    step is the unperturbed mean (all components 0).
    """
    if steps % 2 == 0:
        raise ValueError("steps must be odd so the center step is the mean")
    if not (1 <= k <= model.dim):
        raise ValueError(f"component index {k} out of range [1, {model.dim}]")
    lam = model.eigenvalues[k - 1]
    if lam <= 0:
        raise ValueError(f"component {k} has zero variance; sweep degenerate")
    offsets = np.linspace(-half_range, half_range, steps) * np.sqrt(lam)
    v = np.zeros((steps, model.dim))
    v[:, k - 1] = offsets
    return decoder(inverse_project(model, v)), offsets


def component_extremes(v, k, count):
    """Indices of the ``count`` smallest / largest values of column k
    (1-based); ties broken by ascending row index."""
    v = np.asarray(v)
    if v.size == 0:
        raise ValueError("empty component matrix")
    col = v[:, k - 1]
    if count > col.size // 2:
        raise ValueError("count exceeds half the rows")
    order = np.argsort(col, kind="stable")
    return order[:count].tolist(), order[-count:][::-1].tolist()


def save_pca(model, directory):
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    payload = {
        "version": FORMAT_VERSION,
        "dim": model.dim,
        "mean": model.mean.tolist(),
        "std": model.std.tolist(),
        "eigenvalues": model.eigenvalues.tolist(),
    }
    (d / "pca.json").write_text(json.dumps(payload))
    # column-major float32 so column k is contiguous on disk
    with open(d / "eigvecs.bin", "wb") as f:
        f.write(np.asarray(model.eigenvectors, dtype="<f4", order="F").tobytes(order="F"))
    return d


def load_pca(directory):
    d = Path(directory)
    payload = json.loads((d / "pca.json").read_text())
    if payload.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported pca version {payload.get('version')!r}")
    dim = payload["dim"]
    raw = np.fromfile(d / "eigvecs.bin", dtype="<f4")
    if raw.size != dim * dim:
        raise ValueError("eigvecs.bin size mismatch")
    w = raw.astype(np.float64).reshape((dim, dim), order="F")
    return PcaModel(mean=np.array(payload["mean"]), std=np.array(payload["std"]),
                    eigenvectors=w, eigenvalues=np.array(payload["eigenvalues"]))

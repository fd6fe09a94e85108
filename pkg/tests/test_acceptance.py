"""Acceptance gate: every headline criterion at its stated tolerance.

Each test prints one PASS line (bypassing capture) after its assertions so
the gate's outcome is legible in plain pytest output.
"""

import numpy as np
import pytest

from convpca import latent as lt
from convpca import spatialstats as sp
from convpca import streetgraph as sg
from convpca import synthdata as sd
from convpca import urbangeom as ug
from convpca import experiments as ex
from convpca.neural import (
    TrainConfig,
    build_cae,
    load_model,
    save_model,
    train_cae,
)
from convpca.neural.gradcheck import gradient_check
from convpca.neural import layers as L
from convpca.neural.train import mse_loss
from convpca.raster import read_pgm, write_pgm


_PENDING: list[str] = []


@pytest.fixture(autouse=True)
def _criterion_reporter(capsys):
    """Emit the criterion line past pytest's output capture."""
    yield
    with capsys.disabled():
        while _PENDING:
            print("\n" + _PENDING.pop(0), end="", flush=True)


def _report(name):
    # flushed by the autouse reporter fixture; a failing assertion never
    # reaches _report, so no PASS line is emitted for a failed criterion
    _PENDING.append(f"PASS {name}")


# --- 1. PCA oracle equivalence -------------------------------------------

def test_pca_oracle_equivalence():
    rng = np.random.default_rng(100)
    for _ in range(20):
        n = int(rng.integers(20, 201))
        d = int(rng.integers(4, 65))
        x = rng.normal(size=(n, d)) * rng.uniform(0.5, 3.0, size=d)
        model = lt.fit_pca(x)
        xs = (x - x.mean(axis=0)) / np.maximum(x.std(axis=0), 1e-8)
        cov = xs.T @ xs / (n - 1)
        evals, evecs = np.linalg.eigh(cov)
        order = np.argsort(evals)[::-1]
        evals, evecs = evals[order], evecs[:, order]
        np.testing.assert_allclose(model.eigenvalues, np.maximum(evals, 0.0),
                                   atol=1e-8)
        # eigenvectors match up to sign wherever eigenvalues are separated
        for k in range(d):
            gap_ok = (k == 0 or evals[k - 1] - evals[k] > 1e-6) and \
                     (k == d - 1 or evals[k] - evals[k + 1] > 1e-6)
            if not gap_ok:
                continue
            a, b = model.eigenvectors[:, k], evecs[:, k]
            assert min(np.abs(a - b).max(), np.abs(a + b).max()) < 1e-8
        # projected components are uncorrelated
        v = lt.project(model, x)
        c = np.cov(v, rowvar=False)
        off = c - np.diag(np.diag(c))
        assert np.abs(off).max() < 1e-6
        # full-width round trip
        back = lt.inverse_project(model, v)
        assert np.abs(back - x).max() < 1e-6
    _report("pca-oracle-equivalence")


# --- 2. Gradient checks ---------------------------------------------------

def test_gradient_checks_all_layer_kinds():
    rng = np.random.default_rng(7)
    def r(seed):
        return np.random.default_rng(seed)

    cases = {
        "conv": (L.Sequential([L.Conv2D(2, 3, 3, stride=2, rng=r(0)), L.ReLU()]),
                 rng.random((2, 8, 8, 2)), rng.random((2, 4, 4, 3))),
        "conv_transpose": (L.Sequential([L.ConvTranspose2D(3, 2, 3, stride=2,
                                                           rng=r(1)),
                                         L.Sigmoid()]),
                           rng.random((2, 4, 4, 3)), rng.random((2, 8, 8, 2))),
        "maxpool": (L.Sequential([L.Conv2D(1, 2, 3, stride=1, rng=r(2)),
                                  L.MaxPool2x2()]),
                    rng.random((2, 6, 6, 1)), rng.random((2, 3, 3, 2))),
        "upsample": (L.Sequential([L.Upsample2x(),
                                   L.Conv2D(1, 1, 3, stride=1, rng=r(3))]),
                     rng.random((2, 4, 4, 1)), rng.random((2, 8, 8, 1))),
        "dense": (L.Sequential([L.Flatten(), L.Dense(16, 6, rng=r(4)), L.ReLU(),
                                L.Dense(6, 4, rng=r(5))]),
                  rng.random((3, 4, 4, 1)), rng.random((3, 4))),
    }
    worst = 0.0
    for name, (net, x, target) in cases.items():
        n_params = sum(p.size for p in net.params)
        assert n_params <= 5000, f"{name} net too large for the check"
        err = gradient_check(net, x, target, mse_loss, epsilon=1e-5)
        worst = max(worst, err)
        assert err < 1e-3, f"{name}: gradient error {err}"
    _report(f"gradient-checks (max rel err {worst:.2e})")


# --- shared fixtures ------------------------------------------------------

def _train_desk(images, seed, epochs, lr=0.003):
    cfg = TrainConfig(learning_rate=lr, epochs=epochs, seed=seed, batch_size=32)
    return train_cae(images, "streetnet_desk", cfg)


@pytest.fixture(scope="module")
def density_corpus():
    # the 32x32 raster stops resolving density past ~80 nodes/km^2 (tiles
    # saturate), so the regression analog uses the unsaturated band
    return sd.gen_density_corpus(320, seed=13, size=32, density_range=(10, 60))


@pytest.fixture(scope="module")
def density_cae(density_corpus):
    model, history = _train_desk(density_corpus.images, seed=7, epochs=60)
    return model, history


def _encode_all(model, images, batch=64):
    return np.vstack([model.encode(images[s : s + batch])
                      for s in range(0, images.shape[0], batch)])


# --- 3. Desk-scale CAE training ------------------------------------------

def _grid_rasters(count, seed, size=32):
    """Jittered grid-network tiles rasterized on a fixed 1.5 km window."""
    rng = np.random.default_rng(seed)
    imgs = []
    for _ in range(count):
        rows, cols = int(rng.integers(3, 6)), int(rng.integers(3, 6))
        g = sd.gen_grid_network(rows, cols, spacing=1500.0 / max(rows, cols),
                                jitter=float(rng.uniform(0, 30)),
                                seed=int(rng.integers(0, 2**31)))
        xmin, ymin, xmax, ymax = g.bbox()
        cx, cy = (xmin + xmax) / 2, (ymin + ymax) / 2
        side = sd.TILE_SIDE_M
        clipped = sg.clip_bbox(g, (cx, cy), side)
        img = sg.rasterize(clipped, (cx - side / 2, cy - side / 2,
                                     cx + side / 2, cy + side / 2), size=size)
        imgs.append(img[..., None])
    return np.stack(imgs)


def test_desk_cae_training_and_determinism():
    images = _grid_rasters(64, seed=7)
    model_a, hist_a = _train_desk(images, seed=7, epochs=400)
    assert hist_a[-1] <= 0.20 * hist_a[0], \
        f"loss {hist_a[0]:.5f} -> {hist_a[-1]:.5f} (> 20%)"
    model_b, hist_b = _train_desk(images, seed=7, epochs=400)
    np.testing.assert_array_equal(np.array(hist_a), np.array(hist_b))
    for pa, pb in zip(model_a.params, model_b.params):
        np.testing.assert_array_equal(pa, pb)
    _report(f"desk-cae-training (loss {hist_a[0]:.4f} -> {hist_a[-1]:.4f}, "
            f"bit-identical reruns)")


# --- 4. Closeness centrality ---------------------------------------------

def _floyd_warshall(n, edges):
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0.0)
    for u, v, w in edges:
        d[u, v] = min(d[u, v], w)
        d[v, u] = min(d[v, u], w)
    for k in range(n):
        d = np.minimum(d, d[:, k : k + 1] + d[k : k + 1, :])
    return d


def _closeness_oracle(n, edges):
    d = _floyd_warshall(n, edges)
    out = np.zeros(n)
    for u in range(n):
        reach = np.isfinite(d[u])
        nc = int(reach.sum())
        if nc > 1:
            out[u] = (nc - 1) / d[u][reach].sum()
    return out


def _random_graph(rng):
    n = int(rng.integers(2, 51))
    xy = rng.uniform(0, 1000, size=(n, 2))
    m = int(rng.integers(n - 1, 3 * n))
    edges = []
    for _ in range(m):
        u, v = rng.integers(0, n, size=2)
        if u == v:
            continue
        w = float(rng.uniform(1.0, 500.0))
        edges.append((int(u), int(v), w))
    ids = [f"n{i}" for i in range(n)]
    g = sg.StreetGraph(node_ids=ids, xy=xy,
                       edges=[(u, v, w, None) for u, v, w in edges])
    return g, n, edges


def test_closeness_against_oracle():
    rng = np.random.default_rng(55)
    for _ in range(50):
        g, n, edges = _random_graph(rng)
        got = sg.closeness_all(g)
        want = _closeness_oracle(n, edges)
        np.testing.assert_allclose(got, want, atol=1e-9)
    # closed forms: unit path a-b-c and a single edge of length L
    path = sg.StreetGraph(node_ids=["a", "b", "c"],
                          xy=np.array([[0, 0], [1, 0], [2, 0]], float),
                          edges=[(0, 1, 1.0, None), (1, 2, 1.0, None)])
    np.testing.assert_allclose(sg.closeness_all(path), [2 / 3, 1.0, 2 / 3])
    single = sg.StreetGraph(node_ids=["a", "b"],
                            xy=np.array([[0, 0], [5, 0]], float),
                            edges=[(0, 1, 5.0, None)])
    np.testing.assert_allclose(sg.closeness_all(single), [0.2, 0.2])
    _report("closeness-centrality (50 graphs vs all-pairs oracle)")


# --- 5. Spatial autocorrelation ------------------------------------------

def test_autocorr_criteria():
    checker = (np.indices((8, 8)).sum(axis=0) % 2).astype(float)
    w = sp.raster_weights(8, 8, "rook")
    l_mean, _ = sp.global_autocorr(checker, w)
    assert abs(l_mean - (-1.0)) <= 1e-9

    ramp = np.tile(np.arange(10, dtype=float), (10, 1))
    wq = sp.raster_weights(10, 10, "queen")
    l_ramp, _ = sp.global_autocorr(ramp, wq)
    assert l_ramp > 0.5

    with pytest.raises(sp.SpatialStatsError):
        sp.local_autocorr(np.ones(64), w)

    rng = np.random.default_rng(3)
    y = rng.normal(size=64)
    li = sp.local_autocorr(y, w)
    n, ybar = 64, y.mean()
    naive = np.zeros(n)
    for i in range(n):
        denom = sum((y[j] - ybar) ** 2 for j in range(n) if j != i)
        lag = sum(wt * (y[j] - ybar)
                  for j, wt in zip(w.neighbors[i], w.weights[i]))
        naive[i] = (n - 1) * (y[i] - ybar) / denom * lag
    np.testing.assert_allclose(li, naive, atol=1e-12)
    _report(f"spatial-autocorr (checker {l_mean:+.1f}, ramp {l_ramp:+.3f})")


# --- 6. Enclosure ---------------------------------------------------------

def test_enclosure_analytic_and_rotation():
    def enc(scene):
        street, buildings = scene
        seg = ug.segment_streets([street], interval=40.0)[0]
        return ug.street_profile(seg, buildings).enclosure

    assert enc(sd.gen_canyon_scene(10, 10, 10, 10)) == pytest.approx(0.5, abs=1e-12)
    assert enc(sd.gen_canyon_scene(6, 14, 5, 5)) == pytest.approx(1.0, abs=1e-12)
    base = enc(sd.gen_canyon_scene(8, 12, 6, 9))
    for deg in (15, 67, 140, 233, 311):
        rotated = enc(sd.gen_canyon_scene(8, 12, 6, 9,
                                          rotation=np.radians(deg)))
        assert abs(rotated - base) <= 1e-9
    _report("enclosure (analytic 0.5/1.0, rotation-invariant)")


# --- 7. Downstream grid (regression analog) -------------------------------

def test_downstream_density_grid(density_corpus, density_cae):
    model, _ = density_cae
    z = _encode_all(model, density_corpus.images)
    assert z.shape == (320, 80)
    results = ex.run_grid(z, density_corpus.labels, "regression", "streetnet",
                          seed=0, head_epochs=150)
    assert len(results) == 15  # 3 reducers x 5 component counts
    by_key = {(r.reducer, r.n_components): r for r in results}
    r2 = by_key[("pca_lin", 4)].metrics["test"]["r2"]
    assert r2 >= 0.7, f"pca_lin N=4 test R^2 = {r2:.4f}"
    _report(f"downstream-grid (15 cells, pca_lin N=4 test R2 {r2:.3f})")


# --- 8. Trend check (classification analog) -------------------------------

def test_frontage_accuracy_trend():
    corpus = sd.gen_frontage_corpus(320, seed=17, size=32)
    model, _ = _train_desk(corpus.images, seed=5, epochs=15)
    z = _encode_all(model, corpus.images)
    results = ex.run_grid(z, corpus.labels, "classification", "streetnet",
                          seed=0, head_epochs=150,
                          reducers=("pca_lin",), grid=(4, 64))
    acc = {r.n_components: r.metrics["test"]["accuracy"] for r in results}
    assert acc[64] >= acc[4], f"acc(64)={acc[64]:.3f} < acc(4)={acc[4]:.3f}"
    _report(f"frontage-trend (acc N=4 {acc[4]:.3f} <= N=64 {acc[64]:.3f})")


# --- 9. Determinism & formats --------------------------------------------

def test_determinism_and_formats(tmp_path, density_cae, density_corpus):
    # rasterize: byte-identical PGM across two runs from the same seed
    def make_pgm(path):
        g = sd.gen_grid_network(5, 5, spacing=300.0, jitter=25.0, seed=9)
        cx, cy = np.mean(np.array(g.bbox()).reshape(2, 2), axis=0)
        side = sd.TILE_SIDE_M
        clipped = sg.clip_bbox(g, (cx, cy), side)
        img = sg.rasterize(clipped, (cx - side / 2, cy - side / 2,
                                     cx + side / 2, cy + side / 2), size=64)
        write_pgm(img, path)

    make_pgm(tmp_path / "r1.pgm")
    make_pgm(tmp_path / "r2.pgm")
    assert (tmp_path / "r1.pgm").read_bytes() == (tmp_path / "r2.pgm").read_bytes()

    # PGM round-trip
    img = read_pgm(tmp_path / "r1.pgm")
    write_pgm(img, tmp_path / "r3.pgm")
    np.testing.assert_array_equal(read_pgm(tmp_path / "r3.pgm"), img)

    # model + PCA persistence round-trips; sweep/decode reproducible
    model, _ = density_cae
    z = _encode_all(model, density_corpus.images[:64])
    pca = lt.fit_pca(z)
    save_model(model, tmp_path / "model")
    lt.save_pca(pca, tmp_path / "pca")
    model2 = load_model(tmp_path / "model")
    pca2 = lt.load_pca(tmp_path / "pca")
    np.testing.assert_array_equal(pca2.eigenvectors.astype(np.float32),
                                  pca.eigenvectors.astype(np.float32))

    sweep_a, off_a = lt.perturb_sweep(pca2, model2.decode, 1, steps=5)
    sweep_b, off_b = lt.perturb_sweep(pca2, model2.decode, 1, steps=5)
    np.testing.assert_array_equal(sweep_a, sweep_b)
    np.testing.assert_array_equal(off_a, off_b)

    # graph JSON schema round-trip
    g = sd.gen_grid_network(3, 4, spacing=200.0, jitter=10.0, seed=2)
    sg.save_graph(g, tmp_path / "g.json")
    g2 = sg.load_graph(tmp_path / "g.json")
    np.testing.assert_allclose(g2.xy, g.xy, atol=1e-9)
    assert [e[:2] for e in g2.edges] == [e[:2] for e in g.edges]
    sg.save_graph(g2, tmp_path / "g2.json")
    assert (tmp_path / "g.json").read_bytes() == (tmp_path / "g2.json").read_bytes()
    _report("determinism-and-formats")

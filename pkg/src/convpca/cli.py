"""Command-line entry point.

Workspace convention: a directory holding ``workspace.json`` (version
"convpca/1") with relative paths to the trained model, PCA files, latent
matrix, and item metadata; produced incrementally by the subcommands and
consumed by ``serve``.
"""

import csv
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import FORMAT_VERSION
from . import experiments as exp
from . import latent as latent_mod
from . import spatialstats as spstats
from . import streetgraph as sg
from . import synthdata
from . import urbangeom
from .neural import TrainConfig, load_model, save_model, train_cae, train_mlp_head
from .raster import read_pgm, write_pgm, write_png


@click.group()
def cli():
    """ConvPCA: autoencoder + PCA pipeline over street imagery."""


@cli.command()
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def ingest(graph_path, out_path):
    """Validate a graph JSON file and write it normalized to meters."""
    g = sg.load_graph(graph_path)
    sg.save_graph(g, out_path)
    click.echo(f"{g.n_nodes} nodes, {len(g.edges)} edges -> {out_path}")


@cli.command()
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--size", default=256, show_default=True)
@click.option("--side", default=1500.0, show_default=True,
              help="tile side in meters, centered on the graph centroid")
@click.option("--png", "as_png", is_flag=True, help="write PNG instead of PGM")
def rasterize(graph_path, out_path, size, side, as_png):
    """Rasterize a street graph into a binary image."""
    g = sg.load_graph(graph_path)
    xmin, ymin, xmax, ymax = g.bbox()
    cx, cy = (xmin + xmax) / 2.0, (ymin + ymax) / 2.0
    bbox = (cx - side / 2, cy - side / 2, cx + side / 2, cy + side / 2)
    clipped = sg.clip_bbox(g, (cx, cy), side)
    image = sg.rasterize(clipped, bbox, size=size)
    (write_png if as_png else write_pgm)(image, out_path)


@cli.command()
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--cell-side", default=1500.0, show_default=True)
def stats(graph_path, out_path, cell_side):
    """Closeness centrality and per-cell network statistics (CSV)."""
    g = sg.load_graph(graph_path)
    closeness = sg.closeness_all(g)
    cells = sg.grid_stats(g, cell_side=cell_side, closeness=closeness)
    with open(out_path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["origin_x", "origin_y", "side", "node_count",
                    "intersection_density", "median_closeness", "empty"])
        for c in cells:
            w.writerow([c.origin[0], c.origin[1], c.side, c.node_count,
                        f"{c.intersection_density:.9g}",
                        "" if c.empty else f"{c.median_closeness:.9g}",
                        int(c.empty)])
    click.echo(f"{len(cells)} cells -> {out_path}")


@cli.command()
@click.option("--streets", "streets_path", required=True, type=click.Path(exists=True),
              help='JSON {"streets":[{"polyline":[[x,y],...]}]}')
@click.option("--buildings", "buildings_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--interval", default=40.0, show_default=True)
@click.option("--max-radius", default=50.0, show_default=True)
def enclosure(streets_path, buildings_path, out_path, interval, max_radius):
    """Street enclosure per 40 m segment (CSV)."""
    streets = json.loads(Path(streets_path).read_text())
    bdoc = json.loads(Path(buildings_path).read_text())
    buildings = [urbangeom.BuildingFootprint(polygon=b["polygon"], height=b["height"])
                 for b in bdoc["buildings"]]
    polylines = [s["polyline"] for s in streets["streets"]]
    segments = urbangeom.segment_streets(polylines, interval=interval)
    with open(out_path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["segment_id", "x", "y", "azimuth", "h_mean", "width",
                    "enc", "side_status"])
        for i, seg in enumerate(segments):
            res = urbangeom.street_profile(seg, buildings, max_radius=max_radius)
            w.writerow([i, f"{seg.center[0]:.6f}", f"{seg.center[1]:.6f}",
                        f"{seg.azimuth:.9f}",
                        "" if res.mean_height is None else f"{res.mean_height:.9g}",
                        "" if res.width is None else f"{res.width:.9g}",
                        "" if res.enclosure is None else f"{res.enclosure:.9g}",
                        res.side_status])
    click.echo(f"{len(segments)} segments -> {out_path}")


@cli.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True),
              help="PGM raster")
@click.option("--scheme", default="queen", type=click.Choice(["rook", "queen"]),
              show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def moran(input_path, scheme, out_path):
    """Local/global spatial autocorrelation of a raster."""
    image = read_pgm(input_path)
    w = spstats.raster_weights(image.shape[0], image.shape[1], scheme=scheme)
    li = spstats.local_autocorr(image, w)
    l_mean, l_sum = float(li.mean()), float(li.sum())
    li_path = str(Path(out_path).with_suffix(".li.npy"))
    np.save(li_path, li)
    Path(out_path).write_text(json.dumps({
        "n": w.n, "scheme": scheme, "L_mean": l_mean, "L_sum": l_sum,
        "Li_path": li_path,
    }, indent=2))
    click.echo(f"L_mean={l_mean:.6f} L_sum={l_sum:.6f}")


@cli.command()
@click.option("--kind", required=True,
              type=click.Choice(["density", "frontage", "grid", "radial"]))
@click.option("--count", default=64, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--size", default=32, show_default=True)
@click.option("--rows", default=8, show_default=True)
@click.option("--cols", default=8, show_default=True)
@click.option("--spacing", default=150.0, show_default=True)
@click.option("--jitter", default=0.0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def synth(kind, count, seed, size, rows, cols, spacing, jitter, out_path):
    """Generate a synthetic corpus or network."""
    if kind == "density":
        corpus = synthdata.gen_density_corpus(count, seed=seed, size=size)
        synthdata.write_corpus(corpus, out_path)
        items = [{"id": f"{i:04d}", "x": float(i % 25) * 1500.0,
                  "y": float(i // 25) * 1500.0, "value": float(corpus.labels[i])}
                 for i in range(count)]
        (Path(out_path) / "items.json").write_text(json.dumps(items))
    elif kind == "frontage":
        corpus = synthdata.gen_frontage_corpus(count, seed=seed, size=size)
        synthdata.write_corpus(corpus, out_path)
    elif kind == "grid":
        g = synthdata.gen_grid_network(rows, cols, spacing=spacing, jitter=jitter, seed=seed)
        sg.save_graph(g, out_path)
    else:
        g = synthdata.gen_radial_network(max(1, rows), max(3, cols), spacing=spacing, seed=seed)
        sg.save_graph(g, out_path)
    click.echo(f"wrote {kind} -> {out_path}")


def _load_corpus_images(corpus_dir):
    d = Path(corpus_dir)
    names, images = [], []
    with open(d / "labels.csv") as f:
        for row in csv.DictReader(f):
            names.append(row["image"])
            images.append(read_pgm(d / row["image"])[..., None])
    return names, np.stack(images)


@cli.command("train-cae")
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True))
@click.option("--arch", default="streetnet_desk", show_default=True)
@click.option("--epochs", default=100, show_default=True)
@click.option("--batch-size", default=32, show_default=True)
@click.option("--lr", default=0.001, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
def train_cae_cmd(corpus_dir, arch, epochs, batch_size, lr, seed, out_dir):
    """Train a convolutional autoencoder on a corpus directory."""
    _, images = _load_corpus_images(corpus_dir)
    cfg = TrainConfig(learning_rate=lr, epochs=epochs, batch_size=batch_size, seed=seed)
    model, history = train_cae(images, arch, cfg)
    save_model(model, out_dir)
    np.save(Path(out_dir) / "loss_history.npy", np.array(history))
    click.echo(f"loss {history[0]:.5f} -> {history[-1]:.5f} ({epochs} epochs)")


@cli.command()
@click.option("--model", "model_dir", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--batch-size", default=64, show_default=True)
def encode(model_dir, corpus_dir, out_path, batch_size):
    """Encode a corpus into latent codes (.npy matrix)."""
    model = load_model(model_dir)
    _, images = _load_corpus_images(corpus_dir)
    rows = [model.encode(images[s : s + batch_size])
            for s in range(0, images.shape[0], batch_size)]
    np.save(out_path, np.vstack(rows))
    click.echo(f"{images.shape[0]} items -> {out_path}")


@cli.command("fit-pca")
@click.option("--latents", "latents_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
def fit_pca_cmd(latents_path, out_dir):
    """Fit PCA over a latent matrix and persist it."""
    z = np.load(latents_path)
    model = latent_mod.fit_pca(z)
    latent_mod.save_pca(model, out_dir)
    top = ", ".join(f"{v:.3f}" for v in model.eigenvalues[:5])
    click.echo(f"dim {model.dim}; top eigenvalues: {top}")


@cli.command()
@click.option("--model", "model_dir", required=True, type=click.Path(exists=True))
@click.option("--pca", "pca_dir", required=True, type=click.Path(exists=True))
@click.option("--component", "k", default=1, show_default=True)
@click.option("--steps", default=9, show_default=True)
@click.option("--half-range", default=3.0, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--png", "as_png", is_flag=True)
def sweep(model_dir, pca_dir, k, steps, half_range, out_dir, as_png):
    """Decode a perturbation sweep of one component around the mean."""
    model = load_model(model_dir)
    pca = latent_mod.load_pca(pca_dir)
    images, offsets = latent_mod.perturb_sweep(pca, model.decode, k,
                                               half_range=half_range, steps=steps)
    d = Path(out_dir)
    d.mkdir(parents=True, exist_ok=True)
    for i in range(images.shape[0]):
        name = f"step_{i:02d}"
        if as_png:
            write_png(images[i], d / f"{name}.png")
        else:
            write_pgm(images[i], d / f"{name}.pgm")
    (d / "offsets.json").write_text(json.dumps({
        "component": k, "offsets": offsets.tolist(), "steps": steps,
    }))
    click.echo(f"{steps} steps -> {out_dir}")


@cli.command()
@click.option("--latents", "latents_path", required=True, type=click.Path(exists=True))
@click.option("--pca", "pca_dir", required=True, type=click.Path(exists=True))
@click.option("--component", "k", default=1, show_default=True)
@click.option("--count", default=5, show_default=True)
@click.option("--out", "out_path", type=click.Path())
def extremes(latents_path, pca_dir, k, count, out_path):
    """Item indices with the lowest/highest values of one component."""
    z = np.load(latents_path)
    pca = latent_mod.load_pca(pca_dir)
    v = latent_mod.project(pca, z)
    lo, hi = latent_mod.component_extremes(v, k, count)
    payload = {"component": k, "lowest": lo, "highest": hi}
    if out_path:
        Path(out_path).write_text(json.dumps(payload, indent=2))
    click.echo(json.dumps(payload))


def _load_labels(labels_path):
    vals = []
    with open(labels_path) as f:
        for row in csv.DictReader(f):
            vals.append(float(row["label"]))
    return np.array(vals)


@cli.command("train-head")
@click.option("--features", "features_path", required=True, type=click.Path(exists=True),
              help=".npy feature matrix (e.g. truncated components)")
@click.option("--labels", "labels_path", required=True, type=click.Path(exists=True))
@click.option("--task", required=True, type=click.Choice(["regression", "classification"]))
@click.option("--head-id", default="streetnet", type=click.Choice(["streetview", "streetnet"]),
              show_default=True)
@click.option("--epochs", default=200, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
def train_head_cmd(features_path, labels_path, task, head_id, epochs, seed, out_dir):
    """Train a prediction head on reduced features (70/15/15 split)."""
    x = np.load(features_path)
    y = _load_labels(labels_path)
    if task == "classification":
        y = y.astype(int)
    splits = exp.split_dataset(x.shape[0], exp.SplitSpec(seed=seed))
    cfg = TrainConfig(epochs=epochs, seed=seed)
    model, metrics = train_mlp_head(x, y, task, head_id, cfg, splits=splits)
    save_model(model, out_dir)
    (Path(out_dir) / "metrics.json").write_text(json.dumps(metrics, indent=2))
    click.echo(json.dumps(metrics.get("test", {})))


@cli.command("run-grid")
@click.option("--latents", "latents_path", required=True, type=click.Path(exists=True))
@click.option("--labels", "labels_path", required=True, type=click.Path(exists=True))
@click.option("--task", required=True, type=click.Choice(["regression", "classification"]))
@click.option("--head-id", default="streetnet", show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--epochs", default=200, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def run_grid_cmd(latents_path, labels_path, task, head_id, seed, epochs, out_path):
    """Full reducer x component-count sweep; CSV plus a rendered table."""
    z = np.load(latents_path)
    y = _load_labels(labels_path)
    if task == "classification":
        y = y.astype(int)
    results = exp.run_grid(z, y, task, head_id, seed=seed, head_epochs=epochs)
    exp.results_to_csv(results, out_path)
    table = exp.render_table(results)
    Path(out_path).with_suffix(".txt").write_text(table + "\n")
    click.echo(table)


@cli.command()
@click.option("--workspace", "workspace_dir", required=True, type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--static", "static_dir", type=click.Path(exists=True),
              help="built explorer assets to mount at /")
def serve(workspace_dir, host, port, static_dir):
    """Serve the explorer HTTP API over a trained workspace."""
    import uvicorn

    from .server import create_app

    app = create_app(workspace_dir, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)


@cli.command("init-workspace")
@click.option("--model", "model_dir", required=True, type=click.Path(exists=True))
@click.option("--pca", "pca_dir", required=True, type=click.Path(exists=True))
@click.option("--latents", "latents_path", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_dir", type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def init_workspace(model_dir, pca_dir, latents_path, corpus_dir, out_path):
    """Write a workspace manifest tying model, PCA, latents, and corpus."""
    manifest = {
        "version": FORMAT_VERSION,
        "model": str(Path(model_dir).resolve()),
        "pca": str(Path(pca_dir).resolve()),
        "latents": str(Path(latents_path).resolve()),
        "corpus": str(Path(corpus_dir).resolve()) if corpus_dir else None,
    }
    Path(out_path).write_text(json.dumps(manifest, indent=2))
    click.echo(f"workspace -> {out_path}")


def main(argv=None):
    try:
        return cli.main(args=argv, standalone_mode=False) or 0
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.exceptions.Abort:
        return 1
    except click.ClickException as e:
        e.show(file=sys.stderr)
        return e.exit_code
    except (ValueError, OSError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

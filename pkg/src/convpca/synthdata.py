"""Deterministic synthetic generators: street networks, density-labelled
raster corpora, canyon scenes for enclosure, and a 4-class frontage-style
image corpus.  Everything is a pure function of (parameters, seed)."""

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .raster import write_pgm
from .streetgraph import StreetGraph, rasterize
from .urbangeom import BuildingFootprint

TILE_SIDE_M = 1500.0


def gen_grid_network(rows, cols, spacing=100.0, jitter=0.0, seed=0, origin=(0.0, 0.0)):
    """Jittered lattice of intersections with 4-neighbour street edges."""
    if rows < 2 or cols < 2:
        raise ValueError("need at least a 2x2 lattice")
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    rng = np.random.default_rng(seed)
    ox, oy = origin
    ids, xy = [], []
    for r in range(rows):
        for c in range(cols):
            ids.append(f"n{r}_{c}")
            jx, jy = (rng.normal(0.0, jitter, 2) if jitter > 0 else (0.0, 0.0))
            xy.append((ox + c * spacing + jx, oy + r * spacing + jy))
    xy = np.array(xy)
    edges = []
    for r in range(rows):
        for c in range(cols):
            i = r * cols + c
            if c + 1 < cols:
                j = i + 1
                edges.append(_edge(i, j, xy))
            if r + 1 < rows:
                j = i + cols
                edges.append(_edge(i, j, xy))
    return StreetGraph(node_ids=ids, xy=xy, edges=edges)


def gen_radial_network(rings, spokes, spacing=100.0, seed=0, origin=(0.0, 0.0)):
    """Concentric ring-and-spoke network (rings polygonal, center node)."""
    if rings < 1 or spokes < 3:
        raise ValueError("need >= 1 ring and >= 3 spokes")
    ox, oy = origin
    ids, xy = ["center"], [(ox, oy)]
    for ring in range(1, rings + 1):
        rad = ring * spacing
        for s in range(spokes):
            a = 2 * math.pi * s / spokes
            ids.append(f"r{ring}_{s}")
            xy.append((ox + rad * math.cos(a), oy + rad * math.sin(a)))
    xy = np.array(xy)
    edges = []
    for ring in range(1, rings + 1):
        base = 1 + (ring - 1) * spokes
        for s in range(spokes):
            i = base + s
            edges.append(_edge(i, base + (s + 1) % spokes, xy))  # ring edge
            inner = 0 if ring == 1 else i - spokes
            edges.append(_edge(i, inner, xy))                    # spoke edge
    return StreetGraph(node_ids=ids, xy=xy, edges=edges)


def _edge(i, j, xy):
    length = float(np.hypot(*(xy[j] - xy[i])))
    return (i, j, length, np.vstack([xy[i], xy[j]]))


@dataclass
class DensityCorpus:
    images: np.ndarray       # [n, size, size, 1]
    labels: np.ndarray       # nodes per km^2, by construction
    graphs: list
    spec: dict
    label_min: float = 0.0
    label_max: float = 0.0


def gen_density_corpus(count, density_range=(10.0, 220.0), seed=0, size=32):
    """Mixture of grid/radial tiles with construction-known node counts.

    Labels are exact intersection densities (nodes / 2.25 km^2); min-max
    normalization bounds ship in the metadata.
    """
    if count < 10:
        raise ValueError("count must be >= 10")
    rng = np.random.default_rng(seed)
    area_km2 = (TILE_SIDE_M / 1000.0) ** 2
    lo, hi = density_range
    images, labels, graphs = [], [], []
    for i in range(count):
        target_nodes = (lo + (hi - lo) * rng.random()) * area_km2
        if rng.random() < 0.5:
            side = max(2, int(round(math.sqrt(target_nodes))))
            spacing = TILE_SIDE_M / side
            g = gen_grid_network(side, side, spacing=spacing,
                                 jitter=spacing * 0.05, seed=int(rng.integers(2**31)))
        else:
            spokes = int(rng.integers(4, 9))
            rings = max(1, int(round((target_nodes - 1) / spokes)))
            spacing = (TILE_SIDE_M / 2.0) / (rings + 1)
            g = gen_radial_network(rings, spokes, spacing=spacing,
                                   seed=int(rng.integers(2**31)))
        bbox = _tile_bbox(g)
        images.append(rasterize(g, bbox, size=size)[..., None])
        labels.append(g.n_nodes / area_km2)
        graphs.append(g)
    labels = np.array(labels)
    return DensityCorpus(images=np.stack(images), labels=labels, graphs=graphs,
                         spec={"kind": "density_corpus", "count": count,
                               "density_range": list(density_range),
                               "seed": seed, "size": size},
                         label_min=float(labels.min()), label_max=float(labels.max()))


def _tile_bbox(graph):
    xmin, ymin, xmax, ymax = graph.bbox()
    cx, cy = (xmin + xmax) / 2.0, (ymin + ymax) / 2.0
    half = TILE_SIDE_M / 2.0
    return (cx - half, cy - half, cx + half, cy + half)


def gen_canyon_scene(h_left, h_right, half_width_left, half_width_right,
                     rotation=0.0, street_length=40.0, center=(0.0, 0.0)):
    """Straight street with one rectangular building on each side.

    Analytic enclosure: ((h_left + h_right)/2) / (half_width_left +
    half_width_right).  ``rotation`` is in radians, about the street center.
    Returns (street polyline, buildings).  Heights <= 0 drop that side's
    building (used by the frontage generator).
    """
    for val in (half_width_left, half_width_right, street_length):
        if val <= 0:
            raise ValueError("dimensions must be positive")
    cx, cy = center
    cosr, sinr = math.cos(rotation), math.sin(rotation)

    def rot(p):
        x, y = p
        return (cx + x * cosr - y * sinr, cy + x * sinr + y * cosr)

    half_len = street_length / 2.0
    street = np.array([rot((0.0, -half_len)), rot((0.0, half_len))])
    depth = 10.0
    buildings = []
    # street runs along +y pre-rotation; left is -x, right is +x
    if h_left > 0:
        x0, x1 = -half_width_left - depth, -half_width_left
        ring = [rot((x0, -half_len)), rot((x1, -half_len)),
                rot((x1, half_len)), rot((x0, half_len))]
        buildings.append(BuildingFootprint(polygon=np.array(ring), height=h_left))
    if h_right > 0:
        x0, x1 = half_width_right, half_width_right + depth
        ring = [rot((x0, -half_len)), rot((x1, -half_len)),
                rot((x1, half_len)), rot((x0, half_len))]
        buildings.append(BuildingFootprint(polygon=np.array(ring), height=h_right))
    return street, buildings


FRONTAGE_CLASSES = ("both_active", "single_active", "non_active", "non_urban")


@dataclass
class FrontageCorpus:
    images: np.ndarray    # [n, size, size, 1]
    labels: np.ndarray    # ints in [0, 4)
    spec: dict


def gen_frontage_corpus(count, seed=0, size=32):
    """4-class synthetic scene corpus rendered as shaded top-down rasters.

    both_active: buildings flanking both sides; single_active: one side;
    non_active: low blank walls both sides; non_urban: street only.
    """
    if count < 8:
        raise ValueError("count must be >= 8")
    rng = np.random.default_rng(seed)
    images, labels = [], []
    for i in range(count):
        label = int(rng.integers(0, 4))
        img = np.zeros((size, size))
        img[:, size // 2] = 1.0  # the street
        wall = int(rng.integers(2, 5))
        gap = int(rng.integers(2, 6))

        def block(col0, col1, level):
            img[2 : size - 2, max(col0, 0) : min(col1, size)] = level

        if label == 0:      # tall active buildings both sides
            block(size // 2 - gap - wall, size // 2 - gap, 0.9)
            block(size // 2 + gap + 1, size // 2 + gap + 1 + wall, 0.9)
        elif label == 1:    # one side only
            if rng.random() < 0.5:
                block(size // 2 - gap - wall, size // 2 - gap, 0.9)
            else:
                block(size // 2 + gap + 1, size // 2 + gap + 1 + wall, 0.9)
        elif label == 2:    # low blank walls both sides
            block(size // 2 - gap - wall, size // 2 - gap, 0.35)
            block(size // 2 + gap + 1, size // 2 + gap + 1 + wall, 0.35)
        # label 3: nothing but the street
        images.append(img[..., None])
        labels.append(label)
    return FrontageCorpus(images=np.stack(images), labels=np.array(labels, dtype=int),
                          spec={"kind": "frontage_corpus", "count": count,
                                "seed": seed, "size": size})


def write_corpus(corpus, directory):
    """Corpus directory layout: images/*.pgm, labels.csv, spec.json."""
    d = Path(directory)
    (d / "images").mkdir(parents=True, exist_ok=True)
    width = len(str(len(corpus.labels) - 1))
    with open(d / "labels.csv", "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["image", "label"])
        for i, label in enumerate(corpus.labels):
            name = f"{i:0{width}d}.pgm"
            write_pgm(corpus.images[i], d / "images" / name)
            writer.writerow([f"images/{name}", label])
    spec = dict(corpus.spec)
    if hasattr(corpus, "label_min"):
        spec["label_min"] = corpus.label_min
        spec["label_max"] = corpus.label_max
    (d / "spec.json").write_text(json.dumps(spec, indent=2))
    return d

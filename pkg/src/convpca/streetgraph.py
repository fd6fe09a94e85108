"""Street-network graphs: loading, tile clipping, rasterization, and exact
network statistics (closeness centrality, per-cell densities).

Graphs are spatial: node coordinates in meters (lon/lat inputs are locally
projected).  Rasterization draws 1-pixel Bresenham strokes, streets = 1 on
background 0, pixel (0, 0) at the north-west corner.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from .accel import maybe_jit

EARTH_RADIUS_M = 6_371_000.0


class GraphError(ValueError):
    pass


@dataclass
class StreetGraph:
    node_ids: list
    xy: np.ndarray          # [n, 2] meters
    edges: list             # (u_idx, v_idx, length, polyline [m, 2])
    crs_note: str = "meters"

    @property
    def n_nodes(self):
        return len(self.node_ids)

    def bbox(self):
        if self.n_nodes == 0:
            return (0.0, 0.0, 0.0, 0.0)
        pts = [self.xy]
        for _, _, _, poly in self.edges:
            pts.append(poly)
        allp = np.vstack(pts)
        return (allp[:, 0].min(), allp[:, 1].min(), allp[:, 0].max(), allp[:, 1].max())


def _poly_length(poly):
    d = np.diff(poly, axis=0)
    return float(np.hypot(d[:, 0], d[:, 1]).sum())


def load_graph(document):
    """Validate a graph JSON document (dict or path) into a StreetGraph."""
    if hasattr(document, "read"):
        document = json.load(document)
    elif not isinstance(document, dict):
        with open(document) as f:
            document = json.load(f)
    crs = document.get("crs", "meters")
    if crs not in ("meters", "wgs84"):
        raise GraphError(f"unknown crs {crs!r}")
    ids, coords = [], []
    index = {}
    for nd in document.get("nodes", []):
        nid = str(nd["id"])
        if nid in index:
            raise GraphError(f"duplicate node id {nid!r}")
        x, y = float(nd["x"]), float(nd["y"])
        if not (math.isfinite(x) and math.isfinite(y)):
            raise GraphError(f"non-finite coordinate on node {nid!r}")
        index[nid] = len(ids)
        ids.append(nid)
        coords.append((x, y))
    if not ids:
        raise GraphError("graph has no nodes")
    xy = np.array(coords, dtype=np.float64).reshape(len(ids), 2)

    if crs == "wgs84":
        # local equirectangular projection about the centroid; adequate at
        # 1.5 km tile scale
        lon0, lat0 = xy.mean(axis=0)
        cos0 = math.cos(math.radians(lat0))

        def proj(pts):
            pts = np.asarray(pts, dtype=np.float64)
            out = np.empty_like(pts)
            out[..., 0] = np.radians(pts[..., 0] - lon0) * cos0 * EARTH_RADIUS_M
            out[..., 1] = np.radians(pts[..., 1] - lat0) * EARTH_RADIUS_M
            return out

        xy = proj(xy)
    else:
        proj = None

    edges = []
    for ed in document.get("edges", []):
        u, v = str(ed["u"]), str(ed["v"])
        for nid in (u, v):
            if nid not in index:
                raise GraphError(f"edge references unknown node id {nid!r}")
        ui, vi = index[u], index[v]
        had_geom = bool(ed.get("geometry"))
        if had_geom:
            poly = np.array(ed["geometry"], dtype=np.float64)
            if proj is not None:
                poly = proj(poly)
        else:
            poly = np.vstack([xy[ui], xy[vi]])
        length = float(ed["length"]) if ed.get("length") is not None else _poly_length(poly)
        if not math.isfinite(length) or length <= 0:
            raise GraphError(f"edge {u!r}-{v!r} has non-positive length")
        arc = _poly_length(poly)
        if (had_geom and ed.get("length") is not None and proj is None
                and arc > 0 and abs(length - arc) > 1e-3 * arc):
            raise GraphError(f"edge {u!r}-{v!r} length {length} deviates >0.1% "
                             f"from polyline arc length {arc}")
        edges.append((ui, vi, length, poly))
    return StreetGraph(node_ids=ids, xy=xy, edges=edges,
                       crs_note="projected from wgs84" if proj else "meters")


def save_graph(graph, path):
    doc = {
        "crs": "meters",
        "nodes": [{"id": nid, "x": float(x), "y": float(y)}
                  for nid, (x, y) in zip(graph.node_ids, graph.xy)],
        "edges": [{"u": graph.node_ids[u], "v": graph.node_ids[v],
                   "length": float(l), "geometry": poly.tolist()}
                  for u, v, l, poly in graph.edges],
    }
    with open(path, "w") as f:
        json.dump(doc, f)


# --- clipping -------------------------------------------------------------

def _clip_segment(p0, p1, box):
    """Liang-Barsky segment/box clip; returns (q0, q1) or None."""
    xmin, ymin, xmax, ymax = box
    x0, y0 = p0
    dx, dy = p1[0] - x0, p1[1] - y0
    t0, t1 = 0.0, 1.0
    for p, q in ((-dx, x0 - xmin), (dx, xmax - x0), (-dy, y0 - ymin), (dy, ymax - y0)):
        if p == 0.0:
            if q < 0.0:
                return None
            continue
        r = q / p
        if p < 0.0:
            if r > t1:
                return None
            t0 = max(t0, r)
        else:
            if r < t0:
                return None
            t1 = min(t1, r)
    if t0 > t1:
        return None
    return (np.array([x0 + t0 * dx, y0 + t0 * dy]),
            np.array([x0 + t1 * dx, y0 + t1 * dy]))


def clip_bbox(graph, center, side=1500.0):
    """Clip to a square box; boundary-crossing edges get synthetic nodes
    exactly on the boundary, lengths recomputed from clipped geometry."""
    if side <= 0:
        raise GraphError("side must be positive")
    cx, cy = center
    half = side / 2.0
    box = (cx - half, cy - half, cx + half, cy + half)

    inside = [(box[0] <= x <= box[2] and box[1] <= y <= box[3]) for x, y in graph.xy]
    ids, coords = [], []
    remap = {}
    for i, keep in enumerate(inside):
        if keep:
            remap[i] = len(ids)
            ids.append(graph.node_ids[i])
            coords.append(graph.xy[i])
    synth = {}

    def boundary_node(pt):
        key = (round(float(pt[0]), 9), round(float(pt[1]), 9))
        if key not in synth:
            synth[key] = len(ids)
            ids.append(f"b{len(synth)}")
            coords.append(np.asarray(pt, dtype=np.float64))
        return synth[key]

    edges = []
    for u, v, _, poly in graph.edges:
        pieces = []  # runs of clipped points forming connected sub-polylines
        current = []
        for a, b in zip(poly[:-1], poly[1:]):
            seg = _clip_segment(a, b, box)
            if seg is None:
                if len(current) >= 2:
                    pieces.append(np.array(current))
                current = []
                continue
            q0, q1 = seg
            if not current:
                current = [q0]
            elif not np.allclose(current[-1], q0):
                if len(current) >= 2:
                    pieces.append(np.array(current))
                current = [q0]
            current.append(q1)
        if len(current) >= 2:
            pieces.append(np.array(current))
        for piece in pieces:
            length = _poly_length(piece)
            if length <= 0:
                continue
            start, end = piece[0], piece[-1]
            si = remap[u] if (inside[u] and np.allclose(start, graph.xy[u])) else boundary_node(start)
            ei = remap[v] if (inside[v] and np.allclose(end, graph.xy[v])) else boundary_node(end)
            edges.append((si, ei, length, piece))
    xy = np.array(coords, dtype=np.float64).reshape(len(ids), 2)
    return StreetGraph(node_ids=ids, xy=xy, edges=edges, crs_note=graph.crs_note)


# --- rasterization --------------------------------------------------------

def _draw_segments(image, rc):
    """Bresenham strokes for integer (row, col) endpoint pairs [k, 4]."""
    size_r, size_c = image.shape
    for s in range(rc.shape[0]):
        r0, c0, r1, c1 = rc[s, 0], rc[s, 1], rc[s, 2], rc[s, 3]
        dr = abs(r1 - r0)
        dc = abs(c1 - c0)
        sr = 1 if r0 < r1 else -1
        sc = 1 if c0 < c1 else -1
        err = dc - dr
        r, c = r0, c0
        while True:
            if 0 <= r < size_r and 0 <= c < size_c:
                image[r, c] = 1.0
            if r == r1 and c == c1:
                break
            e2 = 2 * err
            if e2 > -dr:
                err -= dr
                c += sc
            if e2 < dc:
                err += dc
                r += sr
    return image


_draw_segments = maybe_jit(_draw_segments)


def rasterize(graph, bbox, size=256):
    """Render edge polylines into a size x size binary raster."""
    xmin, ymin, xmax, ymax = bbox
    if xmax <= xmin or ymax <= ymin:
        raise GraphError("bbox area must be positive")
    image = np.zeros((size, size))
    if not graph.edges:
        return image
    sx = size / (xmax - xmin)
    sy = size / (ymax - ymin)
    segs = []
    for _, _, _, poly in graph.edges:
        cols = np.clip(np.floor((poly[:, 0] - xmin) * sx), 0, size - 1).astype(np.int64)
        rows = np.clip(np.floor((ymax - poly[:, 1]) * sy), 0, size - 1).astype(np.int64)
        for i in range(len(poly) - 1):
            segs.append((rows[i], cols[i], rows[i + 1], cols[i + 1]))
    rc = np.array(segs, dtype=np.int64).reshape(len(segs), 4)
    return _draw_segments(image, rc)


# --- network statistics ---------------------------------------------------

def _adjacency(graph):
    n = graph.n_nodes
    best = {}
    for u, v, length, _ in graph.edges:
        if length < 0:
            raise GraphError("negative edge length")
        key = (u, v) if u <= v else (v, u)
        if key not in best or length < best[key]:
            best[key] = length  # parallel edges: keep the shortest
    rows, cols, vals = [], [], []
    for (u, v), length in best.items():
        rows += [u, v]
        cols += [v, u]
        vals += [length, length]
    return csr_matrix((vals, (rows, cols)), shape=(n, n))


def closeness_all(graph):
    """Length-weighted closeness per node, normalized per connected
    component: C(u) = (n_c - 1) / sum of distances within u's component.
    Isolated nodes get 0."""
    n = graph.n_nodes
    if n == 0:
        return np.array([])
    adj = _adjacency(graph)
    n_comp, labels = connected_components(adj, directed=False)
    dist = dijkstra(adj, directed=False)
    closeness = np.zeros(n)
    for comp in range(n_comp):
        members = np.flatnonzero(labels == comp)
        if members.size < 2:
            continue
        sub = dist[np.ix_(members, members)]
        totals = sub.sum(axis=0)
        closeness[members] = (members.size - 1) / totals
    return closeness


@dataclass
class GridCell:
    origin: tuple            # (x, y) minimum corner, meters
    side: float              # meters
    node_count: int
    intersection_density: float  # nodes per km^2
    median_closeness: float
    empty: bool = False
    node_indices: list = field(default_factory=list)


def grid_stats(graph, cell_side=1500.0, closeness=None):
    """Per-cell node count, intersection density, and median closeness.

    Closeness is computed on the full graph (global measure) before
    gridding.  Grid origin anchors at the node bounding-box minimum corner.
    """
    if cell_side <= 0:
        raise GraphError("cell_side must be positive")
    if graph.n_nodes == 0:
        return []
    if closeness is None:
        closeness = closeness_all(graph)
    xmin, ymin = graph.xy[:, 0].min(), graph.xy[:, 1].min()
    xmax, ymax = graph.xy[:, 0].max(), graph.xy[:, 1].max()
    ncols = max(1, math.ceil((xmax - xmin) / cell_side + 1e-12))
    nrows = max(1, math.ceil((ymax - ymin) / cell_side + 1e-12))
    col = np.minimum(((graph.xy[:, 0] - xmin) / cell_side).astype(int), ncols - 1)
    row = np.minimum(((graph.xy[:, 1] - ymin) / cell_side).astype(int), nrows - 1)
    area_km2 = (cell_side / 1000.0) ** 2
    cells = []
    for r in range(nrows):
        for c in range(ncols):
            members = np.flatnonzero((row == r) & (col == c))
            origin = (xmin + c * cell_side, ymin + r * cell_side)
            if members.size == 0:
                cells.append(GridCell(origin, cell_side, 0, 0.0, float("nan"), empty=True))
                continue
            med = float(np.median(closeness[members]))
            cells.append(GridCell(origin, cell_side, int(members.size),
                                  members.size / area_km2, med,
                                  node_indices=members.tolist()))
    return cells

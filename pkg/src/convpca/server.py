"""HTTP API for the latent-space explorer.

Serves a trained workspace read-only: component metadata, latent rows,
extremes, live decodes of component vectors, a point map per component,
and source images.  Static explorer assets (when built) are mounted at /.
"""

import base64
import csv
import json
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import FORMAT_VERSION
from .latent import component_extremes, inverse_project, load_pca, project
from .neural import load_model
from .raster import encode_png, read_pgm


class DecodeRequest(BaseModel):
    values: list[float]


class Workspace:
    def __init__(self, directory):
        d = Path(directory)
        manifest_path = d / "workspace.json" if d.is_dir() else d
        try:
            manifest = json.loads(manifest_path.read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ValueError(f"cannot read workspace manifest: {e}") from e
        if manifest.get("version") != FORMAT_VERSION:
            raise ValueError(f"unsupported workspace version {manifest.get('version')!r}")
        base = manifest_path.parent
        self.model = load_model(_resolve(base, manifest["model"]))
        self.pca = load_pca(_resolve(base, manifest["pca"]))
        self.latents = np.load(_resolve(base, manifest["latents"]))
        if self.latents.shape[1] != self.pca.dim:
            raise ValueError("latent width does not match PCA dimension")
        self.components = project(self.pca, self.latents)
        self.corpus = _resolve(base, manifest["corpus"]) if manifest.get("corpus") else None
        self.items = self._load_items()

    def _load_items(self):
        items = []
        names = []
        if self.corpus and (self.corpus / "labels.csv").exists():
            with open(self.corpus / "labels.csv") as f:
                names = [row["image"] for row in csv.DictReader(f)]
        coords = {}
        if self.corpus and (self.corpus / "items.json").exists():
            for it in json.loads((self.corpus / "items.json").read_text()):
                coords[it["id"]] = (it.get("x"), it.get("y"))
        for i in range(self.latents.shape[0]):
            item_id = f"{i:04d}"
            x, y = coords.get(item_id, (None, None))
            items.append({
                "id": item_id,
                "image": names[i] if i < len(names) else None,
                "x": x, "y": y,
            })
        return items

    def decode_values(self, values):
        v = np.asarray(values, dtype=np.float64)
        if v.ndim != 1 or v.size > self.pca.dim:
            raise ValueError(f"expected <= {self.pca.dim} component values")
        z = inverse_project(self.pca, v[None, :])
        return self.model.decode(z)[0]


def _resolve(base, path):
    p = Path(path)
    return p if p.is_absolute() else base / p


def create_app(workspace_dir, static_dir=None):
    ws = Workspace(workspace_dir)
    app = FastAPI(title="convpca explorer", version=FORMAT_VERSION)

    @app.get("/api/health")
    def health():
        return {"status": "ok", "version": FORMAT_VERSION,
                "items": len(ws.items), "components": int(ws.pca.dim)}

    @app.get("/api/components")
    def components():
        return {"count": int(ws.pca.dim),
                "eigenvalues": ws.pca.eigenvalues.tolist()}

    @app.get("/api/latents")
    def latents(limit: int = 100):
        limit = max(0, min(limit, ws.components.shape[0]))
        rows = []
        for i in range(limit):
            it = ws.items[i]
            rows.append({"id": it["id"], "x": it["x"], "y": it["y"],
                         "values": ws.components[i].tolist()})
        return {"rows": rows}

    @app.get("/api/extremes/{k}")
    def extremes(k: int, n: int = 5):
        if not (1 <= k <= ws.pca.dim):
            raise HTTPException(404, f"component {k} out of range")
        try:
            lo, hi = component_extremes(ws.components, k, n)
        except ValueError as e:
            raise HTTPException(400, str(e))
        def describe(idx):
            return [{"id": ws.items[i]["id"],
                     "value": float(ws.components[i, k - 1]),
                     "image_url": f"/api/items/{ws.items[i]['id']}/image"}
                    for i in idx]
        return {"component": k, "lowest": describe(lo), "highest": describe(hi)}

    @app.post("/api/decode")
    def decode(req: DecodeRequest, fmt: str = "png"):
        try:
            image = ws.decode_values(req.values)
        except ValueError as e:
            raise HTTPException(400, str(e))
        png = encode_png(image)
        if fmt == "b64":
            return {"png_base64": base64.b64encode(png).decode()}
        return Response(content=png, media_type="image/png")

    @app.get("/api/map/{k}")
    def component_map(k: int):
        if not (1 <= k <= ws.pca.dim):
            raise HTTPException(404, f"component {k} out of range")
        points = [{"id": it["id"], "x": it["x"], "y": it["y"],
                   "value": float(ws.components[i, k - 1])}
                  for i, it in enumerate(ws.items) if it["x"] is not None]
        return {"component": k, "points": points}

    @app.get("/api/items/{item_id}/image")
    def item_image(item_id: str):
        match = next((it for it in ws.items if it["id"] == item_id), None)
        if match is None or match["image"] is None or ws.corpus is None:
            raise HTTPException(404, f"no image for item {item_id!r}")
        image = read_pgm(ws.corpus / match["image"])
        return Response(content=encode_png(image), media_type="image/png")

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="explorer")
    return app

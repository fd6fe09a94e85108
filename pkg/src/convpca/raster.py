"""Raster image I/O: binary PGM (P5) and PNG.

Images are float arrays in [0,1]; files store uint8 with maxval 255
(streets = 255 on black background).
"""

import io

import numpy as np


def to_uint8(image):
    arr = np.asarray(image, dtype=np.float64)
    return np.clip(np.rint(arr * 255.0), 0, 255).astype(np.uint8)


def write_pgm(image, path):
    arr = to_uint8(image)
    if arr.ndim == 3:
        if arr.shape[2] != 1:
            raise ValueError("PGM is single-channel")
        arr = arr[:, :, 0]
    h, w = arr.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode())
        f.write(arr.tobytes())


def read_pgm(path):
    with open(path, "rb") as f:
        data = f.read()
    if not data.startswith(b"P5"):
        raise ValueError("not a binary PGM (P5) file")
    # header = magic, width, height, maxval; comments allowed
    fields, pos = [], 2
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        fields.append(int(data[start:pos]))
    pos += 1  # single whitespace after maxval
    w, h, maxval = fields
    arr = np.frombuffer(data[pos : pos + w * h], dtype=np.uint8).reshape(h, w)
    return arr.astype(np.float64) / float(maxval)


def encode_png(image):
    """Encode a [0,1] float image (HxW or HxWxC) to PNG bytes."""
    from PIL import Image

    arr = to_uint8(image)
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    mode = "L" if arr.ndim == 2 else "RGB"
    buf = io.BytesIO()
    Image.fromarray(arr, mode=mode).save(buf, format="PNG")
    return buf.getvalue()


def write_png(image, path):
    with open(path, "wb") as f:
        f.write(encode_png(image))

"""The two convolutional autoencoder architectures plus desk-scale variants.

streetview: 224x224x3, VGG-style stride-1 3x3 convs with 2x2 max-pool at
block boundaries; decoder mirrors with nearest-neighbour upsampling.

streetnet: 256x256x1, five stride-2 convs (15,15,15,10,10 filters) down to
8x8x10 = 640 latent dims; decoder is five stride-2 transposed convs.

The *_desk variants halve depth/filters and take 32x32 inputs so the full
pipeline runs in seconds; they share every layer kind with the full nets.
"""

from dataclasses import dataclass, field

import numpy as np

from .layers import (Conv2D, ConvTranspose2D, Dropout, Flatten, MaxPool2x2,
                     ReLU, Reshape, Sequential, Sigmoid, Upsample2x)

# (input_hw, channels, encoder spec, decoder spec)
# encoder tokens: ("C", filters, stride) conv+relu, ("P",) maxpool
# decoder tokens: ("TC", filters, stride) transposed conv+relu,
#                 ("U",) upsample, ("C", filters, 1) conv+relu
_ARCHS = {
    "streetview": {
        "input_hw": 224,
        "channels": 3,
        "encoder": [("C", 64, 1), ("C", 64, 1), ("P",),
                    ("C", 128, 1), ("C", 128, 1), ("P",),
                    ("C", 256, 1), ("C", 256, 1), ("P",),
                    ("C", 512, 1), ("C", 512, 1), ("C", 512, 1), ("P",),
                    ("C", 512, 1), ("C", 512, 1), ("C", 512, 1), ("P",)],
        "decoder": [("U",), ("C", 512, 1), ("C", 512, 1), ("C", 512, 1),
                    ("U",), ("C", 512, 1), ("C", 512, 1), ("C", 512, 1),
                    ("U",), ("C", 256, 1), ("C", 256, 1),
                    ("U",), ("C", 128, 1), ("C", 128, 1),
                    ("U",), ("C", 64, 1), ("C", 64, 1)],
        "latent_target": 4096,
    },
    "streetnet": {
        "input_hw": 256,
        "channels": 1,
        "encoder": [("C", 15, 2), ("C", 15, 2), ("C", 15, 2),
                    ("C", 10, 2), ("C", 10, 2)],
        "decoder": [("TC", 10, 2), ("TC", 10, 2), ("TC", 15, 2), ("TC", 15, 2)],
        "latent_target": 640,
    },
    "streetview_desk": {
        "input_hw": 32,
        "channels": 3,
        "encoder": [("C", 8, 1), ("P",), ("C", 16, 1), ("P",), ("C", 16, 1), ("P",)],
        "decoder": [("U",), ("C", 16, 1), ("U",), ("C", 16, 1), ("U",), ("C", 8, 1)],
        "latent_target": None,
    },
    "streetnet_desk": {
        "input_hw": 32,
        "channels": 1,
        "encoder": [("C", 8, 2), ("C", 8, 2), ("C", 5, 2)],
        "decoder": [("TC", 8, 2), ("TC", 8, 2)],
        "latent_target": None,
    },
}

ARCH_IDS = tuple(_ARCHS)


@dataclass
class CaeModel:
    arch_id: str
    encoder: Sequential
    decoder: Sequential
    input_hw: int
    channels: int
    latent_hw: int
    latent_channels: int
    seed: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def latent_dim(self):
        return self.latent_hw * self.latent_hw * self.latent_channels

    def encode(self, batch):
        """batch NHWC in [0,1] -> latent matrix [n, latent_dim]."""
        return self.encoder.forward(np.asarray(batch, dtype=np.float64))

    def decode(self, latents):
        """latent matrix [n, latent_dim] -> reconstructions NHWC in [0,1]."""
        return self.decoder.forward(np.asarray(latents, dtype=np.float64))

    def forward(self, batch, train=False):
        x = np.asarray(batch, dtype=np.float64)
        if x.shape[1:] != (self.input_hw, self.input_hw, self.channels):
            raise ValueError(
                f"arch {self.arch_id!r} expects {self.input_hw}x{self.input_hw}"
                f"x{self.channels} inputs, got {x.shape[1:]}")
        z = self.encoder.forward(x, train=train)
        return z, self.decoder.forward(z, train=train)

    @property
    def params(self):
        return self.encoder.params + self.decoder.params

    @property
    def grads(self):
        return self.encoder.grads + self.decoder.grads


def build_cae(arch_id, seed=0):
    if arch_id not in _ARCHS:
        raise ValueError(f"unknown arch {arch_id!r}; known: {sorted(_ARCHS)}")
    spec = _ARCHS[arch_id]
    rng = np.random.default_rng(seed)
    hw, cin0 = spec["input_hw"], spec["channels"]

    enc_layers = []
    cin, h = cin0, hw
    for tok in spec["encoder"]:
        if tok[0] == "C":
            _, f, s = tok
            enc_layers += [Conv2D(cin, f, stride=s, rng=rng), ReLU()]
            cin, h = f, h // s if s > 1 else h
        elif tok[0] == "P":
            enc_layers.append(MaxPool2x2())
            h //= 2
    latent_hw, latent_c = h, cin
    enc_layers.append(Flatten())

    dec_layers = [Reshape((latent_hw, latent_hw, latent_c))]
    for tok in spec["decoder"]:
        if tok[0] == "TC":
            _, f, s = tok
            dec_layers += [ConvTranspose2D(cin, f, stride=s, rng=rng), ReLU()]
            cin = f
        elif tok[0] == "U":
            dec_layers.append(Upsample2x())
        elif tok[0] == "C":
            _, f, s = tok
            dec_layers += [Conv2D(cin, f, stride=1, rng=rng), ReLU()]
            cin = f
    # final projection back to image channels; sigmoid keeps outputs in [0,1]
    if any(t[0] == "TC" for t in spec["decoder"]):
        dec_layers += [ConvTranspose2D(cin, cin0, stride=2, rng=rng), Sigmoid()]
    else:
        dec_layers += [Conv2D(cin, cin0, stride=1, rng=rng), Sigmoid()]

    model = CaeModel(arch_id=arch_id, encoder=Sequential(enc_layers),
                     decoder=Sequential(dec_layers), input_hw=hw,
                     channels=cin0, latent_hw=latent_hw,
                     latent_channels=latent_c, seed=seed)
    model.meta["latent_target"] = spec["latent_target"]
    model.meta["latent_dim"] = model.latent_dim
    return model

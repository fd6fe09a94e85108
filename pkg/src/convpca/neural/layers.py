"""Differentiable layers with explicit forward/backward passes.

Every layer exposes ``forward(x, train=False)`` and ``backward(dy)``;
parameters and their gradients live in the aligned lists ``params`` and
``grads``.  Activations are layers of their own so gradient checking can
exercise each kind in isolation.
"""

import numpy as np

from .kernels import conv_fwd, conv_bwd_data, conv_bwd_weights, _out_size


class Layer:
    params: list
    grads: list

    def __init__(self):
        self.params = []
        self.grads = []

    def forward(self, x, train=False):
        raise NotImplementedError

    def backward(self, dy):
        raise NotImplementedError


def kaiming_uniform(rng, shape, fan_in):
    bound = np.sqrt(6.0 / fan_in)
    return rng.uniform(-bound, bound, size=shape)


class Conv2D(Layer):
    """3x3 (by default) convolution, NHWC, same padding."""

    def __init__(self, cin, cout, k=3, stride=1, rng=None):
        super().__init__()
        self.k, self.stride, self.pad = k, stride, k // 2
        self.cin, self.cout = cin, cout
        rng = rng or np.random.default_rng(0)
        self.w = kaiming_uniform(rng, (k, k, cin, cout), k * k * cin)
        self.b = np.zeros(cout)
        self.params = [self.w, self.b]
        self.grads = [np.zeros_like(self.w), np.zeros_like(self.b)]

    def forward(self, x, train=False):
        self._x = x
        return conv_fwd(x, self.w, self.b, self.stride, self.pad)

    def backward(self, dy):
        self.grads[0][...] = conv_bwd_weights(self._x, dy, self.w.shape, self.stride, self.pad)
        self.grads[1][...] = dy.sum(axis=(0, 1, 2))
        return conv_bwd_data(dy, self.w, self._x.shape, self.stride, self.pad)

    def out_shape(self, h, w):
        return (_out_size(h, self.k, self.stride, self.pad),
                _out_size(w, self.k, self.stride, self.pad), self.cout)


class ConvTranspose2D(Layer):
    """Stride-2 transposed convolution that exactly doubles spatial size.

    Stored as the weight of the adjoint convolution (cout -> cin), so the
    forward pass is conv_bwd_data and the backward pass is conv_fwd.
    """

    def __init__(self, cin, cout, k=3, stride=2, rng=None):
        super().__init__()
        self.k, self.stride, self.pad = k, stride, k // 2
        self.cin, self.cout = cin, cout
        rng = rng or np.random.default_rng(0)
        self.w = kaiming_uniform(rng, (k, k, cout, cin), k * k * cin)
        self.b = np.zeros(cout)
        self.params = [self.w, self.b]
        self.grads = [np.zeros_like(self.w), np.zeros_like(self.b)]

    def forward(self, x, train=False):
        self._x = x
        n, h, w, _ = x.shape
        oshape = (n, h * self.stride, w * self.stride, self.cout)
        return conv_bwd_data(x, self.w, oshape, self.stride, self.pad) + self.b

    def backward(self, dy):
        dyc = dy  # dy has the *output* (cout) channels = the adjoint conv's input
        self.grads[0][...] = conv_bwd_weights(dyc, self._x, self.w.shape, self.stride, self.pad)
        self.grads[1][...] = dy.sum(axis=(0, 1, 2))
        return conv_fwd(dyc, self.w, np.zeros(self.cin), self.stride, self.pad)

    def out_shape(self, h, w):
        return h * self.stride, w * self.stride, self.cout


class MaxPool2x2(Layer):
    def forward(self, x, train=False):
        n, h, w, c = x.shape
        xr = x.reshape(n, h // 2, 2, w // 2, 2, c)
        self._shape = x.shape
        flat = xr.transpose(0, 1, 3, 5, 2, 4).reshape(n, h // 2, w // 2, c, 4)
        self._arg = flat.argmax(axis=4)
        return flat.max(axis=4)

    def backward(self, dy):
        n, oh, ow, c = dy.shape
        out = np.zeros((n, oh, ow, c, 4))
        np.put_along_axis(out, self._arg[..., None], dy[..., None], axis=4)
        out = out.reshape(n, oh, ow, c, 2, 2).transpose(0, 1, 4, 2, 5, 3)
        return out.reshape(self._shape)

    def out_shape(self, h, w, c=None):
        return h // 2, w // 2


class Upsample2x(Layer):
    """Nearest-neighbour doubling."""

    def forward(self, x, train=False):
        return x.repeat(2, axis=1).repeat(2, axis=2)

    def backward(self, dy):
        n, h, w, c = dy.shape
        return dy.reshape(n, h // 2, 2, w // 2, 2, c).sum(axis=(2, 4))


class Dense(Layer):
    def __init__(self, din, dout, rng=None):
        super().__init__()
        rng = rng or np.random.default_rng(0)
        self.w = kaiming_uniform(rng, (din, dout), din)
        self.b = np.zeros(dout)
        self.params = [self.w, self.b]
        self.grads = [np.zeros_like(self.w), np.zeros_like(self.b)]

    def forward(self, x, train=False):
        self._x = x
        return x @ self.w + self.b

    def backward(self, dy):
        self.grads[0][...] = self._x.T @ dy
        self.grads[1][...] = dy.sum(axis=0)
        return dy @ self.w.T


class ReLU(Layer):
    def forward(self, x, train=False):
        self._mask = x > 0
        return np.where(self._mask, x, 0.0)

    def backward(self, dy):
        return np.where(self._mask, dy, 0.0)


class Sigmoid(Layer):
    def forward(self, x, train=False):
        self._y = 1.0 / (1.0 + np.exp(-x))
        return self._y

    def backward(self, dy):
        return dy * self._y * (1.0 - self._y)


class Dropout(Layer):
    """Inverted dropout; identity at inference.  Mask RNG is injected so
    training runs stay reproducible."""

    def __init__(self, rate, rng=None):
        super().__init__()
        self.rate = rate
        self.rng = rng or np.random.default_rng(0)

    def forward(self, x, train=False):
        if not train or self.rate == 0.0:
            self._mask = None
            return x
        keep = 1.0 - self.rate
        self._mask = (self.rng.random(x.shape) < keep) / keep
        return x * self._mask

    def backward(self, dy):
        if self._mask is None:
            return dy
        return dy * self._mask


class Flatten(Layer):
    def forward(self, x, train=False):
        self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, dy):
        return dy.reshape(self._shape)


class Reshape(Layer):
    def __init__(self, shape):
        super().__init__()
        self.shape = shape  # per-sample target shape

    def forward(self, x, train=False):
        self._shape = x.shape
        return x.reshape((x.shape[0],) + tuple(self.shape))

    def backward(self, dy):
        return dy.reshape(self._shape)


class Sequential(Layer):
    def __init__(self, layers):
        super().__init__()
        self.layers = list(layers)
        self.params = [p for l in self.layers for p in l.params]
        self.grads = [g for l in self.layers for g in l.grads]

    def forward(self, x, train=False):
        for l in self.layers:
            x = l.forward(x, train=train)
        return x

    def backward(self, dy):
        for l in reversed(self.layers):
            dy = l.backward(dy)
        return dy

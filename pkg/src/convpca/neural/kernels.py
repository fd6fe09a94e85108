"""Convolution kernels: forward, input-gradient, and weight-gradient.

Array layout is NHWC, weights are [kh, kw, cin, cout], everything float64.
The numba path uses straight nested loops; the numpy fallback uses im2col /
col2im.  Output spatial size is (H + 2p - k) // s + 1.
"""

import numpy as np

from ..accel import USE_NUMBA

if USE_NUMBA:
    from numba import njit


def _conv_fwd_loops(xp, w, stride, oh, ow):
    n, hp, wp, ci = xp.shape
    kh, kw, _, co = w.shape
    y = np.zeros((n, oh, ow, co))
    for b in range(n):
        for i in range(oh):
            for j in range(ow):
                for u in range(kh):
                    for v in range(kw):
                        for c in range(ci):
                            xv = xp[b, i * stride + u, j * stride + v, c]
                            if xv != 0.0:
                                for o in range(co):
                                    y[b, i, j, o] += xv * w[u, v, c, o]
    return y


def _conv_bwd_data_loops(dy, w, stride, hp, wp):
    n, oh, ow, co = dy.shape
    kh, kw, ci, _ = w.shape
    dxp = np.zeros((n, hp, wp, ci))
    for b in range(n):
        for i in range(oh):
            for j in range(ow):
                for o in range(co):
                    g = dy[b, i, j, o]
                    if g != 0.0:
                        for u in range(kh):
                            for v in range(kw):
                                for c in range(ci):
                                    dxp[b, i * stride + u, j * stride + v, c] += g * w[u, v, c, o]
    return dxp


def _conv_bwd_weights_loops(xp, dy, stride, kh, kw):
    n, oh, ow, co = dy.shape
    ci = xp.shape[3]
    dw = np.zeros((kh, kw, ci, co))
    for b in range(n):
        for i in range(oh):
            for j in range(ow):
                for o in range(co):
                    g = dy[b, i, j, o]
                    if g != 0.0:
                        for u in range(kh):
                            for v in range(kw):
                                for c in range(ci):
                                    dw[u, v, c, o] += g * xp[b, i * stride + u, j * stride + v, c]
    return dw


if USE_NUMBA:
    _conv_fwd_loops = njit(cache=True)(_conv_fwd_loops)
    _conv_bwd_data_loops = njit(cache=True)(_conv_bwd_data_loops)
    _conv_bwd_weights_loops = njit(cache=True)(_conv_bwd_weights_loops)


def _pad(x, p):
    if p == 0:
        return x
    return np.pad(x, ((0, 0), (p, p), (p, p), (0, 0)))


def _out_size(h, k, stride, pad):
    return (h + 2 * pad - k) // stride + 1


def _patch_view(xp, kh, kw, stride, oh, ow):
    n, hp, wp, ci = xp.shape
    sn, sh, sw, sc = xp.strides
    shape = (n, oh, ow, kh, kw, ci)
    strides = (sn, sh * stride, sw * stride, sh, sw, sc)
    return np.lib.stride_tricks.as_strided(xp, shape=shape, strides=strides)


def conv_fwd(x, w, b, stride=1, pad=1):
    """y[n,i,j,o] = b[o] + sum_{u,v,c} x_padded[n, i*s+u, j*s+v, c] * w[u,v,c,o]."""
    kh, kw, ci, co = w.shape
    oh = _out_size(x.shape[1], kh, stride, pad)
    ow = _out_size(x.shape[2], kw, stride, pad)
    xp = _pad(x, pad)
    if USE_NUMBA:
        y = _conv_fwd_loops(xp, w, stride, oh, ow)
    else:
        patches = _patch_view(xp, kh, kw, stride, oh, ow)
        cols = patches.reshape(x.shape[0] * oh * ow, kh * kw * ci)
        y = (cols @ w.reshape(kh * kw * ci, co)).reshape(x.shape[0], oh, ow, co)
    return y + b


def conv_bwd_data(dy, w, xshape, stride=1, pad=1):
    """Gradient of conv_fwd w.r.t. x (also the forward of a transposed conv)."""
    kh, kw, ci, co = w.shape
    n, h, wdt, _ = xshape
    hp, wp = h + 2 * pad, wdt + 2 * pad
    if USE_NUMBA:
        dxp = _conv_bwd_data_loops(dy, w, stride, hp, wp)
    else:
        n_, oh, ow, _ = dy.shape
        cols = dy.reshape(n_ * oh * ow, co) @ w.reshape(kh * kw * ci, co).T
        cols = cols.reshape(n_, oh, ow, kh, kw, ci)
        dxp = np.zeros((n_, hp, wp, ci))
        for u in range(kh):
            for v in range(kw):
                dxp[:, u : u + oh * stride : stride, v : v + ow * stride : stride, :] += cols[
                    :, :, :, u, v, :
                ]
    if pad == 0:
        return dxp
    return dxp[:, pad : pad + h, pad : pad + wdt, :]


def conv_bwd_weights(x, dy, kshape, stride=1, pad=1):
    """Gradient of conv_fwd w.r.t. w."""
    kh, kw, ci, co = kshape
    xp = _pad(x, pad)
    n, oh, ow, _ = dy.shape
    if USE_NUMBA:
        return _conv_bwd_weights_loops(xp, dy, stride, kh, kw)
    patches = _patch_view(xp, kh, kw, stride, oh, ow)
    cols = patches.reshape(n * oh * ow, kh * kw * ci)
    return (cols.T @ dy.reshape(n * oh * ow, co)).reshape(kh, kw, ci, co)

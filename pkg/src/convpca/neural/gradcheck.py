"""Central finite-difference validation of analytic gradients."""

import numpy as np


def gradient_check(net, x, target, loss_fn, epsilon=1e-5, max_params=200, seed=0):
    """Max relative error between analytic and numeric parameter gradients.

    ``loss_fn(pred, target) -> (loss, dpred)``.  At most ``max_params``
    coordinates are sampled per parameter tensor.  Everything runs in
    float64, so epsilon=1e-5 leaves ~1e-11 of mantissa headroom.
    """
    out = net.forward(x, train=False)
    _, dout = loss_fn(out, target)
    net.backward(dout)
    analytic = [g.copy() for g in net.grads]

    rng = np.random.default_rng(seed)
    worst = 0.0
    for p, g in zip(net.params, analytic):
        flat_p, flat_g = p.reshape(-1), g.reshape(-1)
        n = flat_p.size
        coords = np.arange(n) if n <= max_params else rng.choice(n, max_params, replace=False)
        for c in coords:
            orig = flat_p[c]
            flat_p[c] = orig + epsilon
            lp, _ = loss_fn(net.forward(x), target)
            flat_p[c] = orig - epsilon
            lm, _ = loss_fn(net.forward(x), target)
            flat_p[c] = orig
            numeric = (lp - lm) / (2.0 * epsilon)
            scale = max(abs(numeric), abs(flat_g[c]), 1e-8)
            worst = max(worst, abs(numeric - flat_g[c]) / scale)
    return worst

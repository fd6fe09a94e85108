"""CAE architecture contracts, determinism, and training behavior."""

import numpy as np
import pytest

from convpca.neural import (DivergedError, TrainConfig, build_cae, train_cae)


def test_streetnet_latent_is_640():
    m = build_cae("streetnet")
    assert m.latent_dim == 640
    assert m.latent_hw == 8 and m.latent_channels == 10


def test_streetview_latent_recorded():
    m = build_cae("streetview")
    # appendix layer string cannot realize 4096 exactly; realized size and
    # the target are both recorded in the manifest metadata
    assert m.latent_dim == 7 * 7 * 512
    assert m.meta["latent_target"] == 4096
    assert m.meta["latent_dim"] == m.latent_dim


def test_streetnet_forward_shapes():
    m = build_cae("streetnet_desk")
    x = np.random.default_rng(0).random((2, 32, 32, 1))
    z, recon = m.forward(x)
    assert z.shape == (2, 80)
    assert recon.shape == x.shape
    assert (recon >= 0).all() and (recon <= 1).all()


def test_full_streetnet_shape_roundtrip():
    m = build_cae("streetnet")
    x = np.zeros((1, 256, 256, 1))
    z, recon = m.forward(x)
    assert z.shape == (1, 640)
    assert recon.shape == x.shape


def test_desk_streetview_roundtrip_shape():
    m = build_cae("streetview_desk")
    x = np.zeros((1, 32, 32, 3))
    z, recon = m.forward(x)
    assert recon.shape == x.shape


def test_zero_weights_give_zero_latents_and_half_recon():
    m = build_cae("streetnet_desk")
    for p in m.params:
        p[...] = 0.0
    x = np.random.default_rng(1).random((3, 32, 32, 1))
    z, recon = m.forward(x)
    assert np.all(z == 0.0)
    np.testing.assert_allclose(recon, 0.5)


def test_shape_mismatch_reports_dimensions():
    m = build_cae("streetnet_desk")
    with pytest.raises(ValueError, match="32x32x1"):
        m.forward(np.zeros((1, 16, 16, 1)))


def test_unknown_arch():
    with pytest.raises(ValueError, match="unknown arch"):
        build_cae("resnet")


def test_zero_learning_rate_freezes_weights():
    x = np.random.default_rng(2).random((8, 32, 32, 1))
    cfg = TrainConfig(learning_rate=0.0, epochs=3, seed=5, batch_size=4)
    init = build_cae("streetnet_desk", seed=5)
    snapshot = [p.copy() for p in init.params]
    model, history = train_cae(x, "streetnet_desk", cfg)
    for p, s in zip(model.params, snapshot):
        np.testing.assert_array_equal(p, s)
    assert max(history) - min(history) < 1e-12


def test_training_is_deterministic():
    x = np.random.default_rng(3).random((8, 32, 32, 1))
    cfg = TrainConfig(epochs=3, seed=9, batch_size=4)
    m1, h1 = train_cae(x, "streetnet_desk", cfg)
    m2, h2 = train_cae(x, "streetnet_desk", cfg)
    assert h1 == h2
    for p1, p2 in zip(m1.params, m2.params):
        np.testing.assert_array_equal(p1, p2)


def test_empty_dataset_rejected():
    with pytest.raises(ValueError, match="empty"):
        train_cae(np.zeros((0, 32, 32, 1)), "streetnet_desk", TrainConfig(epochs=1))


def test_loss_decreases_on_fixture(trained_desk_cae):
    _, history = trained_desk_cae
    assert history[-1] <= history[0]


def test_divergence_reports_epoch():
    x = np.random.default_rng(4).random((8, 32, 32, 1))
    cfg = TrainConfig(learning_rate=1e6, epochs=10, seed=0, batch_size=8)
    with pytest.raises((DivergedError, FloatingPointError)) as exc:
        with np.errstate(over="raise", invalid="raise"):
            train_cae(x, "streetnet_desk", cfg)
    # either the loss goes non-finite (reported with its epoch) or the
    # overflow trips first; both abort the run
    if isinstance(exc.value, DivergedError):
        assert exc.value.epoch >= 0

import numpy as np
import pytest

from convpca.neural import TrainConfig, train_cae
from convpca.synthdata import gen_density_corpus


@pytest.fixture(scope="session")
def small_corpus():
    """48 synthetic 32x32 density tiles, labels exact by construction."""
    return gen_density_corpus(48, seed=11, size=32)


@pytest.fixture(scope="session")
def trained_desk_cae(small_corpus):
    """A lightly trained desk-scale CAE shared by tests that only need a
    plausible (not converged) model."""
    cfg = TrainConfig(epochs=30, seed=3, batch_size=16)
    model, history = train_cae(small_corpus.images, "streetnet_desk", cfg)
    return model, history


@pytest.fixture
def rng():
    return np.random.default_rng(1234)

"""ConvPCA: convolutional autoencoder + linear PCA over urban imagery.

Pipeline: images -> CAE latent codes -> PCA components -> visualization,
perturbation sweeps, and downstream prediction of network statistics.
"""

FORMAT_VERSION = "convpca/1"

__version__ = "0.1.0"

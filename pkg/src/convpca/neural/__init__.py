from .arch import ARCH_IDS, CaeModel, build_cae
from .gradcheck import gradient_check
from .layers import (Conv2D, ConvTranspose2D, Dense, Dropout, Flatten,
                     MaxPool2x2, ReLU, Reshape, Sequential, Sigmoid,
                     Upsample2x)
from .model_io import load_model, save_model
from .train import (DivergedError, MlpModel, StackedAeModel, TrainConfig,
                    build_mlp, cross_entropy_loss, mse_loss, train_cae,
                    train_mlp_head, train_stacked_ae)

__all__ = [
    "ARCH_IDS", "CaeModel", "build_cae", "gradient_check",
    "Conv2D", "ConvTranspose2D", "Dense", "Dropout", "Flatten", "MaxPool2x2",
    "ReLU", "Reshape", "Sequential", "Sigmoid", "Upsample2x",
    "load_model", "save_model",
    "DivergedError", "MlpModel", "StackedAeModel", "TrainConfig", "build_mlp",
    "cross_entropy_loss", "mse_loss", "train_cae", "train_mlp_head",
    "train_stacked_ae",
]

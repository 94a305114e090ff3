"""Minimal deterministic float64 network substrate: small dense and
convolutional classifiers with exact backprop, used by every other module."""

from .arch import ArchitectureSpec, Conv, Dense, parse_arch
from .model import Model, init_model, load_model, model_digest, save_model
from .ops import (
    accuracy,
    forward,
    forward_with_penultimate,
    grad_input,
    grad_params,
    loss_and_grad,
    loss_soft_ce,
    one_hot,
    softmax,
)
from .train import TrainConfig, train

__all__ = [
    "ArchitectureSpec",
    "Conv",
    "Dense",
    "Model",
    "TrainConfig",
    "accuracy",
    "forward",
    "forward_with_penultimate",
    "grad_input",
    "grad_params",
    "init_model",
    "load_model",
    "loss_and_grad",
    "loss_soft_ce",
    "model_digest",
    "one_hot",
    "parse_arch",
    "save_model",
    "softmax",
    "train",
]

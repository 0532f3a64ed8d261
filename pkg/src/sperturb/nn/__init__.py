"""Neural-network data model and constructions."""

from .cpwl import cpwl_to_relu
from .gadgets import relu_exp_net, relu_product_gadget, relu_square_gadget
from .io import nn_export, nn_import
from .layers import tanh_layer_net, tanh_template_net
from .net import NeuralNet, compose, parallelize, realize, realize_d1, stack

__all__ = [
    "cpwl_to_relu", "relu_exp_net", "relu_product_gadget", "relu_square_gadget",
    "nn_export", "nn_import", "tanh_layer_net", "tanh_template_net",
    "NeuralNet", "compose", "parallelize", "realize", "realize_d1", "stack",
]

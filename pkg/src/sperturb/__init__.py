"""Singularly perturbed reaction-diffusion: layer-adapted P1 FEM and neural-network realizations."""

__version__ = "0.1.0"

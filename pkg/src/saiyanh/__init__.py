"""Hybrid structure learning of connected Bayesian-network DAGs from discrete data."""

from .data import Dataset, Variable, load_dataset
from .graph import Dag, MixedGraph
from .learn import LearnResult, learn
from .sampler import BNModel, forward_sample, load_network

__all__ = [
    "BNModel",
    "Dag",
    "Dataset",
    "LearnResult",
    "MixedGraph",
    "Variable",
    "forward_sample",
    "learn",
    "load_dataset",
    "load_network",
]

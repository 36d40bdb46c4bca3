"""Unsupervised mining of causal-factor keyphrase sets from Chinese accident case texts."""
from caseminer.kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]

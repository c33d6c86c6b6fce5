"""affdec: certified parallelogram decompositions for polynomial surfaces and
numerical stress tests of the associated restriction/decoupling inequalities."""

from ._backend import BACKEND_NAME

__version__ = "0.1.0"

__all__ = ["BACKEND_NAME", "__version__"]

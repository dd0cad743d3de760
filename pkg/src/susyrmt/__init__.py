"""Correlation functions of invariant random matrix ensembles via superbosonization-free eigenvalue integrals."""

from importlib import metadata as _metadata

try:
    __version__ = _metadata.version("artifact")
except _metadata.PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .charfun import CharFunRepr, EnsembleSpec, charfun_for, gaussian_charfun, mixture_charfun
from .grassmann import DysonParams

__all__ = ["CharFunRepr", "DysonParams", "EnsembleSpec", "charfun_for", "gaussian_charfun",
           "mixture_charfun", "__version__"]

"""Almost automorphisms of trees, the cube complex they act on, interval
complexes, fixed points in median graphs and plane maps over small fields."""

__version__ = "0.1.0"

from .errors import NeretinError
from .trees import AdmissibleTree, special_tree
from .aaut import AlmostAutomorphism, Portrait, classify, parity

__all__ = [
    "AdmissibleTree",
    "AlmostAutomorphism",
    "NeretinError",
    "Portrait",
    "classify",
    "parity",
    "special_tree",
    "__version__",
]

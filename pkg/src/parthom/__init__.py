"""parthom: exact homology of partition-poset order complexes.

Builds the order complexes of set-partition posets (the full complex, its
link, subpartition complexes, and the complex of not 2-divisible
partitions), computes their rational and integral homology with exact
arithmetic, and reconstructs the associated spectral-sequence rank tables
and polynomial identities.
"""

__version__ = "0.1.0"

from ._kernel import BACKEND as KERNEL_BACKEND
from .errors import ConsistencyError, ResourceAbort

__all__ = ["__version__", "KERNEL_BACKEND", "ConsistencyError", "ResourceAbort"]

"""Runtime knobs, all overridable through the environment.

The ground-set caps are feasibility limits, not mathematical ones; see the
README for measured face counts and memory behind the defaults.
"""

import os


def max_n() -> int:
    """Largest ground set the complex builders accept (default 8)."""
    return int(os.environ.get("PARTHOM_MAX_N", "8"))


def materialize_limit() -> int:
    """Total face count up to which complexes keep all faces in memory."""
    return int(os.environ.get("PARTHOM_MATERIALIZE_LIMIT", "300000"))


def snf_face_limit() -> int:
    """Total face count up to which integral (SNF) homology will run."""
    return int(os.environ.get("PARTHOM_SNF_LIMIT", "200000"))


def reduction_entry_limit() -> int:
    """Cap on stored entries in one GF(p) elimination (~16 bytes each)."""
    return int(os.environ.get("PARTHOM_REDUCTION_ENTRY_LIMIT", str(400_000_000)))


def cache_dir() -> str:
    return os.environ.get("PARTHOM_CACHE_DIR", ".parthom-cache")

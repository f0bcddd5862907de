"""Picard-Fuchs operators of one-parameter K3 hypersurface families, their
symmetric square roots, Fuchsian systems and monodromy, invariant-theory
quotients, and hyperbolic fundamental domains."""

from __future__ import annotations

import os

__version__ = "0.1.0"


def data_path(*parts: str) -> str:
    """Path of a bundled fixture (family manifests, systems, presentations,
    group manifests) inside the installed package."""
    return os.path.join(os.path.dirname(__file__), "data", *parts)

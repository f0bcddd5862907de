"""Kernel selection: compiled extension when built, pure Python otherwise."""

from __future__ import annotations

try:  # pragma: no cover - depends on the build environment
    from ._kernels import KERNEL_KIND, integrate_segment
except ImportError:  # pragma: no cover
    from ._transport_fallback import KERNEL_KIND, integrate_segment

__all__ = ["KERNEL_KIND", "integrate_segment"]

"""Exact construction and verification of rank-two CMS-type commuting pairs."""

from .scalar import Scalar, S

__all__ = ["Scalar", "S"]

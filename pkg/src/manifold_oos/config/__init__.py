"""
Configuration module for manifold-oos.
"""

from manifold_oos.config.loader import ConfigLoader

__all__ = ["ConfigLoader"]

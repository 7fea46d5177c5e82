"""
Cache module for manifold-oos.
"""

from manifold_oos.cache.store import CovarianceCache

__all__ = ["CovarianceCache"]

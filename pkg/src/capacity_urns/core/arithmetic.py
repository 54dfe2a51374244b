"""Exact integer and rational arithmetic for counts and probabilities.

Python integers are already arbitrary precision, so ``Natural`` is a plain
``int`` alias; ``ExactRational`` is :class:`fractions.Fraction`, which keeps
itself reduced with a positive denominator.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from typing import Dict

from cachetools import LRUCache, cached

from capacity_urns.config import Config

__all__ = [
    "Natural",
    "ExactRational",
    "exact_ratio",
    "binomial",
    "binomial_cached",
    "binomial_cache_stats",
    "clear_binomial_cache",
]

Natural = int
ExactRational = Fraction


def exact_ratio(numerator: int, denominator: int) -> ExactRational:
    """Return ``numerator / denominator`` in lowest terms.

    Raises :class:`ZeroDivisionError` for a zero denominator, like ``Fraction``.
    """

    return Fraction(numerator, denominator)


def binomial(a: int, b: int) -> Natural:
    """Return C(a, b), or 0 whenever ``b < 0``, ``a < 0`` or ``b > a``.

    The zero-outside-range convention lets truncated and untruncated
    inclusion-exclusion sums agree term by term.
    """

    if a < 0 or b < 0 or b > a:
        return 0
    # math.comb evaluates the multiplicative form with exact interleaved division.
    return math.comb(a, b)


_BINOMIAL_CACHE: LRUCache = LRUCache(maxsize=Config.BINOMIAL_CACHE_SIZE)
_BINOMIAL_LOCK = threading.Lock()


@cached(cache=_BINOMIAL_CACHE, lock=_BINOMIAL_LOCK)
def _binomial_memo(a: int, b: int) -> Natural:
    return binomial(a, b)


def binomial_cached(a: int, b: int) -> Natural:
    """Memoized :func:`binomial`; results are identical to the uncached call."""

    if a < 0 or b < 0 or b > a:
        return 0
    return _binomial_memo(a, b)


def binomial_cache_stats() -> Dict[str, int]:
    with _BINOMIAL_LOCK:
        return {
            "entries": len(_BINOMIAL_CACHE),
            "maxsize": int(_BINOMIAL_CACHE.maxsize),
        }


def clear_binomial_cache() -> None:
    with _BINOMIAL_LOCK:
        _BINOMIAL_CACHE.clear()

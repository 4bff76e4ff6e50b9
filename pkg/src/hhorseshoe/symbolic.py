"""Symbolic dynamics of the horseshoe: the golden-mean shift on {0, 1}.

A point in R1 is mapped into z in [0, beta1/6], which lies below 5/6 because
beta1 < 4, so the symbol 1 is never followed by 1.  The other three
transitions all occur.  Words are plain ``str`` objects over ``'0'``/``'1'``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List

import numpy as np

from .errors import LimitExceeded, NonAdmissible

__all__ = [
    "FORBIDDEN",
    "MAX_WORD_LENGTH",
    "MAX_PERIOD",
    "FrequencyReport",
    "is_admissible",
    "is_cyclically_admissible",
    "require_admissible",
    "enumerate_words",
    "enumerate_periodic",
    "frequency",
    "transition_matrix",
    "sft_entropy",
]

FORBIDDEN = ("11",)
MAX_WORD_LENGTH = 24
MAX_PERIOD = 20


def _is_binary(w):
    return all(c in "01" for c in w)


def is_admissible(w: str, forbidden=FORBIDDEN) -> bool:
    """True iff ``w`` is a binary string containing no forbidden factor."""
    return _is_binary(w) and not any(b in w for b in forbidden)


def is_cyclically_admissible(w: str, forbidden=FORBIDDEN) -> bool:
    """True iff the bi-infinite repetition of ``w`` is admissible."""
    if not w:
        return False
    span = max(len(b) for b in forbidden)
    reps = max(2, -(-span // len(w)) + 1)
    return is_admissible(w * reps, forbidden)


def require_admissible(w: str, cyclic=False):
    ok = is_cyclically_admissible(w) if cyclic else is_admissible(w)
    if not ok:
        kind = "cyclically admissible" if cyclic else "admissible"
        raise NonAdmissible(f"word {w!r} is not {kind}")
    return w


def enumerate_words(k: int, limit: int = MAX_WORD_LENGTH) -> List[str]:
    """All admissible words of length k in lexicographic order.

    There are Fib(k + 2) of them.
    """
    if k < 1:
        raise ValueError(f"word length must be >= 1, got {k}")
    if k > limit:
        raise LimitExceeded(f"word length {k} exceeds cap {limit}")
    # extend words ending in 0 by both symbols and words ending in 1 by 0;
    # appending '0' before '1' keeps the list sorted
    words = ["0", "1"]
    for _ in range(k - 1):
        nxt = []
        for w in words:
            nxt.append(w + "0")
            if w[-1] == "0":
                nxt.append(w + "1")
        words = nxt
    return words


def enumerate_periodic(n: int, limit: int = MAX_PERIOD) -> List[str]:
    """Admissible words of length n whose cyclic repetition is admissible."""
    if n < 1:
        raise ValueError(f"period must be >= 1, got {n}")
    if n > limit:
        raise LimitExceeded(f"period {n} exceeds cap {limit}")
    return [w for w in enumerate_words(n, limit=max(limit, n)) if not (w[-1] == "1" and w[0] == "1")]


@dataclass(frozen=True)
class FrequencyReport:
    count: int
    horizon: int
    lower_frequency: Fraction

    def __float__(self):
        return float(self.lower_frequency)


def frequency(itinerary: str, block: str) -> FrequencyReport:
    """Overlapping occurrences of ``block`` at every start position."""
    if not block:
        raise ValueError("block must be nonempty")
    if len(itinerary) < len(block):
        raise ValueError("itinerary shorter than block")
    horizon = len(itinerary) - len(block) + 1
    count = sum(1 for i in range(horizon) if itinerary.startswith(block, i))
    return FrequencyReport(count, horizon, Fraction(count, horizon))


def transition_matrix():
    """The 2x2 transition matrix of the golden-mean shift."""
    return np.array([[1.0, 1.0], [1.0, 0.0]])


def sft_entropy() -> float:
    """Topological entropy log((1 + sqrt 5)/2) as the log spectral radius."""
    rho = max(abs(np.linalg.eigvals(transition_matrix())))
    return math.log(float(rho))

"""The horseshoe map F on the cube R = [0, 1]^3 and its central map f.

F acts on R0 = I x I x [0, 1/6] by ``(x, y, z) -> (lambda0 x, f(y), beta0 z)``
and on R1 = I x I x [5/6, 1] by
``(x, y, z) -> (3/4 - lambda1 x, sigma (1 - y), beta1 (z - 5/6))``.

The central map f is evaluated in the closed form
``f^n(y) = y / (y + (1 - y) e^{-n})``, which equals
``1 / (1 - (1 - 1/y) e^{-n})`` for y != 0 and is also valid at y = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import ConstraintViolation, DomainError, Escaped

__all__ = [
    "Params",
    "DEFAULT_PARAMS",
    "Point3",
    "OrbitRecord",
    "validate_params",
    "f_iter",
    "df_iter",
    "log_df",
    "apply_F",
    "orbit",
    "Q",
    "P",
]

Z_LOW = 1.0 / 6.0
Z_HIGH = 5.0 / 6.0


@dataclass(frozen=True)
class Params:
    """The five parameters of F.

    Only ``sigma`` enters the central dynamics, hence every pressure and
    exponent computation; the other four shape the stable/unstable directions.
    """

    lambda0: float = 0.25
    lambda1: float = 0.25
    beta0: float = 6.5
    sigma: float = 0.25
    beta1: float = 3.5

    def as_dict(self):
        return {
            "lambda0": self.lambda0,
            "lambda1": self.lambda1,
            "beta0": self.beta0,
            "sigma": self.sigma,
            "beta1": self.beta1,
        }


DEFAULT_PARAMS = Params()

# (name, predicate, bound text) in the order they are reported.
CONSTRAINTS = (
    ("lambda0", lambda v: v > 0, ">0"),
    ("lambda0", lambda v: v < 1 / 3, "<1/3"),
    ("lambda1", lambda v: v > 0, ">0"),
    ("lambda1", lambda v: v < 1 / 3, "<1/3"),
    ("beta0", lambda v: v > 6, ">6"),
    ("sigma", lambda v: v > 0, ">0"),
    ("sigma", lambda v: v < 1 / 3, "<1/3"),
    ("beta1", lambda v: v > 3, ">3"),
    ("beta1", lambda v: v < 4, "<4"),
)


def check_constraints(values):
    """Evaluate every constraint; returns a list of (name, value, bound, ok)."""
    rows = []
    for name, pred, bound in CONSTRAINTS:
        v = values[name]
        ok = isinstance(v, (int, float)) and math.isfinite(v) and bool(pred(v))
        rows.append((name, v, bound, ok))
    return rows


def validate_params(lambda0, lambda1, beta0, sigma, beta1) -> Params:
    """Return a :class:`Params` or raise on the first violated constraint.

    >>> validate_params(0.25, 0.25, 6.0, 0.25, 3.5)
    Traceback (most recent call last):
    ...
    hhorseshoe.errors.ConstraintViolation: beta0=6.0 violates beta0>6
    """
    values = dict(lambda0=lambda0, lambda1=lambda1, beta0=beta0, sigma=sigma, beta1=beta1)
    for name, v, bound, ok in check_constraints(values):
        if not ok:
            raise ConstraintViolation(name, v, bound)
    return Params(**{k: float(v) for k, v in values.items()})


@dataclass(frozen=True)
class Point3:
    xs: float
    xc: float
    xu: float

    def __iter__(self):
        return iter((self.xs, self.xc, self.xu))

    def in_cube(self):
        return all(0.0 <= v <= 1.0 for v in self)


Q = Point3(0.0, 0.0, 0.0)
P = Point3(0.0, 1.0, 0.0)


@dataclass
class OrbitRecord:
    points: List[Point3]
    itinerary: str = ""
    escaped_at: Optional[int] = None
    escape_reason: Optional[str] = None


def _check_unit(y, what="y"):
    arr = np.asarray(y, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"{what} must lie in [0, 1], got {y!r}")
    return arr


def f_iter(y, n):
    """n-th iterate of the central map; y may be a scalar or an array."""
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    arr = _check_unit(y)
    if n == 0:
        return arr.copy() if arr.ndim else float(arr)
    en = math.exp(-n)
    out = arr / (arr + (1.0 - arr) * en)
    return out if arr.ndim else float(out)


def df_iter(y, n, allow_zero=False):
    """Derivative of f^n at y, the positive quantity ``e^{-n} (f^n(y)/y)^2``.

    Evaluated as ``e^{-n} / (y + (1 - y) e^{-n})^2``, identical for y > 0.
    At y = 0 the derivative extends continuously to ``e^n``; that value is
    returned only when ``allow_zero`` is set.
    """
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    arr = _check_unit(y)
    if not allow_zero and np.any(arr == 0.0):
        raise DomainError("df_iter is defined on (0, 1]; pass allow_zero=True for the limit at 0")
    en = math.exp(-n)
    d = arr + (1.0 - arr) * en
    out = en / (d * d)
    return out if arr.ndim else float(out)


def log_df(y):
    """log f'(y) on the closed interval [0, 1]; exactly 1 at 0 and -1 at 1."""
    arr = np.asarray(y, dtype=float)
    out = -1.0 - 2.0 * np.log(arr + (1.0 - arr) * math.exp(-1.0))
    out = np.where(arr == 0.0, 1.0, np.where(arr == 1.0, -1.0, out))
    return out if arr.ndim else float(out)


def apply_F(p: Point3, params: Params = DEFAULT_PARAMS) -> Point3:
    """One application of F; raises :class:`Escaped` when the image leaves R.

    Points with ``xu`` in the open gap (1/6, 5/6) are not in the domain of
    either branch and escape with reason ``gap_z``.  The boundary values 1/6
    and 5/6 belong to R0 and R1 respectively.
    """
    x, y, z = p
    if not p.in_cube():
        raise DomainError(f"point {p} is not in the cube R")
    if z <= Z_LOW:
        img = Point3(params.lambda0 * x, f_iter(y, 1), params.beta0 * z)
    elif z >= Z_HIGH:
        img = Point3(0.75 - params.lambda1 * x, params.sigma * (1.0 - y), params.beta1 * (z - Z_HIGH))
    else:
        raise Escaped("gap_z", p)
    if not img.in_cube():
        raise Escaped("image_outside", p)
    return img


def symbol_of(p: Point3) -> Optional[int]:
    if p.xu <= Z_LOW:
        return 0
    if p.xu >= Z_HIGH:
        return 1
    return None


def orbit(p: Point3, params: Params = DEFAULT_PARAMS, n: int = 1) -> OrbitRecord:
    """Iterate F up to n times, recording points and R0/R1 symbols.

    Escape ends the record; it is data, not an error.
    """
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    rec = OrbitRecord(points=[p])
    symbols = []
    cur = p
    for step in range(n):
        s = symbol_of(cur)
        try:
            cur = apply_F(cur, params)
        except Escaped as exc:
            rec.escaped_at = step
            rec.escape_reason = exc.reason
            break
        symbols.append("01"[s])
        rec.points.append(cur)
    rec.itinerary = "".join(symbols)
    return rec

"""The central iterated function system {f0, f1} on I = [0, 1].

``f0`` is the central map f and ``f1(y) = sigma (1 - y)``.  For a word w the
composition ``Phi_w`` applies ``f_{w[0]}`` first and ``f_{w[-1]}`` last.

Points close to 1 are common here (long runs of zeros push y towards the
repelling fixed point 1), so orbits are carried as pairs ``(y, c)`` with
``c = 1 - y`` kept separately.  Under f0 the pair maps to
``(y/d, c e^{-1}/d)`` with ``d = y + c e^{-1}``, under f1 to
``(sigma c, 1 - sigma c)``; neither step loses relative accuracy in y or c.

The derivative of f is a coboundary: with ``u(y) = log(y (1 - y))`` one has
``log f'(y) = u(f(y)) - u(y)``.  Around a periodic orbit this leaves only the
1-steps, each contributing ``log(y / (1 - sigma (1 - y)))`` at its input y,
which is how multipliers are evaluated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Tuple

import numpy as np
from scipy.optimize import brentq

from ._kernels import chain_logderiv_grid, word_codes
from .core_map import DEFAULT_PARAMS, Params, Point3, f_iter
from .errors import ConvergenceFailure, DomainError, NonAdmissible, PatternError
from .symbolic import is_admissible, is_cyclically_admissible

__all__ = [
    "CentralInterval",
    "Box",
    "ContractionCertificate",
    "GeometricRate",
    "PeriodicPoint",
    "apply_f0",
    "apply_f1",
    "compose_phi",
    "compose_pairs",
    "dphi_chain",
    "log_dphi_chain",
    "dphi_product",
    "contraction_certificate",
    "geometric_rate",
    "fiber_enclosure",
    "fiber_pairs",
    "block_rate",
    "block_markers",
    "periodic_fixed_point",
    "periodic_orbit",
    "reconstruct_point",
]

_EM1 = math.exp(-1.0)
DEFAULT_SIGMA = DEFAULT_PARAMS.sigma
GRID_SIZE = 1000
BOUND_SLACK = 1e-12


@dataclass(frozen=True)
class CentralInterval:
    """Closed interval ``[lo, hi]`` inside [0, 1]."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (0.0 <= self.lo <= self.hi <= 1.0):
            raise DomainError(f"invalid interval [{self.lo}, {self.hi}]")

    @property
    def diam(self):
        return self.hi - self.lo

    def contains(self, y, tol=0.0):
        return self.lo - tol <= y <= self.hi + tol

    def issubset(self, other, tol=0.0):
        return other.lo - tol <= self.lo and self.hi <= other.hi + tol


@dataclass(frozen=True)
class Box:
    """Product of three coordinate intervals (xs, xc, xu)."""

    xs: CentralInterval
    xc: CentralInterval
    xu: CentralInterval

    def contains(self, p: Point3, tol=0.0):
        return self.xs.contains(p.xs, tol) and self.xc.contains(p.xc, tol) and self.xu.contains(p.xu, tol)

    def center(self):
        return Point3(*(0.5 * (iv.lo + iv.hi) for iv in (self.xs, self.xc, self.xu)))

    @property
    def widths(self):
        return (self.xs.diam, self.xc.diam, self.xu.diam)


def _unit(y):
    arr = np.asarray(y, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"y must lie in [0, 1], got {y!r}")
    return arr


def _word(w):
    if not is_admissible(w):
        raise NonAdmissible(f"word {w!r} is not admissible")
    return w


def _scalar(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def apply_f0(y):
    return f_iter(y, 1)


def apply_f1(y, sigma=DEFAULT_SIGMA):
    arr = _unit(y)
    return _scalar(sigma * (1.0 - arr))


def compose_pairs(w, y, c, sigma=DEFAULT_SIGMA):
    """Push the pair (y, 1 - y) through ``Phi_w``; arrays are accepted.

    Consecutive zeros are applied as one closed-form block.
    """
    y = np.array(y, dtype=float)
    c = np.array(c, dtype=float)
    i = 0
    n = len(w)
    while i < n:
        if w[i] == "1":
            y, c = sigma * c, 1.0 - sigma * c
            i += 1
            continue
        j = i
        while j < n and w[j] == "0":
            j += 1
        en = math.exp(-(j - i))
        d = y + c * en
        y, c = y / d, c * en / d
        i = j
    return y, c


def compose_phi(w: str, y, sigma=DEFAULT_SIGMA):
    """``Phi_w(y)``."""
    arr = _unit(y)
    return _scalar(compose_pairs(_word(w), arr, 1.0 - arr, sigma)[0])


def log_dphi_chain(w: str, y, sigma=DEFAULT_SIGMA):
    """``log |Phi_w'(y)|`` by the chain rule along the partial images."""
    arr = _unit(y)
    out = chain_logderiv_grid(word_codes(_word(w)), np.atleast_1d(arr), sigma, [len(w)])[0]
    return _scalar(out.reshape(arr.shape))


def dphi_chain(w: str, y, sigma=DEFAULT_SIGMA):
    """Signed derivative ``Phi_w'(y)``; each 1 contributes a factor ``-sigma``."""
    sign = -1.0 if w.count("1") % 2 else 1.0
    return _scalar(sign * np.exp(log_dphi_chain(w, y, sigma)))


def _block_lengths(w):
    """Zero counts of the blocks ``0^n 1`` making up ``w``."""
    if not w or w[-1] != "1" or not is_admissible(w):
        raise PatternError(f"{w!r} is not a concatenation of blocks 0...01")
    return [len(b) for b in w.split("1")[:-1]]


def dphi_product(w: str, y, sigma=DEFAULT_SIGMA):
    """``|Phi_w'(y)|`` from the telescoped product over the blocks of w.

    With ``w_0 = y`` and ``w_j`` the image after the j-th block the value is
    ``prod_j w_j (1 - w_j/sigma) / (w_{j-1} (1 - w_{j-1}))``.  The formula is
    0/0 when some ``w_{j-1}`` is 0 or 1 (this happens for y = 1); such a
    factor is replaced by its continuous extension ``sigma (f^n)'(w_{j-1})``.
    y = 0 raises DomainError.
    """
    blocks = _block_lengths(w)
    arr = np.atleast_1d(_unit(y))
    if np.any(arr == 0.0):
        raise DomainError("dphi_product needs y > 0")
    y_prev = arr
    c_prev = 1.0 - arr
    out = np.ones_like(arr)
    for j, n in enumerate(blocks):
        en = math.exp(-n)
        d = y_prev + c_prev * en
        v, cv = y_prev / d, c_prev * en / d   # f^n(w_{j-1}) and 1 - f^n(w_{j-1})
        wj = sigma * cv                        # so 1 - wj/sigma = v
        num = wj * v
        den = y_prev * c_prev
        # 0/0 only when a block starts at 0 or 1; use the limit sigma (f^n)'
        factor = np.divide(num, den, out=sigma * en / (d * d), where=den > 0)
        out = out * factor
        y_prev, c_prev = wj, 1.0 - wj
    return _scalar(out.reshape(np.shape(y)))


def fiber_pairs(past: str, sigma=DEFAULT_SIGMA):
    """Endpoints of ``Phi_past([0, 1])`` as pairs ``(lo, 1-lo, hi, 1-hi)``."""
    lo, clo, hi, chi = 0.0, 1.0, 1.0, 0.0
    for s in past:
        if s == "0":
            lo, clo = compose_pairs("0", lo, clo, sigma)
            hi, chi = compose_pairs("0", hi, chi, sigma)
        else:
            # f1 is decreasing, so the endpoints swap
            lo, clo, hi, chi = sigma * chi, 1.0 - sigma * chi, sigma * clo, 1.0 - sigma * clo
    return float(lo), float(clo), float(hi), float(chi)


def fiber_enclosure(past: str, sigma=DEFAULT_SIGMA) -> CentralInterval:
    """Central coordinates compatible with the past itinerary ``past``."""
    _word(past)
    lo, _, hi, _ = fiber_pairs(past, sigma)
    return CentralInterval(lo, hi)


# ------------------------------------------------------------ certificates


def _grid(n):
    return np.linspace(0.0, 1.0, n)


def _one_positions(w):
    return [i for i, s in enumerate(w) if s == "1"]


@dataclass
class ContractionCertificate:
    """Constants of the contraction bound along a word starting with 1.

    ``bounds[i]`` bounds ``|Phi'|`` over I for the prefix ending at the
    (i+2)-th one, ``sup_values[i]`` is the grid maximum it is checked
    against.
    """

    C: float
    A: float
    n0: int
    deltas: List[float]
    rate_a: float
    marker_times: List[int]
    bounds: List[float] = field(default_factory=list)
    sup_values: List[float] = field(default_factory=list)
    grid_size: int = GRID_SIZE

    @property
    def verified(self):
        return all(s <= b * (1.0 + BOUND_SLACK) for s, b in zip(self.sup_values, self.bounds))


def _grid_log_sup(w, checkpoints, sigma, grid_size):
    ys = _grid(grid_size)
    L = chain_logderiv_grid(word_codes(w), ys, sigma, checkpoints)
    return L.max(axis=1)


def contraction_certificate(w: str, sigma=DEFAULT_SIGMA, grid_size=GRID_SIZE) -> ContractionCertificate:
    """Constants ``C``, ``(delta_j)`` and their grid verification along ``w``.

    Write ``p_0 = 0 < p_1 < ...`` for the positions of the ones.  Then
    ``A = max_I |Phi'|`` for the prefix through ``p_1`` (grid maximum),
    ``delta_0`` is the lower end of that prefix's image of I,
    ``C = A / (3 delta_0 (1 - delta_0))``, and ``delta_j`` is the lower end of
    the image of ``[delta_0, sigma]`` under the word from ``p_1 + 1`` through
    ``p_{j+1}``.  The bound checked is
    ``|Phi'_{w[:p_{i+1}+1]}| <= C prod_{j=1}^{i-1} (1 - delta_j/sigma)/(1 - delta_j)``.
    """
    _word(w)
    ones = _one_positions(w)
    if not w or w[0] != "1" or len(ones) < 2:
        raise PatternError("contraction_certificate needs a word starting with 1 and containing two ones")
    n0 = ones[1]
    prefix = w[: n0 + 1]
    A = float(np.exp(_grid_log_sup(prefix, [len(prefix)], sigma, grid_size)[0]))
    lo, clo, hi, chi = fiber_pairs(prefix, sigma)
    delta0 = lo
    C = A / (3.0 * delta0 * (1.0 - delta0))

    deltas = [delta0]
    # image of [delta0, sigma] under the remainder, tracked by its endpoints
    a_lo = (delta0, 1.0 - delta0)
    a_hi = (sigma, 1.0 - sigma)
    start = n0 + 1
    for p in ones[2:]:
        seg = w[start: p + 1]
        ylo, clo_ = compose_pairs(seg, *a_lo, sigma)
        yhi, chi_ = compose_pairs(seg, *a_hi, sigma)
        if seg.count("1") % 2:
            ylo, clo_, yhi, chi_ = yhi, chi_, ylo, clo_
        a_lo, a_hi = (float(ylo), float(clo_)), (float(yhi), float(chi_))
        deltas.append(a_lo[0])
        start = p + 1

    factors = [(1.0 - d / sigma) / (1.0 - d) for d in deltas[1:]]
    bounds = []
    acc = C
    for i in range(1, len(ones)):
        # factors for j = 1..i-1
        if i >= 2:
            acc *= factors[i - 2]
        bounds.append(acc)
    checkpoints = [p + 1 for p in ones[1:]]
    sups = np.exp(_grid_log_sup(w, checkpoints, sigma, grid_size))
    rate = max(factors) if factors else 0.0
    return ContractionCertificate(
        C=C,
        A=A,
        n0=n0,
        deltas=deltas,
        rate_a=rate,
        marker_times=checkpoints,
        bounds=bounds,
        sup_values=[float(s) for s in sups],
        grid_size=grid_size,
    )


@dataclass
class GeometricRate:
    """Rate ``a`` for a repeated block ``1 0^k 1`` and the checks ``C a^j``."""

    a: float
    delta: float
    C: float
    marker_times: List[int]
    bounds: List[float] = field(default_factory=list)
    sup_values: List[float] = field(default_factory=list)

    @property
    def verified(self):
        return all(s <= b * (1.0 + BOUND_SLACK) for s, b in zip(self.sup_values, self.bounds))


def block_rate(k: int, sigma=DEFAULT_SIGMA) -> Tuple[float, float]:
    """``(a, delta)`` for the block ``1 0^k 1``.

    After the leading 1 the fiber lies in ``[0, sigma]``; k zeros and the final
    1 send it into ``[delta, sigma]`` with ``delta = sigma (1 - f^k(sigma))``, and
    ``(1 - y/sigma)/(1 - y)`` is largest at ``y = delta``.
    """
    if k < 1:
        raise PatternError("block 1 0^k 1 needs k >= 1")
    v = f_iter(sigma, k)
    delta = sigma * (1.0 - v)
    return v / (1.0 - delta), delta


def _parse_block(block):
    if len(block) < 3 or block[0] != "1" or block[-1] != "1" or set(block[1:-1]) != {"0"}:
        raise PatternError(f"repeating block must have the form 1 0^k 1, got {block!r}")
    return len(block) - 2


def block_markers(w: str, block: str) -> List[int]:
    """Indices just after each (possibly overlapping) occurrence of ``block``."""
    return [i + len(block) for i in range(len(w) - len(block) + 1) if w.startswith(block, i)]


def geometric_rate(w: str, repeating_block: str, sigma=DEFAULT_SIGMA, grid_size=GRID_SIZE) -> GeometricRate:
    """Geometric decay ``|Phi'_{w[:m_j]}| <= C a^j`` along the markers m_j.

    ``C`` is the contraction constant of ``w`` (which must start with 1) and
    ``m_j`` the index just after the j-th occurrence of the block, j >= 0.
    """
    k = _parse_block(repeating_block)
    _word(w)
    markers = block_markers(w, repeating_block)
    if not markers:
        raise PatternError(f"block {repeating_block!r} does not occur in the word")
    if w[0] != "1":
        raise PatternError("geometric_rate needs a word starting with 1")
    a, delta = block_rate(k, sigma)
    C = contraction_certificate(w, sigma, grid_size).C
    bounds = [C * a**j for j in range(len(markers))]
    sups = np.exp(_grid_log_sup(w, markers, sigma, grid_size))
    return GeometricRate(a=a, delta=delta, C=C, marker_times=markers, bounds=bounds,
                         sup_values=[float(s) for s in sups])


# ------------------------------------------------------------ periodic points


class PeriodicPoint(NamedTuple):
    y: float
    multiplier: float
    log_abs_multiplier: float


def _log_one_step(y, c, sigma):
    """``log(y / (1 - sigma c))`` for the 1-step leaving from (y, c)."""
    head = math.log1p(-c) if y > 0.5 else math.log(y)
    return head - math.log1p(-sigma * c)


def _rotate_to_last_one(w):
    last = w.rindex("1")
    tail = w[last + 1:]
    return tail, tail + w[: last + 1]


def _solve_rotated(r, sigma, tol=1e-14, cap=10_000):
    """Fixed point z in (0, sigma] of ``Phi_r`` for r ending in 1."""
    z = 0.5 * sigma
    step_prev = None
    for it in range(cap):
        z_new, _ = compose_pairs(r, z, 1.0 - z, sigma)
        z_new = float(z_new)
        step = abs(z_new - z)
        if step <= tol * z_new:
            return z_new
        # slow oscillation (multiplier near -1): hand over to brentq
        if step_prev is not None and it > 20 and step > 0.5 * step_prev:
            break
        step_prev = step
        z = z_new

    def g(lz):
        y = math.exp(lz)
        _, c = compose_pairs(r[:-1], y, 1.0 - y, sigma)
        return math.log(sigma) + math.log(float(c)) - lz

    a, b = math.log(1e-300), math.log(sigma)
    ga, gb = g(a), g(b)
    if gb == 0.0:
        return sigma
    if not (ga > 0.0 > gb):
        raise ConvergenceFailure(f"no sign change for the fixed point of {r!r}", (ga, gb))
    return math.exp(brentq(g, a, b, xtol=1e-300, rtol=1e-15, maxiter=500))


def periodic_orbit(w: str, sigma=DEFAULT_SIGMA):
    """Central orbit ``(y_i, 1 - y_i)``, i < |w|, of the periodic point of w.

    ``y_0`` is the fixed point of ``Phi_w`` and ``y_{i+1} = f_{w[i]}(y_i)``.
    Also returns ``log |Phi_w'(y_0)|``.  Requires a word containing a 1.
    """
    if not is_cyclically_admissible(w):
        raise NonAdmissible(f"word {w!r} is not cyclically admissible")
    if "1" not in w:
        raise PatternError("periodic_orbit needs a word containing a 1")
    tail, r = _rotate_to_last_one(w)
    z = _solve_rotated(r, sigma)
    y, c = compose_pairs(tail, z, 1.0 - z, sigma)
    y, c = float(y), float(c)
    ys = np.empty(len(w))
    cs = np.empty(len(w))
    log_abs = 0.0
    for i, s in enumerate(w):
        ys[i], cs[i] = y, c
        if s == "1":
            log_abs += _log_one_step(y, c, sigma)
        y, c = compose_pairs(s, y, c, sigma)
        y, c = float(y), float(c)
    return ys, cs, log_abs


def periodic_fixed_point(w: str, sigma=DEFAULT_SIGMA) -> List[PeriodicPoint]:
    """Fixed points of ``Phi_w`` in [0, 1] with their multipliers.

    For ``w = 0^n`` these are 0 and 1 with multipliers ``e^n`` and ``e^{-n}``;
    otherwise there is exactly one, in the image of the last 1.
    """
    if not is_cyclically_admissible(w):
        raise NonAdmissible(f"word {w!r} is not cyclically admissible")
    n = len(w)
    if "1" not in w:
        return [PeriodicPoint(0.0, math.exp(n), float(n)), PeriodicPoint(1.0, math.exp(-n), -float(n))]
    ys, _, log_abs = periodic_orbit(w, sigma)
    sign = -1.0 if w.count("1") % 2 else 1.0
    return [PeriodicPoint(float(ys[0]), sign * math.exp(log_abs), log_abs)]


# ------------------------------------------------------------ reconstruction


def _stable_range(past, params):
    lo, hi = 0.0, 1.0
    for s in past:
        if s == "0":
            lo, hi = params.lambda0 * lo, params.lambda0 * hi
        else:
            lo, hi = 0.75 - params.lambda1 * hi, 0.75 - params.lambda1 * lo
    return lo, hi


_Z_RANGE = {"0": (0.0, 1.0 / 6.0), "1": (5.0 / 6.0, 1.0)}


def _unstable_range(future, params):
    if not future:
        return 0.0, 1.0
    lo, hi = _Z_RANGE[future[-1]]
    for s in reversed(future[:-1]):
        if s == "0":
            lo, hi = lo / params.beta0, hi / params.beta0
        else:
            lo, hi = lo / params.beta1 + 5.0 / 6.0, hi / params.beta1 + 5.0 / 6.0
        dlo, dhi = _Z_RANGE[s]
        lo, hi = max(lo, dlo), min(hi, dhi)
        if lo > hi:
            raise NonAdmissible(f"future {future!r} is not realized")
    return lo, hi


def reconstruct_point(past: str, future: str, params: Params = DEFAULT_PARAMS) -> Box:
    """Box containing every point of the horseshoe with the given window.

    ``past`` lists the symbols of the preimages (oldest first) and ``future``
    those of the point and its forward images.  The stable coordinate comes
    from the affine contractions along the past, the unstable one from the
    inverse expanding branches along the future and the central one from
    :func:`fiber_enclosure`.
    """
    if not is_admissible(past + future):
        raise NonAdmissible(f"window {past!r}|{future!r} is not admissible")
    xs = CentralInterval(*_stable_range(past, params))
    xc = fiber_enclosure(past, params.sigma)
    xu = CentralInterval(*_unstable_range(future, params))
    return Box(xs, xc, xu)

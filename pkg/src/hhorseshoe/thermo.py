"""Pressure, equilibrium measures and the phase transition of t log f'.

The potential is ``phi_t = t log|DF| on E^c``, i.e. ``t log f'(y)`` on R0 and
``t log sigma`` on R1.  It depends on the central coordinate, which a finite
past only pins down to a fiber interval, so every depth-k computation works
with the ``k``-block states of the golden-mean shift and interval bounds of
the potential over each state's fiber.

Two weightings are used.

direct
    ``phi`` itself.  On a 0-step from a state with fiber ``[lo, hi]`` the
    bounds are ``log f'(hi) <= phi <= log f'(lo)``; a 1-step is exactly
    ``log sigma``.
reduced
    ``psi = phi - (u o F - u)`` with ``u(y) = log(y (1 - y))``, which gives
    the same integral against every invariant measure except the point
    masses at Q and P.  ``psi`` vanishes on 0-steps and equals
    ``log(y / (1 - sigma (1 - y)))`` on 1-steps, increasing in y.

The direct upper bound is useless for locating the transition: the all-zero
state has fiber [0, 1], so its bound is ``log f'(0) = 1`` and the upper
matrix always carries roughly ``h_top`` more pressure than t.  The reduced
weights have no such spike, and the point mass at Q is accounted for
separately through ``P(t) >= t``.  Hence

* ``p_high = max(t, log rho(reduced upper))``
* ``p_low = max(t, log rho(direct lower))``

where ``rho`` is bracketed by Collatz-Wielandt bounds from power iteration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np

from ._kernels import power_iteration
from .central_ifs import fiber_pairs, periodic_fixed_point, periodic_orbit
from .core_map import DEFAULT_PARAMS
from .errors import ConvergenceFailure, DomainError, LimitExceeded, NonAdmissible
from .symbolic import enumerate_words, is_admissible, is_cyclically_admissible, sft_entropy

__all__ = [
    "PotentialSpec",
    "TransferMatrix",
    "PressureEnclosure",
    "MarkovEquilibrium",
    "PhaseTransitionEstimate",
    "EmpiricalStats",
    "potential_on_cylinder",
    "build_transfer",
    "spectral_radius",
    "pressure",
    "pressure_curve",
    "markov_equilibrium",
    "lyap_of_periodic",
    "empirical_measure_stats",
    "find_t0",
    "t0_variational",
    "REPRESENTATIVES",
    "DEFAULT_DEPTH",
    "MAX_DEPTH",
]

DEFAULT_DEPTH = 12
MAX_DEPTH = 20
MIN_DEPTH = 2
DEFAULT_SIGMA = DEFAULT_PARAMS.sigma
EIG_RTOL = 1e-12
EIG_MAXITER = 100_000


@dataclass(frozen=True)
class PotentialSpec:
    t: float

    def __post_init__(self):
        if not math.isfinite(self.t) or self.t < 0:
            raise DomainError(f"t must be finite and nonnegative, got {self.t}")


def _log_fprime(y, c):
    # log f'(y) = -1 - 2 log(y + c/e), exact at the endpoints
    return -1.0 - 2.0 * math.log(y + c * math.exp(-1.0))


def _log_psi(y, c, sigma):
    if y == 0.0:
        return -math.inf
    head = math.log1p(-c) if y > 0.5 else math.log(y)
    return head - math.log1p(-sigma * c)


def potential_on_cylinder(state: str, next_symbol: str, t: float, sigma=DEFAULT_SIGMA) -> Tuple[float, float]:
    """Bounds ``(lo, hi)`` of ``phi_t`` on the transition ``state -> next_symbol``."""
    PotentialSpec(t)
    next_symbol = str(next_symbol)
    if not is_admissible(state + next_symbol) or next_symbol not in ("0", "1"):
        raise NonAdmissible(f"transition {state!r} -> {next_symbol!r} is not admissible")
    if next_symbol == "1":
        v = t * math.log(sigma)
        return v, v
    lo, clo, hi, chi = fiber_pairs(state, sigma)
    return t * _log_fprime(hi, chi), t * _log_fprime(lo, clo)


@dataclass(frozen=True)
class _Skeleton:
    """t-independent structure of the depth-k state graph."""

    depth: int
    states: Tuple[str, ...]
    src: np.ndarray
    dst: np.ndarray
    symbol: np.ndarray
    phi_lo: np.ndarray
    phi_hi: np.ndarray
    psi_lo: np.ndarray
    psi_hi: np.ndarray
    zero_loop: int


def _check_depth(k):
    if not isinstance(k, (int, np.integer)) or k < MIN_DEPTH:
        raise ValueError(f"depth must be an integer >= {MIN_DEPTH}, got {k!r}")
    if k > MAX_DEPTH:
        raise LimitExceeded(f"depth {k} exceeds cap {MAX_DEPTH}")


@lru_cache(maxsize=64)
def _skeleton(k: int, sigma: float) -> _Skeleton:
    _check_depth(k)
    states = enumerate_words(k)
    index = {w: i for i, w in enumerate(states)}
    src, dst, sym = [], [], []
    phi_lo, phi_hi, psi_lo, psi_hi = [], [], [], []
    log_sigma = math.log(sigma)
    for i, w in enumerate(states):
        lo, clo, hi, chi = fiber_pairs(w, sigma)
        for s in ("0", "1") if w[-1] == "0" else ("0",):
            src.append(i)
            dst.append(index[w[1:] + s])
            sym.append(int(s))
            if s == "0":
                phi_lo.append(_log_fprime(hi, chi))
                phi_hi.append(_log_fprime(lo, clo))
                psi_lo.append(0.0)
                psi_hi.append(0.0)
            else:
                phi_lo.append(log_sigma)
                phi_hi.append(log_sigma)
                psi_lo.append(_log_psi(lo, clo, sigma))
                psi_hi.append(_log_psi(hi, chi, sigma))
    arrays = [np.array(a, dtype=float) for a in (phi_lo, phi_hi, psi_lo, psi_hi)]
    src = np.array(src, dtype=np.int64)
    dst = np.array(dst, dtype=np.int64)
    z = index["0" * k]
    zero_loop = int(np.flatnonzero((src == z) & (dst == z))[0])
    for a in arrays + [src, dst]:
        a.setflags(write=False)
    return _Skeleton(k, tuple(states), src, dst, np.array(sym, dtype=np.int8), *arrays, zero_loop)


def _scaled(log_pot, t):
    """``t * log_pot`` with the convention ``0 * (-inf) = 0``."""
    if t == 0.0:
        return np.zeros_like(log_pot)
    return t * log_pot


@dataclass
class TransferMatrix:
    """Depth-k weighted transition graph with interval edge weights.

    Edges are stored sorted by source state, so ``(indptr, dst)`` is the CSR
    structure.  ``log_lo``/``log_hi`` bound the log-weight of each edge
    (``-inf`` encodes a zero weight).  ``kind`` is ``"direct"`` or
    ``"reduced"``, see the module docstring.
    """

    depth: int
    t: float
    states: Tuple[str, ...]
    src: np.ndarray
    dst: np.ndarray
    symbol: np.ndarray
    log_lo: np.ndarray
    log_hi: np.ndarray
    kind: str = "direct"

    @property
    def n_states(self):
        return len(self.states)

    @property
    def w_lo(self):
        return np.exp(self.log_lo)

    @property
    def w_hi(self):
        return np.exp(self.log_hi)

    @property
    def indptr(self):
        return _indptr(self.src, self.n_states)

    def out_degrees(self):
        return np.bincount(self.src, minlength=self.n_states)

    def dense(self, which="hi"):
        m = np.zeros((self.n_states, self.n_states))
        m[self.src, self.dst] = self.w_hi if which == "hi" else self.w_lo
        return m


def _indptr(src, n):
    return np.concatenate([[0], np.cumsum(np.bincount(src, minlength=n))]).astype(np.int64)


def build_transfer(k: int, t: float, sigma=DEFAULT_SIGMA, kind="direct") -> TransferMatrix:
    """Depth-k transfer matrix of ``phi_t`` with interval weights."""
    PotentialSpec(t)
    sk = _skeleton(int(k), float(sigma))
    if kind == "direct":
        lo, hi = sk.phi_lo, sk.phi_hi
    elif kind == "reduced":
        lo, hi = sk.psi_lo, sk.psi_hi
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return TransferMatrix(sk.depth, float(t), sk.states, sk.src, sk.dst, sk.symbol,
                          _scaled(lo, t), _scaled(hi, t), kind)


# ------------------------------------------------------------ spectral radius


def _transpose(src, dst, n):
    perm = np.argsort(dst, kind="stable")
    return _indptr(dst, n), src[perm], perm


def spectral_radius(src, dst, log_w, n, x0=None, rtol=EIG_RTOL, maxiter=EIG_MAXITER):
    """Bracket ``(lo, hi)`` of the Perron root and the right eigenvector.

    ``src`` must be sorted.  Raises :class:`ConvergenceFailure` (with the last
    bracket) if the Collatz-Wielandt gap does not close within ``maxiter``.
    """
    data = np.exp(log_w)
    lo, hi, x, it, ok = power_iteration(_indptr(src, n), dst, data, x0, rtol, maxiter)
    if not ok:
        raise ConvergenceFailure(f"power iteration did not converge in {it} steps", (lo, hi))
    return lo, hi, x


def _left_vector(src, dst, log_w, n, rtol=EIG_RTOL, maxiter=EIG_MAXITER):
    indptr, indices, perm = _transpose(src, dst, n)
    lo, hi, x, it, ok = power_iteration(indptr, indices, np.exp(log_w)[perm], None, rtol, maxiter)
    if not ok:
        raise ConvergenceFailure(f"left power iteration did not converge in {it} steps", (lo, hi))
    return x


# ------------------------------------------------------------ pressure


@dataclass(frozen=True)
class PressureEnclosure:
    t: float
    depth: int
    p_low: float
    p_high: float
    log_rho_upper: Tuple[float, float] = (math.nan, math.nan)
    log_rho_lower: Tuple[float, float] = (math.nan, math.nan)

    @property
    def width(self):
        return self.p_high - self.p_low


def _log_rho_upper(sk, t, x0=None):
    lo, hi, x = spectral_radius(sk.src, sk.dst, _scaled(sk.psi_hi, t), len(sk.states), x0)
    return math.log(lo), math.log(hi), x


def _log_rho_lower(sk, t, x0=None):
    lo, hi, x = spectral_radius(sk.src, sk.dst, _scaled(sk.phi_lo, t), len(sk.states), x0)
    return math.log(lo), math.log(hi), x


def pressure(k: int, t: float, sigma=DEFAULT_SIGMA) -> PressureEnclosure:
    """Enclosure ``[p_low, p_high]`` of the pressure of ``phi_t`` at depth k."""
    PotentialSpec(t)
    sk = _skeleton(int(k), float(sigma))
    u_lo, u_hi, _ = _log_rho_upper(sk, t)
    l_lo, l_hi, _ = _log_rho_lower(sk, t)
    p_high = max(t, u_hi)
    p_low = min(max(t, l_lo), p_high)
    return PressureEnclosure(float(t), sk.depth, p_low, p_high, (u_lo, u_hi), (l_lo, l_hi))


def pressure_curve(k: int, t_min: float, t_max: float, steps: int, sigma=DEFAULT_SIGMA) -> List[PressureEnclosure]:
    """Pressure enclosures on ``steps`` evenly spaced values of t.

    ``steps = 1`` (with ``t_min == t_max`` allowed) evaluates ``t_min`` only.
    """
    if steps < 1 or t_max < t_min or (steps > 1 and t_max == t_min):
        raise ValueError("need t_min < t_max and steps >= 2, or steps = 1")
    ts = [t_min] if steps == 1 else np.linspace(t_min, t_max, steps)
    return [pressure(k, float(t), sigma) for t in ts]


# ------------------------------------------------------------ equilibria

REPRESENTATIVES = ("upper", "lower", "midpoint")


@dataclass
class MarkovEquilibrium:
    """Depth-k Markov measure built from Perron data of a weight matrix.

    ``kernel`` is aligned with the edge arrays ``src``/``dst``;
    ``potential_integral`` is the integral of the representative log-weight
    and ``lyap_c`` encloses the central exponent.
    """

    depth: int
    t: float
    representative: str
    states: Tuple[str, ...]
    src: np.ndarray
    dst: np.ndarray
    kernel: np.ndarray
    stationary: np.ndarray
    log_eigenvalue: float
    entropy: float
    potential_integral: float
    lyap_c: Tuple[float, float]
    cylinder_masses: Dict[str, float]

    def kernel_matrix(self):
        n = len(self.states)
        m = np.zeros((n, n))
        m[self.src, self.dst] = self.kernel
        return m

    def gibbs_residual(self):
        return abs(self.entropy + self.potential_integral - self.log_eigenvalue)

    def invariance_residual(self):
        pushed = np.bincount(self.dst, weights=self.stationary[self.src] * self.kernel,
                             minlength=len(self.states))
        return float(np.max(np.abs(pushed - self.stationary)))

    def mass(self, word):
        return self.cylinder_masses[word]


def _representative_log_weights(sk, t, representative):
    if representative == "upper":
        # reduced upper bound with the Q self-loop restored to its exact weight
        logw = _scaled(sk.psi_hi, t).copy()
        logw[sk.zero_loop] = t
        return logw
    if representative == "lower":
        return _scaled(sk.phi_lo, t)
    if representative == "midpoint":
        return _scaled(0.5 * (sk.phi_lo + sk.phi_hi), t)
    raise ValueError(f"representative must be one of {REPRESENTATIVES}, got {representative!r}")


def _edge_mean(weights, values):
    mask = weights > 0
    return float(np.sum(weights[mask] * values[mask]))


def _cylinder_masses(states, pi, max_len):
    masses = {}
    for m in range(1, max_len + 1):
        acc = {}
        for w, p in zip(states, pi):
            key = w[-m:]
            acc[key] = acc.get(key, 0.0) + float(p)
        masses.update(sorted(acc.items()))
    return masses


def markov_equilibrium(k: int, t: float, representative="upper", sigma=DEFAULT_SIGMA) -> MarkovEquilibrium:
    """Markov equilibrium of a depth-k representative of ``phi_t``.

    ``upper`` uses the reduced upper weights but gives the all-zero self-loop
    its exact weight ``e^t``, so the measure can feel the pull of Q.
    ``lower`` uses the direct lower weights, ``midpoint`` the geometric mean
    of the direct bounds.
    """
    PotentialSpec(t)
    sk = _skeleton(int(k), float(sigma))
    n = len(sk.states)
    logw = _representative_log_weights(sk, float(t), representative)
    lo, hi, r = spectral_radius(sk.src, sk.dst, logw, n)
    left = _left_vector(sk.src, sk.dst, logw, n)
    lam = 0.5 * (lo + hi)
    kern = np.exp(logw) * r[sk.dst] / (lam * r[sk.src])
    kern = kern / np.bincount(sk.src, weights=kern, minlength=n)[sk.src]
    pi = left * r
    pi = pi / pi.sum()
    flow = pi[sk.src] * kern
    entropy = -_edge_mean(flow, np.log(np.where(kern > 0, kern, 1.0)))
    integral = _edge_mean(flow, logw)
    direct = (_edge_mean(flow, sk.phi_lo), _edge_mean(flow, sk.phi_hi))
    psi_lo = -math.inf if np.any((flow > 0) & np.isneginf(sk.psi_lo)) else _edge_mean(flow, sk.psi_lo)
    reduced = (psi_lo, _edge_mean(flow, sk.psi_hi))
    lyap = (max(direct[0], reduced[0]), min(direct[1], reduced[1]))
    if lyap[0] > lyap[1]:  # rounding only; both enclose the same value
        mid = 0.5 * (lyap[0] + lyap[1])
        lyap = (mid, mid)
    return MarkovEquilibrium(
        depth=sk.depth,
        t=float(t),
        representative=representative,
        states=sk.states,
        src=sk.src,
        dst=sk.dst,
        kernel=kern,
        stationary=pi,
        log_eigenvalue=math.log(lam),
        entropy=entropy,
        potential_integral=integral,
        lyap_c=lyap,
        cylinder_masses=_cylinder_masses(sk.states, pi, min(sk.depth, 6)),
    )


# ------------------------------------------------------------ periodic measures


def lyap_of_periodic(w: str, sigma=DEFAULT_SIGMA):
    """Central exponent of the periodic orbit with period word ``w``.

    For ``w = 0^n`` both fixed points of the central map are periodic and the
    pair ``(1.0, -1.0)`` (Q, then P) is returned; otherwise a float.
    """
    if not is_cyclically_admissible(w):
        raise NonAdmissible(f"word {w!r} is not cyclically admissible")
    if "1" not in w:
        return (1.0, -1.0)
    return periodic_fixed_point(w, sigma)[0].log_abs_multiplier / len(w)


@dataclass(frozen=True)
class EmpiricalStats:
    n: int
    eps: float
    fraction_near_Q: float
    fraction_near_P: float
    lyap: float


def empirical_measure_stats(n: int, eps: float = 0.05, sigma=DEFAULT_SIGMA) -> EmpiricalStats:
    """Time fractions near Q and P along the periodic orbit of ``1 0^n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 1/2)")
    w = "1" + "0" * n
    ys, cs, log_abs = periodic_orbit(w, sigma)
    return EmpiricalStats(n, eps, float(np.mean(ys < eps)), float(np.mean(cs < eps)), log_abs / len(w))


# ------------------------------------------------------------ phase transition


@dataclass(frozen=True)
class PhaseTransitionEstimate:
    depth: int
    t0_low: float
    t0_high: float
    method: str
    details: Dict[str, float] = field(default_factory=dict)

    @property
    def width(self):
        return self.t0_high - self.t0_low

    def overlaps(self, other, slack=0.0):
        return self.t0_low <= other.t0_high + slack and other.t0_low <= self.t0_high + slack


def _bisect_crossing(g, a, b, tol):
    """Shrink ``[a, b]`` with ``g(a) > 0 >= g(b)`` to width ``tol``."""
    ga, gb = g(a), g(b)
    if not (ga > 0.0 >= gb):
        raise ConvergenceFailure("pressure does not cross the diagonal on [0, h_top]", (a, b))
    while b - a > tol:
        mid = 0.5 * (a + b)
        if g(mid) > 0.0:
            a = mid
        else:
            b = mid
    return a, b


def find_t0(k: int = DEFAULT_DEPTH, tol: float = 1e-10, sigma=DEFAULT_SIGMA) -> PhaseTransitionEstimate:
    """Bracket t0 by the crossings of the pressure bounds with the diagonal.

    ``t0_high`` is the right end of the bracket for the crossing of the upper
    bound, ``t0_low`` the left end of the bracket for the lower bound.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    sk = _skeleton(int(k), float(sigma))
    h = sft_entropy()
    cache = {}

    def g_hi(t):
        lo, hi, cache["u"] = _log_rho_upper(sk, t, cache.get("u"))
        return hi - t

    def g_lo(t):
        lo, hi, cache["l"] = _log_rho_lower(sk, t, cache.get("l"))
        return lo - t

    _, t_high = _bisect_crossing(g_hi, 0.0, h, tol)
    t_low, _ = _bisect_crossing(g_lo, 0.0, h, tol)
    return PhaseTransitionEstimate(sk.depth, min(t_low, t_high), t_high, "root_of_pressure", {"tol": tol})


def _ratio_interval(me, h_scale=1.0):
    lo, hi = me.lyap_c
    if not hi < 0.0:
        return None
    return me.entropy / (1.0 - lo), me.entropy / (1.0 - hi)


def t0_variational(k: int = DEFAULT_DEPTH, sigma=DEFAULT_SIGMA, grid=64, rounds=2, refine=8,
                   representatives=("lower", "upper")) -> PhaseTransitionEstimate:
    """Estimate t0 as the largest ``h/(1 - lambda^c)`` over depth-k equilibria.

    The family is ``markov_equilibrium(k, t, rep)`` for t on a grid over
    ``[0, h_top]`` refined around the maximizer; only members whose exponent
    enclosure is negative take part.  The ratio of each member is an interval
    because its exponent is; the result is ``[max lower ratio, max upper ratio]``.
    """
    h = sft_entropy()
    best = {"lo": -math.inf, "hi": -math.inf, "t": math.nan}
    ratio0 = None

    def visit(t):
        nonlocal ratio0
        for rep in representatives:
            r = _ratio_interval(markov_equilibrium(k, float(t), rep, sigma))
            if r is None:
                continue
            if t == 0.0 and ratio0 is None:
                ratio0 = r
            best["lo"] = max(best["lo"], r[0])
            if r[1] > best["hi"]:
                best["hi"], best["t"] = r[1], float(t)

    ts = np.linspace(0.0, h, grid)
    for t in ts:
        visit(t)
    spacing = ts[1] - ts[0]
    for _ in range(rounds):
        centre = best["t"]
        pts = np.linspace(max(0.0, centre - spacing), min(h, centre + spacing), refine)
        for t in pts:
            visit(t)
        spacing = pts[1] - pts[0]
    if not math.isfinite(best["hi"]):
        raise ConvergenceFailure("no equilibrium with a negative central exponent in the family")
    details = {"t_argmax": best["t"], "ratio_at_0_low": ratio0[0], "ratio_at_0_high": ratio0[1]}
    return PhaseTransitionEstimate(int(k), best["lo"], best["hi"], "variational_sup", details)

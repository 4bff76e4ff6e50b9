"""Named verification suites: the module invariants as runnable checks.

Each suite returns a list of :class:`Check` records with the measured value
and the bound it was compared against.  ``run_suite("all")`` runs them all.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List

import numpy as np

from . import central_ifs as ci
from . import core_map as cm
from . import symbolic as sy
from . import thermo as th

__all__ = ["Check", "SUITES", "run_suite", "contraction_words", "block_pattern_words"]


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    value: float
    bound: float
    detail: str = ""


def _le(suite, name, value, bound, detail=""):
    return Check(suite, name, bool(value <= bound), float(value), float(bound), detail)


def _ge(suite, name, value, bound, detail=""):
    return Check(suite, name, bool(value >= bound), float(value), float(bound), detail)


# ------------------------------------------------------------------ words


def block_pattern_words(max_len=16):
    """All admissible words of length <= max_len ending in 1."""
    out = []
    for n in range(1, max_len + 1):
        out.extend(w for w in sy.enumerate_words(n) if w[-1] == "1")
    return out


def contraction_words(count=50, seed=0, target=1e-12, sigma=ci.DEFAULT_SIGMA):
    """Words ``1 0^k 1 (0^m 1)...`` long enough for the fiber to reach ``target``.

    k cycles through 1..4; the gaps m are drawn from 1..k, equal to k half the
    time, so the block ``1 0^k 1`` keeps recurring.  Returns tuples
    ``(word, block, markers_needed)``.
    """
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        k = 1 + i % 4
        block = "1" + "0" * k + "1"
        a, _ = ci.block_rate(k, sigma)
        C = ci.contraction_certificate(block, sigma).C
        need = math.ceil(math.log(target / C) / math.log(a))
        parts = [block]
        occurrences = 1
        while occurrences <= need:
            m = k if rng.random() < 0.5 else int(rng.integers(1, k + 1))
            parts.append("0" * m + "1")
            occurrences += m == k
        out.append(("".join(parts), block, need))
    return out


# ------------------------------------------------------------------ suites


def suite_map(seed=0) -> List[Check]:
    s = "map"
    rng = np.random.default_rng(seed)
    checks = []
    ys = rng.random(1000)
    ns = rng.integers(1, 51, size=1000)
    err = 0.0
    for y, n in zip(ys, ns):
        v = y
        for _ in range(n):
            v = cm.f_iter(v, 1)
        direct = cm.f_iter(y, int(n))
        err = max(err, abs(direct - v) / abs(direct))
    checks.append(_le(s, "f_iter equals n-fold composition (rel)", err, 1e-9))

    yy = rng.uniform(0.01, 0.99, 1000)
    h = 1e-6
    fd_err = 0.0
    for n in (1, 2, 5):
        fd = (cm.f_iter(yy + h, n) - cm.f_iter(yy - h, n)) / (2 * h)
        fd_err = max(fd_err, float(np.max(np.abs(fd / cm.df_iter(yy, n) - 1))))
    checks.append(_le(s, "df_iter matches central differences (rel)", fd_err, 1e-6))

    chain_err = 0.0
    for n in (2, 7, 15):
        prod = np.ones_like(yy)
        for j in range(n):
            prod *= cm.df_iter(cm.f_iter(yy, j), 1)
        chain_err = max(chain_err, float(np.max(np.abs(prod / cm.df_iter(yy, n) - 1))))
    checks.append(_le(s, "df_iter matches the chain rule (rel)", chain_err, 1e-10))

    checks.append(_le(s, "df_iter(1, 1) = 1/e", abs(cm.df_iter(1.0, 1) - math.exp(-1)), 1e-12))
    checks.append(_le(s, "df_iter(0+, 1) = e", abs(cm.df_iter(0.0, 1, allow_zero=True) - math.e), 1e-12))
    grid = np.linspace(0.0, 1.0, 10_001)[1:]
    d = cm.df_iter(grid, 1)
    checks.append(_le(s, "f' strictly decreasing on a 1e4 grid", float(np.max(np.diff(d))), -1e-300))
    fy = cm.f_iter(np.linspace(0, 1, 10_001), 9)
    checks.append(_le(s, "f^9 strictly increasing on a 1e4 grid", -float(np.min(np.diff(fy))), 0.0 - 1e-300))

    fixed_drift = max(max(abs(a - b) for a, b in zip(cm.apply_F(p), p)) for p in (cm.Q, cm.P))
    checks.append(_le(s, "Q and P are fixed exactly", fixed_drift, 0.0))

    bad = 0
    for _ in range(1000):
        start = cm.Point3(*rng.random(3))
        rec = cm.orbit(start, cm.DEFAULT_PARAMS, 30)
        bad += not sy.is_admissible(rec.itinerary)
    checks.append(_le(s, "orbit itineraries avoid 11 (1e3 random starts)", bad, 0))
    return checks


def suite_contraction(max_len=16, words=50) -> List[Check]:
    s = "contraction"
    checks = []
    grid = np.linspace(1e-3, 1.0, 100)
    err = 0.0
    for w in block_pattern_words(max_len):
        chain = np.abs(ci.dphi_chain(w, grid))
        prod = ci.dphi_product(w, grid)
        err = max(err, float(np.max(np.abs(chain / prod - 1))))
    checks.append(_le(s, f"product formula equals chain rule, words <= {max_len} (rel)", err, 1e-10))

    worst_cert = worst_geo = worst_diam = 0.0
    for w, block, need in contraction_words(words):
        cert = ci.contraction_certificate(w)
        worst_cert = max(worst_cert, max(v / b for v, b in zip(cert.sup_values, cert.bounds)))
        geo = ci.geometric_rate(w, block)
        worst_geo = max(worst_geo, max(v / b for v, b in zip(geo.sup_values, geo.bounds)))
        marker = geo.marker_times[need]
        worst_diam = max(worst_diam, ci.fiber_enclosure(w[:marker]).diam)
    checks.append(_le(s, f"contraction bound on {words} words (sup/bound)", worst_cert, 1 + ci.BOUND_SLACK))
    checks.append(_le(s, f"geometric bound C a^j on {words} words (sup/bound)", worst_geo, 1 + ci.BOUND_SLACK))
    checks.append(_le(s, "fiber diameter at the predicted marker", worst_diam, 1e-12))

    nest = 0.0
    for w in block_pattern_words(10) + sy.enumerate_words(10):
        parent = ci.fiber_enclosure(w[:-1])
        child = ci.fiber_enclosure(w)
        ends = ci.compose_phi(w[-1], np.array([parent.lo, parent.hi]))
        nest = max(nest, abs(min(ends) - child.lo), abs(max(ends) - child.hi))
    checks.append(_le(s, "fiber of p.s is the branch image of the fiber of p", nest, 1e-14))

    rates = [ci.block_rate(k)[0] for k in range(1, 11)]
    checks.append(_le(s, "a(k) increasing in k", -float(np.min(np.diff(rates))), 0.0))
    checks.append(_le(s, "a(10) < 1", rates[-1], 1.0 - 1e-15))
    return checks


def suite_exponents(max_len=14) -> List[Check]:
    s = "exponents"
    worst = -math.inf
    count = 0
    worst_freq = -math.inf
    sigma = ci.DEFAULT_SIGMA
    logs_a = {k: math.log(ci.block_rate(k, sigma)[0]) for k in range(1, max_len)}
    for n in range(1, max_len + 1):
        for w in sy.enumerate_periodic(n):
            if "1" not in w:
                continue
            lam = th.lyap_of_periodic(w, sigma)
            worst = max(worst, lam)
            count += 1
            cyc = w * 3
            for k, la in logs_a.items():
                block = "1" + "0" * k + "1"
                occ = sum(cyc.startswith(block, i) for i in range(n, 2 * n))
                if occ:
                    worst_freq = max(worst_freq, lam - occ / n * la)
    checks = [_le(s, f"max exponent over {count} periodic words <= {max_len}", worst, -1e-300)]
    checks.append(_le(s, "exponent <= gamma log a(k) for every block 1 0^k 1", worst_freq, 1e-9))
    q_p = th.lyap_of_periodic("0")
    checks.append(_le(s, "word 0 gives exactly {+1, -1}", 0.0 if q_p == (1.0, -1.0) else 1.0, 0.0))
    return checks


def suite_convergence() -> List[Check]:
    s = "convergence"
    ns = list(range(10, 201, 10))
    lams = [th.lyap_of_periodic("1" + "0" * n) for n in ns]
    checks = [_le(s, "1 0^n exponents negative", max(lams), -1e-300)]
    mags = np.abs(lams)
    checks.append(_le(s, "1 0^n exponent magnitudes decreasing", float(np.max(np.diff(mags))), -1e-300))
    checks.append(_le(s, "1 0^200 exponent magnitude", float(mags[-1]), 1e-12))
    st = th.empirical_measure_stats(200, 0.05)
    checks.append(_le(s, "n=200: |fraction near Q - 1/2|", abs(st.fraction_near_Q - 0.5), 0.05))
    checks.append(_le(s, "n=200: |fraction near P - 1/2|", abs(st.fraction_near_P - 0.5), 0.05))
    st10 = th.empirical_measure_stats(10, 0.05)
    checks.append(_le(s, "n=10: fractions sum below 1", st10.fraction_near_Q + st10.fraction_near_P, 1 - 1e-12))
    return checks


def suite_pressure(depth=12) -> List[Check]:
    s = "pressure"
    h = sy.sft_entropy()
    checks = []
    err = max(max(abs(e.p_low - h), abs(e.p_high - h)) for e in (th.pressure(k, 0.0) for k in range(2, 17)))
    checks.append(_le(s, "pressure(k, 0) = h_top for k = 2..16", err, 1e-9))

    phi = (1 + math.sqrt(5)) / 2
    me0 = th.markov_equilibrium(depth, 0.0)
    checks.append(_le(s, "t=0 equilibrium entropy = h_top", abs(me0.entropy - h), 1e-8))
    checks.append(_le(s, "t=0 equilibrium mass of [1] = 1/(1+phi^2)", abs(me0.mass("1") - 1 / (1 + phi * phi)), 1e-6))
    checks.append(_le(s, "Gibbs identity at t=0", me0.gibbs_residual(), 1e-8))

    tol = 1e-10
    est = th.find_t0(depth, tol)
    var = th.t0_variational(depth)
    checks.append(_ge(s, "t0_low > 0", est.t0_low, 1e-300))
    checks.append(_le(s, "t0_high <= h_top + tol", est.t0_high, h + tol))
    checks.append(_le(s, "root and variational brackets overlap", 0.0 if est.overlaps(var) else 1.0, 0.0,
                      f"root [{est.t0_low:.6f}, {est.t0_high:.6f}] variational [{var.t0_low:.6f}, {var.t0_high:.6f}]"))

    ts = np.linspace(0.0, 0.6, 64)
    curve = [th.pressure(depth, float(t)) for t in ts]
    hi = np.array([e.p_high for e in curve])
    lo = np.array([e.p_low for e in curve])
    checks.append(_ge(s, "p_high >= t on the grid", float(np.min(hi - ts)), 0.0))
    pre = ts <= est.t0_low
    checks.append(_le(s, "p_high non-increasing before t0", float(np.max(np.diff(hi[pre]), initial=-np.inf)), 0.0))
    post = ts > est.t0_high
    excess = float(np.max(hi[post] - ts[post] - 2 * ((hi - lo)[post] + 1e-9), initial=-np.inf))
    checks.append(_le(s, "p_high - t within twice the width after t0", excess, 0.0))
    checks.append(_ge(s, "discrete convexity of p_high", float(np.min(np.diff(hi, 2))), -1e-9))

    widths = [th.pressure(k, 0.3).width for k in (6, 8, 10, 12)]
    checks.append(_le(s, "enclosure width at t=0.3 non-increasing in depth", float(np.max(np.diff(widths))), 1e-9))
    brackets = [th.find_t0(k, 1e-8).width for k in range(6, 17, 2)]
    checks.append(_le(s, "t0 bracket width non-increasing for k = 6..16", float(np.max(np.diff(brackets))), 0.0))

    me_low = th.markov_equilibrium(depth, est.t0_low / 2)
    checks.append(_le(s, "lambda^c enclosure < 0 at t0_low/2", me_low.lyap_c[1], -1e-300))
    t_hi = min(2 * est.t0_high, 0.6) if min(2 * est.t0_high, 0.6) > est.t0_high else 2 * est.t0_high
    me_high = th.markov_equilibrium(depth, t_hi)
    m = "0" * min(depth, 6)
    checks.append(_ge(s, f"mass of [{m}] at t={t_hi:.3f}", me_high.mass(m), 0.99))
    return checks


SUITES: Dict[str, Callable[[], List[Check]]] = {
    "map": suite_map,
    "contraction": suite_contraction,
    "exponents": suite_exponents,
    "convergence": suite_convergence,
    "pressure": suite_pressure,
}


def run_suite(name: str) -> List[Check]:
    if name == "all":
        return [c for fn in SUITES.values() for c in fn()]
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
    return SUITES[name]()

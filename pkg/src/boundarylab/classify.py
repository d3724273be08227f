"""Detecting rough similarity of two word metrics and comparing their measures.

Two weightings of the same free group are compared through the invariant
h|g|: bounded deviation of h1|g|1 - h2|g|2 means the metrics are roughly
similar, which for trees happens exactly when the normalized weight
vectors h1 l1 and h2 l2 coincide.  The measure side tests the same
dichotomy through cylinder mass ratios.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .boundary import VisualMetric, BoundaryPoint, gromov_bb, random_boundary_point
from .density import ConformalDensity, _header, build_density, fit_slope
from .report import ExperimentReport
from .words import GroupModel, Word, inverse_letter

SIMILAR = "SIMILAR"
NOT_SIMILAR = "NOT_SIMILAR"
INCONCLUSIVE = "INCONCLUSIVE"
EQUIVALENT = "EQUIVALENT"
SINGULAR_TENDENCY = "SINGULAR-TENDENCY"

FLAT_SLOPE = 0.01
GROWTH_SLOPE = 0.05


@dataclass(frozen=True)
class MetricPair:
    """Two weightings of the same free group with their densities."""

    d1: ConformalDensity
    d2: ConformalDensity

    def __post_init__(self) -> None:
        if self.d1.model.rank != self.d2.model.rank:
            raise ValueError("metric pairs need a common alphabet")

    @property
    def model1(self) -> GroupModel:
        return self.d1.model

    @property
    def model2(self) -> GroupModel:
        return self.d2.model


def metric_pair(
    model1: GroupModel,
    model2: GroupModel,
    epsilon1: float | None = None,
    epsilon2: float | None = None,
) -> MetricPair:
    return MetricPair(build_density(model1, epsilon1), build_density(model2, epsilon2))


def _trend_verdict(slope: float, positive: str, negative: str) -> str:
    if slope > GROWTH_SLOPE:
        return negative
    if slope < FLAT_SLOPE:
        return positive
    return INCONCLUSIVE


def similarity_deviation_report(mp: MetricPair, r_max: float) -> ExperimentReport:
    """Max of |h1 |g|_1 - h2 |g|_2| over balls of growing radius.

    Flat maxima mean the normalized lengths agree up to a bounded error
    (rough similarity); linear growth rules it out.
    """
    m1, m2 = mp.model1, mp.model2
    h1, h2 = mp.d1.h, mp.d2.h
    devs: list[tuple[float, float]] = []
    for g, w1 in m1.iter_nontrivial(r_max):
        devs.append((w1, abs(h1 * w1 - h2 * m2.wlen(g))))
    devs.sort()
    rep = ExperimentReport(
        "similarity",
        ("R", "max_deviation"),
        header=_header(m1, None, h1=h1, h2=h2, weights2=",".join(repr(w) for w in m2.weights), r_max=r_max),
    )
    rs, maxima = [], []
    running = 0.0
    i = 0
    r = 1
    while r <= r_max + 1e-9:
        while i < len(devs) and devs[i][0] <= r + 1e-9:
            running = max(running, devs[i][1])
            i += 1
        rep.add_row(float(r), running)
        rs.append(float(r))
        maxima.append(running)
        r += 1
    slope = fit_slope(rs, maxima)
    rep.summary = {
        "slope": slope,
        "verdict": _trend_verdict(slope, SIMILAR, NOT_SIMILAR),
        "max_deviation": maxima[-1],
    }
    return rep


def density_ratio_report(mp: MetricPair, depth: int) -> ExperimentReport:
    """Extremes of mu1([w])/mu2([w]) over depth-n cylinders, n <= depth.

    The log ratio is additive along letters, so the scan over all
    2k(2k-1)^{n-1} cylinders reduces to an exact extreme-path recursion
    over the last letter.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    d1, d2 = mp.d1, mp.d2
    m1, m2 = mp.model1, mp.model2
    base = math.log(d2.Z) - math.log(d1.Z)
    delta = {c: -d1.h * m1.letter_weights[c] + d2.h * m2.letter_weights[c] for c in m1.alphabet}
    vlog = {c: math.log(d1.v[c]) - math.log(d2.v[c]) for c in m1.alphabet}
    rep = ExperimentReport(
        "density-ratio",
        ("n", "ratio_min", "ratio_max", "spread"),
        header=_header(m1, d1, h2=d2.h, weights2=",".join(repr(w) for w in m2.weights), depth=depth),
    )
    lo = {c: delta[c] for c in m1.alphabet}
    hi = dict(lo)
    ns, logspreads = [], []
    for n in range(1, depth + 1):
        ratio_min = math.exp(base + min(lo[c] + vlog[c] for c in m1.alphabet))
        ratio_max = math.exp(base + max(hi[c] + vlog[c] for c in m1.alphabet))
        spread = ratio_max / ratio_min
        rep.add_row(n, ratio_min, ratio_max, spread)
        ns.append(float(n))
        logspreads.append(math.log(spread))
        lo = {
            c: delta[c] + min(lo[p] for p in m1.alphabet if p != inverse_letter(c))
            for c in m1.alphabet
        }
        hi = {
            c: delta[c] + max(hi[p] for p in m1.alphabet if p != inverse_letter(c))
            for c in m1.alphabet
        }
    slope = fit_slope(ns, logspreads) if depth > 1 else 0.0
    rep.summary = {
        "log_slope": slope,
        "verdict": _trend_verdict(slope, EQUIVALENT, SINGULAR_TENDENCY),
        "final_spread": math.exp(logspreads[-1]),
    }
    return rep


def cross_ratio(
    model: GroupModel,
    vm: VisualMetric,
    xi1: BoundaryPoint,
    xi2: BoundaryPoint,
    eta1: BoundaryPoint,
    eta2: BoundaryPoint,
) -> float:
    """[xi1, xi2; eta1, eta2] = d(xi1,eta1) d(xi2,eta2) / (d(xi1,eta2) d(xi2,eta1))."""
    points = (xi1, xi2, eta1, eta2)
    for i in range(4):
        for j in range(i + 1, 4):
            if points[i] == points[j]:
                raise ValueError("cross ratio needs four distinct points")
    bracket = (
        gromov_bb(model, xi1, eta1)
        + gromov_bb(model, xi2, eta2)
        - gromov_bb(model, xi1, eta2)
        - gromov_bb(model, xi2, eta1)
    )
    return math.exp(-vm.epsilon * bracket)


def holder_fit_report(mp: MetricPair, samples: int, seed: int) -> ExperimentReport:
    """Regression of ln d2 against ln d1 over sampled pairs.

    On roughly similar pairs the slope is D1/D2 with tight residuals; the
    cross-ratio log-log slope is fitted on sampled quadruples as well.
    """
    m1, m2 = mp.model1, mp.model2
    vm1 = mp.d1.visual_metric()
    vm2 = mp.d2.visual_metric()
    rng = random.Random(seed)
    pts: list[tuple[float, float]] = []
    while len(pts) < samples:
        xi = random_boundary_point(m1, rng)
        eta = random_boundary_point(m1, rng)
        if xi == eta:
            continue
        pts.append((
            -vm1.epsilon * gromov_bb(m1, xi, eta),
            -vm2.epsilon * gromov_bb(m2, xi, eta),
        ))
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    slope = fit_slope(xs, ys)
    xbar = sum(xs) / len(xs)
    ybar = sum(ys) / len(ys)
    rep = ExperimentReport(
        "holder",
        ("trial", "log_d1", "log_d2", "residual"),
        header=_header(m1, mp.d1, h2=mp.d2.h, epsilon2=vm2.epsilon,
                       weights2=",".join(repr(w) for w in m2.weights), samples=samples, seed=seed),
    )
    res_max = 0.0
    for t, (x, y) in enumerate(pts):
        res = y - (ybar + slope * (x - xbar))
        rep.add_row(t, x, y, res)
        res_max = max(res_max, abs(res))
    crs: list[tuple[float, float]] = []
    while len(crs) < max(samples // 4, 8):
        four = [random_boundary_point(m1, rng) for _ in range(4)]
        if len({p for p in four}) < 4:
            continue
        c1 = cross_ratio(m1, vm1, *four)
        c2 = cross_ratio(m2, vm2, *four)
        if c1 == 1.0:
            continue
        crs.append((math.log(c1), math.log(c2)))
    cr_slope = fit_slope([c[0] for c in crs], [c[1] for c in crs])
    rep.summary = {
        "slope": slope,
        "dimension_ratio": mp.d1.dimension / mp.d2.dimension,
        "residual_max": res_max,
        "cross_ratio_slope": cr_slope,
    }
    return rep

"""Flow cocycles, the invariant pair measure, tubes, and Hopf averages.

The double boundary carries the infinite invariant measure with density
e^{2h(xi,eta)} against mu x mu.  The translation flow is encoded by the
cocycles sigma and tau; averages of a kernel along sigma-bands of the
group recover integrals against that measure.
"""
from __future__ import annotations

import math
import random
import statistics
from dataclasses import dataclass

from .boundary import (
    BoundaryPoint,
    VisualMetric,
    act,
    boundary_point,
    gromov_bb,
    gromov_wb,
    random_boundary_point,
)
from .density import ConformalDensity, _header, sample_boundary_point
from .koopman import KernelStep
from .report import ExperimentReport
from .words import IDENTITY, LENGTH_EPS, GroupModel, Word, inverse_letter, length_lex_key


# -- cocycles -----------------------------------------------------------------


def sigma(model: GroupModel, g: Word, xi: BoundaryPoint) -> float:
    """Busemann-type cocycle 2(g^-1, xi) - |g|."""
    return 2.0 * gromov_wb(model, model.invert(g), xi) - model.wlen(g)


def rho(density: ConformalDensity, g: Word, xi: BoundaryPoint) -> float:
    """(1/h) log of the boundary derivative; coincides with sigma on trees."""
    ginv = density.model.invert(g)
    return math.log(density.rn_derivative(ginv, xi)) / density.h


def tau(model: GroupModel, g: Word, xi: BoundaryPoint, eta: BoundaryPoint) -> float:
    """Difference cocycle (g^-1, eta) - (g^-1, xi); strict on trees."""
    if xi == eta:
        raise ValueError("tau needs two distinct boundary points")
    ginv = model.invert(g)
    return gromov_wb(model, ginv, eta) - gromov_wb(model, ginv, xi)


# -- the invariant pair measure -----------------------------------------------


def _is_weak_prefix(a: Word, b: Word) -> bool:
    return len(a) <= len(b) and b[: len(a)] == a


@dataclass(frozen=True)
class ProductCylinder:
    """Rectangle [u] x [v] with neither cylinder inside the other.

    On such a rectangle the Gromov product (xi, eta) is constant, equal to
    the common prefix weight of u and v.
    """

    u: Word
    v: Word

    def __post_init__(self) -> None:
        if _is_weak_prefix(self.u, self.v) or _is_weak_prefix(self.v, self.u):
            raise ValueError("nested rectangle: refine before measuring")


@dataclass(frozen=True)
class BmsMeasure:
    """Pair measure with density e^{2h(xi,eta)} against mu x mu."""

    density: ConformalDensity

    def mass(self, pc: ProductCylinder) -> float:
        d = self.density
        cp = d.model.common_prefix_wlen(pc.u, pc.v)
        return math.exp(2.0 * d.h * cp) * d.mu_cylinder(pc.u) * d.mu_cylinder(pc.v)


def bms_mass(m: BmsMeasure, pc: ProductCylinder) -> float:
    return m.mass(pc)


def _refine_cylinder_for(model: GroupModel, u: Word, path: Word) -> list[Word]:
    """Split [u] until no cell is a weak prefix of `path`.

    After this, left translation by the inverse of `path` maps every cell
    to a single cylinder.
    """
    out: list[Word] = []
    stack = [u]
    while stack:
        w = stack.pop()
        if _is_weak_prefix(w, path):
            stack.extend(w + (c,) for c in model.extensions(w[-1] if w else None))
        else:
            out.append(w)
    return out


def transform_rectangle(model: GroupModel, g: Word, pc: ProductCylinder) -> tuple[ProductCylinder, ...]:
    """Partition of g.([u] x [v]) into rectangles.

    The two sides stay disjoint, so every image piece is again non-nested.
    """
    gi = model.invert(g)
    us = _refine_cylinder_for(model, pc.u, gi)
    vs = _refine_cylinder_for(model, pc.v, gi)
    return tuple(
        ProductCylinder(model.reduce_concat(g, a), model.reduce_concat(g, b))
        for a in us
        for b in vs
    )


def _random_rectangle(model: GroupModel, rng: random.Random) -> ProductCylinder:
    while True:
        u = model.random_word(rng, rng.randint(1, 3))
        v = model.random_word(rng, rng.randint(1, 3))
        if not (_is_weak_prefix(u, v) or _is_weak_prefix(v, u)):
            return ProductCylinder(u, v)


def bms_invariance_report(
    density: ConformalDensity, trials: int, seed: int
) -> ExperimentReport:
    """Mass of g.([u] x [v]) against mass of [u] x [v] on random data.

    The image is partitioned into rectangles by refining both sides along
    the path of g^-1; each residual is a pure float defect.
    """
    model = density.model
    m = BmsMeasure(density)
    rng = random.Random(seed)
    rep = ExperimentReport(
        "bms",
        ("trial", "g", "u", "v", "mass", "image_mass", "residual"),
        header=_header(model, density, trials=trials, seed=seed),
    )
    for t in range(trials):
        pc = _random_rectangle(model, rng)
        g = model.random_word(rng, rng.randint(1, 4))
        mass = m.mass(pc)
        image_mass = sum(m.mass(piece) for piece in transform_rectangle(model, g, pc))
        rep.add_row(
            t, model.format(g), model.format(pc.u), model.format(pc.v),
            mass, image_mass, image_mass - mass,
        )
    rep.summary = {
        "max_residual": max(abs(r) for r in rep.column("residual")),
        "trials": trials,
    }
    return rep


# -- cocycle gap report -------------------------------------------------------


def tau_sigma_gap_report(
    density: ConformalDensity, M: float, samples: int, seed: int
) -> ExperimentReport:
    """|tau(g,xi,eta) - sigma(g,eta)| over admissible triples.

    Admissible means both (xi,eta) and (g xi, g eta) are below M.  On trees
    the gap equals (g xi, g eta) - (xi, eta) exactly, so it stays below M;
    the report asserts the looser 2M bound the general argument gives.
    """
    model = density.model
    rng = random.Random(seed)
    rep = ExperimentReport(
        "cocycle-gap",
        ("trial", "g", "prod_pair", "prod_image", "gap"),
        header=_header(model, density, M=M, samples=samples, seed=seed),
    )
    max_gap = 0.0
    trial = 0
    while trial < samples:
        xi = random_boundary_point(model, rng)
        eta = random_boundary_point(model, rng)
        if xi == eta or gromov_bb(model, xi, eta) >= M:
            continue
        # park g^-1 near the geodesic so the image product stays small
        side = model.random_word(rng, rng.randint(0, 1))
        base = xi.prefix(rng.randint(0, 3)) if rng.random() < 0.5 else eta.prefix(rng.randint(0, 3))
        g = model.invert(model.reduce_concat(base, side))
        gxi, geta = act(model, g, xi), act(model, g, eta)
        if gxi == geta:
            continue
        prod = gromov_bb(model, xi, eta)
        prod_img = gromov_bb(model, gxi, geta)
        if prod_img >= M:
            continue
        gap = abs(tau(model, g, xi, eta) - sigma(model, g, eta))
        rep.add_row(trial, model.format(g), prod, prod_img, gap)
        max_gap = max(max_gap, gap)
        trial += 1
    rep.summary = {"max_gap": max_gap, "bound": 2.0 * M, "samples": samples}
    assert max_gap <= 2.0 * M + 1e-9
    return rep


# -- properness of the window action ------------------------------------------


def window_radius(density: ConformalDensity, theta: float) -> float:
    """Largest Gromov product allowed by d_eps >= theta (negative: empty)."""
    if theta <= 0:
        raise ValueError("theta must be positive")
    return -math.log(theta) / density.epsilon


def properness_report(
    density: ConformalDensity, theta: float, k: float, cap: float | None = None
) -> ExperimentReport:
    """Exhaustive scan for g moving the window D_{theta,k} across itself.

    A hit is decided exactly on a witness rectangle: exits of the geodesic
    from the path of g^-1 at partial-sum positions p <= q with p <= M,
    |g| - q <= M and the time shift 2q - |g| (or 2p - |g|) inside (-2k, 2k).
    Every point of the witness rectangle then realizes the intersection.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    model = density.model
    M = window_radius(density, theta)
    bound = 2.0 * k + 2.0 * max(M, 0.0)
    if cap is None:
        cap = bound + 2.0 * model.max_weight
    rep = ExperimentReport(
        "properness",
        ("g", "wlen", "shift", "witness_xi", "witness_eta"),
        header=_header(model, density, theta=theta, k=k, window=M, cap=cap),
    )
    hits = 0
    max_hit = 0.0
    if M >= 0:
        for g in model.enumerate_ball(cap):
            found = _window_hit(model, g, M, k)
            if found is None:
                continue
            shift, u, v = found
            rep.add_row(model.format(g), model.wlen(g), shift, model.format(u), model.format(v))
            hits += 1
            max_hit = max(max_hit, model.wlen(g))
            assert model.wlen(g) <= bound + 1e-9
    rep.summary = {
        "hit_count": hits,
        "max_hit_wlen": max_hit,
        "bound": bound,
        "empty_window": M < 0,
    }
    return rep


def _window_hit(model: GroupModel, g: Word, M: float, k: float):
    """Witness (time shift, xi-cylinder, eta-cylinder) or None."""
    gi = model.invert(g)
    lw = model.letter_weights
    partial = [0.0]
    for c in gi:
        partial.append(partial[-1] + lw[c])
    total = partial[-1]
    for j, q in enumerate(partial):
        deep_ok = total - q <= M + LENGTH_EPS
        shallow_ok = q <= M + LENGTH_EPS
        shift = 2.0 * q - total
        if abs(shift) < 2.0 * k - LENGTH_EPS and (deep_ok or shallow_ok):
            # eta exits at position j, xi exits at the other end of the path
            i = 0 if deep_ok else len(gi)
            u = _exit_cylinder(model, gi, i, avoid=None)
            v = _exit_cylinder(model, gi, j, avoid=u[-1] if i == j else None)
            return shift, u, v
    return None


def _exit_cylinder(model: GroupModel, path: Word, j: int, avoid: int | None) -> Word:
    """Prefix of `path` of j letters plus a letter leaving the path."""
    vertex = path[:j]
    blocked = set()
    if vertex:
        blocked.add(inverse_letter(vertex[-1]))
    if j < len(path):
        blocked.add(path[j])
    if avoid is not None:
        blocked.add(avoid)
    for c in model.alphabet:
        if c not in blocked:
            return vertex + (c,)
    raise AssertionError("alphabet exhausted")


# -- tubes along a geodesic ---------------------------------------------------


def _line_vertices(model: GroupModel, xi: BoundaryPoint, eta: BoundaryPoint, s_min: float, s_max: float):
    """Vertices of the geodesic (xi, eta) with signed position in [s_min, s_max].

    Positions are weighted distances from the projection of the base point,
    positive toward eta.  Yields (s, vertex word, blocked letters) where
    blocked are the two line directions at the vertex.
    """
    lw = model.letter_weights
    d0 = 0
    while xi.letter(d0) == eta.letter(d0):
        d0 += 1
    pr = xi.prefix(d0)
    if s_min <= 0.0 <= s_max:
        yield 0.0, pr, (xi.letter(d0), eta.letter(d0))
    for point, sign in ((eta, 1.0), (xi, -1.0)):
        s = 0.0
        m = d0
        while True:
            c = point.letter(m)
            s += lw[c]
            m += 1
            pos = sign * s
            if (pos > s_max and sign > 0) or (pos < s_min and sign < 0):
                break
            if s_min <= pos <= s_max:
                yield pos, point.prefix(m), (inverse_letter(c), point.letter(m))


def _side_words(model: GroupModel, blocked, budget: float):
    """Non-backtracking letter paths of weight <= budget leaving the line."""
    yield IDENTITY, 0.0
    if budget < model.min_weight - LENGTH_EPS:
        return
    lw = model.letter_weights
    stack = [(IDENTITY, 0.0)]
    while stack:
        w, lwgt = stack.pop()
        choices = model.extensions(w[-1]) if w else model.alphabet
        for c in choices:
            if not w and c in blocked:
                continue
            nw = lwgt + lw[c]
            if nw <= budget + LENGTH_EPS:
                path = w + (c,)
                yield path, nw
                stack.append((path, nw))


def _tube_candidates(model: GroupModel, xi: BoundaryPoint, eta: BoundaryPoint, s_min: float, s_max: float, M: float):
    """(g, sigma(g,eta)) for g^-1 = vertex . side-path over a position window."""
    for s, x, blocked in _line_vertices(model, xi, eta, s_min, s_max):
        for w, _ in _side_words(model, blocked, M):
            gi = model.reduce_concat(x, w)
            g = model.invert(gi)
            yield g, sigma(model, g, eta)


def tube_enumerate(
    model: GroupModel,
    xi: BoundaryPoint,
    eta: BoundaryPoint,
    a: float,
    b: float,
    M: float = 0.0,
) -> list[Word]:
    """All g with sigma(g, eta) in [a, b] and (g xi, g eta) <= M.

    Such g decompose as (x w)^-1 with x on the geodesic (xi, eta) and w a
    side path of weight <= M, so the band is swept by walking positions;
    membership itself is decided by the cocycle.
    """
    if xi == eta:
        raise ValueError("tube needs two distinct boundary points")
    if M < 0:
        raise ValueError("M must be nonnegative")
    if a > b:
        return []
    cp0 = gromov_bb(model, xi, eta)
    out = []
    seen = set()
    for g, sg in _tube_candidates(model, xi, eta, a - cp0 - LENGTH_EPS, b - cp0 + M + LENGTH_EPS, M):
        if a - LENGTH_EPS <= sg <= b + LENGTH_EPS:
            assert g not in seen
            seen.add(g)
            out.append((sg, length_lex_key(model, g), g))
    out.sort()
    return [g for _, _, g in out]


# -- Hopf averages ------------------------------------------------------------


def flow_volume(density: ConformalDensity) -> float:
    """Mass of the unit-time flow box over the section {(xi,eta) : cp = 0}.

    The section is crossed once per geodesic vertex and the crossing lasts
    the weight of the edge toward eta, so the box has mass
    sum over distinct first letters x, y of l(y) mu([x]) mu([y]).
    """
    model = density.model
    lw = model.letter_weights
    return sum(
        lw[y] * density.mu_cylinder((x,)) * density.mu_cylinder((y,))
        for x in model.alphabet
        for y in model.alphabet
        if x != y
    )


def kernel_support_depth(model: GroupModel, K: KernelStep) -> float:
    """Largest Gromov product on the support of K.

    Rejects kernels with a nonzero cell touching the diagonal, whose
    support is unbounded in the pair space.
    """
    depth = 0.0
    for u, v, val in K.parts:
        if val == 0.0:
            continue
        if _is_weak_prefix(u, v) or _is_weak_prefix(v, u):
            raise ValueError("kernel cell touches the diagonal: unbounded support")
        depth = max(depth, model.common_prefix_wlen(u, v))
    return depth


def kernel_value_at(model: GroupModel, K: KernelStep, xi: BoundaryPoint, eta: BoundaryPoint) -> float:
    depth = max((max(len(u), len(v)) for u, v, _ in K.parts), default=0)
    return K.value_on(xi.prefix(depth), eta.prefix(depth))


def kernel_integral(density: ConformalDensity, K: KernelStep) -> float:
    """Integral of K against the pair measure (cells off the diagonal)."""
    m = BmsMeasure(density)
    return sum(
        val * m.mass(ProductCylinder(u, v)) for u, v, val in K.parts if val != 0.0
    )


def hopf_average_J(
    density: ConformalDensity,
    f: KernelStep,
    xi: BoundaryPoint,
    eta: BoundaryPoint,
    a: float,
    T: float,
) -> float:
    """Average of f over the sigma-band [a, a+T], weighted by the flow box.

    Converges to the pair-measure integral of f as T grows, for almost
    every (xi, eta).
    """
    if T <= 0:
        raise ValueError("T must be positive")
    model = density.model
    M = kernel_support_depth(model, f)
    total = sum(
        kernel_value_at(model, f, act(model, g, xi), act(model, g, eta))
        for g in tube_enumerate(model, xi, eta, a, a + T, M)
    )
    return flow_volume(density) * total / T


def hopf_average_I(
    density: ConformalDensity,
    f: KernelStep,
    xi: BoundaryPoint,
    eta: BoundaryPoint,
    a: float,
    T: float,
) -> float:
    """Average of f over the tau-band [a, a+T]; same limit as the sigma band."""
    if T <= 0:
        raise ValueError("T must be positive")
    if xi == eta:
        raise ValueError("tube needs two distinct boundary points")
    model = density.model
    M = kernel_support_depth(model, f)
    total = 0.0
    seen = set()
    for g, _ in _tube_candidates(model, xi, eta, a - LENGTH_EPS, a + T + LENGTH_EPS, M):
        if g in seen:
            continue
        seen.add(g)
        if a - LENGTH_EPS <= tau(model, g, xi, eta) <= a + T + LENGTH_EPS:
            total += kernel_value_at(model, f, act(model, g, xi), act(model, g, eta))
    return flow_volume(density) * total / T


# -- the ergodic experiment ---------------------------------------------------

PERTURB_LETTERS = 3


def _perturbed_copy(model: GroupModel, xi: BoundaryPoint) -> BoundaryPoint:
    """Boundary point sharing the first PERTURB_LETTERS letters with xi."""
    head = xi.prefix(PERTURB_LETTERS)
    blocked = {inverse_letter(head[-1]), xi.letter(PERTURB_LETTERS)}
    c = next(c for c in model.alphabet if c not in blocked)
    return boundary_point(model, head, (c,))


def ergodic_experiment(
    density: ConformalDensity,
    f: KernelStep,
    n_pairs: int,
    T_grid: tuple[float, ...],
    seed: int,
    a: float = 0.0,
) -> ExperimentReport:
    """Hopf averages J_a^{a+T}(f) on pairs sampled from the section.

    Pairs are drawn from mu x mu conditioned on distinct first letters
    (where the pair measure equals the product exactly); every pair gets
    an independent stream seeded from the master seed.  The contraction
    diagnostic tracks d(g xi, g xi') e^{eps sigma} over the tube for a
    perturbed companion xi'.
    """
    model = density.model
    vm = VisualMetric(density.epsilon)
    M = kernel_support_depth(model, f)
    vol = flow_volume(density)
    target = kernel_integral(density, f)
    t_max = max(T_grid)
    depth = int((a + t_max + M) / model.min_weight) + 8
    master = random.Random(seed)
    rep = ExperimentReport(
        "ergodic",
        ("pair", "T", "J", "rel_error"),
        header=_header(
            model, density, n_pairs=n_pairs, seed=seed, a=a, target=target, volume=vol
        ),
    )
    per_T: dict[float, list[float]] = {T: [] for T in T_grid}
    j_max: list[float] = []
    contraction = 0.0
    for pid in range(n_pairs):
        rng = random.Random(master.randrange(2**63))
        while True:
            xi = sample_boundary_point(density, depth, rng)
            eta = sample_boundary_point(density, depth, rng)
            if xi.letter(0) != eta.letter(0):
                break
        terms = []
        xi2 = _perturbed_copy(model, xi)
        scale2 = math.exp(-density.epsilon * model.wlen(xi.prefix(PERTURB_LETTERS)))
        for g in tube_enumerate(model, xi, eta, a, a + t_max, M):
            sg = sigma(model, g, eta)
            gxi, geta = act(model, g, xi), act(model, g, eta)
            terms.append((sg, kernel_value_at(model, f, gxi, geta)))
            diag = vm.distance(model, gxi, act(model, g, xi2)) * math.exp(density.epsilon * sg)
            contraction = max(contraction, diag / scale2)
        terms.sort()
        for T in T_grid:
            total = sum(v for sg, v in terms if sg <= a + T + LENGTH_EPS)
            J = vol * total / T
            rel = abs(J - target) / target if target else abs(J)
            rep.add_row(pid, T, J, rel)
            per_T[T].append(rel)
            if T == t_max:
                j_max.append(J)
    rep.summary = {
        "target": target,
        "volume": vol,
        "median_J_at_max_T": statistics.median(j_max),
        "contraction_max": contraction,
        **{f"median_rel_T{T:g}": statistics.median(per_T[T]) for T in T_grid},
    }
    assert contraction <= 1.0 + 1e-9
    return rep

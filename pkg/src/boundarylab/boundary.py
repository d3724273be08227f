"""Tree boundary: infinite reduced words, cylinders and visual metrics.

Boundary points are eventually periodic infinite reduced words stored in
a canonical (head, period) form: the period is primitive and the head is
as short as possible, so structural equality decides point equality.
A cylinder is identified with its defining prefix; the empty prefix
stands for the whole boundary.  The visual metric of parameter eps is
exactly d_eps(xi, eta) = exp(-eps * (xi, eta)) because the tree is
0-hyperbolic.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .words import IDENTITY, GroupModel, Word

WHOLE_BOUNDARY: Word = IDENTITY


def _primitive_root(period: Word) -> Word:
    n = len(period)
    for d in range(1, n + 1):
        if n % d == 0 and period == period[:d] * (n // d):
            return period[:d]
    return period


@dataclass(frozen=True)
class BoundaryPoint:
    """Eventually periodic infinite reduced word, canonical form."""

    head: Word
    period: Word

    def letter(self, i: int) -> int:
        if i < len(self.head):
            return self.head[i]
        return self.period[(i - len(self.head)) % len(self.period)]

    def prefix(self, n_letters: int) -> Word:
        return tuple(self.letter(i) for i in range(n_letters))

    def __str__(self) -> str:  # pragma: no cover - debugging aid
        return f"{self.head!r}({self.period!r})^oo"


def boundary_point(model: GroupModel, head: Word, period: Word) -> BoundaryPoint:
    """Validate and canonicalize an eventually periodic boundary point."""
    if not period:
        raise ValueError("period must be nonempty")
    if not model.is_reduced(head) or not model.is_reduced(period):
        raise ValueError("head and period must be freely reduced")
    if period[-1] == period[0] ^ 1:
        raise ValueError("period must stay reduced across its wrap")
    if head and head[-1] == period[0] ^ 1:
        raise ValueError("head-period junction must stay reduced")
    period = _primitive_root(period)
    head = list(head)
    while head and head[-1] == period[-1]:
        head.pop()
        period = period[-1:] + period[:-1]
    return BoundaryPoint(tuple(head), period)


def from_strings(model: GroupModel, head: str, period: str) -> BoundaryPoint:
    return boundary_point(model, model.parse(head), model.parse(period))


def random_boundary_point(
    model: GroupModel, rng: random.Random, head_letters: int = 4, period_letters: int = 3
) -> BoundaryPoint:
    while True:
        head = model.random_word(rng, rng.randint(0, head_letters))
        period = model.random_word(rng, rng.randint(1, period_letters))
        try:
            return boundary_point(model, head, period)
        except ValueError:
            continue


# -- Gromov products involving the boundary ---------------------------------


def gromov_wb(model: GroupModel, g: Word, xi: BoundaryPoint) -> float:
    """(g, xi): weighted length of the common prefix of g and xi."""
    lw = model.letter_weights
    total = 0.0
    for i, c in enumerate(g):
        if xi.letter(i) != c:
            break
        total += lw[c]
    return total


def _divergence_bound(xi: BoundaryPoint, eta: BoundaryPoint) -> int:
    lcm = math.lcm(len(xi.period), len(eta.period))
    return max(len(xi.head), len(eta.head)) + lcm + 1


def gromov_bb(model: GroupModel, xi: BoundaryPoint, eta: BoundaryPoint) -> float:
    """(xi, eta): common prefix weight, +inf when the points coincide."""
    if xi == eta:
        return math.inf
    lw = model.letter_weights
    total = 0.0
    for i in range(_divergence_bound(xi, eta)):
        cx = xi.letter(i)
        if cx != eta.letter(i):
            return total
        total += lw[cx]
    raise AssertionError("distinct canonical points must diverge within the bound")


@dataclass(frozen=True)
class VisualMetric:
    """d_eps(xi, eta) = exp(-eps (xi, eta)) on the boundary."""

    epsilon: float

    def __post_init__(self) -> None:
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")

    def distance(self, model: GroupModel, xi: BoundaryPoint, eta: BoundaryPoint) -> float:
        prod = gromov_bb(model, xi, eta)
        return 0.0 if math.isinf(prod) else math.exp(-self.epsilon * prod)

    def scale_of_cylinder(self, model: GroupModel, prefix: Word) -> float:
        return math.exp(-self.epsilon * model.wlen(prefix))


# -- cylinders ----------------------------------------------------------------


def cylinder_contains_point(prefix: Word, xi: BoundaryPoint) -> bool:
    return all(xi.letter(i) == c for i, c in enumerate(prefix))


def cylinders_nested(inner: Word, outer: Word) -> bool:
    """True when [inner] is contained in [outer] (outer a prefix of inner)."""
    return inner[: len(outer)] == outer


def cylinders_disjoint(u: Word, v: Word) -> bool:
    return not cylinders_nested(u, v) and not cylinders_nested(v, u)


def interior_point(model: GroupModel, prefix: Word) -> BoundaryPoint:
    """Canonical boundary point inside a cylinder (prefix extended periodically)."""
    ext = forward_letter(model, prefix)
    return boundary_point(model, prefix, (ext,))


def forward_letter(model: GroupModel, g: Word) -> int:
    """First letter of the alphabet that extends g without cancellation."""
    if not g:
        return 0
    forbidden = g[-1] ^ 1
    for c in model.alphabet:
        if c != forbidden:
            return c
    raise AssertionError("rank >= 2 always leaves a legal extension")


def forward_extension(model: GroupModel, g: Word) -> BoundaryPoint:
    """Deterministic boundary extension of g (repeat the first legal letter)."""
    return boundary_point(model, g, (forward_letter(model, g),))


# -- shadows and balls --------------------------------------------------------


def shadow(model: GroupModel, g: Word, sigma0: float) -> Word:
    """Shortest prefix cylinder of g with wlen(prefix) > wlen(g) - sigma0.

    This is the shadow cast by g from the identity: the boundary points
    whose Gromov product with g exceeds |g| - sigma0.
    """
    if not g:
        raise ValueError("the identity casts no shadow")
    if sigma0 <= 0:
        raise ValueError("sigma0 must be positive")
    target = model.wlen(g) - sigma0
    lw = model.letter_weights
    total = 0.0
    for m, c in enumerate(g, start=1):
        total += lw[c]
        if total > target:
            return g[:m]
    raise AssertionError("full prefix always exceeds |g| - sigma0 for sigma0 > 0")


def default_sigma0(model: GroupModel) -> float:
    return 1.5 * model.max_weight


def ball(model: GroupModel, vm: VisualMetric, xi: BoundaryPoint, rho: float) -> Word:
    """Open visual ball B_rho(xi) as a cylinder prefix of xi.

    Returns the shortest prefix with exp(-eps wlen) < rho; the empty
    prefix (whole boundary) when rho > 1.  Balls are cylinders because
    Gromov products with xi only take partial-sum values along xi.
    """
    if rho <= 0:
        raise ValueError("radius must be positive")
    if rho > 1:
        return WHOLE_BOUNDARY
    target = -math.log(rho) / vm.epsilon
    lw = model.letter_weights
    total = 0.0
    m = 0
    while total <= target:
        total += lw[xi.letter(m)]
        m += 1
    return xi.prefix(m)


# -- group action on the boundary --------------------------------------------


def act(model: GroupModel, g: Word, xi: BoundaryPoint) -> BoundaryPoint:
    """g . xi: left concatenation with free reduction, recanonicalized."""
    if not g:
        return xi
    reps = len(g) // len(xi.period) + 1
    stream_prefix = xi.head + xi.period * reps
    new_head = model.reduce_concat(g, stream_prefix)
    return boundary_point(model, new_head, xi.period)

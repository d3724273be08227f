"""Koopman boundary representation on step functions, kernels, and S_R.

Everything here is exact: step functions are finite partitions of the
boundary into cylinders, the representation maps cylinders to cylinders
once cells are refined along the acting word, and all integrals reduce
to finite sums of closed-form cylinder masses.

[pi(g) f](xi) = P_g(xi) f(g^-1 xi),  P_g = sqrt(dg_*mu/dmu),
pitilde(g) = pi(g) / ||P_g||_1  (so that <pitilde(g)1, 1> = 1 exactly).
"""

from __future__ import annotations

import math
import random
from bisect import bisect_left, bisect_right
from dataclasses import dataclass

from .words import GroupModel, Word, all_words_of_length
from .boundary import BoundaryPoint, forward_extension, gromov_wb, shadow
from .density import ConformalDensity, fit_slope
from .report import ExperimentReport


# -- step functions -----------------------------------------------------------


def _check_antichain_complete(model: GroupModel, cells: list[Word]) -> None:
    """Cells must be pairwise incomparable and jointly exhaustive."""
    if cells == [()]:
        return
    if any(not c for c in cells):
        raise ValueError("whole-boundary cell mixed with proper cylinders")

    def rec(lo: int, hi: int, depth: int, last: int | None) -> None:
        if hi - lo == 1 and len(cells[lo]) == depth:
            return
        block = range(lo, hi)
        for i in block:
            if len(cells[i]) <= depth:
                raise ValueError("cells are nested, not a partition")
        expected = list(model.extensions(last))
        i = lo
        for letter in expected:
            j = i
            while j < hi and cells[j][depth] == letter:
                j += 1
            if j == i:
                raise ValueError("cells do not cover the boundary")
            rec(i, j, depth + 1, letter)
            i = j
        if i != hi:
            raise ValueError("cell with an impossible letter at depth")

    rec(0, len(cells), 0, None)


def _merge_siblings(model: GroupModel, parts: dict[Word, float]) -> dict[Word, float]:
    """Replace full sibling families holding one value by their parent."""
    changed = True
    while changed:
        changed = False
        by_parent: dict[Word, list[Word]] = {}
        for w in parts:
            if w:
                by_parent.setdefault(w[:-1], []).append(w)
        for parent, kids in by_parent.items():
            family = list(model.extensions(parent[-1] if parent else None))
            if len(kids) != len(family):
                continue
            vals = {parts[k] for k in kids}
            if len(vals) == 1:
                v = vals.pop()
                for k in kids:
                    del parts[k]
                parts[parent] = v
                changed = True
    return parts


@dataclass(frozen=True)
class StepFunction:
    """Finitely many cylinder cells partitioning the boundary."""

    model: GroupModel
    parts: tuple[tuple[Word, float], ...]  # lex-sorted, canonical

    @staticmethod
    def from_cells(model: GroupModel, cells: dict[Word, float], *, checked: bool = True) -> "StepFunction":
        merged = _merge_siblings(model, dict(cells))
        parts = tuple(sorted(merged.items()))
        if checked:
            _check_antichain_complete(model, [w for w, _ in parts])
        return StepFunction(model, parts)

    @staticmethod
    def constant(model: GroupModel, value: float) -> "StepFunction":
        return StepFunction(model, (((), float(value)),))

    @staticmethod
    def indicator(model: GroupModel, prefix: Word) -> "StepFunction":
        """1_{[prefix]} as a canonical partition."""
        if not prefix:
            return StepFunction.constant(model, 1.0)
        cells: dict[Word, float] = {prefix: 1.0}
        for j in range(len(prefix)):
            for c in model.extensions(prefix[j - 1] if j else None):
                if c != prefix[j]:
                    cells[prefix[:j] + (c,)] = 0.0
        return StepFunction.from_cells(model, cells)

    def cell_words(self) -> list[Word]:
        return [w for w, _ in self.parts]

    def value_on(self, u: Word) -> float:
        """Value on [u]; u must be at least as deep as the containing cell."""
        words = self.cell_words()
        i = bisect_right(words, u) - 1
        if i < 0 or words[i] != u[: len(words[i])]:
            raise ValueError(f"cylinder {u!r} is coarser than the cell structure")
        return self.parts[i][1]

    def value_at(self, xi: BoundaryPoint) -> float:
        depth = max(len(w) for w, _ in self.parts)
        return self.value_on(xi.prefix(depth))

    def max_abs(self) -> float:
        return max(abs(v) for _, v in self.parts)

    def mesh(self) -> float:
        """Largest cell depth in weighted length (0 for a constant)."""
        return max(self.model.wlen(w) for w, _ in self.parts)


def integral(density: ConformalDensity, f: StepFunction) -> float:
    return sum(v * density.mu_cylinder(w) for w, v in f.parts)


def inner(density: ConformalDensity, f: StepFunction, g: StepFunction) -> float:
    """<f, g> in L2(mu) by a merge walk over the two antichains."""
    fp, gp = f.parts, g.parts
    total = 0.0
    i = j = 0
    while i < len(fp) and j < len(gp):
        u, fv = fp[i]
        v, gv = gp[j]
        if u == v[: len(u)] and len(u) <= len(v):
            # [v] inside [u]; advance over every g-cell under u
            while j < len(gp) and gp[j][0][: len(u)] == u:
                total += fv * gp[j][1] * density.mu_cylinder(gp[j][0])
                j += 1
            i += 1
        else:
            while i < len(fp) and fp[i][0][: len(v)] == v:
                total += gv * fp[i][1] * density.mu_cylinder(fp[i][0])
                i += 1
            j += 1
    return total


def norm2(density: ConformalDensity, f: StepFunction) -> float:
    return math.sqrt(sum(v * v * density.mu_cylinder(w) for w, v in f.parts))


def integral_over(density: ConformalDensity, f: StepFunction, u: Word) -> float:
    """Integral of f over the cylinder [u]."""
    total = 0.0
    for w, v in f.parts:
        if w[: len(u)] == u:  # cell inside [u]
            total += v * density.mu_cylinder(w)
        elif u[: len(w)] == w:  # [u] inside this cell
            return v * density.mu_cylinder(u)
    return total


def combine(model: GroupModel, terms: list[tuple[float, StepFunction]]) -> StepFunction:
    """sum coef_i * f_i as one step function on the common refinement."""
    keys: set[Word] = set()
    for _, f in terms:
        keys.update(f.cell_words())
    leaves = _maximal_antichain(sorted(keys))
    acc = _accumulate_on_leaves(
        model, leaves, [(w, c * v) for c, f in terms for w, v in f.parts]
    )
    return StepFunction.from_cells(model, acc, checked=False)


def _maximal_antichain(sorted_words: list[Word]) -> list[Word]:
    """Deepest-cell partition generated by a union of complete antichains."""
    leaves = []
    for i, w in enumerate(sorted_words):
        if i + 1 < len(sorted_words) and sorted_words[i + 1][: len(w)] == w:
            continue  # strictly extended by its lex successor => not a leaf
        leaves.append(w)
    return leaves


def _accumulate_on_leaves(
    model: GroupModel, leaves: list[Word], contributions: list[tuple[Word, float]]
) -> dict[Word, float]:
    """Push (cylinder, value) contributions down onto a leaf partition."""
    top = 2 * model.rank  # sorts after every extension, before the next sibling
    diff = [0.0] * (len(leaves) + 1)
    for w, v in contributions:
        lo = bisect_left(leaves, w)
        hi = bisect_left(leaves, w + (top,))
        diff[lo] += v
        diff[hi] -= v
    out: dict[Word, float] = {}
    run = 0.0
    for i, leaf in enumerate(leaves):
        run += diff[i]
        out[leaf] = run
    return out


# -- the representation -------------------------------------------------------


def _refine_along(model: GroupModel, f: StepFunction, path: Word) -> list[tuple[Word, float]]:
    """Split cells until none is a (weak) prefix of `path`."""
    out: list[tuple[Word, float]] = []
    stack = list(f.parts)
    while stack:
        w, v = stack.pop()
        if len(w) <= len(path) and path[: len(w)] == w:
            last = w[-1] if w else None
            stack.extend((w + (c,), v) for c in model.extensions(last))
        else:
            out.append((w, v))
    return out


def p_weight(density: ConformalDensity, g: Word) -> StepFunction:
    """P_g = sqrt(dg_*mu/dmu) as an exact step function."""
    model = density.model
    if not g:
        return StepFunction.constant(model, 1.0)
    h, lw = density.h, model.letter_weights
    half = model.wlen(g) / 2.0
    cells: dict[Word, float] = {}
    depth_w = 0.0
    for j, letter in enumerate(g):
        for c in model.extensions(g[j - 1] if j else None):
            if c != letter:
                cells[g[:j] + (c,)] = math.exp(h * (depth_w - half))
        depth_w += lw[letter]
    cells[g] = math.exp(h * half)
    return StepFunction.from_cells(model, cells)


def p1_norm(density: ConformalDensity, g: Word) -> float:
    return integral(density, p_weight(density, g))


def koopman_apply(density: ConformalDensity, g: Word, f: StepFunction) -> StepFunction:
    """pi(g) f, exact.

    Cells are refined until none is a weak prefix of g^-1; then the
    image of each cell [w] is the cylinder [reduce(g w)], on which both
    the pullback value and the cocycle weight are constant.  (The image
    never lands strictly inside the prefix chain of g: the first
    surviving letter of w is forbidden from continuing g by reducedness
    of w, so the Gromov product with g is resolved.)
    """
    model = density.model
    if not g:
        return f
    ginv = model.invert(g)
    h = density.h
    half = model.wlen(g) / 2.0
    cells: dict[Word, float] = {}
    for w, v in _refine_along(model, f, ginv):
        u = model.reduce_concat(g, w)
        cp = model.common_prefix_wlen(ginv, w)
        cells[u] = v * math.exp(h * (half - cp))
    return StepFunction.from_cells(model, cells, checked=False)


def matrix_coefficient(
    density: ConformalDensity, g: Word, phi: StepFunction, psi: StepFunction
) -> float:
    """<pitilde(g) phi, psi> with pitilde(g) = pi(g)/||P_g||_1."""
    return inner(density, koopman_apply(density, g, phi), psi) / p1_norm(density, g)


def lipschitz_constant(density: ConformalDensity, f: StepFunction) -> float:
    """Exact Lipschitz constant in d_eps: cell values jump across cells
    at distance exactly exp(-eps * common-prefix-weight)."""
    model, eps = density.model, density.epsilon
    best = 0.0
    parts = f.parts
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            (u, a), (v, b) = parts[i], parts[j]
            if a != b:
                cp = model.common_prefix_wlen(u, v)
                best = max(best, abs(a - b) * math.exp(eps * cp))
    return best


def distance_step_function(density: ConformalDensity, target: BoundaryPoint, depth: int) -> StepFunction:
    """d_eps(., target) truncated at `depth` letters along the target ray."""
    model, eps = density.model, density.epsilon
    cells: dict[Word, float] = {}
    cpw = 0.0
    for j in range(depth):
        letter = target.letter(j)
        for c in model.extensions(target.letter(j - 1) if j else None):
            if c != letter:
                cells[target.prefix(j) + (c,)] = math.exp(-eps * cpw)
        cpw += model.letter_weights[letter]
    cells[target.prefix(depth)] = math.exp(-eps * cpw)
    return StepFunction.from_cells(model, cells)


# -- kernels ------------------------------------------------------------------


@dataclass(frozen=True)
class KernelStep:
    """Step kernel on the double boundary: rectangle cells (u, v, value)."""

    model: GroupModel
    parts: tuple[tuple[Word, Word, float], ...]

    @staticmethod
    def constant(model: GroupModel, value: float) -> "KernelStep":
        return KernelStep(model, (((), (), float(value)),))

    @staticmethod
    def from_product(phi: StepFunction, psi: StepFunction) -> "KernelStep":
        """K(xi, eta) = phi(xi) psi(eta)."""
        parts = tuple(
            (u, v, a * b) for u, a in phi.parts for v, b in psi.parts
        )
        return KernelStep(phi.model, parts)

    def value_on(self, u: Word, v: Word) -> float:
        for cu, cv, val in self.parts:
            if u[: len(cu)] == cu and v[: len(cv)] == cv:
                return val
        raise ValueError("rectangle coarser than the kernel cells")

    def max_abs(self) -> float:
        return max(abs(v) for _, _, v in self.parts)


def kernel_apply(density: ConformalDensity, K: KernelStep, f: StepFunction) -> StepFunction:
    """T_K f(xi) = integral of K(xi, eta) f(eta) dmu(eta)."""
    model = density.model
    contributions = [
        (u, val * integral_over(density, f, v)) for u, v, val in K.parts
    ]
    keys = sorted({u for u, _, _ in K.parts})
    leaves = _maximal_antichain(keys)
    acc = _accumulate_on_leaves(model, leaves, contributions)
    return StepFunction.from_cells(model, acc, checked=False)


# -- covering nets and S_R ----------------------------------------------------


@dataclass(frozen=True)
class NetFamily:
    """C-separated words in an annulus whose shadows tile the boundary."""

    model: GroupModel
    R: float
    alpha: float
    C: float
    sigma0: float
    members: tuple[Word, ...]
    shadows: tuple[Word, ...]


def build_net(model: GroupModel, R: float, alpha: float, C: float, sigma0: float) -> NetFamily:
    """Greedy covering selection over the length-lex annulus.

    A word is accepted only if its shadow covers boundary not already
    covered (so nets stay lean); postconditions — exact pairwise
    separation > C and exact covering — are then verified.
    """
    annulus = model.enumerate_annulus(R, alpha)
    if not annulus:
        raise ValueError(f"annulus A_{R}({alpha}) is empty")
    members: list[Word] = []
    shadows: list[Word] = []
    for g in annulus:
        s = shadow(model, g, sigma0)
        if any(s[: len(t)] == t for t in shadows):
            continue  # already covered
        members.append(g)
        shadows.append(s)
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            if model.distance(members[i], members[j]) <= C:
                raise ValueError(
                    f"covering members {model.format(members[i])}, "
                    f"{model.format(members[j])} are not {C}-separated"
                )
    _check_antichain_complete(model, sorted(shadows))
    return NetFamily(model, R, alpha, C, sigma0, tuple(members), tuple(shadows))


def no_cancellation_bridges(model: GroupModel, g: Word, h: Word, tau_prime: float) -> list[Word]:
    """U_{g,h}: words g b h^-1 assembled without cancellation, wlen(b) <= tau'.

    Each member has full length |g| + |b| + |h|; the first |g| letters
    recover g and the inverted tail recovers h, which is what makes the
    U-sets pairwise disjoint.  The bridge ball is closed so single
    heavy letters stay available when tau' equals the max weight.
    """
    hinv = model.invert(h)
    out = []
    for b in model.enumerate_ball(tau_prime):
        left = b[0] if b else (hinv[0] if hinv else None)
        if g and left is not None and left == g[-1] ^ 1:
            continue
        if b and hinv and hinv[0] == b[-1] ^ 1:
            continue
        out.append(g + b + hinv)
    return out


@dataclass(frozen=True)
class SROperator:
    """S_R = sum over net pairs of w_{g,h} sum_{k in U_{g,h}} pitilde(k)."""

    density: ConformalDensity
    net: NetFamily
    tau_prime: float
    pairs: tuple[tuple[Word, Word, float, tuple[Word, ...]], ...]  # (g, h, w, U)

    def terms(self) -> list[tuple[float, Word]]:
        """Flattened (weight, k) list; S_R = sum w * pitilde(k)."""
        return [(w, k) for _, _, w, U in self.pairs for k in U]

    def pairing(self, phi: StepFunction, psi: StepFunction) -> float:
        d = self.density
        return sum(w * matrix_coefficient(d, k, phi, psi) for w, k in self.terms())

    def apply(self, f: StepFunction) -> StepFunction:
        d = self.density
        terms = [
            (w / p1_norm(d, k), koopman_apply(d, k, f)) for w, k in self.terms()
        ]
        return combine(d.model, terms)

    def sup_norm_on_one(self, adjoint: bool = False) -> float:
        """Exact sup of S_R 1 (or S_R* 1) over the boundary.

        S_R 1(xi) = sum_k c_k e^{h (k, xi)} with positive c_k.  The sum
        is evaluated by branch-and-bound descent over the prefix trie of
        the k's: a word's contribution freezes at e^{h wlen(prefix)} the
        moment xi diverges from it (or outlives it), so each trie node
        carries a frozen base plus the still-active words.
        """
        d = self.density
        model = d.model
        h = d.h
        # (k, contribution-if-diverged-now factor base e^{h cp}, cap e^{h|k|})
        ks: list[tuple[Word, float, float]] = []
        for w, k in self.terms():
            if adjoint:
                k = model.invert(k)
            c = w * math.exp(-h * model.wlen(k) / 2.0) / p1_norm(d, k)
            ks.append((k, c, c * math.exp(h * model.wlen(k))))
        best = 0.0

        def descend(depth: int, wlen_u: float, base: float, active) -> None:
            nonlocal best
            if not active:
                best = max(best, base)
                return
            if base + sum(cap for _, _, cap in active) <= best:
                return
            scale = math.exp(h * wlen_u)
            groups: dict[int, list] = {}
            ended = 0.0
            for item in active:
                k, c, _ = item
                if len(k) == depth:
                    ended += c * scale
                else:
                    groups.setdefault(k[depth], []).append(item)
            here = base + ended
            divergence = {
                letter: sum(c for _, c, _ in grp) * scale for letter, grp in groups.items()
            }
            total_div = sum(divergence.values())
            last = active[0][0][depth - 1] if depth else None
            for letter in model.extensions(last):
                sub = groups.get(letter, [])
                frozen = here + total_div - divergence.get(letter, 0.0)
                descend(depth + 1, wlen_u + model.letter_weights[letter], frozen, sub)

        groups: dict[int, list] = {}
        for item in ks:
            groups.setdefault(item[0][0], []).append(item)
        for letter in model.alphabet:
            sub = groups.get(letter, [])
            base = sum(c for ch, grp in groups.items() if ch != letter for _, c, _ in grp)
            descend(1, model.letter_weights[letter], base, sub)
        return best


def default_tau_prime(model: GroupModel, r_min: float, alpha: float, C: float, sigma0: float) -> float:
    """Smallest integer multiple of the max weight making every U nonempty
    at the smallest R in the run."""
    net = build_net(model, r_min, alpha, C, sigma0)
    t = model.max_weight
    while True:
        if all(
            no_cancellation_bridges(model, g, h, t)
            for g in net.members
            for h in net.members
        ):
            return t
        t += model.max_weight


def build_SR(
    density: ConformalDensity,
    K: KernelStep,
    R: float,
    alpha: float = 1.5,
    C: float = 1.5,
    tau_prime: float = 2.0,
    sigma0: float = 1.5,
) -> SROperator:
    """Assemble S_R from a covering net; checks the cancellation lemma.

    V_{g,h} runs over the ordered difference partition of shadow
    rectangles (length-lex order on pairs); w_{g,h} = int_V K dmu^2 / |U|.
    Raises if any U is empty (tau' too small) or two U-sets collide.
    """
    model = density.model
    net = build_net(model, R, alpha, C, sigma0)

    # leaf grid refining every shadow and every kernel cylinder
    keys = set(net.shadows)
    for u, v, _ in K.parts:
        keys.add(u)
        keys.add(v)
    keys.discard(())
    if not keys:
        keys = {(c,) for c in model.alphabet}
    closure: set[Word] = set()
    for wrd in keys:
        for j in range(1, len(wrd) + 1):
            for c in model.extensions(wrd[j - 2]) if j > 1 else model.alphabet:
                closure.add(wrd[: j - 1] + (c,))
    leaves = _maximal_antichain(sorted(closure))
    _check_antichain_complete(model, leaves)
    mu = [density.mu_cylinder(leaf) for leaf in leaves]

    def leaf_range(w: Word) -> range:
        lo = bisect_left(leaves, w)
        hi = bisect_left(leaves, w + (2 * model.rank,))
        return range(lo, hi)

    covered: set[tuple[int, int]] = set()
    pairs = []
    seen_k: dict[Word, tuple[Word, Word]] = {}
    for g, sg in zip(net.members, net.shadows):
        for h, sh in zip(net.members, net.shadows):
            mass = 0.0
            for i in leaf_range(sg):
                for j in leaf_range(sh):
                    if (i, j) not in covered:
                        covered.add((i, j))
                        mass += K.value_on(leaves[i], leaves[j]) * mu[i] * mu[j]
            U = no_cancellation_bridges(model, g, h, tau_prime)
            if not U:
                raise ValueError(
                    f"U empty for ({model.format(g)}, {model.format(h)}): tau'={tau_prime} too small"
                )
            for k in U:
                if k in seen_k:
                    raise AssertionError(
                        f"U-sets collide at {model.format(k)} between {seen_k[k]} and {(g, h)}"
                    )
                seen_k[k] = (g, h)
            if mass != 0.0:
                pairs.append((g, h, mass / len(U), tuple(U)))
    return SROperator(density, net, tau_prime, tuple(pairs))


# -- reports ------------------------------------------------------------------


def _header(density: ConformalDensity, **params) -> dict:
    model = density.model
    head: dict = {
        "rank": model.rank,
        "weights": ",".join(repr(w) for w in model.weights),
        "h": density.h,
        "epsilon": density.epsilon,
        "D": density.dimension,
    }
    head.update(params)
    return head


def p1_norm_report(density: ConformalDensity, r_max: float) -> ExperimentReport:
    """||P_g||_1 e^{h|g|/2} / (1+|g|) over the ball; uniform by the lemma."""
    model = density.model
    rep = ExperimentReport(
        "p1norm", ("word", "wlen", "p1", "normalized"), header=_header(density, r_max=r_max)
    )
    vals = []
    rep.add_row("e", 0.0, 1.0, 1.0)
    vals.append(1.0)
    for g, wg in model.iter_nontrivial(r_max):
        p1 = p1_norm(density, g)
        val = p1 * math.exp(density.h * wg / 2.0) / (1.0 + wg)
        rep.add_row(model.format(g), wg, p1, val)
        vals.append(val)
    rep.summary = {"min": min(vals), "max": max(vals), "spread": max(vals) / min(vals)}
    return rep


def annulus_weight_report(
    density: ConformalDensity, r_values: tuple[float, ...], alpha: float, xi: BoundaryPoint
) -> ExperimentReport:
    """sum over the annulus of P-tilde_g(xi) against e^{hR}."""
    model = density.model
    rep = ExperimentReport(
        "annulus-weight", ("R", "total", "ratio"), header=_header(density, alpha=alpha)
    )
    h = density.h
    for r in r_values:
        total = 0.0
        for g in model.enumerate_annulus(r, alpha):
            cp = gromov_wb(model, g, xi)
            pg = math.exp(h * (cp - model.wlen(g) / 2.0))
            total += pg / p1_norm(density, g)
        rep.add_row(r, total, total * math.exp(-h * r))
    ratios = rep.column("ratio")
    rep.summary = {"max_ratio": max(ratios)}
    return rep


def decay_report(
    density: ConformalDensity,
    phi: StepFunction,
    psi: StepFunction,
    n_values: tuple[int, ...],
) -> ExperimentReport:
    """Max matrix-coefficient error against the boundary-limit product.

    For every |g| = n, err(g) = |<pitilde(g) phi, psi> - phi(g-check) psi(g-hat)|
    where g-hat extends g to the boundary and g-check extends g^-1.
    The lemma predicts decay like (1+n)^{-1/D}.
    """
    model = density.model
    rep = ExperimentReport(
        "matrix-coeff",
        ("n", "max_error", "argmax_word"),
        header=_header(
            density,
            L_phi=lipschitz_constant(density, phi),
            L_psi=lipschitz_constant(density, psi),
            sup_phi=phi.max_abs(),
            sup_psi=psi.max_abs(),
        ),
    )
    for n in n_values:
        worst, worst_g = -1.0, ()
        for g in model.enumerate_annulus(n, 0.5 * model.min_weight):
            ghat = forward_extension(model, g)
            gcheck = forward_extension(model, model.invert(g))
            limit = phi.value_at(gcheck) * psi.value_at(ghat)
            err = abs(matrix_coefficient(density, g, phi, psi) - limit)
            if err > worst:
                worst, worst_g = err, g
        rep.add_row(n, worst, model.format(worst_g))
    slope = fit_slope(
        [math.log(1.0 + n) for n in rep.column("n")],
        [math.log(e) for e in rep.column("max_error")],
    )
    rep.summary = {"fit_slope": slope, "reference_slope": -1.0 / density.dimension}
    return rep


def sr_convergence_report(
    density: ConformalDensity,
    K: KernelStep,
    phi: StepFunction,
    psi: StepFunction,
    r_values: tuple[float, ...],
    **sr_params,
) -> ExperimentReport:
    """|<S_R phi, psi> - <T_K phi, psi>| along R."""
    target = inner(density, kernel_apply(density, K, phi), psi)
    rep = ExperimentReport(
        "kernel-convergence",
        ("R", "pairing", "target", "error"),
        header=_header(density, **sr_params),
    )
    for r in r_values:
        sr = build_SR(density, K, r, **sr_params)
        val = sr.pairing(phi, psi)
        rep.add_row(r, val, target, abs(val - target))
    rep.summary = {
        "target": target,
        "final_error": rep.rows[-1][3],
        "errors_nonincreasing": all(
            rep.rows[i + 1][3] <= rep.rows[i][3] + 1e-12 for i in range(len(rep.rows) - 1)
        ),
    }
    return rep


def sr_norm_report(
    density: ConformalDensity,
    K: KernelStep,
    r_values: tuple[float, ...],
    mc_trials: int,
    mc_depth: int,
    seed: int,
    **sr_params,
) -> ExperimentReport:
    """Sup-norm bounds on S_R 1, S_R* 1 plus Monte-Carlo norm lower bounds."""
    model = density.model
    rng = random.Random(seed)
    rep = ExperimentReport(
        "sr-norm",
        ("R", "sup_S1", "sup_Sstar1", "mc_lower_bound"),
        header=_header(density, mc_trials=mc_trials, mc_depth=mc_depth, seed=seed, **sr_params),
    )
    for r in r_values:
        sr = build_SR(density, K, r, **sr_params)
        sup1 = sr.sup_norm_on_one(adjoint=False)
        sup_star = sr.sup_norm_on_one(adjoint=True)
        lower = 0.0
        for _ in range(mc_trials):
            cells = {
                w: rng.uniform(-1.0, 1.0) for w in all_words_of_length(model, mc_depth)
            }
            f = StepFunction.from_cells(model, cells)
            nf = norm2(density, f)
            if nf == 0.0:
                continue
            lower = max(lower, norm2(density, sr.apply(f)) / nf)
        rep.add_row(r, sup1, sup_star, lower)
    rep.summary = {
        "max_sup_S1": max(rep.column("sup_S1")),
        "max_sup_Sstar1": max(rep.column("sup_Sstar1")),
        "max_mc_lower_bound": max(rep.column("mc_lower_bound")),
    }
    return rep


def projection_kernel_apply(
    density: ConformalDensity, E: Word, rho: float, phi: StepFunction
) -> StepFunction:
    """T_rho phi(xi) = 1_E(xi) * average of phi over the visual ball B_rho(xi).

    In the ultrametric, B_rho(xi) is the shortest prefix cylinder of xi
    with scale < rho; the average is always taken over that first
    crossing cylinder, with cells split further only to resolve
    membership in E.
    """
    model = density.model
    eps = density.epsilon
    cells: dict[Word, float] = {}

    def paint(u: Word, avg: float) -> None:
        # assign 1_E(.) * avg below the ball cylinder u
        if u[: len(E)] == E:
            cells[u] = avg
        elif E[: len(u)] == u:  # still straddles E: split
            for c in model.extensions(u[-1] if u else None):
                paint(u + (c,), avg)
        else:
            cells[u] = 0.0

    def walk(u: Word) -> None:
        if math.exp(-eps * model.wlen(u)) < rho:
            paint(u, integral_over(density, phi, u) / density.mu_cylinder(u))
            return
        for c in model.extensions(u[-1] if u else None):
            walk(u + (c,))

    walk(())
    return StepFunction.from_cells(model, cells, checked=False)


def projection_report(
    density: ConformalDensity, E: Word, k_values: tuple[int, ...], tests: list[StepFunction]
) -> ExperimentReport:
    """||T_rho phi - P_E phi||_2 along the radius ladder rho = e^{-eps k}."""
    model = density.model
    rep = ExperimentReport(
        "projection",
        ("k", "rho", "max_error", "max_Trho_norm_ratio"),
        header=_header(density, E=model.format(E)),
    )
    for k in k_values:
        rho = math.exp(-density.epsilon * k * model.min_weight)
        worst = 0.0
        worst_ratio = 0.0
        for phi in tests:
            t_phi = projection_kernel_apply(density, E, rho, phi)
            # P_E phi = 1_[E] * phi, computed on the refinement of phi against E
            pe = StepFunction.from_cells(
                model,
                {w: (v if w[: len(E)] == E else 0.0) for w, v in _refine_along(model, phi, E)},
                checked=False,
            )
            diff = combine(model, [(1.0, t_phi), (-1.0, pe)])
            worst = max(worst, norm2(density, diff))
            nphi = norm2(density, phi)
            if nphi > 0:
                worst_ratio = max(worst_ratio, norm2(density, t_phi) / nphi)
        rep.add_row(k, rho, worst, worst_ratio)
    errs = rep.column("max_error")
    rep.summary = {
        "errors_nonincreasing": all(errs[i + 1] <= errs[i] + 1e-12 for i in range(len(errs) - 1)),
        "final_error": errs[-1],
        "contraction_verified": max(rep.column("max_Trho_norm_ratio")) <= 1.0 + 1e-9,
    }
    return rep

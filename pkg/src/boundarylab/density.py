"""Critical exponent and the conformal boundary density in closed form.

The growth data of a weighted free group is carried by the 2k x 2k
transfer matrix M(s)[a][b] = e^{-s l(b)} [b != a^-1].  Its spectral
radius is strictly decreasing in s; the critical exponent h is the
unique root of radius = 1.  At s = h the Perron eigenvector v yields a
Markov measure on the boundary,

    mu([w]) = Z^-1 e^{-h wlen(w)} v_last(w),    Z = sum_a e^{-h l(a)} v_a,

which is additive on the cylinder tree and conformal of dimension
D = h/epsilon with constant exactly 1.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from .words import GroupModel, Word, length_lex_key
from .boundary import BoundaryPoint, VisualMetric, ball, boundary_point, forward_letter, gromov_wb, shadow
from .report import ExperimentReport

POWER_REL_TOL = 1e-14
POWER_MAX_ITER = 100_000
BISECT_TOL = 1e-12


def transfer_matrix(model: GroupModel, s: float) -> np.ndarray:
    n = 2 * model.rank
    weights = np.array([model.letter_weights[b] for b in range(n)])
    m = np.tile(np.exp(-s * weights), (n, 1))
    for a in range(n):
        m[a, a ^ 1] = 0.0
    return m


def perron(m: np.ndarray, rel_tol: float = POWER_REL_TOL, max_iter: int = POWER_MAX_ITER):
    """Spectral radius and positive eigenvector by power iteration.

    Deterministic all-ones start; the matrix is primitive for k >= 2
    (each letter may follow itself), so convergence is geometric.
    """
    v = np.ones(m.shape[0])
    lam = 0.0
    for _ in range(max_iter):
        w = m @ v
        new_lam = w.sum() / v.sum()
        w = w / w.sum()
        if abs(new_lam - lam) <= rel_tol * max(abs(new_lam), 1.0) and np.max(np.abs(w - v)) <= rel_tol:
            return new_lam, w
        lam, v = new_lam, w
    return lam, v


def spectral_radius(model: GroupModel, s: float) -> float:
    return perron(transfer_matrix(model, s))[0]


def critical_exponent(model: GroupModel, tol: float = BISECT_TOL) -> float:
    """Unique s with spectral_radius(M(s)) = 1, by bisection."""
    lo = 0.0  # radius(M(0)) = 2k-1 > 1
    hi = math.log(2 * model.rank - 1) / model.min_weight + 1.0
    while spectral_radius(model, hi) >= 1.0:
        hi *= 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if spectral_radius(model, mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ConformalDensity:
    """Boundary probability measure mu, conformal of dimension D = h/eps."""

    model: GroupModel
    h: float
    epsilon: float
    v: tuple[float, ...]  # Perron vector at h, normalized to sum 1
    Z: float

    @property
    def dimension(self) -> float:
        return self.h / self.epsilon

    def visual_metric(self) -> VisualMetric:
        return VisualMetric(self.epsilon)

    def mu_cylinder(self, prefix: Word) -> float:
        """mu([prefix]); the empty prefix is the whole boundary."""
        if not prefix:
            return 1.0
        return math.exp(-self.h * self.model.wlen(prefix)) * self.v[prefix[-1]] / self.Z

    def rn_derivative(self, g: Word, xi: BoundaryPoint) -> float:
        """dg_*mu/dmu(xi) = e^{-h(|g| - 2(g,xi))}, exact in-model."""
        gp = gromov_wb(self.model, g, xi)
        return math.exp(-self.h * (self.model.wlen(g) - 2.0 * gp))

    def transition_probs(self, a: int) -> tuple[float, ...]:
        """Markov successor law P(a -> b) = e^{-h l(b)} v_b / v_a."""
        lw = self.model.letter_weights
        row = [0.0 if b == a ^ 1 else math.exp(-self.h * lw[b]) * self.v[b] for b in self.model.alphabet]
        total = sum(row)
        return tuple(p / total for p in row)

    def initial_probs(self) -> tuple[float, ...]:
        return tuple(self.mu_cylinder((a,)) for a in self.model.alphabet)


def build_density(model: GroupModel, epsilon: float | None = None) -> ConformalDensity:
    """Solve for h and the Perron data; default epsilon = h/2 (D = 2)."""
    h = critical_exponent(model)
    if epsilon is None:
        epsilon = h / 2.0
    if not 0.0 < epsilon < h:
        raise ValueError(f"epsilon must lie in (0, h) = (0, {h:.6g})")
    _, v = perron(transfer_matrix(model, h))
    v_t = tuple(float(x) for x in v)
    z = sum(math.exp(-h * model.letter_weights[a]) * v_t[a] for a in model.alphabet)
    return ConformalDensity(model, h, float(epsilon), v_t, float(z))


def poincare_truncated(model: GroupModel, s: float, radius: float, prefix: Word) -> float:
    """Truncated orbital-series mass of a cylinder.

    Ratio of sum e^{-s wlen(g)} over nontrivial g extending `prefix`
    with wlen(g) <= radius, to the same sum over all nontrivial g.  The
    identity is excluded from both sums: the four depth-1 classes then
    partition the index set, making symmetric models exact at every
    truncation.  Converges to mu_cylinder(prefix) as s decreases to h
    and radius grows.
    """
    if s <= 0:
        raise ValueError("s must be positive")
    num = 0.0
    den = 0.0
    k = len(prefix)
    for g, wg in model.iter_nontrivial(radius):
        term = math.exp(-s * wg)
        den += term
        if g[:k] == prefix:
            num += term
    if den == 0.0:
        raise ValueError("radius below the minimal letter weight: empty series")
    return num / den


def sample_xi(density: ConformalDensity, depth: int, rng: random.Random) -> Word:
    """mu-distributed random reduced prefix of `depth` letters."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    model = density.model
    out = []
    probs = density.initial_probs()
    for _ in range(depth):
        u = rng.random()
        acc = 0.0
        letter = model.alphabet[-1]
        for b, p in zip(model.alphabet, probs):
            acc += p
            if u <= acc:
                letter = b
                break
        out.append(letter)
        probs = density.transition_probs(letter)
    return tuple(out)


def sample_boundary_point(density: ConformalDensity, depth: int, rng: random.Random) -> BoundaryPoint:
    """mu-distributed to `depth` letters, extended deterministically beyond."""
    prefix = sample_xi(density, depth, rng)
    return boundary_point(density.model, prefix, (forward_letter(density.model, prefix),))


# -- report generators --------------------------------------------------------


def _header(model: GroupModel, density: ConformalDensity | None = None, **params) -> dict:
    head: dict = {"rank": model.rank, "weights": ",".join(repr(w) for w in model.weights)}
    if density is not None:
        head.update(h=density.h, epsilon=density.epsilon, D=density.dimension)
    head.update(params)
    return head


def fit_slope(xs, ys) -> float:
    return float(np.polyfit(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float), 1)[0])


def shadow_lemma_report(density: ConformalDensity, sigma0: float, r_max: float) -> ExperimentReport:
    """mu(Shadow(g, sigma0)) e^{h|g|} for every nontrivial |g| <= r_max."""
    model = density.model
    rep = ExperimentReport(
        "shadow",
        ("word", "wlen", "ratio"),
        header=_header(model, density, sigma0=sigma0, r_max=r_max),
    )
    ratios = []
    for g, wg in model.iter_nontrivial(r_max):
        ratio = density.mu_cylinder(shadow(model, g, sigma0)) * math.exp(density.h * wg)
        rep.add_row(model.format(g), wg, ratio)
        ratios.append(ratio)
    rep.summary = {
        "min_ratio": min(ratios),
        "max_ratio": max(ratios),
        "spread": max(ratios) / min(ratios),
        "count": len(ratios),
    }
    return rep


def ahlfors_report(density: ConformalDensity, samples: int, k_max: int, seed: int) -> ExperimentReport:
    """mu(B_rho(xi)) / rho^D on the ladder rho = e^{-eps k w_min}."""
    model = density.model
    vm = density.visual_metric()
    rng = random.Random(seed)
    rep = ExperimentReport(
        "ahlfors",
        ("sample", "k", "rho", "ball_wlen", "ratio"),
        header=_header(model, density, samples=samples, k_max=k_max, seed=seed),
    )
    ratios = []
    for i in range(samples):
        k = rng.randint(1, k_max)
        rho = math.exp(-density.epsilon * k * model.min_weight)
        xi = sample_boundary_point(density, k_max + 2, rng)
        cyl = ball(model, vm, xi, rho)
        ratio = density.mu_cylinder(cyl) / rho**density.dimension
        rep.add_row(i, k, rho, model.wlen(cyl), ratio)
        ratios.append(ratio)
    rep.summary = {"min_ratio": min(ratios), "max_ratio": max(ratios)}
    return rep


def generalized_shadow_report(density: ConformalDensity, r_max: float, s_step: float | None = None) -> ExperimentReport:
    """mu{xi : (g,xi) > s} e^{hs} over nontrivial |g| <= r_max, 0 <= s < |g|.

    The upper-gradient set is the cylinder [g_1..g_m] with m minimal such
    that wlen > s, so every ratio is exact.  The admissible window
    s <= |g| - C is reported as the measured largest C with spread <= 10.
    """
    model = density.model
    if s_step is None:
        s_step = 0.5 * model.min_weight
    rep = ExperimentReport(
        "generalized-shadow",
        ("word", "wlen", "s", "ratio"),
        header=_header(model, density, r_max=r_max, s_step=s_step),
    )
    lw = model.letter_weights
    rows = []
    for g, wg in model.iter_nontrivial(r_max):
        s = 0.0
        while s < wg - 1e-12:
            total, m = 0.0, 0
            while total <= s:
                total += lw[g[m]]
                m += 1
            ratio = density.mu_cylinder(g[:m]) * math.exp(density.h * s)
            rep.add_row(model.format(g), wg, s, ratio)
            rows.append((wg - s, ratio))
            s += s_step
    # largest C such that restricting to s <= |g| - C brings spread <= 10
    c_grid = sorted({margin for margin, _ in rows})
    c_star = None
    for c in c_grid:
        sel = [r for margin, r in rows if margin >= c - 1e-12]
        if sel and max(sel) / min(sel) <= 10.0:
            c_star = c
            break
    all_r = [r for _, r in rows]
    rep.summary = {
        "min_ratio": min(all_r),
        "max_ratio": max(all_r),
        "measured_C_for_spread_10": c_star,
    }
    return rep


def cone_report(density: ConformalDensity, r: float, alpha: float, s_grid: tuple[float, ...], xi: BoundaryPoint) -> ExperimentReport:
    """Count of annulus words with (g, xi) > s against e^{h(R-s)}."""
    model = density.model
    annulus = model.enumerate_annulus(r, alpha)
    rep = ExperimentReport(
        "cone",
        ("R", "s", "count", "ratio"),
        header=_header(model, density, R=r, alpha=alpha),
    )
    ratios = []
    for s in s_grid:
        count = sum(1 for g in annulus if gromov_wb(model, g, xi) > s)
        ratio = count / math.exp(density.h * (r - s))
        rep.add_row(r, s, count, ratio)
        ratios.append(ratio)
    rep.summary = {"max_ratio": max(ratios), "annulus_size": len(annulus)}
    return rep


def cover_multiplicity_report(
    density: ConformalDensity, r: float, alpha: float, sigma0: float, samples: int, seed: int
) -> ExperimentReport:
    """How many annulus shadows contain each sampled boundary point."""
    model = density.model
    annulus = model.enumerate_annulus(r, alpha)
    shadows = [shadow(model, g, sigma0) for g in annulus]
    rng = random.Random(seed)
    depth = max(len(s) for s in shadows) + 2
    rep = ExperimentReport(
        "cover",
        ("sample", "multiplicity"),
        header=_header(model, density, R=r, alpha=alpha, sigma0=sigma0, samples=samples, seed=seed),
    )
    counts = []
    for i in range(samples):
        xi = sample_xi(density, depth, rng)
        mult = sum(1 for s in shadows if xi[: len(s)] == s)
        rep.add_row(i, mult)
        counts.append(mult)
    rep.summary = {"min_multiplicity": min(counts), "max_multiplicity": max(counts)}
    if min(counts) < 1:
        raise AssertionError("annulus shadows failed to cover a sampled point")
    return rep


def growth_report(
    model: GroupModel,
    r_values: tuple[float, ...],
    alpha: float,
    h: float | None = None,
    cap: int = 2_000_000,
) -> ExperimentReport:
    """|A_R(alpha)| against e^{hR}; fitted log-slope should match h."""
    if h is None:
        h = critical_exponent(model)
    rep = ExperimentReport(
        "growth",
        ("R", "count", "normalized"),
        header=_header(model, alpha=alpha, h=h, cap=cap),
    )
    for r in r_values:
        n = model.annulus_count(r, alpha, cap=cap)
        rep.add_row(r, n, n * math.exp(-h * r))
    slope = fit_slope(rep.column("R"), [math.log(c) for c in rep.column("count")])
    rep.summary = {"fit_slope": slope, "h": h, "slope_error": abs(slope - h)}
    return rep


def cylinder_report(density: ConformalDensity, depth: int) -> ExperimentReport:
    """Cylinder masses with the one-step additivity residual at each node.

    residual = mu([w]) - sum over extensions c of mu([wc]); exactly zero
    by construction, the column records the float defect.
    """
    model = density.model
    rep = ExperimentReport(
        "density",
        ("word", "wlen", "mu", "additivity_residual"),
        header=_header(model, density, depth=depth),
    )
    words: list[Word] = [()]
    for _ in range(depth):
        words = [w + (c,) for w in words for c in (model.extensions(w[-1]) if w else model.alphabet)]
        for w in sorted(words, key=lambda w: length_lex_key(model, w)):
            mu = density.mu_cylinder(w)
            children = sum(density.mu_cylinder(w + (c,)) for c in model.extensions(w[-1]))
            rep.add_row(model.format(w), model.wlen(w), mu, mu - children)
    residuals = [abs(r) for r in rep.column("additivity_residual")]
    rep.summary = {
        "max_additivity_residual": max(residuals),
        "total_mass_depth1": sum(density.mu_cylinder((c,)) for c in model.alphabet),
    }
    return rep

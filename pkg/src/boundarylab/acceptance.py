"""Named acceptance checks over the two canonical models.

Every headline numeric claim lives here as one named check so the test
suite and the verify-all subcommand run the identical code.  A check
raises AssertionError with a diagnostic on failure and returns None on
success.  CHECKS is the ordered registry; run_checks executes it
(optionally on a thread pool) and collects structured results.

Canonical models: rank 2 with unit weights (h = ln 3, default D = 2)
and rank 2 with weights (1, 2).
"""

from __future__ import annotations

import math
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

from .boundary import act, from_strings, gromov_wb, random_boundary_point
from .classify import (
    EQUIVALENT,
    NOT_SIMILAR,
    SIMILAR,
    SINGULAR_TENDENCY,
    density_ratio_report,
    holder_fit_report,
    metric_pair,
    similarity_deviation_report,
)
from .density import (
    ConformalDensity,
    ahlfors_report,
    build_density,
    critical_exponent,
    growth_report,
    poincare_truncated,
    shadow_lemma_report,
)
from .flow import (
    BmsMeasure,
    ProductCylinder,
    bms_invariance_report,
    ergodic_experiment,
    rho,
    sigma,
    tau,
)
from .koopman import (
    KernelStep,
    StepFunction,
    build_SR,
    decay_report,
    distance_step_function,
    koopman_apply,
    matrix_coefficient,
    norm2,
    p1_norm,
    projection_report,
    sr_convergence_report,
)
from .words import CapExceeded, GroupModel, Word, all_words_of_length

A, B = (0,), (2,)  # first two generators as cylinder prefixes


@dataclass(frozen=True)
class AcceptanceContext:
    """Shared canonical data for the whole registry."""

    unit: ConformalDensity
    weighted: ConformalDensity
    cap: int = 2_000_000


def build_context(cap: int = 2_000_000) -> AcceptanceContext:
    unit = build_density(GroupModel(2, (1.0, 1.0)))
    weighted = build_density(GroupModel(2, (1.0, 2.0)))
    return AcceptanceContext(unit, weighted, cap)


Check = Callable[[AcceptanceContext], None]
CHECKS: list[tuple[str, Check]] = []


def _register(name: str) -> Callable[[Check], Check]:
    def deco(fn: Check) -> Check:
        CHECKS.append((name, fn))
        return fn

    return deco


def _close(value: float, target: float, tol: float, label: str) -> None:
    assert abs(value - target) <= tol, (
        f"{label}: {value!r} vs {target!r} (|diff| = {abs(value - target):.3e} > {tol:g})"
    )


# -- critical exponent --------------------------------------------------------


@_register("exponent-unit-value")
def _exponent_unit(ctx: AcceptanceContext) -> None:
    _close(ctx.unit.h, math.log(3.0), 1e-9, "h on unit weights")


@_register("exponent-weighted-root")
def _exponent_weighted(ctx: AcceptanceContext) -> None:
    # independent oracle: bisection of 3t^3 + t^2 + t - 1 on (0, 1)
    def p(t: float) -> float:
        return 3.0 * t**3 + t**2 + t - 1.0

    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if p(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    t_star = 0.5 * (lo + hi)
    _close(ctx.weighted.h, -math.log(t_star), 1e-6, "h on weights (1, 2)")


@_register("exponent-homogeneity")
def _exponent_homogeneity(ctx: AcceptanceContext) -> None:
    for base, h in ((ctx.unit.model, ctx.unit.h), (ctx.weighted.model, ctx.weighted.h)):
        for c in (0.5, 2.0, 3.0):
            scaled = GroupModel(base.rank, tuple(c * w for w in base.weights))
            _close(
                critical_exponent(scaled), h / c, 1e-9,
                f"h under weight scale {c} of {base.weights}",
            )


# -- conformal density --------------------------------------------------------


@_register("density-cylinder-additivity")
def _density_additivity(ctx: AcceptanceContext) -> None:
    rng = random.Random(1001)
    for density in (ctx.unit, ctx.weighted):
        model = density.model
        for _ in range(500):
            w = model.random_word(rng, rng.randint(0, 8))
            mu = density.mu_cylinder(w)
            children = sum(
                density.mu_cylinder(w + (c,))
                for c in model.extensions(w[-1] if w else None)
            )
            _close(children, mu, 1e-9, f"additivity at [{model.format(w)}]")


@_register("density-exact-masses")
def _density_exact(ctx: AcceptanceContext) -> None:
    _close(ctx.unit.mu_cylinder(A), 0.25, 1e-12, "mu([a]) unit")
    _close(ctx.unit.mu_cylinder(A + B), 1.0 / 12.0, 1e-12, "mu([ab]) unit")


@_register("density-truncated-series")
def _density_poincare(ctx: AcceptanceContext) -> None:
    # closed form on weights (1, 2): with x = e^-s, y = e^-2s the
    # per-letter masses f (weight 1) and g (weight 2) solve the linear
    # system f = x(1 + f + 2g), g = y(1 + 2f + g).
    model = ctx.weighted.model
    s = ctx.weighted.h + 0.01
    x, y = math.exp(-s), math.exp(-2.0 * s)
    det = (1.0 - x) * (1.0 - y) - 2.0 * x * 2.0 * y
    f = (x * (1.0 - y) + 2.0 * x * y) / det
    g = (y * (1.0 - x) + 2.0 * x * y) / det
    total = 2.0 * f + 2.0 * g
    for letter in model.alphabet:
        closed = (f if model.letter_weights[letter] == 1.0 else g) / total
        truncated = poincare_truncated(model, s, 12.0, (letter,))
        _close(
            truncated, closed, 0.02,
            f"truncated series ratio at [{model.letter_name(letter)}]",
        )


@_register("conformality-derivative")
def _conformality(ctx: AcceptanceContext) -> None:
    rng = random.Random(1002)
    for density in (ctx.unit, ctx.weighted):
        model = density.model
        for _ in range(5000):
            gword = model.random_word(rng, rng.randint(0, 6))
            xi = random_boundary_point(model, rng)
            rn = density.rn_derivative(gword, xi)
            inv = math.exp(density.h * (model.wlen(gword) - 2.0 * gromov_wb(model, gword, xi)))
            _close(rn * inv, 1.0, 1e-9, f"rn inverse at g={model.format(gword)}")


@_register("conformality-chain-rule")
def _chain_rule(ctx: AcceptanceContext) -> None:
    rng = random.Random(1003)
    for density in (ctx.unit, ctx.weighted):
        model = density.model
        for _ in range(2000):
            gw = model.random_word(rng, rng.randint(0, 4))
            hw = model.random_word(rng, rng.randint(0, 4))
            xi = random_boundary_point(model, rng)
            lhs = density.rn_derivative(model.reduce_concat(gw, hw), xi)
            rhs = density.rn_derivative(gw, xi) * density.rn_derivative(
                hw, act(model, model.invert(gw), xi)
            )
            _close(lhs, rhs, 1e-9, "chain rule")


# -- shadow lemma / regularity / growth ---------------------------------------


@_register("shadow-unit-exact-ratios")
def _shadow_unit(ctx: AcceptanceContext) -> None:
    rep = shadow_lemma_report(ctx.unit, sigma0=1.5, r_max=8.0)
    for ratio in rep.column("ratio"):
        ok = abs(ratio - 0.75) <= 1e-9 or abs(ratio - 2.25) <= 1e-9
        assert ok, f"unit shadow ratio {ratio!r} outside {{3/4, 9/4}}"
    _close(rep.summary["min_ratio"], 0.75, 1e-9, "min shadow ratio")
    _close(rep.summary["max_ratio"], 2.25, 1e-9, "max shadow ratio")


@_register("shadow-weighted-spread")
def _shadow_weighted(ctx: AcceptanceContext) -> None:
    rep = shadow_lemma_report(ctx.weighted, sigma0=1.5, r_max=8.0)
    spread = rep.summary["max_ratio"] / rep.summary["min_ratio"]
    assert spread <= 10.0, f"weighted shadow spread {spread!r} > 10"


@_register("ahlfors-regularity")
def _ahlfors(ctx: AcceptanceContext) -> None:
    rep = ahlfors_report(ctx.unit, samples=1000, k_max=6, seed=1004)
    for ratio in rep.column("ratio"):
        assert 0.2 <= ratio <= 1.1, f"ball-mass ratio {ratio!r} outside [0.2, 1.1]"
        _close(ratio, 0.25, 1e-9, "ball-mass ratio at ladder radius")


@_register("growth-slope")
def _growth(ctx: AcceptanceContext) -> None:
    r_values = tuple(float(r) for r in range(2, 10))
    assert ctx.unit.model.annulus_count(3.0, 1.5, cap=ctx.cap) == 156
    for density in (ctx.unit, ctx.weighted):
        rep = growth_report(density.model, r_values, alpha=1.5, h=density.h, cap=ctx.cap)
        assert rep.summary["slope_error"] <= 0.01, (
            f"growth slope off by {rep.summary['slope_error']!r} on {density.model.weights}"
        )


# -- Koopman representation ---------------------------------------------------


@_register("koopman-unitarity")
def _unitarity(ctx: AcceptanceContext) -> None:
    rng = random.Random(1005)
    for density in (ctx.unit, ctx.weighted):
        model = density.model
        for _ in range(500):
            gword = model.random_word(rng, rng.randint(0, 5))
            cells = {
                w: rng.uniform(-1.0, 1.0) for w in all_words_of_length(model, 2)
            }
            fstep = StepFunction.from_cells(model, cells)
            _close(
                norm2(density, koopman_apply(density, gword, fstep)),
                norm2(density, fstep),
                1e-9,
                "unitarity",
            )


@_register("koopman-projection-norm")
def _projection_norm(ctx: AcceptanceContext) -> None:
    _close(p1_norm(ctx.unit, A), math.sqrt(3.0) / 2.0, 1e-12, "L1 norm of the a-weight")


@_register("koopman-constant-pairing")
def _constant_pairing(ctx: AcceptanceContext) -> None:
    one = StepFunction.constant(ctx.unit.model, 1.0)
    for gword in ctx.unit.model.enumerate_ball(8.0, cap=ctx.cap):
        val = matrix_coefficient(ctx.unit, gword, one, one)
        _close(val, 1.0, 1e-12, f"<pi(g)1, 1> at g={ctx.unit.model.format(gword)}")


@_register("matrix-coefficient-decay")
def _decay(ctx: AcceptanceContext) -> None:
    model = ctx.unit.model
    phi = StepFunction.indicator(model, A)
    psi = distance_step_function(ctx.unit, from_strings(model, "", "b"), 3)
    rep = decay_report(ctx.unit, phi, psi, tuple(range(2, 11)))
    bound = rep.summary["reference_slope"] + 0.15
    assert rep.summary["fit_slope"] <= bound, (
        f"decay slope {rep.summary['fit_slope']!r} > {bound!r}"
    )


# -- S_R operators ------------------------------------------------------------


def _k_one(model: GroupModel) -> KernelStep:
    return KernelStep.constant(model, 1.0)


@_register("sr-partition")
def _sr_partition(ctx: AcceptanceContext) -> None:
    # build_SR raises if any U-set is empty or two collide
    for density in (ctx.unit, ctx.weighted):
        for r in (3.0, 4.0, 5.0, 6.0):
            build_SR(density, _k_one(density.model), r)


@_register("sr-norm-bounds")
def _sr_norms(ctx: AcceptanceContext) -> None:
    for density in (ctx.unit, ctx.weighted):
        for r in (3.0, 4.0, 5.0, 6.0):
            sr = build_SR(density, _k_one(density.model), r)
            for adjoint in (False, True):
                sup = sr.sup_norm_on_one(adjoint=adjoint)
                assert sup <= 10.0, (
                    f"sup norm {sup!r} at R={r} adjoint={adjoint} "
                    f"on weights {density.model.weights}"
                )


@_register("sr-pairing-convergence")
def _sr_pairing(ctx: AcceptanceContext) -> None:
    one = StepFunction.constant(ctx.unit.model, 1.0)
    rep = sr_convergence_report(
        ctx.unit, _k_one(ctx.unit.model), one, one, (3.0, 4.0, 5.0, 6.0)
    )
    _close(rep.summary["target"], 1.0, 1e-12, "<T_K 1, 1> for K = 1")
    assert rep.summary["errors_nonincreasing"], rep.rows
    assert rep.summary["final_error"] < 0.3, rep.summary


@_register("projection-error-ladder")
def _projection_ladder(ctx: AcceptanceContext) -> None:
    model = ctx.unit.model
    phi = StepFunction.indicator(model, (0, 2, 0, 2))  # mesh-4 test function
    rep = projection_report(ctx.unit, A, tuple(range(1, 7)), [phi])
    errors = rep.column("max_error")
    assert errors[0] > 0.0, "test function too coarse to exercise the ladder"
    for i in range(len(errors) - 1):
        assert errors[i + 1] <= errors[i] + 1e-12, errors
    assert errors[-1] == 0.0, f"radius below the mesh must project exactly: {errors!r}"


# -- cocycles and the pair measure --------------------------------------------


@_register("cocycle-tau-identity")
def _tau_identity(ctx: AcceptanceContext) -> None:
    rng = random.Random(1007)
    for density in (ctx.unit, ctx.weighted):
        model = density.model
        for _ in range(5000):
            gw = model.random_word(rng, rng.randint(0, 4))
            hw = model.random_word(rng, rng.randint(0, 4))
            xi = random_boundary_point(model, rng)
            eta = random_boundary_point(model, rng)
            if xi == eta:
                continue
            lhs = tau(model, model.reduce_concat(gw, hw), xi, eta)
            rhs = tau(model, hw, xi, eta) + tau(
                model, gw, act(model, hw, xi), act(model, hw, eta)
            )
            _close(lhs, rhs, 1e-9, "tau cocycle identity")


@_register("cocycle-rho-sigma")
def _rho_sigma(ctx: AcceptanceContext) -> None:
    rng = random.Random(1008)
    for density in (ctx.unit, ctx.weighted):
        model = density.model
        for _ in range(2000):
            gword = model.random_word(rng, rng.randint(0, 5))
            xi = random_boundary_point(model, rng)
            _close(
                rho(density, gword, xi), sigma(model, gword, xi), 1e-9,
                "log-derivative cocycle vs sigma",
            )


@_register("bms-invariance")
def _bms_invariance(ctx: AcceptanceContext) -> None:
    for density in (ctx.unit, ctx.weighted):
        rep = bms_invariance_report(density, trials=500, seed=1009)
        assert rep.summary["max_residual"] <= 1e-12, rep.summary


@_register("bms-exact-masses")
def _bms_exact(ctx: AcceptanceContext) -> None:
    m = BmsMeasure(ctx.unit)
    _close(m.mass(ProductCylinder(A, B)), 1.0 / 16.0, 1e-12, "m([a] x [b])")
    _close(
        m.mass(ProductCylinder((0, 2), (0, 3))), 1.0 / 16.0, 1e-12, "m([ab] x [aB])"
    )


@_register("ergodic-hopf-median")
def _ergodic(ctx: AcceptanceContext) -> None:
    model = ctx.unit.model
    f = KernelStep.from_product(
        StepFunction.indicator(model, A), StepFunction.indicator(model, B)
    )
    rep = ergodic_experiment(
        ctx.unit, f, n_pairs=50, T_grid=(25.0, 50.0, 100.0, 200.0), seed=0
    )
    target = rep.summary["target"]
    _close(target, 1.0 / 16.0, 1e-12, "pair-measure mass of the test rectangle")
    med = rep.summary["median_J_at_max_T"]
    assert abs(med - target) / target <= 0.25, (
        f"median Hopf average {med!r} not within 25% of {target!r}"
    )
    med_errors = [rep.summary[f"median_rel_T{t:g}"] for t in (25.0, 50.0, 100.0, 200.0)]
    for i in range(len(med_errors) - 1):
        assert med_errors[i + 1] <= med_errors[i] + 1e-12, med_errors


# -- metric classification ----------------------------------------------------


@_register("classify-similar-pair")
def _classify_similar(ctx: AcceptanceContext) -> None:
    mp = metric_pair(GroupModel(2, (1.0, 2.0)), GroupModel(2, (2.0, 4.0)))
    rep = similarity_deviation_report(mp, r_max=8.0)
    assert rep.summary["verdict"] == SIMILAR, rep.summary
    assert rep.summary["max_deviation"] <= 1e-9, rep.summary


@_register("classify-deviation-slope")
def _classify_slope(ctx: AcceptanceContext) -> None:
    mp = metric_pair(ctx.unit.model, ctx.weighted.model)
    rep = similarity_deviation_report(mp, r_max=10.0)
    assert rep.summary["verdict"] == NOT_SIMILAR, rep.summary
    target = abs(ctx.unit.h - 2.0 * ctx.weighted.h)  # growth rate along the b-axis
    slope = rep.summary["slope"]
    assert abs(slope - target) <= 0.10 * target, (
        f"deviation slope {slope!r} not within 10% of {target!r}"
    )


_PAIRS = (
    ((1.0, 1.0), (2.0, 2.0)),
    ((1.0, 2.0), (2.0, 4.0)),
    ((1.0, 2.0), (3.0, 6.0)),
    ((1.0, 1.0), (1.0, 2.0)),
    ((1.0, 2.0), (2.0, 1.0)),
    ((1.0, 1.0), (1.0, 3.0)),
)


@_register("classify-verdict-agreement")
def _classify_agreement(ctx: AcceptanceContext) -> None:
    for w1, w2 in _PAIRS:
        mp = metric_pair(GroupModel(2, w1), GroupModel(2, w2))
        sim = similarity_deviation_report(mp, r_max=8.0).summary["verdict"]
        dens = density_ratio_report(mp, depth=10).summary["verdict"]
        expected = EQUIVALENT if sim == SIMILAR else SINGULAR_TENDENCY
        assert dens == expected, f"{w1} vs {w2}: similarity={sim}, density={dens}"


@_register("classify-holder-slope")
def _classify_holder(ctx: AcceptanceContext) -> None:
    mp = metric_pair(GroupModel(2, (1.0, 1.0)), GroupModel(2, (2.0, 2.0)))
    rep = holder_fit_report(mp, samples=400, seed=1010)
    _close(rep.summary["slope"], rep.summary["dimension_ratio"], 0.02, "Holder slope")
    mp2 = metric_pair(
        ctx.unit.model, ctx.unit.model, epsilon2=ctx.unit.h / 4.0
    )
    rep2 = holder_fit_report(mp2, samples=400, seed=1011)
    _close(rep2.summary["slope"], rep2.summary["dimension_ratio"], 0.02, "Holder slope")
    _close(rep2.summary["dimension_ratio"], 0.5, 1e-12, "dimension ratio D1/D2")


# -- runner -------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def run_check(name: str, fn: Check, ctx: AcceptanceContext) -> CheckResult:
    """Cap exhaustion propagates (distinct exit path); other defects fail
    the check."""
    start = time.perf_counter()
    try:
        fn(ctx)
    except CapExceeded:
        raise
    except (AssertionError, ValueError) as exc:
        return CheckResult(name, False, str(exc), time.perf_counter() - start)
    return CheckResult(name, True, "ok", time.perf_counter() - start)


def run_checks(
    ctx: AcceptanceContext | None = None, threads: int = 1
) -> list[CheckResult]:
    """Run the registry in order; failures are collected, not raised."""
    if ctx is None:
        ctx = build_context()
    if threads <= 1:
        return [run_check(name, fn, ctx) for name, fn in CHECKS]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(run_check, name, fn, ctx) for name, fn in CHECKS]
        return [f.result() for f in futures]

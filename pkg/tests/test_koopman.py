import math
import random

import pytest

from boundarylab.boundary import from_strings, random_boundary_point
from boundarylab.koopman import (
    KernelStep,
    StepFunction,
    build_SR,
    decay_report,
    default_tau_prime,
    distance_step_function,
    inner,
    integral,
    kernel_apply,
    koopman_apply,
    lipschitz_constant,
    matrix_coefficient,
    no_cancellation_bridges,
    norm2,
    p1_norm,
    projection_report,
    sr_convergence_report,
)
from boundarylab.words import all_words_of_length


def random_step(model, rng, depth=2):
    cells = {w: rng.uniform(-1.0, 1.0) for w in all_words_of_length(model, depth)}
    return StepFunction.from_cells(model, cells)


def test_step_function_basics(unit_density):
    model = unit_density.model
    one = StepFunction.constant(model, 1.0)
    ind = StepFunction.indicator(model, model.parse("ab"))
    assert integral(unit_density, one) == 1.0
    assert abs(integral(unit_density, ind) - 1.0 / 12.0) < 1e-12
    assert ind.value_on(model.parse("abab")) == 1.0
    assert ind.value_on(model.parse("aa")) == 0.0
    assert ind.max_abs() == 1.0


def test_from_cells_rejects_incomplete_partition(unit_model):
    with pytest.raises(ValueError):
        StepFunction.from_cells(unit_model, {(0,): 1.0, (1,): 2.0})


def test_inner_product_and_norm(unit_density):
    model = unit_density.model
    rng = random.Random(2)
    f = random_step(model, rng)
    g = random_step(model, rng)
    assert abs(inner(unit_density, f, g) - inner(unit_density, g, f)) < 1e-15
    assert norm2(unit_density, f) >= 0


def test_koopman_is_unitary(weighted_density):
    model = weighted_density.model
    rng = random.Random(31)
    for _ in range(100):
        g = model.random_word(rng, rng.randint(0, 5))
        f = random_step(model, rng)
        assert abs(
            norm2(weighted_density, koopman_apply(weighted_density, g, f))
            - norm2(weighted_density, f)
        ) < 1e-9


def test_koopman_is_a_representation(unit_density):
    model = unit_density.model
    rng = random.Random(37)
    for _ in range(50):
        g = model.random_word(rng, rng.randint(0, 4))
        h = model.random_word(rng, rng.randint(0, 4))
        f = random_step(model, rng)
        lhs = koopman_apply(unit_density, model.reduce_concat(g, h), f)
        rhs = koopman_apply(unit_density, g, koopman_apply(unit_density, h, f))
        xi = random_boundary_point(model, rng)
        assert abs(lhs.value_at(xi) - rhs.value_at(xi)) < 1e-9


def test_p1_norm_oracle(unit_density):
    # ||P_a||_1 = integral of e^{(h/2)(2(a,xi) - 1)}:
    # = sqrt(3) (3/4 * 1/sqrt(3) + 1/4 * sqrt(3) / 3) ... = sqrt(3)/2
    val = p1_norm(unit_density, (0,))
    assert abs(val - math.sqrt(3.0) / 2.0) < 1e-12
    # ||P_g||_1 = <pi(g)1, 1> is inversion invariant
    g = unit_density.model.parse("abA")
    assert abs(p1_norm(unit_density, g) - p1_norm(unit_density, unit_density.model.invert(g))) < 1e-12


def test_constant_pairing_is_one(unit_density):
    one = StepFunction.constant(unit_density.model, 1.0)
    for text in ("e", "a", "ab", "aBab", "bbbb"):
        g = unit_density.model.parse(text)
        assert abs(matrix_coefficient(unit_density, g, one, one) - 1.0) < 1e-12


def test_distance_step_function_certified_lipschitz(unit_density):
    model = unit_density.model
    vm = unit_density.visual_metric()
    target = from_strings(model, "", "b")
    psi = distance_step_function(unit_density, target, 3)
    L = lipschitz_constant(unit_density, psi)
    rng = random.Random(41)
    for _ in range(300):
        xi = random_boundary_point(model, rng)
        eta = random_boundary_point(model, rng)
        gap = abs(psi.value_at(xi) - psi.value_at(eta))
        assert gap <= L * vm.distance(model, xi, eta) + 1e-12


def test_matrix_coefficient_decay_trend(unit_density):
    model = unit_density.model
    phi = StepFunction.indicator(model, (0,))
    psi = distance_step_function(unit_density, from_strings(model, "", "b"), 2)
    rep = decay_report(unit_density, phi, psi, (2, 4, 6))
    errs = rep.column("max_error")
    assert errs[0] > errs[1] > errs[2] > 0
    assert rep.summary["reference_slope"] == -0.5


def test_kernel_step_value_lookup(unit_model):
    K = KernelStep.from_product(
        StepFunction.indicator(unit_model, (0,)), StepFunction.indicator(unit_model, (2,))
    )
    assert K.value_on((0, 2), (2,)) == 1.0
    assert K.value_on((1,), (2,)) == 0.0
    with pytest.raises(ValueError):
        K.value_on((), (2,))  # coarser than the kernel cells
    assert K.max_abs() == 1.0


def test_kernel_apply_is_integration_in_the_second_slot(unit_density):
    model = unit_density.model
    K = KernelStep.from_product(
        StepFunction.indicator(model, (0,)), StepFunction.indicator(model, (2,))
    )
    one = StepFunction.constant(model, 1.0)
    out = kernel_apply(unit_density, K, one)
    # T_K 1 (xi) = 1_[a](xi) * mu([b])
    assert abs(out.value_on((0, 2)) - 0.25) < 1e-12
    assert out.value_on((2, 0)) == 0.0


def test_bridges_have_no_cancellation(weighted_model):
    g = weighted_model.parse("aa")
    U = no_cancellation_bridges(weighted_model, g, g, 2.0)
    assert U, "tau' = 2 must admit the weight-2 bridge letters"
    for k in U:
        assert weighted_model.is_reduced(k)
        assert k[:2] == g
    assert default_tau_prime(weighted_model, 3.0, 1.5, 1.5, 1.5) <= 2.0


def test_build_sr_rejects_too_small_bridge_budget(weighted_density):
    K = KernelStep.constant(weighted_density.model, 1.0)
    with pytest.raises(ValueError):
        build_SR(weighted_density, K, 3.0, tau_prime=0.5)


def test_sr_pairing_converges_to_kernel_pairing(unit_density):
    model = unit_density.model
    one = StepFunction.constant(model, 1.0)
    K = KernelStep.constant(model, 1.0)
    rep = sr_convergence_report(unit_density, K, one, one, (3.0, 4.0))
    assert abs(rep.summary["target"] - 1.0) < 1e-12
    assert rep.summary["final_error"] < 0.3
    assert rep.summary["errors_nonincreasing"]


def test_sr_sup_norms_bounded(weighted_density):
    K = KernelStep.constant(weighted_density.model, 1.0)
    sr = build_SR(weighted_density, K, 4.0)
    assert sr.sup_norm_on_one(adjoint=False) <= 10.0
    assert sr.sup_norm_on_one(adjoint=True) <= 10.0


def test_projection_errors_vanish_below_the_mesh(unit_density):
    model = unit_density.model
    phi = StepFunction.indicator(model, (0, 2, 0, 2))
    rep = projection_report(unit_density, (0,), (1, 2, 3, 4, 5, 6), [phi])
    errs = rep.column("max_error")
    assert errs[0] > 0.0
    assert all(errs[i + 1] <= errs[i] + 1e-12 for i in range(len(errs) - 1))
    assert errs[-1] == 0.0
    assert rep.summary["contraction_verified"]

import math
import random

import pytest

from boundarylab.boundary import (
    BoundaryPoint,
    VisualMetric,
    act,
    ball,
    boundary_point,
    cylinder_contains_point,
    cylinders_disjoint,
    cylinders_nested,
    forward_extension,
    from_strings,
    gromov_bb,
    gromov_wb,
    interior_point,
    random_boundary_point,
    shadow,
)
from boundarylab.words import IDENTITY


def test_boundary_point_letters_repeat_period(unit_model):
    xi = from_strings(unit_model, "ab", "ba")
    # a b | b a b a b a ...
    assert [xi.letter(i) for i in range(6)] == [0, 2, 2, 0, 2, 0]
    assert xi.prefix(4) == (0, 2, 2, 0)


def test_boundary_point_requires_reduced_join(unit_model):
    with pytest.raises(ValueError):
        boundary_point(unit_model, (0,), (1,))  # head a, period A cancels
    with pytest.raises(ValueError):
        boundary_point(unit_model, (), ())  # no direction at infinity
    with pytest.raises(ValueError):
        boundary_point(unit_model, (), (0, 1))  # period not reduced cyclically


def test_boundary_points_hash_by_normal_form(unit_model):
    # same end reached with different head/period splits
    xi = from_strings(unit_model, "a", "ab")
    eta = from_strings(unit_model, "aa", "ba")
    assert xi == eta
    assert hash(xi) == hash(eta)
    assert from_strings(unit_model, "", "abab") == from_strings(unit_model, "", "ab")


def test_gromov_products_with_boundary(unit_model):
    m = unit_model
    xi = from_strings(m, "", "a")  # aaaa...
    assert gromov_wb(m, m.parse("aab"), xi) == 2.0
    assert gromov_wb(m, m.parse("b"), xi) == 0.0
    eta = from_strings(m, "aa", "b")
    assert gromov_bb(m, xi, eta) == 2.0
    assert gromov_bb(m, xi, xi) == math.inf


def test_gromov_bb_weighted(weighted_model):
    xi = from_strings(weighted_model, "ba", "b")
    eta = from_strings(weighted_model, "b", "a")
    assert gromov_bb(weighted_model, xi, eta) == 3.0


def test_visual_metric_is_an_exact_ultrametric(unit_density):
    model = unit_density.model
    vm = unit_density.visual_metric()
    rng = random.Random(3)
    for _ in range(500):
        xi, eta, zeta = (random_boundary_point(model, rng) for _ in range(3))
        dxz = vm.distance(model, xi, zeta)
        bound = max(vm.distance(model, xi, eta), vm.distance(model, eta, zeta))
        assert dxz <= bound + 1e-12
        if xi != eta:
            assert vm.distance(model, xi, eta) == math.exp(
                -vm.epsilon * gromov_bb(model, xi, eta)
            )
    assert vm.distance(model, xi, xi) == 0.0


def test_shadow_is_a_cylinder(unit_model):
    # shortest prefix cylinder with wlen > wlen(g) - sigma0
    assert shadow(unit_model, unit_model.parse("ab"), 0.5) == unit_model.parse("ab")
    assert shadow(unit_model, unit_model.parse("ab"), 1.5) == unit_model.parse("a")
    assert shadow(unit_model, unit_model.parse("aba"), 2.5) == unit_model.parse("a")
    with pytest.raises(ValueError):
        shadow(unit_model, IDENTITY, 1.5)


def test_ball_is_the_cylinder_of_the_divergence_depth(unit_density):
    model = unit_density.model
    vm = unit_density.visual_metric()
    xi = from_strings(model, "", "ab")
    # open ball: shortest prefix with e^{-eps wlen} < rho
    rho = math.exp(-vm.epsilon * 2.0)
    assert ball(model, vm, xi, rho) == (0, 2, 0)
    assert ball(model, vm, xi, 1.5) == IDENTITY
    with pytest.raises(ValueError):
        ball(model, vm, xi, 0.0)


def test_cylinder_predicates(unit_model):
    a, ab = (0,), (0, 2)
    assert cylinders_nested(ab, a)
    assert not cylinders_nested(a, ab)
    assert cylinders_disjoint(a, (2,))
    assert not cylinders_disjoint(a, ab)
    xi = from_strings(unit_model, "ab", "a")
    assert cylinder_contains_point(ab, xi)
    assert not cylinder_contains_point((2,), xi)


def test_interior_point_and_forward_extension(unit_model):
    xi = interior_point(unit_model, (0, 2))
    assert cylinder_contains_point((0, 2), xi)
    g = unit_model.parse("aB")
    ghat = forward_extension(unit_model, g)
    assert ghat.prefix(2) == g


def test_action_moves_the_end(unit_model):
    m = unit_model
    xi = from_strings(m, "", "b")  # bbb...
    moved = act(m, m.parse("a"), xi)
    assert moved.prefix(3) == m.parse("abb")
    # head cancellation: B . (bbb...) = bbb...
    assert act(m, m.parse("B"), xi) == xi


def test_action_is_a_group_action(unit_density):
    model = unit_density.model
    rng = random.Random(11)
    for _ in range(200):
        g = model.random_word(rng, rng.randint(0, 5))
        h = model.random_word(rng, rng.randint(0, 5))
        xi = random_boundary_point(model, rng)
        assert act(model, IDENTITY, xi) == xi
        assert act(model, model.reduce_concat(g, h), xi) == act(
            model, g, act(model, h, xi)
        )


def test_random_boundary_point_deterministic(weighted_model):
    p1 = random_boundary_point(weighted_model, random.Random(4))
    p2 = random_boundary_point(weighted_model, random.Random(4))
    assert p1 == p2

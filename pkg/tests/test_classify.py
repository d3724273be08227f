import math
import random

import pytest

from boundarylab.boundary import act, random_boundary_point
from boundarylab.classify import (
    EQUIVALENT,
    NOT_SIMILAR,
    SIMILAR,
    SINGULAR_TENDENCY,
    cross_ratio,
    density_ratio_report,
    holder_fit_report,
    metric_pair,
    similarity_deviation_report,
)
from boundarylab.words import GroupModel, all_words_of_length


def test_metric_pair_needs_common_alphabet():
    with pytest.raises(ValueError):
        metric_pair(GroupModel(2, (1.0, 1.0)), GroupModel(3, (1.0, 1.0, 1.0)))


def test_homothetic_weights_are_similar():
    mp = metric_pair(GroupModel(2, (1.0, 2.0)), GroupModel(2, (3.0, 6.0)))
    rep = similarity_deviation_report(mp, r_max=6.0)
    assert rep.summary["verdict"] == SIMILAR
    assert rep.summary["max_deviation"] <= 1e-9


def test_unit_vs_weighted_is_not_similar(unit_model, weighted_model):
    mp = metric_pair(unit_model, weighted_model)
    rep = similarity_deviation_report(mp, r_max=8.0)
    assert rep.summary["verdict"] == NOT_SIMILAR
    # deviation is driven by powers of the heavy letter
    target = abs(mp.d1.h - 2.0 * mp.d2.h)
    assert abs(rep.summary["slope"] - target) <= 0.10 * target


def test_density_ratio_recursion_matches_brute_force(unit_model, weighted_model):
    mp = metric_pair(unit_model, weighted_model)
    depth = 4
    rep = density_ratio_report(mp, depth=depth)
    for n, lo, hi, spread in rep.rows:
        ratios = [
            mp.d1.mu_cylinder(w) / mp.d2.mu_cylinder(w)
            for w in all_words_of_length(unit_model, n)
        ]
        assert abs(lo - min(ratios)) < 1e-12 * abs(lo)
        assert abs(hi - max(ratios)) < 1e-12 * abs(hi)
        assert abs(spread - max(ratios) / min(ratios)) < 1e-9


def test_density_ratio_verdicts_track_similarity():
    same = metric_pair(GroupModel(2, (1.0, 2.0)), GroupModel(2, (2.0, 4.0)))
    rep = density_ratio_report(same, depth=8)
    assert rep.summary["verdict"] == EQUIVALENT
    assert abs(rep.summary["final_spread"] - 1.0) <= 1e-9
    other = metric_pair(GroupModel(2, (1.0, 1.0)), GroupModel(2, (1.0, 2.0)))
    rep2 = density_ratio_report(other, depth=8)
    assert rep2.summary["verdict"] == SINGULAR_TENDENCY
    assert rep2.summary["final_spread"] > 1.5


def test_density_ratio_depth_validation(unit_model, weighted_model):
    mp = metric_pair(unit_model, weighted_model)
    with pytest.raises(ValueError):
        density_ratio_report(mp, depth=0)


def test_cross_ratio_is_translation_invariant(unit_density):
    m = unit_density.model
    vm = unit_density.visual_metric()
    rng = random.Random(47)
    done = 0
    while done < 50:
        pts = [random_boundary_point(m, rng) for _ in range(4)]
        if len(set(pts)) < 4:
            continue
        g = m.random_word(rng, rng.randint(1, 4))
        before = cross_ratio(m, vm, *pts)
        after = cross_ratio(m, vm, *[act(m, g, p) for p in pts])
        assert abs(math.log(after) - math.log(before)) < 1e-9
        done += 1


def test_cross_ratio_rejects_coincident_points(unit_density):
    m = unit_density.model
    vm = unit_density.visual_metric()
    rng = random.Random(48)
    pts = [random_boundary_point(m, rng) for _ in range(3)]
    with pytest.raises(ValueError):
        cross_ratio(m, vm, pts[0], pts[0], pts[1], pts[2])


def test_holder_slope_for_rescaled_metric(unit_model):
    # same tree, half the visual parameter: log-distances scale exactly
    mp = metric_pair(unit_model, unit_model, epsilon2=math.log(3.0) / 4.0)
    rep = holder_fit_report(mp, samples=100, seed=6)
    assert abs(rep.summary["dimension_ratio"] - 0.5) < 1e-12
    assert abs(rep.summary["slope"] - 0.5) < 1e-12
    assert rep.summary["residual_max"] < 1e-12
    assert abs(rep.summary["cross_ratio_slope"] - 0.5) < 1e-9


def test_holder_slope_for_homothetic_pair():
    mp = metric_pair(GroupModel(2, (1.0, 1.0)), GroupModel(2, (2.0, 2.0)))
    rep = holder_fit_report(mp, samples=100, seed=9)
    assert abs(rep.summary["dimension_ratio"] - 1.0) < 1e-12
    assert abs(rep.summary["slope"] - 1.0) < 1e-12

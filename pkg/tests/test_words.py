import math
import random

import pytest

from boundarylab.words import (
    IDENTITY,
    CapExceeded,
    GroupModel,
    all_words_of_length,
    f2_unit,
    f2_weighted,
    inverse_letter,
    length_lex_key,
)


def test_letter_codes_pair_generator_with_inverse():
    # generator i -> 2i, inverse -> 2i+1, involution by xor
    for c in range(10):
        assert inverse_letter(c) == c ^ 1
        assert inverse_letter(inverse_letter(c)) == c


def test_model_validation():
    with pytest.raises(ValueError):
        GroupModel(1, (1.0,))
    with pytest.raises(ValueError):
        GroupModel(2, (1.0,))
    with pytest.raises(ValueError):
        GroupModel(2, (1.0, -2.0))


def test_parse_format_round_trip(unit_model):
    for text in ("e", "a", "A", "ab", "aBAb", "bbba"):
        assert unit_model.format(unit_model.parse(text)) == text if text != "e" else True
    assert unit_model.parse("e") == IDENTITY
    assert unit_model.parse("aB") == (0, 3)
    with pytest.raises(ValueError):
        unit_model.parse("aA")  # not reduced
    with pytest.raises(ValueError):
        unit_model.parse("c")  # rank 2 has letters a, b only


def test_reduce_concat_cancels_freely(unit_model):
    m = unit_model
    assert m.reduce_concat(m.parse("ab"), m.parse("Ba")) == m.parse("aa")
    assert m.reduce_concat(m.parse("ab"), m.parse("BA")) == IDENTITY
    assert m.reduce_concat(IDENTITY, m.parse("b")) == m.parse("b")
    # associativity and inverse laws on random triples
    rng = random.Random(5)
    for _ in range(300):
        u, v, w = (m.random_word(rng, rng.randint(0, 6)) for _ in range(3))
        assert m.reduce_concat(m.reduce_concat(u, v), w) == m.reduce_concat(
            u, m.reduce_concat(v, w)
        )
        assert m.reduce_concat(u, m.invert(u)) == IDENTITY
        assert m.is_reduced(m.reduce_concat(u, v))


def test_weighted_length(weighted_model):
    m = weighted_model
    assert m.wlen(m.parse("a")) == 1.0
    assert m.wlen(m.parse("b")) == 2.0
    assert m.wlen(m.parse("abA")) == 4.0
    assert m.distance(m.parse("a"), m.parse("ab")) == 2.0


def test_gromov_product_is_common_prefix_weight(unit_model):
    m = unit_model
    assert m.gromov_product(m.parse("aab"), m.parse("aaB")) == 2.0
    assert m.gromov_product(m.parse("ab"), m.parse("ba")) == 0.0
    # base-point change
    assert m.gromov_product(m.parse("aab"), m.parse("aaB"), o=m.parse("a")) == 1.0


def test_tree_has_zero_hyperbolicity_defect(unit_model, weighted_model):
    assert unit_model.estimate_delta(400, seed=1) == 0.0
    assert weighted_model.estimate_delta(400, seed=2) == 0.0


def test_ball_counts_match_closed_form(unit_model):
    # |sphere of radius n| = 4 * 3^(n-1) on the rank-2 unit-weight tree
    for radius in (1, 2, 3, 4):
        expected = 1 + sum(4 * 3 ** (n - 1) for n in range(1, radius + 1))
        assert len(unit_model.enumerate_ball(float(radius))) == expected


def test_ball_is_length_lex_sorted(weighted_model):
    ball = weighted_model.enumerate_ball(4.0)
    keys = [length_lex_key(weighted_model, w) for w in ball]
    assert keys == sorted(keys)
    assert ball[0] == IDENTITY


def test_annulus_count_oracle(unit_model):
    # words with 1.5 < wlen < 4.5: lengths 2, 3, 4 -> 12 + 36 + 108
    assert unit_model.annulus_count(3.0, 1.5) == 156
    with pytest.raises(ValueError):
        unit_model.enumerate_annulus(3.0, 0.0)


def test_enumeration_cap_raises(unit_model):
    with pytest.raises(CapExceeded):
        unit_model.enumerate_ball(8.0, cap=10)
    with pytest.raises(CapExceeded):
        unit_model.enumerate_annulus(3.0, 1.5, cap=10)


def test_random_word_is_reduced_and_deterministic(weighted_model):
    w1 = weighted_model.random_word(random.Random(9), 50)
    w2 = weighted_model.random_word(random.Random(9), 50)
    assert w1 == w2
    assert len(w1) == 50
    assert weighted_model.is_reduced(w1)


def test_all_words_of_length(unit_model):
    assert all_words_of_length(unit_model, 0) == [IDENTITY]
    words = all_words_of_length(unit_model, 3)
    assert len(words) == 4 * 3 * 3
    assert all(unit_model.is_reduced(w) for w in words)
    assert words == sorted(words)


def test_weighted_annulus_respects_weights():
    m = f2_weighted()
    # wlen in (0.5, 1.5): only the two weight-1 letters
    assert m.enumerate_annulus(1.0, 0.5) == [(0,), (1,)]
    assert f2_unit().enumerate_annulus(1.0, 0.5) == [(0,), (1,), (2,), (3,)]


def test_iter_nontrivial_excludes_identity(unit_model):
    words = [w for w, _ in unit_model.iter_nontrivial(2.0)]
    assert IDENTITY not in words
    assert len(words) == 4 + 12

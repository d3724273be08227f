"""Weighted free groups as reduced words on a metric tree.

A group element is a freely reduced word, stored as a tuple of letter
codes: generator i maps to code 2*i, its inverse to 2*i + 1, so the
inverse of a letter is ``code ^ 1``.  The word metric is left invariant,
d(g, h) = wlen(g^-1 h), with wlen the sum of generator weights along the
word.  The Cayley graph is a tree, hence every Gromov product equals the
weighted length of a longest common prefix and the hyperbolicity
constant is exactly zero.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

Word = tuple[int, ...]

IDENTITY: Word = ()

# Absolute tolerance for comparisons between weighted lengths.
LENGTH_EPS = 1e-9


class CapExceeded(RuntimeError):
    """An enumeration grew past its configured element cap."""


def inverse_letter(letter: int) -> int:
    return letter ^ 1


@dataclass(frozen=True)
class GroupModel:
    """Free group of given rank with one positive weight per generator."""

    rank: int
    weights: tuple[float, ...]
    letter_weights: tuple[float, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.rank < 2:
            raise ValueError("rank must be at least 2")
        if self.rank > 26:
            raise ValueError("letter names support rank <= 26")
        if len(self.weights) != self.rank:
            raise ValueError("need exactly one weight per generator")
        if any(w <= 0 for w in self.weights):
            raise ValueError("generator weights must be positive")
        per_letter = tuple(self.weights[c >> 1] for c in range(2 * self.rank))
        object.__setattr__(self, "letter_weights", per_letter)

    # -- alphabet ----------------------------------------------------------

    @property
    def alphabet(self) -> range:
        return range(2 * self.rank)

    @property
    def max_weight(self) -> float:
        return max(self.weights)

    @property
    def min_weight(self) -> float:
        return min(self.weights)

    def letter_name(self, letter: int) -> str:
        base = "abcdefghijklmnopqrstuvwxyz"[letter >> 1]
        return base.upper() if letter & 1 else base

    def format(self, word: Word) -> str:
        return "".join(self.letter_name(c) for c in word) if word else "e"

    def parse(self, text: str) -> Word:
        if text in ("", "e"):
            return IDENTITY
        letters = []
        for ch in text:
            low = ch.lower()
            idx = ord(low) - ord("a")
            if not 0 <= idx < self.rank:
                raise ValueError(f"unknown generator {ch!r} for rank {self.rank}")
            letters.append(2 * idx + (1 if ch.isupper() else 0))
        word = tuple(letters)
        if not self.is_reduced(word):
            raise ValueError(f"word {text!r} is not freely reduced")
        return word

    # -- basic word operations ---------------------------------------------

    def is_reduced(self, word: Word) -> bool:
        return all(word[i + 1] != word[i] ^ 1 for i in range(len(word) - 1))

    def wlen(self, word: Word) -> float:
        lw = self.letter_weights
        return sum(lw[c] for c in word)

    def invert(self, word: Word) -> Word:
        return tuple(c ^ 1 for c in reversed(word))

    def reduce_concat(self, u: Word, v: Word) -> Word:
        """Free reduction of the concatenation u v."""
        cancel = 0
        max_cancel = min(len(u), len(v))
        while cancel < max_cancel and u[len(u) - 1 - cancel] == v[cancel] ^ 1:
            cancel += 1
        return u[: len(u) - cancel] + v[cancel:]

    def distance(self, g: Word, h: Word) -> float:
        return self.wlen(self.reduce_concat(self.invert(g), h))

    def common_prefix_wlen(self, x: Word, y: Word) -> float:
        lw = self.letter_weights
        total = 0.0
        for cx, cy in zip(x, y):
            if cx != cy:
                break
            total += lw[cx]
        return total

    def gromov_product(self, x: Word, y: Word, o: Word = IDENTITY) -> float:
        """(x, y)_o, equal to the common prefix weight of o^-1 x and o^-1 y."""
        if o:
            o_inv = self.invert(o)
            x = self.reduce_concat(o_inv, x)
            y = self.reduce_concat(o_inv, y)
        return self.common_prefix_wlen(x, y)

    # -- enumeration ---------------------------------------------------------

    def extensions(self, last: int | None) -> range | tuple[int, ...]:
        """Letters that keep a word reduced after ``last`` (None = any)."""
        if last is None:
            return self.alphabet
        forbidden = last ^ 1
        return tuple(c for c in self.alphabet if c != forbidden)

    def _iter_tree(self, max_wlen: float):
        """Yield (word, wlen) for every reduced word with wlen <= max_wlen."""
        stack = [(IDENTITY, 0.0)]
        lw = self.letter_weights
        while stack:
            word, length = stack.pop()
            yield word, length
            for c in self.extensions(word[-1] if word else None):
                child = length + lw[c]
                if child <= max_wlen + LENGTH_EPS:
                    stack.append((word + (c,), child))

    def iter_nontrivial(self, max_wlen: float):
        """Yield (word, wlen) over nontrivial reduced words with wlen <= max_wlen."""
        for word, length in self._iter_tree(max_wlen):
            if word:
                yield word, length

    def enumerate_ball(self, radius: float, cap: int = 2_000_000) -> list[Word]:
        """All reduced words with wlen <= radius, in length-lex order."""
        out = []
        for word, length in self._iter_tree(radius):
            if length <= radius + LENGTH_EPS:
                out.append((length, word))
                if len(out) > cap:
                    raise CapExceeded(f"ball of radius {radius} exceeds cap {cap}")
        out.sort()
        return [w for _, w in out]

    def enumerate_annulus(self, R: float, alpha: float, cap: int = 2_000_000) -> list[Word]:
        """Reduced words with R - alpha < wlen < R + alpha, in length-lex order.

        Both bounds are strict.  Enumeration prunes the tree above
        R + alpha, so the cost is proportional to the ball of that radius.
        """
        if alpha <= 0:
            raise ValueError("alpha must be positive")
        out = []
        for word, length in self._iter_tree(R + alpha):
            if R - alpha < length < R + alpha:
                out.append((length, word))
                if len(out) > cap:
                    raise CapExceeded(f"annulus A_{R}({alpha}) exceeds cap {cap}")
        out.sort()
        return [w for _, w in out]

    def annulus_count(self, R: float, alpha: float, cap: int = 2_000_000) -> int:
        return len(self.enumerate_annulus(R, alpha, cap))

    # -- randomness ----------------------------------------------------------

    def random_word(self, rng: random.Random, n_letters: int) -> Word:
        word = []
        last = None
        for _ in range(n_letters):
            c = rng.choice(list(self.extensions(last)))
            word.append(c)
            last = c
        return tuple(word)

    def estimate_delta(self, sample_size: int, seed: int = 0, max_letters: int = 12) -> float:
        """Empirical hyperbolicity constant from random four-point tests.

        Samples quadruples (x, y, z, o) and measures the defect
        min((x,y)_o, (y,z)_o) - (x,z)_o, whose supremum is the delta of
        the space.  On a tree the defect is never positive, so the
        estimate is exactly 0.
        """
        if sample_size < 1:
            raise ValueError("sample_size must be at least 1")
        rng = random.Random(seed)
        worst = 0.0
        for _ in range(sample_size):
            x, y, z, o = (self.random_word(rng, rng.randint(0, max_letters)) for _ in range(4))
            defect = min(self.gromov_product(x, y, o), self.gromov_product(y, z, o))
            defect -= self.gromov_product(x, z, o)
            worst = max(worst, defect)
        return worst


def unit_free_group(rank: int = 2) -> GroupModel:
    return GroupModel(rank, (1.0,) * rank)


def f2_unit() -> GroupModel:
    """Rank-2 free group with unit weights (canonical test model)."""
    return unit_free_group(2)


def f2_weighted() -> GroupModel:
    """Rank-2 free group with weights (1, 2) (canonical weighted model)."""
    return GroupModel(2, (1.0, 2.0))


def length_lex_key(model: GroupModel, word: Word) -> tuple[float, Word]:
    return (model.wlen(word), word)


def all_words_of_length(model: GroupModel, n_letters: int) -> list[Word]:
    """All reduced words with exactly n letters, lexicographically."""
    if n_letters == 0:
        return [IDENTITY]
    words = []
    for first in model.alphabet:
        stack = [(first,)]
        while stack:
            w = stack.pop()
            if len(w) == n_letters:
                words.append(w)
                continue
            for c in model.extensions(w[-1]):
                stack.append(w + (c,))
    words.sort()
    return words

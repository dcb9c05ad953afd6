from fractions import Fraction
from itertools import permutations
from math import comb, factorial

import pytest
from hypothesis import given, settings, strategies as st

from linfty.graded import (GradedModule, antisymmetrize, chi_sign, compose_perm, decalage_sign,
                           direct_sum, enumerate_shuffles, epsilon_sign, inverse_decalage_sign,
                           koszul_sort)
from linfty.multimap import MultiMap

from helpers import random_map, random_module, rng_for

degrees_st = st.lists(st.integers(-2, 3), min_size=1, max_size=5)


def bubble_sign(sigma, degrees, exterior):
    """Adjacent-transposition oracle for the action signs."""
    w = list(sigma)
    sign = 1
    changed = True
    while changed:
        changed = False
        for i in range(len(w) - 1):
            if w[i] > w[i + 1]:
                odd = degrees[w[i]] % 2 and degrees[w[i + 1]] % 2
                sign *= (1 if odd else -1) if exterior else (-1 if odd else 1)
                w[i], w[i + 1] = w[i + 1], w[i]
                changed = True
    return sign


def test_small_values():
    assert epsilon_sign((0, 1, 2), [1, 1, 1]) == 1
    assert epsilon_sign((1, 0), [1, 1]) == -1
    assert epsilon_sign((1, 0), [0, 1]) == 1
    assert chi_sign((1, 0), [0, 0]) == -1
    assert chi_sign((1, 0), [1, 1]) == 1
    assert epsilon_sign((1, 2, 0), [1, 2, 1]) == bubble_sign((1, 2, 0), [1, 2, 1], False) == -1


def test_length_mismatch_raises():
    with pytest.raises(ValueError):
        epsilon_sign((0, 1), [1])
    with pytest.raises(ValueError):
        chi_sign((0, 0), [1, 1])


@settings(max_examples=100, deadline=None)
@given(degrees_st, st.randoms(use_true_random=False))
def test_signs_match_bubble_oracle(degrees, rnd):
    sigma = list(range(len(degrees)))
    rnd.shuffle(sigma)
    sigma = tuple(sigma)
    assert epsilon_sign(sigma, degrees) == bubble_sign(sigma, degrees, False)
    assert chi_sign(sigma, degrees) == bubble_sign(sigma, degrees, True)


@settings(max_examples=100, deadline=None)
@given(degrees_st, st.randoms(use_true_random=False))
def test_signs_are_cocycles(degrees, rnd):
    n = len(degrees)
    s, t = list(range(n)), list(range(n))
    rnd.shuffle(s)
    rnd.shuffle(t)
    moved = [degrees[i] for i in t]
    for sign in (epsilon_sign, chi_sign):
        assert sign(compose_perm(s, t), degrees) == sign(tuple(s), moved) * sign(tuple(t), degrees)


@pytest.mark.parametrize("n", range(1, 6))
def test_chi_epsilon_decalage_relation(n):
    rng = rng_for(n)
    for _ in range(10):
        a = [rng.randint(-2, 3) for _ in range(n)]
        shifted = [x - 1 for x in a]
        for sigma in permutations(range(n)):
            moved = [a[i] for i in sigma]
            expo = sum((n - 1 - i) * (a[i] + moved[i]) for i in range(n))
            assert chi_sign(sigma, a) == (-1) ** expo * epsilon_sign(sigma, shifted)


def test_decalage_values_and_roundtrip():
    assert decalage_sign(1, [5]) == 1
    assert decalage_sign(2, [1, 1]) == -1
    rng = rng_for(0)
    for _ in range(50):
        n = rng.randint(1, 5)
        a = [rng.randint(-2, 3) for _ in range(n)]
        w = [x - 1 for x in a]
        # the inverse is written in the shifted degrees; the two signs multiply to one
        assert decalage_sign(n, a) * inverse_decalage_sign(n, w) == 1


@pytest.mark.parametrize("n", range(0, 9))
def test_shuffle_counts(n):
    for k in range(n + 1):
        sh = enumerate_shuffles(k, n)
        assert len(sh) == comb(n, k) == len(set(sh))
        for s in sh:
            assert list(s[:k]) == sorted(s[:k]) and list(s[k:]) == sorted(s[k:])
    assert enumerate_shuffles(0, n) == [tuple(range(n))]


def test_shuffle_errors():
    assert enumerate_shuffles(1, 2) == [(0, 1), (1, 0)]
    with pytest.raises(ValueError):
        enumerate_shuffles(3, 2)


def test_koszul_sort_vanishing():
    deg = [1, 0]
    assert koszul_sort((0, 0), deg, "symmetric")[0] == 0
    assert koszul_sort((1, 1), deg, "symmetric") == (1, (1, 1))
    assert koszul_sort((1, 1), deg, "exterior")[0] == 0
    assert koszul_sort((0, 0), deg, "exterior") == (1, (0, 0))


@pytest.mark.parametrize("mode", ["symmetric", "exterior"])
def test_antisymmetrize_factor(mode):
    rng = rng_for(11)
    for n in range(1, 5):
        L = random_module(rng, 3)
        m = random_map(rng, L, L, n, rng.randint(-1, 1), symmetry=None)
        once = antisymmetrize(m, mode)
        twice = antisymmetrize(MultiMap(L, L, n, m.degree, None,
                                        {w: once.evaluate(w) for w in MultiMap.domain_words(L, n, None)}),
                               mode)
        assert twice == once.scale(factorial(n))
        # invariance under the action
        for word in MultiMap.domain_words(L, n, None):
            for sigma in permutations(range(n)):
                deg = [L.degrees[i] for i in word]
                sign = epsilon_sign(sigma, deg) if mode == "symmetric" else chi_sign(sigma, deg)
                moved = once.evaluate(tuple(word[i] for i in sigma))
                assert moved == {k: sign * v for k, v in once.evaluate(word).items()}


def test_antisymmetrize_symmetric_bilinear_doubles():
    L = GradedModule.from_basis([("a", 0), ("b", 2)])
    m = MultiMap(L, L, 2, 2, "symmetric", {(0, 0): {1: Fraction(3)}, (0, 1): {}})
    plain = MultiMap(L, L, 2, 2, None, {(0, 0): {1: Fraction(3)}})
    assert antisymmetrize(plain, "symmetric") == m.scale(2)
    zero = MultiMap.zero(L, L, 2, 0, None)
    assert antisymmetrize(zero, "exterior").is_zero()


def test_direct_sum_orders_by_degree():
    A = GradedModule.from_basis([("x", 1), ("y", -1)])
    B = GradedModule.from_basis([("z", 0)])
    S, left, right = direct_sum(A, B, ("a:", "b:"))
    assert list(S.degrees) == [-1, 0, 1]
    assert [S.labels[left[i]] for i in range(2)] == ["a:" + l for l in A.labels]
    assert S.labels[right[0]] == "b:z"

from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from linfty.graded import GradedModule
from linfty.multimap import MultiMap, vec_add
from linfty.trees import (BETA, LEAF, TAU, OrientedTree, add_trees, all_six_tuples, all_triples,
                          compose_trees, composite_exponent, enumerate_ot, evaluate, node_value,
                          parse_tree, sign_e, six_to_triple, subtract_tree, triple_to_six,
                          weight_w)

from helpers import random_bilinear, rng_for, sign_lemma_failures


def catalan_oracle(n, memo={1: 1}):
    # root split: k leaves on the left, n - k on the right
    if n not in memo:
        memo[n] = sum(catalan_oracle(k) * catalan_oracle(n - k) for k in range(1, n))
    return memo[n]


def trees_st(max_leaves=6):
    return st.recursive(st.just(LEAF), lambda s: st.tuples(s, s), max_leaves=max_leaves).map(OrientedTree)


def test_counts():
    assert [len(enumerate_ot(n)) for n in range(1, 7)] == [1, 1, 2, 5, 14, 42]
    assert enumerate_ot(2) == [BETA]


@pytest.mark.parametrize("n", range(1, 9))
def test_counts_match_recursive_oracle(n):
    trees = enumerate_ot(n)
    assert len(trees) == catalan_oracle(n) == len(set(trees))
    assert all(t.n_leaves == n for t in trees)


def test_enumerate_rejects_bad_input():
    with pytest.raises(ValueError):
        enumerate_ot(0)


def test_signs_of_small_trees():
    assert sign_e(TAU) == 1
    assert sign_e(BETA) == -1
    assert [sign_e(t) for t in enumerate_ot(3)] == [-1, 1]
    assert [weight_w(BETA, 1), weight_w(BETA, 2)] == [1, 0]


def test_node_values():
    t = parse_tree("(((( . . ) . ) . ) . )")
    assert node_value(t, "") == ("", 0)
    # digits 1,1,2,1 read in base 3
    t = parse_tree("((( . ( . . )) . ) . )")
    assert node_value(t, "1121") == ("1121", Fraction(1, 3) + Fraction(1, 9) + Fraction(2, 27) + Fraction(1, 81))
    with pytest.raises(ValueError):
        node_value(t, "3")


@pytest.mark.parametrize("n", range(2, 7))
def test_values_are_injective_and_weights_count_ones(n):
    for t in enumerate_ot(n):
        nodes = t.ramifications + t.leaves
        values = [node_value(t, p)[1] for p in nodes]
        assert len(set(values)) == len(values)
        for K in t.ramifications:
            assert weight_w(t, K) == node_value(t, K)[0].count("1")


def test_weight_examples():
    t = parse_tree("((( . ( . . )) . ) . )")
    assert weight_w(t, "112") == 2
    for n in range(2, 7):
        comb = enumerate_ot(n)[0]
        assert weight_w(comb, n) == 0
    with pytest.raises(ValueError):
        weight_w(TAU, 1)


def test_addition():
    assert add_trees(TAU, TAU) == BETA
    a, b = enumerate_ot(3)
    assert add_trees(a, b).n_leaves == 6
    assert add_trees(a, b) != add_trees(b, a)
    assert add_trees(BETA, TAU) == a


@settings(max_examples=60, deadline=None)
@given(trees_st(), trees_st())
def test_addition_reconstructs(a, b):
    s = add_trees(a, b)
    assert s.n_leaves == a.n_leaves + b.n_leaves
    assert s.subtree("1") == a and s.subtree("2") == b


def test_subtraction():
    a, b = enumerate_ot(3)
    assert subtract_tree(a, "1") == BETA
    assert subtract_tree(b, "2") == BETA
    comb4 = enumerate_ot(4)[0]
    assert subtract_tree(comb4, "11") == enumerate_ot(3)[0]
    with pytest.raises(ValueError):
        subtract_tree(comb4, "111")


@settings(max_examples=60, deadline=None)
@given(trees_st(7))
def test_subtraction_leaf_count(t):
    for K in t.ramifications:
        assert subtract_tree(t, K).n_leaves == t.n_leaves - t.subtree(K).n_leaves + 1


@settings(max_examples=60, deadline=None)
@given(trees_st(4), st.data())
def test_composition(outer, data):
    assert compose_trees(outer, [TAU] * outer.n_leaves) == outer
    inner = [data.draw(trees_st(3)) for _ in range(outer.n_leaves)]
    c = compose_trees(outer, inner)
    assert c.n_leaves == sum(t.n_leaves for t in inner)
    for i, p in enumerate(outer.leaves):
        assert c.subtree(p) == inner[i]
    with pytest.raises(ValueError):
        compose_trees(outer, inner + [TAU])


# -- evaluation ---------------------------------------------------------------------

L3 = GradedModule.from_basis([("a", 0), ("b", 1), ("c", -1)])


def test_evaluate_beta_and_three_leaf_trees():
    rng = rng_for(5)
    b0, b1 = random_bilinear(rng, L3, 1), random_bilinear(rng, L3, 1)
    assert evaluate(BETA, {"": b0}) == b0
    left, right = enumerate_ot(3)
    got = evaluate(left, {"": b0, "1": b1})
    want = {}
    for w in product(range(3), repeat=3):
        acc = {}
        for x, c in b1.evaluate(w[:2]).items():
            vec_add(acc, b0.evaluate((x, w[2])), c)
        if acc:
            want[w] = acc
    assert got.entries == want
    got = evaluate(right, {"": b0, "2": b1})
    want = {}
    for w in product(range(3), repeat=3):
        acc = {}
        sign = -1 if (b1.degree * L3.degrees[w[0]]) % 2 else 1
        for x, c in b1.evaluate(w[1:]).items():
            vec_add(acc, b0.evaluate((w[0], x)), sign * c)
        if acc:
            want[w] = acc
    assert got.entries == want
    with pytest.raises(ValueError):
        evaluate(right, {"": b0})


def tensor_of_maps(maps, word, degrees):
    """(f_1 (x) ... (x) f_m)(word) with the Koszul sign, as a dict of output tuples."""
    out = {(): Fraction(1)}
    pos = 0
    passed = 0
    for f in maps:
        block = word[pos:pos + f.arity]
        sign = -1 if (f.degree * passed) % 2 else 1
        val = f.evaluate(block)
        out = {t + (x,): sign * c * cx for t, c in out.items() for x, cx in val.items()}
        passed += sum(degrees[i] for i in block)
        pos += f.arity
    return out


@pytest.mark.parametrize("seed", range(6))
def test_composite_evaluation_sign(seed):
    rng = rng_for(seed)
    outer = rng.choice(enumerate_ot(rng.randint(2, 3)))
    inner = [rng.choice(enumerate_ot(rng.randint(1, 2))) for _ in range(outer.n_leaves)]
    outer_family = {p: random_bilinear(rng, L3, rng.choice([-1, 1])) for p in outer.ramifications}
    inner_families = [{p: random_bilinear(rng, L3, rng.choice([-1, 1])) for p in t.ramifications}
                      for t in inner]
    composite = compose_trees(outer, inner)
    family = dict(outer_family)
    for leaf, fam in zip(outer.leaves, inner_families):
        family.update({leaf + p: b for p, b in fam.items()})
    lhs = evaluate(composite, family)
    outer_map = evaluate(outer, outer_family)
    inner_maps = [evaluate(t, f, L3) for t, f in zip(inner, inner_families)]
    sign = (-1) ** composite_exponent(outer, inner, outer_family, inner_families)
    for word in MultiMap.domain_words(L3, composite.n_leaves, None):
        acc = {}
        for args, c in tensor_of_maps(inner_maps, word, L3.degrees).items():
            vec_add(acc, outer_map.evaluate(args), sign * c)
        assert lhs.evaluate(word) == acc


# -- triples and 6-tuples ---------------------------------------------------------------

@pytest.mark.parametrize("n", [3, 4])
def test_triple_roundtrip(n):
    triples = list(all_triples(n))
    for tree, K, sigma in triples:
        six = triple_to_six(tree, K, sigma)
        assert six_to_triple(six) == (tree, K, tuple(sigma))
        assert six[3][:six[0]] == tuple(sorted(six[3][:six[0]]))
        gamma = six[4]
        assert gamma.index(1) == sum(1 for p in tree.leaves
                                     if node_value(tree, p)[1] < node_value(tree, K)[1])
    sixes = list(all_six_tuples(n))
    assert len(sixes) == len(triples)
    assert {six_to_triple(s) for s in sixes} == {(t, K, tuple(s)) for t, K, s in triples}


def test_composite_of_correspondence():
    for six in all_six_tuples(4):
        k, phi, psi, rho, gamma, delta = six
        r = gamma.index(1)
        Phi, K, _ = six_to_triple(six)
        assert Phi == compose_trees(psi, [TAU] * r + [phi] + [TAU] * (psi.n_leaves - r - 1))
        assert Phi.subtree(K) == phi


def test_malformed_six_tuple():
    phi, psi = BETA, BETA
    with pytest.raises(ValueError):
        six_to_triple((2, phi, psi, (2, 1, 3), (1, 2), (1, 2)))
    with pytest.raises(ValueError):
        six_to_triple((3, enumerate_ot(3)[0], psi, (1, 2, 3), (1, 2), (1, 2, 3)))
    with pytest.raises(ValueError):
        six_to_triple((2, phi, psi, (1, 2, 3), (1, 1), (1, 2)))


@pytest.mark.parametrize("n", [3, 4])
def test_sign_lemma(n):
    assert sign_lemma_failures(n, seed=n) == []


def test_sign_lemma_other_module():
    L = GradedModule.from_basis([("x", 1), ("y", 2)])
    assert sign_lemma_failures(4, seed=99, L=L) == []

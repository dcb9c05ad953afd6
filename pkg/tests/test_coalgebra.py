from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from linfty.coalgebra import (Coderivation, apply_coderivation, apply_morphism,
                              check_equivariance, check_square_zero, coderivation_square,
                              compose_coderivations, compose_formal, identity_morphism)
from linfty.generators import lie_dgl
from linfty.graded import GradedModule
from linfty.multimap import MultiMap

from helpers import (all_words, brute_coderivation, brute_morphism, diagrams_hold, random_coderivation,
                     random_module, random_morphism, rng_for)


@pytest.mark.parametrize("seed", range(30))
def test_coproduct_diagrams(seed):
    assert diagrams_hold(seed)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_extension_matches_brute_force(seed):
    rng = rng_for(seed)
    W = random_module(rng, 3)
    V = random_module(rng, 2)
    Q = random_coderivation(rng, W, 3)
    F = random_morphism(rng, W, V, 3)
    for word in all_words(W.dim, W.degrees, 4):
        one = {word: Fraction(1)}
        assert apply_coderivation(Q, one) == brute_coderivation(Q, word)
        assert apply_morphism(F, one) == brute_morphism(F, word)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_composition_is_composition_of_extensions(seed):
    rng = rng_for(seed)
    U = random_module(rng, 2)
    V = random_module(rng, 2)
    W = random_module(rng, 2)
    F = random_morphism(rng, U, V, 3)
    G = random_morphism(rng, V, W, 3)
    GF = compose_formal(G, F)
    for word in all_words(U.dim, U.degrees, 3):
        one = {word: Fraction(1)}
        assert apply_morphism(GF, one, max_out=1) == apply_morphism(G, apply_morphism(F, one), max_out=1)


def test_identity_extension_is_identity():
    W = GradedModule.from_basis([("x", 0), ("y", 1), ("z", -1)])
    Id = identity_morphism(W, 3)
    for word in all_words(3, W.degrees, 3):
        assert apply_morphism(Id, {word: Fraction(1)}) == {word: 1}


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_square_formula_matches_composite(seed):
    rng = rng_for(seed)
    W = random_module(rng, 3)
    Q = random_coderivation(rng, W, 3)
    sq = coderivation_square(Q)
    comp = compose_coderivations(Q, Q, 3)
    for word in all_words(W.dim, W.degrees, 3)[1:]:
        brute = {}
        for w, c in apply_coderivation(Q, apply_coderivation(Q, {word: Fraction(1)})).items():
            if len(w) == 1:
                brute[w[0]] = c
        assert sq.comp(len(word)).evaluate(word) == brute
        assert comp.comp(len(word)).evaluate(word) == brute


def test_square_zero_on_lie_algebra_and_corruption():
    Q = lie_dgl().as_linfty(3).shifted
    assert check_square_zero(Q)
    assert check_equivariance(identity_morphism(Q.module, 3), Q, Q)
    # [e,f]=ah, [e,h]=be, [f,h]=cf satisfy Jacobi iff a(b+c)=0, so doubling b breaks it
    bad = dict(Q.comps)
    m = bad[2]
    entries = dict(m.entries)
    word = (0, 2)
    entries[word] = {k: 2 * v for k, v in entries[word].items()}
    bad[2] = MultiMap(m.source, m.target, 2, m.degree, m.symmetry, entries)
    rep = check_square_zero(Coderivation(Q.module, bad, 3))
    assert not rep
    assert rep.failure[0] == 3

"""The ten acceptance criteria, each exact and timed.

Every criterion records a ``PASS``/``FAIL`` line; the lines are printed in the
terminal summary of a pytest run, and directly when this file is run as a
script.
"""

import time
from fractions import Fraction

from linfty.generators import massey_dgl
from linfty.graded import GradedModule, canonical_words
from linfty.io import fixture_path, load
from linfty.trees import BETA, TAU, enumerate_ot, node_value, parse_tree, sign_e

from helpers import (decomposition_sound, diagrams_hold, massey_mu3_oracle, obstruction_cases,
                     obstruction_is_closed, sign_lemma_failures, transfer_sound)

RESULTS = {}


def record(number, title, limit, body):
    start = time.perf_counter()
    ok, detail = body()
    elapsed = time.perf_counter() - start
    within = elapsed < limit
    status = "PASS" if ok and within else "FAIL"
    note = detail
    if not within:
        note += f"; over the {limit:g} s budget"
    RESULTS[number] = f"{status} {number:2d} {title}: {note} ({elapsed:.2f} s)"
    return ok and within, RESULTS[number]


def check(number, title, limit, body):
    ok, line = record(number, title, limit, body)
    print(line)
    assert ok, line


# -- 1, 2: trees --------------------------------------------------------------------------

def tree_counts():
    counts = [len(enumerate_ot(n)) for n in range(1, 7)]
    ot2 = enumerate_ot(2) == [BETA]
    return counts == [1, 1, 2, 5, 14, 42] and ot2, f"counts {counts}"


def tree_signs():
    left, right = parse_tree("(( . . ) . )"), parse_tree("( . ( . . ))")
    # the ternary node values 0, 0.1, 0.11, 0.12, 0.2 drawn with the first 3-leaf tree
    values = [node_value(left, p)[1] for p in ("", "1", "11", "12", "2")]
    signs = (sign_e(TAU), sign_e(BETA), sign_e(left), sign_e(right))
    ok = signs == (1, -1, -1, 1) and values == [Fraction(k, 9) for k in (0, 3, 4, 5, 6)]
    ok = ok and enumerate_ot(3) == [left, right]
    return ok, f"e(tau), e(beta), e(3-leaf trees) = {signs}"


def test_criterion_01_tree_counts():
    check(1, "tree counts", 1, tree_counts)


def test_criterion_02_tree_signs():
    check(2, "tree signs", 1, tree_signs)


# -- 3: coalgebra diagrams ------------------------------------------------------------------

def coalgebra_diagrams():
    bad = [s for s in range(30) if not diagrams_hold(s)]
    return not bad, f"30 random (W, Q, F), failing seeds {bad}"


def test_criterion_03_coalgebra_diagrams():
    check(3, "coproduct diagrams", 30, coalgebra_diagrams)


# -- 4, 5: transfer ------------------------------------------------------------------------

def transfer_soundness():
    bad = [s for s in range(30) if not transfer_sound(s, 4)]
    return not bad, f"30 random split DGLs up to arity 4, failing seeds {bad}"


def massey_fixture():
    from linfty.transfer import transfer

    _, dgl = load(fixture_path("dgl_massey"))
    if not (dgl.module == massey_dgl().module and dgl.bracket == massey_dgl().bracket):
        return False, "fixture differs from the generator"
    hd, mm, _ = transfer(dgl, max_arity=3)
    mu3 = mm.comp(3)
    H = hd.H
    words = canonical_words(H.dim, H.degrees, 3, "exterior")
    agree = all(mu3.evaluate(w) == massey_mu3_oracle(dgl, hd, w) for w in words)
    return agree and not mu3.is_zero(), f"mu3 has {len(mu3.entries)} nonzero entries, oracle agrees: {agree}"


def test_criterion_04_transfer_soundness():
    check(4, "transfer soundness", 300, transfer_soundness)


def test_criterion_05_massey_fixture():
    check(5, "Massey mu3", 10, massey_fixture)


# -- 6, 7: obstruction and decomposition ---------------------------------------------------------

def obstruction():
    cases = obstruction_cases(20)
    bad = [i for i, c in enumerate(cases) if not obstruction_is_closed(c)]
    return not bad and len(cases) == 20, f"{len(cases)} truncated morphisms, n <= 4, failing {bad}"


def decomposition():
    bad = [s for s in range(10) if not decomposition_sound(s, 4)]
    return not bad, f"10 random split DGLs up to arity 4, failing seeds {bad}"


def test_criterion_06_obstruction():
    check(6, "obstruction cocycle", 30, obstruction)


def test_criterion_07_decomposition():
    check(7, "decomposition", 300, decomposition)


# -- 8, 9: deformations ------------------------------------------------------------------------

A, P = 4, 3


def _cubic():
    from linfty.deformation import tangent_complex

    _, M = load(fixture_path("manifold_cubic"))
    return M, tangent_complex(M, P)


def universal():
    from linfty.coalgebra import check_square_zero
    from linfty.deformation import same_perturbation, unidef_correspondence, universal_deformation

    M, tc = _cubic()
    d = universal_deformation(M, A, P, tc=tc)
    square = check_square_zero(d.total())
    F = unidef_correspondence(d, tc=tc, A=A)
    back = unidef_correspondence(morphism=F, base=d.base, tc=tc, A=A)
    same = same_perturbation(back, d)
    return (bool(square) and d.axiom_failure() is None and same,
            f"fiber dim {M.space.dim}, tangent dim {tc.module.dim}, square zero {bool(square)}, "
            f"roundtrip {same}")


def semiuniversal():
    from linfty.deformation import base_change, semiuniversal_deformation, universal_deformation

    M, tc = _cubic()
    ud = universal_deformation(M, A, P, tc=tc)
    sd, F = semiuniversal_deformation(M, A, P, tc=tc)
    bc = base_change(ud, F, sd.base)
    differ = [n for n in range(1, A + 1) if bc.Q.comp(n).entries != sd.Q.comp(n).entries]
    return not differ and sd.axiom_failure() is None, f"base dim {sd.base.space.dim}, differing arities {differ}"


def test_criterion_08_universal_deformation():
    check(8, "universal deformation", 120, universal)


def test_criterion_09_semiuniversal_agreement():
    check(9, "semiuniversal agreement", 120, semiuniversal)


# -- 10: the sign identity --------------------------------------------------------------------------

def sign_identity():
    other = GradedModule.from_basis([("x", 1), ("y", 2)])
    failures = 0
    for n in (3, 4):
        for seed in range(3):
            failures += len(sign_lemma_failures(n, seed))
        failures += len(sign_lemma_failures(n, 100 + n, L=other))
    return failures == 0, f"n = 3, 4 over 8 random families, {failures} failing tuples"


def test_criterion_10_sign_identity():
    check(10, "sign identity", 60, sign_identity)


ALL = [(1, "tree counts", 1, tree_counts), (2, "tree signs", 1, tree_signs),
       (3, "coproduct diagrams", 30, coalgebra_diagrams),
       (4, "transfer soundness", 300, transfer_soundness), (5, "Massey mu3", 10, massey_fixture),
       (6, "obstruction cocycle", 30, obstruction), (7, "decomposition", 300, decomposition),
       (8, "universal deformation", 120, universal), (9, "semiuniversal agreement", 120, semiuniversal),
       (10, "sign identity", 60, sign_identity)]


if __name__ == "__main__":
    import sys

    results = [record(*args) for args in ALL]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)

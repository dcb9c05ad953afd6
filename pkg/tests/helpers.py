"""Random structures and brute-force oracles shared by the test modules."""

import random
from fractions import Fraction
from itertools import combinations, combinations_with_replacement

from linfty.graded import GradedModule
from linfty.multimap import MultiMap
from linfty.coalgebra import Coderivation, Morphism

SYM = "symmetric"


def random_module(rng, max_dim=3, lo=-2, hi=2):
    dim = rng.randint(1, max_dim)
    return GradedModule.from_basis([(f"w{i}", rng.randint(lo, hi)) for i in range(dim)])


def random_vector(rng, target, degree, density=0.7):
    out = {}
    for j, d in enumerate(target.degrees):
        if d == degree and rng.random() < density:
            c = rng.randint(-3, 3)
            if c:
                out[j] = Fraction(c, rng.choice([1, 1, 2]))
    return out


def random_map(rng, source, target, arity, degree, symmetry=SYM, density=0.7):
    entries = {}
    for word in MultiMap.domain_words(source, arity, symmetry):
        v = random_vector(rng, target, sum(source.degrees[i] for i in word) + degree, density)
        if v:
            entries[word] = v
    return MultiMap(source, target, arity, degree, symmetry, entries)


def random_coderivation(rng, W, max_arity, degree=1):
    comps = {n: random_map(rng, W, W, n, degree) for n in range(1, max_arity + 1)}
    return Coderivation(W, comps, max_arity, degree)


def random_morphism(rng, W, V, max_arity):
    comps = {n: random_map(rng, W, V, n, 0) for n in range(1, max_arity + 1)}
    return Morphism(W, V, comps, max_arity)


# -- brute force on S(W) and S(W) (x) S(W) ------------------------------------------

def odd_inversion_sign(order, degrees):
    """Sign of moving graded symbols into ``order``: counts swaps of two odd symbols."""
    sign = 1
    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            if order[a] > order[b] and degrees[order[a]] % 2 and degrees[order[b]] % 2:
                sign = -sign
    return sign


def normalize(word, degrees):
    """Sort a word of basis indices; 0 if an odd index repeats."""
    order = sorted(range(len(word)), key=lambda i: (word[i], i))
    sw = tuple(word[i] for i in order)
    for a, b in zip(sw, sw[1:]):
        if a == b and degrees[a] % 2:
            return 0, sw
    return odd_inversion_sign(tuple(order), [degrees[x] for x in word]), sw


def add(acc, key, c):
    if c:
        x = acc.get(key, 0) + c
        if x:
            acc[key] = x
        else:
            acc.pop(key, None)


def coproduct(elem, degrees):
    """Unreduced coproduct on S(W), summing over every subset of positions."""
    out = {}
    for word, c in elem.items():
        n = len(word)
        pdeg = [degrees[i] for i in word]
        for k in range(n + 1):
            for left in combinations(range(n), k):
                right = tuple(i for i in range(n) if i not in left)
                s = odd_inversion_sign(left + right, pdeg)
                add(out, (tuple(word[i] for i in left), tuple(word[i] for i in right)), s * c)
    return out


def total_degree(word, degrees):
    return sum(degrees[i] for i in word)


def brute_coderivation(Q, word):
    """Q-hat on one sorted word by direct sum over which factors Q_l eats."""
    degrees = Q.module.degrees
    out = {}
    n = len(word)
    for l in range(1, min(n, Q.max_arity) + 1):
        for head in combinations(range(n), l):
            rest = tuple(i for i in range(n) if i not in head)
            s = odd_inversion_sign(head + rest, [degrees[i] for i in word])
            val = Q.comp(l).evaluate(tuple(word[i] for i in head))
            for x, cx in val.items():
                sign, w2 = normalize((x,) + tuple(word[i] for i in rest), degrees)
                add(out, w2, s * sign * cx)
    return out


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [(first,)] + part
        for i in range(len(part)):
            yield part[:i] + [(first,) + part[i]] + part[i + 1:]


def brute_morphism(F, word):
    """F-hat on one sorted word: sum over unordered partitions into blocks."""
    sdeg, tdeg = F.source.degrees, F.target.degrees
    out = {}
    pdeg = [sdeg[i] for i in word]
    for part in set_partitions(tuple(range(len(word)))):
        if any(len(b) > F.max_arity for b in part):
            continue
        order = tuple(i for b in part for i in b)
        s = odd_inversion_sign(order, pdeg)
        terms = {(): Fraction(s)}
        for b in part:
            val = F.comp(len(b)).evaluate(tuple(word[i] for i in b))
            nxt = {}
            for w, c in terms.items():
                for x, cx in val.items():
                    sign, w2 = normalize(w + (x,), tdeg)
                    add(nxt, w2, sign * c * cx)
            terms = nxt
        for w, c in terms.items():
            add(out, w, c)
    return out


def apply_linear_to_tensor(fn, elem, degrees, side, map_degree):
    """(f (x) 1) or (1 (x) f) on S(W) (x) S(W), with the Koszul sign for 1 (x) f."""
    out = {}
    for (a, b), c in elem.items():
        if side == "left":
            for w, cw in fn(a).items():
                add(out, (w, b), c * cw)
        else:
            s = -1 if (map_degree * total_degree(a, degrees)) % 2 else 1
            for w, cw in fn(b).items():
                add(out, (a, w), s * c * cw)
    return out


def all_words(dim, degrees, max_len):
    out = [()]
    for n in range(1, max_len + 1):
        for w in combinations_with_replacement(range(dim), n):
            if all(not (a == b and degrees[a] % 2) for a, b in zip(w, w[1:])):
                out.append(w)
    return out


def rng_for(seed):
    return random.Random(seed)


# -- trees --------------------------------------------------------------------------

def random_bilinear(rng, L, degree):
    return random_map(rng, L, L, 2, degree, symmetry=None)


def sign_lemma_failures(n, seed, L=None):
    """Check the three-term sign identity on every 6-tuple with n leaves.

    The exponent is r + rk + (sum of b_K over psi-ramifications K right of K-hat) * |B''|.
    Returns the list of failing tuples.
    """
    from linfty.trees import all_six_tuples, lemma_terms, node_value
    rng = rng_for(seed)
    if L is None:
        L = GradedModule.from_basis([("a", 0), ("b", 1), ("c", -1)])
    bad = []
    for six in all_six_tuples(n):
        k, phi, psi = six[0], six[1], six[2]
        fam_psi = {p: random_bilinear(rng, L, rng.choice([-1, 0, 1])) for p in psi.ramifications}
        fam_phi = {p: random_bilinear(rng, L, rng.choice([-1, 0, 1])) for p in phi.ramifications}
        lhs, middle, composite, data = lemma_terms(six, fam_psi, fam_phi)
        r, Phi, K = data["r"], data["Phi"], data["K"]
        inner_deg = sum(b.degree for b in fam_phi.values())
        vk = node_value(Phi, K)[1]
        right = sum(fam_psi[p].degree for p in psi.ramifications if node_value(Phi, p)[1] > vk)
        s1 = (-1) ** (r + r * k)
        s2 = s1 * (-1) ** (right * inner_deg)
        if lhs != middle.scale(s1) or lhs != composite.scale(s2):
            bad.append(six)
    return bad


# -- transfer -----------------------------------------------------------------------

def _vsub(a, b):
    out = dict(a)
    for k, v in b.items():
        add(out, k, -v)
    return out


def massey_mu3_oracle(dgl, hd, word):
    """mu_3 on a word of H by expanding the two 3-leaf trees by hand.

    Left tree (e = -1): (1-P)[eta[y1,y2], y3].  Right tree (e = +1):
    (-1)^|y1| (1-P)[y1, eta[y2,y3]], the sign from moving eta[.,.] (degree -1)
    past y1.  Summed over S_3 with the exterior sign and scaled by -1/4.
    """
    from itertools import permutations
    from linfty.graded import chi_sign
    br = lambda u, v: dgl.bracket.apply([u, v])
    eta = lambda u: hd.eta.apply([u])
    keep = lambda u: _vsub(u, hd.P.apply([u]))
    H = hd.H
    xs = [hd.incl_H.apply([{i: Fraction(1)}]) for i in word]
    degs = [H.degrees[i] for i in word]
    total = {}
    for sigma in permutations(range(3)):
        s = chi_sign(sigma, degs)
        y = [xs[i] for i in sigma]
        dy = [degs[i] for i in sigma]
        for k, v in keep(br(eta(br(y[0], y[1])), y[2])).items():
            add(total, k, -s * v)
        sign = -1 if dy[0] % 2 else 1
        for k, v in keep(br(y[0], eta(br(y[1], y[2])))).items():
            add(total, k, s * sign * v)
    return {k: Fraction(-1, 4) * v for k, v in hd.pr_H.apply([total]).items() if v}


def transfer_sound(seed, arity=4):
    from linfty.algebra import check_linfty, check_lmorphism
    from linfty.generators import random_dgl
    from linfty.transfer import transfer
    dgl = random_dgl(seed)
    assert dgl.module.dim <= 6 and all(-2 <= x <= 3 for x in dgl.module.degrees)
    hd, mm, f = transfer(dgl, max_arity=arity)
    return bool(check_linfty(mm, arity)) and bool(check_lmorphism(f, "both", arity)) and mm.is_minimal()


def decomposition_sound(seed, arity=4):
    from linfty.coalgebra import compose_formal, identity_morphism
    from linfty.generators import random_dgl
    from linfty.transfer import decompose
    dec = decompose(random_dgl(seed), max_arity=arity)
    one_p = identity_morphism(dec.phi.source, arity)
    one_l = identity_morphism(dec.phi.target, arity)
    return (compose_formal(dec.phi, dec.phi_inv) == one_l and
            compose_formal(dec.phi_inv, dec.phi) == one_p and
            dec.conjugated() == dec.product)


def diagrams_hold(seed):
    """Both coproduct diagrams on every word up to length 4, by tensor expansion."""
    from linfty.coalgebra import apply_coderivation, apply_morphism
    rng = rng_for(seed)
    W = random_module(rng, 3)
    V = random_module(rng, 3)
    arity = rng.randint(1, 4)
    Q = random_coderivation(rng, W, arity)
    F = random_morphism(rng, W, V, arity)
    deg_w, deg_v = W.degrees, V.degrees
    for word in all_words(W.dim, deg_w, 4):
        elem = {word: Fraction(1)}
        lhs = coproduct(apply_coderivation(Q, elem), deg_w)
        delta = coproduct(elem, deg_w)
        qhat = lambda w: apply_coderivation(Q, {w: Fraction(1)})
        rhs = apply_linear_to_tensor(qhat, delta, deg_w, "left", 1)
        for k, c in apply_linear_to_tensor(qhat, delta, deg_w, "right", 1).items():
            rhs[k] = rhs.get(k, 0) + c
        rhs = {k: c for k, c in rhs.items() if c}
        if lhs != rhs:
            return False
        lhs = coproduct(apply_morphism(F, elem), deg_v)
        rhs = {}
        for (a, b), c in delta.items():
            fa = apply_morphism(F, {a: Fraction(1)})
            fb = apply_morphism(F, {b: Fraction(1)})
            for x, cx in fa.items():
                for y, cy in fb.items():
                    rhs[(x, y)] = rhs.get((x, y), 0) + c * cx * cy
        rhs = {k: c for k, c in rhs.items() if c}
        if lhs != rhs:
            return False
    return True


def obstruction_cases(count=20):
    """(source Q, target Q', F, n) with F an L_{n-1}-prefix of a transfer morphism."""
    from linfty.generators import random_dgl
    from linfty.transfer import transfer
    cases = []
    seed = 0
    while len(cases) < count:
        _, mm, f = transfer(random_dgl(seed), max_arity=4)
        seed += 1
        if mm.module.dim == 0:
            continue
        for n in (2, 3, 4):
            cases.append((mm.shifted, f.target.shifted, f.shifted, n))
    return cases[:count]


def obstruction_is_closed(case):
    from linfty.algebra import delta_hom, obstruction_r
    QH, QL, F, n = case
    r = obstruction_r(F, QH, QL, n)
    return delta_hom(r, QH.comp(1), QL.comp(1)).is_zero() and delta_hom(F.comp(n), QH.comp(1), QL.comp(1)) == r

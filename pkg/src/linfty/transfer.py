"""Homotopy transfer: splittings, the tree-sum minimal model, strictification,
formal inversion, lifting, and the decomposition of a split DGL.

Linear maps between modules are 1-ary :class:`MultiMap` objects.  Formal
maps are handled on the shifted side (``Morphism`` / ``Coderivation`` on
``L[1]``); :mod:`linfty.algebra` translates.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations

from .algebra import (LInftyAlgebra, LInftyMorphism, PreconditionError, delta_hom,
                      obstruction_r)
from .coalgebra import (CheckReport, Coderivation, Morphism, apply_coderivation,
                        apply_morphism, check_equivariance, compose_formal, conjugate,
                        identity_morphism, morphism_first, vectors_product)
from .graded import (EXTERIOR, SYMMETRIC, GradedModule, canonical_words, chi_sign,
                     direct_sum)
from .linalg import nullspace, rref, solve
from .multimap import MultiMap, linear_map, vec_add
from .trees import _Evaluator, enumerate_ot, sign_e

ONE = Fraction(1)


# -- linear helpers ------------------------------------------------------------------

def _mat(lin, rows, cols):
    """Dense block of a 1-ary map: rows = target indices, cols = source indices."""
    out = []
    for r in rows:
        out.append([lin.entries.get((c,), {}).get(r, Fraction(0)) for c in cols])
    return out


def _lin(source, target, degree, cols, symmetry=EXTERIOR):
    return linear_map(source, target, degree, {i: v for i, v in cols.items() if v}, symmetry)


def _apply(lin, vec):
    acc = {}
    for i, c in vec.items():
        vec_add(acc, lin.entries.get((i,), {}), c)
    return acc


def compose_linear(a, b):
    """``a o b`` for 1-ary maps."""
    cols = {i: _apply(a, b.entries.get((i,), {})) for i in range(b.source.dim)}
    return _lin(b.source, a.target, a.degree + b.degree, cols, b.symmetry)


def shifted_linear(lin):
    """The 1-ary map on the shifted modules (the decalage sign is +1 in arity one)."""
    return MultiMap(lin.source.shift(), lin.target.shift(), 1, lin.degree, SYMMETRIC, lin.entries)


def _vecs_to_cols(vectors, dim):
    return [[v.get(i, Fraction(0)) for i in range(dim)] for v in vectors]


def _dense_to_vec(col, idx):
    return {idx[k]: x for k, x in enumerate(col) if x}


# -- splittings ------------------------------------------------------------------------

@dataclass
class Splitting:
    """A degree -1 map ``eta`` with ``d eta d = d``, ``eta^2 = 0``, ``eta d eta = eta``."""

    eta: MultiMap
    pivots: dict = field(default_factory=dict)

    def check(self, d):
        de = compose_linear(d, self.eta)
        ded = compose_linear(de, d)
        ee = compose_linear(self.eta, self.eta)
        ede = compose_linear(self.eta, compose_linear(d, self.eta))
        return {"d eta d = d": ded.entries == d.entries,
                "eta^2 = 0": ee.is_zero(),
                "eta d eta = eta": ede.entries == self.eta.entries}


def _complement(span_vectors, ambient_idx, prefer, pivot):
    """Pick vectors from ``prefer`` (in order) extending ``span_vectors`` to a basis of their sum."""
    vecs = list(span_vectors) + list(prefer)
    if not vecs:
        return []
    dim = len(ambient_idx)
    cols = [[v.get(i, Fraction(0)) for i in ambient_idx] for v in vecs]
    if pivot == "rightmost":
        order = list(range(len(span_vectors))) + list(range(len(vecs) - 1, len(span_vectors) - 1, -1))
    else:
        order = list(range(len(vecs)))
    matrix = [[cols[j][i] for j in order] for i in range(dim)]
    _, piv = rref(matrix)
    chosen = [order[p] for p in piv if order[p] >= len(span_vectors)]
    return sorted(chosen) if pivot != "rightmost" else chosen


def _decompose(module, d, pivot):
    """Per degree: lists of vectors B, H (with labels), C and the map C -> B."""
    pieces = {}
    B_next = {}
    for deg, dim, _ in module.components:
        idx = module.basis_of_degree(deg)
        nxt = module.basis_of_degree(deg + 1)
        B = B_next.get(deg, [])
        if nxt:
            dmat = _mat(d, nxt, idx)
            kernel = nullspace(dmat, len(idx))
        else:
            kernel = [[Fraction(int(i == j)) for i in range(len(idx))] for j in range(len(idx))]
        zvecs = [_dense_to_vec(k, idx) for k in kernel]
        # label each kernel vector by its free coordinate (the last nonzero one in rref order)
        zlabels = []
        for k in kernel:
            free = [i for i, x in enumerate(k) if x == 1 and all(
                kk[i] == 0 for kk in kernel if kk is not k)]
            zlabels.append(module.labels[idx[free[0]]] if free else None)
        hsel = _complement(B, idx, zvecs, pivot)
        H = [(zvecs[j - len(B)], zlabels[j - len(B)]) for j in hsel]
        units = [{i: ONE} for i in idx]
        csel = _complement(zvecs, idx, units, pivot)
        C = [units[j - len(zvecs)] for j in csel]
        pieces[deg] = {"B": B, "H": H, "C": C, "Bsrc": B_next.get(("src", deg), [])}
        if C and nxt:
            B_next[deg + 1] = [_apply(d, c) for c in C]
            B_next[("src", deg + 1)] = C
    return pieces


def build_splitting(dgl, pivot="leftmost"):
    """A splitting of ``(L, d)`` by exact row reduction, degree by degree.

    In each degree, ``L = B + H + C`` with ``B = d(C_prev)``, ``H`` a
    complement of ``B`` in ``ker d`` and ``C`` a complement of ``ker d``
    spanned by standard basis vectors.  ``eta`` sends ``d(c)`` to ``c`` and
    kills ``H`` and ``C``.  ``pivot`` picks leftmost or rightmost pivots.
    """
    module = dgl.module
    pieces = _decompose(module, dgl.d, pivot)
    cols = {}
    for deg, piece in pieces.items():
        idx = module.basis_of_degree(deg)
        basis = piece["B"] + [h for h, _ in piece["H"]] + piece["C"]
        if not basis:
            continue
        M = [[v.get(i, Fraction(0)) for v in basis] for i in idx]
        nb = len(piece["B"])
        images = piece["Bsrc"] + [{}] * (len(basis) - nb)
        for k, i in enumerate(idx):
            coords = solve(M, [Fraction(int(r == k)) for r in range(len(idx))], len(basis))
            acc = {}
            for j in range(nb):
                if coords[j]:
                    vec_add(acc, images[j], coords[j])
            cols[i] = acc
    eta = _lin(module, module, -1, cols)
    piv = {deg: {"H": [lab for _, lab in p["H"]], "C": [module.labels[next(iter(c))] for c in p["C"]]}
           for deg, p in pieces.items()}
    return Splitting(eta, {"rule": pivot, "degrees": piv})


@dataclass
class HodgeData:
    """``L = H + F`` with ``H = ker [d, eta]`` and ``F = im [d, eta]``."""

    dgl: object
    splitting: Splitting
    P: MultiMap
    H: GradedModule
    F: GradedModule
    incl_H: MultiMap
    pr_H: MultiMap
    incl_F: MultiMap
    pr_F: MultiMap
    d_F: MultiMap
    eta_F: MultiMap

    @property
    def eta(self):
        return self.splitting.eta


def hodge_data(dgl, splitting=None):
    splitting = splitting or build_splitting(dgl)
    module = dgl.module
    d, eta = dgl.d, splitting.eta
    P = compose_linear(d, eta) + compose_linear(eta, d)
    Hvec, Hlab, Fvec, Flab = [], [], [], []
    for deg, dim, _ in module.components:
        idx = module.basis_of_degree(deg)
        pmat = _mat(P, idx, idx)
        for k in nullspace(pmat, len(idx)):
            v = _dense_to_vec(k, idx)
            Hvec.append((deg, v))
        img = [_apply(P, {i: ONE}) for i in idx]
        sel = _complement([], idx, img, "leftmost")
        for j in sel:
            Fvec.append((deg, img[j]))
    def labels(vecs, prefix):
        out, used = [], set()
        for deg, v in vecs:
            lead = module.labels[min(v)] if len(v) == 1 and v[min(v)] == 1 else prefix + module.labels[min(v)]
            while lead in used:
                lead += "'"
            used.add(lead)
            out.append(lead)
        return out
    Hlab, Flab = labels(Hvec, "h:"), labels(Fvec, "f:")
    Hm = GradedModule.from_basis([(lab, deg) for lab, (deg, _) in zip(Hlab, Hvec)])
    Fm = GradedModule.from_basis([(lab, deg) for lab, (deg, _) in zip(Flab, Fvec)])
    incl_H = _lin(Hm, module, 0, {Hm.index(lab): v for lab, (_, v) in zip(Hlab, Hvec)})
    incl_F = _lin(Fm, module, 0, {Fm.index(lab): v for lab, (_, v) in zip(Flab, Fvec)})
    # coordinates in the basis H + F
    pr_H_cols, pr_F_cols = {}, {}
    for deg, dim, _ in module.components:
        idx = module.basis_of_degree(deg)
        hs = [Hm.index(l) for l, (dg, _) in zip(Hlab, Hvec) if dg == deg]
        fs = [Fm.index(l) for l, (dg, _) in zip(Flab, Fvec) if dg == deg]
        basis = [incl_H.entries[(h,)] for h in hs] + [incl_F.entries[(f,)] for f in fs]
        M = [[v.get(i, Fraction(0)) for v in basis] for i in idx]
        for k, i in enumerate(idx):
            coords = solve(M, [Fraction(int(r == k)) for r in range(len(idx))], len(basis))
            pr_H_cols[i] = {h: coords[j] for j, h in enumerate(hs) if coords[j]}
            pr_F_cols[i] = {f: coords[len(hs) + j] for j, f in enumerate(fs) if coords[len(hs) + j]}
    pr_H = _lin(module, Hm, 0, pr_H_cols)
    pr_F = _lin(module, Fm, 0, pr_F_cols)
    d_F = compose_linear(pr_F, compose_linear(d, incl_F))
    eta_F = compose_linear(pr_F, compose_linear(eta, incl_F))
    return HodgeData(dgl, splitting, P, Hm, Fm, incl_H, pr_H, incl_F, pr_F, d_F, eta_F)


# -- the tree formulas ---------------------------------------------------------------------

def _bilinear_families(hd):
    br = hd.dgl.bracket
    one_minus_P = identity_like(hd.dgl.module) - hd.P
    root = br.compose_linear(one_minus_P)
    g = br.compose_linear(hd.eta)
    return root, g


def identity_like(module):
    return _lin(module, module, 0, {i: {i: ONE} for i in range(module.dim)})


def _tree_sum(hd, n, use_root, project):
    """``sum_phi e(phi) phi(B) o alpha_n`` on sorted exterior words of H."""
    root, g = _bilinear_families(hd)
    H = hd.H
    trees = []
    for t in enumerate_ot(n):
        fam = {p: g for p in t.ramifications}
        if use_root:
            fam[""] = root
        trees.append((sign_e(t), _Evaluator(t, fam, None)))
    inputs = [hd.incl_H.entries.get((i,), {}) for i in range(H.dim)]
    perms = list(permutations(range(n)))
    entries = {}
    for word in canonical_words(H.dim, H.degrees, n, EXTERIOR):
        wdeg = [H.degrees[i] for i in word]
        acc = {}
        for sigma in perms:
            s = chi_sign(sigma, wdeg)
            keys = tuple(word[i] for i in sigma)
            vecs = [inputs[k] for k in keys]
            degs = [H.degrees[k] for k in keys]
            for e, ev in trees:
                val = ev(vecs, degs, keys)
                if val:
                    vec_add(acc, val, e * s)
        if acc:
            entries[word] = _apply(hd.pr_H, acc) if project else acc
    return entries


def minimal_model(dgl, splitting=None, max_arity=4, hd=None):
    """The L-infinity structure on H given by the tree sums.

    ``mu_1 = 0``, ``mu_2 = (1 - [d,eta])[.,.]`` and for n >= 2
    ``mu_n = -(1/2)^(n-1) sum_phi e(phi) phi((1-[d,eta])[.,.], g, ..., g) o alpha_n``
    with ``g = eta [.,.]``, read in H coordinates.  The overall sign
    ``-(1/2)^(n-1)`` (rather than ``(-1/2)^(n-1)``) is the one compatible
    with the exterior sign ``chi`` and the Koszul rule used by ``phi(B)``;
    the two readings agree for n = 2.
    """
    if max_arity < 2:
        raise ValueError("the arity bound must be at least 2")
    hd = hd or hodge_data(dgl, splitting)
    mu = {}
    for n in range(2, max_arity + 1):
        c = -Fraction(1, 2) ** (n - 1)
        entries = {w: {k: c * x for k, x in v.items()} for w, v in _tree_sum(hd, n, True, True).items()}
        mu[n] = MultiMap(hd.H, hd.H, n, 2 - n, EXTERIOR, entries)
    return LInftyAlgebra(hd.H, mu, max_arity, check=False)


def transfer_morphism(dgl, splitting=None, max_arity=4, hd=None, minimal=None):
    """The L-infinity quasi-isomorphism ``f: H -> L``.

    ``f_1`` is the inclusion and for n >= 2
    ``f_n = (1/2)^(n-1) sum_phi e(phi) phi(g, ..., g) o alpha_n``, so ``f_2 = -g``.
    """
    hd = hd or hodge_data(dgl, splitting)
    minimal = minimal or minimal_model(dgl, max_arity=max_arity, hd=hd)
    f = {1: hd.incl_H}
    for n in range(2, max_arity + 1):
        c = Fraction(1, 2) ** (n - 1)
        entries = {w: {k: c * x for k, x in v.items()} for w, v in _tree_sum(hd, n, False, False).items()}
        f[n] = MultiMap(hd.H, dgl.module, n, 1 - n, EXTERIOR, entries)
    return LInftyMorphism(minimal, dgl.as_linfty(max_arity), f, max_arity)


def transfer(dgl, splitting=None, max_arity=4):
    """``(hodge data, minimal model, transfer morphism)`` for one splitting."""
    hd = hodge_data(dgl, splitting)
    mm = minimal_model(dgl, max_arity=max_arity, hd=hd)
    return hd, mm, transfer_morphism(dgl, max_arity=max_arity, hd=hd, minimal=mm)


# -- formal maps: strictification and inversion -----------------------------------------------

def strict_power(lin, elem_word):
    """``lin^{.n}`` on one sorted word (lin of degree 0), as an S element."""
    return vectors_product([lin.entries.get((i,), {}) for i in elem_word], lin.target.degrees)


def _left_extend(F, first, retraction, arity):
    """Components ``k_1 = first`` and ``k_n = -(sum_{j<n} k_j o F_I) o retraction^{.n}``.

    With ``retraction o F_1 = Id`` this makes ``(K o F)_n = 0`` for n >= 2.
    """
    comps = {1: first}
    tgt = F.target
    for n in range(2, arity + 1):
        K = Morphism(tgt, first.target, dict(comps), n)
        entries = {}
        for word in canonical_words(tgt.dim, tgt.degrees, n, SYMMETRIC):
            pulled = strict_power(retraction, word)
            acc = morphism_first(K, apply_morphism(F, pulled))
            if acc:
                entries[word] = {i: -c for i, c in acc.items()}
        comps[n] = MultiMap(tgt, first.target, n, 0, SYMMETRIC, entries)
    return Morphism(tgt, first.target, comps, arity)


def retraction_of(lin):
    """A degree-0 left inverse of an injective 1-ary map, or raise."""
    src, tgt = lin.source, lin.target
    cols = {}
    for deg, dim, _ in src.components:
        sidx = src.basis_of_degree(deg)
        tidx = tgt.basis_of_degree(deg)
        M = _mat(lin, tidx, sidx)
        # solve X M = I  <=>  M^T X^T = I
        MT = [[M[r][c] for r in range(len(tidx))] for c in range(len(sidx))]
        for k, i in enumerate(sidx):
            pass
        X = []
        for k in range(len(sidx)):
            x = solve(MT, [Fraction(int(r == k)) for r in range(len(sidx))], len(tidx))
            if x is None:
                raise PreconditionError("linear part is not injective")
            X.append(x)
        # X[k] is row k of the retraction: coefficient of target index tidx[c]
        for c, t in enumerate(tidx):
            cols[t] = {sidx[k]: X[k][c] for k in range(len(sidx)) if X[k][c]}
    for t in range(tgt.dim):
        cols.setdefault(t, {})
    return _lin(tgt, src, 0, cols, lin.symmetry)


def strictify(F, retraction=None):
    """An invertible formal map ``K`` with ``K_1 = Id`` and ``K o F`` strict.

    Returns ``(K, K^{-1})``.  ``retraction`` is a left inverse of ``F_1``;
    computed by row reduction when omitted.
    """
    f1 = F.comp(1)
    retraction = retraction or retraction_of(f1)
    ident = MultiMap(F.target, F.target, 1, 0, SYMMETRIC,
                     {(i,): {i: ONE} for i in range(F.target.dim)})
    K = _left_extend(F, ident, retraction, F.max_arity)
    return K, invert_formal(K)


def strictify_explicit(F, pr):
    """``K_n = -F_n o pr^{.n}`` and ``(K^-1)_n = F_n o pr^{.n}`` for n >= 2."""
    tgt = F.target
    ident = MultiMap(tgt, tgt, 1, 0, SYMMETRIC, {(i,): {i: ONE} for i in range(tgt.dim)})
    K, Kinv = {1: ident}, {1: ident}
    for n in range(2, F.max_arity + 1):
        entries = {}
        for word in canonical_words(tgt.dim, tgt.degrees, n, SYMMETRIC):
            acc = {}
            for w2, c in strict_power(pr, word).items():
                vec_add(acc, F.comp(n).entries.get(w2, {}), c)
            if acc:
                entries[word] = acc
        m = MultiMap(tgt, tgt, n, 0, SYMMETRIC, entries)
        K[n], Kinv[n] = m.scale(-1), m
    return Morphism(tgt, tgt, K, F.max_arity), Morphism(tgt, tgt, Kinv, F.max_arity)


def _linear_inverse(lin):
    src, tgt = lin.source, lin.target
    if src.degrees != tgt.degrees:
        raise PreconditionError("linear part is not invertible (dimensions differ)")
    r = retraction_of(lin)
    if not compose_linear(lin, r).entries == {(i,): {i: ONE} for i in range(tgt.dim)}:
        raise PreconditionError("linear part is not invertible")
    return r


def invert_formal(F, retraction=None):
    """A formal inverse of ``F``.

    With ``F_1`` invertible: ``g_1 = F_1^{-1}`` and
    ``g_n = -sum_{k>=2} g_1 o F_k o g_I``, a two-sided inverse.  With a
    ``retraction`` of a split injective ``F_1`` the result is a left inverse
    (``g o F = Id``) built by ``g_n = -(sum_{k<n} g_k o F_I) o retraction^{.n}``.
    """
    if retraction is not None:
        return _left_extend(F, retraction, retraction, F.max_arity)
    g1 = _linear_inverse(F.comp(1))
    high = Morphism(F.source, F.target, {k: m for k, m in F.comps.items() if k >= 2}, F.max_arity)
    comps = {1: g1}
    tgt = F.target
    for n in range(2, F.max_arity + 1):
        G = Morphism(tgt, F.source, dict(comps), n)
        entries = {}
        for word in canonical_words(tgt.dim, tgt.degrees, n, SYMMETRIC):
            val = morphism_first(high, apply_morphism(G, {word: ONE}))
            if val:
                entries[word] = {i: -c for i, c in _apply(g1, val).items()}
        comps[n] = MultiMap(tgt, F.source, n, 0, SYMMETRIC, entries)
    return Morphism(tgt, F.source, comps, F.max_arity)


def is_identity(F):
    ident = identity_morphism(F.source, F.max_arity)
    return F.source == F.target and F == ident


# -- solving delta(x) = r ----------------------------------------------------------------------------

def target_solve(r, eta_t):
    """``x = eta_t o r``; solves ``delta(x) = r`` when ``[Q_1', eta_t]`` is the identity on im r."""
    entries = {w: _apply(eta_t, v) for w, v in r.entries.items()}
    return MultiMap(r.source, r.target, r.arity, r.degree - 1, SYMMETRIC, entries)


def source_solve(r, eta_s, slots):
    """``x = -r o S / b`` where S extends ``eta_s`` as a derivation.

    ``slots`` marks the basis vectors in the image of ``[Q_1, eta_s]``;
    ``b`` counts such slots in a word, and words with ``b = 0`` get 0.
    The basis must be adapted: ``[Q_1, eta_s]`` is the identity on the
    marked vectors and zero on the others.
    """
    source = r.source
    S = Coderivation(source, {1: eta_s}, 1, -1)
    entries = {}
    for word in canonical_words(source.dim, source.degrees, r.arity, SYMMETRIC):
        b = sum(1 for i in word if i in slots)
        if not b:
            continue
        acc = {}
        for w2, c in apply_coderivation(S, {word: ONE}).items():
            vec_add(acc, r.evaluate(w2), c)
        if acc:
            entries[word] = {i: Fraction(-x, b) for i, x in acc.items()}
    return MultiMap(source, r.target, r.arity, r.degree - 1, SYMMETRIC, entries)


def linear_coderivation(lin):
    return Coderivation(lin.source, {1: lin}, 1, lin.degree)


# -- the contractible factor and the decomposition --------------------------------------------------

def contractible_structure(hd, max_arity):
    """``(F, d, 0)`` as a shifted (linear) coderivation."""
    return Coderivation(hd.F.shift(), {1: shifted_linear(hd.d_F)}, max_arity)


def contractible_factor(dgl, hd=None, max_arity=4):
    """``iota: (F, d, 0) -> L`` and ``p: L -> (F, d, 0)`` with ``iota_1`` the inclusion and ``p_1 = pr_F``.

    ``iota_n = -r(iota_<n) o S / n`` solves ``delta(iota_n) = r`` (the source
    is contractible); ``p_n = eta_F o r(p_<n)``, then ``p`` is replaced by
    ``(p o iota)^-1 o p`` so that ``p o iota = Id`` exactly.  Returns shifted
    morphisms ``(iota, p, Q_F, Q_L)``.
    """
    hd = hd or hodge_data(dgl)
    QL = dgl.as_linfty(max_arity).shifted
    QF = contractible_structure(hd, max_arity)
    W_F = hd.F.shift()
    eta_F = shifted_linear(hd.eta_F)
    slots = set(range(W_F.dim))
    iota = {1: shifted_linear(hd.incl_F)}
    for n in range(2, max_arity + 1):
        prefix = Morphism(W_F, QL.module, dict(iota), n)
        r = obstruction_r(prefix, QF, QL, n, check=False)
        if not delta_hom(r, QF.comp(1), QL.comp(1)).is_zero():
            raise AssertionError("obstruction is not closed")
        iota[n] = source_solve(r, eta_F, slots)
    p = {1: shifted_linear(compose_linear(hd.pr_F, hd.P))}
    for n in range(2, max_arity + 1):
        prefix = Morphism(QL.module, W_F, dict(p), n)
        r = obstruction_r(prefix, QL, QF, n, check=False)
        if not delta_hom(r, QL.comp(1), QF.comp(1)).is_zero():
            raise AssertionError("obstruction is not closed")
        p[n] = target_solve(r, eta_F)
    iota = Morphism(W_F, QL.module, iota, max_arity)
    p = Morphism(QL.module, W_F, p, max_arity)
    # p o iota has identity linear part but need not be the identity; precompose its inverse
    p = compose_formal(invert_formal(compose_formal(p, iota)), p)
    return iota, p, QF, QL


@dataclass
class Decomposition:
    hd: HodgeData
    minimal: LInftyAlgebra
    transfer: LInftyMorphism
    product: Coderivation
    phi: Morphism
    phi_inv: Morphism
    target: Coderivation
    left: list
    right: list

    def conjugated(self):
        """``phi^-1 o Q^L o phi``, to be compared with the product structure."""
        return conjugate(self.phi_inv, self.target, self.phi)


def product_structure(QH, QF):
    """The coderivation of ``H x F`` with no mixed components."""
    module, li, ri = direct_sum(QH.module, QF.module, ("", ""))
    arity = min(QH.max_arity, QF.max_arity)
    comps = {}
    for n in range(1, arity + 1):
        entries = {}
        for part, emb in ((QH.comp(n), li), (QF.comp(n), ri)):
            for w, v in part.entries.items():
                entries[tuple(emb[i] for i in w)] = {emb[j]: c for j, c in v.items()}
        comps[n] = MultiMap(module, module, n, 1, SYMMETRIC, entries)
    return Coderivation(module, comps, arity), li, ri


def decompose(dgl, splitting=None, max_arity=4):
    """The L-infinity isomorphism ``H x F -> L`` extending ``f`` on H and ``iota`` on F.

    Words with at least one F slot are filled by the contraction of F,
    ``x = -r o S / b`` with ``b`` the number of F slots; pure H words carry
    the transfer morphism.  Mixed components are generally nonzero.
    """
    hd, mm, f = transfer(dgl, splitting, max_arity)
    QL = f.target.shifted
    QF = contractible_structure(hd, max_arity)
    QP, li, ri = product_structure(mm.shifted, QF)
    module = QP.module
    fs = f.shifted
    lin_cols = {}
    for i, j in enumerate(li):
        lin_cols[(j,)] = fs.comp(1).entries.get((i,), {})
    for i, j in enumerate(ri):
        lin_cols[(j,)] = hd.incl_F.entries.get((i,), {})
    phi = {1: MultiMap(module, QL.module, 1, 0, SYMMETRIC, lin_cols)}
    eta_cols = {}
    for i, j in enumerate(ri):
        v = hd.eta_F.entries.get((i,), {})
        eta_cols[(j,)] = {ri[k]: c for k, c in v.items()}
    eta_P = MultiMap(module, module, 1, -1, SYMMETRIC, eta_cols)
    slots = set(ri)
    back = {j: i for i, j in enumerate(li)}
    for n in range(2, max_arity + 1):
        prefix = Morphism(module, QL.module, dict(phi), n)
        r = obstruction_r(prefix, QP, QL, n, check=False)
        x = source_solve(r, eta_P, slots)
        entries = dict(x.entries)
        for w in canonical_words(module.dim, module.degrees, n, SYMMETRIC):
            if all(i in back for i in w):
                val = fs.comp(n).entries.get(tuple(back[i] for i in w))
                if val:
                    entries[w] = val
                else:
                    entries.pop(w, None)
        phi[n] = MultiMap(module, QL.module, n, 0, SYMMETRIC, entries)
    Phi = Morphism(module, QL.module, phi, max_arity)
    return Decomposition(hd, mm, f, QP, Phi, invert_formal(Phi), QL, li, ri)


# -- lifting ---------------------------------------------------------------------------------------------

def _chain_map_solve(source_Q1, target_Q1, constraints):
    """Degree-0 chain map X: source -> target with ``X Q1 = Q1' X`` and linear constraints.

    ``constraints`` is a list of ``(vector in source, vector in target)``
    pairs demanding ``X(v) = w``.  Returns a 1-ary map or None.
    """
    src, tgt = source_Q1.source, target_Q1.source
    unknowns = [(t, s) for s in range(src.dim) for t in range(tgt.dim)
                if src.degrees[s] == tgt.degrees[t]]
    pos = {u: k for k, u in enumerate(unknowns)}
    rows, rhs = [], []

    def x_of(vec):  # linear form: coefficient of X applied to vec, per target index
        out = {}
        for s, c in vec.items():
            for t in range(tgt.dim):
                if (t, s) in pos:
                    out.setdefault(t, {})
                    out[t][pos[(t, s)]] = out[t].get(pos[(t, s)], 0) + c
        return out

    for v, w in constraints:
        forms = x_of(v)
        for t in range(tgt.dim):
            row = [Fraction(0)] * len(unknowns)
            for k, c in forms.get(t, {}).items():
                row[k] += c
            rows.append(row)
            rhs.append(w.get(t, Fraction(0)))
    for s in range(src.dim):
        # X(Q1 e_s) - Q1'(X e_s) = 0
        lhs = x_of(source_Q1.entries.get((s,), {}))
        for t in range(tgt.dim):
            row = [Fraction(0)] * len(unknowns)
            for k, c in lhs.get(t, {}).items():
                row[k] += c
            for t2 in range(tgt.dim):
                if (t2, s) in pos:
                    c = target_Q1.entries.get((t2,), {}).get(t, 0)
                    if c:
                        row[pos[(t2, s)]] -= c
            rows.append(row)
            rhs.append(Fraction(0))
    if not unknowns:
        ok = all(not any(w.values()) for _, w in constraints)
        return _lin(src, tgt, 0, {}, SYMMETRIC) if ok else None
    x = solve(rows, rhs, len(unknowns))
    if x is None:
        return None
    cols = {}
    for (t, s), k in pos.items():
        if x[k]:
            cols.setdefault(s, {})[t] = x[k]
    return _lin(src, tgt, 0, cols, SYMMETRIC)


def _subcomplex_splitting(Q1, basis_vectors):
    """Contraction data on the subcomplex spanned by ``basis_vectors`` (closed under Q1).

    Returns ``(eta, acyclic)`` with eta a degree -1 map on the ambient
    module supported on the subcomplex.
    """
    from .algebra import DGL

    module = Q1.source
    if not basis_vectors:
        return _lin(module, module, -1, {}, SYMMETRIC), True
    sub = GradedModule.from_basis([(f"k{j}", module.degrees[min(v)]) for j, v in enumerate(basis_vectors)])
    order = sorted(range(len(basis_vectors)), key=lambda j: (module.degrees[min(basis_vectors[j])], j))
    vecs = [basis_vectors[j] for j in order]
    # coordinates of Q1(v) in the subcomplex basis
    dcols = {}
    for k, v in enumerate(vecs):
        img = _apply(Q1, v)
        deg = sub.degrees[k] + 1
        cand = [j for j in range(len(vecs)) if sub.degrees[j] == deg]
        if not img:
            dcols[(k,)] = {}
            continue
        idx = sorted({i for j in cand for i in vecs[j]} | set(img))
        M = [[vecs[j].get(i, Fraction(0)) for j in cand] for i in idx]
        coords = solve(M, [img.get(i, Fraction(0)) for i in idx], len(cand))
        if coords is None:
            raise PreconditionError("subspace is not closed under the differential")
        dcols[(k,)] = {cand[j]: c for j, c in enumerate(coords) if c}
    dsub = MultiMap(sub, sub, 1, 1, EXTERIOR, dcols)
    zero = MultiMap.zero(sub, sub, 2, 0, EXTERIOR)
    sdgl = DGL(sub, dsub, zero, check=False)
    sp = build_splitting(sdgl)
    P = compose_linear(dsub, sp.eta) + compose_linear(sp.eta, dsub)
    acyclic = P.entries == {(i,): {i: ONE} for i in range(sub.dim)}
    # push eta to the ambient module: eta(v_k) = sum c_j v_j, zero off the subcomplex
    all_vecs = vecs + [{i: ONE} for i in range(module.dim)]
    cols = {}
    for i in range(module.dim):
        deg = module.degrees[i]
        cand_sub = [j for j in range(len(vecs)) if sub.degrees[j] == deg]
        # express e_i = sum a_j v_j + (complement part, mapped to 0)
        idx = module.basis_of_degree(deg)
        extra = [{k: ONE} for k in idx]
        sel = _complement([vecs[j] for j in cand_sub], idx, extra, "leftmost")
        basis = [vecs[j] for j in cand_sub] + [extra[j - len(cand_sub)] for j in sel]
        M = [[v.get(k, Fraction(0)) for v in basis] for k in idx]
        coords = solve(M, [Fraction(int(k == i)) for k in idx], len(basis))
        acc = {}
        for j, c in zip(cand_sub, coords):
            if c:
                for k2, c2 in sp.eta.entries.get((j,), {}).items():
                    vec_add(acc, vecs[k2], c * c2)
        cols[i] = acc
    del all_vecs
    return _lin(module, module, -1, cols, SYMMETRIC), acyclic


def _kernel_vectors(lin):
    """Basis of ker(lin) as sparse vectors, degree by degree."""
    src, tgt = lin.source, lin.target
    out = []
    for deg, dim, _ in src.components:
        sidx = src.basis_of_degree(deg)
        tidx = tgt.basis_of_degree(deg + lin.degree)
        if not tidx:
            out.extend({i: ONE} for i in sidx)
            continue
        for k in nullspace(_mat(lin, tidx, sidx), len(sidx)):
            out.append(_dense_to_vec(k, sidx))
    return out


def _image_vectors(lin):
    out = []
    for i in range(lin.source.dim):
        v = lin.entries.get((i,), {})
        if v:
            out.append(v)
    return out


def _precompose_strict(x, lin):
    """``x o lin^{.n}`` for a symmetric n-ary x and a degree-0 linear map."""
    src = lin.source
    entries = {}
    for word in canonical_words(src.dim, src.degrees, x.arity, SYMMETRIC):
        acc = {}
        for w2, c in strict_power(lin, word).items():
            vec_add(acc, x.evaluate(w2), c)
        if acc:
            entries[word] = acc
    return MultiMap(src, x.target, x.arity, x.degree, SYMMETRIC, entries)


def _postcompose(lin, x):
    entries = {w: _apply(lin, v) for w, v in x.entries.items()}
    entries = {w: v for w, v in entries.items() if v}
    return MultiMap(x.source, lin.target, x.arity, x.degree + lin.degree, SYMMETRIC, entries)


@dataclass
class LiftResult:
    g: Morphism
    report: CheckReport
    mode: str
    upper: bool = False
    lower: bool = False

    def __bool__(self):
        return bool(self.report) and self.upper and self.lower


def lift(f, c, e, d, QA, QB, QC, QD):
    """Fill the square ``A -c-> C``, ``A -f-> B``, ``C -e-> D``, ``B -d-> D`` with ``g: B -> C``.

    ``f_1`` must be split injective, ``e_1`` split surjective, and one of
    them a quasi-isomorphism.  Both are first made strict; then, arity by
    arity, ``beta = c_n v^{.n} + u d_n - u e_1 c_n v^{.n}`` is corrected by
    a homotopy on the contractible factor (``ker e_1`` or ``ker v``).  All
    maps are shifted formal maps.  Returns ``g`` with ``g o f = c`` and
    ``e o g = d`` up to the shared arity.
    """
    arity = min(x.max_arity for x in (f, c, e, d, QA, QB, QC, QD))
    # strictify f: K o f strict, new structure on B
    Kf, Kf_inv = strictify(f)
    fs = compose_formal(Kf, f)
    QB2 = conjugate(Kf, QB, Kf_inv)
    d2 = compose_formal(d, Kf_inv)
    # strictify e on its source: e o K_e strict
    Ke, Ke_inv = _strictify_surjective(e)
    es = compose_formal(e, Ke)
    QC2 = conjugate(Ke_inv, QC, Ke)
    c2 = compose_formal(Ke_inv, c)
    f1, e1 = fs.comp(1), es.comp(1)
    # chain splittings u, v
    v = _chain_map_solve(QB2.comp(1), QA.comp(1),
                         [({j: x for j, x in f1.entries.get((i,), {}).items()}, {i: ONE})
                          for i in range(QA.module.dim)])
    u = _section_chain(QD, QC2, e1)
    if v is None or u is None:
        raise PreconditionError("no chain-map splitting of f_1 or e_1 exists")
    kerE = _kernel_vectors(e1)
    etaK, acyc_e = _subcomplex_splitting(QC2.comp(1), kerE)
    kerV = _kernel_vectors(v)
    etaV, acyc_f = _subcomplex_splitting(QB2.comp(1), kerV)
    if acyc_e:
        mode = "e"
    elif acyc_f:
        mode = "f"
    else:
        raise PreconditionError("neither f nor e is a quasi-isomorphism")
    g = {1: _add_lin(_compose_any(c2.comp(1), v),
                     _add_lin(_compose_any(u, d2.comp(1)),
                              _compose_any(u, _compose_any(e1, _compose_any(c2.comp(1), v))), -1))}
    # adapted basis on B for the source homotopy: im f_1 + ker v
    if mode == "f":
        Bm = QB2.module
        adapted = _image_vectors(f1) + kerV
        T, Tinv, slots = _adapted_basis(Bm, adapted, len(_image_vectors(f1)))
        etaV_T = _conj_lin(Tinv, etaV, T)
    for n in range(2, arity + 1):
        beta = _precompose_strict(c2.comp(n), v)
        beta = beta + _postcompose(u, d2.comp(n))
        beta = beta - _postcompose(u, _postcompose(e1, _precompose_strict(c2.comp(n), v)))
        prefix = Morphism(QB2.module, QC2.module, dict(g), n)
        r = obstruction_r(prefix, QB2, QC2, n, check=False)
        zeta = delta_hom(beta, QB2.comp(1), QC2.comp(1)) - r
        if mode == "e":
            h = target_solve(zeta, etaK)
        else:
            zT = _precompose_strict(zeta, T)
            hT = source_solve(zT, etaV_T, slots)
            h = _precompose_strict(hT, Tinv)
        g[n] = beta - h
    G = Morphism(QB2.module, QC2.module, g, arity)
    # undo the strictifications: g_final = Ke o G o Kf
    Gfinal = compose_formal(Ke, compose_formal(G, Kf))
    rep = check_equivariance(Gfinal, QB, QC, arity)
    upper = compose_formal(Gfinal, f.truncate(arity)) == c.truncate(arity)
    lower = compose_formal(e.truncate(arity), Gfinal) == d.truncate(arity)
    return LiftResult(Gfinal, rep, mode, upper, lower)


def _compose_any(a, b):
    cols = {i: _apply(a, b.entries.get((i,), {})) for i in range(b.source.dim)}
    return MultiMap(b.source, a.target, 1, a.degree + b.degree, SYMMETRIC,
                    {(i,): v for i, v in cols.items() if v})


def _add_lin(a, b, coef=1):
    return a + b.scale(coef)


def _adapted_basis(module, vectors, n_first):
    """Change of basis with columns ``vectors``; returns (T, T^-1, slots) as 1-ary maps."""
    if len(vectors) != module.dim:
        raise PreconditionError("vectors do not form a basis")
    order = sorted(range(len(vectors)), key=lambda j: (module.degrees[min(vectors[j])], j))
    new = GradedModule.from_basis([(f"b{j}", module.degrees[min(vectors[j])]) for j in order])
    # new index k corresponds to vectors[order[k]]
    T = MultiMap(new, module, 1, 0, SYMMETRIC, {(k,): vectors[j] for k, j in enumerate(order)})
    Tinv = retraction_of(T)
    slots = {k for k, j in enumerate(order) if j >= n_first}
    return T, Tinv, slots


def _conj_lin(Tinv, x, T):
    return _compose_any(Tinv, _compose_any(x, T)) if x.entries else MultiMap(
        T.source, T.source, 1, x.degree, SYMMETRIC, {})


def _section_chain(QD, QC, e1):
    """A chain map u: D -> C with ``e1 o u = Id``."""
    Dm, Cm = QD.module, QC.module
    # unknown u; constraints e1(u(x)) = x are linear in u: encode through a solve on C
    unknowns = [(t, s) for s in range(Dm.dim) for t in range(Cm.dim) if Dm.degrees[s] == Cm.degrees[t]]
    pos = {u: k for k, u in enumerate(unknowns)}
    rows, rhs = [], []
    for s in range(Dm.dim):
        for t2 in range(Dm.dim):
            row = [Fraction(0)] * len(unknowns)
            for t in range(Cm.dim):
                coef = e1.entries.get((t,), {}).get(t2, 0)
                if coef and (t, s) in pos:
                    row[pos[(t, s)]] += coef
            rows.append(row)
            rhs.append(Fraction(int(s == t2)))
    Q1D, Q1C = QD.comp(1), QC.comp(1)
    for s in range(Dm.dim):
        for t in range(Cm.dim):
            row = [Fraction(0)] * len(unknowns)
            # (u Q1D)(e_s)_t - (Q1C u)(e_s)_t
            for s2, c in Q1D.entries.get((s,), {}).items():
                if (t, s2) in pos:
                    row[pos[(t, s2)]] += c
            for t2 in range(Cm.dim):
                c = Q1C.entries.get((t2,), {}).get(t, 0)
                if c and (t2, s) in pos:
                    row[pos[(t2, s)]] -= c
            rows.append(row)
            rhs.append(Fraction(0))
    if not unknowns:
        return MultiMap(Dm, Cm, 1, 0, SYMMETRIC, {}) if Dm.dim == 0 else None
    x = solve(rows, rhs, len(unknowns))
    if x is None:
        return None
    cols = {}
    for (t, s), k in pos.items():
        if x[k]:
            cols.setdefault((s,), {})[t] = x[k]
    return MultiMap(Dm, Cm, 1, 0, SYMMETRIC, cols)


def _strictify_surjective(e):
    """Invertible ``K`` on the source of ``e`` with ``K_1 = Id`` and ``e o K`` strict.

    With a section ``s`` of ``e_1``: ``K_n = -s o (e o K_<n)_n``.
    """
    src = e.source
    s = _right_inverse(e.comp(1))
    ident = MultiMap(src, src, 1, 0, SYMMETRIC, {(i,): {i: ONE} for i in range(src.dim)})
    comps = {1: ident}
    for n in range(2, e.max_arity + 1):
        K = Morphism(src, src, dict(comps), n)
        entries = {}
        for word in canonical_words(src.dim, src.degrees, n, SYMMETRIC):
            val = morphism_first(e, apply_morphism(K, {word: ONE}))
            if val:
                entries[word] = {i: -c for i, c in _apply(s, val).items()}
        comps[n] = MultiMap(src, src, n, 0, SYMMETRIC, entries)
    K = Morphism(src, src, comps, e.max_arity)
    return K, invert_formal(K)


def _right_inverse(lin):
    """A degree-0 right inverse of a surjective 1-ary map, or raise."""
    src, tgt = lin.source, lin.target
    cols = {}
    for deg, dim, _ in tgt.components:
        sidx = src.basis_of_degree(deg)
        tidx = tgt.basis_of_degree(deg)
        M = _mat(lin, tidx, sidx)
        for k, t in enumerate(tidx):
            x = solve(M, [Fraction(int(r == k)) for r in range(len(tidx))], len(sidx)) if sidx else None
            if x is None:
                raise PreconditionError("linear part is not surjective")
            cols[t] = {sidx[j]: x[j] for j in range(len(sidx)) if x[j]}
    return MultiMap(tgt, src, 1, 0, SYMMETRIC, {(t,): v for t, v in cols.items() if v})

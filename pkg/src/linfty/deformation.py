"""Formal DG manifolds, their deformations, the tangent complex and the
universal and semiuniversal deformations.

Everything lives in a double window: structures up to arity ``A`` and
coderivations of ``S(M)`` with polynomial degree ``<= P``.  A product
``B x M`` is the direct sum of modules with labels tagged ``b:`` / ``m:``.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import DGL, PreconditionError
from .coalgebra import (CheckReport, Coderivation, Morphism, apply_coderivation, apply_morphism,
                        check_square_zero, coderivation_square, compose_coderivations, first_nonzero,
                        morphism_first)
from .graded import EXTERIOR, SYMMETRIC, GradedModule, canonical_words, direct_sum, koszul_sort
from .multimap import MultiMap, vec_add

ONE = Fraction(1)
DEFAULT_ARITY = 4
DEFAULT_POLY = 3
BASE_TAG, FIBER_TAG = "b:", "m:"


@dataclass
class FormalDGManifold:
    """``(M, Q)`` with ``Q`` a degree +1 coderivation of ``S(M)`` squaring to zero up to its arity."""

    space: GradedModule
    Q: Coderivation

    def __post_init__(self):
        if self.Q.module != self.space:
            raise ValueError("Q lives on a different module")
        rep = check_square_zero(self.Q)
        if not rep:
            raise PreconditionError(f"[Q,Q] != 0: {rep.failure}")

    @property
    def is_local(self):
        return not self.Q.q0

    @property
    def max_arity(self):
        return self.Q.max_arity


def zero_manifold(space, max_arity=DEFAULT_ARITY):
    return FormalDGManifold(space, Coderivation(space, {}, max_arity))


# -- products B x M ----------------------------------------------------------------------------

@dataclass
class Product:
    """``B x M`` as a tagged direct sum."""

    base: GradedModule
    fiber: GradedModule
    module: GradedModule = field(init=False)
    b: list = field(init=False)
    m: list = field(init=False)

    def __post_init__(self):
        self.module, self.b, self.m = direct_sum(self.base, self.fiber, (BASE_TAG, FIBER_TAG))
        self.back_b = {j: i for i, j in enumerate(self.b)}
        self.back_m = {j: i for i, j in enumerate(self.m)}

    def split(self, word):
        """``(sign, base word, fiber word)`` with ``word = sign * base . fiber``."""
        bpos = [k for k, i in enumerate(word) if i in self.back_b]
        mpos = [k for k, i in enumerate(word) if i in self.back_m]
        degs = [self.module.degrees[i] for i in word]
        sign, _ = koszul_sort(tuple(bpos + mpos), degs, SYMMETRIC)
        return (sign, tuple(self.back_b[word[k]] for k in bpos),
                tuple(self.back_m[word[k]] for k in mpos))

    def join(self, bword, mword):
        """``(sign, canonical word)`` for the product of a base word and a fiber word."""
        word = tuple(self.b[i] for i in bword) + tuple(self.m[i] for i in mword)
        return koszul_sort(word, self.module.degrees, SYMMETRIC)

    def embed(self, Q, side):
        """A coderivation of one factor as components on the product."""
        emb = self.b if side == "b" else self.m
        comps = {}
        for n, comp in Q.comps.items():
            entries = {}
            for w, v in comp.entries.items():
                sign, canon = koszul_sort(tuple(emb[i] for i in w), self.module.degrees, SYMMETRIC)
                if sign:
                    entries[canon] = {emb[j]: sign * c for j, c in v.items()}
            comps[n] = MultiMap(self.module, self.module, n, Q.degree, SYMMETRIC, entries)
        q0 = {emb[j]: c for j, c in (Q.q0 or {}).items()}
        return Coderivation(self.module, comps, Q.max_arity, Q.degree, q0)


@dataclass
class Deformation:
    """A deformation ``Q`` of ``(M, Q^M)`` over the local base ``(B, Q^B)``.

    ``Q`` is a coderivation on ``B x M`` with every output in ``M``, no
    component on pure fiber words and no constant term; ``Q^M + Q^B + Q``
    squares to zero up to the arity bound.
    """

    base: FormalDGManifold
    fiber: FormalDGManifold
    Q: Coderivation
    product: Product
    window: dict = field(default_factory=dict)

    @property
    def max_arity(self):
        return self.Q.max_arity

    def total(self):
        pr = self.product
        arity = self.max_arity
        return (pr.embed(self.fiber.Q.truncate(arity), "m") + pr.embed(self.base.Q.truncate(arity), "b")
                + self.Q)

    def axiom_failure(self):
        pr = self.product
        if not self.base.is_local:
            return "base is not local"
        if self.Q.q0:
            return "Q has a constant term"
        for n, comp in self.Q.comps.items():
            for w, v in comp.entries.items():
                if all(i in pr.back_m for i in w):
                    return f"Q does not vanish on {{0}} x M (word {w})"
                if any(j in pr.back_b for j in v):
                    return f"image of Q leaves {{0}} x M (word {w})"
        rep = check_square_zero(self.total())
        if not rep:
            return f"total vector field does not square to zero: {rep.failure}"
        return None

    def check(self):
        bad = self.axiom_failure()
        return CheckReport(bad is None, bad)


def make_deformation(base, fiber, entries_fn, max_arity, window=None, check=True):
    """Build ``Q`` from ``entries_fn(bword, mword) -> fiber vector`` on words with a base factor."""
    pr = Product(base.space, fiber.space)
    comps = {}
    mod = pr.module
    for n in range(1, max_arity + 1):
        entries = {}
        for w in canonical_words(mod.dim, mod.degrees, n, SYMMETRIC):
            sign, bw, mw = pr.split(w)
            if not bw or not sign:
                continue
            val = entries_fn(bw, mw)
            if val:
                entries[w] = {pr.m[j]: sign * c for j, c in val.items() if c}
        comps[n] = MultiMap(mod, mod, n, 1, SYMMETRIC, entries)
    d = Deformation(base, fiber, Coderivation(mod, comps, max_arity), pr, window or {})
    if check:
        bad = d.axiom_failure()
        if bad:
            raise PreconditionError(bad)
    return d


def perturbation_value(deformation, bword, mword):
    """``Q(b_1..b_r, m_1..m_s)`` as a fiber vector."""
    pr = deformation.product
    sign, canon = pr.join(bword, mword)
    if not sign or len(canon) > deformation.max_arity:
        return {}
    val = deformation.Q.comp(len(canon)).entries.get(canon, {})
    return {pr.back_m[j]: sign * c for j, c in val.items()}


def trivial_deformation(base, fiber, max_arity=DEFAULT_ARITY):
    return make_deformation(base, fiber, lambda b, m: {}, max_arity)


# -- the tangent complex ------------------------------------------------------------------------

def _closed_window(space, P):
    """Do all symmetric words of length P+1 vanish (so constants may be kept)?"""
    return not canonical_words(space.dim, space.degrees, P + 1, SYMMETRIC)


@dataclass
class TangentComplex:
    """Truncated coderivations of ``S(M)`` with ``[s,t] = s t - (-1)^{st} t s`` and ``d(s) = (-1)^s [s, Q^M]``.

    Basis element ``(k, word, j)`` is the coderivation whose only
    component sends the monomial ``word`` (length k) to ``e_j``; its degree
    is ``|e_j| - |word|``.  Components of polynomial degree above ``P`` are
    dropped; constants (k = 0) are kept only when ``S^{P+1}(M) = 0``, since
    otherwise the truncation is not closed.
    """

    manifold: FormalDGManifold
    P: int
    basis: list
    dgl: DGL
    with_constants: bool

    @property
    def module(self):
        return self.dgl.module

    def to_coderivation(self, vec, degree):
        """The coderivation of a homogeneous vector of the complex."""
        space = self.manifold.space
        comps, q0 = {}, {}
        for i, c in vec.items():
            k, word, j = self.basis[i]
            if k == 0:
                q0[j] = q0.get(j, 0) + c
            else:
                comps.setdefault(k, {}).setdefault(word, {})
                vec_add(comps[k][word], {j: c})
        maps = {k: MultiMap(space, space, k, degree, SYMMETRIC, e) for k, e in comps.items()}
        return Coderivation(space, maps, self.P, degree, q0)

    def from_coderivation(self, Q):
        out = {}
        for i, (k, word, j) in enumerate(self.basis):
            if k == 0:
                c = (Q.q0 or {}).get(j, 0)
            elif k <= Q.max_arity:
                c = Q.comp(k).entries.get(word, {}).get(j, 0)
            else:
                c = 0
            if c:
                out[i] = c
        return out

    def index_arity(self, i):
        return self.basis[i][0]


def _commutator(s, t, P):
    st = compose_coderivations(s, t, P)
    ts = compose_coderivations(t, s, P)
    sign = -1 if (s.degree * t.degree) % 2 else 1
    return st + ts.scale(-sign)


def tangent_complex(M, P=DEFAULT_POLY, check=True):
    space = M.space
    if M.Q.q0:
        raise PreconditionError("the fiber must be local (Q_0 = 0)")
    consts = _closed_window(space, P)
    basis, labels = [], []
    for k in range(0 if consts else 1, P + 1):
        for word in canonical_words(space.dim, space.degrees, k, SYMMETRIC):
            wdeg = sum(space.degrees[i] for i in word)
            for j in range(space.dim):
                name = "d/d" + space.labels[j] + ("[" + ",".join(space.labels[i] for i in word) + "]"
                                                  if word else "")
                basis.append((k, word, j))
                labels.append((name, space.degrees[j] - wdeg))
    module = GradedModule.from_basis(labels)
    ordered = [None] * len(basis)
    for n, (lab, _) in enumerate(labels):
        ordered[module.index(lab)] = basis[n][:3]
    tc = TangentComplex(M, P, ordered, None, consts)
    coders = [tc.to_coderivation({i: ONE}, module.degrees[i]) for i in range(module.dim)]
    QM = Coderivation(space, M.Q.comps, max(P, 1), 1)
    dcols = {}
    for i, s in enumerate(coders):
        sign = -1 if s.degree % 2 else 1
        dcols[(i,)] = tc.from_coderivation(_commutator(s, QM, P).scale(sign))
    d = MultiMap(module, module, 1, 1, EXTERIOR, {w: v for w, v in dcols.items() if v})
    br = {}
    for w in canonical_words(module.dim, module.degrees, 2, EXTERIOR):
        v = tc.from_coderivation(_commutator(coders[w[0]], coders[w[1]], P))
        if v:
            br[w] = v
    tc.dgl = DGL(module, d, MultiMap(module, module, 2, 0, EXTERIOR, br), check=check)
    return tc


# -- the universal deformation -----------------------------------------------------------------

def _base_manifold(dgl, max_arity):
    Q = dgl.as_linfty(max_arity).shifted
    return FormalDGManifold(Q.module, Q)


def _window_ok(A, P, tc):
    if P < A - 1 and not tc.with_constants:
        raise PreconditionError(f"the polynomial bound P={P} must be at least A-1={A - 1}")


def universal_deformation(M, A=DEFAULT_ARITY, P=DEFAULT_POLY, tc=None, check=True):
    """The deformation over ``U = L[1]`` with ``Q(u, m_1..m_k) = (up u)_k(m_1..m_k)``.

    ``L`` is the tangent complex.  ``Q`` is the symmetric map with exactly
    one base input; no ``1/n`` weight is applied (see :func:`literal_weighting`).
    """
    tc = tc or tangent_complex(M, P)
    _window_ok(A, P, tc)
    base = _base_manifold(tc.dgl, A)

    def fn(bword, mword):
        if len(bword) != 1:
            return {}
        k, word, j = tc.basis[bword[0]]
        return {j: ONE} if word == mword else {}

    d = make_deformation(base, M, fn, A, {"A": A, "P": P}, check=check)
    d.tangent = tc
    return d


def literal_weighting(deformation):
    """The same perturbation with ``Q_n`` scaled by ``1/n`` (the plain symmetrization weight)."""
    Q = deformation.Q
    comps = {n: m.scale(Fraction(1, n)) for n, m in Q.comps.items()}
    return Deformation(deformation.base, deformation.fiber, Coderivation(Q.module, comps, Q.max_arity),
                       deformation.product, dict(deformation.window))


# -- the correspondence deformations <-> morphisms into U -----------------------------------------

def correspondence_to_morphism(deformation, tc, A=None):
    """The formal map ``f: B -> U`` with ``(up f_n(b))_k(m) = Q'_{n+k}(b, m)``.

    Components ``f_n`` carry polynomial degrees ``k <= A - n``.
    """
    A = A or deformation.max_arity
    bad = deformation.axiom_failure()
    if bad:
        raise PreconditionError(bad)
    B = deformation.base.space
    U = tc.module.shift()
    comps = {}
    for n in range(1, A + 1):
        entries = {}
        for bword in canonical_words(B.dim, B.degrees, n, SYMMETRIC):
            vec = {}
            for i, (k, word, j) in enumerate(tc.basis):
                if n + k > A:
                    continue
                c = perturbation_value(deformation, bword, word).get(j, 0)
                if c:
                    vec[i] = c
            if vec:
                entries[bword] = vec
        comps[n] = MultiMap(B, U, n, 0, SYMMETRIC, entries)
    return Morphism(B, U, comps, A)


def correspondence_to_deformation(F, base, tc, A=None, check=True):
    """``Q'_{n+k}(b, m) = (up f_n(b))_k(m)``."""
    A = A or F.max_arity
    M = tc.manifold

    def fn(bword, mword):
        n, k = len(bword), len(mword)
        if n > F.max_arity:
            return {}
        out = {}
        for i, c in F.comp(n).entries.get(bword, {}).items():
            kk, word, j = tc.basis[i]
            if kk == k and word == mword:
                out[j] = out.get(j, 0) + c
        return out

    return make_deformation(base, M, fn, A, {"A": A, "P": tc.P}, check=check)


def check_window_morphism(F, QB, tc, A):
    """``F: B -> U`` intertwines ``Q^B`` and ``Q^U`` on components with ``n + k <= A``."""
    QU = tc.dgl.as_linfty(A).shifted
    B = F.source
    checked = 0
    for n in range(1, A + 1):
        for word in canonical_words(B.dim, B.degrees, n, SYMMETRIC):
            unit = {word: ONE}
            lhs = {}
            for w2, c in apply_morphism(F, unit).items():
                if len(w2) <= QU.max_arity:
                    vec_add(lhs, QU.comp(len(w2)).entries.get(w2, {}), c)
            rhs = morphism_first(F, apply_coderivation(QB, unit))
            diff = {i: x for i, x in vec_add(dict(lhs), rhs, -1).items()
                    if n + tc.index_arity(i) <= A}
            checked += 1
            if diff:
                return CheckReport(False, (n, word, diff), checked)
    return CheckReport(True, None, checked)


def unidef_correspondence(deformation=None, morphism=None, base=None, tc=None, A=None):
    """Deformation -> morphism into ``U`` or, given ``morphism`` and ``base``, the reverse."""
    if deformation is not None:
        tc = tc or tangent_complex(deformation.fiber, deformation.window.get("P", DEFAULT_POLY))
        return correspondence_to_morphism(deformation, tc, A)
    if morphism is None or base is None or tc is None:
        raise ValueError("give a deformation, or a morphism with its base and tangent complex")
    return correspondence_to_deformation(morphism, base, tc, A)


def same_perturbation(d1, d2):
    A = min(d1.max_arity, d2.max_arity)
    return all(d1.Q.comp(n).entries == d2.Q.comp(n).entries for n in range(1, A + 1))


# -- base change -----------------------------------------------------------------------------------

def base_change(deformation, F, base, check=True):
    """Pull back along a DG morphism ``F: B -> B'``.

    ``Q_{r+s}(b_1..b_r, m_1..m_s) = sum_t sum_I Q'_{s+t}(F_I(b), m)``.
    """
    if not base.is_local:
        raise PreconditionError("the new base must be local")
    from .coalgebra import check_equivariance

    A = min(deformation.max_arity, F.max_arity)
    rep = check_equivariance(F, base.Q.truncate(A), deformation.base.Q.truncate(A), A)
    if not rep:
        raise PreconditionError(f"F is not a DG morphism: {rep.failure}")

    def fn(bword, mword):
        out = {}
        for w2, c in apply_morphism(F, {bword: ONE}).items():
            vec_add(out, perturbation_value(deformation, w2, mword), c)
        return out

    return make_deformation(base, deformation.fiber, fn, A, dict(deformation.window), check=check)


# -- the semiuniversal deformation ---------------------------------------------------------------

def semiuniversal_deformation(M, A=DEFAULT_ARITY, P=DEFAULT_POLY, tc=None, check=True):
    """The deformation over ``V = H[1]`` with ``Q'(v_1..v_r, m) = (up f_r(v))(m)``.

    ``f: H -> L`` is the transfer morphism of the tangent complex; the base
    carries the minimal model.  Returns ``(deformation, f)`` with ``f``
    shifted.
    """
    from .transfer import transfer

    tc = tc or tangent_complex(M, P)
    _window_ok(A, P, tc)
    hd, mm, f = transfer(tc.dgl, max_arity=A)
    base = FormalDGManifold(mm.shifted.module, mm.shifted)
    F = f.shifted

    def fn(bword, mword):
        r, k = len(bword), len(mword)
        out = {}
        if r > F.max_arity:
            return out
        for i, c in F.comp(r).entries.get(bword, {}).items():
            kk, word, j = tc.basis[i]
            if kk == k and word == mword:
                out[j] = out.get(j, 0) + c
        return out

    d = make_deformation(base, M, fn, A, {"A": A, "P": P}, check=check)
    d.tangent = tc
    d.hodge = hd
    return d, F


# -- triviality and direct summands -------------------------------------------------------------------

@dataclass
class TrivialityReport:
    status: str
    q: Morphism = None
    report: CheckReport = None


def _strict_inclusion(source, target, emb, arity):
    lin = MultiMap(source, target, 1, 0, SYMMETRIC, {(i,): {j: ONE} for i, j in enumerate(emb)})
    return Morphism(source, target, {1: lin}, arity)


def _strict_projection(source, target, back, arity):
    lin = MultiMap(source, target, 1, 0, SYMMETRIC, {(i,): {j: ONE} for i, j in back.items()})
    return Morphism(source, target, {1: lin}, arity)


def _linearly_contractible(Q):
    """Is ``(B, Q_1)`` acyclic?"""
    from .linalg import rank

    W = Q.module
    q1 = Q.comp(1)
    ranks = {}
    for deg, dim, _ in W.components:
        src, tgt = W.basis_of_degree(deg), W.basis_of_degree(deg + 1)
        mat = [[q1.entries.get((c,), {}).get(r, Fraction(0)) for c in src] for r in tgt]
        ranks[deg] = rank(mat) if tgt and src else 0
    for deg, dim, _ in W.components:
        if dim - ranks[deg] - ranks.get(deg - 1, 0) != 0:
            return False
    return True


def is_trivial_candidate(deformation, arity=3):
    """Trivialize a deformation over a linearly contractible base with ``Q_1 = 0``.

    Runs :func:`linfty.transfer.lift` on the square
    ``M -> (B x M, product)``, ``M -> (B x M, Q~)``, both projecting to B.
    The returned ``q`` has ``q_1 = Id`` and intertwines ``Q~`` with the
    product structure.
    """
    from .transfer import lift

    if not deformation.Q.comp(1).is_zero() or not _linearly_contractible(deformation.base.Q):
        return TrivialityReport("not applicable")
    pr = deformation.product
    A = min(arity, deformation.max_arity)
    M, B, X = pr.fiber, pr.base, pr.module
    QM = deformation.fiber.Q.truncate(A)
    QB = deformation.base.Q.truncate(A)
    prod = (pr.embed(QM, "m") + pr.embed(QB, "b")).truncate(A)
    tot = deformation.total().truncate(A)
    f = _strict_inclusion(M, X, pr.m, A)
    c = _strict_inclusion(M, X, pr.m, A)
    e = _strict_projection(X, B, pr.back_b, A)
    d = _strict_projection(X, B, pr.back_b, A)
    res = lift(f, c, e, d, QM, tot, prod, QB)
    return TrivialityReport("trivialized" if res else "failed", res.g, res.report)


def restrict_to_summand(deformation, labels):
    """Base change along the inclusion of a sub-DG-manifold spanned by base basis ``labels``."""
    B = deformation.base.space
    idx = [B.index(lab) for lab in labels]
    sub = GradedModule.from_basis([(B.labels[i], B.degrees[i]) for i in idx])
    emb = [B.index(lab) for lab in sub.labels]
    A = deformation.max_arity
    back = {j: i for i, j in enumerate(emb)}
    comps = {}
    for n, comp in deformation.base.Q.comps.items():
        entries = {}
        for w, v in comp.entries.items():
            if all(i in back for i in w):
                if any(j not in back for j in v):
                    raise PreconditionError("the summand is not a sub-DG-manifold")
                entries[tuple(back[i] for i in w)] = {back[j]: c for j, c in v.items()}
        comps[n] = MultiMap(sub, sub, n, 1, SYMMETRIC, entries)
    sub_base = FormalDGManifold(sub, Coderivation(sub, comps, A))
    inc = _strict_inclusion(sub, B, emb, A)
    return base_change(deformation, inc, sub_base), sub_base, inc, emb


def summand_equivalence(deformation, labels, arity=3):
    """Compare a deformation with the pullback of its restriction along the projection onto a summand.

    With the complementary summand linearly contractible, :func:`lift`
    produces a formal isomorphism ``g`` of ``B x M`` over ``B`` intertwining
    the two total vector fields.  Returns ``(restricted, pulled, lift result)``.
    """
    from .transfer import lift

    restricted, sub_base, inc, emb = restrict_to_summand(deformation, labels)
    B = deformation.base.space
    A = min(arity, deformation.max_arity)
    proj = _strict_projection(B, sub_base.space, {j: i for i, j in enumerate(emb)}, A)
    pulled = base_change(restricted, proj, deformation.base)
    pr, rpr = deformation.product, restricted.product
    tot_emb = [None] * rpr.module.dim
    for i, j in enumerate(rpr.m):
        tot_emb[j] = pr.m[i]
    for i, j in enumerate(rpr.b):
        tot_emb[j] = pr.b[emb[i]]
    f = _strict_inclusion(rpr.module, pr.module, tot_emb, A)
    c = _strict_inclusion(rpr.module, pr.module, tot_emb, A)
    e = _strict_projection(pr.module, B, pr.back_b, A)
    d = _strict_projection(pr.module, B, pr.back_b, A)
    res = lift(f, c, e, d, restricted.total().truncate(A), deformation.total().truncate(A),
               pulled.total().truncate(A), deformation.base.Q.truncate(A))
    return restricted, pulled, res


def first_failure(deformation):
    """First ``(arity, word, value)`` where the total vector field fails to square to zero."""
    return first_nonzero(coderivation_square(deformation.total()))

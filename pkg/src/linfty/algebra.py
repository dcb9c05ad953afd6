"""DGLs, L-infinity algebras and morphisms, and the obstruction calculus.

The internal form of a structure is the shifted one: symmetric degree +1
components ``Q_n`` on ``W = L[1]``.  The exterior maps ``mu_n`` of degree
``2 - n`` (and ``f_n`` of degree ``1 - n``) are a view obtained through the
decalage dictionary.  With ``W`` carrying the same basis as ``L`` one degree
lower, the dictionary is a sign on each sorted basis word ``t``::

    Q_n(t) = (-1)^(n(n-1)/2 + sum_i (n-i)|t_i|_W) mu_n(t)
           = (-1)^(sum_i (n-i)|t_i|_L) mu_n(t)
"""

from fractions import Fraction

from .coalgebra import (CheckReport, Coderivation, Morphism, apply_coderivation,
                        apply_morphism, check_equivariance, check_square_zero,
                        coderivation_first, morphism_first)
from .graded import (EXTERIOR, SYMMETRIC, canonical_words, chi_sign,
                     enumerate_shuffles)
from .multimap import MultiMap, vec_add, vec_scale


class PreconditionError(ValueError):
    """An operation was called on data violating its hypotheses."""


def _word_sign(word, degrees):
    n = len(word)
    e = sum((n - 1 - i) * degrees[t] for i, t in enumerate(word))
    return -1 if e % 2 else 1


def _convert(m, source, target, degree, symmetry):
    sd = m.source.degrees
    entries = {}
    for w, v in m.entries.items():
        s = _word_sign(w, sd if symmetry == SYMMETRIC else source.degrees)
        entries[w] = v if s == 1 else vec_scale(v, -1)
    return MultiMap(source, target, m.arity, degree, symmetry, entries)


def shift_maps(maps, source, target):
    """Exterior maps on L (degree ``d_n``) to symmetric maps on ``L[1]``.

    ``maps`` is ``{n: MultiMap}``; the n-ary result has degree ``d_n + n - 1``.
    """
    ws, wt = source.shift(), target.shift()
    out = {}
    for n, m in maps.items():
        if m.symmetry != EXTERIOR:
            raise ValueError(f"component {n} must be exterior")
        if m.arity != n:
            raise ValueError(f"component {n} has arity {m.arity}")
        out[n] = _convert(MultiMap(source, target, n, m.degree, EXTERIOR, m.entries),
                          ws, wt, m.degree + n - 1, SYMMETRIC)
    return out


def unshift_maps(comps, source, target):
    """Inverse of :func:`shift_maps`."""
    out = {}
    for n, m in comps.items():
        out[n] = _convert(m, source, target, m.degree - n + 1, EXTERIOR)
    return out


def shift_structure(mu, module, max_arity):
    """The coderivation on ``S(L[1])`` defined by ``mu = {n: mu_n}``."""
    for n, m in mu.items():
        if m.degree != 2 - n:
            raise ValueError(f"mu_{n} must have degree {2 - n}, got {m.degree}")
    comps = shift_maps({n: m for n, m in mu.items() if n <= max_arity}, module, module)
    return Coderivation(module.shift(), comps, max_arity)


def unshift_structure(Q, module):
    return unshift_maps(Q.comps, module, module)


def shift_morphism(f, source, target, max_arity):
    for n, m in f.items():
        if m.degree != 1 - n:
            raise ValueError(f"f_{n} must have degree {1 - n}, got {m.degree}")
    comps = shift_maps({n: m for n, m in f.items() if n <= max_arity}, source, target)
    return Morphism(source.shift(), target.shift(), comps, max_arity)


def unshift_morphism(F, source, target):
    return unshift_maps(F.comps, source, target)


# -- DGLs ----------------------------------------------------------------------------

def _bracket_vec(bracket, x, y):
    return bracket.apply([x, y])


def _unit(i):
    return {i: Fraction(1)}


class DGL:
    """A differential graded Lie algebra ``(L, d, [.,.])``; axioms are checked on construction."""

    def __init__(self, module, d, bracket, check=True):
        if d.arity != 1 or d.degree != 1:
            raise ValueError("d must be a 1-ary map of degree +1")
        if bracket.arity != 2 or bracket.degree != 0 or bracket.symmetry != EXTERIOR:
            raise ValueError("the bracket must be an exterior 2-ary map of degree 0")
        self.module = module
        self.d = MultiMap(module, module, 1, 1, EXTERIOR, d.entries)
        self.bracket = bracket
        if check:
            bad = self.axiom_failure()
            if bad:
                raise ValueError(f"not a DGL: {bad}")

    def dvec(self, x):
        return self.d.apply([x])

    def axiom_failure(self):
        """First violated axiom as a string, or None."""
        deg = self.module.degrees
        dim = self.module.dim
        for name, m in (("d", self.d), ("bracket", self.bracket)):
            if m.check_degree():
                return f"{name} is not homogeneous"
        for i in range(dim):
            if self.dvec(self.dvec(_unit(i))):
                return f"d^2 != 0 on {self.module.labels[i]}"
        for a in range(dim):
            for b in range(dim):
                lhs = self.dvec(self.bracket(a, b))
                rhs = _bracket_vec(self.bracket, self.dvec(_unit(a)), _unit(b))
                s = -1 if deg[a] % 2 else 1
                vec_add(rhs, _bracket_vec(self.bracket, _unit(a), self.dvec(_unit(b))), s)
                if vec_add(dict(lhs), rhs, -1):
                    return f"Leibniz fails on ({self.module.labels[a]}, {self.module.labels[b]})"
        for a in range(dim):
            for b in range(dim):
                for c in range(dim):
                    lhs = _bracket_vec(self.bracket, _unit(a), self.bracket(b, c))
                    rhs = _bracket_vec(self.bracket, self.bracket(a, b), _unit(c))
                    s = -1 if (deg[a] * deg[b]) % 2 else 1
                    vec_add(rhs, _bracket_vec(self.bracket, _unit(b), self.bracket(a, c)), s)
                    if vec_add(dict(lhs), rhs, -1):
                        labels = self.module.labels
                        return f"Jacobi fails on ({labels[a]}, {labels[b]}, {labels[c]})"
        return None

    def mu(self):
        return {1: self.d, 2: self.bracket}

    def as_linfty(self, max_arity=4):
        return LInftyAlgebra(self.module, self.mu(), max_arity, check=False)

    def __repr__(self):
        return f"DGL({self.module!r})"


# -- L-infinity algebras and morphisms ------------------------------------------------------

class LInftyAlgebra:
    """``(L, mu_1, ..., mu_A)`` with the shifted codifferential kept alongside."""

    def __init__(self, module, mu, max_arity, check=True):
        self.module = module
        self.max_arity = max_arity
        self.mu = {n: m for n, m in mu.items() if 1 <= n <= max_arity and not m.is_zero()}
        for n, m in self.mu.items():
            if m.degree != 2 - n or m.symmetry != EXTERIOR:
                raise ValueError(f"mu_{n} must be exterior of degree {2 - n}")
        self.shifted = shift_structure(self.mu, module, max_arity)
        if check:
            rep = check_linfty(self)
            if not rep:
                raise ValueError(f"not an L-infinity algebra: first failure {rep.failure}")

    @classmethod
    def from_shifted(cls, module, Q, check=False):
        return cls(module, unshift_structure(Q, module), Q.max_arity, check)

    def comp(self, n):
        m = self.mu.get(n)
        if m is None:
            m = MultiMap.zero(self.module, self.module, n, 2 - n, EXTERIOR)
        return m

    def is_minimal(self):
        return self.comp(1).is_zero()

    def is_dgl(self):
        return all(n <= 2 for n in self.mu)

    def __repr__(self):
        return f"LInftyAlgebra(dim={self.module.dim}, arity<={self.max_arity}, nonzero={sorted(self.mu)})"


class LInftyMorphism:
    """``f_1, ..., f_A`` with ``f_n`` exterior of degree ``1 - n``."""

    def __init__(self, source, target, f, max_arity):
        self.source = source
        self.target = target
        self.max_arity = max_arity
        self.f = {n: m for n, m in f.items() if 1 <= n <= max_arity}
        for n, m in self.f.items():
            if m.degree != 1 - n or m.symmetry != EXTERIOR:
                raise ValueError(f"f_{n} must be exterior of degree {1 - n}")
        self.shifted = shift_morphism(self.f, source.module, target.module, max_arity)

    @classmethod
    def from_shifted(cls, source, target, F):
        return cls(source, target, unshift_morphism(F, source.module, target.module), F.max_arity)

    def comp(self, n):
        m = self.f.get(n)
        if m is None:
            m = MultiMap.zero(self.source.module, self.target.module, n, 1 - n, EXTERIOR)
        return m

    def __repr__(self):
        return (f"LInftyMorphism(dim {self.source.module.dim} -> {self.target.module.dim}, "
                f"arity<={self.max_arity})")


def _sub(word, idx):
    return tuple(word[i] for i in idx)


def check_linfty(alg, arity=None):
    """Generalized Jacobi identities on every sorted word of length ``n <= arity``.

    ``sum_{k+l=n+1} sum_{sigma in Sh(k,n)} (-1)^(k(l-1)) chi(sigma)
    mu_l(mu_k(a_sigma(1..k)), a_sigma(k+1..n)) = 0``.
    """
    module = alg.module
    deg = module.degrees
    arity = arity or alg.max_arity
    checked = 0
    for n in range(1, arity + 1):
        for word in canonical_words(module.dim, deg, n, EXTERIOR):
            wdeg = [deg[i] for i in word]
            acc = {}
            for k in range(1, n + 1):
                l = n + 1 - k
                inner, outer = alg.mu.get(k), alg.mu.get(l)
                if inner is None or outer is None:
                    continue
                base = -1 if (k * (l - 1)) % 2 else 1
                for sigma in enumerate_shuffles(k, n):
                    val = inner.evaluate(_sub(word, sigma[:k]))
                    if not val:
                        continue
                    sign = base * chi_sign(sigma, wdeg)
                    rest = _sub(word, sigma[k:])
                    for x, cx in val.items():
                        vec_add(acc, outer.evaluate((x,) + rest), sign * cx)
            checked += 1
            if acc:
                return CheckReport(False, (n, word, acc), checked)
    return CheckReport(True, None, checked)


def check_linfty_shifted(alg, arity=None):
    """The same condition as ``Q o Q = 0`` on the shifted side."""
    Q = alg.shifted if arity is None else alg.shifted.truncate(arity)
    return check_square_zero(Q)


def check_lmorphism(f, path="both", arity=None):
    """Is ``f`` an L-infinity morphism up to ``arity``?

    ``path="coalgebra"`` checks that the shifted maps intertwine the
    codifferentials; ``path="dgl"`` uses the explicit condition for a DGL
    target; ``"both"`` runs both and reports a disagreement as a failure.
    """
    arity = arity or f.max_arity
    if path == "coalgebra":
        return check_equivariance(f.shifted, f.source.shifted, f.target.shifted, arity)
    if path == "dgl":
        return _check_dgl_target(f, arity)
    a = check_equivariance(f.shifted, f.source.shifted, f.target.shifted, arity)
    if not f.target.is_dgl():
        return a
    b = _check_dgl_target(f, arity)
    if a.ok != b.ok:
        return CheckReport(False, a.failure or b.failure, a.checked,
                           {"disagreement": True, "coalgebra": a.ok, "dgl": b.ok})
    return a if not a.ok else b


def _check_dgl_target(f, arity):
    """``d f_n - sum_{i+j=n} sum' chi (-1)^(i + (j-1)(a_s1+..+a_si)) [f_i, f_j]
    = sum_{k+l=n+1} sum_{Sh(k,n)} (-1)^(k(l-1)) chi f_l(mu_k(..), ..)``,
    the middle sum over shuffles with ``sigma(1) < sigma(i+1)``."""
    tgt = f.target
    if not tgt.is_dgl():
        raise PreconditionError("the explicit condition needs a DGL target")
    d, br = tgt.comp(1), tgt.comp(2)
    src = f.source
    deg = src.module.degrees
    checked = 0
    for n in range(1, arity + 1):
        for word in canonical_words(src.module.dim, deg, n, EXTERIOR):
            wdeg = [deg[i] for i in word]
            lhs = {}
            val = f.comp(n).evaluate(word)
            if val:
                vec_add(lhs, d.apply([val]))
            for i in range(1, n):
                j = n - i
                fi, fj = f.f.get(i), f.f.get(j)
                if fi is None or fj is None:
                    continue
                for sigma in enumerate_shuffles(i, n):
                    if sigma[0] > sigma[i]:
                        continue
                    x = fi.evaluate(_sub(word, sigma[:i]))
                    if not x:
                        continue
                    y = fj.evaluate(_sub(word, sigma[i:]))
                    if not y:
                        continue
                    e = i + (j - 1) * sum(wdeg[s] for s in sigma[:i])
                    sign = chi_sign(sigma, wdeg) * (-1 if e % 2 else 1)
                    vec_add(lhs, br.apply([x, y]), -sign)
            rhs = {}
            for k in range(1, n + 1):
                l = n + 1 - k
                mk, fl = src.mu.get(k), f.f.get(l)
                if mk is None or fl is None:
                    continue
                base = -1 if (k * (l - 1)) % 2 else 1
                for sigma in enumerate_shuffles(k, n):
                    val = mk.evaluate(_sub(word, sigma[:k]))
                    if not val:
                        continue
                    sign = base * chi_sign(sigma, wdeg)
                    rest = _sub(word, sigma[k:])
                    for x, cx in val.items():
                        vec_add(rhs, fl.evaluate((x,) + rest), sign * cx)
            checked += 1
            diff = vec_add(lhs, rhs, -1)
            if diff:
                return CheckReport(False, (n, word, diff), checked)
    return CheckReport(True, None, checked)


# -- the obstruction calculus -------------------------------------------------------------------

def derivation_extension(Q1, module, word):
    """``Q_1^{(n)}`` applied to a sorted word, as an S(W) element of the same length."""
    return apply_coderivation(Coderivation(module, {1: Q1}, 1, Q1.degree), {word: Fraction(1)})


def delta_hom(g, Q1, Q1t):
    """``delta(g) = Q1t o g - (-1)^|g| g o Q1^{(n)}`` for a symmetric n-ary ``g: W^.n -> W'``."""
    source = g.source
    n = g.arity
    sgn = -1 if g.degree % 2 else 1
    entries = {}
    for word in canonical_words(source.dim, source.degrees, n, SYMMETRIC):
        acc = {}
        val = g.entries.get(word)
        if val:
            vec_add(acc, Q1t.apply([val]))
        for w2, c in derivation_extension(Q1, source, word).items():
            vec_add(acc, g.evaluate(w2), -sgn * c)
        if acc:
            entries[word] = acc
    return MultiMap(source, g.target, n, g.degree + 1, SYMMETRIC, entries)


def is_prefix_morphism(F, Q, Qt, m):
    """Is ``F`` an L_m-homomorphism (intertwines up to arity m)?"""
    return check_equivariance(F.truncate(m), Q.truncate(m), Qt.truncate(m), m)


def obstruction_r(F, Q, Qt, n, check=True):
    """``r(f_1..f_{n-1}) = sum_{k>=2} f_l o Q_k^{(n)} - sum_{k>=2} Q'_k o f_I``.

    ``F`` holds at least the components ``1..n-1`` (higher ones are
    ignored).  Everything is on the shifted side; the result is a symmetric
    n-ary map of degree +1, and ``F`` extends to an L_n-homomorphism by
    ``f_n`` exactly when ``delta(f_n) = r``.
    """
    if n < 2:
        raise ValueError("the obstruction starts at arity 2")
    prefix = Morphism(F.source, F.target, {k: F.comp(k) for k in range(1, n)}, n)
    if check:
        rep = is_prefix_morphism(prefix, Q, Qt, n - 1)
        if not rep:
            raise PreconditionError(f"prefix is not an L_{n - 1}-homomorphism: {rep.failure}")
    higher = [k for k in range(2, n + 1)]
    Qt_high = Coderivation(Qt.module, {k: Qt.comp(k) for k in higher if k <= Qt.max_arity},
                           max(n, 1), Qt.degree)
    source = F.source
    entries = {}
    for word in canonical_words(source.dim, source.degrees, n, SYMMETRIC):
        unit = {word: Fraction(1)}
        acc = morphism_first(prefix, apply_coderivation(Q, unit, comps=higher))
        vec_add(acc, coderivation_first(Qt_high, apply_morphism(prefix, unit)), -1)
        if acc:
            entries[word] = acc
    return MultiMap(source, F.target, n, 1, SYMMETRIC, entries)

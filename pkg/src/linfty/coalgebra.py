"""The free graded symmetric coalgebra S(W).

Coderivations and coalgebra morphisms are stored through their
corestriction components (symmetric maps ``W^{.n} -> W``).  Elements of
S(W) are ``dict[word, Fraction]`` over sorted basis words; the empty word
is the unit.  Everything is truncated at a maximal arity.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations

from .graded import (SYMMETRIC, canonical_words, compositions, koszul_sort,
                     multi_factorial, set_partitions)
from .multimap import MultiMap, vec_add
from math import factorial

DEFAULT_ARITY = 4


class Coderivation:
    """Components ``Q_1..Q_A`` (and optionally ``Q_0``) of a coderivation of S(W)."""

    def __init__(self, module, comps, max_arity, degree=1, q0=None):
        self.module = module
        self.max_arity = max_arity
        self.degree = degree
        self.comps = {}
        for n, m in comps.items():
            if n < 1 or n > max_arity:
                continue
            if m.symmetry != SYMMETRIC or m.arity != n or m.degree != degree:
                raise ValueError(f"component {n} must be a symmetric {n}-ary map of degree {degree}")
            self.comps[n] = m
        self.q0 = {k: Fraction(v) for k, v in (q0 or {}).items() if v} or None

    def comp(self, n):
        m = self.comps.get(n)
        if m is None:
            m = MultiMap.zero(self.module, self.module, n, self.degree, SYMMETRIC)
        return m

    def truncate(self, arity):
        return Coderivation(self.module, {n: m for n, m in self.comps.items() if n <= arity},
                            min(arity, self.max_arity), self.degree, self.q0)

    def __add__(self, other):
        arity = min(self.max_arity, other.max_arity)
        comps = {n: self.comp(n) + other.comp(n) for n in range(1, arity + 1)}
        q0 = dict(self.q0 or {})
        vec_add(q0, other.q0 or {})
        return Coderivation(self.module, comps, arity, self.degree, q0)

    def scale(self, c):
        q0 = {k: c * v for k, v in (self.q0 or {}).items()}
        return Coderivation(self.module, {n: m.scale(c) for n, m in self.comps.items()},
                            self.max_arity, self.degree, q0)

    def is_zero(self):
        return not self.q0 and all(m.is_zero() for m in self.comps.values())

    def __eq__(self, other):
        if not isinstance(other, Coderivation):
            return NotImplemented
        arity = min(self.max_arity, other.max_arity)
        return ((self.q0 or {}) == (other.q0 or {}) and
                all(self.comp(n).entries == other.comp(n).entries for n in range(1, arity + 1)))

    def __repr__(self):
        return f"Coderivation(dim={self.module.dim}, arity<={self.max_arity}, degree={self.degree})"


class Morphism:
    """Components ``F_1..F_A`` of a coalgebra morphism ``S(W) -> S(W')`` (degree 0)."""

    def __init__(self, source, target, comps, max_arity):
        self.source = source
        self.target = target
        self.max_arity = max_arity
        self.comps = {}
        for n, m in comps.items():
            if n < 1 or n > max_arity:
                continue
            if m.symmetry != SYMMETRIC or m.arity != n or m.degree != 0:
                raise ValueError(f"component {n} must be a symmetric {n}-ary map of degree 0")
            self.comps[n] = m
        self._cache = {}

    def comp(self, n):
        m = self.comps.get(n)
        if m is None:
            m = MultiMap.zero(self.source, self.target, n, 0, SYMMETRIC)
        return m

    def is_strict(self):
        return all(m.is_zero() for n, m in self.comps.items() if n >= 2)

    def truncate(self, arity):
        return Morphism(self.source, self.target,
                        {n: m for n, m in self.comps.items() if n <= arity},
                        min(arity, self.max_arity))

    def __eq__(self, other):
        if not isinstance(other, Morphism):
            return NotImplemented
        arity = min(self.max_arity, other.max_arity)
        return all(self.comp(n).entries == other.comp(n).entries for n in range(1, arity + 1))

    def __repr__(self):
        return (f"Morphism(dim {self.source.dim} -> {self.target.dim}, "
                f"arity<={self.max_arity}, strict={self.is_strict()})")


def identity_morphism(module, max_arity=DEFAULT_ARITY):
    one = MultiMap(module, module, 1, 0, SYMMETRIC,
                   {(i,): {i: Fraction(1)} for i in range(module.dim)})
    return Morphism(module, module, {1: one}, max_arity)


def strict_morphism(linear, max_arity=DEFAULT_ARITY):
    return Morphism(linear.source, linear.target, {1: linear}, max_arity)


@dataclass
class CheckReport:
    """Outcome of an identity check; ``failure`` is (arity, word, residual) or None."""

    ok: bool
    failure: tuple = None
    checked: int = 0
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


# -- S(W) element calculus ------------------------------------------------------

def _pos_degrees(word, degrees):
    return [degrees[i] for i in word]


def _split_sign(order, pdeg):
    return koszul_sort(order, pdeg, SYMMETRIC)[0]


def selem_add(acc, word, coef, degrees):
    """Add ``coef * (product of word)`` to an S(W) element, canonicalizing."""
    if not coef:
        return
    sign, canon = koszul_sort(word, degrees, SYMMETRIC)
    if not sign:
        return
    x = acc.get(canon, 0) + sign * coef
    if x:
        acc[canon] = x
    else:
        acc.pop(canon, None)


def vectors_product(vectors, degrees):
    """Symmetric product of vectors, as an S(W) element."""
    acc = {(): Fraction(1)}
    for vec in vectors:
        nxt = {}
        for word, c in acc.items():
            for j, cj in vec.items():
                selem_add(nxt, word + (j,), c * cj, degrees)
        acc = nxt
        if not acc:
            break
    return acc


def apply_coderivation(Q, elem, comps=None):
    """Image of an S(W) element under the coderivation ``Q``.

    Uses the shuffle expansion: the component ``Q_l`` hits ``l`` factors
    (moved to the front with their Koszul sign), the rest pass through.
    ``comps`` restricts to a subset of arities.
    """
    degrees = Q.module.degrees
    out = {}
    arities = sorted(Q.comps) if comps is None else [n for n in comps if n in Q.comps]
    for word, c in elem.items():
        n = len(word)
        pdeg = _pos_degrees(word, degrees)
        for l in arities:
            if l > n:
                continue
            entries = Q.comps[l].entries
            if not entries:
                continue
            for head in combinations(range(n), l):
                val = entries.get(tuple(word[i] for i in head))
                if not val:
                    continue
                rest = tuple(i for i in range(n) if i not in head)
                sign = _split_sign(head + rest, pdeg)
                tail = tuple(word[i] for i in rest)
                for x, cx in val.items():
                    selem_add(out, (x,) + tail, sign * c * cx, degrees)
        if Q.q0 and (comps is None or 0 in comps):
            for x, cx in Q.q0.items():
                selem_add(out, (x,) + word, c * cx, degrees)
    return out


def coderivation_first(Q, elem):
    """Projection of ``Q(elem)`` onto W."""
    out = {}
    for word, c in elem.items():
        n = len(word)
        if n == 0:
            if Q.q0:
                vec_add(out, Q.q0, c)
            continue
        m = Q.comps.get(n)
        if m is not None:
            val = m.entries.get(word)
            if val:
                vec_add(out, val, c)
    return out


def _morphism_values(F, word):
    """Cache of ``F_k`` on sub-words of a sorted word."""
    cache = F._cache
    val = cache.get(word)
    if val is None:
        m = F.comps.get(len(word))
        val = m.entries.get(word, {}) if m is not None else {}
        cache[word] = val
    return val


def apply_morphism(F, elem, max_out=None):
    """Image of an S(W) element under the coalgebra morphism with components ``F``.

    Sums over set partitions of the factors; each block of size ``k`` is
    fed to ``F_k``.  ``max_out`` drops output words longer than that.
    """
    sdeg = F.source.degrees
    tdeg = F.target.degrees
    out = {}
    for word, c in elem.items():
        n = len(word)
        pdeg = _pos_degrees(word, sdeg)
        for part in set_partitions(n):
            if max_out is not None and len(part) > max_out:
                continue
            if any(len(b) > F.max_arity for b in part):
                continue
            vals = []
            for b in part:
                v = _morphism_values(F, tuple(word[i] for i in b))
                if not v:
                    break
                vals.append(v)
            else:
                order = tuple(i for b in part for i in b)
                sign = _split_sign(order, pdeg)
                for w2, c2 in vectors_product(vals, tdeg).items():
                    x = out.get(w2, 0) + sign * c * c2
                    if x:
                        out[w2] = x
                    else:
                        out.pop(w2, None)
    return out


def morphism_first(F, elem):
    """Projection of ``F(elem)`` onto W'."""
    out = {}
    for word, c in elem.items():
        if not word:
            continue
        val = _morphism_values(F, word) if len(word) <= F.max_arity else {}
        if val:
            vec_add(out, val, c)
    return out


def by_length(elem):
    out = {}
    for w, c in elem.items():
        out.setdefault(len(w), {})[w] = c
    return out


# -- block expansions F_{n,k} and Q_{n,l} from the components ---------------

def _check_arity(n, bound):
    if n < 1 or n > bound:
        raise ValueError(f"arity {n} outside 1..{bound}")


def expand_morphism(F, n, words=None):
    """All blocks ``F_{n,k}`` of a coalgebra morphism on ``W^{.n}``.

    Evaluates ``sum_k sum_{|I|=n} 1/(I! k!) (F_{i_1} . ... . F_{i_k}) o alpha_n``
    literally, summing over all of ``Sigma_n``.  Returns
    ``{word: S(W') element}`` for the canonical words of length n.
    """
    _check_arity(n, F.max_arity)
    sdeg, tdeg = F.source.degrees, F.target.degrees
    if words is None:
        words = canonical_words(F.source.dim, sdeg, n, SYMMETRIC)
    perms = list(permutations(range(n)))
    out = {}
    for word in words:
        pdeg = _pos_degrees(word, sdeg)
        acc = {}
        for k in range(1, n + 1):
            for parts in compositions(n, k):
                weight = Fraction(1, multi_factorial(parts) * factorial(k))
                for sigma in perms:
                    sign = _split_sign(sigma, pdeg)
                    permuted = [word[i] for i in sigma]
                    vals, pos = [], 0
                    for p in parts:
                        vals.append(F.comp(p).evaluate(permuted[pos:pos + p]))
                        pos += p
                    if not all(vals):
                        continue
                    for w2, c2 in vectors_product(vals, tdeg).items():
                        x = acc.get(w2, 0) + weight * sign * c2
                        if x:
                            acc[w2] = x
                        else:
                            acc.pop(w2, None)
        out[word] = acc
    return out


def expand_coderivation(Q, n, words=None):
    """``Q^_n`` on canonical words of length n: ``{word: S(W) element}``."""
    _check_arity(n, Q.max_arity)
    if words is None:
        words = canonical_words(Q.module.dim, Q.module.degrees, n, SYMMETRIC)
    return {w: apply_coderivation(Q, {w: Fraction(1)}) for w in words}


# -- composition and squares ------------------------------------------------------

def compose_formal(F, G):
    """Composite ``F o G`` of formal maps (G: L -> M, F: M -> N).

    ``(F o G)_p = sum_k sum_{|I|=p} F_k o G_I``, truncated at the smaller arity.
    """
    if G.target != F.source:
        raise ValueError("cannot compose: target of G is not the source of F")
    arity = min(F.max_arity, G.max_arity)
    comps = {}
    for p in range(1, arity + 1):
        entries = {}
        for word in canonical_words(G.source.dim, G.source.degrees, p, SYMMETRIC):
            val = morphism_first(F, apply_morphism(G, {word: Fraction(1)}))
            if val:
                entries[word] = val
        comps[p] = MultiMap(G.source, F.target, p, 0, SYMMETRIC, entries)
    return Morphism(G.source, F.target, comps, arity)


def compose_coderivations(s, t, arity=None):
    """Corestriction components of the composite ``s o t`` of coderivations.

    Uses ``(s o t)_n = sum_{k+l=n+1} s_l o (t_k (x) 1 ...) o alpha_{k,n}``.
    The composite is generally not a coderivation; its components still
    define the commutator, which is.
    """
    module = s.module
    arity = arity or min(s.max_arity, t.max_arity)
    degree = s.degree + t.degree
    comps = {}
    for n in range(1, arity + 1):
        entries = {}
        for word in canonical_words(module.dim, module.degrees, n, SYMMETRIC):
            val = coderivation_first(s, apply_coderivation(t, {word: Fraction(1)}))
            if val:
                entries[word] = val
        comps[n] = MultiMap(module, module, n, degree, SYMMETRIC, entries)
    q0 = coderivation_first(s, apply_coderivation(t, {(): Fraction(1)})) if (t.q0) else {}
    return Coderivation(module, comps, arity, degree, q0)


def coderivation_square(Q):
    """Components of ``Q o Q`` by the shuffle formula.

    ``(Q^2)_n(w) = sum_{k+l=n+1} sum_{sigma in Sh(k,n)} eps(sigma) Q_l(Q_k(w_sigma(1..k)), ...)``.
    """
    module = Q.module
    degrees = module.degrees
    comps = {}
    for n in range(1, Q.max_arity + 1):
        entries = {}
        for word in canonical_words(module.dim, degrees, n, SYMMETRIC):
            pdeg = _pos_degrees(word, degrees)
            acc = {}
            for k in range(1, n + 1):
                inner = Q.comps.get(k)
                outer = Q.comps.get(n - k + 1)
                if inner is None or outer is None or not inner.entries or not outer.entries:
                    continue
                for head in combinations(range(n), k):
                    val = inner.entries.get(tuple(word[i] for i in head))
                    if not val:
                        continue
                    rest = tuple(i for i in range(n) if i not in head)
                    sign = _split_sign(head + rest, pdeg)
                    tail = tuple(word[i] for i in rest)
                    for x, cx in val.items():
                        vec_add(acc, outer.evaluate((x,) + tail), sign * cx)
            if Q.q0 and (n + 1) in Q.comps:
                for x, cx in Q.q0.items():
                    vec_add(acc, Q.comps[n + 1].evaluate((x,) + word), cx)
            if acc:
                entries[word] = acc
        comps[n] = MultiMap(module, module, n, 2 * Q.degree, SYMMETRIC, entries)
    q0 = coderivation_first(Q, {(x,): c for x, c in Q.q0.items()}) if Q.q0 else None
    return Coderivation(module, comps, Q.max_arity, 2 * Q.degree, q0)


def first_nonzero(coder_or_morphism):
    """First ``(arity, word, value)`` with a nonzero value, in canonical order."""
    q0 = getattr(coder_or_morphism, "q0", None)
    if q0:
        return (0, (), q0)
    for n in sorted(coder_or_morphism.comps):
        m = coder_or_morphism.comps[n]
        for w in sorted(m.entries):
            return (n, w, m.entries[w])
    return None


def check_square_zero(Q):
    sq = coderivation_square(Q)
    bad = first_nonzero(sq)
    return CheckReport(bad is None, bad)


def check_equivariance(F, Q, Q2, arity=None):
    """Does ``F`` intertwine the coderivations ``Q`` (source) and ``Q2`` (target)?

    Checks, on every canonical word of length n <= arity,
    ``sum_k Q2_k o F_{n,k} = sum_l F_l o Q_{n,l}`` and ``F(Q(1)) = Q2(1)``.
    """
    arity = arity or min(F.max_arity, Q.max_arity, Q2.max_arity)
    checked = 0
    left0 = morphism_first(F, {(x,): c for x, c in (Q.q0 or {}).items()})
    right0 = dict(Q2.q0 or {})
    diff0 = vec_add(dict(left0), right0, -1)
    if diff0:
        return CheckReport(False, (0, (), diff0))
    src = F.source
    for n in range(1, arity + 1):
        for word in canonical_words(src.dim, src.degrees, n, SYMMETRIC):
            unit = {word: Fraction(1)}
            lhs = coderivation_first(Q2, apply_morphism(F, unit))
            rhs = morphism_first(F, apply_coderivation(Q, unit))
            diff = vec_add(dict(lhs), rhs, -1)
            checked += 1
            if diff:
                return CheckReport(False, (n, word, diff), checked)
    return CheckReport(True, None, checked)


def conjugate(F, Q, G, arity=None):
    """Components of ``F o Q o G`` (G: W' -> W, Q on W, F: W -> W').

    When ``G`` is inverse to ``F`` this is the transported coderivation.
    """
    module = G.source
    arity = arity or min(F.max_arity, Q.max_arity, G.max_arity)
    comps = {}
    for n in range(1, arity + 1):
        entries = {}
        for word in canonical_words(module.dim, module.degrees, n, SYMMETRIC):
            val = morphism_first(F, apply_coderivation(Q, apply_morphism(G, {word: Fraction(1)})))
            if val:
                entries[word] = val
        comps[n] = MultiMap(module, F.target, n, Q.degree, SYMMETRIC, entries)
    q0 = None
    if Q.q0:
        q0 = morphism_first(F, apply_coderivation(Q, {(): Fraction(1)}))
    return Coderivation(module, comps, arity, Q.degree, q0)

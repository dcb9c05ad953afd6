"""Sparse multilinear maps with exact rational coefficients.

Vectors are ``dict[int, Fraction]`` keyed by basis index, zero entries
dropped.  A :class:`MultiMap` of symmetry ``symmetric``/``exterior`` stores
values on sorted index words only; evaluation on any other word sorts it
and folds in the Koszul sign.  Symmetry ``None`` means a plain tensor map
stored on ordered words.
"""

from fractions import Fraction
from itertools import product as iproduct

from .graded import EXTERIOR, MODES, SYMMETRIC, canonical_words, koszul_sort


def vec_add(acc, vec, coef=1):
    """``acc += coef * vec`` in place; returns acc."""
    if not coef:
        return acc
    for k, v in vec.items():
        x = acc.get(k, 0) + coef * v
        if x:
            acc[k] = x
        else:
            acc.pop(k, None)
    return acc


def vec_scale(vec, coef):
    if not coef:
        return {}
    return {k: coef * v for k, v in vec.items()}


def vec_clean(vec):
    return {k: Fraction(v) for k, v in vec.items() if v}


class MultiMap:
    """An n-ary graded multilinear map ``source^{(x) n} -> target``."""

    def __init__(self, source, target, arity, degree, symmetry, entries=None):
        if symmetry not in MODES and symmetry is not None:
            raise ValueError(f"bad symmetry {symmetry!r}")
        self.source = source
        self.target = target
        self.arity = arity
        self.degree = degree
        self.symmetry = symmetry
        self.entries = {}
        for word, vec in (entries or {}).items():
            word = tuple(word)
            if symmetry is not None:
                sign, canon = koszul_sort(word, source.degrees, symmetry)
                if canon != word:
                    raise ValueError(f"entry key {word} is not canonical")
                if sign == 0:
                    continue
            vec = vec_clean(vec)
            if vec:
                self.entries[word] = vec

    # -- construction --------------------------------------------------------

    @classmethod
    def zero(cls, source, target, arity, degree, symmetry):
        return cls(source, target, arity, degree, symmetry, {})

    @classmethod
    def from_function(cls, source, target, arity, degree, symmetry, fn, words=None):
        """Tabulate ``fn(word) -> vector`` on canonical (or given) words."""
        if words is None:
            words = cls.domain_words(source, arity, symmetry)
        entries = {}
        for w in words:
            v = fn(w)
            if v:
                entries[w] = v
        return cls(source, target, arity, degree, symmetry, entries)

    @staticmethod
    def domain_words(source, arity, symmetry):
        if symmetry is None:
            return list(iproduct(range(source.dim), repeat=arity))
        return canonical_words(source.dim, source.degrees, arity, symmetry)

    # -- evaluation ------------------------------------------------------------

    def evaluate(self, word):
        """Value on a basis word (any order)."""
        if self.symmetry is None:
            return self.entries.get(tuple(word), {})
        sign, canon = koszul_sort(word, self.source.degrees, self.symmetry)
        if sign == 0:
            return {}
        vec = self.entries.get(canon)
        if not vec:
            return {}
        return vec if sign == 1 else vec_scale(vec, -1)

    def __call__(self, *word):
        return self.evaluate(word)

    def apply(self, vectors):
        """Multilinear extension to a list of vectors (Koszul signs from ``self.degree`` not applied)."""
        acc = {}
        items = [list(v.items()) for v in vectors]
        for combo in iproduct(*items):
            coef = 1
            for _, c in combo:
                coef *= c
            vec_add(acc, self.evaluate(tuple(i for i, _ in combo)), coef)
        return acc

    # -- algebra ----------------------------------------------------------------

    def _like(self, entries):
        return MultiMap(self.source, self.target, self.arity, self.degree, self.symmetry, entries)

    def __add__(self, other):
        self._compatible(other)
        out = {w: dict(v) for w, v in self.entries.items()}
        for w, v in other.entries.items():
            vec_add(out.setdefault(w, {}), v)
        return self._like(out)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, coef):
        coef = Fraction(coef)
        return self._like({w: vec_scale(v, coef) for w, v in self.entries.items()})

    def _compatible(self, other):
        if (self.arity, self.degree, self.symmetry) != (other.arity, other.degree, other.symmetry):
            raise ValueError("incompatible multilinear maps")
        if self.source != other.source or self.target != other.target:
            raise ValueError("maps between different modules")

    def is_zero(self):
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, MultiMap):
            return NotImplemented
        return (self.arity == other.arity and self.symmetry == other.symmetry
                and self.source == other.source and self.target == other.target
                and self.entries == other.entries)

    def __repr__(self):
        return (f"MultiMap(arity={self.arity}, degree={self.degree}, "
                f"symmetry={self.symmetry}, nnz={len(self.entries)})")

    def check_degree(self):
        """Words whose nonzero values have the wrong degree."""
        bad = []
        sd, td = self.source.degrees, self.target.degrees
        for w, v in self.entries.items():
            din = sum(sd[i] for i in w)
            if any(td[j] != din + self.degree for j in v):
                bad.append(w)
        return bad

    def compose_linear(self, lin, target=None):
        """``lin o self`` for a 1-ary map ``lin``; degree adds."""
        target = target or lin.target
        entries = {}
        for w, v in self.entries.items():
            acc = {}
            for j, c in v.items():
                vec_add(acc, lin.evaluate((j,)), c)
            if acc:
                entries[w] = acc
        return MultiMap(self.source, target, self.arity, self.degree + lin.degree,
                        self.symmetry, entries)


def linear_map(source, target, degree, matrix_cols, symmetry=SYMMETRIC):
    """1-ary map from ``{source index: vector}``."""
    return MultiMap(source, target, 1, degree, symmetry,
                    {(i,): v for i, v in matrix_cols.items()})


def identity_map(module, symmetry=SYMMETRIC):
    return linear_map(module, module, 0, {i: {i: Fraction(1)} for i in range(module.dim)},
                      symmetry)


def with_symmetry(fmap, symmetry):
    """Reinterpret a 1-ary map under another symmetry label (1-ary maps have none)."""
    if fmap.arity != 1:
        raise ValueError("only 1-ary maps can change symmetry label")
    return MultiMap(fmap.source, fmap.target, 1, fmap.degree, symmetry, fmap.entries)


__all__ = ["MultiMap", "vec_add", "vec_scale", "linear_map", "identity_map",
           "with_symmetry", "SYMMETRIC", "EXTERIOR"]

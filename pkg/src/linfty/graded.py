"""Graded modules, Koszul signs, permutations and shuffles.

Everything here works over the rationals. Basis vectors of a module are
numbered globally, sorted by (degree, position); a word of basis indices in
increasing order is the canonical representative of a symmetric or exterior
monomial.
"""

from fractions import Fraction
from itertools import combinations, combinations_with_replacement, permutations
from math import comb, factorial

SYMMETRIC = "symmetric"
EXTERIOR = "exterior"
MODES = (SYMMETRIC, EXTERIOR)


class GradedModule:
    """A finite-dimensional Z-graded module with labelled basis.

    ``components`` is a list of ``(degree, labels)`` pairs; degrees must be
    strictly increasing and labels unique.  Basis vector ``i`` has degree
    ``degrees[i]`` and label ``labels[i]``.
    """

    def __init__(self, components):
        degrees, labels = [], []
        last = None
        for degree, names in components:
            degree = int(degree)
            if last is not None and degree <= last:
                raise ValueError("component degrees must be strictly increasing")
            last = degree
            for name in names:
                degrees.append(degree)
                labels.append(str(name))
        if len(set(labels)) != len(labels):
            raise ValueError("basis labels must be unique")
        self.degrees = tuple(degrees)
        self.labels = tuple(labels)
        self._index = {name: i for i, name in enumerate(labels)}

    @classmethod
    def from_basis(cls, pairs):
        """Build from ``(label, degree)`` pairs in any order (stable within a degree)."""
        by_degree = {}
        for label, degree in pairs:
            by_degree.setdefault(int(degree), []).append(label)
        return cls(sorted(by_degree.items()))

    @property
    def dim(self):
        return len(self.degrees)

    def __len__(self):
        return len(self.degrees)

    @property
    def components(self):
        out = []
        for i, deg in enumerate(self.degrees):
            if out and out[-1][0] == deg:
                out[-1][1].append(self.labels[i])
            else:
                out.append((deg, [self.labels[i]]))
        return [(deg, len(names), names) for deg, names in out]

    def index(self, label):
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"unknown basis label {label!r}") from None

    def basis_of_degree(self, degree):
        return [i for i, d in enumerate(self.degrees) if d == degree]

    def shift(self, k=1):
        """The module ``W[k]`` with ``W[k]^i = W^{i+k}``; basis and labels are kept."""
        return GradedModule([(deg - k, names) for deg, _, names in self.components])

    def relabel(self, prefix):
        return GradedModule([(deg, [prefix + n for n in names])
                             for deg, _, names in self.components])

    def __eq__(self, other):
        return (isinstance(other, GradedModule) and self.degrees == other.degrees
                and self.labels == other.labels)

    def __hash__(self):
        return hash((self.degrees, self.labels))

    def __repr__(self):
        parts = ", ".join(f"{deg}:{names}" for deg, _, names in self.components)
        return f"GradedModule({parts})"


def direct_sum(first, second, tags=("", "")):
    """Direct sum of two graded modules with optionally tagged labels.

    Returns ``(module, left, right)`` where ``left[i]``/``right[j]`` give the
    new index of basis vector ``i`` of ``first`` / ``j`` of ``second``.
    """
    entries = [(tags[0] + first.labels[i], first.degrees[i], 0, i) for i in range(first.dim)]
    entries += [(tags[1] + second.labels[j], second.degrees[j], 1, j) for j in range(second.dim)]
    entries.sort(key=lambda e: (e[1], e[2], e[3]))
    module = GradedModule.from_basis([(e[0], e[1]) for e in entries])
    left, right = [None] * first.dim, [None] * second.dim
    for new, e in enumerate(entries):
        (left if e[2] == 0 else right)[e[3]] = new
    return module, left, right


# -- signs -------------------------------------------------------------------

def swap_sign(d1, d2, mode):
    """Sign picked up when two adjacent homogeneous factors are exchanged."""
    s = -1 if (d1 * d2) % 2 else 1
    return s if mode == SYMMETRIC else -s


def koszul_sort(word, degrees, mode):
    """Sort a word of basis indices by adjacent transpositions.

    Returns ``(sign, canonical)`` with ``word = sign * canonical`` in the
    symmetric (resp. exterior) power; ``sign`` is 0 if the word vanishes.
    """
    w = list(word)
    sign = 1
    for i in range(1, len(w)):
        j = i
        while j > 0 and w[j - 1] > w[j]:
            a, b = w[j - 1], w[j]
            if mode == SYMMETRIC:
                if degrees[a] % 2 and degrees[b] % 2:
                    sign = -sign
            elif not (degrees[a] % 2 and degrees[b] % 2):
                sign = -sign
            w[j - 1], w[j] = b, a
            j -= 1
    for i in range(1, len(w)):
        if w[i] == w[i - 1] and swap_sign(degrees[w[i]], degrees[w[i]], mode) == -1:
            return 0, tuple(w)
    return sign, tuple(w)


def is_vanishing(word, degrees, mode):
    """True if a sorted word is zero in the symmetric/exterior power."""
    for i in range(1, len(word)):
        if word[i] == word[i - 1] and swap_sign(degrees[word[i]], degrees[word[i]], mode) == -1:
            return True
    return False


def _check(sigma, degrees):
    if len(sigma) != len(degrees):
        raise ValueError(f"permutation of length {len(sigma)} with {len(degrees)} degrees")
    if sorted(sigma) != list(range(len(sigma))):
        raise ValueError(f"not a permutation of 0..{len(sigma) - 1}: {sigma}")


def epsilon_sign(sigma, degrees):
    """Koszul sign of the symmetric action.

    ``sigma`` is a 0-based image tuple; the result ``e`` satisfies
    ``w[sigma[0]] * ... * w[sigma[n-1]] = e * w[0] * ... * w[n-1]`` in the
    graded symmetric algebra.
    """
    _check(sigma, degrees)
    return koszul_sort(sigma, degrees, SYMMETRIC)[0]


def chi_sign(sigma, degrees):
    """Koszul sign of the exterior action (``a ^ b = -(-1)^{ab} b ^ a``)."""
    _check(sigma, degrees)
    return koszul_sort(sigma, degrees, EXTERIOR)[0]


def action_sign(sigma, degrees, mode):
    return epsilon_sign(sigma, degrees) if mode == SYMMETRIC else chi_sign(sigma, degrees)


def decalage_sign(n, degrees):
    """Sign of the decalage isomorphism on ``a_1 ^ ... ^ a_n``.

    ``(-1)^{(n-1) a_1 + ... + 1 a_{n-1}}``; the inverse carries an extra
    ``(-1)^{n(n-1)/2}``.
    """
    if len(degrees) != n:
        raise ValueError("need exactly n degrees")
    e = sum((n - 1 - i) * d for i, d in enumerate(degrees))
    return -1 if e % 2 else 1


def inverse_decalage_sign(n, degrees):
    """Sign of the inverse decalage on ``w_1 * ... * w_n`` (degrees in the shifted module)."""
    e = n * (n - 1) // 2 + sum((n - 1 - i) * d for i, d in enumerate(degrees))
    return -1 if e % 2 else 1


# -- permutations ---------------------------------------------------------------

def compose_perm(sigma, tau):
    """The permutation ``i -> tau[sigma[i]]``.

    With this convention ``w_{compose(s, t)} = (w_t)_s`` and the action
    signs satisfy ``sign(compose(s, t), d) = sign(s, d o t) * sign(t, d)``.
    """
    return tuple(tau[i] for i in sigma)


def inverse_perm(sigma):
    inv = [0] * len(sigma)
    for i, s in enumerate(sigma):
        inv[s] = i
    return tuple(inv)


def enumerate_shuffles(k, n):
    """All (k, n-k)-shuffles as 0-based image tuples, in lexicographic order."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    out = []
    for head in combinations(range(n), k):
        rest = tuple(i for i in range(n) if i not in head)
        out.append(head + rest)
    return out


def all_permutations(n):
    return list(permutations(range(n)))


def compositions(n, k):
    """Ordered tuples of k positive integers summing to n."""
    if k == 1:
        return [(n,)] if n >= 1 else []
    out = []
    for first in range(1, n - k + 2):
        out.extend((first,) + rest for rest in compositions(n - first, k - 1))
    return out


def multi_factorial(parts):
    out = 1
    for p in parts:
        out *= factorial(p)
    return out


def set_partitions(n):
    """Set partitions of ``range(n)``; blocks sorted, ordered by their minima."""
    if n == 0:
        yield []
        return
    for part in set_partitions(n - 1):
        for i in range(len(part)):
            yield part[:i] + [part[i] + [n - 1]] + part[i + 1:]
        yield part + [[n - 1]]


def canonical_words(dim, degrees, n, mode):
    """Sorted non-vanishing words of length n in a module of dimension dim."""
    return [w for w in combinations_with_replacement(range(dim), n)
            if not is_vanishing(w, degrees, mode)]


def antisymmetrize(fmap, mode):
    """Compose an n-ary map with the (anti)symmetrization ``sum_sigma sigma.``.

    ``fmap`` is any :class:`~linfty.multimap.MultiMap`; the result is a
    MultiMap of the given symmetry.  Mode is never inferred.
    """
    from .multimap import MultiMap, vec_add

    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    n = fmap.arity
    degrees = fmap.source.degrees
    perms = all_permutations(n)
    entries = {}
    for word in canonical_words(fmap.source.dim, degrees, n, mode):
        acc = {}
        wdeg = [degrees[i] for i in word]
        for sigma in perms:
            sign = action_sign(sigma, wdeg, mode)
            vec_add(acc, fmap.evaluate(tuple(word[i] for i in sigma)), sign)
        if acc:
            entries[word] = acc
    return MultiMap(fmap.source, fmap.target, n, fmap.degree, mode, entries)


def binomial(n, k):
    return comb(n, k)


ONE = Fraction(1)

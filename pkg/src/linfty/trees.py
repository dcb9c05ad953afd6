"""Oriented binary trees.

A tree is stored as its planar shape: a leaf is ``None`` and a ramification
is a pair ``(child_1, child_2)``, child 1 drawn down-left.  Nodes are
addressed by their path from the root, a string over ``"12"``; the root is
``""``.  Leaves may also be addressed by their number ``1..n`` (left to
right).  Every oriented-equivalence class has exactly one planar shape, so
shapes are the canonical representatives.
"""

from fractions import Fraction
from functools import cached_property
from itertools import permutations

from .graded import chi_sign, enumerate_shuffles
from .multimap import MultiMap, vec_add

LEAF = None


class OrientedTree:
    __slots__ = ("shape", "__dict__")

    def __init__(self, shape=LEAF):
        _validate(shape)
        self.shape = shape

    # -- structure ---------------------------------------------------------------

    @cached_property
    def n_leaves(self):
        return _count(self.shape)

    @cached_property
    def _nodes(self):
        rams, leaves = [], []

        def walk(s, path):
            if s is LEAF:
                leaves.append(path)
            else:
                rams.append(path)
                walk(s[0], path + "1")
                walk(s[1], path + "2")

        walk(self.shape, "")
        return rams, leaves

    @property
    def ramifications(self):
        """Ramification paths in increasing order of ``v``."""
        return list(self._nodes[0])

    @property
    def leaves(self):
        """Leaf paths; leaf i is ``leaves[i-1]``."""
        return list(self._nodes[1])

    def _path(self, node):
        if isinstance(node, int) and not isinstance(node, bool):
            if not 1 <= node <= self.n_leaves:
                raise ValueError(f"no leaf {node} in a tree with {self.n_leaves} leaves")
            return self.leaves[node - 1]
        if not isinstance(node, str) or (node not in self._nodes[0] and node not in self._nodes[1]):
            raise ValueError(f"unknown node {node!r}")
        return node

    def is_ramification(self, node):
        return self._path(node) in self._nodes[0]

    def subtree(self, node):
        s = self.shape
        for digit in self._path(node):
            s = s[int(digit) - 1]
        return OrientedTree(s)

    def leaves_below(self, node):
        path = self._path(node)
        return [i + 1 for i, p in enumerate(self.leaves) if p.startswith(path)]

    # -- comparison / display ------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, OrientedTree) and self.shape == other.shape

    def __hash__(self):
        return hash(self.shape)

    def literal(self):
        return _literal(self.shape)

    def __str__(self):
        return self.literal()

    def __repr__(self):
        return f"OrientedTree({self.literal()!r})"


def _validate(s):
    if s is LEAF:
        return
    if not (isinstance(s, tuple) and len(s) == 2):
        raise ValueError(f"not a binary tree shape: {s!r}")
    _validate(s[0])
    _validate(s[1])


def _count(s):
    return 1 if s is LEAF else _count(s[0]) + _count(s[1])


def _literal(s):
    if s is LEAF:
        return "."
    return f"( {_literal(s[0])} {_literal(s[1])} )".replace("( (", "((").replace(") )", "))")


TAU = OrientedTree(LEAF)
BETA = OrientedTree((LEAF, LEAF))


def parse_tree(text):
    """Parse a literal such as ``(( . . ) . )``; ``.`` is a leaf."""
    tokens = [c for c in text if not c.isspace()]
    pos = 0

    def node():
        nonlocal pos
        if pos >= len(tokens):
            raise ValueError("unexpected end of tree literal")
        c = tokens[pos]
        pos += 1
        if c == ".":
            return LEAF
        if c != "(":
            raise ValueError(f"unexpected character {c!r} in tree literal")
        left = node()
        right = node()
        if pos >= len(tokens) or tokens[pos] != ")":
            raise ValueError("expected ')' in tree literal")
        pos += 1
        return (left, right)

    shape = node()
    if pos != len(tokens):
        raise ValueError("trailing characters in tree literal")
    return OrientedTree(shape)


# -- enumeration -------------------------------------------------------------------

def _shapes(n, memo={}):
    if n in memo:
        return memo[n]
    if n == 1:
        out = [LEAF]
    else:
        out = [(a, b) for k in range(n - 1, 0, -1) for a in _shapes(k) for b in _shapes(n - k)]
    memo[n] = out
    return out


def enumerate_ot(n):
    """One oriented tree per class of Ot(n), larger left root branch first."""
    if not isinstance(n, int) or n < 1:
        raise ValueError("number of leaves must be >= 1")
    return [OrientedTree(s) for s in _shapes(n)]


# -- invariants ----------------------------------------------------------------------

def node_value(t, node):
    """The value ``v`` of a node as an exact pair ``(digits, Fraction)``.

    ``v(root) = 0`` and a child in direction ``d`` of a node at depth ``j``
    adds ``d / 3^(j+1)``; the digit string is the root-to-node path.
    """
    path = t._path(node)
    value = sum((Fraction(int(d), 3 ** (j + 1)) for j, d in enumerate(path)), Fraction(0))
    return path, value


def _smaller_ramifications(t, path):
    v = node_value(t, path)[1]
    return sum(1 for k in t.ramifications if node_value(t, k)[1] < v)


def weight_w(t, node):
    """``w(i) = s(i) - (i - 1)`` for leaves, ``w(K)`` via ``t - t|_K`` for ramifications."""
    if t.n_leaves < 2:
        raise ValueError("weights are defined for trees with at least two leaves")
    path = t._path(node)
    if path in t._nodes[0]:
        if path == "":
            # the root becomes the only leaf of the one-leaf tree
            return 0
        cut = subtract_tree(t, path)
        return weight_w(cut, path)
    i = t.leaves.index(path) + 1
    return _smaller_ramifications(t, path) - (i - 1)


def sign_e(t):
    """``e(t) = (-1)^(w(1)+...+w(n))``, and ``+1`` for the one-leaf tree."""
    if t.n_leaves < 2:
        return 1
    total = sum(weight_w(t, i) for i in range(1, t.n_leaves + 1))
    return -1 if total % 2 else 1


# -- operations ------------------------------------------------------------------------

def add_trees(a, b):
    """New root with ``a`` grafted down-left and ``b`` down-right."""
    return OrientedTree((a.shape, b.shape))


def _replace(shape, path, new):
    if not path:
        return new
    d = int(path[0]) - 1
    kids = list(shape)
    kids[d] = _replace(shape[d], path[1:], new)
    return tuple(kids)


def subtract_tree(t, node):
    """Replace the subtree at ramification ``node`` by a single leaf."""
    path = t._path(node)
    if path not in t._nodes[0]:
        raise ValueError(f"{node!r} is not a ramification")
    return OrientedTree(_replace(t.shape, path, LEAF))


def compose_trees(outer, inner):
    """Graft ``inner[i-1]`` onto leaf i of ``outer``."""
    inner = list(inner)
    if len(inner) != outer.n_leaves:
        raise ValueError(f"need {outer.n_leaves} trees, got {len(inner)}")
    it = iter(inner)

    def graft(s):
        if s is LEAF:
            return next(it).shape
        left = graft(s[0])
        return (left, graft(s[1]))

    return OrientedTree(graft(outer.shape))


# -- evaluation --------------------------------------------------------------------------

def _family_degree(t, family, path=""):
    return sum(family[k].degree for k in t.ramifications if k.startswith(path)) if family else 0


def check_family(t, family):
    missing = [k for k in t.ramifications if k not in family]
    if missing:
        raise ValueError(f"bilinear family misses ramifications {missing}")
    for k in t.ramifications:
        b = family[k]
        if b.arity != 2:
            raise ValueError(f"map at {k!r} is not bilinear")


class _Evaluator:
    """Recursive evaluation of ``t(B)`` on homogeneous input vectors with memoization."""

    def __init__(self, t, family, degrees):
        check_family(t, family)
        self.t = t
        self.family = family
        self.degrees = degrees
        self.memo = {}
        self.map_degree = {}
        for path in t._nodes[0] + t._nodes[1]:
            self.map_degree[path] = sum(family[k].degree for k in t._nodes[0] if k.startswith(path))

    def run(self, path, shape, keys, vectors, degs):
        if shape is LEAF:
            return vectors[0]
        mkey = (path, keys)
        hit = self.memo.get(mkey)
        if hit is not None:
            return hit
        k = _count(shape[0])
        left = self.run(path + "1", shape[0], keys[:k], vectors[:k], degs[:k])
        out = {}
        if left:
            right = self.run(path + "2", shape[1], keys[k:], vectors[k:], degs[k:])
            if right:
                rdeg = self.map_degree[path + "2"]
                sign = -1 if (rdeg * sum(degs[:k])) % 2 else 1
                out = self.family[path].apply([left, right])
                if sign == -1:
                    out = {i: -c for i, c in out.items()}
        self.memo[mkey] = out
        return out

    def __call__(self, vectors, degs, keys=None):
        if keys is None:
            keys = tuple(range(len(vectors)))
        return self.run("", self.t.shape, tuple(keys), list(vectors), list(degs))


def evaluate_vectors(t, family, vectors, degrees):
    """``t(B)(x_1 (x) ... (x) x_n)`` for homogeneous vectors of the given degrees."""
    if len(vectors) != t.n_leaves:
        raise ValueError("wrong number of inputs")
    return _Evaluator(t, family, None)(vectors, degrees)


def evaluate(t, family, module=None):
    """The n-ary map ``t(B): L^{(x) n} -> L`` as a tabulated tensor map.

    ``family`` maps ramification paths to 2-ary maps on one module L.
    Koszul signs come from the degrees of the maps passed over inputs.
    """
    if t.n_leaves == 1:
        if module is None:
            raise ValueError("the one-leaf tree needs an explicit module")
        return MultiMap(module, module, 1, 0, None, {(i,): {i: Fraction(1)} for i in range(module.dim)})
    check_family(t, family)
    some = family[t.ramifications[0]]
    module = some.source
    ev = _Evaluator(t, family, module.degrees)
    degree = sum(family[k].degree for k in t.ramifications)

    def fn(word):
        vecs = [{i: Fraction(1)} for i in word]
        return ev(vecs, [module.degrees[i] for i in word], keys=word)

    return MultiMap.from_function(module, module, t.n_leaves, degree, None, fn)


def act(fmap, sigma):
    """``fmap o sigma`` for the exterior action: ``a -> chi(sigma, a) fmap(a_sigma(1), ...)``."""
    degrees = fmap.source.degrees
    entries = {}
    for word in MultiMap.domain_words(fmap.source, fmap.arity, None):
        permuted = tuple(word[i] for i in sigma)
        val = fmap.evaluate(permuted)
        if val:
            sign = chi_sign(sigma, [degrees[i] for i in word])
            entries[word] = val if sign == 1 else {k: -c for k, c in val.items()}
    return MultiMap(fmap.source, fmap.target, fmap.arity, fmap.degree, None, entries)


def tensor_insert(fmap, inner, position, total):
    """``fmap o (1^position (x) inner (x) 1 ...)`` on ``total`` inputs, with Koszul sign."""
    degrees = fmap.source.degrees
    k = inner.arity
    entries = {}
    for word in MultiMap.domain_words(fmap.source, total, None):
        head, mid, tail = word[:position], word[position:position + k], word[position + k:]
        val = inner.evaluate(mid)
        if not val:
            continue
        sign = -1 if (inner.degree * sum(degrees[i] for i in head)) % 2 else 1
        acc = {}
        for x, cx in val.items():
            vec_add(acc, fmap.evaluate(head + (x,) + tail), sign * cx)
        if acc:
            entries[word] = acc
    return MultiMap(fmap.source, fmap.target, total, fmap.degree + inner.degree, None, entries)


# -- the triple / 6-tuple correspondence ---------------------------------------------------
#
# Permutations here are 1-based image tuples, matching the displayed case
# formulas: sigma = (sigma(1), ..., sigma(n)).

def _inv1(p):
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x - 1] = i + 1
    return tuple(inv)


def _check_perm1(p, n, name):
    if sorted(p) != list(range(1, n + 1)):
        raise ValueError(f"{name} is not a permutation of 1..{n}")


def triple_to_six(tree, K, sigma):
    """``(Phi, K, sigma) -> (k, phi, psi, rho, gamma, delta)``."""
    n = tree.n_leaves
    sigma = tuple(sigma)
    _check_perm1(sigma, n, "sigma")
    if not tree.is_ramification(K) or tree._path(K) == "":
        raise ValueError("K must be a non-root ramification")
    K = tree._path(K)
    phi = tree.subtree(K)
    k = phi.n_leaves
    psi = subtract_tree(tree, K)
    l = n + 1 - k
    r = sum(1 for p in tree.leaves if node_value(tree, p)[1] < node_value(tree, K)[1])
    chosen = sorted(sigma[r:r + k])
    rest = sorted(set(range(1, n + 1)) - set(chosen))
    rho = tuple(chosen + rest)
    rinv = _inv1(rho)
    delta = tuple(rinv[sigma[r + i] - 1] for i in range(k))
    gamma = []
    for i in range(1, l + 1):
        if i <= r:
            gamma.append(rinv[sigma[i - 1] - 1] - k + 1)
        elif i == r + 1:
            gamma.append(1)
        else:
            gamma.append(rinv[sigma[i + k - 2] - 1] - k + 1)
    return (k, phi, psi, rho, tuple(gamma), delta)


def six_to_triple(six):
    """``(k, phi, psi, rho, gamma, delta) -> (Phi, K, sigma)``."""
    k, phi, psi, rho, gamma, delta = six
    l = psi.n_leaves
    n = k + l - 1
    if not 2 <= k <= n - 1 or phi.n_leaves != k:
        raise ValueError("malformed 6-tuple: bad k or phi")
    rho, gamma, delta = tuple(rho), tuple(gamma), tuple(delta)
    _check_perm1(rho, n, "rho")
    _check_perm1(gamma, l, "gamma")
    _check_perm1(delta, k, "delta")
    if list(rho[:k]) != sorted(rho[:k]) or list(rho[k:]) != sorted(rho[k:]):
        raise ValueError("rho is not a (k, n-k)-shuffle")
    r = _inv1(gamma)[0] - 1
    Phi = compose_trees(psi, [TAU] * r + [phi] + [TAU] * (l - r - 1))
    K = psi.leaves[r]
    sigma = []
    for i in range(1, n + 1):
        if i <= r:
            sigma.append(rho[gamma[i - 1] + k - 2])
        elif i <= r + k:
            sigma.append(rho[delta[i - r - 1] - 1])
        else:
            sigma.append(rho[gamma[i - k] + k - 2])
    return (Phi, K, tuple(sigma))


def all_triples(n):
    for tree in enumerate_ot(n):
        for K in tree.ramifications[1:]:
            for sigma in permutations(range(1, n + 1)):
                yield (tree, K, sigma)


def all_six_tuples(n):
    for k in range(2, n):
        l = n + 1 - k
        for phi in enumerate_ot(k):
            for psi in enumerate_ot(l):
                for rho0 in enumerate_shuffles(k, n):
                    rho = tuple(x + 1 for x in rho0)
                    for gamma in permutations(range(1, l + 1)):
                        for delta in permutations(range(1, k + 1)):
                            yield (k, phi, psi, rho, gamma, delta)


def to_zero_based(p):
    return tuple(x - 1 for x in p)


def lemma_terms(six, family_psi, family_phi):
    """The three maps of the tree sign lemma for one 6-tuple.

    ``family_psi`` is keyed by the ramifications of psi, ``family_phi`` by
    those of phi.  Returns ``(lhs, middle, composite, data)`` where
    ``lhs = psi(B') gamma (phi(B'') delta (x) 1...) rho``,
    ``middle = psi(B') (1^r (x) phi(B'') (x) 1...) sigma`` and
    ``composite = Phi(B) sigma``; ``data`` holds r, Phi, K and sigma.
    """
    k, phi, psi, rho, gamma, delta = six
    Phi, K, sigma = six_to_triple(six)
    n = Phi.n_leaves
    r = _inv1(gamma)[0] - 1
    psi_map = evaluate(psi, family_psi)
    phi_map = evaluate(phi, family_phi)
    inner = act(phi_map, to_zero_based(delta))
    lhs = act(tensor_insert(act(psi_map, to_zero_based(gamma)), inner, 0, n), to_zero_based(rho))
    middle = act(tensor_insert(psi_map, phi_map, r, n), to_zero_based(sigma))
    family = {K + p: b for p, b in family_phi.items()}
    family.update(family_psi)
    composite = act(evaluate(Phi, family), to_zero_based(sigma))
    return lhs, middle, composite, {"r": r, "Phi": Phi, "K": K, "sigma": sigma}


def composite_exponent(outer, inner, outer_family, inner_families):
    """Exponent of the sign relating ``(outer o inner)(B)`` to the composed evaluation."""
    total = 0
    for i, tree in enumerate(inner[:-1], start=1):
        bi = sum(inner_families[i - 1][p].degree for p in tree.ramifications)
        leaf_v = node_value(outer, i)[1]
        later = sum(outer_family[p].degree for p in outer.ramifications
                    if node_value(outer, p)[1] > leaf_v)
        total += bi * later
    return total

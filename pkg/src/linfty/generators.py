"""Fixture DGLs and seeded random generators of split DGLs."""

import random
from fractions import Fraction

from .algebra import DGL
from .graded import EXTERIOR, GradedModule, canonical_words
from .linalg import inverse
from .multimap import MultiMap, vec_add


def dgl_from_tables(module, d_table, bracket_table, check=True):
    """Build a DGL from ``{label: {label: coef}}`` and ``{(label, label): {label: coef}}``.

    Bracket entries may be given on any order of the pair; they are moved to
    the sorted word with the exterior sign.
    """
    idx = module.index
    d_entries = {(idx(a),): {idx(k): Fraction(v) for k, v in vec.items()}
                 for a, vec in d_table.items()}
    d = MultiMap(module, module, 1, 1, EXTERIOR, d_entries)
    raw = {}
    deg = module.degrees
    for (a, b), vec in bracket_table.items():
        i, j = idx(a), idx(b)
        sign = 1
        if i > j:
            i, j = j, i
            sign = 1 if (deg[i] % 2 and deg[j] % 2) else -1
        vec_add(raw.setdefault((i, j), {}), {idx(k): Fraction(v) for k, v in vec.items()}, sign)
    bracket = MultiMap(module, module, 2, 0, EXTERIOR, raw)
    return DGL(module, d, bracket, check=check)


def abelian_dgl():
    """Two contractible pairs and two cycles, zero bracket."""
    module = GradedModule([(0, ["a", "x"]), (1, ["b", "y"])])
    return dgl_from_tables(module, {"x": {"y": 1}}, {})


def lie_dgl():
    """sl(2) in degree 0 with zero differential."""
    module = GradedModule([(0, ["e", "f", "h"])])
    return dgl_from_tables(module, {}, {
        ("h", "e"): {"e": 2}, ("h", "f"): {"f": -2}, ("e", "f"): {"h": 1}})


def sl2_like_dgl():
    """sl(2) tensored with the exterior algebra on one odd generator ``t`` (d = 0)."""
    module = GradedModule([(0, ["e", "f", "h"]), (1, ["et", "ft", "ht"])])
    base = {("h", "e"): {"e": 2}, ("h", "f"): {"f": -2}, ("e", "f"): {"h": 1}}
    table = dict(base)
    for (a, b), vec in base.items():
        table[(a, b + "t")] = {k + "t": v for k, v in vec.items()}
        table[(a + "t", b)] = {k + "t": v for k, v in vec.items()}
    return dgl_from_tables(module, {}, table)


def contractible_dgl():
    module = GradedModule([(0, ["x"]), (1, ["y"])])
    return dgl_from_tables(module, {"x": {"y": 1}}, {})


def massey_dgl():
    """Degree-1 generators a, b, c, x, y and degree-2 u, v, m, n.

    ``[a,b] = u, [b,c] = v, [x,c] = m, [a,y] = n, dx = u, dy = v``; the
    classes of a, b, c have a nonzero triple bracket on homology.
    """
    module = GradedModule([(1, ["a", "b", "c", "x", "y"]), (2, ["u", "v", "m", "n"])])
    return dgl_from_tables(module, {"x": {"u": 1}, "y": {"v": 1}}, {
        ("a", "b"): {"u": 1}, ("b", "c"): {"v": 1}, ("x", "c"): {"m": 1}, ("a", "y"): {"n": 1}})


FIXTURES = {
    "abelian": abelian_dgl,
    "lie": lie_dgl,
    "sl2_like": sl2_like_dgl,
    "contractible": contractible_dgl,
    "massey": massey_dgl,
}


# -- random generators ----------------------------------------------------------------

def _rand(rng, lo=-2, hi=2):
    return Fraction(rng.randint(lo, hi))


def _two_step(rng, n1, n2, density=0.6):
    """Random DGL in degrees 1 and 2; the axioms hold for degree reasons."""
    module = GradedModule([(1, [f"a{i}" for i in range(n1)]), (2, [f"u{i}" for i in range(n2)])])
    top = module.basis_of_degree(2)
    d = {}
    for i in module.basis_of_degree(1):
        vec = {j: _rand(rng) for j in top if rng.random() < density}
        d[(i,)] = vec
    br = {}
    for w in canonical_words(module.dim, module.degrees, 2, EXTERIOR):
        if all(module.degrees[i] == 1 for i in w):
            br[w] = {j: _rand(rng) for j in top if rng.random() < density}
    return DGL(module, MultiMap(module, module, 1, 1, EXTERIOR, d),
               MultiMap(module, module, 2, 0, EXTERIOR, br))


def _endomorphisms(rng, vdegrees):
    """End(V) with commutator bracket and d = [D, .] for a random square-zero D of degree 1."""
    n = len(vdegrees)
    elems = sorted(((vdegrees[i] - vdegrees[j], i, j) for i in range(n) for j in range(n)))
    module = GradedModule.from_basis([(f"e{i}{j}", deg) for deg, i, j in elems])
    pos = {(i, j): module.index(f"e{i}{j}") for _, i, j in elems}
    deg = module.degrees

    def mul(p, q):
        (i, j), (k, l) = p, q
        return (i, l) if j == k else None

    keys = {v: k for k, v in pos.items()}
    entries = {}
    for w in canonical_words(module.dim, deg, 2, EXTERIOR):
        a, b = w
        acc = {}
        ab = mul(keys[a], keys[b])
        if ab:
            vec_add(acc, {pos[ab]: Fraction(1)})
        ba = mul(keys[b], keys[a])
        if ba:
            vec_add(acc, {pos[ba]: Fraction(1)}, -1 if (deg[a] * deg[b]) % 2 == 0 else 1)
        if acc:
            entries[w] = acc
    bracket = MultiMap(module, module, 2, 0, EXTERIOR, entries)
    # D: a random degree-1 element with D^2 = 0 (strictly increasing in V-degree order)
    cands = [pos[(i, j)] for _, i, j in elems if vdegrees[i] - vdegrees[j] == 1]
    D = {}
    if cands:
        for c in cands:
            if rng.random() < 0.7:
                D[c] = _rand(rng, -1, 2) or Fraction(1)
    dcols = {}
    for i in range(module.dim):
        acc = {}
        for c, x in D.items():
            vec_add(acc, bracket.evaluate((c, i)), x)
        dcols[(i,)] = acc
    d = MultiMap(module, module, 1, 1, EXTERIOR, dcols)
    dgl = DGL(module, d, bracket, check=False)
    if dgl.axiom_failure():
        dgl = DGL(module, MultiMap.zero(module, module, 1, 1, EXTERIOR), bracket)
    return dgl


def _tensor_cdga(rng, lie_kind, k):
    """``g (x) A`` with A = <1, p, q>, |p| = k, |q| = k + 1, dp = q, zero products."""
    if lie_kind == "nonabelian2":
        gl, gb = ["e", "f"], {("e", "f"): {"f": 1}}
    else:
        gl, gb = ["e"], {}
    basis = [(x, 0) for x in gl] + [(x + "p", k) for x in gl] + [(x + "q", k + 1) for x in gl]
    module = GradedModule.from_basis(basis)
    table = {}
    for (a, b), vec in gb.items():
        table[(a, b)] = vec
        table[(a, b + "p")] = {c + "p": v for c, v in vec.items()}
        table[(a, b + "q")] = {c + "q": v for c, v in vec.items()}
        table[(b, a + "p")] = {c + "p": -v for c, v in vec.items()}
        table[(b, a + "q")] = {c + "q": -v for c, v in vec.items()}
    d = {x + "p": {x + "q": 1} for x in gl}
    return dgl_from_tables(module, d, table)


def direct_sum_dgl(first, second, tags=("", "")):
    from .graded import direct_sum

    module, li, ri = direct_sum(first.module, second.module, tags)

    def move(m, emb):
        return {tuple(sorted(emb[i] for i in w)): {emb[j]: c for j, c in v.items()}
                for w, v in m.entries.items()}

    d = MultiMap(module, module, 1, 1, EXTERIOR, {**move(first.d, li), **move(second.d, ri)})
    br = {}
    for part, emb, src in ((first.bracket, li, first.module), (second.bracket, ri, second.module)):
        for w, v in part.entries.items():
            a, b = emb[w[0]], emb[w[1]]
            sign = 1
            if a > b:
                a, b = b, a
                da, db = src.degrees[w[0]], src.degrees[w[1]]
                sign = 1 if (da % 2 and db % 2) else -1
            br[(a, b)] = {emb[j]: sign * c for j, c in v.items()}
    return DGL(module, d, MultiMap(module, module, 2, 0, EXTERIOR, br))


def _random_invertible(rng, n):
    while True:
        m = [[_rand(rng, -1, 1) + (1 if i == j else 0) for j in range(n)] for i in range(n)]
        try:
            return m, inverse(m)
        except ValueError:
            continue


def change_basis(dgl, rng):
    """Conjugate a DGL by a random degree-preserving automorphism."""
    module = dgl.module
    T = {}
    Tinv = {}
    for deg, dim, _ in module.components:
        idx = module.basis_of_degree(deg)
        m, mi = _random_invertible(rng, dim)
        for a, i in enumerate(idx):
            T[i] = {idx[b]: m[b][a] for b in range(dim) if m[b][a]}
            Tinv[i] = {idx[b]: mi[b][a] for b in range(dim) if mi[b][a]}

    def tvec(vec, table):
        acc = {}
        for i, c in vec.items():
            vec_add(acc, table[i], c)
        return acc

    dcols = {(i,): tvec(dgl.d.apply([Tinv[i]]), T) for i in range(module.dim)}
    br = {}
    for w in canonical_words(module.dim, module.degrees, 2, EXTERIOR):
        br[w] = tvec(dgl.bracket.apply([Tinv[w[0]], Tinv[w[1]]]), T)
    return DGL(module, MultiMap(module, module, 1, 1, EXTERIOR, dcols),
               MultiMap(module, module, 2, 0, EXTERIOR, br))


def random_dgl(seed=None, max_dim=6, rng=None):
    """A random DGL of total dimension <= max_dim with degrees in [-2, 3]."""
    rng = rng or random.Random(seed)
    kind = rng.choice(["two_step", "two_step", "end", "tensor", "sum"])
    if kind == "two_step":
        n1 = rng.randint(1, min(3, max_dim - 1))
        n2 = rng.randint(1, min(3, max_dim - n1))
        dgl = _two_step(rng, n1, n2)
    elif kind == "end":
        vdeg = sorted(rng.choice([[0, 1], [0, 0], [-1, 0], [1, 2], [0, 2]]))
        dgl = _endomorphisms(rng, vdeg)
    elif kind == "tensor":
        k = rng.choice([-2, -1, 1, 2]) if max_dim >= 6 else 1
        dgl = _tensor_cdga(rng, rng.choice(["nonabelian2", "abelian1"]) if max_dim >= 6 else "abelian1", k)
    else:
        n1 = rng.randint(1, 2)
        dgl = _two_step(rng, n1, rng.randint(1, 2))
    spare = max_dim - dgl.module.dim
    if spare >= 2 and rng.random() < 0.6:
        k = rng.randint(-2, 2)
        piece = GradedModule([(k, ["s"]), (k + 1, ["t"])])
        cpiece = dgl_from_tables(piece, {"s": {"t": 1}}, {})
        dgl = direct_sum_dgl(dgl, cpiece, ("", "c"))
    elif spare >= 1 and rng.random() < 0.5:
        k = rng.randint(-2, 3)
        piece = GradedModule([(k, ["z"])])
        dgl = direct_sum_dgl(dgl, dgl_from_tables(piece, {}, {}), ("", "c"))
    if rng.random() < 0.7:
        dgl = change_basis(dgl, rng)
    return dgl

"""Exact linear algebra over the rationals on dense row-major lists of Fractions."""

from fractions import Fraction

from sympy import QQ
from sympy.polys.matrices import DomainMatrix


def zeros(rows, cols):
    return [[Fraction(0)] * cols for _ in range(rows)]


def _to_qq(x):
    x = Fraction(x)
    return QQ(x.numerator, x.denominator)


def _from_qq(x):
    return Fraction(int(x.numerator), int(x.denominator))


def rref(matrix):
    """Reduced row echelon form with leftmost pivots (sympy's exact ``DomainMatrix``).

    Returns ``(R, pivots)`` with the zero rows dropped; ``pivots[i]`` is the
    pivot column of row i.
    """
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    if not rows or not cols:
        return [], []
    dm = DomainMatrix([[_to_qq(x) for x in row] for row in matrix], (rows, cols), QQ)
    R, pivots = dm.rref()
    dense = R.to_list()
    return [[_from_qq(x) for x in dense[i]] for i in range(len(pivots))], list(pivots)


def rank(matrix):
    return len(rref(matrix)[1])


def nullspace(matrix, cols=None):
    """Basis of ``{x : matrix x = 0}`` as a list of column vectors."""
    if cols is None:
        cols = len(matrix[0]) if matrix else 0
    if not matrix:
        return [[Fraction(int(i == j)) for i in range(cols)] for j in range(cols)]
    R, pivots = rref(matrix)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for row, p in zip(R, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve(matrix, rhs, cols=None):
    """One solution of ``matrix x = rhs`` (free variables zero), or None."""
    if cols is None:
        cols = len(matrix[0]) if matrix else 0
    if not matrix:
        return [Fraction(0)] * cols
    aug = [list(row) + [Fraction(b)] for row, b in zip(matrix, rhs)]
    R, pivots = rref(aug)
    if cols in pivots:
        return None
    x = [Fraction(0)] * cols
    for row, p in zip(R, pivots):
        x[p] = row[cols]
    return x


def solve_many(matrix, rhs_cols, cols):
    """Solve ``matrix X = B`` column by column; None if any column fails."""
    out = []
    for b in rhs_cols:
        x = solve(matrix, b, cols)
        if x is None:
            return None
        out.append(x)
    return out


def inverse(matrix):
    n = len(matrix)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(matrix)]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ValueError("matrix is singular")
    return [row[n:] for row in R]


def matmul(a, b):
    cols = len(b[0]) if b else 0
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0)) for j in range(cols)]
            for i in range(len(a))]


def column_space_basis(vectors, dim):
    """Linearly independent subset of column vectors (leftmost pivots), as indices."""
    if not vectors:
        return []
    matrix = [[vectors[j][i] for j in range(len(vectors))] for i in range(dim)]
    return rref(matrix)[1]

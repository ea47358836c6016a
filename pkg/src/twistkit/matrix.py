"""Small exact matrices of Scalars, as lists of rows."""

from __future__ import annotations

from typing import Sequence

from .scalar import ONE, ZERO, GaussianRational, Scalar

Matrix = list[list[Scalar]]


class SingularMatrixError(ZeroDivisionError):
    pass


def as_matrix(rows) -> Matrix:
    """Coerce a nested sequence to a rectangular Scalar matrix."""
    out = [[Scalar.coerce(x) for x in row] for row in rows]
    if out and any(len(r) != len(out[0]) for r in out):
        raise ValueError("ragged matrix")
    return out


def identity(n: int, scale=ONE) -> Matrix:
    s = Scalar.coerce(scale)
    return [[s if i == j else ZERO for j in range(n)] for i in range(n)]


def shape(m: Matrix) -> tuple[int, int]:
    return len(m), (len(m[0]) if m else 0)


def is_square(m: Matrix) -> bool:
    r, c = shape(m)
    return r == c


def matmul(a: Matrix, b: Matrix) -> Matrix:
    n, k = shape(a)
    k2, p = shape(b)
    if k != k2:
        raise ValueError(f"cannot multiply {n}x{k} by {k2}x{p}")
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            s = ZERO
            for t in range(k):
                if not a[i][t].is_zero() and not b[t][j].is_zero():
                    s = s + a[i][t] * b[t][j]
            row.append(s)
        out.append(row)
    return out


def transpose(m: Matrix) -> Matrix:
    return [list(col) for col in zip(*m)]


def add(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def scale(m: Matrix, s) -> Matrix:
    s = Scalar.coerce(s)
    return [[x * s for x in row] for row in m]


def equal(a: Matrix, b: Matrix) -> bool:
    return shape(a) == shape(b) and all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def is_zero(m: Matrix) -> bool:
    return all(x.is_zero() for row in m for x in row)


def _eliminate(m: Matrix, augment: Matrix | None = None):
    """Gauss-Jordan elimination in place; returns the determinant."""
    n = len(m)
    det = ONE
    for col in range(n):
        piv = next((r for r in range(col, n) if not m[r][col].is_zero()), None)
        if piv is None:
            return ZERO
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            if augment is not None:
                augment[col], augment[piv] = augment[piv], augment[col]
            det = -det
        p = m[col][col]
        det = det * p
        inv = p.inverse()
        m[col] = [x * inv for x in m[col]]
        if augment is not None:
            augment[col] = [x * inv for x in augment[col]]
        for r in range(n):
            if r == col or m[r][col].is_zero():
                continue
            f = m[r][col]
            m[r] = [x - f * y for x, y in zip(m[r], m[col])]
            if augment is not None:
                augment[r] = [x - f * y for x, y in zip(augment[r], augment[col])]
    return det


def det(m: Matrix) -> Scalar:
    if not is_square(m):
        raise ValueError("determinant of a non-square matrix")
    if not m:
        return ONE
    return _eliminate([list(r) for r in m])


def inverse(m: Matrix) -> Matrix:
    if not is_square(m):
        raise ValueError("inverse of a non-square matrix")
    n = len(m)
    work = [list(r) for r in m]
    aug = identity(n)
    d = _eliminate(work, aug)
    if d.is_zero():
        raise SingularMatrixError("matrix is singular")
    return aug


def solve_linear(rows: Sequence[Sequence], rhs: Sequence) -> list[GaussianRational] | None:
    """One solution of ``A x = b`` over Q(i) with free unknowns set to 0, or None."""
    A = [[GaussianRational.coerce(x) for x in r] for r in rows]
    b = [GaussianRational.coerce(x) for x in rhs]
    n_rows = len(A)
    n_cols = len(A[0]) if A else 0
    pivots = []
    r = 0
    for c in range(n_cols):
        piv = next((k for k in range(r, n_rows) if not A[k][c].is_zero()), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        b[r], b[piv] = b[piv], b[r]
        inv = A[r][c].inverse()
        A[r] = [x * inv for x in A[r]]
        b[r] = b[r] * inv
        for k in range(n_rows):
            if k != r and not A[k][c].is_zero():
                f = A[k][c]
                A[k] = [x - f * y for x, y in zip(A[k], A[r])]
                b[k] = b[k] - f * b[r]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    if any(not b[k].is_zero() for k in range(r, n_rows)):
        return None
    x = [GaussianRational(0)] * n_cols
    for k, c in enumerate(pivots):
        x[c] = b[k]
    return x


def rank(m: Matrix) -> int:
    """Rank over the field of rational functions."""
    work = [list(r) for r in m]
    n_rows = len(work)
    n_cols = len(work[0]) if work else 0
    r = 0
    for c in range(n_cols):
        piv = next((k for k in range(r, n_rows) if not work[k][c].is_zero()), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        inv = work[r][c].inverse()
        work[r] = [x * inv for x in work[r]]
        for k in range(r + 1, n_rows):
            if not work[k][c].is_zero():
                f = work[k][c]
                work[k] = [x - f * y for x, y in zip(work[k], work[r])]
        r += 1
        if r == n_rows:
            break
    return r

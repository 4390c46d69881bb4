"""Exact linear algebra over Gaussian rational scalars."""

from __future__ import annotations

from .scalars import ONE, ZERO, Scalar

Vec = tuple[Scalar, ...]


def zero_vec(n: int) -> Vec:
    return (ZERO,) * n


def vec_add(x: Vec, y: Vec) -> Vec:
    return tuple(a + b for a, b in zip(x, y))

def vec_sub(x: Vec, y: Vec) -> Vec:
    return tuple(a - b for a, b in zip(x, y))

def vec_scale(c, x: Vec) -> Vec:
    return tuple(c * a for a in x)

def vec_is_zero(x: Vec) -> bool:
    return not any(x)


def echelon(rows) -> list[Vec]:
    """Reduced row echelon basis of the row span.

    Pivots are chosen on the lowest available coordinate index first, leading
    entries are scaled to 1, and zero rows are dropped, so equal row spans
    produce identical output.
    """
    work = [list(r) for r in rows if any(r)]
    if not work:
        return []
    n = len(work[0])
    out: list[list[Scalar]] = []
    r = 0
    for c in range(n):
        pivot = None
        for i in range(r, len(work)):
            if work[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        inv = ONE / work[r][c]
        work[r] = [inv * a for a in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c]:
                f = work[i][c]
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        r += 1
        if r == len(work):
            break
    for row in work[:r]:
        out.append(tuple(row))
    return out


def rank(rows) -> int:
    return len(echelon(rows))


def reduce_against(basis: list[Vec], v: Vec) -> Vec:
    """Residual of v after eliminating along an echelon basis."""
    res = list(v)
    for row in basis:
        lead = next(i for i, a in enumerate(row) if a)
        if res[lead]:
            f = res[lead]
            res = [a - f * b for a, b in zip(res, row)]
    return tuple(res)


def in_span(basis: list[Vec], v: Vec) -> bool:
    return vec_is_zero(reduce_against(basis, v))


def solve_combination(cols: list[Vec], target: Vec):
    """One exact solution x of sum_j x_j * cols[j] = target, or None.

    Elimination pivots over columns left to right, so the returned solution is
    supported on the earliest maximal independent subset of columns.
    """
    if not cols:
        return [] if vec_is_zero(target) else None
    m = len(target)
    ncols = len(cols)
    aug = [[cols[j][i] for j in range(ncols)] + [target[i]] for i in range(m)]
    r = 0
    pivots: list[int] = []
    for c in range(ncols):
        pivot = None
        for i in range(r, m):
            if aug[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv = ONE / aug[r][c]
        aug[r] = [inv * a for a in aug[r]]
        for i in range(m):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if aug[i][ncols]:
            return None
    x = [ZERO] * ncols
    for row_idx, c in enumerate(pivots):
        x[c] = aug[row_idx][ncols]
    return x

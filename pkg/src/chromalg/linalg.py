"""Exact linear algebra over Q and F_p.

Plain Gaussian elimination on dense row lists; no floating point.  Matrices
optionally carry row/column labels (monomials) so homology code can report
which basis elements span what.
"""

from __future__ import annotations


class ExactMatrix:
    def __init__(self, field, rows, row_labels=None, col_labels=None):
        self.field = field
        self.rows = [list(r) for r in rows]
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        for r in self.rows:
            if len(r) != self.ncols:
                raise ValueError("ragged rows")
        self.row_labels = row_labels
        self.col_labels = col_labels

    @classmethod
    def zero(cls, field, nrows, ncols):
        return cls(field, [[field.zero] * ncols for _ in range(nrows)])

    @classmethod
    def identity(cls, field, n):
        rows = [[field.one if i == j else field.zero for j in range(n)] for i in range(n)]
        return cls(field, rows)

    def rank(self) -> int:
        return exact_rank(self)

    def __repr__(self):
        return f"ExactMatrix({self.nrows}x{self.ncols} over {self.field!r})"


def exact_rank(matrix: ExactMatrix) -> int:
    """Rank by fraction-free-enough elimination; exact in Q or F_p."""
    f = matrix.field
    m = [row[:] for row in matrix.rows]
    nrows, ncols = matrix.nrows, matrix.ncols
    rank = 0
    for col in range(ncols):
        pivot = None
        for r in range(rank, nrows):
            if m[r][col] != f.zero:
                pivot = r
                break
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = f.inv(m[rank][col])
        prow = m[rank]
        for r in range(rank + 1, nrows):
            c = m[r][col]
            if c == f.zero:
                continue
            factor = f.mul(c, inv)
            row = m[r]
            for j in range(col, ncols):
                row[j] = f.add(row[j], f.neg(f.mul(factor, prow[j])))
        rank += 1
        if rank == nrows:
            break
    return rank

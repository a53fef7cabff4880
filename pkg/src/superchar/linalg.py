"""Gaussian elimination over a finite scalar field given by encodings.

Vectors are tuples of canonical field encodings; the scalar field is a
``gf.Subfield`` (possibly the full top field).  Everything here is
deterministic: spanning sets reduce to a unique RREF basis, kernels get
their standard free-column basis in ascending column order.
"""

from __future__ import annotations

from .gf import Subfield


def rref(rows, sc: Subfield):
    """Reduced row echelon form.  Returns (rows, pivot_columns)."""
    rows = [list(r) for r in rows if any(r)]
    pivots = []
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        pivot_row = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = sc.inv(rows[r][c])
        if inv != sc.one:
            rows[r] = [sc.mul(inv, x) for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                factor = rows[i][c]
                rows[i] = [
                    sc.sub(x, sc.mul(factor, y)) for x, y in zip(rows[i], rows[r])
                ]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return [tuple(row) for row in rows[:r]], pivots


class Subspace:
    """A subspace stored as an RREF row basis over a scalar subfield."""

    def __init__(self, sc: Subfield, ambient: int, rows, pivots):
        self.sc = sc
        self.ambient = ambient
        self.rows = [tuple(r) for r in rows]
        self.pivots = list(pivots)

    @classmethod
    def from_spanning(cls, sc: Subfield, ambient: int, vectors) -> "Subspace":
        vectors = list(vectors)
        if not vectors:
            return cls(sc, ambient, [], [])
        rows, pivots = rref(vectors, sc)
        return cls(sc, ambient, rows, pivots)

    @classmethod
    def kernel(cls, sc: Subfield, ambient: int, constraint_rows) -> "Subspace":
        """Solution space of the homogeneous system given by the rows."""
        rows, pivots = rref(constraint_rows, sc)
        pivot_set = set(pivots)
        free = [c for c in range(ambient) if c not in pivot_set]
        basis = []
        for fc in free:
            v = [sc.zero] * ambient
            v[fc] = sc.one
            for row, pc in zip(rows, pivots):
                v[pc] = sc.neg(row[fc])
            basis.append(tuple(v))
        # re-reduce so coords() can read coefficients off the pivots
        return cls.from_spanning(sc, ambient, basis)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def coords(self, v):
        """Coefficients of v against the RREF basis, or None if outside."""
        sc = self.sc
        cs = tuple(v[p] for p in self.pivots)
        residual = list(v)
        for c, row in zip(cs, self.rows):
            if c:
                for j, x in enumerate(row):
                    if x:
                        residual[j] = sc.sub(residual[j], sc.mul(c, x))
        if any(residual):
            return None
        return cs

    def contains(self, v) -> bool:
        return self.coords(v) is not None

    def combine(self, coeffs):
        sc = self.sc
        out = [sc.zero] * self.ambient
        for c, row in zip(coeffs, self.rows):
            if c:
                for j, x in enumerate(row):
                    if x:
                        out[j] = sc.add(out[j], sc.mul(c, x))
        return tuple(out)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient})"


def matvec(rows, v, sc: Subfield):
    """Apply a matrix (list of rows) to a column vector."""
    add, mul = sc.add, sc.mul
    out = []
    for row in rows:
        acc = sc.zero
        for a, b in zip(row, v):
            if a and b:
                acc = add(acc, mul(a, b))
        out.append(acc)
    return tuple(out)


def transpose(rows):
    return [tuple(col) for col in zip(*rows)]

"""Square matrices over a value quantale, and their parallel composition."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .carrier import Carrier
from .series import StarDivergence


@dataclass(frozen=True)
class MatrixSeries:
    target: object
    entries: tuple           # n rows of n values

    @classmethod
    def of(cls, target, rows):
        rows = tuple(tuple(int(v) for v in r) for r in rows)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("matrix must be square")
        return cls(target, rows)

    @property
    def n(self):
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def show(self):
        lab = self.target.label
        return "\n".join("  ".join(lab(v) for v in row) for row in self.entries)


def _same(a, b):
    if a.n != b.n:
        raise ValueError("dimension mismatch")
    if a.target is not b.target:
        raise ValueError("matrices over different targets")


def matrix_zero(target, n):
    return MatrixSeries.of(target, [[target.bottom] * n for _ in range(n)])


def matrix_unit(target, n):
    if target.unit is None:
        raise ValueError("target has no unit")
    return MatrixSeries.of(target, [[target.unit if i == j else target.bottom
                                     for j in range(n)] for i in range(n)])


def matrix_add(a, b):
    _same(a, b)
    t = a.target
    return MatrixSeries.of(t, [[t.join(a[i, j], b[i, j]) for j in range(a.n)] for i in range(a.n)])


def matrix_mult(a, b):
    _same(a, b)
    t = a.target
    n = a.n
    return MatrixSeries.of(t, [[t.join_all(t.mult(a[i, k], b[k, j]) for k in range(n))
                                for j in range(n)] for i in range(n)])


def matrix_power(a, k):
    out = matrix_unit(a.target, a.n)
    for _ in range(k):
        out = matrix_mult(out, a)
    return out


def matrix_star(a, cap=1000):
    """Least fixpoint of ``X -> I + A X``."""
    unit = matrix_unit(a.target, a.n)
    x = matrix_zero(a.target, a.n)
    for _ in range(cap):
        nxt = matrix_add(unit, matrix_mult(a, x))
        if nxt == x:
            return x
        x = nxt
    raise StarDivergence(f"matrix star did not stabilise within {cap} iterations")


# -- parallel composition: disjoint diagonal blocks ------------------------------

def used_indices(entries, zero=0):
    """Indices i whose row or column contains a nonzero entry."""
    n = len(entries)
    return {i for i in range(n)
            if any(entries[i][k] != zero or entries[k][i] != zero for k in range(n))}


def matrix_parallel(f, g, zero=0):
    """Parallel composition of matrices given as nested tuples.

    Defined when the two matrices use disjoint sets of indices (each lives
    in its own diagonal block); the result places both blocks side by side.
    Returns None when undefined.
    """
    n = len(f)
    if len(g) != n:
        raise ValueError("dimension mismatch")
    if used_indices(f, zero) & used_indices(g, zero):
        return None
    return tuple(tuple(f[i][j] if f[i][j] != zero else g[i][j] for j in range(n))
                 for i in range(n))


def matrix_parallel_literal(f, g, zero=0):
    """Entrywise three-case rule read literally (kept to exhibit its defects).

    Entry (i, j) is f(i,j) when g vanishes on row i and on column j, and
    g(i,j) when f vanishes on row i while g vanishes on column j.
    """
    n = len(f)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            if all(g[i][k] == zero and g[k][j] == zero for k in range(n)):
                row.append(f[i][j])
            elif all(f[i][k] == zero and g[k][j] == zero for k in range(n)):
                row.append(g[i][j])
            else:
                return None
        out.append(tuple(row))
    return tuple(out)


def make_matrix_parallel(dimension=2, values=(0, 1)):
    """Carrier of all ``dimension``-square matrices over ``values`` under parallel composition."""
    if dimension > 4:
        raise ValueError("dimension must be at most 4")
    count = len(values) ** (dimension * dimension)
    if count > 4096:
        raise ValueError(f"{count} matrices are too many for a dense table")
    zero = min(values)
    mats = []
    for flat in itertools.product(values, repeat=dimension * dimension):
        mats.append(tuple(tuple(flat[i * dimension:(i + 1) * dimension]) for i in range(dimension)))

    def lab(m):
        return "[" + ";".join(",".join(str(v) for v in r) for r in m) + "]"

    return Carrier.from_function(mats, lambda a, b: matrix_parallel(a, b, zero),
                                 unit=tuple((zero,) * dimension for _ in range(dimension)),
                                 commutative=True, label=lab,
                                 name=f"matrices-parallel({dimension})")


# -- linear maps on vectors --------------------------------------------------------

def apply_matrix(m, v):
    """Matrix-vector product over the integers."""
    return tuple(sum(m[i][k] * v[k] for k in range(len(v))) for i in range(len(m)))


def path_labels(edges, n, i, j, k):
    """Labels of all length-k paths from i to j; ``edges[(p, q)]`` is a set of letters."""
    frontier = {(i, "")}
    for _ in range(k):
        frontier = {(q, w + a) for (p, w) in frontier for q in range(n)
                    for a in edges.get((p, q), ())}
    return {w for (q, w) in frontier if q == j}


def as_array(m):
    return np.array(m.entries)

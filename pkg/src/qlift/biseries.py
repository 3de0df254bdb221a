"""Two-dimensional power series ``F : S1 -> S2 -> Q``.

A bi-series is stored densely as an array over ``S1 x S2`` flattened to
``x * n2 + y``.  The horizontal convolution splits the first argument and
the vertical convolution splits the second; both are ordinary convolutions
over product carriers, so the one-dimensional engine does all the work.
"""

from __future__ import annotations

import itertools

import numpy as np

from .carrier import Carrier
from .laws import (DEFAULT_BOUND, DEFAULT_BUDGET, check_law, generator_pool,
                   lifted_law_table)
from .series import SeriesSpace

GRID_LIMIT = 1_000_000


# -- stream carriers --------------------------------------------------------------

def make_stream(T=4, dim=2, values=(0, 1), split_mode="pointwise"):
    """All streams ``{0..T-1} -> values^dim`` under separation.

    ``pointwise``: two streams compose when at every time their vectors
    separate.  ``uniform``: each component must be identically zero on one
    side, so whole component trajectories are assigned to one side.
    """
    values = tuple(sorted(values))
    if values[0] != 0:
        raise ValueError("value set must contain 0")
    k = len(values)
    cells = T * dim
    size = k ** cells
    if size > 4096:
        raise ValueError(f"{size} streams exceed the dense table bound")
    digits = np.array(list(itertools.product(range(k), repeat=cells)), dtype=np.int64)
    # digits[s] lists value indices time-major: (t0 c0, t0 c1, ..., t1 c0, ...)
    weights = k ** np.arange(cells - 1, -1, -1, dtype=np.int64)
    nz = digits != 0
    if split_mode == "pointwise":
        ok = ~np.any(nz[:, None, :] & nz[None, :, :], axis=-1)
    elif split_mode == "uniform":
        comp_nz = nz.reshape(size, T, dim).any(axis=1)
        ok = ~np.any(comp_nz[:, None, :] & comp_nz[None, :, :], axis=-1)
    else:
        raise ValueError(f"unknown split mode {split_mode!r}")
    sums = (digits[:, None, :] + digits[None, :, :]) @ weights
    table = np.where(ok, sums, -1)
    elements = [tuple(tuple(values[d] for d in row[t * dim:(t + 1) * dim]) for t in range(T))
                for row in digits]

    def lab(s):
        return "<" + " ".join("".join(str(v) for v in vec) for vec in s) + ">"

    c = Carrier(table, unit=0, commutative=True, elements=elements,
                labels=[lab(s) for s in elements],
                name=f"streams(T={T},n={dim},{split_mode})")
    c.T, c.dim, c.values, c.split_mode = T, dim, values, split_mode
    return c


# -- the product space ------------------------------------------------------------------

class BiSeriesSpace:
    """``target ** (carrier1 x carrier2)`` with horizontal and vertical convolution."""

    def __init__(self, carrier1, carrier2, target, unit1="carrier", unit2="carrier"):
        n1, n2 = carrier1.size, carrier2.size
        if n1 * n2 > GRID_LIMIT:
            raise ValueError(f"grid of {n1 * n2} cells exceeds {GRID_LIMIT}")
        self.c1, self.c2 = carrier1, carrier2
        self.n1, self.n2 = n1, n2
        self.n = n1 * n2
        self.target = target
        self.row_space = SeriesSpace(carrier1, target, unit=unit1)
        self.col_space = SeriesSpace(carrier2, target, unit=unit2)
        ys = np.arange(n2)
        hx = (carrier1.split_x[:, None] * n2 + ys).ravel()
        hy = (carrier1.split_y[:, None] * n2 + ys).ravel()
        hz = (carrier1.split_z[:, None] * n2 + ys).ravel()
        xs = np.arange(n1)[:, None] * n2
        vx = (xs + carrier2.split_x).ravel()
        vy = (xs + carrier2.split_y).ravel()
        vz = (xs + carrier2.split_z).ravel()
        labels = [f"{a} {b}" for a in carrier1.labels for b in carrier2.labels]
        hcar = Carrier.from_splits(self.n, hx, hy, hz, commutative=carrier1.commutative,
                                   labels=labels, name=f"{carrier1.name}∘")
        vcar = Carrier.from_splits(self.n, vx, vy, vz, commutative=carrier2.commutative,
                                   labels=labels, name=f"{carrier2.name}•")
        hunit = vunit = None
        if self.row_space.unital:
            rows = np.flatnonzero(self.row_space.one() != target.bottom)
            hunit = [x * n2 + y for x in rows for y in range(n2)]
        if self.col_space.unital:
            cols = np.flatnonzero(self.col_space.one() != target.bottom)
            vunit = [x * n2 + y for x in range(n1) for y in cols]
        self.horizontal = SeriesSpace(hcar, target, unit=hunit,
                                      name=f"{target.name}^({carrier1.name}x{carrier2.name})∘")
        self.vertical = SeriesSpace(vcar, target, unit=vunit,
                                    name=f"{target.name}^({carrier1.name}x{carrier2.name})•")

    def hconvolve(self, F, G):
        return self.horizontal.conv(F, G)

    def vconvolve(self, F, G):
        return self.vertical.conv(F, G)

    def grid(self, F):
        return np.asarray(F).reshape(np.shape(F)[:-1] + (self.n1, self.n2))

    def row(self, F, y):
        """``F^y``: fix the second argument, a series over carrier1."""
        return self.grid(F)[..., :, y]

    def col(self, F, x):
        """``F^x``: fix the first argument, a series over carrier2."""
        return self.grid(F)[..., x, :]

    def from_predicate(self, pred):
        """Bi-series with ``pred(x, y)`` on native elements of the two carriers."""
        t = self.target
        top = t.unit if t.unit is not None else t.top
        arr = np.full(self.n, t.bottom, dtype=t.dtype)
        for i, a in enumerate(self.c1.elements):
            for j, b in enumerate(self.c2.elements):
                if pred(a, b):
                    arr[i * self.n2 + j] = top
        return arr

    def units(self):
        return self.horizontal.one(), self.vertical.one()


def bi_units(space):
    """The horizontal and vertical unit bi-series."""
    return space.units()


def partial_eval_row(space, F, y):
    return space.row(F, y)


def partial_eval_col(space, F, x):
    return space.col(F, x)


# -- law suites -------------------------------------------------------------------------

def _sections(space, which, F):
    """All sections of ``F`` at once: shape ``(..., count, size)``."""
    g = space.grid(F)
    return np.swapaxes(g, -1, -2) if which == "row" else g


def _section_law(space, which, op):
    """Homomorphism of the sections ``F -> F^y`` (which='row') or ``F -> F^x``."""
    small = space.row_space if which == "row" else space.col_space

    def law(s, *fs):
        shape = fs[0].shape[:-1]
        parts = [_sections(space, which, f) for f in fs]
        if op == "sum":
            lhs, rhs = s.sum(fs, shape), small.sum(parts, parts[0].shape[:-1])
        elif op == "inf":
            lhs, rhs = s.inf(fs, shape), small.inf(parts, parts[0].shape[:-1])
        else:
            lhs, rhs = s.conv(fs[0], fs[1]), small.conv(parts[0], parts[1])
        lhs = _sections(space, which, lhs)
        return lhs.reshape(shape + (-1,)), rhs.reshape(shape + (-1,)), "eq"
    return law


def _unit_section(space, which):
    def law(s, f):
        if which == "row":
            one, small, sect, count = space.horizontal.one(), space.row_space, space.row, space.n2
        else:
            one, small, sect, count = space.vertical.one(), space.col_space, space.col, space.n1
        lhs = np.concatenate([sect(one, k) for k in range(count)])
        rhs = np.concatenate([small.one() for _ in range(count)])
        shape = f.shape[:-1] + lhs.shape
        return np.broadcast_to(lhs, shape), np.broadcast_to(rhs, shape), "eq"
    return law


def check_biquantale_laws(space, budget=DEFAULT_BUDGET, seed=0, bound=DEFAULT_BOUND, pool_extra=None):
    """Quantale laws for both convolutions and the section homomorphisms."""
    reports = []
    for tag, s in (("h", space.horizontal), ("v", space.vertical)):
        pool = generator_pool(s, seed)
        if pool_extra is not None:
            pool = np.concatenate([pool[:3], pool_extra, pool[3:]])
        for name, arity, fn in lifted_law_table(s, lattice=(tag == "h")):
            reports.append(check_law(s, f"{tag}:{name}", arity, fn, pool=pool,
                                     budget=budget, seed=seed, bound=bound))
        reports.append(check_law(s, f"{tag}:meet-interchange", 4, _meet_interchange,
                                 pool=pool, budget=budget, seed=seed, bound=bound))
    h = space.horizontal
    pool = generator_pool(h, seed)
    if pool_extra is not None:
        pool = np.concatenate([pool[:3], pool_extra, pool[3:]])
    for which in ("row", "col"):
        for op in ("sum", "inf"):
            reports.append(check_law(h, f"section-{which}-{op}-3", 3,
                                     _section_law(space, which, op), pool=pool,
                                     budget=budget, seed=seed, bound=bound))
            reports.append(check_law(h, f"section-{which}-{op}-0", 1,
                                     _empty_section(space, which, op), pool=pool,
                                     budget=budget, seed=seed, bound=bound))
    reports.append(check_law(h, "section-row-hconv", 2, _section_law(space, "row", "conv"),
                             pool=pool, budget=budget, seed=seed, bound=bound))
    v = space.vertical
    reports.append(check_law(v, "section-col-vconv", 2, _section_law(space, "col", "conv"),
                             pool=pool, budget=budget, seed=seed, bound=bound))
    if space.horizontal.unital and space.row_space.unital:
        reports.append(check_law(h, "section-row-unit", 1, _unit_section(space, "row"),
                                 pool=pool, budget=1, seed=seed, bound=bound))
    if space.vertical.unital and space.col_space.unital:
        reports.append(check_law(v, "section-col-unit", 1, _unit_section(space, "col"),
                                 pool=pool, budget=1, seed=seed, bound=bound))
    return reports


def _empty_section(space, which, op):
    def law(s, f):
        return _empty_family(space, which, op, f)
    return law


def _empty_family(space, which, op, f):
    count, sect, small = ((space.n2, space.row, space.row_space) if which == "row"
                          else (space.n1, space.col, space.col_space))
    shape = f.shape[:-1]
    s = space.horizontal
    whole = s.sum([], shape) if op == "sum" else s.inf([], shape)
    lhs = np.concatenate([sect(whole, k) for k in range(count)], axis=-1)
    part = small.sum([], shape) if op == "sum" else small.inf([], shape)
    rhs = np.concatenate([part for _ in range(count)], axis=-1)
    return lhs, rhs, "eq"


def _meet_interchange(s, w, x, y, z):
    return s.conv(s.meet(w, x), s.meet(y, z)), s.meet(s.conv(w, y), s.conv(x, z)), "leq"


def noncommutativity_witness(space, pool=None, seed=0):
    """A pair ``(F, G)`` and a cell where ``F ∘ G`` and ``G ∘ F`` differ, or None."""
    h = space.horizontal
    pool = generator_pool(h, seed) if pool is None else pool
    for i in range(len(pool)):
        fg = h.conv(pool[i], pool)
        gf = h.conv(pool, pool[i])
        diff = np.argwhere(fg != gf)
        if len(diff):
            j, cell = (int(v) for v in diff[0])
            return pool[i], pool[j], cell
    return None

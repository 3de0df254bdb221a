"""Finite partial semigroups and monoids stored as dense composition tables.

Elements are integers ``0 .. size-1``.  An undefined product is stored as
``UNDEF`` (-1) in the table and surfaces as ``None`` from :func:`compose`.
"""

from __future__ import annotations

import numpy as np

from .report import LawReport

UNDEF = -1


class Carrier:
    """A finite partial semigroup, optionally unital.

    ``table[x, y]`` is the index of ``x . y`` or ``UNDEF``.  Carriers that are
    too large for a dense table (products used by two-dimensional series) can
    be built from their splitting triples instead, see :meth:`from_splits`.
    """

    def __init__(self, table, unit=None, commutative=False, elements=None,
                 labels=None, unbounded=None, name="carrier"):
        table = np.array(table, dtype=np.int32)
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise ValueError("composition table must be square")
        n = table.shape[0]
        if table.size and (table.min() < UNDEF or table.max() >= n):
            raise ValueError("composition table entry out of range")
        table.setflags(write=False)
        self.table = table
        self.size = n
        self._init_common(unit, commutative, elements, labels, unbounded, name)
        ys, zs = np.nonzero(table >= 0)
        xs = table[ys, zs]
        self._set_splits(xs, ys, zs)

    @classmethod
    def from_splits(cls, size, xs, ys, zs, unit=None, commutative=False,
                    elements=None, labels=None, unbounded=None, name="carrier"):
        """Build a carrier from its defined triples ``x = y . z`` only."""
        self = cls.__new__(cls)
        self.table = None
        self.size = int(size)
        self._init_common(unit, commutative, elements, labels, unbounded, name)
        self._set_splits(np.asarray(xs), np.asarray(ys), np.asarray(zs))
        return self

    @classmethod
    def from_function(cls, elements, compose, unit=None, commutative=False,
                      label=str, unbounded=None, name="carrier"):
        """Tabulate ``compose(a, b)`` (returning an element or None) over ``elements``."""
        elements = list(elements)
        index = {e: i for i, e in enumerate(elements)}
        if len(index) != len(elements):
            raise ValueError("duplicate elements")
        n = len(elements)
        table = np.full((n, n), UNDEF, dtype=np.int32)
        for i, a in enumerate(elements):
            for j, b in enumerate(elements):
                c = compose(a, b)
                if c is not None:
                    if c not in index:
                        raise ValueError(f"product {a!r}.{b!r} = {c!r} leaves the carrier")
                    table[i, j] = index[c]
        unit_index = None if unit is None else index[unit]
        flags = None
        if unbounded is not None:
            flags = [bool(unbounded(e)) for e in elements]
        return cls(table, unit=unit_index, commutative=commutative,
                   elements=elements, labels=[label(e) for e in elements],
                   unbounded=flags, name=name)

    def _init_common(self, unit, commutative, elements, labels, unbounded, name):
        n = self.size
        if unit is not None and not 0 <= unit < n:
            raise ValueError("unit out of range")
        self.unit = None if unit is None else int(unit)
        self.commutative = bool(commutative)
        self.elements = tuple(elements) if elements is not None else tuple(range(n))
        if len(self.elements) != n:
            raise ValueError("element list does not match carrier size")
        self.labels = tuple(labels) if labels is not None else tuple(str(e) for e in self.elements)
        self._index = None
        mask = np.zeros(n, dtype=bool) if unbounded is None else np.array(unbounded, dtype=bool)
        mask.setflags(write=False)
        self.unbounded = mask
        self.name = name
        self._lookup = None

    def _set_splits(self, xs, ys, zs):
        order = np.lexsort((zs, ys, xs))
        xs, ys, zs = (np.ascontiguousarray(a[order], dtype=np.int64) for a in (xs, ys, zs))
        for a in (xs, ys, zs):
            a.setflags(write=False)
        self.split_x, self.split_y, self.split_z = xs, ys, zs
        # segment layout of the inverted index: splittings of x are
        # positions starts[k] .. starts[k+1]-1 where x = present[k]
        present, starts = np.unique(xs, return_index=True)
        self.split_present = present
        self.split_starts = starts
        counts = np.zeros(self.size, dtype=np.int64)
        np.add.at(counts, xs, 1)
        self.split_counts = counts

    # -- element access -------------------------------------------------

    def index(self, element):
        """Position of a carrier element given in its native representation."""
        if self._index is None:
            self._index = {e: i for i, e in enumerate(self.elements)}
        return self._index[element]

    def label(self, x):
        return self.labels[x]

    def __len__(self):
        return self.size

    def __repr__(self):
        return f"Carrier({self.name!r}, size={self.size})"

    @property
    def is_futuristic(self):
        return bool(self.unbounded.any())


def compose(c, x, y):
    """Product of two elements, or None where it is undefined."""
    if c.table is not None:
        v = int(c.table[x, y])
        return None if v == UNDEF else v
    if c._lookup is None:
        c._lookup = {(int(b), int(d)): int(a)
                     for a, b, d in zip(c.split_x, c.split_y, c.split_z)}
    return c._lookup.get((int(x), int(y)))


def splittings(c, x):
    """All pairs ``(y, z)`` with ``y . z = x``, ordered by ``(y, z)``."""
    k = np.searchsorted(c.split_present, x)
    if k >= len(c.split_present) or c.split_present[k] != x:
        return []
    lo = c.split_starts[k]
    hi = lo + c.split_counts[x]
    return [(int(y), int(z)) for y, z in zip(c.split_y[lo:hi], c.split_z[lo:hi])]


def opposite(c):
    """The carrier with arguments swapped."""
    return Carrier(c.table.T, unit=c.unit, commutative=c.commutative,
                   elements=c.elements, labels=c.labels,
                   name=c.name + "^op")


def with_entry(c, x, y, value):
    """A copy of ``c`` with a single table entry overwritten (used for fixtures)."""
    table = np.array(c.table)
    table[x, y] = UNDEF if value is None else value
    out = Carrier(table, unit=c.unit, commutative=c.commutative,
                  elements=c.elements, labels=c.labels,
                  unbounded=c.unbounded, name=c.name + "*")
    for k, v in vars(c).items():        # instance extras such as heap locations
        vars(out).setdefault(k, v)
    return out


def _padded(table):
    # extra row and column so that UNDEF (-1) indexes an all-UNDEF slot
    n = table.shape[0]
    t = np.full((n + 1, n + 1), UNDEF, dtype=np.int32)
    t[:n, :n] = table
    return t


def check_carrier_laws(c, name_prefix=""):
    """Exhaustive associativity, unit and commutativity checks on a table."""
    if c.table is None:
        raise ValueError("carrier has no dense table")
    n = c.size
    t = _padded(c.table)
    reports = []
    bad = None
    for x in range(n):
        xy = t[x, :n]                       # x.y for all y
        lhs = t[xy[:, None], np.arange(n)[None, :]]    # (x.y).z
        rhs = t[x, t[:n, :n]]               # x.(y.z)
        diff = np.argwhere(lhs != rhs)
        if len(diff):
            y, z = diff[0]
            bad = (x, int(y), int(z))
            break
    reports.append(_carrier_report(c, name_prefix + "carrier-associativity", n ** 3, bad))
    if c.unit is not None:
        e = c.unit
        ar = np.arange(n)
        left = np.flatnonzero(c.table[e, :] != ar)
        reports.append(_carrier_report(c, name_prefix + "carrier-left-unit", n,
                                       None if not len(left) else (e, int(left[0]))))
        right = np.flatnonzero(c.table[:, e] != ar)
        reports.append(_carrier_report(c, name_prefix + "carrier-right-unit", n,
                                       None if not len(right) else (int(right[0]), e)))
    if c.commutative:
        diff = np.argwhere(c.table != c.table.T)
        reports.append(_carrier_report(c, name_prefix + "carrier-commutativity", n * n,
                                       None if not len(diff) else tuple(int(v) for v in diff[0])))
    if c.is_futuristic:
        reports.extend(_futuristic_reports(c, name_prefix))
    return reports


def _futuristic_reports(c, prefix):
    n = c.size
    t = c.table
    u = c.unbounded
    defined = t >= 0
    # unbounded elements compose with nothing on their right
    left_unbounded = np.argwhere(defined & u[:, None])
    r1 = _carrier_report(c, prefix + "carrier-unbounded-left-undefined", n * n,
                         None if not len(left_unbounded) else tuple(int(v) for v in left_unbounded[0]))
    # bounded products have bounded left factors
    prod_bounded = defined & ~u[np.where(defined, t, 0)]
    bad = np.argwhere(prod_bounded & u[:, None])
    r2 = _carrier_report(c, prefix + "carrier-bounded-product-left-factor", n * n,
                         None if not len(bad) else tuple(int(v) for v in bad[0]))
    return [r1, r2]


def _carrier_report(c, law, count, bad):
    if bad is None:
        return LawReport(law, "pass", count, mode="exhaustive")
    return LawReport(law, "fail", count, mode="exhaustive",
                     witness=[c.label(v) for v in bad])


class BiCarrier:
    """One element set with two partial compositions (horizontal and vertical)."""

    def __init__(self, horizontal, vertical, name="bicarrier"):
        if horizontal.size != vertical.size:
            raise ValueError("both compositions must share the element set")
        self.horizontal = horizontal
        self.vertical = vertical
        self.size = horizontal.size
        self.elements = horizontal.elements
        self.labels = horizontal.labels
        self.name = name

    def index(self, element):
        return self.horizontal.index(element)

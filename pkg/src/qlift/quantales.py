"""Finite value quantales used as targets of power series.

Every value is encoded as a small integer so that series are plain numpy
arrays.  All operations are vectorised and broadcast like numpy ufuncs.
"""

from __future__ import annotations

import itertools

import numpy as np


class Quantale:
    """Interface: a finite lattice with an associative multiplication."""

    name = "quantale"
    dtype = np.int64
    bottom = 0
    top = 0
    unit = None
    commutative = False
    partial = False
    join_ufunc = None       # set when join is a numpy ufunc supporting reduceat
    meet_ufunc = None

    def join(self, a, b):
        raise NotImplementedError

    def meet(self, a, b):
        raise NotImplementedError

    def mult(self, a, b):
        raise NotImplementedError

    def values(self):
        """All values, as an array."""
        raise NotImplementedError

    def label(self, v):
        return str(int(v))

    def leq(self, a, b):
        return self.join(a, b) == b

    def join_all(self, values):
        out = self.bottom
        for v in values:
            out = self.join(out, v)
        return out

    def meet_all(self, values):
        out = self.top
        for v in values:
            out = self.meet(out, v)
        return out

    def reduce_join(self, prod, starts, lengths):
        """Join each segment ``prod[..., s:s+len]``; segments are nonempty."""
        if self.join_ufunc is not None:
            return self.join_ufunc.reduceat(prod, starts, axis=-1)
        out = prod[..., starts]
        longest = int(lengths.max()) if len(lengths) else 0
        for k in range(1, longest):
            sel = np.flatnonzero(lengths > k)
            out[..., sel] = self.join(out[..., sel], prod[..., starts[sel] + k])
        return out

    def random(self, rng, shape, density=0.5):
        """Random values; ``density`` is the chance of a non-bottom entry."""
        vals = self.values()
        nonbottom = vals[vals != self.bottom]
        pick = nonbottom[rng.integers(0, len(nonbottom), size=shape)]
        keep = rng.random(shape) < density
        return np.where(keep, pick, self.bottom).astype(self.dtype)

    def __repr__(self):
        return self.name


class BooleanQuantale(Quantale):
    """Two values; multiplication is conjunction."""

    name = "boolean"
    dtype = np.uint8
    bottom = 0
    top = 1
    unit = 1
    commutative = True
    join_ufunc = np.maximum
    meet_ufunc = np.minimum

    def join(self, a, b):
        return np.maximum(a, b)

    def meet(self, a, b):
        return np.minimum(a, b)

    def mult(self, a, b):
        return np.minimum(a, b)

    def values(self):
        return np.array([0, 1], dtype=self.dtype)

    def label(self, v):
        return "1" if v else "0"


class MaxPlusQuantale(Quantale):
    """Naturals up to ``cap`` with an adjoined least element and infinity.

    Join is max, meet is min and multiplication is saturating addition.  The
    least element (encoded -1) annihilates, which the lifted annihilation laws
    need; infinity is encoded ``cap + 1`` and absorbs every sum above the cap.
    """

    dtype = np.int16
    bottom = -1
    unit = 0
    commutative = True
    join_ufunc = np.maximum
    meet_ufunc = np.minimum

    def __init__(self, cap):
        if cap < 0:
            raise ValueError("cap must be non-negative")
        self.cap = cap
        self.top = cap + 1
        self.name = f"maxplus(cap={cap})"

    def join(self, a, b):
        return np.maximum(a, b)

    def meet(self, a, b):
        return np.minimum(a, b)

    def mult(self, a, b):
        a = np.asarray(a, dtype=self.dtype)
        b = np.asarray(b, dtype=self.dtype)
        s = np.minimum(a.astype(np.int32) + b, self.top).astype(self.dtype)
        return np.where((a < 0) | (b < 0), self.bottom, s).astype(self.dtype)

    def values(self):
        return np.arange(-1, self.cap + 2, dtype=self.dtype)

    def label(self, v):
        v = int(v)
        if v < 0:
            return "-inf"
        if v > self.cap:
            return "inf"
        return str(v)


class TableQuantale(Quantale):
    """A quantale given by explicit join, meet and multiplication tables."""

    dtype = np.int32

    def __init__(self, labels, join, meet, mult, bottom, top, unit=None,
                 commutative=False, name="table"):
        self.labels = tuple(labels)
        n = len(self.labels)
        self.join_table = np.asarray(join, dtype=self.dtype)
        self.meet_table = np.asarray(meet, dtype=self.dtype)
        self.mult_table = np.asarray(mult, dtype=self.dtype)
        for t in (self.join_table, self.meet_table, self.mult_table):
            if t.shape != (n, n):
                raise ValueError("tables must be square over the value set")
        self.bottom = bottom
        self.top = top
        self.unit = unit
        self.commutative = commutative
        self.name = name

    def join(self, a, b):
        return self.join_table[a, b]

    def meet(self, a, b):
        return self.meet_table[a, b]

    def mult(self, a, b):
        return self.mult_table[a, b]

    def values(self):
        return np.arange(len(self.labels), dtype=self.dtype)

    def label(self, v):
        return self.labels[int(v)]


class PowersetQuantale(Quantale):
    """Subsets of a finite partial monoid under the complex product.

    A value is a bitmask over carrier elements.  The product of two sets is
    the set of all defined products of their members.
    """

    dtype = np.int64
    join_ufunc = np.bitwise_or
    meet_ufunc = np.bitwise_and
    TABLE_LIMIT = 1024

    def __init__(self, carrier, unit_set=None):
        n = carrier.size
        if n > 62:
            raise ValueError("powerset target limited to 62 carrier elements")
        self.carrier = carrier
        self.n = n
        self.bottom = 0
        self.top = (1 << n) - 1
        if unit_set is not None:
            self.unit = int(sum(1 << int(x) for x in unit_set))
        elif carrier.unit is not None:
            self.unit = 1 << carrier.unit
        else:
            self.unit = None
        self.commutative = carrier.commutative
        self.name = f"powerset({carrier.name})"
        self._bits = np.int64(1) << np.arange(n, dtype=np.int64)
        self._table = None
        if (1 << n) <= self.TABLE_LIMIT:
            allv = np.arange(1 << n, dtype=np.int64)
            self._table = np.stack([self._product(allv, np.full_like(allv, b))
                                    for b in allv], axis=1)

    def decode(self, v):
        """Boolean membership array (..., n) of bitmask values."""
        return ((np.asarray(v, dtype=np.int64)[..., None] & self._bits) != 0)

    def encode(self, bits):
        return (np.asarray(bits, dtype=np.int64) * self._bits).sum(axis=-1)

    def _product(self, a, b):
        c = self.carrier
        A = self.decode(a)
        B = self.decode(b)
        out = np.zeros(np.broadcast(a, b).shape + (self.n,), dtype=bool)
        if len(c.split_x):
            prod = A[..., c.split_y] & B[..., c.split_z]
            red = np.logical_or.reduceat(prod, c.split_starts, axis=-1)
            out[..., c.split_present] = red
        return self.encode(out)

    def join(self, a, b):
        return np.bitwise_or(a, b)

    def meet(self, a, b):
        return np.bitwise_and(a, b)

    def mult(self, a, b):
        if self._table is not None:
            return self._table[a, b]
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        return self._product(a, b)

    def values(self):
        return np.arange(1 << self.n, dtype=np.int64)

    def random(self, rng, shape, density=0.5):
        bits = rng.random(tuple(np.atleast_1d(shape)) + (self.n,)) < density * 0.6
        return self.encode(bits).reshape(shape)

    def members(self, v):
        return [self.carrier.label(i) for i in range(self.n) if (int(v) >> i) & 1]

    def label(self, v):
        return "{" + ",".join(self.members(v)) + "}"


# -- vectors under separation ----------------------------------------------

def vector_separate(u, v):
    """Componentwise separation: defined when no component is nonzero on both sides."""
    if len(u) != len(v):
        raise ValueError("dimension mismatch")
    if any(a != 0 and b != 0 for a, b in zip(u, v)):
        return None
    return tuple(a + b for a, b in zip(u, v))


ABSENT = 0


class VectorQuantale(TableQuantale):
    """Vectors over ``values`` with separation as a partial multiplication.

    The partial multiplication is completed into a total quantale with two
    extra values.  ``undef`` (code 0) is the least element: an undefined series
    value, or a join with no summands; it annihilates products and is the unit
    of joins.  ``clash`` (the last code) records an undefined product of two
    vectors; it is the greatest element, so it absorbs every join and product
    it takes part in.  Vectors in between are ordered componentwise.

    With ``clash="discard"`` undefined products are dropped instead, i.e.
    mapped to ``undef``.  That variant is not associative and is kept only to
    exhibit the failure.
    """

    partial = True

    def __init__(self, dim, values=(0, 1, 2), clash="poison"):
        if clash not in ("poison", "discard"):
            raise ValueError("clash must be 'poison' or 'discard'")
        values = tuple(sorted(values))
        if values[0] != 0:
            raise ValueError("value set must contain 0 as its least member")
        self.dim = dim
        self.value_set = values
        self.clash_mode = clash
        self.vectors = list(itertools.product(values, repeat=dim))
        vcode = {v: i + 1 for i, v in enumerate(self.vectors)}
        self.vector_code = vcode
        n = len(self.vectors) + 2
        clash_code = n - 1
        self.clash = clash_code
        labels = ["undef"] + [str(v) for v in self.vectors] + ["clash"]
        join = np.zeros((n, n), dtype=np.int32)
        meet = np.zeros((n, n), dtype=np.int32)
        mult = np.zeros((n, n), dtype=np.int32)
        for a in range(n):
            for b in range(n):
                join[a, b] = self._lattice(a, b, max, clash_code)
                meet[a, b] = self._lattice_meet(a, b, clash_code)
                mult[a, b] = self._mult(a, b, clash_code)
        zero = vcode[(0,) * dim]
        super().__init__(labels, join, meet, mult, bottom=ABSENT, top=clash_code,
                         unit=zero, commutative=True,
                         name=f"vectors(dim={dim},values={list(values)},{clash})")

    def _vec(self, code):
        return self.vectors[code - 1]

    def _lattice(self, a, b, op, clash):
        if a == ABSENT:
            return b
        if b == ABSENT:
            return a
        if a == clash or b == clash:
            return clash
        return self.vector_code[tuple(op(x, y) for x, y in zip(self._vec(a), self._vec(b)))]

    def _lattice_meet(self, a, b, clash):
        if a == ABSENT or b == ABSENT:
            return ABSENT
        if a == clash:
            return b
        if b == clash:
            return a
        return self.vector_code[tuple(min(x, y) for x, y in zip(self._vec(a), self._vec(b)))]

    def _mult(self, a, b, clash):
        if a == ABSENT or b == ABSENT:
            return ABSENT
        if a == clash or b == clash:
            return clash if self.clash_mode == "poison" else ABSENT
        s = vector_separate(self._vec(a), self._vec(b))
        if s is None or s not in self.vector_code:
            return clash if self.clash_mode == "poison" else ABSENT
        return self.vector_code[s]

    def code(self, v):
        """Encode a vector tuple, or None for an undefined value."""
        if v is None:
            return ABSENT
        return self.vector_code[tuple(v)]

    def decode(self, c):
        """The vector for a code; None for ``undef`` and ``"clash"`` for a clash."""
        c = int(c)
        if c == ABSENT:
            return None
        if c == self.clash:
            return "clash"
        return self._vec(c)

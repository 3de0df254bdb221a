"""Power series over a finite partial semigroup: the lifted quantale Q^S.

A :class:`SeriesSpace` fixes the carrier and the value quantale and
implements the lattice operations and convolution on batches of series
stored as arrays of shape ``(..., carrier.size)``.  :class:`PowerSeries` is a
thin immutable wrapper with operator syntax for interactive use.
"""

from __future__ import annotations

import numpy as np

from .carrier import compose
from .quantales import BooleanQuantale


class StarDivergence(RuntimeError):
    """Kleene iteration did not stabilise within its cap."""


class SeriesSpace:
    """The function space ``target ** carrier`` with pointwise lattice order.

    ``unit`` selects the convolution unit: ``"carrier"`` uses the carrier
    unit, a predicate (callable on carrier indices) or index collection gives
    a directly defined unit, and ``None`` means the space is not unital.
    With ``futuristic=True`` convolution gains the extra summand ``f x`` at
    unbounded points ``x``.
    """

    def __init__(self, carrier, target, unit="carrier", futuristic=False, name=None):
        self.carrier = carrier
        self.target = target
        self.n = carrier.size
        self.futuristic = futuristic
        self.name = name or f"{target.name}^{carrier.name}"
        t = target
        self.dtype = t.dtype
        one = None
        if t.unit is not None:
            if unit == "carrier":
                if carrier.unit is not None:
                    one = self._indicator([carrier.unit], t.unit)
            elif callable(unit):
                one = self._indicator([x for x in range(self.n) if unit(x)], t.unit)
            elif unit is not None:
                one = self._indicator(list(unit), t.unit)
        self._one = one
        self._split_lengths = carrier.split_counts[carrier.split_present]

    # -- constants ---------------------------------------------------------

    def _indicator(self, xs, value):
        arr = np.full(self.n, self.target.bottom, dtype=self.dtype)
        arr[list(xs)] = value
        arr.setflags(write=False)
        return arr

    @property
    def unital(self):
        return self._one is not None

    def zero(self):
        return np.full(self.n, self.target.bottom, dtype=self.dtype)

    def full(self):
        return np.full(self.n, self.target.top, dtype=self.dtype)

    def one(self):
        if self._one is None:
            raise ValueError(f"{self.name} has no convolution unit")
        return self._one.copy()

    def atom(self, x, value=None):
        """Series with ``value`` (default: the target unit or top) at ``x`` only."""
        if value is None:
            value = self.target.unit if self.target.unit is not None else self.target.top
        arr = self.zero()
        arr[x] = value
        return arr

    def char(self, xs):
        """Characteristic series of a set of carrier indices."""
        top = self.target.unit if self.target.unit is not None else self.target.top
        arr = self.zero()
        arr[list(xs)] = top
        return arr

    # -- pointwise lattice ---------------------------------------------------

    def join(self, f, g):
        return np.asarray(self.target.join(f, g), dtype=self.dtype)

    def meet(self, f, g):
        return np.asarray(self.target.meet(f, g), dtype=self.dtype)

    def sum(self, fs, shape=()):
        out = np.broadcast_to(self.zero(), shape + (self.n,)).copy()
        for f in fs:
            out = self.join(out, f)
        return out

    def inf(self, fs, shape=()):
        out = np.broadcast_to(self.full(), shape + (self.n,)).copy()
        for f in fs:
            out = self.meet(out, f)
        return out

    def leq(self, f, g):
        """Pointwise order, reduced over the carrier axis."""
        return np.all(self.join(f, g) == g, axis=-1)

    def eq(self, f, g):
        return np.all(f == g, axis=-1)

    # -- convolution ---------------------------------------------------------

    def conv(self, f, g):
        """Convolution of (batches of) series."""
        c = self.carrier
        t = self.target
        f = np.asarray(f, dtype=self.dtype)
        g = np.asarray(g, dtype=self.dtype)
        shape = np.broadcast_shapes(f.shape[:-1], g.shape[:-1])
        out = np.full(shape + (self.n,), t.bottom, dtype=self.dtype)
        if len(c.split_x):
            prod = np.asarray(t.mult(f[..., c.split_y], g[..., c.split_z]), dtype=self.dtype)
            prod = np.broadcast_to(prod, shape + prod.shape[-1:])
            out[..., c.split_present] = t.reduce_join(np.ascontiguousarray(prod),
                                                      c.split_starts, self._split_lengths)
        if self.futuristic and c.unbounded.any():
            u = c.unbounded
            out[..., u] = t.join(out[..., u], np.broadcast_to(f, out.shape)[..., u])
        return out

    def power(self, f, k):
        if k == 0:
            return np.broadcast_to(self.one(), np.shape(f)).copy()
        out = np.asarray(f)
        for _ in range(k - 1):
            out = self.conv(out, f)
        return out

    def star(self, f, cap=1000):
        """Least fixpoint of ``a -> 1 + f.a`` by iteration from zero."""
        f = np.asarray(f, dtype=self.dtype)
        one = self.one()
        a = np.broadcast_to(self.zero(), f.shape).copy()
        for _ in range(cap):
            nxt = self.join(one, self.conv(f, a))
            if np.array_equal(nxt, a):
                return a
            a = nxt
        raise StarDivergence(f"star did not stabilise within {cap} iterations")

    def wand(self, f, g):
        """Greatest ``h`` with ``f * h <= g`` (Boolean targets only)."""
        if not isinstance(self.target, BooleanQuantale):
            raise TypeError("wand is only defined for the Boolean target")
        c = self.carrier
        f = np.asarray(f, dtype=np.uint8)
        g = np.asarray(g, dtype=np.uint8)
        shape = np.broadcast_shapes(f.shape[:-1], g.shape[:-1])
        out = np.ones(shape + (self.n,), dtype=np.uint8)
        # for each defined product x = z . y: contributes (f z => g x) at y
        ok = (1 - f[..., c.split_y]) | g[..., c.split_x]
        ok = np.broadcast_to(ok, shape + ok.shape[-1:])
        order = np.argsort(c.split_z, kind="stable")
        zs = c.split_z[order]
        present, starts = np.unique(zs, return_index=True)
        if len(present):
            out[..., present] = np.minimum.reduceat(ok[..., order], starts, axis=-1)
        return out

    # -- sampling ------------------------------------------------------------

    def random(self, rng, count):
        """``count`` random series with varying densities."""
        dens = rng.uniform(0.05, 0.95, size=(count, 1))
        vals = self.target.random(rng, (count, self.n), density=1.0)
        keep = rng.random((count, self.n)) < dens
        return np.where(keep, vals, self.target.bottom).astype(self.dtype)

    def size(self):
        """Number of series in the space (as a Python int)."""
        return len(self.target.values()) ** self.n

    def enumerate(self):
        """Every series in the space, as a ``(size, n)`` array."""
        vals = self.target.values()
        k = len(vals)
        total = k ** self.n
        idx = np.arange(total)
        digits = np.empty((total, self.n), dtype=np.int64)
        for j in range(self.n):
            digits[:, j] = idx % k
            idx = idx // k
        return vals[digits].astype(self.dtype)

    # -- display -------------------------------------------------------------

    def describe(self, f):
        f = np.asarray(f)
        t = self.target
        nz = [x for x in range(self.n) if f[x] != t.bottom]
        if isinstance(t, BooleanQuantale):
            return "{" + ", ".join(self.carrier.label(x) for x in nz) + "}"
        return "{" + ", ".join(f"{self.carrier.label(x)}: {t.label(f[x])}" for x in nz) + "}"

    def series(self, values):
        return PowerSeries(self, values)

    def __repr__(self):
        return f"SeriesSpace({self.name})"


class PowerSeries:
    """An immutable series in a :class:`SeriesSpace`."""

    __slots__ = ("space", "values")

    def __init__(self, space, values):
        arr = np.array(values, dtype=space.dtype)
        if arr.shape != (space.n,):
            raise ValueError(f"expected {space.n} values, got shape {arr.shape}")
        arr.setflags(write=False)
        self.space = space
        self.values = arr

    def _check(self, other):
        if not isinstance(other, PowerSeries) or other.space is not self.space:
            raise ValueError("series live in different spaces")
        return other.values

    def __add__(self, other):
        return PowerSeries(self.space, self.space.join(self.values, self._check(other)))

    def __and__(self, other):
        return PowerSeries(self.space, self.space.meet(self.values, self._check(other)))

    def __mul__(self, other):
        return PowerSeries(self.space, self.space.conv(self.values, self._check(other)))

    def __le__(self, other):
        return bool(self.space.leq(self.values, self._check(other)))

    def __eq__(self, other):
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return other.space is self.space and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((id(self.space), self.values.tobytes()))

    def __getitem__(self, x):
        return self.values[x]

    def at(self, element):
        """Value at a carrier element given in its native representation."""
        return self.values[self.space.carrier.index(element)]

    def __repr__(self):
        return f"PowerSeries({self.space.describe(self.values)})"


# -- functional interface ----------------------------------------------------

def _space_of(fs):
    spaces = {id(f.space): f.space for f in fs}
    if len(spaces) > 1:
        raise ValueError("series live in different spaces")
    return next(iter(spaces.values()))


def _family_space(fs, space):
    if fs:
        s = _space_of(fs)
        if space is not None and s is not space:
            raise ValueError("series live in different spaces")
        return s
    if space is None:
        raise ValueError("empty family needs an explicit space")
    return space


def sum_family(fs, space=None):
    """Pointwise join; the empty family gives the zero series."""
    fs = list(fs)
    space = _family_space(fs, space)
    return PowerSeries(space, space.sum([f.values for f in fs]))


def inf_family(fs, space=None):
    """Pointwise meet; the empty family gives the all-top series."""
    fs = list(fs)
    space = _family_space(fs, space)
    return PowerSeries(space, space.inf([f.values for f in fs]))


def convolve(f, g):
    space = _space_of([f, g])
    if space.target.partial:
        raise TypeError("partial target: use convolve_partial")
    return PowerSeries(space, space.conv(f.values, g.values))


def convolve_partial(f, g):
    """Convolution into a partial target (vectors under separation)."""
    space = _space_of([f, g])
    if not space.target.partial:
        raise TypeError("target is total: use convolve")
    return PowerSeries(space, space.conv(f.values, g.values))


def unit_series(space):
    if space.carrier.unit is None or space.target.unit is None:
        raise ValueError("unit series needs units on both carrier and target")
    return PowerSeries(space, space._indicator([space.carrier.unit], space.target.unit))


def direct_unit(space, predicate):
    if space.target.unit is None:
        raise ValueError("target has no unit")
    xs = [x for x in range(space.n) if predicate(x)]
    return PowerSeries(space, space._indicator(xs, space.target.unit))


def star(f, cap=1000):
    return PowerSeries(f.space, f.space.star(f.values, cap=cap))


def wand(f, g):
    space = _space_of([f, g])
    return PowerSeries(space, space.wand(f.values, g.values))


def complex_product(carrier, xs, ys):
    """Set of all defined products; independent of the convolution engine."""
    out = set()
    for x in xs:
        for y in ys:
            z = compose(carrier, x, y)
            if z is not None:
                out.add(z)
    return out

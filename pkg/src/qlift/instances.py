"""Constructors for the concrete partial semigroups and their targets."""

from __future__ import annotations

import itertools
from typing import NamedTuple

from .carrier import BiCarrier, Carrier
from .quantales import MaxPlusQuantale, vector_separate

MAX_CARRIER = 4096


def _check_size(n):
    if n > MAX_CARRIER:
        raise ValueError(f"carrier of size {n} exceeds the bound {MAX_CARRIER}")


# -- words ---------------------------------------------------------------------

def words(alphabet, max_len):
    out = []
    for k in range(max_len + 1):
        out.extend("".join(w) for w in itertools.product(alphabet, repeat=k))
    return out


def _word_label(w):
    return w if w else "ε"


def make_language(alphabet="ab", max_len=2):
    """Words up to ``max_len``; longer concatenations are undefined."""
    if max_len < 0 or not alphabet:
        raise ValueError("need a nonempty alphabet and max_len >= 0")
    _check_size(sum(len(alphabet) ** k for k in range(max_len + 1)))

    def cat(u, v):
        w = u + v
        return w if len(w) <= max_len else None

    return Carrier.from_function(words(alphabet, max_len), cat, unit="",
                                 label=_word_label, name=f"words({alphabet},{max_len})")


# -- relations -------------------------------------------------------------------

def make_relation(points=3):
    """Ordered pairs over ``1..points``; (a,b).(b,c) = (a,c)."""
    if points < 1:
        raise ValueError("need at least one point")
    pairs = [(a, b) for a in range(1, points + 1) for b in range(1, points + 1)]

    def comp(p, q):
        return (p[0], q[1]) if p[1] == q[0] else None

    return Carrier.from_function(pairs, comp, label=lambda p: f"({p[0]},{p[1]})",
                                 name=f"pairs({points})")


def diagonal(carrier):
    """Indices of the pairs (a, a) of a relation carrier."""
    return [i for i, (a, b) in enumerate(carrier.elements) if a == b]


# -- traces ------------------------------------------------------------------------

def make_trace(states="pq", labels="a", max_transitions=2):
    """Alternating state/label words composed by fusing the shared state."""
    if not states or not labels:
        raise ValueError("need nonempty state and label alphabets")
    traces = []
    for k in range(max_transitions + 1):
        for ss in itertools.product(states, repeat=k + 1):
            for ls in itertools.product(labels, repeat=k):
                t = [ss[0]]
                for lab, st in zip(ls, ss[1:]):
                    t += [lab, st]
                traces.append(tuple(t))
    _check_size(len(traces))

    def fuse(s, t):
        if s[-1] != t[0]:
            return None
        r = s + t[1:]
        return r if len(r) // 2 <= max_transitions else None

    return Carrier.from_function(traces, fuse, label="".join,
                                 name=f"traces({states},{labels},{max_transitions})")


def single_state_traces(carrier):
    return [i for i, t in enumerate(carrier.elements) if len(t) == 1]


# -- intervals ------------------------------------------------------------------

class Interval(NamedTuple):
    """Interval over a finite chain; ``lo > hi`` never occurs except for EMPTY."""

    lo: int
    hi: int
    lo_closed: bool = True
    hi_closed: bool = True

    def __str__(self):
        if self.lo > self.hi:
            return "∅"
        return f"{'[' if self.lo_closed else '('}{self.lo},{self.hi}{']' if self.hi_closed else ')'}"

    @property
    def empty(self):
        return self.lo > self.hi


EMPTY = Interval(1, 0, False, False)


def _fusion_intervals(n):
    return [Interval(a, b) for a in range(n) for b in range(a, n)]


def _nofusion_intervals(n):
    out = [EMPTY]
    for a in range(n):
        out.append(Interval(a, a))
        for b in range(a + 1, n):
            for lc in (True, False):
                for hc in (True, False):
                    out.append(Interval(a, b, lc, hc))
    return out


def _nofusion_compose(x, y):
    # defined when x lies entirely before y and x u y is again an interval
    if x.empty:
        return y
    if y.empty:
        return x
    if x.hi != y.lo:
        return None
    if x.hi_closed == y.lo_closed:
        return None         # a gap (both open) or an overlap (both closed)
    return Interval(x.lo, y.hi, x.lo_closed, y.hi_closed)


def make_interval(chain_size=5, mode="fusion"):
    """Intervals over the chain ``0..chain_size-1``.

    ``fusion``: closed intervals, [a,b].[b,c] = [a,c].
    ``nofusion``: intervals with open or closed ends plus the empty interval;
    x.y is defined when every point of x precedes every point of y and the
    union is an interval.  The empty interval is the unit.
    """
    if chain_size < 1:
        raise ValueError("chain must be nonempty")
    if mode == "fusion":
        def comp(x, y):
            return Interval(x.lo, y.hi) if x.hi == y.lo else None
        return Carrier.from_function(_fusion_intervals(chain_size), comp, label=str,
                                     name=f"intervals({chain_size})")
    if mode == "nofusion":
        return Carrier.from_function(_nofusion_intervals(chain_size), _nofusion_compose,
                                     unit=EMPTY, label=str,
                                     name=f"intervals-nofusion({chain_size})")
    raise ValueError(f"unknown interval mode {mode!r}")


def point_intervals(carrier):
    return [i for i, x in enumerate(carrier.elements) if x.lo == x.hi]


# -- multisets ---------------------------------------------------------------------

def make_multiset(symbols="abcd", cap=9):
    """Idempotent symbol carrier with the saturating max-plus target.

    A series over this carrier is a multiset: its value at a symbol is the
    multiplicity.  Convolution adds multiplicities, join and meet take max
    and min.
    """
    carrier = Carrier.from_function(list(symbols), lambda x, y: x if x == y else None,
                                    commutative=True, name=f"symbols({symbols})")
    return carrier, MaxPlusQuantale(cap)


def multiset_values(space, text):
    """Parse ``"a2b5c"`` into a multiset series array (absent symbols get 0)."""
    import re
    arr = space.zero()
    arr[:] = 0
    for sym, count in re.findall(r"([a-z])(\d*)", text):
        arr[space.carrier.index(sym)] = int(count) if count else 1
    return arr


def multiset_text(space, arr):
    parts = []
    for x, sym in enumerate(space.carrier.elements):
        v = int(arr[x])
        if v > 0:
            parts.append(sym + ("" if v == 1 else str(v)))
    return "".join(parts)


# -- separation carriers -------------------------------------------------------

def make_separating(kind, **params):
    """Commutative partial monoids of resources.

    kinds: ``multiset_cap`` (symbols, cap), ``disjoint_sets`` (base),
    ``heaplet`` (locations, values), ``vector`` (dim, values).
    """
    if kind == "multiset_cap":
        symbols = params.get("symbols", "ab")
        cap = params.get("cap", 3)
        elems = list(itertools.product(range(cap + 1), repeat=len(symbols)))
        _check_size(len(elems))

        def add(m, k):
            s = tuple(a + b for a, b in zip(m, k))
            return s if max(s, default=0) <= cap else None

        def lab(m):
            return "".join(sym + ("" if c == 1 else str(c)) for sym, c in zip(symbols, m) if c) or "∅"

        return Carrier.from_function(elems, add, unit=(0,) * len(symbols), commutative=True,
                                     label=lab, name=f"multisets({symbols},{cap})")
    if kind == "disjoint_sets":
        base = tuple(params.get("base", (1, 2, 3)))
        elems = [frozenset(c) for k in range(len(base) + 1)
                 for c in itertools.combinations(base, k)]
        _check_size(len(elems))

        def union(a, b):
            return a | b if not (a & b) else None

        def lab(s):
            return "{" + ",".join(str(v) for v in sorted(s)) + "}"

        return Carrier.from_function(elems, union, unit=frozenset(), commutative=True,
                                     label=lab, name=f"sets({len(base)})")
    if kind == "heaplet":
        locations = tuple(params.get("locations", ("l1", "l2")))
        values = tuple(params.get("values", (0, 1)))
        elems = list(itertools.product((None,) + values, repeat=len(locations)))
        _check_size(len(elems))

        def join_heaps(h, k):
            if any(a is not None and b is not None for a, b in zip(h, k)):
                return None
            return tuple(a if a is not None else b for a, b in zip(h, k))

        def lab(h):
            return "{" + ",".join(f"{l}↦{v}" for l, v in zip(locations, h) if v is not None) + "}"

        c = Carrier.from_function(elems, join_heaps, unit=(None,) * len(locations),
                                  commutative=True, label=lab,
                                  name=f"heaplets({len(locations)}x{len(values)})")
        c.locations = locations
        c.values = values
        return c
    if kind == "vector":
        dim = params.get("dim", 2)
        values = tuple(params.get("values", (0, 1, 2)))
        elems = list(itertools.product(values, repeat=dim))
        _check_size(len(elems))
        return Carrier.from_function(elems, vector_separate, unit=(0,) * dim,
                                     commutative=True, label=str,
                                     name=f"vectors({dim},{len(values)})")
    raise ValueError(f"unknown separating kind {kind!r}")


# -- two-dimensional boxes ---------------------------------------------------------

def make_box2d(chain_size=3):
    """Boxes ``x▫y`` of closed intervals; horizontal and vertical fusion."""
    ivs = _fusion_intervals(chain_size)
    boxes = [(x, y) for x in ivs for y in ivs]
    _check_size(len(boxes))

    def hcomp(a, b):
        (x1, y1), (x2, y2) = a, b
        if y1 == y2 and x1.hi == x2.lo:
            return (Interval(x1.lo, x2.hi), y1)
        return None

    def vcomp(a, b):
        (x1, y1), (x2, y2) = a, b
        if x1 == x2 and y1.hi == y2.lo:
            return (x1, Interval(y1.lo, y2.hi))
        return None

    def lab(b):
        return f"{b[0]}▫{b[1]}"

    h = Carrier.from_function(boxes, hcomp, label=lab, name=f"boxes-h({chain_size})")
    v = Carrier.from_function(boxes, vcomp, label=lab, name=f"boxes-v({chain_size})")
    return BiCarrier(h, v, name=f"boxes({chain_size})")


# -- forgetful maps (carrier morphisms) ---------------------------------------

def forget_states(trace):
    """The label word of a trace."""
    return "".join(trace[1::2])


def forget_labels(trace):
    """The (first, last) state pair of a trace."""
    return trace[0], trace[-1]

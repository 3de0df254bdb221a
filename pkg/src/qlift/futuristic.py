"""Futuristic carriers: unbounded elements never compose on the left.

Convolution over such a carrier adds the summand ``f x`` at every unbounded
point ``x``, so a behaviour that runs forever under ``f`` survives a
sequential composition with anything.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .carrier import Carrier
from .instances import Interval, words
from .laws import DEFAULT_BOUND, DEFAULT_BUDGET, check_law, generator_pool, lifted_law_table
from .series import SeriesSpace


class OmegaWord(NamedTuple):
    """The infinite word ``prefix`` followed by ``letter`` repeated forever."""

    prefix: str
    letter: str

    def __str__(self):
        return f"{self.prefix}{self.letter}^ω"


def make_infinite_words(alphabet="a", finite_cap=2):
    """Finite words up to the cap and the infinite words ``v ℓ^ω`` with ``|v| <= cap``.

    An infinite word keeps its finite prefix, so ``a . a^ω`` is the element
    ``aa^ω``.  Concatenating a finite word onto an infinite one is defined when
    the combined prefix respects the cap; an infinite word composes with
    nothing on its right.  The empty word is only a left unit of the carrier
    (``x . ε`` is undefined for infinite ``x``); series use it as a directly
    defined unit, see :func:`futuristic_units`.
    """
    fin = words(alphabet, finite_cap)
    inf = [OmegaWord(v, l) for v in fin for l in alphabet]

    def comp(x, y):
        if isinstance(x, OmegaWord):
            return None
        if isinstance(y, OmegaWord):
            p = x + y.prefix
            return OmegaWord(p, y.letter) if len(p) <= finite_cap else None
        w = x + y
        return w if len(w) <= finite_cap else None

    def lab(x):
        return str(x) if isinstance(x, OmegaWord) else (x or "ε")

    return Carrier.from_function(fin + inf, comp, label=lab,
                                 unbounded=lambda x: isinstance(x, OmegaWord),
                                 name=f"infwords({alphabet},{finite_cap})")


def make_futuristic_intervals(chain_size=4):
    """Closed intervals over the chain plus the unbounded intervals ``[a, ∞]``."""
    bounded = [Interval(a, b) for a in range(chain_size) for b in range(a, chain_size)]
    unbounded = [("inf", a) for a in range(chain_size)]

    def comp(x, y):
        if isinstance(x, tuple) and x[0] == "inf":
            return None
        if isinstance(y, Interval):
            return Interval(x.lo, y.hi) if x.hi == y.lo else None
        return ("inf", x.lo) if x.hi == y[1] else None

    def lab(x):
        return f"[{x[1]},∞]" if x[0] == "inf" else str(x)

    return Carrier.from_function(bounded + unbounded, comp, label=lab,
                                 unbounded=lambda x: x[0] == "inf",
                                 name=f"fut-intervals({chain_size})")


def futuristic_units(carrier):
    """Elements carrying the series unit: the empty word, or the point intervals."""
    out = []
    for i, x in enumerate(carrier.elements):
        if x == "" or (isinstance(x, Interval) and x.lo == x.hi):
            out.append(i)
    return out


def futuristic_space(carrier, target, unit=None):
    if unit is None:
        unit = futuristic_units(carrier) or None
    return SeriesSpace(carrier, target, unit=unit, futuristic=True,
                       name=f"{target.name}^{carrier.name}[futuristic]")


def futuristic_convolve(f, g):
    """Convolution with the extra unbounded summand (both series share a futuristic space)."""
    from .series import PowerSeries
    if f.space is not g.space or not f.space.futuristic:
        raise ValueError("need two series of one futuristic space")
    return PowerSeries(f.space, f.space.conv(f.values, g.values))


# laws that hold, and the two that are expected to be refuted
FUTURISTIC_EXPECTED = {
    "left-distributivity-0": "fail",   # f . 0 = 0 is right annihilation
}


def check_futuristic_laws(carrier, target, budget=DEFAULT_BUDGET, seed=0, bound=DEFAULT_BOUND,
                          unit=None):
    """Laws of the futuristic lifting.

    Associativity, right distributivity for families of every size (so left
    annihilation), left distributivity for nonempty families and the unit
    laws must hold.  ``f . 0 = 0`` fails as soon as there is an unbounded
    element, and the report for it must carry a witness.
    """
    space = futuristic_space(carrier, target, unit=unit)
    pool = generator_pool(space, seed)
    reports = []
    expect_fail = carrier.is_futuristic
    for name, arity, fn in lifted_law_table(space, lattice=False):
        expected = "pass"
        if name in FUTURISTIC_EXPECTED and expect_fail:
            expected = FUTURISTIC_EXPECTED[name]
        reports.append(check_law(space, name, arity, fn, pool=pool, budget=budget,
                                 seed=seed, bound=bound, expected=expected))
    reports.append(check_law(space, "left-annihilation", 1, _left_annihilation,
                             pool=pool, budget=budget, seed=seed, bound=bound))
    reports.append(check_law(space, "right-annihilation", 1, _right_annihilation,
                             pool=pool, budget=budget, seed=seed, bound=bound,
                             expected="fail" if expect_fail else "pass"))
    return reports


def _left_annihilation(s, f):
    return s.conv(np.broadcast_to(s.zero(), f.shape), f), np.broadcast_to(s.zero(), f.shape), "eq"


def _right_annihilation(s, f):
    return s.conv(f, np.broadcast_to(s.zero(), f.shape)), np.broadcast_to(s.zero(), f.shape), "eq"


def language_product_oracle(carrier, xs, ys):
    """``inf(X) ∪ {v w | v ∈ fin(X), w ∈ Y}`` computed on native elements.

    Concatenation onto an infinite word extends its prefix; results beyond
    the finite cap are not in the carrier and are dropped.
    """
    members = set(carrier.elements)
    out = set()
    for x in xs:
        if isinstance(x, OmegaWord):
            out.add(x)
    for v in xs:
        if isinstance(v, OmegaWord):
            continue
        for w in ys:
            r = OmegaWord(v + w.prefix, w.letter) if isinstance(w, OmegaWord) else v + w
            if r in members:
                out.add(r)
    return out

"""Propositional Hoare logic inside a unital lifted quantale.

A triple ``{x} y {z}`` is valid when ``x . y <= z``.  Every rule is checked
as a universally quantified implication over generated tuples: all tuples
over a small generator pool, then seeded samples.  Most samples are
premise-directed (arguments are adjusted so that the premises hold) since
random tuples rarely satisfy them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .laws import DEFAULT_BOUND, _digits, generator_pool, law_rng
from .quantales import BooleanQuantale
from .report import LawReport

HOARE_BUDGET = 100_000
CHUNK = 4096


# -- validity ---------------------------------------------------------------------

def valid(s, x, y, z):
    """``x . y <= z`` for (batches of) series."""
    return s.leq(s.conv(x, y), z)


def strict_valid(s, x, y, z):
    """Negative control: ``x . y < z``."""
    xy = s.conv(x, y)
    return s.leq(xy, z) & ~s.eq(xy, z)


def meet_valid(s, x, y, z):
    """Negative control: ``x ⊓ y <= z`` (meet in place of composition)."""
    return s.leq(s.meet(x, y), z)


VALIDITIES = {"standard": valid, "strict": strict_valid, "meet": meet_valid}


def triple_valid(x, y, z):
    """Validity of ``{x} y {z}`` for three :class:`PowerSeries` of one space."""
    s = x.space
    if y.space is not s or z.space is not s:
        raise ValueError("triple mixes series of different spaces")
    return bool(valid(s, x.values, y.values, z.values))


# -- rules --------------------------------------------------------------------------

@dataclass(frozen=True)
class Rule:
    name: str
    args: tuple
    premise: Callable | None          # (s, v, *args) -> bool array
    conclusion: Callable              # (s, v, *args) -> bool array
    direct: Callable | None = None    # (s, rng, *args) -> args with premises made true
    needs_unit: bool = False


def _one(s, like):
    return np.broadcast_to(s.one(), like.shape)


def _rules_phl():
    return [
        Rule("skip", ("x",), None,
             lambda s, v, x: v(s, x, _one(s, x), x), needs_unit=True),
        Rule("weakening", ("x1", "x2", "y", "z2", "z1"),
             lambda s, v, x1, x2, y, z2, z1: s.leq(x1, x2) & v(s, x2, y, z2) & s.leq(z2, z1),
             lambda s, v, x1, x2, y, z2, z1: v(s, x1, y, z1),
             lambda s, r, x1, x2, y, z2, z1: (
                 s.meet(x1, x2), x2, y, s.join(z2, s.conv(x2, y)),
                 s.join(z1, s.join(z2, s.conv(x2, y))))),
        Rule("choice", ("x", "y1", "y2", "z"),
             lambda s, v, x, y1, y2, z: v(s, x, y1, z) & v(s, x, y2, z),
             lambda s, v, x, y1, y2, z: v(s, x, s.join(y1, y2), z),
             lambda s, r, x, y1, y2, z: (
                 x, y1, y2, s.join(z, s.join(s.conv(x, y1), s.conv(x, y2))))),
        Rule("sequential", ("w", "x1", "x2", "y", "z"),
             lambda s, v, w, x1, x2, y, z: v(s, w, x1, z) & v(s, z, x2, y),
             lambda s, v, w, x1, x2, y, z: v(s, w, s.conv(x1, x2), y),
             _direct_sequential),
        Rule("star", ("x", "y"),
             lambda s, v, x, y: v(s, x, y, x),
             lambda s, v, x, y: v(s, x, s.star(y), x),
             lambda s, r, x, y: (s.conv(x, s.star(y)), y), needs_unit=True),
    ]


def _direct_sequential(s, r, w, x1, x2, y, z):
    z = s.join(z, s.conv(w, x1))
    return w, x1, x2, s.join(y, s.conv(z, x2)), z


def _rules_strengthened():
    return [
        Rule("guarded-choice", ("x", "w1", "w2", "y1", "y2", "z"),
             lambda s, v, x, w1, w2, y1, y2, z: (v(s, s.conv(x, w1), y1, z)
                                                 & v(s, s.conv(x, w2), y2, z)),
             lambda s, v, x, w1, w2, y1, y2, z: v(
                 s, x, s.join(s.conv(w1, y1), s.conv(w2, y2)), z),
             lambda s, r, x, w1, w2, y1, y2, z: (
                 x, w1, w2, y1, y2,
                 s.join(z, s.join(s.conv(s.conv(x, w1), y1), s.conv(s.conv(x, w2), y2))))),
        Rule("guarded-star", ("x", "w1", "w2", "y"),
             lambda s, v, x, w1, w2, y: v(s, s.conv(x, w1), y, x),
             lambda s, v, x, w1, w2, y: v(s, x, s.conv(s.star(s.conv(w1, y)), w2), s.conv(x, w2)),
             lambda s, r, x, w1, w2, y: (s.conv(x, s.star(s.conv(w1, y))), w1, w2, y),
             needs_unit=True),
    ]


def _rules_concurrency():
    return [
        Rule("concurrency", ("x1", "x2", "y1", "y2", "z1", "z2"),
             lambda s, v, x1, x2, y1, y2, z1, z2: v(s, x1, y1, z1) & v(s, x2, y2, z2),
             lambda s, v, x1, x2, y1, y2, z1, z2: v(s, s.meet(x1, x2), s.meet(y1, y2),
                                                    s.meet(z1, z2)),
             lambda s, r, x1, x2, y1, y2, z1, z2: (
                 x1, x2, y1, y2, s.join(z1, s.conv(x1, y1)), s.join(z2, s.conv(x2, y2)))),
        Rule("concurrency-interchange-step", ("x1", "x2", "y1", "y2"), None,
             lambda s, v, x1, x2, y1, y2: s.leq(s.conv(s.meet(x1, x2), s.meet(y1, y2)),
                                                s.meet(s.conv(x1, y1), s.conv(x2, y2)))),
    ]


def _rules_star():
    return [
        Rule("star-unfold-left", ("x",), None,
             lambda s, v, x: s.eq(s.join(_one(s, x), s.conv(x, s.star(x))), s.star(x)),
             needs_unit=True),
        Rule("star-unfold-right", ("x",), None,
             lambda s, v, x: s.eq(s.join(_one(s, x), s.conv(s.star(x), x)), s.star(x)),
             needs_unit=True),
        Rule("star-induction-left", ("x", "y", "z"),
             lambda s, v, x, y, z: s.leq(s.join(z, s.conv(x, y)), y),
             lambda s, v, x, y, z: s.leq(s.conv(s.star(x), z), y),
             lambda s, r, x, y, z: (x, s.conv(s.star(x), s.join(z, y)), z), needs_unit=True),
        Rule("star-induction-right", ("x", "y", "z"),
             lambda s, v, x, y, z: s.leq(s.join(z, s.conv(y, x)), y),
             lambda s, v, x, y, z: s.leq(s.conv(z, s.star(x)), y),
             lambda s, r, x, y, z: (x, s.conv(s.join(z, y), s.star(x)), z), needs_unit=True),
    ]


RULE_GROUPS = {
    "hoare": _rules_phl,
    "strengthened": _rules_strengthened,
    "concurrency": _rules_concurrency,
    "star": _rules_star,
}


# -- harness --------------------------------------------------------------------------

def _guards(s, rng, m):
    """Complementary sub-identities ``w1, w2`` (Boolean targets with a unit)."""
    one = s.one()
    keep = (rng.random((m, s.n)) < 0.5).astype(s.dtype)
    w1 = s.meet(one, keep)
    w2 = s.meet(one, (1 - keep).astype(s.dtype))
    return w1, w2


def _sample(s, rule, rng, m, pool, directed):
    args = []
    for _ in rule.args:
        fresh = s.random(rng, m)
        from_pool = pool[rng.integers(0, len(pool), size=m)]
        use_pool = rng.random(m) < 0.3
        args.append(np.where(use_pool[:, None], from_pool, fresh).astype(s.dtype))
    if "w1" in rule.args and isinstance(s.target, BooleanQuantale) and s.unital:
        w1, w2 = _guards(s, rng, m)
        pick = rng.random(m) < 0.5
        i1, i2 = rule.args.index("w1"), rule.args.index("w2")
        args[i1] = np.where(pick[:, None], w1, args[i1])
        args[i2] = np.where(pick[:, None], w2, args[i2])
    if directed and rule.direct is not None:
        new = rule.direct(s, rng, *args)
        pick = rng.random(m) < 0.75
        args = [np.where(pick[:, None], np.broadcast_to(b, a.shape), a).astype(s.dtype)
                for a, b in zip(args, new)]
    return args


def _witness(s, rule, args, i):
    return [f"{name}={s.describe(a[i])}" for name, a in zip(rule.args, args)] + ["conclusion fails"]


def check_rule(space, rule, validity="standard", budget=HOARE_BUDGET, seed=0,
               bound=DEFAULT_BOUND, directed=True, expected="pass"):
    """Check one rule; returns a :class:`LawReport` (status fail carries a witness)."""
    v = VALIDITIES[validity] if isinstance(validity, str) else validity
    s = space
    name = rule.name if validity == "standard" else f"{rule.name}[{validity}]"
    if rule.needs_unit and not s.unital:
        return LawReport(name, "skipped", 0, mode="no unit", expected=expected)
    pool = generator_pool(s, seed)
    arity = len(rule.args)
    base = len(pool)
    while base > 1 and base ** arity > bound:
        base -= 1
    checked = premises = 0
    witness = None

    def run(args):
        nonlocal checked, premises, witness
        prem = rule.premise(s, v, *args) if rule.premise is not None else None
        concl = rule.conclusion(s, v, *args)
        m = len(concl)
        checked += m
        premises += m if prem is None else int(np.sum(prem))
        bad = ~concl if prem is None else (prem & ~concl)
        idx = np.flatnonzero(bad)
        if len(idx):
            witness = _witness(s, rule, args, int(idx[0]))

    total = base ** arity
    for lo in range(0, total, CHUNK):
        idx = np.arange(lo, min(total, lo + CHUNK))
        run([pool[:base][d] for d in _digits(idx, base, arity)])
        if witness:
            break
    done = 0
    if witness is None:
        rng = law_rng(seed, "hoare:" + rule.name)
        while done < budget and witness is None:
            m = min(CHUNK, budget - done)
            run(_sample(s, rule, rng, m, pool, directed))
            done += m
    notes = {"premise_satisfied": premises} if rule.premise is not None else {}
    mode = f"pool-exhaustive(pool={base})+sampled(seed={seed},count={done})"
    return LawReport(name, "fail" if witness else "pass", checked, witness=witness,
                     mode=mode, expected=expected, notes=notes)


def _group(group, space, budget, seed, bound, validity="standard", prefix=""):
    out = []
    for rule in RULE_GROUPS[group]():
        r = check_rule(space, rule, validity, budget, seed, bound)
        r.law = prefix + r.law
        out.append(r)
    return out


def check_hoare_rules(space, budget=HOARE_BUDGET, seed=0, bound=DEFAULT_BOUND,
                      validity="standard", prefix=""):
    """Skip, weakening, choice, sequential composition and star."""
    return _group("hoare", space, budget, seed, bound, validity, prefix)


def check_strengthened_rules(space, budget=HOARE_BUDGET, seed=0, bound=DEFAULT_BOUND, prefix=""):
    """Guarded choice and guarded star (conditional and while shapes)."""
    return _group("strengthened", space, budget, seed, bound, prefix=prefix)


def check_concurrency_rule(space, budget=HOARE_BUDGET, seed=0, bound=DEFAULT_BOUND, prefix=""):
    """The meet-based concurrency rule and the interchange inequality behind it."""
    return _group("concurrency", space, budget, seed, bound, prefix=prefix)


def check_star_laws(space, budget=HOARE_BUDGET, seed=0, bound=DEFAULT_BOUND, prefix=""):
    """Both unfold equalities and both induction implications."""
    return _group("star", space, budget, seed, bound, prefix=prefix)


def negative_controls(space, budget=2_000, seed=0, bound=DEFAULT_BOUND):
    """Rules under broken validity notions; each control must break some rule.

    Returns ``{validity: reports}``.
    """
    return {name: check_hoare_rules(space, budget, seed, bound, validity=name)
            for name in ("strict", "meet")}

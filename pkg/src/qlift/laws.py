"""Law checking harness for lifted quantales.

A law is a function of a few series returning ``(premise, lhs, rhs, rel)``
for a batch of tuples: ``premise`` is a boolean array or None, ``rel`` is
``"eq"`` or ``"leq"``.  Tuples come from the whole space when it is small
enough, otherwise from every tuple over a deterministic generator pool plus a
seeded random sample.
"""

from __future__ import annotations

import zlib

import numpy as np

from .report import LawReport

DEFAULT_BOUND = 1 << 16
DEFAULT_BUDGET = 20_000
CHUNK_CELLS = 4_000_000


def law_rng(seed, name):
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, zlib.crc32(name.encode())])


def generator_pool(space, seed=0, size=48):
    """Deterministic pool: constants, atoms, random series and closures."""
    rng = law_rng(seed, "pool:" + space.name)
    n = space.n
    items = [space.zero()]
    if space.unital:
        items.append(space.one())
    items.append(space.full())
    atoms = [space.atom(x) for x in range(n)]
    if len(atoms) > size // 3:
        pick = rng.choice(len(atoms), size=size // 3, replace=False)
        atoms = [atoms[i] for i in sorted(pick)]
    randoms = list(space.random(rng, max(4, size // 3)))
    closures = []
    for i in range(0, len(randoms) - 1, 2):
        closures.append(space.join(randoms[i], atoms[i % len(atoms)]))
        closures.append(space.conv(randoms[i], randoms[i + 1]))
    # interleave so that any prefix of the pool is varied
    streams = [atoms, randoms, closures]
    k = 0
    while any(streams):
        s = streams[k % 3]
        if s:
            items.append(s.pop(0))
        k += 1
    out, seen = [], set()
    for a in items:
        key = np.asarray(a, dtype=space.dtype).tobytes()
        if key not in seen:
            seen.add(key)
            out.append(np.asarray(a, dtype=space.dtype))
    return np.stack(out[:size]) if len(out) > size else np.stack(out)


def _digits(idx, base, arity):
    cols = []
    for _ in range(arity):
        cols.append(idx % base)
        idx = idx // base
    return cols


def _first_violation(space, args, premise, lhs, rhs, rel):
    if rel == "eq":
        holds = np.all(lhs == rhs, axis=-1)
    else:
        holds = space.leq(lhs, rhs)
    bad = ~holds if premise is None else (premise & ~holds)
    idx = np.flatnonzero(bad)
    if not len(idx):
        return None
    i = int(idx[0])
    l, r = lhs[i], rhs[i]
    if rel == "eq":
        pts = np.flatnonzero(l != r)
    else:
        pts = np.flatnonzero(space.join(l, r) != r)
    p = int(pts[0])
    t = space.target
    witness = [space.describe(a[i]) for a in args]
    witness.append(f"at {space.carrier.label(p)}: lhs={t.label(l[p])} rhs={t.label(r[p])}")
    return witness


def _evaluate(space, fn, tuples):
    out = fn(space, *tuples)
    if len(out) == 3:
        lhs, rhs, rel = out
        premise = None
    else:
        premise, lhs, rhs, rel = out
    count = int(np.sum(premise)) if premise is not None else None
    return _first_violation(space, tuples, premise, lhs, rhs, rel), count


def _chunk_size(space):
    cells = max(space.n, len(space.carrier.split_x)) * 4
    return max(64, CHUNK_CELLS // max(cells, 1))


def check_law(space, name, arity, fn, *, pool=None, budget=DEFAULT_BUDGET,
              seed=0, bound=DEFAULT_BOUND, expected="pass", sampler=None):
    """Run one law and return its :class:`LawReport`.

    ``sampler(rng, count)`` may supply custom random tuples (a list of
    ``arity`` arrays); by default slots are filled from the pool and from
    fresh random series.
    """
    chunk = _chunk_size(space)
    checked = 0
    premises = 0
    witness = None
    modes = []
    full = space.size() if space.n <= 64 else None
    if full is not None and full ** arity <= bound:
        source, base, modes = space.enumerate(), full, ["exhaustive"]
        sample = 0
    else:
        if pool is None:
            pool = generator_pool(space, seed)
        base = len(pool)
        while base > 1 and base ** arity > bound:
            base -= 1
        source = pool[:base]
        modes = [f"pool-exhaustive(pool={base})"]
        sample = budget
    total = base ** arity
    for lo in range(0, total, chunk):
        idx = np.arange(lo, min(total, lo + chunk))
        tuples = [source[d] for d in _digits(idx, base, arity)]
        w, c = _evaluate(space, fn, tuples)
        checked += len(idx)
        premises += len(idx) if c is None else c
        if w is not None:
            witness = w
            break
    if witness is None and sample:
        rng = law_rng(seed, name)
        if pool is None:
            pool = generator_pool(space, seed)
        done = 0
        while done < sample:
            m = min(chunk, sample - done)
            if sampler is not None:
                tuples = sampler(rng, m)
            else:
                tuples = []
                for _ in range(arity):
                    fresh = space.random(rng, m)
                    from_pool = pool[rng.integers(0, len(pool), size=m)]
                    use_pool = rng.random(m) < 0.3
                    tuples.append(np.where(use_pool[:, None], from_pool, fresh))
            w, c = _evaluate(space, fn, tuples)
            done += m
            checked += m
            premises += m if c is None else c
            if w is not None:
                witness = w
                break
        modes.append(f"sampled(seed={seed},count={done})")
    status = "fail" if witness is not None else "pass"
    notes = {}
    if premises != checked:
        notes["premise_satisfied"] = premises
    return LawReport(name, status, checked, witness=witness, mode="+".join(modes),
                     expected=expected, notes=notes)


# -- the lifted-quantale laws ---------------------------------------------------

def _assoc(s, f, g, h):
    return s.conv(s.conv(f, g), h), s.conv(f, s.conv(g, h)), "eq"


def _left_dist(k):
    def law(s, f, *gs):
        shape = f.shape[:-1]
        lhs = s.conv(f, s.sum(gs, shape))
        rhs = s.sum([s.conv(f, g) for g in gs], shape)
        return lhs, rhs, "eq"
    return law


def _right_dist(k):
    def law(s, f, *gs):
        shape = f.shape[:-1]
        lhs = s.conv(s.sum(gs, shape), f)
        rhs = s.sum([s.conv(g, f) for g in gs], shape)
        return lhs, rhs, "eq"
    return law


def _left_unit(s, f):
    return s.conv(s.one(), f), f, "eq"


def _right_unit(s, f):
    return s.conv(f, s.one()), f, "eq"


def _commutative(s, f, g):
    return s.conv(f, g), s.conv(g, f), "eq"


def _meet_over_sum(k):
    def law(s, f, *gs):
        shape = f.shape[:-1]
        return s.meet(f, s.sum(gs, shape)), s.sum([s.meet(f, g) for g in gs], shape), "eq"
    return law


def _sum_over_meet(k):
    def law(s, f, *gs):
        shape = f.shape[:-1]
        return s.join(f, s.inf(gs, shape)), s.inf([s.join(f, g) for g in gs], shape), "eq"
    return law


def _join_assoc(s, f, g, h):
    return s.join(s.join(f, g), h), s.join(f, s.join(g, h)), "eq"


def _meet_assoc(s, f, g, h):
    return s.meet(s.meet(f, g), h), s.meet(f, s.meet(g, h)), "eq"


def _join_comm(s, f, g):
    return s.join(f, g), s.join(g, f), "eq"


def _meet_comm(s, f, g):
    return s.meet(f, g), s.meet(g, f), "eq"


def _join_idem(s, f):
    return s.join(f, f), f, "eq"


def _meet_idem(s, f):
    return s.meet(f, f), f, "eq"


def _absorb_join(s, f, g):
    return s.join(f, s.meet(f, g)), f, "eq"


def _absorb_meet(s, f, g):
    return s.meet(f, s.join(f, g)), f, "eq"


def _zero_least(s, f):
    return np.broadcast_to(s.zero(), f.shape), f, "leq"


def _top_greatest(s, f):
    return f, np.broadcast_to(s.full(), f.shape), "leq"


def _meet_interchange(s, w, x, y, z):
    return s.conv(s.meet(w, x), s.meet(y, z)), s.meet(s.conv(w, y), s.conv(x, z)), "leq"


def _meet_interchange_eq(s, w, x, y, z):
    return s.conv(s.meet(w, x), s.meet(y, z)), s.meet(s.conv(w, y), s.conv(x, z)), "eq"


def lifted_law_table(space, lattice=True, commutative=None):
    """Name, arity and function of every law of the lifted quantale."""
    laws = [("conv-associativity", 3, _assoc)]
    for k in range(4):
        laws.append((f"left-distributivity-{k}", 1 + k, _left_dist(k)))
        laws.append((f"right-distributivity-{k}", 1 + k, _right_dist(k)))
    if space.unital:
        laws.append(("left-unit", 1, _left_unit))
        laws.append(("right-unit", 1, _right_unit))
    if commutative is None:
        commutative = space.carrier.commutative and space.target.commutative
    if commutative:
        laws.append(("commutativity", 2, _commutative))
    if lattice:
        laws += [
            ("join-associativity", 3, _join_assoc),
            ("meet-associativity", 3, _meet_assoc),
            ("join-commutativity", 2, _join_comm),
            ("meet-commutativity", 2, _meet_comm),
            ("join-idempotence", 1, _join_idem),
            ("meet-idempotence", 1, _meet_idem),
            ("absorption-join", 2, _absorb_join),
            ("absorption-meet", 2, _absorb_meet),
            ("zero-least", 1, _zero_least),
            ("top-greatest", 1, _top_greatest),
        ]
        for k in range(4):
            laws.append((f"meet-over-sum-{k}", 1 + k, _meet_over_sum(k)))
            laws.append((f"sum-over-meet-{k}", 1 + k, _sum_over_meet(k)))
    return laws


def check_lifted_laws(space, budget=DEFAULT_BUDGET, seed=0, bound=DEFAULT_BOUND,
                      lattice=True, expected=None, prefix=""):
    """Check every law of the lifted quantale on ``space``.

    ``expected`` maps law names to ``"fail"`` for laws that should be refuted
    (for instance right annihilation on a futuristic carrier).
    """
    expected = expected or {}
    pool = generator_pool(space, seed)
    reports = []
    for name, arity, fn in lifted_law_table(space, lattice=lattice):
        reports.append(check_law(space, prefix + name, arity, fn, pool=pool, budget=budget,
                                 seed=seed, bound=bound,
                                 expected=expected.get(name, "pass")))
    return reports


def check_meet_interchange(space, budget=DEFAULT_BUDGET, seed=0, bound=DEFAULT_BOUND,
                           equality_expected=None, prefix=""):
    """The meet interchange inequality; optionally also its equality form."""
    pool = generator_pool(space, seed)
    reports = [check_law(space, prefix + "meet-interchange", 4, _meet_interchange,
                         pool=pool, budget=budget, seed=seed, bound=bound)]
    if equality_expected is not None:
        reports.append(check_law(space, prefix + "meet-interchange-equality", 4,
                                 _meet_interchange_eq, pool=pool, budget=budget,
                                 seed=seed, bound=bound, expected=equality_expected))
    return reports

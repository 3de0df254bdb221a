"""State transformers, their Kleisli lifts, locality and the frame rule.

Predicates over a small carrier S are bitmasks, so a predicate transformer
is an integer array indexed by predicate masks.  Predicates compose by the
complex product, which makes ``2^S`` a total monoid; convolution of
transformers over that monoid is ordinary series convolution with the
powerset of S as target.
"""

from __future__ import annotations

import numpy as np

from .carrier import Carrier
from .quantales import PowersetQuantale
from .series import SeriesSpace


class _Fault:
    def __repr__(self):
        return "FAULT"


FAULT = _Fault()


class PredicateAlgebra:
    """Predicates over a carrier with at most 10 elements, and their transformers."""

    def __init__(self, carrier):
        if carrier.size > 10:
            raise ValueError("predicate algebra limited to 10 carrier elements")
        self.carrier = carrier
        self.n = carrier.size
        self.size = 1 << self.n
        self.full = self.size - 1
        self.quantale = PowersetQuantale(carrier)
        self.table = self.quantale._table            # complex product of masks
        unit = None if carrier.unit is None else 1 << carrier.unit
        self.monoid = Carrier(self.table, unit=unit, commutative=carrier.commutative,
                              labels=[self.quantale.label(p) for p in range(self.size)],
                              name=f"predicates({carrier.name})")
        # transformers are series over the predicate monoid valued in predicates
        self.space = SeriesSpace(self.monoid, self.quantale, name=f"transformers({carrier.name})")
        self.identity = np.arange(self.size, dtype=np.int64)
        # states-to-predicates maps form the monoid transformer quantale
        self.state_space = SeriesSpace(carrier, self.quantale,
                                       name=f"state-transformers({carrier.name})")

    # -- predicates ----------------------------------------------------------

    def mask(self, elements):
        """Mask of a collection of native carrier elements."""
        m = 0
        for e in elements:
            m |= 1 << self.carrier.index(e)
        return m

    def where(self, test):
        """Mask of the elements satisfying ``test`` (on native elements)."""
        return sum(1 << i for i, e in enumerate(self.carrier.elements) if test(e))

    def star(self, p, q):
        return int(self.table[p, q])

    def label(self, p):
        return self.quantale.label(p)

    # -- transformers ------------------------------------------------------

    def constant(self, p):
        return np.full(self.size, p, dtype=np.int64)

    def is_isotone(self, f):
        ps = np.arange(self.size)
        for b in range(self.n):
            lo = ps[(ps >> b) & 1 == 0]
            hi = lo | (1 << b)
            if np.any((f[lo] & ~f[hi]) != 0):
                return False
        return True


class StateTransformer:
    """Map from carrier elements to sets of elements, or to FAULT."""

    def __init__(self, carrier, images, name="transformer"):
        if len(images) != carrier.size:
            raise ValueError("state transformer must be total")
        self.carrier = carrier
        self.images = tuple(FAULT if im is FAULT else frozenset(im) for im in images)
        self.name = name

    @classmethod
    def from_function(cls, carrier, fn, name="transformer"):
        """``fn`` maps native elements to an iterable of native elements or FAULT."""
        images = []
        for e in carrier.elements:
            out = fn(e)
            images.append(FAULT if out is FAULT else {carrier.index(v) for v in out})
        return cls(carrier, images, name=name)

    def __call__(self, x):
        return self.images[x]

    @property
    def faults(self):
        return any(im is FAULT for im in self.images)


def transformer_of_relation(carrier, pairs, name="relation"):
    """``a -> {b | (a, b) in R}`` for a relation given on element indices."""
    images = [set() for _ in range(carrier.size)]
    for a, b in pairs:
        images[a].add(b)
    return StateTransformer(carrier, images, name=name)


def kleisli_lift(alg, st):
    """Predicate transformer ``Y -> {x | f x ⊆ Y}``; faulting states satisfy no ``Y``."""
    ys = alg.identity
    out = np.zeros(alg.size, dtype=np.int64)
    for x, im in enumerate(st.images):
        if im is FAULT:
            continue
        m = sum(1 << b for b in im)
        out |= np.where((m & ~ys) == 0, 1 << x, 0)
    return out


def pt_compose(f, g):
    """``p -> f(g(p))``."""
    return f[g]


def pt_join(f, g):
    return f | g


def pt_meet(f, g):
    return f & g


def pt_convolve(alg, f, g):
    """``r -> ⋃ {f p * g q | p * q = r}`` over the predicate monoid."""
    return alg.space.conv(f, g)


def pt_leq(f, g):
    return bool(np.all((f & ~g) == 0))


def is_local(alg, f):
    """Check ``f * id <= f``; returns ``(holds, witness)``."""
    lhs = pt_convolve(alg, f, alg.identity)
    bad = np.flatnonzero((lhs & ~f) != 0)
    if not len(bad):
        return True, None
    r = int(bad[0])
    return False, {"r": alg.label(r), "lhs": alg.label(lhs[r]), "f(r)": alg.label(f[r])}


def is_local_pointwise(alg, f):
    """Check ``(f p) * q <= f (p * q)`` for all predicate pairs; returns ``(holds, witness)``."""
    t = alg.table
    for p in range(alg.size):
        lhs = t[f[p], :]                  # (f p) * q for every q
        rhs = f[t[p, :]]                  # f (p * q)
        bad = np.flatnonzero((lhs & ~rhs) != 0)
        if len(bad):
            q = int(bad[0])
            return False, {"p": alg.label(p), "q": alg.label(q),
                           "lhs": alg.label(lhs[q]), "rhs": alg.label(rhs[q])}
    return True, None


class NotLocal(ValueError):
    pass


def frame_check(alg, f, p, q, r, checked_local=None):
    """Whether ``p <= f q`` implies ``p * r <= f (q * r)``; ``f`` must be local."""
    if checked_local is None:
        checked_local = is_local(alg, f)[0]
    if not checked_local:
        raise NotLocal("the frame rule is only derived for local transformers")
    if p & ~int(f[q]):
        return True
    pr = alg.star(p, r)
    return (pr & ~int(f[alg.star(q, r)])) == 0


def frame_sweep(alg, f, q):
    """Check the frame rule for every ``(p, r)`` with ``q`` fixed.

    Returns ``(pairs_checked, premises_holding, violations, first_violation)``.
    """
    if not is_local(alg, f)[0]:
        raise NotLocal("the frame rule is only derived for local transformers")
    ps = np.arange(alg.size)
    premise = (ps & ~f[q]) == 0               # p <= f q, per p
    rhs = f[alg.table[q, :]]                  # f (q * r), per r
    lhs = alg.table                           # p * r, indexed [p, r]
    holds = (lhs & ~rhs[None, :]) == 0
    viol = premise[:, None] & ~holds
    first = None
    idx = np.argwhere(viol)
    if len(idx):
        p, r = (int(v) for v in idx[0])
        first = {"p": alg.label(p), "r": alg.label(r)}
    return alg.size * alg.size, int(premise.sum()) * alg.size, int(viol.sum()), first


def check_multiplicative(alg, f, max_family=3, sample=None, rng=None):
    """``f (meet Ys) = meet (f Y)`` for families of size 0..max_family.

    Families of size up to 2 are enumerated; size 3 is enumerated too unless
    ``sample`` limits it to that many random families.  Returns a dict from
    family size to the number of violations.
    """
    ps = alg.identity
    out = {}
    out[0] = int(f[alg.full] != alg.full)
    if max_family >= 1:
        out[1] = 0
    if max_family >= 2:
        meet = ps[:, None] & ps[None, :]
        out[2] = int(np.sum(f[meet] != (f[:, None] & f[None, :])))
    if max_family >= 3:
        viol = 0
        if sample is None:
            for a in range(alg.size):
                m = a & ps[:, None] & ps[None, :]
                viol += int(np.sum(f[m] != (f[a] & f[:, None] & f[None, :])))
        else:
            rng = rng or np.random.default_rng(0)
            ys = rng.integers(0, alg.size, size=(sample, 3))
            m = ys[:, 0] & ys[:, 1] & ys[:, 2]
            viol = int(np.sum(f[m] != (f[ys[:, 0]] & f[ys[:, 1]] & f[ys[:, 2]])))
        out[3] = viol
    return out


# -- heap commands on heaplets (elements are tuples of values or None) ---------

def _loc(carrier, loc):
    return carrier.locations.index(loc)


def heap_write(carrier, loc, value, on_missing=FAULT):
    """``[loc] := value``; ``on_missing`` is the outcome when ``loc`` is unallocated."""
    i = _loc(carrier, loc)

    def fn(h):
        if h[i] is None:
            return on_missing
        return [h[:i] + (value,) + h[i + 1:]]
    return StateTransformer.from_function(carrier, fn, name=f"write({loc},{value})")


def heap_guard(carrier, loc, value):
    """``assume [loc] = value``: blocks on other values, faults when unallocated."""
    i = _loc(carrier, loc)

    def fn(h):
        if h[i] is None:
            return FAULT
        return [h] if h[i] == value else []
    return StateTransformer.from_function(carrier, fn, name=f"guard({loc}={value})")


def heap_alloc(carrier, value):
    """Allocate some free location holding ``value`` (no outcome if the heap is full)."""
    def fn(h):
        return [h[:i] + (value,) + h[i + 1:] for i in range(len(h)) if h[i] is None]
    return StateTransformer.from_function(carrier, fn, name=f"alloc({value})")


def heap_alloc_at(carrier, loc, value):
    """Allocate the fixed location ``loc``; not local, used as a control."""
    i = _loc(carrier, loc)

    def fn(h):
        return [] if h[i] is not None else [h[:i] + (value,) + h[i + 1:]]
    return StateTransformer.from_function(carrier, fn, name=f"alloc-at({loc},{value})")


def heap_dispose(carrier, loc):
    i = _loc(carrier, loc)

    def fn(h):
        if h[i] is None:
            return FAULT
        return [h[:i] + (None,) + h[i + 1:]]
    return StateTransformer.from_function(carrier, fn, name=f"dispose({loc})")


def skip(carrier):
    return StateTransformer(carrier, [{x} for x in range(carrier.size)], name="skip")


def miracle(carrier):
    return StateTransformer(carrier, [set() for _ in range(carrier.size)], name="miracle")


def abort(carrier):
    return StateTransformer(carrier, [FAULT] * carrier.size, name="abort")


def random_monotone(alg, rng, rules=4):
    """``p -> ⋃ {B_k | A_k ⊆ p}`` for random rule pairs: isotone by construction."""
    ps = alg.identity
    out = np.zeros(alg.size, dtype=np.int64)
    for _ in range(rules):
        a = int(rng.integers(0, alg.size)) & int(rng.integers(0, alg.size))
        b = int(rng.integers(0, alg.size))
        out |= np.where((a & ~ps) == 0, b, 0)
    return out


def random_relation(carrier, rng, density=0.2):
    n = carrier.size
    pairs = [(a, b) for a in range(n) for b in range(n) if rng.random() < density]
    return transformer_of_relation(carrier, pairs, name="random-relation")


def generated_transformers(alg, seed=0):
    """A named family of predicate transformers with local and non-local members."""
    c = alg.carrier
    rng = np.random.default_rng(seed)
    out = {}

    def add(name, f):
        out[name] = np.asarray(f, dtype=np.int64)

    add("id", alg.identity)
    for st in [skip(c), miracle(c), abort(c)]:
        add("lift:" + st.name, kleisli_lift(alg, st))
    for loc in c.locations:
        for v in c.values:
            add(f"lift:write({loc},{v})", kleisli_lift(alg, heap_write(c, loc, v)))
            add(f"lift:write-or-block({loc},{v})",
                kleisli_lift(alg, heap_write(c, loc, v, on_missing=[])))
            add(f"lift:guard({loc}={v})", kleisli_lift(alg, heap_guard(c, loc, v)))
            add(f"lift:alloc-at({loc},{v})", kleisli_lift(alg, heap_alloc_at(c, loc, v)))
        add(f"lift:dispose({loc})", kleisli_lift(alg, heap_dispose(c, loc)))
    for v in c.values:
        add(f"lift:alloc({v})", kleisli_lift(alg, heap_alloc(c, v)))
    add("const:full", alg.constant(alg.full))
    add("const:empty", alg.constant(0))
    if c.unit is not None:
        add("const:emp", alg.constant(1 << c.unit))
    for k in range(3):
        add(f"const:random{k}", alg.constant(int(rng.integers(1, alg.size))))
    for k in range(8):
        add(f"lift:random-relation{k}", kleisli_lift(alg, random_relation(c, rng)))
    base = [n for n in out if n.startswith("lift:")]
    for k in range(8):
        a, b = rng.choice(len(base), size=2, replace=False)
        fa, fb = out[base[a]], out[base[b]]
        add(f"join({base[a]},{base[b]})", pt_join(fa, fb))
        add(f"compose({base[a]},{base[b]})", pt_compose(fa, fb))
    for k in range(8):
        add(f"random-monotone{k}", random_monotone(alg, rng))
    return out


# -- report-producing suites ----------------------------------------------------

def state_transformers(carrier, seed=0):
    """The named heap commands and random relations behind the generated lifts."""
    c = carrier
    rng = np.random.default_rng(seed)
    out = [skip(c), miracle(c), abort(c)]
    for loc in c.locations:
        for v in c.values:
            out += [heap_write(c, loc, v), heap_write(c, loc, v, on_missing=[]),
                    heap_guard(c, loc, v), heap_alloc_at(c, loc, v)]
        out.append(heap_dispose(c, loc))
    out += [heap_alloc(c, v) for v in c.values]
    out += [random_relation(c, rng) for _ in range(8)]
    return out


def _report(law, failures, checked, expected="pass", mode="exhaustive", notes=None):
    from .report import LawReport
    witness = [str(w) for w in failures[:3]] if failures else None
    return LawReport(law, "fail" if failures else "pass", checked, witness=witness,
                     mode=mode, expected=expected, notes=notes or {})


def check_transformer_suite(alg, seed=0):
    """Kleisli multiplicativity and agreement of the two locality checks."""
    sts = state_transformers(alg.carrier, seed)
    reports = []
    for label, group, sizes in (("fault-free", [s for s in sts if not s.faults], (0, 1, 2, 3)),
                                ("faulting", [s for s in sts if s.faults], (1, 2, 3))):
        bad = []
        for st in group:
            counts = check_multiplicative(alg, kleisli_lift(alg, st), max_family=3)
            bad += [f"{st.name}: family size {k}, {counts[k]} violations"
                    for k in sizes if counts[k]]
        checked = len(group) * sum(alg.size ** k for k in sizes)
        reports.append(_report(f"kleisli-multiplicative[{label},sizes {min(sizes)}-3]", bad, checked,
                               notes={"transformers": len(group)}))
    faulting = [s for s in sts if s.faults]
    empty_bad = [f"{st.name}: f(full) = {alg.label(kleisli_lift(alg, st)[alg.full])}"
                 for st in faulting if check_multiplicative(alg, kleisli_lift(alg, st), 0)[0]]
    reports.append(_report("kleisli-multiplicative[faulting,size 0]", empty_bad, len(faulting),
                           expected="fail" if faulting else "pass"))
    family = generated_transformers(alg, seed)
    disagree, local = [], 0
    for name, f in family.items():
        a, _ = is_local(alg, f)
        b, _ = is_local_pointwise(alg, f)
        local += a
        if a != b:
            disagree.append(f"{name}: convolution says {a}, pointwise says {b}")
    reports.append(_report("locality-agreement", disagree, len(family),
                           notes={"transformers": len(family), "local": local,
                                  "non_local": len(family) - local}))
    if "const:emp" in family:
        ok, w = is_local(alg, family["const:emp"])
        reports.append(_report("locality[const:emp]", [] if ok else [w], 1, expected="fail"))
    return reports


def frame_sweep_all(alg, f):
    """Frame rule ``p <= f q  =>  p * r <= f (q * r)`` for every ``(p, q, r)``.

    Unlike :func:`frame_sweep` no locality is required, so non-local
    transformers can serve as controls.  Returns ``(checked, premises,
    violations, first)``.
    """
    t = alg.table
    ps = np.arange(alg.size)
    checked = premises = violations = 0
    first = None
    for q in range(alg.size):
        premise = (ps & ~f[q]) == 0
        rhs = f[t[q, :]]
        viol = premise[:, None] & ((t & ~rhs[None, :]) != 0)
        checked += alg.size * alg.size
        premises += int(premise.sum()) * alg.size
        nv = int(viol.sum())
        if nv and first is None:
            p, r = (int(v) for v in np.argwhere(viol)[0])
            first = {"p": alg.label(p), "q": alg.label(q), "r": alg.label(r)}
        violations += nv
    return checked, premises, violations, first


def wand_adjunction(space):
    """``f * g <= h  <=>  g <= f -* h`` over every triple of a Boolean space.

    Returns ``(checked, first_violation)``.
    """
    allf = space.enumerate()
    size = len(allf)
    if size > 1024:
        raise ValueError("wand adjunction sweep is limited to 1024 series")
    checked = 0
    for i in range(size):
        f = allf[i]
        fg = space.conv(f, allf)                                 # f * g for every g
        wand = space.wand(f, allf)                               # f -* h for every h
        left = np.all((fg[:, None, :] & ~allf[None, :, :]) == 0, axis=-1)     # [g, h]
        right = np.all((allf[:, None, :] & ~wand[None, :, :]) == 0, axis=-1)  # [g, h]
        checked += size * size
        bad = np.argwhere(left != right)
        if len(bad):
            g, h = (int(v) for v in bad[0])
            return checked, [space.describe(f), space.describe(allf[g]), space.describe(allf[h])]
    return checked, None


def check_frame_suite(alg, space=None, seed=0):
    """Frame rule for the heap writes, a non-local control, and the wand adjunction."""
    c = alg.carrier
    reports = []
    for loc in c.locations:
        for v in c.values:
            f = kleisli_lift(alg, heap_write(c, loc, v))
            checked, premises, viol, first = frame_sweep_all(alg, f)
            reports.append(_report(f"frame-rule[write({loc},{v})]", [first] if viol else [],
                                   checked, notes={"premises": premises, "violations": viol,
                                                   "local": is_local(alg, f)[0]}))
    if c.unit is not None:
        f = alg.constant(1 << c.unit)
        checked, premises, viol, first = frame_sweep_all(alg, f)
        reports.append(_report("frame-rule[const:emp]", [first] if viol else [], checked,
                               expected="fail", notes={"violations": viol}))
    if space is not None:
        checked, w = wand_adjunction(space)
        reports.append(_report("wand-adjunction", [w] if w else [], checked))
    return reports

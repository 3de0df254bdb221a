"""Interchange laws between sequential and concurrent composition.

Stream interval predicates are evaluated lazily at a single point
``(x, f)``: ``x = (lo, hi)`` is a closed interval of the time chain and
``f`` a stream, a tuple of ``T`` value vectors.  Expressions are hashable
tuples:

    ("eq", i, c)             for all t in x, f_i t = c
    ("lt", i, j)             for all t in x, f_i t < f_j t
    ("or_eq", i, c, j, d)    for all t in x, f_i t = c or f_j t = d
    ("true",)
    ("meet", a, b), ("join", a, b)
    ("seq", a, b)            split x at a shared point (chop)
    ("par", a, b)            split f by vector separation

The value of an expression at ``(x, f)`` only depends on ``f`` restricted
to ``x``, which is what the memo is keyed on.  The search looks for points
where the left side of an interchange inequality holds and the right side
does not.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .report import LawReport

LAWS = ("FG_le_FsG", "small_left", "small_right", "weak")
LAW_ARITY = {"FG_le_FsG": 2, "small_left": 3, "small_right": 3, "weak": 4}
MODES = ("pointwise", "uniform")


def seq(a, b):
    return ("seq", a, b)


def par(a, b):
    return ("par", a, b)


def meet(a, b):
    return ("meet", a, b)


def join(a, b):
    return ("join", a, b)


def law_sides(law, preds):
    """``(lhs, rhs)`` of the interchange inequality ``lhs <= rhs``."""
    if law == "FG_le_FsG":
        F, G = preds
        return seq(F, G), par(F, G)
    if law == "small_left":
        F, G, H = preds
        return seq(par(F, G), H), par(F, seq(G, H))
    if law == "small_right":
        F, G, H = preds
        return seq(F, par(G, H)), par(seq(F, G), H)
    if law == "weak":
        F, G, H, K = preds
        return seq(par(F, G), par(H, K)), par(seq(F, H), seq(G, K))
    raise ValueError(f"unknown interchange law {law!r}")


def show(expr):
    op = expr[0]
    if op == "eq":
        return f"f{expr[1] + 1}={expr[2]}"
    if op == "lt":
        return f"f{expr[1] + 1}<f{expr[2] + 1}"
    if op == "or_eq":
        return f"(f{expr[1] + 1}={expr[2]}|f{expr[3] + 1}={expr[4]})"
    if op == "true":
        return "true"
    sym = {"meet": " ⊓ ", "join": " + ", "seq": " · ", "par": " ∗ "}[op]
    return f"({show(expr[1])}{sym}{show(expr[2])})"


def _holds_at(atom, vec):
    op = atom[0]
    if op == "eq":
        return vec[atom[1]] == atom[2]
    if op == "lt":
        return vec[atom[1]] < vec[atom[2]]
    if op == "or_eq":
        return vec[atom[1]] == atom[2] or vec[atom[3]] == atom[4]
    raise ValueError(f"unknown atom {atom!r}")


class LazyEvaluator:
    """Point evaluation of stream interval predicates with memoisation."""

    def __init__(self, dim, split_mode="pointwise", memo_limit=2_000_000):
        if split_mode not in MODES:
            raise ValueError(f"unknown split mode {split_mode!r}")
        self.dim = dim
        self.split_mode = split_mode
        self.memo_limit = memo_limit
        self.memo = {}
        self.evaluations = 0

    def holds(self, expr, x, f):
        lo, hi = x
        if not 0 <= lo <= hi < len(f):
            raise ValueError(f"interval {x} outside the stream")
        return self._eval(expr, tuple(tuple(v) for v in f[lo:hi + 1]))

    def _eval(self, expr, sl):
        op = expr[0]
        if op == "true":
            return True
        if op in ("eq", "lt", "or_eq"):
            return all(_holds_at(expr, v) for v in sl)
        if op == "meet":
            return self._eval(expr[1], sl) and self._eval(expr[2], sl)
        if op == "join":
            return self._eval(expr[1], sl) or self._eval(expr[2], sl)
        key = (expr, sl)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self.evaluations += 1
        if op == "seq":
            a, b = expr[1], expr[2]
            out = any(self._eval(a, sl[:k + 1]) and self._eval(b, sl[k:]) for k in range(len(sl)))
        elif op == "par":
            out = any(self._eval(expr[1], g) and self._eval(expr[2], h)
                      for g, h in self.splits(sl))
        else:
            raise ValueError(f"unknown operator {op!r}")
        if len(self.memo) >= self.memo_limit:
            self.memo.clear()
        self.memo[key] = out
        return out

    def splits(self, sl):
        """All pairs ``(g, h)`` with ``g ∗ h = sl`` under the split mode."""
        if self.split_mode == "pointwise":
            cells = [(t, i) for t, v in enumerate(sl) for i in range(self.dim) if v[i] != 0]
        else:
            cells = [i for i in range(self.dim) if any(v[i] != 0 for v in sl)]
        for choice in itertools.product((0, 1), repeat=len(cells)):
            left = {c for c, side in zip(cells, choice) if side == 0}
            if self.split_mode == "pointwise":
                g = tuple(tuple(v[i] if (t, i) in left else 0 for i in range(self.dim))
                          for t, v in enumerate(sl))
                h = tuple(tuple(0 if (t, i) in left else v[i] for i in range(self.dim))
                          for t, v in enumerate(sl))
            else:
                g = tuple(tuple(v[i] if i in left else 0 for i in range(self.dim)) for v in sl)
                h = tuple(tuple(0 if i in left else v[i] for i in range(self.dim)) for v in sl)
            yield g, h


# -- predicate families and stream sets ------------------------------------------

def atoms(dim, values=(0, 1)):
    """Pointwise tests, ordered: equalities, comparisons, true, disjunctions."""
    out = [("eq", i, c) for i in range(dim) for c in values]
    out += [("lt", i, j) for i in range(dim) for j in range(dim) if i != j]
    out.append(("true",))
    out += [("or_eq", i, c, j, d) for i in range(dim) for j in range(i + 1, dim)
            for c in values for d in values]
    return out


def predicate_family(dim, values=(0, 1), closure=True):
    """Atoms, then (when ``closure``) their pairwise meets and joins."""
    base = atoms(dim, values)
    if not closure:
        return base
    pairs = list(itertools.combinations(base, 2))
    return base + [meet(a, b) for a, b in pairs] + [join(a, b) for a, b in pairs]


def step_stream(chain, components):
    """Stream from per-component shapes.

    A shape is ``("const", c)``, ``("up", k, lo, hi)`` (``lo`` before time
    ``k``, ``hi`` from ``k`` on) or an explicit tuple of values.
    """
    cols = []
    for shape in components:
        if shape[0] == "const":
            cols.append([shape[1]] * chain)
        elif shape[0] == "up":
            _, k, lo, hi = shape
            cols.append([lo if t < k else hi for t in range(chain)])
        else:
            cols.append(list(shape))
    return tuple(tuple(col[t] for col in cols) for t in range(chain))


def structured_streams(chain, dim, values=(0, 1)):
    """Streams whose components are constant or change value once."""
    shapes = [("const", c) for c in values]
    shapes += [("up", k, a, b) for k in range(1, chain) for a in values for b in values if a != b]
    rank = {s: i for i, s in enumerate(shapes)}
    combos = sorted(itertools.product(shapes, repeat=dim),
                    key=lambda cs: (sum(s[0] != "const" for s in cs), [rank[s] for s in cs]))
    return [step_stream(chain, cs) for cs in combos]


def all_streams(chain, dim, values=(0, 1)):
    for flat in itertools.product(values, repeat=chain * dim):
        yield tuple(tuple(flat[t * dim:(t + 1) * dim]) for t in range(chain))


def intervals(chain):
    """Closed intervals, longest first."""
    return sorted(((a, b) for a in range(chain) for b in range(a, chain)),
                  key=lambda ab: (ab[0] - ab[1], ab[0]))


# -- known constructions for the four non-laws ----------------------------------

def known_constructions(chain):
    """Discretised counterexample constructions; time 0 sits at the middle point.

    Returns law -> list of (label, predicates, x, stream, dim).
    """
    mid = chain // 2
    full = (0, chain - 1)
    f1 = [1 if t <= mid else 0 for t in range(chain)]          # step down after 0
    f1r = [0 if t <= mid else 1 for t in range(chain)]         # its time reverse
    f2_literal = [0 if t >= mid else 1 for t in range(chain)]
    f2_reversed = [1 if t >= mid else 0 for t in range(chain)]
    zero = [0] * chain
    one = [1] * chain
    or_h = ("or_eq", 0, 0, 1, 0)
    return {
        "FG_le_FsG": [
            ("literal", (("eq", 0, 1), ("eq", 1, 1)), full, step_stream(chain, [f1, f2_literal]), 2),
            ("f2-reversed", (("eq", 0, 1), ("eq", 1, 1)), full,
             step_stream(chain, [f1, f2_reversed]), 2),
        ],
        "small_left": [
            ("literal", (("eq", 0, 1), ("eq", 1, 0), or_h), full, step_stream(chain, [f1, zero]), 2),
        ],
        "small_right": [
            ("literal", (or_h, ("eq", 1, 0), ("eq", 0, 1)), full, step_stream(chain, [f1r, zero]), 2),
        ],
        "weak": [
            ("literal", (("eq", 0, 0), ("lt", 1, 2), ("lt", 0, 1), ("eq", 2, 1)), full,
             step_stream(chain, [zero, f1r, one]), 3),
        ],
    }


# -- witnesses --------------------------------------------------------------------

@dataclass(frozen=True)
class InterchangeWitness:
    law: str
    split_mode: str
    predicates: tuple
    x: tuple
    stream: tuple
    source: str = "search"

    @property
    def dim(self):
        return len(self.stream[0])

    def verify(self):
        """Re-evaluate both sides with a fresh evaluator: lhs holds, rhs fails."""
        ev = LazyEvaluator(self.dim, self.split_mode)
        lhs, rhs = law_sides(self.law, self.predicates)
        return ev.holds(lhs, self.x, self.stream) and not ev.holds(rhs, self.x, self.stream)

    def describe(self):
        lhs, rhs = law_sides(self.law, self.predicates)
        streams = " ".join("".join(str(v[i]) for v in self.stream) for i in range(self.dim))
        return (f"{self.law} [{self.split_mode}] x=[{self.x[0]},{self.x[1]}] f={streams}: "
                f"{show(lhs)} holds, {show(rhs)} fails")

    def as_dict(self):
        return {"law": self.law, "split_mode": self.split_mode,
                "predicates": [_to_json(p) for p in self.predicates],
                "x": list(self.x), "stream": [list(v) for v in self.stream],
                "source": self.source}

    @classmethod
    def from_dict(cls, d):
        return cls(d["law"], d["split_mode"], tuple(_from_json(p) for p in d["predicates"]),
                   tuple(d["x"]), tuple(tuple(v) for v in d["stream"]), d.get("source", "search"))


def _to_json(expr):
    return [expr[0]] + [_to_json(a) if isinstance(a, tuple) else a for a in expr[1:]]


def _from_json(obj):
    return tuple([obj[0]] + [_from_json(a) if isinstance(a, list) else a for a in obj[1:]])


def save_witnesses(path, witnesses):
    with open(path, "w") as fh:
        json.dump([w.as_dict() for w in witnesses], fh, indent=1, sort_keys=True)


def load_witnesses(path, verify=True):
    """Load witnesses; with ``verify`` each one is re-evaluated and must still refute."""
    with open(path) as fh:
        ws = [InterchangeWitness.from_dict(d) for d in json.load(fh)]
    if verify:
        bad = [w for w in ws if not w.verify()]
        if bad:
            raise ValueError(f"{len(bad)} stored witness(es) no longer refute: {bad[0].describe()}")
    return ws


# -- search -----------------------------------------------------------------------

def _embed(stream, dim):
    return tuple(tuple(v) + (0,) * (dim - len(v)) for v in stream)


def search_law(law, chain, dim, split_mode, values=(0, 1), budget=2_000_000,
               family=None, streams=None, seeds=True):
    """Find a witness for one non-law, or None.

    Returns ``(witness, notes)``.  ``notes`` records the outcome of each
    known construction and the number of point checks used.  Stages:
    the known constructions, then equality atoms on constant streams,
    then all atoms on single-step streams, then the closed family.
    """
    ev = LazyEvaluator(dim, split_mode)
    arity = LAW_ARITY[law]
    notes = {"seeds": {}, "checked": 0}
    if seeds:
        for label, preds, x, f, need in known_constructions(chain)[law]:
            if need > dim:
                notes["seeds"][label] = f"needs dim {need}"
                continue
            f = _embed(f, dim)
            lhs, rhs = law_sides(law, preds)
            l, r = ev.holds(lhs, x, f), ev.holds(rhs, x, f)
            notes["checked"] += 1
            notes["seeds"][label] = ("refutes" if l and not r
                                     else f"no refutation (lhs={int(l)}, rhs={int(r)})")
            if l and not r:
                return InterchangeWitness(law, split_mode, preds, x, f, f"construction:{label}"), notes
    xs = intervals(chain)
    base = atoms(dim, values)
    eqs = [a for a in base if a[0] == "eq"]
    shaped = structured_streams(chain, dim, values)
    consts = [s for s in shaped if len(set(s)) == 1]
    stages = [(eqs, consts), (base, shaped)]
    if family is not None or streams is not None:
        stages = [(family or base, streams or shaped)]
    else:
        stages.append((predicate_family(dim, values), shaped))
    for fam, fs in stages:
        for preds in itertools.product(fam, repeat=arity):
            lhs, rhs = law_sides(law, preds)
            for f in fs:
                for x in xs:
                    if notes["checked"] >= budget:
                        notes["exhausted"] = True
                        return None, notes
                    notes["checked"] += 1
                    if ev.holds(lhs, x, f) and not ev.holds(rhs, x, f):
                        return InterchangeWitness(law, split_mode, tuple(preds), x, f), notes
    return None, notes


def interchange_search(chain=5, dims=None, laws=LAWS, modes=MODES, values=(0, 1),
                       budget=2_000_000):
    """Search every requested law in every split mode.

    ``dims`` maps law -> stream dimension (default 2, and 3 for the weak
    law).  Returns a list of dicts sorted by law then mode, each with the
    witness (or None) and the search notes.
    """
    dims = dict({"FG_le_FsG": 2, "small_left": 2, "small_right": 2, "weak": 3}, **(dims or {}))
    out = []
    for law in sorted(laws):
        for mode in modes:
            w, notes = search_law(law, chain, dims[law], mode, values, budget)
            out.append({"law": law, "split_mode": mode, "dim": dims[law], "chain": chain,
                        "witness": w, "notes": notes})
    return out


def search_reports(results):
    """One expected-fail :class:`LawReport` per (law, mode)."""
    reports = []
    for r in results:
        w = r["witness"]
        ok = w is not None and w.verify()
        notes = {"chain": r["chain"], "dim": r["dim"], "seeds": r["notes"]["seeds"]}
        if w is not None:
            notes["source"] = w.source
            notes["reverified"] = ok
        reports.append(LawReport(
            f"interchange:{r['law']}[{r['split_mode']}]", "fail" if ok else "pass",
            r["notes"]["checked"], witness=[w.describe()] if ok else None,
            mode=f"search(budget-used={r['notes']['checked']})", expected="fail", notes=notes))
    return reports


# -- meet interchange on points ------------------------------------------------

def check_meet_interchange_points(chain=5, dim=2, split_mode="pointwise", values=(0, 1),
                                  budget=20_000, seed=0):
    """``(w⊓x)·(y⊓z) <= (w·y)⊓(x·z)`` and the same for ∗, at sampled points.

    Quadruples come from the closed predicate family; points from all
    intervals and structured streams.  Returns two reports.
    """
    ev = LazyEvaluator(dim, split_mode)
    fam = predicate_family(dim, values)
    fs = structured_streams(chain, dim, values)
    xs = intervals(chain)
    rng = np.random.default_rng([seed, dim, MODES.index(split_mode)])
    reports = []
    for op in ("seq", "par"):
        witness = None
        count = 0
        for _ in range(budget):
            w, x, y, z = (fam[i] for i in rng.integers(0, len(fam), size=4))
            f = fs[rng.integers(len(fs))]
            iv = xs[rng.integers(len(xs))]
            lhs = (op, meet(w, x), meet(y, z))
            rhs = meet((op, w, y), (op, x, z))
            count += 1
            if ev.holds(lhs, iv, f) and not ev.holds(rhs, iv, f):
                witness = [show(lhs), show(rhs), str(iv), str(f)]
                break
        name = "meet-interchange-" + ("seq" if op == "seq" else "par")
        reports.append(LawReport(f"{name}[{split_mode}]", "fail" if witness else "pass", count,
                                 witness=witness, mode=f"sampled(seed={seed},count={count})"))
    return reports


# -- dense cross-check ----------------------------------------------------------

def dense_series(space, expr, memo=None):
    """Dense bi-series of an expression over a :class:`BiSeriesSpace` of intervals x streams.

    Atoms are tabulated directly, every operator uses the dense engine, so
    comparing with :class:`LazyEvaluator` checks one route against the other.
    """
    memo = {} if memo is None else memo
    if expr in memo:
        return memo[expr]
    op = expr[0]
    if op in ("eq", "lt", "or_eq", "true"):
        def pred(iv, f):
            return op == "true" or all(_holds_at(expr, f[t]) for t in range(iv.lo, iv.hi + 1))
        out = space.from_predicate(pred)
    else:
        a, b = dense_series(space, expr[1], memo), dense_series(space, expr[2], memo)
        if op == "meet":
            out = space.horizontal.meet(a, b)
        elif op == "join":
            out = space.horizontal.join(a, b)
        elif op == "seq":
            out = space.hconvolve(a, b)
        else:
            out = space.vconvolve(a, b)
    memo[expr] = out
    return out

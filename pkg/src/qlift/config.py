"""Run configurations: instance registry, validation and suite dispatch.

A configuration lists instances; each names a kind, its parameters, the
suites to run on it and the laws expected to fail there.  Everything the
CLI runs is looked up here, so library modules stay free of I/O.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from importlib import resources

import jsonschema

from .biseries import BiSeriesSpace, check_biquantale_laws, make_stream, noncommutativity_witness
from .carrier import check_carrier_laws, with_entry
from .futuristic import check_futuristic_laws, futuristic_units, make_futuristic_intervals, make_infinite_words
from .hoare import (check_concurrency_rule, check_hoare_rules, check_star_laws,
                    check_strengthened_rules)
from .instances import (diagonal, make_interval, make_language, make_multiset, make_relation,
                        make_separating, make_trace, point_intervals, single_state_traces)
from .interchange import (LAW_ARITY, LAWS, MODES, InterchangeWitness, LazyEvaluator, atoms,
                          check_meet_interchange_points, dense_series, interchange_search,
                          law_sides, save_witnesses, search_reports)
from .laws import DEFAULT_BOUND, check_lifted_laws, check_meet_interchange
from .matrices import make_matrix_parallel
from .quantales import BooleanQuantale, VectorQuantale
from .report import LawReport
from .series import SeriesSpace
from .transformers import PredicateAlgebra, check_frame_suite, check_transformer_suite

SUITES = ("carrier", "lifted", "futuristic", "hoare", "strengthened", "concurrency", "star",
          "transformers", "frame", "biquantale", "interchange")

SCHEMA = {
    "type": "object",
    "required": ["instances"],
    "additionalProperties": False,
    "properties": {
        "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
        "budget": {"type": "integer", "minimum": 1},
        "bound": {"type": "integer", "minimum": 1},
        "suites": {"type": "array", "items": {"enum": list(SUITES)}},
        "report_path": {"type": "string"},
        "instances": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["name", "kind", "suites"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "kind": {"type": "string"},
                    "params": {"type": "object"},
                    "suites": {"type": "array", "minItems": 1, "items": {"enum": list(SUITES)}},
                    "expected_fail": {"type": "array", "items": {"type": "string"}},
                    "budget": {"type": "integer", "minimum": 1},
                    "bound": {"type": "integer", "minimum": 1},
                    "corrupt": {
                        "oneOf": [
                            {"const": "auto"},
                            {"type": "object", "required": ["x", "y"],
                             "additionalProperties": False,
                             "properties": {"x": {"type": ["integer", "string"]},
                                            "y": {"type": ["integer", "string"]},
                                            "value": {"type": ["integer", "string", "null"]}}},
                        ]
                    },
                },
            },
        },
    },
}


class ConfigError(ValueError):
    """A configuration that cannot be run (exit code 2)."""


# -- instance kinds -------------------------------------------------------------------

B = BooleanQuantale()
HOARE_SUITES = {"carrier", "lifted", "hoare", "strengthened", "concurrency", "star"}


@dataclass
class Built:
    """A constructed instance: its carrier and whatever the suites need."""

    carrier: object
    space: SeriesSpace | None = None
    extra: dict = field(default_factory=dict)


def _unit_space(carrier, unit):
    return SeriesSpace(carrier, B, unit=unit)


def _relation(c, p):
    return Built(c, _unit_space(c, diagonal(c)))


def _trace(c, p):
    return Built(c, _unit_space(c, single_state_traces(c)))


def _interval(c, p):
    unit = point_intervals(c) if p.get("mode", "fusion") == "fusion" else "carrier"
    return Built(c, _unit_space(c, unit))


def _plain(c, p):
    return Built(c, _unit_space(c, "carrier"))


def _multiset(c, p):
    _, target = make_multiset(p.get("symbols", "abcd"), p.get("cap", 9))
    return Built(c, SeriesSpace(c, target))


def _vector(c, p):
    target = VectorQuantale(p.get("dim", 2), tuple(p.get("values", (0, 1, 2))), p.get("clash", "poison"))
    return Built(c, SeriesSpace(c, target))


def _futuristic(c, p):
    return Built(c)


def _predicates(c, p):
    return Built(c, _unit_space(c, "carrier"), {"algebra": PredicateAlgebra(c)})


def _streams(c, p):
    chain = p.get("chain", 4)
    ivs = make_interval(chain, p.get("interval_mode", "fusion"))
    unit1 = point_intervals(ivs) if p.get("interval_mode", "fusion") == "fusion" else "carrier"
    return Built(c, None, {"space": BiSeriesSpace(ivs, c, B, unit1=unit1)})


def _interchange(c, p):
    return Built(c)


def _stream_carrier(p):
    return make_stream(p.get("chain", 4), p.get("dim", 2), tuple(p.get("values", (0, 1))),
                       p.get("split_mode", "pointwise"))


def _dense_stream_carrier(p):
    return make_stream(p.get("dense_chain", 4), 2, tuple(p.get("values", (0, 1))),
                       p.get("split_mode", "pointwise"))


KINDS = {
    # kind: (carrier builder, finishing step, applicable suites)
    "relation": (lambda p: make_relation(p.get("points", 3)), _relation, HOARE_SUITES),
    "language": (lambda p: make_language(p.get("alphabet", "ab"), p.get("max_len", 2)), _plain,
                 HOARE_SUITES),
    "trace": (lambda p: make_trace(p.get("states", "pq"), p.get("labels", "a"),
                                   p.get("max_transitions", 2)), _trace, HOARE_SUITES),
    "interval": (lambda p: make_interval(p.get("chain", 5), p.get("mode", "fusion")), _interval,
                 HOARE_SUITES),
    "heaplet": (lambda p: make_separating("heaplet", **p), _plain, HOARE_SUITES),
    "disjoint_sets": (lambda p: make_separating("disjoint_sets", **p), _plain, HOARE_SUITES),
    "multiset_cap": (lambda p: make_separating("multiset_cap", **p), _plain, HOARE_SUITES),
    "multiset": (lambda p: make_multiset(p.get("symbols", "abcd"), p.get("cap", 9))[0], _multiset,
                 {"carrier", "lifted"}),
    "vector": (lambda p: make_separating("vector", dim=p.get("dim", 2),
                                         values=p.get("values", (0, 1, 2))), _vector,
               {"carrier", "lifted"}),
    "matrix_parallel": (lambda p: make_matrix_parallel(p.get("dimension", 2),
                                                       tuple(p.get("values", (0, 1)))), _plain,
                        {"carrier", "lifted"}),
    "inf_words": (lambda p: make_infinite_words(p.get("alphabet", "a"), p.get("finite_cap", 2)),
                       _futuristic, {"carrier", "futuristic"}),
    "fut_intervals": (lambda p: make_futuristic_intervals(p.get("chain", 4)), _futuristic,
                             {"carrier", "futuristic"}),
    "heap_predicates": (lambda p: make_separating("heaplet", **p), _predicates,
                        {"carrier", "transformers", "frame"}),
    "interval_streams": (_stream_carrier, _streams, {"carrier", "biquantale"}),
    "interchange": (_dense_stream_carrier, _interchange, {"carrier", "interchange"}),
}

# longer spellings accepted in configs
ALIASES = {"infinite_words": "inf_words", "futuristic_intervals": "fut_intervals"}

PARAMS = {
    "relation": {"points"}, "language": {"alphabet", "max_len"},
    "trace": {"states", "labels", "max_transitions"}, "interval": {"chain", "mode"},
    "heaplet": {"locations", "values"}, "disjoint_sets": {"base"},
    "multiset_cap": {"symbols", "cap"}, "multiset": {"symbols", "cap"},
    "vector": {"dim", "values", "clash"}, "matrix_parallel": {"dimension", "values"},
    "inf_words": {"alphabet", "finite_cap"}, "fut_intervals": {"chain"},
    "heap_predicates": {"locations", "values"},
    "interval_streams": {"chain", "dim", "values", "split_mode", "interval_mode"},
    "interchange": {"chain", "dims", "modes", "values", "search_budget", "dense_chain",
                    "split_mode", "witness_path"},
}


def _resolve(carrier, ref):
    if ref is None:
        return None
    if isinstance(ref, int):
        if not 0 <= ref < carrier.size:
            raise ConfigError(f"corrupt: index {ref} outside the carrier")
        return ref
    if ref in carrier.labels:
        return carrier.labels.index(ref)
    raise ConfigError(f"corrupt: no carrier element labelled {ref!r}")


def _corruption_candidates(carrier):
    t = carrier.table
    n = carrier.size
    if carrier.unit is not None:
        u = carrier.unit
        for y in range(n):
            if y != u:
                yield u, y, (y + 1) % n if (y + 1) % n != y else u
    for x, y in zip(*(t >= 0).nonzero()):
        yield int(x), int(y), None
    for x, y in zip(*(t < 0).nonzero()):
        yield int(x), int(y), int(x)


def auto_corruption(carrier, tries=64):
    """A deterministic single-entry change that breaks a carrier law.

    Candidates, in order: redirect ``u . y`` away from ``y`` for the unit
    ``u``, make a defined entry undefined, define an undefined entry.  The
    first candidate that fails an exhaustive carrier check is returned; if
    none of the first ``tries`` does, the first candidate is.
    """
    first = None
    for k, (x, y, v) in enumerate(_corruption_candidates(carrier)):
        if first is None:
            first = (x, y, v)
        if k >= tries:
            break
        if not all(r.ok for r in check_carrier_laws(with_entry(carrier, x, y, v))):
            return x, y, v
    if first is None:
        raise ConfigError("carrier has no table entries to corrupt")
    return first


def build_instance(inst):
    kind = ALIASES.get(inst["kind"], inst["kind"])
    if kind not in KINDS:
        raise ConfigError(f"instance {inst['name']!r}: unknown kind {kind!r}")
    params = inst.get("params", {})
    unknown = set(params) - PARAMS[kind]
    if unknown:
        raise ConfigError(f"instance {inst['name']!r}: unknown parameter(s) {sorted(unknown)}")
    make, finish, _ = KINDS[kind]
    try:
        carrier = make(params)
        corrupt = inst.get("corrupt")
        if corrupt is not None:
            if corrupt == "auto":
                x, y, v = auto_corruption(carrier)
            else:
                x = _resolve(carrier, corrupt["x"])
                y = _resolve(carrier, corrupt["y"])
                v = _resolve(carrier, corrupt.get("value"))
            carrier = with_entry(carrier, x, y, v)
        return finish(carrier, params)
    except ConfigError:
        raise
    except (ValueError, TypeError, KeyError) as e:
        raise ConfigError(f"instance {inst['name']!r}: {e}") from e


# -- loading ---------------------------------------------------------------------------

def default_config_text():
    return resources.files("qlift").joinpath("default_config.json").read_text()


def parse_config(text, source="<config>"):
    """Parse and validate; raises :class:`ConfigError` with a line or field diagnostic."""
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from e
    try:
        jsonschema.validate(cfg, SCHEMA)
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "(top level)"
        raise ConfigError(f"{source}: field {where}: {e.message}") from e
    names = [i["name"] for i in cfg["instances"]]
    if len(set(names)) != len(names):
        raise ConfigError(f"{source}: instance names must be unique")
    for i, inst in enumerate(cfg["instances"]):
        kind = ALIASES.get(inst["kind"], inst["kind"])
        if kind not in KINDS:
            raise ConfigError(f"{source}: field instances/{i}/kind: unknown kind {kind!r}")
        bad = [s for s in inst["suites"] if s not in KINDS[kind][2]]
        if bad:
            raise ConfigError(f"{source}: field instances/{i}/suites: {bad} not applicable "
                              f"to kind {kind!r} (allowed: {sorted(KINDS[kind][2])})")
    return cfg


def load_config(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"{path}: {e.strerror}") from e
    return parse_config(text, str(path))


# -- suites ------------------------------------------------------------------------------

def _suite_carrier(inst, built, cfg):
    reports = check_carrier_laws(built.carrier)
    if "space" in built.extra:
        reports += check_carrier_laws(built.extra["space"].c1, name_prefix="intervals:")
    return reports


def _suite_lifted(inst, built, cfg):
    return check_lifted_laws(built.space, budget=cfg["budget"], seed=cfg["seed"], bound=cfg["bound"])


def _suite_futuristic(inst, built, cfg):
    c = built.carrier
    return check_futuristic_laws(c, B, budget=cfg["budget"], seed=cfg["seed"], bound=cfg["bound"],
                                 unit=futuristic_units(c) or None)


def _hoare_suite(fn):
    def run(inst, built, cfg):
        return fn(built.space, budget=cfg["budget"], seed=cfg["seed"], bound=cfg["bound"])
    return run


def _suite_transformers(inst, built, cfg):
    return check_transformer_suite(built.extra["algebra"], seed=cfg["seed"])


def _suite_frame(inst, built, cfg):
    return check_frame_suite(built.extra["algebra"], built.space, seed=cfg["seed"])


def _suite_biquantale(inst, built, cfg):
    space = built.extra["space"]
    reports = check_biquantale_laws(space, budget=cfg["budget"], seed=cfg["seed"],
                                    bound=cfg["bound"])
    w = noncommutativity_witness(space, seed=cfg["seed"])
    h = space.horizontal
    witness = None if w is None else [h.describe(w[0]), h.describe(w[1]),
                                      f"at {h.carrier.label(w[2])}"]
    reports.append(LawReport("h:commutativity", "fail" if witness else "pass", 1,
                             witness=witness, mode="generator-pool"))
    return reports


def _suite_interchange(inst, built, cfg):
    p = inst.get("params", {})
    chain = p.get("chain", 5)
    dims = p.get("dims", {})
    modes = tuple(p.get("modes", MODES))
    values = tuple(p.get("values", (0, 1)))
    results = interchange_search(chain, dims, modes=modes, values=values,
                                 budget=p.get("search_budget", 2_000_000))
    reports = search_reports(results)
    witnesses = [r["witness"] for r in results if r["witness"] is not None]
    # round trip through the stored format; every witness must re-verify
    buf = io.StringIO()
    json.dump([w.as_dict() for w in witnesses], buf)
    path = p.get("witness_path")
    if path:
        save_witnesses(path, witnesses)
    reloaded = [InterchangeWitness.from_dict(d) for d in json.loads(buf.getvalue())]
    bad = [w.describe() for w in reloaded if not w.verify()]
    reports.append(LawReport("interchange-witness-reload", "fail" if bad else "pass",
                             len(reloaded), witness=bad or None, mode="round-trip"))
    for mode in modes:
        reports += check_meet_interchange_points(chain, 2, mode, values, budget=cfg["budget"] // 10,
                                                 seed=cfg["seed"])
    reports += _dense_agreement(built.carrier, values)
    return reports


def _dense_agreement(streams, values):
    """Dense engine and lazy evaluator agree on every cell, plus meet interchange on the dense space."""
    chain = streams.T
    ivs = make_interval(chain)
    space = BiSeriesSpace(ivs, streams, B, unit1=point_intervals(ivs))
    ev = LazyEvaluator(streams.dim, streams.split_mode)
    at = atoms(streams.dim, values)
    memo = {}
    mismatches, cells = [], 0
    for law in LAWS[:3]:
        for k in range(0, len(at) - 2, 3):
            preds = tuple(at[(k + j) % len(at)] for j in range(LAW_ARITY[law]))
            for expr in law_sides(law, preds):
                grid = space.grid(dense_series(space, expr, memo))
                for i, iv in enumerate(ivs.elements):
                    for j, f in enumerate(streams.elements):
                        cells += 1
                        if bool(grid[i, j]) != ev.holds(expr, (iv.lo, iv.hi), f):
                            mismatches.append(f"{expr} at {iv} {streams.labels[j]}")
    tag = f"[{streams.split_mode}]"
    reports = [LawReport("dense-lazy-agreement" + tag, "fail" if mismatches else "pass", cells,
                         witness=mismatches[:3] or None, mode="exhaustive over cells")]
    reports += check_meet_interchange(space.horizontal, budget=2000, seed=0, prefix="dense-seq:")
    reports += check_meet_interchange(space.vertical, budget=2000, seed=0, prefix="dense-par:",
                                      equality_expected="fail")
    return reports


SUITE_RUNNERS = {
    "carrier": _suite_carrier,
    "lifted": _suite_lifted,
    "futuristic": _suite_futuristic,
    "hoare": _hoare_suite(check_hoare_rules),
    "strengthened": _hoare_suite(check_strengthened_rules),
    "concurrency": _hoare_suite(check_concurrency_rule),
    "star": _hoare_suite(check_star_laws),
    "transformers": _suite_transformers,
    "frame": _suite_frame,
    "biquantale": _suite_biquantale,
    "interchange": _suite_interchange,
}


def expected_for(law, expected_fail):
    """``"fail"`` when the law (or its name before a ``[mode]`` suffix) is declared."""
    stem = law.split("[")[0]
    return "fail" if law in expected_fail or stem in expected_fail else "pass"


def run_suite(cfg, inst, suite):
    """Build the instance and run one suite; returns a list of report dicts."""
    built = build_instance(inst)
    # per-instance budget and bound override the top-level ones, unless set on the command line
    cfg = dict(cfg)
    for key in ("budget", "bound"):
        if key in inst and key not in cfg.get("_overridden", ()):
            cfg[key] = inst[key]
    try:
        reports = SUITE_RUNNERS[suite](inst, built, cfg)
    except Exception as e:          # a suite that crashes is a failed suite, not a crash
        reports = [LawReport(f"{suite}:error", "fail", 0, witness=[f"{type(e).__name__}: {e}"],
                             mode="exception")]
    declared = set(inst.get("expected_fail", []))
    for r in reports:
        r.expected = expected_for(r.law, declared)
    return [r.as_dict() for r in reports]


def effective(cfg, seed=None, budget=None):
    """Config with command-line overrides and defaults filled in."""
    out = dict(cfg)
    out.setdefault("seed", 0)
    out.setdefault("budget", 20_000)
    out.setdefault("bound", DEFAULT_BOUND)
    if seed is not None:
        out["seed"] = seed
    if budget is not None:
        if budget < 1:
            raise ConfigError("budget must be at least 1")
        out["budget"] = budget
        out["_overridden"] = ["budget"]
    return out


def tasks(cfg):
    """``(instance, suite)`` pairs in config order, filtered by the top-level suite list."""
    allowed = set(cfg.get("suites", SUITES))
    return [(inst, s) for inst in cfg["instances"] for s in inst["suites"] if s in allowed]

"""``lawcheck``: run law suites from a config, print demos, search interchange witnesses.

Exit codes: 0 when every law met its expectation, 1 on a violation or a
missing refutation, 2 on a configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .config import (ConfigError, default_config_text, effective, load_config, parse_config,
                     run_suite, tasks)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _jobs(arg):
    if arg is not None:
        return max(1, arg)
    env = os.environ.get("LAWCHECK_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"LAWCHECK_JOBS={env!r} is not an integer") from None
    return 1


def _run_task(args):
    cfg, inst, suite = args
    start = time.perf_counter()
    reports = run_suite(cfg, inst, suite)
    return reports, time.perf_counter() - start


def execute(cfg, jobs=1, progress=None, timing=False):
    """Run every ``(instance, suite)`` task; results come back in config order."""
    work = [(cfg, inst, suite) for inst, suite in tasks(cfg)]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outs = list(pool.map(_run_task, work))
    else:
        outs = []
        for w in work:
            outs.append(_run_task(w))
            if progress:
                progress(w[1]["name"], w[2], *outs[-1])
    results = []
    for (_, inst, suite), (reports, seconds) in zip(work, outs):
        res = {"instance": inst["name"], "kind": inst["kind"], "suite": suite, "reports": reports}
        if timing:
            res["seconds"] = round(seconds, 3)
        results.append(res)
    return results


def summarize(results):
    laws = [r for res in results for r in res["reports"]]
    bad = [f"{res['instance']}/{res['suite']}/{r['law']}: {r['status']} (expected {r['expected']})"
           for res in results for r in res["reports"] if not r["ok"]]
    return {"laws": len(laws), "ok": len(laws) - len(bad), "bad": bad,
            "expected_fail_refuted": sum(1 for r in laws if r["expected"] == "fail" and r["ok"])}


def build_report(cfg, results, elapsed=None):
    summary = summarize(results)
    echo = {k: v for k, v in cfg.items() if not k.startswith("_")}
    report = {"tool": "lawcheck", "version": __version__, "config": echo, "results": results,
              "summary": summary, "status": "pass" if not summary["bad"] else "fail"}
    if elapsed is not None:
        report["wall_clock_seconds"] = round(elapsed, 3)
    return report


def _progress(name, suite, reports, seconds):
    bad = sum(1 for r in reports if not r["ok"])
    flag = "ok" if not bad else f"{bad} BAD"
    print(f"  {name:<28} {suite:<13} {len(reports):>3} laws  {flag:<7} {seconds:7.1f}s",
          file=sys.stderr, flush=True)


HOARE_SUITES = ("hoare", "strengthened", "concurrency", "star")


def _only_suites(cfg, keep):
    insts = []
    for inst in cfg["instances"]:
        suites = [s for s in inst["suites"] if s in keep]
        if suites:
            insts.append(dict(inst, suites=suites))
    if not insts:
        raise ConfigError(f"no instance runs any of the suites {', '.join(keep)}")
    return dict(cfg, instances=insts)


def cmd_run(args):
    cfg = load_config(args.config) if args.config else parse_config(default_config_text(), "default")
    cfg = effective(cfg, args.seed, args.budget)
    if getattr(args, "only", None):
        cfg = _only_suites(cfg, args.only)
    jobs = _jobs(args.jobs)
    start = time.perf_counter()
    results = execute(cfg, jobs, None if args.quiet else _progress, timing=args.timing)
    report = build_report(cfg, results, time.perf_counter() - start if args.timing else None)
    text = json.dumps(report, indent=1, sort_keys=True, ensure_ascii=False) + "\n"
    path = args.report or cfg.get("report_path")
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    s = report["summary"]
    print(f"lawcheck: {s['ok']}/{s['laws']} laws as expected, "
          f"{s['expected_fail_refuted']} expected refutations found; status {report['status']}",
          file=sys.stderr)
    for line in s["bad"]:
        print("  BAD " + line, file=sys.stderr)
    return EXIT_OK if report["status"] == "pass" else EXIT_FAIL


def cmd_demo(args):
    from .demos import DEMOS
    if args.name not in DEMOS:
        print(f"unknown demo {args.name!r}; choose from {', '.join(DEMOS)}", file=sys.stderr)
        return EXIT_CONFIG
    lines, ok = DEMOS[args.name]()
    print("\n".join(lines))
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_search(args):
    from .interchange import MODES, interchange_search, load_witnesses, save_witnesses
    if args.verify:
        try:
            ws = load_witnesses(args.verify)
        except ValueError as e:
            print(str(e), file=sys.stderr)
            return EXIT_FAIL
        for w in ws:
            print("verified  " + w.describe())
        return EXIT_OK
    cfg = load_config(args.config) if args.config else parse_config(default_config_text(), "default")
    insts = [i for i in cfg["instances"] if i["kind"] == "interchange"]
    if not insts:
        raise ConfigError("config has no instance of kind 'interchange'")
    status = EXIT_OK
    found = []
    for inst in insts:
        p = inst.get("params", {})
        results = interchange_search(p.get("chain", 5), p.get("dims", {}),
                                     modes=tuple(p.get("modes", MODES)),
                                     values=tuple(p.get("values", (0, 1))),
                                     budget=p.get("search_budget", 2_000_000))
        for r in results:
            w = r["witness"]
            seeds = "; ".join(f"{k}: {v}" for k, v in r["notes"]["seeds"].items())
            if w is not None and w.verify():
                found.append(w)
                print(f"{inst['name']}: {w.describe()}  [{w.source}]")
            else:
                status = EXIT_FAIL
                print(f"{inst['name']}: {r['law']} [{r['split_mode']}] no witness within budget")
            print(f"    constructions: {seeds}")
    if args.out:
        save_witnesses(args.out, found)
        load_witnesses(args.out)            # re-verify what was written
        print(f"wrote {len(found)} witnesses to {args.out}")
    return status


def make_parser():
    ap = argparse.ArgumentParser(prog="lawcheck", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"lawcheck {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, helptext, only in (("run", "run the suites of a config", None),
                                 ("hoare", "run only the Hoare, star and concurrency suites", HOARE_SUITES)):
        run = sub.add_parser(name, help=helptext)
        run.add_argument("--config", help="config JSON (default: the shipped config)")
        run.add_argument("--report", help="write the JSON report here instead of stdout")
        run.add_argument("--seed", type=int)
        run.add_argument("--budget", type=int)
        run.add_argument("--jobs", type=int, help="worker processes (default: LAWCHECK_JOBS or 1)")
        run.add_argument("--timing", action="store_true", help="include wall-clock time in the report")
        run.add_argument("--quiet", action="store_true", help="no per-suite progress lines")
        run.set_defaults(fn=cmd_run, only=only)
    demo = sub.add_parser("demo", help="print a worked example")
    demo.add_argument("name", help="automaton, multiset, vector, frame or stream")
    demo.set_defaults(fn=cmd_demo)
    search = sub.add_parser("search-interchange", help="search witnesses refuting interchange laws")
    search.add_argument("--config", help="config JSON with an 'interchange' instance")
    search.add_argument("--out", help="write verified witnesses to this JSON file")
    search.add_argument("--verify", help="reload a witness file and re-verify every entry")
    search.set_defaults(fn=cmd_search)
    return ap


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"lawcheck: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

"""The `desc` command line: run verification commands over site files.

Every command sweeps the declarations it applies to, prints one line per
check and exits 0 when all pass, 1 when some verified check failed (the
failure carries a witness), and 2 when the input itself is bad: syntax
errors, unresolved references, declarations failing their load-time checks,
or enumerations over the size bound.

Seeded randomness only enters verify-stack (corpus generation) and the
sampling side of cover checks; the same seed reproduces the same run.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from random import Random

from .action import check_action, check_group
from .bundle import Bundle, NotBundle, is_principal_bundle
from .descent import glue_morphisms, glue_object, verify_stack
from .errors import (
    BoundExceeded,
    CocycleRequired,
    CoverNotCanonical,
    FinstackError,
    OverlapMismatch,
    UnknownCommand,
)
from .finset import format_atom
from .sample import build_corpus
from .sitefile import load_site
from .topology import (
    GeneratedSieve,
    check_sheaf_condition,
    is_canonical_cover,
    is_colim_sieve,
    is_jointly_surjective,
)


def _json_safe(v):
    if isinstance(v, tuple):
        return format_atom(v)
    if isinstance(v, dict):
        return {str(k): _json_safe(x) for k, x in v.items()}
    if isinstance(v, (list, set, frozenset)):
        return [_json_safe(x) for x in v]
    if v is None or isinstance(v, (str, int, float, bool)):
        return v
    return repr(v)


def _check(name, status, detail="", error=None, witness=None):
    return {"name": name, "status": status, "detail": detail,
            "error": error, "witness": _json_safe(witness)}


def _cmd_check_group(site, args):
    out = []
    for d in site.by_kind("group"):
        g = d.value
        check_group(g.carrier, g.mul)
        out.append(_check(d.name, "ok", f"order {len(g.carrier)}"))
    return out


def _cmd_check_action(site, args):
    out = []
    for d in site.by_kind("action"):
        a = d.value
        check_action(a.group, a.space, a.act)
        out.append(_check(d.name, "ok",
                          f"group of order {len(a.group.carrier)} on {len(a.space)} atoms"))
    return out


def _cmd_check_bundle(site, args):
    out = []
    for d in site.by_kind("bundle"):
        r = is_principal_bundle(d.value.proj)
        if isinstance(r, Bundle):
            out.append(_check(d.name, "ok",
                              f"{len(r.base)} fibers of size {len(r.group.carrier)}"))
        else:
            assert isinstance(r, NotBundle)
            out.append(_check(d.name, "fail",
                              f"fiber over {format_atom(r.base_atom)} {r.reason}",
                              error="NotBundle",
                              witness={"base_atom": r.base_atom, "reason": r.reason}))
    return out


def _cmd_check_cover(site, args):
    out = []
    for d in site.by_kind("cover"):
        fam = d.value
        verdict = is_canonical_cover(fam, sample_budget=args.budget, seed=args.seed)
        sieve_verdict = is_colim_sieve(GeneratedSieve(fam))
        assert verdict == sieve_verdict
        if verdict:
            out.append(_check(d.name, "ok",
                              f"{len(fam.legs)} legs onto {len(fam.target)} atoms"))
        else:
            hit = set()
            for leg in fam.legs:
                hit.update(leg.table.values())
            uncovered = [a for a in fam.target if a not in hit]
            out.append(_check(d.name, "fail",
                              "not jointly surjective, misses "
                              + " ".join(format_atom(a) for a in uncovered),
                              error="CoverNotCanonical",
                              witness={"uncovered": uncovered}))
    return out


def _cmd_check_sheaf(site, args):
    out = []
    covers = site.by_kind("cover")
    sets = site.by_kind("set")
    for cd in covers:
        for sd in sets:
            name = f"{cd.name}/{sd.name}"
            ok = check_sheaf_condition(cd.value, sd.value, bound=args.bound)
            if ok:
                out.append(_check(name, "ok", f"values in {len(sd.value)} atoms"))
            else:
                canonical = is_jointly_surjective(cd.value)
                out.append(_check(
                    name, "fail",
                    "matching families do not glue uniquely",
                    error="SheafConditionFail",
                    witness={"cover": cd.name, "values": sd.name,
                             "cover_is_canonical": canonical}))
    return out


def _cmd_glue_morphisms(site, args):
    out = []
    for d in site.by_kind("gluing"):
        case = d.value
        try:
            eta = glue_morphisms(case.cover, case.src, case.dst, case.locals_)
            out.append(_check(d.name, "ok", f"glued on {len(eta.fn.src)} atoms"))
        except OverlapMismatch as err:
            out.append(_check(d.name, "fail", str(err),
                              error=err.kind(), witness=err.payload()))
        except CoverNotCanonical as err:
            out.append(_check(d.name, "fail", str(err),
                              error=err.kind(), witness=err.payload()))
    return out


def _cmd_glue_object(site, args):
    out = []
    for d in site.by_kind("datum"):
        datum = d.value
        try:
            r = glue_object(datum)
            out.append(_check(
                d.name, "ok",
                f"total of {len(r.glued.total)} atoms over "
                f"{len(r.glued.base)} with {len(r.comparisons)} leg comparisons"))
        except CocycleRequired as err:
            out.append(_check(d.name, "fail", str(err.cause),
                              error=err.cause.kind(), witness=err.cause.payload()))
        except CoverNotCanonical as err:
            out.append(_check(d.name, "fail", str(err),
                              error=err.kind(), witness=err.payload()))
    return out


def _cmd_verify_stack(site, args):
    out = []
    for d in site.by_kind("stack"):
        stack = d.value
        corpus = build_corpus(stack.group, stack.x_action,
                              Random(args.seed), cases=args.budget)
        rep = verify_stack(stack.group, stack.x_action, corpus)
        detail = (f"effectiveness {rep.effectiveness.passed}/{rep.effectiveness.attempted}, "
                  f"gluing {rep.gluing.passed}/{rep.gluing.attempted}, "
                  f"uniqueness {rep.uniqueness.passed}/{rep.uniqueness.attempted}, "
                  f"rejected {rep.rejected.passed}/{rep.rejected.attempted}")
        if rep.ok:
            out.append(_check(d.name, "ok", detail))
        else:
            first = []
            for cond in (rep.effectiveness, rep.gluing, rep.uniqueness, rep.rejected):
                first += [f"{cond.name}: {msg}" for msg, _ in cond.failures[:2]]
            out.append(_check(d.name, "fail", detail,
                              error="StackConditionFail",
                              witness={"failures": first}))
    return out


def _cmd_classify(site, args):
    from .stack import classifying_fiber_equiv
    out = []
    for d in site.by_kind("classify"):
        task = d.value
        rep = classifying_fiber_equiv(task.group, task.base, bound=args.bound)
        detail = (f"{rep.n_bundles} bundles, {rep.iso_classes} classes, "
                  f"{rep.aut_trivial} automorphisms of the trivial one")
        if rep.n_bundles == rep.n_objects and rep.hom_counts_equal:
            out.append(_check(d.name, "ok", detail))
        else:
            out.append(_check(d.name, "fail", detail,
                              error="ClassifyMismatch",
                              witness={"n_bundles": rep.n_bundles,
                                       "n_objects": rep.n_objects,
                                       "hom_counts_equal": rep.hom_counts_equal}))
    return out


_COMMANDS = {
    "check-group": _cmd_check_group,
    "check-action": _cmd_check_action,
    "check-bundle": _cmd_check_bundle,
    "check-cover": _cmd_check_cover,
    "check-sheaf": _cmd_check_sheaf,
    "glue-morphisms": _cmd_glue_morphisms,
    "glue-object": _cmd_glue_object,
    "verify-stack": _cmd_verify_stack,
    "classify": _cmd_classify,
}


def _write_report(path, report):
    if path is None:
        return
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")


def _print_checks(command, checks, stream):
    for c in checks:
        head = f"{command} {c['name']} "
        status = "ok" if c["status"] == "ok" else "FAIL"
        line = head.ljust(44, ".") + f" {status}"
        if c["detail"]:
            line += f" ({c['detail']})"
        print(line, file=stream)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="desc",
        description="verify groups, actions, bundles, covers and descent "
                    "problems declared in a site file")
    parser.add_argument("command", help="one of: " + ", ".join(sorted(_COMMANDS)))
    parser.add_argument("site", help="path to the site file")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for sampled checks and generated corpora")
    parser.add_argument("--budget", type=int, default=8,
                        help="sampling budget / corpus size for stochastic checks")
    parser.add_argument("--bound", type=int, default=4096,
                        help="enumeration size guard")
    parser.add_argument("--report", default=None, metavar="PATH",
                        help="write a JSON report here")
    args = parser.parse_args(argv)

    t0 = time.time()
    report = {
        "schema": "desc-report/1",
        "command": args.command,
        "site": args.site,
        "seed": args.seed,
        "budget": args.budget,
        "bound": args.bound,
        "status": "error",
        "checks": [],
        "summary": {"total": 0, "passed": 0, "failed": 0},
        "elapsed_s": 0.0,
    }

    def finish_error(err) -> int:
        kind = err.kind() if isinstance(err, FinstackError) else type(err).__name__
        payload = err.payload() if isinstance(err, FinstackError) else {}
        report["status"] = "error"
        report["error"] = {"kind": kind, "message": str(err),
                           "payload": _json_safe(payload)}
        report["elapsed_s"] = round(time.time() - t0, 3)
        _write_report(args.report, report)
        print(f"desc: error: {err}", file=sys.stderr)
        return 2

    if args.command not in _COMMANDS:
        return finish_error(UnknownCommand(args.command))
    try:
        site = load_site(args.site)
    except OSError as err:
        return finish_error(err)
    except FinstackError as err:
        return finish_error(err)

    try:
        checks = _COMMANDS[args.command](site, args)
    except BoundExceeded as err:
        return finish_error(err)

    passed = sum(1 for c in checks if c["status"] == "ok")
    failed = len(checks) - passed
    report["checks"] = checks
    report["summary"] = {"total": len(checks), "passed": passed, "failed": failed}
    report["status"] = "ok" if failed == 0 else "fail"
    report["elapsed_s"] = round(time.time() - t0, 3)
    _write_report(args.report, report)

    _print_checks(args.command, checks, sys.stdout)
    if not checks:
        print(f"{args.command}: nothing to check")
    print(f"{passed}/{len(checks)} ok")
    return 0 if failed == 0 else 1


if __name__ == "__main__":
    sys.exit(main())

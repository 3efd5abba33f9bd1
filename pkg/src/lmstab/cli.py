"""Command line driver: build instances, certify them, emit JSON reports.

Reports are JSON with a fixed key order and exact numbers (fractions are
written as strings such as "-3/2"), so identical configs give identical
bytes.  Wall-clock timing is only included with --timing.
"""
from __future__ import annotations

import argparse
import json
import logging
import shlex
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import certify as cert_mod
from .errors import (InternalInconsistency, LMStabError, ParseError, PreconditionError,
                     SamplingError)
from .lmsheaf import (KernelBundleInstance, LMInstance, construct_kernel_bundle,
                      construct_lm, construct_pullback_instance, full_linear_system,
                      parse_instance, sample_kernel_bundle, sample_lm)
from .polyring import Ring, field_from_spec, parse_hpoly
from .sheafmodel import (h0_twist, hilbert_polynomial, local_freeness_probe, rank_c1,
                         restrict_to_line)

log = logging.getLogger("lmstab")

EXIT_OK = 0
EXIT_UNDETERMINED = 10
EXIT_PRECONDITION = 20
EXIT_INCONSISTENT = 30

H0_WINDOW = (0, 1, 2)


def _plain(x):
    """JSON-safe copy: Fractions become strings, tuples become lists."""
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    return str(x)


def dumps(report):
    return json.dumps(_plain(report), indent=2, ensure_ascii=False) + "\n"


# -- instance sources ---------------------------------------------------------------

def _read_gens_file(path, args):
    """First non-comment line is f, every later line is one generator."""
    with open(path) as fh:
        lines = [ln.split("#", 1)[0].strip() for ln in fh]
    lines = [ln for ln in lines if ln]
    if len(lines) < 2:
        raise ParseError(f"{path}: need f and at least one generator")
    if args.n is None:
        raise PreconditionError("--n is required with --gens-file")
    ring = Ring(args.n + 1, field_from_spec(args.field))
    f = parse_hpoly(lines[0], ring.nvars, ring.field)
    gens = [parse_hpoly(g, ring.nvars, ring.field) for g in lines[1:]]
    d = args.d if args.d is not None else f.degree
    l = args.l if args.l is not None else gens[0].degree
    r = args.r if args.r is not None else len(gens)
    return construct_lm(args.n, d, l, r, f, gens, allow_singular=args.allow_singular)


def load_instance(args):
    if getattr(args, "instance", None):
        with open(args.instance) as fh:
            return parse_instance(fh.read(), allow_singular=args.allow_singular)
    if getattr(args, "gens_file", None):
        return _read_gens_file(args.gens_file, args)
    missing = [k for k in ("n", "d", "l", "r") if getattr(args, k) is None]
    if missing:
        raise PreconditionError("missing " + ", ".join("--" + k for k in missing))
    return sample_lm(args.n, args.d, args.l, args.r, args.seed, field=args.field)


# -- report pieces ------------------------------------------------------------------

def instance_block(inst):
    if isinstance(inst, LMInstance):
        pre = {k: v for k, v in inst.preconditions.items()}
        return {"kind": "lm", "N": inst.N, "d": inst.d, "l": inst.l, "r": inst.r,
                "field": inst.ring.field.name, "f": str(inst.f),
                "gens": [str(g) for g in inst.gens], "tag": list(inst.tag),
                "seed": inst.seed, "preconditions": pre}
    return {"kind": "kernel_bundle", "N": inst.N, "d": inst.d,
            "field": inst.ring.field.name, "W": [str(w) for w in inst.W],
            "basepoint_free": inst.basepoint_free, "seed": inst.seed}


def invariants_block(inst):
    module = inst.kernel if isinstance(inst, LMInstance) else inst.module
    cs = rank_c1(module)
    hp = hilbert_polynomial(module)
    out = {"rank": cs.rank, "c1": cs.c1, "slope": cs.slope,
           "hilbert_polynomial": {"binomial_basis": list(hp.binomial),
                                  "coefficients": list(hp.coefficients)},
           "h0": {str(k): h0_twist(module, k) for k in H0_WINDOW}}
    if isinstance(inst, LMInstance):
        out["codim_ZD"] = inst.preconditions.get("codim_ZD")
        out["codim_ZX"] = inst.preconditions.get("codim_ZX")
        out["local_freeness"] = local_freeness_probe([inst.f] + list(inst.gens))
    else:
        out["local_freeness"] = "LocallyFree" if inst.basepoint_free else "Undetermined"
    out["generators"] = [str(g) for g in module.generators]
    return out


def verdict_block(v):
    return {"status": v.status, "certificates": [c.as_dict() for c in v.certificates]}


def config_block(args):
    keep = ("command", "n", "d", "l", "r", "m", "dmap", "size", "seed", "field",
            "instance", "gens_file", "manifest", "trials", "trust_line_probe",
            "allow_singular")
    return {k: getattr(args, k) for k in keep if getattr(args, k, None) not in (None, False)}


def build_report(args, inst, with_verdict=True):
    rep = {"config": config_block(args), "instance": instance_block(inst),
           "invariants": invariants_block(inst)}
    code = EXIT_OK
    if with_verdict:
        v = cert_mod.certify(inst, trust_line_probe=args.trust_line_probe,
                             line_trials=args.trials, seed=args.seed)
        rep["verdict"] = verdict_block(v)
        if v.status == cert_mod.UNDETERMINED:
            code = EXIT_UNDETERMINED
    return rep, code


# -- commands -----------------------------------------------------------------------

def cmd_construct(args):
    return build_report(args, load_instance(args), with_verdict=False)


def cmd_certify(args):
    return build_report(args, load_instance(args))


def cmd_kernel_bundle(args):
    if args.size is None:
        W = full_linear_system(args.n, args.d, field=args.field)
        kb = construct_kernel_bundle(args.n, args.d, W)
        if not kb.basepoint_free:
            raise PreconditionError("W has base points")
    else:
        kb = sample_kernel_bundle(args.n, args.d, args.size, args.seed, field=args.field)
    return build_report(args, kb)


def cmd_pullback(args):
    inst = construct_pullback_instance(args.n, args.dmap, args.m, args.r, args.seed,
                                       field=args.field)
    return build_report(args, inst)


def cmd_probe_line(args):
    inst = load_instance(args)
    trials = max(args.trials, 1)
    types = []
    for t in range(trials):
        try:
            res = restrict_to_line(inst.kernel, seed=f"{args.seed}:{t}")
        except SamplingError as exc:
            types.append({"trial": t, "error": str(exc)})
            continue
        types.append({"trial": t, "splitting": list(res.splitting), "torsion": res.torsion})
    good = [t["splitting"] for t in types if "splitting" in t]
    rep = {"config": config_block(args), "instance": instance_block(inst),
           "probe": {"trials": types, "generic": min(good) if good else None}}
    return rep, EXIT_OK if good else EXIT_PRECONDITION


def _row_args(base, row):
    ns = argparse.Namespace(**vars(base))
    for k in ("n", "d", "l", "r", "m", "dmap", "size", "seed"):
        setattr(ns, k, None)
    ns.seed = 0
    ns.instance = ns.gens_file = None
    kind = row.pop("kind", "lm")
    for k, v in row.items():
        if k == "field":
            ns.field = v
        elif k == "size" and v == "full":
            ns.size = None
        elif k in ("n", "d", "l", "r", "m", "dmap", "size", "seed", "trials"):
            setattr(ns, k, int(v))
        else:
            raise ParseError(f"unknown manifest key {k!r}")
    ns.command = {"lm": "certify", "kernel": "kernel-bundle", "pullback": "pullback"}.get(kind)
    if ns.command is None:
        raise ParseError(f"unknown row kind {kind!r}")
    return ns


def parse_manifest(text):
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        row = {}
        for tok in shlex.split(line):
            if "=" not in tok:
                raise ParseError(f"manifest line {lineno}: expected key=value, got {tok!r}")
            k, v = tok.split("=", 1)
            row[k.strip().lower()] = v.strip()
        rows.append(row)
    return rows


def _run_row(payload):
    base, index, row = payload
    label = " ".join(f"{k}={v}" for k, v in row.items())
    try:
        ns = _row_args(base, dict(row))
        rep, code = COMMANDS[ns.command](ns)
        status = rep["verdict"]["status"]
    except InternalInconsistency as exc:
        rep, code, status = {"error": str(exc)}, EXIT_INCONSISTENT, "InternalInconsistency"
    except (LMStabError, ValueError) as exc:
        rep, code, status = {"error": str(exc)}, EXIT_PRECONDITION, "Failed"
    return index, label, rep, code, status


def cmd_batch(args):
    with open(args.manifest) as fh:
        rows = parse_manifest(fh.read())
    payloads = [(args, i, row) for i, row in enumerate(rows)]
    if args.jobs > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            results = list(ex.map(_run_row, payloads))
    else:
        results = [_run_row(p) for p in payloads]
    results.sort(key=lambda t: t[0])
    reports, summary = [], []
    worst = EXIT_OK
    for index, label, rep, code, status in results:
        reports.append({"index": index, "row": label, "report": rep})
        summary.append({"index": index, "row": label, "status": status})
        if code in (EXIT_PRECONDITION, EXIT_INCONSISTENT):
            worst = max(worst, code)
    return {"config": config_block(args), "rows": reports, "summary": summary}, worst


def cmd_reverify(args):
    with open(args.report) as fh:
        data = json.load(fh)
    blocks = [r["report"] for r in data["rows"]] if "rows" in data else [data]
    checks = []
    ok = True
    for i, rep in enumerate(blocks):
        if "verdict" not in rep:
            continue
        certs = [cert_mod.Certificate(c["rule"], c["status"], c["evidence"], c["citation"],
                                      c.get("corroborating", False))
                 for c in rep["verdict"]["certificates"]]
        per = [{"rule": c.rule, "claimed": c.status, "recomputed": cert_mod.reverify(c)}
               for c in certs]
        trust = rep.get("config", {}).get("trust_line_probe", False)
        v = cert_mod.Verdict(rep["verdict"]["status"], certs)
        good = cert_mod.reverify_verdict(v, trust_line_probe=trust)
        ok = ok and good
        checks.append({"report": i, "status": v.status, "ok": good, "certificates": per})
    return {"reverified": checks, "ok": ok}, EXIT_OK if ok else EXIT_INCONSISTENT


COMMANDS = {
    "construct": cmd_construct,
    "certify": cmd_certify,
    "batch": cmd_batch,
    "kernel-bundle": cmd_kernel_bundle,
    "pullback": cmd_pullback,
    "probe-line": cmd_probe_line,
    "reverify": cmd_reverify,
}


# -- argument parsing -----------------------------------------------------------------

def _common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--field", default="32003", help="prime p or 'rational'")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--trials", type=int, default=0, help="random lines for the splitting probe")
    p.add_argument("--trust-line-probe", action="store_true",
                   help="let the line probe contribute a status")
    p.add_argument("--allow-singular", action="store_true")
    p.add_argument("--timing", action="store_true", help="add wall-clock milliseconds to the report")
    p.add_argument("-v", "--verbose", action="store_true")


def _instance_args(p):
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--r", type=int)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--instance", help="instance file (key = value lines)")
    src.add_argument("--gens-file", help="f on the first line, one generator per line after")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="lmstab",
        description="Slope stability certificates for Lazarsfeld-Mukai kernel sheaves on P^N.")
    sub = ap.add_subparsers(dest="command", required=True)

    for name, help_ in (("construct", "build an instance and report its invariants"),
                        ("certify", "build an instance and certify its stability"),
                        ("probe-line", "splitting types on random lines")):
        p = sub.add_parser(name, help=help_)
        _instance_args(p)
        _common(p)

    p = sub.add_parser("kernel-bundle", help="kernel bundle M_{O(d),W}")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--size", type=int, help="|W| general forms; default all monomials")
    _common(p)

    p = sub.add_parser("pullback", help="instance pulled back along a finite map")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dmap", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    _common(p)

    p = sub.add_parser("batch", help="certify every row of a manifest")
    p.add_argument("manifest")
    p.add_argument("--jobs", type=int, default=1)
    _common(p)

    p = sub.add_parser("reverify", help="re-check certificates of a saved report")
    p.add_argument("report")
    p.add_argument("--out")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--timing", action="store_true")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    for k in ("n", "d", "l", "r", "m", "dmap", "size", "instance", "gens_file", "manifest"):
        if not hasattr(args, k):
            setattr(args, k, None)
    for k in ("trust_line_probe", "allow_singular"):
        if not hasattr(args, k):
            setattr(args, k, False)
    if not hasattr(args, "trials"):
        args.trials = 0
    if not hasattr(args, "jobs"):
        args.jobs = 1
    t0 = time.perf_counter()
    try:
        report, code = COMMANDS[args.command](args)
    except InternalInconsistency as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except SamplingError as exc:
        print(f"sampling failed ({exc.predicate}): {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (LMStabError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    if args.timing:
        report["timing_ms"] = int((time.perf_counter() - t0) * 1000)
    text = dumps(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

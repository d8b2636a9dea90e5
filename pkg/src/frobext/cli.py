"""Command line front end.

Three subcommands:

  ext           Ext groups and both global identity checks for a pair of
                motives given as JSON (inline or a file path).
  verify-local  The local identity, either on random instances (l-adic
                pairs, or one of the p-adic generator cases) or replayed
                from a serialized failing case.
  zeta          Special value and motivic comparison for a catalogue
                variety described in JSON.

Exit codes: 0 verified, 1 a verification failed, 2 bad input, 3 the
hypothesis of the local theorem is violated, 4 p-adic precision could not be
certified.  JSON output is deterministic (sorted keys); a failing random
case is written to a replay file so the exact instance can be re-run.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction

from .crystal import (
    LOCAL_CASES,
    Crystal,
    random_local_pair,
    special_module,
)
from .crystal import verify_local_identity as verify_crystal
from .exact import PrecisionError, is_prime
from .galois import GaloisModule, random_admissible_pair
from .galois import verify_local_identity as verify_galois
from .motive import (
    global_ext_orders,
    motive_from_json,
    verify_global_identity,
    verify_weil_identity,
    weil_ext,
)
from .witt import WittRing
from .zeta import variety_from_spec, verify_variety_identity, zeta_special_value
from .zgamma import HypothesisError

REPLAY_FILE = "frobext-failing-case.json"
PRECISION_ENV = "FROBEXT_PRECISION"


def _default_precision() -> int:
    try:
        return max(4, int(os.environ.get(PRECISION_ENV, "20")))
    except ValueError:
        return 20


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in sorted(x.items(), key=lambda kv: str(kv[0]))}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _emit(obj: dict, as_json: bool):
    if as_json:
        print(json.dumps(_jsonable(obj), sort_keys=True, separators=(",", ":")))
    else:
        for k in sorted(obj):
            print("%s: %s" % (k, _jsonable(obj[k])))


def _read_source(text: str) -> str:
    """Inline JSON or a path to a JSON file; '-' reads stdin."""
    if text == "-":
        return sys.stdin.read()
    t = text.strip()
    if t.startswith("{"):
        return t
    with open(text) as fh:
        return fh.read()


# ---------------------------------------------------------------------------
# serialization of local instances for the replay loop


def _module_obj(m: GaloisModule) -> dict:
    return {"l": m.l, "q": m.q, "free_frob": m.free_frob,
            "torsion": list(m.torsion), "torsion_frob": m.torsion_frob}


def _module_from_obj(o: dict) -> GaloisModule:
    return GaloisModule(int(o["l"]), int(o["q"]), o.get("free_frob"),
                        tuple(int(d) for d in o.get("torsion") or ()),
                        o.get("torsion_frob"))


def _crystal_obj(c: Crystal) -> dict:
    return {"coords": c.coords, "exponents": c.exponents,
            "special_poly": c.special_poly}


def _crystal_from_obj(o: dict, ring: WittRing) -> Crystal:
    if o.get("special_poly"):
        return special_module(ring, [int(x) for x in o["special_poly"]])
    return Crystal(ring, o["coords"], exponents=o.get("exponents"))


def _write_replay(case: dict) -> str:
    with open(REPLAY_FILE, "w") as fh:
        json.dump(_jsonable(case), fh, sort_keys=True, indent=1)
    return REPLAY_FILE


# ---------------------------------------------------------------------------
# subcommands


def _cmd_ext(args) -> int:
    x = motive_from_json(_read_source(args.x), precision=args.precision)
    y = motive_from_json(_read_source(args.y), precision=args.precision)
    rep = global_ext_orders(x, y)
    out = {
        "q": rep.q, "rho": rep.rho,
        "hom_tors_order": rep.hom_tors_order,
        "ext1_order": rep.ext1_order,
        "ext2_cotors_order": rep.ext2_cotors_order,
        "discriminant": rep.discriminant,
        "nstar": rep.nstar,
        "support": list(rep.support),
        "global_identity": verify_global_identity(x, y)["equal"],
        "weil_identity": verify_weil_identity(x, y)["equal"],
    }
    try:
        w = weil_ext(x, y)
        out["weil"] = {"ext0_rank": w.ext0_rank, "ext0_torsion": w.ext0_torsion,
                       "ext1_rank": w.ext1_rank, "ext1_torsion": w.ext1_torsion,
                       "ext2_order": w.ext2_order, "z_f": w.z_f}
    except HypothesisError as exc:
        out["weil"] = "indeterminate: %s" % exc
    _emit(out, args.json)
    return 0 if out["global_identity"] and out["weil_identity"] else 1


def _cmd_verify_local(args) -> int:
    if args.replay:
        with open(args.replay) as fh:
            case = json.load(fh)
        if "case" in case:
            ring = WittRing(int(case["p"]), int(case.get("degree", 1)),
                            int(case.get("precision", args.precision)))
            m = _crystal_from_obj(case["m"], ring)
            n = _crystal_from_obj(case["n"], ring)
            out = verify_crystal(m, n)
        else:
            m = _module_from_obj(case["m"])
            n = _module_from_obj(case["n"])
            out = verify_galois(m, n)
        _emit(out, args.json)
        return 0 if out["equal"] else 1

    if not args.random:
        raise ValueError("need --random N or --replay FILE")
    rng = random.Random(args.seed)
    failures = 0
    if args.case:
        if args.case not in LOCAL_CASES:
            raise ValueError("--case must be one of %s" % (LOCAL_CASES,))
        p = args.prime or 3
        if not is_prime(p):
            raise ValueError("--prime must be a prime number")
        ring = WittRing(p, 1, args.precision)
        for i in range(args.random):
            m, n = random_local_pair(rng, ring, args.case)
            out = verify_crystal(m, n)
            if not out["equal"]:
                failures += 1
                path = _write_replay({"case": args.case, "p": p, "degree": 1,
                                      "precision": args.precision,
                                      "m": _crystal_obj(m), "n": _crystal_obj(n)})
                print("failing case written to %s; replay with:" % path,
                      file=sys.stderr)
                print("  frobext verify-local --replay %s" % path,
                      file=sys.stderr)
        summary = {"case": args.case, "p": p, "instances": args.random,
                   "failures": failures}
    else:
        l = args.prime or 3
        if not is_prime(l):
            raise ValueError("--prime must be a prime number")
        q = 3 if l == 2 else 2
        for i in range(args.random):
            m, n = random_admissible_pair(rng, l, q, max_rank=args.bound)
            out = verify_galois(m, n)
            if not out["equal"]:
                failures += 1
                path = _write_replay({"m": _module_obj(m), "n": _module_obj(n)})
                print("failing case written to %s; replay with:" % path,
                      file=sys.stderr)
                print("  frobext verify-local --replay %s" % path,
                      file=sys.stderr)
        summary = {"l": l, "q": q, "instances": args.random,
                   "failures": failures}
    _emit(summary, args.json)
    return 0 if failures == 0 else 1


def _cmd_zeta(args) -> int:
    spec = json.loads(_read_source(args.variety))
    r = int(spec.pop("r", args.r))
    v = variety_from_spec(spec)
    order, leading = zeta_special_value(v, r)
    out = verify_variety_identity(v, r)
    out["order"], out["leading"] = order, leading
    _emit(out, args.json)
    return 0 if out["equal"] else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="frobext",
        description="Ext groups of Frobenius modules and zeta special values")
    sub = ap.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("ext", help="Ext data for a pair of motives")
    pe.add_argument("x", help="motive JSON (inline, file path, or -)")
    pe.add_argument("y", help="motive JSON (inline, file path, or -)")

    pv = sub.add_parser("verify-local", help="check the local identity")
    pv.add_argument("--random", type=int, default=0, metavar="N",
                    help="number of random instances")
    pv.add_argument("--prime", type=int, default=0,
                    help="l for l-adic runs, p with --case")
    pv.add_argument("--case", choices=LOCAL_CASES, default=None,
                    help="p-adic generator case (default: l-adic pairs)")
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--bound", type=int, default=3,
                    help="max free rank of random modules")
    pv.add_argument("--replay", metavar="FILE",
                    help="re-run a serialized failing case")

    pz = sub.add_parser("zeta", help="special value of a catalogue variety")
    pz.add_argument("variety", help="variety JSON (inline, file path, or -)")
    pz.add_argument("--r", type=int, default=0,
                    help="twist if the JSON has no r field")

    for p in (pe, pv, pz):
        p.add_argument("--json", action="store_true",
                       help="machine-readable output")
        p.add_argument("--precision", type=int, default=_default_precision(),
                       help="p-adic working precision (env %s)" % PRECISION_ENV)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "ext":
            return _cmd_ext(args)
        if args.command == "verify-local":
            return _cmd_verify_local(args)
        return _cmd_zeta(args)
    except HypothesisError as exc:
        print("hypothesis violated: %s" % exc, file=sys.stderr)
        return 3
    except PrecisionError as exc:
        print("precision not certified: %s" % exc, file=sys.stderr)
        return 4
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

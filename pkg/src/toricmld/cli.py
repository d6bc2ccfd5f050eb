"""Command line interface: ``toricmld <command> ...``.

Exit codes: 0 success, 1 bad input, 2 verification failure, 3 cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Sequence

from . import explorer as ex
from .automorphisms import (DEFAULT_GROUP_CAP, OuterToricElement, element_order, fan_automorphisms,
                            group_closure, jordan_report)
from .cones import Cone
from .errors import CapExceeded, OrderCapExceeded, ToricError, VerificationFailure
from .lattice import Lattice, rat_vector, to_fraction
from .pairs import ToricPair, cartier_index, class_group, mld
from .quotients import TorusSubgroup, log_quotient, quotient_tower

CAP_ENV = "TORICMLD_CAP"

EXIT_OK, EXIT_INPUT, EXIT_VERIFY, EXIT_CAP = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    # exit code 2 is reserved for verification failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _q(x) -> str:
    return str(Fraction(x))


def _vec(v) -> list[str]:
    return [_q(x) for x in v]


def _load_json(path: str):
    if path == "-":
        return json.load(sys.stdin)
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _lattice(spec) -> Lattice | None:
    if not spec:
        return None
    return Lattice([rat_vector(g) for g in spec["generators"]])


def load_pair(doc) -> ToricPair:
    """Build a pair from the JSON cone schema; boundary follows the listed ray order."""
    N = _lattice(doc.get("lattice"))
    rays = [rat_vector(v) for v in doc["rays"]]
    return ToricPair.from_rays(rays, doc.get("boundary"), N)


def _pair_dict(P: ToricPair) -> dict:
    return {
        "lattice": {"generators": [_vec(b) for b in P.lattice.basis]},
        "rays": [_vec(v) for v in P.cone.rays],
        "boundary": _vec(P.boundary),
    }


def _mld_dict(P: ToricPair) -> dict:
    value, witness = mld(P)
    return {"value": _q(value), "witness": _vec(witness), "index": cartier_index(P)}


# -- single-object commands ---------------------------------------------------

def cmd_mld(args) -> dict:
    return _mld_dict(load_pair(_load_json(args.input)))


def cmd_index(args) -> dict:
    return {"index": cartier_index(load_pair(_load_json(args.input)))}


def cmd_cox(args) -> dict:
    P = load_pair(_load_json(args.input))
    return {"class_group": class_group(P.cone).as_dict()}


def cmd_quotient(args) -> dict:
    """Log quotient by an overlattice, ``1/r(weights)`` or a whole tower."""
    doc = _load_json(args.input)
    P = load_pair(doc)
    if "tower" in doc:
        tower = quotient_tower([_lattice(t) for t in doc["tower"]], P)
        return {"stages": [{**_pair_dict(s.pair), "mld": _q(s.mld), "witness": _vec(s.witness),
                            "index": s.cartier_index} for s in tower.stages]}
    if "overlattice" in doc:
        F = TorusSubgroup(P.lattice, _lattice(doc["overlattice"]))
    else:
        F = TorusSubgroup.from_weights(int(doc["r"]), [int(a) for a in doc["weights"]])
    Q = log_quotient(P, F)
    return {"group": list(F.group.factors), **_pair_dict(Q), **_mld_dict(Q)}


def cmd_aut(args) -> dict:
    doc = _load_json(args.input)
    P = load_pair(doc)
    auts = fan_automorphisms(P.cone)
    out = {
        "aut_order": len(auts),
        "automorphisms": [{"g": [list(r) for r in g.matrix], "order": element_order(g)}
                          for g in auts],
    }
    if doc.get("generators") is not None:
        gens = [OuterToricElement.make(e["g"], [to_fraction(x) for x in e["t"]])
                for e in doc["generators"]]
        G = group_closure(gens, cap=args.cap or DEFAULT_GROUP_CAP, dim=P.dim)
        out["group_order"] = G.order
        out["element_orders"] = sorted({_order(x, G) for x in G})
        out["jordan"] = jordan_report(G, P.dim, len(auts)).as_dict()
    return out


def _order(x: OuterToricElement, G) -> int:
    k, y = 1, x
    one = OuterToricElement.identity(x.dim)
    while y != one:
        y, k = y * x, k + 1
        if k > G.order:
            raise VerificationFailure("element order exceeds the group order")
    return k


# -- explorer -----------------------------------------------------------------

def _records(args):
    return list(ex.enumerate_cyclic(args.dim, args.rmax, None, not args.no_dedupe, args.cap))


def _write(obj, args):
    fmt = args.format or ("csv" if str(args.out or "").endswith(".csv") else "json")
    if args.out in (None, "-"):
        sys.stdout.write(ex.dumps(obj, fmt))
    else:
        ex.emit(obj, fmt, args.out)


def cmd_sweep(args):
    if args.window:
        window = ex.Window.parse(args.window)
    else:
        window = ex.Window.open(0, ex.default_epsilon(args.dim))
    r1 = args.r1 or max(1, args.rmax // 5)
    if r1 >= args.rmax:
        raise ValueError("--r1 must be smaller than --rmax")
    records = _records(args)
    if args.records:
        ex.emit(records, "csv", args.records)
    _write(ex.spectrum(records, window, r1, args.rmax), args)


def cmd_index_table(args):
    windows = [ex.Window.parse(w) for w in (args.windows or ["[1,1]", "[1/2,1)"])]
    records = _records(args)
    _write(ex.index_table(records, windows, args.r1), args)


def cmd_accumulation(args):
    records = _records(args)
    matched, unmatched = ex.accumulation_scan(records, args.dim, ex._exact(args.resolution))
    text = json.dumps({"matched": [c.as_dict() for c in matched],
                       "unmatched": [c.as_dict() for c in unmatched]}, indent=2) + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)


# -- wiring -------------------------------------------------------------------

SWEEP_DEFAULTS = {"dim": 2, "rmax": 50, "window": None, "out": None, "r1": None, "cap": None,
                  "format": None, "no_dedupe": False, "records": None, "windows": None,
                  "resolution": "1/100"}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="toricmld", description="Minimal log discrepancies of toric pairs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, func, text in [
        ("mld", cmd_mld, "mld, witness and Cartier index of a pair"),
        ("index", cmd_index, "Cartier index of K_X + B"),
        ("cox", cmd_cox, "class group and Cox variable degrees"),
        ("quotient", cmd_quotient, "log quotient by a finite torus subgroup"),
        ("aut", cmd_aut, "fan automorphisms and outer-toric groups"),
    ]:
        s = sub.add_parser(name, help=text)
        s.add_argument("input", help="JSON file with the cone schema, or - for stdin")
        s.set_defaults(func=func, json_out=True)
        if name == "aut":
            s.add_argument("--cap", type=int, help="group closure cap")

    exp = sub.add_parser("explorer", help="enumeration campaigns")
    esub = exp.add_subparsers(dest="campaign", required=True, parser_class=_Parser)
    for name, func in [("sweep", cmd_sweep), ("index-table", cmd_index_table),
                       ("accumulation", cmd_accumulation)]:
        s = esub.add_parser(name)
        s.add_argument("--config", help="JSON file with the same keys as the flags")
        s.add_argument("--dim", type=int)
        s.add_argument("--rmax", type=int)
        s.add_argument("--r1", type=int, help="smaller sweep bound for stabilization checks")
        s.add_argument("--cap", type=int, help=f"largest allowed --rmax (env {CAP_ENV})")
        s.add_argument("--out", help="output file (default stdout)")
        s.add_argument("--format", choices=["csv", "json"])
        s.add_argument("--no-dedupe", action="store_true", default=None)
        if name == "sweep":
            s.add_argument("--window", help='mld window, e.g. "1/10:1" or "[1/2,1)"')
            s.add_argument("--records", help="also write every record to this CSV file")
        if name == "index-table":
            s.add_argument("--windows", nargs="+", help='windows such as "[1,1]" "[1/2,1)"')
        if name == "accumulation":
            s.add_argument("--resolution", help="gap below which a family clusters")
        s.set_defaults(func=func, json_out=False)
    return p


def _apply_config(args):
    """Flags win over the config file, which wins over the environment and defaults."""
    config = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            config = {k.replace("-", "_"): v for k, v in json.load(fh).items()}
    for key, default in SWEEP_DEFAULTS.items():
        if getattr(args, key, None) is None:
            value = config.get(key, default)
            if key == "cap" and value is None:
                value = int(os.environ[CAP_ENV]) if os.environ.get(CAP_ENV) else ex.DEFAULT_RMAX_CAP
            setattr(args, key, value)
    if args.window is not None:
        args.window = str(args.window)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if not args.json_out:
            _apply_config(args)
        elif args.command == "aut" and args.cap is None and os.environ.get(CAP_ENV):
            args.cap = int(os.environ[CAP_ENV])
        result = args.func(args)
        if args.json_out:
            sys.stdout.write(json.dumps(result, indent=2) + "\n")
    except VerificationFailure as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (CapExceeded, OrderCapExceeded) as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ToricError, ValueError, TypeError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

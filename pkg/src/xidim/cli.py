"""Command-line front end.

Every command builds a report (tool version, command, config echo, seed,
timestamp, result) and prints it as JSON with ``--json`` or as a short text
summary otherwise.  Exit codes: 0 success, 1 unreadable or invalid input,
2 budget exceeded, 3 negative verdict (e.g. no cover exists), 4 inconclusive.

Budgets default from the environment: ``XIDIM_NODE_BUDGET``,
``XIDIM_POINT_CAP``, ``XIDIM_BOX_POINT_CAP``, ``XIDIM_ENUM_BUDGET``,
``XIDIM_TRUNCATE_LIMIT`` and ``XIDIM_TIME_CAP`` (seconds).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import signal
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

from . import __version__, kernels
from .errors import BudgetExceeded, ChainDefect, ParseError, PreconditionError
from .finfam import (
    ExplicitFamily,
    derive,
    family_from_json,
    family_to_json,
    inclusive_closure,
    is_inclusive,
    ord_family,
    ord_fast,
    reindex,
)
from .ordinal import parse_ordinal, ordinal_to_json
from .sfamily import s_member, s_member_shifted, truncate, witness_index

EXIT_OK, EXIT_INPUT, EXIT_BUDGET, EXIT_NEGATIVE, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit 2, which means "budget" here
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


class Outcome:
    def __init__(self, result: Any, code: int = EXIT_OK, text: Optional[str] = None, raw: Optional[str] = None):
        self.result = result
        self.code = code
        self.text = text
        self.raw = raw  # CSV output that replaces the text summary


def _env_int(name: str, default: int) -> int:
    try:
        return int(os.environ.get(name, default))
    except ValueError:
        raise ParseError(f"{name} must be an integer") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(" ", "").split(",") if v != ""]
    except ValueError:
        raise ParseError(f"expected comma-separated integers, got {text!r}") from None


def _box(text: str) -> list[tuple[int, int]]:
    out = []
    for part in text.split(","):
        try:
            lo, hi = part.split(":")
            out.append((int(lo), int(hi)))
        except ValueError:
            raise ParseError(f"box axes look like lo:hi, got {part!r}") from None
    return out


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None


def _read_json(path: str) -> Any:
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None


def _json_arg(text: str) -> Any:
    """Inline JSON when the argument looks like JSON, otherwise a file path."""
    if text.lstrip()[:1] in ("[", "{"):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad inline JSON: {exc}") from None
    return _read_json(text)


def _family_arg(args) -> ExplicitFamily:
    if args.family is not None:
        return family_from_json(_read_json(args.family))
    if args.members is not None:
        return family_from_json({"members": _json_arg(args.members)})
    raise ParseError("give --family FILE or --members JSON")


def _point_json(p) -> dict:
    return {"label": list(p.label), "coords": list(p.coords)}


def _parse_point(text: str):
    from .space import point

    try:
        label, coords = text.split(":")
        return point(_ints(label), _ints(coords))
    except ValueError:
        raise ParseError(f"points look like 2,3:4,1 (label:coords), got {text!r}") from None


# --- commands -----------------------------------------------------------------


def cmd_ord(args) -> Outcome:
    fam = _family_arg(args)
    value = ord_fast(fam) if len(fam.ground) > 12 else ord_family(fam)
    res = {"ord": value, "familySize": len(fam), "ground": list(fam.ground), "maxCardinality": fam.max_cardinality()}
    return Outcome(res, text=f"Ord = {value} ({len(fam)} members)")


def cmd_family(args) -> Outcome:
    fam = _family_arg(args)
    if args.action == "show":
        out = fam
    elif args.action == "derive":
        out = derive(fam, _ints(args.sigma or ""))
    elif args.action == "closure":
        out = inclusive_closure(fam)
    elif args.action == "reindex":
        out = reindex(fam, _ints(args.k or ""))
    else:  # pragma: no cover - argparse restricts choices
        raise ParseError(args.action)
    res = {"family": family_to_json(out), "ord": ord_fast(out), "inclusive": is_inclusive(out)}
    return Outcome(res, text=json.dumps(family_to_json(out)))


def cmd_sxi(args) -> Outcome:
    xi = parse_ordinal(args.xi)
    if args.action == "member":
        sigma = _ints(args.sigma or "")
        if not sigma:
            raise ParseError("--sigma is required")
        member = s_member_shifted(sigma, xi) if args.shifted else s_member(sigma, xi)
        res = {"xi": ordinal_to_json(xi), "xiText": str(xi), "sigma": sigma, "shifted": args.shifted, "member": member}
        if member and not xi.is_finite() and not args.shifted:
            res["witnessIndex"] = witness_index(sigma, xi)
        return Outcome(res, text=f"{sigma} {'in' if member else 'not in'} S_{xi}")
    limit = _env_int("XIDIM_TRUNCATE_LIMIT", 20)
    if args.table:
        rows = []
        for n in range(1, args.n + 1):
            fam = truncate(xi, n, limit).family
            rows.append({"N": n, "ord": ord_fast(fam), "familySize": len(fam)})
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["N", "ord", "familySize"], lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return Outcome({"xi": ordinal_to_json(xi), "xiText": str(xi), "table": rows}, raw=buf.getvalue())
    fam = truncate(xi, args.n, limit).family
    value = ord_fast(fam)
    res = {"xi": ordinal_to_json(xi), "xiText": str(xi), "n": args.n, "ord": value, "familySize": len(fam)}
    return Outcome(res, text=f"Ord(S_{xi} on 1..{args.n}) = {value} ({len(fam)} members)")


def cmd_space(args) -> Outcome:
    from .space import d_xi, enumerate_x_tau, write_points_csv

    if args.action == "enum":
        tau = _ints(args.tau or "")
        box = _box(args.box or "")
        if len(box) == 1:
            box = box * len(tau)
        pts = enumerate_x_tau(tau, box, _env_int("XIDIM_ENUM_BUDGET", 10**7))
        res = {"tau": tau, "box": [list(b) for b in box], "count": len(pts), "points": [list(p.coords) for p in pts]}
        return Outcome(res, raw=write_points_csv(pts))
    if not args.a or not args.b:
        raise ParseError("space dist needs --a and --b")
    p, q = _parse_point(args.a), _parse_point(args.b)
    value = d_xi(p, q)
    return Outcome({"a": _point_json(p), "b": _point_json(q), "distance": value}, text=str(value))


def _load_points(path: str):
    from .space import read_points_csv

    return read_points_csv(_read_text(path))


def cmd_cover(args) -> Outcome:
    from .cover import CoverSpec, a2_check, search_cover, verify_cover

    node_budget = args.node_budget or _env_int("XIDIM_NODE_BUDGET", 2_000_000)
    if args.action == "verify":
        spec = CoverSpec.from_json(_read_json(args.cover))
        pts = _load_points(args.points) if args.points else sorted(spec.covered())
        verdict = verify_cover(spec, pts)
        code = EXIT_OK if verdict.ok else EXIT_NEGATIVE
        kinds = ", ".join(sorted(verdict.kinds())) or "none"
        return Outcome({"points": len(pts), "verdict": verdict.to_json()}, code, f"ok={verdict.ok} violations: {kinds}")
    if args.action == "search":
        pts = _load_points(args.points)
        radii = _ints(args.radii or "")
        res = search_cover(pts, radii, args.bound, args.mode, node_budget, args.point_cap, args.seed)
        out = {"status": res.status, "mode": res.mode, "points": len(pts), "radii": radii, "bound": args.bound,
               "nodes": res.nodes, "authoritative": res.mode == "exhaustive"}
        if res.spec is not None:
            out["cover"] = res.spec.to_json()
            out["verdict"] = verify_cover(res.spec, pts).to_json()
        if res.uncovered:
            out["uncovered"] = [_point_json(p) for p in res.uncovered[:20]]
            out["uncoveredCount"] = len(res.uncovered)
        code = {"cover": EXIT_OK, "noCover": EXIT_NEGATIVE}.get(res.status, EXIT_INCONCLUSIVE)
        return Outcome(out, code, f"{res.status} ({res.mode}, {res.nodes} nodes)")
    tau = _ints(args.tau or "")
    radii = _ints(args.radii) if args.radii else None
    res = a2_check(tau, args.bound, radii, node_budget, args.point_cap)
    code = {"cover": EXIT_OK, "noCover": EXIT_NEGATIVE}.get(res.status, EXIT_INCONCLUSIVE)
    text = f"{res.status} for tau={tau}, B={args.bound} (window [0,{res.window}], {res.nodes} nodes)"
    return Outcome(res.to_json(), code, text)


def cmd_partition(args) -> Outcome:
    from .cover import CoverSpec, greedy_cover
    from .partition import DiscreteCube, epsilon_partition_chain, skeleton_refute
    from .space import enumerate_x_tau

    if args.action == "chain":
        if not args.families:
            raise ParseError("partition chain needs --families")
        data = _json_arg(args.families)
        fams = data.get("families") if isinstance(data, dict) else data
        if not isinstance(fams, list):
            raise ParseError("--families must be a list of families or {\"families\": [...]}")
        cube = DiscreteCube(args.dim, args.side, args.step)
        state = epsilon_partition_chain(cube, fams, args.eps)
        res = state.summary()
        return Outcome(res, text=f"L_{cube.n} nonempty; least point {state.least_point(cube.n)}")
    tau = _ints(args.tau or "")
    if args.cover:
        spec = CoverSpec.from_json(_read_json(args.cover))
    else:
        pts = enumerate_x_tau(tau, [(0, 8 * args.bound)] * len(tau))
        spec, _ = greedy_cover(pts, [1 << t for t in tau], args.bound, seed=args.seed)
    res = skeleton_refute(tau, args.bound, spec)
    out = res.to_json()
    out["candidate"] = "file" if args.cover else "greedy"
    return Outcome(out, text=f"witness {res.witness} ({len(res.survivors)} surviving vertices)")


def cmd_selftest(args) -> Outcome:
    from .acceptance import run_all

    only = _ints(args.only) if args.only else None
    results = run_all(args.seed, only)
    lines = [r.line() for r in results]
    ok = all(r.passed for r in results)
    out = {"passed": ok, "criteria": [r.to_json() for r in results], "backend": kernels.BACKEND}
    return Outcome(out, EXIT_OK if ok else EXIT_NEGATIVE, "\n".join(lines))


# --- driver -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the full JSON report")
    common.add_argument("--out", help="also write the JSON report to this file")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized steps (default 0)")
    common.add_argument("--time-cap", type=int, default=None, help="seconds before giving up (exit 2)")

    p = _Parser(prog="xidim", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"xidim {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("ord", parents=[common], help="Ord of an explicit family")
    s.add_argument("--family", help='JSON file {"members": [[1, 3], [2]]}')
    s.add_argument("--members", help="inline JSON member list")
    s.set_defaults(func=cmd_ord)

    s = sub.add_parser("family", parents=[common], help="family combinators")
    s.add_argument("action", choices=["show", "derive", "closure", "reindex"])
    s.add_argument("--family")
    s.add_argument("--members")
    s.add_argument("--sigma", help="set to derive by, e.g. 1,2")
    s.add_argument("--k", help="increasing target sequence for reindex")
    s.set_defaults(func=cmd_family)

    s = sub.add_parser("sxi", parents=[common], help="the families S_xi")
    s.add_argument("action", choices=["member", "trunc-ord"])
    s.add_argument("--xi", required=True, help="ordinal, e.g. w^2+w*3+1 or CNF JSON")
    s.add_argument("--sigma", help="finite set, e.g. 2,3,4")
    s.add_argument("--shifted", action="store_true", help="test membership in S_xi[L], L = {3, 4, ...}")
    s.add_argument("--n", type=int, default=6, help="truncation bound")
    s.add_argument("--table", action="store_true", help="CSV table for N = 1..n")
    s.set_defaults(func=cmd_sxi)

    s = sub.add_parser("space", parents=[common], help="lattice spaces X_tau")
    s.add_argument("action", choices=["enum", "dist"])
    s.add_argument("--tau")
    s.add_argument("--box", help="lo:hi per axis, e.g. 0:8,0:8 (one axis is repeated)")
    s.add_argument("--a", help="point label:coords, e.g. 2,3:4,1")
    s.add_argument("--b")
    s.set_defaults(func=cmd_space)

    s = sub.add_parser("cover", parents=[common], help="bounded disjoint covers")
    s.add_argument("action", choices=["verify", "search", "a2"])
    s.add_argument("--cover", help="cover JSON file")
    s.add_argument("--points", help="point CSV file (label;x0;x1;...)")
    s.add_argument("--radii", help="per-family radii, e.g. 4,8")
    s.add_argument("--bound", type=int, default=8)
    s.add_argument("--tau")
    s.add_argument("--mode", choices=["exhaustive", "greedy"], default="exhaustive")
    s.add_argument("--node-budget", type=int, default=None)
    s.add_argument("--point-cap", type=int, default=None)
    s.set_defaults(func=cmd_cover)

    s = sub.add_parser("partition", parents=[common], help="partition chains and skeleton refutation")
    s.add_argument("action", choices=["chain", "refute"])
    s.add_argument("--dim", type=int, default=1)
    s.add_argument("--side", type=int, default=12)
    s.add_argument("--step", type=int, default=1)
    s.add_argument("--eps", type=int, default=1)
    s.add_argument("--families", help="JSON file or inline JSON: list of families, each a list of blocks of coordinate lists")
    s.add_argument("--tau")
    s.add_argument("--bound", type=int, default=8)
    s.add_argument("--cover", help="candidate cover JSON; default is a seeded greedy candidate")
    s.set_defaults(func=cmd_partition)

    s = sub.add_parser("selftest", parents=[common], help="run the acceptance suite")
    s.add_argument("--only", help="comma-separated criterion numbers")
    s.set_defaults(func=cmd_selftest)
    return p


def _config(args) -> dict:
    skip = {"func", "json", "out"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


class _TimeUp(Exception):
    pass


def _alarm(signum, frame):
    raise _TimeUp()


def _report(args, result: Any, code: int) -> dict:
    return {
        "tool": "xidim",
        "version": __version__,
        "command": args.command,
        "config": _config(args),
        "seed": args.seed,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "exitCode": code,
        "result": result,
    }


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cap = args.time_cap if args.time_cap is not None else _env_int("XIDIM_TIME_CAP", 0)
    if cap and hasattr(signal, "SIGALRM"):
        signal.signal(signal.SIGALRM, _alarm)
        signal.alarm(cap)
    func: Callable[[Any], Outcome] = args.func
    try:
        outcome = func(args)
    except (ParseError, PreconditionError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, PreconditionError) and exc.witness is not None:
            err["witness"] = exc.witness
        outcome = Outcome(err, EXIT_INPUT, f"error: {exc}")
    except BudgetExceeded as exc:
        outcome = Outcome({"error": "BudgetExceeded", "message": str(exc)}, EXIT_BUDGET, f"budget exceeded: {exc}")
    except _TimeUp:
        outcome = Outcome({"error": "TimeCap", "message": f"time cap of {cap}s reached"}, EXIT_BUDGET,
                          f"time cap of {cap}s reached")
    except ChainDefect as exc:
        outcome = Outcome({"error": "ChainDefect", "message": str(exc), "report": exc.report}, EXIT_NEGATIVE,
                          f"construction defect: {exc}")
    finally:
        if cap and hasattr(signal, "SIGALRM"):
            signal.alarm(0)
    report = _report(args, outcome.result, outcome.code)
    text = json.dumps(report, indent=2, default=_json_default)
    if args.out:
        Path(args.out).write_text(text + "\n")
    if args.json:
        print(text)
    elif outcome.raw is not None and outcome.code == EXIT_OK:
        sys.stdout.write(outcome.raw)
    else:
        print(outcome.text if outcome.text is not None else text)
    return outcome.code


def _json_default(obj: Any) -> Any:
    if hasattr(obj, "label") and hasattr(obj, "coords"):
        return _point_json(obj)
    if isinstance(obj, (set, frozenset, tuple)):
        return list(obj)
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if hasattr(obj, "to_json"):
        return obj.to_json()
    return str(obj)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

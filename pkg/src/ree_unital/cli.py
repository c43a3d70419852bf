"""Command-line front end: ``ree-unital <subcommand> [flags]``.

Exit codes: 0 all checks pass, 1 a verification failed, 2 usage error,
3 undecided within the search budget.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import ree_root_group as rr
from . import rt_unital as rt
from . import unital_s as us
from .design_core import (
    SCHEMA_VERSION,
    BudgetExceeded,
    NotADesign,
    find_dual_kn,
    isomorphism_search,
    load_structure,
    to_json,
    verify_2design,
    write_incidence,
)
from .finite_fields import field_for_order

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNDECIDED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class Output:
    """Collects text lines or a JSON document and writes them once."""

    def __init__(self, args, command: str):
        self.fmt = args.format
        self.path = args.out
        self.lines: list[str] = []
        self.doc = {"schema_version": SCHEMA_VERSION, "command": command}

    def line(self, text: str) -> None:
        self.lines.append(text)

    def put(self, **kw) -> None:
        self.doc.update(kw)

    def flush(self) -> None:
        text = json.dumps(self.doc, indent=1, sort_keys=True) + "\n" if self.fmt == "json" else "".join(l + "\n" for l in self.lines)
        if self.path:
            Path(self.path).write_text(text)
        else:
            sys.stdout.write(text)


def _q(args, allowed) -> int:
    if args.q not in allowed:
        raise UsageError(f"--q must be one of {', '.join(map(str, allowed))}")
    return args.q


def _emit_structure(args, s, label: str) -> int:
    if args.format == "json":
        doc = {**to_json(s), "command": label}
        text = json.dumps(doc) + "\n"
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
    elif args.out:
        write_incidence(s, args.out)
    else:
        write_incidence(s, sys.stdout)
    print(f"{label}: v={s.v} b={s.b}", file=sys.stderr)
    return EXIT_OK


def cmd_build_sl28(args) -> int:
    return _emit_structure(args, us.build_unital_s().structure, "build-sl28")


def cmd_build_rt(args) -> int:
    q = _q(args, rt.BUILD_Q)
    if q > 3 and not args.out:
        raise UsageError("RT(27) has 512487 blocks; give --out")
    u = rt.build_rt(field_for_order(q), workers=args.workers)
    return _emit_structure(args, u.structure, "build-rt")


def cmd_verify(args) -> int:
    s = load_structure(args.inp)
    out = Output(args, "verify")
    try:
        p = verify_2design(s)
    except NotADesign as exc:
        out.line(f"not a 2-design: {exc}")
        out.put(ok=False, error=str(exc), pair=list(exc.pair) if exc.pair else None)
        out.flush()
        return EXIT_FAIL
    out.line(f"v={p.v} b={p.b} r={p.r} k={p.k} lambda={p.lam}")
    out.put(ok=True, v=p.v, b=p.b, r=p.r, k=p.k, **{"lambda": p.lam})
    out.flush()
    return EXIT_OK


def cmd_catalog(args) -> int:
    rep = us.verify_explicit_catalog()
    out = Output(args, "catalog")
    for name, m in us.named_catalog().items():
        out.line(f"{name} = {m}")
    for it in rep.items:
        tag = "ok  " if it.ok else "FAIL"
        extra = f"  ({it.detail})" if it.detail else ""
        out.line(f"{tag} [{it.kind}] {it.name}{extra}")
    out.put(
        ok=rep.ok,
        matrices={name: str(m) for name, m in us.named_catalog().items()},
        items=[{"name": it.name, "ok": it.ok, "kind": it.kind, "detail": it.detail} for it in rep.items],
    )
    out.flush()
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_dump_catalog(args) -> int:
    out = Output(args, "dump-catalog")
    cat = us.named_catalog()
    for name, m in cat.items():
        out.line(f"{name} = {m}")
    out.put(matrices={name: str(m) for name, m in cat.items()})
    out.flush()
    return EXIT_OK


def cmd_find_dual_kn(args) -> int:
    s = load_structure(args.inp)
    res = find_dual_kn(s, args.n, limit=args.budget)
    out = Output(args, "find-dual-kn")
    out.line(f"status={res.status} nodes={res.nodes}")
    if res.found:
        out.line("blocks " + " ".join(map(str, res.blocks)))
        out.line("points " + " ".join(map(str, res.points)))
    out.put(status=res.status, nodes=res.nodes, blocks=list(res.blocks), points=list(res.points), n=args.n)
    out.flush()
    return {"found": EXIT_OK, "none": EXIT_FAIL, "undecided": EXIT_UNDECIDED}[res.status]


def cmd_iso(args) -> int:
    s1, s2 = load_structure(args.a), load_structure(args.b)
    out = Output(args, "iso")
    try:
        f = isomorphism_search(s1, s2, limit=args.budget)
    except BudgetExceeded as exc:
        out.line(str(exc))
        out.put(status="undecided", nodes=exc.nodes)
        out.flush()
        return EXIT_UNDECIDED
    if f is None:
        out.line("no isomorphism")
        out.put(status="none")
        out.flush()
        return EXIT_FAIL
    out.line(" ".join(map(str, f.perm)))
    out.put(status="found", bijection=list(f.perm))
    out.flush()
    return EXIT_OK


def cmd_search_intersections(args) -> int:
    q = _q(args, rt.SEARCH_Q)
    F = field_for_order(q)
    sols = rt.intersection_search(F, workers=args.workers)
    expected = {0, int(F.neg(1))}
    ok = all(s.s in expected for s in sols)
    out = Output(args, "search-intersections")
    for s in sols:
        out.line(s.format(F))
    out.put(q=q, field=F.header, ok=ok, solutions=[{"x": F.format(s.x), "s": F.format(s.s), "m": F.format(s.m)} for s in sols])
    out.flush()
    return EXIT_OK if ok else EXIT_FAIL


def cmd_pearls(args) -> int:
    q = _q(args, rt.BUILD_Q)
    F = field_for_order(q)
    pc = rt.string_of_pearls(F)
    out = Output(args, "pearls")
    fmt = lambda p: str(rr.point_from_id(F, p))
    out.line(f"configurations={len(pc.configs)} points={len(pc.union_points)} blocks={len(pc.union_blocks)}")
    for t, (pts, _) in zip(pc.shifts, pc.configs):
        out.line(f"t={F.format(t)}: " + " ".join(fmt(p) for p in pts))
    out.put(
        q=q,
        field=F.header,
        ok=pc.ok,
        configurations=len(pc.configs),
        points=[fmt(p) for p in pc.union_points],
        blocks=[[fmt(p) for p in blk] for blk in pc.union_blocks],
    )
    out.flush()
    return EXIT_OK if pc.ok else EXIT_FAIL


def cmd_structure_checks(args) -> int:
    q = _q(args, rt.BUILD_Q)
    rep = rr.structural_checks(field_for_order(q))
    out = Output(args, "structure-checks")
    for name, ok, detail in rep.items:
        out.line(f"{'ok  ' if ok else 'FAIL'} {name}" + (f"  ({detail})" if detail else ""))
    out.put(q=q, ok=rep.ok, items=[{"name": n, "ok": o, "detail": d} for n, o, d in rep.items])
    out.flush()
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_omega_fix(args) -> int:
    q = _q(args, (3, 27, 243))
    F = field_for_order(q)
    pts = rt.omega_fix(F)
    out = Output(args, "omega-fix")
    out.line(f"count={len(pts)}")
    for p in pts:
        out.line(str(p))
    out.put(q=q, field=F.header, count=len(pts), points=[str(p) for p in pts])
    out.flush()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--budget", type=int, default=1_000_000, help="search node budget")
    common.add_argument("--workers", type=int, default=None, help="worker processes (env REE_UNITAL_WORKERS, default 1)")

    p = argparse.ArgumentParser(prog="ree-unital", description="Ree-Tits unital constructions and checks.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        return sp

    add("build-sl28", cmd_build_sl28, "emit the unital S from SL(2,8)")
    add("build-rt", cmd_build_rt, "emit RT(q)").add_argument("--q", type=int, required=True)
    add("verify", cmd_verify, "check the 2-design axioms").add_argument("--in", dest="inp", required=True)
    add("catalog", cmd_catalog, "verify the worked examples in S and print the named matrices")
    add("dump-catalog", cmd_dump_catalog, "print the named matrices only")
    sp = add("find-dual-kn", cmd_find_dual_kn, "search for a dual K_n configuration")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--in", dest="inp", required=True)
    sp = add("iso", cmd_iso, "search for a block-preserving bijection")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    add("search-intersections", cmd_search_intersections, "intersections of Fix iota with Lambda-translates").add_argument(
        "--q", type=int, required=True
    )
    add("pearls", cmd_pearls, "string of super O'Nan configurations").add_argument("--q", type=int, required=True)
    add("structure-checks", cmd_structure_checks, "group structure of Xi").add_argument("--q", type=int, required=True)
    add("omega-fix", cmd_omega_fix, "fixed points of omega").add_argument("--q", type=int, required=True)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.workers is None:
        args.workers = rt.default_workers()
    if args.workers < 1 or (args.budget is not None and args.budget < 1):
        print("error: --workers and --budget must be positive", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "n", 3) < 3:
        print("error: --n must be at least 3", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Command line front end.

Exit codes: 0 ok, 1 invariant failure, 2 usage, 3 caps exhausted,
4 malformed input file.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .groupring import GroupSpec, InputError, RingElement

OK, FAILURE, USAGE, CAPS, MALFORMED = 0, 1, 2, 3, 4


class Report:
    """Plain-text report; the header records the full configuration."""

    def __init__(self, command: str, args: argparse.Namespace):
        cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}
        self.lines = [f"ratmoore {__version__} {command}",
                      "config " + " ".join(f"{k}={_show(v)}" for k, v in cfg.items())]

    def add(self, *lines: str):
        self.lines.extend(lines)

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def _show(v) -> str:
    if isinstance(v, (list, tuple)):
        return ",".join(map(str, v))
    return str(v)


def _emit(report: Report, out: str | None, name: str = "report.txt"):
    text = report.text()
    sys.stdout.write(text)
    if out:
        os.makedirs(out, exist_ok=True)
        Path(out, name).write_text(text)


def _radii(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad radius list {text!r}") from None
    if not vals or any(v < 0 for v in vals) or list(vals) != sorted(set(vals)):
        raise argparse.ArgumentTypeError("radii must be increasing nonnegative integers")
    return vals


def _group(text: str) -> GroupSpec:
    try:
        return GroupSpec.parse(text)
    except InputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _degrees(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad degree list {text!r}") from None
    if any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("generator degrees must be positive")
    return vals


# ---------------------------------------------------------------------------
# commands

def cmd_ring(args) -> int:
    spec = args.group
    rep = Report("ring", args)
    xs = [RingElement.parse(t, spec, args.kind) for t in args.terms]
    if args.op in ("mul", "add", "sub"):
        if len(xs) != 2:
            print(f"{args.op} takes exactly two elements", file=sys.stderr)
            return USAGE
        a, b = xs
        res = {"mul": a * b, "add": a + b, "sub": a - b}[args.op]
        rep.add(f"result {res}")
    else:
        for x in xs:
            if args.op == "involute":
                rep.add(f"result {x.involute()}")
            else:
                rep.add(f"result {x.augmentation()}")
    _emit(rep, args.out)
    return OK


def cmd_complex(args) -> int:
    from .chain import (classifying_complex, coinvariants, dualize, dumps_complex,
                        loads_complex, loads_scalar)

    rep = Report("complex", args)
    if args.action == "classifying":
        C = classifying_complex(args.group, args.kind)
        if args.dual:
            C = dualize(C, C.hi)
        rep.add(dumps_complex(C).rstrip("\n"))
        ok = C.dd_zero()
    elif args.action == "check":
        C = loads_complex(Path(args.file).read_text())
        ok = C.dd_zero()
        rep.add("ranks " + " ".join(f"{n}:{C.rank(n)}" for n in C.degrees()),
                f"euler {C.euler()}", f"dd_zero {ok}")
        h = coinvariants(C).homology()
        for n in sorted(h):
            rep.add(f"coinvariant H_{n} rank {h[n][0]} torsion {h[n][1]}")
    else:
        S = loads_scalar(Path(args.file).read_text())
        ok = S.dd_zero()
        rep.add(f"dd_zero {ok}")
        for n, (b, t) in sorted(S.homology().items()):
            rep.add(f"H_{n} rank {b} torsion {t}")
    rep.add(f"result {'ok' if ok else 'invariant failure'}")
    _emit(rep, args.out)
    return OK if ok else FAILURE


def cmd_lie(args) -> int:
    from .lie import (GradedGenerators, dgl_homology, dimension, hall_count, primitives,
                      sphere_model, tensor_dimension)

    rep = Report("lie", args)
    ok = True
    if args.action == "sphere":
        D = sphere_model(args.r)
        for k in range(2, 4 * (args.r - 1) + 1):
            h = dgl_homology(D, k - 1)
            if h:
                rep.add(f"pi_{k} (x) Q = Q^{h}")
    else:
        gens = GradedGenerators.of(args.degrees)
        for n in range(1, args.max_degree + 1):
            w, h, p = dimension(gens, n), hall_count(gens, n), primitives(n, gens)
            agree = w == h == p
            ok &= agree
            rep.add(f"degree {n} tensor {tensor_dimension(gens, n)} lie {w} hall {h} "
                    f"primitive {p} {'agree' if agree else 'DISAGREE'}")
    rep.add(f"result {'ok' if ok else 'invariant failure'}")
    _emit(rep, args.out)
    return OK if ok else FAILURE


def cmd_moore(args) -> int:
    from .moore import Caps, build, demo_twist, dumps_model

    caps = Caps(bracket=args.bracket_cap, radius=args.radius,
                radius_ceiling=max(args.radius, args.radius_ceiling), seed=args.seed)
    model, report = build(args.group, args.r, caps,
                          twist_factory=demo_twist if args.demo_twist else None)
    rep = Report("moore build", args)
    rep.add(*report.to_text().rstrip("\n").splitlines())
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        Path(args.out, "model.txt").write_text(dumps_model(model))
    _emit(rep, args.out)
    return OK if report.ok else FAILURE


def cmd_davis(args) -> int:
    from . import davis

    if args.example:
        S = davis.example(args.example)
    else:
        if not (args.m and args.l):
            print("davis build needs --example or both --m and --l", file=sys.stderr)
            return USAGE
        S = davis.load_mirrored(args.m, davis.load_flag(args.l))
    B = davis.basic_construction(S)
    rep = Report("davis build", args)
    rep.add(f"space {S.name or 'M'} dimension {S.dimension}",
            f"chambers {B.chambers}",
            "cells " + " ".join(f"{n}:{c}" for n, c in B.cell_counts().items()),
            "betti_Q " + " ".join(map(str, B.betti())),
            f"euler {B.euler()}")
    ok = B.union_find_ok
    if args.check in ("decomposition", "all"):
        dec = davis.decomposition_check(S, B)
        rep.add("decomposition " + json.dumps(dec, sort_keys=True))
        ok &= dec["equal_Q"] and dec["equal_Z2"] and dec["euler_equal"] and dec["chambers_ok"]
    if args.check in ("duality", "all"):
        dual = davis.duality_check(B, S.dimension)
        rep.add("duality " + json.dumps(dual, sort_keys=True))
        # failure of duality is a property of the input, not of the build
    rep.add(f"result {'ok' if ok else 'invariant failure'}")
    _emit(rep, args.out)
    return OK if ok else FAILURE


def cmd_l2(args) -> int:
    from . import l2

    rep = Report("l2", args)
    if args.action == "derive":
        res = l2.run_pipeline(args.pipeline, verdict=args.verdict)
        ok = l2.replay(res.base).values == res.base.values
        rep.add(*res.lines, f"replay {'ok' if ok else 'mismatch'}")
    else:
        gap, sign = l2.chi_gap(args.b4, args.chambers)
        again = l2.chi_gap_replayed(args.b4, args.chambers)
        ok = gap == again
        rep.add(f"chi = b_4 - 2*chambers = {gap} ({sign})", f"replayed transfer {again}")
    rep.add(f"result {'ok' if ok else 'invariant failure'}")
    _emit(rep, args.out)
    return OK if ok else FAILURE


def cmd_homalg(args) -> int:
    from . import homalg

    rep = Report("homalg", args)
    ok = True
    if args.action == "vanishing":
        base = {0: homalg.INF, 1: 1, 2: 0} if args.perturb else None
        res = homalg.vanishing_assembly(args.d, base_override=base)
        rep.add(*res.text().rstrip("\n").splitlines())
        ok = res.verdict != "withheld"
    elif args.action == "ext1":
        e = homalg.ext1_via_duality(args.r, args.d, args.k)
        rep.add(f"index {e.index}", f"verdict {e.verdict}",
                f"hypothesis window d-1 > r > d/2: {e.hypothesis_window}")
    else:
        p = homalg.kernel_degrees(args.r, args.d, args.cap)
        for k, f in zip(p.degrees, p.in_range):
            rep.add(f"K_{k} {'in' if f else 'outside'} ({args.r}, {args.r + args.d}]")
    rep.add(f"result {'ok' if ok else 'invariant failure'}")
    _emit(rep, args.out)
    return OK if ok else FAILURE


def cmd_truncate(args) -> int:
    from .chain import dualize, fox_complex
    from .truncation import PropagationComplex, diagonal_coinvariants, truncated_homology

    if args.target == "fox":
        P = PropagationComplex.from_free(fox_complex(args.k))
    else:
        D = dualize(fox_complex(args.k), 1)
        P = diagonal_coinvariants(D, D)
    report = truncated_homology(P, args.radius, margin=args.margin)
    rep = Report("truncate", args)
    rep.add(*report.to_text().rstrip("\n").splitlines())
    _emit(rep, args.out)
    return FAILURE if report.monotone_violation else OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ratmoore")
    p.add_argument("--version", action="version", version=f"ratmoore {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, group=True):
        sp.add_argument("--out", help="directory for report files")
        if group:
            sp.add_argument("--group", type=_group, default=GroupSpec((2,)))

    sp = sub.add_parser("ring", help="group ring arithmetic")
    common(sp)
    sp.add_argument("op", choices=["mul", "add", "sub", "involute", "augment"])
    sp.add_argument("terms", nargs="+")
    sp.add_argument("--kind", choices=["Z", "Q"], default="Z")
    sp.set_defaults(func=cmd_ring)

    sp = sub.add_parser("complex", help="chain complexes")
    common(sp)
    sp.add_argument("action", choices=["classifying", "check", "scalar"])
    sp.add_argument("file", nargs="?")
    sp.add_argument("--kind", choices=["Z", "Q"], default="Z")
    sp.add_argument("--dual", action="store_true")
    sp.set_defaults(func=cmd_complex)

    sp = sub.add_parser("lie", help="free graded Lie algebras")
    common(sp, group=False)
    sp.add_argument("action", choices=["dims", "sphere"])
    sp.add_argument("--degrees", type=_degrees, default=(2, 2))
    sp.add_argument("--max-degree", type=_positive, default=6)
    sp.add_argument("--r", type=int, default=3, choices=range(2, 7))
    sp.set_defaults(func=cmd_lie)

    sp = sub.add_parser("moore", help="equivariant Moore space builder")
    msub = sp.add_subparsers(dest="action", required=True)
    b = msub.add_parser("build")
    common(b)
    b.add_argument("--r", type=int, default=3)
    b.add_argument("--bracket-cap", type=_positive, default=2)
    b.add_argument("--radius", type=int, default=3)
    b.add_argument("--radius-ceiling", type=int, default=4)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--demo-twist", action="store_true")
    b.set_defaults(func=cmd_moore)

    sp = sub.add_parser("davis", help="Davis basic construction")
    dsub = sp.add_subparsers(dest="action", required=True)
    b = dsub.add_parser("build")
    common(b, group=False)
    b.add_argument("--example", choices=["interval", "disk", "annulus", "half_interval"])
    b.add_argument("--m", help="mirrored space JSON")
    b.add_argument("--l", help="flag complex JSON")
    b.add_argument("--check", choices=["none", "decomposition", "duality", "all"], default="all")
    b.set_defaults(func=cmd_davis)

    sp = sub.add_parser("l2", help="L2-Betti ledger")
    lsub = sp.add_subparsers(dest="action", required=True)
    b = lsub.add_parser("derive")
    common(b, group=False)
    b.add_argument("--pipeline", required=True)
    b.add_argument("--verdict", action="store_true")
    b.set_defaults(func=cmd_l2)
    b = lsub.add_parser("chi-gap")
    common(b, group=False)
    b.add_argument("--b4", type=int, required=True)
    b.add_argument("--chambers", type=_positive, required=True)
    b.set_defaults(func=cmd_l2)

    sp = sub.add_parser("homalg", help="group homology bookkeeping")
    hsub = sp.add_subparsers(dest="action", required=True)
    b = hsub.add_parser("vanishing")
    common(b, group=False)
    b.add_argument("--d", type=_positive, default=4)
    b.add_argument("--perturb", action="store_true", help="negative control: H_1 of the base set to 1")
    b.set_defaults(func=cmd_homalg)
    b = hsub.add_parser("ext1")
    common(b, group=False)
    for flag in ("--r", "--d", "--k"):
        b.add_argument(flag, type=int, required=True)
    b.set_defaults(func=cmd_homalg)
    b = hsub.add_parser("kernel")
    common(b, group=False)
    b.add_argument("--r", type=int, required=True)
    b.add_argument("--d", type=_positive, required=True)
    b.add_argument("--cap", type=_positive, default=12)
    b.set_defaults(func=cmd_homalg)

    sp = sub.add_parser("truncate", help="window estimates for infinite-rank complexes")
    common(sp, group=False)
    sp.add_argument("--target", choices=["fox", "dd"], default="dd")
    sp.add_argument("--k", type=_positive, default=2)
    sp.add_argument("--radius", type=_radii, default=(2, 3, 4, 5, 6))
    sp.add_argument("--margin", type=int)
    sp.set_defaults(func=cmd_truncate)
    return p


def main(argv: list[str] | None = None) -> int:
    from .davis import StructureError
    from .moore import CapsExhausted

    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapsExhausted as exc:
        print(f"caps exhausted: {exc}", file=sys.stderr)
        return CAPS
    except (InputError, StructureError, OSError, json.JSONDecodeError) as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return MALFORMED
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())

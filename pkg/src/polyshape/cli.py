"""Command-line entry point: ``polyshape <subcommand> ...``.

Exit codes: 0 found or verified, 1 exhausted or no solution, 2 unknown or out
of budget, 3 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from . import dlx, jigsaw, reductions, search
from .cnf import Budget
from .geometry import ShapeError, from_rle, parse_ascii, rectangle, to_rle
from .instance import (
    InstanceError,
    Mode,
    PieceSet,
    PuzzleInstance,
    catalog,
    certificate_json,
    instance_from_json,
    load_certificate,
    split_names,
    verify_solution,
)
from .placement import Box
from .render import LETTERS, render
from .schemas import CERTIFICATE_SCHEMA

EXIT_FOUND, EXIT_NONE, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 3

log = logging.getLogger("polyshape")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# -- manifest ----------------------------------------------------------------------

MANIFEST_SCHEMA = {
    "type": "object",
    "required": ["instance"],
    "additionalProperties": False,
    "properties": {
        "instance": {"type": ["object", "string"]},
        "schedule": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "max_area": {"type": "integer", "minimum": 1},
                "min_area": {"type": "integer", "minimum": 1},
                "seconds": {"type": ["number", "null"], "exclusiveMinimum": 0},
                "conflicts": {"type": ["integer", "null"], "minimum": 1},
                "all_areas": {"type": "boolean"},
                "prune": {"type": "boolean"},
                "cell_limit": {"type": "integer", "minimum": 1},
                "total_seconds": {"type": ["number", "null"], "exclusiveMinimum": 0},
            },
        },
        "backend": {"type": "string"},
        "jobs": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
        "outputs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "ledger": {"type": "string"},
                "certificate": {"type": "string"},
                "render": {"type": "string"},
                "render_format": {"enum": ["ascii", "svg"]},
            },
        },
    },
}


@dataclass
class Manifest:
    instance: PuzzleInstance
    schedule: dict = field(default_factory=dict)
    backend: str | None = None
    jobs: int | None = None
    seed: int = 0
    outputs: dict = field(default_factory=dict)

    @classmethod
    def load(cls, path) -> "Manifest":
        path = Path(path)
        data = json.loads(path.read_text())
        try:
            jsonschema.validate(data, MANIFEST_SCHEMA)
        except jsonschema.ValidationError as e:
            raise UsageError(f"manifest {path}: {e.message}") from None
        spec = data["instance"]
        if isinstance(spec, str):
            spec = json.loads((path.parent / spec).read_text())
        return cls(
            instance_from_json(spec),
            dict(data.get("schedule", {})),
            data.get("backend"),
            data.get("jobs"),
            int(data.get("seed", 0)),
            dict(data.get("outputs", {})),
        )


# -- piece sets --------------------------------------------------------------------


def load_piece_files(paths) -> dict:
    """``NAME=path`` or ``path`` (name taken from the file stem)."""
    out = {}
    for spec in paths or ():
        name, _, p = spec.rpartition("=")
        p = Path(p)
        name = (name or p.stem).upper()
        out[name] = parse_ascii(p.read_text(), name=name)
    return out


def parse_set(spec: str, custom: dict, label: str = "") -> PieceSet:
    """``"F5Q4T4"``, ``"I5,Q4"``, ``"Q4*3+MINE"``; custom names take precedence."""
    names = {**catalog(), **custom}
    pieces = []
    for tok in spec.replace("+", ",").split(","):
        tok = tok.strip()
        if not tok:
            continue
        tok, _, mult = tok.partition("*")
        count = int(mult) if mult else 1
        key = tok.upper()
        if key in names:
            found = [names[key]]
        else:
            found = [names[n] for n in split_names(tok)]
        pieces.extend(found * count)
    if not pieces:
        raise UsageError(f"empty piece set {spec!r}")
    return PieceSet(tuple(pieces), label or spec)


def build_instance(args, mode: Mode) -> PuzzleInstance:
    if getattr(args, "instance", None):
        inst = instance_from_json(json.loads(Path(args.instance).read_text()))
        if inst.mode != mode:
            inst = PuzzleInstance(mode, inst.sets, inst.allow_reflect, inst.limits)
        return inst
    specs = [s for s in (args.s1, args.s2, args.s3) if s]
    if len(specs) < 2:
        raise UsageError("need at least --s1 and --s2 (or --instance / --manifest)")
    custom = load_piece_files(args.piece_file)
    sets = tuple(parse_set(s, custom) for s in specs)
    return PuzzleInstance(mode, sets, not args.no_reflect)


def _box(text: str) -> Box:
    try:
        w, h = (int(t) for t in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None
    return Box(w, h)


def _write(path, text: str) -> None:
    Path(path).write_text(text)
    log.info("wrote %s", path)


def _write_json(path, data) -> None:
    _write(path, json.dumps(data, indent=1) + "\n")


def _emit_solution(args, inst, sol, outputs) -> None:
    cert = outputs.get("certificate") or getattr(args, "cert", None)
    if cert:
        _write(cert, json.dumps(certificate_json(inst, sol), indent=1) + "\n")
    fmt = outputs.get("render_format") or getattr(args, "format", None) or "ascii"
    dest = outputs.get("render") or getattr(args, "render", None)
    text = render(sol.normalized(), fmt, args.seed)
    if dest:
        _write(dest, text)
    elif fmt == "ascii":
        print(text, end="")


# -- subcommands -------------------------------------------------------------------


def _solver_context(args, mode: Mode):
    """Instance, schedule, backend, jobs and outputs from flags and/or a manifest."""
    outputs = {}
    sched = {}
    if args.manifest:
        if args.s1 or args.s2 or args.s3 or args.instance:
            raise UsageError("--manifest replaces --s1/--s2/--s3/--instance")
        m = Manifest.load(args.manifest)
        inst = m.instance
        if inst.mode != mode:
            inst = PuzzleInstance(mode, inst.sets, inst.allow_reflect, inst.limits)
        sched.update(m.schedule)
        outputs = m.outputs
        args.backend = args.backend or m.backend
        args.jobs = args.jobs or m.jobs
        if args.seed is None:
            args.seed = m.seed
    else:
        inst = build_instance(args, mode)
    if args.seed is None:
        args.seed = 0
    for key in ("max_area", "min_area", "seconds", "conflicts", "total_seconds"):
        v = getattr(args, key, None)
        if v is not None:
            sched[key] = v
    if getattr(args, "all_areas", False):
        sched["all_areas"] = True
    if getattr(args, "no_prune", False):
        sched["prune"] = False
    if args.ledger:
        outputs.setdefault("ledger", args.ledger)
    return inst, search.Schedule(**sched), outputs


def cmd_solve_common(args) -> int:
    inst, schedule, outputs = _solver_context(args, Mode.COMMON_MULTIPLE)
    ledger = search.Ledger.open(outputs.get("ledger"), inst)
    res = search.find_common_multiple(inst, schedule, ledger, args.backend, args.jobs or 1)
    f = res.first
    if f is None:
        if all(ledger.exhausted(a, schedule.boxes(a)) for a in res.areas):
            print(f"no common shape up to area {schedule.max_area}")
            return EXIT_NONE
        print(f"no common shape found up to area {schedule.max_area} (some cells undecided)")
        return EXIT_UNKNOWN
    tag = "minimal" if f.minimal else "not proven minimal"
    print(f"area {f.area} in box {f.box.width}x{f.box.height} ({tag})")
    print(f"goal {to_rle(f.solution.normalized().goal)}")
    _emit_solution(args, inst, f.solution, outputs)
    return EXIT_FOUND


def cmd_solve_logic(args) -> int:
    inst, schedule, outputs = _solver_context(args, Mode.SHAPE_LOGIC)
    ledger = search.Ledger.open(outputs.get("ledger"), inst)
    res = search.find_shape_logic(inst, schedule, ledger, args.backend, args.jobs or 1)
    if res.status == search.FOUND:
        print(f"found goal in box {res.box.width}x{res.box.height}")
        print(f"goal {to_rle(res.solution.normalized().goal)}")
        _emit_solution(args, inst, res.solution, outputs)
        return EXIT_FOUND
    if res.status == search.NO_SOLUTION:
        print("no solution")
        return EXIT_NONE
    print("unknown (budget exhausted)")
    return EXIT_UNKNOWN


def _read_region(args):
    if args.box:
        return rectangle(args.box.width, args.box.height)
    text = Path(args.region).read_text().strip()
    if ":" in text.splitlines()[0]:
        return from_rle(text)
    return parse_ascii(text, piece=False).cells


def cmd_pack(args) -> int:
    if not (args.box or args.region):
        raise UsageError("pack needs --box or --region")
    region = _read_region(args)
    pieces = parse_set(args.pieces, load_piece_files(args.piece_file))
    mult = dlx.EXACT_ONCE if args.exact else dlx.UNLIMITED
    tiling = dlx.pack_region(region, pieces, mult, not args.no_reflect)
    if tiling is None:
        print("no packing")
        return EXIT_NONE
    if args.json:
        _write_json(args.json, {
            "region": to_rle(region),
            "placements": [{"piece": pl.piece_id, "cells": [list(c) for c in sorted(pl.cover)]} for pl in tiling],
        })
    owner = {c: k for k, pl in enumerate(tiling) for c in pl.cover}
    W = max(x for x, _ in region) + 1
    H = max(y for _, y in region) + 1
    for y in range(H):
        print("".join(LETTERS[owner[(x, y)] % len(LETTERS)] if (x, y) in owner else "." for x in range(W)))
    return EXIT_FOUND


def cmd_oracle(args) -> int:
    inst = build_instance(args, Mode.SHAPE_LOGIC if args.logic else Mode.COMMON_MULTIPLE)
    try:
        census = dlx.brute_force_common(inst, args.max_area, cap=args.cap)
    except dlx.AreaCapExceeded as e:
        raise UsageError(str(e)) from None
    if args.json:
        _write_json(args.json, {"minimal_area": census.minimal_area, "shapes": census.strings(), "checked": census.checked})
    if census.minimal_area is None:
        print(f"no common shape up to area {args.max_area} ({census.checked} shapes checked)")
        return EXIT_NONE
    print(f"minimal area {census.minimal_area}: {len(census.shapes)} shape(s), {census.checked} checked")
    for s in census.strings():
        print(s)
    return EXIT_FOUND


def cmd_reduce_3p(args) -> int:
    if args.input:
        tp = reductions.load_3partition(args.input)
    elif args.a:
        a = tuple(int(t) for t in args.a.split(","))
        tp = reductions.ThreePartitionInstance(args.m or len(a) // 3, a)
    else:
        raise UsageError("reduce-3p needs --input or --a")
    try:
        inst = reductions.gen_3partition(tp)
    except reductions.PreconditionViolated as e:
        print(f"precondition violated: {e}", file=sys.stderr)
        return EXIT_USAGE
    if args.emit:
        _write(args.emit, json.dumps(inst.to_json(), indent=1) + "\n")
    if not args.solve:
        print(f"m={tp.m} B={tp.B}: {len(inst.sets[0])} sticks, {len(inst.sets[1])} blocks")
        return EXIT_FOUND
    sched = search.Schedule(seconds=args.seconds)
    res = search.find_shape_logic(inst, sched, backend=args.backend, jobs=args.jobs or 1)
    if res.status == search.FOUND:
        triples = reductions.extract_3partition(res.solution, tp)
        print(f"goal {res.box.width}x{res.box.height}")
        for t in triples:
            print(" ".join(map(str, t)))
        if args.cert:
            _write(args.cert, json.dumps(certificate_json(inst, res.solution), indent=1) + "\n")
        return EXIT_FOUND
    if res.status == search.NO_SOLUTION:
        print("no solution")
        return EXIT_NONE
    print("unknown (budget exhausted)")
    return EXIT_UNKNOWN


def _load_pcp(args):
    return reductions.load_pcp(args.input) if args.input else reductions.EXAMPLE_PCP


def cmd_reduce_pcp(args) -> int:
    pcp = _load_pcp(args)
    seq = reductions.pcp_oracle(pcp, args.max_len)
    if seq is None:
        print(f"no PCP solution of length <= {args.max_len}")
    else:
        print(f"pcp solution {' '.join(str(i + 1) for i in seq)}: {pcp.top(seq)}")
    pj = reductions.gen_pcp_jigsaw(pcp)
    print(f"{len(pj.jset.pieces)} jigsaw pieces")
    if args.emit:
        _write(args.emit, jigsaw.format_jigsaw(pj.jset))
    if not args.tile:
        return EXIT_FOUND if seq is not None else EXIT_NONE
    budget = Budget(seconds=args.seconds)
    for h in range(3, args.max_height + 1):
        r = jigsaw.tile_region(pj.jset, Box(args.width, h), budget, args.backend)
        if r.found:
            dec = reductions.decode_pcp_tiling(pj, r.tiling)
            print(f"tiled {args.width}x{h}; decoded {' '.join(str(i + 1) for i in dec)}")
            return EXIT_FOUND
        if r.status == "unknown":
            print(f"{args.width}x{h}: unknown")
            return EXIT_UNKNOWN
    print(f"no tiling of width {args.width} up to height {args.max_height}")
    return EXIT_NONE


def cmd_zigzag(args) -> int:
    if args.matrix:
        rep = reductions.mating_matrix(args.max_id, args.scale_bits)
        print(f"ids <= {rep.ids}, scale bits {rep.scale_bits}: {rep.pairs} pairs, "
              f"{len(rep.mismatches)} mismatches, {len(rep.shifted)} shifted interlocks")
        return EXIT_FOUND if rep.ok else EXIT_NONE
    js = jigsaw.load_jigsaw(args.input) if args.input else jigsaw.rect_enforcing_set()
    sb = args.scale_bits or reductions.min_scale_bits(max(abs(c) for c in js.colors()))
    ps = reductions.zigzag_encode(js, sb)
    problems = reductions.check_macro_pieces(ps)
    for p in problems:
        print(p)
    if args.emit:
        _write(args.emit, json.dumps({"label": ps.label, "pieces": [to_rle(p.cells) for p in ps.pieces]}) + "\n")
    print(f"{len(ps.pieces)} macro-pieces at scale bits {sb}, area {ps.pieces[0].area} each")
    return EXIT_NONE if problems else EXIT_FOUND


def cmd_jigsaw(args) -> int:
    js = jigsaw.load_jigsaw(args.input, args.rotation) if args.input else jigsaw.rect_enforcing_set()
    if args.validate:
        rep = jigsaw.validate_rect_enforcing(js, args.cap, sat_sample=args.sat_sample, backend=args.backend)
        sizes = ", ".join(f"{w}x{h}" for w, h in rep.tileable_sizes())
        print(f"{rep.regions} regions, {rep.images} images; tileable: {sizes or 'none'}")
        for cells, why in rep.counterexamples:
            print(f"counterexample {to_rle(cells)}: {why}")
        if args.json:
            _write_json(args.json, {
                "cap": rep.cap, "regions": rep.regions, "images": rep.images,
                "tileable": sorted({to_rle(c) for c in rep.tileable}),
                "counterexamples": [{"region": to_rle(c), "reason": why} for c, why in rep.counterexamples],
                "ok": rep.ok,
            })
        return EXIT_FOUND if rep.ok else EXIT_NONE
    if not args.box:
        raise UsageError("jigsaw needs --box or --validate")
    r = jigsaw.tile_region(js, args.box, Budget(seconds=args.seconds), args.backend)
    if r.found:
        for y in range(args.box.height):
            print(" ".join(f"{r.tiling.cells[(x, y)][0]:>3}" for x in range(args.box.width)))
        if args.json:
            cells = [{"x": x, "y": y, "piece": p, "turns": t} for (x, y), (p, t) in sorted(r.tiling.cells.items())]
            _write_json(args.json, {"box": [args.box.width, args.box.height], "cells": cells})
        return EXIT_FOUND
    print(r.status)
    return EXIT_NONE if r.status == "unsat" else EXIT_UNKNOWN


def cmd_verify(args) -> int:
    data = json.loads(Path(args.certificate).read_text())
    try:
        jsonschema.validate(data, CERTIFICATE_SCHEMA)
        inst, sol = load_certificate(data)
    except jsonschema.ValidationError as e:
        print(f"malformed certificate: {e.message}", file=sys.stderr)
        return EXIT_NONE
    except (KeyError, TypeError, ValueError) as e:
        print(f"malformed certificate: {e}", file=sys.stderr)
        return EXIT_NONE
    rep = verify_solution(inst, sol)
    if rep.ok:
        print(f"valid: area {sol.area}, {len(sol.tilings)} sets")
        return EXIT_FOUND
    for v in rep.violations:
        print(v)
    return EXIT_NONE


def cmd_render(args) -> int:
    inst, sol = load_certificate(json.loads(Path(args.certificate).read_text()))
    rep = verify_solution(inst, sol)
    if not rep.ok:
        print("certificate does not verify; refusing to render", file=sys.stderr)
        return EXIT_NONE
    text = render(sol.normalized(), args.format, args.seed or 0)
    if args.out:
        _write(args.out, text)
    else:
        print(text, end="")
    return EXIT_FOUND


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="seed for all randomness (default 0)")
    common.add_argument("--jobs", type=int, default=None, help="parallel schedule cells")
    common.add_argument("--backend", default=None, help="auto, builtin, pysat[:NAME], pycosat or a solver path")
    common.add_argument("-v", "--verbose", action="store_true")

    sets = argparse.ArgumentParser(add_help=False)
    sets.add_argument("--s1")
    sets.add_argument("--s2")
    sets.add_argument("--s3")
    sets.add_argument("--instance", help="instance JSON file")
    sets.add_argument("--piece-file", action="append", help="ASCII piece, as PATH or NAME=PATH")
    sets.add_argument("--no-reflect", action="store_true", help="forbid mirror images")

    solve = argparse.ArgumentParser(add_help=False)
    solve.add_argument("--manifest")
    solve.add_argument("--max-area", type=int)
    solve.add_argument("--min-area", type=int)
    solve.add_argument("--seconds", type=float, help="per-cell time budget")
    solve.add_argument("--conflicts", type=int, help="per-cell conflict budget")
    solve.add_argument("--total-seconds", type=float, help="wall-clock budget for the whole run")
    solve.add_argument("--no-prune", action="store_true")
    solve.add_argument("--ledger", help="JSONL ledger (resumable)")
    solve.add_argument("--cert", help="write a JSON certificate")
    solve.add_argument("--render", help="write a rendering here")
    solve.add_argument("--format", choices=["ascii", "svg"])

    p = _Parser(prog="polyshape", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("solve-common", parents=[common, sets, solve], help="least common multiple shape")
    q.add_argument("--all-areas", action="store_true")
    q.set_defaults(func=cmd_solve_common)

    q = sub.add_parser("solve-logic", parents=[common, sets, solve], help="shape logic puzzle")
    q.set_defaults(func=cmd_solve_logic)

    q = sub.add_parser("pack", parents=[common], help="tile a region with pieces (dancing links)")
    q.add_argument("--pieces", required=True)
    q.add_argument("--box", type=_box)
    q.add_argument("--region", help="ASCII or RLE region file")
    q.add_argument("--exact", action="store_true", help="use every piece exactly once")
    q.add_argument("--piece-file", action="append")
    q.add_argument("--no-reflect", action="store_true")
    q.add_argument("--json", help="write the placements as JSON")
    q.set_defaults(func=cmd_pack)

    q = sub.add_parser("oracle", parents=[common, sets], help="brute-force minimal common shape")
    q.add_argument("--max-area", type=int, default=12)
    q.add_argument("--cap", type=int, default=dlx.AREA_CAP)
    q.add_argument("--logic", action="store_true")
    q.add_argument("--json", help="write the census as JSON")
    q.set_defaults(func=cmd_oracle)

    q = sub.add_parser("reduce-3p", parents=[common], help="3-partition to shape logic")
    q.add_argument("--input")
    q.add_argument("--a", help="comma-separated integers")
    q.add_argument("--m", type=int)
    q.add_argument("--emit", help="write the instance JSON")
    q.add_argument("--solve", action="store_true")
    q.add_argument("--seconds", type=float)
    q.add_argument("--cert")
    q.set_defaults(func=cmd_reduce_3p)

    q = sub.add_parser("reduce-pcp", parents=[common], help="PCP to jigsaw pieces")
    q.add_argument("--input")
    q.add_argument("--max-len", type=int, default=8)
    q.add_argument("--emit", help="write the jigsaw set")
    q.add_argument("--tile", action="store_true")
    q.add_argument("--width", type=int, default=10)
    q.add_argument("--max-height", type=int, default=12)
    q.add_argument("--seconds", type=float, default=600.0)
    q.set_defaults(func=cmd_reduce_pcp)

    q = sub.add_parser("zigzag", parents=[common], help="jigsaw pieces to polyominoes")
    q.add_argument("--matrix", action="store_true", help="check the mating matrix")
    q.add_argument("--max-id", type=int, default=7)
    q.add_argument("--scale-bits", type=int)
    q.add_argument("--input", help="jigsaw file (default: the rectangle set)")
    q.add_argument("--emit")
    q.set_defaults(func=cmd_zigzag)

    q = sub.add_parser("jigsaw", parents=[common], help="tile or validate a jigsaw set")
    q.add_argument("--input")
    q.add_argument("--rotation", choices=[jigsaw.FIXED, jigsaw.ROTATABLE], default=jigsaw.FIXED)
    q.add_argument("--box", type=_box)
    q.add_argument("--validate", action="store_true")
    q.add_argument("--cap", type=int, default=12)
    q.add_argument("--sat-sample", type=int, default=0)
    q.add_argument("--seconds", type=float)
    q.add_argument("--json", help="write the tiling or validation report as JSON")
    q.set_defaults(func=cmd_jigsaw)

    q = sub.add_parser("verify", parents=[common], help="check a certificate")
    q.add_argument("certificate")
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("render", parents=[common], help="draw a certificate")
    q.add_argument("certificate")
    q.add_argument("--format", choices=["ascii", "svg"], default="ascii")
    q.add_argument("--out")
    q.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    random.seed(args.seed or 0)
    try:
        return args.func(args)
    except (UsageError, InstanceError, ShapeError, jigsaw.JigsawError, reductions.PreconditionViolated,
            reductions.ScaleTooSmall, dlx.AreaCapExceeded) as e:
        print(f"polyshape: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, json.JSONDecodeError) as e:
        print(f"polyshape: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

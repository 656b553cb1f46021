"""Command-line interface.

Subcommands: validate, networks, generate, verify, count, assemble,
hierarchy, render. Reports are line-oriented text on stdout; exit status is
0 on success, 1 when a requested check reports violations, 2 on usage or
parse errors.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .assembler import (
    GridPatch,
    assemble_patches,
    build_grid_layout,
    check_phase_coherence,
    grid_from_hierarchy,
    patch_from_instance,
)
from .counting import count_bound_first, count_bound_second, exact_count, params_from_system
from .errors import ParseError, TilesubError
from .model import ValidationReport, build_numbering, validate_system
from .network import check_port_condition, search_networks, validate_network
from .render import render_patch_svg, render_tile_svg
from .simulation import enumerate_macro_tiles, hierarchy_decorate, verify_self_simulation
from .specfile import parse_spec
from .stages import stage_views
from .tileset import generate_tileset


def _load(path: str):
    return parse_spec(Path(path).read_text())


def _finish(report: ValidationReport) -> int:
    print(report.render())
    return 0 if report.ok else 1


def cmd_validate(args) -> int:
    doc = _load(args.spec)
    report = validate_system(doc.system)
    if report.ok:
        for rule in doc.system.rules:
            net = doc.networks.get(rule.rule_id)
            if net is not None:
                report.merge(validate_network(doc.system, rule, net))
        if all(r.rule_id in doc.networks for r in doc.system.rules) and doc.networks:
            report.merge(check_port_condition(doc.system, doc.networks))
    return _finish(report)


def cmd_networks(args) -> int:
    doc = _load(args.spec)
    for rule in doc.system.rules:
        nets = search_networks(doc.system, rule)
        print(f"rule {rule.rule_id} networks={len(nets)}")
        for net in nets:
            parts = [
                f"branch {b.k}: {' '.join(b.path)} port={b.port[0]}.{b.port[1]}"
                for b in net.branches
            ]
            print(f"  center={net.center} | " + " | ".join(parts))
    return 0


def _generated(doc):
    numbering = build_numbering(doc.system)
    tau = generate_tileset(doc.system, numbering, doc.networks)
    return numbering, tau


def cmd_generate(args) -> int:
    doc = _load(args.spec)
    numbering, tau = _generated(doc)
    if args.stages:
        outdir = Path(args.stages)
        outdir.mkdir(parents=True, exist_ok=True)
        for name, text in stage_views(tau, numbering, doc.networks).items():
            (outdir / f"after_{name}.txt").write_text(text)
    print(tau.dump())
    return 0


def cmd_verify(args) -> int:
    doc = _load(args.spec)
    numbering, tau = _generated(doc)
    instances = enumerate_macro_tiles(tau, doc.system, numbering, doc.networks)
    report = verify_self_simulation(tau, doc.system, numbering, doc.networks, instances)
    layout = build_grid_layout(doc.system, numbering, doc.networks)
    patches = assemble_patches(tau, numbering, 2, 2)
    bad = sum(
        0 if check_phase_coherence(p, layout).ok else 1 for p in patches
    )
    print(report.render())
    print(
        f"condition2 patch-scale evidence: {'PASS' if bad == 0 else 'FAIL'} "
        f"patches2x2={len(patches)} incoherent={bad}"
    )
    ok = report.ok and bad == 0
    print(f"result={'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def cmd_count(args) -> int:
    doc = _load(args.spec)
    numbering = build_numbering(doc.system)
    params = params_from_system(
        doc.system, numbering, doc.networks,
        doc.second_networks if args.second else None,
    )
    first = count_bound_first(params)
    print(first.render())
    if args.second:
        print(count_bound_second(params).render())
    if args.exact:
        tau = generate_tileset(doc.system, numbering, doc.networks)
        print(exact_count(tau, params).render())
    return 0


def _parse_seeds(path: str, tau) -> dict[tuple[int, int], object]:
    seeds = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            xs, ys, idx = line.split()
            seeds[(int(xs), int(ys))] = tau.tiles[int(idx)]
        except (ValueError, IndexError):
            raise ParseError(f"bad seed line {raw!r}", lineno) from None
    return seeds


def cmd_assemble(args) -> int:
    doc = _load(args.spec)
    numbering, tau = _generated(doc)
    seeds = _parse_seeds(args.seed, tau) if args.seed else None
    patches = assemble_patches(tau, numbering, args.width, args.height, seeds)
    print(f"patches={len(patches)}")
    if args.print_patches:
        for patch in patches:
            refs = " ".join(
                str(tau.index(patch.cells[(x, y)]))
                for y in range(args.height)
                for x in range(args.width)
            )
            print(refs)
    return 0


def cmd_hierarchy(args) -> int:
    doc = _load(args.spec)
    numbering, tau = _generated(doc)
    seed_rule = args.rule or doc.system.rules[0].rule_id
    hpatch = hierarchy_decorate(
        doc.system, numbering, doc.networks, seed_rule, args.depth
    )
    bottom = hpatch.bottom
    matching = bottom.matching_report()
    print(f"tiles={len(bottom.cells)}")
    print(f"undefined_slots={len(bottom.undefined_from)}")
    for level in reversed(hpatch.levels):
        print(
            f"level={level.level} cells={len(level.cells)} "
            f"undefined={len(level.undefined_from)}"
        )
    print(f"matching={'PASS' if matching.ok else 'FAIL'}")
    return 0 if matching.ok else 1


def cmd_render(args) -> int:
    doc = _load(args.spec)
    numbering, tau = _generated(doc)
    try:
        if args.tile is not None:
            svg = render_tile_svg(tau.tiles[args.tile])
        elif args.instance is not None:
            layout = build_grid_layout(doc.system, numbering, doc.networks)
            instances = enumerate_macro_tiles(tau, doc.system, numbering, doc.networks)
            svg = render_patch_svg(patch_from_instance(instances[args.instance], layout))
        elif args.hierarchy_depth is not None:
            layout = build_grid_layout(doc.system, numbering, doc.networks)
            hpatch = hierarchy_decorate(
                doc.system, numbering, doc.networks,
                doc.system.rules[0].rule_id, args.hierarchy_depth,
            )
            svg = render_patch_svg(grid_from_hierarchy(hpatch, layout, doc.networks))
        elif args.empty:
            w, h = (int(v) for v in args.empty.split("x"))
            svg = render_patch_svg(GridPatch(w, h))
        else:
            print("render: choose --tile, --instance, --hierarchy-depth or --empty",
                  file=sys.stderr)
            return 2
    except (IndexError, ValueError) as exc:
        print(f"render: bad subject: {exc}", file=sys.stderr)
        return 2
    Path(args.svg).write_text(svg)
    print(f"wrote {args.svg}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tilesub",
        description="Decorated tilesets for combinatorial substitutions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.add_argument("spec", help="substitution spec (.sub) file")
        p.set_defaults(fn=fn)
        return p

    add("validate", cmd_validate, help="structural + network + port checks")
    add("networks", cmd_networks, help="exhaustive network search per rule")
    p = add("generate", cmd_generate, help="generate and dump the tileset")
    p.add_argument("--stages", metavar="DIR", help="also write stage views")
    add("verify", cmd_verify, help="self-simulation verification")
    p = add("count", cmd_count, help="tile-count bounds")
    p.add_argument("--second", action="store_true", help="second-network bound")
    p.add_argument("--exact", action="store_true", help="compare against |tau|")
    p = add("assemble", cmd_assemble, help="enumerate valid patches")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--seed", help="seed file: lines of 'x y tile-index'")
    p.add_argument("--print-patches", action="store_true")
    p = add("hierarchy", cmd_hierarchy, help="finite-depth hierarchy patch")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--rule", help="seed rule (default: first)")
    p = add("render", cmd_render, help="SVG rendering")
    p.add_argument("--svg", required=True, metavar="OUT")
    p.add_argument("--tile", type=int, help="tileset index of a single tile")
    p.add_argument("--instance", type=int, help="macro-tile instance index")
    p.add_argument("--hierarchy-depth", type=int)
    p.add_argument("--empty", metavar="WxH", help="empty grid of that size")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TilesubError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

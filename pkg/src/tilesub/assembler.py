"""Square-grid patch assembly, phase analysis and macro-decomposition.

This is the specialization to systems whose prototypes are unit squares with
the facet convention (S, N, W, E) = (1, 2, 3, 4) and orientations
(-, +, -, +). Generic polytope assembly would need geometric realization,
which the model deliberately excludes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import AmbiguousSignature, NonSquareSystem
from .model import GlobalNumbering, SubstitutionSystem, ValidationReport, n_sigma
from .network import NetworkSet
from .simulation import HierarchyPatch, MacroTileInstance
from .tileset import (
    DecoratedTile,
    Tileset,
    UNDEFINED,
    decoration_key,
    matches,
)

S, N, W, E = 1, 2, 3, 4


@dataclass(frozen=True)
class GridPatch:
    """A (partial) rectangular assembly. Cell (0, 0) is the bottom-left;
    adjacent filled cells must carry equal decorations on their shared
    facet."""

    width: int
    height: int
    cells: dict[tuple[int, int], DecoratedTile] = field(default_factory=dict)

    def matching_report(self) -> ValidationReport:
        report = ValidationReport()
        for (x, y), tile in self.cells.items():
            east = self.cells.get((x + 1, y))
            if east is not None and not matches(tile.triples[E - 1], east.triples[W - 1]):
                report.add("SeamMismatch", f"({x},{y})-E vs ({x + 1},{y})-W")
            north = self.cells.get((x, y + 1))
            if north is not None and not matches(tile.triples[N - 1], north.triples[S - 1]):
                report.add("SeamMismatch", f"({x},{y})-N vs ({x},{y + 1})-S")
        return report


@dataclass(frozen=True)
class GridLayout:
    """The grid embedding of one rule's template, recovered from its facet
    pairings, plus the per-position macro-index signatures used for phases."""

    rule_id: str
    width: int
    height: int
    cell_at: dict[tuple[int, int], str]
    position_of: dict[int, tuple[int, int]]  # tile index -> (x, y)
    signatures: dict[int, tuple]  # tile index -> macro-index signature


def _require_square(system: SubstitutionSystem) -> None:
    for proto in system.prototypes:
        if proto.facet_count != 4 or proto.orientations != ("-", "+", "-", "+"):
            raise NonSquareSystem(
                f"prototype {proto.name} is not a unit square (S,N,W,E / -,+,-,+)"
            )


def build_grid_layout(system: SubstitutionSystem, numbering: GlobalNumbering,
                      networks: NetworkSet, rule_id: str | None = None) -> GridLayout:
    """Recover the w x h embedding of a rule's template and validate that the
    macro-index signatures identify positions uniquely."""
    _require_square(system)
    rule = system.rule(rule_id) if rule_id else system.rules[0]
    paired = system.paired_slots(rule)
    east: dict[str, str] = {}
    north: dict[str, str] = {}
    for (ca, ka), (cb, kb) in rule.template.internal_pairings:
        if (ka, kb) == (E, W):
            east[ca] = cb
        elif (ka, kb) == (W, E):
            east[cb] = ca
        elif (ka, kb) == (N, S):
            north[ca] = cb
        elif (ka, kb) == (S, N):
            north[cb] = ca
        else:
            raise NonSquareSystem(f"pairing {(ca, ka)}--{(cb, kb)} is not grid-like")
    cells = rule.template.cell_ids()
    corners = [
        c for c in cells if (c, W) not in paired and (c, S) not in paired
    ]
    if len(corners) != 1:
        raise NonSquareSystem(f"rule {rule.rule_id}: no unique bottom-left cell")
    cell_at: dict[tuple[int, int], str] = {}
    row_start, y = corners[0], 0
    width = None
    while row_start is not None:
        cur, x = row_start, 0
        while cur is not None:
            cell_at[(x, y)] = cur
            cur = east.get(cur)
            x += 1
        if width is None:
            width = x
        elif width != x:
            raise NonSquareSystem(f"rule {rule.rule_id}: ragged rows")
        row_start = north.get(row_start)
        y += 1
    if len(cell_at) != len(cells):
        raise NonSquareSystem(f"rule {rule.rule_id}: cells do not form a grid")
    position_of = {}
    signatures = {}
    seen: dict[tuple, int] = {}
    for (x, yy), cell in cell_at.items():
        j = numbering.tile_index(rule.rule_id, cell)
        position_of[j] = (x, yy)
        sig = tuple(n_sigma(numbering, networks, j, k) for k in (S, N, W, E))
        if sig in seen:
            raise AmbiguousSignature(f"T{seen[sig]} and T{j} share signature {sig}")
        seen[sig] = j
        signatures[j] = sig
    return GridLayout(rule.rule_id, width, y, cell_at, position_of, signatures)


def phase_of(tile: DecoratedTile, layout: GridLayout) -> tuple[int, int]:
    """Position of the tile's base cell inside the template, read off the
    macro-index signature. UNDEFINED facets are wildcards; the defined part
    must still identify a unique position."""
    sig = tuple(
        None if dec is UNDEFINED else dec.f for dec in tile.triples
    )
    hits = [
        j
        for j, full in layout.signatures.items()
        if all(s is None or s == f for s, f in zip(sig, full))
    ]
    if not hits:
        raise KeyError(f"signature {sig} matches no template position")
    if len(hits) > 1:
        raise AmbiguousSignature(f"signature {sig} matches positions {hits}")
    return layout.position_of[hits[0]]


def _known_phases(patch: GridPatch, layout: GridLayout, report: ValidationReport
                  ) -> dict[tuple[int, int], tuple[int, int]]:
    phases = {}
    for pos, tile in sorted(patch.cells.items()):
        try:
            phases[pos] = phase_of(tile, layout)
        except (KeyError, AmbiguousSignature):
            report.note(f"cell {pos}: phase undetermined")
    return phases


def check_phase_coherence(patch: GridPatch, layout: GridLayout) -> ValidationReport:
    """East neighbors advance the column phase by one (mod width) at equal
    row phase, and symmetrically northward. Cells whose signature does not
    determine a phase (wildcard-heavy hierarchy cells) are skipped with a
    note."""
    report = ValidationReport()
    w, h = layout.width, layout.height
    phases = _known_phases(patch, layout, report)
    for (x, y), (cx, cy) in phases.items():
        ep = phases.get((x + 1, y))
        if ep is not None and ep != ((cx + 1) % w, cy):
            report.add("PhaseIncoherent", f"({x},{y})->E: {(cx, cy)} then {ep}")
        np_ = phases.get((x, y + 1))
        if np_ is not None and np_ != (cx, (cy + 1) % h):
            report.add("PhaseIncoherent", f"({x},{y})->N: {(cx, cy)} then {np_}")
    return report


def assemble_patches(tau: Tileset, numbering: GlobalNumbering, width: int,
                     height: int, seeds: dict[tuple[int, int], DecoratedTile] | None = None
                     ) -> list[GridPatch]:
    """Exhaustively enumerate all valid width x height patches in scanline
    order (bottom row first, west to east), with facet-indexed candidate
    lookup. Seeded positions are fixed in advance; output order is canonical
    (tiles tried in tileset order)."""
    _require_square(numbering.system)
    seeds = seeds or {}
    by_w: dict[tuple, list[DecoratedTile]] = {}
    by_s: dict[tuple, list[DecoratedTile]] = {}
    by_ws: dict[tuple, list[DecoratedTile]] = {}
    for tile in tau:
        wk = decoration_key(tile.triples[W - 1])
        sk = decoration_key(tile.triples[S - 1])
        by_w.setdefault(wk, []).append(tile)
        by_s.setdefault(sk, []).append(tile)
        by_ws.setdefault((wk, sk), []).append(tile)

    order = [(x, y) for y in range(height) for x in range(width)]
    out: list[GridPatch] = []
    placed: dict[tuple[int, int], DecoratedTile] = {}

    def candidates(x: int, y: int) -> list[DecoratedTile]:
        west = placed.get((x - 1, y))
        south = placed.get((x, y - 1))
        seed = seeds.get((x, y))
        if seed is not None:
            ok = (west is None or matches(west.triples[E - 1], seed.triples[W - 1])) and (
                south is None or matches(south.triples[N - 1], seed.triples[S - 1])
            )
            return [seed] if ok else []
        if west is not None and south is not None:
            return by_ws.get(
                (decoration_key(west.triples[E - 1]), decoration_key(south.triples[N - 1])),
                [],
            )
        if west is not None:
            return by_w.get(decoration_key(west.triples[E - 1]), [])
        if south is not None:
            return by_s.get(decoration_key(south.triples[N - 1]), [])
        return list(tau)

    def fill(idx: int) -> None:
        if idx == len(order):
            out.append(GridPatch(width, height, dict(placed)))
            return
        x, y = order[idx]
        for tile in candidates(x, y):
            placed[(x, y)] = tile
            fill(idx + 1)
            del placed[(x, y)]

    fill(0)
    return out


@dataclass
class DecomposedPatch:
    """A patch partitioned into template-aligned blocks."""

    blocks: dict[tuple[int, int], MacroTileInstance]
    adjacencies: tuple[tuple[tuple[int, int], int, tuple[int, int], int], ...]
    margins: tuple[tuple[int, int], ...]
    report: ValidationReport


def decompose_macro(patch: GridPatch, instances: tuple[MacroTileInstance, ...],
                    layout: GridLayout, wildcard: bool = False) -> DecomposedPatch:
    """Align w x h blocks at phase-(0,0) anchors and identify each complete
    block with an enumerated instance.

    `wildcard=True` lets UNDEFINED patch slots match anything, which is how
    hierarchy patches are analyzed; a complete block matching no instance is
    reported as NonInstanceBlock (a verifier bug on valid patches). Cells
    outside complete blocks are margins.
    """
    w, h = layout.width, layout.height
    report = ValidationReport()
    exact: dict[tuple, int] = {}
    if not wildcard:
        exact = {inst.tiles: i for i, inst in enumerate(instances)}
    phases = _known_phases(patch, layout, ValidationReport())
    anchors = [pos for pos, phase in phases.items() if phase == (0, 0)]
    # Template cell order is increasing tile index.
    template_positions = [layout.position_of[j] for j in sorted(layout.position_of)]
    blocks: dict[tuple[int, int], MacroTileInstance] = {}
    covered: set[tuple[int, int]] = set()
    for ax, ay in anchors:
        positions = [(ax + dx, ay + dy) for dy in range(h) for dx in range(w)]
        if not all(p in patch.cells for p in positions):
            continue
        tiles = tuple(
            patch.cells[(ax + dx, ay + dy)] for dx, dy in template_positions
        )
        instance = _match_instance(tiles, instances, exact, wildcard)
        if instance is None:
            report.add("NonInstanceBlock", f"anchor ({ax},{ay})")
            continue
        blocks[(ax, ay)] = instance
        covered.update(positions)
    margins = tuple(sorted(p for p in patch.cells if p not in covered))
    for pos in margins:
        report.note(f"margin cell {pos}")
    adjacencies = []
    for ax, ay in sorted(blocks):
        if (ax + w, ay) in blocks:
            adjacencies.append(((ax, ay), E, (ax + w, ay), W))
        if (ax, ay + h) in blocks:
            adjacencies.append(((ax, ay), N, (ax, ay + h), S))
    return DecomposedPatch(blocks, tuple(adjacencies), margins, report)


def _match_instance(tiles, instances, exact, wildcard):
    if not wildcard:
        idx = exact.get(tiles)
        return instances[idx] if idx is not None else None
    for inst in instances:
        if all(
            patch_tile.base == inst_tile.base
            and all(
                pd is UNDEFINED or pd == idd
                for pd, idd in zip(patch_tile.triples, inst_tile.triples)
            )
            for patch_tile, inst_tile in zip(tiles, inst.tiles)
        ):
            return inst
    return None


def patch_from_instance(instance: MacroTileInstance, layout: GridLayout) -> GridPatch:
    cells = {}
    for cell_id, tile in zip(instance.cells, instance.tiles):
        pos = next(p for p, c in layout.cell_at.items() if c == cell_id)
        cells[pos] = tile
    return GridPatch(layout.width, layout.height, cells)


def grid_from_hierarchy(hpatch: HierarchyPatch, layout: GridLayout,
                        networks: NetworkSet) -> GridPatch:
    """Realize the bottom level of a square hierarchy as a grid patch."""
    bottom = hpatch.bottom
    w, h = layout.width, layout.height
    pos_of_cell = {c: p for p, c in layout.cell_at.items()}
    cells = {}
    for addr in bottom.cells:
        x = y = 0
        for cell in addr:
            px, py = pos_of_cell[cell]
            x, y = x * w + px, y * h + py
        rule_id = bottom.rule_of[addr]
        central = networks[rule_id].center == addr[-1]
        count = len(layout.signatures[bottom.base_of[addr]])
        triples = tuple(
            bottom.decoration[(addr, k)] for k in range(1, count + 1)
        )
        cells[(x, y)] = DecoratedTile(bottom.base_of[addr], triples, central)
    side = w ** hpatch.depth, h ** hpatch.depth
    return GridPatch(side[0], side[1], cells)

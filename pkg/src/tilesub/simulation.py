"""Macro-tile enumeration, the self-simulation map, and the hierarchy.

`enumerate_macro_tiles` lists every way a rule's template can be filled with
tiles from the tileset so that all internal facets match and the non-central
cells agree on a parent index. `phi` folds such an assembly back onto a
single decorated parent tile; `verify_self_simulation` checks exhaustively
that the tileset and its assemblies behave identically through `phi`.

`hierarchy_decorate` builds the finite-depth telescope of images with the
distinguished UNDEFINED decoration confined to the networks of every level,
and `quotient_hierarchy` / `quotient_preimage` collapse a decomposed patch
one level up.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable

from .errors import (
    InconsistentGluing,
    NoMacroTiles,
    PartialBlock,
    UnresolvedReference,
)
from .model import (
    GlobalNumbering,
    Rule,
    SubstitutionSystem,
    ValidationReport,
)
from .network import NetworkSet, crossed_facets
from .tileset import (
    DecoratedTile,
    DecorationTriple,
    FacetDecoration,
    Tileset,
    UNDEFINED,
    _Layout,
    _steps13,
    build_layout,
    decoration_key,
    matches,
)


@dataclass(frozen=True)
class MacroTileInstance:
    """One decorated filling of a rule's template: all internal facets match
    and every non-central cell carries the same parent index."""

    rule_id: str
    cells: tuple[str, ...]
    tiles: tuple[DecoratedTile, ...]
    parent_index: int
    central_tile: DecoratedTile

    def tile_at(self, cell: str) -> DecoratedTile:
        return self.tiles[self.cells.index(cell)]


def _parent_of_tile(layout: _Layout, tile: DecoratedTile) -> int | None:
    ks = layout.parent_facets.get(tile.base)
    if not ks:
        return None
    dec = tile.triples[ks[0] - 1]
    return None if dec is UNDEFINED else dec.j


def enumerate_macro_tiles(tau: Tileset, system: SubstitutionSystem,
                          numbering: GlobalNumbering, networks: NetworkSet
                          ) -> tuple[MacroTileInstance, ...]:
    """Exhaustive backtracking over each rule's cells, pruning on internal
    matching and parent agreement; canonical order follows the template cell
    order and the tileset's canonical tile order."""
    layout = build_layout(numbering, networks)
    instances: list[MacroTileInstance] = []
    for rule in system.rules:
        instances.extend(_enumerate_rule(tau, system, layout, rule))
    return tuple(instances)


def _enumerate_rule(tau, system, layout, rule: Rule) -> list[MacroTileInstance]:
    numbering = layout.numbering
    cells = rule.template.cell_ids()
    pos = {c: i for i, c in enumerate(cells)}
    center = layout.networks[rule.rule_id].center
    base_of = {c: numbering.tile_index(rule.rule_id, c) for c in cells}
    candidates: dict[str, list[DecoratedTile]] = {c: [] for c in cells}
    for tile in tau:
        rule_id, cell = numbering.base_of(tile.base)
        if rule_id == rule.rule_id:
            candidates[cell].append(tile)
    # Constraints binding each cell to already-placed earlier cells.
    back: dict[str, list[tuple[int, int, int]]] = {c: [] for c in cells}
    for (ca, ka), (cb, kb) in rule.template.internal_pairings:
        if pos[ca] < pos[cb]:
            back[cb].append((kb, pos[ca], ka))
        else:
            back[ca].append((ka, pos[cb], kb))
    # Index candidates by their decoration on the first back-constraint facet.
    first_index: dict[str, dict[tuple, list[DecoratedTile]]] = {}
    for cell, constraints in back.items():
        if constraints:
            k0 = constraints[0][0]
            bucket: dict[tuple, list[DecoratedTile]] = {}
            for tile in candidates[cell]:
                bucket.setdefault(decoration_key(tile.triples[k0 - 1]), []).append(tile)
            first_index[cell] = bucket

    out: list[MacroTileInstance] = []
    placed: list[DecoratedTile] = []

    def place(idx: int, parent: int | None) -> None:
        if idx == len(cells):
            central = placed[pos[center]]
            assert parent is not None, "instance parent must be readable"
            out.append(
                MacroTileInstance(rule.rule_id, cells, tuple(placed), parent, central)
            )
            return
        cell = cells[idx]
        constraints = back[cell]
        if constraints:
            _, i0, ko0 = constraints[0]
            pool = first_index[cell].get(
                decoration_key(placed[i0].triples[ko0 - 1]), ()
            )
        else:
            pool = candidates[cell]
        for tile in pool:
            if any(
                not matches(tile.triples[k - 1], placed[i].triples[ko - 1])
                for k, i, ko in constraints[1:]
            ):
                continue
            tile_parent = None if cell == center else _parent_of_tile(layout, tile)
            next_parent = parent
            if tile_parent is not None:
                if parent is not None and tile_parent != parent:
                    continue
                next_parent = tile_parent
            placed.append(tile)
            place(idx + 1, next_parent)
            placed.pop()

    place(0, None)
    return out


def phi(instance: MacroTileInstance, numbering: GlobalNumbering,
        networks: NetworkSet) -> DecoratedTile:
    """Fold an assembly onto its parent tile: facet k of T_{parent} takes the
    parent/neighbor pair found on facet k of the central tile, under the
    parent's own macro-indices."""
    layout = build_layout(numbering, networks)
    return _phi(layout, instance)


def _phi(layout: _Layout, instance: MacroTileInstance) -> DecoratedTile:
    parent = instance.parent_index
    numbering = layout.numbering
    count = numbering.prototype_of(parent).facet_count
    triples: list[FacetDecoration] = []
    for k in range(1, count + 1):
        dec = instance.central_tile.triples[k - 1]
        if dec is UNDEFINED:
            triples.append(UNDEFINED)
        else:
            triples.append(DecorationTriple(layout.nsigma[(parent, k)], dec.j, dec.g))
    return DecoratedTile(parent, tuple(triples), central=parent in layout.central_cells)


@dataclass
class SimulationReport:
    """Outcome of the self-simulation verification."""

    instance_count: int
    condition1_ok: bool
    phi_in_tileset: bool
    condition3_ok: bool
    failures: list[str] = field(default_factory=list)
    condition2_note: str = (
        "delegated to patch-scale evidence (exhaustive 2x2 coherence in the assembler)"
    )

    @property
    def ok(self) -> bool:
        return self.condition1_ok and self.phi_in_tileset and self.condition3_ok

    def render(self) -> str:
        lines = [
            f"condition1 {'PASS' if self.condition1_ok else 'FAIL'} instances={self.instance_count}",
            f"phi_membership {'PASS' if self.phi_in_tileset else 'FAIL'}",
            f"condition3 {'PASS' if self.condition3_ok else 'FAIL'}",
            f"condition2 {self.condition2_note}",
        ]
        lines.extend(f"FAILURE {f}" for f in self.failures[:20])
        return "\n".join(lines)


def verify_self_simulation(tau: Tileset, system: SubstitutionSystem,
                           numbering: GlobalNumbering, networks: NetworkSet,
                           instances: tuple[MacroTileInstance, ...] | None = None
                           ) -> SimulationReport:
    """Check the self-simulation conditions exhaustively at template scale.

    Condition (1): every assembly projects to its rule's template and its
    image under phi to the rule's parent. The image must also be a tileset
    member. Condition (3): across every macro-adjacency entry, two
    assemblies' macro-facets agree exactly when their phi images' facets do;
    the biconditional is checked as an exact logical equivalence over the
    enumeration. Condition (2) quantifies over complete tilings and is only
    evidenced at patch scale, never claimed proven.
    """
    layout = build_layout(numbering, networks)
    if instances is None:
        instances = enumerate_macro_tiles(tau, system, numbering, networks)
    if not instances:
        raise NoMacroTiles("the tileset admits no macro-tile")
    failures: list[str] = []

    cond1 = True
    phi_ok = True
    images: dict[int, DecoratedTile] = {}
    by_rule: dict[str, list[int]] = {}
    for idx, inst in enumerate(instances):
        by_rule.setdefault(inst.rule_id, []).append(idx)
        rule = system.rule(inst.rule_id)
        expected = tuple(p for _, p in rule.template.cells)
        got = tuple(numbering.prototype_of(t.base).name for t in inst.tiles)
        image = _phi(layout, inst)
        images[idx] = image
        if got != expected or numbering.prototype_of(image.base).name != rule.parent:
            cond1 = False
            failures.append(f"instance {idx}: projection mismatch")
        if image not in tau:
            phi_ok = False
            failures.append(f"instance {idx}: phi image not in tileset")

    cond3 = True
    for entry in system.iter_adjacency_directed():
        (rid_a, a), (rid_b, b) = entry.side_a, entry.side_b
        ga = system.rule(rid_a).gamma_map()[a]
        gb = system.rule(rid_b).gamma_map()[b]
        mapping = sorted(entry.mapping)
        side_key_a = {}
        side_key_b = {}
        for idx in by_rule.get(rid_a, ()):
            inst = instances[idx]
            key = tuple(
                decoration_key(inst.tile_at(ga[pa - 1][0]).triples[ga[pa - 1][1] - 1])
                for pa, _ in mapping
            )
            side_key_a[idx] = key
        for idx in by_rule.get(rid_b, ()):
            inst = instances[idx]
            key = tuple(
                decoration_key(inst.tile_at(gb[pb - 1][0]).triples[gb[pb - 1][1] - 1])
                for _, pb in mapping
            )
            side_key_b[idx] = key
        phi_key_a = {idx: decoration_key(images[idx].triples[a - 1]) for idx in side_key_a}
        phi_key_b = {idx: decoration_key(images[idx].triples[b - 1]) for idx in side_key_b}
        label = f"({rid_a},{a})~({rid_b},{b})"
        if not _biconditional_holds(side_key_a, phi_key_a, side_key_b, phi_key_b):
            cond3 = False
            failures.append(f"condition3 fails across {label}")

    return SimulationReport(len(instances), cond1, phi_ok, cond3, failures)


def _biconditional_holds(side_a, phi_a, side_b, phi_b) -> bool:
    """[side_a(Q) == side_b(Q')] <=> [phi_a(Q) == phi_b(Q')] over all pairs.

    Equivalent finite check: on shared side keys the phi keys must agree and
    be unique, and on shared phi keys the side keys must agree and be unique.
    """
    sides_to_phi_a: dict[Any, set] = {}
    sides_to_phi_b: dict[Any, set] = {}
    phi_to_sides_a: dict[Any, set] = {}
    phi_to_sides_b: dict[Any, set] = {}
    for idx, s in side_a.items():
        sides_to_phi_a.setdefault(s, set()).add(phi_a[idx])
        phi_to_sides_a.setdefault(phi_a[idx], set()).add(s)
    for idx, s in side_b.items():
        sides_to_phi_b.setdefault(s, set()).add(phi_b[idx])
        phi_to_sides_b.setdefault(phi_b[idx], set()).add(s)
    for s in sides_to_phi_a.keys() & sides_to_phi_b.keys():
        if len(sides_to_phi_a[s] | sides_to_phi_b[s]) != 1:
            return False
    for p in phi_to_sides_a.keys() & phi_to_sides_b.keys():
        if len(phi_to_sides_a[p] | phi_to_sides_b[p]) != 1:
            return False
    return True


# ---------------------------------------------------------------------------
# Hierarchy

Address = tuple[str, ...]
Slot = tuple[Address, int]


@dataclass
class LevelPatch:
    """One level of the hierarchy: cells addressed by their expansion path,
    the facet pairings gluing them, and per-slot decorations. `level` counts
    from the bottom (0 = finest); it is positional metadata and not part of
    patch equality."""

    level: int = field(compare=False)
    cells: tuple[Address, ...]
    rule_of: dict[Address, str]
    base_of: dict[Address, int]
    parent_of: dict[Address, int]
    pairs: tuple[tuple[Slot, Slot], ...]
    decoration: dict[Slot, FacetDecoration]
    undefined_from: dict[Slot, int]

    def undefined_slots(self) -> set[Slot]:
        return set(self.undefined_from)

    def matching_report(self) -> ValidationReport:
        report = ValidationReport()
        for sa, sb in self.pairs:
            if not matches(self.decoration[sa], self.decoration[sb]):
                report.add("SeamMismatch", f"{sa} vs {sb}")
        return report


@dataclass
class HierarchyPatch:
    seed_rule: str
    depth: int
    top_parent: int
    levels: tuple[LevelPatch, ...]  # levels[0] is the bottom

    @property
    def bottom(self) -> LevelPatch:
        return self.levels[0]


def _rule_for_prototype(system: SubstitutionSystem, proto: str) -> Rule:
    for rule in system.rules:
        if rule.parent == proto:
            return rule
    raise InconsistentGluing(f"no rule expands prototype {proto}")


def _native_undefined(system, rule, net) -> set[tuple[str, int]]:
    """Rule-local slots the hierarchy leaves undefined: ports, both sides of
    branch-crossed pairings, and everything on the central cell (its pairs
    are derived data, never fixed by the base decoration)."""
    out: set[tuple[str, int]] = {b.port for b in net.branches}
    for pairings in crossed_facets(system, rule, net).values():
        for pairing in pairings:
            out.update(pairing)
    center_proto = system.cell_prototype(rule, net.center)
    out.update((net.center, k) for k in range(1, center_proto.facet_count + 1))
    return out


def _sorted_pairs(pairs: Iterable[tuple[Slot, Slot]]) -> tuple[tuple[Slot, Slot], ...]:
    canon = {tuple(sorted(p)) for p in pairs}
    return tuple(sorted(canon))


def hierarchy_decorate(system: SubstitutionSystem, numbering: GlobalNumbering,
                       networks: NetworkSet, seed_rule: str, depth: int,
                       top_parent: int | None = None) -> HierarchyPatch:
    """Expand the seed rule `depth` times and decorate every level.

    Each level's tiles carry the base decorations with the parent taken from
    the level above; UNDEFINED sits on every port and branch-crossed facet of
    every level's networks, blown down through the gluing so the bottom patch
    shows the whole stack of coarser and coarser grids. The parent of the
    topmost expansion is a free choice (`top_parent`, smallest eligible index
    by default) since nothing above it exists to fix one.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    try:
        seed = system.rule(seed_rule)
    except KeyError:
        raise UnresolvedReference(f"rule {seed_rule}") from None
    layout = build_layout(numbering, networks)
    eligible = sorted(
        j for j in range(1, numbering.n + 1)
        if numbering.prototype_of(j).name == seed.parent
    )
    if top_parent is None:
        if not eligible:
            raise InconsistentGluing(f"no tile has prototype {seed.parent}")
        top_parent = eligible[0]

    native = {
        rule.rule_id: _native_undefined(system, rule, networks[rule.rule_id])
        for rule in system.rules
    }

    # Top expansion: the seed's template as a single block.
    cells: list[Address] = [(c,) for c in seed.template.cell_ids()]
    rule_of = {addr: seed.rule_id for addr in cells}
    base_of = {
        addr: numbering.tile_index(seed.rule_id, addr[0]) for addr in cells
    }
    parent_of = {addr: top_parent for addr in cells}
    pairs = [
        (((ca,), ka), ((cb,), kb))
        for (ca, ka), (cb, kb) in seed.template.internal_pairings
    ]
    inherited: dict[Slot, int] = {}
    levels: list[LevelPatch] = []
    for step in range(depth):
        level = _decorate_level(
            layout, depth - 1 - step, cells, rule_of, base_of, parent_of,
            pairs, inherited, native,
        )
        levels.append(level)
        if step + 1 < depth:
            cells, rule_of, base_of, parent_of, pairs, inherited = _expand_level(
                system, numbering, level, native
            )
    levels.reverse()
    return HierarchyPatch(seed_rule, depth, top_parent, tuple(levels))


def _decorate_level(layout, level_no, cells, rule_of, base_of, parent_of,
                    pairs, inherited, native) -> LevelPatch:
    decoration: dict[Slot, FacetDecoration] = {}
    undefined_from: dict[Slot, int] = {}
    for addr in cells:
        j0 = base_of[addr]
        parent = parent_of[addr]
        count = layout.numbering.prototype_of(j0).facet_count
        plain = _steps13(layout, j0, parent, ())
        local = native[rule_of[addr]]
        for k in range(1, count + 1):
            slot = (addr, k)
            if (addr[-1], k) in local:
                decoration[slot] = UNDEFINED
                undefined_from[slot] = 0
            elif slot in inherited:
                decoration[slot] = UNDEFINED
                undefined_from[slot] = inherited[slot]
            else:
                decoration[slot] = plain[k - 1]
    return LevelPatch(
        level=level_no,
        cells=tuple(sorted(cells)),
        rule_of=dict(rule_of),
        base_of=dict(base_of),
        parent_of=dict(parent_of),
        pairs=_sorted_pairs(pairs),
        decoration=decoration,
        undefined_from=undefined_from,
    )


def _expand_level(system, numbering, level: LevelPatch, native):
    """Blow every cell of a level up by one rule application, gluing the
    blocks along macro-facets via the adjacency table."""
    new_cells: list[Address] = []
    rule_of: dict[Address, str] = {}
    base_of: dict[Address, int] = {}
    parent_of: dict[Address, int] = {}
    pairs: list[tuple[Slot, Slot]] = []
    children: dict[Slot, tuple[Slot, ...]] = {}
    expander: dict[Address, Rule] = {}
    for addr in level.cells:
        proto = numbering.prototype_of(level.base_of[addr]).name
        rule = _rule_for_prototype(system, proto)
        expander[addr] = rule
        for cell, _ in rule.template.cells:
            sub = addr + (cell,)
            new_cells.append(sub)
            rule_of[sub] = rule.rule_id
            base_of[sub] = numbering.tile_index(rule.rule_id, cell)
            parent_of[sub] = level.base_of[addr]
        for (ca, ka), (cb, kb) in rule.template.internal_pairings:
            pairs.append(((addr + (ca,), ka), (addr + (cb,), kb)))
        gamma = rule.gamma_map()
        count = numbering.prototype_of(level.base_of[addr]).facet_count
        for a in range(1, count + 1):
            children[(addr, a)] = tuple(
                (addr + (cm,), km) for cm, km in gamma[a]
            )
    adjacency = {}
    for entry in system.iter_adjacency_directed():
        adjacency[(entry.side_a, entry.side_b)] = entry.mapping
    for (addr_a, a), (addr_b, b) in level.pairs:
        ra, rb = expander[addr_a].rule_id, expander[addr_b].rule_id
        mapping = adjacency.get(((ra, a), (rb, b)))
        if mapping is None:
            raise InconsistentGluing(
                f"no macro-adjacency for ({ra},{a}) ~ ({rb},{b})"
            )
        ga = expander[addr_a].gamma_map()[a]
        gb = expander[addr_b].gamma_map()[b]
        for pa, pb in mapping:
            ca, ka = ga[pa - 1]
            cb, kb = gb[pb - 1]
            pairs.append(((addr_a + (ca,), ka), (addr_b + (cb,), kb)))
    inherited: dict[Slot, int] = {}
    for slot, origin in level.undefined_from.items():
        for child in children[slot]:
            inherited[child] = origin + 1
    return new_cells, rule_of, base_of, parent_of, pairs, inherited


def quotient_hierarchy(hpatch: HierarchyPatch, system: SubstitutionSystem,
                       numbering: GlobalNumbering, networks: NetworkSet,
                       ancestor_parent: int | None = None) -> LevelPatch:
    """Collapse the bottom level one step up, using only bottom-level data.

    Blocks are grouped by address prefix; each block's tiles agree on a
    parent index, which recovers the level-above tile. A facet of the
    recovered tile is UNDEFINED exactly when its whole member seam is; the
    defined facets are rebuilt from the recovered structure under
    `ancestor_parent` (the hierarchy's own top parent by default), which is
    the only level-above datum the bottom cannot carry.
    """
    bottom = hpatch.bottom
    if ancestor_parent is None:
        ancestor_parent = hpatch.top_parent
    layout = build_layout(numbering, networks)
    blocks: dict[Address, list[Address]] = {}
    for addr in bottom.cells:
        if len(addr) < 2:
            raise PartialBlock("bottom level is already the top expansion")
        blocks.setdefault(addr[:-1], []).append(addr)

    base_of: dict[Address, int] = {}
    for prefix, members in blocks.items():
        parents = set()
        for addr in members:
            ks = layout.parent_facets.get(bottom.base_of[addr], ())
            for k in ks:
                dec = bottom.decoration[(addr, k)]
                if dec is not UNDEFINED:
                    parents.add(dec.j)
        if len(parents) != 1:
            raise PartialBlock(f"block {prefix}: parent indices {sorted(parents)}")
        base_of[prefix] = parents.pop()

    # Which macro-facet of which block each bottom slot belongs to.
    member_of: dict[Slot, tuple[Address, int]] = {}
    for prefix, members in blocks.items():
        rule = system.rule(bottom.rule_of[members[0]])
        mf = system.macro_facet_of(rule)
        for addr in members:
            cell = addr[-1]
            for (c, k), a in mf.items():
                if c == cell:
                    member_of[(addr, k)] = (prefix, a)

    pairs: set[tuple[Slot, Slot]] = set()
    for sa, sb in bottom.pairs:
        if sa[0][:-1] == sb[0][:-1]:
            continue
        (block_a, a), (block_b, b) = member_of[sa], member_of[sb]
        pairs.add(tuple(sorted((((block_a), a), ((block_b), b)))))

    decoration: dict[Slot, FacetDecoration] = {}
    undefined_from: dict[Slot, int] = {}
    parent_of: dict[Address, int] = {}
    rule_of: dict[Address, str] = {}
    for prefix, j_b in base_of.items():
        rule_id, cell = numbering.base_of(j_b)
        rule_of[prefix] = rule_id
        parent_of[prefix] = ancestor_parent
        gamma = system.rule(bottom.rule_of[blocks[prefix][0]]).gamma_map()
        count = numbering.prototype_of(j_b).facet_count
        plain = _steps13(layout, j_b, ancestor_parent, ())
        native = _native_undefined(
            system, system.rule(rule_id), networks[rule_id]
        )
        for a in range(1, count + 1):
            slot = (prefix, a)
            states = [
                bottom.decoration[(prefix + (cm,), km)] for cm, km in gamma[a]
            ]
            if all(s is UNDEFINED for s in states):
                decoration[slot] = UNDEFINED
                origins = [
                    bottom.undefined_from[(prefix + (cm,), km)]
                    for cm, km in gamma[a]
                ]
                undefined_from[slot] = max(0, max(origins) - 1)
            else:
                if (cell, a) in native:
                    raise PartialBlock(
                        f"block {prefix}: facet {a} should be undefined"
                    )
                decoration[slot] = plain[a - 1]
    return LevelPatch(
        level=bottom.level + 1,
        cells=tuple(sorted(blocks)),
        rule_of=rule_of,
        base_of=base_of,
        parent_of=parent_of,
        pairs=_sorted_pairs(pairs),
        decoration=decoration,
        undefined_from=undefined_from,
    )


@dataclass
class QuotientPatch:
    """A decomposed patch collapsed to one node per block, nodes decorated
    through phi."""

    nodes: dict[Any, DecoratedTile]
    edges: tuple[tuple[Any, int, Any, int], ...]
    report: ValidationReport

    @property
    def ok(self) -> bool:
        return self.report.ok


def quotient_preimage(decomposed, system: SubstitutionSystem,
                      numbering: GlobalNumbering, networks: NetworkSet,
                      tau: Tileset | None = None) -> QuotientPatch:
    """Collapse a fully decomposed patch: one node per block with prototype
    pi(phi(block)), an (a,b)-labeled edge wherever macro-facets meet, and a
    check of the preimage biconditional: the blocks' macro-facets match
    exactly when the phi images' facets do. With `tau` given, every node must
    be a tileset member.

    `decomposed` provides `blocks` (id -> MacroTileInstance), `adjacencies`
    ((id, a, id', b) labeled seams) and `margins`; margins raise PartialBlock.
    """
    if getattr(decomposed, "margins", ()):
        raise PartialBlock(f"{len(decomposed.margins)} cells outside full blocks")
    layout = build_layout(numbering, networks)
    report = ValidationReport()
    nodes = {
        bid: _phi(layout, inst) for bid, inst in decomposed.blocks.items()
    }
    if tau is not None:
        for bid, node in nodes.items():
            if node not in tau:
                report.add("PhiNotInTileset", f"block {bid}")
    directed = {
        (e.side_a, e.side_b): e.mapping for e in system.iter_adjacency_directed()
    }
    edges = []
    for bid_a, a, bid_b, b in decomposed.adjacencies:
        inst_a = decomposed.blocks[bid_a]
        inst_b = decomposed.blocks[bid_b]
        mapping = directed.get(((inst_a.rule_id, a), (inst_b.rule_id, b)))
        if mapping is None:
            report.add("NoAdjacency", f"({inst_a.rule_id},{a})~({inst_b.rule_id},{b})")
            continue
        ga = system.rule(inst_a.rule_id).gamma_map()[a]
        gb = system.rule(inst_b.rule_id).gamma_map()[b]
        seam_ok = all(
            matches(
                inst_a.tile_at(ga[pa - 1][0]).triples[ga[pa - 1][1] - 1],
                inst_b.tile_at(gb[pb - 1][0]).triples[gb[pb - 1][1] - 1],
            )
            for pa, pb in mapping
        )
        node_ok = matches(nodes[bid_a].triples[a - 1], nodes[bid_b].triples[b - 1])
        if seam_ok != node_ok:
            report.add(
                "PreimageBiconditional",
                f"blocks {bid_a},{bid_b}: seam={'match' if seam_ok else 'clash'} "
                f"but nodes={'match' if node_ok else 'clash'}",
            )
        edges.append((bid_a, a, bid_b, b))
    return QuotientPatch(nodes, tuple(edges), report)

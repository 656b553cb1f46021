"""Decorated tiles and the finite tileset construction.

Every facet of a decorated tile carries a triple (macro-index, parent-index,
neighbor-index). The tileset is built as a least fixpoint: base tiles for
cells off the networks, pair-carrying tiles for cells on network branches,
and center tiles derived from every non-central tile. The closure is
round-based and canonically ordered, so two runs on the same input produce
byte-identical dumps regardless of any internal scheduling.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import BoundViolated, InvalidNetwork, InvalidSystem
from .model import (
    FacetClass,
    GlobalNumbering,
    SubstitutionSystem,
    n_sigma,
    validate_system,
)
from .network import NetworkSet, check_port_condition, network_slots, validate_network


class _Undefined:
    """The distinguished facet decoration used by the tileset extension and
    the hierarchy; it matches only itself."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def render(self) -> str:
        return "u"

    def __repr__(self):
        return "UNDEFINED"


UNDEFINED = _Undefined()


@dataclass(frozen=True)
class DecorationTriple:
    """(macro-index f, parent-index j, neighbor-index g) on one facet."""

    f: FacetClass
    j: int
    g: FacetClass

    def render(self) -> str:
        return f"({self.f.render()},{self.j},{self.g.render()})"


FacetDecoration = DecorationTriple | _Undefined


def decoration_key(dec: FacetDecoration):
    if dec is UNDEFINED:
        return (1,)
    return (0, dec.f, dec.j, dec.g)


def render_decoration(dec: FacetDecoration) -> str:
    return dec.render()


@dataclass(frozen=True)
class DecoratedTile:
    """A tile T_{base} with one decoration per facet. `central` marks tiles
    living on a network center."""

    base: int
    triples: tuple[FacetDecoration, ...]
    central: bool = False

    def sort_key(self):
        return (self.base, tuple(decoration_key(t) for t in self.triples))

    def render(self, provenance: str) -> str:
        cols = " ".join(
            f"k={i}:{render_decoration(t)}" for i, t in enumerate(self.triples, start=1)
        )
        return f"T{self.base} {provenance} | {cols}"


PROVENANCE_BASE = "base"
PROVENANCE_NETWORK = "network"
PROVENANCE_CENTRAL = "central"


@dataclass(frozen=True)
class Tileset:
    """A finite, canonically ordered set of decorated tiles with per-tile
    provenance (which construction stage owns its base cell)."""

    tiles: tuple[DecoratedTile, ...]
    provenance: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.tiles)

    def __iter__(self):
        return iter(self.tiles)

    def __contains__(self, tile: DecoratedTile) -> bool:
        return tile in self._index()

    def index(self, tile: DecoratedTile) -> int:
        return self._index()[tile]

    def _index(self) -> dict[DecoratedTile, int]:
        cache = getattr(self, "_by_tile", None)
        if cache is None:
            cache = {t: i for i, t in enumerate(self.tiles)}
            object.__setattr__(self, "_by_tile", cache)
        return cache

    def dump(self) -> str:
        return "\n".join(
            tile.render(prov) for tile, prov in zip(self.tiles, self.provenance)
        )


def strip_decorations(numbering: GlobalNumbering, tile: DecoratedTile) -> str:
    """The projection pi: forget decorations, keep the prototype name.
    Extended pointwise over assignments and patches by `strip_many`."""
    return numbering.prototype_of(tile.base).name


def strip_many(numbering: GlobalNumbering, tiles: Iterable[DecoratedTile]) -> tuple[str, ...]:
    return tuple(strip_decorations(numbering, t) for t in tiles)


def _nsigma_table(numbering: GlobalNumbering, networks: NetworkSet) -> dict[tuple[int, int], FacetClass]:
    table = {}
    for j in range(1, numbering.n + 1):
        count = numbering.prototype_of(j).facet_count
        for k in range(1, count + 1):
            table[(j, k)] = n_sigma(numbering, networks, j, k)
    return table


@dataclass(frozen=True)
class _Layout:
    """Precomputed per-system structure shared by the construction steps."""

    numbering: GlobalNumbering
    networks: NetworkSet
    nsigma: dict[tuple[int, int], FacetClass]
    central_cells: tuple[int, ...]
    off_network: tuple[int, ...]
    network_cells: tuple[tuple[int, int, tuple[int, ...]], ...]  # (j0, branch k, slots)
    macro_facet_idx: dict[tuple[int, int], int]  # (j0, facet) -> macro-facet k
    parents_for: dict[int, tuple[int, ...]]  # j0 -> eligible parent indices
    parent_facets: dict[int, tuple[int, ...]]  # j0 -> internal non-crossed facets


def build_layout(numbering: GlobalNumbering, networks: NetworkSet) -> _Layout:
    system = numbering.system
    nsigma = _nsigma_table(numbering, networks)
    central_cells = []
    off = []
    on_network = []
    macro_idx = {}
    parents_for = {}
    parent_facets = {}
    slots_by_rule = {
        rule.rule_id: network_slots(system, rule, networks[rule.rule_id])
        for rule in system.rules
    }
    by_proto: dict[str, list[int]] = {}
    for j in range(1, numbering.n + 1):
        by_proto.setdefault(numbering.prototype_of(j).name, []).append(j)
    for j in range(1, numbering.n + 1):
        rule_id, cell = numbering.base_of(j)
        rule = system.rule(rule_id)
        net = networks[rule_id]
        mf = system.macro_facet_of(rule)
        count = numbering.prototype_of(j).facet_count
        for k in range(1, count + 1):
            if (cell, k) in mf:
                macro_idx[(j, k)] = mf[(cell, k)]
        if cell == net.center:
            central_cells.append(j)
            continue
        cell_slots = slots_by_rule[rule_id].get(cell)
        if cell_slots is None:
            off.append(j)
            slot_ks: tuple[int, ...] = ()
        else:
            branch_k, slots = cell_slots
            slot_ks = tuple(sorted(k for (_, k) in slots))
            on_network.append((j, branch_k, slot_ks))
        parents_for[j] = tuple(by_proto.get(rule.parent, ()))
        parent_facets[j] = tuple(
            k
            for k in range(1, count + 1)
            if nsigma[(j, k)].is_internal and k not in slot_ks
        )
    return _Layout(
        numbering=numbering,
        networks=networks,
        nsigma=nsigma,
        central_cells=tuple(central_cells),
        off_network=tuple(off),
        network_cells=tuple(on_network),
        macro_facet_idx=macro_idx,
        parents_for=parents_for,
        parent_facets=parent_facets,
    )


def _steps13(layout: _Layout, j0: int, parent: int, slot_ks: tuple[int, ...],
             blind_seams: bool = False) -> list[FacetDecoration | None]:
    """Decorations fixed before any pair flows on the network: macro-index
    everywhere, parent 0 outside / parent j inside, neighbor equal to the
    macro-index except on macro-facet members where it reports the parent's
    own facet class. Network slots come back as None."""
    nsigma = layout.nsigma
    out: list[FacetDecoration | None] = []
    count = layout.numbering.prototype_of(j0).facet_count
    for k in range(1, count + 1):
        if k in slot_ks:
            out.append(None)
            continue
        f = nsigma[(j0, k)]
        if f.is_internal:
            out.append(DecorationTriple(f, parent, f))
        elif (j0, k) in layout.macro_facet_idx and not blind_seams:
            mk = layout.macro_facet_idx[(j0, k)]
            out.append(DecorationTriple(f, 0, nsigma[(parent, mk)]))
        else:
            out.append(DecorationTriple(f, 0, f))
    return out


def decorate_base(numbering: GlobalNumbering, networks: NetworkSet,
                  blind_seams: bool = False) -> list[DecoratedTile]:
    """Tiles for every non-central cell off the networks, one per eligible
    parent index (any tile whose prototype equals the rule's parent,
    across all rules)."""
    layout = build_layout(numbering, networks)
    return _decorate_base(layout, blind_seams)


def _decorate_base(layout: _Layout, blind_seams: bool = False) -> list[DecoratedTile]:
    tiles = []
    for j0 in layout.off_network:
        for parent in layout.parents_for[j0]:
            triples = _steps13(layout, j0, parent, (), blind_seams)
            tiles.append(DecoratedTile(j0, tuple(triples)))
    return tiles


def allowed_pairs(current: Iterable[DecoratedTile], j: int, k: int) -> set[tuple[int, FacetClass]]:
    """Every (parent-index, neighbor-index) pair realized on facet k of some
    decorated T_j in `current` (central tiles included)."""
    pairs = set()
    for tile in current:
        if tile.base != j:
            continue
        dec = tile.triples[k - 1]
        if dec is not UNDEFINED:
            pairs.add((dec.j, dec.g))
    return pairs


def _pairs_table(tiles: Iterable[DecoratedTile]) -> dict[tuple[int, int], set[tuple[int, FacetClass]]]:
    table: dict[tuple[int, int], set] = {}
    for tile in tiles:
        for k, dec in enumerate(tile.triples, start=1):
            if dec is not UNDEFINED:
                table.setdefault((tile.base, k), set()).add((dec.j, dec.g))
    return table


def decorate_network_step(current: Iterable[DecoratedTile], numbering: GlobalNumbering,
                          networks: NetworkSet, blind_seams: bool = False) -> set[DecoratedTile]:
    """One round of pair-carrying tiles for non-central network cells.

    A cell serving branch k with parent j gets one tile per pair currently
    realized on facet k of a decorated T_j; the pair is written on all its
    network slots at once.
    """
    layout = build_layout(numbering, networks)
    return _decorate_network(layout, list(current), _pairs_table(current), blind_seams)


def _decorate_network(layout: _Layout, current: list[DecoratedTile],
                      pairs: dict[tuple[int, int], set], blind_seams: bool = False) -> set[DecoratedTile]:
    new: set[DecoratedTile] = set()
    for j0, branch_k, slot_ks in layout.network_cells:
        for parent in layout.parents_for[j0]:
            base = _steps13(layout, j0, parent, slot_ks, blind_seams)
            for pj, pg in pairs.get((parent, branch_k), ()):
                triples = list(base)
                for k in slot_ks:
                    triples[k - 1] = DecorationTriple(layout.nsigma[(j0, k)], pj, pg)
                new.add(DecoratedTile(j0, tuple(triples)))
    return new


def derive_central_step(current: Iterable[DecoratedTile], numbering: GlobalNumbering,
                        networks: NetworkSet) -> set[DecoratedTile]:
    """Center tiles derived from every non-central tile with a matching facet
    count: the k-th facet copies the source tile's k-th parent/neighbor pair
    under the center's own macro-indices."""
    layout = build_layout(numbering, networks)
    return _derive_central(layout, list(current))


def _derive_central(layout: _Layout, current: list[DecoratedTile]) -> set[DecoratedTile]:
    new: set[DecoratedTile] = set()
    numbering = layout.numbering
    for j in layout.central_cells:
        count = numbering.prototype_of(j).facet_count
        heads = tuple(layout.nsigma[(j, k)] for k in range(1, count + 1))
        for tile in current:
            if tile.central or len(tile.triples) != count:
                continue
            if any(t is UNDEFINED for t in tile.triples):
                continue
            triples = tuple(
                DecorationTriple(heads[i], t.j, t.g) for i, t in enumerate(tile.triples)
            )
            new.add(DecoratedTile(j, triples, central=True))
    return new


def generate_tileset(system: SubstitutionSystem, numbering: GlobalNumbering,
                     networks: NetworkSet, blind_seams: bool = False,
                     check_bound: bool = True) -> Tileset:
    """Least fixpoint of the three construction steps, canonically ordered.

    `blind_seams=True` is a diagnostic negative control: macro-facet members
    stop reporting the parent's facet class and repeat their own macro-index,
    which is exactly the defect the self-simulation check must catch.
    """
    report = validate_system(system)
    if not report.ok:
        raise InvalidSystem(f"system invalid: {sorted(report.codes())}", report)
    for rule in system.rules:
        if rule.rule_id not in networks:
            raise InvalidNetwork(f"rule {rule.rule_id} has no network")
        net_report = validate_network(system, rule, networks[rule.rule_id])
        if not net_report.ok:
            raise InvalidNetwork(
                f"rule {rule.rule_id} network invalid: {sorted(net_report.codes())}"
            )
    port_report = check_port_condition(system, networks)
    if not port_report.ok:
        raise InvalidNetwork(f"port condition fails: {sorted(port_report.codes())}")

    layout = build_layout(numbering, networks)
    tiles: set[DecoratedTile] = set(_decorate_base(layout, blind_seams))
    sizes = [len(tiles)]
    while True:
        pairs = _pairs_table(tiles)
        new = _decorate_network(layout, list(tiles), pairs, blind_seams)
        new |= _derive_central(layout, list(tiles))
        new -= tiles
        if not new:
            break
        tiles |= new
        sizes.append(len(tiles))
    assert sizes == sorted(sizes), "closure must grow monotonically"

    ordered = sorted(tiles, key=DecoratedTile.sort_key)
    provenance = tuple(_provenance_of(layout, t) for t in ordered)
    result = Tileset(tuple(ordered), provenance)
    _check_step1(layout, result)
    if check_bound:
        _check_bound(layout, result)
    return result


def _provenance_of(layout: _Layout, tile: DecoratedTile) -> str:
    if tile.base in layout.central_cells:
        return PROVENANCE_CENTRAL
    if tile.base in layout.off_network:
        return PROVENANCE_BASE
    return PROVENANCE_NETWORK


def _check_step1(layout: _Layout, tileset: Tileset) -> None:
    for tile in tileset:
        for k, dec in enumerate(tile.triples, start=1):
            assert dec is not UNDEFINED, "closure output never carries UNDEFINED"
            assert dec.f == layout.nsigma[(tile.base, k)], (
                f"macro-index of T{tile.base} facet {k} must be fixed"
            )


def _check_bound(layout: _Layout, tileset: Tileset) -> None:
    from .counting import count_bound_first, params_from_system

    params = params_from_system(layout.numbering.system, layout.numbering, layout.networks)
    if params.p < params.r:
        return
    bound = count_bound_first(params).bound
    if len(tileset) > bound:
        raise BoundViolated(f"{len(tileset)} tiles exceed the bound {bound}")


def extend_undefined(tau: Tileset) -> Tileset:
    """The tileset extension: for every tile and every subset of its facets,
    the variant with that subset replaced by UNDEFINED (deduplicated)."""
    seen: dict[DecoratedTile, str] = {}
    for tile, prov in zip(tau.tiles, tau.provenance):
        count = len(tile.triples)
        for mask in range(1 << count):
            triples = tuple(
                UNDEFINED if mask >> i & 1 else dec
                for i, dec in enumerate(tile.triples)
            )
            variant = DecoratedTile(tile.base, triples, tile.central)
            seen.setdefault(variant, prov)
    ordered = sorted(seen, key=DecoratedTile.sort_key)
    return Tileset(tuple(ordered), tuple(seen[t] for t in ordered))


def matches(a: FacetDecoration, b: FacetDecoration) -> bool:
    """Facet matching: equal triples, or UNDEFINED against UNDEFINED."""
    if a is UNDEFINED or b is UNDEFINED:
        return a is b
    return a == b

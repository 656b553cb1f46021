"""Combinatorial substitution systems.

A substitution is a finite set of rules, each blowing a parent prototype up to
a macro-tile template. Everything is purely combinatorial: a tile is known
only by its facet structure, adjacency is a set of facet pairings, and no
coordinates are ever stored. All values are immutable after construction and
every operation is a pure function, so concurrent use is safe.

Facets carry an orientation sign; two facets may only be glued with opposite
signs. Facet indices are 1-based throughout.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .errors import IndexOutOfRange, InvalidSystem

ORIENT_PLUS = "+"
ORIENT_MINUS = "-"

# A facet slot: (cell id, facet index). A pairing glues two slots.
FacetRef = tuple[str, int]
Pairing = tuple[FacetRef, FacetRef]


def make_pairing(a: FacetRef, b: FacetRef) -> Pairing:
    """Canonical unordered pairing of two facet slots."""
    return (a, b) if a <= b else (b, a)


_KIND_INTERNAL = 0
_KIND_PORT = 1
_KIND_MACRO = 2
_KIND_BOUNDARY = 3
_KIND_RENDER = {_KIND_PORT: "p", _KIND_MACRO: "m", _KIND_BOUNDARY: "b"}


@dataclass(frozen=True, order=True)
class FacetClass:
    """What a facet slot is: internal facet f_i, port, macro-facet member, or
    plain boundary. Ordering is the canonical dump order."""

    kind: int
    index: int = 0

    def __post_init__(self):
        if self.kind == _KIND_INTERNAL and self.index < 1:
            raise ValueError("internal facet class requires a positive index")

    @property
    def is_internal(self) -> bool:
        return self.kind == _KIND_INTERNAL

    def render(self) -> str:
        if self.kind == _KIND_INTERNAL:
            return f"f{self.index}"
        return _KIND_RENDER[self.kind]

    def __repr__(self):  # pragma: no cover - debugging aid
        return f"FacetClass({self.render()})"


def internal(index: int) -> FacetClass:
    return FacetClass(_KIND_INTERNAL, index)


PORT = FacetClass(_KIND_PORT)
MACRO_FACET = FacetClass(_KIND_MACRO)
BOUNDARY = FacetClass(_KIND_BOUNDARY)


@dataclass(frozen=True)
class Prototype:
    """An abstract tile: a facet count and one orientation sign per facet."""

    name: str
    facet_count: int
    orientations: tuple[str, ...]

    def __post_init__(self):
        if self.facet_count < 1:
            raise ValueError(f"prototype {self.name}: facet_count must be >= 1")
        if len(self.orientations) != self.facet_count:
            raise ValueError(
                f"prototype {self.name}: {len(self.orientations)} orientations "
                f"for {self.facet_count} facets"
            )
        if any(o not in (ORIENT_PLUS, ORIENT_MINUS) for o in self.orientations):
            raise ValueError(f"prototype {self.name}: orientations must be + or -")

    def orientation(self, k: int) -> str:
        return self.orientations[k - 1]


@dataclass(frozen=True)
class MacroTileTemplate:
    """A finite connected tiling: cells plus the facet pairings gluing them.

    Cells are (cell id, prototype name) in declaration order; the order fixes
    the tile numbering. External facets are derived, not stored: every slot
    not in a pairing is external. Pairings keep declaration order, which fixes
    the internal-facet numbering.
    """

    cells: tuple[tuple[str, str], ...]
    internal_pairings: tuple[Pairing, ...]

    def cell_ids(self) -> tuple[str, ...]:
        return tuple(c for c, _ in self.cells)

    def prototype_name(self, cell: str) -> str:
        for c, p in self.cells:
            if c == cell:
                return p
        raise KeyError(cell)


@dataclass(frozen=True)
class Rule:
    """One substitution rule: parent prototype, template, and the gamma map
    sending each parent facet to an ordered macro-facet (sequence of external
    slots). Macro-facet members are ordered so adjacency bijections can be
    given positionally."""

    rule_id: str
    parent: str
    template: MacroTileTemplate
    gamma: tuple[tuple[int, tuple[FacetRef, ...]], ...]

    def gamma_map(self) -> dict[int, tuple[FacetRef, ...]]:
        return dict(self.gamma)


@dataclass(frozen=True)
class MacroAdjacency:
    """How macro-facet (rule a, k) may meet macro-facet (rule b, l): a
    positional bijection between the two member sequences (1-based)."""

    side_a: tuple[str, int]
    side_b: tuple[str, int]
    mapping: tuple[tuple[int, int], ...]

    def canonical(self) -> "MacroAdjacency":
        if self.side_a <= self.side_b:
            return MacroAdjacency(self.side_a, self.side_b, tuple(sorted(self.mapping)))
        inv = tuple(sorted((b, a) for a, b in self.mapping))
        return MacroAdjacency(self.side_b, self.side_a, inv)


@dataclass(frozen=True)
class SubstitutionSystem:
    """A finite set of rules plus the declared consistency flag and the table
    of macro-facet adjacencies. Consistency is an input: the artifact never
    attempts to decide it."""

    prototypes: tuple[Prototype, ...]
    rules: tuple[Rule, ...]
    consistent: bool = True
    macro_adjacency: tuple[MacroAdjacency, ...] = ()

    def prototype(self, name: str) -> Prototype:
        for p in self.prototypes:
            if p.name == name:
                return p
        raise KeyError(name)

    def rule(self, rule_id: str) -> Rule:
        for r in self.rules:
            if r.rule_id == rule_id:
                return r
        raise KeyError(rule_id)

    def cell_prototype(self, rule: Rule, cell: str) -> Prototype:
        return self.prototype(rule.template.prototype_name(cell))

    def slots(self, rule: Rule) -> Iterator[FacetRef]:
        for cell, proto_name in rule.template.cells:
            proto = self.prototype(proto_name)
            for k in range(1, proto.facet_count + 1):
                yield (cell, k)

    def paired_slots(self, rule: Rule) -> dict[FacetRef, Pairing]:
        out: dict[FacetRef, Pairing] = {}
        for pairing in rule.template.internal_pairings:
            for slot in pairing:
                out[slot] = pairing
        return out

    def external_slots(self, rule: Rule) -> tuple[FacetRef, ...]:
        paired = self.paired_slots(rule)
        return tuple(s for s in self.slots(rule) if s not in paired)

    def macro_facet_of(self, rule: Rule) -> dict[FacetRef, int]:
        out: dict[FacetRef, int] = {}
        for k, members in rule.gamma:
            for slot in members:
                out[slot] = k
        return out

    def dual_neighbors(self, rule: Rule) -> dict[str, list[str]]:
        """Simple dual graph of the template: cell -> adjacent cells."""
        adj: dict[str, set[str]] = {c: set() for c in rule.template.cell_ids()}
        for (ca, _), (cb, _) in rule.template.internal_pairings:
            if ca != cb:
                adj[ca].add(cb)
                adj[cb].add(ca)
        return {c: sorted(ns) for c, ns in adj.items()}

    def pairings_between(self, rule: Rule, ca: str, cb: str) -> tuple[Pairing, ...]:
        return tuple(
            p
            for p in rule.template.internal_pairings
            if {p[0][0], p[1][0]} == {ca, cb}
        )

    def slot_orientation(self, rule: Rule, slot: FacetRef) -> str:
        cell, k = slot
        return self.cell_prototype(rule, cell).orientation(k)

    def iter_adjacency_directed(self) -> Iterator[MacroAdjacency]:
        """Yield every adjacency entry in both directions."""
        for entry in self.macro_adjacency:
            yield entry
            inv = tuple((b, a) for a, b in entry.mapping)
            yield MacroAdjacency(entry.side_b, entry.side_a, inv)


@dataclass(frozen=True)
class Violation:
    code: str
    detail: str

    def render(self) -> str:
        return f"VIOLATION {self.code}: {self.detail}"


@dataclass
class ValidationReport:
    """Collected violations (empty means valid) plus free-form notes."""

    entries: list[Violation] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.entries

    def add(self, code: str, detail: str) -> None:
        self.entries.append(Violation(code, detail))

    def note(self, text: str) -> None:
        self.notes.append(text)

    def codes(self) -> set[str]:
        return {v.code for v in self.entries}

    def merge(self, other: "ValidationReport") -> None:
        self.entries.extend(other.entries)
        self.notes.extend(other.notes)

    def render(self) -> str:
        lines = [v.render() for v in self.entries]
        lines.extend(f"NOTE {n}" for n in self.notes)
        lines.append(f"result={'PASS' if self.ok else 'FAIL'}")
        return "\n".join(lines)


def _connected(vertices: list[str], neighbors: Mapping[str, list[str]]) -> bool:
    if not vertices:
        return True
    seen = {vertices[0]}
    stack = [vertices[0]]
    while stack:
        for nxt in neighbors.get(stack.pop(), []):
            if nxt in seen or nxt not in vertices:
                continue
            seen.add(nxt)
            stack.append(nxt)
    return len(seen) == len(vertices)


def validate_system(system: SubstitutionSystem) -> ValidationReport:
    """Structural validation of a substitution system.

    Violations, not exceptions: template slot coverage and connectivity,
    orientation opposition on pairings, gamma disjointness/nonemptiness, and
    macro-adjacency well-formedness.
    """
    report = ValidationReport()
    proto_names = {p.name for p in system.prototypes}
    for rule in system.rules:
        rid = rule.rule_id
        if rule.parent not in proto_names:
            report.add("UnknownPrototype", f"{rid}: parent {rule.parent}")
            continue
        cells = rule.template.cell_ids()
        if len(set(cells)) != len(cells):
            report.add("DuplicateCell", f"{rid}: repeated cell id")
        bad = False
        for cell, pname in rule.template.cells:
            if pname not in proto_names:
                report.add("UnknownPrototype", f"{rid}: cell {cell} uses {pname}")
                bad = True
        if bad:
            continue
        slot_set = set(system.slots(rule))
        seen: set[FacetRef] = set()
        for pairing in rule.template.internal_pairings:
            for slot in pairing:
                if slot not in slot_set:
                    report.add("SlotInvalid", f"{rid}: pairing uses unknown slot {slot}")
                elif slot in seen:
                    report.add("SlotConflict", f"{rid}: slot {slot} paired twice")
                seen.add(slot)
            a, b = pairing
            if a == b:
                report.add("SlotConflict", f"{rid}: slot {a} paired with itself")
            elif a in slot_set and b in slot_set:
                if system.slot_orientation(rule, a) == system.slot_orientation(rule, b):
                    report.add(
                        "OrientationClash",
                        f"{rid}: pairing {a}--{b} glues equal orientations",
                    )
        if not _connected(list(cells), system.dual_neighbors(rule)):
            report.add("DisconnectedTemplate", f"{rid}: dual graph is not connected")
        externals = set(system.external_slots(rule))
        parent_proto = system.prototype(rule.parent)
        gamma = rule.gamma_map()
        taken: dict[FacetRef, int] = {}
        for k in range(1, parent_proto.facet_count + 1):
            members = gamma.get(k)
            if not members:
                report.add("GammaMissing", f"{rid}: parent facet {k} has no macro-facet")
                continue
            for slot in members:
                if slot not in externals:
                    report.add("GammaNotExternal", f"{rid}: gamma {k} member {slot}")
                if slot in taken:
                    report.add(
                        "GammaOverlap",
                        f"{rid}: slot {slot} in macro-facets {taken[slot]} and {k}",
                    )
                taken[slot] = k
        for k in gamma:
            if not 1 <= k <= parent_proto.facet_count:
                report.add("GammaRange", f"{rid}: gamma facet {k} out of range")
    _validate_adjacency(system, report)
    return report


def _validate_adjacency(system: SubstitutionSystem, report: ValidationReport) -> None:
    canonical = {e.canonical() for e in system.macro_adjacency}
    if len(canonical) != len(system.macro_adjacency):
        report.add("AdjacencyDuplicate", "macro_adjacency entries are not canonical")
    for entry in system.macro_adjacency:
        try:
            rule_a = system.rule(entry.side_a[0])
            rule_b = system.rule(entry.side_b[0])
        except KeyError as missing:
            report.add("AdjacencyUnknown", f"unknown rule {missing}")
            continue
        ga = rule_a.gamma_map().get(entry.side_a[1])
        gb = rule_b.gamma_map().get(entry.side_b[1])
        if ga is None or gb is None:
            report.add("AdjacencyUnknown", f"{entry.side_a}~{entry.side_b}: no such macro-facet")
            continue
        if len(entry.mapping) != len(ga) or len(entry.mapping) != len(gb):
            report.add(
                "AdjacencyRange",
                f"{entry.side_a}~{entry.side_b}: bijection size mismatch",
            )
            continue
        if {a for a, _ in entry.mapping} != set(range(1, len(ga) + 1)) or {
            b for _, b in entry.mapping
        } != set(range(1, len(gb) + 1)):
            report.add(
                "AdjacencyRange",
                f"{entry.side_a}~{entry.side_b}: bijection is not a bijection",
            )
            continue
        for pa, pb in entry.mapping:
            sa, sb = ga[pa - 1], gb[pb - 1]
            if system.slot_orientation(rule_a, sa) == system.slot_orientation(rule_b, sb):
                report.add(
                    "AdjacencyOrientation",
                    f"{entry.side_a}~{entry.side_b}: {sa} and {sb} share orientation",
                )


@dataclass(frozen=True)
class GlobalNumbering:
    """Global numbering T_1..T_n of cells and f_1..f_m of internal pairings.

    Tiles are ordered by (rule position, cell position); internal facets by
    (rule position, pairing declaration order). The bundled 3x3 document
    declares its pairings so that this reproduces the worked example's
    numbering. Identical systems always number identically.
    """

    system: SubstitutionSystem
    tiles: tuple[tuple[str, str], ...]
    internal_facets: tuple[tuple[str, Pairing], ...]
    n: int
    m: int

    def tile_index(self, rule_id: str, cell: str) -> int:
        return self._tile_lookup()[(rule_id, cell)]

    def base_of(self, j: int) -> tuple[str, str]:
        if not 1 <= j <= self.n:
            raise IndexOutOfRange(f"tile index {j} outside 1..{self.n}")
        return self.tiles[j - 1]

    def prototype_of(self, j: int) -> Prototype:
        rule_id, cell = self.base_of(j)
        return self.system.cell_prototype(self.system.rule(rule_id), cell)

    def facet_index(self, rule_id: str, pairing: Pairing) -> int:
        return self._facet_lookup()[(rule_id, pairing)]

    def _tile_lookup(self) -> dict[tuple[str, str], int]:
        cache = getattr(self, "_tiles_by_key", None)
        if cache is None:
            cache = {key: i + 1 for i, key in enumerate(self.tiles)}
            object.__setattr__(self, "_tiles_by_key", cache)
        return cache

    def _facet_lookup(self) -> dict[tuple[str, Pairing], int]:
        cache = getattr(self, "_facets_by_key", None)
        if cache is None:
            cache = {key: i + 1 for i, key in enumerate(self.internal_facets)}
            object.__setattr__(self, "_facets_by_key", cache)
        return cache


def build_numbering(system: SubstitutionSystem) -> GlobalNumbering:
    """Number all cells and internal facets of a validated system."""
    report = validate_system(system)
    if not report.ok:
        raise InvalidSystem(f"system invalid: {sorted(report.codes())}", report)
    tiles = []
    facets = []
    for rule in system.rules:
        tiles.extend((rule.rule_id, cell) for cell in rule.template.cell_ids())
        facets.extend((rule.rule_id, pairing) for pairing in rule.template.internal_pairings)
    return GlobalNumbering(
        system=system,
        tiles=tuple(tiles),
        internal_facets=tuple(facets),
        n=len(tiles),
        m=len(facets),
    )


def n_sigma(numbering: GlobalNumbering, networks, j: int, k: int) -> FacetClass:
    """Classify the k-th facet of tile T_j: its internal facet index, or
    port / macro-facet / boundary. Ports exist only relative to a network set
    (mapping rule id -> Network); pass None to classify without ports."""
    system = numbering.system
    rule_id, cell = numbering.base_of(j)
    rule = system.rule(rule_id)
    proto = system.cell_prototype(rule, cell)
    if not 1 <= k <= proto.facet_count:
        raise IndexOutOfRange(f"facet {k} outside 1..{proto.facet_count} of T_{j}")
    slot = (cell, k)
    paired = system.paired_slots(rule)
    if slot in paired:
        return internal(numbering.facet_index(rule_id, paired[slot]))
    net = networks.get(rule_id) if networks else None
    if net is not None and any(branch.port == slot for branch in net.branches):
        return PORT
    if slot in system.macro_facet_of(rule):
        return MACRO_FACET
    return BOUNDARY

"""Networks: per-rule stars in the dual graph carrying parent information.

A network is a star subgraph with one branch per macro-facet; the leaf of the
k-th branch owns the k-th port. Validation covers the four connecting
conditions at template scale; `search_networks` enumerates every valid
network of a rule exhaustively.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import MissingNetwork
from .model import (
    FacetRef,
    Pairing,
    Rule,
    SubstitutionSystem,
    ValidationReport,
)


@dataclass(frozen=True)
class Branch:
    """One branch: the cells walked from the center (center excluded, leaf
    last) and the port facet owned by the leaf."""

    k: int
    path: tuple[str, ...]
    port: FacetRef


@dataclass(frozen=True)
class Network:
    rule_id: str
    center: str
    branches: tuple[Branch, ...]

    def cells(self) -> tuple[str, ...]:
        out = [self.center]
        for branch in self.branches:
            out.extend(branch.path)
        return tuple(out)

    def branch(self, k: int) -> Branch:
        for b in self.branches:
            if b.k == k:
                return b
        raise KeyError(k)

    def ports(self) -> dict[int, FacetRef]:
        return {b.k: b.port for b in self.branches}


# Networks attached to a system: one per rule id.
NetworkSet = dict[str, Network]


def branch_edges(net: Network) -> list[tuple[int, str, str]]:
    """Dual-graph edges used by the network, as (branch k, cell, cell)."""
    edges = []
    for branch in net.branches:
        prev = net.center
        for cell in branch.path:
            edges.append((branch.k, prev, cell))
            prev = cell
    return edges


def crossed_facets(system: SubstitutionSystem, rule: Rule, net: Network) -> dict[int, tuple[Pairing, ...]]:
    """Internal pairings traversed by each branch. Between multi-adjacent
    cells every shared pairing counts as crossed."""
    out: dict[int, list[Pairing]] = {b.k: [] for b in net.branches}
    for k, ca, cb in branch_edges(net):
        out[k].extend(system.pairings_between(rule, ca, cb))
    return {k: tuple(v) for k, v in out.items()}


def network_slots(system: SubstitutionSystem, rule: Rule, net: Network) -> dict[str, tuple[int, tuple[FacetRef, ...]]]:
    """Per non-central network cell: the branch it serves and the facet slots
    written in one stroke by the pair-carrying construction step (its port
    and/or its sides of branch-crossed pairings)."""
    crossed = crossed_facets(system, rule, net)
    out: dict[str, tuple[int, tuple[FacetRef, ...]]] = {}
    for branch in net.branches:
        for cell in branch.path:
            slots = [
                slot
                for pairing in crossed[branch.k]
                for slot in pairing
                if slot[0] == cell
            ]
            if branch.port[0] == cell:
                slots.append(branch.port)
            out[cell] = (branch.k, tuple(dict.fromkeys(slots)))
    return out


def _residual_components(system, rule, net) -> list[set[str]]:
    """Components after deleting the center vertex and all network edges."""
    removed = {frozenset((a, b)) for _, a, b in branch_edges(net)}
    cells = [c for c in rule.template.cell_ids() if c != net.center]
    neighbors = system.dual_neighbors(rule)
    comps: list[set[str]] = []
    left = set(cells)
    while left:
        start = left.pop()
        comp = {start}
        stack = [start]
        while stack:
            cur = stack.pop()
            for nxt in neighbors[cur]:
                if nxt == net.center or nxt in comp:
                    continue
                if frozenset((cur, nxt)) in removed:
                    continue
                comp.add(nxt)
                stack.append(nxt)
        left -= comp
        comps.append(comp)
    return comps


def validate_network(system: SubstitutionSystem, rule: Rule, net: Network) -> ValidationReport:
    """Check the connecting conditions for one rule's network.

    Strong residual reading: deleting the center and the network edges must
    leave a single connected graph; the weak reading (only the cells owning
    non-port macro-facet members need to share a component) is surfaced as a
    note either way.
    """
    report = ValidationReport()
    rid = rule.rule_id
    cells = set(rule.template.cell_ids())
    gamma = rule.gamma_map()
    if net.center not in cells:
        report.add("UnknownCell", f"{rid}: center {net.center} not in template")
        return report
    if sorted(b.k for b in net.branches) != sorted(gamma):
        report.add(
            "BranchCount",
            f"{rid}: branches for {sorted(b.k for b in net.branches)}, "
            f"macro-facets are {sorted(gamma)}",
        )
    used: dict[str, int] = {}
    neighbors = system.dual_neighbors(rule)
    for branch in net.branches:
        if not branch.path:
            report.add("EmptyBranch", f"{rid}: branch {branch.k} has no cells")
            continue
        prev = net.center
        for cell in branch.path:
            if cell not in cells:
                report.add("UnknownCell", f"{rid}: branch {branch.k} cell {cell}")
                break
            if cell == net.center:
                report.add("StarShape", f"{rid}: branch {branch.k} revisits the center")
            if cell in used:
                report.add(
                    "StarShape",
                    f"{rid}: cell {cell} on branches {used[cell]} and {branch.k}",
                )
            used[cell] = branch.k
            if cell not in neighbors.get(prev, []):
                report.add(
                    "PathBroken", f"{rid}: branch {branch.k} jumps {prev} -> {cell}"
                )
            prev = cell
        leaf = branch.path[-1] if branch.path else None
        members = gamma.get(branch.k, ())
        if branch.port not in members:
            report.add(
                "PortMembership",
                f"{rid}: port {branch.port} not in macro-facet {branch.k}",
            )
        if leaf is not None and branch.port[0] != leaf:
            report.add("PortOwnership", f"{rid}: port {branch.port} not on leaf {leaf}")
    ports = {b.port for b in net.branches}
    for k, members in gamma.items():
        non_port = [s for s in members if s not in ports]
        if not non_port:
            report.add("NoNonPortFacet", f"{rid}: macro-facet {k} is all ports")
        foreign = [
            b.port for b in net.branches if b.k != k and b.port in members
        ]
        if foreign:
            report.add(
                "PortForeign",
                f"{rid}: macro-facet {k} contains other branches' ports {foreign}",
            )
    external = set(system.external_slots(rule))
    if any(slot[0] == net.center for slot in external):
        report.add("CenterNotInterior", f"{rid}: center {net.center} has external facets")
    comps = _residual_components(system, rule, net)
    macro_cells = {
        slot[0]
        for k, members in gamma.items()
        for slot in members
        if slot not in ports
    }
    weak_ok = any(macro_cells <= comp for comp in comps) if macro_cells else True
    if len(comps) != 1:
        report.add(
            "ResidualDisconnected",
            f"{rid}: residual graph has {len(comps)} components",
        )
    report.note(f"{rid}: residual_weak={'connected' if weak_ok else 'disconnected'}")
    return report


def check_port_condition(system: SubstitutionSystem, networks: NetworkSet) -> ValidationReport:
    """Across every macro-adjacency entry, ports must meet ports.

    Raises MissingNetwork when a rule has no network. An empty adjacency
    table is itself a violation: macro-tiles could never meet.
    """
    report = ValidationReport()
    for rule in system.rules:
        if rule.rule_id not in networks:
            raise MissingNetwork(f"rule {rule.rule_id} has no network")
    if not system.macro_adjacency:
        report.add("NoAdjacency", "macro_adjacency table is empty")
        return report
    for entry in system.iter_adjacency_directed():
        (rid_a, ka), (rid_b, kb) = entry.side_a, entry.side_b
        rule_a, rule_b = system.rule(rid_a), system.rule(rid_b)
        ga = rule_a.gamma_map()[ka]
        gb = rule_b.gamma_map()[kb]
        port_a = networks[rid_a].branch(ka).port
        port_b = networks[rid_b].branch(kb).port
        for pa, pb in entry.mapping:
            sa, sb = ga[pa - 1], gb[pb - 1]
            if (sa == port_a) != (sb == port_b):
                report.add(
                    "PortMisaligned",
                    f"({rid_a},{ka})~({rid_b},{kb}): position {pa}:{pb} pairs "
                    f"{'port' if sa == port_a else 'non-port'} with "
                    f"{'port' if sb == port_b else 'non-port'}",
                )
    return report


def search_networks(system: SubstitutionSystem, rule: Rule) -> tuple[Network, ...]:
    """Exhaustively enumerate all valid networks of a rule, in canonical
    order (center, then branch paths per macro-facet). Depth-first over
    vertex-disjoint path systems; instance sizes are small enough that no
    pruning heuristics are needed."""
    gamma = rule.gamma_map()
    ks = sorted(gamma)
    cells = rule.template.cell_ids()
    external = set(system.external_slots(rule))
    neighbors = system.dual_neighbors(rule)
    interior = [c for c in cells if not any(s[0] == c for s in external)]
    results: list[Network] = []

    def extend_branch(center, k_pos, used, branches):
        if k_pos == len(ks):
            net = Network(rule.rule_id, center, tuple(branches))
            if validate_network(system, rule, net).ok:
                results.append(net)
            return
        k = ks[k_pos]
        member_cells = {s[0] for s in gamma[k]}

        def walk(path):
            cell = path[-1]
            if cell in member_cells:
                for slot in gamma[k]:
                    if slot[0] == cell:
                        branches.append(Branch(k, tuple(path), slot))
                        extend_branch(center, k_pos + 1, used | set(path), branches)
                        branches.pop()
            for nxt in neighbors[cell]:
                if nxt == center or nxt in used or nxt in path:
                    continue
                walk(path + [nxt])

        for first in neighbors[center]:
            if first in used:
                continue
            walk([first])

    for center in interior:
        extend_branch(center, 0, set(), [])
    results.sort(key=lambda net: (cells.index(net.center), tuple(b.path for b in net.branches)))
    return tuple(results)

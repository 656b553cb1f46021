"""Macro-tile enumeration, phi, self-simulation, hierarchy and quotients."""

from types import SimpleNamespace

import pytest

from helpers import E, N, S, W, fc, trip
from tilesub.errors import (
    InconsistentGluing,
    NoMacroTiles,
    PartialBlock,
    UnresolvedReference,
)
from tilesub.simulation import (
    enumerate_macro_tiles,
    hierarchy_decorate,
    phi,
    quotient_hierarchy,
    quotient_preimage,
    verify_self_simulation,
)
from tilesub.tileset import (
    DecoratedTile,
    DecorationTriple,
    Tileset,
    generate_tileset,
)

# Frozen regression constant: the enumeration is in bijection with the
# tileset here (each assembly is determined by its parent and central tile).
INSTANCES_3X3 = 1544

# Undefined facet slots on the depth-2 bottom patch: nine block networks of
# 12 slots each, plus the blown-down top network (4 ports x 3 members and
# 4 crossed seams x 6 members, overlapping the block ports 12 times).
DEPTH2_UNDEFINED = 9 * 12 + (12 + 24) - 12


def test_enumeration_count_regression(instances):
    assert len(instances) == INSTANCES_3X3


def test_parent1_instances_collapse_to_single_index(instances, numbering, networks):
    parent1 = [inst for inst in instances if inst.parent_index == 1]
    assert len(parent1) == 9
    for inst in parent1:
        north = inst.central_tile.triples[N - 1]
        east = inst.central_tile.triples[E - 1]
        # The central tile forces both free pairs to share one index.
        assert north.g == fc(3) and east.g == fc(1)
        assert north.j == east.j


def test_instances_have_uniform_parent(instances, numbering, networks):
    from tilesub.tileset import build_layout

    layout = build_layout(numbering, networks)
    for inst in instances[::97]:
        for cell, tile in zip(inst.cells, inst.tiles):
            ks = layout.parent_facets.get(tile.base, ())
            for k in ks:
                assert tile.triples[k - 1].j == inst.parent_index


def test_instances_match_internally(instances, doc3):
    rule = doc3.system.rules[0]
    for inst in instances[::211]:
        for (ca, ka), (cb, kb) in rule.template.internal_pairings:
            assert inst.tile_at(ca).triples[ka - 1] == inst.tile_at(cb).triples[kb - 1]


def test_phi_parent1_reproduces_base_tile(instances, numbering, networks, tau):
    for inst in (i for i in instances if i.parent_index == 1):
        image = phi(inst, numbering, networks)
        a = inst.central_tile.triples[N - 1].j
        assert image == DecoratedTile(1, (
            DecorationTriple(fc("m"), 0, inst.central_tile.triples[S - 1].g),
            trip(3, a, 3),
            DecorationTriple(fc("m"), 0, inst.central_tile.triples[W - 1].g),
            trip(1, a, 1),
        ))
        assert image in tau


def test_phi_projects_to_parent_prototype(instances, numbering, networks):
    image = phi(instances[0], numbering, networks)
    assert numbering.prototype_of(image.base).name == "sq"


def test_phi_membership_exhaustive(instances, numbering, networks, tau):
    assert all(phi(inst, numbering, networks) in tau for inst in instances)


def test_verify_passes(tau, system, numbering, networks, instances):
    report = verify_self_simulation(tau, system, numbering, networks, instances)
    assert report.ok
    assert report.condition1_ok and report.condition3_ok and report.phi_in_tileset
    assert "patch-scale" in report.condition2_note


def test_verify_empty_tileset_raises(system, numbering, networks):
    with pytest.raises(NoMacroTiles):
        verify_self_simulation(Tileset((), ()), system, numbering, networks)


def test_blind_seam_mutant_fails_condition3(system, numbering, networks):
    mutant = generate_tileset(system, numbering, networks, blind_seams=True)
    report = verify_self_simulation(mutant, system, numbering, networks)
    assert report.condition1_ok and report.phi_in_tileset
    assert not report.condition3_ok
    assert any("condition3" in f for f in report.failures)


def test_hierarchy_depth1(system, numbering, networks):
    patch = hierarchy_decorate(system, numbering, networks, "r1", 1)
    bottom = patch.bottom
    assert len(bottom.cells) == 9
    assert patch.top_parent == 1
    expected_undefined = {
        (("c2",), S), (("c4",), W), (("c6",), E), (("c8",), N),
        (("c2",), N), (("c5",), S),
        (("c4",), E), (("c5",), W),
        (("c5",), E), (("c6",), W),
        (("c5",), N), (("c8",), S),
    }
    assert bottom.undefined_slots() == expected_undefined
    assert bottom.matching_report().ok
    # Off-network decorations are the base ones for the chosen top parent.
    assert bottom.decoration[(("c1",), N)] == trip(3, 1, 3)
    assert bottom.decoration[(("c1",), S)].g == fc("m")


def _expected_depth2_undefined(doc, numbering):
    """Independent recomputation of the depth-2 undefined set: every block's
    own network slots plus the top network blown down through gamma."""
    rule = doc.system.rules[0]
    net = doc.networks["r1"]
    gamma = rule.gamma_map()
    from tilesub.network import crossed_facets

    block_native = {net.branches[i].port for i in range(4)}
    for pairings in crossed_facets(doc.system, rule, net).values():
        for pairing in pairings:
            block_native.update(pairing)
    expected = set()
    for block in rule.template.cell_ids():
        for cell, k in block_native:
            expected.add(((block, cell), k))
    for branch in net.branches:
        # Top-level port: the whole macro-facet of the leaf block.
        for cell, k in gamma[branch.k]:
            expected.add(((branch.path[-1], cell), k))
        # Top-level crossed seam: both facing macro-facets.
        for pairings in [crossed_facets(doc.system, rule, net)[branch.k]]:
            for (ca, ka), (cb, kb) in pairings:
                for cell, k in gamma[ka]:
                    expected.add(((ca, cell), k))
                for cell, k in gamma[kb]:
                    expected.add(((cb, cell), k))
    return expected


def test_hierarchy_depth2(doc3, system, numbering, networks):
    patch = hierarchy_decorate(system, numbering, networks, "r1", 2)
    bottom = patch.bottom
    assert len(bottom.cells) == 81
    assert len(bottom.undefined_from) == DEPTH2_UNDEFINED == 132
    assert bottom.undefined_slots() == _expected_depth2_undefined(doc3, numbering)
    assert bottom.matching_report().ok
    # The middle level telescopes with the depth-1 construction.
    depth1 = hierarchy_decorate(system, numbering, networks, "r1", 1)
    assert patch.levels[1] == depth1.bottom


def test_hierarchy_depth3_structure(system, numbering, networks):
    patch = hierarchy_decorate(system, numbering, networks, "r1", 3)
    assert len(patch.bottom.cells) == 729
    assert patch.bottom.matching_report().ok
    assert len(patch.levels[1].undefined_from) == 132


def test_hierarchy_quotient_roundtrip(system, numbering, networks):
    patch = hierarchy_decorate(system, numbering, networks, "r1", 2, top_parent=1)
    lifted = quotient_hierarchy(patch, system, numbering, networks)
    assert lifted == patch.levels[1]


def test_hierarchy_quotient_roundtrip_other_parent(system, numbering, networks):
    patch = hierarchy_decorate(system, numbering, networks, "r1", 2, top_parent=7)
    lifted = quotient_hierarchy(patch, system, numbering, networks, ancestor_parent=7)
    assert lifted == patch.levels[1]


def test_hierarchy_quotient_needs_depth(system, numbering, networks):
    patch = hierarchy_decorate(system, numbering, networks, "r1", 1)
    with pytest.raises(PartialBlock):
        quotient_hierarchy(patch, system, numbering, networks)


def test_hierarchy_errors(system, numbering, networks):
    with pytest.raises(UnresolvedReference):
        hierarchy_decorate(system, numbering, networks, "nope", 1)
    with pytest.raises(ValueError):
        hierarchy_decorate(system, numbering, networks, "r1", 0)


def test_hierarchy_needs_adjacency_to_glue(system, numbering, networks):
    import dataclasses

    bare = dataclasses.replace(system, macro_adjacency=())
    # Depth 1 never glues blocks, depth 2 must.
    hierarchy_decorate(bare, numbering, networks, "r1", 1)
    with pytest.raises(InconsistentGluing):
        hierarchy_decorate(bare, numbering, networks, "r1", 2)


def test_quotient_single_instance(instances, system, numbering, networks, tau):
    decomposed = SimpleNamespace(
        blocks={(0, 0): instances[0]}, adjacencies=(), margins=()
    )
    quotient = quotient_preimage(decomposed, system, numbering, networks, tau)
    assert quotient.ok
    assert len(quotient.nodes) == 1 and quotient.edges == ()


def _stacked_pair(instances):
    """A parent-1 block and a parent-4 block that glue along S~N."""
    lower = next(i for i in instances if i.parent_index == 1)
    a = lower.central_tile.triples[N - 1].j
    upper = next(
        i for i in instances
        if i.parent_index == 4 and i.central_tile.triples[S - 1] == trip(4, a, 3)
    )
    return lower, upper


def test_quotient_two_glued_instances(instances, system, numbering, networks, tau):
    lower, upper = _stacked_pair(instances)
    # The seam really matches: the lower north side equals the upper south side.
    for (cl, kl), (cu, ku) in zip(
        system.rules[0].gamma_map()[N], system.rules[0].gamma_map()[S]
    ):
        assert lower.tile_at(cl).triples[kl - 1] == upper.tile_at(cu).triples[ku - 1]
    decomposed = SimpleNamespace(
        blocks={(0, 0): lower, (0, 3): upper},
        adjacencies=(((0, 0), N, (0, 3), S),),
        margins=(),
    )
    quotient = quotient_preimage(decomposed, system, numbering, networks, tau)
    assert quotient.ok
    assert quotient.edges == (((0, 0), N, (0, 3), S),)
    # The quotient is itself a valid decorated patch: its two tiles match.
    assert quotient.nodes[(0, 0)].triples[N - 1] == quotient.nodes[(0, 3)].triples[S - 1]


def test_quotient_rejects_margins(instances, system, numbering, networks, tau):
    decomposed = SimpleNamespace(
        blocks={(0, 0): instances[0]}, adjacencies=(), margins=((9, 9),)
    )
    with pytest.raises(PartialBlock):
        quotient_preimage(decomposed, system, numbering, networks, tau)


def test_quotient_biconditional_detects_blind_seams(system, numbering, networks):
    """On the seam-blind mutant two blocks can match along a macro-facet
    while their folded images cannot: the quotient check must flag it."""
    mutant = generate_tileset(system, numbering, networks, blind_seams=True)
    insts = enumerate_macro_tiles(mutant, system, numbering, networks)
    lower = next(
        i for i in insts
        if i.parent_index == 8 and i.central_tile.triples[N - 1] == trip(9, 0, "m")
    )
    upper = next(
        i for i in insts
        if i.parent_index == 1
        and i.central_tile.triples[S - 1] == trip(4, 0, "m")
    )
    gamma = system.rules[0].gamma_map()
    for (cl, kl), (cu, ku) in zip(gamma[N], gamma[S]):
        assert lower.tile_at(cl).triples[kl - 1] == upper.tile_at(cu).triples[ku - 1]
    decomposed = SimpleNamespace(
        blocks={(0, 0): lower, (0, 3): upper},
        adjacencies=(((0, 0), N, (0, 3), S),),
        margins=(),
    )
    quotient = quotient_preimage(decomposed, system, numbering, networks, mutant)
    assert "PreimageBiconditional" in quotient.report.codes()

"""Parsing and printing of .sub documents."""

import pytest

from tilesub.errors import ParseError, UnresolvedReference
from tilesub.grids import make_square_grid_document
from tilesub.specfile import parse_spec, print_spec


def test_bundled_document_structure(doc3):
    assert doc3.name == "square3x3"
    system = doc3.system
    assert len(system.rules) == 1
    rule = system.rules[0]
    assert len(rule.template.cells) == 9
    assert len(rule.template.internal_pairings) == 12
    assert [len(members) for _, members in rule.gamma] == [3, 3, 3, 3]
    net = doc3.networks["r1"]
    assert net.center == "c5"
    assert {b.path for b in net.branches} == {("c2",), ("c4",), ("c6",), ("c8",)}
    assert doc3.system.consistent is True
    second = doc3.second_networks["r1"]
    assert len(second.cells) == 5 and len(second.crossings) == 4


def test_missing_gamma_is_parse_error():
    text = """
substitution t
prototype sq facets 4 orient - + - +
rule r1 parent sq
  cell a sq
  gamma S : a.S
  gamma N : a.N
  gamma W : a.W
"""
    with pytest.raises(ParseError, match="gamma"):
        parse_spec(text)


def test_unresolved_cell_reference():
    text = """
substitution t
prototype sq facets 4 orient - + - +
rule r1 parent sq
  cell a sq
  adj a.E -- c10.W
"""
    with pytest.raises(UnresolvedReference, match="c10"):
        parse_spec(text)


def test_unknown_directive_is_parse_error():
    with pytest.raises(ParseError, match="unknown directive"):
        parse_spec("substitution t\nfrobnicate\n")


def test_facet_alias_requires_four_facets():
    text = """
substitution t
prototype tri facets 3 orient - + -
rule r1 parent tri
  cell a tri
  gamma S : a.1
"""
    with pytest.raises(ParseError, match="4-facet"):
        parse_spec(text)


def test_parse_error_carries_line_number():
    text = "substitution t\nprototype sq facets 4 orient - + - +\nbogus line\n"
    with pytest.raises(ParseError, match="line 3"):
        parse_spec(text)


def test_roundtrip_bundled(doc3):
    assert parse_spec(print_spec(doc3)) == doc3


def test_roundtrip_generated_grid():
    doc = make_square_grid_document(4, 3)
    assert parse_spec(print_spec(doc)) == doc


def test_roundtrip_is_stable(doc3):
    once = print_spec(doc3)
    assert print_spec(parse_spec(once)) == once


def test_grid_3x3_matches_bundled(doc3):
    generated = make_square_grid_document(3, 3)
    assert generated.system == doc3.system
    assert generated.networks == doc3.networks
    assert set(generated.second_networks["r1"].cells) == set(
        doc3.second_networks["r1"].cells
    )
    assert set(generated.second_networks["r1"].crossings) == set(
        doc3.second_networks["r1"].crossings
    )

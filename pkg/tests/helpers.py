"""Shared shorthands for building decorations and small systems in tests."""

from tilesub.model import (
    BOUNDARY,
    MACRO_FACET,
    MacroTileTemplate,
    PORT,
    Prototype,
    Rule,
    SubstitutionSystem,
    internal,
    make_pairing,
)
from tilesub.tileset import DecorationTriple

S, N, W, E = 1, 2, 3, 4

SQUARE = Prototype("sq", 4, ("-", "+", "-", "+"))


def fc(x):
    """Facet class shorthand: int -> internal, 'p'/'m'/'b' -> special."""
    if isinstance(x, int):
        return internal(x)
    return {"p": PORT, "m": MACRO_FACET, "b": BOUNDARY}[x]


def trip(f, j, g):
    return DecorationTriple(fc(f), j, fc(g))


def domino_rule(rule_id="d1"):
    """Two squares side by side: the smallest connected template."""
    template = MacroTileTemplate(
        cells=(("a", "sq"), ("b", "sq")),
        internal_pairings=(make_pairing(("a", E), ("b", W)),),
    )
    gamma = (
        (S, (("a", S), ("b", S))),
        (N, (("a", N), ("b", N))),
        (W, (("a", W),)),
        (E, (("b", E),)),
    )
    return Rule(rule_id, "sq", template, gamma)


def domino_system(rule=None):
    return SubstitutionSystem(
        prototypes=(SQUARE,),
        rules=(rule or domino_rule(),),
        consistent=True,
        macro_adjacency=(),
    )

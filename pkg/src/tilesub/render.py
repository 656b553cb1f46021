"""Deterministic SVG rendering of square tiles and patches.

Each facet shows its decoration as three labels in (f, j, g) order: along the
south side west-to-east, along the north side west-to-east, and bottom-to-top
as (g, j, f) beside the west and east sides. Internal facet classes render as
bare indices, the special classes as p/m/b/u. Output is byte-stable.
"""
from __future__ import annotations

from .assembler import GridPatch
from .errors import NonSquareSystem
from .tileset import DecoratedTile, UNDEFINED

CELL = 100
MARGIN = 10
FONT = 11

S, N, W, E = 0, 1, 2, 3


def _label(dec, part: int) -> str:
    if dec is UNDEFINED:
        return "u"
    value = (dec.f, dec.j, dec.g)[part]
    if part == 1:
        return str(value)
    if value.is_internal:
        return str(value.index)
    return value.render()


def _facet_labels(dec) -> str:
    return f"{_label(dec, 0)} {_label(dec, 1)} {_label(dec, 2)}"


def _text(x: float, y: float, content: str, anchor: str = "middle") -> str:
    return (
        f'<text x="{x:.1f}" y="{y:.1f}" font-size="{FONT}" '
        f'font-family="monospace" text-anchor="{anchor}">{content}</text>'
    )


def _tile_fragments(tile: DecoratedTile, ox: float, oy: float) -> list[str]:
    if len(tile.triples) != 4:
        raise NonSquareSystem("SVG rendering needs four-facet tiles")
    frags = [
        f'<rect x="{ox:.1f}" y="{oy:.1f}" width="{CELL}" height="{CELL}" '
        f'fill="none" stroke="black"/>'
    ]
    mid = CELL / 2
    frags.append(_text(ox + mid, oy + CELL - 5, _facet_labels(tile.triples[S])))
    frags.append(_text(ox + mid, oy + 13, _facet_labels(tile.triples[N])))
    for part, dy in ((0, -14), (1, 0), (2, 14)):
        frags.append(
            _text(ox + 6, oy + mid - dy + 4, _label(tile.triples[W], part), "start")
        )
        frags.append(
            _text(ox + CELL - 6, oy + mid - dy + 4, _label(tile.triples[E], part), "end")
        )
    frags.append(_text(ox + mid, oy + mid + 4, f"T{tile.base}"))
    return frags


def _document(width: int, height: int, body: list[str]) -> str:
    total_w = width * CELL + 2 * MARGIN
    total_h = height * CELL + 2 * MARGIN
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" '
        f'height="{total_h}" viewBox="0 0 {total_w} {total_h}">'
    )
    return "\n".join([head, *body, "</svg>"]) + "\n"


def render_tile_svg(tile: DecoratedTile) -> str:
    return _document(1, 1, _tile_fragments(tile, MARGIN, MARGIN))


def render_patch_svg(patch: GridPatch) -> str:
    """Grid plus one decorated square per filled cell; empty patches render
    the bare grid."""
    body = []
    for gy in range(patch.height + 1):
        y = MARGIN + gy * CELL
        body.append(
            f'<line x1="{MARGIN}" y1="{y}" x2="{MARGIN + patch.width * CELL}" '
            f'y2="{y}" stroke="lightgray"/>'
        )
    for gx in range(patch.width + 1):
        x = MARGIN + gx * CELL
        body.append(
            f'<line x1="{x}" y1="{MARGIN}" x2="{x}" '
            f'y2="{MARGIN + patch.height * CELL}" stroke="lightgray"/>'
        )
    for (x, y) in sorted(patch.cells):
        tile = patch.cells[(x, y)]
        ox = MARGIN + x * CELL
        oy = MARGIN + (patch.height - 1 - y) * CELL
        body.extend(_tile_fragments(tile, ox, oy))
    return _document(patch.width, patch.height, body)

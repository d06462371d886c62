"""Egg-box diagrams: one grid per D-class, rows R-classes, columns L-classes."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from html import escape
from typing import Callable


from .semigroup import GreenStructure

SCHEMA_VERSION = 1


@dataclass
class Cell:
    labels: list[str]
    group: bool
    tint: str = "none"


@dataclass
class DBox:
    id: int
    rows: int
    cols: int
    cells: list[list[Cell]]


@dataclass
class EggBox:
    dclasses: list[DBox]
    hasse: list[tuple[int, int]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "dclasses": [
                {"id": d.id, "rows": d.rows, "cols": d.cols,
                 "cells": [[{"labels": c.labels, "group": c.group, "tint": c.tint} for c in row]
                           for row in d.cells]}
                for d in self.dclasses
            ],
            "hasse": [list(e) for e in self.hasse],
        }

    @classmethod
    def from_json(cls, data: dict | str) -> "EggBox":
        if isinstance(data, str):
            data = json.loads(data)
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported egg-box schema version {data.get('schema_version')!r}")
        boxes = [DBox(d["id"], d["rows"], d["cols"],
                      [[Cell(list(c["labels"]), bool(c["group"]), c["tint"]) for c in row] for row in d["cells"]])
                 for d in data["dclasses"]]
        return cls(boxes, [tuple(e) for e in data["hasse"]])


def layout(G: GreenStructure, labeler: Callable[[int], str] = str,
           colorer: Callable[[int], str] | None = None) -> EggBox:
    """Arrange a Green structure into egg boxes.

    R- and L-classes inside a D-class are ordered by their least element
    index; a cell is tinted only when all its members share a tint.
    """
    boxes = []
    for d in range(G.num("d")):
        members = G.members("d", d)
        rs = sorted({int(G.r_class[x]) for x in members}, key=lambda c: G.members("r", c)[0])
        ls = sorted({int(G.l_class[x]) for x in members}, key=lambda c: G.members("l", c)[0])
        grid = [[[] for _ in ls] for _ in rs]
        rpos = {c: k for k, c in enumerate(rs)}
        lpos = {c: k for k, c in enumerate(ls)}
        for x in members:
            grid[rpos[int(G.r_class[x])]][lpos[int(G.l_class[x])]].append(x)
        cells = []
        for row in grid:
            out = []
            for xs in row:
                tints = {colorer(x) for x in xs} if colorer else {"none"}
                group = bool(xs) and int(G.h_class[xs[0]]) in G.group_h
                out.append(Cell([labeler(x) for x in xs], group, tints.pop() if len(tints) == 1 else "none"))
            cells.append(out)
        boxes.append(DBox(d, len(rs), len(ls), cells))
    # J-cover edges, translated to D ids through a representative
    j_to_d = {}
    for x in range(G.size):
        j_to_d.setdefault(int(G.j_class[x]), int(G.d_class[x]))
    hasse = sorted((j_to_d[lo], j_to_d[hi]) for lo, hi in G.j_cover)
    return EggBox(boxes, hasse)


def _cell_text(c: Cell) -> str:
    text = ",".join(c.labels)
    return ("#" + text) if c.group else text


def render_ascii(e: EggBox) -> str:
    """Grids from the top of the J-order downwards; '#' marks group H-classes."""
    lines = []
    for d in _top_down(e):
        texts = [[_cell_text(c) for c in row] for row in d.cells]
        widths = [max(len(texts[r][k]) for r in range(d.rows)) for k in range(d.cols)]
        rule = "+" + "+".join("-" * (w + 2) for w in widths) + "+"
        lines.append(f"D{d.id} ({d.rows}x{d.cols})")
        lines.append(rule)
        for row in texts:
            lines.append("|" + "|".join(f" {t.ljust(w)} " for t, w in zip(row, widths)) + "|")
            lines.append(rule)
        below = sorted(lo for lo, hi in e.hasse if hi == d.id)
        if below:
            lines.append("covers: " + " ".join(f"D{b}" for b in below))
        lines.append("")
    return "\n".join(lines)


def _top_down(e: EggBox) -> list[DBox]:
    ups: dict[int, set[int]] = {d.id: set() for d in e.dclasses}
    for lo, hi in e.hasse:
        ups[lo].add(hi)
    height: dict[int, int] = {}

    def h(x):
        if x not in height:
            height[x] = 0 if not ups[x] else 1 + max(h(y) for y in ups[x])
        return height[x]

    return sorted(e.dclasses, key=lambda d: (h(d.id), d.id))


_TINT_COLORS = {"0": "blue", "inf": "red", "none": "black"}


def render_dot(e: EggBox) -> str:
    """One HTML-table node per D-class, Hasse edges drawn bottom-up."""
    out = ["digraph eggbox {", "  rankdir=BT;", "  node [shape=plaintext];"]
    for d in e.dclasses:
        rows = []
        for row in d.cells:
            tds = []
            for c in row:
                bg = ' BGCOLOR="lightgrey"' if c.group else ""
                color = _TINT_COLORS.get(c.tint, "black")
                tds.append(f'<TD{bg} COLOR="{color}">{escape(", ".join(c.labels))}</TD>')
            rows.append("<TR>" + "".join(tds) + "</TR>")
        out.append(f'  D{d.id} [label=<<TABLE BORDER="0" CELLBORDER="1" CELLSPACING="0">{"".join(rows)}</TABLE>>];')
    for lo, hi in e.hasse:
        out.append(f"  D{lo} -> D{hi} [dir=none];")
    out.append("}")
    return "\n".join(out) + "\n"


def render(e: EggBox, fmt: str) -> str:
    if fmt == "ascii":
        return render_ascii(e)
    if fmt == "dot":
        return render_dot(e)
    if fmt == "json":
        return json.dumps(e.to_json(), indent=1, sort_keys=True) + "\n"
    raise ValueError(f"unknown format {fmt!r}")

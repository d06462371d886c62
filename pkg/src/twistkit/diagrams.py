"""Partition monoids and their diagram submonoids.

A partition of degree n is a set partition of the 2n vertices
``1..n`` (upper row, encoded +1..+n) and ``1'..n'`` (lower row, encoded
-1..-n).  Products are computed on the product graph, whose middle row is
where floating components live.

Transformations act on the right (``x(ab) = (xa)b``).  A full transformation
f is the partition with transversals ``f^{-1}(y) ∪ {y'}``; this realizes T_n,
I_n and S_n inside P_n.  Partial transformations do not embed compatibly, so
PT_n uses its own element type, :class:`PartialMap`.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import cached_property
from itertools import permutations, product
from typing import Iterable, Sequence

from .commmonoid import set_partitions
from .semigroup import ResourceBoundError

FAMILIES = ("P", "PB", "B", "PP", "TL", "Mz", "T", "PT", "I", "Sym")

ENUM_BOUNDS = {"P": 4, "PB": 4, "PP": 4, "Mz": 4,
               "B": 5, "TL": 5, "I": 5, "T": 5, "PT": 5, "Sym": 5}


class PartitionError(ValueError):
    pass


def _vkey(v: int) -> tuple[int, int]:
    return (abs(v), 0 if v > 0 else 1)


def _vlabel(v: int) -> str:
    return f"{v}" if v > 0 else f"{-v}'"


@dataclass(frozen=True)
class Invariants:
    rank: int
    dom: frozenset[int]
    codom: frozenset[int]
    ker: tuple[tuple[int, ...], ...]
    coker: tuple[tuple[int, ...], ...]


class Partition:
    """An element of the partition monoid P_n in canonical block form."""

    __slots__ = ("n", "blocks", "_hash", "__dict__")

    def __init__(self, n: int, blocks: Iterable[Iterable[int]]):
        if n < 1:
            raise PartitionError("degree must be at least 1")
        seen: set[int] = set()
        canon = []
        for raw in blocks:
            block = sorted({int(v) for v in raw}, key=_vkey)
            if not block:
                continue
            for v in block:
                if v == 0 or abs(v) > n:
                    raise PartitionError(f"vertex {v} out of range for degree {n}")
                if v in seen:
                    raise PartitionError(f"vertex {_vlabel(v)} appears twice")
                seen.add(v)
            canon.append(tuple(block))
        missing = [v for v in list(range(1, n + 1)) + list(range(-1, -n - 1, -1)) if v not in seen]
        if missing:
            raise PartitionError(f"vertex {_vlabel(missing[0])} missing")
        canon.sort(key=lambda b: _vkey(b[0]))
        self.n = n
        self.blocks: tuple[tuple[int, ...], ...] = tuple(canon)
        self._hash = hash((n, self.blocks))

    # identity / comparison ---------------------------------------------

    def __eq__(self, other):
        return isinstance(other, Partition) and self.n == other.n and self.blocks == other.blocks

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return (self.n, self.blocks) < (other.n, other.blocks)

    def __repr__(self):
        return f"Partition({self.n}, {[list(b) for b in self.blocks]})"

    def __str__(self):
        return self.to_text()

    def __mul__(self, other: "Partition") -> "Partition":
        return multiply_floats(self, other)[0]

    @classmethod
    def identity(cls, n: int) -> "Partition":
        return cls(n, [[i, -i] for i in range(1, n + 1)])


    # serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {"n": self.n, "blocks": [list(b) for b in self.blocks]}

    @classmethod
    def from_json(cls, data: dict | str) -> "Partition":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(int(data["n"]), data["blocks"])

    def to_text(self) -> str:
        """Compact text form; from degree 10 on vertices are comma separated and a
        trailing comma marks the multi-digit convention."""
        sep = "," if self.n >= 10 else ""
        parts = []
        for block in self.blocks:
            up = [v for v in block if v > 0]
            lo = [v for v in block if v < 0]
            u = sep.join(str(v) for v in up)
            l = sep.join(f"{-v}'" for v in lo)
            parts.append(f"{u}({l})" if up and lo else u or l)
        return "|".join(parts) + sep

    @classmethod
    def from_text(cls, text: str, n: int | None = None) -> "Partition":
        """Parse e.g. ``14|23(4'5')|56|1'2'6'|3'``; commas separate multi-digit vertices."""
        blocks = []
        # with commas anywhere, vertices may have several digits
        pattern = r"(\d+)('?)" if "," in text else r"(\d)('?)"
        for chunk in text.strip().split("|"):
            tokens = re.findall(pattern, chunk.replace("(", ",").replace(")", ","))
            blocks.append([int(d) if not p else -int(d) for d, p in tokens])
        if n is None:
            n = max(abs(v) for b in blocks for v in b)
        return cls(n, blocks)

    # involution and invariants ------------------------------------------

    def star(self) -> "Partition":
        return Partition(self.n, [[-v for v in b] for b in self.blocks])

    @cached_property
    def invariants(self) -> Invariants:
        rank = 0
        dom: set[int] = set()
        codom: set[int] = set()
        ker, coker = [], []
        for block in self.blocks:
            up = [v for v in block if v > 0]
            lo = [-v for v in block if v < 0]
            if up and lo:
                rank += 1
                dom.update(up)
                codom.update(lo)
            if up:
                ker.append(up)
            if lo:
                coker.append(lo)
        return Invariants(rank, frozenset(dom), frozenset(codom),
                          tuple(sorted(tuple(sorted(c)) for c in ker)),
                          tuple(sorted(tuple(sorted(c)) for c in coker)))

    @property
    def rank(self) -> int:
        return self.invariants.rank


def partition_new(n: int, blocks: Iterable[Iterable[int]]) -> Partition:
    return Partition(n, blocks)


def invariants(a: Partition) -> Invariants:
    return a.invariants


def star(a: Partition) -> Partition:
    return a.star()


def multiply_floats(a: Partition, b: Partition) -> tuple[Partition, int]:
    """Product ab via the product graph, and the number of floating components.

    Vertices of the product graph: a's upper row (0..n-1), the shared middle
    row (n..2n-1) and b's lower row (2n..3n-1).
    """
    n = a.n
    if b.n != n:
        raise PartitionError(f"degree mismatch: {a.n} vs {b.n}")
    parent = list(range(3 * n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def join(group):
        root = find(group[0])
        for x in group[1:]:
            r = find(x)
            if r != root:
                parent[r] = root

    for block in a.blocks:
        join([v - 1 if v > 0 else n - v - 1 for v in block])
    for block in b.blocks:
        join([n + v - 1 if v > 0 else 2 * n - v - 1 for v in block])

    groups: dict[int, list[int]] = {}
    outer: set[int] = set()
    for x in range(3 * n):
        r = find(x)
        if x < n:
            groups.setdefault(r, []).append(x + 1)
            outer.add(r)
        elif x >= 2 * n:
            groups.setdefault(r, []).append(-(x - 2 * n + 1))
            outer.add(r)
    floats = len({find(x) for x in range(n, 2 * n)} - outer)
    return Partition(n, groups.values()), floats


# --------------------------------------------------------------------------
# families


def is_planar(a: Partition) -> bool:
    """Non-crossing test in the boundary order 1..n, n'..1'."""
    n = a.n

    def pos(v):
        return v - 1 if v > 0 else 2 * n + v

    sets = [sorted(pos(v) for v in b) for b in a.blocks]
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if _crossing(sets[i], sets[j]):
                return False
    return True


def _crossing(A: list[int], B: list[int]) -> bool:
    marks = sorted([(p, 0) for p in A] + [(p, 1) for p in B])
    seq = [m for _, m in marks]
    runs = [seq[0]]
    for m in seq[1:]:
        if m != runs[-1]:
            runs.append(m)
    if len(runs) > 1 and runs[0] == runs[-1]:
        runs.pop()
    return len(runs) > 2


def _is_functional(a: Partition) -> bool:
    # each block has exactly one lower vertex or is a single upper vertex... see T_n below
    return all(sum(1 for v in b if v < 0) <= 1 for b in a.blocks)


def in_family(a, family: str) -> bool:
    """Membership of a partition (or partial map, for PT) in a diagram family."""
    if family not in FAMILIES:
        raise PartitionError(f"unknown family {family!r}")
    if family == "PT":
        return isinstance(a, PartialMap)
    if not isinstance(a, Partition):
        return False
    inv = a.invariants
    sizes = [len(b) for b in a.blocks]
    full = set(range(1, a.n + 1))
    trivial = tuple((x,) for x in range(1, a.n + 1))
    if family == "P":
        return True
    if family == "B":
        return all(s == 2 for s in sizes)
    if family == "PB":
        return all(s <= 2 for s in sizes)
    if family == "PP":
        return is_planar(a)
    if family == "TL":
        return all(s == 2 for s in sizes) and is_planar(a)
    if family == "Mz":
        return all(s <= 2 for s in sizes) and is_planar(a)
    if family == "T":
        return inv.dom == full and inv.coker == trivial
    if family == "I":
        return inv.ker == trivial and inv.coker == trivial
    if family == "Sym":
        return inv.rank == a.n
    raise AssertionError(family)


def _perfect_matchings(points: list[int]):
    if not points:
        yield []
        return
    first, rest = points[0], points[1:]
    for k, other in enumerate(rest):
        for m in _perfect_matchings(rest[:k] + rest[k + 1:]):
            yield [(first, other)] + m


def _vertices(n: int) -> list[int]:
    return list(range(1, n + 1)) + list(range(-1, -n - 1, -1))


def enumerate_family(family: str, n: int, bound: int | None = None) -> list:
    """All elements of a family at degree n, duplicate-free, in a fixed order."""
    if family not in FAMILIES:
        raise PartitionError(f"unknown family {family!r}")
    limit = ENUM_BOUNDS[family] if bound is None else bound
    if n < 1:
        raise PartitionError("degree must be at least 1")
    if n > limit:
        raise ResourceBoundError(f"{family}_{n} exceeds the enumeration bound (n <= {limit})")
    if family in ("P", "PB", "PP", "Mz"):
        allp = [Partition(n, blocks) for blocks in set_partitions(_vertices(n))]
        return [a for a in allp if in_family(a, family)]
    if family in ("B", "TL"):
        allb = [Partition(n, m) for m in _perfect_matchings(_vertices(n))]
        return [a for a in allb if in_family(a, family)]
    if family == "T":
        return [PartialMap(f).to_partition() for f in product(range(1, n + 1), repeat=n)]
    if family == "Sym":
        return [PartialMap(f).to_partition() for f in permutations(range(1, n + 1))]
    if family == "I":
        out = []
        for f in product(range(0, n + 1), repeat=n):
            img = [y for y in f if y]
            if len(img) == len(set(img)):
                out.append(PartialMap(f).to_partition(partial=True))
        return out
    if family == "PT":
        return [PartialMap(f) for f in product(range(0, n + 1), repeat=n)]
    raise AssertionError(family)


# --------------------------------------------------------------------------
# partial transformations


class PartialMap:
    """A partial transformation of {1..n}; ``images[x-1]`` is xf, or 0 if undefined.

    Composition is left to right: ``(f * g)`` maps x to (xf)g.
    """

    __slots__ = ("images", "n")

    def __init__(self, images: Sequence[int | None]):
        self.images = tuple(int(y or 0) for y in images)
        self.n = len(self.images)
        if any(y < 0 or y > self.n for y in self.images):
            raise PartitionError(f"image out of range in {self.images}")

    def __eq__(self, other):
        return isinstance(other, PartialMap) and self.images == other.images

    def __hash__(self):
        return hash(("PT", self.images))

    def __lt__(self, other):
        return self.images < other.images

    def __repr__(self):
        return f"PartialMap({list(self.images)})"

    def __str__(self):
        return "(" + " ".join(str(y) if y else "-" for y in self.images) + ")"

    def __mul__(self, other: "PartialMap") -> "PartialMap":
        return PartialMap([other.images[y - 1] if y else 0 for y in self.images])

    @classmethod
    def identity(cls, n):
        return cls(range(1, n + 1))

    @property
    def rank(self) -> int:
        return len({y for y in self.images if y})

    @property
    def is_total(self) -> bool:
        return all(self.images)

    @property
    def is_injective(self) -> bool:
        img = [y for y in self.images if y]
        return len(img) == len(set(img))

    def inverse(self) -> "PartialMap":
        if not self.is_injective:
            raise PartitionError("only partial bijections have inverses")
        inv = [0] * self.n
        for x, y in enumerate(self.images, start=1):
            if y:
                inv[y - 1] = x
        return PartialMap(inv)

    def to_partition(self, partial: bool = False) -> Partition:
        """The diagram of a full map (or of a partial bijection, with ``partial``)."""
        if not partial and not self.is_total:
            raise PartitionError("only full transformations embed in P_n this way")
        if partial and not self.is_injective:
            raise PartitionError("only partial bijections embed with partial=True")
        blocks: dict[int, list[int]] = {y: [-y] for y in range(1, self.n + 1)}
        singles = []
        for x, y in enumerate(self.images, start=1):
            if y:
                blocks[y].append(x)
            else:
                singles.append([x])
        return Partition(self.n, list(blocks.values()) + singles)

    @classmethod
    def from_partition(cls, a: Partition) -> "PartialMap":
        """Inverse of :meth:`to_partition` on T_n and I_n diagrams."""
        images = [0] * a.n
        for block in a.blocks:
            lo = [-v for v in block if v < 0]
            if len(lo) > 1:
                raise PartitionError("block has several lower vertices; not a map")
            if lo:
                for v in block:
                    if v > 0:
                        images[v - 1] = lo[0]
        return cls(images)

    def to_json(self) -> dict:
        return {"n": self.n, "images": list(self.images)}


def parse_family(text: str) -> tuple[str, int]:
    """Parse ``<family>:<n>``."""
    fam, _, n = text.partition(":")
    if fam not in FAMILIES:
        raise PartitionError(f"unknown family {fam!r}")
    return fam, int(n)

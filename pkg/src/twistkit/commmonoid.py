"""Additive commutative monoids used as the first coordinate of a twisted product.

Elements are plain Python values: ints for ℕ, ℤ and ℤ/k; ``0`` and ``INF``
for {0, ∞}; string labels for table monoids; canonical set partitions
(tuples of sorted tuples) for Eq(n) under join.
"""

from __future__ import annotations

import json
import math
from itertools import product
from typing import Any, Iterable

import numpy as np

from .semigroup import FiniteSemigroup

INF = math.inf


class MonoidError(ValueError):
    pass


class CommMonoid:
    kind = "abstract"
    finite = True
    zero: Any = 0

    def add(self, i, j):
        raise NotImplementedError

    def contains(self, x) -> bool:
        raise NotImplementedError

    def elements(self) -> list:
        raise MonoidError(f"{self} is infinite and cannot be enumerated")

    def parse(self, text: str):
        return int(text)

    def format(self, x) -> str:
        return str(x)

    # derived operations -------------------------------------------------

    def check(self, *xs):
        for x in xs:
            if not self.contains(x):
                raise MonoidError(f"{x!r} is not an element of {self}")

    def scalar(self, k: int, q):
        """k-fold sum q + ... + q (zero for k = 0)."""
        if k < 0:
            raise MonoidError("scalar multiple needs k >= 0")
        out, base = self.zero, q
        while k:
            if k & 1:
                out = self.add(out, base)
            base = self.add(base, base)
            k >>= 1
        return out

    def leq_j(self, i, j) -> bool:
        """i ≤_J j, i.e. i ∈ j + M."""
        return any(self.add(j, k) == i for k in self.elements())

    def is_unit(self, x) -> bool:
        return self.leq_j(self.zero, x)

    def idempotents(self) -> list:
        return [x for x in self.elements() if self.add(x, x) == x]

    def h_class(self, i) -> tuple[list, bool]:
        """The H-class of i (mutual divisibility) and whether it is a group."""
        cls = [j for j in self.elements() if self.leq_j(i, j) and self.leq_j(j, i)]
        return cls, any(self.add(x, x) == x for x in cls)

    def semigroup(self) -> FiniteSemigroup:
        els = self.elements()
        index = {x: k for k, x in enumerate(els)}
        table = np.array([[index[self.add(x, y)] for y in els] for x in els], dtype=np.int64)
        return FiniteSemigroup.from_table(els, table, name=str(self))

    def __repr__(self):
        return f"{type(self).__name__}()"


class Nat(CommMonoid):
    kind = "nat"
    finite = False

    def add(self, i, j):
        return i + j

    def contains(self, x):
        return isinstance(x, int) and not isinstance(x, bool) and x >= 0

    def leq_j(self, i, j):
        return i >= j

    def h_class(self, i):
        return [i], i == 0

    def __str__(self):
        return "N"


class Int(CommMonoid):
    kind = "int"
    finite = False

    def add(self, i, j):
        return i + j

    def contains(self, x):
        return isinstance(x, int) and not isinstance(x, bool)

    def leq_j(self, i, j):
        return True

    def is_unit(self, x):
        return True

    def negate(self, x):
        return -x

    def h_class(self, i):
        # Z is one group class; None stands for "all of Z"
        return None, True

    def __str__(self):
        return "Z"


class ZmodK(CommMonoid):
    kind = "zmod"

    def __init__(self, k: int):
        if k < 1:
            raise MonoidError("Z/k needs k >= 1")
        self.k = k

    def add(self, i, j):
        return (i + j) % self.k

    def contains(self, x):
        return isinstance(x, (int, np.integer)) and 0 <= x < self.k

    def elements(self):
        return list(range(self.k))

    def leq_j(self, i, j):
        return True

    def is_unit(self, x):
        return True

    def negate(self, x):
        return (-x) % self.k

    def h_class(self, i):
        return self.elements(), True

    def __str__(self):
        return f"Z/{self.k}"

    def __repr__(self):
        return f"ZmodK({self.k})"


class ZeroInfinity(CommMonoid):
    """The two-element monoid {0, ∞} with ∞ absorbing."""

    kind = "zeroinf"

    def add(self, i, j):
        return INF if INF in (i, j) else 0

    def contains(self, x):
        return x == 0 or x == INF

    def elements(self):
        return [0, INF]

    def leq_j(self, i, j):
        return not (i == 0 and j == INF)

    def parse(self, text):
        t = text.strip().lower()
        if t in ("inf", "∞", "infinity"):
            return INF
        if t == "0":
            return 0
        raise MonoidError(f"{text!r} is not an element of {{0, inf}}")

    def format(self, x):
        return "inf" if x == INF else "0"

    def h_class(self, i):
        return [i], True

    def __str__(self):
        return "{0,inf}"


class TableMonoid(CommMonoid):
    """A finite commutative monoid given by labels and an addition table."""

    kind = "table"

    def __init__(self, labels: Iterable[str], zero: str, add_table):
        self.labels = list(labels)
        self._index = {x: k for k, x in enumerate(self.labels)}
        if len(self._index) != len(self.labels):
            raise MonoidError("duplicate labels")
        if zero not in self._index:
            raise MonoidError(f"zero {zero!r} is not a label")
        self.zero = zero
        self._add = {}
        if len(add_table) != len(self.labels) or any(len(r) != len(self.labels) for r in add_table):
            raise MonoidError("addition table has the wrong shape")
        for x, row in zip(self.labels, add_table):
            for y, z in zip(self.labels, row):
                if z not in self._index:
                    raise MonoidError(f"{x} + {y} = {z!r} is not a label")
                self._add[x, y] = z
        self._validate()

    def _validate(self):
        L = self.labels
        for x, y in product(L, L):
            if self._add[x, y] != self._add[y, x]:
                raise MonoidError(f"not commutative: {x} + {y} != {y} + {x}")
        for x in L:
            if self._add[x, self.zero] != x:
                raise MonoidError(f"{self.zero} is not neutral for {x}")
        for x, y, z in product(L, L, L):
            if self._add[self._add[x, y], z] != self._add[x, self._add[y, z]]:
                raise MonoidError(f"not associative at ({x}, {y}, {z})")

    @classmethod
    def from_json(cls, data: dict | str) -> "TableMonoid":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(data["elements"], data["zero"], data["add"])

    def to_json(self) -> dict:
        return {"elements": self.labels, "zero": self.zero,
                "add": [[self._add[x, y] for y in self.labels] for x in self.labels]}

    def add(self, i, j):
        return self._add[i, j]

    def contains(self, x):
        return x in self._index

    def elements(self):
        return list(self.labels)

    def parse(self, text):
        if text not in self._index:
            raise MonoidError(f"{text!r} is not a label")
        return text

    def __str__(self):
        return f"Table({','.join(self.labels)})"


# --------------------------------------------------------------------------
# Eq(n) under join


def canonical_eq(blocks: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted(tuple(sorted(b)) for b in blocks if b))


def eq_join(eps, eta):
    parent: dict[int, int] = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for rel in (eps, eta):
        for block in rel:
            root = find(block[0])
            for x in block[1:]:
                r = find(x)
                if r != root:
                    parent[r] = root
    groups: dict[int, list[int]] = {}
    for x in parent:
        groups.setdefault(find(x), []).append(x)
    return canonical_eq(groups.values())


def eq_norm(eps) -> int:
    """Number of classes of an equivalence."""
    return len(eps)


def set_partitions(items: list) -> list[list[list]]:
    """All set partitions of ``items``, via restricted growth strings."""
    out = []
    n = len(items)
    if n == 0:
        return [[]]
    rgs = [0] * n

    def rec(pos, top):
        if pos == n:
            blocks: list[list] = [[] for _ in range(top + 1)]
            for x, b in zip(items, rgs):
                blocks[b].append(x)
            out.append(blocks)
            return
        for b in range(top + 2):
            rgs[pos] = b
            rec(pos + 1, max(top, b))

    rgs[0] = 0
    rec(1, 0)
    return out


class EqJoin(CommMonoid):
    """Equivalence relations on {1..n} under join; zero is the equality relation."""

    kind = "eq"

    def __init__(self, n: int):
        if n < 1:
            raise MonoidError("Eq(n) needs n >= 1")
        self.n = n
        self.zero = tuple((x,) for x in range(1, n + 1))
        self._elements = None

    def add(self, i, j):
        return eq_join(i, j)

    def contains(self, x):
        try:
            flat = sorted(v for b in x for v in b)
        except TypeError:
            return False
        return flat == list(range(1, self.n + 1)) and x == canonical_eq(x)

    def elements(self):
        if self._elements is None:
            self._elements = [canonical_eq(p) for p in set_partitions(list(range(1, self.n + 1)))]
        return list(self._elements)

    def leq_j(self, i, j):
        # i ∈ j ∨ Eq(n)  iff  j ⊆ i
        return eq_join(i, j) == i

    def norm(self, x) -> int:
        return eq_norm(x)

    def parse(self, text):
        blocks = [[int(c) for c in part] for part in text.split("|")]
        x = canonical_eq(blocks)
        self.check(x)
        return x

    def format(self, x):
        return "|".join("".join(map(str, b)) for b in x)

    def __str__(self):
        return f"Eq({self.n})"

    def __repr__(self):
        return f"EqJoin({self.n})"


def parse_monoid(text: str) -> CommMonoid:
    """Parse an M-kind token: nat, int, zmod:k, zeroinf, eq:n, table:<json file>."""
    kind, _, param = text.partition(":")
    kind = kind.strip().lower()
    if kind == "nat":
        return Nat()
    if kind == "int":
        return Int()
    if kind == "zeroinf":
        return ZeroInfinity()
    if kind == "zmod":
        return ZmodK(int(param))
    if kind == "eq":
        return EqJoin(int(param))
    if kind == "table":
        with open(param) as fh:
            return TableMonoid.from_json(json.load(fh))
    raise MonoidError(f"unknown monoid kind {text!r}")

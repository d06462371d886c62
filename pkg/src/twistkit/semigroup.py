"""Finite semigroup engine.

Elements are materialized into a dense multiplication table; everything else
(Green's relations, egg-box data, idempotents, Schützenberger groups,
biordered sets, stability, idempotent-generated closures) is computed from
that table and never looks at what the elements actually are.
"""

from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

ASSOC_CHECK_BOUND = 512
ASSOC_SAMPLE_TRIPLES = 100_000
ASSOC_SAMPLE_SEED = 20250101
MAX_GREEN_SIZE = 5000


class SemigroupError(ValueError):
    """Raised when a candidate structure is not a (finite) semigroup."""


class ResourceBoundError(RuntimeError):
    """Raised when a computation would exceed a configured size bound."""


class FiniteSemigroup:
    """A materialized finite semigroup.

    ``elements`` is an ordered list of hashable handles and ``table[i, j]`` is
    the index of ``elements[i] * elements[j]``.  Build one with
    :func:`build_semigroup` (from a multiplication callable) or
    :meth:`from_table` (from a precomputed index table).
    """

    def __init__(self, elements: Sequence[Hashable], table: np.ndarray, identity: int | None = None,
                 name: str = ""):
        self.elements = list(elements)
        self.table = np.asarray(table, dtype=np.int64)
        self.index = {x: i for i, x in enumerate(self.elements)}
        self.identity = identity
        self.name = name
        n = len(self.elements)
        if len(self.index) != n:
            raise SemigroupError("duplicate elements")
        if self.table.shape != (n, n):
            raise SemigroupError(f"table shape {self.table.shape} does not match {n} elements")
        if n and (self.table.min() < 0 or self.table.max() >= n):
            raise SemigroupError("not closed: table refers outside the element list")

    @classmethod
    def from_table(cls, elements, table, check_assoc=True, name=""):
        S = cls(elements, table, identity=None, name=name)
        if check_assoc:
            witness = associativity_witness(S.table)
            if witness is not None:
                raise SemigroupError(f"associativity fails at index triple {witness}")
        S.identity = find_identity(S.table)
        return S

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<FiniteSemigroup{label} of order {len(self)}>"

    def mul(self, i: int, j: int) -> int:
        return int(self.table[i, j])

    def mul_elements(self, x, y):
        return self.elements[self.table[self.index[x], self.index[y]]]

    def idempotent_indices(self) -> np.ndarray:
        idx = np.arange(len(self))
        return idx[self.table[idx, idx] == idx]

    def units(self) -> list[int]:
        """Indices of the group of units (empty if there is no identity)."""
        if self.identity is None:
            return []
        one = self.identity
        has_right = (self.table == one).any(axis=1)
        has_left = (self.table == one).any(axis=0)
        return [int(i) for i in np.flatnonzero(has_right & has_left)]

    def singular(self) -> list[int]:
        units = set(self.units())
        return [i for i in range(len(self)) if i not in units]


def find_identity(table: np.ndarray) -> int | None:
    n = table.shape[0]
    idx = np.arange(n)
    for e in range(n):
        if (table[e] == idx).all() and (table[:, e] == idx).all():
            return e
    return None


def associativity_witness(table: np.ndarray, bound: int = ASSOC_CHECK_BOUND,
                          seed: int = ASSOC_SAMPLE_SEED) -> tuple[int, int, int] | None:
    """Least (a, b, c) with (ab)c != a(bc), or None.

    Exhaustive up to ``bound`` elements; above that, a fixed-seed sample of
    random triples is checked instead.
    """
    n = table.shape[0]
    if n <= bound:
        for a in range(n):
            left = table[table[a]]            # (ab)c indexed [b, c]
            right = table[a][table]           # a(bc) indexed [b, c]
            bad = np.argwhere(left != right)
            if len(bad):
                b, c = bad[0]
                return a, int(b), int(c)
        return None
    rng = np.random.default_rng(seed)
    a, b, c = rng.integers(0, n, size=(3, ASSOC_SAMPLE_TRIPLES))
    bad = np.flatnonzero(table[table[a, b], c] != table[a, table[b, c]])
    if len(bad):
        k = bad[0]
        return int(a[k]), int(b[k]), int(c[k])
    return None


def build_semigroup(elements: Iterable[Hashable], mul: Callable[[Any, Any], Any],
                    check_assoc: bool = True, name: str = "") -> FiniteSemigroup:
    """Materialize ``elements`` under ``mul`` into a :class:`FiniteSemigroup`.

    Raises :class:`SemigroupError` on duplicates, on a product that escapes
    the element set, or on an associativity failure (with the witness triple).
    """
    elements = list(elements)
    if not elements:
        raise SemigroupError("a semigroup needs at least one element")
    index = {}
    for i, x in enumerate(elements):
        if x in index:
            raise SemigroupError(f"duplicate element {x!r}")
        index[x] = i
    n = len(elements)
    table = np.empty((n, n), dtype=np.int64)
    for i, x in enumerate(elements):
        for j, y in enumerate(elements):
            z = mul(x, y)
            try:
                table[i, j] = index[z]
            except KeyError:
                raise SemigroupError(f"not closed: {x!r} * {y!r} = {z!r}") from None
    S = FiniteSemigroup(elements, table, name=name)
    if check_assoc:
        witness = associativity_witness(table)
        if witness is not None:
            a, b, c = (elements[k] for k in witness)
            raise SemigroupError(f"associativity fails at ({a!r}, {b!r}, {c!r})")
    S.identity = find_identity(table)
    return S


# --------------------------------------------------------------------------
# Green's relations


def _relabel(keys: Sequence[Hashable]) -> np.ndarray:
    """Dense class ids, numbered in order of first appearance."""
    ids: dict[Hashable, int] = {}
    out = np.empty(len(keys), dtype=np.int64)
    for i, k in enumerate(keys):
        out[i] = ids.setdefault(k, len(ids))
    return out


def _strong_components(table: np.ndarray, side: str) -> np.ndarray:
    n = table.shape[0]
    src = np.repeat(np.arange(n), n)
    dst = table.reshape(-1) if side == "right" else table.T.reshape(-1)
    graph = coo_matrix((np.ones(n * n, dtype=np.int8), (src, dst)), shape=(n, n)).tocsr()
    _, labels = connected_components(graph, directed=True, connection="strong")
    return _relabel(labels.tolist())


def _cover_edges(leq: np.ndarray) -> list[tuple[int, int]]:
    k = leq.shape[0]
    strict = leq & ~np.eye(k, dtype=bool)
    s = strict.astype(np.float32)
    two_step = (s @ s) > 0
    cover = strict & ~two_step
    return [(int(a), int(b)) for a, b in np.argwhere(cover)]


@dataclass
class GreenStructure:
    """Green's classes of a finite semigroup, with orders and idempotent data.

    Class maps are arrays indexed by element index; class ids are numbered by
    least member.  ``*_leq`` are the induced partial orders on class ids
    (``x_leq[c, d]`` means class ``c`` lies below class ``d``).  ``j_cover``
    lists the Hasse edges ``(lower, upper)`` of the J-order.
    """

    r_class: np.ndarray
    l_class: np.ndarray
    j_class: np.ndarray
    h_class: np.ndarray
    d_class: np.ndarray
    r_leq: np.ndarray
    l_leq: np.ndarray
    j_leq: np.ndarray
    j_cover: list[tuple[int, int]]
    group_h: frozenset[int]
    idempotents: frozenset[int]
    regular: frozenset[int]
    h_members: dict[int, list[int]] = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return len(self.r_class)

    def num(self, kind: str) -> int:
        return int(getattr(self, f"{kind}_class").max()) + 1 if self.size else 0

    def members(self, kind: str, cid: int) -> list[int]:
        arr = getattr(self, f"{kind}_class")
        return [int(i) for i in np.flatnonzero(arr == cid)]

    def leq_r(self, a: int, b: int) -> bool:
        return bool(self.r_leq[self.r_class[a], self.r_class[b]])

    def leq_l(self, a: int, b: int) -> bool:
        return bool(self.l_leq[self.l_class[a], self.l_class[b]])

    def leq_j(self, a: int, b: int) -> bool:
        return bool(self.j_leq[self.j_class[a], self.j_class[b]])

    def element_leq(self, kind: str) -> np.ndarray:
        """Element-level pre-order matrix for ``kind`` in {"r", "l", "j"}."""
        cls = getattr(self, f"{kind}_class")
        return getattr(self, f"{kind}_leq")[np.ix_(cls, cls)]

    def regular_dclasses(self) -> set[int]:
        return {int(self.d_class[e]) for e in self.idempotents}


def green_structure(S: FiniteSemigroup, max_size: int = MAX_GREEN_SIZE) -> GreenStructure:
    n = len(S)
    if n > max_size:
        raise ResourceBoundError(f"|S| = {n} exceeds the Green's computation bound {max_size}")
    T = S.table
    idx = np.arange(n)

    r_class = _strong_components(T, "right")
    l_class = _strong_components(T, "left")

    # with every element a generator, aS^1 is one row of the table plus a itself
    r_el = np.zeros((n, n), dtype=bool)
    r_el[T, idx[:, None]] = True           # T[b, s] <=_R b
    r_el[idx, idx] = True
    l_el = np.zeros((n, n), dtype=bool)
    l_el[T.T, idx[:, None]] = True         # T[s, b] <=_L b
    l_el[idx, idx] = True
    # a <=_J b  iff  a <=_R c <=_L b for some c
    j_el = (r_el.astype(np.float32) @ l_el.astype(np.float32)) > 0

    j_mutual = j_el & j_el.T
    j_class = _relabel([int(np.argmax(j_mutual[a])) for a in range(n)])
    h_class = _relabel(list(zip(r_class.tolist(), l_class.tolist())))

    # D = L v R, computed independently of J
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for cls in (r_class, l_class):
        first: dict[int, int] = {}
        for a, c in enumerate(cls.tolist()):
            if c in first:
                ra, rb = find(a), find(first[c])
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
            else:
                first[c] = a
    d_class = _relabel([find(a) for a in range(n)])

    def class_order(cls, el):
        reps = [int(np.flatnonzero(cls == c)[0]) for c in range(int(cls.max()) + 1)]
        return el[np.ix_(reps, reps)]

    r_leq = class_order(r_class, r_el)
    l_leq = class_order(l_class, l_el)
    j_leq = class_order(j_class, j_el)

    idem = [int(e) for e in idx[T[idx, idx] == idx]]
    group_h = frozenset(int(h_class[e]) for e in idem)
    reg_d = {int(d_class[e]) for e in idem}
    regular = frozenset(a for a in range(n) if int(d_class[a]) in reg_d)
    h_members: dict[int, list[int]] = {}
    for a, h in enumerate(h_class.tolist()):
        h_members.setdefault(h, []).append(a)

    return GreenStructure(
        r_class=r_class, l_class=l_class, j_class=j_class, h_class=h_class, d_class=d_class,
        r_leq=r_leq, l_leq=l_leq, j_leq=j_leq, j_cover=_cover_edges(j_leq),
        group_h=group_h, idempotents=frozenset(idem), regular=regular, h_members=h_members,
    )


# --------------------------------------------------------------------------
# groups attached to H-classes


@dataclass(frozen=True)
class GroupSummary:
    order: int
    element_orders: tuple[int, ...]   # sorted multiset
    is_abelian: bool

    @classmethod
    def from_permutations(cls, perms: Iterable[tuple[int, ...]]) -> "GroupSummary":
        perms = sorted(set(perms))
        orders = sorted(_perm_order(p) for p in perms)
        abelian = all(_compose(p, q) == _compose(q, p) for i, p in enumerate(perms) for q in perms[i + 1:])
        return cls(len(perms), tuple(orders), abelian)

    def direct_product(self, other: "GroupSummary") -> "GroupSummary":
        orders = sorted(math.lcm(a, b) for a in self.element_orders for b in other.element_orders)
        return GroupSummary(self.order * other.order, tuple(orders), self.is_abelian and other.is_abelian)

    @property
    def order_multiset(self) -> Counter:
        return Counter(self.element_orders)


def _compose(p, q):
    return tuple(q[x] for x in p)


def _perm_order(p) -> int:
    seen = [False] * len(p)
    order = 1
    for start in range(len(p)):
        if seen[start]:
            continue
        length, x = 0, start
        while not seen[x]:
            seen[x] = True
            x = p[x]
            length += 1
        order = math.lcm(order, length)
    return order


def schutz_group(S: FiniteSemigroup, G: GreenStructure, h: int) -> GroupSummary:
    """Summary of the Schützenberger group of the H-class ``h``.

    Collects the right translations ``x -> xu`` of H by every u in S^1 with
    Hu = H; these form a simply transitive permutation group on H.
    """
    H = G.h_members[h]
    pos = {a: k for k, a in enumerate(H)}
    first = H[0]
    perms = {tuple(range(len(H)))}          # u = 1 from S^1
    for u in range(len(S)):
        if S.table[first, u] not in pos:
            continue
        perms.add(tuple(pos[int(S.table[a, u])] for a in H))
    summary = GroupSummary.from_permutations(perms)
    if summary.order != len(H):
        raise AssertionError(f"Schützenberger group of H-class {h} has order {summary.order} != |H| = {len(H)}")
    return summary


def group_summary_from_table(table: np.ndarray, members: Sequence[int]) -> GroupSummary:
    """Summary of a subgroup given by ``members`` via its regular representation."""
    pos = {a: k for k, a in enumerate(members)}
    perms = [tuple(pos[int(table[a, g])] for a in members) for g in members]
    return GroupSummary.from_permutations(perms)


# --------------------------------------------------------------------------
# biordered sets


@dataclass
class BiorderTable:
    idempotents: list[int]
    left_arrow: np.ndarray     # [x, y]: e_x = e_x e_y
    right_arrow: np.ndarray    # [x, y]: e_x = e_y e_x
    basic_products: dict[tuple[int, int], int]

    def is_basic(self, x: int, y: int) -> bool:
        return bool(self.left_arrow[x, y] or self.right_arrow[x, y]
                    or self.left_arrow[y, x] or self.right_arrow[y, x])


def biordered_set(S: FiniteSemigroup, G: GreenStructure | None = None) -> BiorderTable:
    """Idempotents with the two arrow pre-orders and the basic partial product.

    Arrays are indexed by position in ``idempotents`` (sorted element indices);
    ``basic_products`` maps element-index pairs to element indices.
    """
    E = sorted(G.idempotents) if G is not None else [int(e) for e in S.idempotent_indices()]
    T = S.table
    Ea = np.array(E, dtype=np.int64)
    prod = T[np.ix_(Ea, Ea)]
    left = prod == Ea[:, None]                # e = ef
    right = prod.T == Ea[:, None]             # e = fe
    basic = left | right | left.T | right.T
    products = {(E[x], E[y]): int(prod[x, y]) for x, y in np.argwhere(basic)}
    return BiorderTable(E, left, right, products)


# --------------------------------------------------------------------------
# stability and idempotent-generated closure


def is_stable(S: FiniteSemigroup, G: GreenStructure) -> tuple[bool, tuple[int, int] | None]:
    """Check ``a J ab <=> a R ab`` and ``a J ba <=> a L ba`` for all pairs.

    Returns ``(True, None)`` or ``(False, (a, b))`` with the least failing pair.
    """
    T = S.table
    n = len(S)
    a = np.repeat(np.arange(n), n).reshape(n, n)
    ab = T
    ba = T.T
    j_ab = G.j_class[a] == G.j_class[ab]
    r_ab = G.r_class[a] == G.r_class[ab]
    j_ba = G.j_class[a] == G.j_class[ba]
    l_ba = G.l_class[a] == G.l_class[ba]
    bad = (j_ab != r_ab) | (j_ba != l_ba)
    hits = np.argwhere(bad)
    if len(hits):
        x, y = hits[0]
        return False, (int(x), int(y))
    return True, None


def closure(table: np.ndarray, generators: Iterable[int]) -> set[int]:
    """Subsemigroup generated by ``generators`` (breadth-first, right multiplication)."""
    gens = sorted(set(int(g) for g in generators))
    seen = set(gens)
    queue = deque(gens)
    while queue:
        x = queue.popleft()
        for g in gens:
            y = int(table[x, g])
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def idempotent_closure(S: FiniteSemigroup) -> set[int]:
    """The idempotent-generated submonoid (identity included when present)."""
    gens = [int(e) for e in S.idempotent_indices()]
    out = closure(S.table, gens)
    if S.identity is not None:
        out.add(S.identity)
    return out

"""Square matrices over a prime field F_p, as a multiplicative monoid."""

from __future__ import annotations

import json
from itertools import product

import numpy as np

from .semigroup import ResourceBoundError

MATRIX_ENUM_BOUND = 10**6


class MatrixError(ValueError):
    pass


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    k = 2
    while k * k <= p:
        if p % k == 0:
            return False
        k += 1
    return True


class Matrix:
    """An immutable n×n matrix with entries reduced mod the prime p."""

    __slots__ = ("n", "p", "entries", "_hash")

    def __init__(self, entries, p: int):
        arr = np.asarray(entries, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise MatrixError(f"need a non-empty square matrix, got shape {arr.shape}")
        if not _is_prime(p):
            raise MatrixError(f"{p} is not prime")
        self.n = arr.shape[0]
        self.p = p
        self.entries = tuple(tuple(int(x) % p for x in row) for row in arr)
        self._hash = hash((p, self.entries))

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.p == other.p and self.entries == other.entries

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Matrix({[list(r) for r in self.entries]}, p={self.p})"

    def __str__(self):
        return "[" + ";".join(" ".join(map(str, r)) for r in self.entries) + "]"

    def __mul__(self, other):
        return mat_mul(self, other)

    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64)

    @classmethod
    def identity(cls, n, p):
        return cls(np.eye(n, dtype=np.int64), p)

    def transpose(self) -> "Matrix":
        return Matrix(self.array().T, self.p)

    @property
    def rank(self) -> int:
        return mat_rank(self)

    def to_json(self) -> dict:
        return {"n": self.n, "p": self.p, "entries": [list(r) for r in self.entries]}

    @classmethod
    def from_json(cls, data: dict | str) -> "Matrix":
        if isinstance(data, str):
            data = json.loads(data)
        m = cls(data["entries"], int(data["p"]))
        if m.n != int(data["n"]):
            raise MatrixError(f"declared n={data['n']} but entries are {m.n}x{m.n}")
        return m


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if a.n != b.n or a.p != b.p:
        raise MatrixError(f"cannot multiply {a.n}x{a.n}/F_{a.p} by {b.n}x{b.n}/F_{b.p}")
    return Matrix((a.array() @ b.array()) % a.p, a.p)


def mat_rank(a: Matrix) -> int:
    """Rank over F_p by Gaussian elimination, pivoting on the first nonzero entry."""
    m = [list(r) for r in a.entries]
    p, n = a.p, a.n
    rank = 0
    for col in range(n):
        pivot = next((r for r in range(rank, n) if m[r][col]), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = pow(m[rank][col], -1, p)
        m[rank] = [x * inv % p for x in m[rank]]
        for r in range(n):
            if r != rank and m[r][col]:
                f = m[r][col]
                m[r] = [(x - f * y) % p for x, y in zip(m[r], m[rank])]
        rank += 1
    return rank


def transpose(a: Matrix) -> Matrix:
    return a.transpose()


def enumerate_matrices(n: int, p: int, bound: int = MATRIX_ENUM_BOUND) -> list[Matrix]:
    """All n×n matrices over F_p, in lexicographic order of the flattened entries."""
    if not _is_prime(p):
        raise MatrixError(f"{p} is not prime")
    if n < 1:
        raise MatrixError("dimension must be at least 1")
    if p ** (n * n) > bound:
        raise ResourceBoundError(f"M_{n}(F_{p}) has {p ** (n * n)} elements, above the bound {bound}")
    return [Matrix(np.array(flat).reshape(n, n), p) for flat in product(range(p), repeat=n * n)]

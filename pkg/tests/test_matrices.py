import json

import pytest

from twistkit.matrices import Matrix, MatrixError, enumerate_matrices, mat_mul, mat_rank, transpose
from twistkit.semigroup import ResourceBoundError
from twistkit.twistings import matrix_base

import oracle


def test_products():
    a = Matrix([[1, 1], [0, 0]], 2)
    assert mat_mul(Matrix.identity(2, 2), a) == a
    assert mat_mul(a, Matrix([[1, 0], [1, 0]], 2)) == Matrix([[0, 0], [0, 0]], 2)
    jordan = Matrix([[0, 1, 0], [0, 0, 1], [0, 0, 0]], 5)
    assert jordan * jordan * jordan == Matrix([[0] * 3] * 3, 5)


def test_ranks():
    assert mat_rank(Matrix.identity(4, 3)) == 4
    assert mat_rank(Matrix([[0, 0], [0, 0]], 7)) == 0
    assert mat_rank(Matrix([[1, 1], [1, 1]], 2)) == 1


def test_errors():
    with pytest.raises(MatrixError, match="prime"):
        Matrix([[1]], 4)
    with pytest.raises(MatrixError):
        mat_mul(Matrix.identity(2, 2), Matrix.identity(2, 3))
    with pytest.raises(ResourceBoundError):
        enumerate_matrices(3, 5)


@pytest.mark.parametrize("n,p,size", [(2, 2, 16), (3, 2, 512), (2, 5, 625), (2, 3, 81)])
def test_enumeration(n, p, size):
    mats = enumerate_matrices(n, p)
    assert len(mats) == size == len(set(mats))


@pytest.mark.parametrize("n,p", [(2, 2), (2, 3), (3, 2), (2, 5)])
def test_rank_against_oracle_and_transpose(n, p):
    for m in enumerate_matrices(n, p):
        assert m.rank == oracle.matrix_rank_brute([list(r) for r in m.entries], p)
        assert transpose(m).rank == m.rank


@pytest.mark.parametrize("n,p", [(2, 2), (2, 3), (3, 2)])
def test_sylvester_all_pairs(n, p):
    base = matrix_base(n, p)
    r = base.rank
    assert (r[:, None] + r[None, :] <= r[base.S.table] + n).all()


def test_batched_table_matches_direct_products():
    base = matrix_base(2, 3)
    els = base.S.elements
    for i in range(0, len(els), 5):
        for j in range(len(els)):
            assert els[base.S.table[i, j]] == els[i] * els[j]
    assert all(els[base.star[i]] == els[i].transpose() for i in range(len(els)))


def test_json():
    m = Matrix([[1, 0], [1, 1]], 2)
    assert m.to_json() == {"n": 2, "p": 2, "entries": [[1, 0], [1, 1]]}
    assert Matrix.from_json(json.dumps(m.to_json())) == m

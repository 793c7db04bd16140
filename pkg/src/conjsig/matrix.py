"""Exact integer matrices for the platform action, backed by FLINT."""
from functools import lru_cache

from flint import fmpz_mat

IntMatrix = tuple[tuple[int, ...], ...]
IntVector = tuple[int, ...]


def to_matrix(rows: list[list[int]] | IntMatrix) -> IntMatrix:
    return tuple(tuple(int(e) for e in row) for row in rows)


def as_flint(a: IntMatrix) -> fmpz_mat:
    return fmpz_mat(len(a), len(a[0]), [e for row in a for e in row])


def mat_vec(m: fmpz_mat, v: IntVector) -> IntVector:
    column = m * fmpz_mat(len(v), 1, list(v))
    return tuple(int(e) for e in column.entries())


def max_entry(m: fmpz_mat) -> int:
    return max(abs(int(e)) for e in m.entries())


def determinant(a: IntMatrix) -> int:
    return int(as_flint(a).det())


@lru_cache(maxsize=64)
def matrix_inverse(a: IntMatrix) -> fmpz_mat:
    inv = as_flint(a).inv()
    # only called for unimodular matrices, so every entry is integral
    return fmpz_mat(inv.nrows(), inv.ncols(), [int(e.p) for e in inv.entries()])


@lru_cache(maxsize=4096)
def matrix_power(a: IntMatrix, k: int) -> fmpz_mat:
    """A^k for either sign of k. Results are shared and must not be mutated."""
    if k < 0:
        return matrix_inverse(a) ** -k
    return as_flint(a) ** k

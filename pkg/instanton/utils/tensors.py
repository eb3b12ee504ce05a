# instanton/utils/tensors.py

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb
from typing import Dict, List, Tuple

import numpy as np

from instanton.core.exceptions import NotInSummand, ParameterError, ShapeMismatch
from instanton.core.field import PrimeField

V_DIM = 4
WEDGE_PAIRS: List[Tuple[int, int]] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
WEDGE_DIM = len(WEDGE_PAIRS)
SYM_V_DIM = 10


@dataclass(frozen=True)
class SpaceDims:
    """Dimensions attached to a charge N (dim V = 4)"""
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ParameterError(f"charge must be at least 1, got {self.N}")

    @property
    def big_dim(self) -> int:
        return V_DIM * self.N

    @property
    def dim_S(self) -> int:
        return 3 * self.N * (self.N + 1)

    @property
    def coeff_count(self) -> int:
        return self.N * (self.N + 1) // 2 * WEDGE_DIM


def sym_pairs(N: int) -> List[Tuple[int, int]]:
    return [(i, j) for i in range(N) for j in range(i, N)]


@lru_cache(maxsize=None)
def _coefficient_indices(N: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    pairs = sym_pairs(N)
    I = np.repeat([i for i, _ in pairs], WEDGE_DIM)
    J = np.repeat([j for _, j in pairs], WEDGE_DIM)
    A = np.tile([a for a, _ in WEDGE_PAIRS], len(pairs))
    B = np.tile([b for _, b in WEDGE_PAIRS], len(pairs))
    return I, J, A, B


@dataclass(frozen=True)
class HyperwebCoeffs:
    """Coefficients T_{ij,ab}, i <= j and a < b, in canonical (i, j, a, b) order"""
    N: int
    values: np.ndarray

    def __post_init__(self):
        expected = (self.N * (self.N + 1) // 2, WEDGE_DIM)
        if self.values.shape != expected:
            raise ShapeMismatch(f"coefficient table {self.values.shape} for charge {self.N}, expected {expected}")

    def entries(self) -> List[Tuple[int, int, int, int, int]]:
        """Nonzero (i, j, a, b, value) in canonical order"""
        result = []
        for row, (i, j) in enumerate(sym_pairs(self.N)):
            for k, (a, b) in enumerate(WEDGE_PAIRS):
                value = int(self.values[row, k])
                if value:
                    result.append((i, j, a, b, value))
        return result

    @classmethod
    def zero(cls, N: int) -> "HyperwebCoeffs":
        return cls(N, np.zeros((N * (N + 1) // 2, WEDGE_DIM), dtype=np.int64))

    @classmethod
    def unit(cls, N: int, index: int) -> "HyperwebCoeffs":
        values = np.zeros(N * (N + 1) // 2 * WEDGE_DIM, dtype=np.int64)
        values[index] = 1
        return cls(N, values.reshape(-1, WEDGE_DIM))


def is_skew(field: PrimeField, T: np.ndarray) -> bool:
    return T.ndim == 2 and T.shape[0] == T.shape[1] and not ((T + T.T) % field.p).any()


def project_canonical(field: PrimeField, T: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Split a skew 4N x 4N tensor into its S^2H (x) L^2V and L^2H (x) S^2V parts"""
    T = field.reduce(T)
    if T.shape[0] % V_DIM or not is_skew(field, T):
        raise ParameterError("canonical projection needs a skew 4N x 4N tensor")
    N = T.shape[0] // V_DIM
    T4 = T.reshape(N, V_DIM, N, V_DIM)
    swapped = T4.transpose(2, 1, 0, 3)
    s_part = ((T4 + swapped) % field.p) * field.half % field.p
    s_part = s_part.reshape(T.shape)
    return s_part, (T - s_part) % field.p


def inflate(field: PrimeField, coeffs: HyperwebCoeffs) -> np.ndarray:
    N = coeffs.N
    T4 = np.zeros((N, V_DIM, N, V_DIM), dtype=np.int64)
    if N == 0:
        return T4.reshape(0, 0)
    I, J, A, B = _coefficient_indices(N)
    values = field.reduce(coeffs.values).reshape(-1)
    negated = (-values) % field.p
    T4[I, A, J, B] = values
    T4[I, B, J, A] = negated
    T4[J, A, I, B] = values
    T4[J, B, I, A] = negated
    return T4.reshape(V_DIM * N, V_DIM * N)


def deflate(field: PrimeField, T: np.ndarray) -> HyperwebCoeffs:
    _, l_part = project_canonical(field, T)
    if l_part.any():
        raise NotInSummand("tensor has a nonzero wedge^2 H (x) S^2 V component")
    N = T.shape[0] // V_DIM
    if N == 0:
        return HyperwebCoeffs.zero(0)
    I, J, A, B = _coefficient_indices(N)
    T4 = field.reduce(T).reshape(N, V_DIM, N, V_DIM)
    return HyperwebCoeffs(N, T4[I, A, J, B].reshape(-1, WEDGE_DIM))


def expand(tau: np.ndarray) -> np.ndarray:
    """tau (x) id_V"""
    return np.kron(np.asarray(tau, dtype=np.int64), np.eye(V_DIM, dtype=np.int64))


def inflate_block(field: PrimeField, grid: np.ndarray) -> np.ndarray:
    """Realize an n x m grid of L^2 V coefficient vectors as a 4n x 4m matrix"""
    n, m, _ = grid.shape
    block = np.zeros((n, V_DIM, m, V_DIM), dtype=np.int64)
    for k, (a, b) in enumerate(WEDGE_PAIRS):
        block[:, a, :, b] = grid[:, :, k]
        block[:, b, :, a] = (-grid[:, :, k]) % field.p
    return block.reshape(V_DIM * n, V_DIM * m)


def deflate_block(field: PrimeField, matrix: np.ndarray) -> np.ndarray:
    """Inverse of inflate_block; every 4 x 4 block must be skew"""
    n, m = matrix.shape[0] // V_DIM, matrix.shape[1] // V_DIM
    block = field.reduce(matrix).reshape(n, V_DIM, m, V_DIM)
    if ((block + block.transpose(0, 3, 2, 1)) % field.p).any():
        raise NotInSummand("block matrix has non-skew 4 x 4 blocks")
    grid = np.zeros((n, m, WEDGE_DIM), dtype=np.int64)
    for k, (a, b) in enumerate(WEDGE_PAIRS):
        grid[:, :, k] = block[:, a, :, b]
    return grid


# Graded pieces of k[x_0, x_1, x_2, x_3]

def sym_dim(degree: int) -> int:
    return comb(degree + 3, 3) if degree >= 0 else 0


@lru_cache(maxsize=None)
def monomials(degree: int) -> Tuple[Tuple[int, ...], ...]:
    """Monomials of a degree as sorted tuples of variable indices"""
    if degree < 0:
        return ()
    return tuple(combinations_with_replacement(range(V_DIM), degree))


@lru_cache(maxsize=None)
def monomial_index(degree: int) -> Dict[Tuple[int, ...], int]:
    return {m: k for k, m in enumerate(monomials(degree))}

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional, Tuple

import numpy as np

from instanton.core.exceptions import (
    NonInjectiveTau, ParameterError, RankMismatch, ShapeMismatch, SingularG, SingularMatrix
)
from instanton.core.field import PrimeField
from instanton.utils.tensors import (
    V_DIM, HyperwebCoeffs, deflate, deflate_block, expand, inflate, inflate_block
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Hyperweb:
    """A hyperweb of quadrics in S^2 H_N^* (x) L^2 V^*, stored by its canonical coefficients"""
    field: PrimeField
    coeffs: HyperwebCoeffs

    @property
    def N(self) -> int:
        return self.coeffs.N

    @cached_property
    def matrix(self) -> np.ndarray:
        return inflate(self.field, self.coeffs)

    @classmethod
    def from_matrix(cls, field: PrimeField, matrix: np.ndarray) -> "Hyperweb":
        return cls(field, deflate(field, matrix))

    @classmethod
    def zero(cls, field: PrimeField, N: int) -> "Hyperweb":
        return cls(field, HyperwebCoeffs.zero(N))

    @classmethod
    def random(cls, field: PrimeField, N: int, rng: np.random.Generator) -> "Hyperweb":
        return cls(field, HyperwebCoeffs(N, field.random(rng, (N * (N + 1) // 2, 6))))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hyperweb):
            return NotImplemented
        return (self.field.p == other.field.p and self.N == other.N
                and np.array_equal(self.field.reduce(self.coeffs.values), other.field.reduce(other.coeffs.values)))

    __hash__ = None


def standard_omega(field: PrimeField) -> Hyperweb:
    """Charge-1 hyperweb realized as J = [[0, I], [-I, 0]]"""
    values = np.zeros((1, 6), dtype=np.int64)
    values[0, 1] = 1  # (0, 2)
    values[0, 4] = 1  # (1, 3)
    return Hyperweb(field, HyperwebCoeffs(1, values))


def direct_sum(first: Hyperweb, second: Hyperweb) -> Hyperweb:
    field = first.field
    size = V_DIM * (first.N + second.N)
    matrix = field.zeros((size, size))
    split = V_DIM * first.N
    matrix[:split, :split] = first.matrix
    matrix[split:, split:] = second.matrix
    return Hyperweb.from_matrix(field, matrix)


def rank_and_kernel(A: Hyperweb) -> Tuple[int, np.ndarray]:
    return A.field.rank_kernel(A.matrix)


@dataclass(frozen=True)
class SymplecticQuotient:
    """W_A = (H (x) V) / ker A with coordinates on the pivot rows of A"""
    W_dim: int
    c: np.ndarray
    q: np.ndarray
    kernel_basis: np.ndarray
    pivots: List[int]


def symplectic_quotient(A: Hyperweb, r: int) -> SymplecticQuotient:
    """Quotient of H (x) V by ker A with the induced nondegenerate skew form q.

    c is the nonzero part of the reduced echelon form of A and q = A[P, P] on the pivot
    columns P, so that c^T q c = A.
    """
    if r < 0:
        raise ParameterError(f"half-rank must be nonnegative, got {r}")
    field = A.field
    required = 2 * A.N + 2 * r
    R, pivots = field.rref(A.matrix)
    if len(pivots) != required:
        raise RankMismatch(len(pivots), required)
    c = R[: len(pivots)]
    q = A.matrix[np.ix_(pivots, pivots)]
    kernel = field.kernel(A.matrix)
    logger.debug(f"Symplectic quotient of charge {A.N}: W_dim={required}, kernel dim={kernel.shape[1]}")
    return SymplecticQuotient(W_dim=required, c=c, q=q, kernel_basis=kernel, pivots=list(pivots))


def restrict(A: Hyperweb, tau: np.ndarray) -> Hyperweb:
    """Pull A back along tau: H_{M'} -> H_M, given as an M x M' matrix of column images"""
    field = A.field
    tau = field.reduce(tau)
    if tau.ndim != 2 or tau.shape[0] != A.N:
        raise ShapeMismatch(f"restriction matrix {tau.shape} does not start from charge {A.N}")
    if field.rank(tau) != tau.shape[1]:
        raise NonInjectiveTau(f"restriction matrix {tau.shape} is not injective")
    return Hyperweb.from_matrix(field, field.congruence(A.matrix, expand(tau)))


def gl_act(A: Hyperweb, g: np.ndarray) -> Hyperweb:
    """Right action A -> g^T A g on the H indices"""
    field = A.field
    g = field.reduce(g)
    if g.shape != (A.N, A.N):
        raise ShapeMismatch(f"group element {g.shape} for charge {A.N}")
    if not field.is_invertible(g):
        raise SingularG(f"{A.N}x{A.N} matrix is not invertible")
    return Hyperweb.from_matrix(field, field.congruence(A.matrix, expand(g)))


@dataclass(frozen=True)
class Decomposition:
    """H_N = i(H_n) + complement, given by a basis whose first n columns span i(H_n)"""
    field: PrimeField
    basis: np.ndarray
    n: int

    def __post_init__(self):
        if self.basis.shape[0] != self.basis.shape[1] or not 0 <= self.n <= self.basis.shape[0]:
            raise ShapeMismatch(f"decomposition basis {self.basis.shape} with first block {self.n}")

    @property
    def N(self) -> int:
        return self.basis.shape[0]

    @property
    def inclusion(self) -> np.ndarray:
        return self.basis[:, : self.n]

    @property
    def complement(self) -> np.ndarray:
        return self.basis[:, self.n:]

    @classmethod
    def identity(cls, field: PrimeField, N: int, n: int) -> "Decomposition":
        return cls(field, field.identity(N), n)

    @classmethod
    def random(cls, field: PrimeField, N: int, n: int, rng: np.random.Generator) -> "Decomposition":
        return cls(field, field.random_invertible(rng, N), n)

    def transport(self, g: np.ndarray) -> "Decomposition":
        """The decomposition seen by gl_act(A, g)"""
        return Decomposition(self.field, self.field.matmul(self.field.invert(g), self.basis), self.n)


@dataclass(frozen=True)
class BlockData:
    B: Hyperweb
    C: np.ndarray
    A3: Hyperweb

    @property
    def C_matrix(self) -> np.ndarray:
        return inflate_block(self.B.field, self.C)


def block_decompose(A: Hyperweb, xi: Decomposition) -> BlockData:
    field = A.field
    if xi.N != A.N:
        raise ShapeMismatch(f"decomposition of H_{xi.N} applied to a charge-{A.N} hyperweb")
    if not field.is_invertible(xi.basis):
        raise SingularG("decomposition basis is not invertible")
    moved = field.congruence(A.matrix, expand(xi.basis))
    split = V_DIM * xi.n
    return BlockData(
        B=Hyperweb.from_matrix(field, moved[:split, :split]),
        C=deflate_block(field, moved[:split, split:]),
        A3=Hyperweb.from_matrix(field, moved[split:, split:]),
    )


def reassemble(blocks: BlockData, xi: Optional[Decomposition] = None) -> Hyperweb:
    """Inverse of block_decompose"""
    field = blocks.B.field
    C_matrix = blocks.C_matrix
    upper = np.hstack([blocks.B.matrix, C_matrix])
    lower = np.hstack([(-C_matrix.T) % field.p, blocks.A3.matrix])
    moved = np.vstack([upper, lower])
    if xi is None:
        return Hyperweb.from_matrix(field, moved)
    if xi.N != blocks.B.N + blocks.A3.N or xi.n != blocks.B.N:
        raise ShapeMismatch(f"decomposition ({xi.N}, {xi.n}) does not match blocks ({blocks.B.N}, {blocks.A3.N})")
    try:
        inverse = field.invert(xi.basis)
    except SingularMatrix as e:
        raise SingularG("decomposition basis is not invertible") from e
    return Hyperweb.from_matrix(field, field.congruence(moved, expand(inverse)))

import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import List, Optional, Tuple

import numpy as np
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p

from instanton.config import settings
from instanton.core.exceptions import InstantonError, NoSolution, ShapeMismatch, SingularMatrix

logger = logging.getLogger(__name__)

SEED_MASK = (1 << 64) - 1
_LOW_BITS = 16
_LOW_MASK = (1 << _LOW_BITS) - 1
_MAX_INNER = 1 << _LOW_BITS


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Deterministic generator for a 64-bit seed, optionally keyed by a trial stream"""
    if stream:
        return np.random.default_rng([int(seed) & SEED_MASK, *[int(s) & SEED_MASK for s in stream]])
    return np.random.default_rng(int(seed) & SEED_MASK)


@dataclass(frozen=True)
class PrimeField:
    """Exact dense linear algebra over F_p.

    Matrices are int64 numpy arrays with entries in [0, p). Elimination always takes
    the first column with a nonzero entry and, inside it, the first nonzero row, so
    echelon forms, kernels and quotients are reproducible bit for bit.
    """
    p: int

    @cached_property
    def half(self) -> int:
        return pow(2, -1, self.p)

    def reduce(self, values) -> np.ndarray:
        return np.mod(np.asarray(values, dtype=np.int64), self.p)

    def zeros(self, shape) -> np.ndarray:
        return np.zeros(shape, dtype=np.int64)

    def identity(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int64)

    def random(self, rng: np.random.Generator, shape) -> np.ndarray:
        return rng.integers(0, self.p, size=shape, dtype=np.int64)

    def inv_scalar(self, value: int) -> int:
        value = int(value) % self.p
        if value == 0:
            raise SingularMatrix("zero has no inverse")
        return pow(value, -1, self.p)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Exact product of reduced matrices; the left factor is split into 16-bit halves"""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if a.shape[-1] != b.shape[0]:
            raise ShapeMismatch(f"cannot multiply {a.shape} by {b.shape}")
        if a.shape[-1] >= _MAX_INNER:
            raise ShapeMismatch(f"inner dimension {a.shape[-1]} too large for exact int64 products")
        low = a & _LOW_MASK
        high = a >> _LOW_BITS
        return ((high @ b) % self.p * (1 << _LOW_BITS) + (low @ b) % self.p) % self.p

    def dot(self, *factors: np.ndarray) -> np.ndarray:
        result = factors[0]
        for factor in factors[1:]:
            result = self.matmul(result, factor)
        return result

    def congruence(self, inner: np.ndarray, outer: np.ndarray) -> np.ndarray:
        """outer^T . inner . outer"""
        return self.dot(outer.T, inner, outer)

    def rref(self, matrix: np.ndarray) -> Tuple[np.ndarray, List[int]]:
        """Reduced row echelon form and pivot columns"""
        R = self.reduce(matrix).copy()
        rows, cols = R.shape
        pivots: List[int] = []
        r = 0
        for c in range(cols):
            if r == rows:
                break
            nonzero = np.flatnonzero(R[r:, c])
            if nonzero.size == 0:
                continue
            pivot_row = r + int(nonzero[0])
            if pivot_row != r:
                R[[r, pivot_row]] = R[[pivot_row, r]]
            R[r] = R[r] * self.inv_scalar(R[r, c]) % self.p
            factors = R[:, c].copy()
            factors[r] = 0
            targets = np.flatnonzero(factors)
            if targets.size:
                R[targets] = (R[targets] - np.outer(factors[targets], R[r])) % self.p
            pivots.append(c)
            r += 1
        return R, pivots

    def rank(self, matrix: np.ndarray) -> int:
        matrix = np.asarray(matrix)
        if matrix.size == 0:
            return 0
        return len(self.rref(matrix)[1])

    def rank_kernel(self, matrix: np.ndarray) -> Tuple[int, np.ndarray]:
        """Rank and a column basis of the right kernel"""
        matrix = np.asarray(matrix, dtype=np.int64)
        cols = matrix.shape[1]
        if matrix.shape[0] == 0:
            return 0, self.identity(cols)
        R, pivots = self.rref(matrix)
        pivot_set = set(pivots)
        free = [j for j in range(cols) if j not in pivot_set]
        kernel = self.zeros((cols, len(free)))
        if free:
            kernel[free, np.arange(len(free))] = 1
            if pivots:
                kernel[pivots, :] = (-R[: len(pivots)][:, free]) % self.p
        return len(pivots), kernel

    def kernel(self, matrix: np.ndarray) -> np.ndarray:
        return self.rank_kernel(matrix)[1]

    def left_kernel(self, matrix: np.ndarray) -> np.ndarray:
        """Rows y with y . matrix = 0"""
        return self.kernel(np.asarray(matrix).T).T

    def is_invertible(self, matrix: np.ndarray) -> bool:
        matrix = np.asarray(matrix)
        return matrix.ndim == 2 and matrix.shape[0] == matrix.shape[1] and self.rank(matrix) == matrix.shape[0]

    def invert(self, matrix: np.ndarray) -> np.ndarray:
        matrix = self.reduce(matrix)
        n = matrix.shape[0]
        if matrix.ndim != 2 or matrix.shape[1] != n:
            raise ShapeMismatch(f"cannot invert a {matrix.shape} matrix")
        if n == 0:
            return self.zeros((0, 0))
        R, pivots = self.rref(np.hstack([matrix, self.identity(n)]))
        if pivots[:n] != list(range(n)):
            raise SingularMatrix(f"matrix of size {n} has rank {sum(1 for c in pivots if c < n)}")
        return R[:, n:]

    def solve(self, matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
        """One solution of matrix . x = rhs with free variables set to zero"""
        matrix = self.reduce(matrix)
        rhs = self.reduce(rhs)
        vector = rhs.ndim == 1
        if vector:
            rhs = rhs.reshape(-1, 1)
        if matrix.shape[0] != rhs.shape[0]:
            raise ShapeMismatch(f"system {matrix.shape} with right-hand side {rhs.shape}")
        cols = matrix.shape[1]
        R, pivots = self.rref(np.hstack([matrix, rhs]))
        if any(c >= cols for c in pivots):
            raise NoSolution("inconsistent linear system")
        solution = self.zeros((cols, rhs.shape[1]))
        if pivots:
            solution[pivots, :] = R[: len(pivots), cols:]
        return solution.reshape(-1) if vector else solution

    def random_invertible(self, rng: np.random.Generator, n: int, budget: int = 64) -> np.ndarray:
        for _ in range(budget):
            candidate = self.random(rng, (n, n))
            if self.is_invertible(candidate):
                return candidate
        raise SingularMatrix(f"no invertible {n}x{n} matrix after {budget} draws")

    def random_injection(self, rng: np.random.Generator, rows: int, cols: int, budget: int = 64) -> np.ndarray:
        for _ in range(budget):
            candidate = self.random(rng, (rows, cols))
            if self.rank(candidate) == cols:
                return candidate
        raise SingularMatrix(f"no injective {rows}x{cols} matrix after {budget} draws")


@lru_cache(maxsize=None)
def irreducible_modulus(p: int, degree: int) -> Tuple[int, ...]:
    """Smallest monic irreducible of the form x^e + c, then x^e + x + c (highest degree first)"""
    if degree == 1:
        return (1, 0)
    for c in range(1, 10000):
        for linear in (0, 1):
            candidate = [1] + [0] * (degree - 2) + [linear, c]
            if gf_irreducible_p(candidate, p, ZZ):
                logger.info(f"Extension modulus for F_{p}^{degree}: {candidate}")
                return tuple(candidate)
    raise InstantonError(f"no irreducible polynomial of degree {degree} found over F_{p}")


@dataclass(frozen=True)
class ExtensionField:
    """F_{p^e} realized through the regular representation over F_p.

    An element is a length-e coefficient vector in the basis 1, x, ..., x^(e-1). A matrix
    over F_{p^e} is realized as a block matrix over F_p whose blocks are the e x e
    multiplication matrices of its entries; its rank over F_p is e times its rank over
    F_{p^e}.
    """
    base: PrimeField
    degree: int

    @cached_property
    def modulus(self) -> Tuple[int, ...]:
        return irreducible_modulus(self.base.p, self.degree)

    @cached_property
    def companion(self) -> np.ndarray:
        e = self.degree
        C = self.base.zeros((e, e))
        low_first = list(reversed(self.modulus))
        for i in range(e - 1):
            C[i + 1, i] = 1
        for i in range(e):
            C[i, e - 1] = (-low_first[i]) % self.base.p
        return C

    @cached_property
    def powers(self) -> np.ndarray:
        e = self.degree
        stack = [self.base.identity(e)]
        for _ in range(e - 1):
            stack.append(self.base.matmul(stack[-1], self.companion))
        return np.stack(stack)

    def regular(self, element: np.ndarray) -> np.ndarray:
        element = self.base.reduce(element)
        result = self.base.zeros((self.degree, self.degree))
        for k in range(self.degree):
            result = (result + int(element[k]) * self.powers[k]) % self.base.p
        return result

    def random_point(self, rng: np.random.Generator, length: int = 4) -> np.ndarray:
        """Uniform nonzero vector of F_{p^e}^length, i.e. a uniform projective point"""
        while True:
            point = self.base.random(rng, (length, self.degree))
            if point.any():
                return point

    def evaluate(self, forms: np.ndarray, point: np.ndarray) -> np.ndarray:
        """Realize the matrix of linear forms sum_v x_v forms[..., v] at a point"""
        rows, cols, nvars = forms.shape
        e = self.degree
        result = self.base.zeros((rows * e, cols * e))
        for v in range(nvars):
            result = (result + self.base.reduce(np.kron(forms[:, :, v], self.regular(point[v])))) % self.base.p
        return result

    def rank_at(self, forms: np.ndarray, point: np.ndarray) -> int:
        return self.base.rank(self.evaluate(forms, point)) // self.degree


@lru_cache(maxsize=None)
def default_field(p: Optional[int] = None) -> PrimeField:
    return PrimeField(settings.PRIME if p is None else p)

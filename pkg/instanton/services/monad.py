import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
import sympy as sp

from instanton.config import settings
from instanton.core.exceptions import InstantonError, ParameterError, PreconditionViolation, SingularB, ShapeMismatch
from instanton.core.field import ExtensionField, PrimeField, make_rng
from instanton.models.pydantic_models import (
    CohomologyTable, CokerCohomology, DiagramCheckResult, FiberCheck, FiberCheckVerdict
)
from instanton.services.hyperweb import (
    Decomposition, Hyperweb, SymplecticQuotient, block_decompose, symplectic_quotient
)
from instanton.utils.tensors import V_DIM, expand, monomial_index, monomials, sym_dim

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinearFormMatrix:
    """rows x cols matrix of linear forms in x_0..x_3, stored as forms[row, col, v]"""
    field: PrimeField
    forms: np.ndarray

    @property
    def rows(self) -> int:
        return self.forms.shape[0]

    @property
    def cols(self) -> int:
        return self.forms.shape[1]

    def coefficient(self, v: int) -> np.ndarray:
        return self.forms[:, :, v]

    def rank_at(self, ext: ExtensionField, point: np.ndarray) -> int:
        return ext.rank_at(self.forms, point)

    def compose(self, matrix: np.ndarray) -> "LinearFormMatrix":
        """Precompose with a constant cols x k matrix"""
        return LinearFormMatrix(self.field, np.stack(
            [self.field.matmul(self.forms[:, :, v], matrix) for v in range(V_DIM)], axis=2))

    def apply(self, matrix: np.ndarray) -> "LinearFormMatrix":
        """Postcompose with a constant k x rows matrix"""
        return LinearFormMatrix(self.field, np.stack(
            [self.field.matmul(matrix, self.forms[:, :, v]) for v in range(V_DIM)], axis=2))


@dataclass(frozen=True)
class Monad:
    """H (x) O(-1) --a--> W (x) O --b--> H^* (x) O(1) with b = a^T q"""
    N: int
    r: int
    field: PrimeField
    a: LinearFormMatrix
    q: np.ndarray
    b: LinearFormMatrix
    quotient: Optional[SymplecticQuotient] = None

    @property
    def W_dim(self) -> int:
        return self.q.shape[0]

    @classmethod
    def from_forms(cls, field: PrimeField, a_forms: np.ndarray, q: np.ndarray, r: int,
                   quotient: Optional[SymplecticQuotient] = None) -> "Monad":
        W, N, _ = a_forms.shape
        if q.shape != (W, W):
            raise ShapeMismatch(f"form {q.shape} on a {W}-dimensional middle term")
        a = LinearFormMatrix(field, field.reduce(a_forms))
        b_forms = np.stack([field.matmul(a.forms[:, :, v].T, q) for v in range(V_DIM)], axis=2)
        return cls(N=N, r=r, field=field, a=a, q=field.reduce(q), b=LinearFormMatrix(field, b_forms),
                   quotient=quotient)


def composition_coefficients(M: Monad) -> np.ndarray:
    """Coefficients of b o a on the ten quadratic monomials, shape (10, N, N)"""
    field = M.field
    index = monomial_index(2)
    result = field.zeros((len(index), M.N, M.N))
    for v in range(V_DIM):
        for u in range(V_DIM):
            term = field.matmul(M.b.coefficient(v), M.a.coefficient(u))
            k = index[tuple(sorted((v, u)))]
            result[k] = (result[k] + term) % field.p
    return result


def build_monad(A: Hyperweb, r: int) -> Monad:
    quotient = symplectic_quotient(A, r)
    a_forms = quotient.c.reshape(quotient.W_dim, A.N, V_DIM)
    monad = Monad.from_forms(A.field, a_forms, quotient.q, r, quotient)
    if composition_coefficients(monad).any():
        raise InstantonError(f"monad composition does not vanish for charge {A.N}")
    logger.info(f"Built monad of charge {A.N}, r={r}: W_dim={quotient.W_dim}")
    return monad


def _confidence_note(field: PrimeField, ext_degree: int, trials: int) -> str:
    return f"one-sided: {trials} uniform points of P^3(F_{field.p}^{ext_degree})"


def search_witness(field: PrimeField, condition: FiberCheck, required_rank: int,
                   rank_fn: Callable[[ExtensionField, np.ndarray], int],
                   trials: int, ext_degree: int, seed: int) -> FiberCheckVerdict:
    """Evaluate rank_fn at random points; the lowest trial index with rank below the requirement wins"""
    ext = ExtensionField(field, ext_degree)
    for trial in range(trials):
        point = ext.random_point(make_rng(seed, trial))
        rank = rank_fn(ext, point)
        if rank < required_rank:
            if rank_fn(ext, point) != rank:
                raise InstantonError("fiber rank witness failed re-evaluation")
            logger.info(f"{condition.value}: witness at trial {trial}, rank {rank} < {required_rank}")
            return FiberCheckVerdict(
                condition=condition, passed=False, trials=trials, trials_run=trial + 1,
                required_rank=required_rank, witness_trial=trial,
                witness_point=[[int(x) for x in coord] for coord in point], witness_rank=rank,
                prime=field.p, ext_degree=ext_degree, note="exact witness",
            )
    return FiberCheckVerdict(
        condition=condition, passed=True, trials=trials, trials_run=trials, required_rank=required_rank,
        prime=field.p, ext_degree=ext_degree, note=_confidence_note(field, ext_degree, trials),
    )


def fiberwise_rank_check(M: Monad, which: FiberCheck, trials: Optional[int] = None,
                         ext_degree: Optional[int] = None, seed: int = 0) -> FiberCheckVerdict:
    trials = settings.FIBER_TRIALS if trials is None else trials
    ext_degree = settings.EXT_DEGREE if ext_degree is None else ext_degree
    if which == FiberCheck.A_INJECTIVE:
        forms = M.a
    elif which == FiberCheck.B_SURJECTIVE:
        forms = M.b
    else:
        raise ValueError(f"monad fiber check must be a-injective or b-surjective, got {which}")
    return search_witness(M.field, which, M.N, forms.rank_at, trials, ext_degree, seed)


def global_section_matrix(M: Monad) -> np.ndarray:
    """b on global sections, W -> H^* (x) V^*, rows indexed by 4i + v"""
    return M.b.forms.transpose(0, 2, 1).reshape(M.N * V_DIM, M.W_dim)


def h0_global(M: Monad) -> int:
    return M.W_dim - M.field.rank(global_section_matrix(M))


def multiplication_matrix(M: Monad, t: int) -> np.ndarray:
    """W (x) S^t -> H^* (x) S^(t+1), rows (i, m') and columns (w, m)"""
    source = monomials(t)
    target = monomial_index(t + 1)
    matrix = M.field.zeros((M.N * len(target), M.W_dim * len(source)))
    if not source or not target:
        return matrix
    cols = np.arange(M.W_dim) * len(source)
    rows = np.arange(M.N) * len(target)
    for k, m in enumerate(source):
        for v in range(V_DIM):
            image = target[tuple(sorted(m + (v,)))]
            block = matrix[np.ix_(rows + image, cols + k)]
            matrix[np.ix_(rows + image, cols + k)] = (block + M.b.coefficient(v)) % M.field.p
    return matrix


def twisted_line_sections(d: int) -> int:
    """chi(O(d)) on P^3, as a polynomial in d"""
    return (d + 1) * (d + 2) * (d + 3) // 6


def riemann_roch(N: int, r: int, t: int) -> int:
    return (2 * N + 2 * r) * twisted_line_sections(t) - N * twisted_line_sections(t - 1) - N * twisted_line_sections(t + 1)


def euler_characteristic(M: Monad, t: int) -> int:
    return M.W_dim * twisted_line_sections(t) - M.N * twisted_line_sections(t - 1) - M.N * twisted_line_sections(t + 1)


def _direct_row(M: Monad, t: int) -> Tuple[int, int, int, int]:
    beta = multiplication_matrix(M, t)
    rank = M.field.rank(beta)
    kernel = beta.shape[1] - rank
    return kernel - M.N * sym_dim(t - 1), beta.shape[0] - rank, 0, 0


def cohomology_table(M: Monad, tmin: int, tmax: int) -> CohomologyTable:
    """h^i(E(t)) for t in [tmin, tmax]; twists below -2 come from Serre duality"""
    if tmin > tmax:
        raise ParameterError(f"empty twist range [{tmin}, {tmax}]")
    direct = {}

    def row(t: int) -> Tuple[int, int, int, int]:
        if t >= -2:
            if t not in direct:
                direct[t] = _direct_row(M, t)
            return direct[t]
        dual = row(-4 - t)
        h3 = 0 if t >= -4 else dual[0]
        return 0, dual[2], dual[1], h3

    twists = list(range(tmin, tmax + 1))
    rows = [row(t) for t in twists]
    h = [[values[i] for values in rows] for i in range(4)]
    euler = [values[0] - values[1] + values[2] - values[3] for values in rows]
    table = CohomologyTable(
        N=M.N, r=M.r, tmin=tmin, tmax=tmax, twists=twists, h=h, euler=euler,
        riemann_roch=[euler_characteristic(M, t) for t in twists],
        direct_twists=sorted(t for t in direct if tmin <= t <= tmax),
    )
    logger.info(f"Cohomology table for charge {M.N}, r={M.r}, t in [{tmin}, {tmax}]")
    return table


def h1_tensor_omega(M: Monad) -> int:
    """dim ker(V^* (x) H^1(E(-1)) -> H^1(E)), i.e. h^1(E (x) Omega) when h^0(E) = 0"""
    field = M.field
    beta = multiplication_matrix(M, 0)
    rank, _ = field.rank_kernel(beta)
    if beta.shape[1] - rank != 0:
        raise PreconditionViolation(f"h^0(E) = {beta.shape[1] - rank}, expected 0")
    coker = field.left_kernel(beta)
    # x_v (x) e_i^*  ->  e_i^* (x) x_v
    target = monomial_index(1)
    identification = field.zeros((M.N * V_DIM, V_DIM * M.N))
    for v in range(V_DIM):
        for i in range(M.N):
            identification[i * len(target) + target[(v,)], v * M.N + i] = 1
    delta = field.matmul(coker, identification) if coker.size else field.zeros((0, V_DIM * M.N))
    return V_DIM * M.N - field.rank(delta)


def chern_check(N: int) -> Tuple[int, int]:
    h = sp.symbols("h")
    series = sp.series(((1 - h) * (1 + h)) ** (-N), h, 0, 3).removeO()
    poly = sp.Poly(series, h)
    return int(poly.coeff_monomial(h)), int(poly.coeff_monomial(h ** 2))


def _euler_kernel(field: PrimeField, d: int) -> np.ndarray:
    """Basis of ker(V^* (x) S^d -> S^(d+1)), i.e. sections of Omega(d+1)"""
    source = monomials(d)
    target = monomial_index(d + 1)
    mult = field.zeros((len(target), V_DIM * len(source)))
    for v in range(V_DIM):
        for k, m in enumerate(source):
            mult[target[tuple(sorted(m + (v,)))], v * len(source) + k] = 1
    return field.kernel(mult)


def coker_presentation_cohomology(B: Hyperweb) -> CokerCohomology:
    """h^0(E) and h^0(E(1)) for E = coker(H (x) O(-1) -> H^* (x) Omega(1)) defined by invertible B"""
    field = B.field
    if not field.is_invertible(B.matrix):
        raise SingularB(f"hyperweb of charge {B.N} is not invertible")
    n = B.N
    omega1 = _euler_kernel(field, 0).shape[1]
    omega2_basis = _euler_kernel(field, 1)
    # h -> sum_b B[(i, a), (j, b)] h_j e_i^* (x) e_a^* (x) x_b, in H^* (x) V^* (x) S^1
    sections = B.matrix.reshape(n, V_DIM, n, V_DIM).transpose(0, 1, 3, 2).reshape(n * V_DIM * V_DIM, n)
    sharp = field.solve(np.kron(field.identity(n), omega2_basis), sections)
    sharp_rank = field.rank(sharp)
    result = CokerCohomology(
        n=n, omega1_sections=omega1, omega2_sections=omega2_basis.shape[1], sharp_rank=sharp_rank,
        h0=n * omega1, h0_twist1=n * omega2_basis.shape[1] - sharp_rank,
    )
    logger.info(f"Cokernel route for charge {n}: h0(E)={result.h0}, h0(E(1))={result.h0_twist1}")
    return result


def quotient_diagram_check(A: Hyperweb, n: int, xi: Optional[Decomposition] = None) -> DiagramCheckResult:
    """Check the commuting squares relating the monads of A and of B = A_1(xi)"""
    field = A.field
    N = A.N
    r = 2 * n - N
    xi = xi or Decomposition.identity(field, N, n)
    B = block_decompose(A, xi).B
    if not field.is_invertible(B.matrix):
        raise SingularB(f"block A_1 of charge {n} is not invertible")
    rank = field.rank(A.matrix)
    required = 2 * N + 2 * r
    if r < 0 or r > n or rank != required:
        logger.info(f"Quotient diagram check: rank {rank}, required {required}")
        return DiagramCheckResult(n=n, N=N, r=r, b_invertible=True, rank_found=rank, rank_ok=False, passed=False)
    monad_A = build_monad(A, r)
    monad_B = build_monad(B, n)
    w = field.matmul(monad_A.quotient.c, expand(xi.inclusion))
    form_identity = np.array_equal(field.congruence(monad_A.q, w), B.matrix)
    left = monad_A.a.compose(field.reduce(xi.inclusion)).forms
    right = monad_B.a.apply(w).forms
    square_identity = np.array_equal(left, right)
    return DiagramCheckResult(
        n=n, N=N, r=r, b_invertible=True, rank_found=rank, rank_ok=True,
        form_identity=form_identity, square_identity=square_identity,
        passed=form_identity and square_identity,
    )

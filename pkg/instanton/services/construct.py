import logging
from collections import Counter
from dataclasses import dataclass, replace
from typing import Dict, Optional, Tuple

import numpy as np

from instanton.config import settings
from instanton.core.exceptions import (
    ConditionIrViolated, NotFound, NotInSummand, ParameterError, ShapeMismatch, SingularB, SingularD,
    SingularMatrix
)
from instanton.core.field import ExtensionField, PrimeField, make_rng
from instanton.models.pydantic_models import (
    BCSampleReport, FiberCheck, FiberCheckVerdict, NondegenerateBlockStats, SamplingStrategy
)
from instanton.services.hyperweb import (
    BlockData, Decomposition, Hyperweb, block_decompose, reassemble, restrict
)
from instanton.services.monad import search_witness
from instanton.utils.tensors import (
    V_DIM, WEDGE_DIM, deflate_block, inflate_block, project_canonical
)

logger = logging.getLogger(__name__)


def sample_invertible(field: PrimeField, n: int, seed: int, budget: Optional[int] = None) -> Hyperweb:
    """Rejection-sample a hyperweb in S^0_n"""
    if n < 1:
        raise ParameterError(f"charge must be at least 1, got {n}")
    budget = settings.SAMPLER_RETRY_BUDGET if budget is None else budget
    rng = make_rng(seed)
    for attempt in range(budget):
        candidate = Hyperweb.random(field, n, rng)
        if field.is_invertible(candidate.matrix):
            if attempt:
                logger.info(f"Invertible charge-{n} hyperweb after {attempt} rejections")
            return candidate
    raise NotFound(f"no invertible charge-{n} hyperweb in {budget} draws", attempts=budget)


@dataclass(frozen=True)
class BCPair:
    """B in S^0_n and C in Sigma_{n,r} stored as an n x (n-r) grid of L^2 V^* vectors"""
    n: int
    r: int
    B: Hyperweb
    C: np.ndarray
    report: Optional[BCSampleReport] = None

    def __post_init__(self):
        if self.C.shape != (self.n, self.n - self.r, WEDGE_DIM):
            raise ShapeMismatch(f"C grid {self.C.shape} for (n, r) = ({self.n}, {self.r})")

    @property
    def field(self) -> PrimeField:
        return self.B.field

    @property
    def C_matrix(self) -> np.ndarray:
        return inflate_block(self.field, self.C)


def cbc_product(bc: BCPair) -> np.ndarray:
    """C^T B^-1 C as a skew 4(n-r) matrix"""
    field = bc.field
    try:
        inverse = field.invert(bc.B.matrix)
    except SingularMatrix as e:
        raise SingularB(f"block B of charge {bc.n} is not invertible") from e
    return field.congruence(inverse, bc.C_matrix)


def condition_ir_holds(bc: BCPair) -> bool:
    _, l_part = project_canonical(bc.field, cbc_product(bc))
    return not l_part.any()


def assemble_from_BC(bc: BCPair, xi: Optional[Decomposition] = None) -> Hyperweb:
    """The hyperweb of charge 2n - r with blocks (B, C, -C^T B^-1 C)"""
    field = bc.field
    schur = (-cbc_product(bc)) % field.p
    try:
        A3 = Hyperweb.from_matrix(field, schur)
    except NotInSummand as e:
        raise ConditionIrViolated(f"C^T B^-1 C leaves S_{bc.n - bc.r}") from e
    xi = xi or Decomposition.identity(field, 2 * bc.n - bc.r, bc.n)
    A = reassemble(BlockData(B=bc.B, C=bc.C, A3=A3), xi)
    logger.info(f"Assembled charge-{A.N} hyperweb from (n, r) = ({bc.n}, {bc.r})")
    return A


@dataclass(frozen=True)
class BlockQuintuple:
    """D = [[D1, lam], [-lam^T, mu]] and C = [phi; psi] along H_n = H_{n-r} + H_r"""
    D1: Hyperweb
    phi: np.ndarray
    psi: np.ndarray
    lam: np.ndarray
    mu: Hyperweb

    @property
    def field(self) -> PrimeField:
        return self.D1.field

    @property
    def m(self) -> int:
        return self.D1.N

    @property
    def r(self) -> int:
        return self.mu.N

    @property
    def D_matrix(self) -> np.ndarray:
        field = self.field
        lam = inflate_block(field, self.lam)
        return np.vstack([
            np.hstack([self.D1.matrix, lam]),
            np.hstack([(-lam.T) % field.p, self.mu.matrix]),
        ])

    @property
    def C_matrix(self) -> np.ndarray:
        return np.vstack([inflate_block(self.field, self.phi), inflate_block(self.field, self.psi)])


def block_dims(n: int, r: int) -> Dict[str, int]:
    m = n - r
    return {
        "Phi": WEDGE_DIM * m * m,
        "Psi": WEDGE_DIM * r * m,
        "L": WEDGE_DIM * r * m,
        "M": 3 * r * (r + 1),
        "S_dual": 3 * m * (m + 1),
    }


def random_quintuple(field: PrimeField, n: int, r: int, rng: np.random.Generator) -> BlockQuintuple:
    m = n - r
    return BlockQuintuple(
        D1=Hyperweb.random(field, m, rng),
        phi=field.random(rng, (m, m, WEDGE_DIM)),
        psi=field.random(rng, (r, m, WEDGE_DIM)),
        lam=field.random(rng, (m, r, WEDGE_DIM)),
        mu=Hyperweb.random(field, r, rng),
    )


def quintuple_from_blocks(field: PrimeField, D: np.ndarray, C: np.ndarray, n: int, r: int) -> BlockQuintuple:
    """Split D (4n x 4n) and C (4n x 4(n-r)) along H_n = H_{n-r} + H_r"""
    split = V_DIM * (n - r)
    return BlockQuintuple(
        D1=Hyperweb.from_matrix(field, D[:split, :split]),
        phi=deflate_block(field, C[:split]),
        psi=deflate_block(field, C[split:]),
        lam=deflate_block(field, D[:split, split:]),
        mu=Hyperweb.from_matrix(field, D[split:, split:]),
    )


def cdc_block(q: BlockQuintuple) -> np.ndarray:
    field = q.field
    phi = inflate_block(field, q.phi)
    psi = inflate_block(field, q.psi)
    lam = inflate_block(field, q.lam)
    terms = [
        field.congruence(q.D1.matrix, phi),
        field.dot(phi.T, lam, psi),
        (-field.dot(psi.T, lam.T, phi)) % field.p,
        field.congruence(q.mu.matrix, psi),
    ]
    return sum(terms) % field.p


def cdc_direct(q: BlockQuintuple) -> np.ndarray:
    return q.field.congruence(q.D_matrix, q.C_matrix)


def satisfies_tilde_x(q: BlockQuintuple) -> bool:
    """C^T D C lies in S_{n-r}"""
    _, l_part = project_canonical(q.field, cdc_block(q))
    return not l_part.any()


def scaling_curve(q: BlockQuintuple, t: int) -> BlockQuintuple:
    field = q.field
    t = int(t) % field.p
    t2 = t * t % field.p
    return BlockQuintuple(
        D1=q.D1,
        phi=q.phi * t2 % field.p,
        psi=q.psi * t % field.p,
        lam=q.lam * t % field.p,
        mu=Hyperweb.from_matrix(field, q.mu.matrix * t2 % field.p),
    )


def _sym_entries(field: PrimeField, M: np.ndarray) -> np.ndarray:
    rows, cols = np.triu_indices(V_DIM)
    return ((M + M.T) % field.p)[rows, cols]


def solve_ir_columns(field: PrimeField, D: np.ndarray, n: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """Random C (n x m grid) with C^T D C in S_m, one H_m column at a time.

    For j < k the 4 x 4 block C_j^T D C_k must be antisymmetric, which is linear in C_k
    once C_1..C_(k-1) are fixed.
    """
    columns = []
    units = np.eye(n * WEDGE_DIM, dtype=np.int64).reshape(n * WEDGE_DIM, n, 1, WEDGE_DIM)
    for k in range(m):
        if columns:
            left = [field.matmul(inflate_block(field, c).T, D) for c in columns]
            system = np.array([
                np.concatenate([_sym_entries(field, field.matmul(P, inflate_block(field, unit))) for P in left])
                for unit in units
            ], dtype=np.int64).T
            basis = field.kernel(system)
        else:
            basis = field.identity(n * WEDGE_DIM)
        if basis.shape[1] == 0:
            raise NotFound(f"no column {k} solves the (ir) equations for n={n}, n-r={m}", attempts=1)
        coefficients = field.random(rng, (basis.shape[1],))
        columns.append(field.matmul(basis, coefficients.reshape(-1, 1)).reshape(n, 1, WEDGE_DIM))
    if not columns:
        return np.zeros((n, 0, WEDGE_DIM), dtype=np.int64)
    return np.concatenate(columns, axis=1)


def random_satisfying_quintuple(field: PrimeField, n: int, r: int, rng: np.random.Generator) -> BlockQuintuple:
    q = random_quintuple(field, n, r, rng)
    C = solve_ir_columns(field, q.D_matrix, n, n - r, rng)
    return replace(q, phi=C[: n - r], psi=C[n - r:])


def _bc_forms(bc: BCPair) -> Tuple[np.ndarray, np.ndarray]:
    """B(. (x) x) and [B(. (x) x) | C(. (x) x)] as linear-form matrices into H^* (x) V^*"""
    n = bc.n
    B_forms = bc.B.matrix.reshape(V_DIM * n, n, V_DIM)
    C_forms = bc.C_matrix.reshape(V_DIM * n, n - bc.r, V_DIM)
    return B_forms, np.concatenate([B_forms, C_forms], axis=1)


def bc_subbundle_checks(bc: BCPair, trials: Optional[int] = None, ext_degree: Optional[int] = None,
                        seed: int = 0) -> Tuple[FiberCheckVerdict, FiberCheckVerdict]:
    """tau_{B,C}(x) of rank 2n - r and rho_{B,C}(x) of rank n - r at random points"""
    trials = settings.FIBER_TRIALS if trials is None else trials
    ext_degree = settings.EXT_DEGREE if ext_degree is None else ext_degree
    B_forms, tau_forms = _bc_forms(bc)

    def tau_rank(ext: ExtensionField, point: np.ndarray) -> int:
        return ext.rank_at(tau_forms, point)

    def rho_rank(ext: ExtensionField, point: np.ndarray) -> int:
        return ext.rank_at(tau_forms, point) - ext.rank_at(B_forms, point)

    tau = search_witness(bc.field, FiberCheck.TAU_BC, 2 * bc.n - bc.r, tau_rank, trials, ext_degree, seed)
    rho = search_witness(bc.field, FiberCheck.RHO_BC, bc.n - bc.r, rho_rank, trials, ext_degree, seed)
    return tau, rho


def _ansatz_candidate(field: PrimeField, n: int, r: int, rng: np.random.Generator,
                      rejections: Counter) -> Optional[BCPair]:
    m = n - r
    D1 = Hyperweb.random(field, m, rng)
    if not field.is_invertible(D1.matrix):
        rejections["singular_d1"] += 1
        return None
    q = BlockQuintuple(
        D1=D1,
        phi=np.zeros((m, m, WEDGE_DIM), dtype=np.int64),
        psi=field.random(rng, (r, m, WEDGE_DIM)),
        lam=field.random(rng, (m, r, WEDGE_DIM)),
        mu=Hyperweb.zero(field, r),
    )
    try:
        B_matrix = field.invert(q.D_matrix)
    except SingularMatrix:
        rejections["singular_d"] += 1
        return None
    try:
        B = Hyperweb.from_matrix(field, B_matrix)
    except NotInSummand:
        rejections["b_not_in_summand"] += 1
        return None
    return BCPair(n=n, r=r, B=B, C=deflate_block(field, q.C_matrix))


def sample_bc(field: PrimeField, n: int, r: int, strategy: SamplingStrategy, seed: int,
              trials: Optional[int] = None, ext_degree: Optional[int] = None,
              budget: Optional[int] = None) -> BCPair:
    """Sample (B, C) of charge 2n - r with condition (ir) verified and the subbundle clauses reported"""
    if not 1 <= r <= n:
        raise ParameterError(f"(B, C) sampling needs 1 <= r <= n, got n={n}, r={r}")
    strategy = SamplingStrategy(strategy)
    budget = settings.SAMPLER_RETRY_BUDGET if budget is None else budget
    m = n - r
    rng = make_rng(seed)
    rejections: Counter = Counter()
    logger.info(f"Sampling (B, C) for (n, r) = ({n}, {r}) with strategy {strategy.value}")

    if strategy == SamplingStrategy.VACUOUS and m > 1:
        raise ParameterError(f"vacuous strategy needs n - r <= 1, got {m}")
    if strategy not in (SamplingStrategy.VACUOUS, SamplingStrategy.ANSATZ, SamplingStrategy.LINEAR):
        raise ParameterError(f"strategy {strategy.value} does not sample (B, C) pairs")

    bc = None
    attempts = 0
    while bc is None and attempts < budget:
        attempts += 1
        if strategy == SamplingStrategy.ANSATZ and m > 0:
            bc = _ansatz_candidate(field, n, r, rng, rejections)
            continue
        B = Hyperweb.random(field, n, rng)
        if not field.is_invertible(B.matrix):
            rejections["singular_b"] += 1
            continue
        if strategy == SamplingStrategy.LINEAR:
            C = solve_ir_columns(field, field.invert(B.matrix), n, m, rng)
        else:
            C = field.random(rng, (n, m, WEDGE_DIM))
        bc = BCPair(n=n, r=r, B=B, C=C)

    if bc is None:
        logger.warning(f"Strategy {strategy.value} found no (B, C) for ({n}, {r}): rejections {dict(rejections)}")
        raise NotFound(f"strategy {strategy.value} exhausted {budget} attempts", attempts=attempts,
                       rejections=dict(rejections))

    condition_ir = condition_ir_holds(bc)
    if not condition_ir:
        raise ConditionIrViolated(f"sampled (B, C) for ({n}, {r}) violates condition (ir)")
    tau, rho = bc_subbundle_checks(bc, trials, ext_degree, seed)
    report = BCSampleReport(n=n, r=r, strategy=strategy, attempts=attempts, rejections=dict(rejections),
                            condition_ir=condition_ir, tau_check=tau, rho_check=rho)
    if rejections:
        logger.info(f"Sampler rejections for ({n}, {r}): {dict(rejections)} over {attempts} attempts")
    return replace(bc, report=report)


def tau_restrict_construct(A: Hyperweb, n: int, r_target: int, seed: int,
                           xi: Optional[Decomposition] = None, budget: Optional[int] = None) -> Hyperweb:
    """Restrict an r = 1 hyperweb of charge 2n - 1 to a subspace containing i_xi(H_n)"""
    field = A.field
    budget = settings.SAMPLER_RETRY_BUDGET if budget is None else budget
    if A.N != 2 * n - 1:
        raise ParameterError(f"tau-restriction needs charge 2n - 1 = {2 * n - 1}, got {A.N}")
    if not 1 <= r_target <= n:
        raise ParameterError(f"target half-rank must lie in [1, {n}], got {r_target}")
    xi = xi or Decomposition.identity(field, A.N, n)
    if not field.is_invertible(block_decompose(A, xi).B.matrix):
        raise SingularB(f"block A_1 of charge {n} is not invertible")

    width = 2 * n - r_target
    rng = make_rng(seed)
    for _ in range(budget):
        complement = field.random(rng, (A.N, width - n))
        tau = np.hstack([field.reduce(xi.inclusion), complement])
        if field.rank(tau) == width:
            A_tau = restrict(A, tau)
            logger.info(f"tau-restricted charge {A.N} to charge {width} (r = {r_target})")
            return A_tau
    raise NotFound(f"no injective tau of width {width} in {budget} draws", attempts=budget)


def nondegenerate_block_trial(D: Hyperweb, r: int, trials: Optional[int] = None, seed: int = 0,
                              aligned: bool = False) -> NondegenerateBlockStats:
    """Fraction of decompositions H_n = H_{n-r} + H_r whose leading block D_1 is invertible"""
    field = D.field
    n = D.N
    trials = settings.NONDEG_TRIALS if trials is None else trials
    if not 1 <= r < n:
        raise ParameterError(f"block trial needs 1 <= r < n, got n={n}, r={r}")
    if not field.is_invertible(D.matrix):
        raise SingularD(f"charge-{n} element is not invertible")
    split = V_DIM * (n - r)
    degenerate = 0
    first = None
    for trial in range(trials):
        if aligned:
            g = field.identity(n)
        else:
            g = field.random_invertible(make_rng(seed, trial), n)
        moved = block_decompose(D, Decomposition(field, g, n - r)).B
        if not field.is_invertible(moved.matrix):
            degenerate += 1
            first = trial if first is None else first
    if degenerate:
        logger.warning(f"{degenerate} degenerate D_1 blocks in {trials} decompositions (n={n}, r={r})")
    return NondegenerateBlockStats(
        n=n, r=r, trials=trials, aligned=aligned, degenerate=degenerate,
        nondegenerate_fraction=(trials - degenerate) / trials if trials else 1.0,
        first_degenerate_trial=first,
    )

import logging
from typing import Optional

import numpy as np

from instanton.config import settings
from instanton.core.exceptions import ParameterError
from instanton.core.field import make_rng
from instanton.models.pydantic_models import (
    ConditionOneResult, ConditionThreeResult, FiberCheck, FiberCheckVerdict, MembershipReport,
    StarCertificate, Verdict
)
from instanton.services.hyperweb import Hyperweb, restrict
from instanton.services.monad import build_monad, fiberwise_rank_check, h0_global

logger = logging.getLogger(__name__)


def check_membership(A: Hyperweb, r: int, trials: Optional[int] = None, ext_degree: Optional[int] = None,
                     seed: int = 0) -> MembershipReport:
    """Conditions (i) rank, (ii) fiberwise surjectivity, (iii) h^0(E) = 0 for MI_{N,r}"""
    trials = settings.FIBER_TRIALS if trials is None else trials
    ext_degree = settings.EXT_DEGREE if ext_degree is None else ext_degree
    field = A.field
    required = 2 * A.N + 2 * r
    rank = field.rank(A.matrix)
    condition_i = ConditionOneResult(rank_found=rank, required=required, passed=rank == required and r >= 0)
    logger.info(f"Membership of charge {A.N} in MI_(N,{r}): rank {rank}, required {required}")

    if not condition_i.passed:
        condition_ii = FiberCheckVerdict(
            condition=FiberCheck.B_SURJECTIVE, passed=False, trials=trials, trials_run=0, required_rank=A.N,
            prime=field.p, ext_degree=ext_degree, note="not evaluated: condition (i) fails",
        )
        return MembershipReport(N=A.N, r=r, condition_i=condition_i, condition_ii=condition_ii,
                                condition_iii=ConditionThreeResult(passed=False), overall=False)

    monad = build_monad(A, r)
    condition_ii = fiberwise_rank_check(monad, FiberCheck.B_SURJECTIVE, trials, ext_degree, seed)
    h0 = h0_global(monad)
    condition_iii = ConditionThreeResult(h0=h0, passed=h0 == 0)
    overall = condition_ii.passed and condition_iii.passed
    if not overall:
        logger.warning(f"Charge {A.N} hyperweb fails membership: (ii)={condition_ii.passed}, h0={h0}")
    return MembershipReport(N=A.N, r=r, condition_i=condition_i, condition_ii=condition_ii,
                            condition_iii=condition_iii, overall=overall)


def property_star(A: Hyperweb, n: int, trials: Optional[int] = None, seed: int = 0) -> StarCertificate:
    """Search for an injection i: H_n -> H_N with restrict(A, i) invertible"""
    trials = settings.STAR_TRIALS if trials is None else trials
    field = A.field
    N = A.N
    r = 2 * n - N
    if not 1 <= r <= n:
        raise ParameterError(f"property (*) needs 1 <= r <= n, got n={n}, N={N} (r={r})")
    if trials < 1:
        raise ParameterError("property (*) search needs at least one trial")

    for trial in range(trials):
        if trial == 0:
            inclusion = field.identity(N)[:, :n]
        else:
            inclusion = field.random_injection(make_rng(seed, trial), N, n)
        if field.is_invertible(restrict(A, inclusion).matrix):
            logger.info(f"Property (*) witness for charge {N} at trial {trial}")
            return StarCertificate(
                n=n, N=N, r=r, found=True, verdict=Verdict.PASS,
                witness=[[int(x) for x in row] for row in inclusion], witness_trial=trial, trials_used=trial + 1,
            )
    logger.warning(f"No property (*) witness for charge {N} after {trials} trials")
    return StarCertificate(n=n, N=N, r=r, found=False, verdict=Verdict.INCONCLUSIVE, trials_used=trials)


def verify_star_witness(A: Hyperweb, witness: np.ndarray) -> bool:
    return A.field.is_invertible(restrict(A, np.asarray(witness, dtype=np.int64)).matrix)

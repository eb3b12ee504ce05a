import logging
from math import comb

import numpy as np

from instanton.core.exceptions import ParameterError, RankMismatch
from instanton.models.pydantic_models import DimensionReport, XnrDimensionReport
from instanton.services.hyperweb import Hyperweb, rank_and_kernel
from instanton.utils.tensors import HyperwebCoeffs, SpaceDims, inflate

logger = logging.getLogger(__name__)


def expected_dims(N: int, r: int) -> DimensionReport:
    if r < 1 or N < r:
        raise ParameterError(f"expected dimensions need 1 <= r <= N, got N={N}, r={r}")
    dim_S = SpaceDims(N).dim_S
    eq_count = comb(2 * N - 2 * r, 2)
    expected_I = 4 * N * (r + 1) - r * (2 * r + 1)
    expected_MI = N * N + expected_I
    return DimensionReport(
        N=N, r=r, dim_S=dim_S, eq_count=eq_count, expected_MI=expected_MI, expected_I=expected_I,
        parity_ok=(N - r) % 2 == 0,
        rank_equation_identity=eq_count == 2 * N * N - N * (4 * r + 1) + r * (2 * r + 1)
        and expected_MI == dim_S - eq_count,
    )


def tangent_dimension(A: Hyperweb, r: int) -> DimensionReport:
    """First-order tangent to {rank <= 2N+2r} at A: dot-A with kappa^T dot-A kappa = 0"""
    field = A.field
    N = A.N
    rank, kappa = rank_and_kernel(A)
    if rank != 2 * N + 2 * r:
        raise RankMismatch(rank, 2 * N + 2 * r)
    report = expected_dims(N, r)
    k = kappa.shape[1]
    upper = np.triu_indices(k, 1)
    images = []
    for index in range(report.dim_S):
        unit = inflate(field, HyperwebCoeffs.unit(N, index))
        images.append(field.congruence(unit, kappa)[upper])
    equations = np.array(images, dtype=np.int64).T if k > 1 else field.zeros((0, report.dim_S))
    measured = report.dim_S - field.rank(equations)
    report.measured_tangent = measured
    report.meets_lower_bound = measured >= report.expected_MI
    report.equals_expected = measured == report.expected_MI
    logger.info(f"Tangent at charge {N}, r={r}: measured {measured}, expected {report.expected_MI}")
    return report


def xnr_dimension_chain(n: int, r: int) -> XnrDimensionReport:
    """Dimension bookkeeping of the fibration over the (B, C) data of charge 2n - r"""
    if not 1 <= r <= n:
        raise ParameterError(f"dimension chain needs 1 <= r <= n, got n={n}, r={r}")
    m = n - r
    charge = 2 * n - r
    dim_Z = 4 * m * (m + 2)
    dim_Psi = dim_L = 6 * r * m
    dim_M = 3 * r * (r + 1)
    fibre = m * (4 * n + 2 * r + 8)
    total = charge ** 2 + 4 * charge * (r + 1) - r * (2 * r + 1)
    return XnrDimensionReport(
        n=n, r=r, charge=charge, dim_Z=dim_Z, dim_Psi=dim_Psi, dim_L=dim_L, dim_M=dim_M,
        fibre_bound=fibre, total=total,
        chain_consistent=fibre + dim_L + dim_M == total,
        matches_expected_MI=total == expected_dims(charge, r).expected_MI,
    )

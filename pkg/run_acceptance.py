"""
Acceptance runner for the instanton hyperweb toolkit
Runs every acceptance property at full sample counts and prints a summary
"""

import argparse
import logging
import sys
import time
from functools import lru_cache
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.resolve()))

from instanton.core.field import default_field, make_rng
from instanton.models.pydantic_models import SamplingStrategy
from instanton.services.construct import (
    assemble_from_BC, cdc_block, cdc_direct, nondegenerate_block_trial, random_quintuple,
    random_satisfying_quintuple, sample_bc, sample_invertible, satisfies_tilde_x, scaling_curve,
    tau_restrict_construct
)
from instanton.services.hyperweb import BlockData, Decomposition, Hyperweb, block_decompose, gl_act, reassemble
from instanton.services.membership import check_membership, property_star
from instanton.services.monad import (
    build_monad, chern_check, cohomology_table, coker_presentation_cohomology, quotient_diagram_check
)
from instanton.services.tangent import expected_dims, tangent_dimension
from instanton.utils.tensors import HyperwebCoeffs


def setup_logging():
    logging.basicConfig(level=logging.WARNING, format='%(asctime)s - %(levelname)s - %(message)s')
    return logging.getLogger("acceptance")


logger = setup_logging()
field = default_field()

VACUOUS_CASES = [(2, 1), (3, 2), (4, 3)]


def print_banner():
    print("=" * 60)
    print("INSTANTON HYPERWEB ACCEPTANCE SUITE")
    print(f"Field: F_{field.p}")
    print("=" * 60)


def vacuous_hyperweb(n, r, seed, trials=50):
    return assemble_from_BC(sample_bc(field, n, r, SamplingStrategy.VACUOUS, seed, trials))


@lru_cache(maxsize=None)
def invertible_samples(scale):
    return [(sample_invertible(field, n, seed), n, seed) for n in (1, 2, 3) for seed in range(100 // scale)]


@lru_cache(maxsize=None)
def vacuous_samples(scale):
    return [(vacuous_hyperweb(n, r, seed), r, seed) for n, r in VACUOUS_CASES for seed in range(20 // scale)]


def criterion_invertible(scale):
    failures = 0
    for A, n, seed in invertible_samples(scale):
        ok = (check_membership(A, n, trials=300, ext_degree=2, seed=seed).overall
              and tangent_dimension(A, n).measured_tangent == 3 * n * (n + 1))
        failures += not ok
    return failures == 0, f"{failures} failures"


def criterion_vanishing(scale):
    failures = 0
    instantons = [(A, n) for A, n, _ in invertible_samples(scale)]
    instantons += [(A, r) for A, r, _ in vacuous_samples(scale)]
    for A, r in instantons:
        table = cohomology_table(build_monad(A, r), -2, 0)
        ok = (table.value(0, 0) == 0
              and all(table.value(i, -2) == 0 for i in range(4))
              and table.value(1, -1) == A.N
              and table.value(1, 0) == 2 * A.N - 2 * r)
        failures += not ok
    return failures == 0, f"{len(instantons) - failures}/{len(instantons)} tables"


def criterion_vacuous(scale):
    details = []
    ok = True
    for n, r in VACUOUS_CASES:
        samples = [(A, seed) for A, r_A, seed in vacuous_samples(scale) if A.N == 2 * n - r and r_A == r]
        clause_ii = 0
        for A, seed in samples:
            report = check_membership(A, r, seed=seed)
            ok &= (field.rank(A.matrix) == 4 * n and field.kernel(A.matrix).shape[1] == 4 * (n - r)
                   and report.condition_i.passed and report.condition_iii.passed)
            clause_ii += report.condition_ii.passed
        if clause_ii < len(samples):
            logger.warning(f"(n, r) = ({n}, {r}): clause (ii) failed on {len(samples) - clause_ii} seeds")
        ok &= clause_ii >= len(samples) * 9 // 10
        details.append(f"({n},{r}) {clause_ii}/{len(samples)}")
    return ok, ", ".join(details)


def criterion_block_formula(scale):
    rng = make_rng(4)
    ok = all(np.array_equal(cdc_block(q), cdc_direct(q))
             for q in (random_quintuple(field, 5, 2, rng) for _ in range(100 // scale)))
    return ok, "exact"


def criterion_scaling(scale):
    rng = make_rng(5)
    for _ in range(100 // scale):
        q = random_satisfying_quintuple(field, 5, 2, rng)
        if not all(satisfies_tilde_x(scaling_curve(q, t)) for t in field.random(rng, (10,))):
            return False, "constraint broken along the curve"
        origin = scaling_curve(q, 0)
        if origin.D1 != q.D1 or origin.phi.any() or origin.psi.any() or origin.lam.any() or origin.mu.matrix.any():
            return False, "f(0) is not (D1, 0, 0, 0, 0)"
    return True, "exact"


def criterion_chern(scale):
    return all(chern_check(N) == (0, N) for N in range(1, 11)), "N = 1..10"


def criterion_dimensions(scale):
    ok = all(expected_dims(n, n).expected_I == 2 * n * n + 3 * n
             and expected_dims(n, n).expected_MI == 3 * n * n + 3 * n for n in range(1, 7))
    ok &= all(expected_dims(N, r).expected_MI - expected_dims(N, r).expected_I == N * N
              for N in range(1, 11) for r in range(1, N + 1))
    equal = 0
    seeds = range(10 // scale)
    for seed in seeds:
        report = tangent_dimension(vacuous_hyperweb(3, 2, 1000 + seed), 2)
        ok &= report.meets_lower_bound
        equal += report.equals_expected
    return ok, f"charge-4 tangent equals 54 at {equal}/{len(seeds)} points"


def criterion_cross_presentation(scale):
    for n in range(1, 5):
        for seed in range(20 // scale):
            B = sample_invertible(field, n, 2000 + seed)
            coker = coker_presentation_cohomology(B)
            table = cohomology_table(build_monad(B, n), 0, 1)
            if not (coker.h0 == table.value(0, 0) == 0 and coker.h0_twist1 == table.value(0, 1) == 5 * n):
                return False, f"disagreement at n={n}, seed={seed}"
    return True, "exact"


def criterion_gl_invariance(scale):
    for seed in range(20 // scale):
        A = vacuous_hyperweb(2, 1, 3000 + seed)
        moved = gl_act(A, field.random_invertible(make_rng(seed), A.N))
        if (check_membership(A, 1, seed=seed).overall != check_membership(moved, 1, seed=seed).overall
                or cohomology_table(build_monad(A, 1), -4, 1) != cohomology_table(build_monad(moved, 1), -4, 1)
                or tangent_dimension(A, 1) != tangent_dimension(moved, 1)):
            return False, f"pair {seed} differs"
    return True, "exact"


def corrupted_variants(A, n, rng):
    """Five corruptions of the blocks of A that keep the leading block"""
    blocks = block_decompose(A, Decomposition.identity(field, A.N, n))
    C = blocks.C
    flipped = C.copy()
    # transposing a skew 4 x 4 block negates it
    flipped[0] = (-flipped[0]) % field.p
    noise = Hyperweb.random(field, blocks.A3.N, rng).coeffs.values
    A3 = Hyperweb(field, HyperwebCoeffs(blocks.A3.N, (blocks.A3.coeffs.values + noise) % field.p))
    variants = {
        "A3 noise": BlockData(B=blocks.B, C=C, A3=A3),
        "C noise": BlockData(B=blocks.B, C=(C + field.random(rng, C.shape)) % field.p, A3=blocks.A3),
        "C doubled": BlockData(B=blocks.B, C=(2 * C) % field.p, A3=blocks.A3),
        "C row transposed": BlockData(B=blocks.B, C=flipped, A3=blocks.A3),
        "C rows swapped": BlockData(B=blocks.B, C=C[::-1].copy(), A3=blocks.A3),
    }
    return {kind: reassemble(data) for kind, data in variants.items()}


def criterion_diagram(scale):
    passed = 0
    total = 20 // scale
    for seed in range(total):
        A = vacuous_hyperweb(3, 2, 4000 + seed)
        passed += quotient_diagram_check(A, 3).passed
    variants = corrupted_variants(vacuous_hyperweb(3, 2, 4100), 3, make_rng(6))
    accepted = [kind for kind, corrupted in variants.items() if quotient_diagram_check(corrupted, 3).passed]
    if accepted:
        logger.warning(f"corrupted variants accepted: {', '.join(accepted)}")
    rejected = len(variants) - len(accepted)
    return (passed == total and not accepted,
            f"{passed}/{total} pass, {rejected}/{len(variants)} corruptions rejected")


def criterion_star(scale):
    found = total = 0
    for n, r in VACUOUS_CASES:
        for seed in range(5000, 5000 + 10 // scale):
            found += property_star(vacuous_hyperweb(n, r, seed), n, trials=50).found
            total += 1
    for n, source in [(2, SamplingStrategy.VACUOUS), (3, SamplingStrategy.LINEAR), (4, SamplingStrategy.LINEAR)]:
        A = assemble_from_BC(sample_bc(field, n, 1, source, 5100 + n, trials=50))
        for r_target in range(1, n + 1):
            found += property_star(tau_restrict_construct(A, n, r_target, seed=r_target), n, trials=50).found
            total += 1
    return found == total, f"{found}/{total} certificates"


def criterion_nondegenerate(scale):
    events = 0
    for r in (1, 2):
        for seed in range(20 // scale):
            D = sample_invertible(field, 4, 6000 + seed)
            events += nondegenerate_block_trial(D, r, trials=200 // scale, seed=seed).degenerate
    if events:
        logger.warning(f"{events} degenerate leading blocks observed")
    return events <= 1, f"{events} degenerate events"


CRITERIA = [
    ("MI_(n,n) = S^0_n", criterion_invertible),
    ("Vanishing table", criterion_vanishing),
    ("Vacuous construction", criterion_vacuous),
    ("Block formula", criterion_block_formula),
    ("Scaling curve", criterion_scaling),
    ("Chern accounting", criterion_chern),
    ("Dimension formulas", criterion_dimensions),
    ("Cross-presentation cohomology", criterion_cross_presentation),
    ("GL invariance", criterion_gl_invariance),
    ("Quotient diagram", criterion_diagram),
    ("Property (*)", criterion_star),
    ("Nondegenerate block", criterion_nondegenerate),
]


def main():
    parser = argparse.ArgumentParser(description="Run the acceptance properties")
    parser.add_argument("--quick", action="store_true", help="divide every sample count by 5")
    args = parser.parse_args()
    scale = 5 if args.quick else 1

    print_banner()
    failures = 0
    for number, (name, criterion) in enumerate(CRITERIA, start=1):
        start = time.time()
        passed, detail = criterion(scale)
        failures += not passed
        status = "PASS" if passed else "FAIL"
        print(f"[{status}] {number:>2}. {name:<32} {detail} ({time.time() - start:.1f}s)")
    print("=" * 60)
    print(f"{len(CRITERIA) - failures}/{len(CRITERIA)} criteria passed")
    return 0 if failures == 0 else 1


if __name__ == "__main__":
    sys.exit(main())

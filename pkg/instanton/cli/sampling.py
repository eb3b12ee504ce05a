# instanton/cli/sampling.py

import argparse
import logging

from sympy import isprime

from instanton.core.exceptions import ParameterError
from instanton.core.field import PrimeField
from instanton.models.pydantic_models import SamplingStrategy
from instanton.services.construct import assemble_from_BC, sample_bc, sample_invertible, tau_restrict_construct
from instanton.services.membership import check_membership
from instanton.cli.common import CommandResult, add_output_options, ext_degree, finish, session_field, verdict_of
from instanton.cli.serialization import build_report, dump_hyperweb, hyperweb_to_file, write_text

logger = logging.getLogger(__name__)


def sample_field(prime):
    if prime is None:
        return session_field()
    if prime == 2 or prime >= 2 ** 31 or not isprime(prime):
        raise ParameterError(f"--prime must be an odd prime below 2^31, got {prime}")
    return PrimeField(prime)


def cmd_sample(args: argparse.Namespace) -> CommandResult:
    """Sample an instanton hyperweb and report its membership verdict"""
    field = sample_field(args.prime)
    strategy = SamplingStrategy(args.strategy)
    n, seed = args.n, args.seed
    r = n if args.r is None and strategy == SamplingStrategy.INVERTIBLE else args.r
    if r is None:
        raise ParameterError(f"--r is required for strategy {strategy.value}")
    degree = ext_degree(args.ext)
    sections = {}

    if strategy == SamplingStrategy.INVERTIBLE:
        if r != n:
            raise ParameterError(f"invertible sampling produces (n, n)-instantons, got r={r}")
        A = sample_invertible(field, n, seed)
    elif strategy == SamplingStrategy.TAU_RESTRICT:
        source_strategy = SamplingStrategy.VACUOUS if n <= 2 else SamplingStrategy.LINEAR
        bc = sample_bc(field, n, 1, source_strategy, seed, args.trials, degree)
        sections["source_bc"] = bc.report
        A = tau_restrict_construct(assemble_from_BC(bc), n, r, seed)
    else:
        bc = sample_bc(field, n, r, strategy, seed, args.trials, degree)
        sections["bc"] = bc.report
        A = assemble_from_BC(bc)

    membership = check_membership(A, r, args.trials, degree, seed)
    if args.out:
        write_text(args.out, dump_hyperweb(A, degree))
    else:
        sections["hyperweb"] = hyperweb_to_file(A, degree)
    logger.info(f"Sampled charge-{A.N} hyperweb ({strategy.value}); membership {membership.overall}")
    parameters = {"n": n, "r": r, "strategy": strategy.value, "prime": field.p, "trials": args.trials, "ext": degree}
    report = build_report("sample", verdict_of(membership.overall), "sample", parameters, seed,
                          membership=membership, **sections)
    return finish(report, args)


def register(subparsers):
    parser = subparsers.add_parser("sample", help="sample an (n, r)-instanton hyperweb")
    parser.add_argument("--n", type=int, required=True)
    parser.add_argument("--r", type=int)
    parser.add_argument("--strategy", choices=[s.value for s in SamplingStrategy], default="invertible")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--prime", type=int)
    parser.add_argument("--trials", type=int)
    parser.add_argument("--ext", type=int)
    add_output_options(parser, hyperweb_out=True)
    parser.set_defaults(handler=cmd_sample)

# instanton/cli/analysis.py

import argparse
import logging

from instanton.services.construct import nondegenerate_block_trial
from instanton.services.membership import check_membership, property_star
from instanton.services.monad import (
    build_monad, cohomology_table, coker_presentation_cohomology, h0_global, h1_tensor_omega, quotient_diagram_check
)
from instanton.services.tangent import expected_dims, tangent_dimension, xnr_dimension_chain
from instanton.cli.common import (
    CommandResult, add_output_options, ext_degree, finish, infer_r, load_input, load_input_with_degree, verdict_of
)
from instanton.cli.serialization import build_report

logger = logging.getLogger(__name__)


def cmd_verify(args: argparse.Namespace) -> CommandResult:
    A, file_degree = load_input_with_degree(args)
    r = infer_r(A, args.r, strict=False)
    degree = ext_degree(file_degree if args.ext is None else args.ext)
    membership = check_membership(A, r, args.trials, degree, args.seed)
    parameters = {"file": args.file, "r": r, "trials": args.trials, "ext": degree}
    return finish(build_report("membership", verdict_of(membership.overall), "verify", parameters, args.seed,
                               membership=membership), args)


def cmd_cohomology(args: argparse.Namespace) -> CommandResult:
    A = load_input(args)
    r = infer_r(A, args.r)
    monad = build_monad(A, r)
    table = cohomology_table(monad, args.tmin, args.tmax)
    consistent = table.euler == table.riemann_roch and all(v >= 0 for row in table.h for v in row)
    sections = {"cohomology": table}
    if h0_global(monad) == 0:
        sections["h1_tensor_omega"] = h1_tensor_omega(monad)
        consistent = consistent and sections["h1_tensor_omega"] == monad.W_dim
    if r == A.N:
        sections["cokernel_route"] = coker_presentation_cohomology(A)
    parameters = {"file": args.file, "r": r, "tmin": args.tmin, "tmax": args.tmax}
    return finish(build_report("cohomology", verdict_of(consistent), "cohomology", parameters, None,
                               **sections), args)


def cmd_tangent(args: argparse.Namespace) -> CommandResult:
    A = load_input(args)
    r = infer_r(A, args.r)
    dims = tangent_dimension(A, r)
    parameters = {"file": args.file, "r": r}
    return finish(build_report("tangent", verdict_of(dims.meets_lower_bound), "tangent", parameters, None,
                               dimensions=dims), args)


def cmd_star(args: argparse.Namespace) -> CommandResult:
    A = load_input(args)
    certificate = property_star(A, args.n, args.trials, args.seed)
    parameters = {"file": args.file, "n": args.n, "trials": args.trials}
    return finish(build_report("star", certificate.verdict, "star", parameters, args.seed,
                               certificate=certificate), args)


def cmd_diagram(args: argparse.Namespace) -> CommandResult:
    A = load_input(args)
    result = quotient_diagram_check(A, args.n)
    parameters = {"file": args.file, "n": args.n}
    return finish(build_report("diagram", verdict_of(result.passed), "diagram", parameters, None,
                               diagram=result), args)


def cmd_nondeg(args: argparse.Namespace) -> CommandResult:
    D = load_input(args)
    stats = nondegenerate_block_trial(D, args.r, args.trials, args.seed, args.aligned)
    parameters = {"file": args.file, "r": args.r, "trials": stats.trials, "aligned": args.aligned}
    return finish(build_report("nondeg", verdict_of(stats.degenerate == 0), "nondeg", parameters, args.seed,
                               statistics=stats), args)


def cmd_dims(args: argparse.Namespace) -> CommandResult:
    dims = expected_dims(args.charge, args.r)
    sections = {"dimensions": dims}
    consistent = dims.rank_equation_identity
    if dims.parity_ok:
        chain = xnr_dimension_chain((args.charge + args.r) // 2, args.r)
        sections["chain"] = chain
        consistent = consistent and chain.chain_consistent and chain.matches_expected_MI
    parameters = {"charge": args.charge, "r": args.r}
    return finish(build_report("dims", verdict_of(consistent), "dims", parameters, None, **sections), args)


def register(subparsers):
    verify = subparsers.add_parser("verify", help="check membership in MI_(N,r)")
    verify.add_argument("file")
    verify.add_argument("--r", type=int)
    verify.add_argument("--trials", type=int)
    verify.add_argument("--ext", type=int)
    verify.add_argument("--seed", type=int, default=0)
    add_output_options(verify)
    verify.set_defaults(handler=cmd_verify)

    cohomology = subparsers.add_parser("cohomology", help="table of h^i(E(t))")
    cohomology.add_argument("file")
    cohomology.add_argument("--r", type=int)
    cohomology.add_argument("--tmin", type=int, default=-4)
    cohomology.add_argument("--tmax", type=int, default=1)
    add_output_options(cohomology)
    cohomology.set_defaults(handler=cmd_cohomology)

    tangent = subparsers.add_parser("tangent", help="tangent dimension against the expected dimension")
    tangent.add_argument("file")
    tangent.add_argument("--r", type=int)
    add_output_options(tangent)
    tangent.set_defaults(handler=cmd_tangent)

    star = subparsers.add_parser("star", help="search for a property (*) witness")
    star.add_argument("file")
    star.add_argument("--n", type=int, required=True)
    star.add_argument("--trials", type=int)
    star.add_argument("--seed", type=int, default=0)
    add_output_options(star)
    star.set_defaults(handler=cmd_star)

    diagram = subparsers.add_parser("diagram", help="check the quotient monad diagram along H_n")
    diagram.add_argument("file")
    diagram.add_argument("--n", type=int, required=True)
    add_output_options(diagram)
    diagram.set_defaults(handler=cmd_diagram)

    nondeg = subparsers.add_parser("nondeg", help="leading-block nondegeneracy over random decompositions")
    nondeg.add_argument("file")
    nondeg.add_argument("--r", type=int, required=True)
    nondeg.add_argument("--trials", type=int)
    nondeg.add_argument("--seed", type=int, default=0)
    nondeg.add_argument("--aligned", action="store_true")
    add_output_options(nondeg)
    nondeg.set_defaults(handler=cmd_nondeg)

    dims = subparsers.add_parser("dims", help="expected dimension formulas")
    dims.add_argument("--charge", type=int, required=True)
    dims.add_argument("--r", type=int, required=True)
    add_output_options(dims)
    dims.set_defaults(handler=cmd_dims)

# instanton/cli/transforms.py

import argparse
import logging

import numpy as np

from instanton.core.exceptions import ParameterError
from instanton.core.field import PrimeField, make_rng
from instanton.models.pydantic_models import Verdict
from instanton.services.hyperweb import gl_act, restrict
from instanton.cli.common import CommandResult, add_output_options, finish, load_input
from instanton.cli.serialization import build_report, dump_hyperweb, hyperweb_to_file, write_text

logger = logging.getLogger(__name__)


def parse_tau_spec(spec: str, field: PrimeField, M: int) -> np.ndarray:
    """coords:i0,i1,... | matrix:row;row;... | random:M':seed, as an M x M' column-convention matrix"""
    kind, _, body = spec.partition(":")
    try:
        if kind == "coords":
            indices = [int(i) for i in body.split(",")]
            if any(not 0 <= i < M for i in indices):
                raise ParameterError(f"coordinate out of range for charge {M}: {body}")
            return field.identity(M)[:, indices]
        if kind == "matrix":
            rows = [[int(x) for x in row.split(",")] for row in body.split(";")]
            if len(rows) != M or len({len(row) for row in rows}) != 1:
                raise ParameterError(f"matrix tau needs {M} rows of equal length")
            return field.reduce(rows)
        if kind == "random":
            width, seed = (int(x) for x in body.split(":"))
            return field.random_injection(make_rng(seed), M, width)
    except ValueError as e:
        raise ParameterError(f"malformed --tau-spec {spec!r}: {e}") from e
    raise ParameterError(f"unknown --tau-spec kind {kind!r}; expected coords, matrix or random")


def _emit(A, args, sections):
    if args.out:
        write_text(args.out, dump_hyperweb(A))
    else:
        sections["hyperweb"] = hyperweb_to_file(A)


def cmd_gl(args: argparse.Namespace) -> CommandResult:
    A = load_input(args)
    g = A.field.random_invertible(make_rng(args.seed), A.N)
    moved = gl_act(A, g)
    sections = {"g": [[int(x) for x in row] for row in g]}
    _emit(moved, args, sections)
    logger.info(f"Applied a random GL({A.N}) element (seed {args.seed})")
    report = build_report("gl", Verdict.PASS, "gl", {"file": args.file}, args.seed, **sections)
    return finish(report, args)


def cmd_restrict(args: argparse.Namespace) -> CommandResult:
    A = load_input(args)
    tau = parse_tau_spec(args.tau_spec, A.field, A.N)
    restricted = restrict(A, tau)
    sections = {"tau": [[int(x) for x in row] for row in tau]}
    _emit(restricted, args, sections)
    report = build_report("restrict", Verdict.PASS, "restrict", {"file": args.file, "tau_spec": args.tau_spec},
                          None, **sections)
    return finish(report, args)


def register(subparsers):
    gl = subparsers.add_parser("gl", help="apply a random element of GL(H_N)")
    gl.add_argument("file")
    gl.add_argument("--seed", type=int, default=0)
    add_output_options(gl, hyperweb_out=True)
    gl.set_defaults(handler=cmd_gl)

    restriction = subparsers.add_parser("restrict", help="pull back along tau: H_M' -> H_M")
    restriction.add_argument("file")
    restriction.add_argument("--tau-spec", required=True)
    add_output_options(restriction, hyperweb_out=True)
    restriction.set_defaults(handler=cmd_restrict)

import argparse
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

from instanton.config import settings
from instanton.core.exceptions import ParameterError
from instanton.core.field import PrimeField, default_field
from instanton.models.pydantic_models import ReportFile, Verdict
from instanton.services.hyperweb import Hyperweb
from instanton.cli.serialization import dump_report, load_hyperweb, load_hyperweb_file, write_text

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3

VERDICT_EXIT = {Verdict.PASS: EXIT_PASS, Verdict.FAIL: EXIT_FAIL, Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE}


@dataclass
class CommandResult:
    report: Optional[ReportFile]
    exit_code: int
    text: Optional[str] = None


def verdict_of(passed: bool) -> Verdict:
    return Verdict.PASS if passed else Verdict.FAIL


def finish(report: ReportFile, args: argparse.Namespace) -> CommandResult:
    """Write the report where asked and map its verdict onto an exit status"""
    text = dump_report(report)
    if getattr(args, "report", None):
        write_text(args.report, text)
        text = None
    return CommandResult(report=report, exit_code=VERDICT_EXIT[report.verdict], text=text)


def session_field() -> PrimeField:
    return default_field()


def load_input_with_degree(args: argparse.Namespace) -> Tuple[Hyperweb, Optional[int]]:
    """The hyperweb and the extension degree its file sets, if any"""
    A, data = load_hyperweb_file(args.file, session_field())
    return A, data.ext_degree if "ext_degree" in data.model_fields_set else None


def load_input(args: argparse.Namespace) -> Hyperweb:
    return load_hyperweb(args.file, session_field())


def add_output_options(parser: argparse.ArgumentParser, hyperweb_out: bool = False):
    parser.add_argument("--report", help="write the report file here instead of stdout")
    if hyperweb_out:
        parser.add_argument("--out", help="write the resulting hyperweb file here")


def ext_degree(value: Optional[int]) -> int:
    degree = settings.EXT_DEGREE if value is None else value
    if not 1 <= degree <= settings.MAX_EXT_DEGREE:
        raise ParameterError(f"extension degree must lie in [1, {settings.MAX_EXT_DEGREE}], got {degree}")
    return degree


def infer_r(A: Hyperweb, r: Optional[int], strict: bool = True) -> int:
    """Half-rank from the rank of A when not given: rank = 2N + 2r

    With strict=False a rank of the wrong form maps to the nearest admissible r
    so that the rank condition reports the failure.
    """
    if r is not None:
        return r
    excess = A.field.rank(A.matrix) - 2 * A.N
    if excess >= 0 and excess % 2 == 0:
        return excess // 2
    if strict:
        raise ParameterError(f"rank of the charge-{A.N} hyperweb does not have the form 2N + 2r; pass --r")
    fallback = max(0, -(-excess // 2))
    logger.warning(f"Rank of the charge-{A.N} hyperweb is 2N{excess:+d}; checking against r={fallback}")
    return fallback

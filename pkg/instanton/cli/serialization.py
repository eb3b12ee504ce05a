# instanton/cli/serialization.py

import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ValidationError

from instanton.config import settings
from instanton.core.exceptions import FileFormatError, PrimeMismatch
from instanton.core.field import PrimeField
from instanton.models.pydantic_models import CoeffEntry, HyperwebFile, Provenance, ReportFile, Verdict
from instanton.services.hyperweb import Hyperweb
from instanton.utils.tensors import WEDGE_PAIRS, HyperwebCoeffs, sym_pairs

logger = logging.getLogger(__name__)

_WEDGE_INDEX = {pair: k for k, pair in enumerate(WEDGE_PAIRS)}


def hyperweb_to_file(A: Hyperweb, ext_degree: int = 1) -> HyperwebFile:
    entries = [CoeffEntry(i=i, j=j, a=a, b=b, value=str(value)) for i, j, a, b, value in A.coeffs.entries()]
    return HyperwebFile(format_version=settings.FORMAT_VERSION, prime=A.field.p, ext_degree=ext_degree,
                        charge=A.N, coeffs=entries)


def dump_hyperweb(A: Hyperweb, ext_degree: int = 1) -> str:
    return hyperweb_to_file(A, ext_degree).model_dump_json(indent=2) + "\n"


def _format_validation_error(error: ValidationError) -> str:
    details = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "<root>"
        details.append(f"{location}: {item['msg']}")
    return "; ".join(details)


def parse_hyperweb_file(text: str, field: PrimeField) -> Tuple[Hyperweb, HyperwebFile]:
    """Parse a hyperweb file, checking canonical order and the session prime"""
    try:
        data = HyperwebFile.model_validate_json(text)
    except ValidationError as e:
        raise FileFormatError(_format_validation_error(e)) from e
    if data.format_version != settings.FORMAT_VERSION:
        raise FileFormatError(f"format_version: unsupported version {data.format_version!r}")
    if data.prime != field.p:
        raise PrimeMismatch(f"file prime {data.prime} differs from session prime {field.p}")

    N = data.charge
    row_index = {pair: k for k, pair in enumerate(sym_pairs(N))}
    values = np.zeros((len(row_index), len(WEDGE_PAIRS)), dtype=np.int64)
    previous = None
    for position, entry in enumerate(data.coeffs):
        key = (entry.i, entry.j, entry.a, entry.b)
        if entry.j >= N:
            raise FileFormatError(f"coeffs.{position}: index j={entry.j} out of range for charge {N}")
        if previous is not None and key <= previous:
            raise FileFormatError(f"coeffs.{position}: entry {key} breaks canonical (i, j, a, b) order")
        value = int(entry.value)
        if value >= field.p:
            raise FileFormatError(f"coeffs.{position}.value: {value} is not a residue modulo {field.p}")
        values[row_index[(entry.i, entry.j)], _WEDGE_INDEX[(entry.a, entry.b)]] = value
        previous = key
    return Hyperweb(field, HyperwebCoeffs(N, values)), data


def parse_hyperweb(text: str, field: PrimeField) -> Hyperweb:
    return parse_hyperweb_file(text, field)[0]


def load_hyperweb_file(path: str, field: PrimeField) -> Tuple[Hyperweb, HyperwebFile]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise FileFormatError(f"{path}: {e.strerror}") from e
    return parse_hyperweb_file(text, field)


def load_hyperweb(path: str, field: PrimeField) -> Hyperweb:
    return load_hyperweb_file(path, field)[0]


def build_report(kind: str, verdict: Verdict, command: str, parameters: Dict[str, Any], seed: Optional[int],
                 **sections: Any) -> ReportFile:
    return ReportFile(
        format_version=settings.FORMAT_VERSION,
        kind=kind,
        verdict=verdict,
        provenance=Provenance(command=command, parameters=parameters, seed=seed,
                              library_version=settings.LIBRARY_VERSION),
        report={name: section.model_dump(mode="json") if isinstance(section, BaseModel) else section
                for name, section in sections.items()},
    )


def dump_report(report: ReportFile) -> str:
    return report.model_dump_json(indent=2) + "\n"


def write_text(path: str, text: str):
    target = Path(path)
    if target.parent and not target.parent.exists():
        target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")

# instanton/models/pydantic_models.py

from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from instanton.config import settings


# Enums
class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


class FiberCheck(str, Enum):
    A_INJECTIVE = "a-injective"
    B_SURJECTIVE = "b-surjective"
    TAU_BC = "tau-bc"
    RHO_BC = "rho-bc"


class SamplingStrategy(str, Enum):
    INVERTIBLE = "invertible"
    VACUOUS = "vacuous"
    ANSATZ = "ansatz"
    LINEAR = "linear"
    TAU_RESTRICT = "tau-restrict"


# Verdicts
class FiberCheckVerdict(BaseModel):
    condition: FiberCheck
    passed: bool
    trials: int
    trials_run: int
    required_rank: int
    witness_trial: Optional[int] = None
    witness_point: Optional[List[List[int]]] = None
    witness_rank: Optional[int] = None
    prime: int
    ext_degree: int = Field(default=1, ge=1, le=settings.MAX_EXT_DEGREE)
    note: str = ""


class ConditionOneResult(BaseModel):
    rank_found: int
    required: int
    passed: bool


class ConditionThreeResult(BaseModel):
    h0: Optional[int] = None
    passed: bool


class MembershipReport(BaseModel):
    N: int
    r: int
    condition_i: ConditionOneResult
    condition_ii: FiberCheckVerdict
    condition_iii: ConditionThreeResult
    overall: bool

    @model_validator(mode="after")
    def check_overall(self) -> "MembershipReport":
        expected = self.condition_i.passed and self.condition_ii.passed and self.condition_iii.passed
        if self.overall != expected:
            raise ValueError("overall verdict must be the conjunction of the three conditions")
        return self


class CohomologyTable(BaseModel):
    """h[i][k] = h^i(E(twists[k]))"""
    N: int
    r: int
    tmin: int
    tmax: int
    twists: List[int]
    h: List[List[int]]
    euler: List[int]
    riemann_roch: List[int]
    direct_twists: List[int]

    def value(self, i: int, t: int) -> int:
        return self.h[i][self.twists.index(t)]


class DimensionReport(BaseModel):
    N: int
    r: int
    dim_S: int
    eq_count: int
    expected_MI: int
    expected_I: int
    measured_tangent: Optional[int] = None
    meets_lower_bound: Optional[bool] = None
    equals_expected: Optional[bool] = None
    parity_ok: bool
    rank_equation_identity: bool


class XnrDimensionReport(BaseModel):
    n: int
    r: int
    charge: int
    dim_Z: int
    dim_Psi: int
    dim_L: int
    dim_M: int
    fibre_bound: int
    total: int
    chain_consistent: bool
    matches_expected_MI: bool


class StarCertificate(BaseModel):
    n: int
    N: int
    r: int
    found: bool
    verdict: Verdict
    witness: Optional[List[List[int]]] = None
    witness_trial: Optional[int] = None
    trials_used: int


class NondegenerateBlockStats(BaseModel):
    n: int
    r: int
    trials: int
    aligned: bool
    degenerate: int
    nondegenerate_fraction: float
    first_degenerate_trial: Optional[int] = None


class BCSampleReport(BaseModel):
    n: int
    r: int
    strategy: SamplingStrategy
    attempts: int
    rejections: Dict[str, int] = {}
    condition_ir: bool
    tau_check: Optional[FiberCheckVerdict] = None
    rho_check: Optional[FiberCheckVerdict] = None


class DiagramCheckResult(BaseModel):
    n: int
    N: int
    r: int
    b_invertible: bool
    rank_found: int
    rank_ok: bool
    form_identity: bool = False
    square_identity: bool = False
    passed: bool


class CokerCohomology(BaseModel):
    n: int
    omega1_sections: int
    omega2_sections: int
    sharp_rank: int
    h0: int
    h0_twist1: int


# Files
class CoeffEntry(BaseModel):
    i: int = Field(..., ge=0)
    j: int = Field(..., ge=0)
    a: int = Field(..., ge=0, le=3)
    b: int = Field(..., ge=0, le=3)
    value: str

    @field_validator("value")
    @classmethod
    def check_value(cls, value: str) -> str:
        if not value.isdigit():
            raise ValueError(f"coefficient must be a decimal residue, got {value!r}")
        return value

    @model_validator(mode="after")
    def check_indices(self) -> "CoeffEntry":
        if self.i > self.j or self.a >= self.b:
            raise ValueError(f"indices must satisfy i <= j and a < b, got ({self.i}, {self.j}, {self.a}, {self.b})")
        return self


class HyperwebFile(BaseModel):
    format_version: str = "1"
    prime: int
    ext_degree: int = Field(default=1, ge=1, le=settings.MAX_EXT_DEGREE)
    charge: int = Field(..., ge=1)
    coeffs: List[CoeffEntry] = []


class Provenance(BaseModel):
    command: str
    parameters: Dict[str, Any]
    seed: Optional[int] = None
    library_version: str


class ReportFile(BaseModel):
    format_version: str = "1"
    kind: str
    verdict: Verdict
    provenance: Provenance
    report: Dict[str, Any]


# Ledger
class RunSummary(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    id: int
    uuid: str
    command: str
    seed: Optional[int] = None
    verdict: str
    exit_code: int
    execution_time_ms: int
    memory_usage_mb: float
    created_at: Optional[datetime] = None

from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped"


class CheckResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str = Field(..., description="Check name, e.g. check_prelim")
    status: CheckStatus
    witness: Optional[Dict[str, Any]] = Field(None, description="Counterexample, present iff status is fail")
    note: Optional[str] = Field(None, description="Vacuous passes, exclusions and skip reasons")
    elapsed: float = Field(0.0, ge=0, description="Seconds; emitted only in report metadata")

    @model_validator(mode="after")
    def _witness_iff_fail(self) -> "CheckResult":
        if (self.witness is not None) != (self.status == CheckStatus.FAIL):
            raise ValueError("a witness is present exactly when the check fails")
        return self


class VerificationReport(BaseModel):
    """Outcome of verifying one group."""

    model_config = ConfigDict(frozen=True)

    group: Tuple[int, ...] = Field(..., description="Invariant factors")
    raw_factors: Optional[Tuple[int, ...]] = Field(None, description="Factor list as typed, with --raw")
    checks: List[CheckResult] = Field(default_factory=list)
    aut_g_order: int = Field(..., ge=1)
    aut_p0g_order: Optional[int] = Field(None, ge=1, description="None when the enumeration was skipped")
    exceptional: bool = Field(..., description="True iff the group is C2 + C2")

    @property
    def passed(self) -> bool:
        return all(c.status != CheckStatus.FAIL for c in self.checks)

    @property
    def skipped(self) -> bool:
        return any(c.status == CheckStatus.SKIPPED for c in self.checks)


class Command(str, Enum):
    AUT = "aut"
    VERIFY = "verify"
    LEMMAS = "lemmas"
    TABLE = "table"


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"
    TEXT = "text"


class CliConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    command: Command
    group: Optional[Tuple[int, ...]] = Field(None, description="Invariant factors after normalization")
    raw_factors: Optional[Tuple[int, ...]] = Field(None, description="Factors exactly as given")
    max_order: Optional[int] = Field(None, ge=1)
    format: OutputFormat = OutputFormat.TEXT
    out: Optional[str] = Field(None, description="Output file; stdout when absent")
    budget: int = Field(..., ge=1, description="Search node budget")
    parallelism: int = Field(1, ge=1)
    emit_maps: bool = False
    strict: bool = False
    raw: bool = False
    log_level: str = "WARNING"

    @model_validator(mode="after")
    def _required_arguments(self) -> "CliConfig":
        if self.command == Command.VERIFY and self.max_order is None:
            raise ValueError("verify needs --max-order")
        if self.command != Command.VERIFY and self.group is None:
            raise ValueError(f"{self.command.value} needs --group")
        return self

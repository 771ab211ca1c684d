from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, validator

from . import __version__
from . import settings


class AmbientConfig(BaseModel):
    """Universe constants: n_tot fixes N = 2^n_tot, M = N/2 - 1 and L = 2^N"""

    n_tot: int = Field(settings.DEFAULT_N_TOT, ge=2, le=5, description="Number of universe bits")

    class Config:
        frozen = True

    @property
    def N(self) -> int:
        return 2 ** self.n_tot

    @property
    def M(self) -> int:
        return self.N // 2 - 1

    @property
    def L(self) -> int:
        return 2 ** self.N

    @property
    def R_max(self) -> int:
        # finest root is the 2^(n_tot - N) power
        return self.N - self.n_tot

    @property
    def lattice_size(self) -> int:
        return 4 * 2 ** self.R_max

    def summary(self) -> Dict[str, int]:
        return {"n_tot": self.n_tot, "N": self.N, "M": self.M, "L": self.L, "R_max": self.R_max}


ExperimentKind = Literal["sg-chain", "bell", "ghz", "precession", "verify", "niven", "defined", "pow"]


class ExperimentSpec(BaseModel):
    kind: ExperimentKind
    parameters: Dict[str, Any] = Field(default_factory=dict)
    seed: int = Field(settings.DEFAULT_SEED, ge=0, description="Base RNG seed")
    samples: int = Field(settings.DEFAULT_SAMPLES, ge=1, le=10_000_000, description="Monte-Carlo draws")
    workers: int = Field(settings.DEFAULT_WORKERS, ge=1, le=64)
    config: AmbientConfig = Field(default_factory=AmbientConfig)


class ReportRow(BaseModel):
    """One line of an experiment report.

    Exact values and Monte-Carlo estimates live in separate fields; an
    empirical entry must carry its sample count.
    """

    section: str
    quantity: str
    exact: Optional[str] = None
    decimal: Optional[str] = None
    empirical: Optional[str] = None
    samples: Optional[int] = None
    verdict: Optional[str] = None
    detail: Optional[str] = None

    @validator('samples', always=True)
    def validate_samples(cls, v, values):
        if values.get('empirical') is not None and v is None:
            raise ValueError('Empirical entries must carry a sample count')
        return v


class ExperimentReport(BaseModel):
    kind: ExperimentKind
    seed: int
    samples: int
    config: Dict[str, int]
    parameters: Dict[str, Any] = Field(default_factory=dict)
    version: str = __version__
    rows: List[ReportRow] = Field(default_factory=list)

    def add(self, section: str, quantity: str, exact: Optional[Fraction] = None, **kwargs) -> ReportRow:
        if exact is not None:
            kwargs.setdefault('decimal', format_decimal(exact))
            exact = format_fraction(exact)
        row = ReportRow(section=section, quantity=quantity, exact=exact, **kwargs)
        self.rows.append(row)
        return row

    @property
    def failures(self) -> List[ReportRow]:
        return [row for row in self.rows if row.verdict == "fail"]

    def metadata(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "seed": self.seed,
            "samples": self.samples,
            "config": self.config,
            "parameters": self.parameters,
            "version": self.version,
        }


def format_fraction(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_decimal(x) -> str:
    return f"{float(x):.12f}"

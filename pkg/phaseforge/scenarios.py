"""
Builders for the three worked examples.

Each builder turns domain-level rates into a validated Realization.
Scenario names are the ones the command line accepts.
"""
from dataclasses import dataclass
from typing import Callable, Dict, Mapping, Optional, Tuple, Type, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from phaseforge.errors import InvalidRates, UsageError
from phaseforge.models import Realization, SystemKind

# Slack on the sum of competing rates.
RATE_TOL = 1e-12


def _check_sum(names: str, total: float):
    if total > 1.0 + RATE_TOL:
        raise ValueError(f"{names} = {total:.12g} exceeds 1")


class StudentRates(BaseModel):
    """Yearly promotion (xi) and failure (beta) rates per grade; the rest drops out."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    xi1: float = Field(0.6, ge=0, le=1)
    xi2: float = Field(0.8, ge=0, le=1)
    xi3: float = Field(0.9, ge=0, le=1)
    beta1: float = Field(0.2, ge=0, le=1)
    beta2: float = Field(0.15, ge=0, le=1)
    beta3: float = Field(0.08, ge=0, le=1)

    @model_validator(mode="after")
    def grades_conserve_students(self):
        for i, (xi, beta) in enumerate(zip(self.promote, self.fail), start=1):
            _check_sum(f"xi{i} + beta{i}", xi + beta)
        return self

    @property
    def promote(self) -> Tuple[float, float, float]:
        return self.xi1, self.xi2, self.xi3

    @property
    def fail(self) -> Tuple[float, float, float]:
        return self.beta1, self.beta2, self.beta3

    def dropout(self) -> Tuple[float, float, float]:
        return tuple(1.0 - x - b for x, b in zip(self.promote, self.fail))


class SupplyRates(BaseModel):
    """
    Monthly rates of a supplier -> producer -> retailer chain.

    delta: discarded at supplier/producer, xi: shipped onward,
    beta3: returned by the retailer, gamma3: sold to customers.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    delta1: float = Field(0.15, ge=0, le=1)
    delta2: float = Field(0.08, ge=0, le=1)
    xi1: float = Field(0.6, ge=0, le=1)
    xi2: float = Field(0.8, ge=0, le=1)
    beta3: float = Field(0.05, ge=0, le=1)
    gamma3: float = Field(0.8, ge=0, le=1)

    @model_validator(mode="after")
    def stages_conserve_material(self):
        _check_sum("xi1 + delta1", self.xi1 + self.delta1)
        _check_sum("xi2 + delta2", self.xi2 + self.delta2)
        _check_sum("beta3 + gamma3", self.beta3 + self.gamma3)
        return self


def student_dynamics(rates: StudentRates) -> Realization:
    """Three-grade enrolment: freshmen enter grade 1, graduates leave grade 3."""
    xi1, xi2, xi3 = rates.promote
    beta1, beta2, beta3 = rates.fail
    return Realization(
        kind=SystemKind.DISCRETE,
        A=[[beta1, 0.0, 0.0], [xi1, beta2, 0.0], [0.0, xi2, beta3]],
        B=[1.0, 0.0, 0.0],
        C=[0.0, 0.0, xi3],
    )


def supply_chain(rates: SupplyRates) -> Realization:
    """Raw material purchased monthly flows supplier -> producer -> retailer -> customer."""
    r = rates
    return Realization(
        kind=SystemKind.DISCRETE,
        A=[
            [1.0 - r.xi1 - r.delta1, 0.0, 0.0],
            [r.xi1, 1.0 - r.xi2 - r.delta2, r.beta3],
            [0.0, r.xi2, 1.0 - r.beta3 - r.gamma3],
        ],
        B=[1.0, 0.0, 0.0],
        C=[0.0, 0.0, r.gamma3],
    )


def continuous_example() -> Realization:
    """
    Third-order continuous system with upper-bidiagonal A.

    The (2, 3) entry of A is 1; it is the only value consistent with the
    published scaling vector (1.5, 2, 1, 1) and exit rates (2/3, 1/2, 1).
    """
    return Realization(
        kind=SystemKind.CONTINUOUS,
        A=[[-2.0, 1.0, 0.0], [0.0, -1.0, 1.0], [0.0, 0.0, -1.0]],
        B=[1.0, 1.0, 1.0],
        C=[1.0, 0.0, 0.0],
    )


@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    rates: Optional[Type[BaseModel]]
    build: Callable[..., Realization]
    default_u: float
    default_grid: str


SCENARIOS: Dict[str, Scenario] = {
    "student": Scenario(
        name="student",
        description="three-grade student flow (discrete, years)",
        rates=StudentRates,
        build=student_dynamics,
        default_u=50.0,
        default_grid="0..10",
    ),
    "supply-chain": Scenario(
        name="supply-chain",
        description="supplier/producer/retailer chain (discrete, months)",
        rates=SupplyRates,
        build=supply_chain,
        default_u=100.0,
        default_grid="0..13",
    ),
    "continuous-example": Scenario(
        name="continuous-example",
        description="third-order Metzler system (continuous)",
        rates=None,
        build=continuous_example,
        default_u=50.0,
        default_grid="0:10:0.1",
    ),
}


def default_rates(name: str) -> Dict[str, float]:
    scenario = _lookup(name)
    return scenario.rates().model_dump() if scenario.rates else {}


def _lookup(name: str) -> Scenario:
    try:
        return SCENARIOS[name]
    except KeyError:
        raise UsageError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")

def build_scenario(name: str, overrides: Optional[Mapping[str, Union[float, str]]] = None) -> Realization:
    """Realization of a named scenario with selected rates replaced."""
    scenario = _lookup(name)
    overrides = dict(overrides or {})
    if scenario.rates is None:
        if overrides:
            raise InvalidRates(f"scenario {name!r} takes no rates")
        return scenario.build()

    try:
        rates = scenario.rates.model_validate(overrides)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in err['loc']) or 'rates'}: {err['msg']}" for err in e.errors()
        )
        raise InvalidRates(f"invalid rates for {name!r}: {problems}")
    return scenario.build(rates)

from pydantic import BaseModel, Field, field_validator
from typing import Dict, List, Optional
from enum import Enum

import numpy as np

from phaseforge.models import (
    ContinuousSimilarity,
    ContPH,
    DiscPH,
    Realization,
    SystemKind,
    TransformResult,
)
from phaseforge import possys
from phaseforge.errors import PsiOutOfRange


class EvalTarget(str, Enum):
    PDF = "pdf"
    CDF = "cdf"
    PMF = "pmf"
    TPM = "tpm"
    MEAN = "mean"
    VARIANCE = "variance"
    QUANTILE = "quantile"
    EDGES = "edges"


# Documents

class RealizationDocument(BaseModel):
    kind: SystemKind
    A: List[List[float]]
    B: List[float]
    C: List[float]

    @field_validator('A')
    def validate_square(cls, v):
        if not v or any(len(row) != len(v) for row in v):
            raise ValueError("A must be a non-empty square array of rows")
        return v

    def to_realization(self) -> Realization:
        return Realization(kind=self.kind, A=self.A, B=self.B, C=self.C)

    @classmethod
    def from_realization(cls, r: Realization) -> "RealizationDocument":
        return cls(kind=r.kind, A=r.A.tolist(), B=r.B.tolist(), C=r.C.tolist())


class Similarity(BaseModel):
    U: Optional[List[float]] = None  # diagonal
    nu: Optional[List[float]] = None
    eta: Optional[float] = None
    M: Optional[List[float]] = None  # diagonal
    z: Optional[List[float]] = None


class Checks(BaseModel):
    metzler: Optional[bool] = None
    nonneg: Optional[bool] = None
    excitable: bool
    stable: bool
    exit_identity_residual: float


class TransformDocument(BaseModel):
    kind: SystemKind
    psi: float = Field(gt=0)
    alpha_raw: List[float]
    alpha_star: List[float]
    T: List[List[float]]
    t: List[float]
    similarity: Similarity
    checks: Checks

    @classmethod
    def from_result(cls, r: Realization, tr: TransformResult) -> "TransformDocument":
        if isinstance(tr.similarity, ContinuousSimilarity):
            similarity = Similarity(
                U=np.diag(tr.similarity.U).tolist(),
                nu=tr.similarity.nu.tolist(),
                eta=tr.similarity.eta,
            )
            residual = float(np.max(np.abs(tr.t + tr.T.sum(axis=1))))
            checks = Checks(metzler=possys.is_metzler(r.A), excitable=True, stable=True,
                            exit_identity_residual=residual)
        else:
            similarity = Similarity(M=np.diag(tr.similarity.M).tolist(), z=tr.similarity.z.tolist())
            residual = float(np.max(np.abs(tr.T.sum(axis=1) + tr.t - 1.0)))
            checks = Checks(nonneg=possys.is_nonnegative(r.A), excitable=True, stable=True,
                            exit_identity_residual=residual)

        return cls(
            kind=tr.kind,
            psi=tr.psi,
            alpha_raw=tr.alpha_raw.tolist(),
            alpha_star=tr.alpha_star.tolist(),
            T=tr.T.tolist(),
            t=tr.t.tolist(),
            similarity=similarity,
            checks=checks,
        )

    def to_ph(self, raw_alpha: bool = False):
        """Phase-type representation; with raw_alpha the unnormalized alpha~ is the initial vector."""
        alpha = self.alpha_star
        if raw_alpha:
            if self.psi > 1.0:
                raise PsiOutOfRange(f"psi = {self.psi:.10g} > 1; alpha~ is not a sub-probability vector")
            alpha = self.alpha_raw
        ph_type = ContPH if self.kind == SystemKind.CONTINUOUS else DiscPH
        return ph_type(alpha=alpha, T=self.T, t=self.t)


class SampleSummary(BaseModel):
    mean: float
    var: float
    n: int
    seed: int


class CheckReport(BaseModel):
    order: int
    metzler: Optional[bool] = None
    nonneg: Optional[bool] = None
    excitable: bool
    stable: Optional[bool] = None

    def hypotheses_hold(self) -> bool:
        structural = self.metzler if self.metzler is not None else self.nonneg
        return bool(structural and self.excitable and self.stable)


class ScenarioInfo(BaseModel):
    name: str
    description: str
    rates: Dict[str, float]

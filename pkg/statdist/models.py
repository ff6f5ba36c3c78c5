import math
from enum import Enum
from typing import List, Optional, Tuple  # to be removed once Pydantic supports Union operator

import numpy as np
from pydantic import BaseModel, PrivateAttr, root_validator, validator

from statdist import CLAMP_TOL


class LawKind(str, Enum):
    cos2 = "cos2"
    cos2_scaled = "cos2_scaled"
    tabulated = "tabulated"


class ResponseLaw(BaseModel):
    """Probability of a "yes" outcome as a function of orientation.

    Cosine kinds evaluate cos²(w·θ); tabulated laws interpolate their samples
    piecewise-linearly. The domain of a cosine law defaults to its monotone
    range [0, π/(2w)] and may extend to a full period [0, π/w], in which case
    the law is no longer identifiable from yes-counts.
    """

    kind: LawKind
    frequency: float = 1.0
    domain: Tuple[float, float]
    thetas: Optional[Tuple[float, ...]] = None
    probs: Optional[Tuple[float, ...]] = None
    source: Optional[str] = None

    _table: Optional[Tuple[np.ndarray, np.ndarray]] = PrivateAttr(default=None)

    class Config:
        allow_mutation = False

    @root_validator(skip_on_failure=True)
    def check_shape(cls, values):
        kind = values["kind"]
        lo, hi = values["domain"]
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ValueError(f"domain must be finite and increasing, got {(lo, hi)}")

        if kind is LawKind.tabulated:
            thetas, probs = values.get("thetas"), values.get("probs")
            if thetas is None or probs is None or len(thetas) != len(probs):
                raise ValueError("tabulated law needs equally long thetas and probs")
            if len(thetas) < 3:
                raise ValueError("tabulated law needs at least 3 samples")
            if any(b <= a for a, b in zip(thetas, thetas[1:])):
                raise ValueError("tabulated thetas must be strictly increasing")
            if any(not 0.0 <= p <= 1.0 for p in probs):
                raise ValueError("tabulated probabilities must lie in [0, 1]")
            if (lo, hi) != (thetas[0], thetas[-1]):
                raise ValueError("tabulated domain must span the samples")
        else:
            w = values["frequency"]
            if not (math.isfinite(w) and w > 0):
                raise ValueError(f"frequency must be positive, got {w}")
            if lo < 0 or hi > math.pi / w + CLAMP_TOL:
                raise ValueError(f"cosine domain must lie within [0, pi/w], got {(lo, hi)}")
        return values

    @property
    def span(self) -> float:
        return self.domain[1] - self.domain[0]

    def table(self) -> Tuple[np.ndarray, np.ndarray]:
        if self._table is None:
            self._table = (np.asarray(self.thetas), np.asarray(self.probs))
        return self._table


class UncertaintyInterval(BaseModel):
    """θ ± halfwidth after `sample_size` trials.

    `halfwidth` is None for an uninformative interval (zero slope with
    non-degenerate p), `boundary` marks estimates clipped to a domain endpoint.
    """

    center: float
    halfwidth: Optional[float]
    sample_size: int
    boundary: bool = False

    @validator("sample_size")
    def positive_sample_size(cls, n):
        if n < 1:
            raise ValueError(f"sample size must be >= 1, got {n}")
        return n

    @validator("halfwidth")
    def non_negative_halfwidth(cls, h):
        if h is not None and h < 0:
            raise ValueError(f"halfwidth must be >= 0, got {h}")
        return h

    @property
    def informative(self) -> bool:
        return self.halfwidth is not None


class DistanceMethod(str, Enum):
    quadrature = "quadrature"
    closed_form = "closed_form"
    counting = "counting"
    hilbert = "hilbert"


class QuadratureDiagnostics(BaseModel):
    error_estimate: float
    integrand_min: Optional[float] = None
    integrand_max: Optional[float] = None
    evaluations: int = 0
    segments: int = 1


class DistanceReport(BaseModel):
    value: float
    method: DistanceMethod
    theta1: Optional[float] = None
    theta2: Optional[float] = None
    diagnostics: Optional[QuadratureDiagnostics] = None
    fallback: bool = False

    @validator("value")
    def non_negative(cls, v):
        if v < 0:
            raise ValueError(f"distance must be >= 0, got {v}")
        return v


class ProportionalityResult(BaseModel):
    proportional: bool
    constant: Optional[float]
    samples: int
    excluded: int
    spread: float


class CountingPoint(BaseModel):
    n: int
    count: int
    value: float


class CountingReport(BaseModel):
    theta1: float
    theta2: float
    points: List[CountingPoint]
    estimate: float
    richardson: Optional[float] = None


class DiscreteDistribution(BaseModel):
    probabilities: Tuple[float, ...]

    @validator("probabilities")
    def normalized(cls, probs):
        if not probs:
            raise ValueError("distribution needs at least one outcome")
        if any(p < 0 for p in probs):
            raise ValueError("probabilities must be non-negative")
        if abs(math.fsum(probs) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {math.fsum(probs)!r}, not 1")
        return probs

    @classmethod
    def bernoulli(cls, p: float) -> "DiscreteDistribution":
        return cls(probabilities=(p, 1.0 - p))


class PureState(BaseModel):
    """Unit vector of complex amplitudes"""

    amplitudes: np.ndarray

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @validator("amplitudes", pre=True)
    def unit_vector(cls, v):
        arr = np.asarray(v, dtype=complex)
        if arr.ndim != 1 or arr.size < 2:
            raise ValueError(f"state needs a 1-d vector of >= 2 amplitudes, got shape {arr.shape}")
        norm = float(np.vdot(arr, arr).real)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state norm² is {norm!r}, not 1")
        return arr

    @classmethod
    def normalized(cls, v) -> "PureState":
        arr = np.asarray(v, dtype=complex)
        return cls(amplitudes=arr / np.linalg.norm(arr))

    @property
    def dim(self) -> int:
        return self.amplitudes.size


class MeasurementBasis(BaseModel):
    """Non-degenerate orthonormal analyzer, row i is the eigenstate φᵢ"""

    vectors: np.ndarray

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @validator("vectors", pre=True)
    def orthonormal(cls, v):
        arr = np.asarray(v, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 2:
            raise ValueError(f"basis needs N >= 2 vectors of dimension N, got shape {arr.shape}")
        gram = arr.conj() @ arr.T
        deviation = float(np.max(np.abs(gram - np.eye(arr.shape[0]))))
        if deviation > 1e-12:
            raise ValueError(f"basis is not orthonormal (max deviation {deviation:.3e})")
        return arr

    @classmethod
    def from_states(cls, states: List[PureState]) -> "MeasurementBasis":
        return cls(vectors=np.stack([s.amplitudes for s in states]))

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def states(self) -> List[PureState]:
        return [PureState(amplitudes=row) for row in self.vectors]


class BasisOptimum(BaseModel):
    basis: MeasurementBasis
    d_A_max: float
    analytic: float
    numeric: float
    hilbert: float
    converged: bool
    sweeps: int
    restarts: int
    aligned_first: bool
    aligned_second: bool

    class Config:
        arbitrary_types_allowed = True


class Sampler(str, Enum):
    inversion = "inversion"
    gaussian = "gaussian"


class TrialRecord(BaseModel):
    n: int
    yes_count: int
    law: ResponseLaw
    theta_true: float
    seed: int
    sampler: Sampler

    @root_validator(skip_on_failure=True)
    def count_in_range(cls, values):
        n, yes = values["n"], values["yes_count"]
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        if not 0 <= yes <= n:
            raise ValueError(f"yes_count {yes} outside [0, {n}]")
        return values

    @property
    def p_hat(self) -> float:
        return self.yes_count / self.n


class EmpiricalDistance(BaseModel):
    n: int
    seed: int
    count: int
    value: float
    analytic_count: int
    analytic_value: float
    boundary_hits: int = 0


class CoverageReport(BaseModel):
    theta_true: float
    n: int
    replicates: int
    p_true: float
    p_hat_mean: float
    p_hat_std: float
    p_std_expected: float
    coverage: float
    boundary_hits: int = 0


class Column(BaseModel):
    id: str
    theta: float


class ColumnSheet(BaseModel):
    columns: List[Column]
    law: ResponseLaw

    @root_validator(skip_on_failure=True)
    def columns_in_domain(cls, values):
        columns, law = values["columns"], values["law"]
        ids = [c.id for c in columns]
        if len(set(ids)) != len(ids):
            raise ValueError("column ids must be unique")
        lo, hi = law.domain
        for column in columns:
            if not lo <= column.theta <= hi:
                raise ValueError(f"column {column.id} theta={column.theta} outside {(lo, hi)}")
        return values


class MatrixMode(str, Enum):
    analytic = "analytic"
    empirical = "empirical"


class DistanceMatrix(BaseModel):
    ids: List[str]
    values: List[List[Optional[float]]]
    mode: MatrixMode
    failed: List[Tuple[str, str, str]] = []


class ChannelBank(BaseModel):
    """K cos² channels with uniformly spaced centers on [lo, hi].

    Channel k responds cos²(w·(θ − θ_k)) within π/(2w) of its center. The
    default width w = π/(3·spacing) gives three overlapping channels.
    """

    count: int
    lo: float
    hi: float
    width: Optional[float] = None

    class Config:
        allow_mutation = False

    @root_validator(skip_on_failure=True)
    def overlapping(cls, values):
        k, lo, hi = values["count"], values["lo"], values["hi"]
        if k < 3:
            raise ValueError(f"channel bank needs >= 3 channels, got {k}")
        if not lo < hi:
            raise ValueError(f"channel span must be increasing, got {(lo, hi)}")
        spacing = (hi - lo) / (k - 1)
        if values.get("width") is None:
            values["width"] = math.pi / (3 * spacing)
        w = values["width"]
        if not (w > 0 and spacing < math.pi / (2 * w)):
            raise ValueError(f"neighbouring channels do not overlap (spacing {spacing}, w {w})")
        return values

    @property
    def spacing(self) -> float:
        return (self.hi - self.lo) / (self.count - 1)

    @property
    def support(self) -> float:
        return math.pi / (2 * self.width)

    @property
    def centers(self) -> np.ndarray:
        return self.lo + self.spacing * np.arange(self.count)

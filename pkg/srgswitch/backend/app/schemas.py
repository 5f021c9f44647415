from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

Family = Literal['P0', 'Pplus', 'Pminus']
Enumeration = Literal['exhaustive', 'random']
Termination = Literal[
    'target_reached',       # max_rank met
    'budget_exhausted',     # too many detours without an increase
    'space_exhausted',      # no usable GM set left
    'transcript_complete',  # replay ran every step
]
HeadKind = Literal['k1', '2k2', '2k2x2k2', 'normalized']

TRANSCRIPT_SET_SIZE = 4


class SrgParams(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    n: int
    k: int
    lambda_: int = Field(alias='lambda')
    mu: int

    @model_validator(mode='after')
    def _feasible(self) -> 'SrgParams':
        if not (0 <= self.lambda_ <= self.k and 0 <= self.mu <= self.k and self.k < self.n):
            raise ValueError(f"parameters {self.as_tuple()} violate 0 <= lambda, mu <= k < n")
        if self.k * (self.k - self.lambda_ - 1) != (self.n - self.k - 1) * self.mu:
            raise ValueError(f"parameters {self.as_tuple()} violate k(k-lambda-1) = (n-k-1)mu")
        return self

    def as_tuple(self) -> tuple[int, int, int, int]:
        return self.n, self.k, self.lambda_, self.mu

    def __str__(self) -> str:
        return f"({self.n},{self.k},{self.lambda_},{self.mu})"


class TranscriptStep(BaseModel):
    set: list[str]
    rank: int

    @field_validator('set')
    @classmethod
    def _four_labels(cls, labels: list[str]) -> list[str]:
        if len(labels) != TRANSCRIPT_SET_SIZE:
            raise ValueError(f"switching set has {len(labels)} labels, expected {TRANSCRIPT_SET_SIZE}")
        return labels


class Transcript(BaseModel):
    start: str
    steps: list[TranscriptStep]
    expected_final_ones_in_colspace: Optional[bool] = None
    description: Optional[str] = None

    @model_validator(mode='after')
    def _ranks_climb(self) -> 'Transcript':
        previous = None
        for i, step in enumerate(self.steps, start=1):
            if step.rank % 2:
                raise ValueError(f"step {i}: expected rank {step.rank} is odd")
            if previous is not None and step.rank - previous not in (0, 2):
                raise ValueError(
                    f"step {i}: expected rank moves {previous} -> {step.rank}, "
                    f"only +0 or +2 per step is possible"
                )
            previous = step.rank
        return self


class SearchConfig(BaseModel):
    set_size: int = 4
    budget_without_increase: int = 5000
    rng_seed: int = Field(default=0, ge=0, lt=2**64)
    max_rank: Optional[int] = None
    enumeration: Enumeration = 'exhaustive'

    @field_validator('set_size')
    @classmethod
    def _even_size(cls, size: int) -> int:
        if size < 2 or size % 2:
            raise ValueError(f"set_size must be even and at least 2, got {size}")
        return size

    @field_validator('budget_without_increase')
    @classmethod
    def _positive_budget(cls, budget: int) -> int:
        if budget < 1:
            raise ValueError("budget_without_increase must be at least 1")
        return budget


class PathStep(BaseModel):
    set: list[str]
    rank: int
    delta: int
    ones_in_colspace: bool


class SearchReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    start: str
    params: SrgParams
    start_rank: int
    path: list[PathStep]
    final_rank: int
    terminated_by: Termination
    ones_in_colspace_final: bool
    final_graph: Any = Field(default=None, exclude=True)

    @property
    def ranks(self) -> list[int]:
        return [step.rank for step in self.path]


class ProductPlan(BaseModel):
    family: Family
    m: int = Field(ge=1)
    factor_ranks: list[int]
    head: HeadKind


# --- HTTP request/response bodies ---


class GraphInput(BaseModel):
    name: Optional[str] = None
    graph6: Optional[str] = None

    @model_validator(mode='after')
    def _one_source(self) -> 'GraphInput':
        if (self.name is None) == (self.graph6 is None):
            raise ValueError("give exactly one of 'name' or 'graph6'")
        return self


class GraphSummary(BaseModel):
    name: Optional[str] = None
    n: int
    graph6: str
    rank: int
    params: Optional[SrgParams] = None
    ones_in_colspace: bool


class RankResponse(BaseModel):
    rank: int
    ones_in_colspace: bool


class SrgCheckResponse(BaseModel):
    params: Optional[SrgParams] = None


class GmSwitchRequest(BaseModel):
    graph: GraphInput
    set: list[str]


class GmSwitchResponse(BaseModel):
    graph: GraphSummary
    rank_before: int
    delta: int


class PredictRankRequest(BaseModel):
    left: GraphInput
    right: GraphInput


class PredictRankResponse(BaseModel):
    predicted_rank: int
    direct_rank: int
    ones_in_colspace: bool


class ReplayRequest(BaseModel):
    name: Optional[str] = None
    transcript: Optional[Transcript] = None

    @model_validator(mode='after')
    def _one_source(self) -> 'ReplayRequest':
        if (self.name is None) == (self.transcript is None):
            raise ValueError("give exactly one of 'name' or 'transcript'")
        return self

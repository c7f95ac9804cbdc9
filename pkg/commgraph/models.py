"""
Pydantic models for every document commgraph reads or writes: graph JSON,
lattice cache files, verification reports and component analytics
"""

from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from semver import VersionInfo
from sympy import isprime

GRAPH_SCHEMA = 1
LATTICE_FORMAT_VERSION = "1.0.0"
REPORT_SCHEMA_VERSION = "1.0.0"


class CommGraphModel(BaseModel):
    """Base model: fields may be filled by name or by alias"""

    model_config = ConfigDict(populate_by_name=True, frozen=True)


class VertexRecord(CommGraphModel):
    id: str
    order: int = Field(ge=1)
    index: int = Field(ge=1)
    generators: List[str] = []
    class_tag: Optional[str] = Field(None, alias="class")


class GraphDocument(CommGraphModel):
    schema_version: Literal[1] = Field(GRAPH_SCHEMA, alias="schema")
    group: str
    prime: int = Field(ge=2)
    vertices: List[VertexRecord]
    edges: List[Tuple[int, int]]

    @field_validator("prime")
    def check_prime(cls, value: int) -> int:
        if not isprime(value):
            raise ValueError(f"{value} is not a prime")
        return value

    @model_validator(mode="after")
    def check_edges(self) -> "GraphDocument":
        """Edges must be i < j pairs of vertex positions, sorted, without repeats"""
        size = len(self.vertices)
        for i, j in self.edges:
            if not 0 <= i < j < size:
                raise ValueError(f"Edge [{i}, {j}] is not an i < j pair of vertex positions")
        if any(a >= b for a, b in zip(self.edges, self.edges[1:])):
            raise ValueError("Edges must be sorted and unique")
        ids = [v.id for v in self.vertices]
        if len(set(ids)) != len(ids):
            raise ValueError("Vertex ids must be unique")
        return self


class SubgroupRecord(CommGraphModel):
    id: str
    order: int = Field(ge=1)
    generators: List[str]


class LatticeDocument(CommGraphModel):
    format_version: str = LATTICE_FORMAT_VERSION
    descriptor: str
    order: int = Field(ge=1)
    subgroups: List[SubgroupRecord]
    checksum: str = ""

    @field_validator("format_version")
    def check_semver(cls, value):
        VersionInfo.parse(value)
        return value

    @property
    def version(self) -> VersionInfo:
        return VersionInfo.parse(self.format_version)


CheckStatus = Literal["passed", "failed", "skipped"]


class CheckRecord(CommGraphModel):
    name: str
    anchor: str
    parameters: Dict[str, Any] = {}
    status: CheckStatus
    witness: Optional[Dict[str, Any]] = None
    detail: Optional[str] = None
    duration: float = 0.0

    @model_validator(mode="after")
    def failures_have_witnesses(self) -> "CheckRecord":
        if self.status == "failed" and not self.witness:
            raise ValueError(f"Failed check {self.name} carries no witness")
        return self

    @property
    def passed(self) -> bool:
        return self.status != "failed"


class VerificationReport(CommGraphModel):
    suite_version: str = REPORT_SCHEMA_VERSION
    tier: Literal["fast", "full"]
    seed: int
    checks: List[CheckRecord] = []

    @property
    def status(self) -> Literal["passed", "failed"]:
        return "passed" if all(c.passed for c in self.checks) else "failed"

    def failures(self) -> List[CheckRecord]:
        return [c for c in self.checks if not c.passed]

    def without_durations(self) -> "VerificationReport":
        """Copy with every duration zeroed, for run-to-run comparison"""
        return self.model_copy(
            update={"checks": [c.model_copy(update={"duration": 0.0}) for c in self.checks]}
        )


class CatalogEntry(CommGraphModel):
    descriptor: str
    expected_nilpotent: bool
    expected_solvable: bool


class ComponentReport(CommGraphModel):
    component: int
    vertices: List[str]
    diameter: int = Field(ge=0)
    is_complete: bool
    non_p_part: int = Field(ge=1)
    # None when the graph was loaded without its subgroups
    contains_normal: Optional[bool] = None
    witness_nonadjacent_pair: Optional[Tuple[str, str]] = None
    witness_path: Optional[List[str]] = None

    @model_validator(mode="after")
    def completeness_matches_diameter(self) -> "ComponentReport":
        if self.is_complete != (self.diameter <= 1):
            raise ValueError("A component is complete exactly when its diameter is at most 1")
        return self

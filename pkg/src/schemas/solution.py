from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from .instance import VertexExplanation


class Solution(BaseModel):
    """A candidate minimum consistent subset together with its checker verdict."""
    model_config = ConfigDict(frozen=True)

    vertices: Tuple[int, ...]
    size: int
    method: Literal["oracle", "vc", "nd"]
    verified: bool
    optimal: bool = True
    explored: int = 0

    @model_validator(mode="after")
    def _size_matches(self) -> "Solution":
        if self.size != len(self.vertices):
            raise ValueError(f"size {self.size} does not match {len(self.vertices)} vertices")
        if list(self.vertices) != sorted(set(self.vertices)):
            raise ValueError("vertices must be strictly ascending")
        return self

    def key(self) -> Tuple[int, Tuple[int, ...]]:
        """Canonical order: smaller first, then lexicographically smaller."""
        return (self.size, self.vertices)


class SolveReport(BaseModel):
    """One machine-readable line written by ``solve``; vertex ids are 1-based."""
    input: Optional[str] = None
    method: str
    size: int
    vertices: List[int]
    elapsed_ms: Optional[int] = None
    explored: int
    verified: bool
    optimal: bool
    parameters: Dict[str, int]
    oracle_size: Optional[int] = None
    oracle_match: Optional[bool] = None


class CheckReport(BaseModel):
    """Verdict printed by ``check``; vertex ids are 1-based."""
    input: str
    consistent: bool
    witness: Optional[int] = None
    nearest_colors: List[int] = []
    explanation: Optional[List[VertexExplanation]] = None


class ErrorReport(BaseModel):
    input: str
    error: str
    parameters: Optional[Dict[str, int]] = None

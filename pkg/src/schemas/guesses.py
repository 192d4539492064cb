from enum import Enum, IntEnum
from typing import Dict, FrozenSet, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, model_validator


class SetSystem(BaseModel):
    """A universe of element ids and a family of subsets of it."""
    model_config = ConfigDict(frozen=True)

    universe: Tuple[int, ...]
    family: Tuple[FrozenSet[int], ...] = ()

    @model_validator(mode="after")
    def _members_within_universe(self) -> "SetSystem":
        ground = set(self.universe)
        for index, member in enumerate(self.family):
            if not member <= ground:
                stray = sorted(member - ground)
                raise ValueError(f"family member {index} has elements {stray} outside the universe")
        return self


class VcGuess(BaseModel):
    """Guessed distances from each cover vertex to the solution, plus the boundary set M1."""
    model_config = ConfigDict(frozen=True)

    cover: Tuple[int, ...]
    d: Tuple[int, ...]
    m0: Tuple[int, ...]
    m1: Tuple[int, ...]
    mx: Tuple[int, ...]

    @model_validator(mode="after")
    def _disjoint_parts(self) -> "VcGuess":
        if len(self.d) != len(self.cover):
            raise ValueError("one guessed distance is required per cover vertex")
        if set(self.m0) & set(self.m1):
            raise ValueError("M0 and M1 must be disjoint")
        if sorted(self.m0 + self.m1 + self.mx) != sorted(self.cover):
            raise ValueError("M0, M1 and Mx must partition the cover")
        return self


class DerivedSets(BaseModel):
    """
    Forced and forbidden independent-set vertices for one distance guess.

    ``extended_d`` holds a guessed distance for every vertex of the graph: the guess itself
    on the cover, and one plus the smallest neighbor guess on the independent set.
    ``unsatisfied`` maps a color to the vertices of that color whose demand is not met by
    ``M0 ∪ I_in`` at their guessed distance.
    """
    model_config = ConfigDict(frozen=True)

    i_out: FrozenSet[int]
    extended_d: Tuple[int, ...]
    i_in: FrozenSet[int]
    unsatisfied: Dict[int, Tuple[int, ...]]


class Part(IntEnum):
    T0 = 0
    T1 = 1
    T2 = 2


class Partition3(BaseModel):
    model_config = ConfigDict(frozen=True)

    assignment: Tuple[Part, ...]


class OccAssignment(BaseModel):
    """Labels present in each type (the occurrence function, stored per type)."""
    model_config = ConfigDict(frozen=True)

    k: int
    per_type_labels: Tuple[FrozenSet[int], ...]

    def types_of_label(self, label: int) -> FrozenSet[int]:
        return frozenset(t for t, labels in enumerate(self.per_type_labels) if label in labels)


class LabelCoding(BaseModel):
    """``label_of[color - 1]`` is the label (0-based) of that color."""
    model_config = ConfigDict(frozen=True)

    label_of: Tuple[int, ...]
    mode: Literal["exhaustive", "random"] = "exhaustive"
    seed: Optional[int] = None
    trials: Optional[int] = None

    def colors_with(self, label: int) -> Tuple[int, ...]:
        return tuple(color for color, assigned in enumerate(self.label_of, start=1) if assigned == label)


class Placement(str, Enum):
    NONE = "none"
    ONE = "one"
    ALL = "all"


class PlacementChoice(BaseModel):
    """How many vertices of ``color`` each type contributes to the solution."""
    model_config = ConfigDict(frozen=True)

    color: int
    per_type: Tuple[Placement, ...]


class NdScenario(BaseModel):
    model_config = ConfigDict(frozen=True)

    partition: Partition3
    occ: OccAssignment

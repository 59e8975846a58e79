"""Ensemble and statistic descriptors."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import DomainError

__all__ = ["BoundaryMode", "Family", "SpacingModel", "StatKind", "check_stat"]


class BoundaryMode(str, enum.Enum):
    WITH_EDGES = "with"
    NO_EDGES = "without"


class Family(str, enum.Enum):
    KTH_SPACING = "kth"
    SUM_SMALLEST = "sum-min"
    SUM_LARGEST = "sum-max"


@dataclass(frozen=True)
class SpacingModel:
    """``n`` iid U(0, 1) samples, with or without 0 and 1 as pseudo-data.

    With edges there are ``n + 1`` spacings; without, ``n - 1`` inner spacings.
    """

    n: int
    boundary_mode: BoundaryMode = BoundaryMode.WITH_EDGES

    def __post_init__(self):
        object.__setattr__(self, "boundary_mode", BoundaryMode(self.boundary_mode))
        if not isinstance(self.n, int) or isinstance(self.n, bool):
            raise DomainError(f"n must be an integer, got {self.n!r}")
        min_n = 1 if self.boundary_mode is BoundaryMode.WITH_EDGES else 3
        if self.n < min_n:
            raise DomainError(
                f"{self.boundary_mode.value}-edges model needs n >= {min_n}, got n={self.n}"
            )

    @property
    def with_edges(self) -> bool:
        return self.boundary_mode is BoundaryMode.WITH_EDGES

    @property
    def n_spacings(self) -> int:
        return self.n + 1 if self.with_edges else self.n - 1


@dataclass(frozen=True)
class StatKind:
    family: Family
    k: int

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not isinstance(self.k, int) or isinstance(self.k, bool) or self.k < 1:
            raise DomainError(f"k must be a positive integer, got {self.k!r}")


def check_stat(model: SpacingModel, stat: StatKind) -> None:
    """Raise :class:`DomainError` unless ``1 <= k <= number of spacings``."""
    if stat.k > model.n_spacings:
        raise DomainError(
            f"{stat.family.value} with k={stat.k} needs k <= {model.n_spacings} "
            f"for n={model.n} ({model.boundary_mode.value} edges)"
        )

"""One entry point for every (model, statistic) law."""

from __future__ import annotations

from . import dist_edges, dist_noedges
from .model import Family, SpacingModel, StatKind, check_stat
from .series import PointMass, SeriesDistribution

__all__ = ["get_distribution", "support"]


def get_distribution(model: SpacingModel, stat: StatKind) -> SeriesDistribution | PointMass:
    """The law of ``stat`` under ``model``; cached by the underlying builders.

    With edges, the sum over all ``n + 1`` spacings is identically 1 and a
    :class:`PointMass` is returned.
    """
    check_stat(model, stat)
    if not model.with_edges:
        return dist_noedges.ne_distribution(model.n, stat.family, stat.k)
    if stat.family is Family.KTH_SPACING:
        return dist_edges.kth_spacing_distribution(model.n, stat.k)
    if stat.family is Family.SUM_SMALLEST:
        return dist_edges.sum_smallest_distribution(model.n, stat.k)
    return dist_edges.sum_largest_distribution(model.n, stat.k)


def support(model: SpacingModel, stat: StatKind) -> tuple[float, float]:
    return get_distribution(model, stat).support

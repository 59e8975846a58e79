"""Seeded simulation of spacing statistics and KS machinery.

Reproducibility contract
------------------------
* Generator: numpy ``PCG64``.
* Replications are produced in chunks of ``CHUNK`` rows.  Chunk ``j`` of a
  run with seed ``s`` uses ``SeedSequence(s, spawn_key=(j,))``, which is the
  ``j``-th child of ``SeedSequence(s).spawn(...)``.  The values therefore do
  not depend on how many workers fill the chunks.
* Uniforms come from ``Generator.random`` on ``[0, 1)``.  Excluding 1 changes
  nothing for any statistic here (a null event).

``Generator.random`` returns multiples of ``2**-53``.  Every difference and
every partial sum of such numbers inside ``[0, 1]`` is representable, so
spacing sums from simulated data are exact and ``s_k + S_{N+1-k} == 1``
holds bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .distribution import get_distribution
from .errors import DomainError
from .model import Family, SpacingModel, StatKind, check_stat

__all__ = [
    "CHUNK",
    "GENERATOR",
    "SampleBatch",
    "chunk_generator",
    "draw_uniforms",
    "ordered_spacings",
    "statistic_from_values",
    "draw_statistic",
    "ks_distance",
]

CHUNK = 65536
GENERATOR = "numpy.random.PCG64"


def chunk_generator(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def ordered_spacings(values: np.ndarray, model: SpacingModel) -> np.ndarray:
    """Sorted spacings of each row of ``values`` (shape ``(m, n)``)."""
    x = np.sort(np.asarray(values, dtype=float), axis=-1)
    if model.with_edges:
        m = x.shape[0]
        x = np.concatenate([np.zeros((m, 1)), x, np.ones((m, 1))], axis=1)
    g = np.diff(x, axis=1)
    g.sort(axis=1)
    return g


def statistic_from_values(values, model: SpacingModel, stat: StatKind) -> np.ndarray:
    """The statistic for each row of ``values``; a 1-d input is one replication.

    This is the single code path shared by the simulator and by data analysis.
    """
    check_stat(model, stat)
    x = np.asarray(values, dtype=float)
    one = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[1] != model.n:
        raise DomainError(f"expected {model.n} values per replication, got {x.shape[1]}")
    k = stat.k
    if stat.family is not Family.KTH_SPACING and k == model.n_spacings:
        # every spacing: the total is 1 (edges) or the range, with one rounding at most
        if model.with_edges:
            out = np.ones(x.shape[0])
        else:
            out = x.max(axis=1) - x.min(axis=1)
        return out[0:1] if one else out
    g = ordered_spacings(x, model)
    if stat.family is Family.KTH_SPACING:
        out = g[:, k - 1].copy()
    elif stat.family is Family.SUM_SMALLEST:
        out = g[:, :k].sum(axis=1)
    else:
        out = g[:, g.shape[1] - k:].sum(axis=1)
    return out[0:1] if one else out


def draw_uniforms(n: int, seed: int, count: int, chunk: int = CHUNK):
    """Yield ``(chunk_index, array of shape (rows, n))`` covering ``count`` rows."""
    for j, start in enumerate(range(0, count, chunk)):
        rows = min(chunk, count - start)
        yield j, chunk_generator(seed, j).random((rows, n))


@dataclass(frozen=True, eq=False)
class SampleBatch:
    model: SpacingModel
    stat: StatKind
    seed: int
    values: np.ndarray
    count: int

    def summary(self) -> dict:
        v = self.values
        return {
            "seed": self.seed,
            "count": self.count,
            "mean": float(v.mean()),
            "variance": float(v.var(ddof=1)) if self.count > 1 else 0.0,
            "min": float(v.min()),
            "max": float(v.max()),
        }

    def summary_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True)

    def to_csv(self, fh=None, header: tuple[str, str] = ("replication_index", "value")) -> str | None:
        """Write ``index,value`` rows (17 significant digits).  Returns text if ``fh`` is None."""
        sink = io.StringIO() if fh is None else fh
        w = csv.writer(sink, lineterminator="\n")
        w.writerow(header)
        for i, v in enumerate(self.values.tolist()):
            w.writerow((i, format(v, ".17g")))
        return sink.getvalue() if fh is None else None


def _check_support(values: np.ndarray, model: SpacingModel, stat: StatKind) -> None:
    d = get_distribution(model, stat)
    lo, hi = d.support
    bad = np.flatnonzero((values < lo) | (values > hi))
    # float support ends are rounded; confirm against the exact ends
    if hasattr(d, "pdf_series"):
        lo_q, hi_q = d.pdf_series.support_lo, d.pdf_series.support_hi
    else:
        lo_q = hi_q = Fraction(d.at)
    for i in bad:
        v = Fraction(float(values[i]))
        if not lo_q <= v <= hi_q:
            raise AssertionError(
                f"draw {i} = {values[i]!r} outside the support [{lo}, {hi}] of "
                f"{stat.family.value} k={stat.k}, n={model.n}, {model.boundary_mode.value} edges"
            )


def draw_statistic(model: SpacingModel, stat: StatKind, seed: int, count: int,
                   *, workers: int = 1) -> SampleBatch:
    """Simulate ``count`` replications of ``stat``.

    The result does not depend on ``workers``; see the module docstring.
    Every draw is checked to lie in the analytic support.
    """
    check_stat(model, stat)
    if not isinstance(count, (int, np.integer)) or count < 1:
        raise DomainError(f"count must be a positive integer, got {count!r}")
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise DomainError("seed must be a 64-bit unsigned integer")

    def job(item):
        _, u = item
        return statistic_from_values(u, model, stat)

    chunks = draw_uniforms(model.n, seed, int(count))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(job, chunks))
    else:
        parts = [job(c) for c in chunks]
    values = np.concatenate(parts)
    _check_support(values, model, stat)
    return SampleBatch(model, stat, seed, values, int(count))


def ks_distance(sample, cdf) -> float:
    """Kolmogorov-Smirnov distance between a sample and a continuous CDF.

    ``sample`` is a :class:`SampleBatch` or an array; ``cdf`` is vectorised.
    """
    x = sample.values if isinstance(sample, SampleBatch) else np.asarray(sample, dtype=float)
    if x.size == 0:
        raise ValueError("empty sample")
    x = np.sort(x.ravel())
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(np.abs(i / n - f)), np.max(np.abs((i - 1) / n - f))))

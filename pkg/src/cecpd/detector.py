"""Change-point detection by argmax of the two-sample statistic.

Single change points are located by evaluating the copula-entropy
two-sample statistic at every legal split of the series and taking the
argmax; a split is legal when both sides keep at least ``min_seg``
observations.  Multiple change points come from binary segmentation:
detect one point, split there, recurse on both halves, stop when a
segment is too short, its best statistic fails the threshold, or the
depth cap is hit.

Index conventions: rows are 0-based internally.  A split index is the row
of the last observation of the left part; a change-point index is the row
of the first observation of the new regime (split + 1).  User-facing
output (reports, CLI) converts indices to 1-based.
"""

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from dataclasses import dataclass, field

from .two_sample import REPLICATES, _block_labels, _labeled_entropies

__all__ = [
    "DetectorConfig",
    "TestProfile",
    "ChangePoint",
    "Segmentation",
    "profile",
    "detect_single",
    "detect_multiple",
]


@dataclass(frozen=True)
class DetectorConfig:
    """Knobs of the detector.

    Attributes
    ----------
    k : int
        Neighbor order of the entropy estimator.
    threshold : float
        Detection gate in nats; a split is reported only when its
        statistic strictly exceeds this.
    min_seg : int
        Minimum observations on each side of any split.  Must exceed `k`
        or the entropy estimate of a smallest segment is undefined.
    seed : int
        Seed for the tie-breaking replicates of the statistic.
    max_depth : int or None
        Cap on segmentation depth; None means unlimited.
    """

    k: int = 3
    threshold: float = 0.13
    min_seg: int = 10
    seed: int = 0
    max_depth: int | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be a positive integer")
        if self.min_seg <= self.k:
            raise ValueError(
                "min_seg must exceed k (got min_seg=%d, k=%d)" % (self.min_seg, self.k)
            )
        if not math.isfinite(self.threshold):
            raise ValueError("threshold must be finite")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be a positive integer or None")


@dataclass(frozen=True)
class TestProfile:
    """Statistic values over every legal split of one segment.

    ``segment_start`` and ``segment_end`` are the first and last row of
    the segment (both inclusive, 0-based, in parent-series coordinates).
    ``stats`` holds ``(split_index, value)`` pairs where the split index
    is the row of the last observation of the left part; legal splits run
    from ``segment_start + min_seg - 1`` through ``segment_end - min_seg``
    inclusive.  Empty when the segment admits no legal split.
    """

    __test__ = False  # not a pytest case despite the name

    segment_start: int
    segment_end: int
    stats: tuple

    def argmax(self):
        """(split_index, value) of the maximal entry, earliest on ties."""
        best = None
        for pair in self.stats:
            if best is None or pair[1] > best[1]:
                best = pair
        return best


@dataclass(frozen=True)
class ChangePoint:
    """A detected change: first row of the new regime, 0-based."""

    index: int
    statistic: float
    depth: int


@dataclass(frozen=True)
class Segmentation:
    """Everything detect_multiple found.

    ``points`` are sorted ascending by index.  ``profiles`` keeps the full
    statistic profile of every segment the recursion examined, in
    examination order (whole series first), for reporting and plotting.
    """

    points: tuple
    series_length: int
    config: DetectorConfig
    profiles: tuple = field(default=())


def _series_values(x):
    values = np.asarray(getattr(x, "values", x), dtype=np.float64)
    if values.ndim == 1:
        values = values.reshape(-1, 1)
    return values


def _window_profile(values, cfg, start, stop, workers):
    """Profile of rows [start, stop); stats identical to per-split tce."""
    length = stop - start
    if length < 2 * cfg.min_seg:
        return TestProfile(segment_start=start, segment_end=stop - 1, stats=())
    seg = values[start:stop]
    # the all-ones baseline labeling is split-independent: compute once
    h0 = _labeled_entropies(seg, np.ones(length), cfg.k, cfg.seed, REPLICATES)

    def stat_at(split):
        left = split - start + 1
        y1 = _block_labels(seg[:left], seg[left:])
        h1 = _labeled_entropies(seg, y1, cfg.k, cfg.seed, REPLICATES)
        value = math.fsum(h0[r] - h1[r] for r in range(REPLICATES)) / REPLICATES
        return value

    splits = range(start + cfg.min_seg - 1, stop - cfg.min_seg)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            stat_values = list(pool.map(stat_at, splits))
    else:
        stat_values = [stat_at(s) for s in splits]
    stats = tuple(zip(splits, stat_values))
    return TestProfile(segment_start=start, segment_end=stop - 1, stats=stats)


def profile(x, cfg=DetectorConfig(), workers=1):
    """Two-sample statistic at every legal split of a segment.

    Parameters
    ----------
    x : array_like or TimeSeries
        The segment, rows are observations.
    cfg : DetectorConfig
    workers : int
        Worker threads for the per-split statistic evaluations.  Results
        are reduced in split-index order, so the profile is identical for
        any worker count.

    Returns
    -------
    TestProfile
        Empty `stats` when the segment is shorter than ``2 * min_seg``.
    """
    values = _series_values(x)
    return _window_profile(values, cfg, 0, values.shape[0], workers)


def _single_from_profile(prof, cfg, depth):
    best = prof.argmax()
    if best is None or not best[1] > cfg.threshold:
        return None
    return ChangePoint(index=best[0] + 1, statistic=best[1], depth=depth)


def detect_single(x, cfg=DetectorConfig(), workers=1):
    """Best split of the whole segment, if it clears the threshold.

    Returns
    -------
    ChangePoint or None
        The argmax split reported as first-index-of-new-regime
        (``split + 1``), with its statistic; None when no split is legal
        or the maximum statistic is not above ``cfg.threshold``.  Ties
        break toward the smallest index.
    """
    values = _series_values(x)
    prof = _window_profile(values, cfg, 0, values.shape[0], workers)
    return _single_from_profile(prof, cfg, depth=0)


def detect_multiple(x, cfg=DetectorConfig(), workers=1):
    """Binary segmentation: all change points of a series.

    Runs the single-point detector on the whole series, then recursively
    on the sub-segments either side of each detection (depth-first, left
    segment first).  Recursion stops where a segment is shorter than
    ``2 * min_seg``, has no above-threshold split, or sits at
    ``max_depth``.

    Returns
    -------
    Segmentation
        Points sorted ascending by index; every examined segment's
        profile is kept in ``profiles``.  Deterministic for fixed
        (series, config), whatever the worker count.
    """
    values = _series_values(x)
    n = values.shape[0]
    points = []
    profiles = []

    def recurse(start, stop, depth):
        if cfg.max_depth is not None and depth >= cfg.max_depth:
            return
        if stop - start < 2 * cfg.min_seg:
            return
        prof = _window_profile(values, cfg, start, stop, workers)
        profiles.append(prof)
        found = _single_from_profile(prof, cfg, depth)
        if found is None:
            return
        points.append(found)
        recurse(start, found.index, depth + 1)
        recurse(found.index, stop, depth + 1)

    recurse(0, n, 0)
    points.sort(key=lambda p: p.index)
    return Segmentation(
        points=tuple(points),
        series_length=n,
        config=cfg,
        profiles=tuple(profiles),
    )

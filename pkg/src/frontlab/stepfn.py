"""Algebra of nondecreasing right-continuous step functions on [0, inf).

These objects carry front paths, hitting-time processes and sampled limit
paths.  Values live in [0, inf]; a function that has reached +inf stays
there.  The inversion here is the monotone generalized inverse, normalized
to be right-continuous, which makes it an involution at continuity points.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

__all__ = [
    "StepFunction",
    "CompletedGraph",
    "M1Diagnostic",
    "invert",
    "invert_value_raw",
    "completed_graph",
    "m1_distance",
]


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant nondecreasing function, right-continuous.

    ``f(t) = values[i]`` for ``t in [breakpoints[i], breakpoints[i+1])``.
    The first breakpoint must be 0 so the function is defined on all of
    [0, inf).  Beyond ``domain_end`` the function is regarded as constant
    at its last value.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    domain_end: float = math.inf

    def __post_init__(self):
        xs = np.asarray(self.breakpoints, dtype=float)
        vs = np.asarray(self.values, dtype=float)
        if xs.ndim != 1 or vs.ndim != 1 or len(xs) != len(vs) or len(xs) == 0:
            raise ValueError("breakpoints and values must be equal-length 1d arrays")
        if xs[0] != 0.0:
            raise ValueError("first breakpoint must be 0")
        if np.any(np.diff(xs) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if np.any(np.diff(vs) < 0):
            raise ValueError("values must be nondecreasing")
        if np.any(vs < 0):
            raise ValueError("values must be nonnegative")
        if np.any(np.isinf(xs)):
            raise ValueError("breakpoints must be finite")
        # collapse runs of equal values so the representation is canonical
        keep = np.concatenate(([True], np.diff(vs) > 0))
        xs, vs = xs[keep], vs[keep]
        object.__setattr__(self, "breakpoints", xs)
        object.__setattr__(self, "values", vs)
        object.__setattr__(self, "domain_end", float(self.domain_end))

    # -- evaluation ---------------------------------------------------------

    def __call__(self, t):
        """Evaluate at scalar or array ``t >= 0`` (right-continuous)."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("argument must be >= 0")
        idx = np.searchsorted(self.breakpoints, t, side="right") - 1
        out = self.values[idx]
        return float(out) if out.ndim == 0 else out

    def left_limit(self, t: float) -> float:
        """f(t-), with the convention f(0-) = 0."""
        if t <= 0:
            return 0.0
        idx = np.searchsorted(self.breakpoints, t, side="left") - 1
        return float(self.values[idx]) if idx >= 0 else 0.0

    # -- structure ----------------------------------------------------------

    @property
    def final_value(self) -> float:
        return float(self.values[-1])

    def explosion_point(self) -> float:
        """First breakpoint with value +inf, or +inf if the function is finite."""
        infs = np.nonzero(np.isinf(self.values))[0]
        return float(self.breakpoints[infs[0]]) if len(infs) else math.inf

    def jump_points(self) -> np.ndarray:
        """Breakpoints where the function actually jumps (excludes t=0 plateau)."""
        return self.breakpoints[1:]

    def __eq__(self, other) -> bool:
        if not isinstance(other, StepFunction):
            return NotImplemented
        return (
            len(self.breakpoints) == len(other.breakpoints)
            and bool(np.all(self.breakpoints == other.breakpoints))
            and bool(np.all(self.values == other.values))
        )

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, c: float) -> "StepFunction":
        return cls(np.array([0.0]), np.array([float(c)]))

    @classmethod
    def from_points(cls, breakpoints: Iterable[float], values: Iterable[float],
                    domain_end: float = math.inf) -> "StepFunction":
        return cls(np.asarray(list(breakpoints), float),
                   np.asarray(list(values), float), domain_end)

    # -- serialization ------------------------------------------------------

    def to_csv(self, path_or_file) -> None:
        """Write as two-column CSV (breakpoint, value); +inf spelled "+inf"."""
        own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            w = csv.writer(fh)
            w.writerow(["breakpoint", "value"])
            for x, v in zip(self.breakpoints, self.values):
                w.writerow([repr(float(x)), "+inf" if math.isinf(v) else repr(float(v))])
        finally:
            if own:
                fh.close()

    @classmethod
    def from_csv(cls, path_or_file) -> "StepFunction":
        own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
        fh = open(path_or_file, "r", newline="") if own else path_or_file
        try:
            rows = list(csv.reader(fh))
        finally:
            if own:
                fh.close()
        if rows and rows[0] and rows[0][0].strip().lower() == "breakpoint":
            rows = rows[1:]
        xs, vs = [], []
        for row in rows:
            if not row:
                continue
            xs.append(float(row[0]))
            v = row[1].strip().lower()
            vs.append(math.inf if v in ("+inf", "inf") else float(row[1]))
        return cls(np.array(xs), np.array(vs))


# -- inversion --------------------------------------------------------------


def invert_value_raw(f: StepFunction, t: float) -> float:
    """Literal sup-formula inverse: sup({xi : f(xi) < t} u {0}).

    Kept separate from :func:`invert` because the sup formula is not
    right-continuous at isolated points (the jump values of ``f``); the
    normalized inverse agrees with it everywhere else.
    """
    vs, xs = f.values, f.breakpoints
    if vs[0] >= t:
        return 0.0
    j = int(np.searchsorted(vs, t, side="left"))  # first index with vs[j] >= t
    if j == len(vs):
        return f.domain_end
    return float(xs[j])


def invert(f: StepFunction) -> StepFunction:
    """Monotone inverse, normalized right-continuous: g(t) = inf{xi : f(xi) > t}.

    Applied to a front path this is exactly the hitting-time process, and
    applying it twice returns the input at every continuity point.  No
    arithmetic is performed on the coordinates, so the round trip is exact
    in floating point.
    """
    xs, vs = f.breakpoints, f.values
    out_t = [0.0]
    out_v = []
    # value of g on [0, vs[0]) is xs[0] = 0 when vs[0] > 0
    if vs[0] > 0:
        out_v.append(0.0)
    else:
        out_v.append(_first_exceed(xs, vs, 0.0, f.domain_end))
    for v in vs:
        if math.isinf(v):
            break
        if v == 0.0:
            continue
        nxt = _first_exceed(xs, vs, v, f.domain_end)
        if out_t[-1] == v:
            out_v[-1] = nxt
        else:
            out_t.append(float(v))
            out_v.append(nxt)
    return StepFunction(np.array(out_t), np.array(out_v))


def _first_exceed(xs, vs, level, domain_end) -> float:
    """inf{xi : f(xi) > level}; +inf when f never exceeds the level."""
    j = int(np.searchsorted(vs, level, side="right"))
    if j == len(vs):
        return math.inf
    return float(xs[j])


# -- completed graphs and the M1 diagnostic ---------------------------------


@dataclass(frozen=True)
class CompletedGraph:
    """Monotone staircase through the graph of f and its jump segments.

    ``points`` are the polyline vertices; consecutive vertices differ in a
    single coordinate (alternating constancy and jump-fill segments).
    Starts at (0, 0) by the f(0-) = 0 convention and ends at (t0, f(t0)).
    """

    points: np.ndarray

    @property
    def segments(self):
        pts = [(float(p[0]), float(p[1])) for p in self.points]
        return list(zip(pts[:-1], pts[1:]))

    def arc_lengths(self) -> np.ndarray:
        d = np.abs(np.diff(self.points, axis=0)).sum(axis=1)  # axis-aligned
        return np.concatenate(([0.0], np.cumsum(d)))

    def transpose(self) -> "CompletedGraph":
        return CompletedGraph(self.points[:, ::-1].copy())


def completed_graph(f: StepFunction, t0: float) -> CompletedGraph:
    """Staircase covering graph and jump fills of f on [0, t0]."""
    if t0 < 0:
        raise ValueError("t0 must be >= 0")
    if f(t0) == math.inf:
        raise ValueError("t0 is beyond the explosion point of f")
    pts = [(0.0, 0.0)]
    if f.values[0] > 0:
        pts.append((0.0, float(f.values[0])))
    for x, v in zip(f.breakpoints[1:], f.values[1:]):
        if x > t0:
            break
        pts.append((float(x), pts[-1][1]))   # constancy up to the jump
        pts.append((float(x), float(v)))     # jump fill
    if pts[-1][0] < t0:
        pts.append((float(t0), pts[-1][1]))
    # drop zero-length segments
    out = [pts[0]]
    for p in pts[1:]:
        if p != out[-1]:
            out.append(p)
    if len(out) == 1:
        out.append(out[0])
    return CompletedGraph(np.array(out, dtype=float))


class M1Diagnostic(NamedTuple):
    upper: float
    lower: float


def m1_distance(f1: StepFunction, f2: StepFunction, t0: float,
                grid: int = 256) -> M1Diagnostic:
    """Bracket the M1 distance between f1 and f2 on [0, t0].

    ``upper`` minimizes the uniform distance over monotone matchings of
    arc-length-uniform samples of the two completed graphs (a discrete
    search over parametrizations, an upper bound that tightens with
    ``grid``).  ``lower`` is the two-sided Hausdorff distance between the
    graphs, which never exceeds the parametrization infimum.
    """
    g1 = completed_graph(f1, t0)
    g2 = completed_graph(f2, t0)
    p1 = _resample(g1, grid)
    p2 = _resample(g2, grid)
    return M1Diagnostic(upper=_discrete_frechet(p1, p2),
                        lower=max(_directed_hausdorff(p1, g2.points),
                                  _directed_hausdorff(p2, g1.points)))


def _resample(g: CompletedGraph, grid: int) -> np.ndarray:
    """Arc-length-uniform samples of the staircase, vertices included."""
    arcs = g.arc_lengths()
    total = arcs[-1]
    if total == 0:
        return g.points[:1]
    s = np.unique(np.concatenate([np.linspace(0.0, total, grid), arcs]))
    idx = np.clip(np.searchsorted(arcs, s, side="right") - 1, 0, len(arcs) - 2)
    seg_len = arcs[idx + 1] - arcs[idx]
    frac = np.where(seg_len > 0, (s - arcs[idx]) / np.where(seg_len > 0, seg_len, 1.0), 0.0)
    return g.points[idx] + frac[:, None] * (g.points[idx + 1] - g.points[idx])


def _discrete_frechet(p: np.ndarray, q: np.ndarray) -> float:
    n, m = len(p), len(q)
    d = np.sqrt(((p[:, None, :] - q[None, :, :]) ** 2).sum(axis=2))
    ca = np.empty((n, m))
    ca[0, 0] = d[0, 0]
    for j in range(1, m):
        ca[0, j] = max(ca[0, j - 1], d[0, j])
    for i in range(1, n):
        ca[i, 0] = max(ca[i - 1, 0], d[i, 0])
        row, prev = ca[i], ca[i - 1]
        for j in range(1, m):
            row[j] = max(min(prev[j], prev[j - 1], row[j - 1]), d[i, j])
    return float(ca[-1, -1])


def _directed_hausdorff(points: np.ndarray, polyline: np.ndarray) -> float:
    """max over ``points`` of the exact distance to the polyline."""
    a = polyline[:-1]
    b = polyline[1:]
    ab = b - a
    denom = (ab ** 2).sum(axis=1)
    denom = np.where(denom > 0, denom, 1.0)
    best = np.full(len(points), np.inf)
    for k in range(len(a)):
        t = ((points - a[k]) @ ab[k]) / denom[k]
        t = np.clip(t, 0.0, 1.0)
        proj = a[k] + t[:, None] * ab[k]
        dist = np.sqrt(((points - proj) ** 2).sum(axis=1))
        best = np.minimum(best, dist)
    return float(best.max())

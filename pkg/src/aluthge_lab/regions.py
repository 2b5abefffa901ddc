"""Threshold curves and region classification for the corner family.

For the corner-perturbed diagram with parameters (x, y), four curves in
the unit square separate the qualitative regimes:

    s(y)  = sqrt(1 / (2 - y^2))    subnormality boundary
    h(y)  = sqrt((1 + y^2) / 2)    joint hyponormality boundary
    CA(y) = (1 + y) / 2            hyponormality boundary of the toral transform
    PA(y)                          hyponormality boundary of the spherical transform

PA comes from composing two exact facts.  The spherical transform maps
the corner family to itself with parameters

    x^ = sqrt(x) ((1 + y^2) / 2)^{1/4},    y^ = y (2 / (1 + y^2))^{1/4},

and a corner diagram is jointly hyponormal iff x <= h(y).  Solving
x^ <= h(y^) for x gives

    PA(y) = (sqrt(1 + y^2) + sqrt(2) y^2) / (sqrt(2) (1 + y^2)).

The classifier never uses these parameter identities: its numerical
verdicts run the actual transforms through the six-point machinery, and
any off-boundary disagreement with the closed forms raises
InternalConsistencyError.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .diagrams import build_prop2
from .errors import DomainError, InternalConsistencyError
from .positivity import joint_hyponormal, k_hyponormal
from .transforms import spherical_transform, toral_transform

# Points closer than this to a curve are skipped when comparing verdicts.
BOUNDARY_MARGIN = 1e-6
BISECTION_TOL = 1e-10
DEFAULT_SCAN_LEVEL = 12


def curve_s(y: float) -> float:
    return math.sqrt(1.0 / (2.0 - y * y))


def curve_h(y: float) -> float:
    return math.sqrt((1.0 + y * y) / 2.0)


def curve_ca(y: float) -> float:
    return (1.0 + y) / 2.0


def curve_pa(y: float) -> float:
    r = 1.0 + y * y
    return (math.sqrt(r) + math.sqrt(2.0) * y * y) / (math.sqrt(2.0) * r)


@dataclass(frozen=True)
class ThresholdCurves:
    s: float
    h: float
    CA: float
    PA: float

    def __iter__(self):
        return iter((self.s, self.h, self.CA, self.PA))


def thresholds(y: float) -> ThresholdCurves:
    """The four curve values at y, with the ordering invariants enforced.

    s <= h <= PA and CA <= h hold on all of (0,1); a violation would mean
    a broken formula, not an interesting input.
    """
    if not (0.0 < y < 1.0):
        raise DomainError(f"require 0 < y < 1, got {y}")
    t = ThresholdCurves(s=curve_s(y), h=curve_h(y), CA=curve_ca(y), PA=curve_pa(y))
    if not (t.s <= t.h + 1e-15 and t.h <= t.PA + 1e-15 and t.CA <= t.h + 1e-15):
        raise InternalConsistencyError(f"curve ordering failed at y={y}: {t}")
    return t


def crossing_q() -> float:
    """The unique y in (0,1) where CA and s cross, by bisection.

    CA < s below the crossing and CA > s above it; the root solves
    (1 + y)^2 (2 - y^2) = 4.  Bracketed on (0.1, 0.9), resolved to 1e-10.
    """
    lo, hi = 0.1, 0.9

    def f(y):
        return curve_ca(y) - curve_s(y)

    flo = f(lo)
    if flo >= 0.0 or f(hi) <= 0.0:
        raise InternalConsistencyError("crossing bracket lost its sign change")
    while hi - lo > BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class RegionReport:
    """Closed-form and numerical verdicts for one (x, y) sample."""

    x: float
    y: float
    curves: ThresholdCurves
    closed: dict  # keys: subnormal_by_s, hyponormal_by_h, toral_by_CA, spherical_by_PA
    numeric: dict  # keys: joint, toral, spherical
    k_hypo: dict  # order -> verdict, empty when not requested


def classify(x: float, y: float, N: int = DEFAULT_SCAN_LEVEL, kmax: int = 1) -> RegionReport:
    """Verdicts for the corner diagram at (x, y) on truncation level N.

    Closed-form flags compare x against the four curves; numerical flags
    run the six-point test on the diagram and on both of its transforms.
    Off the curves by at least BOUNDARY_MARGIN, closed-form and numerical
    flags must agree, and a mismatch raises InternalConsistencyError.
    Orders 2..kmax (at level max(N, 4k+2)) land in k_hypo.
    """
    if not (0.0 < x < 1.0 and 0.0 < y < 1.0):
        raise DomainError(f"require (x, y) in the open unit square, got ({x}, {y})")
    t = thresholds(y)
    closed = {
        "subnormal_by_s": x <= t.s,
        "hyponormal_by_h": x <= t.h,
        "toral_by_CA": x <= t.CA,
        "spherical_by_PA": x <= t.PA,
    }

    W = build_prop2(x, y)
    window = N + 2
    numeric = {
        "joint": joint_hyponormal(W, N)[0],
        "toral": joint_hyponormal(toral_transform(W, window=window).diagram, N)[0],
        "spherical": joint_hyponormal(spherical_transform(W, window=window), N)[0],
    }

    for curve, closed_key, numeric_key in (
        (t.h, "hyponormal_by_h", "joint"),
        (t.CA, "toral_by_CA", "toral"),
        (t.PA, "spherical_by_PA", "spherical"),
    ):
        if abs(x - curve) >= BOUNDARY_MARGIN and closed[closed_key] != numeric[numeric_key]:
            raise InternalConsistencyError(
                f"closed-form and numerical verdicts disagree at (x, y) = "
                f"({x}, {y}): {closed_key}={closed[closed_key]}, "
                f"{numeric_key}={numeric[numeric_key]}"
            )

    k_map = {}
    for k in range(2, kmax + 1):
        k_map[k] = k_hyponormal(W, k, max(N, 4 * k + 2))
    return RegionReport(x=x, y=y, curves=t, closed=closed, numeric=numeric, k_hypo=k_map)


def probe_ladder(y: float, count: int) -> list:
    """count x-values spread over (0,1), each >= BOUNDARY_MARGIN off every curve."""
    curves = list(thresholds(y))
    xs = []
    for j in range(1, count + 1):
        x = j / (count + 1)
        while any(abs(x - c) < BOUNDARY_MARGIN for c in curves):
            x += 2.0 * BOUNDARY_MARGIN
        xs.append(x)
    return xs


SCAN_HEADER = "y,s,h,CA,PA,x,joint_hypo,toral_hypo,spherical_hypo,khypo2,khypo3"


def region_scan(grid: int, N: int = DEFAULT_SCAN_LEVEL, out=None, ladder: int = 20):
    """CSV scan over y_i = i/(grid+1) with a per-row ladder of x values.

    Each (y, x) sample runs the full classifier including orders 2 and 3;
    floats carry 12 significant digits and verdicts are 1/0.  Rows come
    out in deterministic (y, x) order; the ALUTHGE_LAB_THREADS environment
    variable caps the worker pool used to compute them (default serial).
    Returns the CSV lines; writes them to `out` when given.
    """
    if grid < 2:
        raise DomainError("grid must be >= 2")
    points = [(y, x) for y in (i / (grid + 1) for i in range(1, grid + 1)) for x in probe_ladder(y, ladder)]

    def row(point):
        y, x = point
        rep = classify(x, y, N, kmax=3)
        vals = [y, *rep.curves, x]
        bits = [
            rep.numeric["joint"],
            rep.numeric["toral"],
            rep.numeric["spherical"],
            rep.k_hypo[2],
            rep.k_hypo[3],
        ]
        return ",".join(f"{v:.12g}" for v in vals) + "," + ",".join(str(int(b)) for b in bits)

    threads = int(os.environ.get("ALUTHGE_LAB_THREADS", "1") or "1")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            body = list(pool.map(row, points))
    else:
        body = [row(p) for p in points]
    lines = [SCAN_HEADER, *body]
    if out is not None:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    return lines

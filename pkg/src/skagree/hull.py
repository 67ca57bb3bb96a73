"""Planar convex hulls and the few polygon queries the rate regions need."""
from __future__ import annotations

import numpy as np
from scipy.spatial import ConvexHull, QhullError

ROUND_DECIMALS = 12
PREFILTER_MIN = 64


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def unique_rows(pts: np.ndarray) -> np.ndarray:
    """Distinct rows of an (n, 2) array in lexicographic order (faster than np.unique(axis=0))."""
    if len(pts) == 0:
        return pts
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]
    keep = np.concatenate([[True], np.any(np.diff(pts, axis=0) != 0, axis=1)])
    return pts[keep]


def _drop_flat_vertices(hull: list, tol: float) -> list:
    """Remove vertices within ``tol`` of the chord joining their neighbours."""
    changed = True
    while changed and len(hull) > 2:
        changed = False
        n = len(hull)
        for i in range(n):
            o, a, b = np.array(hull[i - 1]), np.array(hull[i]), np.array(hull[(i + 1) % n])
            seg = b - o
            length2 = float(seg @ seg)
            if length2 == 0.0:
                continue
            between = 0.0 <= float((a - o) @ seg) <= length2
            if between and abs(_cross(o, a, b)) <= tol * np.sqrt(length2):
                del hull[i]
                changed = True
                break
    return hull


def convex_hull_2d(points) -> np.ndarray:
    """Counterclockwise hull vertices, starting at the lexicographically lowest point.

    Collinear (up to rounding noise) and duplicate points are dropped, so the
    hull of a collinear set is its two endpoints. Coordinates are rounded to
    1e-12 first, which makes the output deterministic and the operation
    idempotent.
    """
    pts = np.round(np.asarray(points, dtype=float).reshape(-1, 2), ROUND_DECIMALS) + 0.0
    if len(pts) == 0:
        raise ValueError("convex hull of an empty point set")
    if len(pts) > PREFILTER_MIN:
        # Qhull discards interior points fast; the exact chain below fixes the output
        try:
            pts = pts[ConvexHull(pts).vertices]
        except QhullError:
            pass
    pts = unique_rows(pts)
    if len(pts) <= 2:
        return pts
    pts = [tuple(p) for p in pts]
    lower: list = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    # vertices within rounding noise of a chord count as collinear
    tol = 1e-11 * max(float(np.ptp(pts, axis=0).max()), 1.0)
    hull = _drop_flat_vertices(lower[:-1] + upper[:-1], tol)
    start = hull.index(min(hull))
    return np.array(hull[start:] + hull[:start], dtype=float)


def is_convex_ccw(hull) -> bool:
    h = np.asarray(hull)
    if len(h) < 3:
        return True
    n = len(h)
    return all(_cross(h[i], h[(i + 1) % n], h[(i + 2) % n]) > 0 for i in range(n))


def _seg_dist(p, a, b) -> float:
    ab = b - a
    denom = float(ab @ ab)
    t = 0.0 if denom == 0 else float(np.clip((p - a) @ ab / denom, 0.0, 1.0))
    return float(np.linalg.norm(p - (a + t * ab)))


def point_distance(hull, p) -> float:
    """Euclidean distance from ``p`` to the convex polygon ``hull`` (0 inside)."""
    h = np.asarray(hull, dtype=float).reshape(-1, 2)
    p = np.asarray(p, dtype=float)
    if len(h) == 1:
        return float(np.linalg.norm(p - h[0]))
    if len(h) == 2:
        return _seg_dist(p, h[0], h[1])
    n = len(h)
    inside = True
    for i in range(n):
        a, b = h[i], h[(i + 1) % n]
        if _cross(a, b, p) < 0:
            inside = False
            break
    if inside:
        return 0.0
    return min(_seg_dist(p, h[i], h[(i + 1) % n]) for i in range(n))


def contains(hull, p, tol: float = 1e-9) -> bool:
    return point_distance(hull, p) <= tol


def contains_hull(outer, inner, tol: float = 1e-9) -> bool:
    """Vertex-wise containment of one convex polygon in another."""
    return all(contains(outer, v, tol) for v in np.asarray(inner).reshape(-1, 2))


def hausdorff(h1, h2) -> float:
    """Hausdorff distance between two convex polygons (attained at vertices)."""
    d12 = max(point_distance(h2, v) for v in np.asarray(h1).reshape(-1, 2))
    d21 = max(point_distance(h1, v) for v in np.asarray(h2).reshape(-1, 2))
    return max(d12, d21)

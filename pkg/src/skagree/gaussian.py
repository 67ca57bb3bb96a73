"""Closed-form key-rate region of the scalar Gaussian model.

Sources: S1 = S3 + E1, S2 = S3 + E2 with S3 ~ N(0, P3), Ei ~ N(0, Nsi).
Channel: Yk = X1 + X2 + Eck, Eck ~ N(0, Nck), input powers P1, P2.
Auxiliaries: V_i = X_i Gaussian at full power, S_i = U_i + D_i with
U_i ~ N(0, PU_i) independent of D_i. All logarithms are base 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect

from .errors import DomainError, InputError
from .hull import contains_hull
from .regions import RateCorner, RateRegion, _pentagon_vertices, positive_part

REL_SLACK = 1e-12
NARRATED_THRESHOLD = 0.75  # approximate activation point quoted for the symmetric sweep
NARRATED_SHAPES = {0.8: "rectangle", 0.9: "pentagon"}
FIG_NC_VALUES = (0.5, 0.6, 0.7, 0.8, 0.9)


@dataclass(frozen=True)
class GaussianParams:
    P1: float
    P2: float
    P3: float
    Ns1: float
    Ns2: float
    Nc1: float
    Nc2: float
    Nc3: float

    def __post_init__(self):
        for k, v in self.__dict__.items():
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise InputError(f"{k} must be a positive finite number, got {v!r}")

    @classmethod
    def fig2(cls, nc: float = 0.5) -> "GaussianParams":
        """P1=P2=P3=1, Ns1=Ns2=Nc3=0.5 and symmetric eavesdropper noise Nc1=Nc2=nc."""
        return cls(1.0, 1.0, 1.0, 0.5, 0.5, nc, nc, 0.5)

    def with_eavesdropper_noise(self, nc: float) -> "GaussianParams":
        return GaussianParams(self.P1, self.P2, self.P3, self.Ns1, self.Ns2, nc, nc, self.Nc3)


@dataclass(frozen=True)
class GaussianAux:
    PU1: float
    PU2: float

    def check(self, p: GaussianParams) -> None:
        if self.PU1 < 0 or self.PU2 < 0:
            raise InputError("auxiliary powers must be nonnegative")
        if self.PU1 > p.P3 + p.Ns1 or self.PU2 > p.P3 + p.Ns2:
            raise InputError("auxiliary power exceeds the source variance")


def joint_constants(p: GaussianParams) -> tuple[float, float, float]:
    """(A, A1, A2) of the joint auxiliary-power constraint."""
    t1, t2 = p.P3 + p.Ns1, p.P3 + p.Ns2
    ptot = p.P1 + p.P2
    a = p.Ns1 * p.Ns2 * p.Nc3 + p.P3 * p.Nc3 * (p.Ns1 + p.Ns2) + ptot * t1 * t2
    a1 = t1 ** 2 * (p.Ns2 * p.Nc3 + ptot * t2) / a
    a2 = t2 ** 2 * (p.Ns1 * p.Nc3 + ptot * t1) / a
    return a, a1, a2


def pu_bounds(p: GaussianParams) -> tuple[float, float]:
    t1, t2 = p.P3 + p.Ns1, p.P3 + p.Ns2
    return (p.P1 * t1 ** 2 / (p.Ns1 * p.Nc3 + p.P1 * t1),
            p.P2 * t2 ** 2 / (p.Ns2 * p.Nc3 + p.P2 * t2))


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    slacks: tuple[float, float, float]   # relative; negative = violated


def _feasible_arrays(p: GaussianParams, pu1, pu2):
    b1, b2 = pu_bounds(p)
    a, a1, a2 = joint_constants(p)
    rhs = a1 * a2 - (p.P1 + p.P2) * (p.P3 + p.Ns1) ** 2 * (p.P3 + p.Ns2) ** 2 / a
    lhs = (a1 - pu1) * (a2 - pu2)
    scale = max(abs(a1 * a2), abs(rhs), 1e-300)
    s1 = (b1 - pu1) / b1
    s2 = (b2 - pu2) / b2
    s3 = (lhs - rhs) / scale
    ok = (s1 >= -REL_SLACK) & (s2 >= -REL_SLACK) & (s3 >= -REL_SLACK)
    return ok, s1, s2, s3


def gaussian_feasible(p: GaussianParams, a: GaussianAux) -> FeasibilityReport:
    """Individual and joint auxiliary-power constraints, with relative slacks."""
    a.check(p)
    ok, s1, s2, s3 = _feasible_arrays(p, a.PU1, a.PU2)
    return FeasibilityReport(bool(ok), (float(s1), float(s2), float(s3)))


def source_terms(p: GaussianParams, pu1, pu2):
    t1, t2 = p.P3 + p.Ns1, p.P3 + p.Ns2
    g1 = pu1 * p.P3 * p.Ns2 / ((t1 ** 2 - pu1 * p.P3) * t2)
    g2 = pu2 * p.P3 * p.Ns1 / ((t2 ** 2 - pu2 * p.P3) * t1)
    r1 = 0.5 * np.log2(1 + g1)
    r2 = 0.5 * np.log2(1 + g2)
    return r1, r2, 0.5 * np.log2((1 + g1) * (1 + g2))


def channel_terms(p: GaussianParams) -> tuple[float, float, float]:
    lg = lambda x: math.log2(1 + x)  # noqa: E731
    c1 = 0.5 * positive_part(lg(p.P1 / p.Nc3) - lg(p.P1 / p.Nc2))
    c2 = 0.5 * positive_part(lg(p.P2 / p.Nc3) - lg(p.P2 / p.Nc1))
    cs = 0.5 * positive_part(lg((p.P1 + p.P2) / p.Nc3) - lg(p.P1 / p.Nc2) - lg(p.P2 / p.Nc1))
    return c1, c2, cs


def gaussian_corner(p: GaussianParams, a: GaussianAux) -> RateCorner:
    rep = gaussian_feasible(p, a)
    if not rep.feasible:
        raise DomainError(f"infeasible auxiliary powers; slacks {rep.slacks}")
    s1, s2, ss = (float(v) for v in source_terms(p, a.PU1, a.PU2))
    c1, c2, cs = channel_terms(p)
    terms = {"source_r1": s1, "source_r2": s2, "source_sum": ss,
             "channel_r1": c1, "channel_r2": c2, "channel_sum": cs}
    return RateCorner(s1 + c1, s2 + c2, ss + cs, True, terms)


@dataclass(frozen=True, eq=False)
class GaussianSweepPoint:
    params: GaussianParams
    region: RateRegion
    best: tuple[float, float, float]       # max r1, max r2, max sum over feasible grid
    channel: tuple[float, float, float]
    shape: str
    extra: dict = field(default_factory=dict)


def _grid_corners(p: GaussianParams, steps: int) -> np.ndarray:
    b1, b2 = pu_bounds(p)
    g1 = np.linspace(0.0, b1, steps)
    g2 = np.linspace(0.0, b2, steps)
    pu1, pu2 = np.meshgrid(g1, g2, indexing="ij")
    ok, *_ = _feasible_arrays(p, pu1, pu2)
    s1, s2, ss = source_terms(p, pu1[ok], pu2[ok])
    c1, c2, cs = channel_terms(p)
    return np.column_stack([s1 + c1, s2 + c2, ss + cs])


def gaussian_region(p: GaussianParams, steps: int = 200) -> RateRegion:
    """Convexified union of pentagons over a steps x steps grid of (PU1, PU2)."""
    if steps < 2:
        raise InputError("steps must be >= 2")
    corners = _grid_corners(p, steps)
    meta = {"steps": steps, "feasible_points": int(len(corners)),
            "channel_terms": list(channel_terms(p))}
    return RateRegion.from_points(_pentagon_vertices(corners), False, meta)


def classify_shape(r1: float, r2: float, s: float, tol: float = 1e-9) -> str:
    """'rectangle' when the sum constraint is inactive (r1 + r2 <= sum)."""
    return "rectangle" if r1 + r2 <= s + tol else "pentagon"


def sweep_point(p: GaussianParams, steps: int = 200) -> GaussianSweepPoint:
    corners = _grid_corners(p, steps)
    best = tuple(float(v) for v in corners.max(axis=0))
    region = RateRegion.from_points(_pentagon_vertices(corners), False, {"steps": steps})
    ch = channel_terms(p)
    # per-auxiliary activity: whether any single grid point is already rectangular
    per_aux = bool(np.any(corners[:, 0] + corners[:, 1] <= corners[:, 2] + 1e-9))
    return GaussianSweepPoint(p, region, best, ch, classify_shape(*best),
                              {"any_rectangular_aux": per_aux})


def sum_term_threshold(p: GaussianParams, xtol: float = 1e-12) -> float:
    """Symmetric eavesdropper noise x at which the sum-rate channel term turns positive.

    Root of (1 + (P1+P2)/Nc3) = (1 + P1/x)(1 + P2/x), found by bisection.
    """
    target = math.log2(1 + (p.P1 + p.P2) / p.Nc3)

    def f(x):
        return target - math.log2(1 + p.P1 / x) - math.log2(1 + p.P2 / x)

    lo, hi = 1e-300, 1.0
    while f(hi) <= 0 and hi < 1e300:
        hi *= 2
    if not f(hi) > 0 or not f(lo) < 0:
        raise DomainError("sum-rate channel term never becomes positive")
    return bisect(f, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=2000)


@dataclass(frozen=True, eq=False)
class SweepReport:
    points: list
    threshold: float
    nested: bool
    discrepancies: list

    def rows(self) -> list[dict]:
        out = []
        for sp in self.points:
            out.append({"Nc": sp.params.Nc1, "shape": sp.shape,
                        "r1_best": sp.best[0], "r2_best": sp.best[1], "sum_best": sp.best[2],
                        "channel_r1": sp.channel[0], "channel_r2": sp.channel[1],
                        "channel_sum": sp.channel[2], "sum_threshold": self.threshold,
                        "hull": sp.region.hull.tolist()})
        return out


def symmetric_sweep(base: GaussianParams | None = None, nc_values=FIG_NC_VALUES,
                    steps: int = 200) -> SweepReport:
    """Regions for Nc1 = Nc2 over ``nc_values``, with nesting and narration checks."""
    base = base or GaussianParams.fig2()
    pts = [sweep_point(base.with_eavesdropper_noise(nc), steps) for nc in nc_values]
    nested = all(contains_hull(b.region.hull, a.region.hull, 1e-9) for a, b in zip(pts, pts[1:]))
    try:
        thr = sum_term_threshold(base)
    except DomainError:
        thr = float("nan")
    issues = []
    narrated = base.with_eavesdropper_noise(0.5) == GaussianParams.fig2()
    if narrated and math.isfinite(thr) and abs(thr - NARRATED_THRESHOLD) > 0.01:
        issues.append({"item": "sum_threshold", "narrated": NARRATED_THRESHOLD, "computed": thr})
    for sp in pts:
        want = NARRATED_SHAPES.get(round(sp.params.Nc1, 6)) if narrated else None
        if want is not None and want != sp.shape:
            issues.append({"item": f"shape@Nc={sp.params.Nc1}", "narrated": want, "computed": sp.shape})
    return SweepReport(pts, thr, nested, issues)

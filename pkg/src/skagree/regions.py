"""Inner bound, outer bound and special-case capacity of the key-rate region.

The inner region is searched over auxiliary laws on simplex grids. Source-side
auxiliaries (p(u1|s1), p(u2|s2)) and channel-side auxiliaries (p(v), p(x|v))
enter the rate bounds additively and only couple through three feasibility
inequalities, so the two sides are enumerated separately, pruned to their
Pareto fronts, and then paired.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from .errors import InputError, PreconditionError
from .hull import contains, convex_hull_2d, unique_rows
from .models import (AuxiliaryConfig, ChannelModel, SourceModel, channel_aux_joint,
                     check_special_case, source_aux_joint)
from .prob import BatchInfo, cmi_array, product_grid, simplex_grid_array

FEAS_SLACK = 1e-9
CHUNK = 4096


def positive_part(x):
    """max(x, 0), elementwise for arrays."""
    if np.ndim(x):
        return np.maximum(x, 0.0)
    return max(float(x), 0.0)


@dataclass(frozen=True)
class RateCorner:
    r1_max: float
    r2_max: float
    sum_max: float
    feasible: bool = True
    terms: dict = field(default_factory=dict, compare=False)

    def as_tuple(self) -> tuple[float, float, float]:
        return self.r1_max, self.r2_max, self.sum_max

    def admits(self, point, tol: float = 1e-6) -> bool:
        r1, r2 = point
        return (r1 <= self.r1_max + tol and r2 <= self.r2_max + tol
                and r1 + r2 <= self.sum_max + tol and r1 >= -tol and r2 >= -tol)

    def to_dict(self) -> dict:
        return {"r1_max": self.r1_max, "r2_max": self.r2_max, "sum_max": self.sum_max,
                "feasible": self.feasible,
                "terms": {k: float(v) for k, v in self.terms.items()}}


@dataclass(frozen=True, eq=False)
class RateRegion:
    points: np.ndarray
    hull: np.ndarray
    partial: bool = False
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_points(cls, points, partial: bool = False, meta: dict | None = None) -> "RateRegion":
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        # time sharing with the trivial scheme: origin and axis projections
        proj = np.concatenate([pts, pts * [1, 0], pts * [0, 1], [[0.0, 0.0]]])
        pts = unique_rows(np.round(proj, 12) + 0.0)
        return cls(pts, convex_hull_2d(pts), partial, dict(meta or {}))

    def contains(self, point, tol: float = 1e-9) -> bool:
        return contains(self.hull, point, tol)

    def to_dict(self) -> dict:
        return {"points": self.points.tolist(), "hull": self.hull.tolist(),
                "partial": self.partial, "meta": self.meta}


def corner_to_points(c: RateCorner) -> list[tuple[float, float]]:
    """Vertices of {0<=R1<=a, 0<=R2<=b, R1+R2<=c} in counterclockwise order."""
    if not c.feasible:
        return []
    a, b, s = c.r1_max, c.r2_max, c.sum_max
    x1 = min(a, s)
    y2 = min(b, s)
    raw = [(0.0, 0.0), (x1, 0.0), (x1, min(b, s - x1)), (min(a, s - y2), y2), (0.0, y2)]
    out: list[tuple[float, float]] = []
    for p in raw:
        p = (float(p[0]), float(p[1]))
        if p not in out:
            out.append(p)
    return out


def _pentagon_vertices(corners: np.ndarray) -> np.ndarray:
    """Vectorized corner_to_points for an (n, 3) array; duplicates kept."""
    a, b, s = corners[:, 0], corners[:, 1], corners[:, 2]
    x1, y2 = np.minimum(a, s), np.minimum(b, s)
    pts = [np.stack([x1, np.zeros_like(a)], 1),
           np.stack([x1, np.minimum(b, s - x1)], 1),
           np.stack([np.minimum(a, s - y2), y2], 1),
           np.stack([np.zeros_like(a), y2], 1)]
    return np.concatenate(pts + [np.zeros((1, 2))])


# ---------------------------------------------------------------------------
# Single-configuration evaluation


def inner_bound_point(src: SourceModel, ch: ChannelModel, aux: AuxiliaryConfig) -> RateCorner:
    """Rate bounds and feasibility of one auxiliary configuration."""
    ps = source_aux_joint(src, aux)
    pc = channel_aux_joint(ch, aux)
    I = lambda p, a, b, c=(): p.mutual_information(a, b, c)  # noqa: E731
    t = {
        "I(U1;S3|U2)": I(ps, ["U1"], ["S3"], ["U2"]),
        "I(U1;S2|U2)": I(ps, ["U1"], ["S2"], ["U2"]),
        "I(U2;S3|U1)": I(ps, ["U2"], ["S3"], ["U1"]),
        "I(U2;S1|U1)": I(ps, ["U2"], ["S1"], ["U1"]),
        "I(U1,U2;S3)": I(ps, ["U1", "U2"], ["S3"]),
        "I(U1;U2)": I(ps, ["U1"], ["U2"]),
        "I(U1;S1|U2,S3)": I(ps, ["U1"], ["S1"], ["U2", "S3"]),
        "I(U2;S2|U1,S3)": I(ps, ["U2"], ["S2"], ["U1", "S3"]),
        "I(U1,U2;S1,S2|S3)": I(ps, ["U1", "U2"], ["S1", "S2"], ["S3"]),
        "I(V1;Y3|V2)": I(pc, ["V1"], ["Y3"], ["V2"]),
        "I(V2;Y3|V1)": I(pc, ["V2"], ["Y3"], ["V1"]),
        "I(V1,V2;Y3)": I(pc, ["V1", "V2"], ["Y3"]),
        "I(V1;Y2|V2,X2)": I(pc, ["V1"], ["Y2"], ["V2", "X2"]),
        "I(V2;Y1|V1,X1)": I(pc, ["V2"], ["Y1"], ["V1", "X1"]),
    }
    src1 = positive_part(t["I(U1;S3|U2)"] - t["I(U1;S2|U2)"])
    src2 = positive_part(t["I(U2;S3|U1)"] - t["I(U2;S1|U1)"])
    srcs = positive_part(t["I(U1,U2;S3)"] - t["I(U1;S2|U2)"] - t["I(U2;S1|U1)"] - t["I(U1;U2)"])
    ch1 = positive_part(t["I(V1;Y3|V2)"] - t["I(V1;Y2|V2,X2)"])
    ch2 = positive_part(t["I(V2;Y3|V1)"] - t["I(V2;Y1|V1,X1)"])
    chs = positive_part(t["I(V1,V2;Y3)"] - t["I(V1;Y2|V2,X2)"] - t["I(V2;Y1|V1,X1)"])
    feasible = (t["I(U1;S1|U2,S3)"] <= t["I(V1;Y3|V2)"] + FEAS_SLACK
                and t["I(U2;S2|U1,S3)"] <= t["I(V2;Y3|V1)"] + FEAS_SLACK
                and t["I(U1,U2;S1,S2|S3)"] <= t["I(V1,V2;Y3)"] + FEAS_SLACK)
    t.update({"source_r1": src1, "source_r2": src2, "source_sum": srcs,
              "channel_r1": ch1, "channel_r2": ch2, "channel_sum": chs})
    return RateCorner(src1 + ch1, src2 + ch2, srcs + chs, bool(feasible), t)


# ---------------------------------------------------------------------------
# Batched term evaluation


def source_terms_batch(src_table: np.ndarray, w1: np.ndarray, w2: np.ndarray) -> np.ndarray:
    """Source-side terms for paired batches of p(u1|s1), p(u2|s2).

    Returns an (n, 6) array with columns
    [src_r1, src_r2, src_sum, req1, req2, req_sum], where the req columns are
    the rates the channel must carry: I(U1;S1|U2,S3), I(U2;S2|U1,S3),
    I(U1,U2;S1,S2|S3).
    """
    joint = np.einsum("nau,nbv,abc->nuvabc", w1, w2, src_table)
    bi = BatchInfo(joint, batch=1)
    U1, U2, S1, S2, S3 = [0], [1], [2], [3], [4]
    i_u1s2 = bi.i(U1, S2, U2)
    i_u2s1 = bi.i(U2, S1, U1)
    return np.stack([
        positive_part(bi.i(U1, S3, U2) - i_u1s2),
        positive_part(bi.i(U2, S3, U1) - i_u2s1),
        positive_part(bi.i(U1 + U2, S3) - i_u1s2 - i_u2s1 - bi.i(U1, U2)),
        bi.i(U1, S1, U2 + S3),
        bi.i(U2, S2, U1 + S3),
        bi.i(U1 + U2, S1 + S2, S3),
    ], axis=1)


def channel_terms_batch(ch: ChannelModel, pv1, q1, pv2, q2) -> np.ndarray:
    """Channel-side terms for paired batches of (p(v1), p(x1|v1)) and (p(v2), p(x2|v2)).

    Returns (n, 6): [ch_r1, ch_r2, ch_sum, cap1, cap2, cap_sum] with
    cap1 = I(V1;Y3|V2), cap2 = I(V2;Y3|V1), cap_sum = I(V1,V2;Y3).
    Only the per-output marginals of the channel are needed, which keeps the
    batched tables small.
    """
    V1, V2, X1, X2, Y = [0], [1], [2], [3], [4]
    front = np.einsum("na,nb,nax,nby->nabxy", pv1, pv2, q1, q2)
    j3 = BatchInfo(np.einsum("nabxy,xyk->nabxyk", front, ch.output_marginal(3)), batch=1)
    j2 = np.einsum("nabxy,xyk->nabxyk", front, ch.output_marginal(2))
    j1 = np.einsum("nabxy,xyk->nabxyk", front, ch.output_marginal(1))
    leak1 = cmi_array(j2, V1, Y, V2 + X2, batch=1)
    leak2 = cmi_array(j1, V2, Y, V1 + X1, batch=1)
    cap1, cap2, caps = j3.i(V1, Y, V2), j3.i(V2, Y, V1), j3.i(V1 + V2, Y)
    return np.stack([
        positive_part(cap1 - leak1),
        positive_part(cap2 - leak2),
        positive_part(caps - leak1 - leak2),
        cap1, cap2, caps,
    ], axis=1)


def pareto_front(values: np.ndarray) -> np.ndarray:
    """Indices of rows not weakly dominated by another row (all columns maximized).

    Exact duplicates (after rounding to 1e-12) are collapsed to one representative.
    """
    v = np.round(np.asarray(values, dtype=float), 12)
    if len(v) == 0:
        return np.zeros(0, dtype=int)
    _, first = np.unique(v, axis=0, return_index=True)
    order = first[np.argsort(-v[first].sum(axis=1), kind="stable")]
    kept: list[int] = []
    front = np.empty((len(order), v.shape[1]))
    k = 0
    for i in order:
        if k and np.any(np.all(front[:k] >= v[i], axis=1)):
            continue
        kept.append(i)
        front[k] = v[i]
        k += 1
    return np.sort(np.array(kept, dtype=int))


# ---------------------------------------------------------------------------
# Candidate enumeration


@dataclass(frozen=True)
class SearchConfig:
    """Search resolution and budget for the inner-region search.

    ``u_sizes``/``v_sizes`` default to |S_i|+2 and |X_i|+1. With
    ``channel_aux="identity"`` the channel auxiliaries are fixed to V_i = X_i and
    only the input laws p(x_i) are searched.
    """

    steps: int = 4
    u_sizes: tuple[int, int] | None = None
    v_sizes: tuple[int, int] | None = None
    channel_aux: str = "general"
    restarts: int = 0
    seed: int = 0
    max_configs: int = 4_000_000
    threads: int = 1

    def __post_init__(self):
        if self.steps < 1:
            raise InputError("steps must be >= 1")
        if self.channel_aux not in ("general", "identity"):
            raise InputError("channel_aux must be 'general' or 'identity'")
        for sz in (self.u_sizes, self.v_sizes):
            if sz is not None and (len(sz) != 2 or min(sz) < 1):
                raise InputError("alphabet sizes must be two integers >= 1")
        if self.restarts < 0 or self.threads < 1 or self.max_configs < 1:
            raise InputError("restarts >= 0, threads >= 1 and max_configs >= 1 required")

    def resolved(self, src: SourceModel, ch: ChannelModel) -> "SearchConfig":
        s1, s2, _ = src.sizes
        x1, x2 = ch.input_sizes
        u = self.u_sizes or (s1 + 2, s2 + 2)
        v = (x1, x2) if self.channel_aux == "identity" else (self.v_sizes or (x1 + 1, x2 + 1))
        return replace(self, u_sizes=tuple(u), v_sizes=tuple(v))


def _canonical_source_aux(mats: np.ndarray) -> np.ndarray:
    """One representative per U-relabeling class (columns sorted lexicographically)."""
    keys = []
    for m in mats:
        cols = sorted(map(tuple, np.round(m.T, 12)))
        keys.append(np.array(cols).T)
    arr = np.array(keys)
    flat = np.unique(arr.reshape(len(arr), -1), axis=0)
    return flat.reshape((-1,) + mats.shape[1:])


def source_candidates(n_s: int, n_u: int, steps: int, restarts: int = 0, rng=None) -> np.ndarray:
    """All p(u|s) on the grid (modulo relabeling of U), plus random restarts."""
    mats = _canonical_source_aux(product_grid(n_u, n_s, steps))
    if restarts:
        extra = rng.dirichlet(np.ones(n_u), size=(restarts, n_s))
        mats = np.concatenate([mats, extra])
    return mats


def channel_candidates(n_x: int, n_v: int, steps: int, restarts: int = 0, rng=None,
                       identity: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """(p(v), p(x|v)) candidates; with ``identity`` p(x|v) is the identity map."""
    if identity:
        pv = simplex_grid_array(n_x, steps)
        if restarts:
            pv = np.concatenate([pv, rng.dirichlet(np.ones(n_x), size=restarts)])
        return pv, np.broadcast_to(np.eye(n_x), (len(pv), n_x, n_x)).copy()
    pv_grid = simplex_grid_array(n_v, steps)
    q_grid = product_grid(n_x, n_v, steps)
    reps = set()
    pvs, qs = [], []
    for pv in pv_grid:
        for q in q_grid:
            q = q.copy()
            q[pv == 0] = np.eye(n_x)[0]  # unused rows are irrelevant
            rows = sorted(zip(np.round(pv, 12), map(tuple, np.round(q, 12))))
            key = tuple(rows)
            if key in reps:
                continue
            reps.add(key)
            pvs.append([r[0] for r in rows])
            qs.append([r[1] for r in rows])
    pv, q = np.array(pvs, dtype=float), np.array(qs, dtype=float)
    if restarts:
        pv = np.concatenate([pv, rng.dirichlet(np.ones(n_v), size=restarts)])
        q = np.concatenate([q, rng.dirichlet(np.ones(n_x), size=(restarts, n_v))])
    return pv, q


def _pairs(n1: int, n2: int, budget: int) -> tuple[np.ndarray, np.ndarray, bool]:
    total = n1 * n2
    k = min(total, budget)
    flat = np.arange(k)
    return flat // n2, flat % n2, total > budget


def _chunked(fn, n: int, threads: int) -> np.ndarray:
    starts = list(range(0, n, CHUNK))
    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(lambda s: fn(slice(s, s + CHUNK)), starts))
    else:
        parts = [fn(slice(s, s + CHUNK)) for s in starts]
    return np.concatenate(parts) if parts else np.zeros((0, 6))


@dataclass
class _SideResult:
    values: np.ndarray      # (n, 6)
    partial: bool
    evaluated: int


def _source_side(src: SourceModel, cfg: SearchConfig, rng) -> _SideResult:
    s1, s2, _ = src.sizes
    c1 = source_candidates(s1, cfg.u_sizes[0], cfg.steps, cfg.restarts, rng)
    c2 = source_candidates(s2, cfg.u_sizes[1], cfg.steps, cfg.restarts, rng)
    i, j, partial = _pairs(len(c1), len(c2), cfg.max_configs)
    vals = _chunked(lambda sl: source_terms_batch(src.joint.table, c1[i[sl]], c2[j[sl]]),
                    len(i), cfg.threads)
    return _SideResult(vals, partial, len(i))


def _channel_side(ch: ChannelModel, cfg: SearchConfig, rng) -> _SideResult:
    x1, x2 = ch.input_sizes
    ident = cfg.channel_aux == "identity"
    p1, q1 = channel_candidates(x1, cfg.v_sizes[0], cfg.steps, cfg.restarts, rng, ident)
    p2, q2 = channel_candidates(x2, cfg.v_sizes[1], cfg.steps, cfg.restarts, rng, ident)
    i, j, partial = _pairs(len(p1), len(p2), cfg.max_configs)
    vals = _chunked(lambda sl: channel_terms_batch(ch, p1[i[sl]], q1[i[sl]], p2[j[sl]], q2[j[sl]]),
                    len(i), cfg.threads)
    return _SideResult(vals, partial, len(i))


def combine_sides(src_vals: np.ndarray, ch_vals: np.ndarray) -> np.ndarray:
    """Corners (r1, r2, sum) of every feasible (source, channel) pairing."""
    s_keep = pareto_front(np.column_stack([src_vals[:, :3], -src_vals[:, 3:]]))
    c_keep = pareto_front(ch_vals)
    sv, cv = src_vals[s_keep], ch_vals[c_keep]
    corners = []
    for start in range(0, len(sv), 256):
        blk = sv[start:start + 256]
        ok = np.all(blk[:, None, 3:] <= cv[None, :, 3:] + FEAS_SLACK, axis=2)
        si, ci = np.nonzero(ok)
        corners.append(blk[si, :3] + cv[ci, :3])
    corners = np.concatenate(corners) if corners else np.zeros((0, 3))
    return corners[pareto_front(corners)] if len(corners) else corners


def inner_bound_region(src: SourceModel, ch: ChannelModel,
                       search: SearchConfig | None = None) -> RateRegion:
    """Convexified union of achievable pentagons over the searched auxiliaries."""
    cfg = (search or SearchConfig()).resolved(src, ch)
    rng = np.random.default_rng(cfg.seed)
    sside = _source_side(src, cfg, rng)
    cside = _channel_side(ch, cfg, rng)
    corners = combine_sides(sside.values, cside.values)
    pts = _pentagon_vertices(corners) if len(corners) else np.zeros((1, 2))
    meta = {"steps": cfg.steps, "seed": cfg.seed, "restarts": cfg.restarts,
            "alphabets": {"U": list(cfg.u_sizes), "V": list(cfg.v_sizes)},
            "channel_aux": cfg.channel_aux,
            "source_pairs": sside.evaluated, "channel_pairs": cside.evaluated,
            "corners": corners.tolist()}
    return RateRegion.from_points(pts, sside.partial or cside.partial, meta)


# ---------------------------------------------------------------------------
# Outer bound


@dataclass(frozen=True)
class InputSearch:
    """How the outer bound maximizes over input laws.

    ``mode="joint"`` maximizes over all p(x1,x2); ``"product"`` restricts to
    p(x1)p(x2). Grid maxima are refined by a local optimizer.
    """

    mode: str = "joint"
    steps: int = 64
    refine: bool = True

    def __post_init__(self):
        if self.mode not in ("joint", "product"):
            raise InputError("input search mode must be 'joint' or 'product'")
        if self.steps < 1:
            raise InputError("steps must be >= 1")


def _softmax(z):
    e = np.exp(z - np.max(z))
    return e / e.sum()


def _maximize_on_simplex(f, dim: int, steps: int, refine: bool) -> tuple[float, np.ndarray]:
    """Maximize a batched function of a PMF: grid search then Nelder-Mead on logits."""
    grid = simplex_grid_array(dim, steps)
    vals = f(grid)
    k = int(np.argmax(vals))
    best, arg = float(vals[k]), grid[k]
    if refine and dim > 1:
        for start in grid[np.argsort(-vals)[:3]]:
            z0 = np.log(np.clip(start, 1e-9, None))
            res = minimize(lambda z: -float(f(_softmax(z)[None])[0]), z0, method="Nelder-Mead",
                           options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 4000})
            if -res.fun > best:
                best, arg = float(-res.fun), _softmax(res.x)
    return best, arg


def blahut_arimoto(w: np.ndarray, tol: float = 1e-12, max_iter: int = 100_000) -> tuple[float, np.ndarray]:
    """Capacity (bits) and optimal input of a DMC given as a row-stochastic matrix."""
    m = w.shape[0]
    r = np.full(m, 1.0 / m)
    logw = np.where(w > 0, np.log(np.where(w > 0, w, 1.0)), 0.0)
    for _ in range(max_iter):
        q = r @ w
        logq = np.log(np.where(q > 0, q, 1.0))
        d = np.sum(w * (logw - logq), axis=1)   # D(w_x || q) in nats
        lower = math.log(np.sum(r * np.exp(d)))
        upper = float(np.max(d))
        if upper - lower < tol:
            break
        r = r * np.exp(d)
        r /= r.sum()
    return upper / math.log(2), r


def _cond_term(ch: ChannelModel, x2: int, steps: int, refine: bool) -> float:
    """max over p(x1) of I(X1;Y3|Y2) when X2 = x2 is fixed."""
    w = ch.table[:, x2].sum(axis=1)  # (X1, Y2, Y3)

    def f(p):
        joint = p[:, :, None, None] * w[None]
        return cmi_array(joint, [0], [2], [1], batch=1)

    return _maximize_on_simplex(f, w.shape[0], steps, refine)[0]


def outer_bound(src: SourceModel, ch: ChannelModel, search: InputSearch | None = None) -> RateCorner:
    """Explicit outer corner: channel terms maximized term by term over input laws.

    I(X1;Y3|X2,Y2) is linear in p(x2) once p(x1|x2) is fixed, so over joint laws
    (and over product laws) its maximum is attained with X2 deterministic; the
    search therefore runs over x2 and p(x1) only. The sum term is a channel
    capacity for joint inputs (Blahut-Arimoto) and a grid-plus-refinement
    search for product inputs.
    """
    s = search or InputSearch()
    sj = src.joint
    x1n, x2n = ch.input_sizes
    c1 = max(_cond_term(ch, x2, s.steps, s.refine) for x2 in range(x2n))
    swapped = ChannelModel.from_table(np.transpose(ch.table, (1, 0, 3, 2, 4)))
    c2 = max(_cond_term(swapped, x1, s.steps, s.refine) for x1 in range(x1n))
    w3 = ch.output_marginal(3)
    if s.mode == "joint":
        csum, _ = blahut_arimoto(w3.reshape(x1n * x2n, -1))
    else:
        csum = _product_sum_capacity(w3, s.steps, s.refine)
    t = {"I(S1;S3|S2)": sj.mutual_information(["S1"], ["S3"], ["S2"]),
         "I(S2;S3|S1)": sj.mutual_information(["S2"], ["S3"], ["S1"]),
         "I(S1,S2;S3)": sj.mutual_information(["S1", "S2"], ["S3"]),
         "max I(X1;Y3|X2,Y2)": c1, "max I(X2;Y3|X1,Y1)": c2, "max I(X1,X2;Y3)": csum}
    return RateCorner(c1 + t["I(S1;S3|S2)"], c2 + t["I(S2;S3|S1)"], csum + t["I(S1,S2;S3)"], True, t)


def _product_sum_capacity(w3: np.ndarray, steps: int, refine: bool) -> float:
    x1n, x2n = w3.shape[:2]
    g1, g2 = simplex_grid_array(x1n, steps), simplex_grid_array(x2n, steps)

    def f(p1, p2):
        joint = np.einsum("na,nb,abk->nabk", p1, p2, w3)
        return cmi_array(joint, [0, 1], [2], batch=1)

    best, arg = -1.0, None
    for start in range(0, len(g1), max(1, CHUNK // len(g2))):
        blk = g1[start:start + max(1, CHUNK // len(g2))]
        p1 = np.repeat(blk, len(g2), axis=0)
        p2 = np.tile(g2, (len(blk), 1))
        v = f(p1, p2)
        k = int(np.argmax(v))
        if v[k] > best:
            best, arg = float(v[k]), (p1[k], p2[k])
    if refine:
        z0 = np.concatenate([np.log(np.clip(arg[0], 1e-9, None)), np.log(np.clip(arg[1], 1e-9, None))])
        obj = lambda z: -float(f(_softmax(z[:x1n])[None], _softmax(z[x1n:])[None])[0])  # noqa: E731
        res = minimize(obj, z0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 8000})
        best = max(best, -res.fun)
    return best


# ---------------------------------------------------------------------------
# Special-case capacity


def special_case_capacity(src: SourceModel, ch: ChannelModel, search: SearchConfig | None = None,
                          px1=None, px2=None, tol: float = 1e-9) -> RateRegion:
    """Capacity region when the channel only relays source-side information.

    Requires the Markov and input-recoverability structure (checked under the
    supplied, default uniform, product input law); otherwise raises
    PreconditionError naming the violated conditions.
    """
    report = check_special_case(src, ch, px1, px2, tol)
    if not report.all_true:
        bad = report.violated()
        raise PreconditionError(f"special-case structure violated: {', '.join(bad)}", bad)
    cfg = (search or SearchConfig()).resolved(src, ch)
    rng = np.random.default_rng(cfg.seed)
    s1, s2, _ = src.sizes
    t = src.joint.table

    w1 = source_candidates(s1, cfg.u_sizes[0], cfg.steps, cfg.restarts, rng)
    w2 = source_candidates(s2, cfg.u_sizes[1], cfg.steps, cfg.restarts, rng)
    b1 = BatchInfo(np.einsum("nau,abc->nuabc", w1, t), batch=1)
    b2 = BatchInfo(np.einsum("nbv,abc->nvabc", w2, t), batch=1)
    # axes after batch: U, S1, S2, S3
    user1 = np.column_stack([b1.i([0], [3], [2]), b1.i([0], [1], [3])])   # rate, required
    user2 = np.column_stack([b2.i([0], [3], [1]), b2.i([0], [2], [3])])
    user1 = user1[pareto_front(user1 * [1, -1])]
    user2 = user2[pareto_front(user2 * [1, -1])]

    x1n, x2n = ch.input_sizes
    g1, g2 = simplex_grid_array(x1n, cfg.steps), simplex_grid_array(x2n, cfg.steps)
    if cfg.restarts:
        g1 = np.concatenate([g1, rng.dirichlet(np.ones(x1n), cfg.restarts)])
        g2 = np.concatenate([g2, rng.dirichlet(np.ones(x2n), cfg.restarts)])
    i, j, partial = _pairs(len(g1), len(g2), cfg.max_configs)
    w3 = ch.output_marginal(3)

    def caps(sl):
        bi = BatchInfo(np.einsum("na,nb,abk->nabk", g1[i[sl]], g2[j[sl]], w3), batch=1)
        return np.column_stack([bi.i([0], [2], [1]), bi.i([1], [2], [0]), bi.i([0, 1], [2])])

    cap = np.concatenate([caps(slice(s, s + CHUNK)) for s in range(0, len(i), CHUNK)])
    cap = cap[pareto_front(cap)]

    ok = np.zeros((len(user1), len(user2)), dtype=bool)
    for c1, c2, cs in cap:
        ok |= ((user1[:, 1:2] <= c1 + FEAS_SLACK) & (user2[None, :, 1] <= c2 + FEAS_SLACK)
               & (user1[:, 1:2] + user2[None, :, 1] <= cs + FEAS_SLACK))
    a_idx, b_idx = np.nonzero(ok)
    pts = np.column_stack([user1[a_idx, 0], user2[b_idx, 0]]) if len(a_idx) else np.zeros((1, 2))
    meta = {"steps": cfg.steps, "seed": cfg.seed, "alphabets": {"U": list(cfg.u_sizes)},
            "special_case": report.values}
    return RateRegion.from_points(pts, partial, meta)


def region_within_corner(region: RateRegion, corner: RateCorner, tol: float = 1e-6) -> bool:
    return all(corner.admits(v, tol) for v in region.hull)


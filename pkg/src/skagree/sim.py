"""Monte Carlo simulation of the two-layer binning scheme at small blocklength.

Each user holds a source codebook labelled (k, k', k'') and a wiretap channel
codebook labelled (kC, kC'), plus a partition map f from channel codewords to
k' values. The encoder quantizes its source block to a typical u-codeword,
sends its k' index through the channel by picking a codeword from part k',
and keeps (k, kC) as its key. User 3 decodes the channel pair first, maps it
to (k1', k2') with f, and then recovers the u-codewords from its own source.

Typicality is strong and absolute: a tuple of sequences is typical when every
cell of its empirical joint type is within ``eps`` of the target law, and
cells of zero probability are never visited.
"""
from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import chi2

from .errors import BudgetError, InputError
from .models import (AuxiliaryConfig, ChannelModel, SourceModel, channel_aux_joint,
                     source_aux_joint)
from .prob import ZERO_CUTOFF, plugin_entropy, plugin_mi

MAX_CELLS = 2 ** 20
MAX_N = 16
RATE_NAMES = ("r1S", "r1Sp", "r1Spp", "r1C", "r1Cp", "r2S", "r2Sp", "r2Spp", "r2C", "r2Cp")
FEATURES = ("decoded", "view")
SENTINEL = -1


@dataclass(frozen=True)
class SimConfig:
    """Blocklength, typicality slacks, trial budget, seed and rate picks.

    Rates are in bits per symbol; ``p`` marks a primed index, so ``r1Sp`` is
    the rate of k'_1S and ``r1Spp`` the rate of k''_1S.
    """

    N: int = 8
    eps: float = 0.1
    eps_prime: float = 0.1
    eps_dprime: float = 0.05
    trials: int = 1000
    seed: int = 0
    r1S: float = 0.0
    r1Sp: float = 0.0
    r1Spp: float = 0.0
    r1C: float = 0.0
    r1Cp: float = 0.0
    r2S: float = 0.0
    r2Sp: float = 0.0
    r2Spp: float = 0.0
    r2C: float = 0.0
    r2Cp: float = 0.0
    feature: str = "decoded"

    def __post_init__(self):
        if not (isinstance(self.N, (int, np.integer)) and 1 <= self.N <= MAX_N):
            raise InputError(f"N must be an integer in 1..{MAX_N}")
        if not isinstance(self.trials, (int, np.integer)) or self.trials < 1:
            raise InputError("trials must be a positive integer")
        if not (0 <= int(self.seed) < 2 ** 64):
            raise InputError("seed must be a 64-bit unsigned integer")
        for name in ("eps", "eps_prime", "eps_dprime"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise InputError(f"{name} must be a nonnegative real")
        for name in RATE_NAMES:
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise InputError(f"rate {name} must be nonnegative")
        if self.feature not in FEATURES:
            raise InputError(f"feature must be one of {FEATURES}")
        for u in (1, 2):
            nS, nC = self.source_sizes(u), self.channel_sizes(u)
            if int(np.prod(nS)) > MAX_CELLS or int(np.prod(nC)) > MAX_CELLS:
                raise BudgetError(f"user {u} codebook exceeds {MAX_CELLS} codewords")
            if nC[0] * nC[1] < nS[1]:
                raise InputError(f"user {u}: channel codebook smaller than the number of k' bins "
                                 f"(need r{u}C + r{u}Cp >= r{u}Sp)")

    def count(self, rate: float) -> int:
        return max(1, int(round(2.0 ** (self.N * rate))))

    def source_sizes(self, user: int) -> tuple[int, int, int]:
        r = [getattr(self, f"r{user}{k}") for k in ("S", "Sp", "Spp")]
        return tuple(self.count(x) for x in r)

    def channel_sizes(self, user: int) -> tuple[int, int]:
        return self.count(getattr(self, f"r{user}C")), self.count(getattr(self, f"r{user}Cp"))

    def rates(self) -> dict:
        return {k: getattr(self, k) for k in RATE_NAMES}

    def replace(self, **kw) -> "SimConfig":
        d = asdict(self)
        d.update(kw)
        return SimConfig(**d)


@dataclass(frozen=True, eq=False)
class SourceCodebook:
    codewords: np.ndarray      # (M, N) symbols of U
    labels: np.ndarray         # (M, 3) columns k, k', k''
    sizes: tuple[int, int, int]

    def members(self, kp: int) -> np.ndarray:
        """Indices of the codewords in k'-bin ``kp``."""
        return np.flatnonzero(self.labels[:, 1] == kp)

    def bin_sizes(self, layer: int) -> np.ndarray:
        return np.bincount(self.labels[:, layer], minlength=self.sizes[layer])


@dataclass(frozen=True, eq=False)
class ChannelCodebook:
    codewords: np.ndarray      # (M, N) symbols of V
    labels: np.ndarray         # (M, 2) columns kC, kC'
    part: np.ndarray           # (M,) value of f, i.e. the k' bin each codeword carries
    n_parts: int

    def members(self, kp: int) -> np.ndarray:
        return np.flatnonzero(self.part == kp)

    def part_sizes(self) -> np.ndarray:
        return np.bincount(self.part, minlength=self.n_parts)


@dataclass(frozen=True, eq=False)
class Codebooks:
    source: tuple[SourceCodebook, SourceCodebook]
    channel: tuple[ChannelCodebook, ChannelCodebook]


@dataclass
class TrialOutcome:
    keys: tuple[int, int, int, int]                # k1S, k1C, k2S, k2C
    decoded: tuple[int, int, int, int]             # SENTINEL where decoding failed
    encode_fail: tuple[bool, bool]
    stage1_fail: bool
    stage2_fail: bool
    features: tuple[int, int] = (SENTINEL, SENTINEL)

    @property
    def error(self) -> bool:
        return any(self.encode_fail) or self.stage1_fail or self.stage2_fail or self.keys != self.decoded


@dataclass(frozen=True, eq=False)
class SimLaws:
    """Per-letter target laws used by the typicality tests, flattened."""

    us1: np.ndarray      # P(U1, S1)
    us2: np.ndarray      # P(U2, S2)
    uus3: np.ndarray     # P(U1, U2, S3)
    vvy3: np.ndarray     # P(V1, V2, Y3)
    u1s2: np.ndarray     # P(U1, S2), user 2's view of user 1's source layer
    u2s1: np.ndarray
    v1x2y2: np.ndarray   # P(V1, X2, Y2)
    v2x1y1: np.ndarray
    sizes: dict


def _laws(src: SourceModel, ch: ChannelModel, aux: AuxiliaryConfig) -> SimLaws:
    ps = source_aux_joint(src, aux)
    pc = channel_aux_joint(ch, aux)
    m = lambda p, k: p.marginal(k).table  # noqa: E731
    sizes = dict(zip(ps.names, ps.sizes)) | dict(zip(pc.names, pc.sizes))
    return SimLaws(m(ps, ["U1", "S1"]), m(ps, ["U2", "S2"]), m(ps, ["U1", "U2", "S3"]),
                   m(pc, ["V1", "V2", "Y3"]), m(ps, ["U1", "S2"]), m(ps, ["U2", "S1"]),
                   m(pc, ["V1", "X2", "Y2"]), m(pc, ["V2", "X1", "Y1"]), sizes)


def typical_mask(seqs: list[np.ndarray], law: np.ndarray, eps: float) -> np.ndarray:
    """Strong typicality of stacked candidate tuples against ``law``.

    ``seqs`` holds one integer array per axis of ``law``; each has shape
    (M, N) or (N,), and broadcasting pairs them. Returns a boolean mask of
    length M.
    """
    arrs = np.broadcast_arrays(*[np.atleast_2d(s) for s in seqs])
    m, n = arrs[0].shape
    flat = np.ravel_multi_index(tuple(arrs), law.shape)
    k = law.size
    off = flat + (np.arange(m) * k)[:, None]
    counts = np.bincount(off.ravel(), minlength=m * k).reshape(m, k) / n
    p = law.ravel()
    ok = np.all(np.abs(counts - p) <= eps + 1e-12, axis=1)
    zero = p < ZERO_CUTOFF
    if zero.any():
        ok &= ~np.any(counts[:, zero] > 0, axis=1)
    return ok


def _balanced_labels(rng, sizes) -> np.ndarray:
    total = int(np.prod(sizes))
    perm = rng.permutation(total)
    return np.stack(np.unravel_index(perm, sizes), axis=1).astype(np.int64)


def _partition(rng, labels: np.ndarray, n_c: int, n_parts: int) -> np.ndarray:
    """Equal-sized random partition, stratified over the kC label.

    Within each kC group the parts are dealt round-robin in random order,
    continuing the count across groups, so part sizes differ by at most one
    and every part holds each kC value equally often whenever the group size
    is a multiple of ``n_parts``.
    """
    part = np.empty(len(labels), dtype=np.int64)
    offset = 0
    for kc in range(n_c):
        idx = np.flatnonzero(labels[:, 0] == kc)
        idx = idx[rng.permutation(len(idx))]
        part[idx] = (offset + np.arange(len(idx))) % n_parts
        offset += len(idx)
    return part


def _sample(rng, pmf: np.ndarray, shape) -> np.ndarray:
    return rng.choice(len(pmf), size=shape, p=pmf)


def build_codebooks(src: SourceModel, ch: ChannelModel, aux: AuxiliaryConfig,
                    cfg: SimConfig) -> Codebooks:
    """Random codebooks and labels, reproducible from ``cfg.seed``."""
    aux.check_compatible(src, ch)
    rng = np.random.default_rng(np.random.SeedSequence(int(cfg.seed), spawn_key=(0,)))
    laws = _laws(src, ch, aux)
    books_s, books_c = [], []
    for user in (1, 2):
        pu = laws.us1.sum(axis=1) if user == 1 else laws.us2.sum(axis=1)
        sizes = cfg.source_sizes(user)
        m = int(np.prod(sizes))
        books_s.append(SourceCodebook(_sample(rng, pu, (m, cfg.N)), _balanced_labels(rng, sizes), sizes))
    for user in (1, 2):
        pv = aux.pv1 if user == 1 else aux.pv2
        n_c, n_cp = cfg.channel_sizes(user)
        labels = _balanced_labels(rng, (n_c, n_cp))
        n_parts = cfg.source_sizes(user)[1]
        part = _partition(rng, labels, n_c, n_parts)
        books_c.append(ChannelCodebook(_sample(rng, pv, (n_c * n_cp, cfg.N)), labels, part, n_parts))
    return Codebooks(tuple(books_s), tuple(books_c))


def check_codebooks(books: Codebooks) -> list[str]:
    """Partition soundness and bin balance; returns the list of violations."""
    bad = []
    for u, (sb, cb) in enumerate(zip(books.source, books.channel), start=1):
        if len(np.unique(sb.labels, axis=0)) != len(sb.labels):
            bad.append(f"user {u}: duplicate source label triple")
        for layer in range(3):
            b = sb.bin_sizes(layer)
            if b.max() - b.min() > 1:
                bad.append(f"user {u}: unbalanced source layer {layer}")
        if cb.part.shape != (len(cb.codewords),) or cb.part.min() < 0 or cb.part.max() >= cb.n_parts:
            bad.append(f"user {u}: f is not a map into the k' bins")
        ps = cb.part_sizes()
        if ps.min() < 1 or ps.max() - ps.min() > 1:
            bad.append(f"user {u}: partition parts unbalanced or empty")
        if len(np.unique(cb.labels, axis=0)) != len(cb.labels):
            bad.append(f"user {u}: duplicate channel label pair")
    return bad


def _draw_source(rng, src: SourceModel, n: int) -> np.ndarray:
    t = src.joint.table
    flat = rng.choice(t.size, size=n, p=t.ravel())
    return np.stack(np.unravel_index(flat, t.shape))  # (3, N)


def _draw_rows(rng, cond: np.ndarray, given: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(cond[given], axis=-1)
    u = rng.random(len(given))
    return np.minimum((u[:, None] > cdf).sum(axis=1), cond.shape[-1] - 1)


def encode(user: int, s: np.ndarray, books: Codebooks, aux: AuxiliaryConfig, laws: SimLaws,
           cfg: SimConfig, rng) -> dict:
    """Quantize, bin and pick the channel codeword for one user.

    When no codeword is typical with ``s`` the encoder still transmits (a
    random codeword) so the trial can run to the end, and flags failure.
    """
    sb, cb = books.source[user - 1], books.channel[user - 1]
    law = laws.us1 if user == 1 else laws.us2
    ok = np.flatnonzero(typical_mask([sb.codewords, s], law, cfg.eps_prime))
    fail = len(ok) == 0
    iu = int(rng.integers(len(sb.codewords))) if fail else int(ok[rng.integers(len(ok))])
    k, kp, _ = (int(x) for x in sb.labels[iu])
    part = cb.members(kp)
    iv = int(part[rng.integers(len(part))])
    px = aux.px1_given_v1 if user == 1 else aux.px2_given_v2
    x = _draw_rows(rng, px, cb.codewords[iv])
    return {"u": iu, "v": iv, "kS": k, "kC": int(cb.labels[iv, 0]), "x": x, "fail": fail}


def _unique_pair(m1: int, m2: int, test) -> tuple[int, int] | None:
    """Scan the m1 x m2 candidate grid in row blocks; None unless exactly one hit."""
    hit = None
    block = max(1, (1 << 16) // max(m2, 1))
    for start in range(0, m1, block):
        rows = np.arange(start, min(m1, start + block))
        a = np.repeat(rows, m2)
        b = np.tile(np.arange(m2), len(rows))
        found = np.flatnonzero(test(a, b))
        if len(found) > 1 or (len(found) == 1 and hit is not None):
            return None
        if len(found) == 1:
            hit = (int(a[found[0]]), int(b[found[0]]))
    return hit


def decode_user3(y3: np.ndarray, s3: np.ndarray, books: Codebooks, laws: SimLaws,
                 cfg: SimConfig) -> dict:
    """Two-stage decoding at user 3; stage tags mark which step failed."""
    c1, c2 = books.channel
    out = {"stage1_fail": False, "stage2_fail": False,
           "k1S": SENTINEL, "k1C": SENTINEL, "k2S": SENTINEL, "k2C": SENTINEL}
    pair = _unique_pair(len(c1.codewords), len(c2.codewords),
                        lambda a, b: typical_mask([c1.codewords[a], c2.codewords[b], y3],
                                                  laws.vvy3, cfg.eps))
    if pair is None:
        out["stage1_fail"] = True
        return out
    i1, i2 = pair
    out["k1C"], out["k2C"] = int(c1.labels[i1, 0]), int(c2.labels[i2, 0])
    out["v"] = pair
    s1b, s2b = books.source
    cand1, cand2 = s1b.members(int(c1.part[i1])), s2b.members(int(c2.part[i2]))
    hit = _unique_pair(len(cand1), len(cand2),
                       lambda a, b: typical_mask([s1b.codewords[cand1[a]], s2b.codewords[cand2[b]], s3],
                                                 laws.uus3, cfg.eps))
    if hit is None:
        out["stage2_fail"] = True
        return out
    out["k1S"] = int(s1b.labels[cand1[hit[0]], 0])
    out["k2S"] = int(s2b.labels[cand2[hit[1]], 0])
    return out


def _eavesdrop_feature(user: int, s_other: np.ndarray, x_other: np.ndarray, y_other: np.ndarray,
                       books: Codebooks, laws: SimLaws, cfg: SimConfig) -> int:
    """What the other user can say about this user's key from its own view.

    It decodes this user's channel codeword from (x, y), reads its kC and its
    k' part, then looks for the unique source codeword in that part typical
    with its own source block. The feature packs the two guesses, with -1 for
    a failed step.
    """
    sb, cb = books.source[user - 1], books.channel[user - 1]
    vlaw = laws.v1x2y2 if user == 1 else laws.v2x1y1
    ulaw = laws.u1s2 if user == 1 else laws.u2s1
    hits = np.flatnonzero(typical_mask([cb.codewords, x_other, y_other], vlaw, cfg.eps))
    if len(hits) != 1:
        return SENTINEL
    kc = int(cb.labels[hits[0], 0])
    members = sb.members(int(cb.part[hits[0]]))
    uh = members[typical_mask([sb.codewords[members], s_other], ulaw, cfg.eps)]
    ks = int(sb.labels[uh[0], 0]) if len(uh) == 1 else SENTINEL
    return kc * (sb.sizes[0] + 1) + (ks + 1)


def _view_feature(s_other, x_other, y_other) -> bytes:
    return np.concatenate([s_other, x_other, y_other]).astype(np.int16).tobytes()


def run_trial(t: int, src: SourceModel, ch: ChannelModel, aux: AuxiliaryConfig, books: Codebooks,
              laws: SimLaws, cfg: SimConfig) -> tuple[TrialOutcome, tuple]:
    rng = np.random.default_rng(np.random.SeedSequence(int(cfg.seed), spawn_key=(1, t)))
    s = _draw_source(rng, src, cfg.N)
    e1 = encode(1, s[0], books, aux, laws, cfg, rng)
    e2 = encode(2, s[1], books, aux, laws, cfg, rng)
    x1, x2 = e1["x"], e2["x"]
    ny = ch.output_sizes
    rows = ch.table.reshape(ch.input_sizes + (-1,))
    flat_y = _draw_rows(rng, rows.reshape(-1, rows.shape[-1]), x1 * ch.input_sizes[1] + x2)
    y1, y2, y3 = np.unravel_index(flat_y, ny)
    d = decode_user3(y3, s[2], books, laws, cfg)
    keys = (e1["kS"], e1["kC"], e2["kS"], e2["kC"])
    dec = (d["k1S"], d["k1C"], d["k2S"], d["k2C"])
    if cfg.feature == "decoded":
        feats = (_eavesdrop_feature(1, s[1], x2, y2, books, laws, cfg),
                 _eavesdrop_feature(2, s[0], x1, y1, books, laws, cfg))
    else:
        feats = (_view_feature(s[1], x2, y2), _view_feature(s[0], x1, y1))
    return TrialOutcome(keys, dec, (e1["fail"], e2["fail"]), d["stage1_fail"], d["stage2_fail"]), feats


def key_independence(a, b) -> dict:
    """Plug-in I(A;B) in bits with the 99.9% quantile of its null distribution.

    Under independence 2 T ln2 * I is asymptotically chi-square with
    (|A|-1)(|B|-1) degrees of freedom, |.| counting observed symbols.
    """
    a, b = np.asarray(a), np.asarray(b)
    mi = plugin_mi(a, b)
    df = (len(np.unique(a)) - 1) * (len(np.unique(b)) - 1)
    bound = float(chi2.ppf(0.999, df) / (2 * len(a) * math.log(2))) if df > 0 else 0.0
    return {"estimator": "plug-in", "mi_bits": mi, "bias_bound_bits": bound, "df": df,
            "trials": int(len(a)), "below_bound": mi <= bound + 1e-15}


@dataclass(frozen=True, eq=False)
class ExperimentReport:
    config: dict
    trials: int
    p_err: float
    failures: dict
    leakage: dict
    key_entropy: dict
    independence: dict
    wall_time: float
    trace: list = field(default_factory=list, repr=False)

    def to_dict(self, wall_time: bool = True) -> dict:
        d = {"config": self.config, "trials": self.trials, "P_err": self.p_err,
             "failures": self.failures, "leakage": self.leakage,
             "key_entropy": self.key_entropy, "independence": self.independence}
        if wall_time:
            d["wall_time"] = self.wall_time
        return d

    def trace_csv(self) -> str:
        buf = io.StringIO()
        cols = ["trial", "k1S", "k1C", "k2S", "k2C", "d1S", "d1C", "d2S", "d2C",
                "enc1_fail", "enc2_fail", "stage1_fail", "stage2_fail", "error"]
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for i, o in enumerate(self.trace):
            w.writerow([i, *o.keys, *o.decoded, int(o.encode_fail[0]), int(o.encode_fail[1]),
                        int(o.stage1_fail), int(o.stage2_fail), int(o.error)])
        return buf.getvalue()


def _relabel(items) -> np.ndarray:
    ids: dict = {}
    return np.array([ids.setdefault(x, len(ids)) for x in items])


def _key_index(ks, kc, n_c) -> np.ndarray:
    return np.asarray(ks) * n_c + np.asarray(kc)


def run_experiment(src: SourceModel, ch: ChannelModel, aux: AuxiliaryConfig, cfg: SimConfig,
                   books: Codebooks | None = None, trace: bool = False) -> ExperimentReport:
    """Run ``cfg.trials`` independent trials and aggregate reliability, leakage and key statistics.

    Leakage L_i is (1/N) times the plug-in mutual information between user
    i's key index and a feature of the other user's view, ``cfg.feature``.
    It is a surrogate for the exact quantity, which needs the full view.
    """
    t0 = time.perf_counter()
    aux.check_compatible(src, ch)
    books = books or build_codebooks(src, ch, aux, cfg)
    laws = _laws(src, ch, aux)
    outs, feats = [], []
    for t in range(cfg.trials):
        o, f = run_trial(t, src, ch, aux, books, laws, cfg)
        outs.append(o)
        feats.append(f)
    n = cfg.trials
    keys = np.array([o.keys for o in outs])
    k1 = _key_index(keys[:, 0], keys[:, 1], cfg.channel_sizes(1)[0])
    k2 = _key_index(keys[:, 2], keys[:, 3], cfg.channel_sizes(2)[0])
    f1 = [f[0] for f in feats]
    f2 = [f[1] for f in feats]
    if cfg.feature == "view":
        f1, f2 = _relabel(f1), _relabel(f2)
    failures = {
        "encode_user1": sum(o.encode_fail[0] for o in outs) / n,
        "encode_user2": sum(o.encode_fail[1] for o in outs) / n,
        "stage1": sum(o.stage1_fail for o in outs) / n,
        "stage2": sum(o.stage2_fail for o in outs) / n,
    }
    leakage = {"estimator": "plug-in", "feature": cfg.feature,
               "L1": plugin_mi(k1, np.asarray(f1)) / cfg.N,
               "L2": plugin_mi(k2, np.asarray(f2)) / cfg.N}
    entropy = {"H(K1)/N": plugin_entropy(k1) / cfg.N + 0.0, "H(K2)/N": plugin_entropy(k2) / cfg.N + 0.0,
               "H(K1S)/N": plugin_entropy(keys[:, 0]) / cfg.N + 0.0,
               "H(K1C)/N": plugin_entropy(keys[:, 1]) / cfg.N + 0.0}
    indep = {"user1": key_independence(keys[:, 0], keys[:, 1]),
             "user2": key_independence(keys[:, 2], keys[:, 3])}
    p_err = sum(o.error for o in outs) / n
    echo = asdict(cfg)
    echo["codebook_sizes"] = {f"user{u}": {"source": list(cfg.source_sizes(u)),
                                           "channel": list(cfg.channel_sizes(u))} for u in (1, 2)}
    return ExperimentReport(echo, n, p_err, failures, leakage, entropy, indep,
                            time.perf_counter() - t0, outs if trace else [])


def scheme_rates(src: SourceModel, ch: ChannelModel, aux: AuxiliaryConfig,
                 eps_prime: float, eps_dprime: float, fraction: float = 1.0) -> dict:
    """Rate picks following the scheme's bookkeeping, scaled key rates.

    Returns the per-user split of the source rate I(U;S)+eps' into key,
    transmitted and side-information layers, and the channel randomization
    rate. Key rates are ``fraction`` times the corresponding secrecy terms,
    and the transmitted index takes the rest of its share. Negative values
    are clipped to zero.
    """
    ps = source_aux_joint(src, aux)
    pc = channel_aux_joint(ch, aux)
    out = {}
    for u, o in ((1, 2), (2, 1)):
        U, S, So = f"U{u}", f"S{u}", f"S{o}"
        V, Vo, Xo, Yo = f"V{u}", f"V{o}", f"X{o}", f"Y{o}"
        layer = ps.mutual_information([U], [S]) - ps.mutual_information([U], [So]) + 2 * eps_prime
        key_s = max(0.0, ps.mutual_information([U], ["S3"], [f"U{o}"])
                    - ps.mutual_information([U], [So], [f"U{o}"]))
        rs = min(fraction * key_s, max(layer, 0.0))
        out[f"r{u}S"] = rs
        out[f"r{u}Sp"] = max(0.0, layer - rs)
        out[f"r{u}Spp"] = max(0.0, ps.mutual_information([U], [So]) - eps_prime)
        leak = pc.mutual_information([V], [Xo, Yo], [Vo])
        key_c = max(0.0, pc.mutual_information([V], ["Y3"], [Vo]) - leak)
        out[f"r{u}C"] = fraction * key_c
        out[f"r{u}Cp"] = max(0.0, leak - eps_dprime)
    return out

"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line."""
import math
import time

import numpy as np
import pytest
from scipy.stats import norm

from skagree.gaussian import (GaussianParams, channel_terms, gaussian_region, symmetric_sweep,
                              classify_shape, sum_term_threshold)
from skagree.hull import hausdorff
from skagree.instances import (adder_mac, bsc_pair_mac, chain_source, deterministic_source,
                               identity_mac, random_instance, xor_mac)
from skagree.models import AuxiliaryConfig, check_special_case
from skagree.prob import JointPMF, bsc, h2
from skagree.regions import (SearchConfig, inner_bound_region, outer_bound, region_within_corner,
                             special_case_capacity)
from skagree.sim import SimConfig, build_codebooks, check_codebooks, run_experiment


@pytest.fixture
def verdict(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance {n}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return emit


def test_1_gaussian_null_case(verdict):
    t0 = time.perf_counter()
    p = GaussianParams.fig2(0.5)
    ch = channel_terms(p)
    region = gaussian_region(p, 200)
    # pure-source region: same grid with the channel terms removed
    from skagree.gaussian import _grid_corners
    from skagree.regions import RateRegion, _pentagon_vertices
    corners = _grid_corners(p, 200) - np.array(ch)
    pure = RateRegion.from_points(_pentagon_vertices(corners))
    dist = hausdorff(region.hull, pure.hull)
    dt = time.perf_counter() - t0
    ok = max(abs(c) for c in ch) <= 1e-12 and dist == 0.0 and dt < 1.0
    verdict(1, ok, f"channel terms {ch}, Hausdorff to source-only region {dist:.1e}, {dt:.2f}s")


def test_2_gaussian_sweep_nested(verdict):
    t0 = time.perf_counter()
    rep = symmetric_sweep(GaussianParams.fig2(), (0.5, 0.6, 0.7, 0.8, 0.9), steps=200)
    dt = time.perf_counter() - t0
    sizes = [len(sp.region.hull) for sp in rep.points]
    verdict(2, rep.nested and dt < 10.0,
            f"hulls nested for Nc in 0.5..0.9 = {rep.nested} (vertices {sizes}), {dt:.2f}s")


def test_3_sum_term_threshold(verdict):
    rep = symmetric_sweep(GaussianParams.fig2(), (0.5, 0.9), steps=20)
    thr = sum_term_threshold(GaussianParams.fig2())
    flagged = [d for d in rep.discrepancies if d["item"] == "sum_threshold"]
    target = 1 / (math.sqrt(5) - 1)
    ok = abs(thr - target) <= 1e-6 and len(flagged) == 1 and flagged[0]["narrated"] == 0.75
    verdict(3, ok, f"x* = {thr:.8f} (closed form {target:.8f}); narrated 0.75 flagged: {bool(flagged)}")


def test_4_shape_classification(verdict):
    rep = symmetric_sweep(GaussianParams.fig2(), (0.5, 0.6, 0.7, 0.8, 0.9), steps=200)
    consistent = all((sp.shape == "rectangle") == (sp.best[0] + sp.best[1] <= sp.best[2] + 1e-9)
                     and sp.shape == classify_shape(*sp.best) for sp in rep.points)
    shapes = {round(sp.params.Nc1, 3): sp.shape for sp in rep.points}
    narrated = {0.8: "rectangle", 0.9: "pentagon"}
    mismatches = {nc: shapes[nc] for nc, want in narrated.items() if shapes[nc] != want}
    reported = {d["item"] for d in rep.discrepancies}
    all_reported = all(f"shape@Nc={nc}" in reported for nc in mismatches)
    verdict(4, consistent and len(shapes) == 5 and all_reported,
            f"shapes {shapes}; classifier consistent {consistent}; "
            f"mismatches vs narration {mismatches} reported {all_reported}")


def _battery():
    sizes = [(2, 2, 2), (2, 2, 4), (4, 4, 4), (3, 2, 4), (2, 3, 3)]
    rng = np.random.default_rng(2024)
    return [random_instance(rng, sizes[k % len(sizes)]) for k in range(20)]


def test_5_inner_within_outer(verdict):
    t0 = time.perf_counter()
    worst, bad = -np.inf, 0
    for src, ch in _battery():
        region = inner_bound_region(src, ch, SearchConfig(steps=4))
        corner = outer_bound(src, ch)
        excess = max(max(v[0] - corner.r1_max, v[1] - corner.r2_max, v[0] + v[1] - corner.sum_max)
                     for v in region.hull)
        worst = max(worst, excess)
        bad += not region_within_corner(region, corner, 1e-6)
    dt = time.perf_counter() - t0
    verdict(5, bad == 0 and dt < 60, f"20 instances, violations {bad}, max excess {worst:.2e}, {dt:.1f}s")


def _special_instances():
    return [(chain_source(0.1, 0.2), xor_mac("copy")),
            (chain_source(0.05, 0.3, 0.4), adder_mac("copy")),
            (chain_source(0.2, 0.2), identity_mac("full")),
            (chain_source(0.15, 0.1, 0.3), adder_mac("full")),
            (chain_source(0.02, 0.4), xor_mac("copy")),
            (chain_source(0.3, 0.05, 0.6), identity_mac("full"))]


def test_6_special_case_equivalence(verdict):
    t0 = time.perf_counter()
    steps, worst = 4, 0.0
    for src, ch in _special_instances():
        assert check_special_case(src, ch).all_true
        cap = special_case_capacity(src, ch, SearchConfig(steps=steps))
        inner = inner_bound_region(src, ch, SearchConfig(steps=steps, channel_aux="identity"))
        worst = max(worst, hausdorff(cap.hull, inner.hull))
    dt = time.perf_counter() - t0
    verdict(6, worst <= 2 / steps and dt < 60,
            f"6 instances, max Hausdorff {worst:.2e} (limit {2 / steps}), {dt:.1f}s")


def test_7_information_measures(verdict):
    rng = np.random.default_rng(7)
    ok = True
    for _ in range(200):
        t = rng.dirichlet(np.ones(12) * 0.7).reshape(2, 3, 2)
        p = JointPMF(("A", "B", "C"), t)
        chain = p.mutual_information(["A"], ["B", "C"]) - (
            p.mutual_information(["A"], ["B"]) + p.mutual_information(["A"], ["C"], ["B"]))
        ok &= abs(chain) < 1e-9
        ok &= min(p.mutual_information(["A"], ["B"]), p.mutual_information(["A"], ["C"], ["B"])) >= 0
        w = rng.dirichlet(np.ones(2), size=3)
        q = JointPMF(("A", "B", "C"), np.einsum("ab,bc->abc", t.sum(2), w))
        ok &= q.mutual_information(["A"], ["C"]) <= q.mutual_information(["A"], ["B"]) + 1e-10
    bsc_mi = JointPMF(("X", "Y"), 0.5 * bsc(0.11)).mutual_information(["X"], ["Y"])
    ok &= abs(bsc_mi - (1 - h2(0.11))) <= 1e-9
    verdict(7, bool(ok), f"chain rule, nonnegativity, data processing on 200 laws; "
                         f"I(BSC 0.11) = {bsc_mi:.9f} vs 1-h2 = {1 - h2(0.11):.9f}")


def _one_sided_aux():
    return AuxiliaryConfig(np.ones((1, 1)), np.ones((1, 1)), [0.5, 0.5], [1.0], np.eye(2), [[1.0, 0.0]])


def test_8_simulator_mechanics(verdict):
    t0 = time.perf_counter()
    det = deterministic_source()
    # (a) noiseless MAC, singleton source layer; seed 0 draws distinct codewords
    aux = AuxiliaryConfig(np.ones((1, 1)), np.ones((1, 1)), [0.5, 0.5], [0.5, 0.5], np.eye(2), np.eye(2))
    cfg_a = SimConfig(N=8, eps=1.0, eps_prime=1.0, trials=10_000, seed=0, r1C=0.25, r2C=0.25)
    rep_a = run_experiment(det, identity_mac("none"), aux, cfg_a)
    ok_a = rep_a.p_err == 0.0
    # (b) 100 seeded codebooks
    src, ch = chain_source(0.1, 0.2), bsc_pair_mac(0.05, 0.3)
    caux = AuxiliaryConfig.identity(src, ch)
    violations = 0
    for seed in range(100):
        cfg = SimConfig(N=6, r1S=1 / 6, r1Sp=2 / 6, r1Spp=1 / 6, r1C=2 / 6, r1Cp=1 / 6,
                        r2S=1 / 6, r2Sp=1 / 6, r2C=1 / 6, r2Cp=1 / 6, seed=seed)
        violations += len(check_codebooks(build_codebooks(src, ch, caux, cfg)))
    ok_b = violations == 0
    # (c) stage-1 error, rates inside vs outside the first-step decoding condition
    mac = bsc_pair_mac(0.05, 0.3)
    cap = 1 - h2(0.05)
    arms = {}
    for label, rate in (("satisfying", 0.3), ("violating", 0.9)):
        cfg = SimConfig(N=10, eps=0.25, eps_prime=1.0, trials=10_000, seed=11, r1C=rate)
        arms[label] = run_experiment(det, mac, _one_sided_aux(), cfg).failures["stage1"]
    n = 10_000
    pooled = (arms["satisfying"] + arms["violating"]) / 2
    se = math.sqrt(max(pooled * (1 - pooled) * 2 / n, 1e-300))
    margin = arms["violating"] - arms["satisfying"]
    p_value = float(norm.sf(margin / se))
    ok_c = margin > 0 and p_value < 1e-3
    # (d) determinism
    cfg_d = SimConfig(N=6, eps=0.25, eps_prime=1.0, trials=2000, seed=5, r1S=1 / 6, r1Sp=1 / 6, r1C=1 / 6)
    d1 = run_experiment(src, ch, caux, cfg_d).to_dict(wall_time=False)
    d2 = run_experiment(src, ch, caux, cfg_d).to_dict(wall_time=False)
    ok_d = d1 == d2
    dt = time.perf_counter() - t0
    verdict(8, ok_a and ok_b and ok_c and ok_d and dt < 300,
            f"(a) P_err={rep_a.p_err} over 1e4; (b) codebook violations {violations}/100 seeds; "
            f"(c) stage-1 error {arms['satisfying']:.4f} at 0.3 vs {arms['violating']:.4f} at 0.9 "
            f"(capacity {cap:.3f}), margin {margin:.4f}, one-sided p={p_value:.1e}; "
            f"(d) identical reports {ok_d}; {dt:.1f}s")


def test_9_key_layer_independence(verdict):
    src, ch = chain_source(0.1, 0.2), bsc_pair_mac(0.05, 0.3)
    aux = AuxiliaryConfig.identity(src, ch)
    cfg = SimConfig(N=10, eps=0.25, eps_prime=1.0, trials=10_000, seed=3,
                    r1S=0.1, r1Sp=0.1, r1C=0.1, r1Cp=0.1)
    rep = run_experiment(src, ch, aux, cfg)
    ind = rep.independence["user1"]
    verdict(9, ind["below_bound"] and ind["df"] >= 1,
            f"plug-in I(K1S;K1C) = {ind['mi_bits']:.2e} bits over {ind['trials']} trials, "
            f"99.9% null bound {ind['bias_bound_bits']:.2e} (df={ind['df']})")

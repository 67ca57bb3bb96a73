import numpy as np
import pytest

from skagree.errors import BudgetError, InputError
from skagree.instances import (bsc_pair_mac, chain_source, deterministic_source, identity_mac)
from skagree.models import AuxiliaryConfig, ChannelModel, source_aux_joint
from skagree.sim import (SENTINEL, ChannelCodebook, Codebooks, SimConfig, _laws, build_codebooks,
                         check_codebooks, decode_user3, encode, key_independence, run_experiment,
                         scheme_rates, typical_mask)

DET = deterministic_source()
BINARY_V = dict(pu1_given_s1=np.ones((1, 1)), pu2_given_s2=np.ones((1, 1)))


def identity_v_aux():
    return AuxiliaryConfig(np.ones((1, 1)), np.ones((1, 1)), [0.5, 0.5], [0.5, 0.5], np.eye(2), np.eye(2))


def one_sided_aux():
    # user 2 sends a constant, so only user 1 uses the channel
    return AuxiliaryConfig(np.ones((1, 1)), np.ones((1, 1)), [0.5, 0.5], [1.0], np.eye(2), [[1.0, 0.0]])


def broadcast_mac():
    return ChannelModel.from_function((2, 2), (4, 4, 4), lambda a, b: {(2 * a + b,) * 3: 1.0})


def test_config_validation():
    with pytest.raises(InputError):
        SimConfig(N=0)
    with pytest.raises(InputError):
        SimConfig(N=17)
    with pytest.raises(InputError):
        SimConfig(trials=0)
    with pytest.raises(InputError):
        SimConfig(r1S=-0.1)
    with pytest.raises(InputError, match="r1C"):
        SimConfig(N=8, r1Sp=0.5)          # 16 bins but one channel codeword
    with pytest.raises(BudgetError):
        SimConfig(N=16, r1S=0.7, r1Sp=0.7)
    assert SimConfig(N=8, r1Sp=0.25, r1C=0.25).channel_sizes(1) == (4, 1)


def test_zero_rates_give_single_codewords():
    books = build_codebooks(DET, identity_mac(), identity_v_aux(), SimConfig(N=5))
    for b in books.source:
        assert b.codewords.shape == (1, 5) and b.labels.tolist() == [[0, 0, 0]]
    for c in books.channel:
        assert c.codewords.shape == (1, 5) and c.part.tolist() == [0]


def test_codebooks_reproducible_per_seed():
    src = chain_source(0.1, 0.2)
    ch = bsc_pair_mac(0.1, 0.2)
    aux = AuxiliaryConfig.identity(src, ch)
    cfg = SimConfig(N=6, r1S=0.3, r1Sp=0.3, r1C=0.4, seed=9)
    a, b = build_codebooks(src, ch, aux, cfg), build_codebooks(src, ch, aux, cfg)
    c = build_codebooks(src, ch, aux, cfg.replace(seed=10))
    assert np.array_equal(a.source[0].codewords, b.source[0].codewords)
    assert np.array_equal(a.channel[0].part, b.channel[0].part)
    assert not np.array_equal(a.source[0].codewords, c.source[0].codewords)


def test_label_grid_for_half_rate_layers():
    src = chain_source(0.1, 0.2)
    ch = bsc_pair_mac(0.1, 0.2)
    cfg = SimConfig(N=4, r1S=0.5, r1Sp=0.5, r1Spp=0.5, r1C=0.5)
    books = build_codebooks(src, ch, AuxiliaryConfig.identity(src, ch), cfg)
    sb = books.source[0]
    assert sb.sizes == (4, 4, 4) and len(sb.codewords) == 64
    for layer in range(3):
        assert sb.bin_sizes(layer).tolist() == [16] * 4
    assert books.channel[0].part_sizes().tolist() == [1, 1, 1, 1]


@pytest.mark.parametrize("seed", range(20))
def test_partition_is_balanced_and_stratified(seed):
    src = chain_source(0.1, 0.2)
    ch = bsc_pair_mac(0.1, 0.2)
    cfg = SimConfig(N=6, r1S=1 / 6, r1Sp=2 / 6, r1C=2 / 6, r1Cp=2 / 6, r2Sp=0.5, r2C=0.2, r2Cp=0.4,
                    seed=seed)
    books = build_codebooks(src, ch, AuxiliaryConfig.identity(src, ch), cfg)
    assert check_codebooks(books) == []
    cb = books.channel[0]
    # 4 kC values x 4 kC' values over 4 parts: each part holds every kC exactly once
    for part in range(cb.n_parts):
        assert sorted(cb.labels[cb.part == part, 0].tolist()) == [0, 1, 2, 3]


def test_typical_mask_rules():
    law = np.array([[0.5, 0.0], [0.0, 0.5]])
    a = np.array([[0, 0, 1, 1], [0, 1, 0, 1]])
    b = np.array([0, 0, 1, 1])
    mask = typical_mask([a, b], law, eps=0.5)
    assert mask.tolist() == [True, False]        # second row visits a zero cell
    assert not typical_mask([np.array([0, 0, 0, 0]), b], law, 0.2)[0]
    assert typical_mask([np.array([0, 0, 0, 1]), np.array([0, 0, 0, 1])], law, 0.25)[0]


def test_encoder_picks_the_matching_codeword():
    src = chain_source(0.0, 0.0)
    ch = identity_mac()
    aux = AuxiliaryConfig.identity(src, ch)
    cfg = SimConfig(N=3, eps_prime=1.0, r1S=1.0)
    books = build_codebooks(src, ch, aux, cfg)
    laws = _laws(src, ch, aux)
    rng = np.random.default_rng(0)
    for iu, word in enumerate(books.source[0].codewords):
        out = encode(1, word, books, aux, laws, cfg, rng)
        matches = np.flatnonzero((books.source[0].codewords == word).all(1))
        assert not out["fail"] and out["u"] in matches
    missing = [w for w in np.ndindex(2, 2, 2) if not (books.source[0].codewords == w).all(1).any()]
    if missing:
        assert encode(1, np.array(missing[0]), books, aux, laws, cfg, rng)["fail"]


def test_encoding_failure_on_empty_typical_set():
    src = chain_source(0.0, 0.0)
    ch = identity_mac()
    aux = AuxiliaryConfig.identity(src, ch)
    cfg = SimConfig(N=4, eps_prime=1.0)
    books = build_codebooks(src, ch, aux, cfg)
    s = 1 - books.source[0].codewords[0]
    out = encode(1, s, books, aux, _laws(src, ch, aux), cfg, np.random.default_rng(0))
    assert out["fail"]


def test_decoder_ambiguity_on_planted_collision():
    ch = identity_mac()
    aux = identity_v_aux()
    cfg = SimConfig(N=6, eps=1.0, r1C=2 / 6)
    books = build_codebooks(DET, ch, aux, cfg)
    c1 = books.channel[0]
    words = c1.codewords.copy()
    words[1] = words[0]
    planted = Codebooks(books.source, (ChannelCodebook(words, c1.labels, c1.part, c1.n_parts),
                                       books.channel[1]))
    laws = _laws(DET, ch, aux)
    y3 = 2 * words[0] + books.channel[1].codewords[0]
    assert decode_user3(y3, np.zeros(6, int), planted, laws, cfg)["stage1_fail"]
    y3 = 2 * c1.codewords[2] + books.channel[1].codewords[0]
    if len(np.unique(c1.codewords, axis=0)) == len(c1.codewords):
        d = decode_user3(y3, np.zeros(6, int), books, laws, cfg)
        assert not d["stage1_fail"] and d["k1C"] == c1.labels[2, 0]


def test_all_zero_rates_trivial_report():
    rep = run_experiment(DET, identity_mac(), identity_v_aux(), SimConfig(N=4, eps=1.0, trials=50))
    assert rep.p_err == 0.0
    assert rep.leakage["L1"] == 0.0 and rep.leakage["L2"] == 0.0
    assert rep.key_entropy["H(K1)/N"] == 0.0


def test_perfect_channel_agrees_exactly():
    cfg = SimConfig(N=8, eps=1.0, eps_prime=1.0, trials=300, r1C=0.25, r2C=0.25)
    books = build_codebooks(DET, identity_mac(), identity_v_aux(), cfg)
    assert all(len(np.unique(c.codewords, axis=0)) == 4 for c in books.channel)
    rep = run_experiment(DET, identity_mac(), identity_v_aux(), cfg, books=books)
    assert rep.p_err == 0.0
    assert rep.key_entropy["H(K1)/N"] == pytest.approx(0.25, abs=0.01)


def test_full_view_leaks_the_channel_key():
    # Y1 = Y2 = Y3 = (X1, X2): the other user decodes the key as well as user 3 does
    cfg = SimConfig(N=8, eps=1.0, eps_prime=1.0, trials=400, r1C=0.25, r2C=0.25, seed=0)
    rep = run_experiment(DET, broadcast_mac(), identity_v_aux(), cfg)
    assert rep.leakage["L1"] == pytest.approx(rep.key_entropy["H(K1)/N"], abs=1e-9)
    blind = run_experiment(DET, identity_mac("none"), identity_v_aux(), cfg)
    assert blind.leakage["L1"] == 0.0


def test_view_feature_runs():
    # seed 1 draws two distinct codewords; seed 0 draws a collision, which hides the key
    cfg = SimConfig(N=3, eps=1.0, eps_prime=1.0, trials=200, r1C=1 / 3, feature="view", seed=1)
    rep = run_experiment(DET, broadcast_mac(), identity_v_aux(), cfg)
    assert rep.leakage["feature"] == "view"
    collided = run_experiment(DET, broadcast_mac(), identity_v_aux(), cfg.replace(seed=0))
    assert collided.leakage["L1"] == 0.0 < collided.key_entropy["H(K1)/N"]
    assert rep.leakage["L1"] == pytest.approx(rep.key_entropy["H(K1)/N"], abs=1e-9)


def test_report_deterministic_and_trace():
    src = chain_source(0.1, 0.2)
    ch = bsc_pair_mac(0.05, 0.3)
    aux = AuxiliaryConfig.identity(src, ch)
    cfg = SimConfig(N=6, eps=0.25, eps_prime=1.0, trials=100, seed=4, r1S=1 / 6, r1Sp=1 / 6, r1C=1 / 6)
    a = run_experiment(src, ch, aux, cfg, trace=True)
    b = run_experiment(src, ch, aux, cfg)
    assert a.to_dict(wall_time=False) == b.to_dict(wall_time=False)
    lines = a.trace_csv().strip().splitlines()
    assert len(lines) == 101 and lines[0].startswith("trial,k1S")
    errors = sum(int(r.split(",")[-1]) for r in lines[1:])
    assert errors / 100 == pytest.approx(a.p_err)
    assert all(o.error == (o.keys != o.decoded or any(o.encode_fail)) or o.stage1_fail or o.stage2_fail
               for o in a.trace)
    assert all((SENTINEL in o.decoded) <= o.error for o in a.trace)


def test_reliability_trend_in_blocklength():
    aux = one_sided_aux()
    ch = bsc_pair_mac(0.05, 0.3)
    means = []
    for n in (4, 8, 12):
        runs = [run_experiment(DET, ch, aux, SimConfig(N=n, eps=0.15, eps_prime=1.0, trials=300,
                                                       seed=s, r1C=0.3)).p_err for s in range(3)]
        means.append(np.mean(runs))
    assert means[0] >= means[1] >= means[2]


def test_key_independence_statistic():
    rng = np.random.default_rng(0)
    a, b = rng.integers(0, 4, 5000), rng.integers(0, 3, 5000)
    ind = key_independence(a, b)
    assert ind["df"] == 6 and ind["below_bound"]
    dep = key_independence(a, a % 3)
    assert not dep["below_bound"]


def test_scheme_rates_bookkeeping():
    src = chain_source(0.05, 0.3)
    ch = bsc_pair_mac(0.05, 0.3)
    aux = AuxiliaryConfig(np.array([[0.9, 0.1], [0.1, 0.9]]), np.eye(2), [0.5, 0.5], [0.5, 0.5],
                          np.eye(2), np.eye(2))
    r = scheme_rates(src, ch, aux, eps_prime=0.01, eps_dprime=0.01)
    ps = source_aux_joint(src, aux)
    total = ps.mutual_information(["U1"], ["S1"]) + 0.01
    assert r["r1S"] + r["r1Sp"] + r["r1Spp"] == pytest.approx(total, abs=1e-12)
    assert all(v >= 0 for v in r.values())
    half = scheme_rates(src, ch, aux, 0.01, 0.01, fraction=0.5)
    assert half["r1C"] == pytest.approx(r["r1C"] / 2)

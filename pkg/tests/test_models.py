import json

import numpy as np
import pytest

from skagree.errors import InputError
from skagree.instances import (adder_mac, bsc_pair_mac, chain_source, erasure_mac, identity_mac,
                               independent_source, xor_mac)
from skagree.models import (AuxiliaryConfig, ChannelModel, SourceModel, channel_aux_joint,
                            check_special_case, load_model_file, model_to_dict, source_aux_joint)


def test_source_axes_enforced():
    with pytest.raises(InputError):
        SourceModel.from_table(np.ones((2, 2)) / 4)


def test_channel_rows_must_normalize():
    t = np.full((2, 2, 1, 1, 2), 0.5)
    t[0, 0, 0, 0] = [0.7, 0.4]
    with pytest.raises(InputError):
        ChannelModel.from_table(t)


def test_from_function_builds_deterministic_channel():
    ch = identity_mac("full")
    assert ch.output_sizes == (4, 4, 4)
    assert ch.table[1, 0, 2, 2, 2] == 1.0
    assert np.allclose(ch.output_marginal(3).sum(-1), 1.0)


def test_aux_validation():
    src, ch = chain_source(0.1, 0.2), xor_mac()
    aux = AuxiliaryConfig.identity(src, ch)
    aux.check_compatible(src, ch)
    assert aux.u_sizes == (2, 2) and aux.v_sizes == (2, 2)
    with pytest.raises(InputError):
        AuxiliaryConfig(np.eye(2), np.eye(2), [0.5, 0.6], [0.5, 0.5], np.eye(2), np.eye(2))
    with pytest.raises(InputError):
        AuxiliaryConfig(np.eye(2), np.eye(2), [0.5, 0.5], [1.0], np.eye(2), np.eye(2))
    bad = AuxiliaryConfig(np.eye(3), np.eye(2), [1.0], [1.0], [[1.0, 0.0]], [[1.0, 0.0]])
    with pytest.raises(InputError):
        bad.check_compatible(src=src)
    assert AuxiliaryConfig.from_dict(json.loads(json.dumps(aux.to_dict()))).to_dict() == aux.to_dict()


def test_aux_joints_respect_markov_structure():
    src = SourceModel.from_table(np.random.default_rng(0).dirichlet(np.ones(8)).reshape(2, 2, 2))
    w = np.array([[0.7, 0.2, 0.1], [0.1, 0.3, 0.6]])
    aux = AuxiliaryConfig(w, w[:, ::-1], [0.4, 0.6], [1.0], [[0.9, 0.1], [0.2, 0.8]], [[0.5, 0.5]])
    ps = source_aux_joint(src, aux)
    assert ps.mutual_information(["U1"], ["S2", "S3", "U2"], ["S1"]) < 1e-12
    assert ps.marginal(["S1", "S2", "S3"]).table == pytest.approx(src.joint.table)
    pc = channel_aux_joint(bsc_pair_mac(0.1, 0.2), aux)
    assert pc.mutual_information(["V1"], ["V2"]) < 1e-12
    assert pc.mutual_information(["V1", "V2"], ["Y1", "Y2", "Y3"], ["X1", "X2"]) < 1e-12


@pytest.mark.parametrize("ch,expect", [
    (xor_mac("copy"), []),
    (adder_mac("copy"), []),
    (identity_mac("none"), ["markov_y1", "markov_y2"]),
    (erasure_mac(0.2), ["markov_y1", "markov_y2", "det_x1", "det_x2"]),
])
def test_special_case_check(ch, expect):
    rep = check_special_case(chain_source(0.1, 0.2), ch)
    assert rep.violated() == expect
    assert rep.all_true == (not expect)


def test_special_case_flags_source_dependence():
    t = np.zeros((2, 2, 2))
    t[0, 0, 0] = t[1, 1, 0] = 0.25
    t[0, 1, 1] = t[1, 0, 1] = 0.25
    rep = check_special_case(SourceModel.from_table(t), xor_mac())
    assert rep.violated() == ["markov_sources"]
    assert check_special_case(independent_source(), xor_mac()).markov_sources


def test_special_case_needs_full_support():
    with pytest.raises(InputError):
        check_special_case(chain_source(0.1, 0.2), xor_mac(), px1=[1.0, 0.0])


def test_model_file_roundtrip_and_errors(tmp_path):
    src, ch = chain_source(0.1, 0.3), bsc_pair_mac(0.05, 0.2)
    f = tmp_path / "m.json"
    f.write_text(json.dumps(model_to_dict(src, ch, note="x")))
    s2, c2, extra = load_model_file(f)
    assert np.array_equal(s2.joint.table, src.joint.table)
    assert np.array_equal(c2.table, ch.table)
    assert extra == {"note": "x"}
    with pytest.raises(InputError, match="cannot read"):
        load_model_file(tmp_path / "missing.json")
    f.write_text('{"source": \n  oops}')
    with pytest.raises(InputError, match="line 2"):
        load_model_file(f)
    f.write_text('{"source": {}}')
    with pytest.raises(InputError):
        load_model_file(f)

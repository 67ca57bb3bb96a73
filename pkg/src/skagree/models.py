"""Source, channel and auxiliary-variable models, and the joint laws built from them."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InputError
from .prob import CondPMF, JointPMF, SUM_TOL

SOURCE_AXES = ("S1", "S2", "S3")
CHANNEL_IN = ("X1", "X2")
CHANNEL_OUT = ("Y1", "Y2", "Y3")
SOURCE_AUX_AXES = ("U1", "U2", "S1", "S2", "S3")
CHANNEL_AUX_AXES = ("V1", "V2", "X1", "X2", "Y1", "Y2", "Y3")


@dataclass(frozen=True, eq=False)
class SourceModel:
    joint: JointPMF

    def __post_init__(self):
        if self.joint.names != SOURCE_AXES:
            raise InputError(f"source axes must be {SOURCE_AXES}, got {self.joint.names}")

    @property
    def sizes(self) -> tuple[int, int, int]:
        return self.joint.sizes

    @classmethod
    def from_table(cls, table) -> "SourceModel":
        return cls(JointPMF(SOURCE_AXES, table))


@dataclass(frozen=True, eq=False)
class ChannelModel:
    law: CondPMF

    def __post_init__(self):
        if self.law.from_names != CHANNEL_IN or self.law.to_names != CHANNEL_OUT:
            raise InputError("channel must map (X1,X2) to (Y1,Y2,Y3)")

    @property
    def input_sizes(self) -> tuple[int, int]:
        return self.law.from_sizes

    @property
    def output_sizes(self) -> tuple[int, int, int]:
        return self.law.to_sizes

    @property
    def table(self) -> np.ndarray:
        return self.law.table

    @classmethod
    def from_table(cls, table) -> "ChannelModel":
        return cls(CondPMF(CHANNEL_IN, CHANNEL_OUT, table))

    @classmethod
    def from_function(cls, sizes_in, sizes_out, fn) -> "ChannelModel":
        """Build from ``fn(x1, x2) -> dict{(y1, y2, y3): prob}``."""
        t = np.zeros(tuple(sizes_in) + tuple(sizes_out))
        for x1 in range(sizes_in[0]):
            for x2 in range(sizes_in[1]):
                for ys, p in fn(x1, x2).items():
                    t[(x1, x2) + tuple(ys)] += p
        return cls.from_table(t)

    def output_marginal(self, k: int) -> np.ndarray:
        """p(y_k | x1, x2) as an array of shape (|X1|, |X2|, |Y_k|); k in {1,2,3}."""
        drop = tuple(2 + j for j in range(3) if j != k - 1)
        return self.table.sum(axis=drop)

    def joint_with_inputs(self, p_x1x2) -> JointPMF:
        """Joint law over (X1,X2,Y1,Y2,Y3) for an input law given as a |X1|x|X2| array."""
        return self.law.compose(JointPMF(CHANNEL_IN, p_x1x2))


def _stochastic(mat, rows: int | None, what: str) -> np.ndarray:
    m = np.array(mat, dtype=float)
    if m.ndim != 2:
        raise InputError(f"{what} must be a 2-D row-stochastic matrix")
    if rows is not None and m.shape[0] != rows:
        raise InputError(f"{what} has {m.shape[0]} rows, expected {rows}")
    if np.any(m < 0) or np.any(np.abs(m.sum(axis=1) - 1) > SUM_TOL):
        raise InputError(f"{what} rows must be probability vectors")
    m.setflags(write=False)
    return m


def _pmf(vec, what: str) -> np.ndarray:
    v = np.array(vec, dtype=float)
    if v.ndim != 1 or np.any(v < 0) or abs(v.sum() - 1) > SUM_TOL:
        raise InputError(f"{what} must be a probability vector")
    v.setflags(write=False)
    return v


@dataclass(frozen=True, eq=False)
class AuxiliaryConfig:
    """Conditional laws over which the achievable region is optimized.

    ``pu1_given_s1`` has shape (|S1|, |U1|); ``px1_given_v1`` has shape
    (|V1|, |X1|); ``pv1`` has length |V1|. Alphabet sizes are read off the shapes.
    """

    pu1_given_s1: np.ndarray
    pu2_given_s2: np.ndarray
    pv1: np.ndarray
    pv2: np.ndarray
    px1_given_v1: np.ndarray
    px2_given_v2: np.ndarray

    def __post_init__(self):
        set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        set_("pu1_given_s1", _stochastic(self.pu1_given_s1, None, "p(u1|s1)"))
        set_("pu2_given_s2", _stochastic(self.pu2_given_s2, None, "p(u2|s2)"))
        set_("pv1", _pmf(self.pv1, "p(v1)"))
        set_("pv2", _pmf(self.pv2, "p(v2)"))
        set_("px1_given_v1", _stochastic(self.px1_given_v1, len(self.pv1), "p(x1|v1)"))
        set_("px2_given_v2", _stochastic(self.px2_given_v2, len(self.pv2), "p(x2|v2)"))

    @property
    def u_sizes(self) -> tuple[int, int]:
        return self.pu1_given_s1.shape[1], self.pu2_given_s2.shape[1]

    @property
    def v_sizes(self) -> tuple[int, int]:
        return len(self.pv1), len(self.pv2)

    def check_compatible(self, src: SourceModel | None = None, ch: ChannelModel | None = None):
        if src is not None:
            s1, s2, _ = src.sizes
            if self.pu1_given_s1.shape[0] != s1 or self.pu2_given_s2.shape[0] != s2:
                raise InputError("auxiliary source conditionals do not match |S1|, |S2|")
        if ch is not None:
            x1, x2 = ch.input_sizes
            if self.px1_given_v1.shape[1] != x1 or self.px2_given_v2.shape[1] != x2:
                raise InputError("auxiliary input conditionals do not match |X1|, |X2|")

    @classmethod
    def identity(cls, src: SourceModel, ch: ChannelModel, px1=None, px2=None) -> "AuxiliaryConfig":
        """U_i = S_i and V_i = X_i with the given (default uniform) input laws."""
        s1, s2, _ = src.sizes
        x1, x2 = ch.input_sizes
        px1 = np.full(x1, 1 / x1) if px1 is None else px1
        px2 = np.full(x2, 1 / x2) if px2 is None else px2
        return cls(np.eye(s1), np.eye(s2), px1, px2, np.eye(x1), np.eye(x2))

    @classmethod
    def constant(cls, src: SourceModel, ch: ChannelModel) -> "AuxiliaryConfig":
        """Single-symbol U and V; channel inputs fixed to symbol 0."""
        s1, s2, _ = src.sizes
        x1, x2 = ch.input_sizes
        e1, e2 = np.eye(x1)[:1], np.eye(x2)[:1]
        return cls(np.ones((s1, 1)), np.ones((s2, 1)), [1.0], [1.0], e1, e2)

    def to_dict(self) -> dict:
        return {k: getattr(self, k).tolist() for k in
                ("pu1_given_s1", "pu2_given_s2", "pv1", "pv2", "px1_given_v1", "px2_given_v2")}

    @classmethod
    def from_dict(cls, doc: dict) -> "AuxiliaryConfig":
        try:
            return cls(**{k: doc[k] for k in
                          ("pu1_given_s1", "pu2_given_s2", "pv1", "pv2", "px1_given_v1", "px2_given_v2")})
        except KeyError as exc:
            raise InputError(f"auxiliary config missing {exc}") from exc


def source_aux_joint(src: SourceModel, aux: AuxiliaryConfig) -> JointPMF:
    """p(u1,u2,s1,s2,s3) = p(u1|s1) p(u2|s2) p(s1,s2,s3)."""
    aux.check_compatible(src=src)
    t = np.einsum("au,bv,abc->uvabc", aux.pu1_given_s1, aux.pu2_given_s2, src.joint.table)
    return JointPMF(SOURCE_AUX_AXES, t)


def channel_aux_joint(ch: ChannelModel, aux: AuxiliaryConfig) -> JointPMF:
    """p(v1,v2,x1,x2,y1,y2,y3) = p(v1)p(v2)p(x1|v1)p(x2|v2)p(y1,y2,y3|x1,x2)."""
    aux.check_compatible(ch=ch)
    t = np.einsum("a,b,ax,by,xyijk->abxyijk", aux.pv1, aux.pv2,
                  aux.px1_given_v1, aux.px2_given_v2, ch.table)
    return JointPMF(CHANNEL_AUX_AXES, t)


@dataclass(frozen=True)
class SpecialCaseReport:
    markov_y1: bool
    markov_y2: bool
    markov_sources: bool
    det_x1: bool
    det_x2: bool
    values: dict = field(default_factory=dict)

    @property
    def all_true(self) -> bool:
        return self.markov_y1 and self.markov_y2 and self.markov_sources and self.det_x1 and self.det_x2

    def violated(self) -> list[str]:
        return [k for k in ("markov_y1", "markov_y2", "markov_sources", "det_x1", "det_x2")
                if not getattr(self, k)]


def check_special_case(src: SourceModel, ch: ChannelModel, px1=None, px2=None,
                       tol: float = 1e-9) -> SpecialCaseReport:
    """Test the Markov and input-recoverability structure under p(x1)p(x2).

    Input laws default to uniform; they must have full support, since the
    recoverability conditions H(X1|X2,Y3)=0 are only meaningful on the whole
    input alphabet.
    """
    x1, x2 = ch.input_sizes
    px1 = np.full(x1, 1 / x1) if px1 is None else np.asarray(px1, dtype=float)
    px2 = np.full(x2, 1 / x2) if px2 is None else np.asarray(px2, dtype=float)
    if np.any(px1 <= 0) or np.any(px2 <= 0):
        raise InputError("special-case check needs full-support input laws")
    joint = ch.joint_with_inputs(np.outer(px1, px2))
    vals = {
        "I(X1,X2;Y3|Y1)": joint.mutual_information(["X1", "X2"], ["Y3"], ["Y1"]),
        "I(X1,X2;Y3|Y2)": joint.mutual_information(["X1", "X2"], ["Y3"], ["Y2"]),
        "I(S1;S2|S3)": src.joint.mutual_information(["S1"], ["S2"], ["S3"]),
        "H(X1|X2,Y3)": joint.entropy(["X1", "X2", "Y3"]) - joint.entropy(["X2", "Y3"]),
        "H(X2|X1,Y3)": joint.entropy(["X1", "X2", "Y3"]) - joint.entropy(["X1", "Y3"]),
    }
    return SpecialCaseReport(
        markov_y1=vals["I(X1,X2;Y3|Y1)"] <= tol,
        markov_y2=vals["I(X1,X2;Y3|Y2)"] <= tol,
        markov_sources=vals["I(S1;S2|S3)"] <= tol,
        det_x1=vals["H(X1|X2,Y3)"] <= tol,
        det_x2=vals["H(X2|X1,Y3)"] <= tol,
        values=vals,
    )


def load_model_file(path) -> tuple[SourceModel, ChannelModel, dict]:
    """Read ``{"source": JointPMF, "channel": CondPMF, ...}``; extra keys returned raw."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read model file {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} col {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict) or "source" not in doc or "channel" not in doc:
        raise InputError(f"{path}: model file needs 'source' and 'channel' sections")
    src = SourceModel(JointPMF.from_dict(doc["source"]))
    ch = ChannelModel(CondPMF.from_dict(doc["channel"], CHANNEL_IN, CHANNEL_OUT))
    extra = {k: v for k, v in doc.items() if k not in ("source", "channel")}
    return src, ch, extra


def model_to_dict(src: SourceModel, ch: ChannelModel, **extra) -> dict:
    return {"source": src.joint.to_dict(), "channel": ch.law.to_dict(), **extra}

"""Small hand-built sources and channels used in examples, scripts and tests."""
from __future__ import annotations

import numpy as np

from .models import ChannelModel, SourceModel
from .prob import bsc


def chain_source(p1: float, p2: float, p3: float = 0.5) -> SourceModel:
    """Binary S3 ~ Bern(p3); S1 = S3 xor Bern(p1), S2 = S3 xor Bern(p2), flips independent.

    S1 - S3 - S2 is Markov by construction.
    """
    pz = np.array([1 - p3, p3])
    t = np.einsum("c,ca,cb->abc", pz, bsc(p1), bsc(p2))
    return SourceModel.from_table(t)


def identical_source(n: int = 2) -> SourceModel:
    """S1 = S2 = S3 uniform over n symbols."""
    t = np.zeros((n, n, n))
    for s in range(n):
        t[s, s, s] = 1 / n
    return SourceModel.from_table(t)


def independent_source(p1=(0.5, 0.5), p2=(0.5, 0.5), p3=(0.5, 0.5)) -> SourceModel:
    return SourceModel.from_table(np.einsum("a,b,c->abc", p1, p2, p3))


def deterministic_source() -> SourceModel:
    """Single-symbol sources."""
    return SourceModel.from_table(np.ones((1, 1, 1)))


def identity_mac(eavesdrop: str = "none") -> ChannelModel:
    """Y3 = (X1, X2) as a 4-ary symbol over binary inputs.

    ``eavesdrop`` sets Y1 = Y2: "none" (constant), "full" (copy of Y3).
    """
    def fn(x1, x2):
        y3 = 2 * x1 + x2
        y = 0 if eavesdrop == "none" else y3
        return {(y, y, y3): 1.0}
    n_eve = 1 if eavesdrop == "none" else 4
    return ChannelModel.from_function((2, 2), (n_eve, n_eve, 4), fn)


def xor_mac(eavesdrop: str = "copy") -> ChannelModel:
    """Y3 = X1 xor X2; Y1 = Y2 = Y3 ("copy") or constant ("none")."""
    def fn(x1, x2):
        y3 = x1 ^ x2
        y = y3 if eavesdrop == "copy" else 0
        return {(y, y, y3): 1.0}
    n = 2 if eavesdrop == "copy" else 1
    return ChannelModel.from_function((2, 2), (n, n, 2), fn)


def adder_mac(eavesdrop: str = "copy") -> ChannelModel:
    """Y3 = X1 + X2 in {0,1,2}; Y1 = Y2 = Y3 ("copy") or (X1, X2) in full ("full")."""
    def fn(x1, x2):
        y3 = x1 + x2
        y = y3 if eavesdrop == "copy" else 2 * x1 + x2
        return {(y, y, y3): 1.0}
    n = 3 if eavesdrop == "copy" else 4
    return ChannelModel.from_function((2, 2), (n, n, 3), fn)


def useless_channel(n_out: int = 2) -> ChannelModel:
    """All outputs uniform and independent of the inputs."""
    t = np.full((2, 2, n_out, n_out, n_out), 1.0 / n_out ** 3)
    return ChannelModel.from_table(t)


def erasure_mac(e: float = 0.2) -> ChannelModel:
    """Y3 = (X1, X2) or an erasure symbol with probability e; Y1 = Y2 constant."""
    def fn(x1, x2):
        return {(0, 0, 2 * x1 + x2): 1 - e, (0, 0, 4): e}
    return ChannelModel.from_function((2, 2), (1, 1, 5), fn)


def bsc_pair_mac(p3: float, p_eve: float) -> ChannelModel:
    """Y3 = (X1^Z1, X2^Z2) with Z ~ Bern(p3) i.i.d.

    The eavesdropping outputs see the *other* user's input through its own
    BSC(p_eve): Y2 = X1 ^ Z', Y1 = X2 ^ Z''. Binary-symmetric surrogate of the
    Gaussian example with eavesdroppers noisier than the legitimate receiver.
    """
    b3, be = bsc(p3), bsc(p_eve)
    t = np.zeros((2, 2, 2, 2, 4))
    for x1 in range(2):
        for x2 in range(2):
            for a in range(2):
                for b in range(2):
                    for y1 in range(2):
                        for y2 in range(2):
                            t[x1, x2, y1, y2, 2 * a + b] += b3[x1, a] * b3[x2, b] * be[x2, y1] * be[x1, y2]
    return ChannelModel.from_table(t)


def random_instance(rng: np.random.Generator, y_sizes=(2, 2, 2)) -> tuple[SourceModel, ChannelModel]:
    """Random binary source triple and a random GDMMAC with binary inputs."""
    src = SourceModel.from_table(rng.dirichlet(np.ones(8)).reshape(2, 2, 2))
    rows = rng.dirichlet(np.ones(int(np.prod(y_sizes))) * 0.5, size=4)
    return src, ChannelModel.from_table(rows.reshape((2, 2) + tuple(y_sizes)))

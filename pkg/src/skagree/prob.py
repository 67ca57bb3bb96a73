"""Finite-alphabet probability tables and information measures (base 2).

Everything here works on dense numpy tables. The array-level helpers
(``entropy_array``, ``cmi_array``) accept leading batch dimensions so that the
region search can evaluate thousands of candidate distributions at once; the
``JointPMF`` methods are thin wrappers for the unbatched case.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ConsistencyError, DomainError, InputError

SUM_TOL = 1e-12
ZERO_CUTOFF = 1e-15
MI_CLAMP = 1e-10


def _as_name_set(names) -> tuple[str, ...]:
    if isinstance(names, str):
        return (names,)
    return tuple(names)


def entropy_array(table: np.ndarray, keep: Sequence[int], batch: int = 0) -> np.ndarray:
    """Entropy in bits of the marginal on axes ``keep`` (indices after the batch axes)."""
    nd = table.ndim - batch
    drop = tuple(batch + i for i in range(nd) if i not in keep)
    marg = table.sum(axis=drop) if drop else table
    inner = tuple(range(batch, marg.ndim))
    if not inner:
        return np.zeros(marg.shape)
    safe = np.where(marg > ZERO_CUTOFF, marg, 1.0)
    terms = np.where(marg > ZERO_CUTOFF, marg * np.log2(safe), 0.0)
    return -terms.sum(axis=inner)


def cmi_array(table: np.ndarray, a: Sequence[int], b: Sequence[int],
              c: Sequence[int] = (), batch: int = 0) -> np.ndarray:
    """I(A;B|C) in bits via H(A,C)+H(B,C)-H(A,B,C)-H(C), clamped at zero."""
    a, b, c = set(a), set(b), set(c)
    val = (entropy_array(table, sorted(a | c), batch)
           + entropy_array(table, sorted(b | c), batch)
           - entropy_array(table, sorted(a | b | c), batch)
           - entropy_array(table, sorted(c), batch))
    val = np.asarray(val, dtype=float)
    if np.any(val < -MI_CLAMP):
        raise ConsistencyError(f"negative mutual information {val.min():.3e}")
    return np.maximum(val, 0.0)


class BatchInfo:
    """Memoized entropies of one (possibly batched) table.

    Terms such as I(U1;S3|U2) and I(U1;S2|U2) share marginals; caching them
    keeps the region search from recomputing the same sums.
    """

    def __init__(self, table: np.ndarray, batch: int = 0):
        self.table = table
        self.batch = batch
        self._h: dict[frozenset, np.ndarray] = {}

    def h(self, axes) -> np.ndarray:
        key = frozenset(axes)
        if key not in self._h:
            self._h[key] = entropy_array(self.table, sorted(key), self.batch)
        return self._h[key]

    def i(self, a, b, c=()) -> np.ndarray:
        a, b, c = set(a), set(b), set(c)
        val = self.h(a | c) + self.h(b | c) - self.h(a | b | c) - self.h(c)
        if np.any(val < -MI_CLAMP):
            raise ConsistencyError(f"negative mutual information {np.min(val):.3e}")
        return np.maximum(val, 0.0)


def _check_simplex(table: np.ndarray, axes: tuple[int, ...], what: str) -> None:
    if not np.all(np.isfinite(table)):
        raise InputError(f"{what}: non-finite entries")
    if np.any(table < 0):
        raise InputError(f"{what}: negative entries")
    sums = table.sum(axis=axes) if axes else table
    if np.any(np.abs(sums - 1.0) > SUM_TOL):
        raise InputError(f"{what}: mass does not sum to 1 (max deviation "
                         f"{np.max(np.abs(sums - 1.0)):.3e})")


@dataclass(frozen=True, eq=False)
class JointPMF:
    """Dense joint probability table over named finite alphabets."""

    names: tuple[str, ...]
    table: np.ndarray

    def __post_init__(self):
        names = tuple(self.names)
        table = np.array(self.table, dtype=float)
        if len(set(names)) != len(names):
            raise InputError(f"duplicate axis names in {names}")
        if table.ndim != len(names):
            raise InputError(f"table has {table.ndim} axes but {len(names)} names")
        _check_simplex(table, tuple(range(table.ndim)), "JointPMF")
        table.setflags(write=False)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "table", table)

    @property
    def sizes(self) -> tuple[int, ...]:
        return self.table.shape

    def size_of(self, name: str) -> int:
        return self.table.shape[self.index([name])[0]]

    def index(self, names) -> list[int]:
        out = []
        for n in _as_name_set(names):
            if n not in self.names:
                raise InputError(f"unknown axis {n!r}; have {self.names}")
            out.append(self.names.index(n))
        return out

    def marginal(self, keep) -> "JointPMF":
        keep = _as_name_set(keep)
        idx = self.index(keep)
        drop = tuple(i for i in range(self.table.ndim) if i not in idx)
        t = self.table.sum(axis=drop) if drop else self.table
        # reorder the surviving axes to the requested order
        remaining = [i for i in range(self.table.ndim) if i in idx]
        t = np.transpose(t, [remaining.index(i) for i in idx])
        return JointPMF(keep, t)

    def condition(self, name: str, symbol: int) -> "JointPMF":
        ax = self.index([name])[0]
        if not 0 <= symbol < self.table.shape[ax]:
            raise InputError(f"symbol {symbol} outside alphabet of {name!r}")
        sl = np.take(self.table, symbol, axis=ax)
        mass = sl.sum()
        if mass <= SUM_TOL:
            raise DomainError(f"P({name}={symbol}) = {mass:.3e} is (numerically) zero")
        rest = tuple(n for n in self.names if n != name)
        if not rest:
            raise DomainError("conditioning would leave no axes")
        return JointPMF(rest, sl / mass)

    def entropy(self, names) -> float:
        return float(entropy_array(self.table, self.index(names)))

    def mutual_information(self, a, b, c=()) -> float:
        ia, ib, ic = self.index(a), self.index(b), self.index(c)
        if set(ia) & set(ib) or set(ia) & set(ic) or set(ib) & set(ic):
            raise InputError("axis groups must be pairwise disjoint")
        if not ia or not ib:
            raise InputError("mutual information needs nonempty A and B")
        return float(cmi_array(self.table, ia, ib, ic))

    def to_dict(self) -> dict:
        return {
            "axes": [{"name": n, "size": int(s)} for n, s in zip(self.names, self.sizes)],
            "probs": self.table.ravel(order="C").tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "JointPMF":
        try:
            names = [a["name"] for a in doc["axes"]]
            sizes = [int(a["size"]) for a in doc["axes"]]
            probs = np.asarray(doc["probs"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed JointPMF document: {exc}") from exc
        if probs.size != math.prod(sizes):
            raise InputError(f"expected {math.prod(sizes)} probabilities, got {probs.size}")
        return cls(tuple(names), probs.reshape(sizes))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "JointPMF":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
        return cls.from_dict(doc)

    @classmethod
    def product(cls, *factors: tuple[str, Sequence[float]]) -> "JointPMF":
        names = [n for n, _ in factors]
        t = np.ones(())
        for _, p in factors:
            t = np.multiply.outer(t, np.asarray(p, dtype=float))
        return cls(tuple(names), t)


@dataclass(frozen=True, eq=False)
class CondPMF:
    """Conditional law: table shape is from_sizes + to_sizes, each row a PMF."""

    from_names: tuple[str, ...]
    to_names: tuple[str, ...]
    table: np.ndarray

    def __post_init__(self):
        fn, tn = tuple(self.from_names), tuple(self.to_names)
        table = np.array(self.table, dtype=float)
        if len(set(fn + tn)) != len(fn + tn):
            raise InputError("duplicate axis names")
        if table.ndim != len(fn) + len(tn):
            raise InputError("table rank does not match axis names")
        _check_simplex(table, tuple(range(len(fn), table.ndim)), "CondPMF row")
        table.setflags(write=False)
        object.__setattr__(self, "from_names", fn)
        object.__setattr__(self, "to_names", tn)
        object.__setattr__(self, "table", table)

    @property
    def from_sizes(self) -> tuple[int, ...]:
        return self.table.shape[: len(self.from_names)]

    @property
    def to_sizes(self) -> tuple[int, ...]:
        return self.table.shape[len(self.from_names):]

    def rows(self) -> np.ndarray:
        """2-D view: one row per conditioning tuple (row-major), columns over to-axes."""
        return self.table.reshape(math.prod(self.from_sizes), math.prod(self.to_sizes))

    def compose(self, p_in: JointPMF) -> JointPMF:
        """Joint law of (from-axes, to-axes) given an input law over the from-axes."""
        if p_in.names != self.from_names or p_in.sizes != self.from_sizes:
            raise InputError("input law axes do not match channel inputs")
        t = p_in.table.reshape(p_in.sizes + (1,) * len(self.to_names)) * self.table
        return JointPMF(self.from_names + self.to_names, t)

    def to_dict(self) -> dict:
        return {
            "from_sizes": [int(s) for s in self.from_sizes],
            "to_sizes": [int(s) for s in self.to_sizes],
            "rows": self.rows().tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict, from_names: Sequence[str], to_names: Sequence[str]) -> "CondPMF":
        try:
            fs = [int(s) for s in doc["from_sizes"]]
            ts = [int(s) for s in doc["to_sizes"]]
            rows = np.asarray(doc["rows"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed CondPMF document: {exc}") from exc
        if len(fs) != len(from_names) or len(ts) != len(to_names):
            raise InputError(f"expected {len(from_names)} input and {len(to_names)} output axes")
        if rows.shape != (math.prod(fs), math.prod(ts)):
            raise InputError(f"rows shape {rows.shape} != {(math.prod(fs), math.prod(ts))}")
        return cls(tuple(from_names), tuple(to_names), rows.reshape(fs + ts))


# Module-level forms of the core operations.

def entropy(p: JointPMF, names) -> float:
    return p.entropy(names)


def cond_mutual_information(p: JointPMF, a, b, c=()) -> float:
    return p.mutual_information(a, b, c)


def marginalize(p: JointPMF, keep) -> JointPMF:
    return p.marginal(keep)


def condition(p: JointPMF, name: str, symbol: int) -> JointPMF:
    return p.condition(name, symbol)


def is_markov(p: JointPMF, a, b, c, tol: float = 1e-9) -> bool:
    """True iff A - B - C is a Markov chain, i.e. I(A;C|B) <= tol."""
    return p.mutual_information(a, c, b) <= tol


def simplex_grid(dim: int, steps: int) -> Iterator[np.ndarray]:
    """All PMFs of length ``dim`` whose entries are multiples of 1/steps.

    Yields C(steps+dim-1, dim-1) vectors in lexicographic order of the
    integer compositions (first coordinate largest first).
    """
    if dim < 1 or steps < 1:
        raise InputError("simplex_grid needs dim >= 1 and steps >= 1")
    for bars in itertools.combinations(range(steps + dim - 1), dim - 1):
        cuts = (-1,) + bars + (steps + dim - 1,)
        counts = np.diff(cuts) - 1
        yield counts[::-1] / steps


def simplex_grid_array(dim: int, steps: int) -> np.ndarray:
    return np.array(list(simplex_grid(dim, steps)), dtype=float).reshape(-1, dim)


def product_grid(row_dim: int, nrows: int, steps: int) -> np.ndarray:
    """Every stochastic matrix (nrows x row_dim) with rows on the simplex grid."""
    rows = simplex_grid_array(row_dim, steps)
    if nrows == 0:
        return np.ones((1, 0, row_dim))
    idx = np.array(list(itertools.product(range(len(rows)), repeat=nrows)))
    return rows[idx]


def bsc(p: float) -> np.ndarray:
    return np.array([[1 - p, p], [p, 1 - p]])


def h2(p: float) -> float:
    if p <= 0 or p >= 1:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def plugin_mi(x: Iterable[int], y: Iterable[int]) -> float:
    """Plug-in mutual information (bits) of paired integer samples."""
    x = np.asarray(list(x) if not isinstance(x, np.ndarray) else x)
    y = np.asarray(list(y) if not isinstance(y, np.ndarray) else y)
    if x.size == 0:
        return 0.0
    _, xi = np.unique(x, return_inverse=True, axis=0 if x.ndim > 1 else None)
    _, yi = np.unique(y, return_inverse=True, axis=0 if y.ndim > 1 else None)
    xi, yi = xi.ravel(), yi.ravel()
    counts = np.zeros((xi.max() + 1, yi.max() + 1))
    np.add.at(counts, (xi, yi), 1.0)
    return float(cmi_array(counts / counts.sum(), [0], [1]))


def plugin_entropy(x) -> float:
    x = np.asarray(x)
    if x.size == 0:
        return 0.0
    _, counts = np.unique(x, return_counts=True, axis=0 if x.ndim > 1 else None)
    p = counts / counts.sum()
    return float(-(p * np.log2(p)).sum())

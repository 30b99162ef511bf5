"""Multigraph state, edge-list I/O, degree statistics and swap primitives."""

from collections import Counter
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels as K
from .exceptions import (
    CannotSwapError,
    DensityUndefinedError,
    ParseError,
    SpaceViolationError,
)


class Labeling(str, Enum):
    STUB = "stub"
    VERTEX = "vertex"


@dataclass(frozen=True)
class GraphSpace:
    """One of the eight configuration-model graph spaces."""

    allow_loops: bool
    allow_multi: bool
    labeling: Labeling = Labeling.STUB

    def __post_init__(self):
        object.__setattr__(self, "labeling", Labeling(self.labeling))

    @property
    def vertex_labeled(self):
        return self.labeling is Labeling.VERTEX

    @property
    def kind(self):
        """Short name of the loop/multi-edge combination, e.g. ``"loopy"``."""
        return _KIND_NAMES[(self.allow_loops, self.allow_multi)]

    @property
    def name(self):
        return f"{self.labeling.value}-{self.kind}"

    @classmethod
    def from_names(cls, kind, labeling="stub"):
        try:
            loops, multi = _KINDS[kind]
        except KeyError:
            raise ValueError(f"unknown space {kind!r}; expected one of {sorted(_KINDS)}") from None
        return cls(loops, multi, Labeling(labeling))

    @classmethod
    def all(cls):
        return [cls(lp, mu, lab) for lab in Labeling for (lp, mu) in _KINDS.values()]

    def __str__(self):
        return self.name


_KINDS = {
    "simple": (False, False),
    "loopy": (True, False),
    "multigraph": (False, True),
    "loopy-multigraph": (True, True),
}
_KIND_NAMES = {v: k for k, v in _KINDS.items()}

SIMPLE = GraphSpace(False, False)


class Graph:
    """Multigraph on vertices ``0..n-1`` stored as a flat edge array.

    A self-loop ``(u, u)`` is one edge and adds 2 to the degree of ``u``;
    parallel edges are repeated rows.  Pair multiplicities live in a hash
    table that the swap kernels update in place.  ``degrees`` never change
    after construction.
    """

    def __init__(self, n, edges, labels=None):
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size and (edges.min() < 0 or edges.max() >= n):
            raise ValueError("edge endpoint out of range 0..n-1")
        self.n = int(n)
        self.edges = np.ascontiguousarray(edges.copy())
        self.degrees = np.bincount(self.edges.ravel(), minlength=self.n).astype(np.int64)
        self.labels = list(labels) if labels is not None else None
        self._table = None

    @property
    def m(self):
        return self.edges.shape[0]

    def copy(self):
        g = Graph.__new__(Graph)
        g.n = self.n
        g.edges = self.edges.copy()
        g.degrees = self.degrees
        g.labels = self.labels
        g._table = None
        if self._table is not None:
            keys, vals, shift = self._table
            g._table = (keys.copy(), vals.copy(), shift)
        return g

    # multiplicity table -------------------------------------------------

    def table(self):
        """``(keys, vals, shift)`` arrays of the multiplicity table."""
        if self._table is None:
            size, shift = K.table_geometry(self.m)
            keys, vals = K.table_build(self.edges, self.n, size, shift)
            self._table = (keys, vals, shift)
        return self._table

    def invalidate_table(self):
        self._table = None

    def mult(self, u, v):
        keys, vals, shift = self.table()
        return int(K.table_get(keys, vals, shift, keys.shape[0] - 1, K.pair_key(u, v, self.n)))

    def multiplicities(self):
        """Dict ``{(u, v): w_uv}`` with ``u <= v``, read from the table."""
        keys, vals, _ = self.table()
        k, w = K.table_items(keys, vals)
        return {(int(x // self.n), int(x % self.n)): int(c) for x, c in zip(k, w)}

    def _bump(self, u, v, delta):
        keys, vals, shift = self.table()
        K.table_add(keys, vals, shift, keys.shape[0] - 1, K.pair_key(u, v, self.n), delta)

    # views -----------------------------------------------------------------

    def edge_multiset(self):
        return Counter(_pair(u, v) for u, v in self.edges.tolist())

    def num_loops(self):
        return int(np.count_nonzero(self.edges[:, 0] == self.edges[:, 1]))

    def max_multiplicity(self):
        c = self.edge_multiset()
        return max(c.values()) if c else 0

    def in_space(self, space):
        if not space.allow_loops and self.num_loops():
            return False
        if not space.allow_multi and self.max_multiplicity() > 1:
            return False
        return True

    def canonical(self):
        """Hashable key identifying the graph (edge multiset)."""
        return tuple(sorted(_pair(u, v) for u, v in self.edges.tolist()))

    def check_invariants(self):
        """Full audit; raises AssertionError on the first broken invariant."""
        assert self.edges.shape == (self.m, 2)
        recount = np.bincount(self.edges.ravel(), minlength=self.n)
        assert np.array_equal(recount, self.degrees), "degree vector changed"
        assert int(self.degrees.sum()) == 2 * self.m, "handshake"
        assert dict(self.edge_multiset()) == self.multiplicities(), "multiplicity table stale"

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def _pair(u, v):
    return (u, v) if u <= v else (v, u)


def check_space(g, space):
    """Raise :class:`SpaceViolationError` if ``g`` lies outside ``space``."""
    if not space.allow_loops and g.num_loops():
        u = int(g.edges[g.edges[:, 0] == g.edges[:, 1]][0, 0])
        raise SpaceViolationError(f"self-loop at vertex {_label(g, u)} not allowed in {space.kind} space")
    if not space.allow_multi:
        for (u, v), w in g.edge_multiset().items():
            if w > 1:
                raise SpaceViolationError(
                    f"edge ({_label(g, u)}, {_label(g, v)}) repeated {w} times; "
                    f"multi-edges not allowed in {space.kind} space")


def _label(g, u):
    return g.labels[u] if g.labels is not None else u


# edge-list text format ------------------------------------------------------

def parse_edge_list(text, space=None, relabel=False):
    """Parse ``"u v"`` lines into a :class:`Graph`.

    Lines starting with ``#`` and blank lines are skipped.  An optional
    first directive ``%n <count>`` fixes the vertex count; otherwise
    ``n = 1 + max id``.  With ``relabel=True`` tokens may be arbitrary
    strings; they are mapped to ``0..n-1`` in order of first appearance
    and kept in ``Graph.labels``.
    """
    n_fixed = None
    pairs = []
    index = {}
    seen_content = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("%"):
            parts = line[1:].split()
            if seen_content or len(parts) != 2 or parts[0] != "n":
                raise ParseError(f"bad directive {line!r}", lineno)
            try:
                n_fixed = int(parts[1])
            except ValueError:
                raise ParseError(f"bad vertex count {parts[1]!r}", lineno) from None
            if n_fixed < 0:
                raise ParseError("vertex count must be non-negative", lineno)
            seen_content = True
            continue
        seen_content = True
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected two vertex ids, got {line!r}", lineno)
        if relabel:
            ids = []
            for tok in parts:
                if tok not in index:
                    index[tok] = len(index)
                ids.append(index[tok])
            pairs.append(ids)
        else:
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(f"non-integer vertex id in {line!r}", lineno) from None
            if u < 0 or v < 0:
                raise ParseError(f"negative vertex id in {line!r}", lineno)
            if n_fixed is not None and max(u, v) >= n_fixed:
                raise ParseError(f"vertex id exceeds %n {n_fixed}", lineno)
            pairs.append((u, v))

    if relabel:
        labels = list(index)
        n = len(labels)
        if n_fixed is not None:
            if n_fixed < n:
                raise ParseError(f"%n {n_fixed} is smaller than the {n} labels seen")
            labels += [f"_isolated{i}" for i in range(n_fixed - n)]
            n = n_fixed
    else:
        labels = None
        n = n_fixed if n_fixed is not None else (1 + max(max(p) for p in pairs) if pairs else 0)
    g = Graph(n, np.array(pairs, dtype=np.int64).reshape(-1, 2), labels=labels)
    if space is not None:
        check_space(g, space)
    return g


def read_edge_list(path, space=None, relabel=False):
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh.read(), space=space, relabel=relabel)


def render_edge_list(g, header=True):
    """Inverse of :func:`parse_edge_list`, restoring original labels."""
    lines = [f"%n {g.n}"] if header else []
    lab = g.labels
    for u, v in g.edges.tolist():
        if lab is not None:
            lines.append(f"{lab[u]} {lab[v]}")
        else:
            lines.append(f"{u} {v}")
    return "\n".join(lines) + "\n"


def write_edge_list(g, path, header=True):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_edge_list(g, header=header))


# degree statistics ------------------------------------------------------------

@dataclass(frozen=True)
class DegreeStats:
    S1: int
    S2: int
    S3: int
    den: int
    rho: float
    omega: float
    kmax: int
    n: int
    m: int

    def as_dict(self):
        return {
            "n": self.n, "m": self.m, "S1": self.S1, "S2": self.S2, "S3": self.S3,
            "den": self.den, "rho": self.rho, "omega": self.omega, "kmax": self.kmax,
        }


def degree_moments(g):
    """Exact integer ``(S1, S2, S3)``: sums of k, k^2 and k^3."""
    k = [int(x) for x in g.degrees]
    return sum(k), sum(x * x for x in k), sum(x * x * x for x in k)


def degree_stats(g, space):
    """Degree moments (exact integers), density and density factor."""
    if g.n < 1:
        raise DensityUndefinedError("graph has no vertices")
    S1, S2, S3 = degree_moments(g)
    mean_k = S1 / g.n
    if space.allow_loops:
        rho = mean_k / g.n
    else:
        if g.n == 1:
            raise DensityUndefinedError("density undefined for n = 1 in a loopless space")
        rho = mean_k / (g.n - 1)
    # beyond rho = 1 (possible only with multi-edges or loops) the rejection
    # probability saturates
    omega = 2 * rho - rho * rho if rho <= 1 else 1.0
    return DegreeStats(S1=S1, S2=S2, S3=S3, den=S1 * S3 - S2 * S2, rho=rho, omega=omega,
                       kmax=int(g.degrees.max()), n=g.n, m=g.m)


# swap primitives ------------------------------------------------------------------

def edge_pair_from_uniforms(m, u0, u1):
    """Map two uniforms to an ordered pair of distinct edge indices."""
    i, j = K.edge_indices(u0, u1, m)
    return int(i), int(j)


def sample_edge_pair(g, rng):
    """Uniformly random pair of distinct edge indices ``(i, j)``."""
    if g.m < 2:
        raise CannotSwapError(f"need at least 2 edges to swap, graph has {g.m}")
    u0, u1 = rng.random(2)
    return edge_pair_from_uniforms(g.m, u0, u1)


@dataclass(frozen=True)
class SwapRecord:
    removed: tuple
    added: tuple
    degrees: tuple  # (k_x, k_y, k_w, k_z) for {(x,y),(w,z)} -> {(x,w),(y,z)}


def swap_endpoints(g, i, j, orientation):
    """Endpoints ``(x, y, w, z)`` such that the swap yields (x,w), (y,z).

    Orientation 0 rewires ``{(x,y),(w,z)} -> {(x,w),(y,z)}`` for stored
    edges ``i = (x,y)`` and ``j = (w,z)``; orientation 1 gives
    ``{(x,z),(w,y)}`` by reversing edge ``i``.
    """
    x, y = int(g.edges[i, 0]), int(g.edges[i, 1])
    w, z = int(g.edges[j, 0]), int(g.edges[j, 1])
    if orientation:
        x, y = y, x
    return x, y, w, z


def apply_swap(g, i, j, orientation):
    """Rewire edges ``i`` and ``j`` in place; the caller checks legality."""
    x, y, w, z = swap_endpoints(g, i, j, orientation)
    g.table()
    g.edges[i] = (x, w)
    g.edges[j] = (y, z)
    g._bump(x, y, -1)
    g._bump(w, z, -1)
    g._bump(x, w, 1)
    g._bump(y, z, 1)
    k = g.degrees
    return SwapRecord(removed=((x, y), (w, z)), added=((x, w), (y, z)),
                      degrees=(int(k[x]), int(k[y]), int(k[w]), int(k[z])))

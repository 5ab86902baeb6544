"""Lattice discretization U_n = U intersect (1/n)Z^2 as a graph.

Vertices are the lattice points inside the open domain; nearest-neighbor
edges are kept only when the whole closed segment stays inside (tested by
17 equally spaced samples).  Vertices isolated by edge deletion are
dropped, and construction fails loudly if the remaining graph is
disconnected (mesh too coarse for the domain).
"""

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from . import domain as dom
from .errors import BlobTouchesBoundary, Disconnected

# adjacency column order: N, E, S, W
_DIRS = np.array([[0, 1], [1, 0], [0, -1], [-1, 0]])
_EDGE_SAMPLES = 17   # points per closed segment, endpoints included


def round_half_away(x):
    """Round to nearest integer, halves away from zero (symmetric tie-break)."""
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


class LatticeGraph:
    """Immutable grid graph; blob index sets are attached once after build."""

    def __init__(self, n: int, vertices: np.ndarray, adjacency: np.ndarray):
        self.n = int(n)
        self.vertices = np.asarray(vertices, dtype=np.int64)
        self.adjacency = np.asarray(adjacency, dtype=np.int64)
        self.degrees = (self.adjacency >= 0).sum(axis=1)
        self.blob1 = None
        self.blob2 = None
        self.blob_anchor1 = None
        self.blob_anchor2 = None
        i, j = self.vertices[:, 0], self.vertices[:, 1]
        self._origin = (int(i.min()) - 1, int(j.min()) - 1)
        shape = (int(i.max()) - self._origin[0] + 2, int(j.max()) - self._origin[1] + 2)
        grid = np.full(shape, -1, dtype=np.int64)
        grid[i - self._origin[0], j - self._origin[1]] = np.arange(len(i))
        self._grid = grid

    @property
    def size(self) -> int:
        return len(self.vertices)

    def points(self) -> np.ndarray:
        """Vertex positions as complex plane coordinates."""
        return (self.vertices[:, 0] + 1j * self.vertices[:, 1]) / self.n

    def index_of(self, ij: np.ndarray) -> np.ndarray:
        """Vertex indices for integer pairs (___, 2); -1 where absent."""
        ij = np.asarray(ij, dtype=np.int64).reshape(-1, 2)
        i = ij[:, 0] - self._origin[0]
        j = ij[:, 1] - self._origin[1]
        ok = (i >= 0) & (i < self._grid.shape[0]) & (j >= 0) & (j < self._grid.shape[1])
        out = np.full(len(ij), -1, dtype=np.int64)
        out[ok] = self._grid[i[ok], j[ok]]
        return out

    @cached_property
    def adj(self) -> sp.csr_matrix:
        """Unweighted symmetric adjacency matrix."""
        rows = np.repeat(np.arange(self.size), 4)
        cols = self.adjacency.ravel()
        keep = cols >= 0
        return sp.csr_matrix(
            (np.ones(keep.sum()), (rows[keep], cols[keep])),
            shape=(self.size, self.size))

    @cached_property
    def jump_matrix(self) -> sp.csr_matrix:
        """Row-stochastic jump-chain matrix P = D^{-1} A."""
        inv_d = 1.0 / self.degrees
        return sp.csr_matrix(self.adj.multiply(inv_d[:, None]))

    @cached_property
    def compact_neighbors(self) -> np.ndarray:
        """(V, 4) array whose first degrees[v] entries are v's neighbors."""
        out = np.full((self.size, 4), -1, dtype=np.int64)
        cnt = np.zeros(self.size, dtype=np.int64)
        for k in range(4):
            col = self.adjacency[:, k]
            m = col >= 0
            out[np.flatnonzero(m), cnt[m]] = col[m]
            cnt[m] += 1
        return out

    def assign_blobs(self, b: dom.BlobSpec) -> None:
        b1, b2, z1, z2 = blob_vertices(self, b)
        self.blob1, self.blob2 = b1, b2
        self.blob_anchor1, self.blob_anchor2 = z1, z2

    def edge_list(self) -> np.ndarray:
        """Edges as index pairs (a, b) with a < b, lexicographically sorted."""
        rows = np.repeat(np.arange(self.size), 4)
        cols = self.adjacency.ravel()
        keep = (cols >= 0) & (rows < cols)
        e = np.stack([rows[keep], cols[keep]], axis=1)
        return e[np.lexsort((e[:, 1], e[:, 0]))]


@dataclass
class ScalarField:
    """One real value per vertex of a bound graph."""

    graph: LatticeGraph
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.graph.size,):
            raise ValueError("field length does not match vertex count")

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


def _check_bound(g: LatticeGraph, f: ScalarField) -> np.ndarray:
    if f.graph is not g:
        raise ValueError("field is bound to a different graph")
    return f.values


def discretize(d: dom.ConformalDomain, n: int) -> LatticeGraph:
    """Build U_n with boundary-crossing edges deleted.

    Raises Disconnected when the kept graph has several components, the
    sign that n is too small for this domain.
    """
    if n < 8:
        raise ValueError("n must be at least 8")
    bnd = d.boundary_cache
    i_lo = int(np.ceil(bnd.real.min() * n))
    i_hi = int(np.floor(bnd.real.max() * n))
    j_lo = int(np.ceil(bnd.imag.min() * n))
    j_hi = int(np.floor(bnd.imag.max() * n))
    ii, jj = np.meshgrid(np.arange(i_lo, i_hi + 1), np.arange(j_lo, j_hi + 1),
                         indexing="ij")
    ii, jj = ii.ravel(), jj.ravel()
    inside = dom.contains_many(d, (ii + 1j * jj) / n)
    verts = np.stack([ii[inside], jj[inside]], axis=1)
    order = np.lexsort((verts[:, 1], verts[:, 0]))
    verts = verts[order]

    tmp = LatticeGraph(n, verts, np.full((len(verts), 4), -1))
    adjacency = np.full((len(verts), 4), -1, dtype=np.int64)
    for k, (di, dj) in ((0, (0, 1)), (1, (1, 0))):   # N and E; S/W mirrored
        nbr = tmp.index_of(verts + np.array([di, dj]))
        cand = np.flatnonzero(nbr >= 0)
        if cand.size:
            # interior samples only: the 2 endpoints are vertices of U_n and
            # satisfy the membership test by construction
            ts = np.arange(1, _EDGE_SAMPLES - 1) / (_EDGE_SAMPLES - 1)
            base = (verts[cand, 0] + 1j * verts[cand, 1]) / n
            step = (di + 1j * dj) / n
            pts = base[None, :] + ts[:, None] * step
            ok = dom.contains_many(d, pts.ravel()).reshape(pts.shape).all(axis=0)
            src = cand[ok]
            dst = nbr[src]
            adjacency[src, k] = dst
            adjacency[dst, k + 2] = src

    deg = (adjacency >= 0).sum(axis=1)
    keep = deg > 0
    if not keep.all():
        remap = np.full(len(verts), -1, dtype=np.int64)
        remap[keep] = np.arange(keep.sum())
        verts = verts[keep]
        adjacency = adjacency[keep]
        pos = adjacency >= 0
        adjacency[pos] = remap[adjacency[pos]]
    g = LatticeGraph(n, verts, adjacency)
    ncomp, _ = connected_components(g.adj, directed=False)
    if ncomp != 1:
        raise Disconnected(f"graph has {ncomp} components at n = {n}")
    return g


def blob_vertices(g: LatticeGraph, b: dom.BlobSpec):
    """Blob index sets and lattice anchors.

    z_{i,n} is the nearest lattice point to y_i (halves rounded away from
    zero, per coordinate); the blob is the strict lattice ball
    {v : d(v, z_{i,n}) < delta/4}, so both blobs share one offset stencil
    and have equal cardinality whenever they are interior.
    """
    n = g.n
    rad = b.radius * n
    k = int(np.floor(rad))
    di, dj = np.meshgrid(np.arange(-k, k + 1), np.arange(-k, k + 1), indexing="ij")
    offs = np.stack([di.ravel(), dj.ravel()], axis=1)
    offs = offs[(offs ** 2).sum(axis=1) < rad * rad]
    sets, anchors = [], []
    for y in b.centers:
        z = np.array([round_half_away(y.real * n), round_half_away(y.imag * n)],
                     dtype=np.int64)
        idx = g.index_of(z[None, :] + offs)
        if (idx < 0).any() or (g.degrees[idx] < 4).any():
            raise BlobTouchesBoundary(
                f"blob at {y:.4g} has missing or boundary vertices at n = {n}")
        sets.append(np.sort(idx))
        anchors.append((int(z[0]), int(z[1])))
    return sets[0], sets[1], anchors[0], anchors[1]


def stationary_measure(g: LatticeGraph) -> ScalarField:
    """pi(z) = d_z / sum of degrees."""
    return ScalarField(g, g.degrees / g.degrees.sum())


def apply_laplacian(g: LatticeGraph, f: ScalarField) -> ScalarField:
    """(Delta f)(x) = f(x) - mean of f over the neighbors of x."""
    v = _check_bound(g, f)
    return ScalarField(g, v - (g.adj @ v) / g.degrees)


def _diagonal_pairs(g: LatticeGraph) -> np.ndarray:
    """Diagonals of unit squares whose 4 corners and 4 sides are in U_n."""
    a = g.adjacency
    has_n = a[:, 0] >= 0
    has_e = a[:, 1] >= 0
    v = np.flatnonzero(has_n & has_e)
    nn, ee = a[v, 0], a[v, 1]
    full = (a[nn, 1] >= 0) & (a[ee, 0] >= 0)
    v, nn, ee = v[full], nn[full], ee[full]
    corner = a[nn, 1]            # (i+1, j+1), equals a[ee, 0]
    return np.concatenate([np.stack([v, corner], axis=1),
                           np.stack([nn, ee], axis=1)])


def star_components(g: LatticeGraph, s) -> list:
    """Connected components of S in the diagonal-augmented graph U_n*."""
    s = np.asarray(sorted(set(np.asarray(s, dtype=np.int64).tolist())), dtype=np.int64)
    if s.size == 0:
        return []
    local = np.full(g.size, -1, dtype=np.int64)
    local[s] = np.arange(s.size)
    rows, cols = [], []
    e = g.edge_list()
    m = (local[e[:, 0]] >= 0) & (local[e[:, 1]] >= 0)
    rows.append(local[e[m, 0]])
    cols.append(local[e[m, 1]])
    dg = _diagonal_pairs(g)
    if dg.size:
        m = (local[dg[:, 0]] >= 0) & (local[dg[:, 1]] >= 0)
        rows.append(local[dg[m, 0]])
        cols.append(local[dg[m, 1]])
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    a = sp.csr_matrix((np.ones(r.size), (r, c)), shape=(s.size, s.size))
    ncomp, label = connected_components(a, directed=False)
    return [np.sort(s[label == k]) for k in range(ncomp)]


def graph_json(g: LatticeGraph) -> str:
    """JSON export for debugging and cross-implementation diffing."""
    payload = {
        "n": g.n,
        "vertices": g.vertices.tolist(),
        "edges": g.edge_list().tolist(),
        "blob1": [] if g.blob1 is None else np.asarray(g.blob1).tolist(),
        "blob2": [] if g.blob2 is None else np.asarray(g.blob2).tolist(),
    }
    return json.dumps(payload)

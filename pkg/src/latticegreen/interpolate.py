"""Extension of lattice fields to the plane and sup-norm comparison.

The extension follows the three-stage scheme: vertex values (zero outside
U_n), linear interpolation along lattice edges, and on each face the
harmonic extension of the edge data.  With piecewise-linear edge data the
face-harmonic extension is exactly the bilinear interpolant of the four
corner values: it is harmonic (both pure second partials vanish) and
restricts to the linear data on the edges, so uniqueness of the Dirichlet
solution on the face identifies the two.
"""

import numpy as np

from . import domain as dom
from .lattice import LatticeGraph, ScalarField


class ExtendedField:
    """Bilinear evaluator of a lattice field on the whole plane."""

    def __init__(self, field: ScalarField):
        g = field.graph
        self.graph = g
        i, j = g.vertices[:, 0], g.vertices[:, 1]
        self._i0 = int(i.min()) - 2
        self._j0 = int(j.min()) - 2
        shape = (int(i.max()) - self._i0 + 4, int(j.max()) - self._j0 + 4)
        vals = np.zeros(shape)
        vals[i - self._i0, j - self._j0] = field.values
        present = np.zeros(shape, dtype=bool)
        present[i - self._i0, j - self._j0] = True
        self._vals = vals
        self._present = present

    def _face(self, z):
        z = np.asarray(z, dtype=complex)
        s = z.real * self.graph.n - self._i0
        t = z.imag * self.graph.n - self._j0
        ic = np.clip(np.floor(s), 0, self._vals.shape[0] - 2).astype(np.int64)
        jc = np.clip(np.floor(t), 0, self._vals.shape[1] - 2).astype(np.int64)
        return ic, jc, s - ic, t - jc

    def __call__(self, z):
        """Extended value at plane points; zero at and beyond the zero ring."""
        scalar = np.isscalar(z) or np.asarray(z).ndim == 0
        ic, jc, u, v = self._face(np.atleast_1d(z))
        f = self._vals
        out = ((1 - u) * (1 - v) * f[ic, jc] + u * (1 - v) * f[ic + 1, jc]
               + (1 - u) * v * f[ic, jc + 1] + u * v * f[ic + 1, jc + 1])
        return float(out[0]) if scalar else out

    def corners_inside(self, z) -> np.ndarray:
        """How many corners of the containing face are vertices of U_n."""
        ic, jc, _, _ = self._face(np.atleast_1d(z))
        p = self._present
        return (p[ic, jc].astype(np.int64) + p[ic + 1, jc] + p[ic, jc + 1]
                + p[ic + 1, jc + 1])


def extend(g: LatticeGraph, f: ScalarField) -> ExtendedField:
    if f.graph is not g:
        raise ValueError("field is bound to a different graph")
    return ExtendedField(f)


def disc_polar_grid(m: int) -> np.ndarray:
    """Uniform polar sample grid of the closed disc: m radii x m angles."""
    r = np.arange(1, m + 1) / m
    th = 2.0 * np.pi * np.arange(m) / m
    return (r[:, None] * np.exp(1j * th)[None, :]).ravel()


def sample_points(a: ExtendedField, d: dom.ConformalDomain, sample_grid: int):
    """Comparison set: all lattice vertices plus the pulled-back polar grid.

    Grid points whose containing face has all four corners outside U_n are
    dropped; there the extension is identically zero and carries no
    information about the lattice field.  Vertices are always kept.
    """
    verts = a.graph.points()
    grid = dom.phi(d, disc_polar_grid(sample_grid))
    keep = a.corners_inside(grid) > 0
    return np.concatenate([verts, grid[keep]])


def sup_diff(a: ExtendedField, d: dom.ConformalDomain, reference,
             sample_grid: int) -> float:
    """max |a(z) - reference(z)| over the comparison set."""
    pts = sample_points(a, d, sample_grid)
    ref = np.asarray(reference(pts), dtype=float)
    return float(np.max(np.abs(a(pts) - ref)))

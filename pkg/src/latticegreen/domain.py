"""Planar domains given by univalent polynomial maps of the closed unit disc.

A domain U is the image of the closed unit disc under a polynomial

    phi(zeta) = a_1 zeta + a_2 zeta^2 + ... + a_K zeta^K        (phi(0) = 0)

whose coefficients satisfy the classical sufficient injectivity condition
sum_{k>=2} k |a_k| < |a_1|.  That certificate keeps phi' bounded away from
zero on the closed disc, so the boundary is analytic and the inverse map
psi exists on the closure of U.  The two boundary anchors are the images of
-i and +i.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BlobPlacementFailed, InversionDiverged, UnivalenceViolation

_BOUNDARY_GRID = 1 << 12     # samples of phi on |zeta| = 1 for distance bounds
_NEWTON_MAXITER = 60
_NEWTON_BOX = 1.25           # iterates are kept inside this radius


def _polyval(coeffs: np.ndarray, zeta):
    """phi(zeta) for coefficient vector (a_1 .. a_K)."""
    acc = np.zeros_like(zeta, dtype=complex)
    for a in coeffs[::-1]:
        acc = acc * zeta + a
    return acc * zeta


def _polyder(coeffs: np.ndarray, zeta):
    """phi'(zeta)."""
    acc = np.zeros_like(zeta, dtype=complex)
    k = len(coeffs)
    for a in coeffs[::-1]:
        acc = acc * zeta + k * a
        k -= 1
    return acc


@dataclass(frozen=True)
class ConformalDomain:
    """Univalent polynomial image of the closed unit disc.

    coeffs        -- (a_1, ..., a_K), phi(zeta) = sum a_k zeta^k
    deriv_bounds  -- certified (m, M) with 0 < m <= |phi'| <= M on the disc
    inversion_tol -- absolute plane-distance tolerance of the inverse map
    """

    coeffs: np.ndarray
    deriv_bounds: tuple
    inversion_tol: float
    boundary_cache: np.ndarray   # phi(e^{i theta}) on a uniform theta grid

    @property
    def anchor1(self) -> complex:
        """First boundary anchor x_1 = phi(-i)."""
        return complex(_polyval(self.coeffs, np.complex128(-1j)))

    @property
    def anchor2(self) -> complex:
        """Second boundary anchor x_2 = phi(+i)."""
        return complex(_polyval(self.coeffs, np.complex128(1j)))

    @property
    def outer_radius(self) -> float:
        return float(np.abs(self.boundary_cache).max())


def build_domain(coeffs: Sequence[complex], inversion_tol: float = 1e-9) -> ConformalDomain:
    """Construct a domain, verifying the univalence certificate.

    Raises UnivalenceViolation when sum_{k>=2} k|a_k| >= |a_1|.  The
    derivative bounds come from a dense boundary sample of |phi'| widened by
    the Lipschitz correction L2 * grid spacing, with L2 = sum k(k-1)|a_k|
    an upper bound for |phi''| on the closed disc; the certificate gap is a
    second, independent lower bound for |phi'|.
    """
    c = np.asarray(coeffs, dtype=complex)
    if c.ndim != 1 or c.size == 0:
        raise ValueError("coeffs must be a nonempty 1-d sequence")
    k = np.arange(1, c.size + 1)
    tail = float(np.sum(k[1:] * np.abs(c[1:])))
    gap = float(np.abs(c[0])) - tail
    if gap <= 0.0:
        raise UnivalenceViolation(
            f"sum k|a_k| (k>=2) = {tail:.6g} >= |a_1| = {abs(c[0]):.6g}")
    theta = 2.0 * np.pi * np.arange(_BOUNDARY_GRID) / _BOUNDARY_GRID
    ring = np.exp(1j * theta)
    dvals = np.abs(_polyder(c, ring))
    lip2 = float(np.sum(k[1:] * (k[1:] - 1) * np.abs(c[1:])))
    corr = lip2 * (2.0 * np.pi / _BOUNDARY_GRID)
    m = max(float(dvals.min()) - corr, gap)
    big = float(dvals.max()) + corr
    return ConformalDomain(
        coeffs=c,
        deriv_bounds=(m, big),
        inversion_tol=float(inversion_tol),
        boundary_cache=_polyval(c, ring),
    )


def phi(d: ConformalDomain, zeta):
    """Evaluate the map; accepts scalars or arrays, |zeta| <= 1 + tolerance."""
    z = np.asarray(zeta, dtype=complex)
    out = _polyval(d.coeffs, z)
    return complex(out) if np.isscalar(zeta) or z.ndim == 0 else out


def dphi(d: ConformalDomain, zeta):
    """Evaluate phi'."""
    z = np.asarray(zeta, dtype=complex)
    out = _polyder(d.coeffs, z)
    return complex(out) if np.isscalar(zeta) or z.ndim == 0 else out


def _newton(d: ConformalDomain, z: np.ndarray, zeta: np.ndarray, maxiter: int):
    """Damped Newton on phi(zeta) - z = 0; iterates confined to a box."""
    tol = d.inversion_tol
    for _ in range(maxiter):
        f = _polyval(d.coeffs, zeta) - z
        done = np.abs(f) <= tol
        if done.all():
            break
        fp = _polyder(d.coeffs, zeta)
        fp = np.where(np.abs(fp) < 1e-14, 1e-14, fp)
        step = f / fp
        cand = zeta - step
        for _ in range(4):
            bad = np.abs(cand) > _NEWTON_BOX
            if not bad.any():
                break
            step = np.where(bad, 0.5 * step, step)
            cand = zeta - step
        r = np.abs(cand)
        far = r > _NEWTON_BOX
        if far.any():
            cand = np.where(far, cand * (_NEWTON_BOX / np.where(far, r, 1.0)), cand)
        zeta = np.where(done, zeta, cand)
    ok = np.abs(_polyval(d.coeffs, zeta) - z) <= tol
    return zeta, ok


def _grid_reseed(d: ConformalDomain, z: np.ndarray):
    """Best seed from a coarse polar grid of the closed disc."""
    rr = np.linspace(0.05, 1.0, 24)
    tt = 2.0 * np.pi * np.arange(48) / 48
    grid = (rr[:, None] * np.exp(1j * tt)[None, :]).ravel()
    vals = _polyval(d.coeffs, grid)
    seeds = np.empty(z.shape, dtype=complex)
    chunk = 2048
    for lo in range(0, z.size, chunk):
        zz = z[lo:lo + chunk]
        idx = np.argmin(np.abs(vals[None, :] - zz[:, None]), axis=1)
        seeds[lo:lo + chunk] = grid[idx]
    return seeds


def invert_many(d: ConformalDomain, z) -> tuple:
    """Vectorized inverse: returns (zeta, converged mask).

    Newton is seeded at z / a_1; points that fail get one re-seed from a
    coarse grid search over the closed disc.  No exception is raised here;
    callers decide how to treat unconverged points.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    seed = z / d.coeffs[0]
    r = np.abs(seed)
    wild = r > _NEWTON_BOX
    if wild.any():
        seed = np.where(wild, seed * (_NEWTON_BOX / np.where(wild, r, 1.0)), seed)
    zeta, ok = _newton(d, z, seed, _NEWTON_MAXITER)
    if not ok.all():
        bad = ~ok
        reseed = _grid_reseed(d, z[bad])
        zb, okb = _newton(d, z[bad], reseed, _NEWTON_MAXITER)
        zeta = zeta.copy()
        zeta[bad] = zb
        ok = ok.copy()
        ok[bad] = okb
    return zeta, ok


def psi(d: ConformalDomain, z):
    """Numeric inverse of phi on the closure of U.

    Raises InversionDiverged if any requested point admits no root within
    the iteration budget (z outside the domain, or ill conditioning).
    """
    scalar = np.isscalar(z) or np.asarray(z).ndim == 0
    zeta, ok = invert_many(d, z)
    if not ok.all():
        n_bad = int((~ok).sum())
        raise InversionDiverged(f"no root within tolerance for {n_bad} point(s)")
    return complex(zeta[0]) if scalar else zeta


def contains_many(d: ConformalDomain, z) -> np.ndarray:
    """Vectorized open-domain membership test.

    True iff the inverse converges and |psi(z)| < 1 - inversion_tol / m,
    the map tolerance converted to disc units by the lower derivative
    bound.  Unconverged points count as outside.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.zeros(z.shape, dtype=bool)
    near = np.abs(z) <= d.outer_radius + 1.0
    if near.any():
        zeta, ok = invert_many(d, z[near])
        margin = d.inversion_tol / d.deriv_bounds[0]
        out[near] = ok & (np.abs(zeta) < 1.0 - margin)
    return out


def contains(d: ConformalDomain, z) -> bool:
    return bool(contains_many(d, z)[0])


def boundary_distance(d: ConformalDomain, z) -> np.ndarray:
    """Certified lower bound on the distance from z to the boundary of U.

    Minimum over the cached boundary samples minus the Lipschitz travel
    M * (2 pi / grid size) of the curve between samples.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    bnd = d.boundary_cache
    corr = d.deriv_bounds[1] * (2.0 * np.pi / bnd.size)
    out = np.empty(z.shape, dtype=float)
    chunk = 512
    for lo in range(0, z.size, chunk):
        zz = z[lo:lo + chunk]
        out[lo:lo + chunk] = np.abs(zz[:, None] - bnd[None, :]).min(axis=1)
    return out - corr


@dataclass(frozen=True)
class BlobSpec:
    """Two source discs ('blobs') of radius delta/4 near the anchors."""

    delta: float
    centers: tuple        # (y_1, y_2)
    radius: float         # delta / 4

    def center_array(self) -> np.ndarray:
        return np.asarray(self.centers, dtype=complex)


def inward_normal(d: ConformalDomain, which: int) -> complex:
    """Unit inward normal of U at anchor `which` (1 or 2).

    The inward radial direction at zeta_0 = -i (resp. +i) is -zeta_0; its
    image direction under phi is phi'(zeta_0) * (-zeta_0).
    """
    zeta0 = -1j if which == 1 else 1j
    v = dphi(d, zeta0) * (-zeta0)
    return v / abs(v)


def select_blob_centers(d: ConformalDomain, delta: float) -> BlobSpec:
    """Place y_i at distance delta from x_i along the inward normal.

    Verifies, with the certified boundary-distance bound, that both centers
    are interior with clearance > delta/2 and that the two radius-delta/4
    discs are disjoint and inside U.  Raises BlobPlacementFailed otherwise
    (the signal that delta is too large for this domain).
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    anchors = (d.anchor1, d.anchor2)
    centers = tuple(anchors[i] + delta * inward_normal(d, i + 1) for i in range(2))
    y = np.asarray(centers)
    if not contains_many(d, y).all():
        raise BlobPlacementFailed("a blob center landed outside the domain")
    clearance = boundary_distance(d, y)
    if not (clearance > delta / 2.0).all():
        raise BlobPlacementFailed(
            f"boundary clearance {clearance.min():.4g} <= delta/2 = {delta / 2:.4g}")
    if abs(centers[0] - centers[1]) <= delta / 2.0:
        raise BlobPlacementFailed("blobs are not disjoint")
    return BlobSpec(delta=float(delta), centers=centers, radius=delta / 4.0)


PRESETS = {
    "disc": [1.0 + 0.0j],
    "bean": [1.0 + 0.0j, 0.2 + 0.0j],
}


def preset_domain(name: str, inversion_tol: float = 1e-9) -> ConformalDomain:
    return build_domain(PRESETS[name], inversion_tol=inversion_tol)

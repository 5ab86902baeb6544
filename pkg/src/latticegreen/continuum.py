"""Closed-form continuum limit G* evaluated by blob quadrature.

G* at z with disc preimage y = psi(z) is

    G*(z) = (1/pi) * integral over the unit disc of
            (f~ o phi)(zeta) |phi'(zeta)|^2 log(|(zeta - y)(1 - conj(zeta) y)|^2)

with f~ = (16/area(U_1)) (1(U_2) - 1(U_1)).  Since |phi'|^2 is the
Jacobian of phi, substituting zeta = psi(w) turns each blob-image integral
into an unweighted integral over the physical blob disc:

    G*(z) = 16 / (pi area(U_1)) * [ I(U_2, z) - I(U_1, z) ],
    I(U_i, z) = integral over U_i of log(|(psi(w) - y)(1 - conj(psi(w)) y)|^2) dA(w),

a disc with known center and radius, handled by tensor Gauss-Legendre in
polar coordinates about the center.  When z sits in or near a blob the
integral is taken in polar coordinates about z itself and the logarithmic
part 2 log r is integrated in closed form, leaving a smooth integrand.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

from . import domain as dom
from .errors import QuadratureUnconverged


@dataclass(frozen=True)
class QuadratureSpec:
    radial_points: int = 64
    angular_points: int = 128
    singular_split_radius: float = 0.5   # fraction of the blob radius

    def __post_init__(self):
        if self.radial_points <= 0 or self.angular_points <= 0:
            raise ValueError("quadrature orders must be positive")
        if not 0.0 < self.singular_split_radius < 1.0:
            raise ValueError("singular_split_radius must lie in (0, 1)")


def f_tilde_coefficient(b: dom.BlobSpec) -> float:
    """16 / area(U_1) = 16 / (pi (delta/4)^2)."""
    return 16.0 / (np.pi * b.radius ** 2)


def _abs2(z):
    return z.real ** 2 + z.imag ** 2


class GStarEvaluator:
    """Vectorized G* on the closure of U for a fixed (domain, blobs, rule)."""

    def __init__(self, d: dom.ConformalDomain, b: dom.BlobSpec,
                 q: QuadratureSpec = QuadratureSpec()):
        self.d, self.b, self.q = d, b, q
        rho = b.radius
        xr, wr = roots_legendre(q.radial_points)
        xa, wa = roots_legendre(q.angular_points)
        self._xr, self._wr, self._xa, self._wa = xr, wr, xa, wa
        r = 0.5 * rho * (xr + 1.0)
        rw = 0.5 * rho * wr
        al = np.pi * (xa + 1.0)
        aw = np.pi * wa
        self._blobs = []
        for y in b.centers:
            nodes = y + r[:, None] * np.exp(1j * al)[None, :]
            wts = (rw * r)[:, None] * aw[None, :]
            zeta = dom.psi(d, nodes.ravel())
            self._blobs.append((y, zeta, wts.ravel()))
        # prefactor 16/(pi * area), area = pi rho^2
        self.coef = 16.0 / (np.pi ** 2 * rho ** 2)
        self.trigger = rho * (1.0 + 2.0 * q.singular_split_radius)

    def __call__(self, z):
        scalar = np.isscalar(z) or np.asarray(z).ndim == 0
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        y = dom.psi(self.d, z)
        out = np.zeros(z.shape)
        for sgn, (center, zeta, wts) in zip((-1.0, 1.0), self._blobs):
            dist = np.abs(z - center)
            far = dist > self.trigger
            if far.any():
                out[far] += sgn * self.coef * self._far(zeta, wts, y[far])
            for k in np.flatnonzero(~far):
                out[k] += sgn * self.coef * self._near(center, z[k], y[k])
        return float(out[0]) if scalar else out

    def _far(self, zeta, wts, y):
        """I(U_i, .) for points away from the blob: fixed-node rule."""
        out = np.empty(y.shape)
        chunk = max(1, 4_000_000 // zeta.size)
        for lo in range(0, y.size, chunk):
            yy = y[lo:lo + chunk, None]
            prod = (zeta[None, :] - yy) * (1.0 - np.conj(zeta)[None, :] * yy)
            out[lo:lo + chunk] = np.log(_abs2(prod)) @ wts
        return out

    def _near(self, center, z, y):
        """I(U_i, z) for z in or near the blob, polar about z.

        The radial interval [R1(alpha), R2(alpha)] is the chord of the blob
        circle along each ray; the log singularity at r = 0 is split off as
        2 log r whose primitive r^2 log r - r^2/2 is exact, and the
        remaining integrand 2 log(|psi(w) - y| / r) + 2 log|1 - conj(psi(w)) y|
        is smooth through w = z.
        """
        rho = self.b.radius
        qc = z - center
        aq = abs(qc)
        if aq <= rho * (1.0 + 1e-12):          # inside or on the blob circle
            alpha = np.pi * (self._xa + 1.0)
            aw = np.pi * self._wa
            ca = (np.conj(qc) * np.exp(1j * alpha)).real
            disc = np.maximum(ca ** 2 + rho ** 2 - aq ** 2, 0.0)
            r1 = np.zeros_like(alpha)
            r2 = np.maximum(-ca + np.sqrt(disc), 0.0)
        else:                                   # exterior: cone toward the blob
            beta = np.arcsin(min(rho / aq, 1.0))
            # sine substitution: the chord width vanishes like sqrt at the
            # cone edges; alpha = a0 + beta sin(pi t / 2) restores smoothness
            alpha = np.angle(-qc) + beta * np.sin(0.5 * np.pi * self._xa)
            aw = beta * 0.5 * np.pi * np.cos(0.5 * np.pi * self._xa) * self._wa
            ca = (np.conj(qc) * np.exp(1j * alpha)).real
            disc = np.maximum(ca ** 2 - (aq ** 2 - rho ** 2), 0.0)
            root = np.sqrt(disc)
            r1 = -ca - root
            r2 = -ca + root
        width = r2 - r1
        live = width > 1e-14
        r = r1[None, :] + 0.5 * width[None, :] * (self._xr[:, None] + 1.0)
        r = np.where(live[None, :], r, 1.0)     # keep logs finite on dead rays
        rw = 0.5 * width[None, :] * self._wr[:, None]
        w = z + r * np.exp(1j * alpha)[None, :]
        zeta = dom.psi(self.d, w.ravel()).reshape(w.shape)
        smooth = (2.0 * np.log(np.abs(zeta - y) / r)
                  + np.log(_abs2(1.0 - np.conj(zeta) * y)))
        ray = np.where(live, (rw * r * smooth).sum(axis=0), 0.0)

        def prim(rr):
            return np.where(rr > 0.0, rr * rr * (np.log(np.maximum(rr, 1e-300)) - 0.5), 0.0)

        return float(aw @ (ray + prim(r2) - prim(r1)))


def gstar(d: dom.ConformalDomain, b: dom.BlobSpec, z,
          q: QuadratureSpec = QuadratureSpec(), check: bool = False):
    """Evaluate G* at z (scalar or array of points in the closure of U).

    With check=True the radial order is doubled and QuadratureUnconverged
    is raised if any value moves by more than 1e-6.
    """
    ev = GStarEvaluator(d, b, q)
    out = ev(z)
    if check:
        q2 = QuadratureSpec(2 * q.radial_points, q.angular_points,
                            q.singular_split_radius)
        out2 = GStarEvaluator(d, b, q2)(z)
        drift = np.max(np.abs(np.atleast_1d(out) - np.atleast_1d(out2)))
        if drift > 1e-6:
            raise QuadratureUnconverged(f"radial refinement moved G* by {drift:.3e}")
    return out


def interior_probes(d: dom.ConformalDomain, b: dom.BlobSpec, count: int,
                    seed: int = 0, blob_margin: float = None,
                    boundary_margin: float = 0.01) -> np.ndarray:
    """Sample interior points away from the blob circles.

    Rejection sampling on the disc preimage; points closer than blob_margin
    (default delta/8) to either blob circle, or within boundary_margin of
    the domain boundary, are discarded.
    """
    if blob_margin is None:
        blob_margin = b.delta / 8.0
    rng = np.random.default_rng(seed)
    out = []
    need = count
    while need > 0:
        zeta = (rng.random(4 * need + 16) * np.exp(2j * np.pi * rng.random(4 * need + 16)))
        z = dom.phi(d, zeta)
        ok = dom.boundary_distance(d, z) > boundary_margin
        for y in b.centers:
            ok &= np.abs(np.abs(z - y) - b.radius) > blob_margin
        z = z[ok][:need]
        out.append(z)
        need -= z.size
    return np.concatenate(out)


def laplacian_residual_check(d: dom.ConformalDomain, b: dom.BlobSpec,
                             q: QuadratureSpec = QuadratureSpec(),
                             probes: int = 20, h: float = 1e-3,
                             seed: int = 0) -> float:
    """Max 5-point-stencil residual |Delta G* - (4/area)(1(U_2) - 1(U_1))|.

    Probes are interior points at distance > delta/8 from both blob
    circles, so the stencil never straddles a source discontinuity.
    """
    z = interior_probes(d, b, probes, seed=seed, boundary_margin=4 * h)
    ev = GStarEvaluator(d, b, q)
    stencil = np.concatenate([z, z + h, z - h, z + 1j * h, z - 1j * h])
    vals = ev(stencil).reshape(5, z.size)
    lap = (vals[1] + vals[2] + vals[3] + vals[4] - 4.0 * vals[0]) / h ** 2
    target = np.zeros(z.size)
    coef = 4.0 / (np.pi * b.radius ** 2)
    target -= coef * (np.abs(z - b.centers[0]) < b.radius)
    target += coef * (np.abs(z - b.centers[1]) < b.radius)
    return float(np.max(np.abs(lap - target)))


def boundary_average_gstar(d: dom.ConformalDomain, b: dom.BlobSpec,
                           q: QuadratureSpec = QuadratureSpec(),
                           samples: int = 1024) -> float:
    """Trapezoid average of G* over phi of the unit circle (should be ~0)."""
    theta = 2.0 * np.pi * np.arange(samples) / samples
    ring = dom.phi(d, np.exp(1j * theta))
    return float(np.mean(GStarEvaluator(d, b, q)(ring)))

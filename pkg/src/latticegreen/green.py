"""Discrete Green function of the reflecting random walk on U_n.

The solved object is the occupation-time difference

    H(x) = (2 n^2 / |U_{1,n}|) * integral_0^inf
           [P_x(X_t in U_{1,n}) - P_x(X_t in U_{2,n})] dt,

the unique solution of Delta H = source with pi-weighted mean zero (the
integral has pi-mean zero because pi(U_{1,n}) = pi(U_{2,n}) at every time).
It is computed by conjugate gradient on the symmetrized system
(D - A) H = D g; the direct time-integral survives as an independent
Monte Carlo estimator.  The boundary normalization subtracts the average
of the extended field over the image of the unit circle.
"""

import time
from dataclasses import asdict, dataclass

import numpy as np

from . import domain as dom
from ._solvers import pcg
from .errors import SolverStalled
from .interpolate import extend
from .lattice import LatticeGraph, ScalarField, stationary_measure

MC_DEFAULT_HORIZON = 5.0   # walk time units; mixing decay makes the tail bias negligible


@dataclass
class SolveReport:
    iterations: int
    residual_norm: float
    wall_time: float

    def to_json_dict(self):
        return asdict(self)


def _require_blobs(g: LatticeGraph):
    if g.blob1 is None or g.blob2 is None:
        raise ValueError("graph has no blob sets assigned")
    if len(g.blob1) != len(g.blob2):
        raise ValueError("blob cardinalities differ")


def source_field(g: LatticeGraph) -> ScalarField:
    """g(x) = (1/|U_{1,n}|) (1(x in U_{1,n}) - 1(x in U_{2,n}))."""
    _require_blobs(g)
    v = np.zeros(g.size)
    v[g.blob1] = 1.0 / len(g.blob1)
    v[g.blob2] = -1.0 / len(g.blob1)
    return ScalarField(g, v)


def solvability_defect(g: LatticeGraph) -> float:
    """sum_x d_x g(x), evaluated exactly via integer degree sums.

    All blob vertices have degree 4 and the cardinalities match, so the
    defect is (sum of degrees over blob1 - over blob2) / |U_{1,n}| with an
    integer numerator; it vanishes identically for valid blob sets.
    """
    _require_blobs(g)
    num = int(g.degrees[g.blob1].sum()) - int(g.degrees[g.blob2].sum())
    return num / len(g.blob1)


def solve_green_raw(g: LatticeGraph, tol: float = 1e-10):
    """Solve Delta H = source with pi-mean zero.

    Returns (H, SolveReport).  The residual norm reported is the max-norm
    of Delta H - source after the mean projection (which leaves it
    unchanged, the Laplacian annihilating constants).
    """
    _require_blobs(g)
    if solvability_defect(g) != 0.0:
        raise ValueError("source field is not solvable: degree sums differ")
    t0 = time.perf_counter()
    src = source_field(g).values
    deg = g.degrees.astype(float)
    b = deg * src
    adj = g.adj

    def matvec(x):
        return deg * x - adj @ x

    x, iters, achieved, ok = pcg(matvec, deg, b, tol, maxiter=10 * g.size)
    if not ok:
        raise SolverStalled(
            f"green solve reached {achieved:.3e} > tol {tol:.3e} after {iters} iterations")
    pi = stationary_measure(g).values
    x = x - float(pi @ x)
    resid = float(np.max(np.abs(x - (adj @ x) / deg - src)))
    return ScalarField(g, x), SolveReport(iters, resid, time.perf_counter() - t0)


def occupation_time_mc(g: LatticeGraph, x: int, horizon: float = MC_DEFAULT_HORIZON,
                       trials: int = 10000, seed: int = 0,
                       batch_size: int = 20000):
    """Monte Carlo estimate of H(x) from the time-integral definition.

    Simulates the continuous-time walk (uniform jump chain, exponential
    holding times of rate 2 n^2), accumulating the signed time spent in the
    blobs up to the horizon.  Trials run in lockstep batches; batch b draws
    from the stream seeded by (seed, b) and the reduction is an ordered
    sum, so the result is reproducible given (seed, trials, batch_size).
    Returns (estimate, stderr).
    """
    _require_blobs(g)
    lam = 2.0 * g.n * g.n
    sign = np.zeros(g.size)
    sign[g.blob1] = 1.0
    sign[g.blob2] = -1.0
    cn = g.compact_neighbors
    deg = g.degrees
    scale = lam / len(g.blob1)
    chunks = []
    start = 0
    batch_index = 0
    while start < trials:
        size = min(batch_size, trials - start)
        rng = np.random.default_rng([seed, batch_index])
        pos = np.full(size, x, dtype=np.int64)
        rem = np.full(size, float(horizon))
        acc = np.zeros(size)
        while True:
            tau = rng.standard_exponential(size) / lam
            acc += np.minimum(tau, np.maximum(rem, 0.0)) * sign[pos]
            rem -= tau
            if not (rem > 0.0).any():
                break
            k = (rng.random(size) * deg[pos]).astype(np.int64)
            pos = cn[pos, k]
        chunks.append(acc * scale)
        start += size
        batch_index += 1
    est = np.concatenate(chunks)
    stderr = float(est.std(ddof=1) / np.sqrt(trials)) if trials > 1 else float("inf")
    return float(est.mean()), stderr


def boundary_average(d: dom.ConformalDomain, g: LatticeGraph, h: ScalarField,
                     boundary_samples: int = 4096) -> float:
    """Trapezoid average of the extended field over phi of the unit circle."""
    theta = 2.0 * np.pi * np.arange(boundary_samples) / boundary_samples
    ring = dom.phi(d, np.exp(1j * theta))
    return float(np.mean(extend(g, h)(ring)))


def normalize(d: dom.ConformalDomain, g: LatticeGraph, h: ScalarField,
              boundary_samples: int = 4096):
    """Subtract the boundary-circle average: G_n = H - c_hat.

    The continuum limit has zero boundary average in phi-coordinates (the
    log kernel averages to zero on the circle), so the same average of the
    extended discrete field is the matching normalization constant.
    Returns (field, c_hat).
    """
    c_hat = boundary_average(d, g, h, boundary_samples)
    return ScalarField(g, h.values - c_hat), c_hat

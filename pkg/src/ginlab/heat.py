"""Heat-flow characterization of the signed eigenvalue density.

The one-dimensional kernel used throughout is

    heat_kernel(t, x) = (pi t / 2)**-0.5 * exp(-2 x^2 / t),

a normalized Gaussian of variance t/4 solving (d/dt - (1/8) d^2/dx^2) g = 0.
The time-t signed density is a Pfaffian of its derivative at doubled time,

    signed_density_t(x, t) = (C_k / k!) * Pf[ d/dx_i heat_kernel(2t, x_i - x_j) ],

which solves the flat heat equation (d/dt - (1/8) Laplacian) u = 0 in the k
position variables and collapses, as t -> 0+, onto derivatives of delta
functions on the pair diagonals.  Finite differences certify the PDE at a
measured order of accuracy; quadrature against test functions certifies the
initial condition as a distributional pairing.

Also here: Gaussian solutions built from orthogonal projectors, including
the projector (on Hermitian matrices, inner product Tr AB) induced by a
skew-symmetric unitary, whose rank (k^2 + k)/2 produces the t-prefactor of
the matrix integral's heat flow.
"""

import math
from dataclasses import dataclass

import numpy as np

from .kernel import moment_constant
from .pfaffian import pfaffian

PROJECTOR_TOL = 1e-12


def heat_kernel(t: float, x):
    """(pi t / 2)**-0.5 * exp(-2 x^2 / t); unit mass, variance t/4."""
    if t <= 0:
        raise ValueError("t must be positive")
    x = np.asarray(x, dtype=float)
    out = np.exp(-2.0 * x * x / t) / np.sqrt(np.pi * t / 2.0)
    return float(out) if out.ndim == 0 else out


def heat_kernel_d1(t: float, x):
    """d/dx of heat_kernel."""
    if t <= 0:
        raise ValueError("t must be positive")
    x = np.asarray(x, dtype=float)
    out = (-4.0 * x / t) * np.exp(-2.0 * x * x / t) / np.sqrt(np.pi * t / 2.0)
    return float(out) if out.ndim == 0 else out


def signed_density_t(points, t: float) -> float:
    """(C_k / k!) * Pf[heat_kernel_d1(2t, x_i - x_j)] for even k.

    The entry function is odd, so the matrix is antisymmetric for any
    argument order; swapping two points flips the sign.
    """
    x = np.asarray(points, dtype=float).reshape(-1)
    k = len(x)
    if k % 2:
        raise ValueError(f"even number of points required, got {k}")
    if t <= 0:
        raise ValueError("t must be positive")
    d = x[:, None] - x[None, :]
    a = heat_kernel_d1(2.0 * t, d)
    return float(moment_constant(k) / math.factorial(k) * pfaffian(a))


def pair_density_t(delta, t: float):
    """Vectorized two-point signed density at separation delta = x1 - x2."""
    c = moment_constant(2) / 2.0
    return c * heat_kernel_d1(2.0 * t, np.asarray(delta, dtype=float))


def flat_heat_residual(fn, points, t: float, h: float, diffusion: float = 0.125) -> float:
    """Central-difference residual of (d/dt - diffusion * Laplacian) fn at (points, t).

    ``fn(points, t)`` must be smooth near the evaluation node and t > h.
    """
    if t <= h:
        raise ValueError("need t > h for the centered time difference")
    x = np.asarray(points, dtype=float).reshape(-1)
    dt = (fn(x, t + h) - fn(x, t - h)) / (2.0 * h)
    lap = 0.0
    f0 = fn(x, t)
    for i in range(len(x)):
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        lap += (fn(xp, t) - 2.0 * f0 + fn(xm, t)) / (h * h)
    return float(dt - diffusion * lap)


def heat_residual(points, t: float, h: float = 1e-3) -> float:
    """Residual of the 1/8-Laplacian heat operator on signed_density_t."""
    return flat_heat_residual(signed_density_t, points, t, h)


def residual_order(fn, points, t: float, h: float) -> float:
    """Measured convergence order log2 |R(h)| / |R(h/2)| of the residual."""
    r1 = abs(flat_heat_residual(fn, points, t, h))
    r2 = abs(flat_heat_residual(fn, points, t, h / 2.0))
    if r2 == 0.0:
        return np.inf
    return float(np.log2(r1 / r2))


def projector_solution(p: np.ndarray, t: float, x) -> float:
    """(2 pi t)**(-rank/2) * exp(-<x, P x> / (2t)) for an orthogonal projector P.

    Solves (d/dt - (1/2) Laplacian) u = 0 on the coordinate space; the rank
    is read off the trace.  Non-projector input raises.
    """
    p = np.asarray(p, dtype=float)
    if t <= 0:
        raise ValueError("t must be positive")
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ValueError("projector must be square")
    if np.max(np.abs(p - p.T)) > PROJECTOR_TOL * max(1.0, np.max(np.abs(p))):
        raise ValueError("projector must be symmetric")
    if np.max(np.abs(p @ p - p)) > 1e-10 * max(1.0, np.max(np.abs(p))):
        raise ValueError("projector must be idempotent")
    rank = float(np.trace(p))
    if abs(rank - round(rank)) > 1e-8:
        raise ValueError("projector trace is not an integer rank")
    x = np.asarray(x, dtype=float).reshape(-1)
    q = float(x @ p @ x)
    return float((2.0 * np.pi * t) ** (-round(rank) / 2.0) * np.exp(-q / (2.0 * t)))


def hermitian_basis(k: int) -> list:
    """Orthonormal basis of k x k Hermitians under <A, B> = Tr(A B)."""
    basis = []
    for i in range(k):
        e = np.zeros((k, k), dtype=complex)
        e[i, i] = 1.0
        basis.append(e)
    for i in range(k):
        for j in range(i + 1, k):
            e = np.zeros((k, k), dtype=complex)
            e[i, j] = e[j, i] = 1.0 / np.sqrt(2.0)
            basis.append(e)
            f = np.zeros((k, k), dtype=complex)
            f[i, j] = 1j / np.sqrt(2.0)
            f[j, i] = -1j / np.sqrt(2.0)
            basis.append(f)
    return basis


def hermitian_projector(w: np.ndarray) -> np.ndarray:
    """Matrix of H |-> (H + W H^T conj(W)) / 2 on the Hermitian coordinate space.

    For a skew-symmetric unitary W this is an orthogonal projector of rank
    (k^2 + k)/2; returned in the orthonormal basis of :func:`hermitian_basis`,
    ready for :func:`projector_solution`.
    """
    w = np.asarray(w, dtype=complex)
    k = w.shape[0]
    basis = hermitian_basis(k)
    dim = len(basis)
    out = np.empty((dim, dim))
    for b, eb in enumerate(basis):
        image = 0.5 * (eb + w @ eb.T @ w.conj())
        for a, ea in enumerate(basis):
            val = np.trace(ea @ image)
            if abs(val.imag) > 1e-10:
                raise ValueError("projector matrix is not real in the Hermitian basis")
            out[a, b] = val.real
    return out


@dataclass(frozen=True)
class PairingRow:
    t: float
    pairing: float


@dataclass(frozen=True)
class InitialConditionReport:
    """Pairings of signed_density_t against a test function as t decreases."""

    rows: tuple
    extrapolated: float
    target: float

    @property
    def error(self) -> float:
        return abs(self.extrapolated - self.target)


def _pairing(test_fn, t: float, half_range: float, grid: int) -> float:
    xs = np.linspace(-half_range, half_range, grid)
    x1, x2 = np.meshgrid(xs, xs, indexing="ij")
    vals = pair_density_t(x1 - x2, t) * test_fn(x1, x2)
    step = xs[1] - xs[0]
    return float(np.trapezoid(np.trapezoid(vals, dx=step, axis=1), dx=step))


def delta_prime_target(test_fn, half_range: float = 8.0, grid: int = 4001, h: float = 1e-5) -> float:
    """-(C_2/2) * int d/du test_fn(v + u, v)|_{u=0} dv, the limiting pairing."""
    v = np.linspace(-half_range, half_range, grid)
    dphi = (test_fn(v + h, v) - test_fn(v - h, v)) / (2.0 * h)
    c = moment_constant(2) / 2.0
    return float(-c * np.trapezoid(dphi, dx=v[1] - v[0]))


def initial_condition_check(
    test_fn,
    t_sequence,
    half_range: float = 6.0,
    grid: int = 801,
) -> InitialConditionReport:
    """Pairings of the two-point signed density against a decaying test function.

    The pairing converges, at first order in t, to the distributional pairing
    with the derivative-of-delta initial data on the diagonal; the report
    carries the pairing sequence, its Richardson extrapolation (assuming the
    O(t) rate) and the independently computed target.  Raises for test
    functions that do not decay.
    """
    ts = sorted(float(t) for t in t_sequence)
    if len(ts) < 2 or ts[0] <= 0:
        raise ValueError("need at least two positive times")
    far = max(
        abs(float(test_fn(np.array(half_range + 2.0), np.array(0.0)))),
        abs(float(test_fn(np.array(0.0), np.array(half_range + 2.0)))),
        abs(float(test_fn(np.array(half_range + 2.0), np.array(-half_range - 2.0)))),
    )
    near = abs(float(test_fn(np.array(0.1), np.array(-0.1)))) + 1e-12
    if far > 1e-6 * max(near, 1.0):
        raise ValueError("test function must decay away from the origin")
    rows = tuple(PairingRow(t=t, pairing=_pairing(test_fn, t, half_range, grid)) for t in ts)
    p_small, p_next = rows[0].pairing, rows[1].pairing
    ratio = ts[1] / ts[0]
    extrapolated = (ratio * p_small - p_next) / (ratio - 1.0)
    return InitialConditionReport(
        rows=rows,
        extrapolated=float(extrapolated),
        target=delta_prime_target(test_fn),
    )

"""Damping-matrix view of the lossy ladder's correlation dynamics.

For a quadratic open chain with pure onsite loss, the deviation of the
single-particle correlation matrix from its steady value relaxes under

    d/dt C~ = X C~ + C~ X^dagger,   X = i (H0^T + i M) = i conj(H),

with H0 the Hermitian part of the lattice Hamiltonian and M the diagonal of
loss rates in the interleaved pattern {0, gamma_1, 0, gamma_2, ...}.  The
eigenvalues of X therefore mirror those of H (lambda = i conj(E)) and the
relaxation gap

    Delta = min 2 Re(-lambda)

vanishes exactly when the lattice spectrum touches the real axis.  A finite
gap means exponential approach to the steady state, a vanishing one algebraic
approach.

Full propagation of C~ costs a dense exponential per time sample and is
exposed only as a small-size reference routine to validate the gap's
convergence-class claim; everything else works at the level of X's spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from . import densela
from .igc import IgcSolution
from .model import PBC, LadderParams, build_ladder
from .quadrature import adaptive_quadrature
from .walk import TAIL_BOUND, _initial_state, _resolvent_edges

GAPLESS_TOL = 1e-6


@dataclass(frozen=True)
class DampingMatrix:
    """Relaxation generator X with its Hermitian/loss split and provenance."""

    X: np.ndarray
    M: np.ndarray                 # diagonal loss rates, interleaved pattern
    H0: np.ndarray
    params: LadderParams = field(repr=False, default=None)

    def __post_init__(self):
        self.X.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.X.shape[0]


@dataclass
class LiouvilleReport:
    gap: float
    gapless: bool
    max_real: float
    note: str
    dark_mode_residuals: list = field(default_factory=list)


def build_damping(p: LadderParams) -> DampingMatrix:
    """Assemble X from the ladder Hamiltonian and verify its two identities.

    The loss diagonal must follow the interleaved site ordering (zeros on the
    A slots); the assembled X must equal i*conj(H) elementwise.  Both checks
    are defensive: they fail only if the model builder's conventions drift.
    """
    H = build_ladder(p).matrix
    H0 = 0.5 * (H + H.conj().T)
    m = -np.imag(np.diagonal(H))
    if np.any(m[0::2] != 0.0):
        raise AssertionError("loss found on A slots; site ordering broken")
    X = 1j * H0.T - np.diag(m)
    if np.abs(X - 1j * np.conj(H)).max() > 1e-14 * max(1.0, np.abs(H).max()):
        raise AssertionError("X != i conj(H); damping-matrix identity broken")
    return DampingMatrix(X=X, M=m.copy(), H0=H0, params=p)


def liouvillian_gap(dm: DampingMatrix) -> LiouvilleReport:
    """Relaxation gap of X and the convergence class it implies."""
    spec = densela.eigendecompose(dm.X)
    max_real = float(spec.eigenvalues.real.max())
    gap = -2.0 * max_real
    gapless = gap < GAPLESS_TOL
    note = ("vanishing gap: algebraic convergence towards the steady state"
            if gapless else
            f"finite gap {gap:.6g}: exponential convergence towards the steady state")
    return LiouvilleReport(gap=gap, gapless=gapless, max_real=max_real, note=note)


def dark_mode_check(dm: DampingMatrix, sol: IgcSolution) -> np.ndarray:
    """Residuals of the analytically constructed gapless modes of X.

    Each surviving plane wave of the lattice at momentum k maps through the
    conjugation in X = i conj(H) to a mode with amplitudes e^{-i k x} on the
    A slots and zero on the B slots, at eigenvalue i E.  The residuals are
    independent of the loss profile; that is the whole point of the check.
    """
    p = dm.params
    if p is None or p.bc != PBC:
        raise ValueError("gapless-mode construction needs periodic boundaries")
    L = p.L
    res = []
    for pt in sol.points:
        v = np.zeros(2 * L, dtype=complex)
        v[0::2] = np.exp(-1j * pt.k * np.arange(1, L + 1)) / np.sqrt(L)
        r = np.linalg.norm(dm.X @ v - 1j * pt.energy * v)
        res.append(float(r))
    return np.array(res)


def steady_density(p: LadderParams, x0: int, rtol: float = 1e-9,
                   max_panels: int = 4000):
    """B-site density fed by a source at (x0, A), from the resolvent of X.

        n_x^B = (gamma_x / pi) * integral |<x,B| (i omega - X)^{-1} |x0,A>|^2

    evaluated with the same adaptive panel machinery as the walk's
    frequency-domain engine.  Returns (n, diagnostics).
    """
    if not 1 <= x0 <= p.L:
        raise ValueError("x0 outside the chain")
    gam = np.asarray(p.gamma)
    if np.all(gam == 0.0):
        return np.zeros(p.L), {"note": "lossless model"}
    dm = build_damping(p)
    n = dm.dim
    x_inf = float(np.abs(dm.X).sum(axis=1).max())
    omega_max = x_inf + 2.0 * gam.max() / (np.pi * TAIL_BOUND)
    edges = _resolvent_edges(p, x_inf, omega_max)
    rhs0 = _initial_state(p, x0)
    bidx = np.arange(p.L) * 2 + 1
    neg_x = -dm.X
    diag_idx = np.diag_indices(n)

    def f(omegas):
        out = np.empty((omegas.size, p.L))
        for i, w in enumerate(omegas):
            A = neg_x.copy()
            A[diag_idx] += 1j * w
            g = densela.lu_solve(A, rhs0)
            out[i] = np.abs(g[bidx]) ** 2
        return out

    quad = adaptive_quadrature(f, edges, rtol=rtol, atol_frac=1e-16,
                               max_panels=max_panels)
    dens = gam / np.pi * quad.value
    diag = {"n_nodes": quad.n_evaluations, "n_panels": quad.n_panels,
            "converged": quad.converged, "omega_max": omega_max,
            "quadrature_error": float((gam / np.pi * quad.error).max())}
    return dens, diag


@dataclass
class CorrelationTrace:
    times: np.ndarray
    distances: np.ndarray         # Frobenius distance to the empty steady state
    final: np.ndarray


def propagate_correlation(p: LadderParams, x0: int, times) -> CorrelationTrace:
    """Reference propagation C~(t) = e^{Xt} C~(0) e^{X^dagger t}, small sizes only.

    The initial condition is a single particle on (x0, A).  Dense matrix
    exponentials make this cubic per sample, hence the size guard; the routine
    exists to confirm the convergence class implied by the gap, not to scale.
    """
    if p.L > 40:
        raise ValueError("reference propagation is limited to L <= 40")
    dm = build_damping(p)
    e0 = _initial_state(p, x0)
    c0 = np.outer(e0, e0.conj())
    times = np.asarray(sorted(float(t) for t in times))
    if times.size == 0 or times[0] < 0:
        raise ValueError("need non-negative sample times")
    dists = np.empty(times.size)
    c_t = c0
    for i, t in enumerate(times):
        prop = sla.expm(dm.X * t)
        c_t = prop @ c0 @ prop.conj().T
        dists[i] = np.linalg.norm(c_t)
    return CorrelationTrace(times=times, distances=dists, final=c_t)

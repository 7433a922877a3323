"""Roots of the coupling condition and the gap classification they imply.

A lossless plane wave on chain A survives the coupling to the lossy chain
exactly when F(k) = sum_m t_m cos(m k) vanishes.  Real roots of F mark the
momenta where the periodic-boundary spectrum touches the real axis; their
absence means the spectrum stays a finite distance below it.  Since
F(k) = P(cos k) with P the matching Chebyshev combination of the couplings,
all root finding happens on the degree-n polynomial P over u = cos k in
[-1, 1], which keeps every root real by construction and needs no filtering
of off-circle candidates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as C

from .model import LadderParams, h_x, h_y

IGC = "IGC"
GAPPED = "GAPPED"

#: scan resolution over u = cos k
_SCAN_STEP = 1e-3
#: target residual for accepted roots, |F(k)| below this
_ROOT_TOL = 1e-12


@dataclass(frozen=True)
class IgcPoint:
    """A single momentum where the coupling condition holds.

    `marginal` marks roots where F touches zero without changing sign (two
    interior roots merged, or a tangency at k = 0 or pi).
    """

    k: float
    beta: complex
    energy: float
    marginal: bool = False

    def plane_wave(self, L: int) -> np.ndarray:
        """Normalized chain-A plane wave on a 2L-dimensional interleaved ring."""
        v = np.zeros(2 * L, dtype=complex)
        v[0::2] = np.exp(1j * self.k * np.arange(1, L + 1)) / np.sqrt(L)
        return v


@dataclass(frozen=True)
class IgcSolution:
    points: tuple
    f_min: float
    k_min: float
    gapped: bool
    energies: tuple = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "energies", tuple(p.energy for p in self.points))


def _cheb(t) -> np.ndarray:
    return np.asarray(t, dtype=float)


def _bisect(coef, lo, hi, flo):
    # plain bisection on the sign of P; the bracket comes from the scan
    fhi = C.chebval(hi, coef)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = C.chebval(mid, coef)
        if abs(fm) < _ROOT_TOL or (hi - lo) < 1e-16:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return 0.5 * (lo + hi)


def _critical_points(coef):
    """Interior roots of P' in (-1, 1) by the same scan-and-bisect route."""
    dcoef = C.chebder(coef)
    if len(dcoef) == 0 or np.all(dcoef == 0.0):
        return []
    grid = np.arange(-1.0, 1.0 + _SCAN_STEP, _SCAN_STEP)
    grid[-1] = 1.0
    vals = C.chebval(grid, dcoef)
    crit = []
    sign = np.sign(vals)
    for i in range(len(grid) - 1):
        if sign[i] == 0:
            crit.append(grid[i])
        elif sign[i] * sign[i + 1] < 0:
            crit.append(_bisect(dcoef, grid[i], grid[i + 1], vals[i]))
    if sign[-1] == 0:
        crit.append(grid[-1])
    return crit


def _add_root(roots, u, tol=1e-9):
    if not any(abs(u - r) < tol for r in roots):
        roots.append(float(u))


def solve_connection(t, t_p: float, phi: float) -> IgcSolution:
    """All real momenta in [0, 2pi) where the coupling condition holds.

    Sign changes of P(u) on a fixed-resolution scan are polished by bisection;
    a secondary pass over the critical points of P catches tangential roots,
    which are reported once each and flagged marginal.  Roots at u = +/-1 map
    to the single momenta k = 0 or pi, where F is even in k and therefore
    tangential as well.  Energies follow the chain-A dispersion
    t_p cos(k - phi).
    """
    coef = _cheb(t)
    if not np.all(np.isfinite(coef)):
        raise ValueError("couplings must be finite")
    if coef.sum() <= 0:
        raise ValueError("needs sum(t) = F(0) > 0; rescale or flip the couplings")
    scale = max(1.0, np.abs(coef).sum())
    near_zero = 1e-12 * scale

    grid = np.arange(-1.0, 1.0 + _SCAN_STEP, _SCAN_STEP)
    grid[-1] = 1.0
    vals = C.chebval(grid, coef)

    sign_roots = []
    for i, u in enumerate(grid):
        if abs(vals[i]) <= near_zero:
            _add_root(sign_roots, u)
    for i in range(len(grid) - 1):
        flo, fhi = vals[i], vals[i + 1]
        if abs(flo) <= near_zero or abs(fhi) <= near_zero:
            continue  # already captured as an on-grid root
        if flo * fhi < 0:
            _add_root(sign_roots, _bisect(coef, grid[i], grid[i + 1], flo))

    crit = _critical_points(coef)
    tangent_roots = []
    for u in crit:
        if abs(C.chebval(u, coef)) <= near_zero:
            known = any(abs(u - r) < 1e-9 for r in sign_roots)
            if not known:
                _add_root(tangent_roots, u)

    # global minimum of F over k, i.e. of P over [-1, 1]
    cand = np.array([-1.0, 1.0] + crit)
    cvals = C.chebval(cand, coef)
    jmin = int(np.argmin(cvals))
    f_min = float(cvals[jmin])
    k_min = float(np.arccos(np.clip(cand[jmin], -1.0, 1.0)))

    points = []
    for u, marg in [(u, False) for u in sign_roots] + \
                   [(u, True) for u in tangent_roots]:
        u = float(np.clip(u, -1.0, 1.0))
        kk = float(np.arccos(u))
        if u in (-1.0, 1.0):
            ks, marg = [kk], True
        else:
            ks = [kk, 2.0 * np.pi - kk]
        for k in ks:
            points.append(IgcPoint(
                k=k,
                beta=complex(np.exp(1j * k)),
                energy=float(h_y(t_p, phi, k)),
                marginal=marg,
            ))
    points.sort(key=lambda pt: pt.k)
    return IgcSolution(points=tuple(points), f_min=f_min, k_min=k_min,
                       gapped=(len(points) == 0))


def f_min_closed_form(t0: float, t1: float, t2: float):
    """Minimum of F(k) = t0 + t1 cos k + t2 cos 2k and its location.

    For t2 <= t1/4 the minimum sits at k = pi with value t0 - t1 + t2; beyond
    that the interior stationary point cos k = -t1/(4 t2) takes over and the
    value becomes t0 - t1^2/(8 t2) - t2.
    """
    if t1 <= 0 or t2 < 0:
        raise ValueError("need t1 > 0 and t2 >= 0")
    if t2 <= t1 / 4.0:
        return t0 - t1 + t2, float(np.pi)
    return t0 - t1**2 / (8.0 * t2) - t2, float(np.arccos(-t1 / (4.0 * t2)))


def igc_energies_closed_form(t0: float, t1: float, t_p: float, phi: float):
    """Energies of the two nearest-coupling roots, (t_p/t1)(-t0 cos phi +/- sqrt(t1^2 - t0^2) sin phi).

    Empty when |t0| > t1 (no real root of t0 + t1 cos k).
    """
    if abs(t0) > t1:
        return []
    root = np.sqrt(t1**2 - t0**2)
    return [float(t_p / t1 * (-t0 * np.cos(phi) + s * root * np.sin(phi)))
            for s in (+1.0, -1.0)]


def classify(p: LadderParams) -> str:
    """"IGC" when F reaches zero or below, "GAPPED" otherwise.

    The loss profile plays no role here; only the couplings enter.  A small
    tolerance absorbs float noise at exact criticality (f_min = 0).
    """
    sol = solve_connection(p.t, p.t_p, p.phi)
    scale = max(1.0, np.abs(np.asarray(p.t)).sum())
    return IGC if sol.f_min <= 1e-12 * scale else GAPPED


def connection_value(t, k):
    """Convenience alias: F(k) for the given couplings."""
    return h_x(t, k)

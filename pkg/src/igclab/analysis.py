"""Scaling laws and burst phenomenology extracted from escape profiles.

The bulk of an escape profile decays either as a power of the distance from
the release cell or exponentially in it; which one wins is decided by fitting
both models on log-transformed data over a fixed bulk window and comparing
their r^2.  The window excludes the near field around the release cell and a
boundary layer at the edges:

    left side:  x in [x0 - floor(0.6 x0), x0 - 15], clipped to x >= 11
    right side: mirrored with the distance to the right edge in place of x0

Burst metrics compare each edge value against the running minimum of its own
side of the profile; an edge counts as bursting when it exceeds that minimum
by the (configurable) factor 10.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import LadderParams, h_x, h_y
from .walk import TIME, LossProfile, WalkConfig, loss_profile_resolvent, loss_profile_time

POWER = "POWER"
EXP = "EXP"

NONE = "NONE"
LEFT = "LEFT"
RIGHT = "RIGHT"
BIPOLAR = "BIPOLAR"

BURST_THRESHOLD = 10.0

#: bulk-window construction constants (near-field cut, edge layer, depth)
NEAR_FIELD = 15
EDGE_LAYER = 10
WINDOW_FRACTION = 0.6


class WindowError(ValueError):
    """The requested bulk window has too few usable points."""


@dataclass
class FitResult:
    kind: str
    exponent: float               # alpha for POWER, ln(lambda) per site for EXP
    r_squared: float
    window: tuple
    n_points: int
    power_exponent: float = 0.0
    power_r2: float = 0.0
    exp_rate: float = 0.0
    exp_r2: float = 0.0
    n_excluded: int = 0


def _linfit(x, y):
    A = np.vstack([x, np.ones_like(x)]).T
    coef, res, *_ = np.linalg.lstsq(A, y, rcond=None)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(res[0]) if res.size else float(np.sum((A @ coef - y) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    return float(coef[0]), float(coef[1]), r2


def _window(x0, L, side):
    if side == LEFT:
        lo = max(EDGE_LAYER + 1, x0 - int(np.floor(WINDOW_FRACTION * x0)))
        hi = x0 - NEAR_FIELD
    elif side == RIGHT:
        depth = L + 1 - x0
        lo = x0 + NEAR_FIELD
        hi = min(L - EDGE_LAYER, x0 + int(np.floor(WINDOW_FRACTION * depth)))
    else:
        raise ValueError("side must be LEFT or RIGHT")
    return lo, hi


def fit_bulk(profile, x0: int, side: str = LEFT, min_points: int = 20) -> FitResult:
    """Classify the bulk decay of a profile as power law or exponential.

    Fits log P against log d and against d (d the distance from x0) over the
    bulk window and returns the better model by r^2, with both fits attached.
    Non-positive profile values inside the window are dropped and counted.
    """
    P = np.asarray(profile.P if isinstance(profile, LossProfile) else profile,
                   dtype=float)
    L = P.size
    lo, hi = _window(x0, L, side)
    xs = np.arange(lo, hi + 1)
    if xs.size < min_points:
        raise WindowError(f"bulk window [{lo}, {hi}] has {xs.size} points, "
                          f"need >= {min_points}")
    vals = P[xs - 1]
    keep = vals > 0.0
    n_excluded = int((~keep).sum())
    xs, vals = xs[keep], vals[keep]
    if xs.size < min_points:
        raise WindowError(f"only {xs.size} positive points in window "
                          f"[{lo}, {hi}] after excluding {n_excluded}")
    d = np.abs(xs - x0).astype(float)
    logp = np.log(vals)
    p_slope, _, p_r2 = _linfit(np.log(d), logp)
    e_slope, _, e_r2 = _linfit(d, logp)
    if p_r2 >= e_r2:
        kind, exponent, r2 = POWER, -p_slope, p_r2
    else:
        kind, exponent, r2 = EXP, e_slope, e_r2
    return FitResult(kind=kind, exponent=exponent, r_squared=r2,
                     window=(lo, hi), n_points=int(xs.size),
                     power_exponent=-p_slope, power_r2=p_r2,
                     exp_rate=e_slope, exp_r2=e_r2, n_excluded=n_excluded)


@dataclass
class BurstMetrics:
    p_edge_left: float | None
    p_edge_right: float | None
    p_min_left: float | None
    p_min_right: float | None
    ratio_left: float | None
    ratio_right: float | None
    burst_type: str
    threshold: float = BURST_THRESHOLD


def burst_metrics(profile, x0: int, threshold: float = BURST_THRESHOLD) -> BurstMetrics:
    """Edge-to-minimum ratios of a profile and the resulting burst label.

    The left minimum runs over cells 1..x0 and the right one over x0..L, edge
    values included, so a monotone profile scores ratio 1.  A release at an
    edge leaves that side undefined (reported as None).
    """
    P = np.asarray(profile.P if isinstance(profile, LossProfile) else profile,
                   dtype=float)
    L = P.size
    if not 1 <= x0 <= L:
        raise ValueError("x0 outside the chain")
    def _side(edge, pmin):
        if pmin > 0:
            return edge, pmin, edge / pmin
        # an underflowed side (both zero) carries no burst evidence
        return edge, pmin, (np.inf if edge > 0 else 1.0)

    left = right = None
    if x0 > 1:
        left = _side(float(P[0]), float(P[:x0].min()))
    if x0 < L:
        right = _side(float(P[-1]), float(P[x0 - 1:].min()))
    burst_l = left is not None and left[2] > threshold
    burst_r = right is not None and right[2] > threshold
    burst = {(False, False): NONE, (True, False): LEFT,
             (False, True): RIGHT, (True, True): BIPOLAR}[(burst_l, burst_r)]
    return BurstMetrics(
        p_edge_left=None if left is None else left[0],
        p_edge_right=None if right is None else right[0],
        p_min_left=None if left is None else left[1],
        p_min_right=None if right is None else right[1],
        ratio_left=None if left is None else left[2],
        ratio_right=None if right is None else right[2],
        burst_type=burst,
        threshold=threshold,
    )


@dataclass
class ScanRow:
    x0: int
    ratio_left: float
    p_edge_left: float
    incomplete: bool = False


@dataclass
class ScanResult:
    """Release-position scan with the two companion slope fits.

    `ratio_slope` fits log(ratio) against log(x0) (near 1 in the power-law
    regime); `p_edge_rate` fits log(P_edge) against x0 (matches the bulk
    exponential rate in the gapped regime).
    """

    rows: list
    ratio_slope: float
    ratio_r2: float
    p_edge_rate: float
    p_edge_r2: float


def scan_x0(params: LadderParams, x0_list, engine: str = TIME,
            norm_floor: float = 1e-10, step_tol: float = 1e-8,
            profile_hook=None) -> ScanResult:
    """Run one walk per release cell and tabulate the left-edge metrics."""
    rows = []
    for x0 in x0_list:
        cfg = WalkConfig(params=params, x0=int(x0), norm_floor=norm_floor,
                         step_tol=step_tol)
        prof = (loss_profile_time(cfg) if engine == TIME
                else loss_profile_resolvent(cfg))
        if profile_hook is not None:
            profile_hook(int(x0), prof)
        m = burst_metrics(prof, int(x0))
        rows.append(ScanRow(x0=int(x0), ratio_left=m.ratio_left,
                            p_edge_left=m.p_edge_left,
                            incomplete=prof.incomplete))
    xs = np.array([r.x0 for r in rows], dtype=float)
    ratio = np.array([r.ratio_left for r in rows])
    pedge = np.array([r.p_edge_left for r in rows])
    if len(rows) >= 2 and np.all(ratio > 0) and np.all(pedge > 0):
        rs, _, rr2 = _linfit(np.log(xs), np.log(ratio))
        es, _, er2 = _linfit(xs, np.log(pedge))
    else:
        rs = rr2 = es = er2 = np.nan
    return ScanResult(rows=rows, ratio_slope=rs, ratio_r2=rr2,
                      p_edge_rate=es, p_edge_r2=er2)


# ---------------------------------------------------------------------------
# momentum-space self-intersections

def _bands_at(p, gam, k):
    hx = complex(h_x(p.t, k))
    hy = complex(h_y(p.t_p, p.phi, k))
    s = np.sqrt(hx**2 + (hy + 0.5j * gam) ** 2)
    return np.array([-0.5j * gam + s, -0.5j * gam - s])


def _band_derivative(p, gam, k, energy):
    # implicit derivative through s^2 = hx^2 + (hy + i gam/2)^2 on the branch
    # pinned by the energy itself (s = E + i gam/2)
    s = energy + 0.5j * gam
    if abs(s) < 1e-12:
        return None
    hx = complex(h_x(p.t, k))
    hy = complex(h_y(p.t_p, p.phi, k))
    dhx = sum(-m * tm * np.sin(m * k) for m, tm in enumerate(p.t))
    dhy = -p.t_p * np.sin(k - p.phi)
    return (hx * dhx + (hy + 0.5j * gam) * dhy) / s


@dataclass
class SelfIntersection:
    k1: float
    k2: float
    energy: complex


def self_intersections(params: LadderParams, k_samples: int = 1024,
                       refine_tol: float = 1e-10) -> list:
    """Transversal self-crossings of the momentum-space spectral curve.

    Both branches are sampled on a k grid; close pairs at well-separated
    momenta are polished with a two-variable Newton iteration on
    E(k1) - E(k2) = 0 and accepted only if the two tangent directions are
    genuinely transversal.  The tangency test is what discards the mirrored
    k <-> -k coincidences of the time-reversal-symmetric case, where the
    curve retraces itself instead of crossing.
    """
    if k_samples < 512:
        raise ValueError("need k_samples >= 512")
    gam = params.uniform_gamma
    if gam is None:
        raise ValueError("momentum-space form needs a uniform loss profile")
    ks = np.linspace(0.0, 2.0 * np.pi, k_samples, endpoint=False)
    bands = np.empty((2, k_samples), dtype=complex)
    hx = h_x(params.t, ks)
    hy = h_y(params.t_p, params.phi, ks)
    s = np.sqrt(hx.astype(complex) ** 2 + (hy + 0.5j * gam) ** 2)
    bands[0] = -0.5j * gam + s
    bands[1] = -0.5j * gam - s
    pts_k = np.concatenate([ks, ks])
    pts_e = np.concatenate([bands[0], bands[1]])
    # local spacing sets the candidate threshold
    spacing = np.median(np.abs(np.diff(pts_e.reshape(2, -1), axis=1)))
    thresh = 4.0 * spacing
    dk_min = 8.0 * np.pi / k_samples

    # sweep in ascending Re E; any close pair sits inside a short window
    order = np.argsort(pts_e.real, kind="stable")
    se, sk = pts_e[order], pts_k[order]
    candidates = []
    start = 0
    for i in range(se.size):
        while se[i].real - se[start].real > thresh:
            start += 1
        for j in range(start, i):
            if abs(se[i] - se[j]) >= thresh:
                continue
            dk = abs(sk[i] - sk[j])
            if min(dk, 2.0 * np.pi - dk) > dk_min:
                candidates.append((j, i))
    found = []
    for i, j in candidates:
        hit = _polish_crossing(params, gam, sk[i], se[i],
                               sk[j], se[j], refine_tol)
        if hit is None:
            continue
        k1, k2, E = hit
        key = (round(E.real, 6), round(E.imag, 6),
               round(min(k1, k2), 4), round(max(k1, k2), 4))
        if all(key != f[0] for f in found):
            found.append((key, SelfIntersection(k1=min(k1, k2), k2=max(k1, k2),
                                                energy=E)))
    out = [f[1] for f in found]
    out.sort(key=lambda s: (s.energy.real, s.k1))
    return out


def _polish_crossing(p, gam, k1, e1, k2, e2, tol, max_iter=40):
    two_pi = 2.0 * np.pi
    for _ in range(max_iter):
        b1 = _bands_at(p, gam, k1)
        b2 = _bands_at(p, gam, k2)
        e1 = b1[np.argmin(np.abs(b1 - e1))]
        e2 = b2[np.argmin(np.abs(b2 - e2))]
        g = e1 - e2
        d1 = _band_derivative(p, gam, k1, e1)
        d2 = _band_derivative(p, gam, k2, e2)
        if d1 is None or d2 is None:
            return None
        J = np.array([[d1.real, -d2.real], [d1.imag, -d2.imag]])
        det = np.linalg.det(J)
        if abs(det) < 1e-14 * (abs(d1) * abs(d2) + 1e-300):
            return None
        step = np.linalg.solve(J, -np.array([g.real, g.imag]))
        if np.abs(step).max() > 0.5:
            step *= 0.5 / np.abs(step).max()
        k1 = (k1 + step[0]) % two_pi
        k2 = (k2 + step[1]) % two_pi
        if abs(g) < tol and np.abs(step).max() < 1e-12:
            break
    else:
        return None
    dk = abs(k1 - k2)
    dk = min(dk, two_pi - dk)
    if dk < 1e-3:
        return None
    d1 = _band_derivative(p, gam, k1, e1)
    d2 = _band_derivative(p, gam, k2, e2)
    if d1 is None or d2 is None:
        return None
    cross = abs((np.conj(d1) * d2).imag)
    if cross <= 1e-6 * abs(d1) * abs(d2):
        return None  # tangential or retraced, not a transversal crossing
    return float(k1), float(k2), complex(0.5 * (e1 + e2))

"""Acceptance suite: one test per criterion, printed as PASS/FAIL lines.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
report.  Three checks named `*_as_stated` are expected to stay red; they
implement clauses that are mathematically or numerically unattainable on a
finite ring in double precision, and each has a passing companion test that
carries the same physics at commensurate couplings or well-conditioned sizes
(analysis in the test docstrings).
"""

import json
import time

import numpy as np
import pytest

import igclab as il
from igclab import OBC, PBC
from igclab.cli import main as cli_main
from igclab.model import h_x


def _report(tag, ok, detail=""):
    print(f"[{tag}] {'PASS' if ok else 'FAIL'} {detail}")
    return ok


def fig3(t0=0.3, gamma=0.5, bc=OBC, L=200, t2=None, phi=np.pi / 2):
    t = [t0, 0.5] if t2 is None else [t0, 0.5, t2]
    return il.LadderParams(L=L, t=t, t_p=0.5, phi=phi, gamma=gamma, bc=bc)


LINEAR = il.linear_gamma(200, 0.01, 0.20)
COMMENSURATE_T0 = 0.5 * np.cos(2 * np.pi / 5)
COMMENSURATE_E = 0.5 * np.sin(3 * np.pi / 5)

CORNERS = [(0.3, "uniform"), (0.3, "linear"), (0.6, "uniform"), (0.6, "linear")]


def _corner_params(t0, profile):
    return fig3(t0=t0, gamma=(0.5 if profile == "uniform" else LINEAR))


@pytest.fixture(scope="module")
def corner_profiles():
    """TIME and RESOLVENT profiles for the four corner configurations.

    The stopping floor is tightened to 1e-12 (the spec default is 1e-10) so
    the truncated slow skin modes do not bias the left-edge cells; see the
    decisions notes.  Wall time per engine is recorded for criterion 3.
    """
    out = {}
    for t0, profile in CORNERS:
        cfg = il.WalkConfig(params=_corner_params(t0, profile), x0=150,
                            norm_floor=1e-12)
        t_start = time.perf_counter()
        pt = il.loss_profile_time(cfg)
        t_mid = time.perf_counter()
        pr = il.loss_profile_resolvent(cfg)
        out[(t0, profile)] = (pt, pr, t_mid - t_start,
                              time.perf_counter() - t_mid)
    return out


# --- criterion 1 --------------------------------------------------------------

def test_c1_connection_solver_and_closed_form():
    """Exactly two roots with energies +/-0.4, against the closed form."""
    t_start = time.perf_counter()
    sol = il.solve_connection([0.3, 0.5], 0.5, np.pi / 2)
    closed = il.igc_energies_closed_form(0.3, 0.5, 0.5, np.pi / 2)
    elapsed = time.perf_counter() - t_start
    ok = (len(sol.points) == 2
          and sorted(sol.energies) == pytest.approx([-0.4, 0.4], abs=1e-10)
          and sorted(closed) == pytest.approx([-0.4, 0.4], abs=1e-12)
          and elapsed < 5.0)
    assert _report("C1", ok, f"2 roots, energies +/-0.4, {elapsed:.2f}s")


def test_c1_finite_ring_real_eigenvalues_as_stated():
    """As stated: +/-0.4 are real eigenvalues of the L=200 periodic matrix
    within 1e-8.

    Unattainable: arccos(-0.6) is an irrational multiple of pi, so the
    surviving-mode momentum never sits on the 2*pi*j/200 grid; the closest
    eigenvalue is ~4.5e-3 away with imaginary part ~-2e-5 (see the decisions
    notes).  Kept faithful and red; the commensurate companion passes.
    """
    w = il.eigendecompose(il.build_ladder(fig3(bc=PBC)).matrix).eigenvalues
    dist = max(np.abs(w - 0.4).min(), np.abs(w + 0.4).min())
    near_real = w[np.abs(w - 0.4).argmin()]
    ok = dist < 1e-8
    _report("C1b", ok,
            f"nearest eigenvalue to +0.4 is {near_real:.6f} (distance {dist:.2e})")
    assert ok, ("finite-ring commensurability defect: no dark mode at "
                f"incommensurate momentum; distance {dist:.3e} > 1e-8")


def test_c1_commensurate_ring_counterpart():
    """Same physics where the ring hosts the mode: eigenvalue hit to 1e-8."""
    p = fig3(t0=COMMENSURATE_T0, bc=PBC)
    sol = il.solve_connection(p.t, p.t_p, p.phi)
    w = il.eigendecompose(il.build_ladder(p).matrix).eigenvalues
    dist = max(np.abs(w - COMMENSURATE_E).min(),
               np.abs(w + COMMENSURATE_E).min())
    ok = (len(sol.points) == 2
          and sorted(sol.energies) == pytest.approx(
              [-COMMENSURATE_E, COMMENSURATE_E], abs=1e-10)
          and dist < 1e-8)
    assert _report("C1c", ok, f"commensurate eigenvalue distance {dist:.2e}")


# --- criterion 2 --------------------------------------------------------------

def _profile_matrix(t0):
    profs = [np.full(200, 0.5), il.linear_gamma(200, 0.01, 0.20)]
    profs += [il.random_gamma(200, 0.4, 0.6, seed=s) for s in range(10)]
    return [fig3(t0=t0, gamma=g, bc=PBC) for g in profs]


def test_c2_gamma_independence_as_stated():
    """As stated: +/-0.4 persist as real eigenvalues within 1e-8 and dark-mode
    B-weight < 1e-8 across uniform, linear, and 10 random loss profiles.

    Red for the same commensurability reason as C1b: the finite ring has no
    exact dark mode at these couplings, so each profile only has near-real
    eigenvalues ~4.5e-3 away with B-weights ~4e-5."""
    t_start = time.perf_counter()
    worst_dist, worst_weight = 0.0, 0.0
    for p in _profile_matrix(0.3):
        spec = il.eigendecompose(il.build_ladder(p).matrix, want_vectors=True)
        w = spec.eigenvalues
        for target in (0.4, -0.4):
            j = np.abs(w - target).argmin()
            worst_dist = max(worst_dist, abs(w[j] - target))
            v = spec.right_vectors[:, j]
            worst_weight = max(worst_weight,
                               np.linalg.norm(v[1::2]) ** 2 / np.linalg.norm(v) ** 2)
    elapsed = time.perf_counter() - t_start
    ok = worst_dist < 1e-8 and worst_weight < 1e-8 and elapsed < 60.0
    _report("C2", ok, f"worst eigenvalue distance {worst_dist:.2e}, "
                      f"worst B-weight {worst_weight:.2e}, {elapsed:.1f}s")
    assert ok, ("finite-ring commensurability defect: see decisions notes; "
                f"distance {worst_dist:.3e}, weight {worst_weight:.3e}")


def test_c2_gamma_independence_commensurate():
    """Companion: at commensurate couplings every clause holds with margin."""
    t_start = time.perf_counter()
    E = COMMENSURATE_E
    worst_dist, worst_weight = 0.0, 0.0
    profs = [np.full(200, 0.5), il.linear_gamma(200, 0.01, 0.20)]
    profs += [il.random_gamma(200, 0.4, 0.6, seed=s) for s in range(10)]
    for g in profs:
        p = fig3(t0=COMMENSURATE_T0, gamma=g, bc=PBC)
        spec = il.eigendecompose(il.build_ladder(p).matrix, want_vectors=True)
        w = spec.eigenvalues
        for target in (E, -E):
            j = np.abs(w - target).argmin()
            worst_dist = max(worst_dist, abs(w[j] - target))
            v = spec.right_vectors[:, j]
            worst_weight = max(worst_weight,
                               np.linalg.norm(v[1::2]) ** 2 / np.linalg.norm(v) ** 2)
    elapsed = time.perf_counter() - t_start
    ok = worst_dist < 1e-8 and worst_weight < 1e-8 and elapsed < 60.0
    assert _report("C2c", ok,
                   f"12 profiles: eigenvalue distance {worst_dist:.2e}, "
                   f"B-weight {worst_weight:.2e}, {elapsed:.1f}s")


# --- criterion 3 --------------------------------------------------------------

def test_c3_engine_equivalence(corner_profiles):
    """TIME and RESOLVENT agree to 1e-4 relative above a 1e-12 floor on all
    four corners; the time engine conserves total probability to 1e-6."""
    total_wall = 0.0
    worst_rel, worst_sum = 0.0, 0.0
    for key, (pt, pr, w1, w2) in corner_profiles.items():
        total_wall += w1 + w2
        assert not pt.incomplete and not pr.incomplete
        mask = pt.P > 1e-12
        rel = np.abs(pr.P[mask] - pt.P[mask]) / pt.P[mask]
        worst_rel = max(worst_rel, rel.max())
        worst_sum = max(worst_sum, abs(pt.total - 1.0))
    ok = worst_rel < 1e-4 and worst_sum < 1e-6 and total_wall < 600.0
    assert _report("C3", ok, f"max relative gap {worst_rel:.2e}, "
                             f"|sum P - 1| {worst_sum:.2e}, {total_wall:.0f}s")


# --- criterion 4 --------------------------------------------------------------

def test_c4_scaling_dichotomy(corner_profiles):
    """Power law exactly in the regimes with surviving real modes, and the
    fit classification always matches the coupling-based classification."""
    checks = []
    for (t0, profile), (pt, _, _, _) in corner_profiles.items():
        fit = il.fit_bulk(pt, 150, il.LEFT)
        cls = il.classify(_corner_params(t0, profile))
        expected = il.POWER if cls == il.IGC else il.EXP
        ordered = (fit.power_r2 > fit.exp_r2 if expected == il.POWER
                   else fit.exp_r2 > fit.power_r2)
        checks.append(fit.kind == expected and ordered)
    for t0 in (0.3, 0.4, 0.5):
        p = fig3(t0=t0, t2=0.1)
        prof = il.loss_profile_time(il.WalkConfig(params=p, x0=150))
        fit = il.fit_bulk(prof, 150, il.LEFT)
        cls = il.classify(p)
        checks.append((fit.kind == il.POWER) == (cls == il.IGC))
    ok = all(checks)
    assert _report("C4", ok, f"{len(checks)} configuration checks")


# --- criterion 5 --------------------------------------------------------------

def test_c5_edge_burst_scaling():
    """Relative height grows linearly with the release cell in the power-law
    regime; the edge value decays at the bulk exponential rate otherwise."""
    x0s = range(40, 161, 20)
    scan_igc = il.scan_x0(fig3(0.3), x0s)
    ok_igc = (abs(scan_igc.ratio_slope - 1.0) <= 0.15)
    scan_gap = il.scan_x0(fig3(0.6), x0s)
    prof = il.loss_profile_time(il.WalkConfig(params=fig3(0.6), x0=150))
    bulk = il.fit_bulk(prof, 150, il.LEFT)
    ok_gap = (scan_gap.p_edge_r2 > 0.99
              and bulk.kind == il.EXP
              and abs(scan_gap.p_edge_rate / bulk.exponent - 1.0) <= 0.10)
    ok = ok_igc and ok_gap
    assert _report(
        "C5", ok,
        f"ratio slope {scan_igc.ratio_slope:.3f} (want 1.0 +/- 0.15); "
        f"edge rate {scan_gap.p_edge_rate:.4f} vs bulk {bulk.exponent:.4f}, "
        f"r2 {scan_gap.p_edge_r2:.4f}")


# --- criterion 6 --------------------------------------------------------------

def test_c6_bipolar_burst_and_self_intersections():
    results = {}
    for t2 in (0.2, 0.5):
        p = fig3(t2=t2)
        prof = il.loss_profile_time(il.WalkConfig(params=p, x0=150))
        m = il.burst_metrics(prof, 150)
        hits = il.self_intersections(fig3(t2=t2, bc=PBC), 1024)
        results[t2] = (m.burst_type, len(hits))
    ok = results[0.2] == (il.LEFT, 0) and \
        results[0.5][0] == il.BIPOLAR and results[0.5][1] >= 1
    assert _report("C6", ok, f"t2=0.2 -> {results[0.2]}, t2=0.5 -> {results[0.5]}")


# --- criterion 7 --------------------------------------------------------------

def test_c7_peierls_symmetry_and_energies():
    """Left-right symmetric escape at phi=0 on the ring, and closed-form
    energies on the momentum-space spectrum for all four phases.

    The symmetry clause runs under periodic boundaries (no skin effect at
    phi=0, exact reflection symmetry about the release cell); under open
    boundaries the unequal edge distances leave a real ~3e-3 asymmetry.  The
    energy clause is checked against the momentum-space spectrum at the
    solved momenta; the discrete L=200 ring cannot host them (see C1b).
    """
    p0 = fig3(phi=0.0, bc=PBC)
    prof = il.loss_profile_time(il.WalkConfig(params=p0, x0=100, t_max=1500.0))
    P = prof.P
    d = np.arange(1, 100)
    asym = np.abs(P[99 + d] - P[99 - d]).max() / P.max()
    ok_sym = asym < 1e-6

    worst = 0.0
    for phi in (0.0, np.pi / 6, np.pi / 3, np.pi / 2):
        p = fig3(phi=phi, bc=PBC)
        sol = il.solve_connection(p.t, p.t_p, p.phi)
        closed = sorted(il.igc_energies_closed_form(0.3, 0.5, 0.5, phi))
        assert sorted(sol.energies) == pytest.approx(closed, abs=1e-10)
        for pt in sol.points:
            w = il.eigendecompose(il.build_bloch(p, pt.k).matrix).eigenvalues
            worst = max(worst, np.abs(w - pt.energy).min())
    ok = ok_sym and worst < 1e-8
    assert _report("C7", ok, f"asymmetry {asym:.2e}; worst band distance {worst:.2e}")


# --- criterion 8 --------------------------------------------------------------

FIG8_CONFIGS = [(t0, bc) for t0 in (0.3, 0.6) for bc in (OBC, PBC)]


def _fig8_params(t0, bc, L=200, seed=1):
    return fig3(t0=t0, bc=bc, L=L, gamma=il.random_gamma(L, 0.4, 0.6, seed=seed))


def test_c8_damping_identity_everywhere():
    """X = i conj(H) holds elementwise at 1e-14 on every Fig-8 configuration;
    this is the exact content behind the spectral mapping."""
    worst = 0.0
    for t0, bc in FIG8_CONFIGS:
        p = _fig8_params(t0, bc)
        dm = il.build_damping(p)
        H = il.build_ladder(p).matrix
        worst = max(worst, np.abs(dm.X - 1j * np.conj(H)).max())
    ok = worst < 1e-14
    assert _report("C8a", ok, f"elementwise identity, worst {worst:.2e}")


def test_c8_spectral_mapping_multiset_as_stated():
    """As stated: computed spec(X) matches {i conj(E)} to 1e-9 at L=200.

    Red for the open-boundary rows: skin-effect eigenvalue condition numbers
    grow exponentially with size, so two independently computed spectra of
    algebraically identical matrices disagree at the ~1e-2 level by L=200.
    The reference-scale companion (L=30) passes for every configuration."""
    worst = 0.0
    for t0, bc in FIG8_CONFIGS:
        p = _fig8_params(t0, bc)
        w_h = il.eigendecompose(il.build_ladder(p).matrix).eigenvalues
        w_x = il.eigendecompose(il.build_damping(p).X).eigenvalues
        mapped = 1j * np.conj(w_h)
        dist = np.abs(mapped[:, None] - w_x[None, :])
        worst = max(worst, dist.min(axis=1).max(), dist.min(axis=0).max())
    ok = worst < 1e-9
    _report("C8b", ok, f"worst multiset distance {worst:.2e} at L=200")
    assert ok, ("computed-spectrum conditioning: multiset comparison is not "
                f"meaningful at L=200 under OBC; worst distance {worst:.3e}")


def test_c8_spectral_mapping_multiset_reference_scale():
    """Companion: the multiset identity at a size where spectra are well
    conditioned (L=30), every boundary condition and coupling."""
    worst = 0.0
    for t0, bc in FIG8_CONFIGS:
        p = _fig8_params(t0, bc, L=30)
        w_h = il.eigendecompose(il.build_ladder(p).matrix).eigenvalues
        w_x = il.eigendecompose(il.build_damping(p).X).eigenvalues
        mapped = 1j * np.conj(w_h)
        dist = np.abs(mapped[:, None] - w_x[None, :])
        worst = max(worst, dist.min(axis=1).max(), dist.min(axis=0).max())
    ok = worst < 1e-9
    assert _report("C8c", ok, f"worst multiset distance {worst:.2e} at L=30")


def test_c8_gapless_iff_igc_as_stated():
    """As stated: PBC gapless (gap < 1e-6) exactly when the couplings are in
    the surviving-mode class, for uniform, linear, and random profiles.

    Red because the incommensurate L=200 ring keeps a finite gap ~4e-5 in the
    t0=0.3 class (same root cause as C1b); the commensurate companion passes."""
    ok = True
    detail = []
    for t0, expect_igc in ((0.3, True), (0.6, False)):
        for g in (0.5, LINEAR, il.random_gamma(200, 0.4, 0.6, seed=1)):
            p = fig3(t0=t0, gamma=g, bc=PBC)
            rep = il.liouvillian_gap(il.build_damping(p))
            cls = il.classify(p) == il.IGC
            if cls != expect_igc or rep.gapless != expect_igc:
                ok = False
                detail.append(f"t0={t0}: gap={rep.gap:.2e}")
    _report("C8d", ok, "; ".join(detail) or "all profiles consistent")
    assert ok, ("finite-ring commensurability defect: " + "; ".join(detail))


def test_c8_gapless_iff_igc_commensurate():
    """Companion: with the surviving-mode momentum on the grid, gapless holds
    exactly in the surviving class and fails in the gapped class."""
    ok = True
    for t0, expect_igc in ((COMMENSURATE_T0, True), (0.6, False)):
        for g in (0.5, LINEAR, il.random_gamma(200, 0.4, 0.6, seed=1)):
            p = fig3(t0=t0, gamma=g, bc=PBC)
            rep = il.liouvillian_gap(il.build_damping(p))
            cls = il.classify(p) == il.IGC
            ok = ok and cls == expect_igc and rep.gapless == expect_igc
    assert _report("C8e", ok, "gapless exactly in the surviving-mode class")


def test_c8_obc_always_gapped():
    worst = np.inf
    for t0 in (0.3, 0.6):
        rep = il.liouvillian_gap(il.build_damping(_fig8_params(t0, OBC)))
        worst = min(worst, rep.gap)
    ok = worst > 1e-3
    assert _report("C8f", ok, f"smallest OBC gap {worst:.3e}")


def test_c8_steady_density_equals_escape_profile():
    p = _fig8_params(0.3, OBC)
    dens, diag = il.steady_density(p, 150)
    prof = il.loss_profile_resolvent(il.WalkConfig(params=p, x0=150))
    mask = prof.P > 1e-12
    rel = (np.abs(dens[mask] - prof.P[mask]) / prof.P[mask]).max()
    ok = rel < 1e-6 and diag["converged"]
    assert _report("C8g", ok, f"max relative gap {rel:.2e}")


def test_c8_correlation_decay_slope():
    """At L=20 the reference propagation decays at the gap rate within 5%."""
    p = fig3(t0=0.6, bc=PBC, L=20)
    rep = il.liouvillian_gap(il.build_damping(p))
    horizon = np.log(1e10) / rep.gap
    times = np.linspace(0.5 * horizon, 1.4 * horizon, 12)
    tr = il.propagate_correlation(p, 10, times)
    slope = np.polyfit(tr.times, np.log(tr.distances), 1)[0]
    ok = rep.gap > 1e-3 and abs(slope / -rep.gap - 1.0) < 0.05
    assert _report("C8h", ok, f"slope {slope:.5f} vs -gap {-rep.gap:.5f}")


# --- criterion 9 --------------------------------------------------------------

def test_c9_count_bound_randomized():
    rng = np.random.default_rng(2024)
    worst_residual = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 5))
        t = rng.uniform(-1, 1, n + 1)
        if t.sum() <= 0:
            t[0] += abs(t.sum()) + 0.1
        sol = il.solve_connection(t, rng.uniform(-1, 1), rng.uniform(0, 2 * np.pi))
        assert len(sol.points) <= 2 * n
        for pt in sol.points:
            worst_residual = max(worst_residual, abs(h_x(t, pt.k)))
    ok = worst_residual < 1e-10
    assert _report("C9", ok, f"200 draws, worst residual {worst_residual:.2e}")


# --- criterion 10 -------------------------------------------------------------

def test_c10_preset_determinism(tmp_path):
    cfg = tmp_path / "fig.json"
    cfg.write_text(json.dumps({"command": "figure", "figure": "fig3c"}))
    outs = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        assert cli_main(["--config", str(cfg), "--out", str(out)]) == 0
        outs.append((out / "fig3c_0_profile.csv").read_bytes())
    ok = outs[0] == outs[1]
    assert _report("C10", ok, f"{len(outs[0])} bytes, byte-identical rerun")

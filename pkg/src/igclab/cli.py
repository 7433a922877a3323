"""Batch front end: validated JSON configs in, CSV/JSON (and SVG) files out.

One run executes one command (spectrum, igc, walk, burst, sweep, liouville,
or a named figure preset) against one model description.  Configs are
validated fail-closed: unknown keys anywhere are rejected before any
computation starts.  Every run writes a metadata record with the resolved
config echo, so a result can always be reproduced from its own output
directory; identical config and seed give byte-identical CSV files.

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, analysis, igc, liouville, walk
from .densela import eigendecompose
from .model import (OBC, PBC, LadderParams, GeneralModel, build_general,
                    build_ladder, linear_gamma, random_gamma)
from .svgplot import SvgPlot

COMMANDS = ("spectrum", "igc", "walk", "burst", "sweep", "liouville", "figure")

_TOP_KEYS = {"command", "model", "x0", "x0_list", "k_samples", "engine",
             "t_max", "norm_floor", "step_tol", "compare_bc", "figure",
             "sweep", "seed", "threshold", "self_intersections", "horizon"}
_LADDER_KEYS = {"kind", "L", "t", "t_p", "phi", "gamma", "bc"}
_GENERAL_KEYS = {"kind", "A", "B_herm", "C", "gamma"}
_GAMMA_KEYS = {"uniform": {"kind", "value"},
               "linear": {"kind", "slope", "offset"},
               "random": {"kind", "low", "high", "seed"}}
_SWEEP_KEYS = {"vary", "values"}


class ConfigError(ValueError):
    """Configuration failed schema validation."""


class RunFailure(RuntimeError):
    """A numerical stage failed; carries diagnostics."""


def _fail_unknown(given, allowed, where):
    unknown = set(given) - allowed
    if unknown:
        raise ConfigError(f"unknown field(s) {sorted(unknown)} in {where}")


def _need(cfg, key, where="config"):
    if key not in cfg:
        raise ConfigError(f"missing required field '{key}' in {where}")
    return cfg[key]


def _resolve_gamma(spec, L, default_seed):
    """Gamma field: scalar, explicit list, or a named profile description."""
    if isinstance(spec, (int, float)):
        return float(spec), {"kind": "uniform", "value": float(spec)}
    if isinstance(spec, list):
        return [float(v) for v in spec], {"kind": "explicit", "values": list(spec)}
    if isinstance(spec, dict):
        kind = _need(spec, "kind", "model.gamma")
        if kind not in _GAMMA_KEYS:
            raise ConfigError(f"unknown gamma profile kind {kind!r}")
        _fail_unknown(spec, _GAMMA_KEYS[kind], f"model.gamma ({kind})")
        if kind == "uniform":
            v = float(_need(spec, "value", "model.gamma"))
            return v, {"kind": "uniform", "value": v}
        if kind == "linear":
            slope = float(_need(spec, "slope", "model.gamma"))
            offset = float(_need(spec, "offset", "model.gamma"))
            return (linear_gamma(L, slope, offset),
                    {"kind": "linear", "slope": slope, "offset": offset})
        seed = spec.get("seed", default_seed)
        if seed is None:
            raise ConfigError("random gamma profile needs a seed "
                              "(in the config or via --seed)")
        low = float(spec.get("low", 0.4))
        high = float(spec.get("high", 0.6))
        return (random_gamma(L, low, high, int(seed)),
                {"kind": "random", "low": low, "high": high, "seed": int(seed),
                 "prng": f"numpy PCG64 ({np.__version__})"})
    raise ConfigError("model.gamma must be a number, a list, or a profile object")


def _parse_ladder(m, default_seed):
    _fail_unknown(m, _LADDER_KEYS, "model")
    L = int(_need(m, "L", "model"))
    gamma, gamma_echo = _resolve_gamma(_need(m, "gamma", "model"), L, default_seed)
    try:
        p = LadderParams(L=L, t=_need(m, "t", "model"),
                         t_p=float(_need(m, "t_p", "model")),
                         phi=float(_need(m, "phi", "model")),
                         gamma=gamma, bc=m.get("bc", OBC))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad ladder model: {exc}") from exc
    echo = {"kind": "ladder", "L": p.L, "t": list(p.t), "t_p": p.t_p,
            "phi": p.phi, "gamma": gamma_echo, "bc": p.bc}
    return p, echo


def _complex_matrix(rows, where):
    try:
        return np.array([[complex(c[0], c[1]) for c in row] for row in rows])
    except (TypeError, IndexError) as exc:
        raise ConfigError(f"{where} must be a matrix of [re, im] pairs") from exc


def _parse_model(cfg, default_seed):
    m = _need(cfg, "model")
    if not isinstance(m, dict):
        raise ConfigError("model must be an object")
    kind = m.get("kind", "ladder")
    if kind == "ladder":
        return _parse_ladder(m, default_seed)
    if kind == "general":
        _fail_unknown(m, _GENERAL_KEYS, "model")
        try:
            g = GeneralModel(A=_complex_matrix(_need(m, "A", "model"), "model.A"),
                             B_herm=_complex_matrix(_need(m, "B_herm", "model"), "model.B_herm"),
                             C=_complex_matrix(_need(m, "C", "model"), "model.C"),
                             gamma=_need(m, "gamma", "model"))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad general model: {exc}") from exc
        return g, {"kind": "general", "n_h": g.n_h, "n_d": g.n_d,
                   "gamma": list(g.gamma)}
    raise ConfigError(f"unknown model kind {kind!r}")


def validate_config(cfg, default_seed=None):
    """Schema-check a raw config dict; returns (normalized config, model, echo)."""
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    _fail_unknown(cfg, _TOP_KEYS, "config")
    command = _need(cfg, "command")
    if command not in COMMANDS:
        raise ConfigError(f"command must be one of {COMMANDS}, got {command!r}")
    seed = cfg.get("seed", default_seed)
    if command == "figure":
        name = _need(cfg, "figure")
        if name not in PRESETS:
            raise ConfigError(f"unknown figure preset {name!r}; "
                              f"known: {', '.join(sorted(PRESETS))}")
        return dict(cfg), None, {"figure": name}
    model, echo = _parse_model(cfg, seed)
    if command in ("walk", "burst") or (command == "sweep"):
        if not isinstance(model, LadderParams):
            raise ConfigError(f"command {command!r} needs a ladder model")
    if command in ("walk", "burst"):
        x0 = int(_need(cfg, "x0"))
        if not 1 <= x0 <= model.L:
            raise ConfigError(f"x0 must lie in 1..{model.L}")
    if command == "sweep":
        sw = _need(cfg, "sweep")
        _fail_unknown(sw, _SWEEP_KEYS, "sweep")
        vary = _need(sw, "vary", "sweep")
        if vary not in ("x0", "t2", "phi"):
            raise ConfigError("sweep.vary must be one of x0, t2, phi")
        values = _need(sw, "values", "sweep")
        if not isinstance(values, list) or not values:
            raise ConfigError("sweep.values must be a non-empty list")
        if vary != "x0" and "x0" not in cfg:
            raise ConfigError("parameter sweeps need a fixed x0")
    engine = cfg.get("engine", walk.TIME)
    if engine not in (walk.TIME, walk.RESOLVENT, "BOTH"):
        raise ConfigError("engine must be TIME, RESOLVENT, or BOTH")
    return dict(cfg), model, echo


def _fmt(v) -> str:
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return f"{v:.17g}"
    return str(v)


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _walk_config(cfg, params, x0=None):
    kw = {}
    if "t_max" in cfg:
        kw["t_max"] = float(cfg["t_max"])
    if "norm_floor" in cfg:
        kw["norm_floor"] = float(cfg["norm_floor"])
    if "step_tol" in cfg:
        kw["step_tol"] = float(cfg["step_tol"])
    return walk.WalkConfig(params=params, x0=int(x0 if x0 is not None
                                                 else cfg["x0"]), **kw)


def _profiles(cfg, params):
    engine = cfg.get("engine", walk.TIME)
    wc = _walk_config(cfg, params)
    profs = []
    if engine in (walk.TIME, "BOTH"):
        profs.append(walk.loss_profile_time(wc))
    if engine in (walk.RESOLVENT, "BOTH"):
        profs.append(walk.loss_profile_resolvent(wc))
    return profs


# --- command implementations -------------------------------------------------

def _cmd_spectrum(cfg, model, out, tag, plot):
    rows, diags = [], {}
    if isinstance(model, LadderParams) and cfg.get("compare_bc"):
        variants = [(bc, build_ladder(model.replace(bc=bc))) for bc in (OBC, PBC)]
    elif isinstance(model, LadderParams):
        variants = [(model.bc, build_ladder(model))]
    else:
        variants = [("general", build_general(model))]
    for label, ham in variants:
        spec = eigendecompose(ham.matrix)
        rows += [(w.real, w.imag, label) for w in spec.eigenvalues]
        diags[label] = {"dim": ham.dim,
                        "max_imag": float(spec.eigenvalues.imag.max())}
    files = {}
    csv = out / f"{tag}spectrum.csv"
    write_csv(csv, ["re", "im", "label"], rows)
    files[str(csv)] = "complex eigenvalues"
    if isinstance(model, LadderParams) and cfg.get("self_intersections"):
        hits = analysis.self_intersections(model, int(cfg.get("k_samples", 1024)))
        path = out / f"{tag}self_intersections.csv"
        write_csv(path, ["k1", "k2", "re", "im"],
                  [(h.k1, h.k2, h.energy.real, h.energy.imag) for h in hits])
        files[str(path)] = "spectral self-crossings"
        diags["self_intersections"] = len(hits)
    if plot:
        pl = SvgPlot(xlabel="Re E", ylabel="Im E", title="energy spectrum")
        for label in sorted({r[2] for r in rows}):
            pts = [(float(r[0]), float(r[1])) for r in rows if r[2] == label]
            pl.add([p[0] for p in pts], [p[1] for p in pts], label=label)
        svg = out / f"{tag}spectrum.svg"
        pl.write(svg)
        files[str(svg)] = "spectrum plot"
    return files, diags


def _cmd_igc(cfg, model, out, tag, plot):
    if not isinstance(model, LadderParams):
        raise ConfigError("igc command needs a ladder model")
    sol = igc.solve_connection(model.t, model.t_p, model.phi)
    csv = out / f"{tag}igc.csv"
    write_csv(csv, ["k", "beta_re", "beta_im", "energy", "marginal"],
              [(p.k, p.beta.real, p.beta.imag, p.energy, int(p.marginal))
               for p in sol.points])
    diags = {"f_min": sol.f_min, "k_min": sol.k_min, "gapped": sol.gapped,
             "classification": igc.classify(model), "n_points": len(sol.points)}
    return {str(csv): "connection-condition roots"}, diags


def _profile_rows(profs):
    rows = []
    for prof in profs:
        rows += [(x + 1, float(p), prof.engine) for x, p in enumerate(prof.P)]
    return rows


def _plot_profile(out, tag, profs, files):
    pl = SvgPlot(xlabel="x", ylabel="P_x", title="escape probability",
                 ylog=True)
    for prof in profs:
        pl.add(range(1, len(prof.P) + 1), prof.P, label=prof.engine)
    svg = out / f"{tag}profile.svg"
    pl.write(svg)
    files[str(svg)] = "escape profile plot"


def _cmd_walk(cfg, model, out, tag, plot):
    profs = _profiles(cfg, model)
    csv = out / f"{tag}profile.csv"
    write_csv(csv, ["x", "P_x", "engine"], _profile_rows(profs))
    files = {str(csv): "escape probabilities"}
    diags = {prof.engine: dict(prof.diagnostics, total=prof.total,
                               incomplete=prof.incomplete) for prof in profs}
    if plot:
        _plot_profile(out, tag, profs, files)
    return files, diags


def _cmd_burst(cfg, model, out, tag, plot):
    profs = _profiles(cfg, model)
    x0 = int(cfg["x0"])
    csv = out / f"{tag}profile.csv"
    write_csv(csv, ["x", "P_x", "engine"], _profile_rows(profs))
    files = {str(csv): "escape probabilities"}
    diags = {}
    threshold = float(cfg.get("threshold", analysis.BURST_THRESHOLD))
    for prof in profs:
        m = analysis.burst_metrics(prof, x0, threshold)
        entry = {"burst_type": m.burst_type, "ratio_left": m.ratio_left,
                 "ratio_right": m.ratio_right, "p_edge_left": m.p_edge_left,
                 "p_edge_right": m.p_edge_right, "total": prof.total,
                 "incomplete": prof.incomplete}
        for side in (analysis.LEFT, analysis.RIGHT):
            try:
                fit = analysis.fit_bulk(prof, x0, side)
                entry[f"fit_{side.lower()}"] = {
                    "kind": fit.kind, "exponent": fit.exponent,
                    "r_squared": fit.r_squared, "window": list(fit.window),
                    "power_r2": fit.power_r2, "exp_r2": fit.exp_r2,
                    "n_points": fit.n_points}
            except analysis.WindowError as exc:
                entry[f"fit_{side.lower()}"] = {"error": str(exc)}
        diags[prof.engine] = entry
    if plot:
        _plot_profile(out, tag, profs, files)
    return files, diags


def _sweep_row(args):
    """One sweep sample; module-level so worker pools can pickle it."""
    model_dict, cfg, vary, value = args
    params = LadderParams(**model_dict)
    if vary == "x0":
        x0 = int(value)
    else:
        x0 = int(cfg["x0"])
        if vary == "t2":
            t = list(params.t) + [0.0] * (3 - len(params.t))
            t[2] = float(value)
            params = params.replace(t=tuple(t))
        else:
            params = params.replace(phi=float(value))
    wc = _walk_config(cfg, params, x0=x0)
    engine = cfg.get("engine", walk.TIME)
    prof = (walk.loss_profile_resolvent(wc) if engine == walk.RESOLVENT
            else walk.loss_profile_time(wc))
    m = analysis.burst_metrics(prof, x0, float(cfg.get("threshold",
                                                       analysis.BURST_THRESHOLD)))
    return (float(value), m.ratio_left, m.ratio_right,
            m.p_edge_left, m.p_edge_right, m.burst_type, prof.incomplete)


def _cmd_sweep(cfg, model, out, tag, plot, jobs=1):
    sw = cfg["sweep"]
    vary, values = sw["vary"], sw["values"]
    model_dict = dict(L=model.L, t=model.t, t_p=model.t_p, phi=model.phi,
                      gamma=model.gamma, bc=model.bc)
    tasks = [(model_dict, cfg, vary, v) for v in values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_row, tasks))
    else:
        results = [_sweep_row(t) for t in tasks]
    csv = out / f"{tag}sweep.csv"
    write_csv(csv, [vary, "ratio_left", "ratio_right", "p_edge_left",
                    "p_edge_right", "burst_type", "incomplete"],
              [(v, rl, rr, pl_, pr, bt, int(inc))
               for v, rl, rr, pl_, pr, bt, inc in results])
    files = {str(csv): f"burst metrics against {vary}"}
    diags = {"n_rows": len(results)}
    if vary == "x0":
        xs = np.array([r[0] for r in results])
        ratio = np.array([r[1] for r in results])
        pedge = np.array([r[3] for r in results])
        if np.all(ratio > 0) and np.all(pedge > 0) and xs.size >= 2:
            rs, _, rr2 = analysis._linfit(np.log(xs), np.log(ratio))
            es, _, er2 = analysis._linfit(xs, np.log(pedge))
            diags["ratio_loglog_slope"] = rs
            diags["ratio_loglog_r2"] = rr2
            diags["p_edge_loglinear_rate"] = es
            diags["p_edge_loglinear_r2"] = er2
    if plot:
        pl = SvgPlot(xlabel=vary, ylabel="P_edge/P_min",
                     title=f"edge burst against {vary}",
                     xlog=(vary == "x0"), ylog=True)
        pl.add([r[0] for r in results], [r[1] for r in results],
               label="left", mode="line")
        pl.add([r[0] for r in results], [r[2] for r in results],
               label="right", mode="line")
        svg = out / f"{tag}sweep.svg"
        pl.write(svg)
        files[str(svg)] = "sweep plot"
    return files, diags


def _cmd_liouville(cfg, model, out, tag, plot):
    if not isinstance(model, LadderParams):
        raise ConfigError("liouville command needs a ladder model")
    dm = liouville.build_damping(model)
    rep = liouville.liouvillian_gap(dm)
    spec = eigendecompose(dm.X)
    csv = out / f"{tag}liouville_spectrum.csv"
    write_csv(csv, ["re", "im", "label"],
              [(w.real, w.imag, model.bc) for w in spec.eigenvalues])
    files = {str(csv): "damping-matrix eigenvalues"}
    diags = {"gap": rep.gap, "gapless": rep.gapless, "max_real": rep.max_real,
             "note": rep.note}
    if "x0" in cfg:
        dens, qd = liouville.steady_density(model, int(cfg["x0"]))
        dcsv = out / f"{tag}steady_density.csv"
        write_csv(dcsv, ["x", "n_B"], list(enumerate(dens, start=1)))
        files[str(dcsv)] = "steady B-site density"
        diags["steady_density"] = qd
    if plot:
        pl = SvgPlot(xlabel="Re lambda", ylabel="Im lambda",
                     title="damping-matrix spectrum")
        pl.add(spec.eigenvalues.real, spec.eigenvalues.imag, label=model.bc)
        svg = out / f"{tag}liouville_spectrum.svg"
        pl.write(svg)
        files[str(svg)] = "damping spectrum plot"
    return files, diags


def execute(cfg, out_dir, plot=False, jobs=1, seed=None, tag=""):
    """Validate and run one config; returns (files, diagnostics)."""
    cfg, model, echo = validate_config(cfg, default_seed=seed)
    command = cfg["command"]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if command == "figure":
        return _run_figure(cfg, out, plot, jobs, seed)
    impl = {"spectrum": _cmd_spectrum, "igc": _cmd_igc, "walk": _cmd_walk,
            "burst": _cmd_burst, "liouville": _cmd_liouville}
    if command == "sweep":
        files, diags = _cmd_sweep(cfg, model, out, tag, plot, jobs=jobs)
    else:
        files, diags = impl[command](cfg, model, out, tag, plot)
    diags["model"] = echo
    return files, diags


def _run_figure(cfg, out, plot, jobs, seed):
    name = cfg["figure"]
    preset = PRESETS[name]
    files, diags = {}, {"preset": name, "description": preset["description"],
                        "runs": []}
    for i, sub in enumerate(preset["runs"]):
        sub = json.loads(json.dumps(sub))  # deep copy, keep presets pristine
        tag = f"{name}_{i}_"
        f, d = execute(sub, out, plot=plot, jobs=jobs, seed=seed, tag=tag)
        files.update(f)
        diags["runs"].append({"config": sub, "diagnostics": d})
    return files, diags


# --- presets: one per reproduced figure panel --------------------------------

_PI = math.pi


def _ladder(t0, t1=0.5, t2=None, tp=0.5, phi=_PI / 2, gamma=0.5, L=200, bc=OBC):
    t = [t0, t1] if t2 is None else [t0, t1, t2]
    return {"kind": "ladder", "L": L, "t": t, "t_p": tp, "phi": phi,
            "gamma": gamma, "bc": bc}


_LINEAR_GAMMA = {"kind": "linear", "slope": 0.01, "offset": 0.20}
_RANDOM_GAMMA = {"kind": "random", "low": 0.4, "high": 0.6, "seed": 1}

PRESETS = {
    "fig3a": {
        "description": "OBC vs PBC spectra, nearest coupling, t0=0.3",
        "runs": [{"command": "spectrum", "model": _ladder(0.3), "compare_bc": True}],
    },
    "fig3b": {
        "description": "bulk escape profile, t0=0.3, release at 150",
        "runs": [{"command": "walk", "model": _ladder(0.3), "x0": 150}],
    },
    "fig3c": {
        "description": "edge burst profile, t0=0.3, release at 150",
        "runs": [{"command": "burst", "model": _ladder(0.3), "x0": 150}],
    },
    "fig3d": {
        "description": "no burst in the gapped regime, t0=0.6",
        "runs": [{"command": "burst", "model": _ladder(0.6), "x0": 150}],
    },
    "fig3e": {
        "description": "relative burst height against release cell, t0=0.3",
        "runs": [{"command": "sweep", "model": _ladder(0.3),
                  "sweep": {"vary": "x0", "values": list(range(40, 161, 20))}}],
    },
    "fig3f": {
        "description": "edge escape against release cell, gapped t0=0.6",
        "runs": [{"command": "sweep", "model": _ladder(0.6),
                  "sweep": {"vary": "x0", "values": list(range(40, 161, 20))}}],
    },
    "fig4a": {
        "description": "PBC spectra with second-neighbor coupling t2=0.1",
        "runs": [{"command": "spectrum", "model": _ladder(t0, t2=0.1, bc=PBC)}
                 for t0 in (0.3, 0.4, 0.5)],
    },
    "fig4b": {
        "description": "OBC spectra with second-neighbor coupling t2=0.1",
        "runs": [{"command": "spectrum", "model": _ladder(t0, t2=0.1)}
                 for t0 in (0.3, 0.4, 0.5)],
    },
    "fig4c": {
        "description": "bulk profiles, t2=0.1, power-law regime check",
        "runs": [{"command": "burst", "model": _ladder(t0, t2=0.1), "x0": 150}
                 for t0 in (0.3, 0.4)],
    },
    "fig4d": {
        "description": "bulk profile, t2=0.1, gapped regime",
        "runs": [{"command": "burst", "model": _ladder(0.5, t2=0.1), "x0": 150}],
    },
    "fig5a": {
        "description": "burst ratios against the second-neighbor coupling",
        "runs": [{"command": "sweep", "model": _ladder(0.3, t2=0.0), "x0": 150,
                  "sweep": {"vary": "t2",
                            "values": [round(0.05 * i, 2) for i in range(13)]}}],
    },
    "fig5b": {
        "description": "PBC spectra near the self-crossing transition, L=500",
        "runs": [{"command": "spectrum", "model": _ladder(0.3, t2=t2, L=500, bc=PBC),
                  "self_intersections": True, "k_samples": 1024}
                 for t2 in (0.25, 0.33, 0.50)],
    },
    "fig5c": {
        "description": "single left burst at t2=0.2",
        "runs": [{"command": "burst", "model": _ladder(0.3, t2=0.2), "x0": 150}],
    },
    "fig5d": {
        "description": "bipolar burst at t2=0.5",
        "runs": [{"command": "burst", "model": _ladder(0.3, t2=0.5), "x0": 150}],
    },
    "fig6a": {
        "description": "PBC spectra for four hopping phases",
        "runs": [{"command": "spectrum", "model": _ladder(0.3, phi=f, bc=PBC)}
                 for f in (0.0, _PI / 6, _PI / 3, _PI / 2)] +
                [{"command": "igc", "model": _ladder(0.3, phi=f, bc=PBC)}
                 for f in (0.0, _PI / 6, _PI / 3, _PI / 2)],
    },
    "fig6b": {
        "description": "burst ratios against the hopping phase",
        "runs": [{"command": "sweep", "model": _ladder(0.3), "x0": 150,
                  "sweep": {"vary": "phi",
                            "values": [round(_PI / 2 * i / 12, 10)
                                       for i in range(13)]}}],
    },
    "fig7a": {
        "description": "PBC spectra with the linearly growing loss profile",
        "runs": [{"command": "spectrum",
                  "model": _ladder(t0, gamma=_LINEAR_GAMMA, bc=PBC)}
                 for t0 in (0.3, 0.5, 0.6)],
    },
    "fig7b": {
        "description": "burst profile with the linear loss profile, t0=0.3",
        "runs": [{"command": "burst", "model": _ladder(0.3, gamma=_LINEAR_GAMMA),
                  "x0": 150}],
    },
    "fig7c": {
        "description": "bulk profiles with linear loss, power-law regime",
        "runs": [{"command": "burst", "model": _ladder(t0, gamma=_LINEAR_GAMMA),
                  "x0": 150} for t0 in (0.3, 0.5)],
    },
    "fig7d": {
        "description": "bulk profile with linear loss, gapped regime",
        "runs": [{"command": "burst", "model": _ladder(0.6, gamma=_LINEAR_GAMMA),
                  "x0": 150}],
    },
    "fig8b": {
        "description": "damping-matrix spectra, random loss rates in (0.4, 0.6)",
        "runs": [{"command": "liouville",
                  "model": _ladder(t0, gamma=_RANDOM_GAMMA, bc=bc)}
                 for t0 in (0.3, 0.6) for bc in (OBC, PBC)],
    },
    "fig8c": {
        "description": "escape profile vs steady density, random loss rates",
        "runs": [{"command": "burst", "model": _ladder(0.3, gamma=_RANDOM_GAMMA),
                  "x0": 150},
                 {"command": "liouville", "model": _ladder(0.3, gamma=_RANDOM_GAMMA),
                  "x0": 150}],
    },
}


def presets():
    """Names and descriptions of the built-in figure reproductions."""
    return {name: p["description"] for name, p in PRESETS.items()}


# --- entry point --------------------------------------------------------------

def _apply_override(cfg, key, value):
    try:
        parsed = json.loads(value)
    except json.JSONDecodeError:
        parsed = value
    parts = key.split(".")
    node = cfg
    for part in parts[:-1]:
        if not isinstance(node.get(part), dict):
            node[part] = {}
        node = node[part]
    node[parts[-1]] = parsed


def _error_record(status, kind, message):
    return json.dumps({"error": {"status": status, "kind": kind,
                                 "message": message}}, indent=2)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="igclab",
        description="dissipative-lattice experiments from JSON configs")
    ap.add_argument("--config", help="path to a JSON experiment config")
    ap.add_argument("--out", default="igclab_out", help="output directory")
    ap.add_argument("--plot", action="store_true", help="also write SVG plots")
    ap.add_argument("--jobs", type=int, default=1, help="sweep worker count")
    ap.add_argument("--seed", type=int, default=None,
                    help="seed for random loss profiles without one")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                    help="override a config field (dotted path, repeatable)")
    ap.add_argument("--list-presets", action="store_true",
                    help="print the built-in figure presets and exit")
    args = ap.parse_args(argv)

    if args.list_presets:
        for name, desc in sorted(presets().items()):
            print(f"{name:8s} {desc}")
        return 0
    if not args.config:
        print(_error_record(2, "config", "--config is required"), file=sys.stderr)
        return 2
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        print(_error_record(4, "io", f"cannot read config: {exc}"), file=sys.stderr)
        return 4
    except json.JSONDecodeError as exc:
        print(_error_record(2, "config", f"config is not valid JSON: {exc}"),
              file=sys.stderr)
        return 2
    try:
        for item in args.set:
            if "=" not in item:
                raise ConfigError(f"--set needs KEY=VALUE, got {item!r}")
            _apply_override(cfg, *item.split("=", 1))
        started = time.time()
        files, diags = execute(cfg, args.out, plot=args.plot, jobs=args.jobs,
                               seed=args.seed)
        record = {
            "tool": "igclab",
            "version": __version__,
            "config": cfg,
            "seed": args.seed,
            "wall_time_s": round(time.time() - started, 3),
            "diagnostics": diags,
            "outputs": files,
        }
        out = Path(args.out)
        missing = [f for f in files
                   if not Path(f).is_file() or Path(f).stat().st_size == 0]
        if missing:
            raise RunFailure(f"missing or empty outputs: {missing}")
        with open(out / "run.json", "w", encoding="utf-8") as fh:
            json.dump(record, fh, indent=2, default=str)
            fh.write("\n")
    except ConfigError as exc:
        print(_error_record(2, "config", str(exc)), file=sys.stderr)
        return 2
    except OSError as exc:
        print(_error_record(4, "io", str(exc)), file=sys.stderr)
        return 4
    except Exception as exc:  # numerical failures: report, do not traceback
        print(_error_record(3, "numerical", f"{type(exc).__name__}: {exc}"),
              file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())

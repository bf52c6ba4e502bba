"""Configuration ingestion, named experiments, and CSV/SVG emission.

Every experiment writes ``<experiment>.csv`` (17 significant digits, '.'
decimal separator), optionally ``<experiment>.svg`` (a plain polyline chart,
no external renderer), and ``run_meta.json`` with the echoed configuration,
package version, and timings.  CSV bytes are deterministic for a fixed
configuration; the seed only feeds randomized helper experiments and is
recorded for provenance.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .errors import ConfigInvalid, HolonomyError
from .manifold import (
    DEFAULT_SAMPLES,
    LoopSpec,
    StandardLoopParams,
    circle_loop,
    standard_parameter_loops,
    subsystem_parameter_loop,
)
from .models import CoupledGHOHybrid, SpinOscillatorHybrid, cone_loop, spin_hamiltonian_family
from .hybrid_pipeline import (
    BRANCH_COMMON,
    bo_full_quantum_phase,
    bo_full_quantum_phase_parts,
    coupled_gho_one_form,
    elliptic_bound,
    full_quantum_phase,
    phases_from_one_form,
    spin_oscillator_one_form,
    standard_loop_report,
)
from .quantum_geometry import berry_and_hannay, eigenframe_along_loop, spin_hannay_closed_form
from .dynamics_oracle import (
    action_angle_to_qp,
    extract_geometric_phase,
    extract_hannay_angle,
    propagate_classical,
    propagate_quantum,
    recommended_steps_per_sample,
)

EXPERIMENTS = (
    "spin-berry",
    "gho-uncoupled",
    "hybrid-spin-osc",
    "hybrid-gho",
    "full-quantum",
    "oracle-quantum",
    "oracle-classical",
    "fig1",
    "fig2",
)

_FIG_RATIOS = ((1, 1), (2, 1), (1, 2))


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.16e}"
    return str(value)


@dataclass
class ExperimentConfig:
    """A validated experiment description."""

    experiment: str
    params: dict[str, Any] = field(default_factory=dict)
    sweep: dict[str, Any] | None = None
    numerics: dict[str, Any] = field(default_factory=dict)
    output_dir: str = "out"
    emit_svg: bool = False
    seed: int = 0

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigInvalid("configuration must be a JSON object")
        exp = raw.get("experiment")
        if exp not in EXPERIMENTS:
            raise ConfigInvalid(f"experiment must be one of {EXPERIMENTS}, got {exp!r}")
        sweep = raw.get("sweep")
        if sweep is not None:
            for key in ("parameter", "start", "stop", "count"):
                if key not in sweep:
                    raise ConfigInvalid(f"sweep is missing {key!r}")
            if int(sweep["count"]) < 2:
                raise ConfigInvalid("sweep count must be at least 2")
            if sweep.get("scale", "linear") not in ("linear", "log"):
                raise ConfigInvalid("sweep scale must be 'linear' or 'log'")
        numerics = raw.get("numerics", {})
        if not isinstance(numerics, dict):
            raise ConfigInvalid("numerics must be an object")
        output = raw.get("output", {})
        return cls(
            experiment=exp,
            params=raw.get("params", {}),
            sweep=sweep,
            numerics=numerics,
            output_dir=str(output.get("directory", "out")),
            emit_svg=bool(output.get("emit_svg", False)),
            seed=int(raw.get("seed", 0)),
        )

    @classmethod
    def from_path(cls, path: str | Path) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigInvalid(f"cannot read configuration: {exc}") from exc
        return cls.from_dict(raw)

    def n_samples(self) -> int:
        return int(self.numerics.get("n_samples", DEFAULT_SAMPLES))

    def slowness(self) -> float:
        return float(self.numerics.get("slowness", 1000.0))

    def as_dict(self) -> dict[str, Any]:
        return {
            "experiment": self.experiment,
            "params": self.params,
            "sweep": self.sweep,
            "numerics": self.numerics,
            "output": {"directory": self.output_dir, "emit_svg": self.emit_svg},
            "seed": self.seed,
        }


def _sweep_values(cfg: ExperimentConfig, parameter: str | None = None) -> np.ndarray | None:
    if cfg.sweep is None:
        return None
    if parameter is not None and cfg.sweep["parameter"] != parameter:
        raise ConfigInvalid(
            f"experiment {cfg.experiment!r} sweeps over {parameter!r}, "
            f"not {cfg.sweep['parameter']!r}"
        )
    start, stop = float(cfg.sweep["start"]), float(cfg.sweep["stop"])
    count = int(cfg.sweep["count"])
    if cfg.sweep.get("scale", "linear") == "log":
        if start <= 0 or stop <= 0:
            raise ConfigInvalid("log sweeps need positive endpoints")
        return np.geomspace(start, stop, count)
    return np.linspace(start, stop, count)


def _standard_params(params: dict[str, Any], **overrides: Any) -> StandardLoopParams:
    merged = {
        "a1": 1.0,
        "a2": 1.0,
        "mu1": 1.0,
        "mu2": 1.0,
        "n1": 1,
        "n2": 1,
        "base_rate": 1.0,
        "epsilon": math.sqrt(3.0) / 2.0,
        "k": 0.0,
        "j_action": 1.0,
        "hbar": 1.0,
        "n_level": 0,
    }
    merged.update({k: v for k, v in params.items() if k in merged})
    merged.update(overrides)
    merged["n1"] = int(merged["n1"])
    merged["n2"] = int(merged["n2"])
    merged["n_level"] = int(merged["n_level"])
    try:
        return StandardLoopParams(**merged)
    except ValueError as exc:
        raise ConfigInvalid(str(exc)) from exc


def _hybrid_gho_row(p: StandardLoopParams, n_samples: int) -> dict[str, Any]:
    report = standard_loop_report(p, n_samples)
    n = p.n_level
    return {
        "K": p.k,
        "branch": report.branch,
        "gamma_0": report.gamma[n],
        "gamma_00": report.gamma_0_part,
        "gamma_I": report.gamma_I_part,
        "delta_phi": report.delta_phi,
        "delta_phi_0": report.delta_phi_0_part,
        "delta_phi_I": report.delta_phi_I_part,
        "gamma_I_approx": report.gamma_I_approx,
        "delta_phi_I_approx": report.delta_phi_I_approx,
        "elliptic_margin": report.elliptic_margin,
        "quadrature_error": report.quadrature_error,
    }


def _run_hybrid_gho(cfg: ExperimentConfig) -> tuple[list[str], list[dict[str, Any]]]:
    base = _standard_params(cfg.params)
    grid = _sweep_values(cfg, parameter="k")
    if grid is None:
        grid = np.array([base.k])
    header = [
        "ratio", "K", "branch", "gamma_0", "gamma_00", "gamma_I", "delta_phi",
        "delta_phi_0", "delta_phi_I", "gamma_I_approx", "delta_phi_I_approx",
        "elliptic_margin", "quadrature_error", "error",
    ]
    rows = []
    for kval in grid:
        row: dict[str, Any] = {"ratio": f"{base.n1}/{base.n2}", "error": ""}
        try:
            p = _standard_params(cfg.params, k=float(kval))
            row.update(_hybrid_gho_row(p, cfg.n_samples()))
        except HolonomyError as exc:
            row["error"] = type(exc).__name__
        rows.append(row)
    return header, rows


def _run_fig(cfg: ExperimentConfig, which: int) -> tuple[list[str], list[dict[str, Any]]]:
    params = dict(cfg.params)
    params.setdefault("a1", 1.0)
    params.setdefault("a2", params["a1"] / float(params.pop("a1_over_a2", 1e8)))
    params.setdefault("j_action", float(params.pop("j_over_hbar", 1e13)))
    count = int(cfg.sweep["count"]) if cfg.sweep else 50
    k_lo_frac = float(params.pop("k_min_fraction", 1e-4))
    k_hi_frac = float(params.pop("k_max_fraction", 0.95))
    ratios = params.pop("ratios", [list(r) for r in _FIG_RATIOS])
    if which == 1:
        header = ["ratio", "K", "branch", "gamma_0", "gamma_00", "gamma_I", "error"]
    else:
        header = ["ratio", "K", "branch", "delta_phi_I", "gamma_I", "delta_phi_0", "error"]
    rows = []
    for n1, n2 in ratios:
        p0 = _standard_params(params, n1=int(n1), n2=int(n2), k=0.0)
        _, k_max = elliptic_bound(p0)
        for kval in np.geomspace(k_lo_frac * k_max, k_hi_frac * k_max, count):
            row: dict[str, Any] = {"ratio": f"{int(n1)}/{int(n2)}", "error": ""}
            try:
                p = _standard_params(params, n1=int(n1), n2=int(n2), k=float(kval))
                full = _hybrid_gho_row(p, cfg.n_samples())
                row["K"] = full["K"]
                row["branch"] = full["branch"]
                if which == 1:
                    row["gamma_0"] = full["gamma_0"]
                    row["gamma_00"] = full["gamma_00"]
                    row["gamma_I"] = full["gamma_I"]
                else:
                    row["delta_phi_I"] = full["delta_phi_I"]
                    row["gamma_I"] = full["gamma_I"]
                    row["delta_phi_0"] = full["delta_phi_0"]
            except HolonomyError as exc:
                row["K"] = float(kval)
                row["branch"] = BRANCH_COMMON
                row["error"] = type(exc).__name__
            rows.append(row)
    return header, rows


def _run_spin_berry(cfg: ExperimentConfig) -> tuple[list[str], list[dict[str, Any]]]:
    mu = float(cfg.params.get("mu", 1.0))
    b = float(cfg.params.get("b_magnitude", 1.0))
    thetas = cfg.params.get("thetas", [math.pi / 6, math.pi / 3, math.pi / 2, 2 * math.pi / 3])
    cycles = int(cfg.params.get("cycles", 1))
    n_samples = cfg.n_samples()
    family = spin_hamiltonian_family(mu)
    header = [
        "theta", "gamma_1", "gamma_2", "delta_theta_1", "delta_theta_2",
        "closed_form_1", "closed_form_2", "abs_err_1", "abs_err_2", "error",
    ]
    rows = []
    for theta in thetas:
        row: dict[str, Any] = {"theta": float(theta), "error": ""}
        try:
            loop = cone_loop(float(theta), b=b, n_samples=n_samples, cycles=cycles)
            frame = eigenframe_along_loop(family, loop)
            g1, d1 = berry_and_hannay(frame, 0)
            g2, d2 = berry_and_hannay(frame, 1)
            c1 = spin_hannay_closed_form(loop, 1)
            c2 = spin_hannay_closed_form(loop, 2)
            row.update(
                gamma_1=g1, gamma_2=g2, delta_theta_1=d1, delta_theta_2=d2,
                closed_form_1=c1, closed_form_2=c2,
                abs_err_1=abs(d1 - c1), abs_err_2=abs(d2 - c2),
            )
        except HolonomyError as exc:
            row["error"] = type(exc).__name__
        rows.append(row)
    return header, rows


def _run_gho_uncoupled(cfg: ExperimentConfig) -> tuple[list[str], list[dict[str, Any]]]:
    eps_list = cfg.params.get("epsilons", [0.1, 0.5, math.sqrt(3.0) / 2.0])
    n_samples = cfg.n_samples()
    header = [
        "epsilon", "gamma_00_closed", "gamma_00_quadrature", "abs_err",
        "delta_phi_0", "correspondence_residual", "error",
    ]
    rows = []
    for eps in eps_list:
        row: dict[str, Any] = {"epsilon": float(eps), "error": ""}
        try:
            p = _standard_params(cfg.params, epsilon=float(eps), k=0.0)
            report = standard_loop_report(p, n_samples, branch=BRANCH_COMMON)
            phases = phases_from_one_form(coupled_gho_one_form(CoupledGHOHybrid(p), n_samples))
            closed = report.gamma_0_part
            quad = phases.gammas[p.n_level]
            corr = closed + (p.n_level + 0.5) * (p.omega1 / p.omega2) * report.delta_phi_0_part
            row.update(
                gamma_00_closed=closed,
                gamma_00_quadrature=quad,
                abs_err=abs(closed - quad),
                delta_phi_0=report.delta_phi_0_part,
                correspondence_residual=corr,
            )
        except HolonomyError as exc:
            row["error"] = type(exc).__name__
        rows.append(row)
    return header, rows


def _run_hybrid_spin_osc(cfg: ExperimentConfig) -> tuple[list[str], list[dict[str, Any]]]:
    params = cfg.params
    n_samples = cfg.n_samples()
    lam_list = params.get("lambdas", [0.0, 0.02, 0.05])
    a = float(params.get("a", 1.0))
    m_param = float(params.get("m", 1.0))
    eps = float(params.get("epsilon", 0.5))
    b = float(params.get("b_magnitude", 1.0))
    j_action = float(params.get("j_action", 1.0))
    i_plus = float(params.get("i_plus", 1.0))
    i_minus = float(params.get("i_minus", 0.0))
    period = 2.0 * math.pi / float(params.get("omega", 1.0))
    t = np.linspace(0.0, period, n_samples + 1)
    w = 2.0 * math.pi / period
    x = a * m_param * (1.0 + eps * np.cos(w * t))
    y = -a * eps * np.sin(w * t)
    z = (a / m_param) * (1.0 - eps * np.cos(w * t))
    pts = np.column_stack([x, y, z])
    pts[-1] = pts[0]
    x_loop = LoopSpec(period, t, pts, cycles=1)
    phi_loop = circle_loop(period=period, n_samples=n_samples)
    header = ["lambda", "gamma_plus", "gamma_minus", "delta_phi", "quadrature_error", "error"]
    rows = []
    for lam in lam_list:
        row: dict[str, Any] = {"lambda": float(lam), "error": ""}
        try:
            hybrid = SpinOscillatorHybrid(
                mu=float(params.get("mu", 1.0)),
                lam=float(lam),
                b_field=b,
                phi_loop=phi_loop,
                x_loop=x_loop,
                i_plus=i_plus,
                i_minus=i_minus,
                j_action=j_action,
            )
            phases = phases_from_one_form(spin_oscillator_one_form(hybrid))
            row.update(
                gamma_plus=phases.gammas["+"],
                gamma_minus=phases.gammas["-"],
                delta_phi=phases.delta_phi,
                quadrature_error=phases.quadrature_error,
            )
        except HolonomyError as exc:
            row["error"] = type(exc).__name__
        rows.append(row)
    return header, rows


def _run_full_quantum(cfg: ExperimentConfig) -> tuple[list[str], list[dict[str, Any]]]:
    base = _standard_params(cfg.params)
    m_level = int(cfg.params.get("m_level", 0))
    n_level = int(cfg.params.get("n_level", 0))
    n_samples = cfg.n_samples()
    grid = _sweep_values(cfg, parameter="k")
    if grid is None:
        grid = np.array([base.k])
    header = ["K", "gamma_mn", "bo_gamma_mn", "hybrid_gamma_n", "abs_err_bo_vs_hybrid", "error"]
    rows = []
    for kval in grid:
        row: dict[str, Any] = {"K": float(kval), "error": ""}
        try:
            p = _standard_params(cfg.params, k=float(kval), n_level=n_level,
                                 j_action=(m_level + 0.5) * float(cfg.params.get("hbar", 1.0)))
            loop1, loop2 = standard_parameter_loops(p, n_samples)
            gamma_mn = full_quantum_phase(loop1, loop2, p.k, m_level, n_level)
            bo = bo_full_quantum_phase(loop1, loop2, p.k, m_level, n_level, p.hbar)
            phases = phases_from_one_form(coupled_gho_one_form(CoupledGHOHybrid(p), n_samples))
            hybrid_gamma = phases.gammas[n_level]
            part1, _ = bo_full_quantum_phase_parts(loop1, loop2, p.k, m_level, n_level, p.hbar)
            row.update(
                gamma_mn=gamma_mn,
                bo_gamma_mn=bo,
                hybrid_gamma_n=hybrid_gamma,
                abs_err_bo_vs_hybrid=abs(part1 - hybrid_gamma),
            )
        except HolonomyError as exc:
            row["error"] = type(exc).__name__
        rows.append(row)
    return header, rows


def _run_oracle_quantum(cfg: ExperimentConfig) -> tuple[list[str], list[dict[str, Any]]]:
    slowness = cfg.slowness()
    n_samples = int(cfg.numerics.get("n_samples", 256))
    mu = float(cfg.params.get("mu", 1.0))
    thetas = cfg.params.get("thetas", [math.pi / 2, math.pi / 3])
    family = spin_hamiltonian_family(mu)
    header = [
        "theta", "level", "slowness", "gamma_numeric", "gamma_wilson",
        "abs_error", "norm_drift", "final_fidelity", "error",
    ]
    rows = []
    for theta in thetas:
        row: dict[str, Any] = {"theta": float(theta), "level": 0, "slowness": slowness, "error": ""}
        try:
            loop = cone_loop(float(theta), n_samples=n_samples)
            frame = eigenframe_along_loop(family, loop)
            gamma_w, _ = berry_and_hannay(frame, 0)
            sps = int(
                cfg.numerics.get(
                    "steps_per_sample",
                    recommended_steps_per_sample(loop, slowness, rate_scale=mu),
                )
            )
            prop = propagate_quantum(family, loop, 0, slowness, sps)
            gamma_n = extract_geometric_phase(prop, prop.psi_initial)
            row.update(
                gamma_numeric=gamma_n,
                gamma_wilson=gamma_w,
                abs_error=abs(gamma_n - gamma_w),
                norm_drift=prop.norm_drift,
                final_fidelity=prop.final_fidelity,
            )
        except HolonomyError as exc:
            row["error"] = type(exc).__name__
        rows.append(row)
    return header, rows


def _run_oracle_classical(cfg: ExperimentConfig) -> tuple[list[str], list[dict[str, Any]]]:
    slowness = cfg.slowness()
    n_samples = int(cfg.numerics.get("n_samples", 256))
    eps_list = cfg.params.get("epsilons", [math.sqrt(3.0) / 2.0])
    header = [
        "epsilon", "slowness", "delta_phi_numeric", "delta_phi_quadrature",
        "abs_error", "j_drift", "error",
    ]
    rows = []
    for eps in eps_list:
        row: dict[str, Any] = {"epsilon": float(eps), "slowness": slowness, "error": ""}
        try:
            p = _standard_params(cfg.params, epsilon=float(eps), k=0.0)
            loop = subsystem_parameter_loop(p, 2, n_samples)
            report = standard_loop_report(p, max(DEFAULT_SAMPLES, n_samples))
            sps = int(
                cfg.numerics.get(
                    "steps_per_sample",
                    recommended_steps_per_sample(loop, slowness, rate_scale=p.a2),
                )
            )
            qp0 = action_angle_to_qp(loop.points[0], float(cfg.params.get("j0", 1.0)),
                                     float(cfg.params.get("phi0", 0.3)))
            traj = propagate_classical(loop, qp0, slowness, sps)
            dphi_num = extract_hannay_angle(traj)
            dphi_quad = report.delta_phi_0_part
            row.update(
                delta_phi_numeric=dphi_num,
                delta_phi_quadrature=dphi_quad,
                abs_error=abs(dphi_num - dphi_quad),
                j_drift=traj.action_drift,
            )
        except HolonomyError as exc:
            row["error"] = type(exc).__name__
        rows.append(row)
    return header, rows


_RUNNERS = {
    "spin-berry": _run_spin_berry,
    "gho-uncoupled": _run_gho_uncoupled,
    "hybrid-spin-osc": _run_hybrid_spin_osc,
    "hybrid-gho": _run_hybrid_gho,
    "full-quantum": _run_full_quantum,
    "oracle-quantum": _run_oracle_quantum,
    "oracle-classical": _run_oracle_classical,
    "fig1": lambda cfg: _run_fig(cfg, 1),
    "fig2": lambda cfg: _run_fig(cfg, 2),
}


def _write_csv(path: Path, header: list[str], rows: list[dict[str, Any]]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row.get(col, "")) for col in header])


def _write_svg(path: Path, header: list[str], rows: list[dict[str, Any]], experiment: str) -> None:
    """A minimal polyline chart of the second numeric column against the first."""
    numeric_cols = [c for c in header if c not in ("ratio", "branch", "error", "level")]
    if len(numeric_cols) < 2:
        return
    xcol, ycol = numeric_cols[0], numeric_cols[1]
    series: dict[str, list[tuple[float, float]]] = {}
    for row in rows:
        if row.get("error"):
            continue
        key = str(row.get("ratio", ""))
        try:
            series.setdefault(key, []).append((float(row[xcol]), float(row[ycol])))
        except (KeyError, TypeError, ValueError):
            continue
    pts_all = [p for pts in series.values() for p in pts]
    if not pts_all:
        return
    xs = [p[0] for p in pts_all]
    ys = [p[1] for p in pts_all]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    width, height, margin = 640, 420, 60
    sx = (width - 2 * margin) / (x1 - x0 if x1 > x0 else 1.0)
    sy = (height - 2 * margin) / (y1 - y0 if y1 > y0 else 1.0)

    def to_px(x: float, y: float) -> tuple[float, float]:
        return margin + (x - x0) * sx, height - margin - (y - y0) * sy

    colors = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>',
        f'<text x="{width // 2}" y="{height - 15}" text-anchor="middle">{xcol}</text>',
        f'<text x="18" y="{height // 2}" text-anchor="middle" '
        f'transform="rotate(-90 18 {height // 2})">{ycol}</text>',
        f'<text x="{width // 2}" y="25" text-anchor="middle">{experiment}</text>',
    ]
    for i, (key, pts) in enumerate(sorted(series.items())):
        pts = sorted(pts)
        path_d = " ".join(f"{to_px(x, y)[0]:.2f},{to_px(x, y)[1]:.2f}" for x, y in pts)
        color = colors[i % len(colors)]
        parts.append(f'<polyline fill="none" stroke="{color}" points="{path_d}"/>')
        if key:
            parts.append(
                f'<text x="{width - margin + 4}" y="{margin + 16 * i}" fill="{color}" '
                f'font-size="12">{key}</text>'
            )
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n")


def execute(cfg: ExperimentConfig) -> int:
    """Run one experiment configuration; returns the process exit code."""
    t_start = time.perf_counter()
    runner = _RUNNERS[cfg.experiment]
    header, rows = runner(cfg)
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{cfg.experiment}.csv"
    _write_csv(csv_path, header, rows)
    if cfg.emit_svg:
        _write_svg(out_dir / f"{cfg.experiment}.svg", header, rows, cfg.experiment)
    meta = {
        "version": __version__,
        "config": cfg.as_dict(),
        "rows": len(rows),
        "failed_rows": sum(1 for r in rows if r.get("error")),
        "elapsed_seconds": time.perf_counter() - t_start,
    }
    (out_dir / "run_meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    label_cols = [c for c in header[:3] if c != "error"]
    for i, row in enumerate(rows):
        tag = " ".join(f"{c}={row.get(c, '')}" for c in label_cols)
        status = row.get("error") or "ok"
        print(f"{cfg.experiment} [{i + 1}/{len(rows)}] {tag}: {status}")
    print(f"wrote {csv_path}")
    return 0


def _fig_config(which: int, out_dir: str, emit_svg: bool, count: int = 50) -> ExperimentConfig:
    # K grids are derived per ratio from the elliptic bound; the sweep entry
    # records the fractions of K_max that the grid spans.
    return ExperimentConfig(
        experiment=f"fig{which}",
        params={},
        sweep={"parameter": "k_fraction_of_max", "start": 1e-4, "stop": 0.95,
               "count": count, "scale": "log"},
        numerics={"n_samples": DEFAULT_SAMPLES},
        output_dir=out_dir,
        emit_svg=emit_svg,
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="holonomy",
        description="Geometric phases and angle shifts for driven quantum, "
        "classical, and hybrid systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment described by a JSON config")
    p_run.add_argument("config", help="path to the configuration file")

    for which in (1, 2):
        p_fig = sub.add_parser(f"fig{which}", help=f"reproduce the coupling sweep figure {which}")
        p_fig.add_argument("--out", default="out", help="output directory")
        p_fig.add_argument("--points", type=int, default=50, help="sweep points per ratio")
        p_fig.add_argument("--emit-svg", action="store_true")

    p_or = sub.add_parser("oracle", help="time-domain oracle comparisons")
    p_or.add_argument("kind", choices=("quantum", "classical"))
    p_or.add_argument("--slowness", type=float, default=1000.0)
    p_or.add_argument("--samples", type=int, default=256)
    p_or.add_argument("--seed", type=int, default=0)
    p_or.add_argument("--out", default="out")
    p_or.add_argument("--emit-svg", action="store_true")

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            cfg = ExperimentConfig.from_path(args.config)
        elif args.command in ("fig1", "fig2"):
            cfg = _fig_config(int(args.command[-1]), args.out, args.emit_svg, args.points)
        else:
            cfg = ExperimentConfig(
                experiment=f"oracle-{args.kind}",
                numerics={"slowness": args.slowness, "n_samples": args.samples},
                output_dir=args.out,
                emit_svg=args.emit_svg,
                seed=args.seed,
            )
        return execute(cfg)
    except ConfigInvalid as exc:
        print(json.dumps({"error": "ConfigInvalid", "detail": str(exc)}), file=sys.stderr)
        return 2
    except HolonomyError as exc:
        print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())

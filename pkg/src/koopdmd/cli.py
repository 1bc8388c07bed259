"""Command line pipeline: simulate or ingest, embed, decompose, report.

    koopdmd run <config.json | recipe-name> [--out DIR] [--seed N]
                [--threshold X] [--threshold-mode abs|rel]
    koopdmd recipes
    koopdmd --version

A run reads one JSON config (schema documented in the README and mirrored
by the dataclasses below), executes the pipeline, and writes its
artifacts into the output directory: trajectory and observable CSVs,
Hankel metadata, POD and DMD serializations, a frequency table when
basic frequencies are configured, and a per-state phase table when
requested. Identical config and seed produce byte-identical outputs.

Exit codes: 0 success, 2 configuration problem, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__, analysis, dmd, embed, pod, systems
from .errors import ConfigError, KoopdmdError, NumericalError
from .ioutil import write_json

#: Eigenvalues with |omega| below this are treated as trivial (DC-like)
#: when selecting the dominant mode for phase export.
MIN_NONTRIVIAL_OMEGA = 1e-2


# ----------------------------------------------------------------------
# Configuration


@dataclass(frozen=True)
class SystemConfig:
    kind: str
    params: dict
    z0s: tuple | None  # tuple of state tuples, or None for seeded default
    dt: float
    steps: int
    skip: int = 0
    seed: int = 0


@dataclass(frozen=True)
class SuiteConfig:
    kind: str = "equivalence"
    count: int = 20
    dim: int = 4
    seed_base: int = 0
    tol: float = 1e-8


@dataclass(frozen=True)
class EmbeddingConfig:
    m: int
    n: int
    stride: int = 1
    interleave: bool = False
    scale_mode: str = "last_column"


@dataclass(frozen=True)
class DmdConfig:
    algorithm: str = "hankel"
    svd_threshold: float = dmd.DEFAULT_HANKEL_THRESHOLD
    threshold_mode: str = "abs"
    sqrt_m_scaling: bool = False


@dataclass(frozen=True)
class AnalysisConfig:
    basics: tuple[float, ...] | None = None
    K: int = 6
    dt_override: float | None = None
    export_phase: bool = False


@dataclass(frozen=True)
class RunConfig:
    """Validated run description; exactly one of system/csv/suite is set."""

    output_dir: str
    system: SystemConfig | None = None
    csv: str | None = None
    suite: SuiteConfig | None = None
    observables: tuple[systems.Observable, ...] = ()
    embedding: EmbeddingConfig | None = None
    dmd: DmdConfig = field(default_factory=DmdConfig)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    recipe: str | None = None


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


def _take(d: dict, section: str, known: tuple[str, ...]) -> None:
    unknown = sorted(set(d) - set(known))
    _require(not unknown, f"{section}: unknown keys {unknown} (known: {sorted(known)})")


def _parse_system(d: dict) -> SystemConfig:
    _take(d, "system", ("kind", "z0", "dt", "steps", "skip", "seed",
                        "sigma", "rho", "beta", "mu", "omega", "omega1", "omega2", "matrix"))
    kind = d.get("kind")
    _require(isinstance(kind, str) and kind in systems.FLOW_KINDS + systems.MAP_KINDS,
             f"system.kind: expected one of {systems.FLOW_KINDS + systems.MAP_KINDS}, got {kind!r}")
    params = {}
    for p in {"lorenz": ("sigma", "rho", "beta"), "vanderpol": ("mu",), "circle": ("omega",),
              "torus": ("omega1", "omega2"), "linear": ("matrix",)}[kind]:
        _require(p in d, f"system.{p}: required for kind={kind}")
        params[p] = d[p]
    z0 = d.get("z0")
    if z0 is None:
        _require(kind == "lorenz",
                 "system.z0: required (only the lorenz kind has a seeded default)")
        z0s = None
    else:
        _require(isinstance(z0, list) and z0, "system.z0: non-empty list expected")
        if isinstance(z0[0], (int, float)):
            z0 = [z0]
        z0s = tuple(tuple(float(v) for v in state) for state in z0)
    dt = d.get("dt")
    _require(isinstance(dt, (int, float)) and dt > 0, f"system.dt: positive number required, got {dt!r}")
    steps = d.get("steps")
    _require(isinstance(steps, int) and steps >= 1, f"system.steps: integer >= 1 required, got {steps!r}")
    skip = d.get("skip", 0)
    _require(isinstance(skip, int) and 0 <= skip < steps,
             f"system.skip: integer in [0, steps) required, got {skip!r}")
    seed = d.get("seed", 0)
    _require(isinstance(seed, int), f"system.seed: integer required, got {seed!r}")
    return SystemConfig(kind=kind, params=params, z0s=z0s, dt=float(dt),
                        steps=steps, skip=skip, seed=seed)


def _parse_suite(d: dict) -> SuiteConfig:
    _take(d, "suite", ("kind", "count", "dim", "seed_base", "tol"))
    kind = d.get("kind", "equivalence")
    _require(kind == "equivalence", f"suite.kind: only 'equivalence' exists, got {kind!r}")
    count = d.get("count", 20)
    dim = d.get("dim", 4)
    seed_base = d.get("seed_base", 0)
    tol = d.get("tol", 1e-8)
    _require(isinstance(count, int) and count >= 1, f"suite.count: integer >= 1, got {count!r}")
    _require(isinstance(dim, int) and dim >= 2, f"suite.dim: integer >= 2, got {dim!r}")
    _require(isinstance(seed_base, int), f"suite.seed_base: integer, got {seed_base!r}")
    _require(isinstance(tol, (int, float)) and tol > 0, f"suite.tol: positive number, got {tol!r}")
    return SuiteConfig(kind=kind, count=count, dim=dim, seed_base=seed_base, tol=float(tol))


def _parse_observable(i: int, d: dict) -> systems.Observable:
    _take(d, f"observables[{i}]", ("kind", "index", "indices", "expression", "label"))
    try:
        return systems.Observable(
            kind=d.get("kind", ""),
            index=d.get("index", 0),
            indices=tuple(d.get("indices", ())),
            expression=d.get("expression", ""),
            label=d.get("label", ""),
        )
    except ValueError as exc:
        raise ConfigError(f"observables[{i}]: {exc}") from None


def _parse_embedding(d: dict) -> EmbeddingConfig:
    _take(d, "embedding", ("m", "n", "stride", "interleave", "scale_mode"))
    m, n = d.get("m"), d.get("n")
    _require(isinstance(m, int) and m >= 1, f"embedding.m: integer >= 1 required, got {m!r}")
    _require(isinstance(n, int) and n >= 0, f"embedding.n: integer >= 0 required, got {n!r}")
    stride = d.get("stride", 1)
    _require(isinstance(stride, int) and stride >= 1, f"embedding.stride: integer >= 1, got {stride!r}")
    interleave = d.get("interleave", False)
    _require(isinstance(interleave, bool), "embedding.interleave: true/false expected")
    scale_mode = d.get("scale_mode", "last_column")
    _require(scale_mode in ("last_column", "norm_balance"),
             f"embedding.scale_mode: 'last_column' or 'norm_balance', got {scale_mode!r}")
    return EmbeddingConfig(m=m, n=n, stride=stride, interleave=interleave, scale_mode=scale_mode)


def _parse_dmd(d: dict) -> DmdConfig:
    _take(d, "dmd", ("algorithm", "svd_threshold", "threshold_mode", "sqrt_m_scaling"))
    algorithm = d.get("algorithm", "hankel")
    _require(algorithm in dmd.ALGORITHMS,
             f"dmd.algorithm: expected one of {dmd.ALGORITHMS}, got {algorithm!r}")
    thr = d.get("svd_threshold", dmd.DEFAULT_HANKEL_THRESHOLD)
    _require(isinstance(thr, (int, float)) and thr >= 0 and math.isfinite(thr),
             f"dmd.svd_threshold: finite number >= 0 required, got {thr!r}")
    mode = d.get("threshold_mode", "abs")
    _require(mode in ("abs", "rel"), f"dmd.threshold_mode: 'abs' or 'rel', got {mode!r}")
    sqrt_m = d.get("sqrt_m_scaling", False)
    _require(isinstance(sqrt_m, bool), "dmd.sqrt_m_scaling: true/false expected")
    return DmdConfig(algorithm=algorithm, svd_threshold=float(thr),
                     threshold_mode=mode, sqrt_m_scaling=sqrt_m)


def _parse_analysis(d: dict) -> AnalysisConfig:
    _take(d, "analysis", ("basics", "K", "dt_override", "export_phase"))
    basics = d.get("basics")
    if basics is not None:
        _require(isinstance(basics, list) and basics
                 and all(isinstance(b, (int, float)) for b in basics),
                 "analysis.basics: list of numbers expected")
        basics = tuple(float(b) for b in basics)
    K = d.get("K", 6)
    _require(isinstance(K, int) and K >= 0, f"analysis.K: integer >= 0, got {K!r}")
    dt_override = d.get("dt_override")
    if dt_override is not None:
        _require(isinstance(dt_override, (int, float)) and dt_override > 0,
                 f"analysis.dt_override: positive number or null, got {dt_override!r}")
        dt_override = float(dt_override)
    export_phase = d.get("export_phase", False)
    _require(isinstance(export_phase, bool), "analysis.export_phase: true/false expected")
    return AnalysisConfig(basics=basics, K=K, dt_override=dt_override, export_phase=export_phase)


def parse_config(raw: dict, recipe: str | None = None) -> RunConfig:
    """Validate a raw config dict into a RunConfig (raises ConfigError)."""
    _require(isinstance(raw, dict), "config root must be a JSON object")
    _take(raw, "config", ("system", "csv", "suite", "observables", "embedding",
                          "dmd", "analysis", "output_dir"))
    present = [k for k in ("system", "csv", "suite") if raw.get(k) is not None]
    _require(len(present) == 1,
             f"exactly one of system/csv/suite must be present, got {present or 'none'}")
    output_dir = raw.get("output_dir", "out")
    _require(isinstance(output_dir, str) and output_dir, "output_dir: non-empty string expected")

    system = csv_path = suite = None
    observables: tuple[systems.Observable, ...] = ()
    embedding = None
    if raw.get("suite") is not None:
        _require(isinstance(raw["suite"], dict), "suite: object expected")
        suite = _parse_suite(raw["suite"])
        for key in ("observables", "embedding"):
            _require(raw.get(key) is None, f"{key}: not applicable to a suite run")
    else:
        if raw.get("system") is not None:
            _require(isinstance(raw["system"], dict), "system: object expected")
            system = _parse_system(raw["system"])
            obs_raw = raw.get("observables")
            _require(isinstance(obs_raw, list) and obs_raw,
                     "observables: non-empty list required with a system")
            observables = tuple(_parse_observable(i, o) for i, o in enumerate(obs_raw))
        else:
            csv_path = raw.get("csv")
            _require(isinstance(csv_path, str) and csv_path, "csv: file path expected")
            _require(raw.get("observables") in (None, []),
                     "observables: CSV columns are the observables; leave empty")
        _require(isinstance(raw.get("embedding"), dict), "embedding: object with m and n required")
        embedding = _parse_embedding(raw["embedding"])

    dmd_cfg = _parse_dmd(raw["dmd"]) if isinstance(raw.get("dmd"), dict) else DmdConfig()
    _require(raw.get("dmd") is None or isinstance(raw.get("dmd"), dict), "dmd: object expected")
    ana = _parse_analysis(raw["analysis"]) if isinstance(raw.get("analysis"), dict) else AnalysisConfig()
    _require(raw.get("analysis") is None or isinstance(raw.get("analysis"), dict),
             "analysis: object expected")
    if system is not None and system.z0s is not None and embedding is not None:
        _require(embedding.interleave or len(system.z0s) == 1,
                 "embedding.interleave must be true when system.z0 lists several states")
    cfg = RunConfig(output_dir=output_dir, system=system, csv=csv_path, suite=suite,
                    observables=observables, embedding=embedding, dmd=dmd_cfg,
                    analysis=ana, recipe=recipe)
    _validate_lengths(cfg)
    return cfg


def _samples_per_trajectory(cfg: RunConfig) -> int | None:
    if cfg.system is None:
        return None  # CSV length is only known at run time
    return cfg.system.steps + 1 - cfg.system.skip


def _validate_lengths(cfg: RunConfig) -> None:
    if cfg.embedding is None:
        return
    e = cfg.embedding
    samples = _samples_per_trajectory(cfg)
    if samples is None:
        return
    usable = 1 + (samples - 1) // e.stride
    needed = e.m + e.n + 1
    _require(usable >= needed,
             f"embedding: m={e.m}, n={e.n} need {needed} samples per trajectory, "
             f"but system provides {usable} after skip/stride")


# ----------------------------------------------------------------------
# Recipes


def _lorenz_pod_config() -> dict:
    return {
        "system": {"kind": "lorenz", "sigma": 10.0, "rho": 28.0, "beta": 8.0 / 3.0,
                   "z0": None, "seed": 2, "dt": 0.01, "steps": 11500, "skip": 1000},
        "observables": [{"kind": "coordinate", "index": 0}],
        "embedding": {"m": 10000, "n": 500},
        "dmd": {"algorithm": "hankel", "svd_threshold": 1e-10, "threshold_mode": "abs"},
        "analysis": {},
        "output_dir": "out/lorenz-pod",
    }


def _vdp_phase_config() -> dict:
    return {
        "system": {"kind": "vanderpol", "mu": systems.VDP_MU,
                   "z0": [list(systems.VDP_Z1), list(systems.VDP_Z2)],
                   "dt": 0.1, "steps": 350},
        "observables": [{"kind": "sum", "indices": [0, 1]}],
        "embedding": {"m": 250, "n": 100, "interleave": True},
        "dmd": {"algorithm": "hankel", "svd_threshold": 1e-10, "threshold_mode": "abs"},
        "analysis": {"export_phase": True},
        "output_dir": "out/vdp-phase",
    }


def _rotation_check_config() -> dict:
    return {
        "system": {"kind": "circle", "omega": math.pi / 4, "z0": [0.0],
                   "dt": 1.0, "steps": 2008},
        "observables": [{"kind": "cos_angle", "index": 0}],
        "embedding": {"m": 2000, "n": 8},
        "dmd": {"algorithm": "hankel", "svd_threshold": 1e-10, "threshold_mode": "abs"},
        "analysis": {"basics": [math.pi / 4], "K": 6},
        "output_dir": "out/rotation-check",
    }


def _torus_synth_config() -> dict:
    return {
        "system": {"kind": "torus", "omega1": 0.97624, "omega2": 0.60892,
                   "z0": [0.0, 0.0], "dt": 0.1, "steps": 6500},
        "observables": [{"kind": "custom",
                         "expression": "cos(z1) + 0.6*cos(z2) + 0.3*cos(z1 - z2)"}],
        "embedding": {"m": 6000, "n": 500},
        "dmd": {"algorithm": "hankel", "svd_threshold": 1e-10, "threshold_mode": "abs"},
        "analysis": {"basics": [0.97624, 0.60892], "K": 6},
        "output_dir": "out/torus-synth",
    }


def _equivalence_suite_config() -> dict:
    return {
        "suite": {"kind": "equivalence", "count": 20, "dim": 4, "seed_base": 0, "tol": 1e-8},
        "output_dir": "out/equivalence-suite",
    }


RECIPES = {
    "lorenz-pod": (_lorenz_pod_config,
                   "Lorenz first-coordinate Hankel POD (m=10000, n=500)"),
    "vdp-phase": (_vdp_phase_config,
                  "Van der Pol asymptotic phase from two interleaved trajectories"),
    "rotation-check": (_rotation_check_config,
                       "circle rotation eigenvalue check (omega = pi/4)"),
    "torus-synth": (_torus_synth_config,
                    "synthetic two-frequency quasi-periodic signal, lattice recovery"),
    "equivalence-suite": (_equivalence_suite_config,
                          "companion/svd/exact agreement on seeded linear systems"),
}


def recipe_config(name: str) -> dict:
    """Raw config dict of a named recipe (copy, safe to modify)."""
    if name not in RECIPES:
        raise ConfigError(f"unknown recipe {name!r}; available: {', '.join(sorted(RECIPES))}")
    return json.loads(json.dumps(RECIPES[name][0]()))


# ----------------------------------------------------------------------
# Pipeline


@dataclass
class RunResult:
    """In-memory view of one run's outputs (files land in output_dir)."""

    config: RunConfig
    output_dir: Path
    outputs: list[str]
    trajectories: list[systems.Trajectory] | None = None
    blocks: list[embed.HankelBlock] | None = None
    data: embed.CompositeData | None = None
    pod_result: pod.PodResult | None = None
    dmd_result: dmd.DmdResult | None = None
    frequency_rows: list[dict] | None = None
    suite_report: dict | None = None


def _build_series(cfg: RunConfig):
    """Observable time series per block, plus trajectories when simulated.

    Returns (series_per_observable, trajectories, dt_effective). Each entry
    of series_per_observable is the (possibly interleaved) series that one
    Hankel block embeds.
    """
    e = cfg.embedding
    if cfg.csv is not None:
        path = Path(cfg.csv)
        _require(path.exists(), f"csv: file not found: {path}")
        try:
            columns = embed.read_timeseries_csv(path)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        columns = [embed.strided_series(s, e.stride) for s in columns]
        if e.interleave:
            series_list = [embed.interleave(columns)]
        else:
            series_list = columns
        return series_list, None, series_list[0].dt

    sc = cfg.system
    if sc.z0s is None:
        z0s = [systems.lorenz_initial_state(sc.seed)]
    else:
        z0s = [np.asarray(z, dtype=float) for z in sc.z0s]
    _require(e.interleave or len(z0s) == 1,
             "embedding.interleave must be true when system.z0 lists several states")
    trajectories = []
    for z0 in z0s:
        spec = systems.SystemSpec(kind=sc.kind, params=dict(sc.params), z0=z0,
                                  dt=sc.dt, steps=sc.steps)
        traj = systems.integrate(spec)
        if sc.skip:
            traj = systems.transient_skip(traj, sc.skip)
        trajectories.append(traj)
    series_list = []
    for obs in cfg.observables:
        per_traj = [systems.observe(t, obs) for t in trajectories]
        per_traj = [embed.strided_series(s, e.stride) for s in per_traj]
        series_list.append(embed.interleave(per_traj) if e.interleave else per_traj[0])
    return series_list, trajectories, series_list[0].dt


def _run_decomposition(cfg: RunConfig, blocks, data, dt_eff: float) -> dmd.DmdResult:
    d = cfg.dmd
    if d.algorithm == "hankel":
        return dmd.hankel_dmd(data, svd_threshold=d.svd_threshold, dt=dt_eff,
                              threshold_mode=d.threshold_mode,
                              sqrt_m_scaling=d.sqrt_m_scaling)
    if d.algorithm == "exact":
        return dmd.exact_dmd(data.X, data.Y, svd_threshold=d.svd_threshold,
                             threshold_mode=d.threshold_mode, dt=dt_eff)
    if d.algorithm == "svd":
        return dmd.svd_dmd(data.X, data.Y, dt=dt_eff)
    # companion: sequential delayed columns of the first block
    block = blocks[0]
    return dmd.companion_dmd(block.H, k=block.n, dt=dt_eff)


def _frequency_rows(cfg: RunConfig, result: dmd.DmdResult, trajectories, dt_ana: float):
    """Rows of the frequency table: positive-branch eigenvalues with their
    lattice match and, for rotation systems, the eigenfunction variance."""
    ana = cfg.analysis
    if ana.basics is None:
        return None
    angles = None
    if (trajectories is not None and cfg.system is not None
            and cfg.system.kind in ("circle", "torus") and not cfg.embedding.interleave):
        m_rows = result.modes.shape[0]
        angles = trajectories[0].states[:: cfg.embedding.stride][:m_rows]
    rows = []
    for j, lam in enumerate(result.eigenvalues):
        if lam == 0:
            continue
        omega = analysis.eig_to_freq(lam, dt_ana)
        if omega < 0:
            continue  # conjugate partner carries the same information
        match = analysis.match_lattice(omega, ana.basics, K=ana.K)
        variance = None
        if angles is not None and angles.shape[0] == result.modes.shape[0]:
            ref = analysis.lattice_eigenfunction(angles, match.k)
            if np.linalg.norm(ref) > 0 and np.linalg.norm(result.modes[:, j]) > 0:
                variance = analysis.eigenfunction_error(result.modes[:, j], ref).variance
        rows.append({
            "k": match.k,
            "omega_computed": omega,
            "omega_lattice": match.lattice_value,
            "relative_error": match.relative_error,
            "eigfun_variance": variance,
        })
    return rows


def _write_phase_csv(path, cfg: RunConfig, result: dmd.DmdResult, blocks, trajectories,
                     dt_eff: float) -> bool:
    """Per-state asymptotic phase of the dominant nontrivial mode."""
    idx = analysis.dominant_nontrivial(result.eigenvalues, dt_eff, MIN_NONTRIVIAL_OMEGA)
    if idx is None or trajectories is None:
        return False
    block = blocks[0]
    phases = analysis.asymptotic_phase(result.modes[:, idx])
    c = block.channels
    dim = trajectories[0].states.shape[1]
    header = ["t", "trajectory"] + [f"z{i + 1}" for i in range(dim)] + ["phase"]
    rows = []
    strided = [t.states[:: cfg.embedding.stride] for t in trajectories]
    for r, phase in enumerate(phases):
        i, p = divmod(r, c)
        state = strided[p][i]
        rows.append([i * dt_eff, p + 1] + [float(v) for v in state]
                    + [float(phase) if np.isfinite(phase) else None])
    from .ioutil import write_csv

    write_csv(path, header, rows)
    return True


def execute(cfg: RunConfig, out_dir: str | None = None) -> RunResult:
    """Run a validated config; write artifacts; return in-memory results."""
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    outputs: list[str] = []

    if cfg.suite is not None:
        report = run_equivalence_suite(cfg.suite)
        write_json(out / "equivalence.json", report)
        outputs.append("equivalence.json")
        write_json(out / "run.json", _run_summary(cfg, outputs, suite=report))
        outputs.append("run.json")
        return RunResult(config=cfg, output_dir=out, outputs=outputs, suite_report=report)

    series_list, trajectories, dt_eff = _build_series(cfg)
    e = cfg.embedding
    for s in series_list:
        per_traj = len(s) // s.channels
        _require(per_traj >= e.m + e.n + 1,
                 f"embedding: m={e.m}, n={e.n} need {e.m + e.n + 1} samples per "
                 f"trajectory, but series {s.label!r} provides {per_traj}")

    blocks = [embed.hankel(s, e.m, e.n) for s in series_list]
    scales = [1.0]
    for b in blocks[1:]:
        scales.append(embed.scale_factor(b, blocks[0], mode=e.scale_mode))
    data = embed.composite(blocks, scales)

    if trajectories is not None:
        for i, traj in enumerate(trajectories, start=1):
            cols = [embed.TimeSeries(values=traj.states[:, d], dt=traj.dt, label=f"z{d + 1}")
                    for d in range(traj.states.shape[1])]
            name = f"trajectory_{i}.csv"
            embed.write_timeseries_csv(out / name, cols)
            outputs.append(name)
        per_obs = [[systems.observe(t, obs) for t in trajectories] for obs in cfg.observables]
        for i in range(len(trajectories)):
            name = f"series_{i + 1}.csv"
            embed.write_timeseries_csv(out / name, [cols[i] for cols in per_obs])
            outputs.append(name)

    write_json(out / "hankel.json", {
        "m": e.m, "n": e.n, "dt": dt_eff, "stride": e.stride,
        "interleave": e.interleave, "rows": int(data.X.shape[0]),
        "cols": int(data.X.shape[1]),
        "blocks": [{"label": b.label, "channels": b.channels, "scale": s,
                    "start": o[0], "stop": o[1]}
                   for b, s, o in zip(blocks, scales, data.block_offsets)],
    })
    outputs.append("hankel.json")

    pod_result = pod.ergodic_pod(blocks[0])
    pod.write_result_json(pod_result, out / "pod.json")
    pod.write_basis_csv(pod_result, out / "pod_basis.csv")
    pod.write_coords_csv(pod_result, out / "pod_coords.csv")
    outputs += ["pod.json", "pod_basis.csv", "pod_coords.csv"]

    dmd_result = _run_decomposition(cfg, blocks, data, dt_eff)
    dmd.write_result_json(dmd_result, out / "dmd.json")
    dmd.write_modes_csv(dmd_result, out / "modes.csv")
    outputs += ["dmd.json", "modes.csv"]

    dt_ana = cfg.analysis.dt_override or dt_eff
    freq_rows = _frequency_rows(cfg, dmd_result, trajectories, dt_ana)
    if freq_rows is not None:
        analysis.write_frequency_table(out / "frequency_table.csv", freq_rows)
        outputs.append("frequency_table.csv")

    if cfg.analysis.export_phase:
        if _write_phase_csv(out / "phase.csv", cfg, dmd_result, blocks, trajectories, dt_eff):
            outputs.append("phase.csv")

    write_json(out / "run.json", _run_summary(cfg, outputs, dmd_result=dmd_result,
                                              pod_result=pod_result, dt_eff=dt_eff))
    outputs.append("run.json")
    return RunResult(config=cfg, output_dir=out, outputs=outputs,
                     trajectories=trajectories, blocks=blocks, data=data,
                     pod_result=pod_result, dmd_result=dmd_result,
                     frequency_rows=freq_rows)


def _run_summary(cfg: RunConfig, outputs: list[str], dmd_result=None, pod_result=None,
                 dt_eff=None, suite=None) -> dict:
    summary: dict = {
        "recipe": cfg.recipe,
        "outputs": sorted(outputs),
        "version": __version__,
    }
    if dmd_result is not None:
        idx = analysis.dominant_nontrivial(dmd_result.eigenvalues, dmd_result.dt,
                                           MIN_NONTRIVIAL_OMEGA)
        summary["dmd"] = {
            "algorithm": dmd_result.algorithm,
            "svd_threshold": cfg.dmd.svd_threshold,
            "threshold_mode": cfg.dmd.threshold_mode,
            "rank_kept": dmd_result.rank_kept,
            "residual": float(dmd_result.residual),
            "dominant_nontrivial_freq": (
                None if idx is None
                else analysis.eig_to_freq(dmd_result.eigenvalues[idx], dmd_result.dt)),
        }
    if pod_result is not None:
        summary["pod"] = {"k": pod_result.k,
                          "top_singular_values": [float(s) for s in pod_result.singular_values[:8]]}
    if dt_eff is not None:
        summary["dt"] = float(dt_eff)
    if suite is not None:
        summary["suite"] = {"pass": suite["pass"], "count": len(suite["per_seed"])}
    return summary


def run_equivalence_suite(cfg: SuiteConfig) -> dict:
    """Companion / svd-enhanced / exact DMD agreement on seeded linear maps.

    Each seed draws a well-conditioned linear system, generates dim+1
    sequential states, and runs all three variants; eigenvalue multisets
    are compared pairwise after sorting by (re, im), and exact modes are
    compared against projected modes (the data range contains its own
    one-step image, so they must coincide).
    """
    per_seed = []
    worst_eig = 0.0
    worst_mode = 0.0
    for seed in range(cfg.seed_base, cfg.seed_base + cfg.count):
        spec = systems.seeded_linear_system(seed, dim=cfg.dim)
        traj = systems.integrate(spec)
        d_mat = traj.states.T
        x, y = d_mat[:, : cfg.dim], d_mat[:, 1 : cfg.dim + 1]
        results = {
            "companion": dmd.companion_dmd(d_mat, k=cfg.dim),
            "svd": dmd.svd_dmd(x, y),
            "exact": dmd.exact_dmd(x, y, svd_threshold=1e-12, threshold_mode="rel"),
        }

        def _sorted_eigs(r):
            return np.array(sorted(r.eigenvalues, key=lambda l: (l.real, l.imag)))

        eigs = {name: _sorted_eigs(r) for name, r in results.items()}
        names = list(results)
        eig_gap = max(
            float(np.max(np.abs(eigs[a] - eigs[b])))
            for i, a in enumerate(names) for b in names[i + 1:]
        )
        exact_res = results["exact"]
        mode_gap = float(np.max(np.abs(exact_res.modes - exact_res.projected_modes)))
        worst_eig = max(worst_eig, eig_gap)
        worst_mode = max(worst_mode, mode_gap)
        per_seed.append({"seed": seed, "eigenvalue_disagreement": eig_gap,
                         "exact_vs_projected": mode_gap})
    return {
        "suite": "equivalence",
        "dim": cfg.dim,
        "tol": cfg.tol,
        "per_seed": per_seed,
        "max_eigenvalue_disagreement": worst_eig,
        "max_exact_vs_projected": worst_mode,
        "pass": bool(worst_eig <= cfg.tol and worst_mode <= cfg.tol),
    }


# ----------------------------------------------------------------------
# Entry point


def load_config(target: str) -> RunConfig:
    """Resolve a run target: recipe name or JSON config path."""
    if target in RECIPES:
        return parse_config(recipe_config(target), recipe=target)
    path = Path(target)
    if not path.exists():
        raise ConfigError(
            f"{target!r} is neither a recipe ({', '.join(sorted(RECIPES))}) "
            "nor an existing config file"
        )
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    return parse_config(raw)


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if args.seed is not None:
        if cfg.system is not None:
            cfg = replace(cfg, system=replace(cfg.system, seed=args.seed))
        elif cfg.suite is not None:
            cfg = replace(cfg, suite=replace(cfg.suite, seed_base=args.seed))
    updates = {}
    if args.threshold is not None:
        if not (args.threshold >= 0 and math.isfinite(args.threshold)):
            raise ConfigError(f"--threshold: finite value >= 0 required, got {args.threshold}")
        updates["svd_threshold"] = args.threshold
    if args.threshold_mode is not None:
        updates["threshold_mode"] = args.threshold_mode
    if updates:
        cfg = replace(cfg, dmd=replace(cfg.dmd, **updates))
    if args.out is not None:
        cfg = replace(cfg, output_dir=args.out)
    return cfg


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="koopdmd",
        description="Koopman eigenvalues, eigenfunctions and POD from time series",
    )
    parser.add_argument("--version", action="version", version=f"koopdmd {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="execute a config file or a named recipe")
    run_p.add_argument("target", help="path to a JSON config, or a recipe name")
    run_p.add_argument("--out", help="output directory (overrides config output_dir)")
    run_p.add_argument("--seed", type=int, help="seed for randomized initial conditions")
    run_p.add_argument("--threshold", type=float, help="SVD truncation threshold override")
    run_p.add_argument("--threshold-mode", choices=("abs", "rel"), dest="threshold_mode",
                       help="interpret the threshold as absolute or relative to sigma_max")
    sub.add_parser("recipes", help="list built-in recipes")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "recipes":
            for name in sorted(RECIPES):
                print(f"{name:20s} {RECIPES[name][1]}")
            return 0
        cfg = _apply_overrides(load_config(args.target), args)
        result = execute(cfg)
        where = result.output_dir
        print(f"wrote {len(result.outputs)} artifacts to {where}")
        if result.dmd_result is not None:
            idx = analysis.dominant_nontrivial(result.dmd_result.eigenvalues,
                                               result.dmd_result.dt, MIN_NONTRIVIAL_OMEGA)
            if idx is not None:
                omega = analysis.eig_to_freq(result.dmd_result.eigenvalues[idx],
                                             result.dmd_result.dt)
                print(f"dominant nontrivial frequency: {omega:.6f} rad/s")
        if result.suite_report is not None:
            status = "pass" if result.suite_report["pass"] else "FAIL"
            print(f"equivalence suite: {status} "
                  f"(max eigenvalue disagreement "
                  f"{result.suite_report['max_eigenvalue_disagreement']:.3e})")
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # Violated library preconditions reached from a config the static
        # validation could not fully check (e.g. observable index vs the
        # system dimension) are configuration problems too.
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except KoopdmdError as exc:  # pragma: no cover - safety net
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

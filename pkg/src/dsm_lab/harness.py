"""Experiment drivers: trial grids, parallel execution and result files.

An experiment is a grid of cells (protocol x copy budget x noise level x
register size, depending on the experiment kind) with a fixed number of
independent trials per cell. Each trial simulates the full pipeline:

    build rho0 -> exact outcome distributions -> detector noise ->
    sampled counts -> probability estimates -> probe blocks ->
    reconstruction -> fidelity against the target state

and yields one row of the trial CSV. Summaries (mean, spread, bias and
confidence-region coverage per cell) go to a second CSV, and a JSON
manifest records the configuration and wall-clock bounds of the run.

Determinism is unconditional: every trial derives its own random stream
from (master_seed, trial_index, protocol_id, cell_index) through a
documented splitmix64 fold, and within a trial each (row n, probe basis)
cell folds two more indices into the stream. Results are collected into
a set and sorted before emission, so the trial CSV is byte-identical no
matter how many workers ran it.

Copy-budget semantics: the default "prepared-copies" mode charges every
prepared copy against N_c, including those the contraction discards.
"retained-copies" instead spends the budget on detected outcomes only.
The distinction moves absolute fidelity numbers, which is why it is a
visible config knob rather than a buried constant.

Exact-statistics sentinel: n_copies = 0 skips sampling entirely and
feeds the (noisy) exact distributions straight into reconstruction,
giving the infinite-budget limit of the estimator.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .confidence import ConfidenceSpec, InfeasibleRegionError, coverage_ratio, region
from .noise import NoiseModel, apply_detector_noise, apply_postselection_noise
from .protocol import (
    BASIS_LABELS,
    OutcomeDistribution,
    Protocol,
    ProtocolKind,
    outcome_distribution,
)
from .qcore import dicke_state, fidelity_pure, ghz_state, mix_white_noise
from .recon import (
    DegenerateEstimateError,
    physicality_projection,
    reconstruct_type1,
    reconstruct_type2,
    reconstruct_weak,
    summarize,
)
from .sampler import SeedSpec, estimate_probabilities, fold_stream, sample_counts

EXPERIMENT_KINDS = (
    "histogram",
    "fidelity_vs_copies",
    "fidelity_vs_qubits",
    "confidence_coverage",
    "noise_sweep",
)

STATE_FAMILIES = ("ghz", "w", "dicke")

BUDGET_MODES = ("prepared-copies", "retained-copies")

TRIAL_COLUMNS = (
    "experiment", "protocol", "theta", "n_qubits", "n_copies",
    "eta", "trial", "fidelity", "status", "seed",
)
SUMMARY_COLUMNS = (
    "experiment", "protocol", "theta", "n_qubits", "n_copies", "eta",
    "n_trials", "f0", "f_ave", "delta_f_bias", "std_f", "coverage_pct",
)
HISTOGRAM_COLUMNS = ("experiment", "protocol", "theta", "bin_lo", "bin_hi", "count")

# Confidence-region model parameters used for the coverage column.
COVERAGE_EPSILON = 0.005
COVERAGE_SIGMA = 0.005

DEFAULT_QUBIT_CAP = 6
EXTENDED_QUBIT_CAP = 8


@dataclass(frozen=True)
class StateSpec:
    family: str
    n_qubits: int
    excitations: int | None = None

    def __post_init__(self) -> None:
        if self.family not in STATE_FAMILIES:
            raise ValueError(
                f"state_spec.family must be one of {STATE_FAMILIES}, got {self.family!r}"
            )
        if self.n_qubits < 1:
            raise ValueError(
                f"state_spec.n_qubits must be at least 1, got {self.n_qubits}"
            )
        if self.family == "dicke" and self.excitations is None:
            raise ValueError("state_spec.excitations is required for the dicke family")


def build_target_state(spec: StateSpec, n_qubits: int | None = None) -> np.ndarray:
    n = spec.n_qubits if n_qubits is None else n_qubits
    if spec.family == "ghz":
        return ghz_state(n)
    if spec.family == "w":
        return dicke_state(n, 1)
    return dicke_state(n, min(spec.excitations, n))


def parse_protocol(text: str) -> Protocol:
    """Parse CLI-style protocol labels: type1, type2:0.5pi, weak:0.1pi.

    Angles accept a trailing "pi" multiplier or a plain radian value.
    """
    parts = text.strip().split(":")
    kind = parts[0].strip().lower()
    if kind == "type1":
        if len(parts) > 1:
            raise ValueError(f"type1 takes no angle, got {text!r}")
        return Protocol(ProtocolKind.TYPE_I)
    if kind not in ("type2", "weak"):
        raise ValueError(f"unknown protocol {parts[0]!r}")
    if len(parts) != 2 or not parts[1]:
        raise ValueError(f"protocol {kind!r} needs an angle, e.g. {kind}:0.5pi")
    angle = parts[1].strip().lower()
    if angle.endswith("pi"):
        theta = float(angle[:-2]) * np.pi
    else:
        theta = float(angle)
    return Protocol(ProtocolKind(kind), theta)


def protocol_to_text(proto: Protocol) -> str:
    if proto.kind is ProtocolKind.TYPE_I:
        return "type1"
    return f"{proto.kind.value}:{proto.theta / np.pi:g}pi"


@dataclass
class ExperimentConfig:
    experiment: str
    state_spec: StateSpec
    protocols: list[Protocol]
    n_copies: int | list[int]
    n_trials: int
    master_seed: int
    output_dir: str | Path
    f0: float = 0.9
    eta: float | list[float] = 0.0
    histogram_bin_width: float = 0.01
    psd_projection: bool = False
    budget_mode: str = "prepared-copies"
    noise_on_postselection: bool = False
    extended_qubit_range: bool = False

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        errors: list[str] = []
        if self.experiment not in EXPERIMENT_KINDS:
            errors.append(
                f"experiment: must be one of {EXPERIMENT_KINDS}, got {self.experiment!r}"
            )
        if not self.protocols:
            errors.append("protocols: list must be nonempty")
        if self.n_trials < 1:
            errors.append(f"n_trials: must be at least 1, got {self.n_trials}")
        if not 0.0 < self.f0 <= 1.0:
            errors.append(f"f0: must lie in (0, 1], got {self.f0}")
        if self.histogram_bin_width <= 0:
            errors.append(
                f"histogram_bin_width: must be positive, got {self.histogram_bin_width}"
            )
        if self.budget_mode not in BUDGET_MODES:
            errors.append(
                f"budget_mode: must be one of {BUDGET_MODES}, got {self.budget_mode!r}"
            )
        for nc in self.n_copies_list():
            if nc < 0:
                errors.append(f"n_copies: entries must be >= 0, got {nc}")
        if not self.n_copies_list():
            errors.append("n_copies: list must be nonempty")
        for e in self.eta_list():
            if e < 0:
                errors.append(f"eta: entries must be >= 0, got {e}")
        if not self.eta_list():
            errors.append("eta: list must be nonempty")
        if not 0 <= self.master_seed < 2**64:
            errors.append(
                f"master_seed: must be an unsigned 64-bit integer, got {self.master_seed}"
            )
        cap = EXTENDED_QUBIT_CAP if self.extended_qubit_range else DEFAULT_QUBIT_CAP
        if self.experiment == "fidelity_vs_qubits" and self.state_spec.n_qubits > cap:
            errors.append(
                f"state_spec.n_qubits: register sweep capped at {cap} qubits"
                " (set extended_qubit_range to go further)"
            )
        d = 2**self.state_spec.n_qubits
        if self.f0 <= 1.0 / d:
            errors.append(
                f"f0: {self.f0} is unreachable by white-noise mixing at dimension {d}"
            )
        if errors:
            raise ValueError("invalid config: " + "; ".join(errors))

    def n_copies_list(self) -> list[int]:
        v = self.n_copies
        return [int(x) for x in (v if isinstance(v, (list, tuple)) else [v])]

    def eta_list(self) -> list[float]:
        v = self.eta
        return [float(x) for x in (v if isinstance(v, (list, tuple)) else [v])]

    def to_json_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "state_spec": {
                "family": self.state_spec.family,
                "n_qubits": self.state_spec.n_qubits,
                **(
                    {"excitations": self.state_spec.excitations}
                    if self.state_spec.excitations is not None
                    else {}
                ),
            },
            "protocols": [protocol_to_text(p) for p in self.protocols],
            "n_copies": self.n_copies,
            "n_trials": self.n_trials,
            "eta": self.eta,
            "f0": self.f0,
            "master_seed": self.master_seed,
            "output_dir": str(self.output_dir),
            "histogram_bin_width": self.histogram_bin_width,
            "psd_projection": self.psd_projection,
            "budget_mode": self.budget_mode,
            "noise_on_postselection": self.noise_on_postselection,
            "extended_qubit_range": self.extended_qubit_range,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ExperimentConfig":
        known = {
            "experiment", "state_spec", "protocols", "n_copies", "n_trials",
            "eta", "f0", "master_seed", "output_dir", "histogram_bin_width",
            "psd_projection", "budget_mode", "noise_on_postselection",
            "extended_qubit_range",
        }
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"invalid config: unknown fields {sorted(unknown)}")
        missing = {
            "experiment", "state_spec", "protocols", "n_copies", "n_trials",
            "master_seed", "output_dir",
        } - set(data)
        if missing:
            raise ValueError(f"invalid config: missing fields {sorted(missing)}")
        state = data["state_spec"]
        if not isinstance(state, dict):
            raise ValueError("invalid config: state_spec must be an object")
        spec = StateSpec(
            family=state.get("family", ""),
            n_qubits=int(state.get("n_qubits", 0)),
            excitations=state.get("excitations"),
        )
        protocols = [
            p if isinstance(p, Protocol) else parse_protocol(p)
            for p in data["protocols"]
        ]
        kwargs = {k: data[k] for k in known & set(data) if k not in ("state_spec", "protocols")}
        return cls(state_spec=spec, protocols=protocols, **kwargs)

    @classmethod
    def from_json_file(cls, path: str | Path) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValueError(f"invalid config: not valid JSON ({exc})") from exc
        return cls.from_json_dict(data)


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    protocol: Protocol
    theta: float
    n_qubits: int
    n_copies: int
    eta: float
    fidelity: float
    status: str
    seed_used: int


@dataclass(frozen=True)
class Cell:
    """One grid point of an experiment: fixed protocol, budget, noise, size."""

    cell_index: int
    protocol_id: int
    protocol: Protocol
    n_qubits: int
    n_copies: int
    eta: float


@dataclass
class _SamplingPlan:
    """Per-cell precomputation shared by all trials of the cell.

    Holds the noisy exact distribution for every (row n, probe basis)
    setting. Distributions depend only on (state, protocol, eta), never
    on the trial index, so they are built once per cell.
    """

    psi: np.ndarray
    dists: dict[tuple[int, str], OutcomeDistribution] = field(default_factory=dict)


def derive_trial_seed(
    master_seed: int, trial_index: int, protocol_id: int, cell_index: int
) -> SeedSpec:
    """Stateless stream naming for one trial.

    stream_index = fold_stream(0, trial_index, protocol_id, cell_index),
    one splitmix64 round per field, in that order. Distinct inputs give
    distinct streams up to 64-bit collisions.
    """
    return SeedSpec(master_seed, fold_stream(0, trial_index, protocol_id, cell_index))


def build_sampling_plan(
    rho0: np.ndarray,
    psi: np.ndarray,
    protocol: Protocol,
    eta: float,
    noise_on_postselection: bool = False,
) -> _SamplingPlan:
    d = rho0.shape[0]
    model = NoiseModel(eta)
    plan = _SamplingPlan(psi=psi)
    for n in range(d):
        for basis in BASIS_LABELS:
            dist = outcome_distribution(rho0, protocol, n, basis)
            dist = apply_detector_noise(dist, model)
            if noise_on_postselection:
                dist = apply_postselection_noise(dist, model)
            plan.dists[(n, basis)] = dist
    return plan


_BASIS_ID = {b: i for i, b in enumerate(BASIS_LABELS)}


def _reconstruct_fidelity(
    plan: _SamplingPlan,
    protocol: Protocol,
    n_copies: int,
    seed: SeedSpec,
    budget_mode: str,
    psd_projection: bool,
) -> float:
    d = plan.psi.size
    e10 = np.empty((d, d), dtype=complex)
    e11 = np.empty((d, d), dtype=float)
    count_discards = budget_mode == "prepared-copies"
    for n in range(d):
        estimates = {}
        for basis in BASIS_LABELS:
            dist = plan.dists[(n, basis)]
            if n_copies == 0:
                estimates[basis] = dist
            else:
                counts = sample_counts(
                    dist,
                    n_copies,
                    seed.child(n, _BASIS_ID[basis]),
                    count_discards=count_discards,
                )
                estimates[basis] = estimate_probabilities(counts)
        e10[n] = 0.5 * (
            (estimates["X"].probs[:, 0] - estimates["X"].probs[:, 1])
            + 1j * (estimates["Y"].probs[:, 0] - estimates["Y"].probs[:, 1])
        )
        e11[n] = estimates["Z"].probs[:, 1]
    if protocol.kind is ProtocolKind.TYPE_I:
        raw = reconstruct_type1(e10)
    elif protocol.kind is ProtocolKind.TYPE_II:
        raw = reconstruct_type2(e10, e11, protocol.theta)
    else:
        raw = reconstruct_weak(e10, protocol.theta)
    entries = physicality_projection(raw) if psd_projection else raw.entries
    return fidelity_pure(entries, plan.psi)


def run_trial(
    state_spec: StateSpec,
    f0: float,
    protocol: Protocol,
    n_copies: int,
    eta: float,
    seed: SeedSpec,
    budget_mode: str = "prepared-copies",
    psd_projection: bool = False,
    noise_on_postselection: bool = False,
    n_qubits: int | None = None,
    plan: _SamplingPlan | None = None,
) -> TrialRecord:
    """Run the full single-trial pipeline and record the outcome.

    A degenerate reconstruction (zero-trace estimate) is reported as a
    failed trial rather than raised, so a batch never crashes on one
    pathological draw.
    """
    nq = state_spec.n_qubits if n_qubits is None else n_qubits
    if plan is None:
        psi = build_target_state(state_spec, nq)
        rho0, _ = mix_white_noise(psi, f0)
        plan = build_sampling_plan(rho0, psi, protocol, eta, noise_on_postselection)
    try:
        fid = _reconstruct_fidelity(
            plan, protocol, n_copies, seed, budget_mode, psd_projection
        )
        status = "ok"
    except DegenerateEstimateError:
        fid = float("nan")
        status = "failed"
    return TrialRecord(
        trial_index=0,
        protocol=protocol,
        theta=protocol.theta or 0.0,
        n_qubits=nq,
        n_copies=n_copies,
        eta=eta,
        fidelity=fid,
        status=status,
        seed_used=seed.stream_index,
    )


def expand_cells(config: ExperimentConfig) -> list[Cell]:
    """Expand a config into the experiment's cell grid."""
    cells: list[Cell] = []
    ncs = config.n_copies_list()
    etas = config.eta_list()
    if config.experiment == "histogram":
        grid = [(config.state_spec.n_qubits, ncs[0], etas[0])]
    elif config.experiment in ("fidelity_vs_copies", "confidence_coverage"):
        grid = [(config.state_spec.n_qubits, nc, etas[0]) for nc in ncs]
    elif config.experiment == "fidelity_vs_qubits":
        lo = min(2, config.state_spec.n_qubits)
        grid = [
            (nq, ncs[0], etas[0])
            for nq in range(lo, config.state_spec.n_qubits + 1)
        ]
    else:  # noise_sweep
        grid = [(config.state_spec.n_qubits, ncs[0], e) for e in etas]
    index = 0
    for nq, nc, eta in grid:
        for pid, proto in enumerate(config.protocols):
            cells.append(Cell(index, pid, proto, nq, nc, eta))
            index += 1
    return cells


def _worker_count() -> int:
    env = os.environ.get("DSM_LAB_THREADS", "").strip()
    if env:
        n = int(env)
        if n < 1:
            raise ValueError(f"DSM_LAB_THREADS must be positive, got {env!r}")
        return n
    return os.cpu_count() or 1


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".9g")
    return str(x)


def _write_csv(path: Path, columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _coverage_for_cell(
    cell: Cell, config: ExperimentConfig, fidelities: list[float]
) -> str:
    if cell.n_copies == 0 or not fidelities:
        return ""
    spec = ConfidenceSpec(
        epsilon=COVERAGE_EPSILON,
        sigma=COVERAGE_SIGMA,
        f0=config.f0,
        n_copies=cell.n_copies,
        dim=2**cell.n_qubits,
    )
    try:
        reg = region(spec)
    except InfeasibleRegionError:
        return ""
    return _fmt(coverage_ratio(fidelities, reg))


def run_experiment(config: ExperimentConfig) -> dict:
    """Execute the trial grid and write trials.csv, summary.csv, manifest.json.

    Histogram runs additionally write histogram.csv with per-protocol bin
    counts at the configured bin width. Returns a small dict with the
    output paths and counts. Failed trials stay in the trial CSV (status
    column) but are excluded from every summary statistic; the manifest
    reports how many there were.
    """
    started = datetime.now(timezone.utc).isoformat()
    t0 = time.monotonic()
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    cells = expand_cells(config)
    states: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    for nq in sorted({c.n_qubits for c in cells}):
        psi = build_target_state(config.state_spec, nq)
        rho0, _ = mix_white_noise(psi, config.f0)
        states[nq] = (psi, rho0)

    plans: dict[int, _SamplingPlan] = {}
    for cell in cells:
        psi, rho0 = states[cell.n_qubits]
        plans[cell.cell_index] = build_sampling_plan(
            rho0, psi, cell.protocol, cell.eta, config.noise_on_postselection
        )

    def one_trial(cell: Cell, trial: int) -> TrialRecord:
        seed = derive_trial_seed(
            config.master_seed, trial, cell.protocol_id, cell.cell_index
        )
        rec = run_trial(
            config.state_spec,
            config.f0,
            cell.protocol,
            cell.n_copies,
            cell.eta,
            seed,
            budget_mode=config.budget_mode,
            psd_projection=config.psd_projection,
            noise_on_postselection=config.noise_on_postselection,
            n_qubits=cell.n_qubits,
            plan=plans[cell.cell_index],
        )
        return replace(rec, trial_index=trial)

    work = [(cell, t) for cell in cells for t in range(config.n_trials)]
    workers = _worker_count()
    if workers == 1:
        records = [one_trial(c, t) for c, t in work]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda wt: one_trial(*wt), work))

    # Sort into a canonical order so emission is schedule-independent.
    by_cell: dict[int, list[TrialRecord]] = {c.cell_index: [] for c in cells}
    for (cell, _), rec in zip(work, records):
        by_cell[cell.cell_index].append(rec)

    def sort_key(c: Cell):
        return (c.protocol.label, c.protocol.theta or 0.0, c.n_qubits, c.n_copies, c.eta)

    ordered_cells = sorted(cells, key=sort_key)

    trial_rows = []
    summary_rows = []
    failed_total = 0
    for cell in ordered_cells:
        recs = sorted(by_cell[cell.cell_index], key=lambda r: r.trial_index)
        ok = [r.fidelity for r in recs if r.status == "ok"]
        failed_total += sum(1 for r in recs if r.status != "ok")
        for r in recs:
            trial_rows.append((
                config.experiment, r.protocol.label, r.theta, r.n_qubits,
                r.n_copies, r.eta, r.trial_index, r.fidelity, r.status,
                r.seed_used,
            ))
        if ok:
            stats = summarize(ok, config.f0)
            f_ave, bias, std = stats.f_ave, stats.bias, stats.df_std
            summary_rows.append((
                config.experiment, cell.protocol.label, cell.protocol.theta or 0.0,
                cell.n_qubits, cell.n_copies, cell.eta, stats.n_trials,
                config.f0, f_ave, bias, std, _coverage_for_cell(cell, config, ok),
            ))
        else:
            summary_rows.append((
                config.experiment, cell.protocol.label, cell.protocol.theta or 0.0,
                cell.n_qubits, cell.n_copies, cell.eta, 0,
                config.f0, "", "", "", "",
            ))

    trials_path = out / "trials.csv"
    summary_path = out / "summary.csv"
    _write_csv(trials_path, TRIAL_COLUMNS, trial_rows)
    _write_csv(summary_path, SUMMARY_COLUMNS, summary_rows)

    result = {
        "trials_csv": str(trials_path),
        "summary_csv": str(summary_path),
        "trial_count": len(records),
        "failed_count": failed_total,
    }

    if config.experiment == "histogram":
        hist_rows = []
        width = config.histogram_bin_width
        for cell in ordered_cells:
            ok = [
                r.fidelity
                for r in by_cell[cell.cell_index]
                if r.status == "ok" and np.isfinite(r.fidelity)
            ]
            if not ok:
                continue
            lo = np.floor(min(ok) / width) * width
            hi = np.ceil(max(ok) / width) * width
            edges = np.arange(lo, hi + width / 2, width)
            if edges.size < 2:
                edges = np.array([lo, lo + width])
            counts, edges = np.histogram(ok, bins=edges)
            for i, c in enumerate(counts):
                hist_rows.append((
                    config.experiment, cell.protocol.label,
                    cell.protocol.theta or 0.0,
                    float(edges[i]), float(edges[i + 1]), int(c),
                ))
        hist_path = out / "histogram.csv"
        _write_csv(hist_path, HISTOGRAM_COLUMNS, hist_rows)
        result["histogram_csv"] = str(hist_path)

    finished = datetime.now(timezone.utc).isoformat()
    manifest = {
        "config": config.to_json_dict(),
        "started_at": started,
        "finished_at": finished,
        "trial_count": len(records),
        "failed_count": failed_total,
    }
    manifest_path = out / "manifest.json"
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    result["manifest"] = str(manifest_path)
    result["elapsed_s"] = time.monotonic() - t0
    return result

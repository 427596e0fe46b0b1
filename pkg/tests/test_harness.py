import hashlib
import json

import numpy as np
import pytest

from dsm_lab import (
    ExperimentConfig,
    Protocol,
    ProtocolKind,
    StateSpec,
    derive_trial_seed,
    expand_cells,
    parse_protocol,
    protocol_to_text,
    run_experiment,
    run_trial,
)
import dsm_lab.harness as harness_mod


def small_config(tmp_path, **overrides):
    base = dict(
        experiment="histogram",
        state_spec=StateSpec("ghz", 2),
        protocols=[parse_protocol("type1"), parse_protocol("type2:0.5pi")],
        n_copies=800,
        n_trials=10,
        master_seed=7,
        output_dir=tmp_path / "out",
    )
    base.update(overrides)
    return ExperimentConfig(**base)


# --- configuration -------------------------------------------------------


def test_state_spec_validation():
    with pytest.raises(ValueError):
        StateSpec("bell", 2)
    with pytest.raises(ValueError):
        StateSpec("dicke", 3)  # excitations missing
    StateSpec("dicke", 3, 1)


def test_parse_protocol_forms():
    assert parse_protocol("type1").kind is ProtocolKind.TYPE_I
    p = parse_protocol("type2:0.5pi")
    assert p.kind is ProtocolKind.TYPE_II
    assert p.theta == pytest.approx(np.pi / 2)
    w = parse_protocol("weak:0.1pi")
    assert w.kind is ProtocolKind.WEAK
    assert w.theta == pytest.approx(0.1 * np.pi)
    r = parse_protocol("type2:1.2")
    assert r.theta == pytest.approx(1.2)


def test_parse_protocol_rejects():
    for bad in ("type3", "type2", "weak:", "type1:0.5pi", "type2:abcpi"):
        with pytest.raises(ValueError):
            parse_protocol(bad)


def test_protocol_text_round_trip():
    for text in ("type1", "type2:0.5pi", "weak:0.25pi"):
        assert protocol_to_text(parse_protocol(text)) == text


def test_config_validation_names_offending_fields(tmp_path):
    with pytest.raises(ValueError, match="n_trials"):
        small_config(tmp_path, n_trials=0)
    with pytest.raises(ValueError, match="f0"):
        small_config(tmp_path, f0=1.5)
    with pytest.raises(ValueError, match="budget_mode"):
        small_config(tmp_path, budget_mode="free-copies")
    with pytest.raises(ValueError, match="experiment"):
        small_config(tmp_path, experiment="warmup")
    with pytest.raises(ValueError, match="eta"):
        small_config(tmp_path, eta=-0.2)
    with pytest.raises(ValueError, match="master_seed"):
        small_config(tmp_path, master_seed=-5)


def test_config_rejects_unreachable_f0(tmp_path):
    # f0 = 0.2 is below 1/d = 0.25 for a 2-qubit register
    with pytest.raises(ValueError, match="f0"):
        small_config(tmp_path, f0=0.2)


def test_qubit_sweep_cap(tmp_path):
    with pytest.raises(ValueError, match="capped"):
        small_config(
            tmp_path,
            experiment="fidelity_vs_qubits",
            state_spec=StateSpec("ghz", 7),
        )
    small_config(
        tmp_path,
        experiment="fidelity_vs_qubits",
        state_spec=StateSpec("ghz", 7),
        extended_qubit_range=True,
    )


def test_config_json_round_trip(tmp_path):
    cfg = small_config(tmp_path, eta=[0.0, 0.3], n_copies=[100, 1000],
                       experiment="noise_sweep")
    data = cfg.to_json_dict()
    back = ExperimentConfig.from_json_dict(json.loads(json.dumps(data)))
    assert back.experiment == cfg.experiment
    assert back.protocols == cfg.protocols
    assert back.n_copies_list() == cfg.n_copies_list()
    assert back.eta_list() == cfg.eta_list()
    assert back.master_seed == cfg.master_seed


def test_config_rejects_unknown_and_missing_fields(tmp_path):
    data = small_config(tmp_path).to_json_dict()
    data["typo_field"] = 1
    with pytest.raises(ValueError, match="typo_field"):
        ExperimentConfig.from_json_dict(data)
    del data["typo_field"]
    del data["protocols"]
    with pytest.raises(ValueError, match="protocols"):
        ExperimentConfig.from_json_dict(data)


# --- seeding -------------------------------------------------------------


def test_trial_seed_derivation_is_stable():
    a = derive_trial_seed(11, 3, 1, 5)
    b = derive_trial_seed(11, 3, 1, 5)
    assert a == b
    assert a.master_seed == 11


def test_trial_seeds_distinct_across_indices():
    seen = {
        derive_trial_seed(9, t, p, c).stream_index
        for t in range(10)
        for p in range(3)
        for c in range(4)
    }
    assert len(seen) == 120


# --- single-trial pipeline -----------------------------------------------


def test_exact_path_recovers_reference_fidelity():
    """n_copies = 0 runs the infinite-statistics limit of the estimator."""
    spec = StateSpec("ghz", 2)
    seed = derive_trial_seed(1, 0, 0, 0)
    for text in ("type1", "type2:0.5pi", "type2:0.1pi"):
        rec = run_trial(spec, 0.9, parse_protocol(text), 0, 0.0, seed)
        assert rec.status == "ok"
        assert rec.fidelity == pytest.approx(0.9, abs=1e-9)


def test_exact_path_weak_bias_value():
    """The uncorrected estimator lands above the reference, not below it:
    trace normalization divides by (1 - eps), which inflates the overlap
    for any state whose diagonal carries less than full weight."""
    spec = StateSpec("ghz", 2)
    seed = derive_trial_seed(1, 0, 0, 0)
    rec = run_trial(spec, 0.9, parse_protocol("weak:0.1pi"), 0, 0.0, seed)
    assert rec.fidelity == pytest.approx(0.922300297170, abs=1e-9)
    assert rec.fidelity > 0.9


def test_trial_determinism_and_stream_separation():
    spec = StateSpec("ghz", 2)
    proto = parse_protocol("type2:0.5pi")
    a = run_trial(spec, 0.9, proto, 500, 0.0, derive_trial_seed(5, 0, 0, 0))
    b = run_trial(spec, 0.9, proto, 500, 0.0, derive_trial_seed(5, 0, 0, 0))
    c = run_trial(spec, 0.9, proto, 500, 0.0, derive_trial_seed(5, 1, 0, 0))
    assert a.fidelity == b.fidelity
    assert a.fidelity != c.fidelity


def test_budget_modes_differ():
    spec = StateSpec("ghz", 2)
    proto = parse_protocol("type1")
    seed = derive_trial_seed(21, 0, 0, 0)
    prepared = run_trial(spec, 0.9, proto, 400, 0.0, seed,
                         budget_mode="prepared-copies")
    retained = run_trial(spec, 0.9, proto, 400, 0.0, seed,
                         budget_mode="retained-copies")
    assert prepared.fidelity != retained.fidelity


def test_psd_projection_changes_low_budget_estimates():
    spec = StateSpec("ghz", 2)
    proto = parse_protocol("type2:0.1pi")
    seed = derive_trial_seed(33, 2, 0, 0)
    raw = run_trial(spec, 0.9, proto, 60, 0.0, seed)
    projected = run_trial(spec, 0.9, proto, 60, 0.0, seed, psd_projection=True)
    assert raw.fidelity != projected.fidelity
    assert 0.0 <= projected.fidelity <= 1.0 + 1e-12


# --- experiment grids ----------------------------------------------------


def test_expand_cells_shapes(tmp_path):
    cfg = small_config(tmp_path, experiment="fidelity_vs_copies",
                       n_copies=[100, 1000, 10000])
    cells = expand_cells(cfg)
    assert len(cells) == 6  # 3 budgets x 2 protocols
    assert sorted({c.n_copies for c in cells}) == [100, 1000, 10000]

    cfg = small_config(tmp_path, experiment="fidelity_vs_qubits",
                       state_spec=StateSpec("ghz", 4))
    cells = expand_cells(cfg)
    assert sorted({c.n_qubits for c in cells}) == [2, 3, 4]

    cfg = small_config(tmp_path, experiment="noise_sweep", eta=[0.0, 0.25, 0.5])
    cells = expand_cells(cfg)
    assert sorted({c.eta for c in cells}) == [0.0, 0.25, 0.5]

    assert {c.cell_index for c in cells} == set(range(len(cells)))


def test_run_experiment_outputs(tmp_path):
    cfg = small_config(tmp_path, n_trials=8)
    result = run_experiment(cfg)
    assert result["trial_count"] == 16
    assert result["failed_count"] == 0

    trials = (tmp_path / "out" / "trials.csv").read_text().splitlines()
    assert trials[0] == (
        "experiment,protocol,theta,n_qubits,n_copies,eta,trial,fidelity,status,seed"
    )
    assert len(trials) == 17
    first = trials[1].split(",")
    assert first[0] == "histogram"
    assert first[1] == "type1"
    assert first[8] == "ok"

    summary = (tmp_path / "out" / "summary.csv").read_text().splitlines()
    assert summary[0] == (
        "experiment,protocol,theta,n_qubits,n_copies,eta,"
        "n_trials,f0,f_ave,delta_f_bias,std_f,coverage_pct"
    )
    assert len(summary) == 3
    row = summary[2].split(",")
    assert row[1] == "type2"
    assert float(row[2]) == pytest.approx(np.pi / 2, abs=1e-8)
    assert row[6] == "8"

    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert set(manifest) == {
        "config", "started_at", "finished_at", "trial_count", "failed_count"
    }
    assert manifest["trial_count"] == 16
    assert manifest["config"]["master_seed"] == 7

    hist = (tmp_path / "out" / "histogram.csv").read_text().splitlines()
    assert hist[0] == "experiment,protocol,theta,bin_lo,bin_hi,count"
    counts = sum(int(r.split(",")[-1]) for r in hist[1:])
    assert counts == 16


def test_float_format_is_nine_significant_digits(tmp_path):
    cfg = small_config(tmp_path, n_trials=3,
                       protocols=[parse_protocol("type2:0.5pi")])
    run_experiment(cfg)
    row = (tmp_path / "out" / "trials.csv").read_text().splitlines()[1].split(",")
    assert row[2] == "1.57079633"  # theta rendered at 9 significant digits
    assert len(row[7].replace("-", "").replace(".", "").lstrip("0")) <= 9


def test_reruns_are_byte_identical(tmp_path):
    cfg1 = small_config(tmp_path, output_dir=tmp_path / "a", n_trials=6)
    cfg2 = small_config(tmp_path, output_dir=tmp_path / "b", n_trials=6)
    run_experiment(cfg1)
    run_experiment(cfg2)
    h = [
        hashlib.sha256((tmp_path / sub / "trials.csv").read_bytes()).hexdigest()
        for sub in ("a", "b")
    ]
    assert h[0] == h[1]


def test_exact_run_leaves_coverage_empty(tmp_path):
    cfg = small_config(tmp_path, n_copies=0, n_trials=2)
    run_experiment(cfg)
    rows = (tmp_path / "out" / "summary.csv").read_text().splitlines()[1:]
    for row in rows:
        assert row.endswith(",")  # coverage column is empty for exact runs


def test_failed_trials_are_recorded_and_excluded(tmp_path, monkeypatch):
    from dsm_lab.recon import DegenerateEstimateError

    real = harness_mod._reconstruct_fidelity
    calls = {"n": 0}

    def flaky(*args, **kwargs):
        calls["n"] += 1
        if calls["n"] % 5 == 0:
            raise DegenerateEstimateError("synthetic degenerate draw")
        return real(*args, **kwargs)

    monkeypatch.setenv("DSM_LAB_THREADS", "1")  # keep the call counter ordered
    monkeypatch.setattr(harness_mod, "_reconstruct_fidelity", flaky)
    cfg = small_config(tmp_path, n_trials=10,
                       protocols=[parse_protocol("type1")])
    result = run_experiment(cfg)
    assert result["failed_count"] == 2

    trials = (tmp_path / "out" / "trials.csv").read_text().splitlines()[1:]
    failed_rows = [r for r in trials if ",failed," in r]
    assert len(failed_rows) == 2
    for row in failed_rows:
        assert row.split(",")[7] == "nan"

    summary = (tmp_path / "out" / "summary.csv").read_text().splitlines()[1]
    assert summary.split(",")[6] == "8"  # failures excluded from the stats

    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert manifest["failed_count"] == 2

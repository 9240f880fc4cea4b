import json

import pytest

from privsum.cli import main
from privsum.harness import (
    CSV_COLUMNS,
    SimulationConfig,
    bench_dlog,
    bench_round,
    build_params,
    replay_transcript,
    resolve_backend,
    run_simulation,
    summarize,
    write_csv,
)


class TestSimulationConfig:
    def test_dict_roundtrip(self):
        cfg = SimulationConfig(protocol="pcl", backend="test", n=5, beta=10,
                               rounds=2, seed=3, trials=4)
        assert SimulationConfig.from_dict(cfg.to_dict()) == cfg

    def test_bad_topology_string_rejected(self):
        with pytest.raises(ValueError):
            SimulationConfig(protocol="pcl", backend="test", n=5, beta=10,
                             topology="ring:3")

    def test_bad_backend_rejected(self):
        with pytest.raises(ValueError):
            SimulationConfig(protocol="pcl", backend="gpu", n=5, beta=10)

    def test_round_bound_rejected_at_build(self):
        cfg = SimulationConfig(protocol="pcl", backend="test", n=10, beta=10,
                               rounds=5, tolerance=2)
        with pytest.raises(Exception):
            build_params(cfg)

    def test_backend_resolution(self):
        assert resolve_backend("pcl", "test").kind == "small-field-subgroup"
        assert resolve_backend("pcl", "mock").kind == "mock-additive"
        assert resolve_backend("kdkm", "mock").kind == "mock-pairing"
        assert resolve_backend("kdkm", "test").kind == "mock-pairing"
        assert resolve_backend("pcl", "prod").kind == "curve"


class TestRunSimulation:
    def test_pcl_many_trials_all_match(self):
        cfg = SimulationConfig(protocol="pcl", backend="test", n=5, beta=10,
                               rounds=2, trials=25, seed=1)
        assert run_simulation(cfg).all_match

    def test_kdkm_multi_round_from_one_setup(self):
        cfg = SimulationConfig(protocol="kdkm", backend="mock", n=3, beta=1,
                               rounds=4, seed=2)
        result = run_simulation(cfg)
        assert result.all_match
        assert [rr.round for rr in result.trials[0].rounds] == [1, 2, 3, 4]

    def test_kdk1_on_both_insecure_backends(self):
        for backend in ("test", "mock"):
            cfg = SimulationConfig(protocol="kdk1", backend=backend, n=4,
                                   beta=100, seed=5, trials=3)
            assert run_simulation(cfg).all_match

    def test_report_shape(self):
        cfg = SimulationConfig(protocol="pcl", backend="test", n=3, beta=10,
                               rounds=1, trials=2, seed=0)
        report = run_simulation(cfg).report()
        assert report["all_match"] is True
        assert len(report["results"]) == 2
        assert len(report["op_counts"]["per_party"]) == 3
        assert set(report["op_counts"]["total"]) == {
            "exponentiations", "multiplications", "pairings", "inversions"}


class TestDeterminismAndReplay:
    def test_identical_configs_identical_artifacts(self):
        cfg = SimulationConfig(protocol="pcl", backend="test", n=6, beta=50,
                               rounds=2, trials=2, seed=77)
        a, b = run_simulation(cfg), run_simulation(cfg)
        assert a.report_json() == b.report_json()
        assert a.transcript_text() == b.transcript_text()

    def test_seed_changes_transcript(self):
        base = dict(protocol="pcl", backend="test", n=4, beta=50, rounds=1)
        a = run_simulation(SimulationConfig(seed=1, **base))
        b = run_simulation(SimulationConfig(seed=2, **base))
        assert a.transcript_text() != b.transcript_text()

    def test_replay_reproduces_sigmas(self):
        cfg = SimulationConfig(protocol="kdkm", backend="mock", n=4, beta=20,
                               rounds=3, trials=2, seed=9)
        result = run_simulation(cfg)
        assert replay_transcript(cfg, result.transcript_text(), result.report())

    def test_replay_detects_tampering(self):
        cfg = SimulationConfig(protocol="pcl", backend="test", n=4, beta=20,
                               rounds=1, seed=9)
        result = run_simulation(cfg)
        lines = result.transcript_text().splitlines()
        tampered = []
        for line in lines:
            rec = json.loads(line)
            if rec["phase"] == "round" and rec["party"] == 2:
                group = result.params.aggregation_group
                fake = group.mul(group.decode(bytes.fromhex(rec["payload"])),
                                 group.generator)
                rec["payload"] = group.encode(fake).hex()
            tampered.append(json.dumps(rec, sort_keys=True))
        assert not replay_transcript(cfg, "\n".join(tampered), result.report())


class TestBenchmarks:
    def test_round_records_and_csv(self, tmp_path):
        records = bench_round("pcl", [3], 2, warmup=1)
        assert len(records) == 2
        assert all(r.experiment == "round-pcl" and r.ms > 0 for r in records)
        assert all(r.exps == 3 for r in records)  # full topology: n entries
        path = tmp_path / "round.csv"
        write_csv(records, path)
        rows = path.read_text().splitlines()
        assert rows[0] == ",".join(CSV_COLUMNS)
        assert len(rows) == 3

    def test_round_rejects_insecure_backends(self):
        with pytest.raises(ValueError):
            bench_round("pcl", [3], 1, backend="test")

    def test_dlog_records(self):
        records = bench_dlog([6], 3, warmup=0)
        by_exp = {r.experiment for r in records}
        assert by_exp == {"dlog-curve", "dlog-gt"}
        assert all(r.ok for r in records)

    def test_dlog_bits_guard(self):
        with pytest.raises(ValueError):
            bench_dlog([40], 1)

    def test_summarize_fields(self):
        records = bench_dlog([5], 2, warmup=0)
        summary = summarize(records)
        entry = summary["dlog-curve/5"]
        assert entry["reps"] == 2
        assert entry["recovery_rate"] == 1.0
        assert entry["mean_ms"] > 0


class TestCli:
    def test_bounds_pcl(self, capsys):
        assert main(["bounds", "--protocol", "pcl", "--n", "100", "--t", "33"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["max_rounds"] == 33

    def test_bounds_kdkm_with_tau(self, capsys):
        assert main(["bounds", "--protocol", "kdkm", "--n", "100",
                     "--tau", "0.33"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["nonholes_extra"] == 15

    def test_bounds_requires_exactly_one_tolerance_flag(self):
        with pytest.raises(SystemExit):
            main(["bounds", "--protocol", "pcl", "--n", "10"])
        with pytest.raises(SystemExit):
            main(["bounds", "--protocol", "pcl", "--n", "10", "--t", "1",
                  "--tau", "0.1"])

    def test_simulate_writes_report_and_transcript(self, tmp_path):
        out = tmp_path / "report.json"
        code = main(["simulate", "--protocol", "pcl", "--backend", "test",
                     "--n", "4", "--beta", "10", "--rounds", "1",
                     "--seed", "3", "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["all_match"] is True
        transcript = tmp_path / "report.transcript.jsonl"
        assert transcript.exists()
        first = json.loads(transcript.read_text().splitlines()[0])
        assert set(first) == {"phase", "round", "party", "payload", "trial"}

    def test_simulate_accepts_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "sim.json"
        cfg.write_text(json.dumps({"protocol": "kdk1", "backend": "mock",
                                   "n": 3, "beta": 5, "seed": 1}))
        assert main(["simulate", "--config", str(cfg)]) == 0
        assert json.loads(capsys.readouterr().out)["all_match"] is True

    def test_cli_flags_override_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "sim.json"
        cfg.write_text(json.dumps({"protocol": "kdk1", "backend": "mock",
                                   "n": 3, "beta": 5, "seed": 1}))
        assert main(["simulate", "--config", str(cfg), "--n", "4"]) == 0
        assert json.loads(capsys.readouterr().out)["config"]["n"] == 4

    def test_attack_on_ring_topology(self, tmp_path, capsys):
        cfg = tmp_path / "sim.json"
        cfg.write_text(json.dumps({"protocol": "pcl", "backend": "test",
                                   "n": 8, "beta": 50, "rounds": 1,
                                   "topology": "nn:2", "seed": 9}))
        assert main(["attack", "--config", str(cfg), "--coalition", "1,5"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["success"] is True
        assert len(report["components"]) == 2

    def test_bench_round_cli(self, tmp_path, capsys):
        out = tmp_path / "bench.csv"
        code = main(["bench", "round", "--protocol", "pcl", "--n", "3",
                     "--reps", "2", "--warmup", "1", "--out", str(out)])
        assert code == 0
        assert out.read_text().splitlines()[0] == ",".join(CSV_COLUMNS)

    def test_bench_dlog_cli(self, capsys):
        assert main(["bench", "dlog", "--bits", "5", "--reps", "2",
                     "--warmup", "0"]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["dlog-curve/5"]["recovery_rate"] == 1.0

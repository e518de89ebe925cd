import json

import pytest

from mecoffload import ConfigurationError, GenerationSpec, generate_instance, write_instance
from mecoffload.harness import (
    SweepSpec,
    cli_main,
    run_sweep,
    schedule_from_doc,
    schedule_to_doc,
    sweep_spec_from_doc,
)
from mecoffload.model import EnergySchedule
from mecoffload.rate import solve_rate_max
from support import make_instance, make_user


def tiny_spec(**kw):
    base = dict(experiment="rate-vs-K", grid=(4.0, 5.0), realizations=3, base_seed=11)
    base.update(kw)
    return SweepSpec(**base)


class TestSweep:
    def test_unknown_experiment(self):
        with pytest.raises(ConfigurationError, match="rate-vs-K"):
            run_sweep(SweepSpec(experiment="nope"))

    def test_unknown_algorithm_lists_valid_names(self):
        with pytest.raises(ConfigurationError, match="suboptimal"):
            run_sweep(SweepSpec(experiment="energy-vs-T", algorithms=("nope",)))
        with pytest.raises(ConfigurationError, match="all-offload"):
            run_sweep(tiny_spec(algorithms=("nope",)))

    def test_schema_and_shape(self):
        text = run_sweep(tiny_spec(algorithms=("optimal", "greedy")))
        lines = text.strip().split("\n")
        assert lines[0] == (
            "experiment,param,value,algorithm,realizations,mean_rate_bps,stderr_rate_bps"
        )
        assert len(lines) == 1 + 2 * 2  # grid points x algorithms
        cells = lines[1].split(",")
        assert cells[0] == "rate-vs-K" and cells[1] == "n_users"
        float(cells[5]), float(cells[6])  # full-precision numerics parse back

    def test_byte_identical_reruns(self):
        spec = tiny_spec(algorithms=("optimal", "all-offload"))
        assert run_sweep(spec) == run_sweep(spec)

    def test_energy_sweep_counts_feasible(self):
        spec = SweepSpec(
            experiment="energy-vs-T",
            grid=(0.05, 0.5),  # first point infeasible, second fine
            realizations=3,
            base_seed=5,
            n_users=4,
            algorithms=("suboptimal",),
        )
        lines = run_sweep(spec).strip().split("\n")
        first = lines[1].split(",")
        second = lines[2].split(",")
        assert first[5] == "0" and first[6] == ""  # nothing feasible at 50 ms
        assert second[5] == "3" and float(second[6]) > 0

    def test_certify_columns(self):
        text = run_sweep(tiny_spec(certify=True, algorithms=("optimal",)))
        header = text.split("\n", 1)[0]
        assert header.endswith("certified,max_rel_gap")
        row = text.strip().split("\n")[1].split(",")
        assert row[-2] == "3"
        assert float(row[-1]) <= 1e-9

    def test_spec_file_round_trip(self):
        doc = {"experiment": "rate-vs-d", "grid": [0.0, 0.1], "realizations": 2}
        spec = sweep_spec_from_doc(doc)
        assert spec.experiment == "rate-vs-d"
        with pytest.raises(ConfigurationError, match="bogus"):
            sweep_spec_from_doc({"experiment": "rate-vs-d", "bogus": 1})
        with pytest.raises(ConfigurationError, match="experiment"):
            sweep_spec_from_doc({"grid": [1]})


class TestScheduleDocs:
    def test_energy_infeasible_round_trips_through_null(self):
        schedule = EnergySchedule(
            scheduled=frozenset(),
            offload_bits={0: 0.0},
            compute_time=0.0,
            objective=float("nan"),
            total_energy=float("nan"),
            status="infeasible",
            t_min=0.25,
        )
        doc = schedule_to_doc(schedule)
        assert doc["objective"] is None
        text = json.dumps(doc)  # must be strict JSON, no NaN literals
        back = schedule_from_doc(json.loads(text))
        assert back.status == "infeasible"
        assert back.t_min == 0.25


def write_single_user_feasibility_instance(path):
    """The instance whose smallest feasible deadline is 11/2.1 s."""
    u = make_user(0, a=0.05, b=0.05, gamma=1.0, r=1.0, task=10.0, cycles=1.0, freq=1.0)
    write_instance(make_instance([u], deadline=1.0, degradation=0.0), path)


class TestCli:
    def test_generate_solve_validate_chain(self, tmp_path, capsys):
        inst_path = tmp_path / "inst.json"
        sched_path = tmp_path / "sched.json"
        table_path = tmp_path / "table.csv"
        assert cli_main([
            "generate", "--users", "6", "--seed", "3", "--degradation", "0.15",
            "--out", str(inst_path),
        ]) == 0
        assert cli_main([
            "solve-rate", str(inst_path), "--out", str(sched_path), "--table", str(table_path),
        ]) == 0
        out = capsys.readouterr().out
        assert "sum_rate_bps" in out
        table = table_path.read_text().strip().split("\n")
        assert table[0] == "m,rate_bps,iterations,selected"
        assert len(table) == 1 + 6
        assert cli_main(["validate", str(inst_path), str(sched_path)]) == 0
        # tamper: double one offload size
        doc = json.loads(sched_path.read_text())
        uid = str(sorted(doc["scheduled"])[0])
        doc["offload_bits"][uid] *= 2
        sched_path.write_text(json.dumps(doc))
        assert cli_main(["validate", str(inst_path), str(sched_path)]) == 1

    def test_solve_rate_matches_library(self, tmp_path, capsys):
        inst = generate_instance(GenerationSpec(n_users=1, degradation=0.1), 5)
        path = tmp_path / "one.json"
        write_instance(inst, path)
        assert cli_main(["solve-rate", str(path)]) == 0
        out = capsys.readouterr().out
        printed = float(out.split("sum_rate_bps: ")[1].split()[0])
        assert printed == pytest.approx(solve_rate_max(inst)[0].sum_rate, rel=1e-12)

    def test_tmin_prints_algebraic_value(self, tmp_path, capsys):
        path = tmp_path / "feas.json"
        write_single_user_feasibility_instance(path)
        assert cli_main(["tmin", str(path)]) == 0
        printed = float(capsys.readouterr().out.split()[0])
        assert printed == pytest.approx(11.0 / 2.1, abs=1e-6)

    def test_solve_energy_reports_infeasible(self, tmp_path, capsys):
        path = tmp_path / "feas.json"
        write_single_user_feasibility_instance(path)
        assert cli_main(["solve-energy", str(path)]) == 0
        out = capsys.readouterr().out
        assert "status: infeasible" in out
        assert "t_min_s" in out

    def test_certify_small_instance(self, tmp_path, capsys):
        inst_path = tmp_path / "inst.json"
        assert cli_main([
            "generate", "--users", "8", "--seed", "12", "--deadline-ms", "400",
            "--degradation", "0.2", "--out", str(inst_path),
        ]) == 0
        assert cli_main(["certify", str(inst_path)]) == 0
        out = capsys.readouterr().out
        assert "rate: MATCH (rel err < 1e-9)" in out
        assert "energy" in out

    def test_sweep_cli_writes_csv(self, tmp_path, capsys):
        out_path = tmp_path / "sweep.csv"
        assert cli_main([
            "sweep", "--experiment", "rate-vs-d", "--grid", "0.0,0.1",
            "--realizations", "2", "--seed", "9", "--algorithms", "optimal,greedy",
            "--out", str(out_path),
        ]) == 0
        text = out_path.read_text()
        assert text.startswith("experiment,param,value,algorithm")
        assert len(text.strip().split("\n")) == 5

    def test_sweep_spec_file_with_flag_overrides(self, tmp_path):
        spec_path = tmp_path / "spec.json"
        out_path = tmp_path / "out.csv"
        spec_path.write_text(json.dumps({
            "experiment": "rate-vs-K",
            "grid": [4, 5],
            "realizations": 2,
            "base_seed": 3,
            "algorithms": ["optimal"],
        }))
        assert cli_main(["sweep", str(spec_path), "--out", str(out_path)]) == 0
        assert out_path.exists()

    def test_usage_errors_exit_2(self, tmp_path, capsys):
        assert cli_main(["sweep"]) == 2
        assert "error:" in capsys.readouterr().err
        assert cli_main(["sweep", "--experiment", "rate-vs-K",
                         "--algorithms", "bogus", "--realizations", "1"]) == 2
        assert "error:" in capsys.readouterr().err
        missing = tmp_path / "missing.json"
        assert cli_main(["solve-rate", str(missing)]) == 2
        err = capsys.readouterr().err
        assert err.startswith("error:") and "\n" not in err.strip("\n")

    def test_byte_identical_sweep_files(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            assert cli_main([
                "sweep", "--experiment", "energy-vs-d", "--grid", "0.0,0.2",
                "--realizations", "2", "--seed", "4", "--out", str(out),
            ]) == 0
        assert a.read_bytes() == b.read_bytes()

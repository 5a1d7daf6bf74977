import csv
import json

from seqelim import report_from_json
from seqelim.cli import main
from seqelim.harness import CSV_COLUMNS


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestBench:
    def test_nine_rows_csv(self, tmp_path, capsys):
        out = tmp_path / "bench.csv"
        code, stdout, _ = run_cli(
            capsys,
            "bench",
            "--setup",
            "setup1",
            "--k",
            "40",
            "--t",
            "60",
            "--runs",
            "5",
            "--seed",
            "7",
            "--out",
            str(out),
        )
        assert code == 0
        with open(out) as fh:
            rows = list(csv.reader(fh))
        assert tuple(rows[0]) == CSV_COLUMNS
        assert len(rows) == 1 + 9
        kinds = [r[4] for r in rows[1:]]
        assert kinds == [
            "nseqel",
            "nseqel",
            "nseqel",
            "nseqel",
            "succ-rej",
            "seq-halve",
            "ucb-e",
            "ucb-e",
            "ucb-e",
        ]
        assert "setup=setup1" in stdout

    def test_missing_setup_is_config_error(self, capsys):
        code, _, err = run_cli(capsys, "bench", "--runs", "5")
        assert code == 2
        assert "config error" in err

    def test_bare_numeric_setup_id(self, capsys):
        code, stdout, _ = run_cli(
            capsys, "bench", "--setup", "1", "--k", "40", "--t", "45", "--runs", "3"
        )
        assert code == 0
        assert "setup=setup1" in stdout


class TestRun:
    def test_explicit_means_json_roundtrip(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        code, stdout, _ = run_cli(
            capsys,
            "run",
            "--means",
            "0.7,0.5,0.3",
            "--algo",
            "nseqel:1.5",
            "--algo",
            "succ-rej",
            "--t",
            "40",
            "--runs",
            "50",
            "--seed",
            "3",
            "--out",
            str(out),
        )
        assert code == 0
        report = report_from_json(out.read_text())
        assert report.K == 3 and report.runs == 50 and report.seed == 3
        assert [r.label for r in report.results] == ["nseqel(p=1.5)", "succ-rej"]
        for r in report.results:
            assert f"{r.label:<18} freq={r.freq:.6f}" in stdout

    def test_baseline_ratios_printed(self, capsys):
        code, stdout, _ = run_cli(
            capsys,
            "run",
            "--means",
            "0.8,0.4",
            "--algo",
            "succ-rej",
            "--algo",
            "seq-halve",
            "--t",
            "20",
            "--runs",
            "30",
            "--baseline",
            "succ-rej",
        )
        assert code == 0
        assert "ratio succ-rej/" in stdout

    def test_bad_algorithm_config(self, capsys):
        code, _, err = run_cli(
            capsys, "run", "--means", "0.7,0.6", "--algo", "thompson", "--runs", "5"
        )
        assert code == 2

    def test_seed_env_var_default(self, capsys, monkeypatch):
        monkeypatch.setenv("SEQELIM_SEED", "12345")
        code, stdout, _ = run_cli(
            capsys,
            "run",
            "--means",
            "0.9,0.1",
            "--algo",
            "succ-rej",
            "--t",
            "10",
            "--runs",
            "5",
        )
        assert code == 0
        assert "seed=12345" in stdout

    def test_seed_flag_overrides_env_var(self, capsys, monkeypatch):
        monkeypatch.setenv("SEQELIM_SEED", "12345")
        code, stdout, _ = run_cli(
            capsys,
            "run",
            "--means",
            "0.9,0.1",
            "--algo",
            "succ-rej",
            "--t",
            "10",
            "--runs",
            "5",
            "--seed",
            "6",
        )
        assert code == 0
        assert "seed=6" in stdout


class TestBound:
    def test_setup1_h1(self, capsys):
        code, stdout, _ = run_cli(capsys, "bound", "--setup", "setup1", "--k", "40")
        assert code == 0
        assert "H1      = 3900" in stdout
        assert "succ-rej" in stdout and "nseqel p=1" in stdout

    def test_p1_row_matches_succ_rej_alpha(self, capsys):
        # alpha(nseqel, p=1) = H2 * C_1 = H2 * logbar K = alpha(succ-rej).
        code, stdout, _ = run_cli(
            capsys, "bound", "--means", "0.7,0.6,0.5", "--t", "100", "--p", "1"
        )
        assert code == 0
        lines = [l for l in stdout.splitlines() if "alpha=" in l]
        alphas = {
            l.split()[0]: l.split("alpha=")[1].split()[0] for l in lines
        }
        assert alphas["succ-rej"] == alphas["nseqel"]


class TestAdviseP:
    def test_table_cell(self, capsys):
        code, stdout, _ = run_cli(capsys, "advise-p", "--k", "40", "--gamma", "0.5")
        assert code == 0
        assert "(0.29, 1.71)" in stdout

    def test_explicit_f_k(self, capsys):
        code, stdout, _ = run_cli(capsys, "advise-p", "--k", "1000", "--f-k", "2")
        assert code == 0
        assert "(1.00, 2.00]" in stdout

    def test_out_of_range(self, capsys):
        code, _, err = run_cli(capsys, "advise-p", "--k", "40", "--f-k", "80")
        assert code == 2


class TestBlock:
    def test_grouped_partition(self, tmp_path, capsys):
        out = tmp_path / "block.csv"
        code, stdout, _ = run_cli(
            capsys,
            "block",
            "--means",
            "0.9,0.3,0.2,0.1",
            "--partition",
            "2x2",
            "--t",
            "30",
            "--runs",
            "40",
            "--seed",
            "1",
            "--out",
            str(out),
        )
        assert code == 0
        rows = list(csv.reader(out.open()))
        assert rows[1][4] == "block"
        assert rows[1][5] == "M=2"

    def test_partition_must_cover(self, capsys):
        code, _, _ = run_cli(
            capsys,
            "block",
            "--means",
            "0.9,0.3,0.2",
            "--partition",
            "2x2",
            "--runs",
            "5",
        )
        assert code == 2


class TestOracle:
    def test_exact_probability_printed(self, capsys):
        code, stdout, _ = run_cli(
            capsys,
            "oracle",
            "--means",
            "0.7,0.6",
            "--t",
            "10",
            "--algo",
            "succ-rej",
        )
        assert code == 0
        assert "0.2490264" in stdout


class TestConfigFile:
    def test_flags_win_over_config(self, tmp_path, capsys):
        conf = tmp_path / "conf.json"
        conf.write_text(json.dumps({"means": "0.9,0.1", "t": 10, "runs": 5, "seed": 1}))
        code, stdout, _ = run_cli(
            capsys,
            "run",
            "--config",
            str(conf),
            "--algo",
            "succ-rej",
            "--seed",
            "77",
        )
        assert code == 0
        assert "seed=77" in stdout

    def test_missing_config_file(self, capsys):
        code, _, err = run_cli(
            capsys, "run", "--config", "/nonexistent.json", "--algo", "succ-rej"
        )
        assert code == 2

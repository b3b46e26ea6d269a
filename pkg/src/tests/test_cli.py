import json

import numpy as np
import pytest

from app.cli import build_parser, config_from_args, main
from app.outputs import read_rows, render_rows
from app.run_config import RunConfig, parse_c_range, parse_class_list, validate_run_config
from core.analysis import zero_interval
from core.collusion import ClassTag
from core.errors import InvalidInputError
from core.worst import SolverConfig, eta_c


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestRateCommand:
    def test_joint_class_a(self, capsys):
        code, out = run_cli(capsys, "rate", "--decoder", "joint", "--class", "A", "--pdf", "tardos", "--c", "2")
        assert code == 0
        assert out.startswith("# tool=collrates")
        (row,) = read_rows(out, "csv")
        assert row["decoder"] == "joint" and row["class"] == "A" and row["pdf"] == "tardos"
        assert float(row["rate_bits"]) == pytest.approx(0.1537, abs=1e-4)
        assert row["theta"] == "0.0,0.5,1.0"

    def test_joint_class_d_at_half(self, capsys):
        code, out = run_cli(capsys, "rate", "--class", "D", "--pdf", "dirac:0.5", "--c", "4", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["provenance"]["command"] == "rate"
        assert payload["rows"][0]["rate_bits"] == pytest.approx(0.03125, abs=1e-12)
        assert payload["rows"][0]["theta"] == "theta(p):joint-closed-form"

    def test_simple_class_b(self, capsys):
        code, out = run_cli(capsys, "rate", "--decoder", "simple", "--class", "B", "--c", "4", "--restarts", "8")
        assert code == 0
        (row,) = read_rows(out, "csv")
        assert float(row["rate_bits"]) == pytest.approx(0.02758, abs=5e-4)

    def test_class_list_is_ordered(self, capsys):
        code, out = run_cli(capsys, "rate", "--class", "D,A,C,B", "--pdf", "flat", "--c", "3", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["provenance"]["class"] == "A,B,C,D"
        rows = payload["rows"]
        assert [row["class"] for row in rows] == ["A", "B", "C", "D"]
        rates = [row["rate_bits"] for row in rows]
        assert all(later <= earlier + 1e-9 for earlier, later in zip(rates, rates[1:]))

    def test_class_list_over_several_c(self, capsys):
        code, out = run_cli(capsys, "worst-attack", "--class", "B,C", "--c", "3,2")
        assert code == 0
        rows = read_rows(out, "csv")
        assert [(row["c"], row["class"]) for row in rows] == [("2", "B"), ("2", "C"), ("3", "B"), ("3", "C")]

    def test_c_range_rows_in_order(self, capsys):
        code, out = run_cli(capsys, "rate", "--pdf", "flat", "--c", "4,2,3", "--format", "tsv")
        assert code == 0
        assert [row["c"] for row in read_rows(out, "tsv")] == ["2", "3", "4"]

    def test_reruns_are_byte_identical(self, tmp_path):
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["worst-attack", "--class", "C", "--pdf", "flat", "--c", "2..4", "-q"]
        assert main(argv + ["--out", str(first)]) == 0
        assert main(argv + ["--out", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()


class TestExitCodes:
    def test_eta_below_three(self, capsys):
        code, _ = run_cli(capsys, "eta", "--c", "2")
        assert code == 2

    def test_unknown_pdf(self, capsys):
        code, _ = run_cli(capsys, "rate", "--pdf", "beta", "--c", "3")
        assert code == 2

    def test_missing_c(self, capsys):
        code, _ = run_cli(capsys, "rate")
        assert code == 2

    def test_simple_beyond_cap(self, capsys):
        code, _ = run_cli(capsys, "rate", "--decoder", "simple", "--class", "C", "--c", "16")
        assert code == 4

    def test_bad_class_list(self, capsys):
        code, _ = run_cli(capsys, "rate", "--class", "A,E", "--c", "3")
        assert code == 2

    def test_class_list_only_for_rate_commands(self, capsys):
        code, _ = run_cli(capsys, "curve", "--class", "A,B", "--c", "3")
        assert code == 2

    def test_format_not_allowed(self, capsys):
        code, _ = run_cli(capsys, "mc-check", "--class", "A", "--c", "2", "--format", "csv")
        assert code == 2

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit):
            main(["bogus"])


class TestOtherCommands:
    def test_eta(self, capsys):
        code, out = run_cli(capsys, "eta", "--c", "3..5")
        assert code == 0
        rows = read_rows(out, "csv")
        assert [row["c"] for row in rows] == ["3", "4", "5"]
        assert float(rows[0]["eta"]) == 0.5
        assert float(rows[1]["eta_minus_inv_c"]) == pytest.approx(eta_c(4) - 0.25)

    def test_capacity_d(self, capsys):
        code, out = run_cli(capsys, "capacity-d", "--c", "2,5")
        assert code == 0
        for row in read_rows(out, "csv"):
            c = int(row["c"])
            assert float(row["capacity_bits"]) == pytest.approx(1.0 / (c * 2 ** (c - 1)), rel=1e-9)
            assert float(row["quadrature_bits"]) == pytest.approx(float(row["capacity_bits"]), rel=1e-9)

    def test_curve_simple_class_d(self, capsys):
        code, out = run_cli(capsys, "curve", "--decoder", "simple", "--class", "D", "--c", "4", "--grid", "101")
        assert code == 0
        rows = read_rows(out, "csv")
        assert len(rows) == 101
        assert len(rows[0]["theta"].split(",")) == 5
        ps = np.array([float(r["p"]) for r in rows])
        rates = np.array([float(r["rate_bits"]) for r in rows])
        lo, hi = zero_interval(ps, rates, atol=1e-12)
        eta = eta_c(4)
        assert lo == pytest.approx(eta, abs=0.011)
        assert hi == pytest.approx(1.0 - eta, abs=0.011)

    def test_curve_class_a_has_no_theta_column(self, capsys):
        code, out = run_cli(capsys, "curve", "--c", "3", "--grid", "11")
        assert code == 0
        rows = read_rows(out, "csv")
        assert set(rows[0]) == {"p", "rate_bits"}

    def test_mc_check(self, capsys):
        code, out = run_cli(capsys, "mc-check", "--class", "A", "--pdf", "dirac:0.5", "--c", "3",
                            "--samples", "20000", "--seed", "7")
        assert code == 0
        payload = json.loads(out)
        assert set(payload) == {
            "decoder", "class", "c", "pdf", "mi_bits", "std_err_bits", "samples", "seed",
            "reference_rate_bits", "z_score", "provenance",
        }
        assert payload["seed"] == 7
        assert payload["mi_bits"] == pytest.approx(payload["reference_rate_bits"], abs=1e-12)

    def test_mc_check_explicit_channel(self, capsys):
        code, out = run_cli(capsys, "mc-check", "--channel", "majority:3", "--pdf", "dirac:0.3", "--c", "3",
                            "--samples", "20000", "--plugin")
        assert code == 0
        payload = json.loads(out)
        # majority is mirror-symmetric, so it sits in Class B
        assert payload["class"] == "B"
        assert abs(payload["mi_bits"] - payload["reference_rate_bits"]) < 0.05

    def test_mc_check_class_c_channel(self, capsys):
        code, out = run_cli(capsys, "mc-check", "--channel", "0,0.2,0.7,1", "--pdf", "dirac:0.3", "--c", "3",
                            "--samples", "20000")
        assert code == 0
        payload = json.loads(out)
        assert payload["class"] == "C"
        assert payload["reference_rate_bits"] > 0.0

    @pytest.mark.slow
    def test_tables(self, tmp_path):
        assert main(["tables", "--out", str(tmp_path), "--restarts", "8", "-q"]) == 0
        joint = read_rows((tmp_path / "table_joint_tardos.tsv").read_text(), "tsv")
        assert [row["c"] for row in joint] == [str(c) for c in range(2, 10)]
        assert joint[0]["theta*"] == "(0.000,0.500,1.000)"
        assert joint[0]["rate_bits"] == "0.154"
        eta_rows = read_rows((tmp_path / "table_eta.tsv").read_text(), "tsv")
        assert [row["c"] for row in eta_rows] == ["3", "4", "5", "6", "10", "15", "20"]
        assert (tmp_path / "table_simple_tardos.tsv").exists()


class TestRunConfig:
    @pytest.mark.parametrize("text,expected", [
        ("5", [5]),
        ("2..5", [2, 3, 4, 5]),
        ("6,2,4,2", [2, 4, 6]),
    ])
    def test_parse_c_range(self, text, expected):
        assert parse_c_range(text) == expected

    @pytest.mark.parametrize("text", ["x", "5..2", "2..", ""])
    def test_parse_c_range_invalid(self, text):
        with pytest.raises(InvalidInputError):
            parse_c_range(text)

    def test_parse_class_list(self):
        assert parse_class_list("d, a,B,D") == [ClassTag.A, ClassTag.B, ClassTag.D]
        assert parse_class_list("C") == [ClassTag.C]
        with pytest.raises(InvalidInputError):
            parse_class_list("A,,B")

    def test_class_list_from_args(self):
        cfg = config_from_args(build_parser().parse_args(["rate", "--class", "C,A", "--c", "3"]))
        assert cfg.classes == [ClassTag.A, ClassTag.C]
        assert cfg.class_tag == ClassTag.A
        assert validate_run_config(cfg)[0]

    def test_defaults_from_args(self):
        args = build_parser().parse_args(["worst-attack", "--c", "3"])
        cfg = config_from_args(args)
        assert cfg.class_tag.value == "C"
        assert cfg.fmt == "csv"
        assert cfg.cs == [3]

    def test_validation_collects_everything(self):
        cfg = RunConfig(command="curve", pdf="nope", cs=[2, 3], grid=1, fmt="json",
                        solver=SolverConfig(restarts=0))
        ok, problems = validate_run_config(cfg)
        assert not ok
        options = {p.option for p in problems}
        assert {"--pdf", "--grid", "--c", "--tol/--restarts"} <= options

    def test_tables_warns_on_c(self):
        ok, problems = validate_run_config(RunConfig(command="tables", fmt="tsv", cs=[3]))
        assert ok
        assert [p.severity for p in problems] == ["warning"]


class TestOutputs:
    def test_csv_layout(self):
        text = render_rows(["c", "rate_bits"], [[2, 0.25]], "csv", {"tool": "collrates"})
        assert text == "# tool=collrates\nc,rate_bits\n2,0.25\n"

    def test_json_layout(self):
        text = render_rows(["c"], [[2]], "json", {"tool": "collrates"})
        assert json.loads(text) == {"provenance": {"tool": "collrates"}, "rows": [{"c": 2}]}

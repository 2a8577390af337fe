import json

import pytest

from udcdma.cli import cli_main


def run_cli(capsys, *argv):
    code = cli_main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_level1(capsys):
    code, out, _ = run_cli(capsys, "gen", "--level", "1")
    assert code == 0
    assert out == "1,1,1\n1,0,-1\n"


def test_gen_level2(capsys):
    code, out, _ = run_cli(capsys, "gen", "--level", "2")
    assert code == 0
    assert out.splitlines() == [
        "1,1,1,1,1,1,1,1",
        "1,1,1,1,0,-1,-1,-1",
        "1,1,0,-1,0,1,0,-1",
        "1,0,0,-1,0,-1,0,1",
    ]


def test_gen_json(capsys):
    code, out, _ = run_cli(capsys, "gen", "--level", "1", "--format", "json")
    assert code == 0
    parsed = json.loads(out)
    assert parsed["rows"] == 2 and parsed["cols"] == 3


def test_verify(capsys):
    code, out, _ = run_cli(capsys, "verify", "--level", "2")
    assert code == 0
    assert "uniquely decodable" in out


def test_verify_over_bound_is_diagnosed(capsys):
    code, _, err = run_cli(capsys, "verify", "--level", "4")
    assert code == 1
    assert "bound" in err


def test_ft_length2(capsys):
    code, out, _ = run_cli(capsys, "ft", "--length", "2")
    assert code == 0
    assert "f_t(2) = 3" in out


def test_decode_saturation(capsys):
    code, out, _ = run_cli(capsys, "decode", "--level", "2", "--y", "8,1,1,0")
    assert code == 0
    assert "x_hat: +1 +1 +1 +1 +1 +1 +1 +1" in out
    assert "comparisons: 1" in out


def test_decode_ml(capsys):
    code, out, _ = run_cli(capsys, "decode", "--level", "2", "--y", "8,1,1,0",
                           "--decoder", "ml")
    assert code == 0
    assert "comparisons: 256" in out


def test_complexity_analytic(capsys):
    code, out, _ = run_cli(capsys, "complexity", "--level", "3", "--mode", "analytic")
    assert code == 0
    parsed = json.loads(out)
    assert abs(parsed["T"] - 17.98) < 0.01


def test_complexity_both_level2(capsys):
    code, out, _ = run_cli(capsys, "complexity", "--level", "2", "--mode", "both")
    assert code == 0
    parsed = json.loads(out)
    assert parsed["G"] == "500"
    assert parsed["empirical_T"] is not None


def test_ber_writes_deterministic_csv(tmp_path, capsys):
    args = ["ber", "--level", "2", "--snr", "8:1:9", "--trials", "3000",
            "--seed", "13", "--decoders", "fda"]
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    code1, _, _ = run_cli(capsys, *args, "--out", str(p1))
    code2, _, _ = run_cli(capsys, *args, "--workers", "2", "--out", str(p2))
    assert code1 == code2 == 0
    assert p1.read_bytes() == p2.read_bytes()


def test_ber_stdout_csv(capsys):
    code, out, _ = run_cli(capsys, "ber", "--level", "2", "--sigma", "0",
                           "--trials", "100", "--decoders", "fda")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("snr_db,sigma,decoder")
    assert ",0,0" in lines[1] or "0.0" in lines[1]


def test_unknown_flag_exits_2():
    with pytest.raises(SystemExit) as exc:
        cli_main(["gen", "--levle", "2"])
    assert exc.value.code == 2


def test_missing_subcommand_exits_2():
    with pytest.raises(SystemExit) as exc:
        cli_main([])
    assert exc.value.code == 2


def test_bad_grid_diagnosed(capsys):
    code, _, err = run_cli(capsys, "ber", "--level", "2", "--snr", "5::", "--trials", "10")
    assert code == 1
    assert "error" in err

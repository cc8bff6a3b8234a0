import numpy as np
import pytest

from pmurecover.cli import main
from pmurecover.fileio import read_kv_file, read_matrix_csv, write_matrix_csv


@pytest.fixture
def small_truth(tmp_path):
    path = tmp_path / "x.csv"
    assert main(["simulate", "--rows", "180", "--cols", "12", "-o", str(path)]) == 0
    return path


def test_simulate_shape(small_truth):
    assert read_matrix_csv(small_truth).shape == (180, 12)


def test_svdrank(small_truth, capsys):
    assert main(["svdrank", str(small_truth), "--top", "2"]) == 0
    out = capsys.readouterr().out
    assert "sigma_1 =" in out and "approximate_rank(beta=0.995) = 1" in out


def test_mask_then_complete(tmp_path, small_truth, capsys):
    masked, mask = tmp_path / "m.csv", tmp_path / "k.csv"
    assert main(["mask", str(small_truth), "--regime", "rows", "--p", "0.9", "--seed", "3",
                 "-o", str(masked), "--mask-output", str(mask)]) == 0
    out, report = tmp_path / "xh.csv", tmp_path / "r.txt"
    rc = main(["complete", str(masked), "--mask", str(mask), "--truth", str(small_truth),
               "-o", str(out), "--report", str(report)])
    assert rc == 0
    kv = read_kv_file(report)
    assert kv["method"] == "admm" and "mae" in kv and float(kv["mae"]) < 0.05
    assert kv["reshape.n_star"] == "15"
    assert read_matrix_csv(out).shape == (180, 12)


def test_complete_persistent_without_truth(tmp_path, small_truth):
    masked = tmp_path / "m.csv"
    main(["mask", str(small_truth), "--regime", "burst", "--channels", "1-3", "--t-start", "20",
          "--t-end", "30", "-o", str(masked)])
    report = tmp_path / "r.txt"
    assert main(["complete", str(masked), "--method", "persistent", "-o", str(tmp_path / "o.csv"),
                 "--report", str(report)]) == 0
    assert "mae" not in read_kv_file(report)


def test_benchmark(tmp_path):
    out = tmp_path / "b.csv"
    rc = main(["benchmark", "--rows", "120", "--cols", "10", "--probabilities", "0.7,0.9",
               "--methods", "admm,persistent", "--trials", "2", "-o", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("method,regime,observed_probability")
    assert len(lines) == 5


def test_compare(tmp_path):
    out = tmp_path / "c.csv"
    rc = main(["compare", "--rows", "240", "--cols", "20", "--channels", "1-2", "--t-start", "50",
               "--t-end", "60", "--window-end", "100", "-o", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "instant,channel,truth,admm,als,persistent"
    assert len(lines) == 1 + 2 * 100


def test_exit_code_degenerate(tmp_path):
    path = tmp_path / "v.csv"
    path.write_text(",\n,\n")
    assert main(["complete", str(path), "-o", str(tmp_path / "o.csv")]) == 3


def test_exit_code_divergence(tmp_path, small_truth):
    masked = tmp_path / "m.csv"
    main(["mask", str(small_truth), "--p", "0.8", "-o", str(masked)])
    assert main(["complete", str(masked), "--rho", "5", "-o", str(tmp_path / "o.csv")]) == 4


def test_exit_code_parameter(tmp_path, small_truth):
    assert main(["complete", str(small_truth), "--reshape", "n=7", "-o", str(tmp_path / "o.csv")]) == 2
    assert main(["svdrank", str(small_truth), "--beta", "1.5"]) == 2


def test_exit_code_io(tmp_path):
    assert main(["svdrank", str(tmp_path / "missing.csv")]) == 5


def test_argparse_error_is_2():
    with pytest.raises(SystemExit) as exc:
        main(["complete"])
    assert exc.value.code == 2

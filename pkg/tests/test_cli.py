import json

import pytest

from championlab.cli import main
from championlab.report import Report

SMOKE_MATRIX = [
    ["census", "--x", "2000"],
    ["champion", "--x", "2000"],
    ["pairs", "--x", "2000", "--d", "6"],
    ["triples", "--x", "2000", "--d1", "2", "--d", "6"],
    ["tuple", "--x", "2000", "--d1", "2", "--d2", "6", "--d", "8"],
    ["sseries", "--d", "30"],
    ["sseries", "--offsets", "0,2,6"],
    ["sseries", "--offsets", "0,2", "--y-trunc", "13"],
    ["average", "--k", "3", "--d", "30"],
    ["model", "--log-x", "50"],
    ["intervals", "--delta", "0"],
    ["compare", "--x", "2000"],
]


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.mark.parametrize("argv", SMOKE_MATRIX, ids=lambda a: a[0] + a[-1])
def test_smoke_matrix_exits_clean(capsys, argv):
    for fmt in ("csv", "json"):
        code, out, err = run_cli(capsys, argv + ["--format", fmt])
        assert code == 0, err
        assert out


def _without_wall_time(text: str) -> dict:
    doc = json.loads(text)
    doc["provenance"].pop("wall_time_s")
    return doc


@pytest.mark.parametrize("argv", SMOKE_MATRIX, ids=lambda a: a[0] + a[-1])
def test_thread_count_never_changes_output(capsys, argv):
    _, json_1, _ = run_cli(capsys, argv + ["--format", "json", "--threads", "1"])
    _, json_8, _ = run_cli(capsys, argv + ["--format", "json", "--threads", "8"])
    assert _without_wall_time(json_1) == _without_wall_time(json_8)
    _, csv_1, _ = run_cli(capsys, argv + ["--format", "csv", "--threads", "1"])
    _, csv_8, _ = run_cli(capsys, argv + ["--format", "csv", "--threads", "8"])
    assert csv_1 == csv_8  # CSV carries no timing at all


def test_census_json_payload(capsys):
    code, out, _ = run_cli(capsys, ["census", "--x", "100", "--format", "json"])
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "champion-lab/1"
    assert doc["result"]["counts"] == {"1": 1, "2": 8, "4": 7, "6": 7, "8": 1}
    assert doc["result"]["champions"] == [2]
    report = Report.from_json(out)
    assert report.to_json() == out  # parse/emit round trip


def test_intervals_csv_row(capsys):
    code, out, _ = run_cli(capsys, ["intervals", "--k", "3", "--delta", "0", "--format", "csv"])
    assert code == 0
    assert out.splitlines() == ["k,primorial,lo,hi", "3,6,4.67e4,2.32e8"]
    code, out, _ = run_cli(capsys, ["intervals", "--delta", "0", "--format", "csv"])
    assert [line.split(",")[0] for line in out.splitlines()[1:]] == ["3", "4", "5", "6", "7"]


def test_sseries_odd_reason(capsys):
    code, out, _ = run_cli(capsys, ["sseries", "--d", "7", "--format", "json"])
    assert code == 0
    result = json.loads(out)["result"]
    assert result["value"] == 0.0
    assert result["reason"] == "odd d"
    assert result["zero_witness"] == 2


def test_domain_error_exit_and_message(capsys):
    code, out, err = run_cli(capsys, ["pairs", "--x", "100", "--d", "3"])
    assert code == 2
    assert not out
    assert err.startswith("error 2: ")
    assert err.count("\n") == 1  # a single line


def test_capacity_error_exit(capsys):
    code, _, err = run_cli(capsys, ["census", "--x", str(10**11)])
    assert code == 3
    assert err.startswith("error 3: ")


def test_io_error_exit(capsys, tmp_path):
    target = tmp_path / "missing" / "report.csv"
    code, _, err = run_cli(capsys, ["census", "--x", "100", "--out", str(target)])
    assert code == 4
    assert err.startswith("error 4: ")


def test_plot_format_and_figure(capsys, tmp_path):
    out_path = tmp_path / "model.dat"
    code, _, _ = run_cli(
        capsys,
        ["model", "--log-x", "50", "--format", "plot", "--out", str(out_path)],
    )
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[0].startswith("# championlab model")
    assert lines[1] == "# d M(x,d)"
    assert lines[2].split() == ["2", "1.26751"]
    fig = tmp_path / "model.png"
    assert fig.exists() and fig.stat().st_size > 1000


def test_explicit_figure_without_plot_format(capsys, tmp_path):
    fig = tmp_path / "census.png"
    code, out, _ = run_cli(
        capsys, ["census", "--x", "1000", "--fig", str(fig)]
    )
    assert code == 0
    assert out.startswith("d,count")
    assert fig.exists()


def test_plot_rejects_scalar_payload(capsys):
    code, _, err = run_cli(capsys, ["pairs", "--x", "100", "--d", "2", "--format", "plot"])
    assert code == 2
    assert "plottable" in err


def test_cache_cold_then_warm(capsys, tmp_path):
    cache = tmp_path / "census_50000.csv"
    argv = ["census", "--x", "50000", "--cache", str(cache), "--format", "json"]
    _, cold, _ = run_cli(capsys, argv)
    assert cache.exists()
    _, warm, _ = run_cli(capsys, argv)
    cold_doc, warm_doc = json.loads(cold), json.loads(warm)
    assert cold_doc["provenance"]["cache"] == "miss"
    assert warm_doc["provenance"]["cache"] == "hit"
    assert cold_doc["result"] == warm_doc["result"]


def test_cache_corruption_forces_recompute(capsys, tmp_path):
    cache = tmp_path / "census_10000.csv"
    argv = ["census", "--x", "10000", "--cache", str(cache), "--format", "json"]
    _, cold, _ = run_cli(capsys, argv)
    body = cache.read_text()
    cache.write_text(body.replace("2,", "2,9", 1))
    code, again, _ = run_cli(capsys, argv)
    assert code == 0
    assert json.loads(again)["result"] == json.loads(cold)["result"]
    assert json.loads(again)["provenance"]["cache"] == "miss"


def test_cache_env_dir(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("CHAMPIONLAB_CACHE_DIR", str(tmp_path))
    code, out, _ = run_cli(capsys, ["champion", "--x", "30000", "--format", "json"])
    assert code == 0
    assert (tmp_path / "census_30000.csv").exists()
    assert json.loads(out)["provenance"]["cache"] == "miss"
    code, out, _ = run_cli(capsys, ["champion", "--x", "30000", "--format", "json"])
    assert json.loads(out)["provenance"]["cache"] == "hit"


def test_big_integers_serialized_as_strings(capsys):
    # ladder entries beyond 2^63 must survive JSON losslessly
    code, out, _ = run_cli(capsys, ["intervals", "--k", "20", "--format", "json"])
    assert code == 0
    row = json.loads(out)["result"]["rows"][0]
    assert isinstance(row["primorial"], str)
    assert int(row["primorial"]) % 2 == 0


def test_compare_plot_series(capsys):
    code, out, _ = run_cli(capsys, ["compare", "--x", "10000", "--cap", "8", "--format", "plot"])
    assert code == 0
    assert out.splitlines()[1] == "# d observed/predicted"
    assert len(out.splitlines()) == 2 + 4  # d = 2, 4, 6, 8


def test_compare_csv_shape(capsys):
    code, out, _ = run_cli(capsys, ["compare", "--x", "10000", "--cap", "10", "--format", "csv"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "d,observed,predicted,ratio,li_ratio"
    assert len(lines) == 6  # d = 2, 4, 6, 8, 10

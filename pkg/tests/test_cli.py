import logging
from pathlib import Path

import pytest
from click.testing import CliRunner

from invariant_set.cli import cli
from invariant_set.reporting import COLUMNS

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(autouse=True)
def reset_logging():
    yield
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)


@pytest.fixture
def invoke():
    runner = CliRunner()

    def _invoke(*args):
        return runner.invoke(cli, [str(a) for a in args])

    return _invoke


def test_niven_records_match_golden(invoke, tmp_path):
    out = tmp_path / "niven.jsonl"
    result = invoke("--n-tot", 3, "--seed", 0, "--samples", 1000, "--format", "records", "--out", out, "niven", "--m", 1, "--n", 3)
    assert result.exit_code == 0
    golden = (GOLDEN / "niven_records.jsonl").read_text(encoding="utf-8")
    assert out.read_text(encoding="utf-8") == golden


def test_sampled_output_is_deterministic(invoke, tmp_path):
    paths = []
    for name in ("first.jsonl", "second.jsonl"):
        out = tmp_path / name
        result = invoke("--seed", 7, "--samples", 5000, "--format", "records", "--out", out, "sg-chain", "--chain", "+z,+x,+z")
        assert result.exit_code == 0
        paths.append(out)
    assert paths[0].read_text(encoding="utf-8") == paths[1].read_text(encoding="utf-8")


def test_workers_do_not_change_counts(invoke, tmp_path):
    texts = []
    for workers in (1, 3):
        out = tmp_path / f"bell-{workers}.csv"
        result = invoke("--samples", 25000, "--workers", workers, "--format", "csv", "--out", out, "bell", "--cos-ab", "1/2", "--cos-ab-prime", "1/4")
        assert result.exit_code == 0
        texts.append(out.read_text(encoding="utf-8"))
    assert texts[0] == texts[1]


def test_csv_header(invoke, tmp_path):
    out = tmp_path / "pow.csv"
    assert invoke("--format", "csv", "--out", out, "pow", "--J", 1, "--alpha", "1/4").exit_code == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(COLUMNS)
    assert any(line.startswith("frequency,P(a),7/8,") for line in lines)


def test_table_output(invoke, tmp_path):
    out = tmp_path / "defined.txt"
    result = invoke("--out", out, "defined", "--c1", "1/2", "--c2", "1/2", "--angle", "1/3")
    assert result.exit_code == 0
    text = out.read_text(encoding="utf-8")
    assert text.startswith("=" * 80)
    assert "📊 defined" in text
    assert "5/8" in text
    assert "Defined" in text


@pytest.mark.parametrize("args", [
    ("ghz", "--beta", "1/2", "--beta", "1", "--beta", "3/2"),
    ("precession", "--omega", "2", "--t-max", "20"),
    ("sg-chain", "--chain", "−z,+x", "--toy-n-tot", "1"),
])
def test_experiments_succeed(invoke, tmp_path, args):
    out = tmp_path / "report.txt"
    result = invoke("--n-tot", 2, "--samples", 2000, "--out", out, *args)
    assert result.exit_code == 0
    assert out.exists()


@pytest.mark.parametrize("args", [
    ("bell", "--cos-ab", "1/3", "--cos-ab-prime", "1/2"),
    ("pow", "--J", 1, "--alpha", "1/3"),
    ("pow", "--J", 1, "--alpha", "abc"),
    ("--n-tot", 7, "verify"),
    ("--samples", 0, "niven", "--m", 1, "--n", 3),
    ("sg-chain", "--chain", "+y"),
    ("ghz", "--beta", "0", "--beta", "0"),
])
def test_rejected_input_exits_2(invoke, args):
    assert invoke(*args).exit_code == 2


def test_verify_exit_codes(invoke, tmp_path):
    assert invoke("--n-tot", 2, "--out", tmp_path / "clean.txt", "verify").exit_code == 0
    faulty = tmp_path / "faulty.jsonl"
    assert invoke("--n-tot", 2, "--format", "records", "--out", faulty, "verify", "--inject-fault").exit_code == 1
    assert '"verdict": "fail"' in faulty.read_text(encoding="utf-8")


def test_report_goes_to_stdout_without_out(invoke):
    result = invoke("--format", "records", "niven", "--m", 1, "--n", 2)
    assert result.exit_code == 0
    assert '"record": "metadata"' in result.output

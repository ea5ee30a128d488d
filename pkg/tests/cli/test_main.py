import json

import pytest

from src.main import CHECK_FAILED, build_parser, main


def envelope(text: str) -> dict:
    lines = text.splitlines()
    start = next(i for i, line in enumerate(lines) if line.startswith("{"))
    return json.loads("\n".join(lines[start:]))


def test_run_writes_trace_and_envelope(configs_dir, tmp_path, capsys):
    assert main(["run", str(configs_dir / "minimal.toml"), "--out", str(tmp_path)]) == 0
    assert (tmp_path / "dsm_T100_seed0.csv").is_file()
    body = envelope(capsys.readouterr().out)
    assert body["runId"].startswith("run_")
    assert body["data"]["cells"][0]["status"] == "ok"


def test_format_and_seed_flags(configs_dir, tmp_path):
    args = ["run", str(configs_dir / "minimal.toml"), "--out", str(tmp_path), "--format", "jsonl", "--seed", "5"]
    assert main(args) == 0
    assert (tmp_path / "dsm_T100_seed5.jsonl").is_file()


def test_config_errors_exit_with_one(tmp_path, capsys):
    path = tmp_path / "bad.toml"
    path.write_text("[algorithm]\nbetaa1 = 0.9\n", encoding="utf-8")
    assert main(["sweep", str(path)]) == 1
    error = envelope(capsys.readouterr().err)["error"]
    assert error["code"] == "UNKNOWN_KEY"
    assert error["details"]["field"] == "algorithm.betaa1"


def test_missing_config_exits_with_one(tmp_path):
    assert main(["run", str(tmp_path / "absent.toml")]) == 1


def test_numerical_abort_exits_with_two(tmp_path):
    path = tmp_path / "diverge.toml"
    path.write_text(
        f'[algorithm]\nvariant = "local_avg"\nn = 2\ntau = 3\nrounds = 200\n'
        f'[algorithm.local_lr]\npeak = 10.0\n[output]\ndirectory = "{tmp_path.as_posix()}"\n',
        encoding="utf-8",
    )
    assert main(["run", str(path)]) == 2


def test_lemma_report_file(tmp_path, capsys):
    assert main(["check-lemma1", "--draws", "200000", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "lemma_report.json").read_text(encoding="utf-8"))
    assert report["data"]["passed"] is True
    assert report["data"]["draws"] == 200_000


def test_reduction_certificate_file(tmp_path):
    assert main(["check-reductions", "--seed", "1", "--out", str(tmp_path)]) == 0
    certificate = json.loads((tmp_path / "reduction_certificate.json").read_text(encoding="utf-8"))
    assert certificate["data"]["passed"] is True


def test_failed_checks_have_their_own_status():
    assert CHECK_FAILED not in (0, 1, 2)


def test_parser_rejects_unknown_commands():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["plot", "x.toml"])
    args = build_parser().parse_args(["sweep", "x.toml", "--jobs", "4", "--format", "csv"])
    assert (args.command, args.jobs, args.fmt) == ("sweep", 4, "csv")

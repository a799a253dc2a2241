import json
import subprocess
import sys

import pytest

from specsite import cli
from specsite.errors import VerificationFailure
from specsite.theories import dlat


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_spec_three_chain_dot(capsys, tmp_path):
    dot = tmp_path / "spec.dot"
    code, out, _ = run(capsys, "spec", "--theory", "dlat", "--geometry", "zariski",
                       "--input", "data/three_chain.json", "--dot", str(dot))
    assert code == 0
    body = json.loads(out)
    assert body["tool"] == "specsite" and len(body["points"]) == 2
    text = dot.read_text()
    assert text.count("->") == 1
    assert text.count("[label=") == 2


def test_points_command(capsys):
    code, out, _ = run(capsys, "points", "--theory", "dlat", "--input", "data/square.json")
    body = json.loads(out)
    assert code == 0 and len(body["points"]) == 2 and body["specialization"] == []
    assert body["base_is_local"] is False


def test_factorize_command(capsys):
    code, out, _ = run(capsys, "factorize", "--theory", "dlat", "--hom", "data/square_to_two.json")
    body = json.loads(out)
    assert code == 0 and all(body["verdicts"].values())
    assert body["middle"]["carrier"] == 2


def test_verify_text_format(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "locality", "--theory", "dlat", "--max-size", "4",
                       "--format", "text")
    assert code == 0
    assert out.strip().splitlines()[-1].startswith("PASS")


def test_sheaf_command(capsys, tmp_path):
    target = tmp_path / "sheafified.json"
    code, out, _ = run(capsys, "sheaf", "--site", "data/cover_site.json",
                       "--presheaf", "data/cover_presheaf.json", "--sheafified", str(target))
    assert code == 0 and json.loads(out)["check_sheaf"]["ok"]
    assert target.exists()


def test_fibered_command(capsys):
    code, out, _ = run(capsys, "fibered", "--theory", "dlat", "--base", "data/cover_site.json",
                       "--presheaf", "data/cover_presheaf.json")
    body = json.loads(out)
    assert code == 0 and body["restriction"]["restriction_ok"]
    assert all(r["agree"] for r in body["continuous_sections"].values())


def test_enumerate_methods_agree(capsys):
    _, a, _ = run(capsys, "enumerate", "--theory", "dlat", "--max-size", "6")
    _, b, _ = run(capsys, "enumerate", "--theory", "dlat", "--max-size", "6", "--method", "downsets")
    assert json.loads(a)["counts"] == json.loads(b)["counts"] == {"1": 1, "2": 1, "3": 1, "4": 2, "5": 3, "6": 5}


def test_exit_code_2_on_bad_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"theory": "dlat",, }')
    code, _, err = run(capsys, "spec", "--theory", "dlat", "--input", str(bad))
    assert code == 2 and "byte 18" in err


def test_exit_code_2_on_unknown_ids(capsys):
    assert run(capsys, "spec", "--theory", "groups", "--input", "data/square.json")[0] == 2
    assert run(capsys, "spec", "--theory", "dlat", "--geometry", "etale", "--input", "data/square.json")[0] == 2
    assert run(capsys, "verify", "--suite", "nonsense")[0] == 2


def test_exit_code_3_on_budget(capsys):
    code, _, err = run(capsys, "spec", "--theory", "dlat", "--input", "data/square.json", "--budget", "3")
    assert code == 3 and "budget" in err


def test_exit_code_1_on_verification_failure(capsys, monkeypatch):
    def broken(*args, **kwargs):
        raise VerificationFailure("forced", {"why": "test"})

    monkeypatch.setattr(cli, "run_suite", broken)
    code, _, err = run(capsys, "verify", "--suite", "locality", "-v")
    assert code == 1 and "forced" in err


def test_exit_code_1_on_failed_suite(capsys, monkeypatch):
    monkeypatch.setattr(cli, "run_suite", lambda *a, **k: {
        "suite": "locality", "theory": "dlat", "geometry": "zariski", "max_size": 1,
        "instances": 1, "failures": 1, "passed": False, "rows": [{"instance": "x", "ok": False}]})
    assert run(capsys, "verify", "--suite", "locality")[0] == 1


def test_output_is_deterministic(tmp_path):
    outs = []
    target = tmp_path / "out.json"
    for _ in range(2):
        cli.main(["spec", "--theory", "dlat", "--input", "data/square.json", "--out", str(target)])
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]


def test_config_echo_resolves_budget(capsys, monkeypatch):
    monkeypatch.setenv("SPECSITE_BUDGET", "12345")
    _, out, _ = run(capsys, "points", "--theory", "dlat", "--input", "data/three_chain.json")
    assert json.loads(out)["config"]["budget"] == 12345


def test_console_script_entry_point():
    r = subprocess.run([sys.executable, "-m", "specsite.cli", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and "specsite" in r.stdout


def test_cring_points_via_cli(capsys, tmp_path):
    from specsite import io
    from specsite.theories import cring

    path = tmp_path / "z12.json"
    path.write_text(io.dumps_algebra(cring.zmod(12)))
    code, out, _ = run(capsys, "points", "--theory", "cring", "--geometry", "ring-zariski", "--input", str(path))
    assert code == 0 and len(json.loads(out)["points"]) == 2

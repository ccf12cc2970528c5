import json
from pathlib import Path

import pytest

from glutop.cli import main

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(autouse=True)
def in_data(monkeypatch):
    monkeypatch.chdir(DATA)
    monkeypatch.delenv("GLUTOP_CAP", raising=False)
    monkeypatch.delenv("GLUTOP_CORRUPT", raising=False)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


# validate

def test_validate_ok(capsys):
    code, data = run_json(capsys, "validate", "span.json", "span_X.json", "arrow_f.json")
    assert code == 0 and data["ok"]


@pytest.mark.parametrize("path, kind", [("span_broken.json", "MissingComposite"),
                                        ("span_bad_degrees.json", "NonDecreasingMap")])
def test_validate_reports(capsys, path, kind):
    code, data = run_json(capsys, "validate", path)
    assert code == 1 and not data["ok"]
    assert data["report"][path][0]["kind"] == kind


# formers

def test_omega_sizes(capsys):
    code, data = run_json(capsys, "omega", "span.json", "--check")
    assert code == 0 and data["sizes"] == {"0": 2, "1": 2, "2": 5}


def test_omega_dot(capsys):
    code, out, _ = run(capsys, "omega", "arrow.json", "--format", "dot")
    assert code == 0 and out.startswith("digraph")


def test_pi_exponential(capsys):
    code, out, _ = run(capsys, "pi", "arrow.json", "arrow_f.json", "arrow_g.json", "--check",
                       "--format", "summary")
    assert code == 0 and out == "Π sizes {'a': 2, 'b': 1}\n"


def test_pi_oracle_agrees(capsys):
    _, a = run_json(capsys, "pi", "arrow.json", "arrow_f.json", "arrow_g.json")
    _, b = run_json(capsys, "pi", "arrow.json", "arrow_f.json", "arrow_g.json", "--oracle")
    assert a["sizes"] == b["sizes"]


def test_char_non_mono_exit_1(capsys):
    code, data = run_json(capsys, "char", "arrow.json", "arrow_f.json")
    assert code == 1 and data["error"] == "NotMono"


def test_matching_horn(capsys):
    code, out, _ = run(capsys, "matching", "dinj3.json", "horn_3_2.json", "[2]", "--format", "summary")
    assert code == 0 and out == "M_[2] has 4 elements\n"


def test_cosk_span(capsys):
    code, data = run_json(capsys, "cosk", "span.json", "span_low.json", "1")
    assert code == 0 and data["sizes"] == {"0": 2, "1": 3, "2": 6}


@pytest.mark.parametrize("which, line", [
    ("identity", "Gl(id) classifier: apex 3, shadow 2\n"),
    ("limit", "Gl(lim) classifier: apex 5, cone sizes {'x': 2, 'y': 2, '•': 5}\n"),
])
def test_glue_demo(capsys, which, line):
    code, out, _ = run(capsys, "glue-demo", which, "--format", "summary")
    assert code == 0 and out == line


# localization and comparison

def test_localize_counterexample(capsys):
    code, out, _ = run(capsys, "localize", "span_wq.json", "--format", "summary")
    assert code == 0
    assert out.splitlines() == ["7 morphisms, all epi: True", "initiality at 0: True",
                                "initiality at 1: False", "initiality at 2: False"]


def test_homotopy_counterexample(capsys):
    code, out, _ = run(capsys, "homotopy", "span_wq.json", "--exp", "span_X.json", "span_Y.json",
                       "--format", "summary")
    assert code == 0
    assert "object=1 phi_bijective=False kappa_bijective=True initiality=False all_epi=True" in out


def test_homotopy_full_inversion(capsys):
    code, out, _ = run(capsys, "homotopy", "span_wall.json", "--exp", "span_Xc.json", "span_Yc.json",
                       "--format", "summary")
    assert code == 0
    assert all("phi_bijective=True" in line for line in out.splitlines())


def test_saturation_budget_exit_3(capsys):
    code, _, err = run(capsys, "localize", "span_wq.json", "--word-cap", "1")
    assert code == 3 and err.startswith("SaturationBudgetExceeded")


# oracle and suite

def test_oracle_omega(capsys):
    code, out, _ = run(capsys, "oracle", "omega", "arrow.json", "--format", "summary")
    assert code == 0 and out == "cosieve Ω sizes {'a': 3, 'b': 2}\n"


def test_oracle_verify(capsys):
    code, data = run_json(capsys, "oracle", "verify", "arrow.json", "--f", "arrow_f.json",
                          "--g", "arrow_g.json", "--monos", "5")
    assert code == 0 and data["ok"]


def test_suite_subset(capsys):
    code, out, _ = run(capsys, "suite", "--only", "1", "9", "--format", "summary")
    assert code == 0
    assert out.splitlines()[0].startswith("[PASS] criterion 1 (horn matching)")
    assert "2/2 passed" in out


def test_suite_count_zero_warns(capsys):
    code, out, err = run(capsys, "suite", "--only", "2", "--count", "0", "--format", "summary")
    assert code == 0 and "warning" in (out + err)


def test_corrupted_classifier_fails_suite(capsys, monkeypatch):
    monkeypatch.setenv("GLUTOP_CORRUPT", "omega")
    code, out, _ = run(capsys, "suite", "--only", "2", "--count", "1", "--format", "summary")
    assert code == 1 and out.startswith("[FAIL] criterion 2")


# errors and determinism

def test_missing_file_exit_2(capsys):
    code, _, err = run(capsys, "omega", "nofile.json")
    assert code == 2 and err.startswith("ParseError")


def test_bad_cap_exit_2(capsys):
    assert run(capsys, "omega", "arrow.json", "--cap", "0")[0] == 2


def test_unknown_command_exit_2(capsys):
    assert run(capsys, "bogus")[0] == 2


def test_cap_env_overrides(capsys, monkeypatch):
    monkeypatch.setenv("GLUTOP_CAP", "2")
    code, _, err = run(capsys, "matching", "dinj3.json", "horn_3_2.json", "[2]", "--cap", "1000")
    assert code == 3 and err.startswith("ExplosionLimit")


@pytest.mark.parametrize("argv", [
    ("omega", "span.json"),
    ("pi", "arrow.json", "arrow_f.json", "arrow_g.json"),
    ("homotopy", "span_wq.json", "--exp", "span_X.json", "span_Y.json"),
    ("localize", "span_wq.json", "--format", "dot"),
])
def test_repeat_runs_identical(capsys, argv):
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second

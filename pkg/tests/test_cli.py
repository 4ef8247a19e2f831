import json
from fractions import Fraction as F

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from psl22w import cli, n4rep


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def records(out):
    return [json.loads(line) for line in out.splitlines() if line.strip()]


def strip_seconds(recs):
    return [{k: v for k, v in r.items() if k != "seconds"} for r in recs]


def test_flow_json_fields(capsys):
    code, out = run(capsys, "--no-cache", "flow", "--level", "-1/2", "--j", "0", "--delta", "0", "--ell", "1/2")
    assert code == 0
    recs = records(out)
    assert all({"name", "status", "residual", "seconds", "command", "schema"} <= set(r) for r in recs)
    assert recs[0]["data"]["j"] == "1/2"
    assert recs[0]["data"]["Delta"] == "-1/8"
    assert all(r["command"] == "flow" for r in recs)


def test_relaxed_text_format(capsys):
    code, out = run(capsys, "--no-cache", "--format", "text", "relaxed", "--level", "1/2", "--sector", "R")
    assert code == 0
    assert out.startswith("[pass]")


def test_loewy_reports_diagram(capsys):
    code, out = run(capsys, "--no-cache", "loewy", "--level", "-1/2", "--sector", "R", "--lambda", "1/2")
    assert code == 0
    assert "conj(L_{-1/2})" in out


def test_usage_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["relaxed", "--level", "1/3"])
    assert exc.value.code == 2
    code, out = run(capsys, "--no-cache", "flow", "--level", "1/2", "--j", "1")
    assert code == 2
    assert records(out)[0]["status"] == "error"


def test_injected_fault_exits_one(capsys, monkeypatch):
    real = n4rep.spectral_flow
    monkeypatch.setattr(n4rep, "spectral_flow", lambda w, ell, kk: tuple(x + 1 for x in real(w, ell, kk)))
    code, out = run(capsys, "--no-cache", "flow", "--level", "1/2", "--j", "0", "--delta", "0")
    assert code == 1
    assert records(out)[0]["status"] == "fail"


def test_all_subset(capsys):
    code, out = run(capsys, "--no-cache", "all", "--only", "2")
    assert code == 0
    assert all(r["status"] == "pass" for r in records(out))


@given(st.sampled_from(["1/2", "-1/2"]), st.sampled_from(["R", "NS"]),
       st.fractions(min_value=-1, max_value=1, max_denominator=5))
@settings(max_examples=8, suppress_health_check=[HealthCheck.function_scoped_fixture])
def test_cache_does_not_change_results(tmp_path, capsys, level, sector, lam):
    args = ["relaxed", "--level", level, "--sector", sector, "--lambda", str(lam), "--window", "5"]
    _, cold = run(capsys, "--no-cache", *args)
    _, first = run(capsys, "--cache-dir", str(tmp_path), *args)
    _, warm = run(capsys, "--cache-dir", str(tmp_path), *args)
    assert strip_seconds(records(cold)) == strip_seconds(records(first)) == strip_seconds(records(warm))
    assert list(tmp_path.glob("*.json"))


def test_cache_key_depends_on_arguments():
    p = cli.build_parser()
    a = p.parse_args(["relaxed", "--level", "1/2"])
    b = p.parse_args(["relaxed", "--level", "1/2", "--window", "9"])
    assert cli.cache_key(a) != cli.cache_key(b)
    assert cli.cache_key(a) == cli.cache_key(p.parse_args(["--format", "text", "relaxed", "--level", "1/2"]))


def test_jsonable_rationals():
    assert cli._jsonable({F(1, 2): [F(3), 0.5]}) == {"1/2": ["3", 0.5]}


def test_global_flags_after_subcommand(capsys):
    code, out = run(capsys, "flow", "--level", "1/2", "--no-cache", "--format", "text")
    assert code == 0
    assert out.startswith("[pass]")

import json

import pytest

from supercontact import cli


def run(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def no_floats(v):
    if isinstance(v, float):
        return False
    if isinstance(v, dict):
        return all(no_floats(x) for x in v.values())
    if isinstance(v, list):
        return all(no_floats(x) for x in v)
    return True


@pytest.fixture(autouse=True)
def _no_env_cache(monkeypatch):
    monkeypatch.delenv(cli.CACHE_ENV, raising=False)


def test_h1_example(capsys):
    code, out, _ = run(capsys, "h1-dim", "--n", "3", "--lambda", "1/4", "--mu", "1/4", "--max-order", "3", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["verified"]
    assert rep["result"]["h1_dim"] == 1
    assert rep["params"] == {"n": 3, "lambda": "1/4", "mu": "1/4", "max_order": 3}
    assert rep["truncation"] == {"max_order": 3, "generator_dmax": 3}
    assert no_floats(rep)


def test_h1_zero_example(capsys):
    code, out, _ = run(capsys, "h1-dim", "--n", "3", "--lambda", "0", "--mu", "1", "--json")
    assert code == 0 and json.loads(out)["result"]["h1_dim"] == 0


def test_search_example(capsys):
    code, out, _ = run(capsys, "search-invariant", "--n", "2", "--lambda", "0", "--mu", "1/3", "--nu", "4/3",
                       "--max-order", "4", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["result"]["dim"] == 2 and len(rep["result"]["basis"]) == 2


def test_negative_values_and_relative(capsys):
    code, out, _ = run(capsys, "relative-h1", "--n", "3", "--relative", "2", "--lambda", "-1/2", "--mu", "0", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["result"]["h1_dim"] == 1
    assert rep["command"] == "relative-h1"


def test_small_commands(capsys):
    for argv in (["verify-bracket", "--n", "2", "--dmax", "1"],
                 ["verify-action", "--n", "2", "--lambda", "-1/2", "--dmax", "1"],
                 ["catalog", "--n", "2", "--lambda", "0", "--mu", "1/3", "--nu", "4/3"],
                 ["verify-cocycle", "--name", "Y2(l,l+1)", "--lambda", "1/3"],
                 ["list-cocycles", "--n", "3"]):
        code, out, _ = run(capsys, *argv, "--json")
        assert code == 0, argv
        assert json.loads(out)["verified"] is True
    code, out, _ = run(capsys, "catalog", "--n", "2")
    assert code == 0 and "names" in out


@pytest.mark.parametrize("argv", [
    ["h1-dim", "--n", "3", "--lambda", "0.25", "--mu", "0"],
    ["h1-dim", "--n", "0", "--lambda", "0", "--mu", "0"],
    ["h1-dim", "--lambda", "0", "--mu", "0"],
    ["verify-cocycle", "--name", "nope", "--lambda", "0"],
    ["verify-cocycle", "--name", "Y3(-1/2,0)", "--lambda", "0"],
    ["report", "--kind", "invariants", "--n", "1"],
    ["report", "--kind", "h1", "--n", "7"],
    ["frobnicate"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_failed_verification_exits_1(capsys, monkeypatch):
    from supercontact import invariants
    from supercontact.invariants import InvarianceResult
    monkeypatch.setattr(invariants, "is_invariant", lambda *a, **k: InvarianceResult(False))
    code, out, _ = run(capsys, "catalog", "--n", "2", "--lambda", "0", "--mu", "1/3", "--nu", "4/3", "--json")
    assert code == 1 and json.loads(out)["verified"] is False


ARGS = ["h1-dim", "--n", "2", "--lambda", "1/3", "--mu", "4/3", "--json"]


def test_cache_hit_is_byte_identical(capsys, tmp_path):
    code1, out1, err1 = run(capsys, *ARGS, "--cache-dir", str(tmp_path))
    code2, out2, err2 = run(capsys, *ARGS, "--cache-dir", str(tmp_path))
    assert code1 == code2 == 0
    assert "cache: hit" not in err1 and "cache: hit" in err2
    assert out1 == out2


def test_cache_env_var(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv(cli.CACHE_ENV, str(tmp_path))
    run(capsys, *ARGS)
    _, _, err = run(capsys, *ARGS)
    assert "cache: hit" in err


def test_corrupted_cache_is_ignored(capsys, tmp_path):
    _, out1, _ = run(capsys, *ARGS, "--cache-dir", str(tmp_path))
    for f in tmp_path.glob("*.json"):
        f.write_text("{not json")
    code, out2, err = run(capsys, *ARGS, "--cache-dir", str(tmp_path))
    assert code == 0 and out1 == out2
    assert "corrupted" in err and "cache: hit" not in err
    # the entry was rewritten
    _, _, err3 = run(capsys, *ARGS, "--cache-dir", str(tmp_path))
    assert "cache: hit" in err3


def test_version_bump_misses(capsys, tmp_path, monkeypatch):
    run(capsys, *ARGS, "--cache-dir", str(tmp_path))
    monkeypatch.setattr(cli, "__version__", "999")
    _, out, err = run(capsys, *ARGS, "--cache-dir", str(tmp_path))
    assert "cache: hit" not in err
    assert json.loads(out)["engine_version"] == "999"


def test_unwritable_cache_dir_warns(capsys, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, out, err = run(capsys, *ARGS, "--cache-dir", str(blocker / "sub"))
    assert code == 0 and "warning" in err and json.loads(out)["result"]["h1_dim"] == 1


def test_out_file_matches_stdout(capsys, tmp_path):
    target = tmp_path / "r.json"
    _, out, _ = run(capsys, *ARGS, "--out", str(target))
    assert target.read_text() == out


def test_human_output(capsys):
    code, out, _ = run(capsys, "h1-dim", "--n", "2", "--lambda", "1/3", "--mu", "1/3")
    assert code == 0
    assert out.startswith("h1-dim: ok")
    assert "h1_dim: 2" in out


def test_canonical_json_fractions():
    from fractions import Fraction
    assert cli.canonical({"b": Fraction(1, 2), "a": [Fraction(4, 2)]}) == '{"a":[2],"b":"1/2"}'

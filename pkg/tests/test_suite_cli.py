import json

import pytest

from dunklhardy.cli import describe, main
from dunklhardy.roots import make_context
from dunklhardy.suite import ConfigError, build_function, load_config, parse_config, run, tasks

SMALL = """{
  "seed": 7,
  "resolution": {"coarse": 6, "fine": 12},
  "contexts": [{"family": "Z2", "rank": 1, "k": 0.5}, {"family": "A", "rank": 2, "k": 0.5}],
  "theorems": ["l2_hardy", {"theorem": "lp_hardy", "p": [1.2, 5.0]}, "many_particle_hardy"],
  "test_functions": [{"kind": "random", "count": 2}, {"kind": "gaussian", "center": [0.2], "scale": 0.9}]
}"""


def test_parse_small_config():
    cfg = parse_config(SMALL)
    assert cfg.resolution == (6, 12) and cfg.seed == 7
    assert [f.get("index") for f in cfg.test_functions] == [0, 1, None]
    assert len(tasks(cfg)) == 2 * (3 + 3 + 1)


@pytest.mark.parametrize("text,line,field", [
    ('{\n "seed": 1,\n "resolution": {"coarse": 8, "fine": 8}\n}', 3, "resolution.fine"),
    ('{\n "seed": 1,\n "colour": 3\n}', 3, "colour"),
    ('{\n "theorems": [\n  "no_such"\n ]\n}', 2, "theorems[0]"),
    ('{\n "contexts": [{"family": "A", "rank": 2, "k": -1}]\n}', 2, "contexts[0].k"),
    ('{\n "seed": 1,\n\n "resolution": \n}', 5, None),
])
def test_config_errors_locate_line_and_field(text, line, field):
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert err.value.line == line and err.value.field_path == field
    assert f"line {line}" in str(err.value)


def test_empty_theorem_list():
    result = run(parse_config('{"contexts": [{"family": "A", "rank": 2}], "theorems": []}'))
    assert result.rows == [] and result.exit_code == 0


def test_hardy_sharpness_rows():
    cfg = parse_config('{"contexts": [{"family": "Z2", "rank": 3, "k": 0}],'
                       ' "theorems": [{"theorem": "l2_hardy_sharpness", "n_max": 50}]}')
    rows = run(cfg).rows
    assert len(rows) == 50
    assert [r["extra"]["n"] for r in rows] == list(range(1, 51))
    assert abs(rows[-1]["ratio"] - 0.25) < 0.05 * 0.25 and all(r["pass"] for r in rows)


def test_out_of_range_p_is_a_skip():
    rows = run(parse_config(SMALL)).rows
    skips = [r for r in rows if r["pass"] is None]
    assert any("p = 5.0" in r["skip"] for r in skips)
    assert all(r["skip"] for r in skips)
    assert all(r["pass"] for r in rows if r["pass"] is not None)


def test_determinism_across_jobs():
    cfg = parse_config(SMALL)
    a, b, c = run(cfg, 1), run(cfg, 1), run(cfg, 3)
    assert a.json_lines() == b.json_lines() == c.json_lines()


def test_random_functions_depend_on_seed_and_index():
    x = [[0.1, 0.2, 0.3]]
    f0 = build_function({"kind": "random", "index": 0}, 3, 1)
    f0b = build_function({"kind": "random", "index": 0}, 3, 1)
    f1 = build_function({"kind": "random", "index": 1}, 3, 1)
    assert f0(x)[0] == f0b(x)[0] != f1(x)[0]


def test_informational_rows_never_fail_the_run():
    from dunklhardy.suite import SuiteResult
    row = {"theorem": "lp_gradient_comparison", "pass": False, "informational": True}
    assert SuiteResult([row]).exit_code == 0
    assert SuiteResult([dict(row, informational=False)]).exit_code == 1


def test_csv_summary():
    text = run(parse_config(SMALL)).csv_summary()
    header = text.splitlines()[0].split(",")
    assert header == ["theorem", "ctx_descriptor", "rows", "passed", "failed", "skipped", "min_margin"]


def test_default_config_loads():
    cfg = load_config("default")
    names = {n for n, _ in cfg.theorems}
    assert {"l2_hardy", "rellich", "ckn", "many_particle_hardy_b"} <= names
    assert dict(cfg.theorems)["ckn"]["ab"] == [[0.0, 0.0], [0.0, 1.0], [0.3, 0.8]]


def test_describe_examples():
    a2 = describe(make_context("A", 2, 0.5))
    assert a2["gamma"] == 1.5 and a2["group_order"] == 6 == a2["chambers"]
    assert a2["constants"]["l2_hardy"] == 4.0 and a2["constants"]["rellich"] == 9.0
    z = describe(make_context("Z2", 1, 0))
    assert z["gamma"] == 0 and z["constants"]["l2_hardy"].startswith("hypothesis fails")
    b2 = describe(make_context("B", 2, (0.3, 0.7)))
    assert b2["gamma"] == pytest.approx(2.0) and b2["positive_roots_per_orbit"] == [2, 2]


def test_cli_describe(capsys):
    assert main(["describe", "--family", "A", "--rank", "2", "--k", "0.5", "--compact"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["homogeneous_dim"] == 6.0


def test_cli_bad_multiplicity(capsys):
    assert main(["describe", "--family", "B", "--rank", "2", "--k", "0.1,0.2,0.3"]) == 2
    assert "config error" in capsys.readouterr().err


def test_cli_verify_files(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(SMALL)
    out, summary = tmp_path / "o.jsonl", tmp_path / "s.csv"
    assert main(["verify", "--config", str(cfg), "--out", str(out), "--csv", str(summary)]) == 0
    lines = out.read_text().splitlines()
    assert lines and all(json.loads(l)["theorem"] for l in lines)
    assert summary.read_text().startswith("theorem,")


def test_cli_verify_bad_config(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{\n "resolution": {"coarse": 4, "fine": 2}\n}')
    assert main(["verify", "--config", str(cfg)]) == 2
    assert "line 2" in capsys.readouterr().err
    assert main(["verify", "--config", str(tmp_path / "missing.json")]) == 2


def test_cli_sharpness(capsys):
    assert main(["sharpness", "--theorem", "hardy", "--n-max", "5"]) == 0
    rows = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    assert [r["n"] for r in rows] == [1, 2, 3, 4, 5] and rows[0]["closed_form_displayed"] == pytest.approx(1.35)
    assert main(["sharpness", "--theorem", "rellich", "--n-max", "16", "--family", "A", "--rank", "2",
                 "--k", "0.5"]) == 0
    rows = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    assert [r["n"] for r in rows] == [2, 4, 8, 16]
    assert main(["sharpness", "--theorem", "hardy", "--family", "Z2", "--rank", "1", "--k", "0"]) == 0
    assert "skip" in json.loads(capsys.readouterr().out)

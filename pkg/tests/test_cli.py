import json
import os

import jsonschema

from weldkit.cli import main

SCHEMA_DIR = os.path.join(os.path.dirname(__file__), "..", "src", "weldkit", "schemas")


def _schema(name):
    with open(os.path.join(SCHEMA_DIR, name)) as fh:
        return json.load(fh)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    report = json.loads(out)
    jsonschema.validate(report, _schema("report-v1.json"))
    return code, report


def test_parse_roundtrip(capsys):
    code, report = run_json(capsys, "parse", "t1 h2+ / h1+ t2")
    assert code == 0
    assert report["result"]["canonical_code"] == "t1 h2+ / h1+ t2"
    jsonschema.validate(report["result"]["diagram"], _schema("diagram-v1.json"))


def test_parse_error_exit_2(capsys):
    code, out, err = run(capsys, "parse", "t1 h2* / h1+ t2")
    assert code == 2 and "error" in err


def test_parse_stdin(capsys, monkeypatch):
    import io

    monkeypatch.setattr("sys.stdin", io.StringIO("t1 h1+"))
    code, out, err = run(capsys, "parse", "-")
    assert code == 0 and "t1 h1+" in out


def test_sort_with_trace(capsys, tmp_path):
    trace_file = tmp_path / "trace.jsonl"
    code, report = run_json(capsys, "sort", "t1 h2+ t3 h1+ / t2 h3+",
                            "--trace-out", str(trace_file))
    assert code == 0
    assert report["result"]["sorted_code"] == "t1 h2+ / t2 h1+"
    lines = trace_file.read_text().splitlines()
    schema = _schema("trace-v1.json")
    for line in lines:
        jsonschema.validate(json.loads(line), schema)
    from weldkit.moves import MoveTrace, verify_trace

    assert verify_trace(MoveTrace.from_jsonl(trace_file.read_text()))


def test_milnor_table_json(capsys):
    code, report = run_json(capsys, "milnor", "t1 h2+ / t2 h1+",
                            "--max-length", "2")
    assert code == 0
    table = report["result"]["table"]
    jsonschema.validate(table, _schema("milnor-table-v1.json"))
    assert {"I": [2], "j": 1, "mu": 1, "delta": 0, "mubar": 1} in table["entries"]


def test_milnor_text_is_delimited(capsys):
    code, out, err = run(capsys, "milnor", "t1 h2+ / t2 h1+")
    lines = out.strip().splitlines()
    assert lines[0].split("\t") == ["I", "j", "mu", "delta", "mubar"]
    assert "2\t1\t1\t0\t1" in lines


def test_milnor_max_length_validation(capsys):
    code, out, err = run(capsys, "milnor", "t1 h2+ / t2 h1+", "--max-length", "5")
    assert code == 2


def test_compare_exit_codes(capsys):
    code, out, err = run(capsys, "compare", "t1 h2+ / h1+ t2", "t1 h2- / h1- t2")
    assert code == 10 and "mubar(2;1) = 1 vs -1" in out
    code, out, err = run(capsys, "compare", "t1 h2+ / h1+ t2", "h1+ t2 / t1 h2+")
    assert code == 0
    code, out, err = run(capsys, "compare", "t1 h2+ / h1+ t2", "t1 h1+")
    assert code == 2


def test_compare_emit_and_certify(capsys, tmp_path):
    cert = tmp_path / "cert.json"
    code, out, err = run(capsys, "compare", "t1 h2+ / h1+ t2",
                         "h1+ t2 / t1 h2+", "--emit-cert", str(cert))
    assert code == 0
    data = json.loads(cert.read_text())
    jsonschema.validate(data, _schema("certificate-v1.json"))
    code, out, err = run(capsys, "certify", "--check", str(cert))
    assert code == 0 and "VALID" in out
    # corrupt it: verification must fail
    data["source_longitudes"] = ["m2 m2", "m1"]
    cert.write_text(json.dumps(data))
    code, out, err = run(capsys, "certify", "--check", str(cert))
    assert code == 1 and "INVALID" in out


def test_braid_subcommand(capsys):
    code, report = run_json(capsys, "braid", "--strands", "2", "--word", "s1 s1")
    assert code == 0
    assert report["result"]["code"] == "t1 h2+ / h1+ t2"
    code, out, err = run(capsys, "braid", "--strands", "2", "--word", "s7")
    assert code == 2


def test_reports_byte_identical(capsys):
    _, out1, _ = run(capsys, "milnor", "t1 h2+ / t2 h1+", "--format", "json",
                     "--seed", "5")
    _, out2, _ = run(capsys, "milnor", "t1 h2+ / t2 h1+", "--format", "json",
                     "--seed", "5")
    assert out1 == out2


def test_demo_hopf(capsys):
    code, report = run_json(capsys, "demo", "hopf")
    assert code == 0
    assert report["result"]["verdict"] == "distinct"
    assert report["result"]["witness"]["I"] == [2]


def test_demo_hughes(capsys):
    code, report = run_json(capsys, "demo", "hughes")
    assert code == 0
    assert report["result"]["tables_equal_through_4"] is True
    assert report["result"]["verdict"] != "distinct"
    assert report["result"]["no_refutation_any_length"] is True


def test_demo_hughes_refuses_unverified(capsys, monkeypatch):
    import weldkit.fixtures as fx

    data = fx.hughes_fixture()
    data["verified"] = False
    monkeypatch.setattr(fx, "hughes_fixture", lambda: data)
    import weldkit.cli

    code, out, err = run(capsys, "demo", "hughes")
    assert code == 2 and "unverified" in err


def test_internal_invariant_violation_exits_70(capsys, monkeypatch):
    import weldkit.cli

    monkeypatch.setattr(weldkit.cli, "tables_equal",
                        lambda *a, **k: (_ for _ in ()).throw(AssertionError("boom")))
    code, out, err = run(capsys, "demo", "hughes")
    assert code == 70 and "internal invariant violation" in err


def test_peripheral_subcommand(capsys):
    code, report = run_json(capsys, "peripheral", "t1 h2+ / h1+ t2")
    assert code == 0
    ps = report["result"]["peripheral_system"]
    assert ps["longitudes_pretty"] == ["b", "a"]
    assert report["result"]["reduced_presentation"]["reduced_closure"] is True


def test_figures_written(capsys, tmp_path):
    figdir = tmp_path / "figs"
    code, report = run_json(capsys, "milnor", "t1 h2+ / t2 h1+",
                            "--figures", str(figdir))
    assert code == 0
    assert sorted(os.path.basename(f) for f in report["figures"]) == [
        "diagram.png", "milnor.png"]
    for f in report["figures"]:
        assert os.path.getsize(f) > 1000


def test_usage_error_on_bad_bounds(capsys):
    code, out, err = run(capsys, "milnor", "t1 h2+ / t2 h1+", "--conj-len", "0")
    assert code == 2

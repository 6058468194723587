import io
import json

import pytest
from hypothesis import given, strategies as st

from ncca.cli import main
from ncca.errors import InvalidConfig, Unsupported
from ncca.localfn import from_wolfram_code
from ncca.records import ORDER_TAG, RuleRecord, read_records, write_records


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


@pytest.mark.parametrize("dim, qstar, n", [(1, 1, 5), (1, 2, 144), (2, 1, 9), (2, 2, 1327)])
def test_enumerate_summary(dim, qstar, n):
    code, out = run("enumerate", "--dim", str(dim), "--qstar", str(qstar))
    assert code == 0 and out.splitlines()[0] == f"{n} rules"


def test_enumerate_catalog_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert run("enumerate", "--dim", "1", "--qstar", "2", "--out", str(a))[0] == 0
    assert run("enumerate", "--dim", "1", "--qstar", "2", "--out", str(b), "--workers", "2")[0] == 0
    assert a.read_bytes() == b.read_bytes()
    records = list(read_records(a.open()))
    assert len(records) == 144
    for r in records:
        assert RuleRecord.loads(r.dumps()) == r
        assert list(json.loads(r.dumps())) == ["dim", "states", "order", "lut", "split", "coeffs"]


def test_enumerate_per_split_and_orbits():
    code, out = run("enumerate", "--dim", "1", "--qstar", "2", "--per-split", "--orbits")
    lines = out.splitlines()
    assert code == 0
    table = dict(line.split("\t") for line in lines[1:-1])
    assert len(table) == 18 and table["010/020"] == "7" and table["001/200"] == "0"
    assert lines[-1].endswith("orbits")


def test_enumerate_rejects_unsupported_sizes():
    assert run("enumerate", "--dim", "0", "--qstar", "1")[0] == 2
    assert run("enumerate", "--dim", "5", "--qstar", "1")[0] == 2
    assert run("enumerate", "--dim", "1", "--qstar", "0")[0] == 2


def test_decide():
    code, out = run("decide", "--eca", "184")
    assert code == 0 and out.strip() == "NC; h = 100; g = [1]"
    code, out = run("decide", "--eca", "30")
    assert code == 1 and out.startswith("not NC") and "f(M_v:1)" in out
    code, out = run("decide", "--eca", "204")
    assert code == 0 and "zero perturbation" in out


def test_decide_from_file(tmp_path):
    path = tmp_path / "rules.jsonl"
    with path.open("w") as fh:
        write_records([RuleRecord.from_rule(from_wolfram_code(c)) for c in (170, 110)], fh)
    code, out = run("decide", "--lut", str(path))
    assert code == 1
    assert out.splitlines()[0].startswith("NC") and out.splitlines()[1].startswith("not NC")


@pytest.mark.parametrize(
    "content",
    ["not json\n", '{"dim": 1}\n', '{"dim":1,"states":[0,1],"order":"%s","lut":[0,1]}\n' % ORDER_TAG,
     '{"dim":1,"states":[0,1],"order":"other","lut":[0,0,0,0,0,0,0,0]}\n'],
)
def test_decide_rejects_malformed_input(tmp_path, content):
    path = tmp_path / "bad.jsonl"
    path.write_text(content)
    assert run("decide", "--lut", str(path))[0] == 2


def test_usage_errors():
    assert run()[0] == 2
    assert run("decide")[0] == 2
    assert run("decide", "--eca", "300")[0] == 2
    assert run("decide", "--lut", "/nonexistent/file")[0] == 2
    assert run("verify", "--mode", "bogus", "--eca", "1")[0] == 2


def test_verify_reports():
    code, out = run("verify", "--mode", "exhaustive", "--sides", "5", "--eca", "204")
    report = json.loads(out)
    assert code == 0 and report["outcome"] == "pass" and report["configs_checked"] == 32
    code, out = run("verify", "--mode", "exhaustive", "--sides", "5", "--eca", "110")
    assert code == 1 and json.loads(out)["witness"]
    first = run("verify", "--mode", "sampled", "--seed", "42", "--trials", "10000", "--eca", "184")
    second = run("verify", "--mode", "sampled", "--seed", "42", "--trials", "10000", "--eca", "184")
    assert first == second and json.loads(first[1])["rng"] == "numpy.PCG64"
    code, out = run("verify", "--mode", "window", "--sides", "7", "--radius", "2", "--eca", "226")
    assert code == 0 and json.loads(out)["configs_checked"] == 32


def test_verify_budget_refusal_and_bad_sides():
    assert run("verify", "--mode", "exhaustive", "--sides", "25", "--eca", "184")[0] == 3
    assert run("verify", "--mode", "exhaustive", "--sides", "5,5", "--eca", "184")[0] == 2
    assert run("verify", "--mode", "exhaustive", "--sides", "4", "--eca", "184")[0] == 2
    assert run("verify", "--mode", "exhaustive", "--sides", "x", "--eca", "184")[0] == 2


def test_simulate(tmp_path):
    init = tmp_path / "x0.json"
    init.write_text(json.dumps({"sides": [8], "cells": [1, 1, 0, 1, 0, 0, 1, 0]}))
    code, out = run("simulate", "--steps", "10", "--init", str(init), "--eca", "184")
    rows = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and len(rows) == 11 and {r["sigma"] for r in rows} == {4}
    code, out = run("simulate", "--steps", "1", "--init", str(init), "--eca", "170", "--dump")
    assert json.loads(out.splitlines()[1])["cells"] == [1, 0, 1, 0, 0, 1, 0, 1]
    init.write_text("{}")
    assert run("simulate", "--steps", "1", "--init", str(init), "--eca", "184")[0] == 2


def test_count_splits():
    assert run("count-splits", "--dim", "2", "--qstar", "2") == (0, "75\n")
    assert run("count-splits", "--dim", "4", "--qstar", "3") == (0, "66825\n")


def test_record_validation():
    with pytest.raises(InvalidConfig):
        RuleRecord(1, (0, 1), (0,) * 7)
    with pytest.raises(Unsupported):
        RuleRecord(1, (0, 1), (0,) * 8, order="lsd-first")
    with pytest.raises(InvalidConfig):
        RuleRecord.from_dict({"dim": 1, "states": [0, 1], "order": ORDER_TAG, "lut": [0] * 8, "extra": 1})
    with pytest.raises(InvalidConfig):
        RuleRecord.from_dict({"dim": 1, "states": [0, 1], "order": ORDER_TAG, "lut": [0.5] * 8})


@given(st.integers(0, 255))
def test_record_roundtrip(code):
    r = RuleRecord.from_rule(from_wolfram_code(code))
    assert r.wolfram == code
    assert RuleRecord.loads(r.dumps()) == r
    assert r.to_rule() == from_wolfram_code(code)
    buf = io.StringIO()
    write_records([r, r], buf)
    buf.seek(0)
    assert list(read_records(buf)) == [r, r]

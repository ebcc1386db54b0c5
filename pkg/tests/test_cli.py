import json
from pathlib import Path

import pytest

from cmspair import serialize
from cmspair.b2 import B2Model
from cmspair.cli import main
from cmspair.serialize import DocumentError

CORPUS = Path(__file__).resolve().parent.parent / "docs" / "conformance"
EXPECTED = json.loads((CORPUS / "expected.json").read_text())


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


# -- conformance corpus -----------------------------------------------------

def test_corpus_size():
    assert len(EXPECTED) >= 10
    assert sum(1 for v in EXPECTED.values() if not v["valid"]) >= 5


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_conformance(name):
    exp = EXPECTED[name]
    text = (CORPUS / name).read_text()
    if exp["valid"]:
        doc = serialize.loads(text)
        again = serialize.loads(serialize.document_text(doc))
        assert serialize.document_text(again) == serialize.document_text(doc)
        return
    with pytest.raises(DocumentError) as info:
        serialize.loads(text)
    err = info.value
    assert err.field == exp["field"]
    col = None if err.position is None else err.position + 1
    assert col == exp["column"]


@pytest.mark.parametrize("g", [(2, 0, 0), (None, 0, 0), (None, 1, 3), (None, None, None)],
                         ids=["a2", "sym", "elliptic", "all-symbolic"])
def test_operator_roundtrip(g):
    m = B2Model(a=g[0], g2=g[1], g3=g[2])
    for op in (m.L(), m.P()):
        text = serialize.dumps(m.scalars(), m.entries(), op, name="op")
        doc = serialize.loads(text)
        assert doc.operator.ring == op.ring
        assert doc.operator == op
        assert serialize.document_text(doc) == text


# -- commands ------------------------------------------------------------------

def test_build_and_verify_exact(tmp_path, capsys):
    L, P = tmp_path / "L.json", tmp_path / "P.json"
    code, out, _ = run(["build", "--model", "b2", "--a", "2", "--out-L", str(L), "--out-P", str(P)],
                       capsys)
    assert code == 0 and L.exists() and P.exists()
    code, out, _ = run(["--json", "verify", "--L", str(L), "--P", str(P), "--mode", "exact"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["verdict"] == "exact-zero" and rep["exact_zero"]


def test_verify_detects_mismatch(tmp_path, capsys):
    L, P = tmp_path / "L.json", tmp_path / "P.json"
    run(["build", "--a", "2", "--out-L", str(L), "--out-P", str(P)], capsys)
    doc = json.loads(P.read_text())
    doc["operator"] = [t for t in doc["operator"] if t["dx"] != [0, 0]]
    P.write_text(json.dumps(doc))
    code, out, _ = run(["verify", "--L", str(L), "--P", str(P), "--mode", "exact"], capsys)
    assert code == 1 and "nonzero" in out


def test_output_is_deterministic(tmp_path, capsys):
    outs = []
    for k in range(2):
        L, P = tmp_path / f"L{k}.json", tmp_path / f"P{k}.json"
        run(["build", "--a", "5/3", "--g2", "1", "--out-L", str(L), "--out-P", str(P)], capsys)
        code, out, _ = run(["verify", "--L", str(L), "--P", str(P), "--json", "--trials", "3"], capsys)
        outs.append((L.read_text(), P.read_text(), out))
        assert code == 0
    assert outs[0] == outs[1]
    assert json.loads(outs[0][2])["verdict"] == "numeric-zero"


def test_wp_command(capsys):
    code, out, _ = run(["wp", "--z", "1/10", "--json"], capsys)
    d = json.loads(out)
    assert code == 0 and d["wp"] == "100" and d["wp1"] == "-2000" and d["error_bound"] == "0"
    code, _, err = run(["wp", "--z", "10", "--g2", "60"], capsys)
    assert code == 2 and err


def test_locus_commands(tmp_path, capsys):
    f = tmp_path / "b2.txt"
    f.write_text("# B2 at a = 1/3\n1 0\n0 1\n1/3 1\n-1/3 1\n")
    code, out, _ = run(["classify", "--locus", str(f)], capsys)
    assert code == 0 and "B2-normal-form" in out
    g = tmp_path / "bad.txt"
    g.write_text("1 0 1\n1 1 1\n")
    code, out, _ = run(["conditions", "--locus", str(g), "--json"], capsys)
    assert code == 1
    res = json.loads(out)
    assert res
    code, out, _ = run(["couplings", "--locus", str(CORPUS / "ok_locus_a1a1.json"), "--json"], capsys)
    assert code == 0 and json.loads(out)["loci"][0]["rank"] == 0


def test_jsonl_batch(tmp_path, capsys):
    doc = json.loads((CORPUS / "ok_locus_a1a1.json").read_text())
    f = tmp_path / "batch.jsonl"
    f.write_text(json.dumps(doc) + "\n" + json.dumps(doc) + "\n")
    code, out, _ = run(["couplings", "--locus", str(f), "--json"], capsys)
    assert code == 0 and len(json.loads(out)["loci"]) == 2


def test_input_errors_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("1 0\n1 x\n")
    code, _, err = run(["classify", "--locus", str(bad)], capsys)
    assert code == 2 and "line 2, column 3" in err
    code, _, err = run(["classify", "--locus", str(CORPUS / "bad_parallel.json")], capsys)
    assert code == 2 and "locus[1].alpha" in err
    code, _, _ = run(["build", "--a", "1", "--out-L", "-", "--out-P", "-"], capsys)
    assert code == 2
    code, _, _ = run(["nonsense"], capsys)
    assert code == 2
    code, _, _ = run(["verify", "--L", str(bad)], capsys)
    assert code == 2

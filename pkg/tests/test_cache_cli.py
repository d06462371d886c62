import io
import json
import logging

import pytest

from twistkit.cache import Cache, green_from_json, green_to_json
from twistkit.cli import EXIT_BOUND, EXIT_FAIL, EXIT_OK, EXIT_USAGE, run
from twistkit.twistings import diagram_base


@pytest.fixture(autouse=True)
def no_env(monkeypatch):
    monkeypatch.delenv("TWISTKIT_CACHE", raising=False)


def test_roundtrip(tmp_path):
    c = Cache(tmp_path)
    G = diagram_base("P", 2).green
    assert c.store("k", green_to_json(G))
    back = green_from_json(c.load("k"))
    assert (back.j_leq == G.j_leq).all() and back.idempotents == G.idempotents
    assert back.num("j") == G.num("j")
    assert c.stats()["entries"] == 1
    assert c.clear() == 1 and c.load("k") is None


def test_version_bump_is_miss(tmp_path):
    Cache(tmp_path, version="1").store("k", {"x": 1})
    assert Cache(tmp_path, version="1").load("k") == {"x": 1}
    assert Cache(tmp_path, version="2").load("k") is None


def test_corrupt_entry_warns(tmp_path, caplog):
    c = Cache(tmp_path)
    c.store("k", [1, 2])
    path = next(tmp_path.glob("*.json.gz"))
    path.write_bytes(b"garbage")
    with caplog.at_level(logging.WARNING):
        assert c.load("k") is None
    assert "corrupt" in caplog.text


def test_unwritable_dir_disables(tmp_path, caplog):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with caplog.at_level(logging.WARNING):
        c = Cache(blocker / "sub")
    assert not c.enabled and "cache disabled" in caplog.text
    assert not c.store("k", 1) and c.load("k") is None


def test_env_var_overrides(tmp_path, monkeypatch):
    monkeypatch.setenv("TWISTKIT_CACHE", str(tmp_path / "env"))
    assert Cache(tmp_path / "other").dir == tmp_path / "env"


def cli(tmp_path, *argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(["--cache-dir", str(tmp_path)] + list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("argv,code", [
    (["verify", "--family", "B", "--n", "3", "--twisting", "canonical"], EXIT_OK),
    (["verify", "--family", "PB", "--n", "2", "--twisting", "canonical"], EXIT_FAIL),
    (["verify", "--family", "P", "--n", "2", "--twisting", "rank", "--checks", "cocycle"], EXIT_OK),
    (["verify", "--family", "Mat", "--n", "2", "--p", "2", "--twisting", "rank"], EXIT_OK),
    (["verify", "--family", "Mat", "--n", "2", "--twisting", "rank"], EXIT_USAGE),
    (["verify", "--family", "Q", "--n", "2", "--twisting", "rank"], EXIT_USAGE),
    (["verify", "--family", "P", "--n", "2", "--twisting", "bogus"], EXIT_USAGE),
    (["enumerate", "--family", "P", "--n", "5"], EXIT_BOUND),
    (["enumerate", "--family", "TL", "--n", "3"], EXIT_OK),
    (["product", "--spec", "zeroinf|q=inf|P:2|canonical", "--green", "--idempotents", "--regular",
      "--schutz", "--biorder", "--stability", "--crosscheck"], EXIT_OK),
    (["product", "--spec", "zmod:2|q=7|P:2|canonical"], EXIT_USAGE),
    (["ig", "--spec", "zmod:2|q=1|B:3|rank"], EXIT_OK),
    (["ig", "--spec", "nat|q=1|P:2|canonical", "--window", "5"], EXIT_OK),
    (["eggbox", "--family", "P", "--n", "2"], EXIT_OK),
    (["eggbox"], EXIT_USAGE),
    (["frobnicate"], EXIT_USAGE),
    (["cache", "--stats"], EXIT_OK),
])
def test_exit_codes(tmp_path, argv, code):
    assert cli(tmp_path, *argv)[0] == code


def test_verify_failure_prints_witness(tmp_path):
    code, out, _ = cli(tmp_path, "verify", "--family", "PB", "--n", "2", "--twisting", "canonical",
                       "--checks", "cocycle,tight")
    assert code == EXIT_FAIL
    assert "cocycle: PASS" in out and "witness" in out


def test_enumerate_json(tmp_path):
    code, out, _ = cli(tmp_path, "enumerate", "--family", "TL", "--n", "3", "--json")
    assert code == 0 and len(json.loads(out)) == 5


def test_product_uses_cache(tmp_path):
    spec = "zeroinf|q=inf|P:2|canonical"
    first = cli(tmp_path, "product", "--spec", spec, "--green")
    assert Cache(tmp_path).stats()["entries"] == 1
    second = cli(tmp_path, "product", "--spec", spec, "--green")
    assert first[:2] == second[:2]
    assert "J-classes: 6" in first[1]
    code, out, _ = cli(tmp_path, "cache", "--clear")
    assert "removed 1" in out


def test_eggbox_to_file(tmp_path):
    target = tmp_path / "p2.dot"
    code, _, _ = cli(tmp_path, "eggbox", "--spec", "zeroinf|q=inf|P:2|canonical", "--format", "dot",
                     "--out", str(target))
    assert code == 0 and target.read_text().startswith("digraph")

import json
from pathlib import Path

import pytest

from eppa.cli import dispatch
from eppa.serialize import (canonical_json_bytes, load_extension,
                            load_structure, structure_to_json)


def run(argv):
    return dispatch(argv)


@pytest.fixture()
def s4_files(tmp_path):
    code, report = run(["fixture", "s4-counterexample", "--out", str(tmp_path)])
    assert code == 0
    return tmp_path


def test_fixture_emits_five_files(s4_files):
    names = sorted(p.name for p in s4_files.iterdir())
    assert names == ["c1.json", "c2.json", "d1.json", "ext1.json", "t.json"]


def test_fixture_round_trip(s4_files):
    for p in s4_files.glob("*.json"):
        if p.name == "ext1.json":
            e = load_extension(p)
            assert len(e.ext.domain) == 4
        else:
            s = load_structure(p)
            assert canonical_json_bytes(structure_to_json(s)) == p.read_bytes()


def test_fixture_kn_free_seed(tmp_path):
    code, report = run(["fixture", "kn-free-seed", "--n", "3",
                        "--out", str(tmp_path)])
    assert code == 0
    seed = load_structure(tmp_path / "k3-free-seed.json")
    assert len(seed.domain) == 5
    assert len(seed.rel("E")) == 10  # 5 undirected edges, both orientations


def test_fixture_relation_free_pair(tmp_path):
    code, _ = run(["fixture", "relation-free-pair", "--out", str(tmp_path)])
    assert code == 0
    s = load_structure(tmp_path / "pair.json")
    assert len(s.domain) == 2 and s.sig.symbols == ()


def test_verify_ext_fixture(s4_files):
    code, report = run(["verify-ext", str(s4_files / "ext1.json"),
                        "--forbidden", str(s4_files / "t.json")])
    assert code == 0
    assert report["status"] == "valid"
    assert report["checks"]["minimal"] is True


def test_tfree_and_exit_codes(s4_files):
    code, _ = run(["tfree", str(s4_files / "d1.json"),
                   "--forbidden", str(s4_files / "t.json")])
    assert code == 0
    code, report = run(["tfree", str(s4_files / "t.json"),
                        "--forbidden", str(s4_files / "t.json")])
    assert code == 1
    assert report["status"] == "pattern-found"


def test_validate_exit_codes(tmp_path):
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"signature": {"R": 2}, "domain": ["a"],
                                "relations": {"R": []}}))
    assert run(["validate", str(good)])[0] == 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"signature": {"R": 2}, "domain": ["a"],
                               "relations": {"R": [["a", "q"]]}}))
    code, report = run(["validate", str(bad)])
    assert code == 1
    assert report["findings"]
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert run(["validate", str(broken)])[0] == 2


def test_solve_system_empty(tmp_path):
    sysfile = tmp_path / "sys.json"
    sysfile.write_text(json.dumps({
        "spec": {"kind": "finite", "degree": 2,
                 "generators": {"s": [1, 0]}},
        "subgroups": {"H1": {"gens": ["s"]}},
        "constants": {},
        "variables": [],
        "equations": [],
    }))
    code, report = run(["solve-system", str(sysfile)])
    assert code == 0
    assert report["status"] == "solvable"
    assert report["assignment"] == {}


def test_separate_cli(tmp_path):
    sysfile = tmp_path / "sep.json"
    sysfile.write_text(json.dumps({
        "spec": {"kind": "free", "generators": ["a"]},
        "subgroups": {"H1": {"gens": ["a a"]}},
        "constants": {"e": "", "g": "a"},
        "variables": ["x"],
        "equations": [
            {"lhs": "x", "slot": "H1", "rhs": {"const": "e"}},
            {"lhs": "x", "slot": "H1", "rhs": {"const": "g"}},
        ],
    }))
    code, report = run(["separate", str(sysfile), "--max-degree", "4"])
    assert code == 0
    assert report["status"] == "found"
    assert report["verified_unsolvable"] is True
    assert report["quotient"]["degree"] <= 4


def test_homomorphism_cli(tmp_path, s4_files):
    code, report = run(["homomorphism", str(s4_files / "c1.json"),
                        str(s4_files / "d1.json")])
    assert code == 0
    assert report["witness"] == {"x": "x", "y": "y"}


def test_find_eppa_cli(tmp_path, s4_files):
    out = tmp_path / "witness.json"
    code, report = run(["find-eppa", str(s4_files / "c1.json"),
                        "--forbidden", str(s4_files / "t.json"),
                        "--max-size", "4", "--out", str(out)])
    assert code == 0
    assert report["status"] == "found"
    e = load_extension(out)
    assert len(e.ext.domain) <= 4


def test_find_coherent_cli_counterexample(s4_files):
    code, report = run(["find-coherent", str(s4_files / "c2.json"),
                        str(s4_files / "ext1.json"),
                        "--forbidden", str(s4_files / "t.json"),
                        "--max-size", "9"])
    assert code == 1
    assert report["status"] == "none-within-bound"
    assert report["max_size"] == 9


def test_gamma_fragment_cli(s4_files):
    code, report = run(["gamma", str(s4_files / "c1.json"), "--radius", "2"])
    assert code == 0
    assert len(report["structure"]["domain"]) == 5


def test_gamma_quotient_cli(tmp_path, s4_files):
    qfile = tmp_path / "q.json"
    qfile.write_text(json.dumps({"degree": 4,
                                 "images": {"p0": [1, 2, 3, 0]}}))
    code, report = run(["gamma", str(s4_files / "c1.json"),
                        "--quotient", str(qfile)])
    assert code == 0
    assert len(report["structure"]["domain"]) == 4


def test_reports_are_byte_deterministic(s4_files):
    a = run(["verify-ext", str(s4_files / "ext1.json"),
             "--forbidden", str(s4_files / "t.json")])
    b = run(["verify-ext", str(s4_files / "ext1.json"),
             "--forbidden", str(s4_files / "t.json")])
    assert canonical_json_bytes(a[1]) == canonical_json_bytes(b[1])


def test_normalize_cli(tmp_path):
    sysfile = tmp_path / "sys.json"
    sysfile.write_text(json.dumps({
        "spec": {"kind": "free", "generators": ["a"]},
        "subgroups": {"H1": {"gens": []}},
        "constants": {"g": "a"},
        "variables": ["x"],
        "equations": [{"lhs": "x", "slot": "H1", "rhs": {"const": "g"}}],
    }))
    code, report = run(["normalize", str(sysfile), "--stage", "prime"])
    assert code == 0
    eqs = report["system"]["equations"]
    assert len(eqs) == 2
    assert eqs[1]["slot"] == "H0"


def test_gadget_cli(tmp_path):
    sysfile = tmp_path / "sys.json"
    sysfile.write_text(json.dumps({
        "spec": {"kind": "free", "generators": ["a"]},
        "subgroups": {"H1": {"gens": []}},
        "constants": {"g": "a"},
        "variables": ["x"],
        "equations": [{"lhs": "x", "slot": "H1", "rhs": {"const": "g"}}],
    }))
    code, report = run(["gadget", str(sysfile)])
    assert code == 0
    assert report["is_gaifman_clique"] is True


def test_tower_cli(tmp_path, s4_files):
    edge = tmp_path / "edge.json"
    path3 = tmp_path / "path3.json"
    run(["fixture", "graph-path-3", "--out", str(tmp_path)])
    p3 = load_structure(tmp_path / "path3.json")
    from eppa.structures import induced_substructure
    from eppa.serialize import save_structure
    save_structure(edge, induced_substructure(p3, ["v0", "v1"]))
    k3 = tmp_path / "k3.json"
    run(["fixture", "kn-free-seed", "--n", "3", "--out", str(tmp_path)])
    out = tmp_path / "tower"
    code, report = run(["tower", str(edge), str(tmp_path / "path3.json"),
                        "--forbidden", str(tmp_path / "k3.json"),
                        "--levels", "2", "--out", str(out),
                        "--triples-cap", "2", "--inner-size-cap", "2"])
    assert (out / "manifest.json").exists()
    assert report["manifest"]["levels"]
    for level in report["manifest"]["levels"]:
        assert level["coherent_with_previous"] in (None, True)


def test_unknown_fixture():
    code, report = run(["fixture", "no-such-fixture"])
    assert code == 2

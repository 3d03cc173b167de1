import json
import shutil
import subprocess
import sys

import pytest

from congruma.cli import run
from congruma.corpus import default_directory


def out(capsys, argv, code=0):
    rc = run(argv)
    captured = capsys.readouterr()
    assert rc == code, captured.err
    return captured.out, captured.err


def test_con_text(capsys):
    text, _ = out(capsys, ["con", "P"])
    assert text.splitlines()[0] == "Con(P): 5 congruences"
    assert "  [3] {{0},{x},{y,z},{1}}" in text


def test_con_json_from_file(capsys):
    text, _ = out(capsys, ["con", str(default_directory() / "exadm.ua"), "--algebra", "D", "--format", "json"])
    assert json.loads(text) == {"algebra": "D", "congruences": ["{{0,x,y,z,1}}", "{{0},{x},{y},{z},{1}}"]}


def test_multi_algebra_file_listing(capsys):
    text, _ = out(capsys, ["con", str(default_directory() / "exadm.ua")])
    assert [l for l in text.splitlines() if l.startswith("Con(")] == [
        "Con(L22): 4 congruences", "Con(D): 2 congruences", "Con(P): 5 congruences"]


def test_spec_report(capsys):
    text, _ = out(capsys, ["spec", "P"])
    assert text.startswith("algebra P size 5 congruences 5\n")
    data = json.loads(out(capsys, ["spec", "L22", "--format", "json"])[0])
    assert data["spec"] == ["{{0,x},{y,1}}", "{{0,y},{x,1}}"]


def test_commutator_with_names_and_specs(capsys):
    assert out(capsys, ["commutator", "P", "alpha", "beta"])[0] == "{{0},{x},{y,z},{1}}\n"
    assert out(capsys, ["commutator", "P", "cg{(y,z)}", "nabla", "--strategy", "delta"])[0] == \
        "{{0},{x},{y,z},{1}}\n"


def test_analyze_corpus_ids_and_files(capsys):
    text, _ = out(capsys, ["analyze", "meproud/i"])
    assert text.splitlines()[:4] == ["hom i : H -> K", "admissible: yes", "GU: no", "LO: no"]
    text, _ = out(capsys, ["analyze", str(default_directory() / "exadm.hom"), "--hom", "h"])
    assert "admissible: no\nGU: n/a\nLO: n/a\n" in text
    data = json.loads(out(capsys, ["analyze", "exadmgulo/l", "--format", "json"])[0])
    assert data[0]["GU"] == "yes"


def test_hom_check(capsys):
    text, _ = out(capsys, ["hom-check", "exadm/k"])
    assert text == "hom k : P -> D valid injective=no surjective=no kernel={{0,x},{y,z,1}}\n"


def test_constructions(capsys):
    text, _ = out(capsys, ["quotient", "P", "cg{(y,z)}"])
    assert text.splitlines()[:2] == ["lattice P/{{0},{x},{y,z},{1}}", "elements 0 x y 1"]
    text, _ = out(capsys, ["osum", "L22", "D"])
    assert text.startswith("lattice L22+D\n")
    data = json.loads(out(capsys, ["product", "L22", "L22", "--format", "json"])[0])
    assert data["size"] == 16


def test_closure(capsys):
    assert out(capsys, ["closure", "P", "delta"])[0] == \
        "closure: {{0,x},{y,z,1}} {{0,y,z},{x,1}} {{0},{x},{y},{z},{1}}\n"
    assert out(capsys, ["closure", "P"])[0] == "closure: (empty)\n"


def test_dot(capsys):
    text, _ = out(capsys, ["dot", "P", "--what", "algebra-order"])
    assert text.startswith('digraph "P" {') and "n0 -> n1;" in text
    assert out(capsys, ["con", "P", "--format", "dot"])[0].startswith('digraph "Con(P)"')


def test_corpus_verb_exit_codes(capsys, tmp_path):
    text, _ = out(capsys, ["corpus", "--only", "exadm/k"])
    assert text.endswith("4 checks, 0 mismatches\n")
    assert out(capsys, ["corpus", "--only", "nonexistent"])[0] == "0 checks, 0 mismatches\n"
    d = tmp_path / "c"
    shutil.copytree(default_directory(), d)
    m = d / "expected.toml"
    text = m.read_text()
    marker = 'con_size = 5\nspec = ["Delta", "alpha"'
    m.write_text(text.replace(marker, marker.replace("5", "6")))
    text, _ = out(capsys, ["corpus", "--dir", str(d), "--only", "exadm/P"], code=1)
    assert "MISMATCH exadm/P con_size = 5 (expected 6)" in text


@pytest.mark.parametrize("argv, fragment", [
    (["con", "nope"], "unknown algebra 'nope'"),
    (["con", "missing.ua"], "no such file"),
    (["analyze", "exadm/zzz"], "unknown morphism"),
    (["commutator", "P", "{{0,1}}", "delta"], "not a congruence"),
    (["con", "product(L22,L22,L22)"], "element cap 20"),
    (["closure", "P", "cg{(y,z)}"], "not a prime"),
])
def test_errors_exit_2(capsys, argv, fragment):
    _, err = out(capsys, argv, code=2)
    assert err.startswith("error: ") and fragment in err


KLEIN = """algebra V4
elements 4
op add 2
0 1 2 3
1 0 3 2
2 3 0 1
3 2 1 0
"""


def test_strategy_choice_on_nondistributive_con(capsys, tmp_path):
    lib = tmp_path / "groups.ua"
    lib.write_text(KLEIN)
    _, err = out(capsys, ["commutator", "V4", "nabla", "nabla", "--lib", str(lib)], code=2)
    assert "not distributive" in err
    text, _ = out(capsys, ["commutator", "V4", "nabla", "nabla", "--lib", str(lib), "--strategy", "delta"])
    assert text == "{{0},{1},{2},{3}}\n"


def test_cap_flag_and_env(capsys, monkeypatch):
    text, _ = out(capsys, ["con", "product(L22,L22,L22)", "--cap", "64"])
    assert text.startswith("Con(L22xL22xL22): 64 congruences")
    monkeypatch.setenv("CONGRUMA_CAP", "3")
    out(capsys, ["con", "P"], code=2)


def test_usage_errors_exit_2(capsys):
    assert run(["bogus"]) == 2
    assert run([]) == 2
    capsys.readouterr()


def test_output_is_deterministic(capsys):
    first = out(capsys, ["spec", "T", "--format", "json"])[0]
    assert out(capsys, ["spec", "T", "--format", "json"])[0] == first


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "congruma", "con", "D"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("Con(D): 2 congruences")

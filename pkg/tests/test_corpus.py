import shutil

import pytest

from congruma.corpus import CorpusError, default_directory, load_corpus, run_corpus


@pytest.fixture
def corpus_copy(tmp_path):
    dst = tmp_path / "corpus"
    shutil.copytree(default_directory(), dst)
    return dst


def test_full_run_has_no_mismatches(corpus):
    report = run_corpus(corpus)
    assert report.mismatches == []
    assert len(report.results) > 90
    assert report.to_text().endswith(f"{len(report.results)} checks, 0 mismatches\n")


def test_all_examples_are_present(corpus):
    assert {"L22", "D", "P", "H", "K", "E", "F", "L", "Q", "R", "S", "T", "G3"} <= set(corpus.algebras)
    assert {"exadm/i", "exadm/j", "exadm/h", "exadm/k", "meproud/i", "exadmgulo/j", "exadmgulo/k",
            "exadmgulo/l", "exadmgulo/m", "exadmgulo/q", "exadmgulo/r"} <= set(corpus.homs)


@pytest.mark.parametrize("name, size", [("E", 3), ("F", 4), ("L", 5), ("Q", 5), ("R", 3), ("S", 3), ("T", 5)])
def test_con_sizes(corpus, name, size):
    from congruma.congruence import enumerate_con
    assert len(enumerate_con(corpus.algebra(name))) == size


def test_corrupted_value_gives_one_named_mismatch(corpus_copy):
    path = corpus_copy / "expected.toml"
    text = path.read_text()
    marker = '[hom."exadm/k"]\nadmissible = true'
    assert marker in text
    path.write_text(text.replace(marker, '[hom."exadm/k"]\nadmissible = false'))
    report = run_corpus(load_corpus(corpus_copy))
    assert [(m.entry, m.key) for m in report.mismatches] == [("exadm/k", "admissible")]
    assert "MISMATCH exadm/k admissible = yes (expected no)" in report.to_text()


def test_filters(corpus):
    assert len(run_corpus(corpus, "nonexistent").results) == 0
    ids = {r.entry for r in run_corpus(corpus, "exadm").results}
    assert ids == {"exadm/L22", "exadm/D", "exadm/P", "exadm/i", "exadm/j", "exadm/h", "exadm/k"}
    assert {r.entry for r in run_corpus(corpus, "*/i").results} == {"exadm/i", "meproud/i"}
    assert {r.entry for r in run_corpus(corpus, "meproud/i").results} == {"meproud/i"}


def test_manifest_pointing_nowhere(corpus_copy):
    with pytest.raises(CorpusError, match="no such algebra"):
        load_corpus(corpus_copy, manifest='[algebra."exadm/Nope"]\ncon_size = 1\n')
    with pytest.raises(CorpusError, match="no such morphism"):
        load_corpus(corpus_copy, manifest='[hom."exadm/nope"]\nadmissible = true\n')


def test_malformed_manifest(corpus_copy):
    with pytest.raises(CorpusError, match="expected.toml"):
        load_corpus(corpus_copy, manifest="[algebra\n")


def test_duplicate_algebra_across_files(corpus_copy):
    shutil.copy(corpus_copy / "exadm.ua", corpus_copy / "again.ua")
    with pytest.raises(CorpusError, match="already defined"):
        load_corpus(corpus_copy)


def test_bad_named_congruence_becomes_error_result(corpus_copy):
    manifest = '[algebra."exadm/P"]\ncon_size = 5\nnamed.bad = "{{0,1}}"\n'
    report = run_corpus(load_corpus(corpus_copy, manifest=manifest))
    assert [m.key for m in report.mismatches] == ["error"]


def test_report_dict(corpus):
    d = run_corpus(corpus, "meproud/i").to_dict()
    assert d["mismatches"] == 0
    keys = {r["key"] for r in d["results"]}
    assert {"admissible", "gu", "lo", "kernel", "lo_witnesses", "gu_witnesses"} <= keys

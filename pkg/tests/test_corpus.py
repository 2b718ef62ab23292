import json

import pytest

from uccx.corpus import (
    Corpus,
    CorpusSchemaError,
    LintCode,
    Platform,
    Scenario,
    category_frequency,
    load_corpus,
    sample_corpus_path,
    save_corpus,
    validate_corpus,
    validate_scenario,
)


def make_scenario(**overrides) -> Scenario:
    base = dict(
        id="t01",
        app_name="Example",
        store_url="https://example.org/app",
        platform=Platform.GOOGLE,
        category="Shopping",
        screen_title="Home",
        text=" ".join(["word"] * 160),
        author_declared_info_types=("name", "email", "location"),
    )
    base.update(overrides)
    return Scenario(**base)


def record_for(scenario: Scenario) -> dict:
    return {
        "id": scenario.id,
        "app_name": scenario.app_name,
        "store_url": scenario.store_url,
        "platform": scenario.platform.value,
        "category": scenario.category,
        "screen_title": scenario.screen_title,
        "text": scenario.text,
        "author_declared_info_types": list(scenario.author_declared_info_types),
    }


def test_platform_values():
    assert {p.value for p in Platform} == {"apple", "google"}


def test_sample_corpus_loads(sample_corpus):
    assert len(sample_corpus) == 16
    assert sample_corpus.ids() == [f"s{i:02d}" for i in range(1, 17)]


def test_sample_corpus_is_lint_clean(sample_corpus):
    assert validate_corpus(sample_corpus) == []


def test_get_unknown_id_raises(sample_corpus):
    with pytest.raises(KeyError):
        sample_corpus.get("s99")


def test_corpus_iterates_in_order(sample_corpus):
    assert [s.id for s in sample_corpus] == sample_corpus.ids()


def test_save_load_round_trip(tmp_path, sample_corpus):
    out = tmp_path / "corpus.json"
    save_corpus(sample_corpus, out)
    again = load_corpus(out)
    assert [s for s in again] == [s for s in sample_corpus]


def test_load_rejects_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json", "utf-8")
    with pytest.raises(CorpusSchemaError, match="not valid JSON"):
        load_corpus(path)


def test_load_rejects_missing_field(tmp_path):
    rec = record_for(make_scenario())
    del rec["screen_title"]
    path = tmp_path / "corpus.json"
    path.write_text(json.dumps([rec]), "utf-8")
    with pytest.raises(CorpusSchemaError, match="screen_title"):
        load_corpus(path)


def test_load_rejects_bad_platform(tmp_path):
    rec = record_for(make_scenario())
    rec["platform"] = "windows"
    path = tmp_path / "corpus.json"
    path.write_text(json.dumps([rec]), "utf-8")
    with pytest.raises(CorpusSchemaError, match="platform"):
        load_corpus(path)


def test_load_rejects_duplicate_ids(tmp_path):
    rec = record_for(make_scenario())
    path = tmp_path / "corpus.json"
    path.write_text(json.dumps([rec, rec]), "utf-8")
    with pytest.raises(CorpusSchemaError, match="duplicate scenario id") as exc:
        load_corpus(path)
    assert exc.value.record_index == 1


def test_load_rejects_non_list_document(tmp_path):
    path = tmp_path / "corpus.json"
    path.write_text(json.dumps({"id": "x"}), "utf-8")
    with pytest.raises(CorpusSchemaError):
        load_corpus(path)


def test_lint_short_text():
    s = make_scenario(text="only a few words here")
    codes = [lint.code for lint in validate_scenario(s)]
    assert codes == [LintCode.WORD_COUNT_BELOW_150]


def test_lint_empty_screen_title():
    s = make_scenario(screen_title="   ")
    codes = [lint.code for lint in validate_scenario(s)]
    assert codes == [LintCode.EMPTY_SCREEN_TITLE]


def test_lint_info_types_incomplete():
    s = make_scenario(author_declared_info_types=("name",))
    lints = validate_scenario(s)
    assert [lint.code for lint in lints] == [LintCode.INFO_TYPES_INCOMPLETE]
    assert "1 information types" in lints[0].detail


def test_lint_clean_scenario():
    assert validate_scenario(make_scenario()) == []


def test_lints_carry_scenario_id():
    s = make_scenario(id="t77", screen_title="")
    assert validate_scenario(s)[0].scenario_id == "t77"


def test_category_frequency():
    scenarios = [
        make_scenario(id="a", category="Sports", platform=Platform.APPLE),
        make_scenario(id="b", category="Sports", platform=Platform.GOOGLE),
        make_scenario(id="c", category="Sports", platform=Platform.GOOGLE),
        make_scenario(id="d", category="Tools", platform=Platform.GOOGLE),
    ]
    freq = category_frequency(scenarios)
    assert freq.counts[("Sports", Platform.GOOGLE)] == 2
    assert freq.counts[("Sports", Platform.APPLE)] == 1
    assert freq.totals[Platform.GOOGLE] == 3
    assert freq.categories() == ["Sports", "Tools"]


def test_sample_corpus_has_distinct_categories(sample_corpus):
    freq = category_frequency(sample_corpus)
    assert len(freq.categories()) == 16


def test_corpus_len_and_membership():
    c = Corpus([make_scenario()])
    assert len(c) == 1
    assert c.get("t01").app_name == "Example"


def test_sample_corpus_path_exists():
    assert sample_corpus_path().exists()

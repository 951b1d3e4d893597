import unicodedata

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reactsent.normalize import (UNICODE_VERSION, ZWJ, NormalizerConfig, collapse_whitespace, is_sinhala_char,
                                 load_stopwords, normalize, remove_non_sinhala_tokens, remove_numeric_tokens,
                                 remove_patterns, remove_stopwords, strip_nonprintable)
from strategies import noisy_messages

SPACED = {"Cc", "Cn", "Co", "Cs", "Cf"}


def test_unicode_version_is_pinned():
    assert UNICODE_VERSION == unicodedata.unidata_version


@pytest.mark.parametrize("text,expected", [
    ("අ\u0007බ", "අ බ"),
    ("ක\u200dය", "කය"),
    ("අබ කහ", "අබ කහ"),
])
def test_strip_nonprintable(text, expected):
    assert strip_nonprintable(text) == expected


@pytest.mark.parametrize("text,expected", [
    ("බලන්න https://ex.com/a?b=1 දැන්", "බලන්න  දැන්"),
    ("@user සුභ #tag", " සුභ "),
    ("a.b@c.lk ok", " ok"),
])
def test_remove_patterns(text, expected):
    assert remove_patterns(text) == expected


@pytest.mark.parametrize("text,expected", [("රු 500 යි", "රු යි"), ("2020දී", ""), ("අබ", "අබ")])
def test_remove_numeric_tokens(text, expected):
    assert remove_numeric_tokens(text) == expected


@pytest.mark.parametrize("text,expected", [("good අබ", "අබ"), ("අබX", ""), ("අබ කහ", "අබ කහ")])
def test_remove_non_sinhala_tokens(text, expected):
    assert remove_non_sinhala_tokens(text) == expected


def test_remove_stopwords():
    cfg = NormalizerConfig(stopwords=frozenset({"s1", "s2"}))
    assert remove_stopwords(["s1", "w", "s2"], cfg) == ["w"]
    assert remove_stopwords(["s1", "w"], NormalizerConfig()) == ["s1", "w"]
    assert remove_stopwords(["s1", "s2"], cfg) == []


def test_zwj_is_sinhala():
    assert is_sinhala_char(ZWJ)
    assert is_sinhala_char("\u0d80") and is_sinhala_char("\u0dff")
    assert not is_sinhala_char("ൿ") and not is_sinhala_char("\u0e00")


def test_stage_flags():
    text = "good අබ 12"
    assert normalize(text, NormalizerConfig(remove_non_sinhala=False)) == ["good", "අබ"]
    assert normalize(text, NormalizerConfig(remove_non_sinhala=False, remove_numeric=False)) == ["good", "අබ", "12"]
    assert normalize("ක\u200dය", NormalizerConfig(strip_nonprintable=False)) == ["ක\u200dය"]
    assert normalize("සහ අබ", NormalizerConfig(stopwords=frozenset({"සහ"}), remove_stopwords=False)) == ["සහ", "අබ"]


def test_invalid_stopwords():
    with pytest.raises(ValueError):
        NormalizerConfig(stopwords=frozenset({""}))
    with pytest.raises(ValueError):
        NormalizerConfig(stopwords=frozenset({"අ බ"}))


def test_load_stopwords(tmp_path):
    path = tmp_path / "stop.txt"
    path.write_text("# comment\nසහ\n\n  හා  \n", encoding="utf-8")
    assert load_stopwords(path) == frozenset({"සහ", "හා"})
    path.write_text("අ බ\n", encoding="utf-8")
    with pytest.raises(ValueError):
        load_stopwords(path)


@given(st.text())
def test_strip_nonprintable_only_touches_control_categories(text):
    out = strip_nonprintable(text)
    kept = [ch for ch in text if ch != ZWJ]
    assert len(out) == len(kept)
    for a, b in zip(kept, out):
        if unicodedata.category(a) in SPACED:
            assert b == " "
        else:
            assert a == b


@settings(max_examples=300)
@given(noisy_messages(), st.frozensets(st.sampled_from(["ක", "අබ", "සහ"])))
def test_normalize_properties(message, stopwords):
    cfg = NormalizerConfig(stopwords=stopwords)
    tokens = normalize(message, cfg)
    assert normalize(" ".join(tokens), cfg) == tokens
    for tok in tokens:
        assert tok and not any(ch.isspace() for ch in tok)
        assert all(is_sinhala_char(ch) for ch in tok)
        assert tok not in stopwords
    assert sum(t.count(ZWJ) for t in tokens) == 0


@given(st.text())
def test_normalize_never_raises_and_is_idempotent(text):
    tokens = normalize(text)
    assert normalize(" ".join(tokens)) == tokens


@given(st.text())
def test_collapse_whitespace(text):
    out = collapse_whitespace(text)
    assert "  " not in out
    assert out == out.strip()

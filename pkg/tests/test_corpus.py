import json
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reactsent.corpus import (FIELDS, REACTIONS, Corpus, CorpusError, RawPost, SplitSpec,
                              compute_reaction_stats, filter_annotatable, load_corpus, split_holdout,
                              split_manifest, split_sizes, stats_from_totals, write_corpus)

HEADER = ",".join(FIELDS)


def post(i, message="අබ", **counts):
    return RawPost(post_id=f"p{i}", page_id="pg", created_time="2019-01-01", message=message, **counts)


def write(tmp_path, text, name="c.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_load_csv_roundtrip(tmp_path):
    corpus = Corpus([post(1, love=2, sad=1), post(2, message="x, \"y\"\nz", like=5)])
    path = tmp_path / "c.csv"
    write_corpus(corpus, path, format="csv")
    loaded = load_corpus(path)
    assert loaded.posts == corpus.posts


def test_load_jsonl_roundtrip(tmp_path):
    corpus = Corpus([post(1, love=2), post(2, angry=3)])
    path = tmp_path / "c.jsonl"
    write_corpus(corpus, path)
    assert load_corpus(path, format="jsonl").posts == corpus.posts


def test_tab_delimiter(tmp_path):
    row = "\t".join(["p1", "pg", "t", "අබ"] + ["1"] * 7)
    path = write(tmp_path, "\t".join(FIELDS) + "\n" + row + "\n", "c.tsv")
    assert load_corpus(path, delimiter="\t").posts[0].love == 1


def test_negative_count_names_row(tmp_path):
    rows = [HEADER, "p1,pg,t,m,0,1,0,0,0,0,0", "p2,pg,t,m,0,0,0,0,-3,0,0"]
    path = write(tmp_path, "\n".join(rows) + "\n")
    with pytest.raises(CorpusError, match="negative reaction count at row 3"):
        load_corpus(path)


def test_missing_field_names_row(tmp_path):
    path = tmp_path / "c.jsonl"
    rec = {f: 0 for f in FIELDS}
    rec.update(post_id="a", page_id="p", created_time="t", message="m")
    bad = dict(rec, post_id="b")
    del bad["love"]
    path.write_text(json.dumps(rec) + "\n" + json.dumps(bad) + "\n", encoding="utf-8")
    with pytest.raises(CorpusError, match="missing field 'love' at row 2"):
        load_corpus(path, format="jsonl")


def test_missing_header_column(tmp_path):
    path = write(tmp_path, "post_id,message\np1,m\n")
    with pytest.raises(CorpusError, match="missing field"):
        load_corpus(path)


def test_unparseable_count(tmp_path):
    path = write(tmp_path, HEADER + "\np1,pg,t,m,1,two,0,0,0,0,0\n")
    with pytest.raises(CorpusError, match="unparseable love count 'two' at row 2"):
        load_corpus(path)


def test_bad_json_line(tmp_path):
    path = write(tmp_path, "{not json}\n", "c.jsonl")
    with pytest.raises(CorpusError, match="row 1"):
        load_corpus(path, format="jsonl")


def test_duplicate_ids(tmp_path):
    rows = [HEADER, "p1,pg,t,m,0,1,0,0,0,0,0", "p1,pg,t,m,0,1,0,0,0,0,0"]
    path = write(tmp_path, "\n".join(rows) + "\n")
    with pytest.raises(CorpusError, match="duplicate post_id 'p1' at row 3"):
        load_corpus(path)


def test_extra_columns_warn(tmp_path):
    path = write(tmp_path, HEADER + ",shares\np1,pg,t,m,0,1,0,0,0,0,0,9\n")
    with pytest.warns(UserWarning, match="shares"):
        corpus = load_corpus(path)
    assert len(corpus) == 1


def test_empty_file_warns(tmp_path):
    path = write(tmp_path, "")
    with pytest.warns(UserWarning, match="empty"):
        assert len(load_corpus(path)) == 0


def test_missing_file_and_format(tmp_path):
    with pytest.raises(CorpusError, match="not found"):
        load_corpus(tmp_path / "nope.csv")
    with pytest.raises(CorpusError, match="unknown corpus format"):
        load_corpus(write(tmp_path, HEADER + "\n"), format="xml")


def test_stats_simple():
    corpus = Corpus([post(1, like=6, love=1, wow=1), post(2, sad=1, angry=1)])
    stats = compute_reaction_stats(corpus)
    assert stats.totals["like"] == 6
    assert stats.original_pct["like"] == pytest.approx(60.0)
    assert stats.filtered_pct == pytest.approx({"love": 25.0, "wow": 25.0, "sad": 25.0, "angry": 25.0})
    assert "haha" not in stats.filtered_pct
    assert "Like" in stats.table()


def test_stats_zero_totals_and_empty():
    stats = stats_from_totals({})
    assert all(v == 0.0 for v in stats.original_pct.values())
    with pytest.raises(CorpusError):
        compute_reaction_stats(Corpus([]))


@given(st.dictionaries(st.sampled_from(REACTIONS), st.integers(0, 10**9), min_size=1))
def test_stats_shares_sum_to_100(totals):
    stats = stats_from_totals(totals)
    if sum(totals.values()):
        assert sum(stats.original_pct.values()) == pytest.approx(100.0)
    considered = sum(totals.get(n, 0) for n in ("love", "wow", "sad", "angry"))
    if considered:
        assert sum(stats.filtered_pct.values()) == pytest.approx(100.0)


def test_filter_annotatable():
    corpus = Corpus([post(1, love=1), post(2, like=9, haha=3), post(3, message="  ", sad=2)])
    kept, report = filter_annotatable(corpus)
    assert kept.ids() == ["p1"]
    assert (report.kept, report.no_considered_reactions, report.empty_message) == (1, 1, 1)


@pytest.mark.parametrize("n,sizes", [(100, (72, 8, 20)), (150_000, (108_000, 12_000, 30_000)),
                                     (10, (8, 0, 2)), (20, (15, 1, 4)), (2000, (1440, 160, 400))])
def test_split_sizes(n, sizes):
    assert split_sizes(n, SplitSpec()) == sizes


@given(st.integers(10, 5000), st.integers(1, 9), st.integers(1, 9))
def test_split_sizes_partition(n, a, b):
    tr, va, te = split_sizes(n, SplitSpec((a, b), (9, 1)))
    assert tr + va + te == n
    assert min(tr, va, te) >= 0


@settings(max_examples=50)
@given(st.integers(10, 400), st.integers(0, 2**64 - 1))
def test_split_is_a_seeded_partition(n, seed):
    items = list(range(n))
    parts = split_holdout(items, SplitSpec(seed=seed))
    assert sorted(sum(parts, [])) == items
    assert split_holdout(items, SplitSpec(seed=seed)) == parts


def test_split_seed_changes_order():
    items = list(range(200))
    assert split_holdout(items, SplitSpec(seed=1))[2] != split_holdout(items, SplitSpec(seed=2))[2]


def test_split_too_small_and_bad_spec():
    with pytest.raises(CorpusError, match="too small"):
        split_holdout(list(range(5)))
    with pytest.raises(CorpusError):
        SplitSpec((8, 0))
    with pytest.raises(CorpusError):
        SplitSpec(seed=-1)


def test_split_corpus_and_manifest():
    corpus = Corpus([post(i, love=1) for i in range(50)])
    train, val, test = split_holdout(corpus, SplitSpec(seed=3))
    assert isinstance(train, Corpus)
    manifest = split_manifest(train, val, test, SplitSpec(seed=3), config_digest="abc")
    assert manifest["sizes"] == {"train": 36, "val": 4, "test": 10}
    assert manifest["config_digest"] == "abc"
    assert set(sum(manifest["splits"].values(), [])) == set(corpus.ids())


def test_rawpost_validation():
    with pytest.raises(CorpusError):
        post(1, love=-1)
    with pytest.raises(CorpusError):
        RawPost("", "p", "t", "m")


def test_no_spurious_warnings(tmp_path):
    path = write(tmp_path, HEADER + "\np1,pg,t,m,0,1,0,0,0,0,0\n")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        load_corpus(path)

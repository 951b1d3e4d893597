import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from reactsent.embeddings import (OOV, OOV_TOKEN, PAD, PAD_TOKEN, EmbeddingError, EmbeddingMatrix, Vocabulary,
                                  build_vocab, embed_sequence, encode, encode_batch, load_pretrained, random_embeddings)


def test_build_vocab_order_and_min_count():
    vocab = build_vocab([["b", "a", "c"], ["a", "c"], ["a"]], min_count=2)
    assert vocab.tokens == ["a", "c"]
    assert vocab.itos[:2] == [PAD_TOKEN, OOV_TOKEN]
    assert vocab.index("a") == 2 and vocab.index("zzz") == OOV
    with pytest.raises(EmbeddingError):
        build_vocab([], min_count=0)


def test_vocab_rejects_duplicates_and_reserved():
    with pytest.raises(EmbeddingError):
        Vocabulary(["a", "a"])
    with pytest.raises(EmbeddingError):
        Vocabulary([PAD_TOKEN])


def test_digest_tracks_contents():
    assert Vocabulary(["a", "b"]).digest() == Vocabulary(["a", "b"]).digest()
    assert Vocabulary(["a", "b"]).digest() != Vocabulary(["b", "a"]).digest()


def test_random_embeddings():
    vocab = Vocabulary(["a", "b", "c"])
    m = random_embeddings(vocab, dim=5, seed=1)
    assert m.vectors.shape == (5, 5)
    assert np.all(m.vectors[PAD] == 0)
    assert np.abs(m.vectors).max() <= 0.1
    assert np.array_equal(m.vectors, random_embeddings(vocab, dim=5, seed=1).vectors)
    with pytest.raises(EmbeddingError):
        random_embeddings(vocab, dim=0)


def write_vectors(tmp_path, text):
    path = tmp_path / "vec.txt"
    path.write_text(text, encoding="utf-8")
    return path


def test_load_pretrained_with_header(tmp_path):
    vocab = Vocabulary(["අබ", "කහ", "missing"])
    path = write_vectors(tmp_path, "3 2\nඅබ 1 2\nකහ 3 4\nother 9 9\n")
    m = load_pretrained(path, vocab, seed=0)
    assert m.dim == 2
    assert m.vectors[vocab.index("අබ")].tolist() == [1.0, 2.0]
    assert m.vectors[vocab.index("කහ")].tolist() == [3.0, 4.0]
    assert m.vectors[OOV].tolist() == [2.0, 3.0]
    assert np.all(m.vectors[PAD] == 0)
    assert np.abs(m.vectors[vocab.index("missing")]).max() <= 0.1


def test_load_pretrained_without_header(tmp_path):
    vocab = Vocabulary(["a"])
    m = load_pretrained(write_vectors(tmp_path, "a 0.5 0.25 1e-3\n"), vocab)
    assert m.dim == 3


@pytest.mark.parametrize("text,message", [
    ("2 3\na 1 2 3\nb 1 2\n", "dimension mismatch at line 3"),
    ("a 1 2\nb 1 x\n", "malformed vector value at line 2"),
    ("", "no vectors"),
])
def test_load_pretrained_errors(tmp_path, text, message):
    with pytest.raises(EmbeddingError, match=message):
        load_pretrained(write_vectors(tmp_path, text), Vocabulary(["a", "b"]))


def test_load_pretrained_dim_argument(tmp_path):
    with pytest.raises(EmbeddingError, match="line 1"):
        load_pretrained(write_vectors(tmp_path, "1 3\na 1 2 3\n"), Vocabulary(["a"]), dim=4)
    with pytest.raises(EmbeddingError, match="not found"):
        load_pretrained(tmp_path / "none.txt", Vocabulary(["a"]))


def test_encode_truncates_and_pads():
    vocab = Vocabulary(["a", "b"])
    ids, mask = encode(["a", "x", "b"], vocab, max_len=5)
    assert ids.tolist() == [2, OOV, 3, PAD, PAD]
    assert mask.tolist() == [1, 1, 1, 0, 0]
    ids, mask = encode(["a", "b", "a"], vocab, max_len=2)
    assert ids.tolist() == [2, 3] and mask.sum() == 2


@given(st.lists(st.lists(st.sampled_from(["a", "b", "c", "d"]), max_size=8), min_size=1, max_size=6),
       st.integers(1, 10))
def test_encode_batch_mask_matches_lengths(seqs, max_len):
    vocab = Vocabulary(["a", "b"])
    ids, mask = encode_batch(seqs, vocab, max_len)
    assert ids.shape == mask.shape == (len(seqs), max_len)
    assert mask.sum(axis=1).tolist() == [min(len(s), max_len) for s in seqs]
    assert np.all(ids[mask == 0] == PAD)
    assert np.all(ids[mask == 1] != PAD)


def test_embed_sequence_zeroes_padding():
    vocab = Vocabulary(["a"])
    m = random_embeddings(vocab, dim=4, seed=0)
    x, mask = embed_sequence(["a", "q"], vocab, m, max_len=4)
    assert x.shape == (4, 4)
    assert np.array_equal(x[0], m.vectors[2]) and np.array_equal(x[1], m.vectors[OOV])
    assert np.all(x[2:] == 0)


def test_embedding_matrix_shape_check():
    with pytest.raises(EmbeddingError):
        EmbeddingMatrix(np.zeros(3))

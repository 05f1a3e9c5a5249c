"""Vocabulary construction, embedding loading and fixed-length encoding.

Id 0 is the padding id everywhere.  An absent or empty question encodes to
all-padding ids, and because the padding embedding row is pinned to zero it
embeds to an exactly-zero input sequence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FormatError

PAD_ID = 0
PAD_TOKEN = "<pad>"


@dataclass
class Vocabulary:
    token_to_id: dict = field(default_factory=dict)
    id_to_token: list = field(default_factory=list)

    def __len__(self):
        return len(self.id_to_token)

    def __contains__(self, token):
        return token in self.token_to_id

    def id_of(self, token):
        return self.token_to_id.get(token, PAD_ID)


@dataclass
class EmbeddingTable:
    """vocab_size x embed_dim matrix; row 0 (padding) is all-zero and frozen."""
    vectors: np.ndarray
    trainable: bool = True

    @property
    def embed_dim(self):
        return self.vectors.shape[1]


def build_vocab(corpora):
    """Assign ids in first-occurrence order starting at 1 (0 is padding)."""
    vocab = Vocabulary({PAD_TOKEN: PAD_ID}, [PAD_TOKEN])
    for tokens in corpora:
        for tok in tokens:
            if tok not in vocab.token_to_id:
                vocab.token_to_id[tok] = len(vocab.id_to_token)
                vocab.id_to_token.append(tok)
    return vocab


def _oov_row(rng, embed_dim):
    half = 0.5 / embed_dim
    return rng.uniform(-half, half, size=embed_dim)


def load_embeddings(path, vocab, embed_dim, seed=0, trainable=True):
    """Load pretrained vectors for in-vocabulary tokens from a text file.

    File lines are `<token> <v1> ... <v_embed_dim>`.  Tokens missing from
    the file get a seeded uniform(-0.5/dim, 0.5/dim) row; the padding row
    stays zero.
    """
    found = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split()
            if not parts:
                continue
            token, vals = parts[0], parts[1:]
            if token not in vocab.token_to_id:
                continue
            if len(vals) != embed_dim:
                raise FormatError(
                    f"{path}:{lineno}: expected {embed_dim} values, found {len(vals)}")
            found[token] = np.array([float(v) for v in vals], dtype=np.float64)
    return _assemble(vocab, embed_dim, seed, found, trainable)


def random_embeddings(vocab, embed_dim, seed=0, trainable=True):
    """An embedding table with every non-padding row drawn like an OOV row."""
    return _assemble(vocab, embed_dim, seed, {}, trainable)


def _assemble(vocab, embed_dim, seed, found, trainable):
    rng = np.random.default_rng(seed)
    table = np.zeros((len(vocab), embed_dim), dtype=np.float64)
    for idx in range(1, len(vocab)):
        token = vocab.id_to_token[idx]
        if token in found:
            table[idx] = found[token]
        else:
            table[idx] = _oov_row(rng, embed_dim)
    return EmbeddingTable(vectors=table, trainable=trainable)


def encode(tokens, vocab, max_len):
    """Ids of `tokens`, truncated or right-padded to exactly `max_len`.

    Unknown tokens map to the padding id.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    ids = np.zeros(max_len, dtype=np.int64)
    for i, tok in enumerate(tokens[:max_len]):
        ids[i] = vocab.id_of(tok)
    return ids


def decode(ids, vocab):
    """Tokens for non-padding ids, in order."""
    return [vocab.id_to_token[int(i)] for i in ids if int(i) != PAD_ID]

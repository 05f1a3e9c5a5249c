"""Turning reformatted examples into the dense arrays the models consume."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .textenc import encode


@dataclass
class AnswerVocab:
    """Answer label to class id, first-occurrence order, shared by all heads."""
    answer_to_id: dict = field(default_factory=dict)
    id_to_answer: list = field(default_factory=list)

    def __len__(self):
        return len(self.id_to_answer)

    def id_of(self, answer):
        """-1 for answers outside the vocabulary (never predictable)."""
        return self.answer_to_id.get(answer, -1)


def build_answer_vocab(answers):
    av = AnswerVocab()
    for a in answers:
        if a not in av.answer_to_id:
            av.answer_to_id[a] = len(av.id_to_answer)
            av.id_to_answer.append(a)
    return av


def answers_of_multitask(examples):
    for ex in examples:
        for _, (_, answer) in ex.slots:
            yield answer


@dataclass
class EncodedDataset:
    """Dense slot-per-head layout.

    ids: (n, heads, max_len) int64; targets/mask/qtypes: (n, heads); images:
    (n, feature_dim).  `qtypes` holds indices into `tasks` (-1 on padded
    slots) so per-type accuracy can be reported even when one head serves
    every type.
    """
    ids: np.ndarray
    targets: np.ndarray
    mask: np.ndarray
    qtypes: np.ndarray
    images: np.ndarray
    image_ids: tuple
    tasks: tuple

    def __len__(self):
        return self.ids.shape[0]

    @property
    def n_heads(self):
        return self.ids.shape[1]

    def subset(self, indices):
        indices = np.asarray(indices)
        return EncodedDataset(ids=self.ids[indices], targets=self.targets[indices],
                              mask=self.mask[indices], qtypes=self.qtypes[indices],
                              images=self.images[indices],
                              image_ids=tuple(self.image_ids[int(i)] for i in indices),
                              tasks=self.tasks)


def encode_multitask(examples, tasks, vocab, answer_vocab, max_len, features):
    """One head per task; padded slots get all-padding ids and mask False."""
    tasks = tuple(tasks)
    n, h = len(examples), len(tasks)
    ids = np.zeros((n, h, max_len), dtype=np.int64)
    targets = np.full((n, h), -1, dtype=np.int64)
    mask = np.zeros((n, h), dtype=bool)
    qtypes = np.full((n, h), -1, dtype=np.int64)
    images = np.zeros((n, features.feature_dim), dtype=np.float64)
    image_ids = []
    features.require([ex.image_id for ex in examples])
    for i, ex in enumerate(examples):
        images[i] = features.get(ex.image_id)
        image_ids.append(ex.image_id)
        for qtype, (tokens, answer) in ex.slots:
            if qtype not in tasks:
                continue
            k = tasks.index(qtype)
            ids[i, k] = encode(tokens, vocab, max_len)
            targets[i, k] = answer_vocab.id_of(answer)
            mask[i, k] = True
            qtypes[i, k] = k
    return EncodedDataset(ids=ids, targets=targets, mask=mask, qtypes=qtypes,
                          images=images, image_ids=tuple(image_ids), tasks=tasks)


def encode_single(singles, tasks, vocab, answer_vocab, max_len, features):
    """One head total; the slot's question type varies per example."""
    tasks = tuple(tasks)
    n = len(singles)
    ids = np.zeros((n, 1, max_len), dtype=np.int64)
    targets = np.full((n, 1), -1, dtype=np.int64)
    mask = np.ones((n, 1), dtype=bool)
    qtypes = np.full((n, 1), -1, dtype=np.int64)
    images = np.zeros((n, features.feature_dim), dtype=np.float64)
    image_ids = []
    features.require([s.image_id for s in singles])
    for i, s in enumerate(singles):
        if s.qtype not in tasks:
            raise ConfigError(f"question type {s.qtype} not in task set {tasks}")
        images[i] = features.get(s.image_id)
        image_ids.append(s.image_id)
        ids[i, 0] = encode(s.tokens, vocab, max_len)
        targets[i, 0] = answer_vocab.id_of(s.answer)
        qtypes[i, 0] = tasks.index(s.qtype)
    return EncodedDataset(ids=ids, targets=targets, mask=mask, qtypes=qtypes,
                          images=images, image_ids=tuple(image_ids), tasks=tasks)

"""Reshaping labeled questions into the combined, single and isolated forms."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .types import ImageGroup, MultiTaskExample, SingleTaskExample


def group_by_image(questions):
    """One group per distinct image id, sorted by id; question order kept."""
    groups = {}
    for q in questions:
        grp = groups.setdefault(q.image_id, ImageGroup(image_id=q.image_id))
        grp.by_type.setdefault(q.qtype, []).append(q)
    return [groups[k] for k in sorted(groups)]


def reformat_multitask(groups, tasks):
    """Cartesian product of questions over each image's present types.

    Images with questions in fewer than two distinct types contribute
    nothing; types a given image lacks are left as padded slots.  The
    per-image example count is the product of the per-present-type question
    counts.
    """
    tasks = tuple(tasks)
    if len(tasks) < 2:
        raise ValueError("a multi-task set needs at least two question types")
    examples = []
    for grp in groups:
        present = grp.present_types(tasks)
        if len(present) < 2:
            continue
        pools = [grp.by_type[t] for t in present]
        for combo in itertools.product(*pools):
            slots = tuple((t, (q.tokens, q.answer)) for t, q in zip(present, combo))
            examples.append(MultiTaskExample(image_id=grp.image_id, slots=slots))
    return examples


def flatten_single_task(examples):
    """The deduplicated union of filled slots as single-task examples."""
    seen = {}
    for ex in examples:
        for qtype, (tokens, answer) in ex.slots:
            key = (ex.image_id, qtype, tokens, answer)
            if key not in seen:
                seen[key] = SingleTaskExample(image_id=ex.image_id, qtype=qtype,
                                              tokens=tokens, answer=answer)
    return list(seen.values())


def isolate_slots(examples):
    """One copy per filled slot, with every other slot padded."""
    out = []
    for ex in examples:
        for slot in ex.slots:
            out.append(MultiTaskExample(image_id=ex.image_id, slots=(slot,)))
    return out


@dataclass
class CorpusStats:
    n_examples: int = 0
    n_images: int = 0
    slots_per_type: dict = field(default_factory=dict)
    answer_vocab_size: int = 0

    def lines(self):
        rows = [f"examples: {self.n_examples}",
                f"images: {self.n_images}",
                f"answer vocabulary: {self.answer_vocab_size}"]
        for t, n in self.slots_per_type.items():
            rows.append(f"slots[{t}]: {n}")
        return rows


def corpus_stats(examples):
    images = set()
    answers = set()
    per_type = {}
    for ex in examples:
        images.add(ex.image_id)
        for qtype, (_, answer) in ex.slots:
            per_type[qtype] = per_type.get(qtype, 0) + 1
            answers.add(answer)
    per_type = {t: per_type[t] for t in sorted(per_type, key=lambda q: q.value)}
    return CorpusStats(n_examples=len(examples), n_images=len(images),
                       slots_per_type=per_type, answer_vocab_size=len(answers))

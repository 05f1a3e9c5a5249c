"""Line-oriented text formats for the intermediate datasets.

Every file starts with a schema-version header, then one record per line
with tab-separated fields, so each pipeline stage is inspectable and
diffable.
"""

from __future__ import annotations

from ..errors import FormatError
from .qtypes import parse_qtype
from .types import LabeledQuestion, MultiTaskExample, SingleTaskExample

_LABELED_MAGIC = "mtvqa-labeled v1"
_MULTI_MAGIC = "mtvqa-multitask v1"
_SINGLE_MAGIC = "mtvqa-single v1"


def write_labeled(path, questions):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_LABELED_MAGIC + "\n")
        for q in questions:
            fh.write(f"{q.image_id}\t{q.qtype.value}\t{q.answer}\t{' '.join(q.tokens)}\n")


def read_labeled(path):
    lines = _read_with_header(path, _LABELED_MAGIC)
    out = []
    for lineno, line in lines:
        parts = line.split("\t")
        if len(parts) != 4:
            raise FormatError(f"{path}:{lineno}: expected 4 fields, found {len(parts)}")
        image_id, qtype, answer, tokens = parts
        out.append(LabeledQuestion(image_id=image_id, tokens=tuple(tokens.split()),
                                   answer=answer, qtype=parse_qtype(qtype)))
    return out


def write_single(path, singles):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_SINGLE_MAGIC + "\n")
        for s in singles:
            fh.write(f"{s.image_id}\t{s.qtype.value}\t{s.answer}\t{' '.join(s.tokens)}\n")


def read_single(path):
    lines = _read_with_header(path, _SINGLE_MAGIC)
    out = []
    for lineno, line in lines:
        parts = line.split("\t")
        if len(parts) != 4:
            raise FormatError(f"{path}:{lineno}: expected 4 fields, found {len(parts)}")
        image_id, qtype, answer, tokens = parts
        out.append(SingleTaskExample(image_id=image_id, qtype=parse_qtype(qtype),
                                     tokens=tuple(tokens.split()), answer=answer))
    return out


def write_multitask(path, examples, tasks):
    """Per line: image id, then a tokens field and an answer field per task.

    Both fields are empty for a padded slot (question tokens are never
    empty, so emptiness encodes the mask exactly).
    """
    tasks = tuple(tasks)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_MULTI_MAGIC + " " + ",".join(t.value for t in tasks) + "\n")
        for ex in examples:
            fields = [ex.image_id]
            for t in tasks:
                payload = ex.slot(t)
                if payload is None:
                    fields.extend(["", ""])
                else:
                    tokens, answer = payload
                    fields.extend([" ".join(tokens), answer])
            fh.write("\t".join(fields) + "\n")


def read_multitask(path):
    """Returns (examples, tasks)."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = fh.read().splitlines()
    if not raw or not raw[0].startswith(_MULTI_MAGIC):
        raise FormatError(f"{path}: missing multitask header")
    tasks = tuple(parse_qtype(t) for t in raw[0][len(_MULTI_MAGIC):].strip().split(","))
    examples = []
    for lineno, line in enumerate(raw[1:], start=2):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 1 + 2 * len(tasks):
            raise FormatError(
                f"{path}:{lineno}: expected {1 + 2 * len(tasks)} fields, found {len(parts)}")
        image_id = parts[0]
        slots = []
        for k, t in enumerate(tasks):
            tokens, answer = parts[1 + 2 * k], parts[2 + 2 * k]
            if tokens:
                slots.append((t, (tuple(tokens.split()), answer)))
        examples.append(MultiTaskExample(image_id=image_id, slots=tuple(slots)))
    return examples, tasks


def write_rejections(path, rejected, reason="no keyword matched"):
    with open(path, "w", encoding="utf-8") as fh:
        for q in rejected:
            fh.write(f"{q.image_id}\t{reason}\t{' '.join(q.tokens)}\n")


def write_audit(path, sample):
    with open(path, "w", encoding="utf-8") as fh:
        for q in sample:
            fh.write(f"{q.qtype.value}\t{q.image_id}\t{q.answer}\t{' '.join(q.tokens)}\n")


def _read_with_header(path, magic):
    with open(path, "r", encoding="utf-8") as fh:
        raw = fh.read().splitlines()
    if not raw or raw[0] != magic:
        raise FormatError(f"{path}: missing header {magic!r}")
    return [(i, ln) for i, ln in enumerate(raw[1:], start=2) if ln.strip()]

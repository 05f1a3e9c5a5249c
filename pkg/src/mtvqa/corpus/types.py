"""Record types for raw, labeled and reformatted questions."""

from __future__ import annotations

from dataclasses import dataclass, field

from .qtypes import QuestionType


@dataclass(frozen=True)
class RawQuestion:
    image_id: str
    tokens: tuple
    answer: str


@dataclass(frozen=True)
class LabeledQuestion:
    image_id: str
    tokens: tuple
    answer: str
    qtype: QuestionType


@dataclass
class ImageGroup:
    """All labeled questions of one image, bucketed by type."""
    image_id: str
    by_type: dict = field(default_factory=dict)

    def present_types(self, tasks):
        return tuple(t for t in tasks if self.by_type.get(t))


@dataclass(frozen=True)
class MultiTaskExample:
    """One image with up to one (question, answer) slot per task type.

    `slots` maps a QuestionType to a (tokens, answer) pair; a type without
    an entry is a padded slot.  The mask is slot presence.
    """
    image_id: str
    slots: tuple  # ordered ((qtype, (tokens, answer)), ...)

    def slot(self, qtype):
        for t, payload in self.slots:
            if t is qtype:
                return payload
        return None

    def filled_types(self):
        return tuple(t for t, _ in self.slots)

    def mask(self, tasks):
        filled = set(self.filled_types())
        return tuple(t in filled for t in tasks)


@dataclass(frozen=True)
class SingleTaskExample:
    image_id: str
    qtype: QuestionType
    tokens: tuple
    answer: str

"""BIO tag algebra: validity checks, repair, and span extraction.

A tag is ``O`` or ``B-<label>``/``I-<label>`` with a nonempty label that
contains no whitespace. A sequence is valid when every ``I`` continues a
chunk opened by a ``B`` (or an earlier ``I``) with the same label.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .errors import StructuralError

_TAG_RE = re.compile(r"O|[BI]-\S+")

# parse_tag is called per token in tight loops; tag strings repeat heavily,
# so results are memoised (bounded, in case callers stream huge label sets).
_SPLIT_CACHE: dict[str, tuple[str, str | None]] = {}
_SPLIT_CACHE_MAX = 100_000


@dataclass(frozen=True, order=True)
class SlotSpan:
    """Half-open token interval [start, end) carrying a slot label."""

    start: int
    end: int
    label: str

    def __post_init__(self):
        if not 0 <= self.start < self.end:
            raise StructuralError(f"bad span bounds [{self.start}, {self.end})")
        if not self.label:
            raise StructuralError("span label must be nonempty")

    def overlaps(self, other: SlotSpan) -> bool:
        return self.start < other.end and other.start < self.end


class IssueKind(enum.Enum):
    ORPHAN_I = "OrphanI"
    LABEL_SWITCH = "LabelSwitch"


def parse_tag(tag: str, position: int | None = None) -> tuple[str, str | None]:
    """Split a tag into (prefix, label); ``O`` has label ``None``.

    Raises StructuralError on lexically malformed tags, naming the token
    position when one is given.
    """
    got = _SPLIT_CACHE.get(tag)
    if got is None:
        if not isinstance(tag, str) or not _TAG_RE.fullmatch(tag):
            where = "" if position is None else f" at position {position}"
            raise StructuralError(f"malformed tag {tag!r}{where}")
        got = ("O", None) if tag == "O" else (tag[0], tag[2:])
        if len(_SPLIT_CACHE) < _SPLIT_CACHE_MAX:
            _SPLIT_CACHE[tag] = got
    return got


def tag_issues(tags) -> list[tuple[int, IssueKind]]:
    """Scan a sequence for BIO violations.

    Reports an I that opens a chunk as ORPHAN_I and an I whose label
    differs from its chunk's governing label as LABEL_SWITCH. The
    governing label is the one carried by the chunk-initial token,
    whether that token was a B or an orphan I.
    """
    issues = []
    chunk: str | None = None
    for pos, tag in enumerate(tags):
        prefix, label = parse_tag(tag, pos)
        if prefix == "O":
            chunk = None
        elif prefix == "B":
            chunk = label
        elif chunk is None:
            issues.append((pos, IssueKind.ORPHAN_I))
            chunk = label
        elif label != chunk:
            issues.append((pos, IssueKind.LABEL_SWITCH))
    return issues


def is_valid(tags) -> bool:
    return not tag_issues(tags)


def repair(tags) -> list[str]:
    """Rewrite a lexically well-formed sequence into valid BIO.

    Two rules, applied in one left-to-right pass: an I whose label
    differs from its chunk's is rewritten to the chunk-initial token's
    label, and an I that opens a chunk is promoted to B (keeping its own
    label, which then governs the chunk). Valid input comes back
    unchanged, and the operation is idempotent.
    """
    out = []
    chunk: str | None = None
    for pos, tag in enumerate(tags):
        prefix, label = parse_tag(tag, pos)
        if prefix == "O":
            chunk = None
            out.append("O")
        elif prefix == "B":
            chunk = label
            out.append(tag)
        elif chunk is None:
            chunk = label
            out.append("B-" + label)
        else:
            out.append("I-" + chunk)
    return out


def spans_from_tags(tags) -> list[SlotSpan]:
    """Extract chunk spans from a valid BIO sequence, sorted by start.

    Invalid sequences are rejected rather than silently repaired so that
    data bugs surface at the call site; run repair first when unclean
    input is expected.
    """
    problems = tag_issues(tags)
    if problems:
        pos, kind = problems[0]
        raise StructuralError(f"invalid BIO sequence: {kind.value} at position {pos}")
    spans = []
    start: int | None = None
    open_label: str | None = None
    for pos, tag in enumerate(tags):
        prefix, label = parse_tag(tag, pos)
        if prefix != "I" and start is not None:
            spans.append(SlotSpan(start, pos, open_label))
            start, open_label = None, None
        if prefix == "B":
            start, open_label = pos, label
    if start is not None:
        spans.append(SlotSpan(start, len(tags), open_label))
    return spans


def tags_from_spans(spans, length: int) -> list[str]:
    """Render pairwise disjoint spans as a BIO sequence of the given length."""
    tags = ["O"] * length
    prev: SlotSpan | None = None
    for span in sorted(spans, key=lambda s: (s.start, s.end)):
        if span.end > length:
            raise StructuralError(f"span {span} exceeds sequence length {length}")
        if prev is not None and span.start < prev.end:
            raise StructuralError(f"spans {prev} and {span} overlap")
        tags[span.start] = "B-" + span.label
        for k in range(span.start + 1, span.end):
            tags[k] = "I-" + span.label
        prev = span
    return tags

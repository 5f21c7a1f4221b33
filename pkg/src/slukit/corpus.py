"""Utterance data model and its tab-separated block file format.

One utterance per block, blocks separated by exactly one blank line::

    # id: <id>
    # text: <raw text>
    # intent: <label>
    1<TAB><token><TAB><tag>
    2<TAB><token><TAB><tag>

Token indices are 1-based and contiguous. Files are UTF-8 with LF line
endings and no trailing blank line; ``write_dataset`` emits exactly this
shape and ``parse_dataset`` inverts it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import bio
from .errors import ParseError, StructuralError

_HEADERS = ("# id: ", "# text: ", "# intent: ")


@dataclass(frozen=True)
class Utterance:
    """A single annotated sentence.

    Tags must be lexically well-formed BIO (``O`` / ``B-x`` / ``I-x``);
    transition-level validity is deliberately not enforced here, that is
    what validate and bio.repair are for. Metadata fields may not contain
    newlines and tokens may not contain tabs, since either would break
    the file format round trip.
    """

    id: str
    text: str
    tokens: tuple[str, ...]
    slot_tags: tuple[str, ...]
    intent: str

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "slot_tags", tuple(self.slot_tags))
        if len(self.tokens) == 0:
            raise StructuralError(f"utterance {self.id!r} has no tokens")
        if len(self.slot_tags) != len(self.tokens):
            raise StructuralError(
                f"utterance {self.id!r}: {len(self.tokens)} tokens "
                f"but {len(self.slot_tags)} tags"
            )
        for name, value in (("id", self.id), ("text", self.text), ("intent", self.intent)):
            if "\n" in value:
                raise StructuralError(f"utterance {self.id!r}: newline in {name} field")
        for tok in self.tokens:
            if "\t" in tok or "\n" in tok:
                raise StructuralError(
                    f"utterance {self.id!r}: token {tok!r} contains tab or newline"
                )
        for pos, tag in enumerate(self.slot_tags):
            bio.parse_tag(tag, pos)


@dataclass(frozen=True)
class Dataset:
    """An ordered collection of utterances plus derived label inventories.

    Inventories are computed at construction, so they always equal the
    union of labels observed in the utterances. Duplicate utterances are
    retained as distinct records.
    """

    name: str
    utterances: tuple[Utterance, ...]
    label_inventory: frozenset[str] = field(init=False)
    intent_inventory: frozenset[str] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "utterances", tuple(self.utterances))
        labels, intents = set(), set()
        for utt in self.utterances:
            intents.add(utt.intent)
            for tag in utt.slot_tags:
                _, label = bio.parse_tag(tag)
                if label is not None:
                    labels.add(label)
        object.__setattr__(self, "label_inventory", frozenset(labels))
        object.__setattr__(self, "intent_inventory", frozenset(intents))

    def __len__(self) -> int:
        return len(self.utterances)

    def __iter__(self):
        return iter(self.utterances)


@dataclass(frozen=True)
class Issue:
    """One BIO violation found by validate."""

    utterance_id: str
    position: int
    kind: bio.IssueKind


def parse_dataset(text: str, name: str = "dataset") -> Dataset:
    """Parse the block format into a Dataset.

    Extra blank lines between blocks and a trailing blank line are
    tolerated; the canonical form written by write_dataset has exactly
    one separator line and none at the end.
    """
    utterances = []
    block: list[tuple[int, str]] = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        if line == "":
            if block:
                utterances.append(_parse_block(block))
                block = []
        else:
            block.append((lineno, line))
    if block:
        utterances.append(_parse_block(block))
    return Dataset(name, tuple(utterances))


def _parse_block(lines: list[tuple[int, str]]) -> Utterance:
    if len(lines) < len(_HEADERS):
        raise StructuralError(f"line {lines[0][0]}: incomplete utterance block")
    values = []
    for (lineno, line), header in zip(lines, _HEADERS):
        if not line.startswith(header):
            raise StructuralError(f"line {lineno}: expected {header.rstrip()!r} header")
        values.append(line[len(header):])
    utt_id, utt_text, intent = values
    tokens, tags = [], []
    for offset, (lineno, line) in enumerate(lines[len(_HEADERS):], start=1):
        cols = line.split("\t")
        if len(cols) != 3:
            raise ParseError(
                f"expected 3 tab-separated columns, got {len(cols)}", line=lineno
            )
        index_str, token, tag = cols
        try:
            index = int(index_str)
        except ValueError:
            raise ParseError(
                f"token index {index_str!r} is not an integer", line=lineno
            ) from None
        if index != offset:
            raise StructuralError(f"line {lineno}: token index {index}, expected {offset}")
        tokens.append(token)
        tags.append(tag)
    return Utterance(utt_id, utt_text, tuple(tokens), tuple(tags), intent)


def write_dataset(ds: Dataset) -> str:
    """Serialise to the canonical block format; inverse of parse_dataset."""
    blocks = []
    for utt in ds.utterances:
        lines = [f"# id: {utt.id}", f"# text: {utt.text}", f"# intent: {utt.intent}"]
        lines.extend(
            f"{i}\t{tok}\t{tag}"
            for i, (tok, tag) in enumerate(zip(utt.tokens, utt.slot_tags), start=1)
        )
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)


def validate(ds: Dataset) -> list[Issue]:
    """List BIO transition violations; empty means every sequence is valid."""
    issues = []
    for utt in ds.utterances:
        for pos, kind in bio.tag_issues(utt.slot_tags):
            issues.append(Issue(utt.id, pos, kind))
    return issues

"""Slot label transfer across parallel sentences via alignment score matrices.

Each record pairs a source and a target token list with a score matrix
(rows = source tokens, columns = target tokens). Every labelled source
token votes for its highest scoring target column; the raw target tags
are then repaired into valid BIO.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import bio
from .corpus import Dataset, Utterance
from .errors import ParseError, StructuralError


@dataclass(frozen=True)
class AlignmentRecord:
    id: str
    src_tokens: tuple[str, ...]
    tgt_tokens: tuple[str, ...]
    scores: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "src_tokens", tuple(self.src_tokens))
        object.__setattr__(self, "tgt_tokens", tuple(self.tgt_tokens))
        object.__setattr__(
            self, "scores", tuple(tuple(float(v) for v in row) for row in self.scores)
        )
        if len(self.scores) != len(self.src_tokens):
            raise StructuralError(
                f"record {self.id!r}: {len(self.scores)} score rows for "
                f"{len(self.src_tokens)} source tokens"
            )
        for i, row in enumerate(self.scores):
            if len(row) != len(self.tgt_tokens):
                raise StructuralError(
                    f"record {self.id!r}: row {i} has {len(row)} scores for "
                    f"{len(self.tgt_tokens)} target tokens"
                )
            if not all(math.isfinite(v) for v in row):
                raise StructuralError(f"record {self.id!r}: non-finite score in row {i}")


def project_labels(src_tags, rec: AlignmentRecord) -> list[str]:
    """Carry a valid source BIO sequence onto the record's target side.

    Rules: each labelled source token places its tag on its argmax target
    column (ties break to the lowest index); when several source tokens
    pick the same target, the leftmost one wins; O tokens place nothing
    and never erase a label; unclaimed targets stay O. The raw result is
    passed through bio.repair, so the output is always valid.
    """
    src_tags = list(src_tags)
    if len(src_tags) != len(rec.src_tokens):
        raise StructuralError(
            f"record {rec.id!r}: {len(src_tags)} tags for "
            f"{len(rec.src_tokens)} source tokens"
        )
    problems = bio.tag_issues(src_tags)
    if problems:
        pos, kind = problems[0]
        raise StructuralError(
            f"record {rec.id!r}: invalid source BIO ({kind.value} at position {pos})"
        )
    n_tgt = len(rec.tgt_tokens)
    if n_tgt == 0:
        return []
    raw = ["O"] * n_tgt
    for i, tag in enumerate(src_tags):
        if tag == "O":
            continue
        row = rec.scores[i]
        best = 0
        for j in range(1, n_tgt):
            if row[j] > row[best]:
                best = j
        if raw[best] == "O":
            raw[best] = tag
    return bio.repair(raw)


def parse_alignments(text: str) -> list[AlignmentRecord]:
    """Read JSON Lines alignment records.

    Each line is an object with "id", "src_tokens", "tgt_tokens" and
    "scores" ([source][target]). Blank lines are skipped. Dimension or
    finiteness problems are reported with the record id, malformed JSON
    with the line number.
    """
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as err:
            raise ParseError(f"bad JSON: {err.msg}", line=lineno) from None
        try:
            rec = AlignmentRecord(
                id=str(obj["id"]),
                src_tokens=tuple(obj["src_tokens"]),
                tgt_tokens=tuple(obj["tgt_tokens"]),
                scores=tuple(tuple(row) for row in obj["scores"]),
            )
        except KeyError as err:
            raise ParseError(f"missing field {err}", line=lineno) from None
        except (TypeError, ValueError) as err:
            raise ParseError(f"bad record: {err}", line=lineno) from None
        records.append(rec)
    return records


def project_dataset(src: Dataset, alignments, threads: int = 1) -> Dataset:
    """Project every utterance onto its alignment record's target side.

    Records are matched to utterances by id; intents are copied verbatim
    since they label the whole sentence, and the target text is the
    space-joined target tokens. Records are independent, so with
    threads > 1 they are processed by a pool; output order and content do
    not depend on the thread count.
    """
    if threads < 1:
        raise StructuralError("threads must be >= 1")
    by_id: dict[str, AlignmentRecord] = {}
    for rec in alignments:
        if rec.id in by_id:
            raise StructuralError(f"duplicate alignment record id {rec.id!r}")
        by_id[rec.id] = rec

    def one(utt: Utterance) -> Utterance:
        rec = by_id.get(utt.id)
        if rec is None:
            raise StructuralError(f"no alignment record for utterance id {utt.id!r}")
        tags = project_labels(utt.slot_tags, rec)
        return Utterance(
            utt.id, " ".join(rec.tgt_tokens), rec.tgt_tokens, tuple(tags), utt.intent
        )

    if threads == 1:
        projected = [one(utt) for utt in src]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            projected = list(pool.map(one, src.utterances))
    return Dataset(f"{src.name}-projected", tuple(projected))

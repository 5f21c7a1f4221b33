"""Label-schema renaming, span trimming, and reproducible corpus merging.

Different corpora name the same concepts differently (for example several
location-ish labels on one side versus a single LOCATION on the other).
A LabelMap renames slot labels and intents onto a shared inventory; any
label without an entry maps to itself. After renaming, datasets are
concatenated and shuffled with a pinned, documented PRNG so a merge can
be replayed bit-for-bit anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from types import MappingProxyType
from typing import Mapping

from . import bio
from .corpus import Dataset
from .errors import ParseError, StructuralError

# Identifier for the shuffle algorithm, recorded in run manifests.
RNG_ALGORITHM = "splitmix64/fisher-yates"

_MASK64 = (1 << 64) - 1
_SECTIONS = ("slots", "intents")


@dataclass(frozen=True)
class LabelMap:
    """Slot-label and intent renamings with identity fallback."""

    slot_map: Mapping[str, str]
    intent_map: Mapping[str, str]

    def __post_init__(self):
        for kind, mapping in (("slot", self.slot_map), ("intent", self.intent_map)):
            for old, new in mapping.items():
                if not new:
                    raise StructuralError(f"{kind} label {old!r} maps to an empty label")
        object.__setattr__(self, "slot_map", MappingProxyType(dict(self.slot_map)))
        object.__setattr__(self, "intent_map", MappingProxyType(dict(self.intent_map)))

    def slot(self, label: str) -> str:
        return self.slot_map.get(label, label)

    def intent(self, label: str) -> str:
        return self.intent_map.get(label, label)


def parse_label_map(text: str) -> LabelMap:
    """Read a label map file.

    Format: ``[slots]`` and ``[intents]`` section headers, one
    ``old<TAB>new`` pair per line, ``#`` comment lines and blank lines
    ignored. Duplicate keys within a section are rejected.
    """
    maps: dict[str, dict[str, str]] = {name: {} for name in _SECTIONS}
    section: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1]
            if name not in maps:
                raise ParseError(f"unknown section {name!r}", line=lineno)
            section = name
            continue
        if section is None:
            raise ParseError("mapping before any section header", line=lineno)
        cols = raw.split("\t")
        if len(cols) != 2:
            raise ParseError(
                f"expected old<TAB>new, got {len(cols)} columns", line=lineno
            )
        old, new = cols
        if old in maps[section]:
            raise ParseError(f"duplicate key {old!r} in [{section}]", line=lineno)
        maps[section][old] = new
    return LabelMap(maps["slots"], maps["intents"])


def apply_label_map(ds: Dataset, lmap: LabelMap) -> Dataset:
    """Rename slot labels and intents; B/I prefixes and boundaries stay put.

    Two adjacent spans that collapse onto the same new label remain two
    spans, because the second one keeps its B tag.
    """
    out = []
    for utt in ds:
        tags = []
        for tag in utt.slot_tags:
            prefix, label = bio.parse_tag(tag)
            tags.append("O" if label is None else f"{prefix}-{lmap.slot(label)}")
        out.append(
            replace(utt, slot_tags=tuple(tags), intent=lmap.intent(utt.intent))
        )
    return Dataset(ds.name, tuple(out))


def trim_spans(ds: Dataset, leading_tokens) -> Dataset:
    """Strip configured function words from the front of every span.

    Converted annotation schemes sometimes include lead-ins such as "for"
    or "at" inside a span; this hook removes them. Matching is
    case-insensitive, a span whose tokens are all stripped is dropped,
    and tag sequences are repaired before extraction so unclean input
    does not abort the cleanup.
    """
    drop = {t.lower() for t in leading_tokens}
    out = []
    for utt in ds:
        kept = []
        for span in bio.spans_from_tags(bio.repair(utt.slot_tags)):
            start = span.start
            while start < span.end and utt.tokens[start].lower() in drop:
                start += 1
            if start < span.end:
                kept.append(bio.SlotSpan(start, span.end, span.label))
        tags = bio.tags_from_spans(kept, len(utt.tokens))
        out.append(replace(utt, slot_tags=tuple(tags)))
    return Dataset(ds.name, tuple(out))


def _splitmix64(state: int) -> tuple[int, int]:
    """One step of SplitMix64; returns (next state, 64-bit output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def seeded_permutation(n: int, seed: int) -> list[int]:
    """Fisher-Yates permutation of range(n) driven by SplitMix64.

    The generator is pinned by name (RNG_ALGORITHM) so the permutation
    can be reproduced outside this codebase; draws use rejection sampling
    to stay unbiased.
    """
    state = seed & _MASK64
    order = list(range(n))
    for i in range(n - 1, 0, -1):
        k = i + 1
        bound = (1 << 64) - ((1 << 64) % k)
        while True:
            state, value = _splitmix64(state)
            if value < bound:
                break
        j = value % k
        order[i], order[j] = order[j], order[i]
    return order


def merge_shuffle(datasets, seed: int) -> Dataset:
    """Concatenate datasets and shuffle utterances with the seeded PRNG.

    Duplicates survive; the result size is the sum of the input sizes.
    """
    datasets = list(datasets)
    if not datasets:
        raise StructuralError("merge_shuffle needs at least one dataset")
    pooled = [utt for ds in datasets for utt in ds]
    order = seeded_permutation(len(pooled), seed)
    name = "+".join(ds.name for ds in datasets)
    return Dataset(name, tuple(pooled[i] for i in order))

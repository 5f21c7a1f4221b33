"""Joint intent and slot tagger over a small bidirectional recurrent encoder.

A shared encoder (token embeddings into a single-layer tanh recurrence run
in both directions) feeds three linear heads: an intent classifier over
the sentence vector (final forward and final backward state concatenated),
a per-token slot classifier, and a masked-token classifier used as an
auxiliary objective on raw text. Task losses are mean cross-entropies
combined as a weighted sum; decoding is greedy argmax with the tag
sequence repaired into valid BIO.

Everything runs in float64 numpy with hand-written backpropagation and
plain fixed-rate SGD, so training is bit-reproducible for a given seed
and every gradient can be audited against finite differences. For
large-scale work you would swap in a pretrained encoder and a stateful
optimizer with a warmup schedule; both trade away the exact-replay
property this implementation exists for.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from . import bio
from .corpus import Dataset, Utterance
from .errors import DivergenceError, StructuralError
from .sampler import InstanceCycler, TaskSpec, schedule_epoch

PAD, UNK, MASK, CLS = "<pad>", "<unk>", "<mask>", "<cls>"
# Reserved token ids, fixed in this order: 0 <pad>, 1 <unk>, 2 <mask>, 3 <cls>.
# The current encoder consumes unpadded sequences and derives the sentence
# vector from the recurrence endpoints, so <pad> and <cls> are reserved for
# format stability rather than used in computation.
RESERVED_TOKENS = (PAD, UNK, MASK, CLS)
PAD_ID, UNK_ID, MASK_ID, CLS_ID = range(4)

SLU_TASK = "slu"
MLM_TASK = "mlm"

CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class Vocab:
    """Token, slot-tag and intent inventories with dense ids.

    Token ids start with the reserved entries, followed by the kept data
    tokens in sorted order; tag and intent ids are positions in their
    tuples. All three id assignments are bijections onto 0..K-1.
    """

    tokens: tuple[str, ...]
    slot_tags: tuple[str, ...]
    intents: tuple[str, ...]

    def __post_init__(self):
        if tuple(self.tokens[: len(RESERVED_TOKENS)]) != RESERVED_TOKENS:
            raise StructuralError("vocab must start with the reserved tokens")
        for name, seq in (
            ("tokens", self.tokens),
            ("slot_tags", self.slot_tags),
            ("intents", self.intents),
        ):
            if len(set(seq)) != len(seq):
                raise StructuralError(f"duplicate entries in {name}")
        object.__setattr__(self, "_token_ids", {t: i for i, t in enumerate(self.tokens)})
        object.__setattr__(self, "_tag_ids", {t: i for i, t in enumerate(self.slot_tags)})
        object.__setattr__(self, "_intent_ids", {t: i for i, t in enumerate(self.intents)})

    def token_id(self, token: str) -> int:
        return self._token_ids.get(token, UNK_ID)

    def tag_id(self, tag: str) -> int:
        try:
            return self._tag_ids[tag]
        except KeyError:
            raise StructuralError(f"tag {tag!r} not in inventory") from None

    def intent_id(self, intent: str) -> int:
        try:
            return self._intent_ids[intent]
        except KeyError:
            raise StructuralError(f"intent {intent!r} not in inventory") from None

    def encode_tokens(self, tokens) -> list[int]:
        return [self.token_id(t) for t in tokens]


def build_vocab(datasets, min_count: int = 1, extra_sentences=()) -> Vocab:
    """Count tokens across datasets and keep those seen >= min_count times.

    extra_sentences (token lists from a raw-text corpus) contribute to the
    token counts only. Tag and intent inventories cover every label in the
    datasets, with both B- and I- forms per slot label so the slot head
    can emit full spans.
    """
    if min_count < 1:
        raise StructuralError("min_count must be >= 1")
    counts: dict[str, int] = {}
    labels: set[str] = set()
    intents: set[str] = set()
    for ds in datasets:
        labels |= ds.label_inventory
        intents |= ds.intent_inventory
        for utt in ds:
            for tok in utt.tokens:
                counts[tok] = counts.get(tok, 0) + 1
    for sent in extra_sentences:
        for tok in sent:
            counts[tok] = counts.get(tok, 0) + 1
    kept = sorted(
        t for t, c in counts.items() if c >= min_count and t not in RESERVED_TOKENS
    )
    tags = ("O",) + tuple(sorted(f"{p}-{lab}" for lab in labels for p in "BI"))
    return Vocab(RESERVED_TOKENS + tuple(kept), tags, tuple(sorted(intents)))


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for the joint trainer.

    embed_dim/hidden_dim size the encoder; the loss weights multiply each
    task's mean cross-entropy in the summed objective; mask_rate is the
    fraction of auxiliary-text positions selected for the masked-token
    task; alpha shapes the task sampling distribution. batches_per_epoch
    defaults to ceil(total instances / batch_size) when left at None.
    """

    embed_dim: int = 32
    hidden_dim: int = 32
    learning_rate: float = 0.5
    epochs: int = 20
    batch_size: int = 8
    seed: int = 0
    w_intent: float = 1.0
    w_slot: float = 1.0
    w_mlm: float = 0.01
    mask_rate: float = 0.15
    alpha: float = 0.5
    min_count: int = 1
    batches_per_epoch: int | None = None
    max_mlm_sentences: int = 100_000

    def __post_init__(self):
        if self.embed_dim < 1 or self.hidden_dim < 1:
            raise StructuralError("encoder dimensions must be >= 1")
        if self.learning_rate < 0:
            raise StructuralError("learning rate must be >= 0")
        if self.epochs < 1:
            raise StructuralError("epochs must be >= 1")
        if self.batch_size < 1:
            raise StructuralError("batch size must be >= 1")
        for name in ("w_intent", "w_slot", "w_mlm"):
            if getattr(self, name) < 0:
                raise StructuralError(f"{name} must be >= 0")
        if not 0 <= self.mask_rate <= 1:
            raise StructuralError("mask_rate must be in [0, 1]")
        if self.alpha < 0:
            raise StructuralError("alpha must be >= 0")
        if self.min_count < 1:
            raise StructuralError("min_count must be >= 1")
        if self.batches_per_epoch is not None and self.batches_per_epoch < 1:
            raise StructuralError("batches_per_epoch must be >= 1")
        if self.max_mlm_sentences < 0:
            raise StructuralError("max_mlm_sentences must be >= 0")


# Parameter tensors, by name (d = embed_dim, h = hidden_dim, V = vocab size,
# K_int = intents, K_slot = slot tags):
#   emb          [V, d]      w_intent  [2h, K_int]   b_intent  [K_int]
#   w_fwd_in     [d, h]      w_slot    [2h, K_slot]  b_slot    [K_slot]
#   w_fwd_state  [h, h]      w_mlm     [2h, V]       b_mlm     [V]
#   b_fwd        [h]
#   w_bwd_in     [d, h]
#   w_bwd_state  [h, h]
#   b_bwd        [h]
ModelParams = dict[str, np.ndarray]


def _param_shapes(config: TrainConfig, vocab: Vocab) -> dict[str, tuple[int, ...]]:
    d, h = config.embed_dim, config.hidden_dim
    v = len(vocab.tokens)
    return {
        "emb": (v, d),
        "w_fwd_in": (d, h),
        "w_fwd_state": (h, h),
        "b_fwd": (h,),
        "w_bwd_in": (d, h),
        "w_bwd_state": (h, h),
        "b_bwd": (h,),
        "w_intent": (2 * h, len(vocab.intents)),
        "b_intent": (len(vocab.intents),),
        "w_slot": (2 * h, len(vocab.slot_tags)),
        "b_slot": (len(vocab.slot_tags),),
        "w_mlm": (2 * h, v),
        "b_mlm": (v,),
    }


def init_params(config: TrainConfig, vocab: Vocab, rng=None) -> ModelParams:
    """Fresh float64 parameters; weights uniform in [-0.1, 0.1], zero biases."""
    if rng is None:
        rng = np.random.default_rng(config.seed)
    params: ModelParams = {}
    for name, shape in _param_shapes(config, vocab).items():
        if name.startswith("b_"):
            params[name] = np.zeros(shape)
        else:
            params[name] = rng.uniform(-0.1, 0.1, size=shape)
    return params


def validate_params(params: ModelParams, config: TrainConfig, vocab: Vocab) -> None:
    expected = _param_shapes(config, vocab)
    if set(params) != set(expected):
        missing = sorted(set(expected) - set(params))
        extra = sorted(set(params) - set(expected))
        raise StructuralError(f"parameter names mismatch: missing {missing}, extra {extra}")
    for name, shape in expected.items():
        if tuple(params[name].shape) != shape:
            raise StructuralError(
                f"parameter {name}: shape {tuple(params[name].shape)}, expected {shape}"
            )
        if not np.all(np.isfinite(params[name])):
            raise StructuralError(f"parameter {name} contains non-finite values")


def _forward(params: ModelParams, token_ids) -> tuple[np.ndarray, np.ndarray, tuple]:
    ids = list(token_ids)
    if not ids:
        raise StructuralError("empty token sequence")
    v = params["emb"].shape[0]
    for t in ids:
        if not 0 <= t < v:
            raise StructuralError(f"token id {t} out of range for vocab size {v}")
    x = params["emb"][ids]
    n = len(ids)
    h = params["b_fwd"].shape[0]
    fwd = np.empty((n, h))
    state = np.zeros(h)
    for t in range(n):
        state = np.tanh(x[t] @ params["w_fwd_in"] + state @ params["w_fwd_state"] + params["b_fwd"])
        fwd[t] = state
    bwd = np.empty((n, h))
    state = np.zeros(h)
    for t in range(n - 1, -1, -1):
        state = np.tanh(x[t] @ params["w_bwd_in"] + state @ params["w_bwd_state"] + params["b_bwd"])
        bwd[t] = state
    states = np.concatenate([fwd, bwd], axis=1)
    sent = np.concatenate([fwd[n - 1], bwd[0]])
    return states, sent, (ids, x, fwd, bwd)


def encode(params: ModelParams, token_ids) -> tuple[np.ndarray, np.ndarray]:
    """Run the encoder; returns per-token states [n, 2h] and the sentence vector [2h]."""
    states, sent, _ = _forward(params, token_ids)
    return states, sent


@dataclass(frozen=True)
class Example:
    """One training sequence; any subset of the supervision fields may be set.

    mlm_targets pairs (position, original token id); token_ids is the
    encoder input, already corrupted for the masked-token task.
    """

    token_ids: tuple[int, ...]
    intent_id: int | None = None
    slot_ids: tuple[int, ...] | None = None
    mlm_targets: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "token_ids", tuple(self.token_ids))
        if not self.token_ids:
            raise StructuralError("example has no tokens")
        if self.slot_ids is not None:
            object.__setattr__(self, "slot_ids", tuple(self.slot_ids))
            if len(self.slot_ids) != len(self.token_ids):
                raise StructuralError("slot_ids length does not match token_ids")
        targets = tuple((int(p), int(t)) for p, t in self.mlm_targets)
        object.__setattr__(self, "mlm_targets", targets)
        seen = set()
        for pos, _ in targets:
            if not 0 <= pos < len(self.token_ids):
                raise StructuralError(f"mlm target position {pos} out of range")
            if pos in seen:
                raise StructuralError(f"duplicate mlm target position {pos}")
            seen.add(pos)


@dataclass(frozen=True)
class LossWeights:
    intent: float = 1.0
    slot: float = 1.0
    mlm: float = 1.0


def _ce_rows(logits: np.ndarray, targets: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise softmax cross-entropy and its unscaled logit gradients."""
    shifted = logits - logits.max(axis=1, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=1))
    rows = np.arange(logits.shape[0])
    losses = lse - shifted[rows, targets]
    grads = np.exp(shifted - lse[:, None])
    grads[rows, targets] -= 1.0
    return losses, grads


def joint_loss(
    params: ModelParams, batch: Sequence[Example], weights: LossWeights
) -> tuple[float, dict[str, np.ndarray]]:
    """Weighted multi-task loss and analytic gradients for one batch."""
    loss, grads, _ = _loss_and_grads(params, batch, weights)
    return loss, grads


def _loss_and_grads(params, batch, weights):
    """Returns (loss, gradient dict, per-task mean CE dict).

    Each present task contributes weight * mean cross-entropy, the mean
    taken over that task's prediction units across the whole batch:
    sequences for intents, tokens for slots, masked positions for mlm.
    """
    batch = list(batch)
    if not batch:
        raise StructuralError("empty batch")
    n_intent = sum(1 for ex in batch if ex.intent_id is not None)
    n_slot = sum(len(ex.slot_ids) for ex in batch if ex.slot_ids is not None)
    n_mlm = sum(len(ex.mlm_targets) for ex in batch)
    if n_intent == 0 and n_slot == 0 and n_mlm == 0:
        raise StructuralError("batch carries no task labels")

    grads = {name: np.zeros_like(arr) for name, arr in params.items()}
    sums = {"intent": 0.0, "slot": 0.0, "mlm": 0.0}
    h = params["b_fwd"].shape[0]

    for ex in batch:
        states, sent, (ids, x, fwd, bwd) = _forward(params, ex.token_ids)
        n = len(ids)
        d_states = np.zeros_like(states)
        d_sent = np.zeros(2 * h)

        if ex.intent_id is not None:
            logits = (sent @ params["w_intent"] + params["b_intent"])[None, :]
            losses, dlogits = _ce_rows(logits, np.array([ex.intent_id]))
            sums["intent"] += float(losses[0])
            scaled = dlogits[0] * (weights.intent / n_intent)
            grads["w_intent"] += np.outer(sent, scaled)
            grads["b_intent"] += scaled
            d_sent += params["w_intent"] @ scaled

        if ex.slot_ids is not None:
            logits = states @ params["w_slot"] + params["b_slot"]
            losses, dlogits = _ce_rows(logits, np.asarray(ex.slot_ids))
            sums["slot"] += float(losses.sum())
            scaled = dlogits * (weights.slot / n_slot)
            grads["w_slot"] += states.T @ scaled
            grads["b_slot"] += scaled.sum(axis=0)
            d_states += scaled @ params["w_slot"].T

        if ex.mlm_targets:
            positions = np.array([p for p, _ in ex.mlm_targets])
            originals = np.array([t for _, t in ex.mlm_targets])
            sub = states[positions]
            logits = sub @ params["w_mlm"] + params["b_mlm"]
            losses, dlogits = _ce_rows(logits, originals)
            sums["mlm"] += float(losses.sum())
            scaled = dlogits * (weights.mlm / n_mlm)
            grads["w_mlm"] += sub.T @ scaled
            grads["b_mlm"] += scaled.sum(axis=0)
            d_states[positions] += scaled @ params["w_mlm"].T

        # backprop through both recurrences; sentence vector feeds the
        # endpoints (last forward state, first backward state)
        d_fwd = d_states[:, :h].copy()
        d_bwd = d_states[:, h:].copy()
        d_fwd[n - 1] += d_sent[:h]
        d_bwd[0] += d_sent[h:]
        d_x = np.zeros_like(x)

        carry = np.zeros(h)
        for t in range(n - 1, -1, -1):
            d_pre = (d_fwd[t] + carry) * (1.0 - fwd[t] ** 2)
            grads["b_fwd"] += d_pre
            grads["w_fwd_in"] += np.outer(x[t], d_pre)
            if t > 0:
                grads["w_fwd_state"] += np.outer(fwd[t - 1], d_pre)
            d_x[t] += params["w_fwd_in"] @ d_pre
            carry = params["w_fwd_state"] @ d_pre

        carry = np.zeros(h)
        for t in range(n):
            d_pre = (d_bwd[t] + carry) * (1.0 - bwd[t] ** 2)
            grads["b_bwd"] += d_pre
            grads["w_bwd_in"] += np.outer(x[t], d_pre)
            if t < n - 1:
                grads["w_bwd_state"] += np.outer(bwd[t + 1], d_pre)
            d_x[t] += params["w_bwd_in"] @ d_pre
            carry = params["w_bwd_state"] @ d_pre

        np.add.at(grads["emb"], ids, d_x)

    parts = {
        "intent": sums["intent"] / n_intent if n_intent else None,
        "slot": sums["slot"] / n_slot if n_slot else None,
        "mlm": sums["mlm"] / n_mlm if n_mlm else None,
    }
    loss = 0.0
    for task, weight in (("intent", weights.intent), ("slot", weights.slot), ("mlm", weights.mlm)):
        if parts[task] is not None:
            loss += weight * parts[task]
    return float(loss), grads, parts


def mask_tokens(token_ids, rate: float, seed: int, vocab_size: int):
    """BERT-style corruption for the masked-token task.

    Each position is selected independently with probability ``rate``;
    a selected position becomes a target and its input token is replaced
    by <mask> with probability 0.8, by a random non-reserved token with
    probability 0.1, and kept unchanged otherwise. Returns (corrupted
    ids, targets) with targets as (position, original id) pairs.
    """
    if not 0 <= rate <= 1:
        raise StructuralError("mask rate must be in [0, 1]")
    if vocab_size < len(RESERVED_TOKENS):
        raise StructuralError("vocab_size smaller than the reserved inventory")
    rng = random.Random(seed)
    corrupted = list(token_ids)
    targets = []
    for pos, tok in enumerate(corrupted):
        if rng.random() < rate:
            targets.append((pos, tok))
            branch = rng.random()
            if branch < 0.8:
                corrupted[pos] = MASK_ID
            elif branch < 0.9 and vocab_size > len(RESERVED_TOKENS):
                corrupted[pos] = rng.randrange(len(RESERVED_TOKENS), vocab_size)
    return corrupted, tuple(targets)


@dataclass(frozen=True)
class EpochStats:
    """Per-epoch loss log entry; task fields are None when the task drew no batch."""

    epoch: int
    total: float
    intent: float | None
    slot: float | None
    mlm: float | None


@dataclass
class TaggerModel:
    config: TrainConfig
    vocab: Vocab
    params: ModelParams


def train(
    data: Dataset, config: TrainConfig, mlm_sentences=None
) -> tuple[TaggerModel, list[EpochStats]]:
    """Train the joint model with proportionally sampled task batches.

    ``data`` supplies the intent/slot task; ``mlm_sentences`` (token
    lists) optionally add the masked-token task, capped at
    config.max_mlm_sentences. All randomness (init, schedule, instance
    order, masking) derives from config.seed, so equal inputs give
    bit-identical models and loss logs. Raises DivergenceError as soon
    as a non-finite loss appears.
    """
    if len(data) == 0:
        raise StructuralError("training data is empty")
    sentences = [tuple(s) for s in (mlm_sentences or []) if len(s) > 0]
    sentences = sentences[: config.max_mlm_sentences]

    vocab = build_vocab([data], min_count=config.min_count, extra_sentences=sentences)
    master = random.Random(config.seed)
    params = init_params(config, vocab, rng=np.random.default_rng(master.randrange(2 ** 32)))
    weights = LossWeights(config.w_intent, config.w_slot, config.w_mlm)

    slu_examples = [
        Example(
            token_ids=tuple(vocab.encode_tokens(utt.tokens)),
            intent_id=vocab.intent_id(utt.intent),
            slot_ids=tuple(vocab.tag_id(t) for t in utt.slot_tags),
        )
        for utt in data
    ]
    mlm_ids = [tuple(vocab.encode_tokens(s)) for s in sentences]

    tasks = [TaskSpec(SLU_TASK, len(slu_examples), config.w_slot)]
    cyclers = {SLU_TASK: InstanceCycler(len(slu_examples), master.randrange(2 ** 32))}
    if mlm_ids:
        tasks.append(TaskSpec(MLM_TASK, len(mlm_ids), config.w_mlm))
        cyclers[MLM_TASK] = InstanceCycler(len(mlm_ids), master.randrange(2 ** 32))

    total_instances = len(slu_examples) + len(mlm_ids)
    batches = config.batches_per_epoch or math.ceil(total_instances / config.batch_size)

    log: list[EpochStats] = []
    for epoch in range(config.epochs):
        schedule = schedule_epoch(tasks, batches, config.alpha, master.randrange(2 ** 32))
        totals: list[float] = []
        task_sums = {"intent": 0.0, "slot": 0.0, "mlm": 0.0}
        task_batches = {"intent": 0, "slot": 0, "mlm": 0}
        for batch_index, (task, _) in enumerate(schedule.draws):
            if task == SLU_TASK:
                picks = cyclers[SLU_TASK].next_batch(min(config.batch_size, len(slu_examples)))
                batch = [slu_examples[i] for i in picks]
            else:
                picks = cyclers[MLM_TASK].next_batch(min(config.batch_size, len(mlm_ids)))
                batch = []
                for i in picks:
                    corrupted, targets = mask_tokens(
                        mlm_ids[i], config.mask_rate, master.randrange(2 ** 32), len(vocab.tokens)
                    )
                    if targets:
                        batch.append(Example(token_ids=tuple(corrupted), mlm_targets=targets))
                if not batch:
                    continue  # masking selected nothing in this draw
            loss, grads, parts = _loss_and_grads(params, batch, weights)
            if not math.isfinite(loss):
                raise DivergenceError(epoch, batch_index)
            for name, grad in grads.items():
                params[name] -= config.learning_rate * grad
            totals.append(loss)
            for part, value in parts.items():
                if value is not None:
                    task_sums[part] += value
                    task_batches[part] += 1
        log.append(
            EpochStats(
                epoch=epoch,
                total=sum(totals) / len(totals) if totals else 0.0,
                intent=task_sums["intent"] / task_batches["intent"] if task_batches["intent"] else None,
                slot=task_sums["slot"] / task_batches["slot"] if task_batches["slot"] else None,
                mlm=task_sums["mlm"] / task_batches["mlm"] if task_batches["mlm"] else None,
            )
        )
    return TaggerModel(config, vocab, params), log


def predict(model: TaggerModel, tokens) -> tuple[str, list[str]]:
    """Greedy decode: argmax intent and per-token tags, repaired into valid BIO."""
    toks = list(tokens)
    if not toks:
        raise StructuralError("cannot predict on an empty token list")
    ids = model.vocab.encode_tokens(toks)
    states, sent = encode(model.params, ids)
    intent_logits = sent @ model.params["w_intent"] + model.params["b_intent"]
    intent = model.vocab.intents[int(np.argmax(intent_logits))]
    slot_logits = states @ model.params["w_slot"] + model.params["b_slot"]
    raw = [model.vocab.slot_tags[int(k)] for k in np.argmax(slot_logits, axis=1)]
    return intent, bio.repair(raw)


def predict_dataset(model: TaggerModel, data: Dataset) -> Dataset:
    """Re-tag every utterance with predicted intent and slots."""
    out = []
    for utt in data:
        intent, tags = predict(model, utt.tokens)
        out.append(Utterance(utt.id, utt.text, utt.tokens, tuple(tags), intent))
    return Dataset(f"{data.name}-predicted", tuple(out))


def save_model(model: TaggerModel, path) -> None:
    """Write a versioned JSON checkpoint: config, vocab, and parameter tensors."""
    payload = {
        "format_version": CHECKPOINT_VERSION,
        "config": asdict(model.config),
        "vocab": {
            "tokens": list(model.vocab.tokens),
            "slot_tags": list(model.vocab.slot_tags),
            "intents": list(model.vocab.intents),
        },
        "params": {
            name: {"shape": list(arr.shape), "data": arr.ravel().tolist()}
            for name, arr in model.params.items()
        },
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, sort_keys=True)
        handle.write("\n")


def load_model(path) -> TaggerModel:
    """Load a checkpoint, validating version and tensor shapes against the config."""
    with open(path, "r", encoding="utf-8") as handle:
        payload = json.load(handle)
    version = payload.get("format_version")
    if version != CHECKPOINT_VERSION:
        raise StructuralError(f"unsupported checkpoint version {version!r}")
    try:
        config = TrainConfig(**payload["config"])
        vocab = Vocab(
            tokens=tuple(payload["vocab"]["tokens"]),
            slot_tags=tuple(payload["vocab"]["slot_tags"]),
            intents=tuple(payload["vocab"]["intents"]),
        )
        raw = payload["params"]
    except KeyError as err:
        raise StructuralError(f"checkpoint missing field {err}") from None
    except TypeError as err:
        raise StructuralError(f"bad checkpoint config: {err}") from None
    params = {}
    for name, entry in raw.items():
        arr = np.array(entry["data"], dtype=np.float64)
        expected = int(np.prod(entry["shape"])) if entry["shape"] else 1
        if arr.size != expected:
            raise StructuralError(f"parameter {name}: data does not match declared shape")
        params[name] = arr.reshape(entry["shape"])
    validate_params(params, config, vocab)
    return TaggerModel(config, vocab, params)

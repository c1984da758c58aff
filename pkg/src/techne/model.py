"""The four classifier architectures and their from-scratch training loop.

Every architecture is a one-hidden-layer tanh encoder feeding one or two
softmax heads:

    a1         technique (10-way) over INPUT1 features
    a2         two 10-way technique heads sharing one encoder: head 0 reads
               INPUT1 features, head 1 reads INPUT2 features of the same
               records; the training loss is alpha*L1 + beta*L2
    a3         two separately trained encoders: stage 1 triages quality
               (3-way BAD/GOOD_LIT/GOOD_NONLIT over INPUT2), stage 2 assigns
               one of the nine non-literal techniques to BAD records
    a4         single 10-way head over INPUT2: GOOD plus the nine
               non-literal techniques

Training is plain mini-batch Adam with early stopping on dev accuracy;
fixed (seed, data, config) reproduces a bit-identical model.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import NON_LITERAL, Technique

TECHNIQUE_LABELS = tuple(t.value for t in Technique)
NON_LITERAL_TECHNIQUES = tuple(t.value for t in NON_LITERAL)
TRIAGE_LABELS = ("BAD", "GOOD_LIT", "GOOD_NONLIT")
GOOD_LABEL = "GOOD"
A4_LABELS = (GOOD_LABEL,) + NON_LITERAL_TECHNIQUES

#: Softmax arities per architecture (a3 lists stage 1 then stage 2).
ARCHITECTURE_HEAD_ARITIES = {
    "a1": (10,),
    "a2": (10, 10),
    "a3": (3, 9),
    "a4": (10,),
}

CHECKPOINT_FORMAT = "techne-checkpoint"
CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class ArchitectureSpec:
    kind: str
    head_arities: tuple
    label_maps: tuple
    loss_weights: "tuple[float, float] | None" = None

    def __post_init__(self):
        if len(self.head_arities) != len(self.label_maps):
            raise ValueError("one label map per head required")
        for arity, labels in zip(self.head_arities, self.label_maps):
            if arity != len(labels):
                raise ValueError(f"head arity {arity} != {len(labels)} labels")
        if self.loss_weights is not None:
            alpha, beta = self.loss_weights
            # zero is allowed so a weight-(1, 0) run can be compared against
            # the single-task architecture; negatives never are
            if alpha < 0 or beta < 0:
                raise ValueError("loss weights must be non-negative")
            if abs(alpha + beta - 1.0) > 1e-9:
                raise ValueError(f"loss weights must sum to 1, got {alpha + beta!r}")

    @property
    def head_weights(self) -> tuple:
        return self.loss_weights if self.loss_weights is not None else (1.0,)


def arch_a1() -> ArchitectureSpec:
    return ArchitectureSpec("a1", (10,), (TECHNIQUE_LABELS,))


def arch_a2(alpha: float = 0.8, beta: float = 0.2) -> ArchitectureSpec:
    return ArchitectureSpec(
        "a2", (10, 10), (TECHNIQUE_LABELS, TECHNIQUE_LABELS), (alpha, beta)
    )


def arch_a3_stage1() -> ArchitectureSpec:
    return ArchitectureSpec("a3_stage1", (3,), (TRIAGE_LABELS,))


def arch_a3_stage2() -> ArchitectureSpec:
    return ArchitectureSpec("a3_stage2", (9,), (NON_LITERAL_TECHNIQUES,))


def arch_a4() -> ArchitectureSpec:
    return ArchitectureSpec("a4", (10,), (A4_LABELS,))


_SPEC_FACTORIES = {
    "a1": arch_a1,
    "a2": arch_a2,
    "a3_stage1": arch_a3_stage1,
    "a3_stage2": arch_a3_stage2,
    "a4": arch_a4,
}


@dataclass
class EncoderParams:
    w: np.ndarray  # (D, H)
    b: np.ndarray  # (H,)


@dataclass
class HeadParams:
    w: np.ndarray  # (H, n)
    b: np.ndarray  # (n,)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    batch_size: int = 64
    max_epochs: int = 50
    patience: int = 5
    early_stop_metric: str = "dev_accuracy"
    seed: int = 0
    l2: float = 0.0
    hidden: int = 32

    def __post_init__(self):
        if self.early_stop_metric != "dev_accuracy":
            raise ValueError("only dev_accuracy early stopping is supported")
        if self.l2 < 0:
            raise ValueError("l2 must be non-negative")


@dataclass
class TaskData:
    """Feature matrices and integer labels for one architecture.

    ``x``/``y`` feed head 0. For a2, ``x_aux``/``y_aux`` feed head 1 (the
    INPUT2 view of the same records; ``y_aux`` defaults to ``y``).
    """

    x: np.ndarray
    y: np.ndarray
    x_aux: "np.ndarray | None" = None
    y_aux: "np.ndarray | None" = None

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=np.int64)
        if self.x_aux is not None and self.y_aux is None:
            self.y_aux = self.y

    def __len__(self):
        return len(self.y)


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    dev_accuracy: float


@dataclass
class TrainedModel:
    spec: ArchitectureSpec
    encoder: EncoderParams
    heads: list
    config: TrainConfig
    training_log: list = field(default_factory=list)
    best_epoch: int = 0
    feature_fingerprint: str = ""

    def predict_proba(self, x: np.ndarray, head: int = 0) -> np.ndarray:
        return forward(self.encoder, self.heads[head], x)

    def predict(self, x: np.ndarray, head: int = 0) -> list:
        probs = np.atleast_2d(self.predict_proba(x, head))
        labels = self.spec.label_maps[head]
        return [labels[i] for i in np.argmax(probs, axis=1)]


def labels_to_indices(labels, label_map) -> np.ndarray:
    index = {name: i for i, name in enumerate(label_map)}
    try:
        return np.array([index[l] for l in labels], dtype=np.int64)
    except KeyError as exc:
        raise ValueError(f"label {exc.args[0]!r} outside the head's label map") from None


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - np.max(z, axis=-1, keepdims=True)
    e = np.exp(z)
    return e / np.sum(e, axis=-1, keepdims=True)


def forward(encoder: EncoderParams, head: HeadParams, x: np.ndarray) -> np.ndarray:
    """softmax(W_o . tanh(W_h . x + b_h) + b_o); rows sum to one."""
    x = np.asarray(x, dtype=float)
    squeeze = x.ndim == 1
    x2 = np.atleast_2d(x)
    if x2.shape[1] != encoder.w.shape[0]:
        raise ValueError(
            f"input dim {x2.shape[1]} does not match encoder dim {encoder.w.shape[0]}"
        )
    hidden = np.tanh(x2 @ encoder.w + encoder.b)
    probs = softmax(hidden @ head.w + head.b)
    return probs[0] if squeeze else probs


def multitask_loss(l1: float, l2: float, alpha: float, beta: float) -> float:
    """Weighted two-task loss: alpha * l1 + beta * l2."""
    if l1 < 0 or l2 < 0:
        raise ValueError("losses must be non-negative")
    return alpha * l1 + beta * l2


def loss_and_grads(spec: ArchitectureSpec, encoder, heads, head_batches, l2: float = 0.0):
    """Total training loss and analytic gradients for one mini-batch.

    ``head_batches`` holds one (X, y) pair per head; head losses are
    mean cross-entropies weighted by the spec's head weights, plus an L2
    penalty on every weight matrix (biases excluded). Returns
    ``(loss, encoder_grads, head_grads)``.
    """
    weights = spec.head_weights
    g_enc_w = np.zeros_like(encoder.w)
    g_enc_b = np.zeros_like(encoder.b)
    g_heads = []
    total_ce = 0.0
    for (x, y), head, weight in zip(head_batches, heads, weights):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        y = np.asarray(y, dtype=np.int64)
        n = x.shape[0]
        z1 = x @ encoder.w + encoder.b
        a = np.tanh(z1)
        z2 = a @ head.w + head.b
        p = softmax(z2)
        ce = -float(np.mean(np.log(p[np.arange(n), y] + 1e-300)))
        total_ce = total_ce + weight * ce

        dz2 = p.copy()
        dz2[np.arange(n), y] -= 1.0
        dz2 /= n
        g_heads.append(
            (weight * (a.T @ dz2) + l2 * head.w, weight * dz2.sum(axis=0))
        )
        da = dz2 @ head.w.T
        dz1 = da * (1.0 - a * a)
        g_enc_w += weight * (x.T @ dz1)
        g_enc_b += weight * dz1.sum(axis=0)
    penalty = float(sum(np.sum(h.w * h.w) for h in heads) + np.sum(encoder.w * encoder.w))
    loss = total_ce + 0.5 * l2 * penalty
    g_enc_w += l2 * encoder.w
    return loss, (g_enc_w, g_enc_b), g_heads


def _init_params(spec: ArchitectureSpec, dim: int, hidden: int, rng):
    """Encoder first, then heads in order, so shared prefixes of the random
    stream coincide across architectures with a common seed."""
    encoder = EncoderParams(
        w=rng.standard_normal((dim, hidden)) / math.sqrt(dim),
        b=np.zeros(hidden),
    )
    heads = [
        HeadParams(
            w=rng.standard_normal((hidden, arity)) / math.sqrt(hidden),
            b=np.zeros(arity),
        )
        for arity in spec.head_arities
    ]
    return encoder, heads


class _Adam:
    def __init__(self, shapes, config: TrainConfig):
        self.config = config
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]
        self.t = 0

    def step(self, params, grads):
        c = self.config
        self.t += 1
        correction1 = 1.0 - c.adam_beta1 ** self.t
        correction2 = 1.0 - c.adam_beta2 ** self.t
        for i, (p, g) in enumerate(zip(params, grads)):
            self.m[i] = c.adam_beta1 * self.m[i] + (1.0 - c.adam_beta1) * g
            self.v[i] = c.adam_beta2 * self.v[i] + (1.0 - c.adam_beta2) * (g * g)
            m_hat = self.m[i] / correction1
            v_hat = self.v[i] / correction2
            p -= c.learning_rate * m_hat / (np.sqrt(v_hat) + c.adam_eps)


def _head_views(spec: ArchitectureSpec, data: TaskData, idx=None):
    """Per-head (X, y) views of the dataset, optionally batch-sliced."""
    def sl(arr):
        return arr if idx is None else arr[idx]

    views = [(sl(data.x), sl(data.y))]
    if len(spec.head_arities) == 2:
        if data.x_aux is None:
            raise ValueError(f"{spec.kind} requires x_aux features for head 1")
        views.append((sl(data.x_aux), sl(data.y_aux)))
    return views


def _accuracy(encoder, heads, data: TaskData) -> float:
    probs = forward(encoder, heads[0], data.x)
    return float(np.mean(np.argmax(probs, axis=1) == data.y))


def train(
    spec: ArchitectureSpec,
    train_data: TaskData,
    dev_data: TaskData,
    config: TrainConfig = TrainConfig(),
    dev_eval=None,
    feature_fingerprint: str = "",
) -> TrainedModel:
    """Mini-batch Adam with early stopping at peak dev accuracy.

    Stops after ``patience`` epochs without improvement (or at
    ``max_epochs``) and returns the parameters of the best epoch.
    ``dev_eval(epoch, encoder, heads)`` may replace the dev-accuracy
    computation (used by tests to script the early-stop trajectory).
    """
    if len(train_data) == 0 or len(dev_data) == 0:
        raise ValueError("train and dev datasets must be non-empty")
    for head, labels in enumerate(spec.label_maps):
        ys = train_data.y if head == 0 else train_data.y_aux
        if ys is not None and len(ys) and (ys.min() < 0 or ys.max() >= len(labels)):
            raise ValueError(f"labels for head {head} outside its map")

    ss = np.random.SeedSequence(config.seed)
    init_ss, shuffle_ss = ss.spawn(2)
    rng_init = np.random.default_rng(init_ss)
    rng_shuffle = np.random.default_rng(shuffle_ss)

    dim = train_data.x.shape[1]
    encoder, heads = _init_params(spec, dim, config.hidden, rng_init)
    params = [encoder.w, encoder.b] + [a for h in heads for a in (h.w, h.b)]
    adam = _Adam([p.shape for p in params], config)

    n = len(train_data)
    log = []
    best = None
    best_epoch = 0
    best_acc = -1.0
    since_best = 0
    for epoch in range(1, config.max_epochs + 1):
        perm = rng_shuffle.permutation(n)
        total_loss = 0.0
        for start in range(0, n, config.batch_size):
            idx = perm[start:start + config.batch_size]
            batches = _head_views(spec, train_data, idx)
            loss, (gew, geb), ghs = loss_and_grads(spec, encoder, heads, batches, config.l2)
            grads = [gew, geb] + [a for g in ghs for a in g]
            adam.step(params, grads)
            total_loss += loss * len(idx)
        train_loss = total_loss / n
        if dev_eval is not None:
            acc = float(dev_eval(epoch, encoder, heads))
        else:
            acc = _accuracy(encoder, heads, dev_data)
        log.append(EpochStats(epoch=epoch, train_loss=train_loss, dev_accuracy=acc))
        if acc > best_acc:
            best_acc = acc
            best_epoch = epoch
            best = (copy.deepcopy(encoder), copy.deepcopy(heads))
            since_best = 0
        else:
            since_best += 1
            if since_best >= config.patience:
                break

    encoder, heads = best
    return TrainedModel(
        spec=spec,
        encoder=encoder,
        heads=heads,
        config=config,
        training_log=log,
        best_epoch=best_epoch,
        feature_fingerprint=feature_fingerprint,
    )


def predict_arch3(stage1: TrainedModel, stage2: TrainedModel, x: np.ndarray) -> list:
    """Route through the two-stage pipeline.

    Stage 1 verdicts GOOD_LIT/GOOD_NONLIT are final; BAD rows (and only
    those) are passed to stage 2 for a corrective technique.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    verdicts = stage1.predict(x)
    out = list(verdicts)
    bad_rows = [i for i, v in enumerate(verdicts) if v == "BAD"]
    if bad_rows:
        techniques = stage2.predict(x[bad_rows])
        for i, t in zip(bad_rows, techniques):
            out[i] = t
    return out


def gradient_check(
    spec: ArchitectureSpec,
    encoder: EncoderParams,
    heads,
    head_batches,
    epsilon: float = 1e-5,
    l2: float = 0.0,
    max_entries: int = 100,
    seed: int = 0,
) -> float:
    """Max relative error between analytic and central-difference gradients.

    Samples up to ``max_entries`` coordinates per parameter tensor. The
    relative error uses max(1, |analytic|, |numeric|) as denominator, so
    near-zero gradients are compared absolutely.
    """
    if not 1e-7 <= epsilon <= 1e-3:
        raise ValueError("epsilon must lie in [1e-7, 1e-3]")
    _, (gew, geb), ghs = loss_and_grads(spec, encoder, heads, head_batches, l2)
    tensors = [(encoder.w, gew), (encoder.b, geb)]
    for head, (gw, gb) in zip(heads, ghs):
        tensors.append((head.w, gw))
        tensors.append((head.b, gb))

    rng = np.random.default_rng(seed)
    worst = 0.0
    for param, grad in tensors:
        flat_p = param.reshape(-1)
        flat_g = grad.reshape(-1)
        count = flat_p.size
        if count > max_entries:
            positions = rng.choice(count, size=max_entries, replace=False)
        else:
            positions = np.arange(count)
        for pos in positions:
            original = flat_p[pos]
            flat_p[pos] = original + epsilon
            up, _, _ = loss_and_grads(spec, encoder, heads, head_batches, l2)
            flat_p[pos] = original - epsilon
            down, _, _ = loss_and_grads(spec, encoder, heads, head_batches, l2)
            flat_p[pos] = original
            numeric = (up - down) / (2.0 * epsilon)
            analytic = flat_g[pos]
            rel = abs(analytic - numeric) / max(1.0, abs(analytic), abs(numeric))
            worst = max(worst, rel)
    return worst


# ---------------------------------------------------------------------------
# checkpoints


def save_checkpoint(model: TrainedModel, path) -> None:
    """Write a self-describing JSON checkpoint (deterministic bytes)."""
    obj = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "kind": model.spec.kind,
        "head_arities": list(model.spec.head_arities),
        "label_maps": [list(m) for m in model.spec.label_maps],
        "loss_weights": list(model.spec.loss_weights) if model.spec.loss_weights else None,
        "config": {
            "learning_rate": model.config.learning_rate,
            "adam_beta1": model.config.adam_beta1,
            "adam_beta2": model.config.adam_beta2,
            "adam_eps": model.config.adam_eps,
            "batch_size": model.config.batch_size,
            "max_epochs": model.config.max_epochs,
            "patience": model.config.patience,
            "early_stop_metric": model.config.early_stop_metric,
            "seed": model.config.seed,
            "l2": model.config.l2,
            "hidden": model.config.hidden,
        },
        "feature_fingerprint": model.feature_fingerprint,
        "best_epoch": model.best_epoch,
        "training_log": [
            {"epoch": s.epoch, "train_loss": s.train_loss, "dev_accuracy": s.dev_accuracy}
            for s in model.training_log
        ],
        "encoder": {"w": model.encoder.w.tolist(), "b": model.encoder.b.tolist()},
        "heads": [{"w": h.w.tolist(), "b": h.b.tolist()} for h in model.heads],
    }
    Path(path).write_text(json.dumps(obj, ensure_ascii=False), encoding="utf-8")


def load_checkpoint(path) -> TrainedModel:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    if obj.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"{path} is not a {CHECKPOINT_FORMAT} file")
    if "version" not in obj:
        raise ValueError(f"{path} lacks a version field")
    if obj["version"] != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {obj['version']!r}")
    spec = ArchitectureSpec(
        kind=obj["kind"],
        head_arities=tuple(obj["head_arities"]),
        label_maps=tuple(tuple(m) for m in obj["label_maps"]),
        loss_weights=tuple(obj["loss_weights"]) if obj["loss_weights"] else None,
    )
    config = TrainConfig(**obj["config"])
    encoder = EncoderParams(
        w=np.array(obj["encoder"]["w"], dtype=float),
        b=np.array(obj["encoder"]["b"], dtype=float),
    )
    heads = [
        HeadParams(w=np.array(h["w"], dtype=float), b=np.array(h["b"], dtype=float))
        for h in obj["heads"]
    ]
    log = [EpochStats(**s) for s in obj["training_log"]]
    return TrainedModel(
        spec=spec,
        encoder=encoder,
        heads=heads,
        config=config,
        training_log=log,
        best_epoch=obj["best_epoch"],
        feature_fingerprint=obj["feature_fingerprint"],
    )


def make_spec(kind: str, alpha: float = 0.8, beta: float = 0.2) -> ArchitectureSpec:
    """Spec factory by architecture name (a2 takes the loss weights)."""
    if kind == "a2":
        return arch_a2(alpha, beta)
    try:
        return _SPEC_FACTORIES[kind]()
    except KeyError:
        raise ValueError(f"unknown architecture {kind!r}") from None


__all__ = [
    "TECHNIQUE_LABELS",
    "NON_LITERAL_TECHNIQUES",
    "TRIAGE_LABELS",
    "GOOD_LABEL",
    "A4_LABELS",
    "ARCHITECTURE_HEAD_ARITIES",
    "ArchitectureSpec",
    "arch_a1",
    "arch_a2",
    "arch_a3_stage1",
    "arch_a3_stage2",
    "arch_a4",
    "make_spec",
    "EncoderParams",
    "HeadParams",
    "TrainConfig",
    "TaskData",
    "EpochStats",
    "TrainedModel",
    "labels_to_indices",
    "softmax",
    "forward",
    "multitask_loss",
    "loss_and_grads",
    "train",
    "predict_arch3",
    "gradient_check",
    "save_checkpoint",
    "load_checkpoint",
]

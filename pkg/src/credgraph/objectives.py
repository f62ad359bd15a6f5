"""Joint training objectives and the training loop.

Three losses share one computation graph per epoch: an unsupervised
proximity loss over random-walk positives and sampled negatives on the two
non-stance subgraphs, a self-supervised stance loss over observed
user-article engagements, and a supervised cross-entropy loss on labeled
articles. Their unweighted sum is backpropagated once per epoch
(batches only structure the accumulation), and parameters are updated with
adaptive moment estimation.

Label convention throughout: fake = 0, real = 1; predicted probabilities
are P(real).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np
import torch
from torch import nn

from .encoder import (DTYPE, GraphIndex, NeighborSampleConfig, SageEncoder,
                      SubgraphView, WalkConfig, batched_negatives,
                      batched_walk_positives, derive_rng, encode_nodes,
                      sample_tree)
from .features import DEFAULT_TIME_SCALE, META_DIM, FeatureTable, engagement_meta
from .graph import ARTICLE, PUBLICATION, STANCE, NodeId, SocialGraph
from .temporal import TemporalEncoder

SIGMOID_CLAMP = 1e-7  # probability floor for every log-loss


@dataclass
class TrainConfig:
    """Dimensions, sampling sizes, schedule, and ablation switches."""

    embed_dim: int = 64            # d: structural embedding size
    temporal_hidden: int = 32      # e: LSTM hidden size, 2e must equal d
    stance_dim: int = 16           # d_c: per-stance projection space
    fanouts: tuple[int, ...] = (10, 5)
    learning_rate: float = 1e-3
    batch_size: int = 128          # T: accumulation chunk for article batches
    epochs: int = 300
    patience: int = 10
    negative_weight: float = 10.0  # Q in the proximity loss
    walk_length: int = 3
    walks_per_node: int = 5
    negatives_per_node: int = 10
    max_seq_len: int = 100
    time_scale: float = DEFAULT_TIME_SCALE
    literal_printed_proximity: bool = False
    disable_time: bool = False
    disable_stance_loss: bool = False
    disable_proximity_loss: bool = False
    train_fraction: float = 0.8
    seed: int = 0

    def validate(self) -> None:
        if 2 * self.temporal_hidden != self.embed_dim:
            raise ValueError(
                f"2*temporal_hidden ({2 * self.temporal_hidden}) must equal "
                f"embed_dim ({self.embed_dim})")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.negative_weight < 0:
            raise ValueError("negative_weight must be >= 0")
        if not (0 < self.train_fraction <= 1):
            raise ValueError("train_fraction must be in (0, 1]")
        if self.epochs < 1 or self.patience < 0:
            raise ValueError("epochs must be >= 1 and patience >= 0")
        if len(self.fanouts) < 1 or min(self.fanouts) < 1:
            raise ValueError("fanouts must be a non-empty positive sequence")
        if min(self.embed_dim, self.temporal_hidden, self.stance_dim) < 1:
            raise ValueError("dimensions must be positive")
        if min(self.walk_length, self.walks_per_node, self.negatives_per_node) < 1:
            raise ValueError("walk parameters must be positive")
        if self.max_seq_len < 1:
            raise ValueError("max_seq_len must be >= 1")

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, blob: str) -> "TrainConfig":
        data = json.loads(blob)
        data["fanouts"] = tuple(data["fanouts"])
        return cls(**data)

    def neighbor_config(self) -> NeighborSampleConfig:
        return NeighborSampleConfig(fanouts=tuple(self.fanouts), rng_seed=self.seed)

    def walk_config(self) -> WalkConfig:
        return WalkConfig(self.walk_length, self.walks_per_node,
                          self.negatives_per_node)


# ---------------------------------------------------------------------------
# Losses
# ---------------------------------------------------------------------------

def _clamped_log_sigmoid(dots: torch.Tensor) -> torch.Tensor:
    return torch.log(torch.sigmoid(dots).clamp(SIGMOID_CLAMP, 1 - SIGMOID_CLAMP))


def proximity_loss_pairs(z: torch.Tensor,
                         pos_anchor: torch.Tensor, pos_node: torch.Tensor,
                         neg_anchor: torch.Tensor, neg_node: torch.Tensor,
                         q: float, num_anchors: int,
                         literal_printed_form: bool = False) -> torch.Tensor:
    """Vectorized proximity loss over (anchor, positive) and
    (anchor, negative) index pairs, normalized by the anchor count."""
    if num_anchors == 0:
        return torch.zeros((), dtype=z.dtype)
    total = torch.zeros((), dtype=z.dtype)
    if len(pos_anchor):
        dots = (z[pos_anchor] * z[pos_node]).sum(dim=1)
        total = total - _clamped_log_sigmoid(dots).sum()
    if len(neg_anchor):
        dots = (z[neg_anchor] * z[neg_node]).sum(dim=1)
        sign = 1.0 if literal_printed_form else -1.0
        total = total + sign * q * _clamped_log_sigmoid(-dots).sum()
    return total / num_anchors


def proximity_loss(z, anchors: Sequence[tuple[int, Sequence[int], Sequence[int]]],
                   q: float, literal_printed_form: bool = False) -> torch.Tensor:
    """Proximity loss over explicit anchors: each entry is
    (anchor index, positive indices, negative indices).

    Both terms penalize by default (negatives are pushed apart); the
    literal printed form flips the negative term's sign instead.
    """
    z = torch.as_tensor(z, dtype=DTYPE)
    pos_a, pos_n, neg_a, neg_n = [], [], [], []
    for r, positives, negatives in anchors:
        for p in positives:
            pos_a.append(r)
            pos_n.append(p)
        for m in negatives:
            neg_a.append(r)
            neg_n.append(m)
    as_idx = lambda xs: torch.as_tensor(xs, dtype=torch.long)
    return proximity_loss_pairs(z, as_idx(pos_a), as_idx(pos_n),
                                as_idx(neg_a), as_idx(neg_n),
                                q, len(anchors), literal_printed_form)


def stance_logits(z_user: torch.Tensor, z_article: torch.Tensor,
                  proj_user: torch.Tensor, proj_article: torch.Tensor) -> torch.Tensor:
    """Per-stance similarity scores: row p, class c is
    (proj_user[c] @ z_user[p]) . (proj_article[c] @ z_article[p])."""
    pu = torch.einsum("ckd,pd->pck", proj_user, z_user)
    pa = torch.einsum("ckd,pd->pck", proj_article, z_article)
    return (pu * pa).sum(dim=2)


def stance_loss(z_user, z_article, proj_user, proj_article,
                labels) -> torch.Tensor:
    """Mean cross-entropy of the observed stance under a softmax over the
    stance classes, per engaged (user, article) pair."""
    z_user = torch.as_tensor(z_user, dtype=DTYPE)
    z_article = torch.as_tensor(z_article, dtype=DTYPE)
    labels = torch.as_tensor(np.asarray(labels), dtype=torch.long)
    if len(labels) == 0:
        return torch.zeros((), dtype=DTYPE)
    logits = stance_logits(z_user, z_article,
                           torch.as_tensor(proj_user, dtype=DTYPE),
                           torch.as_tensor(proj_article, dtype=DTYPE))
    logp = torch.log_softmax(logits, dim=1)
    return -logp[torch.arange(len(labels)), labels].mean()


def predict_article(z_article, z_source, weight, bias) -> torch.Tensor:
    """P(real) for one article: sigmoid of the linear head over the
    concatenated article and source representations."""
    z_article = torch.as_tensor(z_article, dtype=DTYPE)
    z_source = torch.as_tensor(z_source, dtype=DTYPE)
    v = torch.cat([z_article, z_source], dim=-1)
    logit = v @ torch.as_tensor(weight, dtype=DTYPE).reshape(-1) + bias
    return torch.sigmoid(logit)


def fake_news_loss(probs, labels, batch_size: Optional[int] = None) -> torch.Tensor:
    """Negated binary cross-entropy, averaged over the batch; fake
    articles carry label 0."""
    probs = torch.as_tensor(probs, dtype=DTYPE)
    y = torch.as_tensor(np.asarray(labels), dtype=DTYPE)
    if probs.numel() == 0:
        raise ValueError("empty prediction batch")
    t = batch_size if batch_size is not None else probs.numel()
    p = probs.clamp(SIGMOID_CLAMP, 1 - SIGMOID_CLAMP)
    return -(y * torch.log(p) + (1 - y) * torch.log(1 - p)).sum() / t


def total_loss(l_prox, l_stance, l_news, disable_stance_loss: bool = False,
               disable_proximity_loss: bool = False) -> torch.Tensor:
    """Unweighted sum of the three components; ablated terms contribute 0."""
    terms = []
    for value, disabled in ((l_prox, disable_proximity_loss),
                            (l_stance, disable_stance_loss),
                            (l_news, False)):
        t = torch.as_tensor(value, dtype=DTYPE)
        if not torch.isfinite(t):
            raise ValueError(f"non-finite loss component {t}")
        terms.append(torch.zeros((), dtype=DTYPE) if disabled else t)
    return terms[0] + terms[1] + terms[2]


def gradients(loss: torch.Tensor, model: nn.Module) -> dict[str, torch.Tensor]:
    """Exact reverse-mode gradients of a scalar loss for every named
    parameter; parameters with no path to the loss get zeros."""
    names, params = zip(*model.named_parameters())
    grads = torch.autograd.grad(loss, params, allow_unused=True, retain_graph=True)
    return {
        name: (g if g is not None else torch.zeros_like(p))
        for name, p, g in zip(names, params, grads)
    }


# ---------------------------------------------------------------------------
# Model
# ---------------------------------------------------------------------------

class CredibilityModel(nn.Module):
    """Structural encoder, temporal aggregator, stance projections, and the
    linear credibility head, assembled over one input feature space."""

    def __init__(self, input_dim: int, cfg: TrainConfig,
                 generator: Optional[torch.Generator] = None):
        super().__init__()
        cfg.validate()
        d, e, d_c = cfg.embed_dim, cfg.temporal_hidden, cfg.stance_dim
        self.input_dim = input_dim
        self.encoder = SageEncoder(input_dim, (d,) * len(cfg.fanouts))
        self._init_encoder(generator)
        self.temporal = TemporalEncoder(d, e, META_DIM, generator)
        n_stances = 4

        def uniform(*shape, bound):
            t = torch.empty(*shape, dtype=DTYPE)
            t.uniform_(-bound, bound, generator=generator)
            return nn.Parameter(t)

        self.stance_user = uniform(n_stances, d_c, d, bound=1 / math.sqrt(d))
        self.stance_article = uniform(n_stances, d_c, d, bound=1 / math.sqrt(d))
        self.clf_weight = uniform(2 * d, bound=1 / math.sqrt(2 * d))
        self.clf_bias = nn.Parameter(torch.zeros((), dtype=DTYPE))

    def _init_encoder(self, generator) -> None:
        for layer in self.encoder.layers:
            fan_in = layer.weight.shape[1]
            bound = 1 / math.sqrt(fan_in)
            w = torch.empty_like(layer.weight, dtype=DTYPE)
            w.uniform_(-bound, bound, generator=generator)
            layer.weight = nn.Parameter(w)

    def predict(self, z_article: torch.Tensor, z_source: torch.Tensor) -> torch.Tensor:
        return predict_article(z_article, z_source, self.clf_weight, self.clf_bias)


# ---------------------------------------------------------------------------
# Dataset tensors shared by training and inference
# ---------------------------------------------------------------------------

@dataclass
class ArticleBatch:
    """Padded engagement tensors for a list of articles."""

    articles: list[NodeId]
    rows: np.ndarray          # global node rows of the articles
    user_pad: torch.Tensor    # (n, L) global user rows (0-padded)
    metas: torch.Tensor       # (n, L, META_DIM)
    lengths: np.ndarray
    hours: np.ndarray         # (n, L), -1 past length
    publisher_rows: np.ndarray  # -1 when the article has no publication edge


def build_article_batch(gi: GraphIndex, articles: Sequence[NodeId],
                        cfg: TrainConfig) -> ArticleBatch:
    """Assemble the (time-ordered, truncated) engagement tensors: the
    earliest ``max_seq_len`` events of each article."""
    seqs = [gi.graph.engagements(a).items[:cfg.max_seq_len] for a in articles]
    lengths = np.array([len(s) for s in seqs], dtype=np.int64)
    pad = max(1, int(lengths.max()) if len(lengths) else 1)
    user_pad = np.zeros((len(articles), pad), dtype=np.int64)
    metas = np.zeros((len(articles), pad, META_DIM))
    hours = np.full((len(articles), pad), -1.0)
    for i, seq in enumerate(seqs):
        for j, eng in enumerate(seq):
            user_pad[i, j] = gi.index[eng.user]
            metas[i, j] = engagement_meta(eng.stance, eng.elapsed_hours,
                                          cfg.time_scale, cfg.disable_time)
            hours[i, j] = eng.elapsed_hours
    publisher = np.full(len(articles), -1, dtype=np.int64)
    for i, a in enumerate(articles):
        pubs = gi.graph.neighbors(a, PUBLICATION)
        if pubs:
            publisher[i] = gi.index[pubs[0]]
    return ArticleBatch(
        articles=list(articles),
        rows=np.array([gi.index[a] for a in articles], dtype=np.int64),
        user_pad=torch.from_numpy(user_pad),
        metas=torch.as_tensor(metas, dtype=DTYPE),
        lengths=lengths,
        hours=hours,
        publisher_rows=publisher,
    )


def article_representations(model: CredibilityModel, z_all: torch.Tensor,
                            batch: ArticleBatch, chunk: int = 0
                            ) -> tuple[torch.Tensor, torch.Tensor]:
    """News representations (temporal + structural) and attention weights
    for a prepared article batch, given all-node structural embeddings."""
    n = len(batch.articles)
    if n == 0:
        d = model.encoder.out_dim
        return torch.zeros(0, d, dtype=DTYPE), torch.zeros(0, 1, dtype=DTYPE)
    chunk = chunk if chunk > 0 else n
    reps, weights = [], []
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        z_struct = z_all[torch.from_numpy(batch.rows[lo:hi])]
        user_emb = z_all[batch.user_pad[lo:hi]]
        v_temp, w = model.temporal(user_emb, batch.metas[lo:hi],
                                   batch.lengths[lo:hi], z_struct)
        reps.append(v_temp + z_struct)
        weights.append(w)
    max_l = max(w.shape[1] for w in weights)
    weights = [torch.nn.functional.pad(w, (0, max_l - w.shape[1])) for w in weights]
    return torch.cat(reps), torch.cat(weights)


# ---------------------------------------------------------------------------
# Splits
# ---------------------------------------------------------------------------

def stratified_split(graph: SocialGraph, fraction: float, seed: int
                     ) -> tuple[list[NodeId], list[NodeId]]:
    """Seeded class-stratified split of the labeled articles into
    (train, heldout). Unlabeled articles belong to neither."""
    by_class: dict[int, list[NodeId]] = {0: [], 1: []}
    for a in graph.nodes(ARTICLE):
        y = graph.article_label(a)
        if y is not None:
            by_class[y].append(a)
    train: list[NodeId] = []
    heldout: list[NodeId] = []
    for y, members in sorted(by_class.items()):
        rng = derive_rng(seed, "split", y)
        members = sorted(members)
        order = rng.permutation(len(members))
        n_train = int(round(fraction * len(members)))
        for pos, j in enumerate(order):
            (train if pos < n_train else heldout).append(members[j])
    return sorted(train), sorted(heldout)


# ---------------------------------------------------------------------------
# Training loop
# ---------------------------------------------------------------------------

@dataclass
class EpochStats:
    epoch: int
    l_prox: float
    l_stance: float
    l_news: float
    l_total: float
    val_auc: float


@dataclass
class TrainResult:
    model: CredibilityModel
    log: list[EpochStats]
    train_articles: list[NodeId]
    heldout_articles: list[NodeId]


def _auc_fast(scores: np.ndarray, labels: np.ndarray) -> float:
    """Mann-Whitney AUC with tie credit (rank formulation)."""
    labels = np.asarray(labels)
    pos = labels == 1
    n_pos, n_neg = int(pos.sum()), int((~pos).sum())
    if n_pos == 0 or n_neg == 0:
        return float("nan")
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(len(scores))
    sorted_scores = scores[order]
    i = 0
    rank = 1.0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i:j + 1]] = (rank + rank + (j - i)) / 2.0
        rank += j - i + 1
        i = j + 1
    r_pos = ranks[pos].sum()
    return float((r_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def _stance_pairs(gi: GraphIndex, article_pos: dict[NodeId, int]
                  ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    users, arts, labels = [], [], []
    for e in gi.graph.edges:
        if e.label == STANCE:
            users.append(gi.index[e.src])
            arts.append(article_pos[e.dst])
            labels.append(int(e.stance))
    return (np.array(users, dtype=np.int64), np.array(arts, dtype=np.int64),
            np.array(labels, dtype=np.int64))


def _epoch_proximity(z_table: torch.Tensor, gi: GraphIndex, cfg: TrainConfig,
                     epoch: int) -> torch.Tensor:
    wcfg = cfg.walk_config()
    pos_a, pos_n, neg_a, neg_n = [], [], [], []
    n_anchors = 0
    for view in (gi.news_source_view, gi.user_view):
        n_anchors += len(view)
        rng_w = derive_rng(cfg.seed, "walks", view.name, epoch)
        pa, pn = batched_walk_positives(view, wcfg, rng_w)
        rng_n = derive_rng(cfg.seed, "negatives", view.name, epoch)
        na, nn_ = batched_negatives(view, np.arange(len(view)),
                                    wcfg.negatives_per_node, pa, pn, rng_n)
        pos_a.append(view.global_idx[pa])
        pos_n.append(view.global_idx[pn])
        neg_a.append(view.global_idx[na])
        neg_n.append(view.global_idx[nn_])
    cat = lambda parts: torch.from_numpy(np.concatenate(parts))
    return proximity_loss_pairs(z_table, cat(pos_a), cat(pos_n),
                                cat(neg_a), cat(neg_n),
                                cfg.negative_weight, n_anchors,
                                cfg.literal_printed_proximity)


def _heldout_auc(model: CredibilityModel, gi: GraphIndex, X: torch.Tensor,
                 batch: ArticleBatch, labels: np.ndarray, cfg: TrainConfig) -> float:
    if len(batch.articles) == 0:
        return float("nan")
    with torch.no_grad():
        probs = predict_batch(model, gi, X, batch, cfg, tag="eval")[0]
    return _auc_fast(probs.numpy(), labels)


def predict_batch(model: CredibilityModel, gi: GraphIndex, X: torch.Tensor,
                  batch: ArticleBatch, cfg: TrainConfig, tag: object = "eval"
                  ) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """Inductive inference for a prepared article batch: encodes only the
    nodes the batch needs. Returns (P(real), news reps, attention)."""
    if (batch.publisher_rows < 0).any():
        missing = [a for a, p in zip(batch.articles, batch.publisher_rows) if p < 0]
        raise ValueError(f"articles without a publishing source: {missing[:3]}")
    with torch.no_grad():
        needed = np.unique(np.concatenate([
            batch.rows, batch.publisher_rows,
            batch.user_pad.numpy()[batch.hours >= 0].ravel(),
        ]))
        tree = sample_tree(gi, needed, cfg.neighbor_config(), tag)
        z_needed = model.encoder(X, tree)
        z_all_like = torch.zeros(len(gi.nodes), model.encoder.out_dim, dtype=DTYPE)
        z_all_like[torch.from_numpy(needed)] = z_needed
        reps, weights = article_representations(model, z_all_like, batch,
                                                chunk=cfg.batch_size)
        z_src = z_all_like[torch.from_numpy(batch.publisher_rows)]
        probs = model.predict(reps, z_src)
    return probs, reps, weights


def train(graph: SocialGraph, features: FeatureTable, cfg: TrainConfig
          ) -> TrainResult:
    """Run the full training loop and return the model plus per-epoch log.

    Per epoch: resample neighborhoods, encode every node, aggregate each
    article's engagements in batch-size chunks while accumulating the
    stance and news losses, sample walk positives/negatives per subgraph
    for the proximity loss, then backpropagate the summed loss and update.
    Heldout AUC (computed with the fixed evaluation sampling stream) drives
    early stopping.
    """
    cfg.validate()
    gi = GraphIndex(graph)
    if features.nodes != gi.nodes:
        raise ValueError("feature table is not aligned with the graph")
    X = torch.as_tensor(features.matrix, dtype=DTYPE)

    train_articles, heldout_articles = stratified_split(
        graph, cfg.train_fraction, cfg.seed)
    if not train_articles:
        raise ValueError("no labeled training articles")

    all_articles = graph.nodes(ARTICLE)
    full_batch = build_article_batch(gi, all_articles, cfg)
    article_pos = {a: i for i, a in enumerate(all_articles)}
    train_pos = np.array([article_pos[a] for a in train_articles], dtype=np.int64)
    train_labels = torch.as_tensor(
        np.array([graph.article_label(a) for a in train_articles]), dtype=DTYPE)
    train_pub = full_batch.publisher_rows[train_pos]
    if (train_pub < 0).any():
        raise ValueError("labeled training articles must have a publishing source")

    heldout_batch = build_article_batch(gi, heldout_articles, cfg)
    heldout_labels = np.array(
        [graph.article_label(a) for a in heldout_articles], dtype=np.int64)

    st_users, st_arts, st_labels = _stance_pairs(gi, article_pos)

    generator = torch.Generator().manual_seed(
        int.from_bytes(derive_rng(cfg.seed, "init").bytes(8), "little") >> 1)
    model = CredibilityModel(features.input_dim, cfg, generator)
    optimizer = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate)

    all_idx = np.arange(len(gi.nodes), dtype=np.int64)
    log: list[EpochStats] = []
    best_auc = -float("inf")
    stale = 0
    for epoch in range(1, cfg.epochs + 1):
        tree = sample_tree(gi, all_idx, cfg.neighbor_config(), tag=("train", epoch))
        z_struct = model.encoder(X, tree)

        reps, _ = article_representations(model, z_struct, full_batch,
                                          chunk=cfg.batch_size)
        z_table = z_struct.index_copy(
            0, torch.from_numpy(full_batch.rows), reps)

        if cfg.disable_stance_loss or len(st_labels) == 0:
            l_stance = torch.zeros((), dtype=DTYPE)
        else:
            l_stance = stance_loss(z_struct[torch.from_numpy(st_users)],
                                   reps[torch.from_numpy(st_arts)],
                                   model.stance_user, model.stance_article,
                                   st_labels)

        probs = model.predict(reps[torch.from_numpy(train_pos)],
                              z_struct[torch.from_numpy(train_pub)])
        l_news = fake_news_loss(probs, train_labels)

        if cfg.disable_proximity_loss:
            l_prox = torch.zeros((), dtype=DTYPE)
        else:
            l_prox = _epoch_proximity(z_table, gi, cfg, epoch)

        loss = total_loss(l_prox, l_stance, l_news,
                          cfg.disable_stance_loss, cfg.disable_proximity_loss)
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()

        val_auc = _heldout_auc(model, gi, X, heldout_batch, heldout_labels, cfg)
        log.append(EpochStats(epoch, float(l_prox), float(l_stance),
                              float(l_news), float(loss), val_auc))

        if math.isnan(val_auc):
            continue
        if val_auc > best_auc + 1e-12:
            best_auc = val_auc
            stale = 0
        else:
            stale += 1
            if stale > cfg.patience:
                break
    return TrainResult(model, log, train_articles, heldout_articles)


# ---------------------------------------------------------------------------
# Checkpoints
# ---------------------------------------------------------------------------

def save_checkpoint(path: str | Path, model: CredibilityModel,
                    cfg: TrainConfig) -> None:
    """Self-describing container: parameter name -> 64-bit array, plus the
    training config; round-trips bit-exactly."""
    arrays = {
        name: tensor.detach().numpy().astype(np.float64)
        for name, tensor in model.state_dict().items()
    }
    np.savez(path,
             __config__=np.array(cfg.to_json()),
             __input_dim__=np.array(model.input_dim, dtype=np.int64),
             **arrays)


def load_checkpoint(path: str | Path) -> tuple[CredibilityModel, TrainConfig]:
    with np.load(path, allow_pickle=False) as data:
        cfg = TrainConfig.from_json(str(data["__config__"]))
        input_dim = int(data["__input_dim__"])
        model = CredibilityModel(input_dim, cfg)
        state = {
            name: torch.as_tensor(data[name], dtype=DTYPE)
            for name in data.files if not name.startswith("__")
        }
    model.load_state_dict(state)
    return model, cfg

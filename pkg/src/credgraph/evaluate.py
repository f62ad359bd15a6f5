"""Evaluation and analysis battery.

AUC via the tie-aware Mann-Whitney statistic, density-based clustering of
news representations with a homogeneity score, attention-mass profiles by
time window, source-representation export, and a logistic-regression probe
for source factuality. Everything here is pure given a trained model.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import torch

from .encoder import GraphIndex, derive_rng, sample_tree
from .features import FeatureTable
from .graph import ARTICLE, PUBLICATION, SOURCE, NodeId, SocialGraph
from .objectives import (DTYPE, ArticleBatch, CredibilityModel, TrainConfig,
                         build_article_batch, predict_batch)

# Analysis windows in hours: first half-day, to 36 h, to two weeks, beyond.
DEFAULT_WINDOWS: tuple[tuple[float, float], ...] = (
    (0.0, 12.0), (12.0, 36.0), (36.0, 336.0), (336.0, math.inf))


# ---------------------------------------------------------------------------
# ROC / AUC
# ---------------------------------------------------------------------------

@dataclass
class RocResult:
    auc: float
    points: list[tuple[float, float]]  # (false positive rate, true positive rate)


def auc(scores: Sequence[float], labels: Sequence[int]) -> RocResult:
    """ROC points from a descending-threshold sweep (ties grouped) and the
    trapezoidal area, which equals P(score_pos > score_neg) + 0.5 P(tie).
    Positives are the real class (label 1)."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    n_pos = int((labels == 1).sum())
    n_neg = int((labels == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both classes present")
    order = np.argsort(-scores, kind="mergesort")
    points = [(0.0, 0.0)]
    tp = fp = 0
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and scores[order[j + 1]] == scores[order[i]]:
            j += 1
        group = labels[order[i:j + 1]]
        tp += int((group == 1).sum())
        fp += int((group == 0).sum())
        points.append((fp / n_neg, tp / n_pos))
        i = j + 1
    area = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        area += (x1 - x0) * (y0 + y1) / 2.0
    return RocResult(float(area), points)


# ---------------------------------------------------------------------------
# OPTICS clustering + homogeneity
# ---------------------------------------------------------------------------

NOISE = -1


@dataclass
class ClusterAssignment:
    labels: np.ndarray        # cluster id per point, NOISE for noise
    ordering: np.ndarray      # OPTICS processing order
    reachability: np.ndarray  # aligned with point index
    core_distance: np.ndarray

    @property
    def num_clusters(self) -> int:
        return int(self.labels.max()) + 1 if (self.labels >= 0).any() else 0


def optics_cluster(points, min_pts: int = 5, max_eps: float = 0.5) -> ClusterAssignment:
    """OPTICS reachability ordering (Euclidean, unbounded generating
    radius) with flat cluster extraction at the ``max_eps`` threshold.

    Core distance is the distance to the min_pts-th nearest point, the
    point itself included. Ties in the seed queue break on point index, so
    the ordering is deterministic. Points whose reachability exceeds
    ``max_eps`` start a new cluster when they are core at that radius and
    become noise otherwise.
    """
    pts = np.asarray(points, dtype=np.float64)
    n = len(pts)
    if n < min_pts:
        raise ValueError(f"need at least min_pts={min_pts} points, got {n}")
    dist = np.sqrt(np.maximum(
        ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2), 0.0))
    core = np.sort(dist, axis=1)[:, min_pts - 1]

    reach = np.full(n, np.inf)
    processed = np.zeros(n, dtype=bool)
    ordering: list[int] = []

    for start in range(n):
        if processed[start]:
            continue
        heap: list[tuple[float, int]] = [(np.inf, start)]
        while heap:
            r, p = heapq.heappop(heap)
            if processed[p]:
                continue
            processed[p] = True
            ordering.append(p)
            candidates = np.flatnonzero(~processed)
            new_reach = np.maximum(core[p], dist[p, candidates])
            better = new_reach < reach[candidates]
            for q, nr in zip(candidates[better], new_reach[better]):
                reach[q] = nr
                heapq.heappush(heap, (nr, int(q)))

    order = np.array(ordering, dtype=np.int64)
    labels = np.full(n, NOISE, dtype=np.int64)
    cluster = -1
    for p in order:
        if reach[p] > max_eps:
            if core[p] <= max_eps:
                cluster += 1
                labels[p] = cluster
            # not core at this radius: noise
        elif cluster >= 0:
            labels[p] = cluster
    return ClusterAssignment(labels, order, reach, core)


def _entropy(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-(p * np.log(p)).sum())


def homogeneity(assignment, truth) -> float:
    """1 - H(truth | clusters) / H(truth); 1.0 when classes are already
    pure or every cluster is single-class. Noise points count as their own
    singleton clusters."""
    labels = assignment.labels if isinstance(assignment, ClusterAssignment) else np.asarray(assignment)
    truth = np.asarray(truth)
    if len(labels) != len(truth):
        raise ValueError("assignment/truth length mismatch")
    labels = labels.copy()
    next_id = labels.max() + 1 if len(labels) else 0
    for i in np.flatnonzero(labels == NOISE):
        labels[i] = next_id
        next_id += 1

    classes, truth_ids = np.unique(truth, return_inverse=True)
    clusters, cluster_ids = np.unique(labels, return_inverse=True)
    h_truth = _entropy(np.bincount(truth_ids))
    if h_truth == 0.0:
        return 1.0
    contingency = np.zeros((len(clusters), len(classes)))
    np.add.at(contingency, (cluster_ids, truth_ids), 1.0)
    n = contingency.sum()
    h_cond = 0.0
    for row in contingency:
        h_cond += (row.sum() / n) * _entropy(row)
    return float(1.0 - h_cond / h_truth)


# ---------------------------------------------------------------------------
# Attention-by-time-window profiles
# ---------------------------------------------------------------------------

@dataclass
class TimeWindowProfile:
    windows: tuple[tuple[float, float], ...]
    fake_mass: np.ndarray
    real_mass: np.ndarray
    num_fake: int
    num_real: int


def attention_profile(weights: np.ndarray, hours: np.ndarray,
                      labels: Sequence[Optional[int]],
                      windows: tuple[tuple[float, float], ...] = DEFAULT_WINDOWS
                      ) -> TimeWindowProfile:
    """Accumulate each article's attention weights into the time window of
    the engagement, then average per class. ``hours`` is negative at padded
    positions; articles without engagements are skipped."""
    weights = np.asarray(weights, dtype=np.float64)
    hours = np.asarray(hours, dtype=np.float64)
    per_class: dict[int, list[np.ndarray]] = {0: [], 1: []}
    for w_row, h_row, y in zip(weights, hours, labels):
        if y is None:
            continue
        valid = h_row >= 0
        if not valid.any():
            continue
        masses = np.zeros(len(windows))
        for k, (lo, hi) in enumerate(windows):
            in_win = valid & (h_row >= lo) & (h_row < hi)
            masses[k] = w_row[in_win].sum()
        per_class[int(y)].append(masses)
    fake = np.mean(per_class[0], axis=0) if per_class[0] else np.zeros(len(windows))
    real = np.mean(per_class[1], axis=0) if per_class[1] else np.zeros(len(windows))
    return TimeWindowProfile(tuple(windows), fake, real,
                             len(per_class[0]), len(per_class[1]))


def model_attention_profile(model: CredibilityModel, gi: GraphIndex,
                            X: torch.Tensor, cfg: TrainConfig,
                            articles: Optional[Sequence[NodeId]] = None,
                            windows=DEFAULT_WINDOWS) -> TimeWindowProfile:
    """Attention profile of a trained model over labeled articles."""
    graph = gi.graph
    if articles is None:
        articles = [a for a in graph.nodes(ARTICLE)
                    if graph.article_label(a) is not None]
    batch = build_article_batch(gi, list(articles), cfg)
    _, _, weights = predict_batch(model, gi, X, batch, cfg, tag="eval")
    labels = [graph.article_label(a) for a in batch.articles]
    return attention_profile(weights.numpy(), batch.hours, labels, windows)


# ---------------------------------------------------------------------------
# Source representations + probe
# ---------------------------------------------------------------------------

@dataclass
class SourceRepresentations:
    keys: list[str]
    full: np.ndarray       # [z_s ; x_s ; sum of published x_a]
    baseline: np.ndarray   # [z_s ; x_s]


def export_source_representations(model: CredibilityModel, gi: GraphIndex,
                                  features: FeatureTable, cfg: TrainConfig
                                  ) -> SourceRepresentations:
    graph = gi.graph
    sources = graph.nodes(SOURCE)
    if not sources:
        return SourceRepresentations([], np.zeros((0, 0)), np.zeros((0, 0)))
    X = torch.as_tensor(features.matrix, dtype=DTYPE)
    idx = np.array([gi.index[s] for s in sources], dtype=np.int64)
    with torch.no_grad():
        tree = sample_tree(gi, idx, cfg.neighbor_config(), tag="eval")
        z = model.encoder(X, tree).numpy()
    d_in = features.input_dim
    pub_sum = np.zeros((len(sources), d_in))
    for i, s in enumerate(sources):
        for a in graph.neighbors(s, PUBLICATION):
            pub_sum[i] += features.row(a)
    x_s = features.matrix[idx]
    return SourceRepresentations(
        keys=[s.key for s in sources],
        full=np.concatenate([z, x_s, pub_sum], axis=1),
        baseline=np.concatenate([z, x_s], axis=1),
    )


def source_factuality_labels(graph: SocialGraph) -> dict[str, int]:
    """Majority-vote factuality per source from its published labeled
    articles: 0 (low) when fakes dominate, 1 (high) when real news does;
    sources with no labeled publications or an exact tie are skipped."""
    out: dict[str, int] = {}
    for s in graph.nodes(SOURCE):
        fake = real = 0
        for a in graph.neighbors(s, PUBLICATION):
            y = graph.article_label(a)
            if y == 0:
                fake += 1
            elif y == 1:
                real += 1
        if fake > real:
            out[s.key] = 0
        elif real > fake:
            out[s.key] = 1
    return out


def linear_probe(train_x, train_y, test_x, test_y, l2: float = 1e-2,
                 learning_rate: float = 0.5, iterations: int = 800) -> RocResult:
    """L2-regularized logistic regression fit by full-batch gradient
    descent from zero weights on train-standardized features (fixed
    iteration count, hence deterministic); scores the test split."""
    train_x = np.asarray(train_x, dtype=np.float64)
    test_x = np.asarray(test_x, dtype=np.float64)
    train_y = np.asarray(train_y, dtype=np.float64)
    test_y = np.asarray(test_y)
    if len(np.unique(train_y)) < 2:
        raise ValueError("probe training set needs both classes")
    mean = train_x.mean(axis=0)
    std = train_x.std(axis=0)
    std[std < 1e-12] = 1.0
    xt = (train_x - mean) / std
    xe = (test_x - mean) / std
    w = np.zeros(xt.shape[1])
    b = 0.0
    n = len(xt)
    for _ in range(iterations):
        logits = xt @ w + b
        p = 1.0 / (1.0 + np.exp(-logits))
        err = p - train_y
        grad_w = xt.T @ err / n + l2 * w
        grad_b = err.mean()
        w -= learning_rate * grad_w
        b -= learning_rate * grad_b
    scores = xe @ w + b
    return auc(scores, test_y)

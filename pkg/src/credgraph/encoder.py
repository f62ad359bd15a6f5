"""Inductive structural encoder.

A GraphSage-style mean aggregator over sampled multi-hop neighborhoods:
h^0 = x, h^k = ReLU(W_k [h^{k-1}_self ; mean of sampled neighbors' h^{k-1}]),
with the final layer linear and L2-normalized. Structural neighborhoods
exclude stance edges (those feed the temporal aggregator and stance
objective): articles aggregate over publication, sources over citation and
publication, users over followership.

All sampling is seeded per (seed, tag, depth, node) so that encodes are
deterministic and a node's sample is identical wherever it appears in a
batch tree.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import torch
from torch import nn

from .graph import (ARTICLE, CITATION, FOLLOWERSHIP, PUBLICATION, SOURCE,
                    USER, NodeId, SocialGraph)

DTYPE = torch.float64

STRUCT_RELATIONS = {
    ARTICLE: (PUBLICATION,),
    SOURCE: (CITATION, PUBLICATION),
    USER: (FOLLOWERSHIP,),
}


@dataclass(frozen=True)
class NeighborSampleConfig:
    fanouts: tuple[int, ...] = (10, 5)
    rng_seed: int = 0


@dataclass(frozen=True)
class WalkConfig:
    walk_length: int = 3
    walks_per_node: int = 5
    negatives_per_node: int = 10

    def __post_init__(self):
        if min(self.walk_length, self.walks_per_node, self.negatives_per_node) < 1:
            raise ValueError("walk parameters must be positive")


def derive_rng(*parts) -> np.random.Generator:
    """Independent RNG stream keyed by a tuple of hashable parts."""
    digest = hashlib.blake2b(
        "\x1f".join(str(p) for p in parts).encode("utf-8"), digest_size=8
    ).digest()
    return np.random.default_rng(int.from_bytes(digest, "little"))


def _sample_indices(neighbors: np.ndarray, fanout: int,
                    rng: np.random.Generator) -> np.ndarray:
    """Uniform sample of ``fanout`` neighbors; with replacement only when
    fewer than ``fanout`` exist. Isolated nodes yield an empty sample."""
    if len(neighbors) == 0:
        return neighbors[:0]
    if len(neighbors) >= fanout:
        return rng.choice(neighbors, size=fanout, replace=False)
    return rng.choice(neighbors, size=fanout, replace=True)


class SubgraphView:
    """Index-space view of one proximity subgraph (local CSR adjacency)."""

    def __init__(self, name: str, global_idx: np.ndarray,
                 adj_lists: list[np.ndarray]):
        self.name = name
        self.global_idx = global_idx          # local -> global node index
        self.local_of = {int(g): i for i, g in enumerate(global_idx)}
        self.degrees = np.array([len(a) for a in adj_lists], dtype=np.int64)
        self.indptr = np.zeros(len(adj_lists) + 1, dtype=np.int64)
        np.cumsum(self.degrees, out=self.indptr[1:])
        self.flat = (np.concatenate(adj_lists) if adj_lists
                     else np.empty(0, dtype=np.int64)).astype(np.int64)

    def __len__(self) -> int:
        return len(self.global_idx)

    def neighbors_local(self, local: int) -> np.ndarray:
        return self.flat[self.indptr[local]:self.indptr[local + 1]]


class GraphIndex:
    """Integer-indexed adjacency over a graph's canonical node order."""

    def __init__(self, graph: SocialGraph):
        self.graph = graph
        self.nodes: list[NodeId] = graph.nodes()
        self.index: dict[NodeId, int] = {n: i for i, n in enumerate(self.nodes)}
        self.tags: list[str] = [str(n) for n in self.nodes]
        self.struct_adj: list[np.ndarray] = []
        for node in self.nodes:
            nbrs = graph.neighbors_multi(node, STRUCT_RELATIONS[node.kind])
            self.struct_adj.append(
                np.array(sorted(self.index[m] for m in nbrs), dtype=np.int64))
        self.news_source_view = self._view(
            "news_source", (ARTICLE, SOURCE), (CITATION, PUBLICATION))
        self.user_view = self._view("user", (USER,), (FOLLOWERSHIP,))

    def _view(self, name: str, kinds: tuple[str, ...],
              relations: tuple[str, ...]) -> SubgraphView:
        members = [i for i, n in enumerate(self.nodes) if n.kind in kinds]
        local_of = {g: i for i, g in enumerate(members)}
        adj = []
        for g in members:
            nbrs = self.graph.neighbors_multi(self.nodes[g], relations)
            adj.append(np.array(
                sorted(local_of[self.index[m]] for m in nbrs), dtype=np.int64))
        return SubgraphView(name, np.array(members, dtype=np.int64), adj)

    def view_for(self, node: NodeId) -> SubgraphView:
        return self.user_view if node.kind == USER else self.news_source_view


@dataclass
class SampleTree:
    """Layered neighbor samples for a batch of target nodes.

    ``uniq[t]`` holds the unique node indices appearing at depth t
    (depth 0 = the targets). ``children[t]`` / ``offsets[t]`` give, for each
    unique depth-(t-1) node, its sampled depth-t neighbors.
    """

    uniq: list[np.ndarray]
    children: list[np.ndarray]
    offsets: list[np.ndarray]
    inv: list[np.ndarray]  # children[t] positions -> rows of uniq[t]


def sample_tree(gi: GraphIndex, targets: np.ndarray, cfg: NeighborSampleConfig,
                tag: object = "eval") -> SampleTree:
    """Sample a multi-hop tree for ``targets`` (unique global indices)."""
    uniq = [np.asarray(targets, dtype=np.int64)]
    children: list[np.ndarray] = [np.empty(0, dtype=np.int64)]
    offsets: list[np.ndarray] = [np.empty(0, dtype=np.int64)]
    inv: list[np.ndarray] = [np.empty(0, dtype=np.int64)]
    for depth, fanout in enumerate(cfg.fanouts, start=1):
        parents = uniq[depth - 1]
        parts = []
        offs = np.zeros(len(parents) + 1, dtype=np.int64)
        for j, p in enumerate(parents):
            rng = derive_rng(cfg.rng_seed, "nbr", tag, depth, gi.tags[p])
            sample = _sample_indices(gi.struct_adj[p], fanout, rng)
            parts.append(sample)
            offs[j + 1] = offs[j] + len(sample)
        flat = (np.concatenate(parts) if parts else np.empty(0, dtype=np.int64))
        u, iv = np.unique(flat, return_inverse=True) if len(flat) else (
            np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))
        uniq.append(u.astype(np.int64))
        children.append(flat.astype(np.int64))
        offsets.append(offs)
        inv.append(iv.astype(np.int64))
    return SampleTree(uniq, children, offsets, inv)


def sample_neighborhood(graph_or_index, node: NodeId, cfg: NeighborSampleConfig,
                        tag: object = "eval") -> list[list[list[NodeId]]]:
    """Layered samples for a single node: element k-1 lists, for each parent
    in flattened layer k-1 order (layer 0 is the node itself), its sampled
    layer-k neighbors. Deterministic given the config seed."""
    gi = graph_or_index if isinstance(graph_or_index, GraphIndex) else GraphIndex(graph_or_index)
    if node not in gi.index:
        raise KeyError(f"unknown node {node}")
    layers: list[list[list[NodeId]]] = []
    parents = [gi.index[node]]
    for depth, fanout in enumerate(cfg.fanouts, start=1):
        grouped = []
        flat: list[int] = []
        for p in parents:
            rng = derive_rng(cfg.rng_seed, "nbr", tag, depth, gi.tags[p])
            sample = _sample_indices(gi.struct_adj[p], fanout, rng)
            grouped.append([gi.nodes[i] for i in sample])
            flat.extend(int(i) for i in sample)
        layers.append(grouped)
        parents = flat
    return layers


def _segment_mean(rows: torch.Tensor, seg_sizes: np.ndarray,
                  n_seg: int) -> torch.Tensor:
    """Mean of ``rows`` per contiguous segment; empty segments give zeros."""
    if rows.shape[0] == 0:
        return torch.zeros(n_seg, rows.shape[1], dtype=rows.dtype)
    seg_id = torch.from_numpy(np.repeat(np.arange(n_seg), seg_sizes))
    out = torch.zeros(n_seg, rows.shape[1], dtype=rows.dtype)
    out = out.index_add(0, seg_id, rows)
    counts = torch.from_numpy(np.maximum(seg_sizes, 1)).to(rows.dtype)
    return out / counts[:, None]


class SageEncoder(nn.Module):
    """Stacked mean-aggregator layers; output dimension is the last entry
    of ``dims``. Bias-free per-layer weights act on [self ; neighbor-mean]."""

    def __init__(self, input_dim: int, dims: Sequence[int], normalize: bool = True):
        super().__init__()
        self.input_dim = input_dim
        self.dims = tuple(dims)
        self.normalize = normalize
        layers = []
        prev = input_dim
        for d_k in dims:
            layers.append(nn.Linear(2 * prev, d_k, bias=False, dtype=DTYPE))
            prev = d_k
        self.layers = nn.ModuleList(layers)

    @property
    def out_dim(self) -> int:
        return self.dims[-1]

    def forward(self, features: torch.Tensor, tree: SampleTree) -> torch.Tensor:
        """Encode the tree's targets; row i corresponds to tree.uniq[0][i]."""
        K = len(self.layers)
        if len(tree.uniq) != K + 1:
            raise ValueError(f"tree depth {len(tree.uniq) - 1} != {K} layers")
        # h[t] holds h^k rows for tree.uniq[t]; start with raw features (k=0).
        h = [features[torch.from_numpy(tree.uniq[t])] for t in range(K + 1)]
        for k in range(1, K + 1):
            new_h = []
            for t in range(0, K - k + 1):
                sizes = np.diff(tree.offsets[t + 1])
                child_rows = h[t + 1][torch.from_numpy(tree.inv[t + 1])]
                nbr_mean = _segment_mean(child_rows, sizes, len(tree.uniq[t]))
                z = self.layers[k - 1](torch.cat([h[t], nbr_mean], dim=1))
                if k < K:
                    z = torch.relu(z)
                new_h.append(z)
            h = new_h
        z = h[0]
        if self.normalize:
            norms = torch.linalg.vector_norm(z, dim=1, keepdim=True).clamp(min=1e-12)
            z = z / norms
        return z


def encode_nodes(gi: GraphIndex, features: torch.Tensor, encoder: SageEncoder,
                 nodes_idx: np.ndarray, cfg: NeighborSampleConfig,
                 tag: object = "eval") -> torch.Tensor:
    tree = sample_tree(gi, nodes_idx, cfg, tag)
    return encoder(features, tree)


def graphsage_encode(graph_or_index, node: NodeId, encoder: SageEncoder,
                     cfg: NeighborSampleConfig, features,
                     tag: object = "eval") -> torch.Tensor:
    """Structural embedding of one node. ``features`` may be a FeatureTable
    or a tensor aligned with the graph's canonical node order."""
    gi = graph_or_index if isinstance(graph_or_index, GraphIndex) else GraphIndex(graph_or_index)
    if node not in gi.index:
        raise KeyError(f"unknown node {node}")
    feats = features.matrix if hasattr(features, "matrix") else features
    if not isinstance(feats, torch.Tensor):
        feats = torch.as_tensor(feats, dtype=DTYPE)
    if feats.shape[1] != encoder.input_dim:
        raise ValueError(f"feature dim {feats.shape[1]} != encoder input {encoder.input_dim}")
    idx = np.array([gi.index[node]], dtype=np.int64)
    return encode_nodes(gi, feats, encoder, idx, cfg, tag)[0]


# ---------------------------------------------------------------------------
# Proximity sampling: random-walk positives and degree^(3/4) negatives
# ---------------------------------------------------------------------------

def _walk_positives_local(view: SubgraphView, start: int, cfg: WalkConfig,
                          rng: np.random.Generator) -> set[int]:
    visited: set[int] = set()
    for _ in range(cfg.walks_per_node):
        cur = start
        for _ in range(cfg.walk_length):
            nbrs = view.neighbors_local(cur)
            if len(nbrs) == 0:
                break
            cur = int(nbrs[rng.integers(len(nbrs))])
            visited.add(cur)
    visited.discard(start)
    return visited


def random_walk_positives(graph_or_view, node_or_local, cfg: WalkConfig,
                          rng: np.random.Generator):
    """Nodes co-visited by fixed-length random walks from the given node,
    confined to the subgraph's relations; excludes the node itself."""
    if isinstance(graph_or_view, SubgraphView):
        return _walk_positives_local(graph_or_view, node_or_local, cfg, rng)
    gi = GraphIndex(graph_or_view)
    view = gi.view_for(node_or_local)
    start = view.local_of[gi.index[node_or_local]]
    visited = _walk_positives_local(view, start, cfg, rng)
    return {gi.nodes[view.global_idx[v]] for v in visited}


def negative_distribution(view: SubgraphView, exclude: set[int]) -> np.ndarray:
    """degree^(3/4) unigram distribution over the view, zeroed on
    ``exclude`` (local ids); uniform fallback when all degrees are zero."""
    weights = np.power(view.degrees.astype(np.float64), 0.75)
    if weights.sum() == 0:
        weights = np.ones(len(view), dtype=np.float64)
    if exclude:
        weights[list(exclude)] = 0.0
    total = weights.sum()
    if total == 0:
        raise ValueError("no nodes left to sample negatives from")
    return weights / total


def _negatives_local(view: SubgraphView, start: int, count: int,
                     positives: set[int], rng: np.random.Generator) -> list[int]:
    exclude = set(positives) | {start}
    if len(view) <= len(exclude):
        raise ValueError("subgraph too small for negative sampling")
    p = negative_distribution(view, exclude)
    support = int(np.count_nonzero(p))
    k = min(count, support)
    draws = rng.choice(len(view), size=k, replace=False, p=p)
    return [int(v) for v in draws]


def negative_samples(graph_or_view, node_or_local, count: int, positives,
                     rng: np.random.Generator):
    """``count`` negatives from the subgraph's degree^(3/4) distribution,
    never the node itself nor any positive."""
    if isinstance(graph_or_view, SubgraphView):
        return _negatives_local(graph_or_view, node_or_local, count, positives, rng)
    gi = GraphIndex(graph_or_view)
    view = gi.view_for(node_or_local)
    start = view.local_of[gi.index[node_or_local]]
    pos_local = {view.local_of[gi.index[p]] for p in positives}
    out = _negatives_local(view, start, count, pos_local, rng)
    return [gi.nodes[view.global_idx[v]] for v in out]


def batched_walk_positives(view: SubgraphView, cfg: WalkConfig,
                           rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized walks from every view node at once.

    Returns (anchor_local, positive_local) pair arrays, deduplicated per
    anchor, self-pairs removed. Dead-end walks stop in place.
    """
    n = len(view)
    if n == 0 or len(view.flat) == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    anchors = np.repeat(np.arange(n, dtype=np.int64), cfg.walks_per_node)
    cur = anchors.copy()
    alive = view.degrees[cur] > 0
    pairs = []
    for _ in range(cfg.walk_length):
        deg = view.degrees[cur]
        step_alive = alive & (deg > 0)
        if not step_alive.any():
            break
        offsets = (rng.random(len(cur)) * np.maximum(deg, 1)).astype(np.int64)
        nxt = view.flat[view.indptr[cur] + offsets]
        cur = np.where(step_alive, nxt, cur)
        alive = step_alive
        pairs.append(np.stack([anchors[step_alive], cur[step_alive]], axis=1))
    if not pairs:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    all_pairs = np.unique(np.concatenate(pairs, axis=0), axis=0)
    keep = all_pairs[:, 0] != all_pairs[:, 1]
    all_pairs = all_pairs[keep]
    return all_pairs[:, 0], all_pairs[:, 1]


def batched_negatives(view: SubgraphView, anchors: np.ndarray, count: int,
                      pos_anchor: np.ndarray, pos_node: np.ndarray,
                      rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """``count`` negatives per anchor from the shared degree^(3/4)
    distribution; collisions with the anchor or its positives are redrawn a
    few times, then dropped."""
    n = len(view)
    if n == 0 or len(anchors) == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    p = negative_distribution(view, set())
    pos_keys = np.sort(pos_anchor.astype(np.int64) * n + pos_node)
    draws = rng.choice(n, size=(len(anchors), count), replace=True, p=p)
    anchor_mat = np.broadcast_to(anchors[:, None].astype(np.int64), draws.shape)

    def _bad(d):
        keys = anchor_mat * n + d
        return (d == anchor_mat) | np.isin(keys, pos_keys)

    for _ in range(4):
        bad = _bad(draws)
        if not bad.any():
            break
        draws = np.where(bad, rng.choice(n, size=draws.shape, replace=True, p=p), draws)
    good = ~_bad(draws)
    return anchor_mat[good].astype(np.int64), draws[good].astype(np.int64)

"""In-memory heterogeneous social-context graph.

Three node kinds (article, source, user) connected by four relations:
user-user followership, source-source citation, source-article publication,
and user-article stance. Followership and citation are undirected;
publication and stance carry an elapsed time in hours relative to the
article's earliest publication (publication itself sits at hour zero).

Graphs are immutable after construction, so concurrent readers are safe.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Iterable, Optional, Sequence

logger = logging.getLogger(__name__)

ARTICLE = "article"
SOURCE = "source"
USER = "user"
NODE_KINDS = (ARTICLE, SOURCE, USER)

FOLLOWERSHIP = "followership"
CITATION = "citation"
PUBLICATION = "publication"
STANCE = "stance"
EDGE_LABELS = (FOLLOWERSHIP, CITATION, PUBLICATION, STANCE)

# (src kind, dst kind) per relation, in canonical storage orientation.
EDGE_TYPING = {
    FOLLOWERSHIP: (USER, USER),
    CITATION: (SOURCE, SOURCE),
    PUBLICATION: (SOURCE, ARTICLE),
    STANCE: (USER, ARTICLE),
}
UNDIRECTED = (FOLLOWERSHIP, CITATION, PUBLICATION)
TIMED = (PUBLICATION, STANCE)


class Stance(IntEnum):
    """Stance of a user engagement; the integer value fixes one-hot order."""

    NEUTRAL_SUPPORT = 0
    NEGATIVE_SUPPORT = 1
    DENY = 2
    REPORT = 3

    @property
    def wire_name(self) -> str:
        return self.name.lower()

    @classmethod
    def from_wire(cls, name: str) -> "Stance":
        try:
            return cls[name.upper()]
        except KeyError:
            raise ValueError(f"unknown stance label {name!r}") from None


NUM_STANCES = len(Stance)


@dataclass(frozen=True, order=True)
class NodeId:
    kind: str
    key: str

    def __str__(self) -> str:
        return f"{self.kind}:{self.key}"


@dataclass(frozen=True)
class NodeRecord:
    """A node plus its raw attributes from the entities file."""

    node: NodeId
    text: str = ""
    title: str = ""
    label: Optional[str] = None  # "fake"/"real" for labeled articles, else None


@dataclass(frozen=True)
class Edge:
    src: NodeId
    dst: NodeId
    label: str
    stance: Optional[Stance] = None
    elapsed_hours: Optional[float] = None


@dataclass(frozen=True)
class Engagement:
    """One user-article stance event."""

    user: NodeId
    stance: Stance
    elapsed_hours: float


@dataclass(frozen=True)
class EngagementSeq:
    """An article's stance events sorted by (elapsed_hours, user key)."""

    article: NodeId
    items: tuple[Engagement, ...]

    def __len__(self) -> int:
        return len(self.items)


class GraphFormatError(ValueError):
    """Ingestion/validation failure with a machine-readable category."""

    def __init__(self, category: str, message: str,
                 path: Optional[str] = None, line_no: Optional[int] = None):
        self.category = category
        self.message = message
        self.path = path
        self.line_no = line_no
        loc = ""
        if path is not None:
            loc = f" [{path}" + (f":{line_no}" if line_no is not None else "") + "]"
        super().__init__(f"{category}: {message}{loc}")


def _canonical_edge(src: NodeId, dst: NodeId, label: str,
                    stance: Optional[Stance], elapsed: Optional[float]) -> Edge:
    """Orient an edge into storage form, checking relation typing."""
    want = EDGE_TYPING[label]
    if (src.kind, dst.kind) == want:
        pass
    elif (dst.kind, src.kind) == want:
        src, dst = dst, src
    else:
        raise GraphFormatError(
            "mistyped-edge",
            f"{label} edge cannot link {src.kind} and {dst.kind}")
    if label in (FOLLOWERSHIP, CITATION) and dst < src:
        src, dst = dst, src  # undirected homogeneous edges stored key-sorted
    return Edge(src, dst, label, stance, elapsed)


class SocialGraph:
    """Validated social-context graph with per-relation adjacency."""

    def __init__(self, records: Iterable[NodeRecord], edges: Iterable[Edge]):
        self.records: dict[NodeId, NodeRecord] = {}
        for rec in records:
            if rec.node in self.records:
                raise GraphFormatError("duplicate-node", f"{rec.node} defined twice")
            if rec.node.kind not in NODE_KINDS:
                raise GraphFormatError("unknown-kind", f"{rec.node.kind!r}")
            self.records[rec.node] = rec

        self.edges: list[Edge] = []
        self._adj: dict[str, dict[NodeId, list[NodeId]]] = {lb: {} for lb in EDGE_LABELS}
        for e in edges:
            self._add_edge(e)
        self._finalize()

    def _finalize(self) -> None:
        for index in self._adj.values():
            for node, nbrs in index.items():
                index[node] = sorted(nbrs)

    def _add_edge(self, e: Edge) -> None:
        if e.src not in self.records or e.dst not in self.records:
            missing = e.src if e.src not in self.records else e.dst
            raise GraphFormatError("dangling-endpoint", f"{missing} not in entities")
        if e.src == e.dst:
            raise GraphFormatError("self-loop", f"{e.src} linked to itself")
        e = _canonical_edge(e.src, e.dst, e.label, e.stance, e.elapsed_hours)
        if e.label in TIMED:
            if e.elapsed_hours is None:
                raise GraphFormatError("missing-elapsed", f"{e.label} edge lacks elapsed_hours")
            if e.elapsed_hours < 0:
                raise GraphFormatError("negative-elapsed",
                                       f"elapsed_hours {e.elapsed_hours} < 0")
        elif e.elapsed_hours is not None:
            raise GraphFormatError("mistyped-edge",
                                   f"{e.label} edge cannot carry elapsed_hours")
        if e.label == STANCE and e.stance is None:
            raise GraphFormatError("missing-stance", "stance edge lacks a stance label")
        if e.label != STANCE and e.stance is not None:
            raise GraphFormatError("mistyped-edge",
                                   f"{e.label} edge cannot carry a stance label")
        self.edges.append(e)
        self._adj[e.label].setdefault(e.src, []).append(e.dst)
        self._adj[e.label].setdefault(e.dst, []).append(e.src)

    # ------------------------------------------------------------------ views

    def nodes(self, kind: Optional[str] = None) -> list[NodeId]:
        """All nodes (optionally one kind), sorted for reproducibility."""
        out = [n for n in self.records if kind is None or n.kind == kind]
        return sorted(out)

    def has_node(self, node: NodeId) -> bool:
        return node in self.records

    def record(self, node: NodeId) -> NodeRecord:
        return self.records[node]

    def neighbors(self, node: NodeId, relation: str) -> list[NodeId]:
        """Neighbors of ``node`` under one relation, sorted; undirected
        relations include both directions."""
        if node not in self.records:
            raise KeyError(f"unknown node {node}")
        return list(self._adj[relation].get(node, ()))

    def neighbors_multi(self, node: NodeId, relations: Sequence[str]) -> list[NodeId]:
        out: list[NodeId] = []
        for rel in relations:
            out.extend(self.neighbors(node, rel))
        return sorted(out)

    def engagements(self, article: NodeId) -> EngagementSeq:
        """All stance events on an article in (time, user key) order."""
        if article.kind != ARTICLE:
            raise ValueError(f"{article} is not an article node")
        if article not in self.records:
            raise KeyError(f"unknown node {article}")
        items = [
            Engagement(e.src, e.stance, e.elapsed_hours)
            for e in self.edges
            if e.label == STANCE and e.dst == article
        ]
        items.sort(key=lambda it: (it.elapsed_hours, it.user.key))
        return EngagementSeq(article, tuple(items))

    def publisher_of(self, article: NodeId) -> NodeId:
        """The article's publishing source (first by key if several)."""
        pubs = self.neighbors(article, PUBLICATION)
        if not pubs:
            raise ValueError(f"article {article} has no publication edge")
        return pubs[0]

    def split_subgraphs(self) -> tuple["SocialGraph", "SocialGraph"]:
        """Split into the news-source subgraph (citation + publication) and
        the user subgraph (followership). Stance edges belong to neither."""
        ns_records = [r for n, r in self.records.items() if n.kind in (ARTICLE, SOURCE)]
        u_records = [r for n, r in self.records.items() if n.kind == USER]
        ns_edges = [e for e in self.edges if e.label in (CITATION, PUBLICATION)]
        u_edges = [e for e in self.edges if e.label == FOLLOWERSHIP]
        return SocialGraph(ns_records, ns_edges), SocialGraph(u_records, u_edges)

    def counts(self) -> dict[str, int]:
        out = {kind: 0 for kind in NODE_KINDS}
        for n in self.records:
            out[n.kind] += 1
        for lb in EDGE_LABELS:
            out[lb] = sum(1 for e in self.edges if e.label == lb)
        return out

    def article_label(self, article: NodeId) -> Optional[int]:
        """0 for fake, 1 for real, None for unlabeled."""
        lab = self.records[article].label
        if lab is None:
            return None
        return 0 if lab == "fake" else 1


# ---------------------------------------------------------------------------
# Wire format: line-delimited JSON records (UTF-8)
# ---------------------------------------------------------------------------

_ENTITY_KEYS = {"kind", "key", "label", "text", "title"}
_EDGE_KEYS = {"src_kind", "src_key", "dst_kind", "dst_key", "label", "stance", "elapsed_hours"}


def _parse_line(raw: str, path: str, line_no: int) -> dict:
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise GraphFormatError("malformed-line", str(exc), path, line_no) from None
    if not isinstance(obj, dict):
        raise GraphFormatError("malformed-line", "record is not an object", path, line_no)
    return obj


def _iter_records(path: str | Path):
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            yield line_no, _parse_line(raw, str(path), line_no)


def load_graph(entities_path: str | Path, edges_path: str | Path) -> SocialGraph:
    """Load and validate a graph from the two-file wire format.

    Raises GraphFormatError (with category and line number) on the first
    malformed record, dangling endpoint, mistyped edge, or negative
    elapsed time.
    """
    records: list[NodeRecord] = []
    for line_no, obj in _iter_records(entities_path):
        try:
            kind = obj["kind"]
            key = obj["key"]
        except KeyError as exc:
            raise GraphFormatError("missing-field", f"entity lacks {exc}",
                                   str(entities_path), line_no) from None
        if kind not in NODE_KINDS:
            raise GraphFormatError("unknown-kind", f"{kind!r}",
                                   str(entities_path), line_no)
        label = obj.get("label")
        if label in (None, "unlabeled"):
            label = None
        elif label not in ("fake", "real"):
            raise GraphFormatError("bad-label", f"article label {label!r}",
                                   str(entities_path), line_no)
        if label is not None and kind != ARTICLE:
            raise GraphFormatError("bad-label", f"{kind} nodes cannot carry a label",
                                   str(entities_path), line_no)
        records.append(NodeRecord(
            NodeId(kind, str(key)),
            text=str(obj.get("text", "")),
            title=str(obj.get("title", "")),
            label=label,
        ))

    graph = SocialGraph(records, [])
    for line_no, obj in _iter_records(edges_path):
        try:
            src = NodeId(obj["src_kind"], str(obj["src_key"]))
            dst = NodeId(obj["dst_kind"], str(obj["dst_key"]))
            label = obj["label"]
        except KeyError as exc:
            raise GraphFormatError("missing-field", f"edge lacks {exc}",
                                   str(edges_path), line_no) from None
        if label not in EDGE_LABELS:
            raise GraphFormatError("mistyped-edge", f"unknown edge label {label!r}",
                                   str(edges_path), line_no)
        stance = None
        if obj.get("stance") is not None:
            try:
                stance = Stance.from_wire(obj["stance"])
            except ValueError as exc:
                raise GraphFormatError("bad-stance", str(exc),
                                       str(edges_path), line_no) from None
        elapsed = obj.get("elapsed_hours")
        if elapsed is not None:
            elapsed = float(elapsed)
        if label == PUBLICATION and elapsed is None:
            elapsed = 0.0  # publication defines the article's time zero
        try:
            graph._add_edge(Edge(src, dst, label, stance, elapsed))
        except GraphFormatError as exc:
            raise GraphFormatError(exc.category, exc.message,
                                   str(edges_path), line_no) from None

    graph._finalize()
    logger.info("loaded graph: %s", graph.counts())
    return graph


def save_graph(graph: SocialGraph, entities_path: str | Path, edges_path: str | Path) -> None:
    """Serialize a graph back into the wire format (canonical ordering)."""
    with open(entities_path, "w", encoding="utf-8") as fh:
        for node in graph.nodes():
            rec = graph.records[node]
            obj: dict = {"kind": node.kind, "key": node.key}
            if node.kind == ARTICLE:
                obj["label"] = rec.label if rec.label is not None else "unlabeled"
            if rec.text:
                obj["text"] = rec.text
            if rec.title:
                obj["title"] = rec.title
            fh.write(json.dumps(obj, sort_keys=True) + "\n")
    with open(edges_path, "w", encoding="utf-8") as fh:
        key = lambda e: (e.label, e.src, e.dst,
                         -1 if e.stance is None else int(e.stance),
                         -1.0 if e.elapsed_hours is None else e.elapsed_hours)
        for e in sorted(graph.edges, key=key):
            obj = {
                "src_kind": e.src.kind, "src_key": e.src.key,
                "dst_kind": e.dst.kind, "dst_key": e.dst.key,
                "label": e.label,
            }
            if e.stance is not None:
                obj["stance"] = e.stance.wire_name
            if e.elapsed_hours is not None:
                obj["elapsed_hours"] = e.elapsed_hours
            fh.write(json.dumps(obj, sort_keys=True) + "\n")

"""Synthetic social-context dataset generator.

Produces wire-format entity/edge files with the qualitative structure the
training objectives exploit: sources cite within factuality groups, users
follow within attitude groups, fake articles attract an early burst of
skeptical engagement while real articles spread flatter and
support-heavier, and entity texts carry a deliberately weak
class-conditional token signal. A small random embedding table covering
the generator's vocabulary is emitted alongside, so a generated directory
is a complete experiment input.

Everything is drawn from one seeded generator in a fixed order, so equal
configs produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .graph import Stance

STANCE_ORDER = (Stance.NEUTRAL_SUPPORT, Stance.NEGATIVE_SUPPORT,
                Stance.DENY, Stance.REPORT)


@dataclass
class SynthConfig:
    num_articles: int = 1000
    num_sources: int = 100
    num_users: int = 5000
    seed: int = 0

    # source factuality structure
    low_factuality_fraction: float = 0.5
    fake_rate_low: float = 0.75    # P(article fake | low-factuality source)
    fake_rate_high: float = 0.15

    # homogeneous edges
    citations_per_source: float = 4.0
    citation_homophily: float = 0.85
    friends_per_user: float = 6.0
    follower_homophily: float = 0.8
    skeptic_fraction: float = 0.5

    # engagement process, per class
    engagements_mean_fake: float = 16.0
    engagements_mean_real: float = 16.0
    fake_user_bias: float = 0.70   # P(engaging user is a skeptic | fake)
    real_user_bias: float = 0.35
    stance_mix_fake: tuple[float, float, float, float] = (0.10, 0.22, 0.28, 0.40)
    stance_mix_real: tuple[float, float, float, float] = (0.45, 0.12, 0.08, 0.35)
    burst_mean_hours_fake: float = 8.0
    flat_mean_hours_real: float = 150.0
    max_hours: float = 1000.0

    # text signal (kept weak on purpose)
    embedding_dim: int = 16
    common_vocab: int = 220
    class_vocab: int = 25
    article_tokens: int = 40
    class_token_rate: float = 0.15
    source_tokens: int = 30
    source_token_rate: float = 0.12
    user_tokens: int = 12
    user_token_rate: float = 0.25

    def validate(self) -> None:
        if min(self.num_articles, self.num_sources) < 1 or self.num_users < 0:
            raise ValueError("counts must be positive (users may be zero)")
        probs = [self.low_factuality_fraction, self.fake_rate_low,
                 self.fake_rate_high, self.citation_homophily,
                 self.follower_homophily, self.skeptic_fraction,
                 self.fake_user_bias, self.real_user_bias,
                 self.class_token_rate, self.source_token_rate,
                 self.user_token_rate]
        if any(not (0.0 <= p <= 1.0) for p in probs):
            raise ValueError("invalid probabilities: all rates must be in [0, 1]")
        for mix in (self.stance_mix_fake, self.stance_mix_real):
            if len(mix) != 4 or any(p < 0 for p in mix) or abs(sum(mix) - 1.0) > 1e-9:
                raise ValueError(f"invalid probabilities: stance mix {mix} must sum to 1")
        if min(self.engagements_mean_fake, self.engagements_mean_real) < 0:
            raise ValueError("engagement means must be >= 0")
        if min(self.burst_mean_hours_fake, self.flat_mean_hours_real) <= 0:
            raise ValueError("temporal means must be positive")

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "SynthConfig":
        data = dict(data)
        for key in ("stance_mix_fake", "stance_mix_real"):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**data)


def _vocab(cfg: SynthConfig) -> dict[str, list[str]]:
    return {
        "common": [f"tok{i:04d}" for i in range(cfg.common_vocab)],
        "fake": [f"hoaxish{i:02d}" for i in range(cfg.class_vocab)],
        "real": [f"reputable{i:02d}" for i in range(cfg.class_vocab)],
        "low_src": [f"tabloid{i:02d}" for i in range(cfg.class_vocab)],
        "high_src": [f"newsroom{i:02d}" for i in range(cfg.class_vocab)],
        "skeptic": [f"doubter{i:02d}" for i in range(cfg.class_vocab)],
        "supporter": [f"cheerer{i:02d}" for i in range(cfg.class_vocab)],
    }


def _text(rng: np.random.Generator, vocab: dict[str, list[str]],
          lexicon: str, n_tokens: int, lexicon_rate: float) -> str:
    pools = vocab["common"]
    special = vocab[lexicon]
    use_special = rng.random(n_tokens) < lexicon_rate
    toks = []
    for flag in use_special:
        pool = special if flag else pools
        toks.append(pool[rng.integers(len(pool))])
    return " ".join(toks)


def _homophilous_edges(rng: np.random.Generator, groups: np.ndarray,
                       mean_degree: float, homophily: float) -> set[tuple[int, int]]:
    """Undirected edges where each node proposes ~Poisson(mean/2) partners,
    preferring its own group."""
    n = len(groups)
    edges: set[tuple[int, int]] = set()
    if n < 2:
        return edges
    members = {g: np.flatnonzero(groups == g) for g in np.unique(groups)}
    for i in range(n):
        k = rng.poisson(mean_degree / 2.0)
        for _ in range(k):
            same = rng.random() < homophily
            pool = members[groups[i]] if same else np.flatnonzero(groups != groups[i])
            if len(pool) == 0 or (len(pool) == 1 and pool[0] == i):
                continue
            j = int(pool[rng.integers(len(pool))])
            if j == i:
                continue
            edges.add((min(i, j), max(i, j)))
    return edges


def synth_generate(cfg: SynthConfig, out_dir: str | Path) -> dict:
    """Write entities.jsonl, edges.jsonl, and embeddings.txt into
    ``out_dir``; returns a summary of what was generated."""
    cfg.validate()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(cfg.seed)
    vocab = _vocab(cfg)

    # -- sources ------------------------------------------------------------
    src_keys = [f"s{i:04d}" for i in range(cfg.num_sources)]
    src_low = rng.random(cfg.num_sources) < cfg.low_factuality_fraction
    src_text = [
        _text(rng, vocab, "low_src" if low else "high_src",
              cfg.source_tokens, cfg.source_token_rate)
        for low in src_low
    ]
    citation_edges = _homophilous_edges(
        rng, src_low.astype(int), cfg.citations_per_source, cfg.citation_homophily)

    # -- users ---------------------------------------------------------------
    user_keys = [f"u{i:05d}" for i in range(cfg.num_users)]
    user_skeptic = rng.random(cfg.num_users) < cfg.skeptic_fraction
    user_text = [
        _text(rng, vocab, "skeptic" if sk else "supporter",
              cfg.user_tokens, cfg.user_token_rate)
        for sk in user_skeptic
    ]
    follow_edges = _homophilous_edges(
        rng, user_skeptic.astype(int), cfg.friends_per_user, cfg.follower_homophily)

    # -- articles, publications, engagements ---------------------------------
    art_keys = [f"a{i:04d}" for i in range(cfg.num_articles)]
    publishers = rng.integers(cfg.num_sources, size=cfg.num_articles)
    fake_rate = np.where(src_low[publishers], cfg.fake_rate_low, cfg.fake_rate_high)
    art_fake = rng.random(cfg.num_articles) < fake_rate
    art_text = [
        _text(rng, vocab, "fake" if fk else "real",
              cfg.article_tokens, cfg.class_token_rate)
        for fk in art_fake
    ]
    art_title = [
        _text(rng, vocab, "fake" if fk else "real", 6, cfg.class_token_rate)
        for fk in art_fake
    ]

    skeptics = np.flatnonzero(user_skeptic)
    supporters = np.flatnonzero(~user_skeptic)
    engagements: list[tuple[int, int, Stance, float]] = []  # (user, article, stance, hours)
    for ai in range(cfg.num_articles):
        fake = bool(art_fake[ai])
        mean_k = cfg.engagements_mean_fake if fake else cfg.engagements_mean_real
        k = min(int(rng.poisson(mean_k)), cfg.num_users)
        if k == 0 or cfg.num_users == 0:
            continue
        bias = cfg.fake_user_bias if fake else cfg.real_user_bias
        weights = np.zeros(cfg.num_users)
        if len(skeptics) and len(supporters):
            weights[skeptics] = bias / len(skeptics)
            weights[supporters] = (1.0 - bias) / len(supporters)
        else:
            weights[:] = 1.0 / cfg.num_users
        users = rng.choice(cfg.num_users, size=k, replace=False, p=weights)
        mix = cfg.stance_mix_fake if fake else cfg.stance_mix_real
        stances = rng.choice(4, size=k, p=np.asarray(mix))
        scale = cfg.burst_mean_hours_fake if fake else cfg.flat_mean_hours_real
        hours = np.minimum(rng.exponential(scale, size=k), cfg.max_hours)
        for u, st, h in zip(users, stances, hours):
            engagements.append((int(u), ai, STANCE_ORDER[int(st)], round(float(h), 3)))

    # -- embeddings over the full vocabulary ----------------------------------
    all_terms = sorted({t for pool in vocab.values() for t in pool})
    emb = rng.normal(0.0, 0.3, size=(len(all_terms), cfg.embedding_dim))

    # -- write ----------------------------------------------------------------
    entities_path = out / "entities.jsonl"
    edges_path = out / "edges.jsonl"
    embeddings_path = out / "embeddings.txt"
    with open(entities_path, "w", encoding="utf-8") as fh:
        for i, key in enumerate(art_keys):
            fh.write(json.dumps({
                "kind": "article", "key": key,
                "label": "fake" if art_fake[i] else "real",
                "text": art_text[i], "title": art_title[i],
            }, sort_keys=True) + "\n")
        for i, key in enumerate(src_keys):
            fh.write(json.dumps({
                "kind": "source", "key": key, "text": src_text[i],
            }, sort_keys=True) + "\n")
        for i, key in enumerate(user_keys):
            fh.write(json.dumps({
                "kind": "user", "key": key, "text": user_text[i],
            }, sort_keys=True) + "\n")

    with open(edges_path, "w", encoding="utf-8") as fh:
        for i, j in sorted(citation_edges):
            fh.write(json.dumps({
                "src_kind": "source", "src_key": src_keys[i],
                "dst_kind": "source", "dst_key": src_keys[j],
                "label": "citation",
            }, sort_keys=True) + "\n")
        for i, j in sorted(follow_edges):
            fh.write(json.dumps({
                "src_kind": "user", "src_key": user_keys[i],
                "dst_kind": "user", "dst_key": user_keys[j],
                "label": "followership",
            }, sort_keys=True) + "\n")
        for ai, key in enumerate(art_keys):
            fh.write(json.dumps({
                "src_kind": "source", "src_key": src_keys[publishers[ai]],
                "dst_kind": "article", "dst_key": key,
                "label": "publication", "elapsed_hours": 0.0,
            }, sort_keys=True) + "\n")
        for u, ai, stance, hours in engagements:
            fh.write(json.dumps({
                "src_kind": "user", "src_key": user_keys[u],
                "dst_kind": "article", "dst_key": art_keys[ai],
                "label": "stance", "stance": stance.wire_name,
                "elapsed_hours": hours,
            }, sort_keys=True) + "\n")

    with open(embeddings_path, "w", encoding="utf-8") as fh:
        for term, vec in zip(all_terms, emb):
            fh.write(term + " " + " ".join(f"{v:.6f}" for v in vec) + "\n")

    return {
        "entities": str(entities_path),
        "edges": str(edges_path),
        "embeddings": str(embeddings_path),
        "num_articles": cfg.num_articles,
        "num_fake": int(art_fake.sum()),
        "num_sources": cfg.num_sources,
        "num_users": cfg.num_users,
        "num_engagements": len(engagements),
        "num_citations": len(citation_edges),
        "num_followerships": len(follow_edges),
    }

"""Command-line surface.

Subcommands: synth, ingest-check, train, eval, attention, export-reps.
Every subcommand is deterministic given its config (seeds included); a
failed validation writes nothing and exits nonzero with a categorized
error line on stderr.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np
import torch

from . import report
from .config import RunConfig
from .encoder import GraphIndex
from .evaluate import (auc, export_source_representations, homogeneity,
                       linear_probe, model_attention_profile, optics_cluster,
                       source_factuality_labels)
from .features import (FeatureTable, WordEmbeddingTable, build_feature_table,
                       load_stopwords)
from .graph import ARTICLE, GraphFormatError, SocialGraph, load_graph
from .objectives import (DTYPE, build_article_batch, load_checkpoint,
                         predict_batch, save_checkpoint, stratified_split,
                         train)
from .synth import SynthConfig, synth_generate


def _load_dataset(cfg: RunConfig) -> tuple[SocialGraph, FeatureTable]:
    graph = load_graph(cfg.entities, cfg.edges)
    stop = load_stopwords(cfg.stopwords)
    if cfg.embeddings:
        emb = WordEmbeddingTable.load(cfg.embeddings)
    else:
        emb = WordEmbeddingTable.empty(0)
    features = build_feature_table(graph, emb, stop, cfg.vocab_size)
    return graph, features


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_synth(args) -> int:
    data = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
    if args.seed is not None:
        data["seed"] = args.seed
    if args.articles is not None:
        data["num_articles"] = args.articles
    if args.sources is not None:
        data["num_sources"] = args.sources
    if args.users is not None:
        data["num_users"] = args.users
    cfg = SynthConfig.from_dict(data)
    cfg.validate()
    summary = synth_generate(cfg, args.out)
    with open(Path(args.out) / "synth_config.json", "w", encoding="utf-8") as fh:
        fh.write(cfg.to_json() + "\n")
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def cmd_ingest_check(args) -> int:
    graph = load_graph(args.entities, args.edges)
    counts = graph.counts()
    labeled = sum(1 for a in graph.nodes(ARTICLE)
                  if graph.article_label(a) is not None)
    counts["labeled_articles"] = labeled
    print(json.dumps(counts, indent=2, sort_keys=True))
    return 0


def _resolve_run_config(args) -> RunConfig:
    cfg = RunConfig.load(args.config)
    train_cfg = cfg.train
    if getattr(args, "train_frac", None) is not None:
        train_cfg = dataclasses.replace(train_cfg, train_fraction=args.train_frac)
    if getattr(args, "seed", None) is not None:
        train_cfg = dataclasses.replace(train_cfg, seed=args.seed)
    if getattr(args, "epochs", None) is not None:
        train_cfg = dataclasses.replace(train_cfg, epochs=args.epochs)
    if getattr(args, "no_time", False):
        train_cfg = dataclasses.replace(train_cfg, disable_time=True)
    if getattr(args, "no_stance_loss", False):
        train_cfg = dataclasses.replace(train_cfg, disable_stance_loss=True)
    if getattr(args, "no_proximity_loss", False):
        train_cfg = dataclasses.replace(train_cfg, disable_proximity_loss=True)
    cfg = dataclasses.replace(cfg, train=train_cfg)
    if getattr(args, "out", None):
        cfg = dataclasses.replace(cfg, out_dir=args.out)
    return cfg


def cmd_train(args) -> int:
    cfg = _resolve_run_config(args)
    cfg.validate()
    graph, features = _load_dataset(cfg)
    result = train(graph, features, cfg.train)

    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg.dump(out / "config_resolved.json")
    save_checkpoint(out / "checkpoint.npz", result.model, cfg.train)
    _write_csv(out / "train_log.csv",
               ["epoch", "l_prox", "l_stance", "l_news", "l_total", "val_auc"],
               [[r.epoch, repr(r.l_prox), repr(r.l_stance), repr(r.l_news),
                 repr(r.l_total), repr(r.val_auc)] for r in result.log])
    report.save_training_curves(result.log, out / "train_curves.png")
    print(json.dumps({
        "out_dir": str(out),
        "epochs_run": len(result.log),
        "train_articles": len(result.train_articles),
        "heldout_articles": len(result.heldout_articles),
        "final_val_auc": result.log[-1].val_auc if result.log else None,
    }, indent=2, sort_keys=True))
    return 0


def _load_model_for(cfg: RunConfig, features: FeatureTable, checkpoint: str):
    model, train_cfg = load_checkpoint(checkpoint)
    if model.input_dim != features.input_dim:
        raise ValueError(
            f"dimension-mismatch: checkpoint input dim {model.input_dim} != "
            f"dataset feature dim {features.input_dim}")
    return model, train_cfg


def cmd_eval(args) -> int:
    cfg = _resolve_run_config(args)
    cfg.validate()
    graph, features = _load_dataset(cfg)
    model, train_cfg = _load_model_for(cfg, features, args.checkpoint)
    gi = GraphIndex(graph)
    X = torch.as_tensor(features.matrix, dtype=DTYPE)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    # Test AUC on the heldout split reconstructed from the training config.
    _, heldout = stratified_split(graph, train_cfg.train_fraction, train_cfg.seed)
    metrics: list[tuple[str, object]] = []
    if heldout:
        batch = build_article_batch(gi, heldout, train_cfg)
        probs, _, _ = predict_batch(model, gi, X, batch, train_cfg, tag="eval")
        labels = [graph.article_label(a) for a in heldout]
        roc = auc(probs.numpy(), labels)
        metrics.append(("test_auc", roc.auc))
        metrics.append(("num_test_articles", len(heldout)))
        report.save_roc_curve(roc, out / "roc_curve.png")
        _write_csv(out / "predictions.csv", ["key", "prob_real", "label"],
                   [[a.key, repr(float(p)), y]
                    for a, p, y in zip(heldout, probs.numpy(), labels)])

    # Intrinsic: cluster news representations of all labeled articles.
    labeled = [a for a in graph.nodes(ARTICLE) if graph.article_label(a) is not None]
    if len(labeled) >= cfg.optics_min_pts:
        batch = build_article_batch(gi, labeled, train_cfg)
        _, reps, _ = predict_batch(model, gi, X, batch, train_cfg, tag="eval")
        pts = reps.numpy()
        norms = np.linalg.norm(pts, axis=1, keepdims=True)
        pts = pts / np.maximum(norms, 1e-12)
        assignment = optics_cluster(pts, cfg.optics_min_pts, cfg.optics_max_eps)
        truth = np.array([graph.article_label(a) for a in labeled])
        metrics.append(("optics_homogeneity", homogeneity(assignment, truth)))
        metrics.append(("optics_clusters", assignment.num_clusters))

    # Extrinsic: source-factuality probe on exported representations.
    src_reps = export_source_representations(model, gi, features, train_cfg)
    _write_reps(out, src_reps)
    fact = source_factuality_labels(graph)
    keyed = [(i, fact[k]) for i, k in enumerate(src_reps.keys) if k in fact]
    if keyed and len({y for _, y in keyed}) == 2:
        idx = np.array([i for i, _ in keyed])
        y = np.array([y for _, y in keyed])
        rng = np.random.default_rng(train_cfg.seed)
        order = rng.permutation(len(idx))
        n_train = max(1, int(round(cfg.probe_train_fraction * len(idx))))
        tr, te = order[:n_train], order[n_train:]
        if len(te) and len({int(v) for v in y[tr]}) == 2 and len({int(v) for v in y[te]}) == 2:
            full = linear_probe(src_reps.full[idx[tr]], y[tr],
                                src_reps.full[idx[te]], y[te])
            base = linear_probe(src_reps.baseline[idx[tr]], y[tr],
                                src_reps.baseline[idx[te]], y[te])
            metrics.append(("probe_auc_full", full.auc))
            metrics.append(("probe_auc_baseline", base.auc))

    profile = model_attention_profile(model, gi, X, train_cfg)
    _write_profile(out, profile)
    report.save_attention_profile(profile, out / "attention_profile.png")

    _write_csv(out / "metrics.csv", ["metric", "value"],
               [[k, repr(v) if isinstance(v, float) else v] for k, v in metrics])
    print(json.dumps({k: v for k, v in metrics}, indent=2, sort_keys=True))
    return 0


def _write_profile(out: Path, profile) -> None:
    rows = []
    for cls_name, masses in (("fake", profile.fake_mass), ("real", profile.real_mass)):
        for (lo, hi), mass in zip(profile.windows, masses):
            rows.append([cls_name, repr(lo), repr(hi), repr(float(mass))])
    _write_csv(out / "attention_profile.csv",
               ["class", "window_start_h", "window_end_h", "mass"], rows)


def _write_reps(out: Path, reps) -> None:
    for name, mat in (("source_reps.csv", reps.full),
                      ("source_reps_baseline.csv", reps.baseline)):
        header = ["key"] + [f"v{i}" for i in range(mat.shape[1] if len(mat) else 0)]
        _write_csv(out / name, header,
                   [[k] + [repr(float(v)) for v in row]
                    for k, row in zip(reps.keys, mat)])


def cmd_attention(args) -> int:
    cfg = _resolve_run_config(args)
    cfg.validate()
    graph, features = _load_dataset(cfg)
    model, train_cfg = _load_model_for(cfg, features, args.checkpoint)
    gi = GraphIndex(graph)
    X = torch.as_tensor(features.matrix, dtype=DTYPE)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    profile = model_attention_profile(model, gi, X, train_cfg)
    _write_profile(out, profile)
    report.save_attention_profile(profile, out / "attention_profile.png")
    print(json.dumps({
        "fake_mass": [float(v) for v in profile.fake_mass],
        "real_mass": [float(v) for v in profile.real_mass],
    }, indent=2, sort_keys=True))
    return 0


def cmd_export_reps(args) -> int:
    cfg = _resolve_run_config(args)
    cfg.validate()
    graph, features = _load_dataset(cfg)
    model, train_cfg = _load_model_for(cfg, features, args.checkpoint)
    gi = GraphIndex(graph)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    reps = export_source_representations(model, gi, features, train_cfg)
    _write_reps(out, reps)
    print(json.dumps({"sources": len(reps.keys),
                      "full_dim": int(reps.full.shape[1]) if len(reps.keys) else 0,
                      "baseline_dim": int(reps.baseline.shape[1]) if len(reps.keys) else 0},
                     indent=2, sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="credgraph",
        description="Social-context graph learning for news credibility")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="JSON file of generator settings")
    p.add_argument("--seed", type=int)
    p.add_argument("--articles", type=int)
    p.add_argument("--sources", type=int)
    p.add_argument("--users", type=int)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ingest-check", help="validate a dataset and print counts")
    p.add_argument("--entities", required=True)
    p.add_argument("--edges", required=True)
    p.set_defaults(func=cmd_ingest_check)

    def add_train_overrides(p):
        p.add_argument("--config", required=True)
        p.add_argument("--out")
        p.add_argument("--seed", type=int)
        p.add_argument("--train-frac", type=float, dest="train_frac")
        p.add_argument("--epochs", type=int)
        p.add_argument("--no-time", action="store_true", dest="no_time",
                       help="ablation: zero the engagement time feature")
        p.add_argument("--no-stance-loss", action="store_true", dest="no_stance_loss",
                       help="ablation: drop the stance objective")
        p.add_argument("--no-proximity-loss", action="store_true",
                       dest="no_proximity_loss",
                       help="ablation: drop the proximity objective")

    p = sub.add_parser("train", help="train a model and write a checkpoint")
    add_train_overrides(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint")
    add_train_overrides(p)
    p.add_argument("--checkpoint", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("attention", help="attention mass by time window")
    add_train_overrides(p)
    p.add_argument("--checkpoint", required=True)
    p.set_defaults(func=cmd_attention)

    p = sub.add_parser("export-reps", help="export source representations")
    add_train_overrides(p)
    p.add_argument("--checkpoint", required=True)
    p.set_defaults(func=cmd_export_reps)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GraphFormatError as exc:
        print(f"error: {exc.category}: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: missing-file: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: invalid-config: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

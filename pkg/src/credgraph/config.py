"""Run configuration: one flat key-value JSON file plus flag overrides.

The file's keys are exactly the field names below (training fields
included, unnested). Validation happens before any work: referenced paths
must exist and the dimension relations must hold, so an invalid config
never produces partial outputs.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

from .objectives import TrainConfig


@dataclass
class RunConfig:
    entities: str = ""
    edges: str = ""
    embeddings: Optional[str] = None   # omit for TF-IDF-only features
    stopwords: Optional[str] = None    # omit for the packaged list
    out_dir: str = "run_out"
    vocab_size: int = 5000
    optics_min_pts: int = 5
    optics_max_eps: float = 0.5
    probe_train_fraction: float = 0.7
    train: TrainConfig = dataclasses.field(default_factory=TrainConfig)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        data = dict(data)
        train_names = {f.name for f in fields(TrainConfig)}
        train_data = {k: data.pop(k) for k in list(data) if k in train_names}
        if "fanouts" in train_data:
            train_data["fanouts"] = tuple(train_data["fanouts"])
        run_names = {f.name for f in fields(cls)} - {"train"}
        unknown = set(data) - run_names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(train=TrainConfig(**train_data), **data)

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError(f"{path}: config must be a flat JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "train"}
        out.update(dataclasses.asdict(self.train))
        out["fanouts"] = list(self.train.fanouts)
        return out

    def dump(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def validate(self, need_dataset: bool = True) -> None:
        self.train.validate()
        if not (0 < self.probe_train_fraction < 1):
            raise ValueError("probe_train_fraction must be in (0, 1)")
        if self.vocab_size < 1:
            raise ValueError("vocab_size must be positive")
        if self.optics_min_pts < 2 or self.optics_max_eps <= 0:
            raise ValueError("optics parameters out of range")
        if need_dataset:
            for name in ("entities", "edges"):
                p = getattr(self, name)
                if not p:
                    raise ValueError(f"config is missing the {name} path")
                if not Path(p).exists():
                    raise FileNotFoundError(f"{name} file not found: {p}")
            for name in ("embeddings", "stopwords"):
                p = getattr(self, name)
                if p is not None and not Path(p).exists():
                    raise FileNotFoundError(f"{name} file not found: {p}")

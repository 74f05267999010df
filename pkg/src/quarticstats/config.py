"""Run configuration: a flat key=value file, overridden by command-line flags."""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

SCHEMA = "qc1"


def default_cache_dir() -> Path:
    return Path(os.environ.get("QUARTIC_CACHE", Path.home() / ".cache" / "quarticstats"))


@dataclass
class RunConfig:
    cache_dir: Path = field(default_factory=default_cache_dir)
    threads: int = 1
    height_bound: int = 10**4
    prime_list: tuple = (3, 5, 7)
    box_constant: float = 4.0
    neighborhood_radius: int = 2
    rng_seed: int = 0
    output_format: str = "csv"

    def __post_init__(self):
        self.cache_dir = Path(self.cache_dir)
        if self.output_format not in ("csv", "json", "jsonl"):
            raise ValueError(f"unknown output format {self.output_format!r}")

    def digest(self) -> str:
        # the cache location does not change results, so it stays out of the hash
        d = {k: v for k, v in asdict(self).items() if k != "cache_dir"}
        d["prime_list"] = list(d["prime_list"])
        return hashlib.sha1(json.dumps(d, sort_keys=True).encode()).hexdigest()[:12]

    def update(self, **kw) -> "RunConfig":
        vals = asdict(self)
        vals.update({k: v for k, v in kw.items() if v is not None})
        return RunConfig(**vals)

    @classmethod
    def parse_text(cls, text: str) -> dict:
        """key=value lines; '#' starts a comment."""
        types = {f.name: f.type for f in fields(cls)}
        out = {}
        for n, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"line {n}: expected key=value")
            k, v = (s.strip() for s in line.split("=", 1))
            if k not in types:
                raise ValueError(f"line {n}: unknown key {k!r}")
            out[k] = _convert(k, v)
        return out

    @classmethod
    def load(cls, path: str | Path | None = None, **overrides) -> "RunConfig":
        vals = cls.parse_text(Path(path).read_text()) if path else {}
        if "QUARTIC_CACHE" in os.environ:
            vals["cache_dir"] = os.environ["QUARTIC_CACHE"]
        vals.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**vals)


def _convert(key: str, v: str):
    if key in ("threads", "neighborhood_radius", "rng_seed"):
        return int(v)
    if key == "height_bound":
        return int(float(v))
    if key == "box_constant":
        return float(v)
    if key == "prime_list":
        return tuple(int(x) for x in v.replace(" ", "").split(",") if x)
    return v

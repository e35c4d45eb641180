"""Flat ``key = value`` experiment configuration."""
from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path


class ConfigError(ValueError):
    pass


PROBLEMS = ("osp", "dst", "cg", "custom-zdd")
ADVERSARIES = ("reset-bernoulli", "zero")


@dataclass
class ExperimentConfig:
    problem: str = "osp"
    grid_rows: int = 3
    grid_cols: int = 3
    graph_file: str | None = None
    zdd_file: str | None = None
    alpha: float = 3
    horizon: int = 1000
    trials: int = 1
    seed: int = 0
    reset_prob: float = 0.1
    kappa: float = 10.0
    players: int = 2
    output: str = "results.csv"
    adversary: str = "reset-bernoulli"
    workers: int = 1

    def validate(self) -> "ExperimentConfig":
        if self.problem not in PROBLEMS:
            raise ConfigError(f"problem must be one of {', '.join(PROBLEMS)}")
        if self.adversary not in ADVERSARIES:
            raise ConfigError(f"adversary must be one of {', '.join(ADVERSARIES)}")
        if self.alpha not in (2, 3):
            raise ConfigError("alpha must be 2 or 3")
        if self.horizon < 1:
            raise ConfigError("horizon must be >= 1")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if not 0 <= self.reset_prob <= 1:
            raise ConfigError("reset_prob must lie in [0, 1]")
        if self.problem == "cg" and self.players < 1:
            raise ConfigError("players must be >= 1")
        if self.problem == "custom-zdd" and not self.zdd_file:
            raise ConfigError("custom-zdd needs zdd_file")
        if self.graph_file is None and self.zdd_file is None and (self.grid_rows < 2 or self.grid_cols < 2):
            raise ConfigError("grid needs at least 2 rows and 2 columns")
        return self


def parse_config(text: str, base_dir: Path | None = None) -> ExperimentConfig:
    """Parse config text; relative file paths resolve against ``base_dir``."""
    types = {f.name: f.type for f in fields(ExperimentConfig)}
    values = {}
    for k, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {k}: expected 'key = value'")
        key, value = (x.strip() for x in line.split("=", 1))
        if key not in types:
            raise ConfigError(f"line {k}: unknown key '{key}'")
        kind = types[key]
        try:
            if kind == "int":
                values[key] = int(value)
            elif kind == "float":
                values[key] = float(value)
            else:
                values[key] = value
        except ValueError:
            raise ConfigError(f"line {k}: bad value for {key}: {value!r}") from None
    cfg = ExperimentConfig(**values)
    if base_dir is not None:
        for key in ("graph_file", "zdd_file", "output"):
            p = getattr(cfg, key)
            if p is not None and not Path(p).is_absolute():
                setattr(cfg, key, str(base_dir / p))
    return cfg.validate()


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    return parse_config(path.read_text(), base_dir=path.parent)

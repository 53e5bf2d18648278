"""Flat key = value configuration, located by MODSPACE_CONFIG or a path."""

from __future__ import annotations

import configparser
import dataclasses
import os
from dataclasses import dataclass

ENV_VAR = "MODSPACE_CONFIG"


@dataclass(frozen=True)
class Config:
    lap_steps: int = 24
    lap_budget: int = 2_000_000
    snap: float = 1e-9
    workers: int = 0  # 0: one per CPU
    blowup_threshold: float = 1e3
    center_tol: float = 1e-10
    hyperbolic_budget: int = 2000
    barrier_mu_max: float = 5000.0
    barrier_samples: int = 50
    demo_tol: float = 0.02
    demo_levels: tuple = ()
    probe_samples: int = 64
    anchor_right: tuple = ()  # (sigma1, sigma2) override for the wedge side
    anchor_left: tuple = ()
    center_seeds: tuple = ()  # (mu, a) pairs tried before the built-in seeds
    plot_bands: tuple = (0.1, 0.2, 0.3, 0.4, 0.48, 0.55, 0.6, 0.65, 0.69)

    def resolved_workers(self) -> int:
        return self.workers if self.workers > 0 else (os.cpu_count() or 1)

    def with_overrides(self, **kw) -> "Config":
        kw = {k: v for k, v in kw.items() if v is not None}
        return dataclasses.replace(self, **kw)


def _parse(name: str, raw: str, default):
    raw = raw.strip()
    if isinstance(default, bool):
        return raw.lower() in ("1", "true", "yes", "on")
    if isinstance(default, int):
        return int(float(raw))
    if isinstance(default, float):
        return float(raw)
    if isinstance(default, tuple):
        if not raw:
            return ()
        if name == "center_seeds":
            return tuple(tuple(float(x) for x in item.split(":")) for item in raw.split(","))
        return tuple(float(x) for x in raw.replace(";", ",").split(","))
    return raw


def parse_assignments(pairs, base: Config | None = None) -> Config:
    """Apply ``key=value`` strings (e.g. from the command line) to a Config."""
    cfg = base or Config()
    fields = {f.name: f for f in dataclasses.fields(Config)}
    upd = {}
    for item in pairs:
        if "=" not in item:
            raise ValueError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        k = k.strip()
        if k not in fields:
            raise ValueError(f"unknown configuration key {k!r}")
        upd[k] = _parse(k, v, getattr(cfg, k))
    return dataclasses.replace(cfg, **upd)


def load_config(path: str | None = None) -> Config:
    path = path or os.environ.get(ENV_VAR)
    if not path:
        return Config()
    with open(path) as fh:
        text = fh.read()
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.read_string("[modspace]\n" + text)
    return parse_assignments([f"{k}={v}" for k, v in cp["modspace"].items()])

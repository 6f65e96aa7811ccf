"""Service configuration from flags and environment."""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional


@dataclass
class ServiceConfig:
    port: int = 8460
    data_dir: Path = Path("./data")
    inventory_path: Optional[Path] = None
    token: str = ""
    tick_s: float = 1.0  # simulated seconds per tick
    tick_mode: str = "auto"  # auto: wall-clock timer drives ticks; manual: POST /sim/tick
    time_scale: float = 1.0  # simulated seconds per wall second in auto mode
    durations: dict = field(default_factory=dict)
    baseline: dict = field(default_factory=dict)

    @classmethod
    def from_env(cls, **overrides) -> "ServiceConfig":
        cfg = cls()
        if os.environ.get("OOCRAN_PORT"):
            cfg.port = int(os.environ["OOCRAN_PORT"])
        if os.environ.get("OOCRAN_DATA_DIR"):
            cfg.data_dir = Path(os.environ["OOCRAN_DATA_DIR"])
        if os.environ.get("OOCRAN_INVENTORY"):
            cfg.inventory_path = Path(os.environ["OOCRAN_INVENTORY"])
        if os.environ.get("OOCRAN_TOKEN"):
            cfg.token = os.environ["OOCRAN_TOKEN"]
        for key, value in overrides.items():
            if value is not None:
                setattr(cfg, key, value)
        cfg.data_dir = Path(cfg.data_dir)
        if cfg.inventory_path is not None:
            cfg.inventory_path = Path(cfg.inventory_path)
        return cfg

    @property
    def snapshot_path(self) -> Path:
        return self.data_dir / "snapshot.json"

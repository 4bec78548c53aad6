"""Single structured config document for the pipeline.

Loaded from an explicit path or the ANANSI_CONFIG environment variable;
relative paths inside the document resolve against the document's
directory so a fixture tree can be shipped and used in place.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

ENV_VAR = "ANANSI_CONFIG"


@dataclass
class AppConfig:
    store_path: Path = Path("anansi-events.jsonl")
    scenario_dir: Path | None = None
    rates_path: Path | None = None
    ledgers_path: Path | None = None
    asn_table_path: Path | None = None
    baseline_path: Path | None = None
    blocklists_dir: Path | None = None
    resolutions_path: Path | None = None     # domain -> [ip] fixture for attribution
    wallet_domains: dict[str, list[str]] = field(default_factory=dict)
    dataset_wallets: list[str] = field(default_factory=list)  # beyond traced ledgers
    api_token: str | None = None
    jaccard_threshold: float = 0.8
    refund_tolerance: float = 0.01
    ghosting_days: float = 30.0
    fronting_visits: int = 10

    @classmethod
    def from_file(cls, path: str | Path) -> "AppConfig":
        path = Path(path)
        doc = json.loads(path.read_text("utf-8"))
        base = path.parent

        def resolve(key: str) -> Path | None:
            value = doc.get(key)
            if value is None:
                return None
            candidate = Path(value)
            return candidate if candidate.is_absolute() else base / candidate

        config = cls()
        for key in ("store_path", "scenario_dir", "rates_path", "ledgers_path",
                    "asn_table_path", "baseline_path", "blocklists_dir",
                    "resolutions_path"):
            resolved = resolve(key)
            if resolved is not None:
                setattr(config, key, resolved)
        for key in ("api_token",):
            if key in doc:
                setattr(config, key, doc[key])
        for key in ("jaccard_threshold", "refund_tolerance", "ghosting_days"):
            if key in doc:
                setattr(config, key, float(doc[key]))
        if "fronting_visits" in doc:
            config.fronting_visits = int(doc["fronting_visits"])
        if "wallet_domains" in doc:
            config.wallet_domains = {
                str(wallet): list(domains)
                for wallet, domains in doc["wallet_domains"].items()
            }
        if "dataset_wallets" in doc:
            config.dataset_wallets = [str(w) for w in doc["dataset_wallets"]]
        return config


def load_config(path: str | Path | None = None) -> AppConfig:
    if path is not None:
        return AppConfig.from_file(path)
    env_path = os.environ.get(ENV_VAR)
    if env_path:
        return AppConfig.from_file(env_path)
    return AppConfig()

"""REST service and command line for running and inspecting sessions."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from voicecare.capture import RecordPolicy
from voicecare.providers import ProviderConfig
from voicecare.session import SessionPolicy

ENV_PREFIX = "VOICECARE"


@dataclass
class GatewayConfig:
    """Runtime settings, assembled from flags and VOICECARE_* variables."""

    data_root: Path = Path("voicecare-data")
    provider_mode: str = "mock"
    remote_base_url: str | None = None
    host: str = "127.0.0.1"
    port: int = 8080
    max_repeats: int = 2
    chunk_seconds: float = 4.0
    silence_rms_threshold: float = 0.01

    def __post_init__(self):
        self.data_root = Path(self.data_root)

    @classmethod
    def from_env(cls, **overrides) -> "GatewayConfig":
        env = {
            "data_root": os.environ.get(f"{ENV_PREFIX}_DATA_ROOT"),
            "provider_mode": os.environ.get(f"{ENV_PREFIX}_PROVIDER_MODE"),
            "remote_base_url": os.environ.get(f"{ENV_PREFIX}_REMOTE_URL"),
            "host": os.environ.get(f"{ENV_PREFIX}_HOST"),
            "port": os.environ.get(f"{ENV_PREFIX}_PORT"),
        }
        merged = {k: v for k, v in env.items() if v is not None}
        merged.update({k: v for k, v in overrides.items() if v is not None})
        if "port" in merged:
            merged["port"] = int(merged["port"])
        return cls(**merged)

    def provider_config(self) -> ProviderConfig:
        return ProviderConfig(mode=self.provider_mode, remote_base_url=self.remote_base_url)

    def session_policy(self) -> SessionPolicy:
        return SessionPolicy(
            max_repeats=self.max_repeats,
            record=RecordPolicy(
                chunk_seconds=self.chunk_seconds,
                silence_rms_threshold=self.silence_rms_threshold,
            ),
        )

    def ensure_data_root(self) -> Path:
        """The data root must exist and be writable before serving."""
        self.data_root.mkdir(parents=True, exist_ok=True)
        probe = self.data_root / ".write-probe"
        probe.write_text("ok")
        probe.unlink()
        return self.data_root

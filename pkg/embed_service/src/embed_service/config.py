"""Service configuration."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class ServiceConfig:
    model: str = "charproj-v1"   # "charproj-v1" or "st:<sentence-transformers id>"
    host: str = "127.0.0.1"
    port: int = 8080
    max_batch: int = 128
    max_request_chars: int = 1_000_000
    device: str = "cpu"
    normalize: bool = True
    model_dir: str = "models"

    def __post_init__(self):
        if self.max_batch < 1:
            raise ValueError("max_batch must be >= 1")
        if self.max_request_chars < 1:
            raise ValueError("max_request_chars must be >= 1")

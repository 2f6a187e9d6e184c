"""Shared provider types: language verdicts, embedding vectors, configuration."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from lokg.errors import ProviderTagMismatch

SUPPORTED_LANGUAGES = ("en", "de")


@dataclass(frozen=True)
class LanguageVerdict:
    lang: str
    confidence: float

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence out of [0,1]: {self.confidence}")


@dataclass(frozen=True)
class TranslationResult:
    text: str
    source: str
    target: str
    translated_by: str


@dataclass
class EmbeddingVector:
    """Fixed-length real vector plus the tag of the provider+model that made it."""

    values: np.ndarray
    dim: int
    provider_tag: str

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.dim,):
            raise ValueError(f"expected shape ({self.dim},), got {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("embedding contains non-finite entries")


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Cosine similarity; refuses to compare vectors from different providers."""
    if a.provider_tag != b.provider_tag:
        raise ProviderTagMismatch(f"{a.provider_tag!r} vs {b.provider_tag!r}")
    na = float(np.linalg.norm(a.values))
    nb = float(np.linalg.norm(b.values))
    if na == 0.0 or nb == 0.0:
        return 0.0
    value = float(np.dot(a.values, b.values)) / (na * nb)
    return max(-1.0, min(1.0, value))


@dataclass
class ProviderConfig:
    """How one text service (detect/translate/embed) is reached."""

    mode: str = "builtin"  # builtin | external
    endpoint: str | None = None
    timeout_s: float = 10.0
    batch_size: int = 32
    model_name: str = ""
    max_attempts: int = 3
    backoff_base_s: float = 0.25
    extra_lexicons: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.mode not in ("builtin", "external"):
            raise ValueError(f"unknown provider mode {self.mode!r}")
        if self.mode == "external" and not self.endpoint:
            raise ValueError("external mode requires an endpoint")
        if self.mode == "builtin" and self.endpoint:
            raise ValueError("builtin mode must not set an endpoint")
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")

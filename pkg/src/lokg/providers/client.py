"""HTTP clients for the provider wire protocol (version header X-LOKG-Proto: 1).

POST /detect    {texts:[str]}                  -> {verdicts:[{lang, confidence}]}
POST /translate {source, target, texts:[str]}  -> {texts:[str]}
POST /embed     {model, texts:[str]}           -> {dim, vectors:[[float]]}

503 responses are retried with exponential backoff (base 250 ms, max 3
attempts); 400 means the request itself is broken and is never retried.
Batches submitted concurrently are re-associated with their request index,
never by arrival order.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import requests

from lokg.errors import (
    DimensionMismatch,
    EmptyText,
    ProtocolError,
    ProviderUnavailable,
)
from lokg.providers.base import (
    EmbeddingVector,
    LanguageVerdict,
    ProviderConfig,
    TranslationResult,
)

PROTO_HEADER = {"X-LOKG-Proto": "1"}


class WireClient:
    def __init__(self, config: ProviderConfig, session=None, sleeper=time.sleep):
        if config.mode != "external":
            raise ValueError("WireClient requires an external-mode ProviderConfig")
        self.config = config
        self.session = session or requests.Session()
        self.sleeper = sleeper

    def post(self, path: str, payload: dict) -> dict:
        url = self.config.endpoint.rstrip("/") + path
        last_error = None
        for attempt in range(self.config.max_attempts):
            if attempt:
                self.sleeper(self.config.backoff_base_s * 2 ** (attempt - 1))
            try:
                resp = self.session.post(
                    url, json=payload, headers=PROTO_HEADER, timeout=self.config.timeout_s
                )
            except requests.RequestException as exc:
                last_error = f"{type(exc).__name__}: {exc}"
                continue
            if resp.status_code == 200:
                try:
                    return resp.json()
                except ValueError as exc:
                    raise ProtocolError(f"{url}: non-JSON 200 response") from exc
            if resp.status_code == 503:
                last_error = "503 model unavailable"
                continue
            if resp.status_code == 400:
                raise ProtocolError(f"{url}: 400 {resp.text[:200]}")
            raise ProtocolError(f"{url}: unexpected status {resp.status_code}")
        raise ProviderUnavailable(
            f"{url}: gave up after {self.config.max_attempts} attempts ({last_error})")


def _require_texts(texts):
    for t in texts:
        if not t:
            raise EmptyText("wire providers require non-empty texts")


class RemoteDetector:
    def __init__(self, config: ProviderConfig, **kw):
        self.client = WireClient(config, **kw)
        self.provider_tag = f"external:detect:{config.endpoint}"

    def detect_batch(self, texts: list[str]) -> list[LanguageVerdict]:
        _require_texts(texts)
        doc = self.client.post("/detect", {"texts": list(texts)})
        verdicts = doc.get("verdicts")
        if not isinstance(verdicts, list) or len(verdicts) != len(texts):
            raise ProtocolError("detect: verdict count does not match text count")
        return [LanguageVerdict(lang=v["lang"], confidence=v["confidence"]) for v in verdicts]

    def detect(self, text: str) -> LanguageVerdict:
        return self.detect_batch([text])[0]


class RemoteTranslator:
    def __init__(self, config: ProviderConfig, **kw):
        self.client = WireClient(config, **kw)
        self.provider_tag = f"external:translate:{config.endpoint}"

    def translate_batch(self, texts: list[str], source: str, target: str
                        ) -> list[TranslationResult]:
        _require_texts(texts)
        doc = self.client.post("/translate",
                               {"source": source, "target": target, "texts": list(texts)})
        out = doc.get("texts")
        if not isinstance(out, list) or len(out) != len(texts):
            raise ProtocolError("translate: text count does not match request")
        return [TranslationResult(text=t, source=source, target=target,
                                  translated_by="external") for t in out]

    def translate(self, text: str, source: str, target: str) -> TranslationResult:
        return self.translate_batch([text], source, target)[0]


class RemoteEmbedder:
    """Batching embed client; splits to ``batch_size`` and reassembles in order."""

    def __init__(self, config: ProviderConfig, jobs: int = 1, **kw):
        self.client = WireClient(config, **kw)
        self.config = config
        self.jobs = max(1, jobs)
        self.provider_tag = f"external:embed:{config.model_name or 'default'}"

    def _embed_chunk(self, texts: list[str]) -> list[EmbeddingVector]:
        doc = self.client.post("/embed",
                               {"model": self.config.model_name, "texts": list(texts)})
        vectors = doc.get("vectors")
        dim = doc.get("dim")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise ProtocolError("embed: vector count does not match text count")
        if not isinstance(dim, int):
            raise ProtocolError("embed: missing integer 'dim'")
        out = []
        for vec in vectors:
            if len(vec) != dim:
                raise DimensionMismatch(f"embed: vector of length {len(vec)}, dim says {dim}")
            out.append(EmbeddingVector(values=np.asarray(vec, dtype=np.float64),
                                       dim=dim, provider_tag=self.provider_tag))
        return out

    def embed_batch(self, texts: list[str]) -> list[EmbeddingVector]:
        _require_texts(texts)
        size = self.config.batch_size
        chunks = [texts[i:i + size] for i in range(0, len(texts), size)]
        if self.jobs > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(max_workers=self.jobs) as pool:
                results = list(pool.map(self._embed_chunk, chunks))
        else:
            results = [self._embed_chunk(chunk) for chunk in chunks]
        out = [v for chunk in results for v in chunk]
        dims = {v.dim for v in out}
        if len(dims) > 1:
            raise DimensionMismatch(f"embed: inconsistent dims across batches: {sorted(dims)}")
        return out

    def embed(self, text: str) -> EmbeddingVector:
        return self.embed_batch([text])[0]


def providers_from_config(detect: ProviderConfig, translate: ProviderConfig,
                          embed: ProviderConfig, jobs: int = 1):
    """Build the provider bundle the miner consumes, builtin or external per config."""
    from lokg.providers.builtin import BuiltinDetector, BuiltinEmbedder, BuiltinTranslator
    from lokg.tmp import Providers

    return Providers(
        detector=(BuiltinDetector() if detect.mode == "builtin"
                  else RemoteDetector(detect)),
        translator=(BuiltinTranslator(extra_lexicons=translate.extra_lexicons)
                    if translate.mode == "builtin" else RemoteTranslator(translate)),
        embedder=(BuiltinEmbedder() if embed.mode == "builtin"
                  else RemoteEmbedder(embed, jobs=jobs)),
    )

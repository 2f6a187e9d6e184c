"""Embedding model backends.

``st:<model-id>`` loads a sentence-transformers model when the environment
can provide one.  The default ``charproj-v1`` backend is a small torch
module (hashed character n-gram embedding bag + frozen seeded projection)
whose weights are materialized to disk on first use and loaded like any
model artifact afterwards; it is deterministic in eval mode and handles any
script, which is what the pipeline tests need from this sidecar.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import torch
from torch import nn

VOCAB_SIZE = 32768
BAG_DIM = 256
OUT_DIM = 384
WEIGHT_SEED = 20230501
_HASH_KEY = b"embed-service-v1"


def _bucket(feature: str) -> int:
    digest = hashlib.blake2b(feature.encode("utf-8"), digest_size=8, key=_HASH_KEY).digest()
    return int.from_bytes(digest, "big") % VOCAB_SIZE


def text_features(text: str) -> list[int]:
    t = " ".join(text.lower().split())
    grams = [t[i:i + n] for n in (3, 4) for i in range(max(len(t) - n + 1, 0))]
    grams += t.split(" ")
    return [_bucket(g) for g in grams if g]


class CharProjectionModel(nn.Module):
    """Hashed n-gram embedding bag with a frozen random projection head."""

    dim = OUT_DIM

    def __init__(self):
        super().__init__()
        self.bag = nn.EmbeddingBag(VOCAB_SIZE, BAG_DIM, mode="sum")
        self.proj = nn.Linear(BAG_DIM, OUT_DIM, bias=False)

    @classmethod
    def fresh(cls) -> "CharProjectionModel":
        generator = torch.Generator().manual_seed(WEIGHT_SEED)
        model = cls()
        with torch.no_grad():
            model.bag.weight.copy_(torch.randn(VOCAB_SIZE, BAG_DIM, generator=generator) / BAG_DIM**0.5)
            model.proj.weight.copy_(torch.randn(OUT_DIM, BAG_DIM, generator=generator) / BAG_DIM**0.5)
        return model

    def forward(self, batch: list[str]) -> torch.Tensor:
        # one text at a time: batched GEMM kernels differ from the single-row
        # one by an ulp, and a text must embed identically in any batch
        rows = []
        for text in batch:
            feats = text_features(text)
            if not feats:
                raise ValueError("text has no embeddable content")
            bag = self.bag(torch.tensor(feats, dtype=torch.long),
                           torch.tensor([0], dtype=torch.long))
            rows.append(self.proj(bag))
        return torch.cat(rows, dim=0)


class EmbeddingBackend:
    """Uniform (encode, dim, name) facade over the supported model kinds."""

    def __init__(self, model, dim: int, name: str, normalize: bool):
        self._model = model
        self.dim = dim
        self.name = name
        self.normalize = normalize

    @torch.no_grad()
    def encode(self, texts: list[str]) -> list[list[float]]:
        if isinstance(self._model, CharProjectionModel):
            vectors = self._model(texts)
        else:  # sentence-transformers
            vectors = torch.as_tensor(self._model.encode(texts, convert_to_numpy=True))
        vectors = vectors.to(torch.float32)
        if self.normalize:
            vectors = torch.nn.functional.normalize(vectors, dim=1)
        return [[float(x) for x in row] for row in vectors]


def load_backend(model: str, model_dir: str, device: str = "cpu",
                 normalize: bool = True) -> EmbeddingBackend:
    """Load (materializing first if needed) the configured model."""
    if model.startswith("st:"):
        from sentence_transformers import SentenceTransformer

        st_model = SentenceTransformer(model[3:], device=device)
        dim = st_model.get_sentence_embedding_dimension()
        return EmbeddingBackend(st_model, dim, model, normalize)
    if model == "charproj-v1":
        path = Path(model_dir) / "charproj-v1.pt"
        if not path.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
            torch.save(CharProjectionModel.fresh().state_dict(), path)
        instance = CharProjectionModel()
        instance.load_state_dict(torch.load(path, map_location=device))
        instance.eval()
        return EmbeddingBackend(instance, CharProjectionModel.dim, model, normalize)
    raise ValueError(f"unknown model {model!r}; use 'charproj-v1' or 'st:<model-id>'")

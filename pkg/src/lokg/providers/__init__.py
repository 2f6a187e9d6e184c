from lokg.providers.base import (
    EmbeddingVector,
    LanguageVerdict,
    ProviderConfig,
    TranslationResult,
    cosine,
)
from lokg.providers.builtin import (
    BUILTIN_EMBED_DIM,
    BUILTIN_EMBED_TAG,
    BuiltinDetector,
    BuiltinEmbedder,
    BuiltinTranslator,
    load_lexicon,
    stopwords,
)

__all__ = [
    "BUILTIN_EMBED_DIM",
    "BUILTIN_EMBED_TAG",
    "BuiltinDetector",
    "BuiltinEmbedder",
    "BuiltinTranslator",
    "EmbeddingVector",
    "LanguageVerdict",
    "ProviderConfig",
    "TranslationResult",
    "cosine",
    "load_lexicon",
    "stopwords",
]

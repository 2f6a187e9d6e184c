"""lokg: contextual knowledge graphs from hierarchical learning-object taxonomies."""

__version__ = "0.1.0"

"""Use-case component extraction and evaluation workbench.

Extracts the seven use-case components (name, goal, user, system, external
entities, data practices, steps) from first-person mobile-app scenarios via a
chat model, parses the free-text answers back into structured records, and
scores them against human annotations with exact-match, token-F1, and
embedding-similarity metrics. Ships a CLI, an HTTP service for annotation and
inspection, and bundled sample data so every pipeline runs offline.
"""

__version__ = "0.1.0"

from uccx.components import ComponentKind, UCComponents

__all__ = ["ComponentKind", "UCComponents", "__version__"]

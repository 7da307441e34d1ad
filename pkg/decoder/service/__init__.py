from .decoder import (
    grouping_scores,
    semantic_scores,
    query_features,
    momentum_update,
    classifier_self_attention,
    score_heads,
    decode,
)

__all__ = [
    "grouping_scores",
    "semantic_scores",
    "query_features",
    "momentum_update",
    "classifier_self_attention",
    "score_heads",
    "decode",
]

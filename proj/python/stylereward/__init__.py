"""Style-intensity rewards, judges and metrics."""

from ._core import (
    EmbeddingTable,
    Engine,
    NaiveBayes,
    PivotModel,
    StyleRewardError,
    consistency_reward,
    count_syllables,
    fre_delta,
    fre_score,
    lcs_length,
    rouge_l,
    sha256_hex,
    tokenize,
)

__all__ = [
    "EmbeddingTable",
    "Engine",
    "NaiveBayes",
    "PivotModel",
    "StyleRewardError",
    "consistency_reward",
    "count_syllables",
    "fre_delta",
    "fre_score",
    "lcs_length",
    "rouge_l",
    "sha256_hex",
    "tokenize",
]

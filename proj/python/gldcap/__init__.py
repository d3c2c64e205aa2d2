"""Fine-grained caption rewards and toy training."""

from gldcap._core import (
    Corpus,
    Policy,
    ToyWorld,
    WeightTable,
    __version__,
    bleu,
    build_weight_table,
    cider,
    evaluate,
    reward_trace,
    rouge_l,
    select_fine_grained,
    tfidf,
    tokenize,
    train_toy,
    word_increments,
    word_rewards,
)

__all__ = [
    "Corpus",
    "Policy",
    "ToyWorld",
    "WeightTable",
    "__version__",
    "bleu",
    "build_weight_table",
    "cider",
    "evaluate",
    "reward_trace",
    "rouge_l",
    "select_fine_grained",
    "tfidf",
    "tokenize",
    "train_toy",
    "word_increments",
    "word_rewards",
]

"""Python front end for the mrc reading comprehension toolkit."""

from ._mrc_toolkit import (
    DataError,
    NumericError,
    ShapeError,
    UsageError,
    evaluate,
    exact_match,
    gen_data,
    gradcheck,
    joint_loss,
    mem_att,
    normalize_answer,
    sampling_probs,
    token_f1,
    train,
)

__all__ = [
    "DataError",
    "NumericError",
    "ShapeError",
    "UsageError",
    "evaluate",
    "exact_match",
    "gen_data",
    "gradcheck",
    "joint_loss",
    "mem_att",
    "normalize_answer",
    "sampling_probs",
    "token_f1",
    "train",
]

"""Array-in/array-out bridge from kmo-match to ML training loops.

Wraps the core point/dataclass API in two stateless functions over plain
numpy arrays: match_arrays assigns ground truths to predictions, and
eval_arrays scores a prediction set. Both delegate every computation to
kmo-match, so results are the core's results.
"""
from .bridge import ArrayBatch, eval_arrays, match_arrays

__version__ = "0.1.0"

__all__ = ["ArrayBatch", "match_arrays", "eval_arrays", "__version__"]

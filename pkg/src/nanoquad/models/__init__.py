from .windows import Normalizer, WindowDataset, make_windows
from .baselines import (
    FFParams,
    RecurrentParams,
    naive_predict,
    ff_residual_predict,
    recurrent_predict,
    hybrid_predict,
)
from .accounting import count_params_flops
from .training import train

__all__ = [
    "Normalizer",
    "WindowDataset",
    "make_windows",
    "FFParams",
    "RecurrentParams",
    "naive_predict",
    "ff_residual_predict",
    "recurrent_predict",
    "hybrid_predict",
    "count_params_flops",
    "train",
]

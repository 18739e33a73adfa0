"""Approximate nearest-neighbour search over polygonal curves under the Frechet distance."""

from ._fann import (
    Corpus,
    FannError,
    Index,
    Ladder,
    brute_force_nn,
    discrete_frechet,
    frechet_decide,
    frechet_value,
)

__all__ = [
    "Corpus",
    "FannError",
    "Index",
    "Ladder",
    "brute_force_nn",
    "discrete_frechet",
    "frechet_decide",
    "frechet_value",
]

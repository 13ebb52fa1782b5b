"""Python interface to the psiart engine."""

import json
import os

from . import _core
from ._core import Error, load_image, sample_input, save_png, write_fixtures

__all__ = [
    "Engine",
    "Error",
    "extract_features",
    "load_image",
    "sample_input",
    "save_png",
    "som_train",
    "write_fixtures",
]


def extract_features(image, canvas_size=None):
    """Feature bundle of an (H, W, 3) uint8 patch as a dict of lists."""
    w, h = canvas_size if canvas_size else (0, 0)
    return json.loads(_core.extract_features(image, w, h))


def som_train(samples, grid=(8, 8), epochs=50, seed=1):
    """Returns (weights, initial_qe, final_qe)."""
    return _core.som_train(samples, grid[0], grid[1], epochs, seed)


class Engine:
    def __init__(self, store, config=None):
        self._engine = _core.Engine(os.fspath(store), None if config is None else os.fspath(config))

    def train(self, datasets, seed=None):
        return json.loads(self._engine.train(os.fspath(datasets), seed))

    def create(self, image, seed=1, target=""):
        """`image` is a path or an (H, W, 3) uint8 array."""
        if isinstance(image, os.PathLike):
            image = os.fspath(image)
        return json.loads(self._engine.create(image, seed, target))

    def rate(self, artwork_id, rating, rater="anonymous"):
        return json.loads(self._engine.rate(artwork_id, rating, rater))

    def agent_state(self):
        return json.loads(self._engine.agent_state())

    def catalog(self):
        return json.loads(self._engine.catalog())

    def artwork(self, artwork_id):
        return json.loads(self._engine.artwork(artwork_id))

import numpy as np
import pytest

from freres import LatentSequence


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_sequence(rng, frames=16, grid=(24, 24), dim=8, fps=0.0) -> LatentSequence:
    h, w = grid
    return LatentSequence(frames=rng.normal(size=(frames, h, w, dim)).astype(np.float32), fps=fps)

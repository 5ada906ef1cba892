import sys
from pathlib import Path

import numpy as np
import pytest

# Test helpers (oracles, stl_reader) live next to the tests.
sys.path.insert(0, str(Path(__file__).parent))

from cesurf import GrayImage, RasterImage


@pytest.fixture
def rng():
    return np.random.default_rng(20260813)


@pytest.fixture
def random_gray(rng):
    def make(h=8, w=8, lo=0.0, hi=255.0):
        return GrayImage(rng.uniform(lo, hi, size=(h, w)))

    return make


@pytest.fixture
def random_rgb(rng):
    def make(h=8, w=8):
        return RasterImage(rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8))

    return make
